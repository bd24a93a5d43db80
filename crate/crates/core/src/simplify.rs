//! On-demand curve simplification through a balanced tree of prefix values.
//!
//! The μ-simplification of a curve keeps vertex `i`, then repeatedly jumps
//! from the last kept vertex `x` to the first vertex `y` with
//! `ℓ(P[x, y]) > μ` (strictly — ties do not advance), and always keeps the
//! final vertex `j`. Enumerating it lazily needs one *successor* query per
//! reported vertex: given `x`, find the smallest `y` whose prefix length
//! exceeds `λ_x + μ`.
//!
//! [`SimplificationTree`] answers that in O(log n). Its leaves hold, in
//! curve order, the curve's **stored prefix value at each edge's right
//! endpoint** — the exact floats the curve itself carries — and every
//! internal node caches the maximum value below it. A successor descent
//! compares `λ_x + μ` against those caches; no stored quantity is ever
//! produced by tree-shaped re-addition. That discipline matters: summing
//! edge widths inside the tree rounds differently from the curve's own
//! sequential prefix sums, and an ulp of disagreement at `μ = 0` would make
//! the "first vertex strictly beyond" query return the current vertex
//! itself. With raw prefixes the leaf values are non-decreasing, every
//! qualifying leaf lies strictly right of `x`, and the tree agrees with a
//! linear scan bit for bit on any input.
//!
//! Because the curve is dynamic only at its two ends, the tree needs
//! insertion and deletion at the leftmost and rightmost leaf positions
//! only; both are single root-to-end-spine walks with AVL rebalancing.
//! Head extensions do not rewrite any stored value — the curve keeps its
//! prefixes raw and lets an origin offset absorb the shift (see
//! [`crate::curve::Curve::prefix_len`]), so the raw values the leaves
//! mirror are stable under updates at either end.

use crate::curve::Curve;
use crate::oracle::AmbientPoint;
use crate::{Error, Result};

/// Which end of the curve an update touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Head,
    Tail,
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Leaf {
        /// Raw stored prefix of the edge's right endpoint.
        value: f64,
    },
    Inner {
        left: u32,
        right: u32,
        /// Largest leaf value in this subtree, recomputed from children by
        /// comparison only — never by arithmetic.
        max: f64,
        height: u8,
        leaves: u32,
    },
}

/// Height-balanced max-tree over the curve's prefix values; leaves are
/// edges in curve order.
#[derive(Debug, Clone)]
pub struct SimplificationTree {
    nodes: Vec<Node>,
    root: Option<u32>,
    free: Vec<u32>,
}

impl SimplificationTree {
    /// Empty tree (the right shape for a 1-vertex curve).
    pub fn new() -> Self {
        SimplificationTree {
            nodes: Vec::new(),
            root: None,
            free: Vec::new(),
        }
    }

    /// Balanced build from leaf values in curve order.
    pub fn from_values(values: &[f64]) -> Self {
        let mut t = SimplificationTree::new();
        if !values.is_empty() {
            let root = t.build_range(values);
            t.root = Some(root);
        }
        t
    }

    fn build_range(&mut self, values: &[f64]) -> u32 {
        if values.len() == 1 {
            return self.alloc(Node::Leaf { value: values[0] });
        }
        let mid = values.len() / 2;
        let left = self.build_range(&values[..mid]);
        let right = self.build_range(&values[mid..]);
        let id = self.alloc(Node::Inner {
            left,
            right,
            max: 0.0,
            height: 0,
            leaves: 0,
        });
        self.pull_up(id);
        id
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn release(&mut self, id: u32) {
        self.free.push(id);
    }

    fn max(&self, id: u32) -> f64 {
        match self.nodes[id as usize] {
            Node::Leaf { value } => value,
            Node::Inner { max, .. } => max,
        }
    }

    fn height(&self, id: u32) -> u8 {
        match self.nodes[id as usize] {
            Node::Leaf { .. } => 0,
            Node::Inner { height, .. } => height,
        }
    }

    fn leaves(&self, id: u32) -> u32 {
        match self.nodes[id as usize] {
            Node::Leaf { .. } => 1,
            Node::Inner { leaves, .. } => leaves,
        }
    }

    /// Recompute an inner node's aggregates from its children.
    fn pull_up(&mut self, id: u32) {
        let Node::Inner { left, right, .. } = self.nodes[id as usize] else {
            return;
        };
        let (lm, rm) = (self.max(left), self.max(right));
        let max = if lm.total_cmp(&rm).is_ge() { lm } else { rm };
        let height = 1 + self.height(left).max(self.height(right));
        let leaves = self.leaves(left) + self.leaves(right);
        let Node::Inner {
            max: m,
            height: h,
            leaves: l,
            ..
        } = &mut self.nodes[id as usize]
        else {
            unreachable!()
        };
        (*m, *h, *l) = (max, height, leaves);
    }

    fn children(&self, id: u32) -> (u32, u32) {
        let Node::Inner { left, right, .. } = self.nodes[id as usize] else {
            panic!("leaf has no children")
        };
        (left, right)
    }

    fn set_children(&mut self, id: u32, l: u32, r: u32) {
        let Node::Inner { left, right, .. } = &mut self.nodes[id as usize] else {
            panic!("leaf has no children")
        };
        (*left, *right) = (l, r);
    }

    /// Rotate the subtree at `id` left; returns the new subtree root.
    fn rotate_left(&mut self, id: u32) -> u32 {
        let (l, r) = self.children(id);
        let (rl, rr) = self.children(r);
        self.set_children(id, l, rl);
        self.pull_up(id);
        self.set_children(r, id, rr);
        self.pull_up(r);
        r
    }

    fn rotate_right(&mut self, id: u32) -> u32 {
        let (l, r) = self.children(id);
        let (ll, lr) = self.children(l);
        self.set_children(id, lr, r);
        self.pull_up(id);
        self.set_children(l, ll, id);
        self.pull_up(l);
        l
    }

    /// AVL rebalance after a child of `id` changed; `id`'s aggregates must
    /// already be current. Returns the subtree's (possibly new) root.
    fn rebalance(&mut self, id: u32) -> u32 {
        let Node::Inner { left, right, .. } = self.nodes[id as usize] else {
            return id;
        };
        let bf = self.height(left) as i32 - self.height(right) as i32;
        if bf > 1 {
            let (ll, lr) = self.children(left);
            if self.height(ll) < self.height(lr) {
                let new_left = self.rotate_left(left);
                self.set_children(id, new_left, right);
                self.pull_up(id);
            }
            self.rotate_right(id)
        } else if bf < -1 {
            let (rl, rr) = self.children(right);
            if self.height(rr) < self.height(rl) {
                let new_right = self.rotate_right(right);
                self.set_children(id, left, new_right);
                self.pull_up(id);
            }
            self.rotate_left(id)
        } else {
            id
        }
    }

    fn insert_end(&mut self, id: u32, leaf: u32, tail: bool) -> u32 {
        if matches!(self.nodes[id as usize], Node::Leaf { .. }) {
            let (l, r) = if tail { (id, leaf) } else { (leaf, id) };
            let inner = self.alloc(Node::Inner {
                left: l,
                right: r,
                max: 0.0,
                height: 0,
                leaves: 0,
            });
            self.pull_up(inner);
            return inner;
        }
        let (l, r) = self.children(id);
        if tail {
            let nr = self.insert_end(r, leaf, tail);
            self.set_children(id, l, nr);
        } else {
            let nl = self.insert_end(l, leaf, tail);
            self.set_children(id, nl, r);
        }
        self.pull_up(id);
        self.rebalance(id)
    }

    fn remove_end(&mut self, id: u32, tail: bool) -> (Option<u32>, f64) {
        if let Node::Leaf { value } = self.nodes[id as usize] {
            self.release(id);
            return (None, value);
        }
        let (l, r) = self.children(id);
        let child = if tail { r } else { l };
        let other = if tail { l } else { r };
        let (replacement, value) = self.remove_end(child, tail);
        match replacement {
            None => {
                // The end child was a leaf; its sibling takes this slot.
                self.release(id);
                (Some(other), value)
            }
            Some(c) => {
                if tail {
                    self.set_children(id, l, c);
                } else {
                    self.set_children(id, c, r);
                }
                self.pull_up(id);
                (Some(self.rebalance(id)), value)
            }
        }
    }

    /// Append a leaf value at the tail end.
    pub fn push_tail(&mut self, value: f64) {
        let leaf = self.alloc(Node::Leaf { value });
        self.root = Some(match self.root {
            None => leaf,
            Some(r) => self.insert_end(r, leaf, true),
        });
    }

    /// Prepend a leaf value at the head end.
    pub fn push_head(&mut self, value: f64) {
        let leaf = self.alloc(Node::Leaf { value });
        self.root = Some(match self.root {
            None => leaf,
            Some(r) => self.insert_end(r, leaf, false),
        });
    }

    /// Remove the tail leaf; `None` on an empty tree.
    pub fn pop_tail(&mut self) -> Option<f64> {
        let r = self.root?;
        let (root, value) = self.remove_end(r, true);
        self.root = root;
        Some(value)
    }

    /// Remove the head leaf; `None` on an empty tree.
    pub fn pop_head(&mut self) -> Option<f64> {
        let r = self.root?;
        let (root, value) = self.remove_end(r, false);
        self.root = root;
        Some(value)
    }

    /// Number of leaves (= edges of the companion curve).
    pub fn leaf_count(&self) -> usize {
        self.root.map_or(0, |r| self.leaves(r) as usize)
    }

    /// Leaf values in curve order (in-order walk), for audits.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.leaf_count());
        let mut stack = Vec::new();
        if let Some(r) = self.root {
            stack.push(r);
        }
        while let Some(id) = stack.pop() {
            match self.nodes[id as usize] {
                Node::Leaf { value } => out.push(value),
                Node::Inner { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    /// Smallest 0-based leaf index `t` whose value strictly exceeds
    /// `target`, with the number of nodes visited. `None` when no leaf
    /// exceeds it. Leaf values are non-decreasing, so "first above" is a
    /// single descent on the max caches.
    pub(crate) fn first_prefix_above(&self, target: f64) -> (Option<usize>, u32) {
        let Some(root) = self.root else {
            return (None, 0);
        };
        let mut visits = 1u32;
        if self.max(root).total_cmp(&target).is_le() {
            return (None, visits);
        }
        let mut id = root;
        let mut skipped = 0usize; // leaves left of the current subtree
        loop {
            match self.nodes[id as usize] {
                Node::Leaf { .. } => return (Some(skipped), visits),
                Node::Inner { left, right, .. } => {
                    visits += 1;
                    if self.max(left) > target {
                        id = left;
                    } else {
                        skipped += self.leaves(left) as usize;
                        id = right;
                    }
                }
            }
        }
    }

    /// Structural self-check: aggregate caches match children bit for bit,
    /// leaf values never decrease in curve order, and every node satisfies
    /// the AVL balance bound.
    pub fn check_integrity(&self) -> Result<()> {
        fn walk(t: &SimplificationTree, id: u32, prev: &mut Option<f64>) -> Result<(f64, u8, u32)> {
            match t.nodes[id as usize] {
                Node::Leaf { value } => {
                    if let Some(p) = *prev {
                        if value < p {
                            return Err(Error::Contract(format!(
                                "leaf order violated: {value} after {p}"
                            )));
                        }
                    }
                    *prev = Some(value);
                    Ok((value, 0, 1))
                }
                Node::Inner {
                    left,
                    right,
                    max,
                    height,
                    leaves,
                } => {
                    let (lm, lh, ll) = walk(t, left, prev)?;
                    let (rm, rh, rl) = walk(t, right, prev)?;
                    let expect = if lm.total_cmp(&rm).is_ge() { lm } else { rm };
                    if expect.to_bits() != max.to_bits() {
                        return Err(Error::Contract(format!(
                            "node {id}: cached max {max} != children max {expect}"
                        )));
                    }
                    if height != 1 + lh.max(rh) || leaves != ll + rl {
                        return Err(Error::Contract(format!("node {id}: stale aggregates")));
                    }
                    if (lh as i32 - rh as i32).abs() > 1 {
                        return Err(Error::Contract(format!("node {id}: unbalanced")));
                    }
                    Ok((max, height, leaves))
                }
            }
        }
        if let Some(r) = self.root {
            walk(self, r, &mut None)?;
        }
        Ok(())
    }
}

impl Default for SimplificationTree {
    fn default() -> Self {
        Self::new()
    }
}

/// Build the simplification tree matching `curve`: leaf `t` mirrors the
/// curve's stored prefix at vertex `t+2` (the right endpoint of edge `t+1`).
pub fn build_tree(curve: &Curve) -> SimplificationTree {
    let values: Vec<f64> = (2..=curve.n()).map(|i| curve.prefix_raw(i)).collect();
    SimplificationTree::from_values(&values)
}

/// A μ-simplification of a contiguous curve range.
#[derive(Debug, Clone)]
pub struct SimplifiedView {
    /// Kept vertex indices (1-based, ascending, starts at `i`; ends at `j`
    /// unless `truncated`).
    pub indices: Vec<usize>,
    /// The μ this view was computed for.
    pub mu: f64,
    /// True when enumeration stopped at the caller's cap before reaching `j`.
    pub truncated: bool,
    /// Tree nodes visited, for complexity audits.
    pub node_visits: u64,
}

fn check_pairing(tree: &SimplificationTree, curve: &Curve) -> Result<()> {
    if tree.leaf_count() + 1 != curve.n() {
        return Err(Error::Contract(format!(
            "tree with {} leaves does not match curve with {} vertices",
            tree.leaf_count(),
            curve.n()
        )));
    }
    Ok(())
}

/// Enumerate the μ-simplification of `P[i, j]`.
///
/// # Arguments
/// * `mu` — simplification width, ≥ 0.
/// * `cap` — optional bound on reported vertices; hitting it sets
///   `truncated` and stops early.
///
/// # Complexity
/// O(k log n) for k reported vertices: one root-to-leaf descent each.
pub fn simplify(
    tree: &SimplificationTree,
    curve: &Curve,
    mu: f64,
    i: usize,
    j: usize,
    cap: Option<usize>,
) -> Result<SimplifiedView> {
    check_pairing(tree, curve)?;
    curve.check_range(i, j)?;
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::Contract(format!(
            "mu must be finite and ≥ 0, got {mu}"
        )));
    }
    let mut view = SimplifiedView {
        indices: vec![i],
        mu,
        truncated: false,
        node_visits: 0,
    };
    if i == j {
        return Ok(view);
    }
    let mut x = i;
    loop {
        if cap.is_some_and(|c| view.indices.len() >= c) {
            view.truncated = true;
            return Ok(view);
        }
        let target = curve.prefix_raw(x) + mu;
        let (leaf, visits) = tree.first_prefix_above(target);
        view.node_visits += visits as u64;
        // Leaf t holds the prefix at vertex t+2; values left of leaf x−1
        // are ≤ prefix(x) ≤ target, so y > x always.
        let y = leaf.map_or(usize::MAX, |t| t + 2);
        if y >= j {
            view.indices.push(j);
            return Ok(view);
        }
        view.indices.push(y);
        x = y;
    }
}

/// Attach a vertex at an end of the curve/tree pair.
///
/// `new_edge_length` is the perceived distance between the new vertex and
/// the current end vertex, as the caller's oracle measures it.
pub fn extend(
    tree: &mut SimplificationTree,
    curve: &mut Curve,
    end: End,
    new_point: AmbientPoint,
    new_edge_length: f64,
) -> Result<()> {
    check_pairing(tree, curve)?;
    curve.space().admit(&new_point)?;
    if !new_edge_length.is_finite() || new_edge_length < 0.0 {
        return Err(Error::NonFinite(format!(
            "new edge length must be finite and ≥ 0, got {new_edge_length}"
        )));
    }
    match end {
        End::Tail => {
            curve.attach_tail(new_point, new_edge_length);
            // New leaf mirrors the freshly stored prefix of the new tail.
            tree.push_tail(curve.prefix_raw(curve.n()));
        }
        End::Head => {
            curve.attach_head(new_point, new_edge_length);
            // The new edge's right endpoint is the old head, whose stored
            // prefix did not move.
            tree.push_head(curve.prefix_raw(2));
        }
    }
    Ok(())
}

/// Remove the vertex at an end of the curve/tree pair.
///
/// # Returns
/// [`Error::Contract`] underflow if the curve has a single vertex.
pub fn truncate(tree: &mut SimplificationTree, curve: &mut Curve, end: End) -> Result<()> {
    check_pairing(tree, curve)?;
    if curve.n() == 1 {
        return Err(Error::Contract(
            "cannot truncate a single-vertex curve".into(),
        ));
    }
    match end {
        End::Tail => {
            curve.detach_tail();
            tree.pop_tail();
        }
        End::Head => {
            curve.detach_head();
            tree.pop_head();
        }
    }
    Ok(())
}

/// Reference simplification by linear scan, for tests and audits. Uses the
/// same raw-prefix predicate as the tree, so the two agree bit for bit.
pub fn simplify_linear(curve: &Curve, mu: f64, i: usize, j: usize) -> Vec<usize> {
    let mut out = vec![i];
    if i == j {
        return out;
    }
    let mut x = i;
    loop {
        let target = curve.prefix_raw(x) + mu;
        let mut next = None;
        for y in x + 1..=j {
            if curve.prefix_raw(y) > target {
                next = Some(y);
                break;
            }
        }
        match next {
            Some(y) if y < j => {
                out.push(y);
                x = y;
            }
            _ => {
                out.push(j);
                return out;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_curve, point};
    use crate::oracle::{euclidean_oracle, PNorm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line_curve(xs: &[f64]) -> Curve {
        let o = euclidean_oracle(1, PNorm::L2);
        build_curve(xs.iter().map(|x| point(&[*x])).collect(), o.as_ref()).unwrap()
    }

    #[test]
    fn test_tree_shapes_for_tiny_curves() {
        assert_eq!(SimplificationTree::from_values(&[]).leaf_count(), 0);
        let one = SimplificationTree::from_values(&[4.0]);
        assert_eq!(one.leaf_count(), 1);
        assert_eq!(one.values(), vec![4.0]);
        let three = SimplificationTree::from_values(&[1.0, 2.0, 7.0]);
        assert_eq!(three.leaf_count(), 3);
        assert_eq!(three.values(), vec![1.0, 2.0, 7.0]);
        three.check_integrity().unwrap();
    }

    #[test]
    fn test_tree_mirrors_curve_prefixes() {
        let c = line_curve(&[0.0, 1.0, 2.0, 3.0, 10.0]);
        let t = build_tree(&c);
        let expect: Vec<f64> = (2..=5).map(|i| c.prefix_raw(i)).collect();
        assert_eq!(t.values(), expect);
        t.check_integrity().unwrap();
    }

    #[test]
    fn test_simplify_hand_example() {
        let c = line_curve(&[0.0, 1.0, 2.0, 3.0, 10.0]);
        let t = build_tree(&c);
        let view = simplify(&t, &c, 2.5, 1, 5, None).unwrap();
        assert_eq!(view.indices, vec![1, 4, 5]);
        assert!(!view.truncated);
    }

    #[test]
    fn test_simplify_extremes() {
        let c = line_curve(&[0.0, 1.0, 2.0, 3.0, 10.0]);
        let t = build_tree(&c);
        // μ = 0 keeps every vertex of a curve with distinct points.
        assert_eq!(
            simplify(&t, &c, 0.0, 1, 5, None).unwrap().indices,
            vec![1, 2, 3, 4, 5]
        );
        // μ ≥ total length keeps only the endpoints.
        assert_eq!(
            simplify(&t, &c, 10.0, 1, 5, None).unwrap().indices,
            vec![1, 5]
        );
        assert_eq!(
            simplify(&t, &c, 99.0, 1, 5, None).unwrap().indices,
            vec![1, 5]
        );
        // Single-vertex range.
        assert_eq!(simplify(&t, &c, 1.0, 3, 3, None).unwrap().indices, vec![3]);
    }

    #[test]
    fn test_simplify_strict_inequality_on_ties() {
        // Edge lengths exactly 1; μ = 1 must NOT advance on a tie: the
        // first vertex with length strictly above 1 is two steps away.
        let c = line_curve(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let t = build_tree(&c);
        assert_eq!(
            simplify(&t, &c, 1.0, 1, 5, None).unwrap().indices,
            vec![1, 3, 5]
        );
    }

    #[test]
    fn test_simplify_skips_duplicate_vertices_at_mu_zero() {
        let c = line_curve(&[0.0, 0.0, 1.0, 1.0, 2.0]);
        let t = build_tree(&c);
        assert_eq!(
            simplify(&t, &c, 0.0, 1, 5, None).unwrap().indices,
            vec![1, 3, 5]
        );
    }

    #[test]
    fn test_simplify_cap_truncates() {
        let c = line_curve(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let t = build_tree(&c);
        let view = simplify(&t, &c, 0.5, 1, 6, Some(3)).unwrap();
        assert_eq!(view.indices, vec![1, 2, 3]);
        assert!(view.truncated);
        // A cap that is not reached leaves the view complete.
        let view = simplify(&t, &c, 0.5, 1, 6, Some(60)).unwrap();
        assert_eq!(view.indices, vec![1, 2, 3, 4, 5, 6]);
        assert!(!view.truncated);
    }

    #[test]
    fn test_simplify_matches_linear_scan_on_random_curves() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for round in 0..300 {
            let n = rng.gen_range(1..=40);
            let pts: Vec<_> = (0..n)
                .map(|_| point(&[rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)]))
                .collect();
            let c = build_curve(pts, o.as_ref()).unwrap();
            let t = build_tree(&c);
            let i = rng.gen_range(1..=n);
            let j = rng.gen_range(i..=n);
            let mu = rng.gen_range(0.0..c.total_length() * 1.2 + 0.1);
            let fast = simplify(&t, &c, mu, i, j, None).unwrap();
            let slow = simplify_linear(&c, mu, i, j);
            assert_eq!(
                fast.indices, slow,
                "round {round}: n={n} i={i} j={j} mu={mu}"
            );
        }
    }

    #[test]
    fn test_simplify_at_mu_zero_keeps_every_distinct_vertex() {
        // The regression this module's design guards against: μ = 0 on a
        // random-float curve must enumerate 1..=n, never stall.
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let n = rng.gen_range(2..=60);
            let pts: Vec<_> = (0..n)
                .map(|_| point(&[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]))
                .collect();
            let c = build_curve(pts, o.as_ref()).unwrap();
            let t = build_tree(&c);
            let view = simplify(&t, &c, 0.0, 1, n, None).unwrap();
            assert_eq!(view.indices, (1..=n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn test_node_visits_stay_logarithmic() {
        let o = euclidean_oracle(1, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for &n in &[2usize, 17, 64, 257, 1024] {
            let pts: Vec<_> = (0..n)
                .map(|_| point(&[rng.gen_range(-100.0..100.0)]))
                .collect();
            let c = build_curve(pts, o.as_ref()).unwrap();
            let t = build_tree(&c);
            let mu = c.total_length() / 7.0;
            let view = simplify(&t, &c, mu, 1, n, None).unwrap();
            let per_vertex = 2 * (n as f64).log2().ceil() as u64 + 4;
            assert!(
                view.node_visits <= view.indices.len() as u64 * per_vertex,
                "n={n}: {} visits for {} vertices",
                view.node_visits,
                view.indices.len()
            );
        }
    }

    #[test]
    fn test_dynamic_updates_match_rebuilt_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..60 {
            let mut c = line_curve(&[0.0, 1.0]);
            let mut t = build_tree(&c);
            for _ in 0..rng.gen_range(1..40) {
                match rng.gen_range(0..4) {
                    0 => {
                        let step = rng.gen_range(0.1..2.0);
                        let hi = c.pt(c.n()).coords().unwrap()[0];
                        extend(&mut t, &mut c, End::Tail, point(&[hi + step]), step).unwrap();
                    }
                    1 => {
                        let step = rng.gen_range(0.1..2.0);
                        let lo = c.pt(1).coords().unwrap()[0];
                        extend(&mut t, &mut c, End::Head, point(&[lo - step]), step).unwrap();
                    }
                    2 if c.n() > 1 => {
                        truncate(&mut t, &mut c, End::Tail).unwrap();
                    }
                    _ if c.n() > 1 => {
                        truncate(&mut t, &mut c, End::Head).unwrap();
                    }
                    _ => {}
                }
                t.check_integrity().unwrap();
            }
            // The updated tree mirrors the curve's raw prefixes exactly
            // and answers like a from-scratch tree.
            let expect: Vec<f64> = (2..=c.n()).map(|i| c.prefix_raw(i)).collect();
            assert_eq!(t.values(), expect, "round {round}");
            let fresh = build_tree(&c);
            let mu = rng.gen_range(0.0..c.total_length() + 0.5);
            let a = simplify(&t, &c, mu, 1, c.n(), None).unwrap();
            let b = simplify(&fresh, &c, mu, 1, c.n(), None).unwrap();
            assert_eq!(a.indices, b.indices, "round {round}");
            assert_eq!(
                a.indices,
                simplify_linear(&c, mu, 1, c.n()),
                "round {round}"
            );
        }
    }

    #[test]
    fn test_head_extension_uses_offset_not_rewrites() {
        let mut c = line_curve(&[0.0, 1.0]);
        let mut t = build_tree(&c);
        let before = t.values();
        extend(&mut t, &mut c, End::Head, point(&[-5.0]), 5.0).unwrap();
        assert_eq!(c.prefix_len(1), 0.0);
        assert_eq!(c.prefix_len(2), 5.0);
        assert_eq!(c.prefix_len(3), 6.0);
        // The pre-existing leaf kept its stored value verbatim.
        assert_eq!(t.values()[1..], before[..]);
        assert_eq!(
            simplify(&t, &c, 4.0, 1, 3, None).unwrap().indices,
            vec![1, 2, 3]
        );
        assert_eq!(
            simplify(&t, &c, 5.0, 1, 3, None).unwrap().indices,
            vec![1, 3]
        );
    }

    #[test]
    fn test_truncate_underflow_is_an_error() {
        let mut c = line_curve(&[0.0, 2.0]);
        let mut t = build_tree(&c);
        truncate(&mut t, &mut c, End::Tail).unwrap();
        assert_eq!(c.n(), 1);
        assert!(truncate(&mut t, &mut c, End::Tail).is_err());
        assert!(truncate(&mut t, &mut c, End::Head).is_err());
    }

    #[test]
    fn test_mismatched_tree_and_curve_rejected() {
        let c = line_curve(&[0.0, 1.0, 2.0]);
        let wrong = SimplificationTree::from_values(&[1.0]);
        assert!(simplify(&wrong, &c, 0.5, 1, 3, None).is_err());
    }
}
