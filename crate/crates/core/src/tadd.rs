//! Tolerant approximate distance digests (TADDs).
//!
//! A TADD summarizes the multiset of pairwise distances of a point set by
//! a sorted list of values `c_1 < c_2 < …` such that every positive
//! pairwise distance lies in some interval `[c_s, 2·c_s]`. Query engines
//! use these intervals as the only candidate scales a distance value can
//! live at, which is what lets a value query run O(log) many decision
//! probes instead of a parametric search.
//!
//! Two digests are built per preprocessed curve:
//!
//! * the **1-D TADD** over the prefix lengths `λ_i = ℓ(P[1, i])` — the
//!   pairwise differences are exactly the subcurve lengths `ℓ(P[x, y])`;
//! * the **ambient TADD** over the vertex positions themselves (used by
//!   the Hausdorff engine).
//!
//! Both Euclidean digests come from a fair-split-tree well-separated pair
//! decomposition with separation 2: a pair of boxes `(A, B)` is emitted
//! when `dmin(A, B) ≥ 2·max(diam A, diam B)`, which pins every cross
//! distance into `[dmin, 2·dmin]`. Graph-metric point sets fall back to a
//! greedy interval cover of the explicit all-pairs distance list.
//! Exact-duplicate points (distance 0) are exempt from coverage.
//!
//! Builds are deterministic: the same logical input yields bit-identical
//! `c` values. After a curve update the digest is rebuilt from scratch
//! from the canonical edge list — see [`rebuild_after_update`] — so a
//! dynamically maintained curve and a freshly preprocessed copy answer
//! queries identically, bit for bit.

use crate::curve::Curve;
use crate::oracle::{lp_distance, DistanceOracle, PNorm, Space};
use crate::{Error, Result};

/// Sorted candidate scales; each `c` stands for the interval `[c, 2c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaddIntervals {
    pub c_values: Vec<f64>,
}

impl TaddIntervals {
    pub fn len(&self) -> usize {
        self.c_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_values.is_empty()
    }
}

/// Where a scaled interval came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalSource {
    /// The degenerate `[0, 0]` interval: "the distance may be zero".
    Sentinel,
    /// Scaled from a digest value `c`.
    Tadd { c: f64 },
    /// Scaled from a query-time anchor (the directed distance λ in
    /// Hausdorff value queries).
    QueryAnchor,
}

/// One candidate interval for a value query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledInterval {
    pub lo: f64,
    pub hi: f64,
    pub source: IntervalSource,
}

/// Candidate intervals for one value query, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledIntervalSet {
    pub intervals: Vec<ScaledInterval>,
}

// ───────────────────────── fair split tree WSPD ─────────────────────────

struct SplitTree<'a> {
    pts: &'a [Vec<f64>],
    norm: PNorm,
    /// Point indices, permuted so every node owns a contiguous range.
    perm: Vec<u32>,
    nodes: Vec<SplitNode>,
}

struct SplitNode {
    bb_min: Vec<f64>,
    bb_max: Vec<f64>,
    diam: f64,
    children: Option<(usize, usize)>,
}

impl<'a> SplitTree<'a> {
    fn build(pts: &'a [Vec<f64>], norm: PNorm) -> SplitTree<'a> {
        let mut t = SplitTree {
            pts,
            norm,
            perm: (0..pts.len() as u32).collect(),
            nodes: Vec::new(),
        };
        if !pts.is_empty() {
            t.build_range(0, pts.len());
        }
        t
    }

    /// Build the subtree over `perm[lo..hi]`; returns its node id.
    fn build_range(&mut self, lo: usize, hi: usize) -> usize {
        let dim = self.pts[0].len();
        let mut bb_min = vec![f64::INFINITY; dim];
        let mut bb_max = vec![f64::NEG_INFINITY; dim];
        for &p in &self.perm[lo..hi] {
            for k in 0..dim {
                let x = self.pts[p as usize][k];
                bb_min[k] = bb_min[k].min(x);
                bb_max[k] = bb_max[k].max(x);
            }
        }
        // Widest axis, smallest index on ties — keeps builds deterministic.
        let (axis, extent) = (0..dim)
            .map(|k| (k, bb_max[k] - bb_min[k]))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)))
            .unwrap();
        let diam = lp_distance(&bb_min, &bb_max, self.norm);
        if extent == 0.0 {
            // All points in this range are bit-identical: a leaf. Their
            // mutual distances are 0 and exempt from coverage.
            self.nodes.push(SplitNode {
                bb_min,
                bb_max,
                diam,
                children: None,
            });
            return self.nodes.len() - 1;
        }
        let mid = 0.5 * (bb_min[axis] + bb_max[axis]);
        // Stable partition: coordinates ≤ mid first. Both sides are
        // non-empty because min ≤ mid < max on the chosen axis.
        let mut left: Vec<u32> = Vec::new();
        let mut right: Vec<u32> = Vec::new();
        for &p in &self.perm[lo..hi] {
            if self.pts[p as usize][axis] <= mid {
                left.push(p);
            } else {
                right.push(p);
            }
        }
        debug_assert!(!left.is_empty() && !right.is_empty());
        let split = lo + left.len();
        self.perm[lo..split].copy_from_slice(&left);
        self.perm[split..hi].copy_from_slice(&right);
        let l = self.build_range(lo, split);
        let r = self.build_range(split, hi);
        self.nodes.push(SplitNode {
            bb_min,
            bb_max,
            diam,
            children: Some((l, r)),
        });
        self.nodes.len() - 1
    }

    fn box_min_dist(&self, a: usize, b: usize) -> f64 {
        let (na, nb) = (&self.nodes[a], &self.nodes[b]);
        let gap: Vec<f64> = (0..na.bb_min.len())
            .map(|k| {
                (nb.bb_min[k] - na.bb_max[k])
                    .max(na.bb_min[k] - nb.bb_max[k])
                    .max(0.0)
            })
            .collect();
        let zeros = vec![0.0; gap.len()];
        lp_distance(&gap, &zeros, self.norm)
    }

    /// Emit well-separated pairs of the two subtrees into `out`.
    fn find_pairs(&self, a: usize, b: usize, out: &mut Vec<f64>) {
        let dmin = self.box_min_dist(a, b);
        let (da, db) = (self.nodes[a].diam, self.nodes[b].diam);
        if dmin > 0.0 && dmin >= 2.0 * da.max(db) {
            out.push(dmin);
            return;
        }
        // Split the node with the larger box; ties split the first.
        if da >= db {
            let (l, r) = self.nodes[a].children.expect("unsplittable pair");
            self.find_pairs(l, b, out);
            self.find_pairs(r, b, out);
        } else {
            let (l, r) = self.nodes[b].children.expect("unsplittable pair");
            self.find_pairs(a, l, out);
            self.find_pairs(a, r, out);
        }
    }

    fn wspd(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        // Children are pushed before parents, so iterating all nodes and
        // pairing each node's children enumerates every sibling pair.
        for node in &self.nodes {
            if let Some((l, r)) = node.children {
                self.find_pairs(l, r, &mut out);
            }
        }
        out
    }
}

fn digest_from_scales(mut scales: Vec<f64>) -> TaddIntervals {
    scales.sort_by(f64::total_cmp);
    scales.dedup();
    TaddIntervals { c_values: scales }
}

// ───────────────────────── public builders ─────────────────────────

/// Digest over the curve's prefix lengths `λ_i`.
///
/// The λ values are canonicalized by a fresh cumulative sum over the edge
/// list (not read from the curve's offset-relative stored prefixes), so a
/// curve that reached its current state through end updates digests
/// bit-identically to a freshly built copy of the same curve.
pub fn build_1tadd(curve: &Curve) -> TaddIntervals {
    let mut lam = Vec::with_capacity(curve.n());
    let mut acc = 0.0f64;
    lam.push(acc);
    for i in 1..curve.n() {
        acc += curve.edge_len(i);
        lam.push(acc);
    }
    // λ is non-decreasing; exact duplicates (zero-length edges) collapse.
    lam.dedup();
    let pts: Vec<Vec<f64>> = lam.into_iter().map(|x| vec![x]).collect();
    if pts.len() < 2 {
        return TaddIntervals {
            c_values: Vec::new(),
        };
    }
    let tree = SplitTree::build(&pts, PNorm::L2);
    digest_from_scales(tree.wspd())
}

/// Digest over the curve's vertex positions in the ambient metric.
///
/// Euclidean spaces use the fair-split WSPD; graph metrics fall back to a
/// greedy cover of the explicit all-pairs distance list (`c` = smallest
/// uncovered distance, covering `[c, 2c]`), which is exact but quadratic.
pub fn build_2d_tadd(curve: &Curve, oracle: &dyn DistanceOracle) -> Result<TaddIntervals> {
    match curve.space() {
        Space::Euclid { norm, .. } => {
            let pts: Vec<Vec<f64>> = curve
                .iter_points()
                .map(|p| p.coords().expect("space checked").to_vec())
                .collect();
            if pts.len() < 2 {
                return Ok(TaddIntervals {
                    c_values: Vec::new(),
                });
            }
            let tree = SplitTree::build(&pts, *norm);
            Ok(digest_from_scales(tree.wspd()))
        }
        Space::Graph { .. } => {
            let n = curve.n();
            let mut dists = Vec::with_capacity(n * (n - 1) / 2);
            for i in 1..=n {
                for j in i + 1..=n {
                    let d = oracle.distance(curve.pt(i), curve.pt(j))?;
                    if d > 0.0 {
                        dists.push(d);
                    }
                }
            }
            dists.sort_by(f64::total_cmp);
            dists.dedup();
            let mut c_values = Vec::new();
            let mut idx = 0;
            while idx < dists.len() {
                let c = dists[idx];
                c_values.push(c);
                while idx < dists.len() && dists[idx] <= 2.0 * c {
                    idx += 1;
                }
            }
            Ok(TaddIntervals { c_values })
        }
    }
}

/// Relative slack allowed when checking interval containment; covers the
/// few ulps the geometric box bounds may round by.
pub const VERIFY_SLACK: f64 = 1e-9;

/// Check that every positive distance lies in some `[c, 2c]` of the
/// digest (distance-0 pairs are exempt), up to [`VERIFY_SLACK`] relative
/// tolerance.
pub fn verify_tadd(distances: &[f64], tadd: &TaddIntervals) -> bool {
    let cs = &tadd.c_values;
    for &d in distances {
        if d <= 0.0 {
            continue;
        }
        // Only the largest c ≤ d can cover d; smaller c have smaller 2c.
        let idx = cs.partition_point(|&c| c <= d * (1.0 + VERIFY_SLACK));
        let window = &cs[idx.saturating_sub(1)..(idx + 1).min(cs.len())];
        let covered = window
            .iter()
            .any(|&c| d >= c * (1.0 - VERIFY_SLACK) && d <= 2.0 * c * (1.0 + VERIFY_SLACK));
        if !covered {
            return false;
        }
    }
    true
}

/// Candidate intervals for a Fréchet value query at tolerance `eps`:
/// the sentinel `[0, 0]` plus `[6c/ε, 12c/ε]` per digest value.
pub fn scale_for_frechet(tadd: &TaddIntervals, eps: f64) -> Result<ScaledIntervalSet> {
    check_eps(eps)?;
    let mut intervals = Vec::with_capacity(tadd.len() + 1);
    intervals.push(ScaledInterval {
        lo: 0.0,
        hi: 0.0,
        source: IntervalSource::Sentinel,
    });
    for &c in &tadd.c_values {
        intervals.push(ScaledInterval {
            lo: 6.0 * c / eps,
            hi: 12.0 * c / eps,
            source: IntervalSource::Tadd { c },
        });
    }
    Ok(ScaledIntervalSet { intervals })
}

/// Candidate intervals for a Hausdorff value query: `[c/2, 4c]` per
/// digest value plus the query anchor `[λ, 2λ]`.
pub fn scale_for_hausdorff(tadd: &TaddIntervals, lambda: f64) -> ScaledIntervalSet {
    let mut intervals = Vec::with_capacity(tadd.len() + 1);
    for &c in &tadd.c_values {
        intervals.push(ScaledInterval {
            lo: 0.5 * c,
            hi: 4.0 * c,
            source: IntervalSource::Tadd { c },
        });
    }
    intervals.push(ScaledInterval {
        lo: lambda,
        hi: 2.0 * lambda,
        source: IntervalSource::QueryAnchor,
    });
    ScaledIntervalSet { intervals }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
        return Err(Error::Contract(format!(
            "epsilon must lie in (0, 1), got {eps}"
        )));
    }
    Ok(())
}

/// Recompute the digest after a curve end-update.
///
/// Always a full deterministic rebuild from the canonical edge list:
/// incremental edits cannot reproduce a fresh build bit-for-bit under
/// floating-point re-association, and downstream value queries are
/// allowed to return digest-derived endpoints verbatim.
pub fn rebuild_after_update(tadd: &mut TaddIntervals, curve: &Curve) {
    *tadd = build_1tadd(curve);
}
