//! Metric spaces and distance oracles.
//!
//! Every other module talks to the metric through [`DistanceOracle`], a
//! possibly-approximate oracle: an oracle with accuracy parameter `α`
//! returns a perceived distance `d°(a, b) ∈ [(1−α)·d(a,b), (1+α)·d(a,b)]`.
//! Three implementations are provided:
//!
//! * [`euclidean_oracle`] — exact (`α = 0`) distances in `R^d` under the
//!   L1, L2, or L∞ norm,
//! * [`graph_oracle`] — exact shortest-path distances on a positively
//!   weighted undirected graph, memoizing one Dijkstra run per source,
//! * [`perturbed_oracle`] — wraps any base oracle with deterministic,
//!   symmetric multiplicative noise of relative magnitude `α`, for
//!   exercising the query engine's tolerance to oracle error.
//!
//! All oracles are deterministic (same pair → same float, bit for bit) and
//! exactly symmetric, and report `d°(a, a) = 0`. The graph oracle achieves
//! bit-exact symmetry by always running Dijkstra from the smaller vertex
//! id; floating-point accumulation order along equal-length alternate
//! paths would otherwise let `d°(u, v)` and `d°(v, u)` drift in the last
//! bit.

use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Which p-norm a Euclidean oracle measures with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PNorm {
    /// Sum of absolute coordinate differences.
    L1,
    /// Ordinary Euclidean norm.
    L2,
    /// Maximum absolute coordinate difference.
    LInf,
}

impl std::fmt::Display for PNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PNorm::L1 => write!(f, "p1"),
            PNorm::L2 => write!(f, "p2"),
            PNorm::LInf => write!(f, "pinf"),
        }
    }
}

/// A point of the ambient space: either a coordinate vector in `R^d` or a
/// vertex id of a weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub enum AmbientPoint {
    /// Coordinates in `R^d`.
    Euclid(Vec<f64>),
    /// Vertex id (0-based) in a [`WeightedGraph`].
    Graph(u32),
}

impl AmbientPoint {
    /// Coordinate slice, if this is a Euclidean point.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            AmbientPoint::Euclid(c) => Some(c),
            AmbientPoint::Graph(_) => None,
        }
    }

    /// Graph vertex id, if this is a graph point.
    pub fn vertex_id(&self) -> Option<u32> {
        match self {
            AmbientPoint::Euclid(_) => None,
            AmbientPoint::Graph(v) => Some(*v),
        }
    }

    /// Encode the point as a key of u64 words. Coordinates map through
    /// `to_bits`, so two points compare equal here exactly when they are
    /// bit-identical — which is the granularity the deterministic noise in
    /// [`perturbed_oracle`] needs.
    fn key_words(&self, out: &mut Vec<u64>) {
        match self {
            AmbientPoint::Euclid(c) => {
                out.push(0x45); // tag: Euclid
                out.push(c.len() as u64);
                out.extend(c.iter().map(|x| x.to_bits()));
            }
            AmbientPoint::Graph(v) => {
                out.push(0x47); // tag: Graph
                out.push(*v as u64);
            }
        }
    }
}

/// One undirected edge of a weighted graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphEdge {
    pub u: u32,
    pub v: u32,
    pub w: f64,
}

/// An undirected graph with positive edge weights, vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub n: u32,
    pub edges: Vec<GraphEdge>,
}

impl WeightedGraph {
    /// Validate ids and weights.
    ///
    /// # Returns
    /// `Ok(())` if every edge joins vertices below `n` with a positive,
    /// finite weight.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Contract(
                "graph must have at least one vertex".into(),
            ));
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.u >= self.n || e.v >= self.n {
                return Err(Error::Contract(format!(
                    "edge {k} references vertex {} but the graph has {} vertices",
                    e.u.max(e.v),
                    self.n
                )));
            }
            if !e.w.is_finite() || e.w <= 0.0 {
                return Err(Error::NonFinite(format!(
                    "edge {k} has weight {}, expected a positive finite number",
                    e.w
                )));
            }
        }
        Ok(())
    }
}

/// The metric space an oracle serves. Carried in curve metadata and
/// serialized bundles so the oracle can be reconstructed on load.
#[derive(Debug, Clone)]
pub enum Space {
    Euclid { dim: usize, norm: PNorm },
    Graph { graph: Arc<WeightedGraph> },
}

impl Space {
    /// Check that `p` is a point of this space.
    pub fn admit(&self, p: &AmbientPoint) -> Result<()> {
        match (self, p) {
            (Space::Euclid { dim, .. }, AmbientPoint::Euclid(c)) => {
                if c.len() != *dim {
                    return Err(Error::SpaceMismatch(format!(
                        "point has dimension {}, space has dimension {dim}",
                        c.len()
                    )));
                }
                for (axis, x) in c.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::NonFinite(format!("coordinate {axis} is {x}")));
                    }
                }
                Ok(())
            }
            (Space::Graph { graph }, AmbientPoint::Graph(v)) => {
                if *v >= graph.n {
                    return Err(Error::SpaceMismatch(format!(
                        "vertex id {v} out of range, graph has {} vertices",
                        graph.n
                    )));
                }
                Ok(())
            }
            (Space::Euclid { .. }, AmbientPoint::Graph(_)) => Err(Error::SpaceMismatch(
                "graph vertex handed to a Euclidean oracle".into(),
            )),
            (Space::Graph { .. }, AmbientPoint::Euclid(_)) => Err(Error::SpaceMismatch(
                "coordinate point handed to a graph oracle".into(),
            )),
        }
    }
}

/// A possibly-approximate distance oracle with accuracy `α ≥ 0`:
/// `d°(a, b) ∈ [(1−α)·d(a,b), (1+α)·d(a,b)]`.
///
/// Implementations must be deterministic, exactly symmetric, and report
/// `d°(a, a) = 0` for bit-identical points.
pub trait DistanceOracle: Send + Sync {
    /// The space whose points this oracle accepts.
    fn space(&self) -> &Space;

    /// Relative accuracy `α` of the perceived distances.
    fn alpha(&self) -> f64;

    /// Perceived distance between two points of the space.
    fn distance(&self, a: &AmbientPoint, b: &AmbientPoint) -> Result<f64>;
}

// ───────────────────────── Euclidean oracle ─────────────────────────

struct EuclideanOracle {
    space: Space,
}

impl DistanceOracle for EuclideanOracle {
    fn space(&self) -> &Space {
        &self.space
    }

    fn alpha(&self) -> f64 {
        0.0
    }

    fn distance(&self, a: &AmbientPoint, b: &AmbientPoint) -> Result<f64> {
        self.space.admit(a)?;
        self.space.admit(b)?;
        let (ca, cb) = (a.coords().unwrap(), b.coords().unwrap());
        let Space::Euclid { norm, .. } = self.space else {
            unreachable!()
        };
        Ok(lp_distance(ca, cb, norm))
    }
}

/// Distance between coordinate slices of equal length under `norm`.
pub fn lp_distance(a: &[f64], b: &[f64], norm: PNorm) -> f64 {
    match norm {
        PNorm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        PNorm::L2 => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        PNorm::LInf => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    }
}

/// Exact oracle for `R^dim` under the given norm.
///
/// # Example
/// ```
/// use pfre_core::oracle::{euclidean_oracle, AmbientPoint, DistanceOracle, PNorm};
/// let o = euclidean_oracle(2, PNorm::L2);
/// let d = o.distance(
///     &AmbientPoint::Euclid(vec![0.0, 0.0]),
///     &AmbientPoint::Euclid(vec![3.0, 4.0]),
/// ).unwrap();
/// assert_eq!(d, 5.0);
/// ```
pub fn euclidean_oracle(dim: usize, norm: PNorm) -> Arc<dyn DistanceOracle> {
    Arc::new(EuclideanOracle {
        space: Space::Euclid { dim, norm },
    })
}

// ───────────────────────── Graph oracle ─────────────────────────

/// Compressed adjacency of a validated graph.
struct Adjacency {
    offsets: Vec<u32>,
    // (neighbor, weight) runs, indexed by offsets.
    targets: Vec<(u32, f64)>,
}

impl Adjacency {
    fn build(g: &WeightedGraph) -> Adjacency {
        let n = g.n as usize;
        let mut degree = vec![0u32; n];
        for e in &g.edges {
            degree[e.u as usize] += 1;
            degree[e.v as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![(0u32, 0.0f64); offsets[n] as usize];
        for e in &g.edges {
            targets[cursor[e.u as usize] as usize] = (e.v, e.w);
            cursor[e.u as usize] += 1;
            targets[cursor[e.v as usize] as usize] = (e.u, e.w);
            cursor[e.v as usize] += 1;
        }
        Adjacency { offsets, targets }
    }

    fn neighbors(&self, v: u32) -> &[(u32, f64)] {
        &self.targets[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }
}

/// Min-heap entry for Dijkstra. Ordering is reversed so that
/// `BinaryHeap` (a max-heap) pops the smallest cost first; ties break on
/// vertex id to keep the relaxation order deterministic.
#[derive(Copy, Clone, PartialEq)]
struct HeapState {
    cost: f64,
    node: u32,
}

impl Eq for HeapState {}

impl Ord for HeapState {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapState {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths; `f64::INFINITY` marks unreachable.
fn dijkstra(adj: &Adjacency, n: u32, source: u32) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n as usize];
    dist[source as usize] = 0.0;
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(HeapState {
        cost: 0.0,
        node: source,
    });
    while let Some(HeapState { cost, node }) = heap.pop() {
        if cost > dist[node as usize] {
            continue; // stale entry
        }
        for &(next, w) in adj.neighbors(node) {
            let candidate = cost + w;
            if candidate < dist[next as usize] {
                dist[next as usize] = candidate;
                heap.push(HeapState {
                    cost: candidate,
                    node: next,
                });
            }
        }
    }
    dist
}

struct GraphOracle {
    space: Space,
    adj: Adjacency,
    n: u32,
    // One row of shortest-path distances per source actually queried.
    memo: Mutex<HashMap<u32, Arc<Vec<f64>>>>,
}

impl GraphOracle {
    fn row(&self, source: u32) -> Arc<Vec<f64>> {
        let mut memo = self.memo.lock().unwrap();
        memo.entry(source)
            .or_insert_with(|| Arc::new(dijkstra(&self.adj, self.n, source)))
            .clone()
    }
}

impl DistanceOracle for GraphOracle {
    fn space(&self) -> &Space {
        &self.space
    }

    fn alpha(&self) -> f64 {
        0.0
    }

    fn distance(&self, a: &AmbientPoint, b: &AmbientPoint) -> Result<f64> {
        self.space.admit(a)?;
        self.space.admit(b)?;
        let (u, v) = (a.vertex_id().unwrap(), b.vertex_id().unwrap());
        if u == v {
            return Ok(0.0);
        }
        // Canonical source: bit-exact symmetry regardless of query order.
        let (s, t) = (u.min(v), u.max(v));
        let d = self.row(s)[t as usize];
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Unreachable(u, v))
        }
    }
}

/// Exact shortest-path oracle over a validated positively weighted graph.
///
/// Queries between disconnected vertices return [`Error::Unreachable`]
/// rather than an infinite distance.
pub fn graph_oracle(graph: WeightedGraph) -> Result<Arc<dyn DistanceOracle>> {
    graph.validate()?;
    let adj = Adjacency::build(&graph);
    let n = graph.n;
    Ok(Arc::new(GraphOracle {
        space: Space::Graph {
            graph: Arc::new(graph),
        },
        adj,
        n,
        memo: Mutex::new(HashMap::new()),
    }))
}

// ───────────────────────── Perturbed oracle ─────────────────────────

/// splitmix64 finalizer: a cheap, well-mixed u64 → u64 hash step.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

struct PerturbedOracle {
    base: Arc<dyn DistanceOracle>,
    alpha: f64,
    seed: u64,
}

impl PerturbedOracle {
    /// Deterministic noise factor `u ∈ [−1, 1)` for an unordered pair.
    fn noise(&self, a: &AmbientPoint, b: &AmbientPoint) -> f64 {
        let mut ka = Vec::new();
        let mut kb = Vec::new();
        a.key_words(&mut ka);
        b.key_words(&mut kb);
        // Sort the two keys so (a, b) and (b, a) hash identically.
        if ka > kb {
            std::mem::swap(&mut ka, &mut kb);
        }
        let mut h = mix64(self.seed);
        for w in ka.iter().chain(kb.iter()) {
            h = mix64(h ^ *w);
        }
        // Top 53 bits → uniform in [0, 1), then stretch to [−1, 1).
        let unit = (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * unit - 1.0
    }
}

impl DistanceOracle for PerturbedOracle {
    fn space(&self) -> &Space {
        self.base.space()
    }

    fn alpha(&self) -> f64 {
        // Relative errors compose multiplicatively: (1+αb)(1+αp) − 1.
        self.base.alpha() + self.alpha + self.base.alpha() * self.alpha
    }

    fn distance(&self, a: &AmbientPoint, b: &AmbientPoint) -> Result<f64> {
        let d = self.base.distance(a, b)?;
        // Multiplicative noise keeps d°(a, a) = 0 and the containment
        // [(1−α)d, (1+α)d] exact.
        Ok(d * (1.0 + self.alpha * self.noise(a, b)))
    }
}

/// Wrap `base` with deterministic multiplicative noise of relative
/// magnitude `alpha`, keyed by `seed`.
///
/// # Arguments
/// * `alpha` — noise magnitude in `[0, 1)`; the wrapped oracle satisfies
///   the `(1+α)`-oracle contract with `α` equal to [`DistanceOracle::alpha`].
/// * `seed` — distinct seeds give statistically independent noise while
///   each individual oracle stays deterministic.
pub fn perturbed_oracle(
    base: Arc<dyn DistanceOracle>,
    alpha: f64,
    seed: u64,
) -> Result<Arc<dyn DistanceOracle>> {
    if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
        return Err(Error::Contract(format!(
            "perturbation alpha must lie in [0, 1), got {alpha}"
        )));
    }
    Ok(Arc::new(PerturbedOracle { base, alpha, seed }))
}
