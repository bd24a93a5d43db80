//! Hausdorff decision and value queries against a preprocessed curve.
//!
//! The (discrete, symmetric) Hausdorff distance is
//! `D_H = max( max_p min_q d(p,q), max_q min_p d(p,q) )`. The preprocessed
//! path replaces `P` by its μ-simplification and reasons in blocks: column
//! `s` of the Hausdorff matrix stands for the run of original vertices
//! `P[s, succ(s)−1]`, and the cell `(s, q)` is zero when some vertex of
//! that block lies within `ρ*` of `q`. A feasible matrix — a zero in every
//! row and every column — certifies `D_H ≤ (1+ε)ρ*` (block vertices are
//! within `μ = ε·ρ*` of their zero witness along the curve); a row or
//! column with no zero certifies `D_H > ρ*` outright.
//!
//! Nearest-neighbor queries against vertex *ranges* of `P` drive
//! everything: a balanced binary decomposition of `[1, n]` owns one exact
//! nearest-neighbor index per node ([`NnDecomposition`]), so any range is
//! answered through O(log n) covering nodes. Per row the engine runs the
//! stack subroutine: pop a range, query its nearest neighbor to `q_j`,
//! discard the range if the distance exceeds `ρ*`, otherwise zero the
//! owning block and push the two flanking ranges. Ranges are unions of
//! blocks, so a discarded range proves every vertex in it exceeds `ρ*`,
//! and the distance found for a zeroed block is that block's exact row
//! minimum — the fact the value extraction rests on.
//!
//! A value query first computes `λ = max_q min_p d` exactly (one range-NN
//! query per row), then bisects over candidate thresholds — `[½c, 4c]` per
//! digest scale `c` plus the query anchor `[λ, 2λ]`, which provably cover
//! `D_H` — for the leftmost feasible run, and reads the answer off that
//! run's row minima and block minima.
//!
//! This engine assumes exact distances (the curve and oracle must have
//! `α = 0`); the decision/value thresholds are exposed as explicit `ρ*`/μ
//! hooks so an approximate-oracle layering can be added without reshaping
//! the API.

use crate::curve::Curve;
use crate::frechet::{Preprocessed, QuerySpec, Verdict};
use crate::oracle::{lp_distance, AmbientPoint, DistanceOracle, PNorm, Space};
use crate::simplify::simplify;
use crate::tadd::{build_2d_tadd, scale_for_hausdorff, IntervalSource, TaddIntervals};
use crate::{Error, Result};

// ───────────────────────── range nearest-neighbor ─────────────────────────

/// One kd-tree node; `left`/`right` index the arena, −1 for none.
#[derive(Debug, Clone, Copy)]
struct Kd {
    vtx: u32, // 1-based curve vertex
    axis: u8,
    left: i32,
    right: i32,
}

/// Exact nearest-neighbor index owned by one decomposition node.
#[derive(Debug, Clone)]
enum NodeIndex {
    /// kd-tree over the node's vertices (Euclidean spaces).
    Kd { root: i32, nodes: Vec<Kd> },
    /// Per-ambient-vertex label `(distance, curve vertex)` from a
    /// multi-source shortest-path run seeded at the node's vertices
    /// (graph spaces). `u32::MAX` marks unreachable.
    Table(Vec<(f64, u32)>),
}

#[derive(Debug, Clone)]
struct Seg {
    lo: usize,
    hi: usize,
    left: Option<u32>,
    right: Option<u32>,
    index: NodeIndex,
}

/// Balanced binary decomposition of `P`'s vertex range `[1, n]`; every
/// node owns an exact nearest-neighbor index over its subrange, so any
/// query range is answered through O(log n) covering nodes.
#[derive(Debug, Clone)]
pub struct NnDecomposition {
    n: usize,
    space: Space,
    /// Vertex coordinates (Euclidean) by 0-based vertex, for kd queries.
    pts: Vec<Vec<f64>>,
    segs: Vec<Seg>,
    root: u32,
}

fn kd_build(nodes: &mut Vec<Kd>, pts: &[Vec<f64>], ids: &mut [u32]) -> i32 {
    if ids.is_empty() {
        return -1;
    }
    // Split on the axis of largest extent (smallest axis on ties), at the
    // median by (coordinate, vertex) order — fully deterministic.
    let dim = pts[0].len();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &v in ids.iter() {
        for (a, &c) in pts[(v - 1) as usize].iter().enumerate() {
            lo[a] = lo[a].min(c);
            hi[a] = hi[a].max(c);
        }
    }
    let mut axis = 0usize;
    for a in 1..dim {
        if hi[a] - lo[a] > hi[axis] - lo[axis] {
            axis = a;
        }
    }
    let mid = ids.len() / 2;
    ids.select_nth_unstable_by(mid, |x, y| {
        pts[(*x - 1) as usize][axis]
            .total_cmp(&pts[(*y - 1) as usize][axis])
            .then(x.cmp(y))
    });
    let vtx = ids[mid];
    let id = nodes.len();
    nodes.push(Kd {
        vtx,
        axis: axis as u8,
        left: -1,
        right: -1,
    });
    let (lo_ids, rest) = ids.split_at_mut(mid);
    let hi_ids = &mut rest[1..];
    let l = kd_build(nodes, pts, lo_ids);
    let r = kd_build(nodes, pts, hi_ids);
    nodes[id].left = l;
    nodes[id].right = r;
    id as i32
}

fn kd_query(
    nodes: &[Kd],
    pts: &[Vec<f64>],
    norm: PNorm,
    at: i32,
    q: &[f64],
    best: &mut (f64, u32),
) {
    if at < 0 {
        return;
    }
    let nd = nodes[at as usize];
    let p = &pts[(nd.vtx - 1) as usize];
    let d = lp_distance(q, p, norm);
    if d < best.0 || (d == best.0 && nd.vtx < best.1) {
        *best = (d, nd.vtx);
    }
    let axis = nd.axis as usize;
    let diff = q[axis] - p[axis];
    let (near, far) = if diff < 0.0 {
        (nd.left, nd.right)
    } else {
        (nd.right, nd.left)
    };
    kd_query(nodes, pts, norm, near, q, best);
    // Everything on the far side differs by at least |diff| on this axis,
    // which lower-bounds any Lp distance. Equality still descends so ties
    // resolve to the smallest vertex index.
    if diff.abs() <= best.0 {
        kd_query(nodes, pts, norm, far, q, best);
    }
}

/// Per-curve-vertex nearest labels against every ambient vertex, read
/// from the oracle itself. Sourcing the labels from the same memoized
/// shortest-path rows the oracle serves keeps range answers bitwise
/// identical to a linear scan of oracle distances (independent
/// shortest-path runs can associate path sums differently and drift by
/// ulps). Unreachable pairs become `(∞, u32::MAX)` labels rather than
/// errors; queries surface [`Error::Unreachable`] only when a whole range
/// cannot reach the query point.
fn leaf_labels(
    curve: &Curve,
    oracle: &dyn DistanceOracle,
    n_ambient: u32,
) -> Result<Vec<Vec<(f64, u32)>>> {
    let mut tables = Vec::with_capacity(curve.n());
    for v in 1..=curve.n() {
        let p = curve.pt(v);
        let mut row = Vec::with_capacity(n_ambient as usize);
        for q in 0..n_ambient {
            match oracle.distance(p, &AmbientPoint::Graph(q)) {
                Ok(d) => row.push((d, v as u32)),
                Err(Error::Unreachable(_, _)) => row.push((f64::INFINITY, u32::MAX)),
                Err(e) => return Err(e),
            }
        }
        tables.push(row);
    }
    Ok(tables)
}

/// Build the balanced range-NN decomposition for `curve`.
///
/// Requires exact distances: both the curve and `oracle` must report
/// `α = 0` (this engine's certificates assume unperturbed geometry).
pub fn build_nn_decomposition(
    curve: &Curve,
    oracle: &dyn DistanceOracle,
) -> Result<NnDecomposition> {
    if curve.alpha() != 0.0 || oracle.alpha() != 0.0 {
        return Err(Error::Contract(
            "Hausdorff queries require an exact oracle (alpha = 0) for both \
             the stored curve and the query"
                .into(),
        ));
    }
    let n = curve.n();
    let space = curve.space().clone();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let mut leaves: Vec<Vec<(f64, u32)>> = Vec::new();
    match &space {
        Space::Euclid { .. } => {
            pts = curve
                .iter_points()
                .map(|p| {
                    p.coords()
                        .expect("euclid curve holds euclid points")
                        .to_vec()
                })
                .collect();
        }
        Space::Graph { graph } => {
            leaves = leaf_labels(curve, oracle, graph.n)?;
        }
    }

    let mut segs: Vec<Seg> = Vec::new();
    // Recursion via an explicit builder to keep borrowck simple. Children
    // are built (and pushed) before their parent, so a graph parent can
    // merge its children's finished tables.
    fn build(
        segs: &mut Vec<Seg>,
        pts: &[Vec<f64>],
        leaves: &[Vec<(f64, u32)>],
        lo: usize,
        hi: usize,
    ) -> u32 {
        let (left, right) = if lo == hi {
            (None, None)
        } else {
            let mid = (lo + hi) / 2;
            let l = build(segs, pts, leaves, lo, mid);
            let r = build(segs, pts, leaves, mid + 1, hi);
            (Some(l), Some(r))
        };
        let index = if leaves.is_empty() {
            let mut ids: Vec<u32> = (lo..=hi).map(|v| v as u32).collect();
            let mut nodes = Vec::with_capacity(ids.len());
            let root = kd_build(&mut nodes, pts, &mut ids);
            NodeIndex::Kd { root, nodes }
        } else if lo == hi {
            NodeIndex::Table(leaves[lo - 1].clone())
        } else {
            // Entrywise lexicographic minimum of the children: the same
            // (distance, vertex) values compared, so no new arithmetic.
            let (l, r) = (left.unwrap() as usize, right.unwrap() as usize);
            let (NodeIndex::Table(lt), NodeIndex::Table(rt)) = (&segs[l].index, &segs[r].index)
            else {
                unreachable!("graph decomposition holds label tables")
            };
            NodeIndex::Table(
                lt.iter()
                    .zip(rt.iter())
                    .map(|(&a, &b)| {
                        if a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).is_le() {
                            a
                        } else {
                            b
                        }
                    })
                    .collect(),
            )
        };
        segs.push(Seg {
            lo,
            hi,
            left,
            right,
            index,
        });
        (segs.len() - 1) as u32
    }

    let root = build(&mut segs, &pts, &leaves, 1, n);
    Ok(NnDecomposition {
        n,
        space,
        pts,
        segs,
        root,
    })
}

impl NnDecomposition {
    /// Collect the canonical covering nodes of `[i, j]`.
    fn cover(&self, at: u32, i: usize, j: usize, out: &mut Vec<u32>) {
        let seg = &self.segs[at as usize];
        if i <= seg.lo && seg.hi <= j {
            out.push(at);
            return;
        }
        if let (Some(l), Some(r)) = (seg.left, seg.right) {
            let mid = self.segs[l as usize].hi;
            if i <= mid {
                self.cover(l, i, j, out);
            }
            if j > mid {
                self.cover(r, i, j, out);
            }
        }
    }

    /// Number of canonical nodes covering `[i, j]` (complexity audits).
    pub fn covering_count(&self, i: usize, j: usize) -> usize {
        let mut out = Vec::new();
        self.cover(self.root, i, j, &mut out);
        out.len()
    }

    /// Exact nearest vertex of `P[i, j]` to `q`: returns `(vertex, distance)`,
    /// ties broken toward the smallest vertex index.
    pub fn nearest_in_range(&self, q: &AmbientPoint, i: usize, j: usize) -> Result<(usize, f64)> {
        if i < 1 || j < i || j > self.n {
            return Err(Error::Contract(format!(
                "vertex range [{i}, {j}] invalid for a curve with {} vertices",
                self.n
            )));
        }
        self.space.admit(q)?;
        let mut nodes = Vec::new();
        self.cover(self.root, i, j, &mut nodes);
        let mut best = (f64::INFINITY, u32::MAX);
        match &self.space {
            Space::Euclid { norm, .. } => {
                let qc = q.coords().expect("admitted euclid point");
                for id in nodes {
                    let NodeIndex::Kd { root, nodes: kd } = &self.segs[id as usize].index else {
                        unreachable!("euclid decomposition holds kd indexes")
                    };
                    kd_query(kd, &self.pts, *norm, *root, qc, &mut best);
                }
            }
            Space::Graph { .. } => {
                let qv = q.vertex_id().expect("admitted graph point");
                for id in nodes {
                    let NodeIndex::Table(t) = &self.segs[id as usize].index else {
                        unreachable!("graph decomposition holds label tables")
                    };
                    let (d, src) = t[qv as usize];
                    if src != u32::MAX && (d, src) < best {
                        best = (d, src);
                    }
                }
                if best.1 == u32::MAX {
                    // No vertex of P[i,j] reaches q; report the range start.
                    return Err(Error::Unreachable(i as u32, qv));
                }
            }
        }
        Ok((best.1 as usize, best.0))
    }
}

// ───────────────────────── exact reference ─────────────────────────

/// Exact symmetric Hausdorff distance by the double loop, over `P[i, j]`
/// (or all of `P`) against all of `Q`.
pub fn exact_hausdorff(
    oracle: &dyn DistanceOracle,
    p: &Curve,
    q: &Curve,
    range: Option<(usize, usize)>,
    budget: Option<u64>,
) -> Result<f64> {
    let (i, j) = range.unwrap_or((1, p.n()));
    p.check_range(i, j)?;
    let rows = j - i + 1;
    let m = q.n();
    if let Some(b) = budget {
        if (rows as u64).saturating_mul(m as u64) > b {
            return Err(Error::BudgetExceeded(b));
        }
    }
    let mut q_min = vec![f64::INFINITY; m];
    let mut directed_pq = 0.0f64;
    for a in 0..rows {
        let mut p_min = f64::INFINITY;
        for (b, qm) in q_min.iter_mut().enumerate() {
            let d = oracle.distance(p.pt(i + a), q.pt(b + 1))?;
            p_min = p_min.min(d);
            *qm = qm.min(d);
        }
        directed_pq = directed_pq.max(p_min);
    }
    let directed_qp = q_min.iter().fold(0.0f64, |acc, &d| acc.max(d));
    Ok(directed_pq.max(directed_qp))
}

// ───────────────────────── decision core ─────────────────────────

/// Digest plus range-NN structures needed by Hausdorff queries; built once
/// per preprocessed curve (rebuild after updates).
#[derive(Debug, Clone)]
pub struct HausdorffIndex {
    pub nn: NnDecomposition,
    /// Approximate all-pairs distance decomposition of `P`'s vertex set,
    /// source of the candidate scales for value queries.
    pub tadd2: TaddIntervals,
}

/// Build the Hausdorff query structures for a preprocessed curve.
pub fn build_hausdorff_index(
    pre: &Preprocessed,
    oracle: &dyn DistanceOracle,
) -> Result<HausdorffIndex> {
    let nn = build_nn_decomposition(&pre.curve, oracle)?;
    let tadd2 = build_2d_tadd(&pre.curve, oracle)?;
    Ok(HausdorffIndex { nn, tadd2 })
}

/// Counters and evidence from one feasibility run.
#[derive(Debug, Clone)]
struct HRun {
    feasible: bool,
    /// Row (1-based q index) whose full-range nearest neighbor already
    /// exceeded ρ*, when that is how the run ended.
    failed_row: Option<usize>,
    /// Enumeration hit the caller's column cap (certified overflow).
    truncated: bool,
    /// Largest per-row nearest-neighbor distance (exact `max_q min_p` when
    /// the run is feasible).
    row_nn_max: f64,
    /// Per block, the smallest pointwise distance among its zeroes.
    block_min: Vec<f64>,
    zeroes: u64,
    pushes: u64,
    nn_queries: u64,
    /// Audit: every row pushed ≤ 2·(its zeroes) + 1 ranges.
    pushes_bounded: bool,
}

fn hausdorff_core(
    pre: &Preprocessed,
    nn: &NnDecomposition,
    q: &Curve,
    range: (usize, usize),
    rho_star: f64,
    mu: f64,
    cap: Option<usize>,
) -> Result<HRun> {
    let (i, j) = range;
    let m = q.n();
    let mut run = HRun {
        feasible: false,
        failed_row: None,
        truncated: false,
        row_nn_max: 0.0,
        block_min: Vec::new(),
        zeroes: 0,
        pushes: 0,
        nn_queries: 0,
        pushes_bounded: true,
    };
    let view = simplify(&pre.tree, &pre.curve, mu, i, j, cap)?;
    if view.truncated {
        run.truncated = true;
        return Ok(run);
    }
    let kept = view.indices;
    let blocks = kept.len();
    // Block t spans [kept[t], kept[t+1] − 1]; the last block is [j, j].
    let block_bounds = |t: usize| -> (usize, usize) {
        let lo = kept[t];
        let hi = if t + 1 < blocks { kept[t + 1] - 1 } else { j };
        (lo, hi)
    };
    run.block_min = vec![f64::INFINITY; blocks];
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for row in 1..=m {
        let qp = q.pt(row);
        stack.clear();
        stack.push((i, j));
        let mut row_pushes = 1u64;
        let mut row_zeroes = 0u64;
        run.pushes += 1;
        let mut first = true;
        while let Some((a, b)) = stack.pop() {
            let (vtx, dist) = nn.nearest_in_range(qp, a, b)?;
            run.nn_queries += 1;
            if first {
                first = false;
                if dist > rho_star {
                    // The full-range minimum already exceeds ρ*: this q has
                    // no zero in its row, which certifies D_H > ρ*.
                    run.failed_row = Some(row);
                    return Ok(run);
                }
                run.row_nn_max = run.row_nn_max.max(dist);
            }
            if dist > rho_star {
                continue; // whole range certified far
            }
            // Zero: the owning column is the last kept vertex ≤ vtx, and
            // `dist` is that block's exact minimum in this row (the range
            // is a union of blocks and its minimizer lies in this one).
            let t = kept.partition_point(|&s| s <= vtx) - 1;
            row_zeroes += 1;
            run.zeroes += 1;
            if dist < run.block_min[t] {
                run.block_min[t] = dist;
            }
            let (bs, be) = block_bounds(t);
            if bs > a {
                stack.push((a, bs - 1));
                row_pushes += 1;
                run.pushes += 1;
            }
            if be < b {
                stack.push((be + 1, b));
                row_pushes += 1;
                run.pushes += 1;
            }
        }
        if row_pushes > 2 * row_zeroes + 1 {
            run.pushes_bounded = false;
        }
    }
    // Feasible iff every row had a zero (no early return above) and every
    // column t was zeroed by some row.
    run.feasible = run.block_min.iter().all(|bm| bm.is_finite());
    Ok(run)
}

/// Result and audit counters of a Hausdorff decision query.
#[derive(Debug, Clone, Copy)]
pub struct HausdorffOutcome {
    pub verdict: Verdict,
    /// The queried relaxed threshold (`AT_MOST` certifies
    /// `D_H ≤ (1+ε)·ρ*`; `GREATER_THAN` certifies `D_H > ρ*`).
    pub rho_star: f64,
    /// Simplification width `ε·ρ*` used for this run.
    pub mu: f64,
    /// Matrix zeroes discovered across all rows.
    pub zeroes: u64,
    /// Ranges pushed across all row subroutines.
    pub pushes: u64,
    /// Range-NN queries issued.
    pub nn_queries: u64,
    /// The enumeration cap certified `|P^μ|` overflow (GREATER_THAN path).
    pub truncated: bool,
    /// Audit: per-row pushes stayed ≤ 2·zeroes + 1.
    pub pushes_bounded: bool,
}

fn column_cap(pre: &Preprocessed, eps: f64, mu: f64, k: f64, m: usize) -> Option<usize> {
    // Early exit is sound only with a *trusted upper bound* on the
    // packedness constant (an underestimate could truncate a feasible
    // enumeration), and only when μ > 0 bounds the column count at all.
    let c = pre.c_bound?;
    if mu <= 0.0 {
        return None;
    }
    Some((8.0 * c * k * m as f64 / eps).floor() as usize + 1)
}

/// Decide, one-sidedly, whether `D_H(P[i,j], Q) ≤ ρ*` up to `(1+ε)`:
/// `AT_MOST_ONE_PLUS_EPS_RHO` certifies `D_H ≤ (1+ε)·ρ*`,
/// `GREATER_THAN_RHO` certifies `D_H > ρ*`.
pub fn hausdorff_decide(
    pre: &Preprocessed,
    index: &HausdorffIndex,
    q: &Curve,
    spec: &QuerySpec,
    rho_star: f64,
) -> Result<HausdorffOutcome> {
    let (i, j) = spec.resolve(&pre.curve)?;
    if !rho_star.is_finite() || rho_star < 0.0 {
        return Err(Error::Contract(format!(
            "rho_star must be finite and ≥ 0, got {rho_star}"
        )));
    }
    let mu = spec.eps * rho_star;
    let cap = column_cap(pre, spec.eps, mu, 1.0, q.n());
    let run = hausdorff_core(pre, &index.nn, q, (i, j), rho_star, mu, cap)?;
    Ok(HausdorffOutcome {
        verdict: if run.feasible {
            Verdict::AtMostOnePlusEpsRho
        } else {
            Verdict::GreaterThanRho
        },
        rho_star,
        mu,
        zeroes: run.zeroes,
        pushes: run.pushes,
        nn_queries: run.nn_queries,
        truncated: run.truncated,
        pushes_bounded: run.pushes_bounded,
    })
}

// ───────────────────────── value query ─────────────────────────

/// Which candidate family the value query's bisection settled on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HausdorffCandidate {
    /// A digest interval `[½c, 4c]`.
    Interval { c: f64 },
    /// The query anchor `[λ, 2λ]` from the exact directed `Q → P`
    /// distance.
    QueryAnchor,
}

/// Result and audit counters of a Hausdorff value query.
#[derive(Debug, Clone, Copy)]
pub struct HausdorffValueResult {
    /// The approximation: `(1−ε)·D_H ≤ ν ≤ D_H`.
    pub nu: f64,
    /// Exact directed distance `max_q min_p d(p, q)` over the range.
    pub lambda: f64,
    /// The feasible candidate the bisection settled on.
    pub candidate: HausdorffCandidate,
    /// Threshold and simplification width of the settled run.
    pub rho_star: f64,
    pub mu: f64,
    /// Feasibility probes the bisection spent.
    pub probes: u64,
    /// Counters of the settled run.
    pub zeroes: u64,
    pub pushes: u64,
    /// Range-NN queries across the whole query (λ scan + all probes).
    pub nn_queries: u64,
    /// Audit: every probed run kept per-row pushes ≤ 2·zeroes + 1.
    pub pushes_bounded: bool,
}

/// Compute `ν ∈ [(1−ε)·D_H, D_H]` for the Hausdorff distance of
/// `P[i, j]` and `Q`.
pub fn hausdorff_value(
    pre: &Preprocessed,
    index: &HausdorffIndex,
    q: &Curve,
    spec: &QuerySpec,
) -> Result<HausdorffValueResult> {
    let (i, j) = spec.resolve(&pre.curve)?;
    let eps = spec.eps;
    let m = q.n();
    let mut nn_queries = 0u64;

    // λ = max_q min_p d, exact: one full-range NN query per row.
    let mut lambda = 0.0f64;
    for row in 1..=m {
        let (_, d) = index.nn.nearest_in_range(q.pt(row), i, j)?;
        nn_queries += 1;
        lambda = lambda.max(d);
    }

    // Candidate thresholds: [½c, 4c] per digest scale (ρ* = 4c, μ = ε·½c)
    // plus the anchor [λ, 2λ] (ρ* = 2λ, μ = ε·λ/2). D_H provably lies in
    // one of them, and any candidate with ρ* ≥ D_H is feasible, so a
    // crossing bisection lands at (or left of) the containing candidate —
    // which is what bounds the settled μ by ε·D_H.
    struct Candidate {
        rho_star: f64,
        mu: f64,
        k: f64,
        kind: HausdorffCandidate,
    }
    let mut cands: Vec<Candidate> = Vec::new();
    let scaled = scale_for_hausdorff(&index.tadd2, lambda);
    for iv in &scaled.intervals {
        match iv.source {
            IntervalSource::Tadd { c } => cands.push(Candidate {
                rho_star: iv.hi,
                mu: eps * iv.lo,
                k: 8.0,
                kind: HausdorffCandidate::Interval { c },
            }),
            IntervalSource::QueryAnchor => cands.push(Candidate {
                rho_star: iv.hi,
                mu: eps * iv.lo / 2.0,
                k: 4.0,
                kind: HausdorffCandidate::QueryAnchor,
            }),
            IntervalSource::Sentinel => {}
        }
    }
    let rank = |k: &HausdorffCandidate| match k {
        HausdorffCandidate::Interval { .. } => 0u8,
        HausdorffCandidate::QueryAnchor => 1u8,
    };
    cands.sort_by(|a, b| {
        a.rho_star
            .total_cmp(&b.rho_star)
            .then_with(|| rank(&a.kind).cmp(&rank(&b.kind)))
            .then_with(|| a.mu.total_cmp(&b.mu))
    });

    let mut probes = 0u64;
    let mut pushes_bounded = true;
    let mut runs: Vec<Option<HRun>> = (0..cands.len()).map(|_| None).collect();
    let probe = |idx: usize,
                 runs: &mut Vec<Option<HRun>>,
                 nn_queries: &mut u64,
                 probes: &mut u64,
                 pushes_bounded: &mut bool|
     -> Result<bool> {
        if runs[idx].is_none() {
            let c = &cands[idx];
            let cap = column_cap(pre, eps, c.mu, c.k, m);
            let run = hausdorff_core(pre, &index.nn, q, (i, j), c.rho_star, c.mu, cap)?;
            *nn_queries += run.nn_queries;
            *probes += 1;
            *pushes_bounded &= run.pushes_bounded;
            runs[idx] = Some(run);
        }
        Ok(runs[idx].as_ref().unwrap().feasible)
    };

    let last = cands.len() - 1;
    if !probe(
        last,
        &mut runs,
        &mut nn_queries,
        &mut probes,
        &mut pushes_bounded,
    )? {
        // Unreachable if the digest is sound: some candidate interval holds
        // D_H, and every candidate at or right of it is feasible.
        return Err(Error::Contract(
            "internal: no feasible Hausdorff candidate; the digest does not \
             cover this instance"
                .into(),
        ));
    }
    let settled = if probe(
        0,
        &mut runs,
        &mut nn_queries,
        &mut probes,
        &mut pushes_bounded,
    )? {
        0
    } else {
        let (mut lo, mut hi) = (0usize, last);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe(
                mid,
                &mut runs,
                &mut nn_queries,
                &mut probes,
                &mut pushes_bounded,
            )? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    // Extraction: the minimal ρ that keeps every row and every column
    // feasible is exactly max(row minima, block minima) — each block's
    // recorded minimum is its true row-minimum over the rows that zeroed
    // it, and rows that discarded it were strictly above ρ* ≥ any zero.
    let run = runs[settled]
        .as_ref()
        .expect("settled candidate was probed");
    let mut rho_hat = run.row_nn_max;
    for &bm in &run.block_min {
        debug_assert!(bm.is_finite(), "feasible run zeroed every block");
        rho_hat = rho_hat.max(bm);
    }
    Ok(HausdorffValueResult {
        nu: rho_hat,
        lambda,
        candidate: cands[settled].kind,
        rho_star: cands[settled].rho_star,
        mu: cands[settled].mu,
        probes,
        zeroes: run.zeroes,
        pushes: run.pushes,
        nn_queries,
        pushes_bounded,
    })
}
