//! Discrete Fréchet decision and value queries against a preprocessed curve.
//!
//! The discrete Fréchet distance between curves `P` and `Q` is the
//! smallest `ρ` such that the lattice `[n] × [m]` admits a monotone walk
//! from `(1,1)` to `(n,m)` — steps `(+1,0)`, `(0,+1)`, `(+1,+1)` — using
//! only cells with `d(p_a, q_b) ≤ ρ`. [`exact_discrete_frechet`] evaluates
//! it by the classical O(n·m) dynamic program and serves as the reference
//! everything else is audited against.
//!
//! The preprocessed path never touches all of `P`. A decision query at
//! threshold `ρ` relaxes the threshold to `ρ* = (1+ε/2)·ρ`, replaces `P`
//! by its μ-simplification with `μ = ε·ρ/6` (enumerated lazily through the
//! [`SimplificationTree`]), and explores only the reachable zero cells of
//! the relaxed free-space matrix. On a c-packed curve each row holds O(c/ε)
//! such cells, so the walk costs O(c·m/ε) cell visits regardless of `n`.
//! The answer is one-sided: `AT_MOST` certifies `D ≤ (1+ε)ρ`, `GREATER_THAN`
//! certifies `D > ρ`.
//!
//! A value query brackets `D` by binary search over the candidate scales
//! of the preprocessed digest (every subcurve length falls in some
//! `[c, 2c]`, hence `D` falls in a known family of O(n) intervals), then
//! runs one threshold-raising search with a *fixed* simplification: blocked
//! cells park in a min-heap keyed by their perceived distance, and whenever
//! the zero-cell search strands, the smallest parked distance becomes the
//! new threshold. The final threshold, divided back by `(1+ε/2)`, is a
//! `ν ∈ [(1−ε)·D, (1+ε)·D]`.

use crate::curve::Curve;
use crate::oracle::DistanceOracle;
use crate::simplify::{build_tree, SimplificationTree};
use crate::tadd::{
    build_1tadd, check_eps, rebuild_after_update, scale_for_frechet, IntervalSource, TaddIntervals,
};
use crate::{Error, Result};
use std::collections::{BinaryHeap, HashSet};

/// A curve bundled with the structures queries run against.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub curve: Curve,
    pub tree: SimplificationTree,
    pub tadd: TaddIntervals,
    /// Trusted upper bound on the packedness constant, if the caller has
    /// one (e.g. from how the curve was generated). Enables early-exit
    /// caps in the Hausdorff engine; never required for correctness.
    pub c_bound: Option<f64>,
}

impl Preprocessed {
    /// Build the simplification tree and digest for `curve`.
    pub fn build(curve: Curve) -> Result<Preprocessed> {
        let tree = build_tree(&curve);
        let tadd = build_1tadd(&curve);
        Ok(Preprocessed {
            curve,
            tree,
            tadd,
            c_bound: None,
        })
    }

    /// Record a trusted packedness upper bound.
    pub fn with_c_bound(mut self, c: f64) -> Result<Preprocessed> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::Contract(format!(
                "packedness bound must be positive and finite, got {c}"
            )));
        }
        self.c_bound = Some(c);
        Ok(self)
    }

    /// Attach a vertex at an end; tree updates in O(log n), the digest is
    /// rebuilt deterministically.
    pub fn extend(
        &mut self,
        end: crate::simplify::End,
        new_point: crate::oracle::AmbientPoint,
        new_edge_length: f64,
    ) -> Result<()> {
        crate::simplify::extend(
            &mut self.tree,
            &mut self.curve,
            end,
            new_point,
            new_edge_length,
        )?;
        rebuild_after_update(&mut self.tadd, &self.curve);
        Ok(())
    }

    /// Remove the vertex at an end.
    pub fn truncate(&mut self, end: crate::simplify::End) -> Result<()> {
        crate::simplify::truncate(&mut self.tree, &mut self.curve, end)?;
        rebuild_after_update(&mut self.tadd, &self.curve);
        Ok(())
    }
}

/// Query tolerance and optional subcurve range.
#[derive(Debug, Clone, Copy)]
pub struct QuerySpec {
    /// Approximation tolerance, in (0, 1).
    pub eps: f64,
    /// 1-based inclusive vertex range of `P`; `None` means the full curve.
    pub range: Option<(usize, usize)>,
}

impl QuerySpec {
    pub fn full(eps: f64) -> QuerySpec {
        QuerySpec { eps, range: None }
    }

    pub fn sub(eps: f64, i: usize, j: usize) -> QuerySpec {
        QuerySpec {
            eps,
            range: Some((i, j)),
        }
    }

    pub(crate) fn resolve(&self, curve: &Curve) -> Result<(usize, usize)> {
        check_eps(self.eps)?;
        let (i, j) = self.range.unwrap_or((1, curve.n()));
        curve.check_range(i, j)?;
        Ok((i, j))
    }
}

/// One-sided verdict of a decision query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Certifies `D ≤ (1+ε)·ρ`.
    AtMostOnePlusEpsRho,
    /// Certifies `D > ρ`.
    GreaterThanRho,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::AtMostOnePlusEpsRho => write!(f, "AT_MOST_ONE_PLUS_EPS_RHO"),
            Verdict::GreaterThanRho => write!(f, "GREATER_THAN_RHO"),
        }
    }
}

/// Result and audit counters of a decision query.
#[derive(Debug, Clone, Copy)]
pub struct DecisionOutcome {
    pub verdict: Verdict,
    /// The queried threshold.
    pub rho: f64,
    /// Relaxed threshold `(1+ε/2)·ρ` actually tested against.
    pub rho_star: f64,
    /// Simplification width `ε·ρ/6` used for this run.
    pub mu: f64,
    /// Zero cells pushed onto the search stack (including the start cell).
    pub cells_pushed: u64,
    /// Distance oracle invocations.
    pub oracle_calls: u64,
}

/// Which bracket the value query's binary search landed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bracket {
    /// `D` was pinned inside a digest interval `[6c/ε, 12c/ε]`.
    Interval { c: f64, lo: f64, hi: f64 },
    /// `D` sits in a gap: above `lo` (0 for "below every interval") with
    /// the next candidate endpoint at `hi`.
    Gap { lo: f64, hi: f64 },
    /// Every candidate threshold answered `GREATER_THAN`; `lo` is the
    /// largest endpoint.
    BeyondLast { lo: f64 },
}

/// Result and audit counters of a value query.
#[derive(Debug, Clone, Copy)]
pub struct ValueResult {
    /// The approximation: `(1−ε)·D ≤ ν ≤ (1+ε)·D`.
    pub nu: f64,
    /// Anchor from the binary search: a certified strict lower bound on
    /// `D` (0 when even the zero threshold answered `AT_MOST`).
    pub lambda: f64,
    /// The constant `C = d°(p_i, q_1)/(1+ε/2)` seeding the final search.
    pub c_start: f64,
    pub bracket: Bracket,
    /// Zero cells pushed by the final threshold-raising search.
    pub cells_pushed: u64,
    /// Zero cells pushed by all binary-search decision probes combined.
    pub search_cells_pushed: u64,
    /// Oracle invocations across the whole query.
    pub oracle_calls: u64,
    /// Final relaxed threshold; `nu = rho_star_final / (1+ε/2)`.
    pub rho_star_final: f64,
    /// Times the final search promoted a parked cell and raised ρ*.
    pub heap_promotions: u64,
    /// Audit: the raised threshold never decreased (must always be true).
    pub rho_star_monotone: bool,
}

// ───────────────────────── exact reference ─────────────────────────

/// Exact discrete Fréchet distance by the classical dynamic program.
///
/// # Arguments
/// * `range` — optional 1-based inclusive subrange of `p`.
/// * `budget` — optional cap on lattice cells evaluated;
///   [`Error::BudgetExceeded`] when `(j−i+1)·m` exceeds it.
///
/// # Complexity
/// O(n·m) time, O(m) memory (two rolling rows).
pub fn exact_discrete_frechet(
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
    // dp[b] holds the best walk value reaching (current row, b+1).
    let mut dp = vec![0.0f64; m];
    let mut prev = vec![0.0f64; m];
    for a in 0..rows {
        std::mem::swap(&mut dp, &mut prev);
        for b in 0..m {
            let d = oracle.distance(p.pt(i + a), q.pt(b + 1))?;
            let reach = match (a, b) {
                (0, 0) => d,
                (0, _) => dp[b - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[b].min(prev[b - 1]).min(dp[b - 1]).max(d),
            };
            dp[b] = reach;
        }
    }
    Ok(dp[m - 1])
}

// ───────────────────────── lazy simplification cursor ─────────────────────────

/// Enumerates the μ-simplification of `P[i, j]` one vertex at a time,
/// through successor descents on the tree. Column `k` (1-based) of the
/// free-space matrix corresponds to `vertex(k)`.
struct LazySimplified<'a> {
    tree: &'a SimplificationTree,
    curve: &'a Curve,
    mu: f64,
    j: usize,
    indices: Vec<usize>,
    complete: bool,
}

impl<'a> LazySimplified<'a> {
    fn new(
        tree: &'a SimplificationTree,
        curve: &'a Curve,
        mu: f64,
        i: usize,
        j: usize,
    ) -> LazySimplified<'a> {
        LazySimplified {
            tree,
            curve,
            mu,
            j,
            indices: vec![i],
            complete: i == j,
        }
    }

    /// Curve index of simplification column `k`, enumerating on demand.
    fn vertex(&mut self, k: usize) -> Option<usize> {
        while self.indices.len() < k && !self.complete {
            let x = *self.indices.last().unwrap();
            let target = self.curve.prefix_raw(x) + self.mu;
            let (leaf, _) = self.tree_first_above(target);
            let y = leaf.map_or(usize::MAX, |t| t + 2);
            if y >= self.j {
                self.indices.push(self.j);
                self.complete = true;
            } else {
                self.indices.push(y);
            }
        }
        self.indices.get(k - 1).copied()
    }

    fn tree_first_above(&self, target: f64) -> (Option<usize>, u32) {
        self.tree.first_prefix_above(target)
    }

    /// True when column `k` is the final simplified vertex (which always
    /// equals `j`).
    fn is_last(&mut self, k: usize) -> bool {
        self.vertex(k + 1).is_none()
    }
}

// ───────────────────────── decision query ─────────────────────────

fn pack(a: usize, b: usize) -> u64 {
    ((a as u64) << 32) | b as u64
}

/// Fixed exploration order for the three monotone neighbor moves.
const MOVES: [(usize, usize); 3] = [(1, 0), (0, 1), (1, 1)];

/// Decide whether `D(P[i,j], Q) ≤ ρ`, one-sidedly.
///
/// `AT_MOST_ONE_PLUS_EPS_RHO` certifies `D ≤ (1+ε)·ρ`;
/// `GREATER_THAN_RHO` certifies `D > ρ`. Both certificates hold even when
/// the oracle is `(1+α)`-approximate with `α ≤ ε/6`.
pub fn decide(
    pre: &Preprocessed,
    oracle: &dyn DistanceOracle,
    q: &Curve,
    spec: &QuerySpec,
    rho: f64,
) -> Result<DecisionOutcome> {
    let (i, j) = spec.resolve(&pre.curve)?;
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Contract(format!(
            "rho must be finite and ≥ 0, got {rho}"
        )));
    }
    let rho_star = (1.0 + 0.5 * spec.eps) * rho;
    let mu = spec.eps * rho / 6.0;
    let mut lazy = LazySimplified::new(&pre.tree, &pre.curve, mu, i, j);
    let m = q.n();
    let mut out = DecisionOutcome {
        verdict: Verdict::GreaterThanRho,
        rho,
        rho_star,
        mu,
        cells_pushed: 0,
        oracle_calls: 0,
    };

    let first = lazy.vertex(1).expect("column 1 always exists");
    let d0 = oracle.distance(pre.curve.pt(first), q.pt(1))?;
    out.oracle_calls += 1;
    if d0 > rho_star {
        return Ok(out);
    }
    let mut stack = vec![(1usize, 1usize)];
    let mut visited: HashSet<u64> = HashSet::new();
    visited.insert(pack(1, 1));
    out.cells_pushed = 1;
    if lazy.is_last(1) && m == 1 {
        out.verdict = Verdict::AtMostOnePlusEpsRho;
        return Ok(out);
    }
    while let Some((a, b)) = stack.pop() {
        for (da, db) in MOVES {
            let (na, nb) = (a + da, b + db);
            if nb > m || visited.contains(&pack(na, nb)) {
                continue;
            }
            let Some(pv) = lazy.vertex(na) else { continue };
            let d = oracle.distance(pre.curve.pt(pv), q.pt(nb))?;
            out.oracle_calls += 1;
            if d <= rho_star {
                visited.insert(pack(na, nb));
                stack.push((na, nb));
                out.cells_pushed += 1;
                if nb == m && lazy.is_last(na) {
                    out.verdict = Verdict::AtMostOnePlusEpsRho;
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

// ───────────────────────── value query ─────────────────────────

/// Min-heap entry for parked (blocked) cells: ordered by perceived
/// distance, ties in lattice order.
#[derive(PartialEq)]
struct Parked {
    d: f64,
    a: usize,
    b: usize,
}

impl Eq for Parked {}

impl Ord for Parked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest d.
        other
            .d
            .total_cmp(&self.d)
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

impl PartialOrd for Parked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Compute `ν ∈ [(1−ε)·D, (1+ε)·D]` for `D = D(P[i,j], Q)`.
///
/// Runs O(log) decision probes over the digest's candidate endpoints to
/// find an anchor `λ` with `D > λ` and `λ` within a factor O(1) of `D`,
/// then a single threshold-raising search with fixed `μ = ε·λ/6`.
pub fn value(
    pre: &Preprocessed,
    oracle: &dyn DistanceOracle,
    q: &Curve,
    spec: &QuerySpec,
) -> Result<ValueResult> {
    let (i, j) = spec.resolve(&pre.curve)?;
    let scaled = scale_for_frechet(&pre.tadd, spec.eps)?;

    // Candidate thresholds: every endpoint of every scaled interval
    // (the sentinel contributes 0), sorted and deduped.
    let mut endpoints: Vec<f64> = Vec::with_capacity(2 * scaled.intervals.len());
    for iv in &scaled.intervals {
        endpoints.push(iv.lo);
        endpoints.push(iv.hi);
    }
    endpoints.sort_by(f64::total_cmp);
    endpoints.dedup();

    let mut search_cells = 0u64;
    let mut oracle_calls = 0u64;
    let mut probe = |rho: f64| -> Result<bool> {
        let out = decide(pre, oracle, q, spec, rho)?;
        search_cells += out.cells_pushed;
        oracle_calls += out.oracle_calls;
        Ok(out.verdict == Verdict::AtMostOnePlusEpsRho)
    };

    // Crossing bisection: find adjacent (false, true) endpoints. The
    // verdicts need not be globally monotone; one-sidedness still makes
    // any crossing a sound anchor (false at e ⇒ D > e).
    let last = endpoints.len() - 1;
    let (lambda, next_endpoint) = if probe(endpoints[0])? {
        (None, Some(endpoints[0]))
    } else if !probe(endpoints[last])? {
        (Some(endpoints[last]), None)
    } else {
        let (mut lo, mut hi) = (0usize, last);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe(endpoints[mid])? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (Some(endpoints[lo]), Some(endpoints[hi]))
    };

    let lambda_val = lambda.unwrap_or(0.0);
    let bracket = classify_bracket(&scaled.intervals, lambda, next_endpoint);

    // Final search at fixed μ = ε·λ/6.
    let eps = spec.eps;
    let relax = 1.0 + 0.5 * eps;
    let mu = eps * lambda_val / 6.0;
    let m = q.n();
    let mut lazy = LazySimplified::new(&pre.tree, &pre.curve, mu, i, j);

    let first = lazy.vertex(1).expect("column 1 always exists");
    let d11 = oracle.distance(pre.curve.pt(first), q.pt(1))?;
    oracle_calls += 1;
    let c_start = d11 / relax;
    let mut nu = c_start.max(lambda_val);
    let mut rho_star = relax * nu;
    let mut monotone = true;
    let mut promotions = 0u64;
    let mut pushed = 1u64;

    let mut stack = vec![(1usize, 1usize)];
    let mut visited: HashSet<u64> = HashSet::new();
    visited.insert(pack(1, 1));
    let mut heap: BinaryHeap<Parked> = BinaryHeap::new();

    let finish = |nu: f64,
                  rho_star: f64,
                  pushed: u64,
                  promotions: u64,
                  monotone: bool,
                  oracle_calls: u64,
                  search_cells: u64| ValueResult {
        nu,
        lambda: lambda_val,
        c_start,
        bracket,
        cells_pushed: pushed,
        search_cells_pushed: search_cells,
        oracle_calls,
        rho_star_final: rho_star,
        heap_promotions: promotions,
        rho_star_monotone: monotone,
    };

    if lazy.is_last(1) && m == 1 {
        return Ok(finish(
            nu,
            rho_star,
            pushed,
            promotions,
            monotone,
            oracle_calls,
            search_cells,
        ));
    }
    loop {
        while let Some((a, b)) = stack.pop() {
            for (da, db) in MOVES {
                let (na, nb) = (a + da, b + db);
                if nb > m || visited.contains(&pack(na, nb)) {
                    continue;
                }
                let Some(pv) = lazy.vertex(na) else { continue };
                let d = oracle.distance(pre.curve.pt(pv), q.pt(nb))?;
                oracle_calls += 1;
                if d <= rho_star {
                    visited.insert(pack(na, nb));
                    stack.push((na, nb));
                    pushed += 1;
                    if nb == m && lazy.is_last(na) {
                        return Ok(finish(
                            nu,
                            rho_star,
                            pushed,
                            promotions,
                            monotone,
                            oracle_calls,
                            search_cells,
                        ));
                    }
                } else {
                    heap.push(Parked { d, a: na, b: nb });
                }
            }
        }
        // Stranded: promote the smallest parked distance to the new
        // threshold. The target is always reachable at a large enough
        // threshold, so the heap cannot run dry before we finish.
        let cell = loop {
            let Some(c) = heap.pop() else {
                return Err(Error::Contract(
                    "internal: search frontier exhausted before reaching the target".into(),
                ));
            };
            if !visited.contains(&pack(c.a, c.b)) {
                break c;
            }
        };
        if cell.d < nu {
            monotone = false; // cannot happen; recorded for the audit
        }
        nu = cell.d;
        rho_star = relax * nu;
        promotions += 1;
        visited.insert(pack(cell.a, cell.b));
        stack.push((cell.a, cell.b));
        pushed += 1;
        if cell.b == m && lazy.is_last(cell.a) {
            return Ok(finish(
                nu,
                rho_star,
                pushed,
                promotions,
                monotone,
                oracle_calls,
                search_cells,
            ));
        }
    }
}

fn classify_bracket(
    intervals: &[crate::tadd::ScaledInterval],
    lambda: Option<f64>,
    next: Option<f64>,
) -> Bracket {
    match (lambda, next) {
        (Some(lo), None) => Bracket::BeyondLast { lo },
        (None, Some(first)) => Bracket::Gap { lo: 0.0, hi: first },
        (Some(lo), Some(hi)) => {
            // Smallest digest interval whose left endpoint is the anchor.
            for iv in intervals {
                if let IntervalSource::Tadd { c } = iv.source {
                    if iv.lo == lo && iv.hi >= hi {
                        return Bracket::Interval {
                            c,
                            lo: iv.lo,
                            hi: iv.hi,
                        };
                    }
                }
            }
            Bracket::Gap { lo, hi }
        }
        (None, None) => unreachable!("bisection always yields an endpoint"),
    }
}

/// Check an observed zero-cell count against the packedness bound
/// `8·(c·k/ε)·m`: `k = 6` for decision runs (`μ = ε·ρ/6`), `k = 24` for
/// value runs (the fixed `μ = ε·λ/6` together with the bounded final
/// threshold give `μ ≥ ε·ρ*/24`).
pub fn audit_zero_bound(cells_pushed: u64, c: f64, eps: f64, k: f64, m: usize) -> bool {
    (cells_pushed as f64) <= 8.0 * (c * k / eps) * m as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_curve, point};
    use crate::oracle::{euclidean_oracle, perturbed_oracle, PNorm};
    use crate::simplify::{simplify, End};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_curve(rng: &mut ChaCha8Rng, n: usize, span: f64) -> Curve {
        let o = euclidean_oracle(2, PNorm::L2);
        let pts: Vec<_> = (0..n)
            .map(|_| point(&[rng.gen_range(-span..span), rng.gen_range(-span..span)]))
            .collect();
        build_curve(pts, o.as_ref()).unwrap()
    }

    fn line_curve(xs: &[f64]) -> Curve {
        let o = euclidean_oracle(1, PNorm::L2);
        build_curve(xs.iter().map(|x| point(&[*x])).collect(), o.as_ref()).unwrap()
    }

    #[test]
    fn test_exact_frechet_identical_curves_is_zero() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let c = rand_curve(&mut rng, 12, 4.0);
        assert_eq!(
            exact_discrete_frechet(o.as_ref(), &c, &c, None, None).unwrap(),
            0.0
        );
    }

    #[test]
    fn test_exact_frechet_hand_examples() {
        let o = euclidean_oracle(1, PNorm::L2);
        let p = line_curve(&[0.0, 10.0]);
        let q = line_curve(&[0.0]);
        assert_eq!(
            exact_discrete_frechet(o.as_ref(), &p, &q, None, None).unwrap(),
            10.0
        );
        // P = 0,1,2 against Q = 0,2: the middle vertex must pair with one
        // endpoint of Q, at distance 1.
        let p = line_curve(&[0.0, 1.0, 2.0]);
        let q = line_curve(&[0.0, 2.0]);
        assert_eq!(
            exact_discrete_frechet(o.as_ref(), &p, &q, None, None).unwrap(),
            1.0
        );
        // Symmetric in its arguments.
        assert_eq!(
            exact_discrete_frechet(o.as_ref(), &q, &p, None, None).unwrap(),
            1.0
        );
    }

    #[test]
    fn test_exact_frechet_respects_budget() {
        let o = euclidean_oracle(1, PNorm::L2);
        let p = line_curve(&[0.0, 1.0, 2.0, 3.0]);
        let q = line_curve(&[0.0, 3.0]);
        assert!(matches!(
            exact_discrete_frechet(o.as_ref(), &p, &q, None, Some(7)),
            Err(Error::BudgetExceeded(7))
        ));
        assert!(exact_discrete_frechet(o.as_ref(), &p, &q, None, Some(8)).is_ok());
    }

    #[test]
    fn test_decide_two_point_example() {
        let o = euclidean_oracle(1, PNorm::L2);
        let p = Preprocessed::build(line_curve(&[0.0, 10.0])).unwrap();
        let q = line_curve(&[0.0]);
        let out = decide(&p, o.as_ref(), &q, &QuerySpec::full(0.1), 5.0).unwrap();
        assert_eq!(out.verdict, Verdict::GreaterThanRho);
        // D = 10 ≤ ρ = 10: must answer AT_MOST.
        let out = decide(&p, o.as_ref(), &q, &QuerySpec::full(0.1), 10.0).unwrap();
        assert_eq!(out.verdict, Verdict::AtMostOnePlusEpsRho);
    }

    #[test]
    fn test_decide_identical_curves_at_rho_zero() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let c = rand_curve(&mut rng, 10, 3.0);
        let pre = Preprocessed::build(c.clone()).unwrap();
        let out = decide(&pre, o.as_ref(), &c, &QuerySpec::full(0.5), 0.0).unwrap();
        assert_eq!(out.verdict, Verdict::AtMostOnePlusEpsRho);
        // A shifted copy is strictly farther than 0.
        let shifted: Vec<_> = c
            .iter_points()
            .map(|p| {
                let c = p.coords().unwrap();
                point(&[c[0] + 0.25, c[1]])
            })
            .collect();
        let q = build_curve(shifted, o.as_ref()).unwrap();
        let out = decide(&pre, o.as_ref(), &q, &QuerySpec::full(0.5), 0.0).unwrap();
        assert_eq!(out.verdict, Verdict::GreaterThanRho);
    }

    #[test]
    fn test_decide_is_one_sided_against_exact_reference() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for round in 0..150 {
            let p_n = rng.gen_range(2..=24);
            let p = rand_curve(&mut rng, p_n, 4.0);
            let q_n = rng.gen_range(1..=16);
            let q = rand_curve(&mut rng, q_n, 4.0);
            let d = exact_discrete_frechet(o.as_ref(), &p, &q, None, None).unwrap();
            let pre = Preprocessed::build(p).unwrap();
            for &eps in &[0.1, 0.5, 0.9] {
                for &rho in &[0.5 * d, d, 2.0 * d, rng.gen_range(0.0..6.0)] {
                    let out = decide(&pre, o.as_ref(), &q, &QuerySpec::full(eps), rho).unwrap();
                    match out.verdict {
                        Verdict::AtMostOnePlusEpsRho => assert!(
                            d <= (1.0 + eps) * rho + 1e-9,
                            "round {round}: AT_MOST at rho={rho} but D={d}"
                        ),
                        Verdict::GreaterThanRho => assert!(
                            d > rho - 1e-9,
                            "round {round}: GREATER at rho={rho} but D={d}"
                        ),
                    }
                }
            }
        }
    }

    #[test]
    fn test_decide_forced_verdicts_at_half_and_double() {
        // With an exact oracle, ρ = D forces AT_MOST and (for D > 0,
        // ε < 1) ρ = D/2 forces GREATER.
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..60 {
            let p_n = rng.gen_range(2..=20);
            let p = rand_curve(&mut rng, p_n, 4.0);
            let q_n = rng.gen_range(1..=12);
            let q = rand_curve(&mut rng, q_n, 4.0);
            let d = exact_discrete_frechet(o.as_ref(), &p, &q, None, None).unwrap();
            if d == 0.0 {
                continue;
            }
            let pre = Preprocessed::build(p).unwrap();
            for &eps in &[0.1, 0.5, 0.9] {
                let spec = QuerySpec::full(eps);
                assert_eq!(
                    decide(&pre, o.as_ref(), &q, &spec, d).unwrap().verdict,
                    Verdict::AtMostOnePlusEpsRho
                );
                assert_eq!(
                    decide(&pre, o.as_ref(), &q, &spec, 2.0 * d)
                        .unwrap()
                        .verdict,
                    Verdict::AtMostOnePlusEpsRho
                );
                assert_eq!(
                    decide(&pre, o.as_ref(), &q, &spec, 0.5 * d)
                        .unwrap()
                        .verdict,
                    Verdict::GreaterThanRho
                );
            }
        }
    }

    #[test]
    fn test_decide_stays_one_sided_with_perturbed_oracle() {
        let base = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for seed in 0..5u64 {
            for _ in 0..40 {
                let p_n = rng.gen_range(2..=20);
                let p = rand_curve(&mut rng, p_n, 4.0);
                let q_n = rng.gen_range(1..=12);
                let q = rand_curve(&mut rng, q_n, 4.0);
                let d = exact_discrete_frechet(base.as_ref(), &p, &q, None, None).unwrap();
                let pre = Preprocessed::build(p).unwrap();
                for &eps in &[0.1, 0.5, 0.9] {
                    let noisy = perturbed_oracle(base.clone(), eps / 6.0, seed).unwrap();
                    for &rho in &[0.5 * d, d, 2.0 * d] {
                        let out =
                            decide(&pre, noisy.as_ref(), &q, &QuerySpec::full(eps), rho).unwrap();
                        match out.verdict {
                            Verdict::AtMostOnePlusEpsRho => {
                                assert!(d <= (1.0 + eps) * rho + 1e-9)
                            }
                            Verdict::GreaterThanRho => assert!(d > rho - 1e-9),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn test_value_sandwich_against_exact_reference() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for round in 0..150 {
            let p_n = rng.gen_range(2..=24);
            let p = rand_curve(&mut rng, p_n, 4.0);
            let q_n = rng.gen_range(1..=16);
            let q = rand_curve(&mut rng, q_n, 4.0);
            let d = exact_discrete_frechet(o.as_ref(), &p, &q, None, None).unwrap();
            let pre = Preprocessed::build(p).unwrap();
            for &eps in &[0.1, 0.5, 0.9] {
                let res = value(&pre, o.as_ref(), &q, &QuerySpec::full(eps)).unwrap();
                assert!(
                    res.nu >= (1.0 - eps) * d - 1e-9 && res.nu <= (1.0 + eps) * d + 1e-9,
                    "round {round} eps={eps}: nu={} for D={d}",
                    res.nu
                );
                assert!(res.rho_star_monotone, "round {round}: rho* decreased");
            }
        }
    }

    #[test]
    fn test_value_zero_for_identical_curves() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let c = rand_curve(&mut rng, 15, 3.0);
        let pre = Preprocessed::build(c.clone()).unwrap();
        let res = value(&pre, o.as_ref(), &c, &QuerySpec::full(0.5)).unwrap();
        assert_eq!(res.nu, 0.0);
        assert_eq!(res.lambda, 0.0);
    }

    #[test]
    fn test_value_subcurve_queries_sandwich_their_own_reference() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        for _ in 0..80 {
            let n = rng.gen_range(3..=24);
            let p = rand_curve(&mut rng, n, 4.0);
            let q_n = rng.gen_range(1..=12);
            let q = rand_curve(&mut rng, q_n, 4.0);
            let i = rng.gen_range(1..=n);
            let j = rng.gen_range(i..=n);
            let d = exact_discrete_frechet(o.as_ref(), &p, &q, Some((i, j)), None).unwrap();
            let pre = Preprocessed::build(p.clone()).unwrap();
            let eps = 0.5;
            let res = value(&pre, o.as_ref(), &q, &QuerySpec::sub(eps, i, j)).unwrap();
            assert!(res.nu >= (1.0 - eps) * d - 1e-9 && res.nu <= (1.0 + eps) * d + 1e-9);

            // Decision verdicts agree exactly with querying a freshly
            // preprocessed copy of the subcurve.
            let sub_pts: Vec<_> = (i..=j).map(|k| p.pt(k).clone()).collect();
            let sub = Preprocessed::build(build_curve(sub_pts, o.as_ref()).unwrap()).unwrap();
            for &rho in &[0.5 * d, d, 2.0 * d, 0.37] {
                let a = decide(&pre, o.as_ref(), &q, &QuerySpec::sub(eps, i, j), rho).unwrap();
                let b = decide(&sub, o.as_ref(), &q, &QuerySpec::full(eps), rho).unwrap();
                assert_eq!(a.verdict, b.verdict, "i={i} j={j} rho={rho}");
            }
            // The subcurve value answer satisfies the same sandwich.
            let res_sub = value(&sub, o.as_ref(), &q, &QuerySpec::full(eps)).unwrap();
            assert!(res_sub.nu >= (1.0 - eps) * d - 1e-9 && res_sub.nu <= (1.0 + eps) * d + 1e-9);
        }
    }

    #[test]
    fn test_simplification_stays_within_mu_of_the_curve() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        for _ in 0..120 {
            let n = rng.gen_range(2..=30);
            let p = rand_curve(&mut rng, n, 4.0);
            let tree = build_tree(&p);
            let mu = rng.gen_range(0.0..p.total_length() + 0.1);
            let view = simplify(&tree, &p, mu, 1, n, None).unwrap();
            let kept: Vec<_> = view.indices.iter().map(|&k| p.pt(k).clone()).collect();
            let simplified = build_curve(kept, o.as_ref()).unwrap();
            let d = exact_discrete_frechet(o.as_ref(), &simplified, &p, None, None).unwrap();
            assert!(d <= mu + 1e-9, "D(P^mu, P) = {d} exceeds mu = {mu}");
        }
    }

    #[test]
    fn test_zero_bound_audit_on_line_curves() {
        // Straight unit-spaced lines certify c ≤ 2; the audit formula at
        // ε = 0.5 allows 192·m pushed cells for decision runs.
        let o = euclidean_oracle(1, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for &n in &[16usize, 64, 256] {
            let p = line_curve(&(0..n).map(|k| k as f64).collect::<Vec<_>>());
            let pre = Preprocessed::build(p).unwrap();
            for _ in 0..10 {
                let m = rng.gen_range(1..=12);
                let q = rand_curve(&mut rng, m, n as f64 / 2.0);
                let q = {
                    // Project to 1-D so the spaces match.
                    let pts: Vec<_> = q
                        .iter_points()
                        .map(|pt| point(&[pt.coords().unwrap()[0]]))
                        .collect();
                    build_curve(pts, o.as_ref()).unwrap()
                };
                let eps = 0.5;
                let rho = rng.gen_range(0.0..1.5 * n as f64);
                let out = decide(&pre, o.as_ref(), &q, &QuerySpec::full(eps), rho).unwrap();
                assert!(
                    audit_zero_bound(out.cells_pushed, 2.0, eps, 6.0, m),
                    "decision pushed {} cells, m={m}",
                    out.cells_pushed
                );
                let res = value(&pre, o.as_ref(), &q, &QuerySpec::full(eps)).unwrap();
                assert!(
                    audit_zero_bound(res.cells_pushed, 2.0, eps, 24.0, m),
                    "value pushed {} cells, m={m}",
                    res.cells_pushed
                );
            }
        }
    }

    #[test]
    fn test_updates_preserve_query_exactness() {
        // Integer-valued instances: after end updates, a value query must
        // agree bit-for-bit with a freshly preprocessed copy.
        let o = euclidean_oracle(1, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for round in 0..30 {
            let mut pre = Preprocessed::build(line_curve(&[0.0, 1.0, 3.0])).unwrap();
            for _ in 0..rng.gen_range(1..25) {
                match rng.gen_range(0..4) {
                    0 => {
                        let step = rng.gen_range(1..6) as f64;
                        let end = pre.curve.pt(pre.curve.n()).coords().unwrap()[0];
                        pre.extend(End::Tail, point(&[end + step]), step).unwrap();
                    }
                    1 => {
                        let step = rng.gen_range(1..6) as f64;
                        let end = pre.curve.pt(1).coords().unwrap()[0];
                        pre.extend(End::Head, point(&[end - step]), step).unwrap();
                    }
                    2 if pre.curve.n() > 1 => pre.truncate(End::Tail).unwrap(),
                    _ if pre.curve.n() > 1 => pre.truncate(End::Head).unwrap(),
                    _ => {}
                }
            }
            let xs: Vec<f64> = pre
                .curve
                .iter_points()
                .map(|p| p.coords().unwrap()[0])
                .collect();
            let fresh = Preprocessed::build(line_curve(&xs)).unwrap();
            let q = line_curve(&[rng.gen_range(-3..3) as f64, rng.gen_range(-3..10) as f64]);
            for &eps in &[0.1, 0.5] {
                let a = value(&pre, o.as_ref(), &q, &QuerySpec::full(eps)).unwrap();
                let b = value(&fresh, o.as_ref(), &q, &QuerySpec::full(eps)).unwrap();
                assert_eq!(a.nu.to_bits(), b.nu.to_bits(), "round {round} eps={eps}");
                let rho = rng.gen_range(0..8) as f64;
                let da = decide(&pre, o.as_ref(), &q, &QuerySpec::full(eps), rho).unwrap();
                let db = decide(&fresh, o.as_ref(), &q, &QuerySpec::full(eps), rho).unwrap();
                assert_eq!(da.verdict, db.verdict, "round {round} eps={eps} rho={rho}");
            }
        }
    }

    #[test]
    fn test_query_contract_violations() {
        let o = euclidean_oracle(1, PNorm::L2);
        let pre = Preprocessed::build(line_curve(&[0.0, 1.0])).unwrap();
        let q = line_curve(&[0.0]);
        assert!(decide(&pre, o.as_ref(), &q, &QuerySpec::full(0.0), 1.0).is_err());
        assert!(decide(&pre, o.as_ref(), &q, &QuerySpec::full(1.0), 1.0).is_err());
        assert!(decide(&pre, o.as_ref(), &q, &QuerySpec::full(0.5), -1.0).is_err());
        assert!(decide(&pre, o.as_ref(), &q, &QuerySpec::full(0.5), f64::NAN).is_err());
        assert!(decide(&pre, o.as_ref(), &q, &QuerySpec::sub(0.5, 1, 3), 1.0).is_err());
        assert!(decide(&pre, o.as_ref(), &q, &QuerySpec::sub(0.5, 2, 1), 1.0).is_err());
    }
}
