//! Polygonal curves over a metric space, and a packedness estimator.
//!
//! A [`Curve`] stores its vertices `p_1 … p_n` (1-based indexing
//! throughout), the perceived lengths of its `n−1` edges, and the prefix
//! lengths `λ_i = ℓ(P[1, i])` used by the simplification machinery. The
//! deques and the `origin` field exist for the dynamic variant: vertices
//! can be attached or removed at both ends in O(1) here (plus O(log n) in
//! the companion tree), and a head extension must not rewrite the stored
//! prefix values — instead the effective prefix is read relative to
//! `origin`, which is always the stored value at the current first vertex.
//!
//! [`estimate_packedness`] reports a certified lower bound on the curve's
//! packedness constant `c` (the largest ratio `ℓ(P ∩ B) / r` over balls
//! `B` of radius `r`) by enumerating candidate balls: centers at vertices
//! and edge midpoints, radii from pairwise vertex distances and their
//! halves, with the portion of each edge inside a ball measured exactly.

use crate::oracle::{lp_distance, AmbientPoint, DistanceOracle, PNorm, Space};
use crate::{Error, Result};
use std::collections::VecDeque;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Convenience constructor for a Euclidean [`AmbientPoint`].
pub fn point(coords: &[f64]) -> AmbientPoint {
    AmbientPoint::Euclid(coords.to_vec())
}

/// Convenience constructor for a graph-vertex [`AmbientPoint`].
pub fn gpoint(vertex: u32) -> AmbientPoint {
    AmbientPoint::Graph(vertex)
}

/// A polygonal curve with perceived edge lengths and prefix sums.
#[derive(Debug, Clone)]
pub struct Curve {
    points: VecDeque<AmbientPoint>,
    /// Perceived length of edge (p_i, p_{i+1}) at deque index i−1.
    edges: VecDeque<f64>,
    /// Stored prefix values; effective λ_i = stored[i−1] − origin.
    prefix: VecDeque<f64>,
    /// Always equals the stored prefix of the current first vertex.
    origin: f64,
    /// Accuracy α of the oracle that measured the edges.
    alpha: f64,
    space: Space,
}

impl Curve {
    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Vertex `p_i`, 1-based.
    pub fn pt(&self, i: usize) -> &AmbientPoint {
        &self.points[i - 1]
    }

    /// Perceived length of edge (p_i, p_{i+1}), for `1 ≤ i ≤ n−1`.
    pub fn edge_len(&self, i: usize) -> f64 {
        self.edges[i - 1]
    }

    /// Effective prefix length `λ_i = ℓ(P[1, i])`; `λ_1 = 0`.
    pub fn prefix_len(&self, i: usize) -> f64 {
        self.prefix[i - 1] - self.origin
    }

    /// Length of the subcurve `P[i, j]`, i.e. `λ_j − λ_i`. The origin
    /// cancels, so this is exact relative to the stored prefix values.
    pub fn subcurve_length(&self, i: usize, j: usize) -> f64 {
        self.prefix[j - 1] - self.prefix[i - 1]
    }

    /// Raw stored prefix value at vertex `i` (no origin adjustment).
    /// Simplification compares these verbatim: the predicate
    /// `ℓ(P[x, y]) > μ` is evaluated as `raw_y > raw_x + μ`, which the
    /// successor tree reproduces bit for bit.
    pub(crate) fn prefix_raw(&self, i: usize) -> f64 {
        self.prefix[i - 1]
    }

    /// Total length `ℓ(P)`.
    pub fn total_length(&self) -> f64 {
        self.subcurve_length(1, self.n())
    }

    /// Accuracy of the oracle that built this curve.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The space the vertices live in.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Validate a 1-based inclusive vertex range.
    pub fn check_range(&self, i: usize, j: usize) -> Result<()> {
        if i < 1 || j < i || j > self.n() {
            return Err(Error::Contract(format!(
                "vertex range [{i}, {j}] invalid for a curve with {} vertices",
                self.n()
            )));
        }
        Ok(())
    }

    /// Iterate vertices in curve order.
    pub fn iter_points(&self) -> impl Iterator<Item = &AmbientPoint> {
        self.points.iter()
    }

    // ── dynamic plumbing, driven by `simplify::extend` / `truncate` ──

    pub(crate) fn attach_tail(&mut self, p: AmbientPoint, edge: f64) {
        let last = *self.prefix.back().expect("curve is never empty");
        self.points.push_back(p);
        self.edges.push_back(edge);
        self.prefix.push_back(last + edge);
    }

    pub(crate) fn attach_head(&mut self, p: AmbientPoint, edge: f64) {
        // Existing stored prefixes stay untouched; the new head's stored
        // value sits `edge` below the old head, and origin follows it so
        // the effective λ_1 remains 0.
        let first = *self.prefix.front().expect("curve is never empty");
        self.points.push_front(p);
        self.edges.push_front(edge);
        self.prefix.push_front(first - edge);
        self.origin = first - edge;
    }

    pub(crate) fn detach_tail(&mut self) {
        self.points.pop_back();
        self.edges.pop_back();
        self.prefix.pop_back();
    }

    pub(crate) fn detach_head(&mut self) {
        self.points.pop_front();
        self.edges.pop_front();
        self.prefix.pop_front();
        self.origin = *self.prefix.front().expect("curve is never empty");
    }

    /// Raw stored prefix values and origin, for serialization. Effective
    /// prefixes must round-trip bit-exactly, so bundles persist these
    /// verbatim instead of recomputing a cumulative sum on load.
    pub fn raw_prefix(&self) -> (impl Iterator<Item = f64> + '_, f64) {
        (self.prefix.iter().copied(), self.origin)
    }

    /// Rebuild a curve from serialized parts. Edges and prefixes must have
    /// length `n−1` and `n`; callers are expected to pass data produced by
    /// [`Curve::raw_prefix`] and the edge accessors.
    pub fn from_parts(
        points: Vec<AmbientPoint>,
        edges: Vec<f64>,
        prefix: Vec<f64>,
        origin: f64,
        alpha: f64,
        space: Space,
    ) -> Result<Curve> {
        if points.is_empty() {
            return Err(Error::Contract("a curve needs at least one vertex".into()));
        }
        if edges.len() + 1 != points.len() || prefix.len() != points.len() {
            return Err(Error::Contract(format!(
                "inconsistent curve parts: {} points, {} edges, {} prefixes",
                points.len(),
                edges.len(),
                prefix.len()
            )));
        }
        for p in &points {
            space.admit(p)?;
        }
        for (k, e) in edges.iter().enumerate() {
            if !e.is_finite() || *e < 0.0 {
                return Err(Error::NonFinite(format!("edge {} has length {e}", k + 1)));
            }
        }
        if prefix[0] != origin {
            return Err(Error::Contract(
                "origin must equal the first stored prefix value".into(),
            ));
        }
        Ok(Curve {
            points: points.into(),
            edges: edges.into(),
            prefix: prefix.into(),
            origin,
            alpha,
            space,
        })
    }
}

/// Build a curve by measuring consecutive edges with `oracle`.
///
/// # Arguments
/// * `points` — at least one vertex, all admitted by the oracle's space.
///
/// # Returns
/// A curve whose prefix lengths satisfy `λ_1 = 0` and
/// `λ_{i+1} = λ_i + d°(p_i, p_{i+1})` exactly as accumulated.
pub fn build_curve(points: Vec<AmbientPoint>, oracle: &dyn DistanceOracle) -> Result<Curve> {
    if points.is_empty() {
        return Err(Error::Contract("a curve needs at least one vertex".into()));
    }
    let space = oracle.space();
    for p in &points {
        space.admit(p)?;
    }
    let mut edges = VecDeque::with_capacity(points.len().saturating_sub(1));
    let mut prefix = VecDeque::with_capacity(points.len());
    prefix.push_back(0.0);
    for w in 0..points.len() - 1 {
        let e = oracle.distance(&points[w], &points[w + 1])?;
        edges.push_back(e);
        prefix.push_back(prefix[w] + e);
    }
    Ok(Curve {
        points: points.into(),
        edges,
        prefix,
        origin: 0.0,
        alpha: oracle.alpha(),
        space: space.clone(),
    })
}

// ───────────────────────── packedness estimation ─────────────────────────

/// Certified lower bound on the packedness constant, with the ball that
/// realizes it.
#[derive(Debug, Clone)]
pub struct PackednessReport {
    /// max over candidate balls of `ℓ(P ∩ B(center, r)) / r`.
    pub c_lower: f64,
    /// Center of the realizing ball (empty when the curve has no edges).
    pub witness_center: Vec<f64>,
    /// Radius of the realizing ball (0 when the curve has no edges).
    pub witness_radius: f64,
}

/// Length of `{a + t·(b−a) : t ∈ [0,1]} ∩ B(c, r)` measured in `norm`.
///
/// Exact up to rounding for all three norms: L2 reduces to a quadratic,
/// L∞ to a per-coordinate interval intersection, and L1 to a scan over
/// the breakpoints of a convex piecewise-affine function.
fn clipped_edge_length(a: &[f64], b: &[f64], c: &[f64], r: f64, norm: PNorm) -> f64 {
    let dim = a.len();
    let u: Vec<f64> = (0..dim).map(|k| a[k] - c[k]).collect();
    let v: Vec<f64> = (0..dim).map(|k| b[k] - a[k]).collect();
    let edge_len = lp_distance(a, b, norm);
    if edge_len == 0.0 {
        return 0.0;
    }
    let measure = match norm {
        PNorm::L2 => {
            let vv: f64 = v.iter().map(|x| x * x).sum();
            let uv: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
            let uu: f64 = u.iter().map(|x| x * x).sum();
            let disc = uv * uv - vv * (uu - r * r);
            if disc < 0.0 {
                0.0
            } else {
                let root = disc.sqrt();
                let t0 = (-uv - root) / vv;
                let t1 = (-uv + root) / vv;
                (t1.min(1.0) - t0.max(0.0)).max(0.0)
            }
        }
        PNorm::LInf => {
            // Each axis contributes the interval where |u_k + t·v_k| ≤ r.
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            for k in 0..dim {
                if v[k] == 0.0 {
                    if u[k].abs() > r {
                        return 0.0;
                    }
                } else {
                    let t_a = (-r - u[k]) / v[k];
                    let t_b = (r - u[k]) / v[k];
                    lo = lo.max(t_a.min(t_b));
                    hi = hi.min(t_a.max(t_b));
                }
            }
            (hi - lo).max(0.0)
        }
        PNorm::L1 => {
            // g(t) = Σ |u_k + t·v_k| is convex piecewise affine with
            // breakpoints where a coordinate changes sign.
            let g = |t: f64| -> f64 { (0..dim).map(|k| (u[k] + t * v[k]).abs()).sum() };
            let mut ts: Vec<f64> = vec![0.0, 1.0];
            for k in 0..dim {
                if v[k] != 0.0 {
                    let t = -u[k] / v[k];
                    if t > 0.0 && t < 1.0 {
                        ts.push(t);
                    }
                }
            }
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            let mut inside = 0.0;
            for w in ts.windows(2) {
                let (ta, tb) = (w[0], w[1]);
                let (ga, gb) = (g(ta), g(tb));
                // On this piece g is affine, so the sublevel set is found
                // by linear interpolation of the endpoints.
                inside += match (ga <= r, gb <= r) {
                    (true, true) => tb - ta,
                    (false, false) => 0.0,
                    (true, false) => (r - ga) / (gb - ga) * (tb - ta),
                    (false, true) => (r - gb) / (ga - gb) * (tb - ta),
                };
            }
            inside
        }
    };
    measure * edge_len
}

/// Estimate the curve's packedness constant from below.
///
/// Candidate balls use every vertex and every edge midpoint as a center,
/// and every pairwise vertex distance and its half as a radius. The
/// returned ratio is realized by an actual ball, so it is a certified
/// lower bound on `c`; it is also monotone under appending vertices
/// (candidates only accumulate, and each candidate's clipped length can
/// only grow). O(n³) candidate pairs — intended for curves up to a few
/// hundred vertices.
///
/// # Returns
/// [`Error::Unsupported`] for graph-space curves: balls there are not
/// geometric objects this estimator can clip edges against.
pub fn estimate_packedness(curve: &Curve, oracle: &dyn DistanceOracle) -> Result<PackednessReport> {
    let norm = match curve.space() {
        Space::Euclid { norm, .. } => *norm,
        Space::Graph { .. } => {
            return Err(Error::Unsupported(
                "packedness estimation needs a geometric (Euclidean) space".into(),
            ))
        }
    };
    let n = curve.n();
    if n < 2 {
        return Ok(PackednessReport {
            c_lower: 0.0,
            witness_center: Vec::new(),
            witness_radius: 0.0,
        });
    }
    let coords: Vec<&[f64]> = curve
        .iter_points()
        .map(|p| p.coords().expect("space checked Euclidean"))
        .collect();

    // Radii: all pairwise distances and their halves, deduped.
    let mut radii = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = oracle.distance(curve.pt(i + 1), curve.pt(j + 1))?;
            if d > 0.0 {
                radii.push(d);
                radii.push(d / 2.0);
            }
        }
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if radii.is_empty() {
        // All vertices coincide: zero length inside any ball.
        return Ok(PackednessReport {
            c_lower: 0.0,
            witness_center: coords[0].to_vec(),
            witness_radius: 0.0,
        });
    }

    // Centers: vertices, then edge midpoints.
    let mut centers: Vec<Vec<f64>> = coords.iter().map(|c| c.to_vec()).collect();
    for w in 0..n - 1 {
        let mid: Vec<f64> = coords[w]
            .iter()
            .zip(coords[w + 1])
            .map(|(x, y)| 0.5 * (x + y))
            .collect();
        centers.push(mid);
    }

    // Best candidate per center; reduce lexicographically by
    // (ratio, center index, radius index) so the answer does not depend
    // on evaluation order.
    let score_center = |(ci, center): (usize, &Vec<f64>)| -> (f64, usize, usize) {
        let mut best = (0.0f64, ci, 0usize);
        for (ri, &r) in radii.iter().enumerate() {
            let total: f64 = (0..n - 1)
                .map(|w| clipped_edge_length(coords[w], coords[w + 1], center, r, norm))
                .sum();
            let ratio = total / r;
            if ratio > best.0 || (ratio == best.0 && ri > best.2) {
                best = (ratio, ci, ri);
            }
        }
        best
    };

    #[cfg(feature = "parallel")]
    let best = centers.par_iter().enumerate().map(score_center).reduce(
        || (0.0, usize::MAX, usize::MAX),
        |x, y| if y > x { y } else { x },
    );
    #[cfg(not(feature = "parallel"))]
    let best =
        centers
            .iter()
            .enumerate()
            .map(score_center)
            .fold(
                (0.0, usize::MAX, usize::MAX),
                |x, y| if y > x { y } else { x },
            );

    let (c_lower, ci, ri) = best;
    if ci == usize::MAX {
        return Ok(PackednessReport {
            c_lower: 0.0,
            witness_center: coords[0].to_vec(),
            witness_radius: 0.0,
        });
    }
    Ok(PackednessReport {
        c_lower,
        witness_center: centers[ci].clone(),
        witness_radius: radii[ri],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{euclidean_oracle, graph_oracle, GraphEdge, WeightedGraph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn test_prefix_lengths_on_a_line() {
        let o = euclidean_oracle(1, PNorm::L2);
        let c = build_curve(
            vec![point(&[0.0]), point(&[1.0]), point(&[3.0])],
            o.as_ref(),
        )
        .unwrap();
        assert_eq!(c.prefix_len(1), 0.0);
        assert_eq!(c.prefix_len(2), 1.0);
        assert_eq!(c.prefix_len(3), 3.0);
        assert_eq!(c.total_length(), 3.0);
    }

    #[test]
    fn test_prefix_lengths_in_the_plane() {
        let o = euclidean_oracle(2, PNorm::L2);
        let c = build_curve(
            vec![point(&[0.0, 0.0]), point(&[3.0, 4.0]), point(&[3.0, 5.0])],
            o.as_ref(),
        )
        .unwrap();
        assert_eq!(c.prefix_len(2), 5.0);
        assert_eq!(c.prefix_len(3), 6.0);
        assert_eq!(c.subcurve_length(2, 3), 1.0);
        assert_eq!(c.subcurve_length(1, 1), 0.0);
    }

    #[test]
    fn test_prefix_is_the_exact_running_sum() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<_> = (0..64)
            .map(|_| point(&[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]))
            .collect();
        let c = build_curve(pts, o.as_ref()).unwrap();
        let mut acc = 0.0f64;
        for i in 1..c.n() {
            acc += c.edge_len(i);
            assert_eq!(acc.to_bits(), c.prefix_len(i + 1).to_bits());
        }
    }

    #[test]
    fn test_subcurve_length_dominates_endpoint_distance() {
        // Walking along the curve is never shorter than the straight hop.
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pts: Vec<_> = (0..40)
            .map(|_| point(&[rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]))
            .collect();
        let c = build_curve(pts, o.as_ref()).unwrap();
        for i in 1..=c.n() {
            for j in i..=c.n() {
                let direct = o.distance(c.pt(i), c.pt(j)).unwrap();
                assert!(c.subcurve_length(i, j) >= direct - 1e-9 * direct.max(1.0));
            }
        }
    }

    #[test]
    fn test_build_rejects_empty_and_bad_points() {
        let o = euclidean_oracle(2, PNorm::L2);
        assert!(build_curve(vec![], o.as_ref()).is_err());
        assert!(build_curve(vec![point(&[1.0])], o.as_ref()).is_err());
        assert!(build_curve(vec![point(&[f64::INFINITY, 0.0])], o.as_ref()).is_err());
        // A single valid vertex is a legal (edgeless) curve.
        let c = build_curve(vec![point(&[1.0, 2.0])], o.as_ref()).unwrap();
        assert_eq!(c.n(), 1);
        assert_eq!(c.total_length(), 0.0);
    }

    #[test]
    fn test_head_attach_keeps_effective_prefixes() {
        let o = euclidean_oracle(1, PNorm::L2);
        let mut c = build_curve(vec![point(&[0.0]), point(&[1.0])], o.as_ref()).unwrap();
        c.attach_head(point(&[-5.0]), 5.0);
        assert_eq!(c.n(), 3);
        assert_eq!(c.prefix_len(1), 0.0);
        assert_eq!(c.prefix_len(2), 5.0);
        assert_eq!(c.prefix_len(3), 6.0);
        c.detach_head();
        assert_eq!(c.prefix_len(1), 0.0);
        assert_eq!(c.prefix_len(2), 1.0);
    }

    // ── clipping reference: dense sampling along the edge ──

    fn sampled_clip(a: &[f64], b: &[f64], c: &[f64], r: f64, norm: PNorm) -> f64 {
        let steps = 400_000;
        let mut hits = 0u64;
        let dim = a.len();
        let mut p = vec![0.0; dim];
        for s in 0..steps {
            let t = (s as f64 + 0.5) / steps as f64;
            for k in 0..dim {
                p[k] = a[k] + t * (b[k] - a[k]);
            }
            if lp_distance(&p, c, norm) <= r {
                hits += 1;
            }
        }
        hits as f64 / steps as f64 * lp_distance(a, b, norm)
    }

    #[test]
    fn test_clipped_edge_length_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for norm in [PNorm::L1, PNorm::L2, PNorm::LInf] {
            for _ in 0..40 {
                let a = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let b = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let c = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let r = rng.gen_range(0.1..2.5);
                let exact = clipped_edge_length(&a, &b, &c, r, norm);
                let approx = sampled_clip(&a, &b, &c, r, norm);
                assert!(
                    (exact - approx).abs() < 1e-3,
                    "{norm:?}: exact {exact} vs sampled {approx}"
                );
            }
        }
    }

    #[test]
    fn test_packedness_of_two_point_curve_is_exactly_two() {
        let o = euclidean_oracle(2, PNorm::L2);
        let c = build_curve(vec![point(&[0.0, 0.0]), point(&[7.0, 0.0])], o.as_ref()).unwrap();
        let rep = estimate_packedness(&c, o.as_ref()).unwrap();
        // The ball centered at the midpoint with radius d/2 holds the
        // whole segment: ratio d / (d/2) = 2, and no ball beats it.
        assert_eq!(rep.c_lower, 2.0);
        assert_eq!(rep.witness_radius, 3.5);
    }

    #[test]
    fn test_packedness_of_sampled_segment_stays_near_two() {
        let o = euclidean_oracle(2, PNorm::L2);
        let pts: Vec<_> = (0..32).map(|k| point(&[k as f64, 0.0])).collect();
        let c = build_curve(pts, o.as_ref()).unwrap();
        let rep = estimate_packedness(&c, o.as_ref()).unwrap();
        assert!(
            rep.c_lower <= 2.0 + 1e-9,
            "line reported c = {}",
            rep.c_lower
        );
        assert!(rep.c_lower >= 2.0 - 1e-9);
    }

    #[test]
    fn test_packedness_detects_retraced_segment() {
        // Zigzag over [0, 1] with half-unit steps: 0, ½, 1, ½, 0, …
        // r round trips give total length r inside B(½, ½): ratio 2r.
        let o = euclidean_oracle(1, PNorm::L2);
        let r = 5usize;
        let pts: Vec<_> = (0..=2 * r)
            .map(|k| {
                let pos = match k % 4 {
                    0 => 0.0,
                    1 | 3 => 0.5,
                    _ => 1.0,
                };
                point(&[pos])
            })
            .collect();
        let c = build_curve(pts, o.as_ref()).unwrap();
        assert_eq!(c.total_length(), r as f64);
        let rep = estimate_packedness(&c, o.as_ref()).unwrap();
        assert!(
            rep.c_lower >= 2.0 * r as f64 - 1e-6,
            "retrace x{r} reported c = {}",
            rep.c_lower
        );
    }

    #[test]
    fn test_packedness_is_monotone_under_appends() {
        let o = euclidean_oracle(2, PNorm::L2);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let pts: Vec<_> = (0..20)
            .map(|_| point(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]))
            .collect();
        let mut last = 0.0;
        for k in 2..=pts.len() {
            let c = build_curve(pts[..k].to_vec(), o.as_ref()).unwrap();
            let rep = estimate_packedness(&c, o.as_ref()).unwrap();
            assert!(
                rep.c_lower >= last,
                "estimate dropped from {last} to {} at k = {k}",
                rep.c_lower
            );
            last = rep.c_lower;
        }
    }

    #[test]
    fn test_packedness_unsupported_for_graph_curves() {
        let g = WeightedGraph {
            n: 3,
            edges: vec![
                GraphEdge { u: 0, v: 1, w: 1.0 },
                GraphEdge { u: 1, v: 2, w: 1.0 },
            ],
        };
        let o = graph_oracle(g).unwrap();
        let c = build_curve(vec![gpoint(0), gpoint(1), gpoint(2)], o.as_ref()).unwrap();
        assert!(matches!(
            estimate_packedness(&c, o.as_ref()),
            Err(Error::Unsupported(_))
        ));
    }
}
