//! Curve and graph generators with analytically known packedness where it
//! matters: `line` certifies `c ≤ 2`, `retrace --r R` certifies `c ≥ 2R`.
//!
//! Determinism contract: a fixed seed produces byte-identical files on
//! every run. The random generators therefore derive floats by explicit
//! bit manipulation of the ChaCha stream (53-bit mantissa scaling) rather
//! than through distribution helpers whose internals may change.

use crate::error::{CliError, Result};
use pfre_core::oracle::{GraphEdge, WeightedGraph};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random source: ChaCha8 words, scaled by hand.
pub struct Det(ChaCha8Rng);

impl Det {
    pub fn new(seed: u64) -> Det {
        Det(ChaCha8Rng::seed_from_u64(seed))
    }
    fn word(&mut self) -> u64 {
        self.0.next_u64()
    }
    /// Uniform in `[0, 1)` with 53 significant bits.
    fn unit(&mut self) -> f64 {
        (self.word() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
    /// Uniform in `[-1, 1)`.
    fn sym(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }
    /// Uniform in `0..n` (modulo; the bias is irrelevant for test data).
    fn below(&mut self, n: u64) -> u64 {
        self.word() % n
    }
}

/// `n` collinear points at unit spacing; a segment traversed once has
/// packedness 2.
pub fn line(n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let mut p = vec![0.0; dim];
            p[0] = k as f64;
            p
        })
        .collect()
}

/// Archimedean-style spiral in the first two coordinates.
pub fn spiral(n: usize, dim: usize) -> Result<Vec<Vec<f64>>> {
    if dim < 2 {
        return Err(CliError::Usage("spiral needs --dim at least 2".to_string()));
    }
    Ok((0..n)
        .map(|k| {
            let t = k as f64 * 0.4;
            let r = 0.1 * k as f64;
            let mut p = vec![0.0; dim];
            p[0] = r * t.cos();
            p[1] = r * t.sin();
            p
        })
        .collect())
}

/// `r` full traversals of the unit segment, spread over `n` vertices;
/// packedness approaches `2r` (a ball of radius δ around an interior point
/// holds `2δ` of curve per traversal).
pub fn retrace(n: usize, r: usize, dim: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 || r < 1 {
        return Err(CliError::Usage(
            "retrace needs --n at least 2 and --r at least 1".to_string(),
        ));
    }
    Ok((0..n)
        .map(|s| {
            let t = s as f64 * r as f64 / (n - 1) as f64;
            let leg = (t.floor() as usize).min(r - 1);
            let frac = t - leg as f64;
            let mut p = vec![0.0; dim];
            p[0] = if leg.is_multiple_of(2) {
                frac
            } else {
                1.0 - frac
            };
            p
        })
        .collect())
}

/// Random walk with independent uniform `[-1, 1)` step components.
pub fn random_walk(n: usize, dim: usize, rng: &mut Det) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(n);
    let mut at = vec![0.0; dim];
    pts.push(at.clone());
    for _ in 1..n {
        for x in at.iter_mut() {
            *x += rng.sym();
        }
        pts.push(at.clone());
    }
    pts
}

/// Random connected graph (spanning tree plus extra edges, weights in
/// `[0.5, 2)`) and an adjacent-step walk of `n` vertices over it.
pub fn graph_walk(n: usize, vertices: u32, rng: &mut Det) -> Result<(WeightedGraph, Vec<u32>)> {
    if vertices == 0 {
        return Err(CliError::Usage(
            "graph-walk needs --graph-vertices at least 1".to_string(),
        ));
    }
    let mut edges = Vec::new();
    for v in 1..vertices {
        edges.push(GraphEdge {
            u: rng.below(v as u64) as u32,
            v,
            w: 0.5 + 1.5 * rng.unit(),
        });
    }
    for _ in 0..vertices / 2 {
        let a = rng.below(vertices as u64) as u32;
        let b = rng.below(vertices as u64) as u32;
        if a != b {
            edges.push(GraphEdge {
                u: a.min(b),
                v: a.max(b),
                w: 0.5 + 1.5 * rng.unit(),
            });
        }
    }
    let mut adj = vec![Vec::new(); vertices as usize];
    for e in &edges {
        adj[e.u as usize].push(e.v);
        adj[e.v as usize].push(e.u);
    }
    let mut at = rng.below(vertices as u64) as u32;
    let mut walk = vec![at];
    for _ in 1..n {
        let nbrs = &adj[at as usize];
        if nbrs.is_empty() {
            // Single-vertex graph: the walk can only stay put.
            walk.push(at);
            continue;
        }
        at = nbrs[rng.below(nbrs.len() as u64) as usize];
        walk.push(at);
    }
    Ok((WeightedGraph { n: vertices, edges }, walk))
}
