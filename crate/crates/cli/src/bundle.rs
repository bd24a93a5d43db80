//! Versioned binary bundle persisting a preprocessed curve.
//!
//! Layout (everything little-endian): magic `PFRE1`, a `u32` format
//! version, the space descriptor (norm and dimension, or the full weighted
//! graph), the oracle accuracy `α` with its perturbation seed, an optional
//! trusted packedness bound, then the curve itself — vertices, perceived
//! edge lengths, raw prefix values, and origin, persisted verbatim. A
//! reload rebuilds the curve from these exact floats, so the derived
//! structures (simplification tree, length digest, Hausdorff indexes),
//! which are deterministic functions of the curve, come back query- and
//! bit-identical. Version or magic mismatches are rejected.

use crate::error::{CliError, Result};
use pfre_core::curve::Curve;
use pfre_core::frechet::Preprocessed;
use pfre_core::oracle::{
    euclidean_oracle, graph_oracle, perturbed_oracle, AmbientPoint, DistanceOracle, GraphEdge,
    PNorm, Space, WeightedGraph,
};
use std::path::Path;
use std::sync::Arc;

const MAGIC: &[u8; 5] = b"PFRE1";
const VERSION: u32 = 1;

/// A loaded bundle: rebuilt query structures plus the oracle that measured
/// the curve.
pub struct Bundle {
    pub pre: Preprocessed,
    pub oracle: Arc<dyn DistanceOracle>,
    /// Oracle accuracy the curve was measured with (0 = exact).
    pub alpha: f64,
    /// Perturbation seed (meaningful only when `alpha > 0`).
    pub seed: u64,
}

/// Reconstruct the distance oracle a bundle's curve was measured with.
pub fn reconstruct_oracle(space: &Space, alpha: f64, seed: u64) -> Result<Arc<dyn DistanceOracle>> {
    let base: Arc<dyn DistanceOracle> = match space {
        Space::Euclid { dim, norm } => euclidean_oracle(*dim, *norm),
        Space::Graph { graph } => graph_oracle((**graph).clone())?,
    };
    if alpha > 0.0 {
        Ok(perturbed_oracle(base, alpha, seed)?)
    } else {
        Ok(base)
    }
}

fn put_u32(b: &mut Vec<u8>, x: u32) {
    b.extend_from_slice(&x.to_le_bytes());
}
fn put_u64(b: &mut Vec<u8>, x: u64) {
    b.extend_from_slice(&x.to_le_bytes());
}
fn put_f64(b: &mut Vec<u8>, x: f64) {
    b.extend_from_slice(&x.to_le_bytes());
}

/// Serialize and write; returns the byte size.
pub fn write(pre: &Preprocessed, alpha: f64, seed: u64, path: &Path) -> Result<usize> {
    let curve = &pre.curve;
    let n = curve.n();
    let mut b = Vec::new();
    b.extend_from_slice(MAGIC);
    put_u32(&mut b, VERSION);
    match curve.space() {
        Space::Euclid { dim, norm } => {
            b.push(0);
            put_u32(&mut b, *dim as u32);
            b.push(match norm {
                PNorm::L1 => 0,
                PNorm::L2 => 1,
                PNorm::LInf => 2,
            });
        }
        Space::Graph { graph } => {
            b.push(1);
            put_u32(&mut b, graph.n);
            put_u64(&mut b, graph.edges.len() as u64);
            for e in &graph.edges {
                put_u32(&mut b, e.u);
                put_u32(&mut b, e.v);
                put_f64(&mut b, e.w);
            }
        }
    }
    put_f64(&mut b, alpha);
    put_u64(&mut b, seed);
    match pre.c_bound {
        Some(c) => {
            b.push(1);
            put_f64(&mut b, c);
        }
        None => b.push(0),
    }
    put_u64(&mut b, n as u64);
    for p in curve.iter_points() {
        match p {
            AmbientPoint::Euclid(c) => {
                for x in c {
                    put_f64(&mut b, *x);
                }
            }
            AmbientPoint::Graph(v) => put_u32(&mut b, *v),
        }
    }
    for i in 1..n {
        put_f64(&mut b, curve.edge_len(i));
    }
    let (prefixes, origin) = curve.raw_prefix();
    for x in prefixes {
        put_f64(&mut b, x);
    }
    put_f64(&mut b, origin);
    std::fs::write(path, &b)?;
    Ok(b.len())
}

struct Cursor<'a> {
    b: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.at + k > self.b.len() {
            return Err(CliError::Data(format!(
                "bundle truncated at byte {} (wanted {k} more)",
                self.at
            )));
        }
        let s = &self.b[self.at..self.at + k];
        self.at += k;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Read, validate, and rebuild the query structures.
pub fn read(path: &Path) -> Result<Bundle> {
    let bytes = std::fs::read(path)?;
    let mut c = Cursor { b: &bytes, at: 0 };
    if c.take(5)? != MAGIC {
        return Err(CliError::Data(format!(
            "{} is not a PFRE bundle (bad magic)",
            path.display()
        )));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(CliError::Data(format!(
            "unsupported bundle version {version} (this build reads {VERSION})"
        )));
    }
    let space = match c.u8()? {
        0 => {
            let dim = c.u32()? as usize;
            let norm = match c.u8()? {
                0 => PNorm::L1,
                1 => PNorm::L2,
                2 => PNorm::LInf,
                t => return Err(CliError::Data(format!("unknown norm tag {t}"))),
            };
            Space::Euclid { dim, norm }
        }
        1 => {
            let gn = c.u32()?;
            let gm = c.u64()? as usize;
            let mut edges = Vec::with_capacity(gm);
            for _ in 0..gm {
                edges.push(GraphEdge {
                    u: c.u32()?,
                    v: c.u32()?,
                    w: c.f64()?,
                });
            }
            Space::Graph {
                graph: Arc::new(WeightedGraph { n: gn, edges }),
            }
        }
        t => return Err(CliError::Data(format!("unknown space tag {t}"))),
    };
    let alpha = c.f64()?;
    let seed = c.u64()?;
    let c_bound = match c.u8()? {
        0 => None,
        1 => Some(c.f64()?),
        t => return Err(CliError::Data(format!("bad c-bound flag {t}"))),
    };
    let n = c.u64()? as usize;
    let mut points = Vec::with_capacity(n);
    match &space {
        Space::Euclid { dim, .. } => {
            for _ in 0..n {
                let mut coords = Vec::with_capacity(*dim);
                for _ in 0..*dim {
                    coords.push(c.f64()?);
                }
                points.push(AmbientPoint::Euclid(coords));
            }
        }
        Space::Graph { .. } => {
            for _ in 0..n {
                points.push(AmbientPoint::Graph(c.u32()?));
            }
        }
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        edges.push(c.f64()?);
    }
    let mut prefix = Vec::with_capacity(n);
    for _ in 0..n {
        prefix.push(c.f64()?);
    }
    let origin = c.f64()?;
    if c.at != bytes.len() {
        return Err(CliError::Data(format!(
            "bundle has {} trailing bytes",
            bytes.len() - c.at
        )));
    }
    let oracle = reconstruct_oracle(&space, alpha, seed)?;
    let curve = Curve::from_parts(points, edges, prefix, origin, alpha, space)?;
    let mut pre = Preprocessed::build(curve)?;
    if let Some(cb) = c_bound {
        pre = pre.with_c_bound(cb)?;
    }
    Ok(Bundle {
        pre,
        oracle,
        alpha,
        seed,
    })
}
