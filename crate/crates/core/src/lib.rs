//! Preprocessing and query engine for discrete Fréchet and Hausdorff
//! distances against a stored polygonal curve.
//!
//! The library preprocesses a curve `P` (n vertices, assumed c-packed: the
//! portion of `P` inside any metric ball of radius `r` has length at most
//! `c·r`) into a small set of structures — a balanced tree over edge widths
//! for on-demand curve simplification, and a family of candidate distance
//! intervals derived from a well-separated pair decomposition — such that,
//! given a query curve `Q` (m vertices) and a tolerance `ε`, it answers
//!
//! * **decision** queries: is the discrete Fréchet distance `D(P, Q) ≤ ρ`?
//!   (one-sided: `AT_MOST` certifies `D ≤ (1+ε)ρ`, `GREATER_THAN` certifies
//!   `D > ρ`),
//! * **value** queries: a `ν` with `(1−ε)·D ≤ ν ≤ (1+ε)·D`,
//! * **subcurve** variants of both against any contiguous `P[i..=j]`,
//! * the analogous Hausdorff decision/value queries,
//!
//! in time that scales with `c·m` and only polylogarithmically with `n`,
//! instead of the `Θ(n·m)` of the classical dynamic program. Distances are
//! supplied by a pluggable [`oracle::DistanceOracle`], which may itself be
//! approximate (a `(1+α)`-oracle); the query bounds account for the oracle
//! error. The stored curve supports O(log n) vertex insertion and removal
//! at both ends.
//!
//! # Example
//!
//! ```
//! use pfre_core::oracle::{euclidean_oracle, PNorm};
//! use pfre_core::curve::{build_curve, point};
//! use pfre_core::simplify::SimplificationTree;
//! use pfre_core::tadd::build_1tadd;
//! use pfre_core::frechet::{value, Preprocessed, QuerySpec};
//!
//! let oracle = euclidean_oracle(2, PNorm::L2);
//! let p = build_curve(
//!     vec![point(&[0.0, 0.0]), point(&[1.0, 0.0]), point(&[2.0, 0.0])],
//!     oracle.as_ref(),
//! ).unwrap();
//! let q = build_curve(
//!     vec![point(&[0.0, 0.1]), point(&[2.0, 0.1])],
//!     oracle.as_ref(),
//! ).unwrap();
//!
//! let pre = Preprocessed::build(p).unwrap();
//! let res = value(&pre, oracle.as_ref(), &q, &QuerySpec::full(0.25)).unwrap();
//! // True distance is ~1.0049; ν is within ±25 %.
//! assert!(res.nu > 0.75 && res.nu < 1.26);
//! ```

pub mod curve;
pub mod frechet;
pub mod hausdorff;
pub mod io;
pub mod oracle;
pub mod simplify;
pub mod tadd;

pub use curve::{Curve, PackednessReport};
pub use frechet::{DecisionOutcome, Preprocessed, QuerySpec, ValueResult, Verdict};
pub use hausdorff::{HausdorffIndex, HausdorffOutcome, HausdorffValueResult, NnDecomposition};
pub use oracle::{AmbientPoint, DistanceOracle, PNorm, Space, WeightedGraph};
pub use simplify::SimplificationTree;
pub use tadd::TaddIntervals;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A point did not match the space the oracle serves (wrong dimension,
    /// vertex id out of range, or Euclidean point handed to a graph oracle).
    #[error("point incompatible with metric space: {0}")]
    SpaceMismatch(String),
    /// A coordinate, edge weight, or derived length was NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),
    /// Two graph vertices with no connecting path.
    #[error("graph vertices {0} and {1} are not connected")]
    Unreachable(u32, u32),
    /// A structural contract was violated (empty curve, bad index range,
    /// negative tolerance, …).
    #[error("contract violation: {0}")]
    Contract(String),
    /// The requested operation is not defined for this metric space.
    #[error("unsupported in this metric space: {0}")]
    Unsupported(String),
    /// Text parse failure, with 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Work budget exhausted before the computation finished.
    #[error("budget of {0} exceeded")]
    BudgetExceeded(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
