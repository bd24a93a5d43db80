//! `pfre` — generate curves, preprocess them into query bundles, and run
//! approximate Fréchet/Hausdorff queries, exact baselines, dynamic
//! updates, and micro-benchmarks.
//!
//! Output contract: every command prints exactly one machine-readable
//! record on stdout (single-line JSON, except `bench` without `--out`,
//! which streams its CSV there); human-readable logs go to stderr. Exit
//! codes: 0 success, 1 I/O or malformed files, 2 contract violations.

mod bundle;
mod error;
mod generate;

use clap::{Parser, Subcommand, ValueEnum};
use error::{CliError, Result};
use pfre_core::curve::{build_curve, estimate_packedness, Curve};
use pfre_core::frechet::{decide, exact_discrete_frechet, value, QuerySpec};
use pfre_core::hausdorff::{
    build_hausdorff_index, exact_hausdorff, hausdorff_decide, hausdorff_value,
};
use pfre_core::io::{
    read_curve_file, read_graph_file, write_curve_file, write_graph_file, CurveFile,
};
use pfre_core::oracle::{
    euclidean_oracle, graph_oracle, perturbed_oracle, AmbientPoint, DistanceOracle, PNorm, Space,
};
use pfre_core::simplify::End;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "pfre",
    version,
    about = "Preprocess c-packed polygonal curves; answer (1+eps)-approximate discrete Frechet and Hausdorff queries"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Line,
    Spiral,
    Retrace,
    RandomWalk,
    GraphWalk,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Decide,
    Value,
    HausdorffDecide,
    HausdorffValue,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Decide => "decide",
            Mode::Value => "value",
            Mode::HausdorffDecide => "hausdorff-decide",
            Mode::HausdorffValue => "hausdorff-value",
        }
    }
    fn needs_rho(self) -> bool {
        matches!(self, Mode::Decide | Mode::HausdorffDecide)
    }
    fn needs_index(self) -> bool {
        matches!(self, Mode::HausdorffDecide | Mode::HausdorffValue)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactMode {
    Frechet,
    Hausdorff,
}

#[derive(Clone, Copy, ValueEnum)]
enum UpdateOp {
    ExtendHead,
    ExtendTail,
    TruncateHead,
    TruncateTail,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a curve (and, for graph-walk, a graph) with known
    /// properties: line certifies c <= 2, retrace --r R certifies c >= 2R.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Vertex count of the generated curve.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Traversal count for retrace.
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Vertex count of the generated graph (graph-walk).
        #[arg(long, default_value_t = 32)]
        graph_vertices: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Where graph-walk writes the graph file.
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
    /// Build query structures for a curve and persist them as a bundle.
    Preprocess {
        #[arg(long)]
        curve: PathBuf,
        /// euclid:p1 | euclid:p2 | euclid:pinf | graph
        #[arg(long, default_value = "euclid:p2")]
        space: String,
        /// Graph file (required for --space graph).
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Oracle accuracy; > 0 wraps the exact oracle in deterministic
        /// multiplicative noise.
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Seed of the noise (only meaningful with --alpha > 0).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trusted upper bound on the packedness constant; enables
        /// early-exit caps. Must genuinely bound c — an underestimate can
        /// produce wrong GREATER_THAN answers.
        #[arg(long)]
        c_bound: Option<f64>,
        /// Also run the packedness estimator (O(n^4); small curves only).
        #[arg(long)]
        estimate_c: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one query against a bundle.
    Query {
        #[arg(long)]
        bundle: PathBuf,
        /// Query curve file.
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        epsilon: f64,
        /// Threshold for decide modes (rho* for hausdorff-decide).
        #[arg(long)]
        rho: Option<f64>,
        /// Subcurve range of P, 1-based inclusive.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        sub: Option<Vec<usize>>,
    },
    /// Exact baseline distances by the quadratic reference algorithms.
    Exact {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, value_enum)]
        mode: ExactMode,
        #[arg(long, default_value = "euclid:p2")]
        space: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Refuse instances with more than this many lattice cells.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Extend or truncate the bundled curve in place.
    Update {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, value_enum)]
        op: UpdateOp,
        /// New vertex for Euclidean bundles: comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// New vertex for graph bundles.
        #[arg(long)]
        vertex: Option<u32>,
        /// Perceived length of the new edge; measured by the bundle's
        /// oracle when omitted.
        #[arg(long)]
        edge_length: Option<f64>,
    },
    /// Sweep queries and emit a CSV of medians.
    Bench {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Comma-separated subset of decide,value,hausdorff-decide,hausdorff-value.
        #[arg(long, default_value = "decide,value")]
        modes: String,
        /// Comma-separated epsilon sweep; empty produces a header-only CSV.
        #[arg(long, default_value = "0.5")]
        epsilons: String,
        /// Threshold for decide modes.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 15)]
        reps: usize,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Generate {
            kind,
            n,
            dim,
            r,
            graph_vertices,
            seed,
            out,
            graph_out,
        } => cmd_generate(
            kind,
            n,
            dim,
            r,
            graph_vertices,
            seed,
            &out,
            graph_out.as_deref(),
        ),
        Cmd::Preprocess {
            curve,
            space,
            graph,
            alpha,
            seed,
            c_bound,
            estimate_c,
            out,
        } => cmd_preprocess(
            &curve,
            &space,
            graph.as_deref(),
            alpha,
            seed,
            c_bound,
            estimate_c,
            &out,
        ),
        Cmd::Query {
            bundle,
            query,
            mode,
            epsilon,
            rho,
            sub,
        } => cmd_query(&bundle, &query, mode, epsilon, rho, sub),
        Cmd::Exact {
            p,
            q,
            mode,
            space,
            graph,
            budget,
        } => cmd_exact(&p, &q, mode, &space, graph.as_deref(), budget),
        Cmd::Update {
            bundle,
            op,
            point,
            vertex,
            edge_length,
        } => cmd_update(&bundle, op, point.as_deref(), vertex, edge_length),
        Cmd::Bench {
            bundle,
            query,
            modes,
            epsilons,
            rho,
            reps,
            out,
        } => cmd_bench(
            &bundle,
            &query,
            &modes,
            &epsilons,
            rho,
            reps,
            out.as_deref(),
        ),
    }
}

// ───────────────────────── shared plumbing ─────────────────────────

enum SpaceArg {
    Euclid(PNorm),
    Graph,
}

fn parse_space_arg(s: &str) -> Result<SpaceArg> {
    match s {
        "euclid:p1" => Ok(SpaceArg::Euclid(PNorm::L1)),
        "euclid:p2" => Ok(SpaceArg::Euclid(PNorm::L2)),
        "euclid:pinf" => Ok(SpaceArg::Euclid(PNorm::LInf)),
        "graph" => Ok(SpaceArg::Graph),
        other => Err(CliError::Usage(format!(
            "unknown space '{other}' (expected euclid:p1, euclid:p2, euclid:pinf, or graph)"
        ))),
    }
}

/// Assemble the oracle a curve file should be measured with.
fn oracle_for(
    space: &SpaceArg,
    curve_file: &CurveFile,
    graph_path: Option<&Path>,
    alpha: f64,
    seed: u64,
) -> Result<Arc<dyn DistanceOracle>> {
    let base: Arc<dyn DistanceOracle> = match (space, curve_file) {
        (SpaceArg::Euclid(norm), CurveFile::Euclid { dim, .. }) => euclidean_oracle(*dim, *norm),
        (SpaceArg::Graph, CurveFile::Graph { .. }) => {
            let path = graph_path
                .ok_or_else(|| CliError::Usage("--space graph needs --graph FILE".to_string()))?;
            let g = read_graph_file(&std::fs::read_to_string(path)?)?;
            graph_oracle(g)?
        }
        (SpaceArg::Euclid(_), CurveFile::Graph { .. }) => {
            return Err(CliError::Usage(
                "curve file holds graph vertices but --space is Euclidean".to_string(),
            ))
        }
        (SpaceArg::Graph, CurveFile::Euclid { .. }) => {
            return Err(CliError::Usage(
                "curve file holds coordinates but --space is graph".to_string(),
            ))
        }
    };
    if alpha > 0.0 {
        Ok(perturbed_oracle(base, alpha, seed)?)
    } else {
        Ok(base)
    }
}

fn read_curve_at(path: &Path) -> Result<CurveFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(read_curve_file(&text)?)
}

/// Read a query curve and measure it with the bundle's oracle.
fn read_query_curve(path: &Path, oracle: &dyn DistanceOracle) -> Result<Curve> {
    let cf = read_curve_at(path)?;
    Ok(build_curve(cf.points(), oracle)?)
}

fn wall_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

// ───────────────────────── commands ─────────────────────────

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    kind: Kind,
    n: usize,
    dim: usize,
    r: usize,
    graph_vertices: u32,
    seed: u64,
    out: &Path,
    graph_out: Option<&Path>,
) -> Result<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".to_string()));
    }
    if dim == 0 {
        return Err(CliError::Usage("--dim must be at least 1".to_string()));
    }
    let mut rng = generate::Det::new(seed);
    let mut record = json!({
        "command": "generate",
        "n": n,
        "seed": seed,
        "out": out.display().to_string(),
    });
    let rec = record.as_object_mut().expect("record is an object");
    let euclid_points = match kind {
        Kind::Line => {
            rec.insert("kind".into(), "line".into());
            rec.insert("dim".into(), dim.into());
            rec.insert("c_bound".into(), 2.0.into());
            Some(generate::line(n, dim))
        }
        Kind::Spiral => {
            rec.insert("kind".into(), "spiral".into());
            rec.insert("dim".into(), dim.into());
            Some(generate::spiral(n, dim)?)
        }
        Kind::Retrace => {
            rec.insert("kind".into(), "retrace".into());
            rec.insert("dim".into(), dim.into());
            rec.insert("r".into(), r.into());
            rec.insert("c_lower".into(), (2.0 * r as f64).into());
            Some(generate::retrace(n, r, dim)?)
        }
        Kind::RandomWalk => {
            rec.insert("kind".into(), "random-walk".into());
            rec.insert("dim".into(), dim.into());
            Some(generate::random_walk(n, dim, &mut rng))
        }
        Kind::GraphWalk => {
            rec.insert("kind".into(), "graph-walk".into());
            let gpath = graph_out.ok_or_else(|| {
                CliError::Usage("--kind graph-walk needs --graph-out FILE".to_string())
            })?;
            let (g, walk) = generate::graph_walk(n, graph_vertices, &mut rng)?;
            std::fs::write(gpath, write_graph_file(&g))?;
            std::fs::write(out, write_curve_file(&CurveFile::Graph { vertices: walk }))?;
            rec.insert("graph_vertices".into(), graph_vertices.into());
            rec.insert("graph_out".into(), gpath.display().to_string().into());
            None
        }
    };
    if let Some(points) = euclid_points {
        std::fs::write(out, write_curve_file(&CurveFile::Euclid { dim, points }))?;
    }
    eprintln!("wrote {}", out.display());
    println!("{record}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_preprocess(
    curve_path: &Path,
    space: &str,
    graph_path: Option<&Path>,
    alpha: f64,
    seed: u64,
    c_bound: Option<f64>,
    estimate_c: bool,
    out: &Path,
) -> Result<()> {
    let space_arg = parse_space_arg(space)?;
    let cf = read_curve_at(curve_path)?;
    let oracle = oracle_for(&space_arg, &cf, graph_path, alpha, seed)?;
    let t0 = Instant::now();
    let curve = build_curve(cf.points(), oracle.as_ref())?;
    let n = curve.n();
    let c_estimate = if estimate_c {
        Some(estimate_packedness(&curve, oracle.as_ref())?.c_lower)
    } else {
        None
    };
    let mut pre = pfre_core::frechet::Preprocessed::build(curve)?;
    if let Some(cb) = c_bound {
        pre = pre.with_c_bound(cb)?;
    }
    let build_ms = wall_ms(t0);
    let bytes = bundle::write(&pre, alpha, seed, out)?;
    eprintln!(
        "preprocessed {n} vertices in {build_ms:.2} ms → {} ({bytes} bytes)",
        out.display()
    );
    println!(
        "{}",
        json!({
            "command": "preprocess",
            "n": n,
            "space": space,
            "alpha": alpha,
            "c_bound": pre.c_bound,
            "c_estimate": c_estimate,
            "tadd_entries": pre.tadd.len(),
            "build_ms": build_ms,
            "bundle_bytes": bytes,
            "out": out.display().to_string(),
        })
    );
    Ok(())
}

fn cmd_query(
    bundle_path: &Path,
    query_path: &Path,
    mode: Mode,
    epsilon: f64,
    rho: Option<f64>,
    sub: Option<Vec<usize>>,
) -> Result<()> {
    let b = bundle::read(bundle_path)?;
    let q = read_query_curve(query_path, b.oracle.as_ref())?;
    let (i, j) = match &sub {
        Some(v) => (v[0], v[1]),
        None => (1, b.pre.curve.n()),
    };
    let spec = match &sub {
        Some(v) => QuerySpec::sub(epsilon, v[0], v[1]),
        None => QuerySpec::full(epsilon),
    };
    let need_rho =
        || rho.ok_or_else(|| CliError::Usage(format!("--mode {} needs --rho", mode.name())));
    let index = if mode.needs_index() {
        Some(build_hausdorff_index(&b.pre, b.oracle.as_ref())?)
    } else {
        None
    };
    let mut record = json!({
        "mode": mode.name(),
        "epsilon": epsilon,
        "i": i,
        "j": j,
    });
    let rec = record.as_object_mut().expect("record is an object");
    if let Some(r) = rho {
        rec.insert("rho".into(), r.into());
    }
    match mode {
        Mode::Decide => {
            let rho = need_rho()?;
            let t = Instant::now();
            let out = decide(&b.pre, b.oracle.as_ref(), &q, &spec, rho)?;
            rec.insert("wall_ms".into(), wall_ms(t).into());
            rec.insert("verdict".into(), out.verdict.to_string().into());
            rec.insert("cells_pushed".into(), out.cells_pushed.into());
            rec.insert("oracle_calls".into(), out.oracle_calls.into());
        }
        Mode::Value => {
            let t = Instant::now();
            let res = value(&b.pre, b.oracle.as_ref(), &q, &spec)?;
            rec.insert("wall_ms".into(), wall_ms(t).into());
            rec.insert("value".into(), res.nu.into());
            rec.insert("cells_pushed".into(), res.cells_pushed.into());
            rec.insert("oracle_calls".into(), res.oracle_calls.into());
        }
        Mode::HausdorffDecide => {
            let rho = need_rho()?;
            let index = index.expect("index built for hausdorff modes");
            let t = Instant::now();
            let out = hausdorff_decide(&b.pre, &index, &q, &spec, rho)?;
            rec.insert("wall_ms".into(), wall_ms(t).into());
            rec.insert("verdict".into(), out.verdict.to_string().into());
            rec.insert("cells_pushed".into(), out.pushes.into());
            rec.insert("oracle_calls".into(), out.nn_queries.into());
        }
        Mode::HausdorffValue => {
            let index = index.expect("index built for hausdorff modes");
            let t = Instant::now();
            let res = hausdorff_value(&b.pre, &index, &q, &spec)?;
            rec.insert("wall_ms".into(), wall_ms(t).into());
            rec.insert("value".into(), res.nu.into());
            rec.insert("cells_pushed".into(), res.pushes.into());
            rec.insert("oracle_calls".into(), res.nn_queries.into());
        }
    }
    eprintln!("{} query on [{i}, {j}] done", mode.name());
    println!("{record}");
    Ok(())
}

fn cmd_exact(
    p_path: &Path,
    q_path: &Path,
    mode: ExactMode,
    space: &str,
    graph_path: Option<&Path>,
    budget: Option<u64>,
) -> Result<()> {
    let space_arg = parse_space_arg(space)?;
    let pf = read_curve_at(p_path)?;
    let qf = read_curve_at(q_path)?;
    let oracle = oracle_for(&space_arg, &pf, graph_path, 0.0, 0)?;
    let p = build_curve(pf.points(), oracle.as_ref())?;
    let q = build_curve(qf.points(), oracle.as_ref())?;
    let t = Instant::now();
    let (name, d) = match mode {
        ExactMode::Frechet => (
            "frechet",
            exact_discrete_frechet(oracle.as_ref(), &p, &q, None, budget)?,
        ),
        ExactMode::Hausdorff => (
            "hausdorff",
            exact_hausdorff(oracle.as_ref(), &p, &q, None, budget)?,
        ),
    };
    println!(
        "{}",
        json!({
            "command": "exact",
            "mode": name,
            "value": d,
            "n": p.n(),
            "m": q.n(),
            "wall_ms": wall_ms(t),
        })
    );
    Ok(())
}

fn parse_point_arg(s: &str, dim: usize) -> Result<Vec<f64>> {
    let coords: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| CliError::Usage(format!("bad --point '{s}': {e}")))?;
    if coords.len() != dim {
        return Err(CliError::Usage(format!(
            "--point has {} coordinates, the bundle's space has dimension {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn cmd_update(
    bundle_path: &Path,
    op: UpdateOp,
    point: Option<&str>,
    vertex: Option<u32>,
    edge_length: Option<f64>,
) -> Result<()> {
    let mut b = bundle::read(bundle_path)?;
    let mut c_bound_dropped = false;
    let (op_name, end) = match op {
        UpdateOp::ExtendHead => ("extend-head", End::Head),
        UpdateOp::ExtendTail => ("extend-tail", End::Tail),
        UpdateOp::TruncateHead => ("truncate-head", End::Head),
        UpdateOp::TruncateTail => ("truncate-tail", End::Tail),
    };
    match op {
        UpdateOp::ExtendHead | UpdateOp::ExtendTail => {
            let new_pt = match b.pre.curve.space() {
                Space::Euclid { dim, .. } => {
                    let s = point.ok_or_else(|| {
                        CliError::Usage(
                            "extend on a Euclidean bundle needs --point x,y,...".to_string(),
                        )
                    })?;
                    AmbientPoint::Euclid(parse_point_arg(s, *dim)?)
                }
                Space::Graph { .. } => AmbientPoint::Graph(vertex.ok_or_else(|| {
                    CliError::Usage("extend on a graph bundle needs --vertex".to_string())
                })?),
            };
            let anchor = match end {
                End::Head => 1,
                End::Tail => b.pre.curve.n(),
            };
            let elen = match edge_length {
                Some(l) => {
                    if !l.is_finite() || l < 0.0 {
                        return Err(CliError::Usage(format!(
                            "--edge-length must be finite and ≥ 0, got {l}"
                        )));
                    }
                    l
                }
                None => b.oracle.distance(b.pre.curve.pt(anchor), &new_pt)?,
            };
            b.pre.extend(end, new_pt, elen)?;
            // Appending can raise the packedness constant, so a stored
            // trusted bound no longer applies; truncation can only lower
            // it, so the bound survives those ops.
            if b.pre.c_bound.take().is_some() {
                c_bound_dropped = true;
            }
        }
        UpdateOp::TruncateHead | UpdateOp::TruncateTail => {
            b.pre.truncate(end)?;
        }
    }
    let bytes = bundle::write(&b.pre, b.alpha, b.seed, bundle_path)?;
    eprintln!("{op_name}: bundle now has {} vertices", b.pre.curve.n());
    println!(
        "{}",
        json!({
            "command": "update",
            "op": op_name,
            "n": b.pre.curve.n(),
            "c_bound_dropped": c_bound_dropped,
            "bundle_bytes": bytes,
            "out": bundle_path.display().to_string(),
        })
    );
    Ok(())
}

fn parse_modes(s: &str) -> Result<Vec<Mode>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "decide" => Ok(Mode::Decide),
            "value" => Ok(Mode::Value),
            "hausdorff-decide" => Ok(Mode::HausdorffDecide),
            "hausdorff-value" => Ok(Mode::HausdorffValue),
            other => Err(CliError::Usage(format!("unknown bench mode '{other}'"))),
        })
        .collect()
}

fn parse_epsilons(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| CliError::Usage(format!("bad epsilon '{t}': {e}")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    bundle_path: &Path,
    query_path: &Path,
    modes: &str,
    epsilons: &str,
    rho: Option<f64>,
    reps: usize,
    out: Option<&Path>,
) -> Result<()> {
    let modes = parse_modes(modes)?;
    let epsilons = parse_epsilons(epsilons)?;
    let reps = reps.max(1);
    let b = bundle::read(bundle_path)?;
    let q = read_query_curve(query_path, b.oracle.as_ref())?;
    let n = b.pre.curve.n();
    let m = q.n();
    let index = if modes.iter().any(|md| md.needs_index()) && !epsilons.is_empty() {
        Some(build_hausdorff_index(&b.pre, b.oracle.as_ref())?)
    } else {
        None
    };

    let mut csv = String::from("n,m,epsilon,mode,cells_pushed,oracle_calls,wall_ns_median\n");
    let mut rows = 0usize;
    for &eps in &epsilons {
        for &mode in &modes {
            let spec = QuerySpec::full(eps);
            let rho_val = if mode.needs_rho() {
                Some(rho.ok_or_else(|| {
                    CliError::Usage(format!("bench mode {} needs --rho", mode.name()))
                })?)
            } else {
                None
            };
            let mut cells = 0u64;
            let mut calls = 0u64;
            let mut walls: Vec<u128> = Vec::with_capacity(reps);
            for _ in 0..reps {
                let t = Instant::now();
                match mode {
                    Mode::Decide => {
                        let out = decide(&b.pre, b.oracle.as_ref(), &q, &spec, rho_val.unwrap())?;
                        cells = out.cells_pushed;
                        calls = out.oracle_calls;
                    }
                    Mode::Value => {
                        let res = value(&b.pre, b.oracle.as_ref(), &q, &spec)?;
                        cells = res.cells_pushed;
                        calls = res.oracle_calls;
                    }
                    Mode::HausdorffDecide => {
                        let idx = index.as_ref().expect("index built for hausdorff modes");
                        let out = hausdorff_decide(&b.pre, idx, &q, &spec, rho_val.unwrap())?;
                        cells = out.pushes;
                        calls = out.nn_queries;
                    }
                    Mode::HausdorffValue => {
                        let idx = index.as_ref().expect("index built for hausdorff modes");
                        let res = hausdorff_value(&b.pre, idx, &q, &spec)?;
                        cells = res.pushes;
                        calls = res.nn_queries;
                    }
                }
                walls.push(t.elapsed().as_nanos());
            }
            walls.sort_unstable();
            let median = walls[walls.len() / 2];
            csv.push_str(&format!(
                "{n},{m},{eps},{},{cells},{calls},{median}\n",
                mode.name()
            ));
            rows += 1;
        }
    }
    match out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            eprintln!("bench wrote {rows} rows to {}", path.display());
            println!(
                "{}",
                json!({
                    "command": "bench",
                    "rows": rows,
                    "out": path.display().to_string(),
                })
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}
