//! Text formats for curves and graphs.
//!
//! Three line-oriented formats, all 1-indexed in diagnostics:
//!
//! * Euclidean curve — header `curve <n> <d>`, then `n` lines of `d`
//!   whitespace-separated decimal coordinates.
//! * Graph curve — header `gcurve <n>`, then `n` lines of one 0-based
//!   ambient vertex id each.
//! * Weighted graph — header `graph <N> <M>`, then `M` lines
//!   `e <u> <v> <w>` with 0-based endpoints and a positive decimal weight.
//!
//! Parsers reject NaN and infinite numbers, wrong token counts, and
//! out-of-range ids with [`Error::Parse`] carrying the offending line
//! number. Writers print floats with Rust's shortest round-trip
//! formatting, so write → read reproduces every value bit-exactly.

use crate::oracle::{AmbientPoint, GraphEdge, WeightedGraph};
use crate::{Error, Result};
use std::fmt::Write as _;

/// A parsed curve file: the points, still space-agnostic (pair with an
/// oracle via [`crate::curve::build_curve`] to measure edges).
#[derive(Debug, Clone, PartialEq)]
pub enum CurveFile {
    /// `curve <n> <d>` — row-major coordinates.
    Euclid { dim: usize, points: Vec<Vec<f64>> },
    /// `gcurve <n>` — ambient vertex ids.
    Graph { vertices: Vec<u32> },
}

impl CurveFile {
    pub fn n(&self) -> usize {
        match self {
            CurveFile::Euclid { points, .. } => points.len(),
            CurveFile::Graph { vertices } => vertices.len(),
        }
    }

    /// The points as ambient points, ready for curve construction.
    pub fn points(&self) -> Vec<AmbientPoint> {
        match self {
            CurveFile::Euclid { points, .. } => points
                .iter()
                .map(|c| AmbientPoint::Euclid(c.clone()))
                .collect(),
            CurveFile::Graph { vertices } => {
                vertices.iter().map(|&v| AmbientPoint::Graph(v)).collect()
            }
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| {
        parse_err(
            line,
            format!("{what}: expected a non-negative integer, got {tok:?}"),
        )
    })
}

fn parse_u32(tok: &str, line: usize, what: &str) -> Result<u32> {
    tok.parse::<u32>()
        .map_err(|_| parse_err(line, format!("{what}: expected a vertex id, got {tok:?}")))
}

fn parse_f64(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v = tok.parse::<f64>().map_err(|_| {
        parse_err(
            line,
            format!("{what}: expected a decimal number, got {tok:?}"),
        )
    })?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what}: {tok:?} is not finite")));
    }
    Ok(v)
}

/// Non-empty lines with their 1-based line numbers; interior blank lines
/// are rejected by the callers' token counting, trailing ones ignored.
fn numbered_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

/// Parse a curve file (`curve` or `gcurve` header).
pub fn read_curve_file(text: &str) -> Result<CurveFile> {
    let lines = numbered_lines(text);
    let Some(&(hline, header)) = lines.first() else {
        return Err(parse_err(
            1,
            "empty file, expected a `curve` or `gcurve` header",
        ));
    };
    let toks: Vec<&str> = header.split_whitespace().collect();
    match toks[0] {
        "curve" => {
            if toks.len() != 3 {
                return Err(parse_err(hline, "expected header `curve <n> <d>`"));
            }
            let n = parse_usize(toks[1], hline, "vertex count")?;
            let dim = parse_usize(toks[2], hline, "dimension")?;
            if n == 0 {
                return Err(parse_err(hline, "a curve needs at least one vertex"));
            }
            if dim == 0 {
                return Err(parse_err(hline, "dimension must be at least 1"));
            }
            let body = &lines[1..];
            if body.len() != n {
                return Err(parse_err(
                    body.get(n)
                        .map_or_else(|| text.lines().count().max(1), |&(l, _)| l),
                    format!("expected {n} coordinate lines, found {}", body.len()),
                ));
            }
            let mut points = Vec::with_capacity(n);
            for &(lno, l) in body {
                let coords: Vec<f64> = l
                    .split_whitespace()
                    .map(|t| parse_f64(t, lno, "coordinate"))
                    .collect::<Result<_>>()?;
                if coords.len() != dim {
                    return Err(parse_err(
                        lno,
                        format!("expected {dim} coordinates, found {}", coords.len()),
                    ));
                }
                points.push(coords);
            }
            Ok(CurveFile::Euclid { dim, points })
        }
        "gcurve" => {
            if toks.len() != 2 {
                return Err(parse_err(hline, "expected header `gcurve <n>`"));
            }
            let n = parse_usize(toks[1], hline, "vertex count")?;
            if n == 0 {
                return Err(parse_err(hline, "a curve needs at least one vertex"));
            }
            let body = &lines[1..];
            if body.len() != n {
                return Err(parse_err(
                    body.get(n)
                        .map_or_else(|| text.lines().count().max(1), |&(l, _)| l),
                    format!("expected {n} vertex-id lines, found {}", body.len()),
                ));
            }
            let mut vertices = Vec::with_capacity(n);
            for &(lno, l) in body {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 1 {
                    return Err(parse_err(lno, "expected exactly one vertex id"));
                }
                vertices.push(parse_u32(toks[0], lno, "vertex id")?);
            }
            Ok(CurveFile::Graph { vertices })
        }
        other => Err(parse_err(
            hline,
            format!("unknown header {other:?}, expected `curve` or `gcurve`"),
        )),
    }
}

/// Serialize a curve file; output parses back to an equal [`CurveFile`].
pub fn write_curve_file(c: &CurveFile) -> String {
    let mut out = String::new();
    match c {
        CurveFile::Euclid { dim, points } => {
            let _ = writeln!(out, "curve {} {}", points.len(), dim);
            for p in points {
                let row: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        CurveFile::Graph { vertices } => {
            let _ = writeln!(out, "gcurve {}", vertices.len());
            for v in vertices {
                let _ = writeln!(out, "{v}");
            }
        }
    }
    out
}

/// Parse a weighted-graph file (`graph <N> <M>` header, `e <u> <v> <w>`
/// edge lines). The result is structurally valid: ids in range, weights
/// positive and finite.
pub fn read_graph_file(text: &str) -> Result<WeightedGraph> {
    let lines = numbered_lines(text);
    let Some(&(hline, header)) = lines.first() else {
        return Err(parse_err(1, "empty file, expected a `graph` header"));
    };
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks[0] != "graph" {
        return Err(parse_err(
            hline,
            format!("unknown header {:?}, expected `graph`", toks[0]),
        ));
    }
    if toks.len() != 3 {
        return Err(parse_err(hline, "expected header `graph <N> <M>`"));
    }
    let n = parse_usize(toks[1], hline, "vertex count")?;
    let m = parse_usize(toks[2], hline, "edge count")?;
    if n == 0 {
        return Err(parse_err(hline, "a graph needs at least one vertex"));
    }
    let n = u32::try_from(n).map_err(|_| parse_err(hline, "vertex count exceeds u32"))?;
    let body = &lines[1..];
    if body.len() != m {
        return Err(parse_err(
            body.get(m)
                .map_or_else(|| text.lines().count().max(1), |&(l, _)| l),
            format!("expected {m} edge lines, found {}", body.len()),
        ));
    }
    let mut edges = Vec::with_capacity(m);
    for &(lno, l) in body {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "e" {
            return Err(parse_err(lno, "expected an edge line `e <u> <v> <w>`"));
        }
        let u = parse_u32(toks[1], lno, "endpoint")?;
        let v = parse_u32(toks[2], lno, "endpoint")?;
        let w = parse_f64(toks[3], lno, "weight")?;
        if u >= n || v >= n {
            return Err(parse_err(
                lno,
                format!("endpoint {} out of range for {n} vertices", u.max(v)),
            ));
        }
        if w <= 0.0 {
            return Err(parse_err(lno, format!("weight must be positive, got {w}")));
        }
        edges.push(GraphEdge { u, v, w });
    }
    Ok(WeightedGraph { n, edges })
}

/// Serialize a graph file; output parses back to an equal graph.
pub fn write_graph_file(g: &WeightedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {}", g.n, g.edges.len());
    for e in &g.edges {
        let _ = writeln!(out, "e {} {} {}", e.u, e.v, e.w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line_of(err: crate::Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn test_euclid_curve_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        for _ in 0..50 {
            let dim = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=30);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..dim)
                        .map(|_| {
                            // Mixed magnitudes exercise the float printer.
                            let m: f64 = rng.gen_range(-1.0..1.0);
                            let e: i32 = rng.gen_range(-12..12);
                            m * 10f64.powi(e)
                        })
                        .collect()
                })
                .collect();
            let file = CurveFile::Euclid { dim, points };
            let text = write_curve_file(&file);
            let back = read_curve_file(&text).unwrap();
            assert_eq!(back, file);
            // Writing again is byte-stable.
            assert_eq!(write_curve_file(&back), text);
        }
    }

    #[test]
    fn test_graph_curve_round_trip() {
        let file = CurveFile::Graph {
            vertices: vec![0, 7, 3, 3, 1],
        };
        let text = write_curve_file(&file);
        assert_eq!(text, "gcurve 5\n0\n7\n3\n3\n1\n");
        assert_eq!(read_curve_file(&text).unwrap(), file);
    }

    #[test]
    fn test_graph_file_round_trip() {
        let g = WeightedGraph {
            n: 4,
            edges: vec![
                GraphEdge { u: 0, v: 1, w: 1.5 },
                GraphEdge {
                    u: 1,
                    v: 2,
                    w: 0.25,
                },
                GraphEdge { u: 3, v: 0, w: 2.0 },
            ],
        };
        let text = write_graph_file(&g);
        let back = read_graph_file(&text).unwrap();
        assert_eq!(back.n, g.n);
        assert_eq!(back.edges.len(), g.edges.len());
        for (a, b) in back.edges.iter().zip(g.edges.iter()) {
            assert_eq!((a.u, a.v), (b.u, b.v));
            assert_eq!(a.w.to_bits(), b.w.to_bits());
        }
    }

    #[test]
    fn test_hand_example_parses() {
        let text = "curve 3 2\n0 0\n1.5 -2\n3e-1 4\n";
        let file = read_curve_file(text).unwrap();
        let CurveFile::Euclid { dim, points } = file else {
            panic!("expected euclid curve");
        };
        assert_eq!(dim, 2);
        assert_eq!(
            points,
            vec![vec![0.0, 0.0], vec![1.5, -2.0], vec![0.3, 4.0]]
        );
    }

    #[test]
    fn test_parse_errors_carry_line_numbers() {
        // Bad header token.
        assert_eq!(line_of(read_curve_file("shape 3 2\n").unwrap_err()), 1);
        // Non-finite coordinate on line 3.
        assert_eq!(
            line_of(read_curve_file("curve 2 1\n1\ninf\n").unwrap_err()),
            3
        );
        assert_eq!(
            line_of(read_curve_file("curve 2 1\nnan\n2\n").unwrap_err()),
            2
        );
        // Wrong coordinate count on line 2.
        assert_eq!(
            line_of(read_curve_file("curve 2 2\n1\n2 3\n").unwrap_err()),
            2
        );
        // Missing rows: error points past the last provided line.
        assert_eq!(
            line_of(read_curve_file("curve 3 1\n1\n2\n").unwrap_err()),
            3
        );
        // Extra rows: error points at the first surplus line.
        assert_eq!(
            line_of(read_curve_file("curve 1 1\n1\n2\n").unwrap_err()),
            3
        );
        // Empty input.
        assert_eq!(line_of(read_curve_file("").unwrap_err()), 1);
        // n = 0 rejected at the header.
        assert_eq!(line_of(read_curve_file("curve 0 2\n").unwrap_err()), 1);
        // Graph curve with a non-integer id.
        assert_eq!(
            line_of(read_curve_file("gcurve 2\n1\n2.5\n").unwrap_err()),
            3
        );
        // Graph: endpoint out of range on line 2.
        assert_eq!(
            line_of(read_graph_file("graph 2 1\ne 0 5 1.0\n").unwrap_err()),
            2
        );
        // Graph: non-positive weight.
        assert_eq!(
            line_of(read_graph_file("graph 2 1\ne 0 1 0\n").unwrap_err()),
            2
        );
        // Graph: malformed edge line.
        assert_eq!(
            line_of(read_graph_file("graph 2 1\nedge 0 1 1\n").unwrap_err()),
            2
        );
        // Graph: edge count mismatch.
        assert_eq!(
            line_of(read_graph_file("graph 2 3\ne 0 1 1\n").unwrap_err()),
            2
        );
    }

    #[test]
    fn test_parsed_graph_passes_validation() {
        let g = read_graph_file("graph 3 2\ne 0 1 1.0\ne 1 2 0.5\n").unwrap();
        assert!(g.validate().is_ok());
    }

    #[test]
    fn test_blank_lines_are_tolerated_at_the_edges() {
        let file = read_curve_file("curve 2 1\n1\n2\n\n\n").unwrap();
        assert_eq!(file.n(), 2);
    }
}
