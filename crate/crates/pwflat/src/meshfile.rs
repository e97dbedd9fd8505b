//! The text mesh format.
//!
//! Line-oriented, `#` starts a comment, numeric output carries 17
//! significant digits so files round-trip losslessly:
//!
//! ```text
//! pwflat 1
//! dimension 2
//! counts 4 4
//! v 1
//! ...
//! s 1 2 3
//! ...
//! chart packing            # or fixed_inversive / perp_bisector
//! eta 1 2 1.0              # fixed_inversive only, one line per edge
//! L 1 2 1.0                # perp_bisector only, one line per edge
//! f 1 -6.93e-1             # one line per vertex
//! ```
//!
//! Raw pre-metrics replace the chart and f blocks with a `metric` line
//! followed by `d a b value` lines for every directed edge. Exactly one
//! of {chart + f, metric} must be present. Edges are implicit from the
//! top simplices; per-edge data is keyed by vertex label pairs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::complex::{ComplexError, SimplicialComplex};
use crate::conformal::{ChartError, ChartKind, ConformalChart};
use crate::metric::PreMetric;

#[derive(Debug, Error)]
pub enum MeshFileError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh file inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshFileError {
    MeshFileError::Parse {
        line,
        message: message.into(),
    }
}

/// Either a chart with a vertex function, or a raw pre-metric.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshData {
    Chart {
        kind: ChartKind,
        /// eta or L per edge, keyed by sorted label pair; empty for packing.
        per_edge: BTreeMap<(u64, u64), f64>,
        f: BTreeMap<u64, f64>,
    },
    Metric {
        /// d per directed edge, keyed by (from, to) label pair.
        d: BTreeMap<(u64, u64), f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshFile {
    pub version: u32,
    pub dimension: usize,
    pub vertices: Vec<u64>,
    pub top_simplices: Vec<Vec<u64>>,
    pub data: MeshData,
}

/// The complex together with the realized metric data.
#[derive(Debug, Clone)]
pub enum RealizedData {
    Chart { chart: ConformalChart, f: Vec<f64> },
    Metric(PreMetric),
}

impl MeshFile {
    pub fn parse(text: &str) -> Result<MeshFile, MeshFileError> {
        let mut version: Option<u32> = None;
        let mut dimension: Option<usize> = None;
        let mut counts: Option<(usize, usize)> = None;
        let mut vertices: Vec<u64> = Vec::new();
        let mut tops: Vec<Vec<u64>> = Vec::new();
        let mut chart_kind: Option<ChartKind> = None;
        let mut per_edge: BTreeMap<(u64, u64), f64> = BTreeMap::new();
        let mut f: BTreeMap<u64, f64> = BTreeMap::new();
        let mut metric_seen = false;
        let mut d: BTreeMap<(u64, u64), f64> = BTreeMap::new();

        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            let int = |s: &str| -> Result<u64, MeshFileError> {
                s.parse()
                    .map_err(|_| parse_err(line, format!("expected integer, got '{s}'")))
            };
            let real = |s: &str| -> Result<f64, MeshFileError> {
                s.parse()
                    .map_err(|_| parse_err(line, format!("expected number, got '{s}'")))
            };
            match keyword {
                "pwflat" => {
                    if rest.len() != 1 {
                        return Err(parse_err(line, "usage: pwflat <version>"));
                    }
                    version = Some(int(rest[0])? as u32);
                }
                "dimension" => {
                    if rest.len() != 1 {
                        return Err(parse_err(line, "usage: dimension <2|3>"));
                    }
                    dimension = Some(int(rest[0])? as usize);
                }
                "counts" => {
                    if rest.len() != 2 {
                        return Err(parse_err(line, "usage: counts <vertices> <top simplices>"));
                    }
                    counts = Some((int(rest[0])? as usize, int(rest[1])? as usize));
                }
                "v" => {
                    if rest.len() != 1 {
                        return Err(parse_err(line, "usage: v <label>"));
                    }
                    vertices.push(int(rest[0])?);
                }
                "s" => {
                    let dim = dimension
                        .ok_or_else(|| parse_err(line, "dimension must precede simplices"))?;
                    if rest.len() != dim + 1 {
                        return Err(parse_err(
                            line,
                            format!("simplex needs {} vertices", dim + 1),
                        ));
                    }
                    tops.push(rest.iter().map(|s| int(s)).collect::<Result<_, _>>()?);
                }
                "chart" => {
                    if rest.len() != 1 {
                        return Err(parse_err(line, "usage: chart <kind>"));
                    }
                    chart_kind = Some(match rest[0] {
                        "packing" => ChartKind::Packing,
                        "fixed_inversive" => ChartKind::FixedInversive,
                        "perp_bisector" => ChartKind::PerpBisector,
                        other => {
                            return Err(parse_err(line, format!("unknown chart kind '{other}'")))
                        }
                    });
                }
                "eta" | "L" => {
                    if rest.len() != 3 {
                        return Err(parse_err(line, format!("usage: {keyword} <a> <b> <value>")));
                    }
                    let (a, b) = (int(rest[0])?, int(rest[1])?);
                    let key = (a.min(b), a.max(b));
                    if per_edge.insert(key, real(rest[2])?).is_some() {
                        return Err(parse_err(
                            line,
                            format!("duplicate {keyword} for edge {key:?}"),
                        ));
                    }
                }
                "f" => {
                    if rest.len() != 2 {
                        return Err(parse_err(line, "usage: f <vertex> <value>"));
                    }
                    let vertex = int(rest[0])?;
                    if f.insert(vertex, real(rest[1])?).is_some() {
                        return Err(parse_err(line, format!("duplicate f for vertex {vertex}")));
                    }
                }
                "metric" => {
                    metric_seen = true;
                }
                "d" => {
                    if rest.len() != 3 {
                        return Err(parse_err(line, "usage: d <from> <to> <value>"));
                    }
                    let key = (int(rest[0])?, int(rest[1])?);
                    if d.insert(key, real(rest[2])?).is_some() {
                        return Err(parse_err(line, format!("duplicate d for {key:?}")));
                    }
                }
                other => return Err(parse_err(line, format!("unknown directive '{other}'"))),
            }
        }

        let version = version.ok_or_else(|| parse_err(1, "missing 'pwflat <version>' header"))?;
        let dimension = dimension.ok_or_else(|| parse_err(1, "missing 'dimension'"))?;
        if dimension != 2 && dimension != 3 {
            return Err(MeshFileError::Inconsistent(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        if let Some((nv, nt)) = counts {
            if nv != vertices.len() || nt != tops.len() {
                return Err(MeshFileError::Inconsistent(format!(
                    "counts say {nv} vertices / {nt} simplices, file has {} / {}",
                    vertices.len(),
                    tops.len()
                )));
            }
        }
        let has_chart = chart_kind.is_some() || !f.is_empty() || !per_edge.is_empty();
        if has_chart && metric_seen {
            return Err(MeshFileError::Inconsistent(
                "file carries both a chart block and a raw metric block".to_string(),
            ));
        }
        let data = if metric_seen {
            MeshData::Metric { d }
        } else {
            let kind = chart_kind.ok_or_else(|| {
                MeshFileError::Inconsistent(
                    "file needs a chart block or a metric block".to_string(),
                )
            })?;
            match kind {
                ChartKind::Packing => {
                    if !per_edge.is_empty() {
                        return Err(MeshFileError::Inconsistent(
                            "packing charts carry no per-edge data".to_string(),
                        ));
                    }
                }
                _ => {
                    if per_edge.is_empty() {
                        return Err(MeshFileError::Inconsistent(
                            "chart kind requires per-edge data (eta or L)".to_string(),
                        ));
                    }
                }
            }
            if f.is_empty() {
                return Err(MeshFileError::Inconsistent(
                    "chart block requires a vertex function f".to_string(),
                ));
            }
            MeshData::Chart { kind, per_edge, f }
        };

        let mut sorted_vertices = vertices.clone();
        sorted_vertices.sort_unstable();
        sorted_vertices.dedup();
        if sorted_vertices.len() != vertices.len() {
            return Err(MeshFileError::Inconsistent(
                "duplicate vertex labels".to_string(),
            ));
        }
        let mut canonical_tops: Vec<Vec<u64>> = tops
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        canonical_tops.sort();

        Ok(MeshFile {
            version,
            dimension,
            vertices: sorted_vertices,
            top_simplices: canonical_tops,
            data,
        })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let num = |x: f64| format!("{x:.16e}");
        out.push_str(&format!("pwflat {}\n", self.version));
        out.push_str(&format!("dimension {}\n", self.dimension));
        out.push_str(&format!(
            "counts {} {}\n",
            self.vertices.len(),
            self.top_simplices.len()
        ));
        for v in &self.vertices {
            out.push_str(&format!("v {v}\n"));
        }
        for s in &self.top_simplices {
            let labels: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("s {}\n", labels.join(" ")));
        }
        match &self.data {
            MeshData::Chart { kind, per_edge, f } => {
                let (name, edge_key) = match kind {
                    ChartKind::Packing => ("packing", ""),
                    ChartKind::FixedInversive => ("fixed_inversive", "eta"),
                    ChartKind::PerpBisector => ("perp_bisector", "L"),
                };
                out.push_str(&format!("chart {name}\n"));
                for (&(a, b), &value) in per_edge {
                    out.push_str(&format!("{edge_key} {a} {b} {}\n", num(value)));
                }
                for (&v, &value) in f {
                    out.push_str(&format!("f {v} {}\n", num(value)));
                }
            }
            MeshData::Metric { d } => {
                out.push_str("metric\n");
                for (&(a, b), &value) in d {
                    out.push_str(&format!("d {a} {b} {}\n", num(value)));
                }
            }
        }
        out
    }

    /// Assemble a chart-carrying mesh file from parts.
    pub fn from_chart(complex: &SimplicialComplex, chart: &ConformalChart, f: &[f64]) -> MeshFile {
        let per_edge = match chart.kind() {
            ChartKind::Packing => BTreeMap::new(),
            _ => (0..complex.edge_count())
                .map(|e| {
                    let [a, b] = complex.edge_labels(e);
                    ((a.min(b), a.max(b)), chart.params()[e])
                })
                .collect(),
        };
        MeshFile {
            version: 1,
            dimension: complex.dimension(),
            vertices: (0..complex.vertex_count())
                .map(|v| complex.vertex_label(v))
                .collect(),
            top_simplices: complex.top_simplex_labels(),
            data: MeshData::Chart {
                kind: chart.kind(),
                per_edge,
                f: (0..complex.vertex_count())
                    .map(|v| (complex.vertex_label(v), f[v]))
                    .collect(),
            },
        }
    }

    /// Assemble a raw-metric mesh file from parts.
    pub fn from_metric(complex: &SimplicialComplex, metric: &PreMetric) -> MeshFile {
        let mut d = BTreeMap::new();
        for e in 0..complex.edge_count() {
            let [a, b] = complex.edge_labels(e);
            d.insert((a, b), metric.d_end(e, 0));
            d.insert((b, a), metric.d_end(e, 1));
        }
        MeshFile {
            version: 1,
            dimension: complex.dimension(),
            vertices: (0..complex.vertex_count())
                .map(|v| complex.vertex_label(v))
                .collect(),
            top_simplices: complex.top_simplex_labels(),
            data: MeshData::Metric { d },
        }
    }

    /// Replace the vertex function (chart files only).
    pub fn with_f(&self, complex: &SimplicialComplex, new_f: &[f64]) -> MeshFile {
        let mut out = self.clone();
        if let MeshData::Chart { f, .. } = &mut out.data {
            *f = (0..complex.vertex_count())
                .map(|v| (complex.vertex_label(v), new_f[v]))
                .collect();
        }
        out
    }

    /// Build the complex and resolve the metric data against it.
    pub fn realize(&self) -> Result<(SimplicialComplex, RealizedData), MeshFileError> {
        let complex = SimplicialComplex::build(self.dimension, &self.top_simplices)?;
        for label in &self.vertices {
            if complex.vertex_index(*label).is_none() {
                return Err(MeshFileError::Inconsistent(format!(
                    "vertex {label} is not used by any simplex"
                )));
            }
        }
        if complex.vertex_count() != self.vertices.len() {
            return Err(MeshFileError::Inconsistent(
                "simplices use vertices missing from the vertex list".to_string(),
            ));
        }
        match &self.data {
            MeshData::Chart { kind, per_edge, f } => {
                let mut values = vec![0.0; complex.vertex_count()];
                for v in 0..complex.vertex_count() {
                    let label = complex.vertex_label(v);
                    values[v] = *f.get(&label).ok_or_else(|| {
                        MeshFileError::Inconsistent(format!("missing f for vertex {label}"))
                    })?;
                }
                if f.len() != complex.vertex_count() {
                    return Err(MeshFileError::Inconsistent(
                        "f given for unknown vertices".to_string(),
                    ));
                }
                let chart = match kind {
                    ChartKind::Packing => ConformalChart::packing(),
                    _ => {
                        let mut params = vec![0.0; complex.edge_count()];
                        for e in 0..complex.edge_count() {
                            let [a, b] = complex.edge_labels(e);
                            let key = (a.min(b), a.max(b));
                            params[e] = *per_edge.get(&key).ok_or_else(|| {
                                MeshFileError::Inconsistent(format!(
                                    "missing chart data for edge {key:?}"
                                ))
                            })?;
                        }
                        if per_edge.len() != complex.edge_count() {
                            return Err(MeshFileError::Inconsistent(
                                "chart data given for unknown edges".to_string(),
                            ));
                        }
                        match kind {
                            ChartKind::FixedInversive => {
                                ConformalChart::fixed_inversive(&complex, params)?
                            }
                            _ => ConformalChart::perp_bisector(&complex, params)?,
                        }
                    }
                };
                Ok((complex, RealizedData::Chart { chart, f: values }))
            }
            MeshData::Metric { d } => {
                let mut values = vec![[0.0; 2]; complex.edge_count()];
                for e in 0..complex.edge_count() {
                    let [a, b] = complex.edge_labels(e);
                    for (slot, key) in [(0usize, (a, b)), (1, (b, a))] {
                        values[e][slot] = *d.get(&key).ok_or_else(|| {
                            MeshFileError::Inconsistent(format!(
                                "missing d for directed edge {key:?}"
                            ))
                        })?;
                    }
                }
                if d.len() != 2 * complex.edge_count() {
                    return Err(MeshFileError::Inconsistent(
                        "d given for unknown edges".to_string(),
                    ));
                }
                Ok((complex, RealizedData::Metric(PreMetric::new(values))))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip_chart_file() {
        let c = fixtures::sphere_tetrahedron();
        let chart = ConformalChart::perp_bisector(&c, vec![1.0; c.edge_count()]).unwrap();
        let f: Vec<f64> = vec![0.1, -0.2, 0.3, 0.0172839456701234];
        let file = MeshFile::from_chart(&c, &chart, &f);
        let text = file.serialize();
        let parsed = MeshFile::parse(&text).unwrap();
        assert_eq!(parsed, file);
        let (complex, data) = parsed.realize().unwrap();
        assert_eq!(complex.triangle_count(), 4);
        match data {
            RealizedData::Chart { chart, f: rf } => {
                assert_eq!(chart.kind(), ChartKind::PerpBisector);
                assert_eq!(rf, f);
            }
            _ => panic!("expected chart"),
        }
    }

    #[test]
    fn round_trip_metric_file() {
        let c = fixtures::sphere_4simplex();
        let metric = PreMetric::from_fn(&c, |i, j| 0.4 + 0.01 * (i * 7 + j) as f64);
        let file = MeshFile::from_metric(&c, &metric);
        let parsed = MeshFile::parse(&file.serialize()).unwrap();
        assert_eq!(parsed, file);
        let (_, data) = parsed.realize().unwrap();
        match data {
            RealizedData::Metric(m) => assert_eq!(m.raw(), metric.raw()),
            _ => panic!("expected raw metric"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "pwflat 1\ndimension 2\nv 1\nv 2\nv 3\ns 1 2 bogus\n";
        match MeshFile::parse(text).unwrap_err() {
            MeshFileError::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_file_reports_missing_pieces() {
        let err = MeshFile::parse("pwflat 1\ndimension 2\ns 1 2 3\n").unwrap_err();
        assert!(matches!(err, MeshFileError::Inconsistent(_)));
    }

    #[test]
    fn chart_and_metric_conflict() {
        let text = "pwflat 1\ndimension 2\nv 1\nv 2\nv 3\nv 4\n\
                    s 1 2 3\ns 1 2 4\ns 1 3 4\ns 2 3 4\n\
                    chart packing\nf 1 0.0\nf 2 0.0\nf 3 0.0\nf 4 0.0\nmetric\n";
        assert!(matches!(
            MeshFile::parse(text),
            Err(MeshFileError::Inconsistent(_))
        ));
    }

    #[test]
    fn counts_mismatch_detected() {
        let text = "pwflat 1\ndimension 2\ncounts 5 4\nv 1\nv 2\nv 3\nv 4\n\
                    s 1 2 3\ns 1 2 4\ns 1 3 4\ns 2 3 4\nchart packing\n\
                    f 1 0.0\nf 2 0.0\nf 3 0.0\nf 4 0.0\n";
        assert!(matches!(
            MeshFile::parse(text),
            Err(MeshFileError::Inconsistent(_))
        ));
    }
}
