//! Conformal structures: maps from vertex functions f to pre-metrics
//! satisfying dl_ij/df_i = d_ij with d_ij independent of other vertices.
//!
//! Three chart kinds are implemented:
//!
//! - packing: d_ij = e^{f_i}
//! - fixed inversive: l_ij = sqrt(e^{2f_i} + e^{2f_j} + 2 e^{f_i+f_j} eta_ij)
//!   and d_ij = e^{f_i}(e^{f_i} + e^{f_j} eta_ij) / l_ij
//! - perp. bisector: d_ij = (1/2) e^{(f_i+f_j)/2} L_ij
//!
//! All three produce metrics (the per-triangle compatibility condition
//! holds identically), and all are homogeneous: f -> f + c scales every
//! length by e^c. Charts are the only constructors of metrics in the
//! solver path; the domain is checked pointwise, never precomputed.

use serde::Serialize;
use thiserror::Error;

use crate::complex::SimplicialComplex;
use crate::geometry::cm_volume;
use crate::metric::{tet_lengths, triangle_lengths, PreMetric};

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("vertex function outside chart domain: {0}")]
    OutOfDomain(String),
    #[error("invalid chart data: {0}")]
    InvalidChart(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChartKind {
    Packing,
    FixedInversive,
    PerpBisector,
}

/// One of the three conformal structures on a fixed complex. Per-edge
/// data (eta or L) is indexed by edge id.
#[derive(Debug, Clone)]
pub struct ConformalChart {
    kind: ChartKind,
    params: Vec<f64>,
    /// Edges with eta < -1: allowed, but the induced length can vanish.
    flagged_edges: Vec<usize>,
}

/// d_ij, d_ji and the induced length for a single edge; `None` when the
/// fixed-inversive length-square is nonpositive.
pub fn edge_chart_values(kind: ChartKind, fi: f64, fj: f64, param: f64) -> Option<(f64, f64, f64)> {
    match kind {
        ChartKind::Packing => {
            let (ri, rj) = (fi.exp(), fj.exp());
            Some((ri, rj, ri + rj))
        }
        ChartKind::FixedInversive => {
            let (ri, rj) = (fi.exp(), fj.exp());
            let lsq = ri * ri + rj * rj + 2.0 * ri * rj * param;
            if lsq <= f64::EPSILON * ri * rj {
                return None;
            }
            let l = lsq.sqrt();
            Some((ri * (ri + rj * param) / l, rj * (rj + ri * param) / l, l))
        }
        ChartKind::PerpBisector => {
            let d = 0.5 * (0.5 * (fi + fj)).exp() * param;
            Some((d, d, 2.0 * d))
        }
    }
}

/// q_ij = dd_ij/df_j, the mixed second derivative of the length.
pub fn edge_chart_q(kind: ChartKind, fi: f64, fj: f64, param: f64) -> Option<f64> {
    match kind {
        ChartKind::Packing => Some(0.0),
        ChartKind::FixedInversive => {
            let (_, _, l) = edge_chart_values(kind, fi, fj, param)?;
            let (ri, rj) = (fi.exp(), fj.exp());
            Some(ri * ri * rj * rj * (param * param - 1.0) / (l * l * l))
        }
        ChartKind::PerpBisector => {
            let (_, _, l) = edge_chart_values(kind, fi, fj, param)?;
            Some(0.25 * l)
        }
    }
}

/// A standalone metric triangle from chart data on local vertices 0..3;
/// `params` follow the edge order (01, 02, 12). `None` outside the chart
/// domain.
pub fn triangle_from_chart(
    kind: ChartKind,
    f: &[f64; 3],
    params: &[f64; 3],
) -> Option<crate::metric::TriangleMetric> {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut d = [[0.0; 2]; 3];
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        let (dij, dji, _) = edge_chart_values(kind, f[i], f[j], params[slot])?;
        d[slot] = [dij, dji];
    }
    let tm = crate::metric::TriangleMetric { d };
    let [a, b, c] = tm.lengths();
    cm_volume(&[a, b, c], 2).ok()?;
    Some(tm)
}

/// A standalone metric tetrahedron from chart data on local vertices
/// 0..4; `params` follow the edge order (01, 02, 03, 12, 13, 23).
pub fn tetra_from_chart(
    kind: ChartKind,
    f: &[f64; 4],
    params: &[f64; 6],
) -> Option<crate::metric::TetraMetric> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut d = [[0.0; 2]; 6];
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        let (dij, dji, _) = edge_chart_values(kind, f[i], f[j], params[slot])?;
        d[slot] = [dij, dji];
    }
    let tm = crate::metric::TetraMetric { d };
    tm.lengths().volume().ok()?;
    for face in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        let ls = [
            tm.length(face[0], face[1]),
            tm.length(face[0], face[2]),
            tm.length(face[1], face[2]),
        ];
        cm_volume(&ls, 2).ok()?;
    }
    Some(tm)
}

/// Per-simplex failure entry of a domain report.
#[derive(Debug, Clone, Serialize)]
pub struct DomainFailure {
    pub simplex: Vec<u64>,
    pub reason: String,
}

/// Report-style domain check: per-simplex nondegeneracy (triangle
/// inequality in 2D, Cayley-Menger positivity in 3D) plus
/// fixed-inversive length positivity. Passes iff `apply` would succeed.
#[derive(Debug, Clone, Serialize)]
pub struct DomainReport {
    pub length_failures: Vec<[u64; 2]>,
    pub simplex_failures: Vec<DomainFailure>,
    pub passes: bool,
}

impl ConformalChart {
    pub fn packing() -> Self {
        ConformalChart {
            kind: ChartKind::Packing,
            params: Vec::new(),
            flagged_edges: Vec::new(),
        }
    }

    /// Fixed inversive distance chart from per-edge eta. Values below -1
    /// are accepted but flagged, since the induced length can vanish.
    pub fn fixed_inversive(complex: &SimplicialComplex, eta: Vec<f64>) -> Result<Self, ChartError> {
        if eta.len() != complex.edge_count() {
            return Err(ChartError::InvalidChart(format!(
                "need eta for every edge: got {}, expected {}",
                eta.len(),
                complex.edge_count()
            )));
        }
        let flagged_edges = (0..eta.len()).filter(|&e| eta[e] < -1.0).collect();
        Ok(ConformalChart {
            kind: ChartKind::FixedInversive,
            params: eta,
            flagged_edges,
        })
    }

    /// Perpendicular bisector chart from per-edge base lengths L; (M,T,L)
    /// must itself be a piecewise flat manifold.
    pub fn perp_bisector(
        complex: &SimplicialComplex,
        base_lengths: Vec<f64>,
    ) -> Result<Self, ChartError> {
        if base_lengths.len() != complex.edge_count() {
            return Err(ChartError::InvalidChart(format!(
                "need L for every edge: got {}, expected {}",
                base_lengths.len(),
                complex.edge_count()
            )));
        }
        if let Some(e) = (0..base_lengths.len()).find(|&e| !(base_lengths[e] > 0.0)) {
            return Err(ChartError::InvalidChart(format!(
                "base length on edge {:?} must be positive",
                complex.edge_labels(e)
            )));
        }
        for t in 0..complex.triangle_count() {
            if cm_volume(&triangle_lengths(complex, &base_lengths, t), 2).is_err() {
                return Err(ChartError::InvalidChart(format!(
                    "base lengths degenerate on triangle {:?}",
                    complex.triangle_labels(t)
                )));
            }
        }
        for s in 0..complex.tetrahedron_count() {
            if tet_lengths(complex, &base_lengths, s).volume().is_err() {
                return Err(ChartError::InvalidChart(format!(
                    "base lengths degenerate on tetrahedron {:?}",
                    complex.tetrahedron(s).map(|v| complex.vertex_label(v))
                )));
            }
        }
        Ok(ConformalChart {
            kind: ChartKind::PerpBisector,
            params: base_lengths,
            flagged_edges: Vec::new(),
        })
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    /// Per-edge chart parameter (eta or L); empty for packing.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn flagged_edges(&self) -> &[usize] {
        &self.flagged_edges
    }

    fn param(&self, e: usize) -> f64 {
        match self.kind {
            ChartKind::Packing => 0.0,
            _ => self.params[e],
        }
    }

    fn edge_values(
        &self,
        complex: &SimplicialComplex,
        f: &[f64],
        e: usize,
    ) -> Result<(f64, f64, f64), ChartError> {
        let [u, v] = complex.edge(e);
        edge_chart_values(self.kind, f[u], f[v], self.param(e)).ok_or_else(|| {
            ChartError::OutOfDomain(format!(
                "fixed-inversive length vanishes on edge {:?}",
                complex.edge_labels(e)
            ))
        })
    }

    /// Map a vertex function to a pre-metric; errors if any simplex
    /// degenerates or a fixed-inversive length vanishes.
    pub fn apply(&self, complex: &SimplicialComplex, f: &[f64]) -> Result<PreMetric, ChartError> {
        assert_eq!(
            f.len(),
            complex.vertex_count(),
            "f must be a vertex function"
        );
        let mut d = Vec::with_capacity(complex.edge_count());
        for e in 0..complex.edge_count() {
            let (dij, dji, _) = self.edge_values(complex, f, e)?;
            d.push([dij, dji]);
        }
        let metric = PreMetric::new(d);
        let lengths = metric.lengths();
        for t in 0..complex.triangle_count() {
            if cm_volume(&triangle_lengths(complex, &lengths, t), 2).is_err() {
                return Err(ChartError::OutOfDomain(format!(
                    "triangle {:?} degenerates",
                    complex.triangle_labels(t)
                )));
            }
        }
        for s in 0..complex.tetrahedron_count() {
            if tet_lengths(complex, &lengths, s).volume().is_err() {
                return Err(ChartError::OutOfDomain(format!(
                    "tetrahedron {:?} degenerates",
                    complex.tetrahedron(s).map(|v| complex.vertex_label(v))
                )));
            }
        }
        Ok(metric)
    }

    /// q_ij for a single edge.
    pub fn q(&self, complex: &SimplicialComplex, f: &[f64], e: usize) -> Result<f64, ChartError> {
        let [u, v] = complex.edge(e);
        edge_chart_q(self.kind, f[u], f[v], self.param(e)).ok_or_else(|| {
            ChartError::OutOfDomain(format!(
                "fixed-inversive length vanishes on edge {:?}",
                complex.edge_labels(e)
            ))
        })
    }

    pub fn q_all(&self, complex: &SimplicialComplex, f: &[f64]) -> Result<Vec<f64>, ChartError> {
        (0..complex.edge_count())
            .map(|e| self.q(complex, f, e))
            .collect()
    }

    /// Report-style domain membership check.
    pub fn domain_check(&self, complex: &SimplicialComplex, f: &[f64]) -> DomainReport {
        let mut length_failures = Vec::new();
        let mut lengths = vec![f64::NAN; complex.edge_count()];
        for e in 0..complex.edge_count() {
            match self.edge_values(complex, f, e) {
                Ok((_, _, l)) => lengths[e] = l,
                Err(_) => length_failures.push(complex.edge_labels(e)),
            }
        }
        let mut simplex_failures = Vec::new();
        if length_failures.is_empty() {
            for t in 0..complex.triangle_count() {
                let ls = triangle_lengths(complex, &lengths, t);
                if ls[0] + ls[1] <= ls[2] || ls[0] + ls[2] <= ls[1] || ls[1] + ls[2] <= ls[0] {
                    simplex_failures.push(DomainFailure {
                        simplex: complex.triangle_labels(t).to_vec(),
                        reason: "triangle inequality fails".to_string(),
                    });
                } else if cm_volume(&ls, 2).is_err() {
                    simplex_failures.push(DomainFailure {
                        simplex: complex.triangle_labels(t).to_vec(),
                        reason: "triangle area vanishes".to_string(),
                    });
                }
            }
            for s in 0..complex.tetrahedron_count() {
                if tet_lengths(complex, &lengths, s).volume().is_err() {
                    simplex_failures.push(DomainFailure {
                        simplex: complex
                            .tetrahedron(s)
                            .map(|v| complex.vertex_label(v))
                            .to_vec(),
                        reason: "Cayley-Menger volume not positive".to_string(),
                    });
                }
            }
        }
        DomainReport {
            passes: length_failures.is_empty() && simplex_failures.is_empty(),
            length_failures,
            simplex_failures,
        }
    }
}
