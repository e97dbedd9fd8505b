//! Analytic first and second variations under conformal deformations,
//! and the finite-difference oracle used to validate them.
//!
//! The central facts, all cross-checked against finite differences in
//! the tests:
//!
//! - triangle angles vary by heights over lengths:
//!   d gamma_{1,23} / d f_3 = h_{13,2} / l_13;
//! - one dihedral angle varies explicitly:
//!   d beta_{12,34} / d f_4 = h_{124,3} / (sin gamma_{1,24} l_14),
//!   and d-weighted row sums of dihedral variations reduce to dual areas;
//! - 2D curvature Jacobian: dK_i/df_j = -l*_ij/l_ij off the diagonal;
//! - 3D curvature Jacobian: dK_i/df_j = -(2 l*_ij - q_ij K_ij)/l_ij off
//!   the diagonal, with the scaling term K_i on the diagonal;
//! - the discrete Laplacian (D phi)_i = sum_j (l*_ij/l_ij)(phi_j - phi_i);
//! - the second variation of the total-curvature functional as a
//!   quadratic form with edge coefficients l*/l - q K/(2l) and vertex
//!   coefficients K_i;
//! - the 2D curvature potential F with dF/df_i = K_i, evaluated as a
//!   path-independent line integral.

use nalgebra::DMatrix;

use crate::complex::SimplicialComplex;
use crate::conformal::{ChartError, ConformalChart};
use crate::curvature::{edge_curvatures_3d, scalar_curvatures_3d, vertex_curvatures_2d};
use crate::geometry::GeometryError;
use crate::metric::{dual_lengths, PreMetric, TetraMetric, TriangleMetric};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VariationError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Symmetric vertex-indexed sparse matrix in coordinate form. The entry
/// pattern is the 1-skeleton adjacency plus the diagonal; entries are
/// sorted by (row, col).
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseOperator {
    pub fn from_entries(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        SparseOperator { dim, entries }
    }

    /// Operator with off-diagonal (i,j) entries `off[e]` on each edge and
    /// the given diagonal.
    pub fn from_edge_values(
        complex: &SimplicialComplex,
        off_diagonal: &[f64],
        diagonal: &[f64],
    ) -> Self {
        let mut entries = Vec::with_capacity(2 * off_diagonal.len() + diagonal.len());
        for (e, &w) in off_diagonal.iter().enumerate() {
            let [u, v] = complex.edge(e);
            entries.push((u, v, w));
            entries.push((v, u, w));
        }
        for (v, &w) in diagonal.iter().enumerate() {
            entries.push((v, v, w));
        }
        Self::from_entries(complex.vertex_count(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for &(r, c, w) in &self.entries {
            y[r] += w * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, w) in &self.entries {
            m[(r, c)] += w;
        }
        m
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dim];
        for &(r, _, w) in &self.entries {
            sums[r] += w;
        }
        sums
    }

    /// max |A - A^T| / max |A| over entries.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.to_dense();
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                defect = defect.max((m[(r, c)] - m[(c, r)]).abs());
                scale = scale.max(m[(r, c)].abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// All eigenvalues (ascending) of the symmetrized dense matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.to_dense();
        let sym = 0.5 * (&m + m.transpose());
        let mut values: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
        values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        values
    }

    /// Eigen-decomposition (values ascending with matching eigenvectors).
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let m = self.to_dense();
        let sym = 0.5 * (&m + m.transpose());
        let decomposition = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_unstable_by(|&a, &b| {
            decomposition.eigenvalues[a]
                .partial_cmp(&decomposition.eigenvalues[b])
                .unwrap()
        });
        let values = order
            .iter()
            .map(|&k| decomposition.eigenvalues[k])
            .collect();
        let vectors = order
            .iter()
            .map(|&k| {
                decomposition
                    .eigenvectors
                    .column(k)
                    .iter()
                    .copied()
                    .collect()
            })
            .collect();
        (values, vectors)
    }

    /// Smallest and largest eigenvalue. Below `dense_threshold` vertices
    /// this uses the full symmetric eigendecomposition, above it a
    /// shifted power iteration.
    pub fn extreme_eigenvalues(&self, dense_threshold: usize) -> (f64, f64) {
        if self.dim < dense_threshold {
            let values = self.eigenvalues();
            (values[0], *values.last().unwrap())
        } else {
            // Gershgorin bound, then power iteration on A + RI and A - RI.
            let mut radius = 0.0f64;
            let mut row_abs = vec![0.0; self.dim];
            for &(r, _, w) in &self.entries {
                row_abs[r] += w.abs();
            }
            for v in row_abs {
                radius = radius.max(v);
            }
            let dominant = |shift: f64| -> f64 {
                let mut x: Vec<f64> = (0..self.dim)
                    .map(|i| 1.0 + (i as f64 * 0.7).sin())
                    .collect();
                let mut value = 0.0;
                for _ in 0..500 {
                    let mut y = self.apply(&x);
                    for (yi, xi) in y.iter_mut().zip(&x) {
                        *yi += shift * xi;
                    }
                    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm == 0.0 {
                        return -shift;
                    }
                    for yi in y.iter_mut() {
                        *yi /= norm;
                    }
                    let rayleigh: f64 = {
                        let ay = self.apply(&y);
                        y.iter().zip(&ay).map(|(a, b)| a * b).sum()
                    };
                    if (rayleigh - value).abs() < 1e-13 * radius.max(1.0) {
                        return rayleigh;
                    }
                    value = rayleigh;
                    x = y;
                }
                value
            };
            let high = dominant(radius);
            let low = dominant(-radius);
            (low.min(high), high.max(low))
        }
    }
}

/// d gamma_{a,..} / d f_w on a metric triangle with local vertices 0..3.
///
/// For w distinct from a this is h_{aw,k}/l_aw with k the third vertex;
/// for w = a it is minus the sum over the two edges through a.
pub fn angle_gradient_2d(
    tm: &TriangleMetric,
    angle_at: usize,
    wrt: usize,
) -> Result<f64, GeometryError> {
    assert!(angle_at < 3 && wrt < 3);
    if angle_at != wrt {
        Ok(tm.height(angle_at, wrt)? / tm.length(angle_at, wrt))
    } else {
        let mut total = 0.0;
        for other in 0..3 {
            if other != angle_at {
                total += tm.height(angle_at, other)? / tm.length(angle_at, other);
            }
        }
        Ok(-total)
    }
}

/// d beta_{ab,cd} / d f_w for w not on the edge {a,b}: the dihedral-angle
/// response h_{abw,x} / (sin gamma_{a,bw} l_aw), averaged over the two
/// equivalent end formulas.
pub fn dihedral_gradient_3d(
    tm: &TetraMetric,
    edge: (usize, usize),
    wrt: usize,
) -> Result<f64, GeometryError> {
    let (a, b) = edge;
    assert!(a < 4 && b < 4 && wrt < 4 && a != b);
    assert!(
        wrt != a && wrt != b,
        "only variations off the edge are analytic"
    );
    let h = tm.height_to_face([a, b, wrt])?;
    let face = tm.face([a, b, wrt]);
    let mut sorted = [a, b, wrt];
    sorted.sort_unstable();
    let local = |v: usize| sorted.iter().position(|&s| s == v).unwrap();
    let via_a = h / (face.angle(local(a))?.sin() * tm.length(a, wrt));
    let via_b = h / (face.angle(local(b))?.sin() * tm.length(b, wrt));
    Ok(0.5 * (via_a + via_b))
}

/// Right-hand side of the d-weighted dihedral row identity: for vertices
/// a != w, sum_{edges (a,x) through a} d_ax dbeta_ax = 2 A_{aw,..}/l_aw
/// per unit df_w. For a = w the row is minus the sum of the other three.
pub fn dihedral_row_rhs(
    tm: &TetraMetric,
    row_vertex: usize,
    wrt: usize,
) -> Result<f64, GeometryError> {
    assert!(row_vertex < 4 && wrt < 4);
    if row_vertex != wrt {
        Ok(2.0 * tm.dual_area(row_vertex, wrt)? / tm.length(row_vertex, wrt))
    } else {
        let mut total = 0.0;
        for a in 0..4 {
            if a != wrt {
                total += 2.0 * tm.dual_area(a, wrt)? / tm.length(a, wrt);
            }
        }
        Ok(-total)
    }
}

/// 2D curvature Jacobian dK_i/df_j: minus the dual-length-weighted graph
/// Laplacian. Symmetric with zero row sums.
pub fn curvature_jacobian_2d(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    f: &[f64],
) -> Result<SparseOperator, VariationError> {
    assert_eq!(complex.dimension(), 2);
    let metric = chart.apply(complex, f)?;
    let weights = laplacian_weights(complex, &metric)?;
    let mut diagonal = vec![0.0; complex.vertex_count()];
    for (e, &w) in weights.iter().enumerate() {
        let [u, v] = complex.edge(e);
        diagonal[u] += w;
        diagonal[v] += w;
    }
    let off: Vec<f64> = weights.iter().map(|&w| -w).collect();
    Ok(SparseOperator::from_edge_values(complex, &off, &diagonal))
}

/// 3D curvature Jacobian dK_i/df_j with off-diagonal entries
/// -(2 l*_ij/l_ij - q_ij K_ij / l_ij) and diagonal sums plus K_i. This is
/// also the Hessian of the total-curvature functional.
pub fn curvature_jacobian_3d(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    f: &[f64],
) -> Result<SparseOperator, VariationError> {
    assert_eq!(complex.dimension(), 3);
    let metric = chart.apply(complex, f)?;
    let lengths = metric.lengths();
    let star = dual_lengths(complex, &metric)?;
    let q = chart.q_all(complex, f)?;
    let k_edge = edge_curvatures_3d(complex, &lengths)?;
    let k_vertex = scalar_curvatures_3d(complex, &metric)?;

    let coefficients: Vec<f64> = (0..complex.edge_count())
        .map(|e| (2.0 * star[e] - q[e] * k_edge[e]) / lengths[e])
        .collect();
    let mut diagonal = k_vertex;
    for (e, &c) in coefficients.iter().enumerate() {
        let [u, v] = complex.edge(e);
        diagonal[u] += c;
        diagonal[v] += c;
    }
    let off: Vec<f64> = coefficients.iter().map(|&c| -c).collect();
    Ok(SparseOperator::from_edge_values(complex, &off, &diagonal))
}

fn laplacian_weights(
    complex: &SimplicialComplex,
    d: &PreMetric,
) -> Result<Vec<f64>, GeometryError> {
    let star = dual_lengths(complex, d)?;
    Ok((0..complex.edge_count())
        .map(|e| star[e] / d.length(e))
        .collect())
}

/// The discrete Laplacian (D phi)_i = sum_j (l*_ij / l_ij)(phi_j - phi_i):
/// edge weights l*/l off the diagonal, minus their vertex sums on it.
pub fn laplacian(
    complex: &SimplicialComplex,
    d: &PreMetric,
) -> Result<SparseOperator, GeometryError> {
    let weights = laplacian_weights(complex, d)?;
    let mut diagonal = vec![0.0; complex.vertex_count()];
    for (e, &w) in weights.iter().enumerate() {
        let [u, v] = complex.edge(e);
        diagonal[u] -= w;
        diagonal[v] -= w;
    }
    Ok(SparseOperator::from_edge_values(
        complex, &weights, &diagonal,
    ))
}

/// Second variation of the total-curvature functional as a quadratic
/// form: edge coefficients c_ij = l*_ij/l_ij - q_ij K_ij / (2 l_ij) and
/// vertex coefficients K_i.
#[derive(Debug, Clone)]
pub struct EhrHessian {
    pub edge_coefficients: Vec<f64>,
    pub vertex_coefficients: Vec<f64>,
}

impl EhrHessian {
    /// Evaluate sum_i sum_{j!=i} c_ij (v_j - v_i)^2 + sum_i K_i (v_i^2 + a_i)
    /// where `velocity` is df/dt and `acceleration` is d^2f/dt^2 (each
    /// unordered edge contributes twice to the double sum).
    pub fn evaluate(
        &self,
        complex: &SimplicialComplex,
        velocity: &[f64],
        acceleration: &[f64],
    ) -> f64 {
        let mut total = 0.0;
        for (e, &c) in self.edge_coefficients.iter().enumerate() {
            let [u, v] = complex.edge(e);
            let diff = velocity[v] - velocity[u];
            total += 2.0 * c * diff * diff;
        }
        for (v, &k) in self.vertex_coefficients.iter().enumerate() {
            total += k * (velocity[v] * velocity[v] + acceleration[v]);
        }
        total
    }
}

pub fn ehr_hessian(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    f: &[f64],
) -> Result<EhrHessian, VariationError> {
    assert_eq!(complex.dimension(), 3);
    let metric = chart.apply(complex, f)?;
    let lengths = metric.lengths();
    let star = dual_lengths(complex, &metric)?;
    let q = chart.q_all(complex, f)?;
    let k_edge = edge_curvatures_3d(complex, &lengths)?;
    let k_vertex = scalar_curvatures_3d(complex, &metric)?;
    let edge_coefficients = (0..complex.edge_count())
        .map(|e| (star[e] - 0.5 * q[e] * k_edge[e]) / lengths[e])
        .collect();
    Ok(EhrHessian {
        edge_coefficients,
        vertex_coefficients: k_vertex,
    })
}

/// Curvature as a function of f for the chart's dimension.
fn curvature_of(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    f: &[f64],
) -> Result<Vec<f64>, VariationError> {
    let metric = chart.apply(complex, f)?;
    if complex.dimension() == 2 {
        Ok(vertex_curvatures_2d(complex, &metric.lengths())?)
    } else {
        Ok(scalar_curvatures_3d(complex, &metric)?)
    }
}

/// Line integral of the curvature one-form sum_i K_i df_i along a
/// polyline of vertex functions, by adaptive Gauss-Legendre quadrature.
/// In a simply connected chart domain this is the 2D curvature potential
/// F with dF/df_i = K_i. Any sample falling outside the chart domain is
/// an error.
pub fn functional_f(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    polyline: &[Vec<f64>],
) -> Result<f64, VariationError> {
    assert_eq!(complex.dimension(), 2, "the curvature potential is 2D");
    assert!(polyline.len() >= 2, "polyline needs at least two points");
    let mut total = 0.0;
    for pair in polyline.windows(2) {
        let (p, q) = (&pair[0], &pair[1]);
        let direction: Vec<f64> = p.iter().zip(q).map(|(a, b)| b - a).collect();
        let integrand = |t: f64| -> Result<f64, VariationError> {
            let f: Vec<f64> = p.iter().zip(&direction).map(|(a, d)| a + t * d).collect();
            let k = curvature_of(complex, chart, &f)?;
            Ok(k.iter().zip(&direction).map(|(a, b)| a * b).sum())
        };
        total += adaptive_gauss(&integrand, 0.0, 1.0, 1e-13, 24)?;
    }
    Ok(total)
}

/// Straight-segment special case of [`functional_f`].
pub fn functional_f_straight(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    f_start: &[f64],
    f_end: &[f64],
) -> Result<f64, VariationError> {
    functional_f(complex, chart, &[f_start.to_vec(), f_end.to_vec()])
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1], generated once by
// Newton iteration on the Legendre polynomial.
fn gauss_nodes() -> &'static [(f64, f64); 16] {
    use std::sync::OnceLock;
    static NODES: OnceLock<[(f64, f64); 16]> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 16usize;
        let mut out = [(0.0, 0.0); 16];
        for k in 0..n {
            // Initial guess: Chebyshev-like.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                // Evaluate P_n and P_n' by recurrence.
                let (mut p0, mut p1) = (1.0f64, x);
                for m in 2..=n {
                    let m = m as f64;
                    let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0f64, x);
            for m in 2..=n {
                let m = m as f64;
                let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            out[n - 1 - k] = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

fn gauss_panel<E>(f: &impl Fn(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<f64, E> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut total = 0.0;
    for &(x, w) in gauss_nodes() {
        total += w * f(mid + half * x)?;
    }
    Ok(total * half)
}

fn adaptive_gauss<E>(
    f: &impl Fn(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, E> {
    let whole = gauss_panel(f, a, b)?;
    let mid = 0.5 * (a + b);
    let left = gauss_panel(f, a, mid)?;
    let right = gauss_panel(f, mid, b)?;
    let refined = left + right;
    if (whole - refined).abs() <= tol * (1.0 + refined.abs()) || depth == 0 {
        Ok(refined)
    } else {
        Ok(adaptive_gauss(f, a, mid, 0.5 * tol, depth - 1)?
            + adaptive_gauss(f, mid, b, 0.5 * tol, depth - 1)?)
    }
}

/// Options for the finite-difference oracle. Unless overridden, the step
/// is 1e-5 * max(1, |x|_inf); Richardson refinement combines steps h and
/// h/2 for fourth-order accuracy.
#[derive(Debug, Clone, Copy, Default)]
pub struct FdOptions {
    pub step: Option<f64>,
    pub richardson: bool,
}

impl FdOptions {
    fn resolve(&self, x: &[f64]) -> f64 {
        self.step.unwrap_or_else(|| {
            let scale = x.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            1e-5 * scale.max(1.0)
        })
    }
}

fn central_diff<E>(
    f: &mut impl FnMut(&[f64]) -> Result<f64, E>,
    x: &[f64],
    i: usize,
    h: f64,
) -> Result<f64, E> {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] += h;
    xm[i] -= h;
    Ok((f(&xp)? - f(&xm)?) / (2.0 * h))
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient<E>(
    mut f: impl FnMut(&[f64]) -> Result<f64, E>,
    x: &[f64],
    options: FdOptions,
) -> Result<Vec<f64>, E> {
    let h = options.resolve(x);
    (0..x.len())
        .map(|i| {
            if options.richardson {
                let coarse = central_diff(&mut f, x, i, h)?;
                let fine = central_diff(&mut f, x, i, 0.5 * h)?;
                Ok((4.0 * fine - coarse) / 3.0)
            } else {
                central_diff(&mut f, x, i, h)
            }
        })
        .collect()
}

/// Central-difference Jacobian (rows index outputs, columns inputs).
pub fn fd_jacobian<E>(
    mut f: impl FnMut(&[f64]) -> Result<Vec<f64>, E>,
    x: &[f64],
    options: FdOptions,
) -> Result<Vec<Vec<f64>>, E> {
    let h = options.resolve(x);
    let mut columns = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let (fp, fm) = (f(&xp)?, f(&xm)?);
        columns.push(
            fp.iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
    }
    let rows = columns[0].len();
    Ok((0..rows)
        .map(|r| (0..x.len()).map(|c| columns[c][r]).collect())
        .collect())
}

/// Central second directional derivative (f(x+hv) - 2f(x) + f(x-hv))/h^2.
pub fn fd_directional_second<E>(
    mut f: impl FnMut(&[f64]) -> Result<f64, E>,
    x: &[f64],
    direction: &[f64],
    step: f64,
) -> Result<f64, E> {
    let shift = |s: f64| -> Vec<f64> { x.iter().zip(direction).map(|(a, d)| a + s * d).collect() };
    Ok((f(&shift(step))? - 2.0 * f(x)? + f(&shift(-step))?) / (step * step))
}

/// Directional derivative along a direction vector by central differences.
pub fn fd_directional<E>(
    mut f: impl FnMut(&[f64]) -> Result<f64, E>,
    x: &[f64],
    direction: &[f64],
    step: f64,
) -> Result<f64, E> {
    let shift = |s: f64| -> Vec<f64> { x.iter().zip(direction).map(|(a, d)| a + s * d).collect() };
    Ok((f(&shift(step))? - f(&shift(-step))?) / (2.0 * step))
}

/// Analytic-vs-finite-difference comparison used by the command line and
/// the acceptance suite: max relative error of the curvature Jacobian
/// against the finite-difference Jacobian of the curvature map.
pub fn jacobian_fd_max_error(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    f: &[f64],
) -> Result<f64, VariationError> {
    let analytic = if complex.dimension() == 2 {
        curvature_jacobian_2d(complex, chart, f)?
    } else {
        curvature_jacobian_3d(complex, chart, f)?
    };
    let dense = analytic.to_dense();
    let fd = fd_jacobian(|x| curvature_of(complex, chart, x), f, FdOptions::default())?;
    let scale = dense.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-12);
    let mut worst = 0.0f64;
    for r in 0..complex.vertex_count() {
        for c in 0..complex.vertex_count() {
            worst = worst.max((dense[(r, c)] - fd[r][c]).abs() / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{tetra_from_chart, triangle_from_chart, ChartKind, ConformalChart};
    use crate::curvature::ehr;
    use crate::fixtures;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_triangle() -> TriangleMetric {
        TriangleMetric { d: [[0.5; 2]; 3] }
    }

    fn unit_tetra() -> TetraMetric {
        TetraMetric { d: [[0.5; 2]; 6] }
    }

    #[test]
    fn equilateral_angle_gradients() {
        let tm = unit_triangle();
        let expected = 1.0 / (2.0 * 3.0f64.sqrt());
        assert_relative_eq!(
            angle_gradient_2d(&tm, 0, 2).unwrap(),
            expected,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            angle_gradient_2d(&tm, 2, 2).unwrap(),
            -2.0 * expected,
            epsilon = 1e-14
        );
    }

    #[test]
    fn right_triangle_hypotenuse_gradient_vanishes() {
        // (3,4,5) under the perpendicular-bisector splitting: the height
        // over the hypotenuse is zero, so the cross partial vanishes.
        let tm = TriangleMetric {
            d: [[1.5, 1.5], [2.0, 2.0], [2.5, 2.5]],
        };
        assert_relative_eq!(angle_gradient_2d(&tm, 1, 2).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn angle_gradient_column_sums_vanish() {
        let tm = TriangleMetric {
            d: [[0.6, 0.5], [0.45, 0.7], [0.55, 0.62]],
        };
        for wrt in 0..3 {
            let total: f64 = (0..3)
                .map(|at| angle_gradient_2d(&tm, at, wrt).unwrap())
                .sum();
            assert!(total.abs() < 1e-12, "column {wrt} sums to {total}");
        }
    }

    fn random_triangle(rng: &mut ChaCha8Rng) -> (ChartKind, [f64; 3], [f64; 3], TriangleMetric) {
        loop {
            let kind = match rng.random_range(0..3) {
                0 => ChartKind::Packing,
                1 => ChartKind::FixedInversive,
                _ => ChartKind::PerpBisector,
            };
            let f: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.4..0.4));
            let params: [f64; 3] = match kind {
                ChartKind::Packing => [0.0; 3],
                ChartKind::FixedInversive => std::array::from_fn(|_| rng.random_range(0.0..1.4)),
                ChartKind::PerpBisector => std::array::from_fn(|_| rng.random_range(0.6..1.5)),
            };
            if let Some(tm) = triangle_from_chart(kind, &f, &params) {
                // Keep the finite-difference comparisons well conditioned.
                if (0..3).all(|v| tm.angle(v).map(|g| g > 0.12).unwrap_or(false)) {
                    return (kind, f, params, tm);
                }
            }
        }
    }

    fn random_tetra(rng: &mut ChaCha8Rng) -> (ChartKind, [f64; 4], [f64; 6], TetraMetric) {
        loop {
            let kind = match rng.random_range(0..3) {
                0 => ChartKind::Packing,
                1 => ChartKind::FixedInversive,
                _ => ChartKind::PerpBisector,
            };
            let f: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.25..0.25));
            let params: [f64; 6] = match kind {
                ChartKind::Packing => [0.0; 6],
                ChartKind::FixedInversive => std::array::from_fn(|_| rng.random_range(0.4..1.2)),
                ChartKind::PerpBisector => std::array::from_fn(|_| rng.random_range(0.8..1.3)),
            };
            if let Some(tm) = tetra_from_chart(kind, &f, &params) {
                let l = tm.lengths();
                let mean = l.0.iter().sum::<f64>() / 6.0;
                let volume = match l.volume() {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                if volume > 0.02 * mean.powi(3) {
                    return (kind, f, params, tm);
                }
            }
        }
    }

    fn triangle_angle_of_f(
        kind: ChartKind,
        params: &[f64; 3],
        f: &[f64],
        at: usize,
    ) -> Result<f64, GeometryError> {
        let tm = triangle_from_chart(kind, &[f[0], f[1], f[2]], params)
            .ok_or_else(|| GeometryError::Degenerate("left chart domain".into()))?;
        tm.angle(at)
    }

    #[test]
    fn angle_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..60 {
            let (kind, f, params, tm) = random_triangle(&mut rng);
            for at in 0..3 {
                for wrt in 0..3 {
                    let analytic = angle_gradient_2d(&tm, at, wrt).unwrap();
                    let fd = fd_gradient(
                        |x| triangle_angle_of_f(kind, &params, x, at),
                        &f,
                        FdOptions::default(),
                    )
                    .unwrap()[wrt];
                    let err = (analytic - fd).abs() / (fd.abs() + 1e-12);
                    assert!(
                        err < 1e-6,
                        "{kind:?} angle {at} wrt {wrt}: analytic {analytic} fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn regular_dihedral_gradient_value() {
        let tm = unit_tetra();
        let expected = 1.0 / 18.0f64.sqrt();
        assert_relative_eq!(
            dihedral_gradient_3d(&tm, (0, 1), 3).unwrap(),
            expected,
            epsilon = 1e-13
        );
    }

    #[test]
    fn regular_row_rhs_value() {
        let tm = unit_tetra();
        assert_relative_eq!(
            dihedral_row_rhs(&tm, 0, 3).unwrap(),
            2.0 / (12.0 * 2.0f64.sqrt()),
            epsilon = 1e-13
        );
    }

    fn tet_dihedral_of_f(
        kind: ChartKind,
        params: &[f64; 6],
        f: &[f64],
        edge: (usize, usize),
    ) -> Result<f64, GeometryError> {
        let tm = tetra_from_chart(kind, &[f[0], f[1], f[2], f[3]], params)
            .ok_or_else(|| GeometryError::Degenerate("left chart domain".into()))?;
        crate::geometry::dihedral_angle(&tm.lengths(), edge.0, edge.1)
    }

    #[test]
    fn dihedral_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(307);
        for _ in 0..60 {
            let (kind, f, params, tm) = random_tetra(&mut rng);
            // Explicit single-dihedral formula, all off-edge pairs.
            for (edge, wrt) in [
                ((0usize, 1usize), 2usize),
                ((0, 1), 3),
                ((1, 2), 0),
                ((2, 3), 1),
            ] {
                let analytic = dihedral_gradient_3d(&tm, edge, wrt).unwrap();
                let fd = fd_gradient(
                    |x| tet_dihedral_of_f(kind, &params, x, edge),
                    &f,
                    FdOptions::default(),
                )
                .unwrap()[wrt];
                let err = (analytic - fd).abs() / (fd.abs() + 1e-12);
                assert!(
                    err < 1e-6,
                    "{kind:?} edge {edge:?} wrt {wrt}: {analytic} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn dihedral_rows_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(308);
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for _ in 0..40 {
            let (kind, f, params, tm) = random_tetra(&mut rng);
            let wrt = rng.random_range(0..4);
            // FD of every dihedral angle in the f_wrt direction.
            let mut dbeta = [[0.0f64; 4]; 4];
            for &(i, j) in &pairs {
                let fd = fd_gradient(
                    |x| tet_dihedral_of_f(kind, &params, x, (i, j)),
                    &f,
                    FdOptions::default(),
                )
                .unwrap()[wrt];
                dbeta[i][j] = fd;
                dbeta[j][i] = fd;
            }
            let mut rhs_sum = 0.0;
            for row in 0..4 {
                let lhs: f64 = (0..4)
                    .filter(|&j| j != row)
                    .map(|j| tm.d(row, j) * dbeta[row][j])
                    .sum();
                let rhs = dihedral_row_rhs(&tm, row, wrt).unwrap();
                let scale = lhs.abs().max(rhs.abs()).max(1e-12);
                assert!(
                    (lhs - rhs).abs() / scale < 1e-6,
                    "{kind:?} row {row} wrt {wrt}: {lhs} vs {rhs}"
                );
                if row != wrt {
                    rhs_sum += rhs;
                }
            }
            // Fourth row equals minus the sum of the other three.
            assert_relative_eq!(
                dihedral_row_rhs(&tm, wrt, wrt).unwrap(),
                -rhs_sum,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn sphere_jacobian_2d_structure() {
        let c = fixtures::sphere_tetrahedron();
        let chart = ConformalChart::packing();
        let f = vec![0.5f64.ln(); 4];
        let jac = curvature_jacobian_2d(&c, &chart, &f).unwrap();
        let dense = jac.to_dense();
        for r in 0..4 {
            for col in 0..4 {
                let expected = if r == col {
                    3.0f64.sqrt()
                } else {
                    -1.0 / 3.0f64.sqrt()
                };
                assert_relative_eq!(dense[(r, col)], expected, epsilon = 1e-13);
            }
        }
        for s in jac.row_sums() {
            assert!(s.abs() < 1e-13);
        }
        assert!(jac.symmetry_defect() < 1e-14);
    }

    #[test]
    fn jacobian_2d_matches_fd_on_all_charts() {
        let c = fixtures::sphere_tetrahedron();
        let f: Vec<f64> = vec![-0.6, -0.72, -0.81, -0.66];
        let charts = [
            ConformalChart::packing(),
            ConformalChart::fixed_inversive(&c, vec![0.7; c.edge_count()]).unwrap(),
            ConformalChart::perp_bisector(&c, vec![1.0; c.edge_count()]).unwrap(),
        ];
        for chart in charts {
            let err = jacobian_fd_max_error(&c, &chart, &f).unwrap();
            assert!(err < 1e-6, "{:?}: {err}", chart.kind());
        }
    }

    #[test]
    fn flat_torus_jacobian_is_negated_cotan_laplacian() {
        let (c, lengths) = fixtures::flat_torus_2d(3);
        let chart = ConformalChart::perp_bisector(&c, lengths.clone()).unwrap();
        let f = vec![0.0; c.vertex_count()];
        let jac = curvature_jacobian_2d(&c, &chart, &f).unwrap().to_dense();
        // Finite-element cotangent weights, computed independently.
        let mut cot = DMatrix::zeros(c.vertex_count(), c.vertex_count());
        for e in 0..c.edge_count() {
            let [u, v] = c.edge(e);
            let mut w = 0.0;
            for &t in c.triangles_at_edge(e) {
                let verts = c.triangle(t);
                let apex = verts.iter().copied().find(|&x| x != u && x != v).unwrap();
                let la = lengths[c.edge_id([apex, u]).unwrap()];
                let lb = lengths[c.edge_id([apex, v]).unwrap()];
                let lc = lengths[e];
                let gamma = crate::geometry::face_angle(la, lb, lc).unwrap();
                w += 0.5 / gamma.tan();
            }
            cot[(u, v)] = -w;
            cot[(v, u)] = -w;
            cot[(u, u)] += w;
            cot[(v, v)] += w;
        }
        for r in 0..c.vertex_count() {
            for col in 0..c.vertex_count() {
                assert_relative_eq!(jac[(r, col)], cot[(r, col)], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn jacobian_3d_packing_is_laplacian_plus_curvature() {
        let c = fixtures::sphere_4simplex();
        let chart = ConformalChart::packing();
        let f: Vec<f64> = (0..5).map(|v| -0.75 + 0.04 * v as f64).collect();
        let jac = curvature_jacobian_3d(&c, &chart, &f).unwrap().to_dense();
        let m = chart.apply(&c, &f).unwrap();
        let lap = laplacian(&c, &m).unwrap().to_dense();
        let k = scalar_curvatures_3d(&c, &m).unwrap();
        for r in 0..5 {
            for col in 0..5 {
                let expected = -2.0 * lap[(r, col)] + if r == col { k[r] } else { 0.0 };
                assert_relative_eq!(jac[(r, col)], expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn flat_3_torus_jacobian_is_minus_two_laplacian() {
        let (c, lengths) = fixtures::flat_torus_3d(3);
        let chart = ConformalChart::perp_bisector(&c, lengths.clone()).unwrap();
        let f = vec![0.0; c.vertex_count()];
        let jac = curvature_jacobian_3d(&c, &chart, &f).unwrap().to_dense();
        let lap = laplacian(&c, &PreMetric::from_lengths_halved(&lengths))
            .unwrap()
            .to_dense();
        for r in 0..c.vertex_count() {
            for col in 0..c.vertex_count() {
                assert_relative_eq!(jac[(r, col)], -2.0 * lap[(r, col)], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn jacobian_3d_matches_fd() {
        let c = fixtures::sphere_4simplex();
        let f: Vec<f64> = vec![-0.69, -0.71, -0.74, -0.68, -0.72];
        let charts = [
            ConformalChart::packing(),
            ConformalChart::fixed_inversive(&c, vec![0.9; c.edge_count()]).unwrap(),
            ConformalChart::perp_bisector(&c, vec![1.0; c.edge_count()]).unwrap(),
        ];
        for chart in charts {
            let err = jacobian_fd_max_error(&c, &chart, &f).unwrap();
            assert!(err < 1e-6, "{:?}: {err}", chart.kind());
        }
    }

    #[test]
    fn jacobian_applied_to_ones_gives_curvature() {
        let c = fixtures::sphere_4simplex();
        let chart = ConformalChart::perp_bisector(&c, vec![1.0; c.edge_count()]).unwrap();
        let f: Vec<f64> = (0..5).map(|v| 0.05 * (v as f64) - 0.1).collect();
        let jac = curvature_jacobian_3d(&c, &chart, &f).unwrap();
        let m = chart.apply(&c, &f).unwrap();
        let k = scalar_curvatures_3d(&c, &m).unwrap();
        let jk = jac.apply(&[1.0; 5]);
        for v in 0..5 {
            assert_relative_eq!(jk[v], k[v], max_relative = 1e-11);
        }
    }

    #[test]
    fn laplacian_spectrum_on_equilateral_sphere() {
        let c = fixtures::sphere_tetrahedron();
        let d = PreMetric::constant(&c, 0.5);
        let lap = laplacian(&c, &d).unwrap();
        let eigenvalues = lap.eigenvalues();
        let w = 4.0 / 3.0f64.sqrt();
        assert_relative_eq!(eigenvalues[3], 0.0, epsilon = 1e-12);
        for &value in &eigenvalues[..3] {
            assert_relative_eq!(value, -w, epsilon = 1e-12);
        }
        // Constant functions are killed exactly.
        for v in lap.apply(&[5.0; 4]) {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_weak_form_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for (c, d) in [
            (fixtures::sphere_tetrahedron(), None),
            (fixtures::sphere_4simplex(), None),
            {
                let (c, lengths) = fixtures::flat_torus_2d(3);
                (c, Some(PreMetric::from_lengths_halved(&lengths)))
            },
        ] {
            let d = d.unwrap_or_else(|| PreMetric::constant(&c, 0.5));
            let lap = laplacian(&c, &d).unwrap();
            let n = c.dimension() as f64;
            for _ in 0..20 {
                let phi: Vec<f64> = (0..c.vertex_count())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let psi: Vec<f64> = (0..c.vertex_count())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let lhs: f64 = lap.apply(&phi).iter().zip(&psi).map(|(a, b)| a * b).sum();
                // Ordered-pair sum over directed edges.
                let mut rhs = 0.0;
                for e in 0..c.edge_count() {
                    let [u, v] = c.edge(e);
                    let l = d.length(e);
                    let vij = crate::metric::edge_volume(&c, &d, e).unwrap();
                    rhs += 2.0 * ((phi[u] - phi[v]) / l) * ((psi[u] - psi[v]) / l) * vij;
                }
                rhs *= -n / 2.0;
                assert!(
                    (lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()),
                    "weak form: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn ehr_hessian_matches_fd_second_derivative() {
        let c = fixtures::sphere_4simplex();
        let f: Vec<f64> = vec![-0.7, -0.66, -0.73, -0.71, -0.69];
        let charts = [
            ConformalChart::packing(),
            ConformalChart::fixed_inversive(&c, vec![0.85; c.edge_count()]).unwrap(),
            ConformalChart::perp_bisector(&c, vec![1.0; c.edge_count()]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for chart in charts {
            let form = ehr_hessian(&c, &chart, &f).unwrap();
            for _ in 0..20 {
                let dir: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
                let analytic = form.evaluate(&c, &dir, &[0.0; 5]);
                let fd = fd_directional_second(
                    |x| {
                        let m = chart
                            .apply(&c, x)
                            .map_err(|_| GeometryError::Degenerate("domain".into()))?;
                        ehr(&c, &m.lengths())
                    },
                    &f,
                    &dir,
                    1e-4,
                )
                .unwrap();
                let err = (analytic - fd).abs() / (fd.abs().max(1e-9));
                assert!(err < 1e-5, "{:?}: {analytic} vs {fd}", chart.kind());
            }
        }
    }

    #[test]
    fn ehr_hessian_on_flat_torus_reduces_to_dual_weights() {
        let (c, lengths) = fixtures::flat_torus_3d(3);
        let chart = ConformalChart::perp_bisector(&c, lengths.clone()).unwrap();
        let f = vec![0.0; c.vertex_count()];
        let form = ehr_hessian(&c, &chart, &f).unwrap();
        let d = PreMetric::from_lengths_halved(&lengths);
        let star = dual_lengths(&c, &d).unwrap();
        for e in 0..c.edge_count() {
            assert_relative_eq!(
                form.edge_coefficients[e],
                star[e] / lengths[e],
                epsilon = 1e-12
            );
        }
        for &k in &form.vertex_coefficients {
            assert!(k.abs() < 1e-12);
        }
    }

    #[test]
    fn ehr_hessian_packing_coefficients_are_pure_dual_weights() {
        // q = 0 under packing, so the edge coefficients reduce to l*/l
        // whatever the curvature is.
        let c = fixtures::sphere_4simplex();
        let chart = ConformalChart::packing();
        let f: Vec<f64> = vec![-0.8, -0.6, -0.72, -0.65, -0.7];
        let form = ehr_hessian(&c, &chart, &f).unwrap();
        let m = chart.apply(&c, &f).unwrap();
        let star = dual_lengths(&c, &m).unwrap();
        for e in 0..c.edge_count() {
            assert_relative_eq!(
                form.edge_coefficients[e],
                star[e] / m.length(e),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn ehr_hessian_perp_bisector_coefficients() {
        // q = l/4 makes the edge coefficient l*/l - K_ij/8.
        let c = fixtures::sphere_4simplex();
        let chart = ConformalChart::perp_bisector(&c, vec![1.0; c.edge_count()]).unwrap();
        let f = vec![0.0; 5];
        let form = ehr_hessian(&c, &chart, &f).unwrap();
        let d = chart.apply(&c, &f).unwrap();
        let star = dual_lengths(&c, &d).unwrap();
        let k = edge_curvatures_3d(&c, &d.lengths()).unwrap();
        for e in 0..c.edge_count() {
            assert_relative_eq!(
                form.edge_coefficients[e],
                star[e] - k[e] / 8.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn functional_f_examples() {
        let c = fixtures::sphere_tetrahedron();
        let chart = ConformalChart::packing();
        let f0 = vec![0.5f64.ln(); 4];
        // Zero path.
        assert_relative_eq!(
            functional_f_straight(&c, &chart, &f0, &f0).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        // Constant shift: integral of sum K_i = 2 pi chi = 4 pi.
        let shift = 0.37;
        let f1: Vec<f64> = f0.iter().map(|x| x + shift).collect();
        assert_relative_eq!(
            functional_f_straight(&c, &chart, &f0, &f1).unwrap(),
            4.0 * PI * shift,
            max_relative = 1e-11
        );
        // Dog-leg path agrees with the straight segment.
        let f_end = vec![-0.55, -0.8, -0.62, -0.71];
        let waypoint = vec![-0.5, -0.62, -0.8, -0.66];
        let straight = functional_f_straight(&c, &chart, &f0, &f_end).unwrap();
        let dogleg = functional_f(&c, &chart, &[f0.clone(), waypoint, f_end.clone()]).unwrap();
        assert!(
            (straight - dogleg).abs() < 1e-9,
            "path dependence {straight} vs {dogleg}"
        );
        // Gradient of F is the curvature.
        let grad = fd_gradient(
            |x| {
                functional_f_straight(&c, &chart, &f0, x)
                    .map_err(|_| GeometryError::Degenerate("domain".into()))
            },
            &f_end,
            FdOptions::default(),
        )
        .unwrap();
        let k = curvature_of(&c, &chart, &f_end).unwrap();
        for v in 0..4 {
            assert_relative_eq!(grad[v], k[v], max_relative = 1e-7);
        }
    }

    #[test]
    fn fd_oracle_chart_axioms() {
        // d length/d f at an endpoint equals d there, zero elsewhere.
        let c = fixtures::sphere_tetrahedron();
        let chart = ConformalChart::packing();
        let f = vec![0.5f64.ln(); 4];
        let e0 = 0;
        let grad = fd_gradient(
            |x| -> Result<f64, GeometryError> {
                let m = chart
                    .apply(&c, x)
                    .map_err(|_| GeometryError::Degenerate("domain".into()))?;
                Ok(m.length(e0))
            },
            &f,
            FdOptions::default(),
        )
        .unwrap();
        let [u, v] = c.edge(e0);
        for w in 0..4 {
            let expected = if w == u || w == v { 0.5 } else { 0.0 };
            assert_relative_eq!(grad[w], expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn fd_oracle_regge_gradient() {
        // d EHR / d l_e equals the angle deficit at e.
        let c = fixtures::sphere_4simplex();
        let lengths: Vec<f64> = (0..c.edge_count()).map(|e| 1.0 + 0.01 * e as f64).collect();
        let deficits = crate::curvature::edge_deficits_3d(&c, &lengths).unwrap();
        let grad = fd_gradient(|l| ehr(&c, l), &lengths, FdOptions::default()).unwrap();
        for e in 0..c.edge_count() {
            assert_relative_eq!(grad[e], deficits[e], max_relative = 1e-7);
        }
    }

    #[test]
    fn fd_oracle_volume_gradient_in_f() {
        // d V / d f_i equals the vertex volume V_i, for every chart kind.
        let c = fixtures::sphere_4simplex();
        let charts = [
            ConformalChart::packing(),
            ConformalChart::fixed_inversive(&c, vec![0.9; c.edge_count()]).unwrap(),
            ConformalChart::perp_bisector(&c, vec![1.0; c.edge_count()]).unwrap(),
        ];
        let f: Vec<f64> = vec![-0.68, -0.74, -0.7, -0.72, -0.66];
        for chart in charts {
            let m = chart.apply(&c, &f).unwrap();
            let volumes = crate::metric::vertex_volumes(&c, &m).unwrap();
            let grad = fd_gradient(
                |x| {
                    let m = chart
                        .apply(&c, x)
                        .map_err(|_| GeometryError::Degenerate("domain".into()))?;
                    crate::curvature::total_volume(&c, &m.lengths())
                },
                &f,
                FdOptions::default(),
            )
            .unwrap();
            for v in 0..5 {
                assert_relative_eq!(grad[v], volumes[v], max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn richardson_refines_fd() {
        let f = |x: &[f64]| -> Result<f64, GeometryError> { Ok((3.0 * x[0]).sin() * x[1].exp()) };
        let x = vec![0.4f64, -0.2];
        let exact = 3.0 * (3.0 * x[0]).cos() * x[1].exp();
        let plain = fd_gradient(
            f,
            &x,
            FdOptions {
                step: Some(1e-3),
                richardson: false,
            },
        )
        .unwrap();
        let refined = fd_gradient(
            f,
            &x,
            FdOptions {
                step: Some(1e-3),
                richardson: true,
            },
        )
        .unwrap();
        assert!((refined[0] - exact).abs() < (plain[0] - exact).abs());
    }

    #[test]
    fn extreme_eigenvalues_iterative_matches_dense() {
        let (c, lengths) = fixtures::flat_torus_2d(4);
        let d = PreMetric::from_lengths_halved(&lengths);
        let lap = laplacian(&c, &d).unwrap();
        let dense = lap.eigenvalues();
        let (low, high) = lap.extreme_eigenvalues(1);
        assert_relative_eq!(low, dense[0], max_relative = 1e-8);
        assert!(high.abs() < 1e-7 * dense[0].abs());
    }
}
