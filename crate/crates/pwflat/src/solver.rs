//! Newton and gradient-flow solvers for prescribed curvature inside a
//! conformal chart, with definiteness and rigidity diagnostics.
//!
//! Curvature is invariant (2D) or homogeneous (3D) under the constant
//! shift f -> f + c, so the Jacobian carries a one-dimensional scaling
//! kernel at solutions. A gauge (zero mean or a pinned vertex) removes
//! it; Newton steps solve the bordered system
//!
//!   [ J  c ] [ delta ]   [ -r ]
//!   [ c^T 0 ] [  mu  ] = [  0 ]
//!
//! whose multiplier mu vanishes at the solution. The line search
//! backtracks (factor 1/2, up to 40 halvings) with chart-domain
//! membership as a hard filter.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::complex::SimplicialComplex;
use crate::conformal::{ChartKind, ConformalChart};
use crate::curvature::{edge_curvatures_3d, scalar_curvatures_3d, vertex_curvatures_2d};
use crate::geometry::{embed_triangle, GeometryError};
use crate::metric::{dual_lengths, vertex_volumes};
use crate::variation::{
    curvature_jacobian_2d, curvature_jacobian_3d, fd_jacobian, laplacian, FdOptions,
    SparseOperator, VariationError,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("target is infeasible: {0}")]
    Infeasible(String),
    #[error("maximum iterations reached (residual {residual:e})")]
    MaxIterations { residual: f64 },
    #[error("line search left the chart domain")]
    LeftDomain,
    #[error("singular Hessian after gauge reduction")]
    SingularHessian,
    #[error("residual decrease stalled over a 20-step window")]
    AbortNonMonotone,
    #[error("metric is not critical: residual {0:e} exceeds 1e-8")]
    NotCritical(f64),
    #[error(transparent)]
    Variation(#[from] VariationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Gauge fixing for the one-dimensional scaling kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gauge {
    PinVertex(usize),
    ZeroMean,
}

/// What to solve for.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveTarget {
    /// Per-vertex curvature target (2D); must sum to 2 pi chi.
    Prescribed2D(Vec<f64>),
    /// K_i = 0 at every vertex (3D).
    ZeroScalar3D,
    /// K_i = lambda V_i with lambda = EHR/(3V) free (3D).
    ConstantScalar3D,
}

#[derive(Debug, Clone)]
pub struct SolveProblem<'a> {
    pub complex: &'a SimplicialComplex,
    pub chart: &'a ConformalChart,
    pub initial_f: Vec<f64>,
    pub target: SolveTarget,
    pub gauge: Gauge,
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// One accepted iterate.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub f: Vec<f64>,
    pub residual_norm: f64,
    pub step_size: f64,
    /// Eigenvalue counts (negative, near-zero, positive) of the
    /// gauge-reduced Jacobian; empty summary for flow steps.
    pub hessian_negative: usize,
    pub hessian_zero: usize,
    pub hessian_positive: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

impl<'a> SolveProblem<'a> {
    /// Validate and construct. Infeasible 2D targets (sum of targets not
    /// 2 pi chi) are rejected here; 3D carries no such conservation law,
    /// so no feasibility pre-check exists for 3D targets.
    pub fn new(
        complex: &'a SimplicialComplex,
        chart: &'a ConformalChart,
        initial_f: Vec<f64>,
        target: SolveTarget,
        gauge: Gauge,
    ) -> Result<Self, SolveError> {
        assert_eq!(initial_f.len(), complex.vertex_count());
        match (&target, complex.dimension()) {
            (SolveTarget::Prescribed2D(k), 2) => {
                let total: f64 = k.iter().sum();
                let expected = 2.0 * std::f64::consts::PI * complex.euler_characteristic() as f64;
                if (total - expected).abs() > 1e-8 {
                    return Err(SolveError::Infeasible(format!(
                        "target curvatures sum to {total}, Gauss-Bonnet requires {expected}"
                    )));
                }
                if k.len() != complex.vertex_count() {
                    return Err(SolveError::Infeasible(
                        "target length differs from vertex count".to_string(),
                    ));
                }
            }
            (SolveTarget::ZeroScalar3D, 3) | (SolveTarget::ConstantScalar3D, 3) => {}
            _ => {
                return Err(SolveError::Infeasible(
                    "target kind does not match the complex dimension".to_string(),
                ))
            }
        }
        if let Gauge::PinVertex(v) = gauge {
            if v >= complex.vertex_count() {
                return Err(SolveError::Infeasible(format!(
                    "pinned vertex {v} out of range"
                )));
            }
        }
        Ok(SolveProblem {
            complex,
            chart,
            initial_f,
            target,
            gauge,
            tolerance: 1e-10,
            max_iterations: 50,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    fn in_domain(&self, f: &[f64]) -> bool {
        self.chart.domain_check(self.complex, f).passes
    }

    /// Residual of the curvature equation at f.
    pub fn residual(&self, f: &[f64]) -> Result<Vec<f64>, SolveError> {
        let metric = self
            .chart
            .apply(self.complex, f)
            .map_err(VariationError::from)?;
        match &self.target {
            SolveTarget::Prescribed2D(k_target) => {
                let k = vertex_curvatures_2d(self.complex, &metric.lengths())
                    .map_err(VariationError::from)?;
                Ok(k.iter().zip(k_target).map(|(a, b)| a - b).collect())
            }
            SolveTarget::ZeroScalar3D => {
                Ok(scalar_curvatures_3d(self.complex, &metric).map_err(VariationError::from)?)
            }
            SolveTarget::ConstantScalar3D => {
                let k =
                    scalar_curvatures_3d(self.complex, &metric).map_err(VariationError::from)?;
                let volumes =
                    vertex_volumes(self.complex, &metric).map_err(VariationError::from)?;
                let total_k: f64 = k.iter().sum();
                let total_v: f64 = volumes.iter().sum();
                let lambda = total_k / total_v;
                Ok(k.iter()
                    .zip(&volumes)
                    .map(|(a, v)| a - lambda * v)
                    .collect())
            }
        }
    }

    fn jacobian(&self, f: &[f64]) -> Result<DMatrix<f64>, SolveError> {
        match &self.target {
            SolveTarget::Prescribed2D(_) => {
                Ok(curvature_jacobian_2d(self.complex, self.chart, f)?.to_dense())
            }
            SolveTarget::ZeroScalar3D => {
                Ok(curvature_jacobian_3d(self.complex, self.chart, f)?.to_dense())
            }
            // The volume term has no analytic vertex-pair derivative in
            // scope; differentiate the full residual numerically.
            SolveTarget::ConstantScalar3D => {
                let rows = fd_jacobian(|x| self.residual(x), f, FdOptions::default())?;
                let n = f.len();
                Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
            }
        }
    }

    fn gauge_vector(&self) -> DVector<f64> {
        let n = self.initial_f.len();
        match self.gauge {
            Gauge::ZeroMean => DVector::from_element(n, 1.0),
            Gauge::PinVertex(v) => {
                let mut c = DVector::zeros(n);
                c[v] = 1.0;
                c
            }
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

fn definiteness_counts(jacobian: &DMatrix<f64>, gauge: &DVector<f64>) -> (usize, usize, usize) {
    let reduced = gauge_reduced(jacobian, gauge);
    let reduced = 0.5 * (&reduced + reduced.transpose());
    let eigenvalues = reduced.symmetric_eigen().eigenvalues;
    let scale = eigenvalues
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1e-300);
    let mut counts = (0usize, 0usize, 0usize);
    for &value in eigenvalues.iter() {
        if value.abs() <= 1e-10 * scale {
            counts.1 += 1;
        } else if value < 0.0 {
            counts.0 += 1;
        } else {
            counts.2 += 1;
        }
    }
    counts
}

/// Project a symmetric matrix onto the orthogonal complement of the
/// gauge vector.
fn gauge_reduced(matrix: &DMatrix<f64>, gauge: &DVector<f64>) -> DMatrix<f64> {
    let n = matrix.nrows();
    let unit = gauge / gauge.norm();
    // Basis of the complement by Gram-Schmidt against `unit`.
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v -= &unit * unit[i];
        for b in &basis {
            let proj = b.dot(&v);
            v -= b * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    let q = DMatrix::from_columns(&basis);
    q.transpose() * matrix * q
}

/// Newton's method on the gauge-bordered system. Converges when the
/// residual infinity norm drops below the problem tolerance.
pub fn newton_solve(problem: &SolveProblem) -> Result<(Vec<f64>, SolveTrace), SolveError> {
    let mut f = problem.initial_f.clone();
    if let Gauge::ZeroMean = problem.gauge {
        let mean = f.iter().sum::<f64>() / f.len() as f64;
        for x in f.iter_mut() {
            *x -= mean;
        }
    }
    if !problem.in_domain(&f) {
        return Err(SolveError::LeftDomain);
    }
    let gauge = problem.gauge_vector();
    let n = f.len();
    let mut records = Vec::new();
    let mut residual = problem.residual(&f)?;

    for iteration in 0..problem.max_iterations {
        let norm = inf_norm(&residual);
        if norm < problem.tolerance {
            records.push(IterationRecord {
                iteration,
                f: f.clone(),
                residual_norm: norm,
                step_size: 0.0,
                hessian_negative: 0,
                hessian_zero: 0,
                hessian_positive: 0,
            });
            return Ok((
                f,
                SolveTrace {
                    records,
                    converged: true,
                },
            ));
        }

        let jacobian = problem.jacobian(&f)?;
        let (neg, zero, pos) = definiteness_counts(&jacobian, &gauge);

        // Bordered KKT system.
        let mut bordered = DMatrix::zeros(n + 1, n + 1);
        bordered.view_mut((0, 0), (n, n)).copy_from(&jacobian);
        for i in 0..n {
            bordered[(i, n)] = gauge[i];
            bordered[(n, i)] = gauge[i];
        }
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            rhs[i] = -residual[i];
        }
        let lu = bordered.lu();
        let solution = lu.solve(&rhs).ok_or(SolveError::SingularHessian)?;
        if !solution.iter().all(|v| v.is_finite()) {
            return Err(SolveError::SingularHessian);
        }
        let delta: Vec<f64> = solution.iter().take(n).copied().collect();

        // Backtracking: domain membership is a hard filter, residual
        // decrease a soft preference.
        let mut step = 1.0f64;
        let mut accepted = None;
        let mut fallback = None;
        for _ in 0..=40 {
            let candidate: Vec<f64> = f.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
            if problem.in_domain(&candidate) {
                if let Ok(r) = problem.residual(&candidate) {
                    if fallback.is_none() {
                        fallback = Some((candidate.clone(), r.clone(), step));
                    }
                    if inf_norm(&r) < norm {
                        accepted = Some((candidate, r, step));
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        let (next_f, next_r, taken) = accepted.or(fallback).ok_or(SolveError::LeftDomain)?;

        records.push(IterationRecord {
            iteration,
            f: f.clone(),
            residual_norm: norm,
            step_size: taken,
            hessian_negative: neg,
            hessian_zero: zero,
            hessian_positive: pos,
        });
        f = next_f;
        residual = next_r;
    }

    let norm = inf_norm(&residual);
    if norm < problem.tolerance {
        records.push(IterationRecord {
            iteration: problem.max_iterations,
            f: f.clone(),
            residual_norm: norm,
            step_size: 0.0,
            hessian_negative: 0,
            hessian_zero: 0,
            hessian_positive: 0,
        });
        return Ok((
            f,
            SolveTrace {
                records,
                converged: true,
            },
        ));
    }
    Err(SolveError::MaxIterations { residual: norm })
}

/// Step policy for the explicit-Euler curvature flow.
#[derive(Debug, Clone, Copy)]
pub struct StepPolicy {
    pub initial_step: f64,
    pub growth: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            initial_step: 0.1,
            growth: 1.1,
            max_step: 0.5,
            max_steps: 5000,
        }
    }
}

/// Explicit Euler on df/dt = -(K - K*), with the step halved until the
/// iterate stays in the chart domain. The residual must decrease over
/// every 20-step window.
pub fn gradient_flow(
    problem: &SolveProblem,
    policy: &StepPolicy,
) -> Result<(Vec<f64>, SolveTrace), SolveError> {
    let mut f = problem.initial_f.clone();
    if let Gauge::ZeroMean = problem.gauge {
        let mean = f.iter().sum::<f64>() / f.len() as f64;
        for x in f.iter_mut() {
            *x -= mean;
        }
    }
    if !problem.in_domain(&f) {
        return Err(SolveError::LeftDomain);
    }
    let mut residual = problem.residual(&f)?;
    let mut norms = vec![inf_norm(&residual)];
    let mut records = vec![IterationRecord {
        iteration: 0,
        f: f.clone(),
        residual_norm: norms[0],
        step_size: 0.0,
        hessian_negative: 0,
        hessian_zero: 0,
        hessian_positive: 0,
    }];
    if norms[0] < problem.tolerance {
        return Ok((
            f,
            SolveTrace {
                records,
                converged: true,
            },
        ));
    }

    let mut step = policy.initial_step;
    for iteration in 1..=policy.max_steps {
        let mut taken = step;
        let mut candidate: Vec<f64>;
        let mut halvings = 0;
        loop {
            candidate = f
                .iter()
                .zip(&residual)
                .map(|(a, r)| a - taken * r)
                .collect();
            if problem.in_domain(&candidate) {
                break;
            }
            taken *= 0.5;
            halvings += 1;
            if halvings > 40 {
                return Err(SolveError::LeftDomain);
            }
        }
        f = candidate;
        residual = problem.residual(&f)?;
        let norm = inf_norm(&residual);
        norms.push(norm);
        records.push(IterationRecord {
            iteration,
            f: f.clone(),
            residual_norm: norm,
            step_size: taken,
            hessian_negative: 0,
            hessian_zero: 0,
            hessian_positive: 0,
        });
        if norm < problem.tolerance {
            return Ok((
                f,
                SolveTrace {
                    records,
                    converged: true,
                },
            ));
        }
        if norms.len() > 20 && norm >= norms[norms.len() - 21] {
            return Err(SolveError::AbortNonMonotone);
        }
        step = (taken * policy.growth).min(policy.max_step);
    }
    Err(SolveError::MaxIterations {
        residual: *norms.last().unwrap(),
    })
}

/// Sufficient conditions for negative semidefiniteness of the Laplacian
/// (and convexity of the 3D functional), plus brute-force spectra.
#[derive(Debug, Clone, Serialize)]
pub struct DefinitenessReport {
    /// l*_ij > 0 on every edge.
    pub all_dual_lengths_positive: bool,
    /// Edges with nonpositive dual length (labels).
    pub failing_edges: Vec<[u64; 2]>,
    /// 2D fixed-inversive chart with eta >= 0 everywhere.
    pub inversive_nonnegative_2d: Option<bool>,
    /// 2D with all directed d positive.
    pub positive_d_2d: Option<bool>,
    /// 2D perpendicular-bisector chart.
    pub perp_bisector_2d: Option<bool>,
    /// 2D with every triangle center inside its circumcircle.
    pub center_in_circumcircle_2d: Option<bool>,
    /// 3D packing chart.
    pub packing_3d: Option<bool>,
    /// 3D convexity: l* - q K_ij / 2 > 0 on edges and K_i >= 0.
    pub convexity_3d: Option<bool>,
    /// Any sufficient definiteness condition holds.
    pub certified: bool,
    pub laplacian_min_eigenvalue: f64,
    pub laplacian_max_eigenvalue: f64,
    pub hessian_reduced_min_eigenvalue: f64,
    pub hessian_reduced_max_eigenvalue: f64,
    /// Laplacian is negative semidefinite with a one-dimensional kernel
    /// spanned by the constants.
    pub nsd_with_constant_kernel: bool,
}

/// Vertex count below which spectra use the dense symmetric
/// eigendecomposition; above it, iterative extreme eigenvalues.
pub const DEFAULT_DENSE_EIGEN_THRESHOLD: usize = 2000;

pub fn definiteness_report(
    complex: &SimplicialComplex,
    chart: &ConformalChart,
    f: &[f64],
    dense_threshold: usize,
) -> Result<DefinitenessReport, SolveError> {
    let metric = chart.apply(complex, f).map_err(VariationError::from)?;
    let star = dual_lengths(complex, &metric).map_err(VariationError::from)?;
    // Strict positivity up to rounding: a dual length that vanishes
    // analytically shows up as noise near 1e-16 of the scale and must
    // not certify anything.
    let star_scale = star.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let positive = |value: f64| value > 1e-12 * star_scale;
    let failing_edges: Vec<[u64; 2]> = (0..complex.edge_count())
        .filter(|&e| !positive(star[e]))
        .map(|e| complex.edge_labels(e))
        .collect();
    let all_dual_positive = failing_edges.is_empty();

    let two_d = complex.dimension() == 2;
    let inversive_nonnegative_2d = two_d.then(|| {
        chart.kind() == ChartKind::FixedInversive && chart.params().iter().all(|&x| x >= 0.0)
    });
    let positive_d_2d = two_d.then(|| metric.raw().iter().all(|d| d[0] > 0.0 && d[1] > 0.0));
    let perp_bisector_2d = two_d.then(|| chart.kind() == ChartKind::PerpBisector);
    let center_in_circumcircle_2d = if two_d {
        Some(centers_in_circumcircles(complex, &metric)?)
    } else {
        None
    };
    let packing_3d = (!two_d).then(|| chart.kind() == ChartKind::Packing);
    let convexity_3d = if two_d {
        None
    } else {
        let lengths = metric.lengths();
        let k_edge = edge_curvatures_3d(complex, &lengths).map_err(VariationError::from)?;
        let k_vertex = scalar_curvatures_3d(complex, &metric).map_err(VariationError::from)?;
        let q = chart.q_all(complex, f).map_err(VariationError::from)?;
        let edges_ok =
            (0..complex.edge_count()).all(|e| positive(star[e] - 0.5 * q[e] * k_edge[e]));
        let vertices_ok = k_vertex.iter().all(|&k| k >= -1e-12 * star_scale);
        Some((edges_ok && vertices_ok) || (chart.kind() == ChartKind::Packing && vertices_ok))
    };

    let certified = all_dual_positive
        || inversive_nonnegative_2d.unwrap_or(false)
        || positive_d_2d.unwrap_or(false)
        || perp_bisector_2d.unwrap_or(false)
        || center_in_circumcircle_2d.unwrap_or(false)
        || packing_3d.unwrap_or(false);

    let lap = laplacian(complex, &metric).map_err(VariationError::from)?;
    let (lap_min, lap_max) = lap.extreme_eigenvalues(dense_threshold);
    let nsd_with_constant_kernel = laplacian_nsd_constant_kernel(&lap);

    let jacobian = if two_d {
        curvature_jacobian_2d(complex, chart, f)?
    } else {
        curvature_jacobian_3d(complex, chart, f)?
    };
    let gauge = DVector::from_element(complex.vertex_count(), 1.0);
    let reduced = gauge_reduced(&jacobian.to_dense(), &gauge);
    let reduced = 0.5 * (&reduced + reduced.transpose());
    let reduced_eigen = reduced.symmetric_eigen().eigenvalues;
    let hess_min = reduced_eigen.iter().cloned().fold(f64::INFINITY, f64::min);
    let hess_max = reduced_eigen
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(DefinitenessReport {
        all_dual_lengths_positive: all_dual_positive,
        failing_edges,
        inversive_nonnegative_2d,
        positive_d_2d,
        perp_bisector_2d,
        center_in_circumcircle_2d,
        packing_3d,
        convexity_3d,
        certified,
        laplacian_min_eigenvalue: lap_min,
        laplacian_max_eigenvalue: lap_max,
        hessian_reduced_min_eigenvalue: hess_min,
        hessian_reduced_max_eigenvalue: hess_max,
        nsd_with_constant_kernel,
    })
}

/// Eigencheck of the NSD-with-constant-kernel property: all eigenvalues
/// below 1e-10 of the spectral scale, a single near-zero eigenvalue, and
/// its eigenvector constant to 1e-8.
pub fn laplacian_nsd_constant_kernel(lap: &SparseOperator) -> bool {
    let (values, vectors) = lap.eigen();
    let scale = values
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1e-300);
    if values.iter().any(|&v| v > 1e-10 * scale) {
        return false;
    }
    let kernel: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].abs() <= 1e-10 * scale)
        .collect();
    if kernel.len() != 1 {
        return false;
    }
    let vector = &vectors[kernel[0]];
    let mean = vector.iter().sum::<f64>() / vector.len() as f64;
    vector.iter().all(|&x| (x - mean).abs() <= 1e-8)
}

/// Condition (center inside circumcircle) checked per triangle in the
/// frame of one edge: both the metric center and the circumcenter lie on
/// known perpendiculars, so their distance needs no global embedding.
fn centers_in_circumcircles(
    complex: &SimplicialComplex,
    metric: &crate::metric::PreMetric,
) -> Result<bool, SolveError> {
    for t in 0..complex.triangle_count() {
        let tm = crate::metric::triangle_metric(complex, metric, t);
        let [l01, l02, l12] = tm.lengths();
        // Sanity: the triangle must embed.
        embed_triangle(l01, l02, l12).map_err(VariationError::from)?;
        let h_center = tm.height(0, 1)?;
        let circum = crate::metric::TriangleMetric {
            d: [[0.5 * l01; 2], [0.5 * l02; 2], [0.5 * l12; 2]],
        };
        let h_circum = circum.height(0, 1)?;
        let dx = tm.d(0, 1) - 0.5 * l01;
        let dy = h_center - h_circum;
        let radius_sq = 0.25 * l01 * l01 + h_circum * h_circum;
        if dx * dx + dy * dy > radius_sq * (1.0 + 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nullspace analysis of the curvature Jacobian at a critical metric.
#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    pub residual_norm: f64,
    pub nullspace_dimension: usize,
    /// Distance of each kernel basis vector from the constants (after
    /// normalization).
    pub kernel_constant_residuals: Vec<f64>,
    /// Rigid iff the nullspace is exactly the scaling direction.
    pub rigid: bool,
}

/// Check rigidity at a claimed solution: the metric must satisfy the
/// curvature equation to 1e-8, and the Jacobian nullspace is compared
/// with the span of the constants.
pub fn rigidity_check(problem: &SolveProblem, f: &[f64]) -> Result<RigidityReport, SolveError> {
    let residual = problem.residual(f)?;
    let norm = inf_norm(&residual);
    if norm >= 1e-8 {
        return Err(SolveError::NotCritical(norm));
    }
    let jacobian = if problem.complex.dimension() == 2 {
        curvature_jacobian_2d(problem.complex, problem.chart, f)?
    } else {
        curvature_jacobian_3d(problem.complex, problem.chart, f)?
    };
    let (values, vectors) = jacobian.eigen();
    let scale = values
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()))
        .max(1e-300);
    let kernel: Vec<usize> = (0..values.len())
        .filter(|&i| values[i].abs() <= 1e-8 * scale)
        .collect();
    let mut residuals = Vec::new();
    let mut rigid = true;
    for &i in &kernel {
        let vector = &vectors[i];
        let mean = vector.iter().sum::<f64>() / vector.len() as f64;
        let deviation = vector
            .iter()
            .map(|&x| (x - mean) * (x - mean))
            .sum::<f64>()
            .sqrt();
        residuals.push(deviation);
        if deviation > 1e-8 {
            rigid = false;
        }
    }
    if kernel.len() != 1 {
        rigid = false;
    }
    Ok(RigidityReport {
        residual_norm: norm,
        nullspace_dimension: kernel.len(),
        kernel_constant_residuals: residuals,
        rigid,
    })
}
