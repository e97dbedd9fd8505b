//! Command implementations behind the `pwflat` binary.
//!
//! Each command returns its stdout payload plus a process exit code:
//! 0 success, 1 usage, 2 validation failure (including parse errors),
//! 3 non-convergence. Reports are JSON; tabular output is CSV with
//! stable headers and 17-significant-digit numbers.

use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::complex::SimplicialComplex;
use crate::conformal::ConformalChart;
use crate::curvature::{curvature_report, CurvatureReport};
use crate::meshfile::{MeshFile, MeshFileError, RealizedData};
use crate::metric::{check_metric, PreMetric};
use crate::solver::{
    definiteness_report, gradient_flow, newton_solve, rigidity_check, Gauge, SolveError,
    SolveProblem, SolveTarget, SolveTrace, StepPolicy, DEFAULT_DENSE_EIGEN_THRESHOLD,
};
use crate::variation::{
    ehr_hessian, fd_directional_second, fd_gradient, functional_f, jacobian_fd_max_error,
    laplacian, FdOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

/// Output payload and process exit code of one command.
pub struct CmdOutcome {
    pub exit_code: i32,
    pub stdout: String,
}

fn ok(stdout: String) -> CmdOutcome {
    CmdOutcome {
        exit_code: EXIT_OK,
        stdout,
    }
}

fn fail(exit_code: i32, message: impl Serialize) -> CmdOutcome {
    CmdOutcome {
        exit_code,
        stdout: serde_json::to_string_pretty(&json!({ "error": message })).unwrap(),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn load(path: &Path) -> Result<MeshFile, CmdOutcome> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        fail(
            EXIT_VALIDATION,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    MeshFile::parse(&text).map_err(|e| fail(EXIT_VALIDATION, e.to_string()))
}

fn realize(file: &MeshFile) -> Result<(SimplicialComplex, RealizedData), CmdOutcome> {
    file.realize()
        .map_err(|e| fail(EXIT_VALIDATION, e.to_string()))
}

/// The metric induced by the file's data (chart applied to f, or raw d).
fn induced_metric(
    complex: &SimplicialComplex,
    data: &RealizedData,
) -> Result<PreMetric, CmdOutcome> {
    match data {
        RealizedData::Chart { chart, f } => chart
            .apply(complex, f)
            .map_err(|e| fail(EXIT_VALIDATION, e.to_string())),
        RealizedData::Metric(m) => Ok(m.clone()),
    }
}

/// `check`: manifold, metric, and chart-domain reports as one JSON
/// object; exit 0 iff everything passes.
pub fn cmd_check(path: &Path) -> CmdOutcome {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let (complex, data) = match file.realize() {
        Ok(pair) => pair,
        Err(e @ MeshFileError::Complex(_)) => {
            return CmdOutcome {
                exit_code: EXIT_VALIDATION,
                stdout: serde_json::to_string_pretty(&json!({
                    "manifold": { "passes": false, "error": e.to_string() }
                }))
                .unwrap(),
            }
        }
        Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
    };

    let manifold = json!({
        "passes": true,
        "dimension": complex.dimension(),
        "vertices": complex.vertex_count(),
        "edges": complex.edge_count(),
        "triangles": complex.triangle_count(),
        "tetrahedra": complex.tetrahedron_count(),
        "euler_characteristic": complex.euler_characteristic(),
    });

    let (domain, metric_report) = match &data {
        RealizedData::Chart { chart, f } => {
            let domain = chart.domain_check(&complex, f);
            let metric = chart
                .apply(&complex, f)
                .ok()
                .map(|m| check_metric(&complex, &m));
            (Some(domain), metric)
        }
        RealizedData::Metric(m) => (None, Some(check_metric(&complex, m))),
    };

    let domain_passes = domain.as_ref().map(|d| d.passes).unwrap_or(true);
    let metric_passes = metric_report.as_ref().map(|m| m.passes).unwrap_or(false);
    let all = domain_passes && metric_passes;
    let body = json!({
        "manifold": manifold,
        "domain": domain,
        "metric": metric_report,
        "passes": all,
    });
    CmdOutcome {
        exit_code: if all { EXIT_OK } else { EXIT_VALIDATION },
        stdout: serde_json::to_string_pretty(&body).unwrap(),
    }
}

fn curvature_csv(report: &CurvatureReport) -> String {
    let mut out = String::from("record,a,b,value\n");
    let mut row = |record: &str, a: String, b: String, value: f64| {
        out.push_str(&format!("{record},{a},{b},{}\n", num(value)));
    };
    for &(v, k) in &report.vertex_curvatures {
        row("vertex_curvature", v.to_string(), String::new(), k);
    }
    if let Some(edges) = &report.edge_curvatures {
        for &([a, b], k) in edges {
            row("edge_curvature", a.to_string(), b.to_string(), k);
        }
    }
    if let Some(value) = report.ehr {
        row("ehr", String::new(), String::new(), value);
    }
    row(
        "total_volume",
        String::new(),
        String::new(),
        report.total_volume,
    );
    if let Some(value) = report.lambda {
        row("lambda", String::new(), String::new(), value);
    }
    if let Some(residuals) = &report.einstein_residuals {
        for &([a, b], r) in residuals {
            row("einstein_residual", a.to_string(), b.to_string(), r);
        }
    }
    if let Some(residuals) = &report.csc_residuals {
        for &(v, r) in residuals {
            row("csc_residual", v.to_string(), String::new(), r);
        }
    }
    out
}

/// `curvature`: the full curvature report as JSON or CSV.
pub fn cmd_curvature(path: &Path, format: &str) -> CmdOutcome {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let (complex, data) = match realize(&file) {
        Ok(pair) => pair,
        Err(out) => return out,
    };
    let metric = match induced_metric(&complex, &data) {
        Ok(m) => m,
        Err(out) => return out,
    };
    let report = match curvature_report(&complex, &metric) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
    };
    match format {
        "json" => ok(serde_json::to_string_pretty(&report).unwrap()),
        "csv" => ok(curvature_csv(&report)),
        other => fail(EXIT_USAGE, format!("unknown format '{other}'")),
    }
}

#[derive(Debug, Serialize)]
struct FdCheck {
    name: String,
    max_error: f64,
    tolerance: f64,
    passes: bool,
}

/// `jacobian-test`: every analytic formula against the finite-difference
/// oracle on random perturbations of the file's vertex function.
pub fn cmd_jacobian_test(path: &Path, trials: usize, seed: u64) -> CmdOutcome {
    use rand::{Rng, SeedableRng};
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let (complex, data) = match realize(&file) {
        Ok(pair) => pair,
        Err(out) => return out,
    };
    let RealizedData::Chart { chart, f } = data else {
        return fail(
            EXIT_VALIDATION,
            "jacobian-test requires a chart block (raw metrics carry no conformal structure)",
        );
    };
    if trials == 0 {
        return ok(serde_json::to_string_pretty(&json!({
            "warning": "0 trials requested: vacuous pass",
            "checks": [],
            "passes": true,
        }))
        .unwrap());
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut attempts = 0;
    while samples.len() < trials && attempts < 200 * trials {
        attempts += 1;
        let candidate: Vec<f64> = f
            .iter()
            .map(|x| x + rng.random_range(-0.05..0.05))
            .collect();
        if chart.domain_check(&complex, &candidate).passes {
            samples.push(candidate);
        }
    }
    if samples.is_empty() {
        return fail(
            EXIT_VALIDATION,
            "no in-domain perturbations of f found; the base point may be near the domain boundary",
        );
    }

    let mut checks: Vec<FdCheck> = Vec::new();
    let push = |name: &str, max_error: f64, tolerance: f64, checks: &mut Vec<FdCheck>| {
        checks.push(FdCheck {
            name: name.to_string(),
            max_error,
            tolerance,
            passes: max_error < tolerance,
        });
    };

    // Curvature Jacobian vs finite differences.
    let mut worst = 0.0f64;
    for sample in &samples {
        match jacobian_fd_max_error(&complex, &chart, sample) {
            Ok(err) => worst = worst.max(err),
            Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
        }
    }
    push("curvature_jacobian_vs_fd", worst, 1e-6, &mut checks);

    // Chart axioms: dl_ij/df_i = d_ij and dd_ij/df_k = 0 for far k.
    let mut axiom_err = 0.0f64;
    let mut far_err = 0.0f64;
    for sample in samples.iter().take(5) {
        let metric = match chart.apply(&complex, sample) {
            Ok(m) => m,
            Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
        };
        for e in 0..complex.edge_count() {
            let [u, v] = complex.edge(e);
            let grad = fd_gradient(
                |x| {
                    chart
                        .apply(&complex, x)
                        .map(|m| m.length(e))
                        .map_err(|err| SolveError::Variation(err.into()))
                },
                sample,
                FdOptions::default(),
            );
            let grad = match grad {
                Ok(g) => g,
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            let l = metric.length(e);
            axiom_err = axiom_err.max((grad[u] - metric.d_end(e, 0)).abs() / l);
            axiom_err = axiom_err.max((grad[v] - metric.d_end(e, 1)).abs() / l);
            for w in 0..complex.vertex_count() {
                if w != u && w != v {
                    far_err = far_err.max(grad[w].abs());
                }
            }
        }
    }
    push("chart_length_axiom", axiom_err, 1e-7, &mut checks);
    push("chart_locality_axiom", far_err, 1e-9, &mut checks);

    // q closed form vs finite difference of d_ij in f_j.
    let mut q_err = 0.0f64;
    for sample in samples.iter().take(5) {
        for e in 0..complex.edge_count() {
            let [u, v] = complex.edge(e);
            let q = match chart.q(&complex, sample, e) {
                Ok(q) => q,
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            let grad = fd_gradient(
                |x| {
                    chart
                        .apply(&complex, x)
                        .map(|m| m.d_end(e, 0))
                        .map_err(|err| SolveError::Variation(err.into()))
                },
                sample,
                FdOptions::default(),
            );
            let grad = match grad {
                Ok(g) => g,
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            let _ = u;
            q_err = q_err.max((grad[v] - q).abs() / (q.abs() + 1e-9));
        }
    }
    push("q_closed_form_vs_fd", q_err, 1e-7, &mut checks);

    if complex.dimension() == 3 {
        // First variations of the total curvature and the total volume:
        // the gradients in f are K_i and V_i.
        let mut grad_err = 0.0f64;
        let mut volume_err = 0.0f64;
        for sample in samples.iter().take(5) {
            let metric = match chart.apply(&complex, sample) {
                Ok(m) => m,
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            let k = match crate::curvature::scalar_curvatures_3d(&complex, &metric) {
                Ok(k) => k,
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            let volumes = match crate::metric::vertex_volumes(&complex, &metric) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            let ehr_grad = fd_gradient(
                |x| {
                    let m = chart
                        .apply(&complex, x)
                        .map_err(|err| SolveError::Variation(err.into()))?;
                    crate::curvature::ehr(&complex, &m.lengths())
                        .map_err(|err| SolveError::Variation(err.into()))
                },
                sample,
                FdOptions::default(),
            );
            let volume_grad = fd_gradient(
                |x| {
                    let m = chart
                        .apply(&complex, x)
                        .map_err(|err| SolveError::Variation(err.into()))?;
                    crate::curvature::total_volume(&complex, &m.lengths())
                        .map_err(|err| SolveError::Variation(err.into()))
                },
                sample,
                FdOptions::default(),
            );
            let (ehr_grad, volume_grad) = match (ehr_grad, volume_grad) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            for v in 0..complex.vertex_count() {
                grad_err = grad_err.max((ehr_grad[v] - k[v]).abs() / (k[v].abs() + 1e-9));
                volume_err =
                    volume_err.max((volume_grad[v] - volumes[v]).abs() / (volumes[v].abs() + 1e-9));
            }
        }
        push(
            "ehr_gradient_is_scalar_curvature",
            grad_err,
            1e-7,
            &mut checks,
        );
        push(
            "volume_gradient_is_vertex_volume",
            volume_err,
            1e-7,
            &mut checks,
        );
    }

    if complex.dimension() == 3 {
        // Hessian of the curvature functional vs second differences.
        let mut hess_err = 0.0f64;
        for sample in samples.iter().take(5) {
            let form = match ehr_hessian(&complex, &chart, sample) {
                Ok(h) => h,
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            };
            for _ in 0..5 {
                let direction: Vec<f64> = (0..complex.vertex_count())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let analytic =
                    form.evaluate(&complex, &direction, &vec![0.0; complex.vertex_count()]);
                let fd = fd_directional_second(
                    |x| {
                        let m = chart
                            .apply(&complex, x)
                            .map_err(|err| SolveError::Variation(err.into()))?;
                        crate::curvature::ehr(&complex, &m.lengths())
                            .map_err(|err| SolveError::Variation(err.into()))
                    },
                    sample,
                    &direction,
                    1e-4,
                );
                match fd {
                    Ok(fd) => hess_err = hess_err.max((analytic - fd).abs() / fd.abs().max(1e-9)),
                    Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
                }
            }
        }
        push("ehr_hessian_vs_fd", hess_err, 1e-5, &mut checks);
    } else {
        // Path independence of the curvature potential.
        let mut f_err = 0.0f64;
        for sample in samples.iter().take(3) {
            let waypoint: Vec<f64> = f
                .iter()
                .zip(sample)
                .map(|(a, b)| 0.5 * (a + b) + 0.01)
                .collect();
            if !chart.domain_check(&complex, &waypoint).passes {
                continue;
            }
            let straight = functional_f(&complex, &chart, &[f.clone(), sample.clone()]);
            let dogleg = functional_f(&complex, &chart, &[f.clone(), waypoint, sample.clone()]);
            match (straight, dogleg) {
                (Ok(a), Ok(b)) => f_err = f_err.max((a - b).abs()),
                (Err(e), _) | (_, Err(e)) => return fail(EXIT_VALIDATION, e.to_string()),
            }
        }
        push(
            "curvature_potential_path_independence",
            f_err,
            1e-9,
            &mut checks,
        );
    }

    let passes = checks.iter().all(|c| c.passes);
    let body = json!({
        "trials": samples.len(),
        "seed": seed,
        "checks": checks,
        "passes": passes,
    });
    CmdOutcome {
        exit_code: if passes { EXIT_OK } else { EXIT_VALIDATION },
        stdout: serde_json::to_string_pretty(&body).unwrap(),
    }
}

fn trace_csv(trace: &SolveTrace) -> String {
    let mut out = String::from(
        "iteration,residual_norm,step_size,hessian_negative,hessian_zero,hessian_positive\n",
    );
    for r in &trace.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.iteration,
            num(r.residual_norm),
            num(r.step_size),
            r.hessian_negative,
            r.hessian_zero,
            r.hessian_positive
        ));
    }
    out
}

/// `solve`: prescribed-curvature solve; writes the solved mesh and a
/// trace CSV next to `out`.
#[allow(clippy::too_many_arguments)]
pub fn cmd_solve(
    path: &Path,
    target: &str,
    target_file: Option<&Path>,
    method: &str,
    gauge: &str,
    max_iterations: Option<usize>,
    out: &Path,
) -> CmdOutcome {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let (complex, data) = match realize(&file) {
        Ok(pair) => pair,
        Err(out) => return out,
    };
    let RealizedData::Chart { chart, f } = data else {
        return fail(EXIT_VALIDATION, "solve requires a chart block");
    };

    let solve_target = match (target, complex.dimension()) {
        ("flat", 2) => SolveTarget::Prescribed2D(vec![0.0; complex.vertex_count()]),
        ("flat", 3) => SolveTarget::ZeroScalar3D,
        ("csc", 2) => {
            let total = 2.0 * std::f64::consts::PI * complex.euler_characteristic() as f64;
            SolveTarget::Prescribed2D(vec![
                total / complex.vertex_count() as f64;
                complex.vertex_count()
            ])
        }
        ("csc", 3) => SolveTarget::ConstantScalar3D,
        ("file", 2) => {
            let Some(tf) = target_file else {
                return fail(EXIT_USAGE, "--target file requires --target-file <path>");
            };
            match read_target_file(tf, &complex) {
                Ok(k) => SolveTarget::Prescribed2D(k),
                Err(out) => return out,
            }
        }
        ("file", _) => {
            return fail(
                EXIT_VALIDATION,
                "per-vertex target files apply to 2D meshes",
            )
        }
        (other, _) => return fail(EXIT_USAGE, format!("unknown target '{other}'")),
    };

    let gauge = match parse_gauge(gauge, &complex) {
        Ok(g) => g,
        Err(out) => return out,
    };
    let problem = match SolveProblem::new(&complex, &chart, f, solve_target, gauge) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
    };
    let problem = match max_iterations {
        Some(n) => problem.with_max_iterations(n),
        None => problem,
    };

    let outcome = match method {
        "newton" => newton_solve(&problem),
        "flow" => {
            let mut policy = StepPolicy::default();
            if let Some(n) = max_iterations {
                policy.max_steps = n;
            }
            gradient_flow(&problem, &policy)
        }
        other => return fail(EXIT_USAGE, format!("unknown method '{other}'")),
    };

    match outcome {
        Ok((solution, trace)) => {
            let solved = file.with_f(&complex, &solution);
            if let Err(e) = std::fs::write(out, solved.serialize()) {
                return fail(
                    EXIT_VALIDATION,
                    format!("cannot write {}: {e}", out.display()),
                );
            }
            let trace_path = out.with_extension("trace.csv");
            if let Err(e) = std::fs::write(&trace_path, trace_csv(&trace)) {
                return fail(
                    EXIT_VALIDATION,
                    format!("cannot write {}: {e}", trace_path.display()),
                );
            }
            let rigidity = rigidity_check(&problem, &solution).ok();
            ok(serde_json::to_string_pretty(&json!({
                "converged": true,
                "iterations": trace.records.len() - 1,
                "final_residual": trace.records.last().map(|r| r.residual_norm),
                "solution": out.display().to_string(),
                "trace": trace_path.display().to_string(),
                "rigidity": rigidity,
            }))
            .unwrap())
        }
        Err(
            e @ (SolveError::MaxIterations { .. }
            | SolveError::LeftDomain
            | SolveError::AbortNonMonotone),
        ) => CmdOutcome {
            exit_code: EXIT_NO_CONVERGENCE,
            stdout: serde_json::to_string_pretty(&json!({
                "converged": false,
                "error": e.to_string(),
            }))
            .unwrap(),
        },
        Err(e) => fail(EXIT_VALIDATION, e.to_string()),
    }
}

fn parse_gauge(text: &str, complex: &SimplicialComplex) -> Result<Gauge, CmdOutcome> {
    if text == "zero-mean" {
        Ok(Gauge::ZeroMean)
    } else if let Some(label) = text.strip_prefix("pin:") {
        let label: u64 = label
            .parse()
            .map_err(|_| fail(EXIT_USAGE, format!("bad gauge '{text}'")))?;
        let v = complex.vertex_index(label).ok_or_else(|| {
            fail(
                EXIT_VALIDATION,
                format!("gauge pins unknown vertex {label}"),
            )
        })?;
        Ok(Gauge::PinVertex(v))
    } else {
        Err(fail(
            EXIT_USAGE,
            format!("unknown gauge '{text}' (use zero-mean or pin:<vertex>)"),
        ))
    }
}

fn read_target_file(path: &Path, complex: &SimplicialComplex) -> Result<Vec<f64>, CmdOutcome> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        fail(
            EXIT_VALIDATION,
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    let mut target = vec![f64::NAN; complex.vertex_count()];
    for (index, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 3 || tokens[0] != "K" {
            return Err(fail(
                EXIT_VALIDATION,
                format!(
                    "target file line {}: expected 'K <vertex> <value>'",
                    index + 1
                ),
            ));
        }
        let label: u64 = tokens[1].parse().map_err(|_| {
            fail(
                EXIT_VALIDATION,
                format!("target file line {}: bad vertex", index + 1),
            )
        })?;
        let value: f64 = tokens[2].parse().map_err(|_| {
            fail(
                EXIT_VALIDATION,
                format!("target file line {}: bad value", index + 1),
            )
        })?;
        let v = complex.vertex_index(label).ok_or_else(|| {
            fail(
                EXIT_VALIDATION,
                format!("target file names unknown vertex {label}"),
            )
        })?;
        target[v] = value;
    }
    if target.iter().any(|x| x.is_nan()) {
        return Err(fail(EXIT_VALIDATION, "target file misses some vertices"));
    }
    Ok(target)
}

/// `spectrum`: Laplacian eigenvalues plus the definiteness report.
pub fn cmd_spectrum(path: &Path, format: &str) -> CmdOutcome {
    let file = match load(path) {
        Ok(f) => f,
        Err(out) => return out,
    };
    let (complex, data) = match realize(&file) {
        Ok(pair) => pair,
        Err(out) => return out,
    };
    let metric = match induced_metric(&complex, &data) {
        Ok(m) => m,
        Err(out) => return out,
    };
    let lap = match laplacian(&complex, &metric) {
        Ok(l) => l,
        Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
    };
    let eigenvalues = lap.eigenvalues();
    let constant_residual = {
        let ones = vec![1.0; complex.vertex_count()];
        lap.apply(&ones).iter().map(|x| x * x).sum::<f64>().sqrt()
    };
    let definiteness = match &data {
        RealizedData::Chart { chart, f } => {
            match definiteness_report(&complex, chart, f, DEFAULT_DENSE_EIGEN_THRESHOLD) {
                Ok(r) => Some(r),
                Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
            }
        }
        RealizedData::Metric(_) => None,
    };
    match format {
        "json" => ok(serde_json::to_string_pretty(&json!({
            "eigenvalues": eigenvalues,
            "laplacian_constant_residual": constant_residual,
            "nsd_with_constant_kernel": crate::solver::laplacian_nsd_constant_kernel(&lap),
            "definiteness": definiteness,
        }))
        .unwrap()),
        "csv" => {
            let mut out = String::from("index,eigenvalue\n");
            for (i, v) in eigenvalues.iter().enumerate() {
                out.push_str(&format!("{i},{}\n", num(*v)));
            }
            ok(out)
        }
        other => fail(EXIT_USAGE, format!("unknown format '{other}'")),
    }
}

/// Minimal OFF importer for 2D fixtures: triangular faces only; edge
/// lengths are taken from the embedded coordinates and stored as a
/// perpendicular-bisector chart with f = 0.
pub fn off_to_mesh(text: &str) -> Result<MeshFile, String> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>());
    let header = tokens.next().ok_or("empty OFF file")?;
    if header != "OFF" {
        return Err(format!("expected OFF header, got '{header}'"));
    }
    let mut next_usize = |what: &str| -> Result<usize, String> {
        tokens
            .next()
            .ok_or(format!("missing {what}"))?
            .parse()
            .map_err(|_| format!("bad {what}"))
    };
    let nv = next_usize("vertex count")?;
    let nf = next_usize("face count")?;
    let _edges = next_usize("edge count")?;
    let mut coords = Vec::with_capacity(nv);
    for i in 0..nv {
        let mut point = [0.0f64; 3];
        for c in point.iter_mut() {
            *c = tokens
                .next()
                .ok_or(format!("missing coordinate for vertex {i}"))?
                .parse()
                .map_err(|_| format!("bad coordinate for vertex {i}"))?;
        }
        coords.push(point);
    }
    let mut faces: Vec<Vec<u64>> = Vec::with_capacity(nf);
    for i in 0..nf {
        let arity = tokens
            .next()
            .ok_or(format!("missing face {i}"))?
            .parse::<usize>()
            .map_err(|_| format!("bad arity for face {i}"))?;
        if arity != 3 {
            return Err(format!(
                "face {i} has {arity} vertices; only triangles import"
            ));
        }
        let mut face = Vec::with_capacity(3);
        for _ in 0..3 {
            let v: usize = tokens
                .next()
                .ok_or(format!("truncated face {i}"))?
                .parse()
                .map_err(|_| format!("bad vertex in face {i}"))?;
            if v >= nv {
                return Err(format!("face {i} references vertex {v} out of range"));
            }
            face.push(v as u64);
        }
        faces.push(face);
    }
    let complex = SimplicialComplex::build(2, &faces).map_err(|e| e.to_string())?;
    let lengths: Vec<f64> = (0..complex.edge_count())
        .map(|e| {
            let [a, b] = complex.edge_labels(e);
            let (p, q) = (coords[a as usize], coords[b as usize]);
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
        })
        .collect();
    let chart = ConformalChart::perp_bisector(&complex, lengths).map_err(|e| e.to_string())?;
    Ok(MeshFile::from_chart(
        &complex,
        &chart,
        &vec![0.0; complex.vertex_count()],
    ))
}

/// `import-off`: convert a triangular OFF file to the mesh format.
pub fn cmd_import_off(path: &Path, out: &Path) -> CmdOutcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                EXIT_VALIDATION,
                format!("cannot read {}: {e}", path.display()),
            )
        }
    };
    match off_to_mesh(&text) {
        Ok(mesh) => {
            if let Err(e) = std::fs::write(out, mesh.serialize()) {
                return fail(
                    EXIT_VALIDATION,
                    format!("cannot write {}: {e}", out.display()),
                );
            }
            ok(serde_json::to_string_pretty(&json!({
                "written": out.display().to_string(),
                "vertices": mesh.vertices.len(),
                "triangles": mesh.top_simplices.len(),
            }))
            .unwrap())
        }
        Err(e) => fail(EXIT_VALIDATION, e),
    }
}

/// Write the bundled example meshes (used by docs and tests).
pub fn example_mesh(name: &str) -> Option<String> {
    use crate::fixtures;
    let file = match name {
        "sphere" => {
            let c = fixtures::sphere_tetrahedron();
            MeshFile::from_chart(
                &c,
                &ConformalChart::packing(),
                &vec![0.5f64.ln(); c.vertex_count()],
            )
        }
        "icosahedron" => {
            let c = fixtures::icosahedron();
            MeshFile::from_chart(
                &c,
                &ConformalChart::packing(),
                &vec![0.5f64.ln(); c.vertex_count()],
            )
        }
        "torus" => {
            let (c, lengths) = fixtures::flat_torus_2d(3);
            let chart = ConformalChart::perp_bisector(&c, lengths).unwrap();
            MeshFile::from_chart(&c, &chart, &vec![0.0; c.vertex_count()])
        }
        "genus2" => {
            let c = fixtures::genus2_surface();
            MeshFile::from_chart(
                &c,
                &ConformalChart::packing(),
                &vec![0.5f64.ln(); c.vertex_count()],
            )
        }
        "s3" => {
            let c = fixtures::sphere_4simplex();
            MeshFile::from_chart(
                &c,
                &ConformalChart::packing(),
                &vec![0.5f64.ln(); c.vertex_count()],
            )
        }
        "torus3d" => {
            let (c, lengths) = fixtures::flat_torus_3d(3);
            let chart = ConformalChart::perp_bisector(&c, lengths).unwrap();
            MeshFile::from_chart(&c, &chart, &vec![0.0; c.vertex_count()])
        }
        "s3-metric" => {
            let c = fixtures::sphere_4simplex();
            MeshFile::from_metric(&c, &PreMetric::constant(&c, 0.5))
        }
        _ => return None,
    };
    Some(file.serialize())
}

/// `example`: print one of the bundled meshes.
pub fn cmd_example(name: &str) -> CmdOutcome {
    match example_mesh(name) {
        Some(text) => ok(text),
        None => fail(
            EXIT_USAGE,
            "unknown example (try sphere, icosahedron, torus, genus2, s3, torus3d, s3-metric)",
        ),
    }
}
