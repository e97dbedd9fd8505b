//! The discrete Laplacian: weights, spectrum, the weak-form identity,
//! and the definiteness certificates.
//!
//! Run with: cargo run --example laplacian_spectrum

use pwflat::conformal::ConformalChart;
use pwflat::fixtures;
use pwflat::metric::{edge_volume, PreMetric};
use pwflat::solver::{definiteness_report, DEFAULT_DENSE_EIGEN_THRESHOLD};
use pwflat::variation::laplacian;

fn main() {
    // Equilateral sphere: a complete graph with weight 1/sqrt(3);
    // eigenvalues {0, -4/sqrt(3) x 3}.
    let sphere = fixtures::sphere_tetrahedron();
    let d = PreMetric::constant(&sphere, 0.5);
    let lap = laplacian(&sphere, &d).unwrap();
    println!(
        "equilateral sphere Laplacian spectrum: {:?}",
        lap.eigenvalues()
    );

    // Weak form: <L phi, psi> = -(n/2) sum (dphi/l)(dpsi/l) V_ij.
    let phi = vec![0.3, -0.1, 0.7, -0.9];
    let psi = vec![-0.2, 0.5, 0.1, -0.4];
    let lhs: f64 = lap.apply(&phi).iter().zip(&psi).map(|(a, b)| a * b).sum();
    let mut rhs = 0.0;
    for e in 0..sphere.edge_count() {
        let [u, v] = sphere.edge(e);
        let l = d.length(e);
        rhs += 2.0
            * ((phi[u] - phi[v]) / l)
            * ((psi[u] - psi[v]) / l)
            * edge_volume(&sphere, &d, e).unwrap();
    }
    rhs *= -1.0; // n = 2
    println!("weak form: <L phi, psi> = {lhs:.12} vs {rhs:.12}");

    // Definiteness certificates: a non-Delaunay edge is flagged but the
    // perpendicular-bisector (finite-element) certificate still applies.
    let (stretched, lengths) = fixtures::stretched_sphere(1.9);
    let chart = ConformalChart::perp_bisector(&stretched, lengths).unwrap();
    let report = definiteness_report(
        &stretched,
        &chart,
        &vec![0.0; stretched.vertex_count()],
        DEFAULT_DENSE_EIGEN_THRESHOLD,
    )
    .unwrap();
    println!(
        "stretched sphere: dual lengths positive = {}, flagged edges = {:?}",
        report.all_dual_lengths_positive, report.failing_edges
    );
    println!(
        "  certified NSD = {}, kernel is constants = {}, spectrum in [{:.4}, {:.4}]",
        report.certified,
        report.nsd_with_constant_kernel,
        report.laplacian_min_eigenvalue,
        report.laplacian_max_eigenvalue
    );
}
