//! The three conformal structures: circle/sphere packing, fixed
//! inversive distance, and perpendicular bisector.
//!
//! Run with: cargo run --example conformal_charts

use pwflat::conformal::ConformalChart;
use pwflat::fixtures;
use pwflat::metric::check_metric;

fn main() {
    let sphere = fixtures::sphere_tetrahedron();
    let f = vec![0.5f64.ln(); sphere.vertex_count()];

    let charts = [
        ("packing", ConformalChart::packing()),
        (
            "fixed inversive (eta = 0.8)",
            ConformalChart::fixed_inversive(&sphere, vec![0.8; sphere.edge_count()]).unwrap(),
        ),
        (
            "perpendicular bisector (L = 1)",
            ConformalChart::perp_bisector(&sphere, vec![1.0; sphere.edge_count()]).unwrap(),
        ),
    ];
    for (name, chart) in &charts {
        let metric = chart.apply(&sphere, &f).unwrap();
        let report = check_metric(&sphere, &metric);
        println!(
            "{name}: l_01 = {:.6}, d_01 = {:.6}, q_01 = {:.6}, metric condition residual {:.1e}",
            metric.length(0),
            metric.d_end(0, 0),
            chart.q(&sphere, &f, 0).unwrap(),
            report.max_residual,
        );
    }

    // Domain checks are pointwise: a packing metric always exists in 2D,
    // while a perpendicular-bisector chart can leave its domain.
    let wild = vec![3.0, -2.0, 0.4, 1.7];
    println!(
        "packing domain at wild f: passes = {}",
        ConformalChart::packing()
            .domain_check(&sphere, &wild)
            .passes
    );
    let pb = ConformalChart::perp_bisector(&sphere, vec![1.0; sphere.edge_count()]).unwrap();
    let mut bad = vec![0.0; 4];
    bad[0] = 10.0;
    bad[1] = 10.0;
    let report = pb.domain_check(&sphere, &bad);
    println!(
        "perp bisector at f = (10, 10, 0, 0): passes = {}",
        report.passes
    );
    for failure in &report.simplex_failures {
        println!("  {:?}: {}", failure.simplex, failure.reason);
    }

    // Tangency (eta = 1) reproduces the packing metric exactly.
    let unequal = vec![-0.9, -0.4, -0.7, -0.6];
    let packing = ConformalChart::packing().apply(&sphere, &unequal).unwrap();
    let tangent = ConformalChart::fixed_inversive(&sphere, vec![1.0; sphere.edge_count()])
        .unwrap()
        .apply(&sphere, &unequal)
        .unwrap();
    let gap = (0..sphere.edge_count())
        .map(|e| (packing.length(e) - tangent.length(e)).abs())
        .fold(0.0f64, f64::max);
    println!("packing vs tangent inversive: max length gap = {gap:.1e}");
}
