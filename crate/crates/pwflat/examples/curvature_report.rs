//! Curvatures and the scalar functionals: angle defects, edge and
//! scalar curvature, the total-curvature functional, and the Einstein /
//! constant-scalar-curvature residuals.
//!
//! Run with: cargo run --example curvature_report

use std::f64::consts::PI;

use pwflat::conformal::ConformalChart;
use pwflat::curvature::{curvature_report, ehr, lambda, total_volume, vertex_curvatures_2d};
use pwflat::fixtures;
use pwflat::metric::PreMetric;

fn main() {
    // Gauss-Bonnet across topologies.
    for (name, complex, lengths) in [
        ("sphere", fixtures::sphere_tetrahedron(), None),
        ("icosahedron", fixtures::icosahedron(), None),
        {
            let (torus, lengths) = fixtures::flat_torus_2d(3);
            ("flat torus", torus, Some(lengths))
        },
        ("genus-2", fixtures::genus2_surface(), None),
    ] {
        let lengths = lengths.unwrap_or_else(|| vec![1.0; complex.edge_count()]);
        let k = vertex_curvatures_2d(&complex, &lengths).unwrap();
        println!(
            "{name}: chi = {}, sum K = {:.6} (= 2 pi chi = {:.6})",
            complex.euler_characteristic(),
            k.iter().sum::<f64>(),
            2.0 * PI * complex.euler_characteristic() as f64
        );
    }

    // The 3D functional and its identities on the unit 3-sphere boundary.
    let s3 = fixtures::sphere_4simplex();
    let lengths = vec![1.0; s3.edge_count()];
    println!(
        "boundary of 4-simplex: EHR = {:.7}, volume = {:.7}, lambda = {:.6}",
        ehr(&s3, &lengths).unwrap(),
        total_volume(&s3, &lengths).unwrap(),
        lambda(&s3, &lengths).unwrap()
    );

    // Residual vectors vanish on the symmetric metric, not on a skewed one.
    let symmetric = curvature_report(&s3, &PreMetric::constant(&s3, 0.5)).unwrap();
    let max_einstein = symmetric
        .einstein_residuals
        .as_ref()
        .unwrap()
        .iter()
        .map(|(_, r)| r.abs())
        .fold(0.0f64, f64::max);
    println!("symmetric metric: max Einstein residual = {max_einstein:.1e}");

    let skewed_f = vec![-0.75, -0.62, -0.71, -0.68, -0.66];
    let skewed = ConformalChart::packing().apply(&s3, &skewed_f).unwrap();
    let report = curvature_report(&s3, &skewed).unwrap();
    let max_einstein = report
        .einstein_residuals
        .as_ref()
        .unwrap()
        .iter()
        .map(|(_, r)| r.abs())
        .fold(0.0f64, f64::max);
    println!(
        "skewed packing: EHR = {:.6}, lambda = {:.6}, max Einstein residual = {:.4}",
        report.ehr.unwrap(),
        report.lambda.unwrap(),
        max_einstein
    );
}
