//! The 2D curvature potential F with dF/df_i = K_i, evaluated as a
//! path-independent line integral of the curvature one-form.
//!
//! Run with: cargo run --example curvature_potential

use std::f64::consts::PI;

use pwflat::conformal::ConformalChart;
use pwflat::fixtures;
use pwflat::variation::{functional_f, functional_f_straight};

fn main() {
    let sphere = fixtures::sphere_tetrahedron();
    let chart = ConformalChart::packing();
    let f0 = vec![0.5f64.ln(); 4];

    // Along the constant direction the integrand is the total curvature,
    // so the potential grows by 2 pi chi per unit shift.
    let shift = 0.25;
    let f1: Vec<f64> = f0.iter().map(|x| x + shift).collect();
    println!(
        "constant shift {shift}: F = {:.10} (4 pi x shift = {:.10})",
        functional_f_straight(&sphere, &chart, &f0, &f1).unwrap(),
        4.0 * PI * shift
    );

    // Two different polylines between the same endpoints agree.
    let f_end = vec![-0.55, -0.8, -0.62, -0.71];
    let waypoint_a = vec![-0.5, -0.62, -0.8, -0.66];
    let waypoint_b = vec![-0.75, -0.61, -0.58, -0.7];
    let via_a = functional_f(&sphere, &chart, &[f0.clone(), waypoint_a, f_end.clone()]).unwrap();
    let via_b = functional_f(&sphere, &chart, &[f0.clone(), waypoint_b, f_end.clone()]).unwrap();
    println!(
        "two polylines: {via_a:.12} vs {via_b:.12} (gap {:.1e})",
        (via_a - via_b).abs()
    );

    // The gradient of F is the curvature vector.
    let h = 1e-6;
    let mut grad = vec![0.0; 4];
    for v in 0..4 {
        let mut plus = f_end.clone();
        let mut minus = f_end.clone();
        plus[v] += h;
        minus[v] -= h;
        grad[v] = (functional_f_straight(&sphere, &chart, &f0, &plus).unwrap()
            - functional_f_straight(&sphere, &chart, &f0, &minus).unwrap())
            / (2.0 * h);
    }
    let metric = chart.apply(&sphere, &f_end).unwrap();
    let k = pwflat::curvature::vertex_curvatures_2d(&sphere, &metric.lengths()).unwrap();
    println!("dF/df = {grad:.6?}");
    println!("K     = {k:.6?}");
}
