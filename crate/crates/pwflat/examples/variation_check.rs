//! The analytic variation formulas next to their finite-difference
//! counterparts: angle gradients, the single-dihedral formula, the
//! d-weighted row identities, and the curvature Jacobians.
//!
//! Run with: cargo run --example variation_check

use pwflat::conformal::ConformalChart;
use pwflat::fixtures;
use pwflat::metric::{TetraMetric, TriangleMetric};
use pwflat::variation::{
    angle_gradient_2d, dihedral_gradient_3d, dihedral_row_rhs, jacobian_fd_max_error,
};

fn main() {
    // Equilateral triangle, d = 1/2: the off-diagonal angle gradient is
    // h/l = 1/(2 sqrt 3).
    let triangle = TriangleMetric { d: [[0.5; 2]; 3] };
    println!(
        "equilateral triangle: d gamma_0 / d f_2 = {:.7}, d gamma_2 / d f_2 = {:.7}",
        angle_gradient_2d(&triangle, 0, 2).unwrap(),
        angle_gradient_2d(&triangle, 2, 2).unwrap()
    );

    // Regular tetrahedron: the dihedral response and one row identity.
    let tet = TetraMetric { d: [[0.5; 2]; 6] };
    println!(
        "regular tetrahedron: d beta_01 / d f_3 = {:.7} (1/sqrt 18 = {:.7})",
        dihedral_gradient_3d(&tet, (0, 1), 3).unwrap(),
        1.0 / 18.0f64.sqrt()
    );
    println!(
        "row identity rhs (vertex 0, wrt 3): {:.7} = 2A/l = {:.7}",
        dihedral_row_rhs(&tet, 0, 3).unwrap(),
        2.0 / (12.0 * 2.0f64.sqrt())
    );

    // Curvature Jacobians against the finite-difference oracle on every
    // chart kind.
    let sphere = fixtures::sphere_tetrahedron();
    let f2 = vec![-0.71, -0.66, -0.74, -0.69];
    for (name, chart) in [
        ("packing", ConformalChart::packing()),
        (
            "fixed inversive",
            ConformalChart::fixed_inversive(&sphere, vec![0.7; sphere.edge_count()]).unwrap(),
        ),
        (
            "perp bisector",
            ConformalChart::perp_bisector(&sphere, vec![1.0; sphere.edge_count()]).unwrap(),
        ),
    ] {
        let err = jacobian_fd_max_error(&sphere, &chart, &f2).unwrap();
        println!("2D Jacobian vs FD under {name}: max error {err:.2e}");
    }

    let s3 = fixtures::sphere_4simplex();
    let f3 = vec![-0.70, -0.67, -0.73, -0.68, -0.71];
    for (name, chart) in [
        ("packing", ConformalChart::packing()),
        (
            "perp bisector",
            ConformalChart::perp_bisector(&s3, vec![1.0; s3.edge_count()]).unwrap(),
        ),
    ] {
        let err = jacobian_fd_max_error(&s3, &chart, &f3).unwrap();
        println!("3D Jacobian vs FD under {name}: max error {err:.2e}");
    }
}
