//! Build closed 2- and 3-manifold complexes, query incidence, and run
//! the report-style metric validation.
//!
//! Run with: cargo run --example build_and_validate

use pwflat::metric::{check_metric, PreMetric};
use pwflat::{SimplexId, SimplicialComplex};

fn main() {
    // Boundary of the tetrahedron: the smallest closed surface.
    let sphere = SimplicialComplex::build(
        2,
        &[vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]],
    )
    .unwrap();
    println!(
        "sphere: {} vertices, {} edges, {} triangles, chi = {}",
        sphere.vertex_count(),
        sphere.edge_count(),
        sphere.triangle_count(),
        sphere.euler_characteristic()
    );

    // Boundary of the 4-simplex: the smallest closed 3-manifold.
    let s3 = pwflat::fixtures::sphere_4simplex();
    let edge = s3.edge_id([0, 1]).unwrap();
    println!(
        "boundary of 4-simplex: edge {:?} lies in {} tetrahedra",
        s3.edge_labels(edge),
        s3.star(SimplexId::Edge(edge)).unwrap().len()
    );

    // Non-manifold input is rejected with a named face.
    let open_disk = SimplicialComplex::build(2, &[vec![1, 2, 3], vec![1, 2, 4]]);
    println!("open disk: {}", open_disk.unwrap_err());

    // Metric validation is report-style: a deliberately broken d shows
    // every violated triangle at once.
    let mut d = PreMetric::constant(&sphere, 0.5).raw().to_vec();
    d[0] = [0.9, 0.1];
    let report = check_metric(&sphere, &PreMetric::new(d));
    println!(
        "broken metric: passes = {}, max residual = {:.3}",
        report.passes, report.max_residual
    );
    for entry in report
        .triangle_residuals
        .iter()
        .filter(|r| !r.within_tolerance)
    {
        println!(
            "  triangle {:?} violates the metric condition by {:.3}",
            entry.triangle, entry.residual
        );
    }
}
