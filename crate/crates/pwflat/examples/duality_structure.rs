//! The duality structure of a metrized complex: signed heights, dual
//! areas, dual lengths, and the vertex/edge volumes they induce.
//!
//! Run with: cargo run --example duality_structure

use pwflat::fixtures;
use pwflat::metric::{
    dual_area, dual_length, edge_volume, height_2d, height_3d, vertex_volume, PreMetric,
};

fn main() {
    // Equilateral sphere, d = 1/2 on every directed edge.
    let sphere = fixtures::sphere_tetrahedron();
    let d = PreMetric::constant(&sphere, 0.5);
    let edge = sphere.edges_of_triangle(0)[0];
    println!(
        "equilateral sphere: h = {:.7}, dual length = {:.7}, edge volume = {:.7}",
        height_2d(&sphere, &d, 0, edge).unwrap(),
        dual_length(&sphere, &d, edge).unwrap(),
        edge_volume(&sphere, &d, edge).unwrap(),
    );

    // The same quantities one dimension up.
    let s3 = fixtures::sphere_4simplex();
    let d3 = PreMetric::constant(&s3, 0.5);
    let tet = 0;
    let face = s3.triangles_of_tetrahedron(tet)[0];
    let edge3 = s3.edges_of_tetrahedron(tet)[0];
    println!(
        "boundary of 4-simplex: h(face) = {:.7}, dual area = {:.7}, dual length = {:.7}",
        height_3d(&s3, &d3, tet, face).unwrap(),
        dual_area(&s3, &d3, tet, edge3).unwrap(),
        dual_length(&s3, &d3, edge3).unwrap(),
    );
    let volumes: Vec<f64> = (0..s3.vertex_count())
        .map(|v| vertex_volume(&s3, &d3, v).unwrap())
        .collect();
    let total = pwflat::curvature::total_volume(&s3, &d3.lengths()).unwrap();
    println!(
        "vertex volumes sum to {:.7} = 3 x total volume {:.7}",
        volumes.iter().sum::<f64>(),
        total
    );

    // Dual lengths are signed: a non-Delaunay edge has a negative one.
    let (stretched, lengths) = fixtures::stretched_sphere(1.9);
    let half = PreMetric::from_lengths_halved(&lengths);
    let long_edge = stretched
        .edge_id([
            stretched.vertex_index(1).unwrap(),
            stretched.vertex_index(2).unwrap(),
        ])
        .unwrap();
    println!(
        "stretched sphere: dual length of the long edge = {:.4}",
        dual_length(&stretched, &half, long_edge).unwrap()
    );
}
