//! Model complexes: spheres, flat tori, and a genus-2 surface.
//!
//! Generators that come with a natural metric also return per-edge
//! lengths indexed by edge id.

use crate::complex::SimplicialComplex;

/// Boundary of the tetrahedron: the smallest closed surface, a 4-vertex
/// sphere on labels 1..=4.
pub fn sphere_tetrahedron() -> SimplicialComplex {
    SimplicialComplex::build(
        2,
        &[vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]],
    )
    .expect("static fixture")
}

/// Boundary of the 4-simplex: the smallest closed 3-manifold
/// triangulation, a 5-vertex 3-sphere on labels 1..=5.
pub fn sphere_4simplex() -> SimplicialComplex {
    let tops: Vec<Vec<u64>> = (1..=5u64)
        .map(|omit| (1..=5u64).filter(|&v| v != omit).collect())
        .collect();
    SimplicialComplex::build(3, &tops).expect("static fixture")
}

/// Icosahedron boundary: 12 vertices of degree 5.
pub fn icosahedron() -> SimplicialComplex {
    let faces: [[u64; 3]; 20] = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 6, 2],
        [2, 6, 7],
        [2, 7, 3],
        [3, 7, 8],
        [3, 8, 4],
        [4, 8, 9],
        [4, 9, 5],
        [5, 9, 10],
        [5, 10, 1],
        [1, 10, 6],
        [6, 11, 7],
        [7, 11, 8],
        [8, 11, 9],
        [9, 11, 10],
        [10, 11, 6],
    ];
    SimplicialComplex::build(2, &faces.map(|f| f.to_vec())).expect("static fixture")
}

/// Suspension of the boundary of the tetrahedron: an 8-tetrahedron
/// 3-sphere in which the 6 base edges lie in 4 tetrahedra and the 8
/// polar edges in 3. All tetrahedra are regular under unit lengths.
pub fn suspension_sphere_3d() -> SimplicialComplex {
    let base: [[u64; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let mut tops = Vec::new();
    for f in base {
        for pole in [4u64, 5] {
            tops.push(vec![f[0], f[1], f[2], pole]);
        }
    }
    SimplicialComplex::build(3, &tops).expect("static fixture")
}

/// Flat torus from the n x n unit-square grid with each square split
/// along the (+1, +1) diagonal. Lengths: 1 on axis edges, sqrt(2) on
/// diagonals; every vertex is flat. Requires n >= 3.
pub fn flat_torus_2d(n: usize) -> (SimplicialComplex, Vec<f64>) {
    assert!(n >= 3, "need n >= 3 for a simplicial torus");
    let v = |x: usize, y: usize| ((x % n) * n + (y % n)) as u64;
    let mut tops = Vec::new();
    for x in 0..n {
        for y in 0..n {
            tops.push(vec![v(x, y), v(x + 1, y), v(x + 1, y + 1)]);
            tops.push(vec![v(x, y), v(x, y + 1), v(x + 1, y + 1)]);
        }
    }
    let complex = SimplicialComplex::build(2, &tops).expect("torus fixture");
    let lengths = grid_lengths(&complex, n, 2);
    (complex, lengths)
}

/// Flat 3-torus from the n x n x n cubic grid, each cube split into six
/// tetrahedra along the (+1,+1,+1) diagonal (Kuhn subdivision). Lengths
/// 1 / sqrt(2) / sqrt(3) by edge class; every edge is flat. n >= 3.
pub fn flat_torus_3d(n: usize) -> (SimplicialComplex, Vec<f64>) {
    assert!(n >= 3, "need n >= 3 for a simplicial 3-torus");
    let v = |x: usize, y: usize, z: usize| (((x % n) * n + (y % n)) * n + (z % n)) as u64;
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut tops = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for p in perms {
                    let mut corner = [x, y, z];
                    let mut tet = vec![v(corner[0], corner[1], corner[2])];
                    for &axis in &p {
                        corner[axis] += 1;
                        tet.push(v(corner[0], corner[1], corner[2]));
                    }
                    tops.push(tet);
                }
            }
        }
    }
    let complex = SimplicialComplex::build(3, &tops).expect("3-torus fixture");
    let lengths = grid_lengths(&complex, n, 3);
    (complex, lengths)
}

fn grid_lengths(complex: &SimplicialComplex, n: usize, dim: usize) -> Vec<f64> {
    let coords = |label: u64| -> Vec<usize> {
        let mut l = label as usize;
        let mut out = vec![0; dim];
        for k in (0..dim).rev() {
            out[k] = l % n;
            l /= n;
        }
        out
    };
    (0..complex.edge_count())
        .map(|e| {
            let [a, b] = complex.edge_labels(e);
            let (ca, cb) = (coords(a), coords(b));
            let sq: usize = (0..dim)
                .map(|k| {
                    let d = ca[k].abs_diff(cb[k]);
                    let d = d.min(n - d);
                    d * d
                })
                .sum();
            (sq as f64).sqrt()
        })
        .collect()
}

/// Genus-2 surface: two 3x3 flat tori with one triangle removed from
/// each, glued along the boundary. Unit lengths give a valid metric in
/// which curvature concentrates at the three glued vertices.
pub fn genus2_surface() -> SimplicialComplex {
    let n = 3usize;
    let v = |x: usize, y: usize| ((x % n) * n + (y % n)) as u64;
    let mut removed = [v(0, 0), v(1, 0), v(1, 1)];
    removed.sort_unstable();
    let mut tops: Vec<Vec<u64>> = Vec::new();
    for offset in [0u64, 100] {
        for x in 0..n {
            for y in 0..n {
                for tri in [
                    [v(x, y), v(x + 1, y), v(x + 1, y + 1)],
                    [v(x, y), v(x, y + 1), v(x + 1, y + 1)],
                ] {
                    let mut s = tri;
                    s.sort_unstable();
                    if s == removed {
                        continue;
                    }
                    // Identify the removed triangle's vertices across the
                    // two copies; offset everything else.
                    tops.push(
                        tri.iter()
                            .map(|&w| if removed.contains(&w) { w } else { w + offset })
                            .collect(),
                    );
                }
            }
        }
    }
    SimplicialComplex::build(2, &tops).expect("genus-2 fixture")
}

/// Boundary-of-tetrahedron combinatorics with edge {1,2} stretched to
/// `l12` and all other lengths 1. For l12 near 2 the stretched edge is
/// non-Delaunay under the perpendicular-bisector splitting.
pub fn stretched_sphere(l12: f64) -> (SimplicialComplex, Vec<f64>) {
    let complex = sphere_tetrahedron();
    let v1 = complex.vertex_index(1).unwrap();
    let v2 = complex.vertex_index(2).unwrap();
    let e12 = complex.edge_id([v1, v2]).unwrap();
    let mut lengths = vec![1.0; complex.edge_count()];
    lengths[e12] = l12;
    (complex, lengths)
}
