//! Shared helpers for the integration suites: random chart instances and
//! coordinate-based center oracles. Everything here is independent of the
//! signed-height formulas it is used to check.
#![allow(dead_code)]

use pwflat::conformal::{tetra_from_chart, triangle_from_chart, ChartKind};
use pwflat::geometry::{embed_tetrahedron, embed_triangle};
use pwflat::metric::{TetraMetric, TriangleMetric};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const ALL_CHARTS: [ChartKind; 3] = [
    ChartKind::Packing,
    ChartKind::FixedInversive,
    ChartKind::PerpBisector,
];

/// Random well-conditioned metric triangle from a random chart.
pub fn random_triangle(rng: &mut ChaCha8Rng) -> (ChartKind, [f64; 3], [f64; 3], TriangleMetric) {
    loop {
        let kind = ALL_CHARTS[rng.random_range(0..3)];
        let f: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.4..0.4));
        let params: [f64; 3] = match kind {
            ChartKind::Packing => [0.0; 3],
            ChartKind::FixedInversive => std::array::from_fn(|_| rng.random_range(0.0..1.4)),
            ChartKind::PerpBisector => std::array::from_fn(|_| rng.random_range(0.6..1.5)),
        };
        if let Some(tm) = triangle_from_chart(kind, &f, &params) {
            if (0..3).all(|v| tm.angle(v).map(|g| g > 0.12).unwrap_or(false)) {
                return (kind, f, params, tm);
            }
        }
    }
}

/// Random well-conditioned metric tetrahedron from a random chart.
pub fn random_tetra(rng: &mut ChaCha8Rng) -> (ChartKind, [f64; 4], [f64; 6], TetraMetric) {
    loop {
        let kind = ALL_CHARTS[rng.random_range(0..3)];
        let f: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.25..0.25));
        let params: [f64; 6] = match kind {
            ChartKind::Packing => [0.0; 6],
            ChartKind::FixedInversive => std::array::from_fn(|_| rng.random_range(0.4..1.2)),
            ChartKind::PerpBisector => std::array::from_fn(|_| rng.random_range(0.8..1.3)),
        };
        if let Some(tm) = tetra_from_chart(kind, &f, &params) {
            let lengths = tm.lengths();
            let mean = lengths.0.iter().sum::<f64>() / 6.0;
            if let Ok(volume) = lengths.volume() {
                if volume > 0.02 * mean.powi(3) {
                    return (kind, f, params, tm);
                }
            }
        }
    }
}

/// Random valid tetrahedron lengths (no chart structure).
pub fn random_tet_lengths(rng: &mut ChaCha8Rng) -> pwflat::TetLengths {
    loop {
        let lengths = pwflat::TetLengths(std::array::from_fn(|_| rng.random_range(0.7..1.4)));
        let mean = lengths.0.iter().sum::<f64>() / 6.0;
        if let Ok(volume) = lengths.volume() {
            if volume > 0.02 * mean.powi(3) {
                return lengths;
            }
        }
    }
}

/// Coordinates of the metric center of an embedded triangle: the unique
/// point whose projections split the edges by the d values.
pub fn triangle_center(tm: &TriangleMetric) -> ([[f64; 2]; 3], [f64; 2]) {
    let [l01, l02, l12] = tm.lengths();
    let v = embed_triangle(l01, l02, l12).expect("oracle embedding");
    // (c - v0) . (v1 - v0)/l01 = d01 and (c - v0) . (v2 - v0)/l02 = d02.
    let rows = [
        [(v[1][0] - v[0][0]) / l01, (v[1][1] - v[0][1]) / l01],
        [(v[2][0] - v[0][0]) / l02, (v[2][1] - v[0][1]) / l02],
    ];
    let rhs = [tm.d(0, 1), tm.d(0, 2)];
    let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
    let c = [
        (rhs[0] * rows[1][1] - rows[0][1] * rhs[1]) / det,
        (rows[0][0] * rhs[1] - rhs[0] * rows[1][0]) / det,
    ];
    (v, [c[0] + v[0][0], c[1] + v[0][1]])
}

/// Signed distance from the triangle center to edge (i, j), positive on
/// the side of the third vertex.
pub fn triangle_height_oracle(tm: &TriangleMetric, i: usize, j: usize) -> f64 {
    let (v, c) = triangle_center(tm);
    let k = 3 - i - j;
    let edge = [v[j][0] - v[i][0], v[j][1] - v[i][1]];
    let mut normal = [-edge[1], edge[0]];
    let norm = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
    normal = [normal[0] / norm, normal[1] / norm];
    let toward_k = (v[k][0] - v[i][0]) * normal[0] + (v[k][1] - v[i][1]) * normal[1];
    let sign = if toward_k >= 0.0 { 1.0 } else { -1.0 };
    sign * ((c[0] - v[i][0]) * normal[0] + (c[1] - v[i][1]) * normal[1])
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Coordinates of the metric center of an embedded tetrahedron.
pub fn tetra_center(tm: &TetraMetric) -> ([[f64; 3]; 4], [f64; 3]) {
    let v = embed_tetrahedron(&tm.lengths()).expect("oracle embedding");
    // Solve the 3x3 system (c - v0) . (vj - v0)/l0j = d0j.
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for j in 1..4 {
        let l = tm.length(0, j);
        let row = sub3(v[j], v[0]);
        m[j - 1] = [row[0] / l, row[1] / l, row[2] / l];
        rhs[j - 1] = tm.d(0, j);
    }
    let det = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d0 = det(&m);
    let mut c = [0.0f64; 3];
    for col in 0..3 {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        c[col] = det(&mc) / d0;
    }
    (v, [c[0] + v[0][0], c[1] + v[0][1], c[2] + v[0][2]])
}

/// Signed distance from the tetrahedron center to the plane of face
/// {i, j, k}, positive on the side of the fourth vertex.
pub fn tetra_face_height_oracle(tm: &TetraMetric, face: [usize; 3]) -> f64 {
    let (v, c) = tetra_center(tm);
    let [i, j, k] = face;
    let l = 6 - i - j - k;
    let mut normal = cross3(sub3(v[j], v[i]), sub3(v[k], v[i]));
    let norm = dot3(normal, normal).sqrt();
    normal = [normal[0] / norm, normal[1] / norm, normal[2] / norm];
    let sign = if dot3(normal, sub3(v[l], v[i])) >= 0.0 {
        1.0
    } else {
        -1.0
    };
    sign * dot3(normal, sub3(c, v[i]))
}
