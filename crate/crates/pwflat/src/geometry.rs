//! Euclidean simplex computations from edge lengths: Cayley-Menger
//! volumes, face angles, dihedral angles, solid angles, and a canonical
//! embedding used as an independent oracle in tests.
//!
//! All functions are pure and work on one simplex at a time. Degeneracy
//! is detected on the Cayley-Menger determinant with the unit-free
//! threshold `VOLUME_EPS * (mean length)^(2k)`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate simplex: {0}")]
    Degenerate(String),
}

/// Relative degeneracy threshold on the Cayley-Menger determinant.
pub const VOLUME_EPS: f64 = 1e-12;
/// acos arguments are clamped to [-1, 1] only within this distance of the
/// bound; larger excursions are reported as degeneracies.
pub const ACOS_CLAMP: f64 = 1e-9;

fn guarded_acos(x: f64, what: &str) -> Result<f64, GeometryError> {
    if x.abs() <= 1.0 {
        Ok(x.acos())
    } else if x.abs() <= 1.0 + ACOS_CLAMP {
        Ok(x.clamp(-1.0, 1.0).acos())
    } else {
        Err(GeometryError::Degenerate(format!(
            "cosine of {what} out of range: {x}"
        )))
    }
}

/// Signed Cayley-Menger quantity `(-1)^(k+1) det(CM)`, which equals
/// `2^k (k!)^2 vol^2` for a realizable simplex. Lengths are given in
/// lexicographic pair order: k=2 -> (l01,l02,l12),
/// k=3 -> (l01,l02,l03,l12,l13,l23).
fn cayley_menger(lengths: &[f64], k: usize) -> f64 {
    match k {
        1 => 2.0 * lengths[0] * lengths[0],
        2 => {
            let (a2, b2, c2) = (
                lengths[0] * lengths[0],
                lengths[1] * lengths[1],
                lengths[2] * lengths[2],
            );
            2.0 * a2 * b2 + 2.0 * b2 * c2 + 2.0 * c2 * a2 - a2 * a2 - b2 * b2 - c2 * c2
        }
        3 => {
            // det of the 5x5 bordered matrix via elimination on a fixed array.
            let mut m = [[0.0f64; 5]; 5];
            for i in 1..5 {
                m[0][i] = 1.0;
                m[i][0] = 1.0;
            }
            let idx = |i: usize, j: usize| -> f64 {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                let pos = match (a, b) {
                    (0, 1) => 0,
                    (0, 2) => 1,
                    (0, 3) => 2,
                    (1, 2) => 3,
                    (1, 3) => 4,
                    (2, 3) => 5,
                    _ => unreachable!(),
                };
                lengths[pos] * lengths[pos]
            };
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        m[i + 1][j + 1] = idx(i, j);
                    }
                }
            }
            det5(&mut m)
        }
        _ => f64::NAN,
    }
}

fn det5(m: &mut [[f64; 5]; 5]) -> f64 {
    let mut det = 1.0;
    for col in 0..5 {
        let mut pivot = col;
        for row in (col + 1)..5 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in (col + 1)..5 {
            let factor = m[row][col] / m[col][col];
            for c in col..5 {
                m[row][c] -= factor * m[col][c];
            }
        }
    }
    det
}

/// k-simplex volume from edge lengths via the Cayley-Menger determinant:
/// length for k=1, area for k=2 (denominator 16), volume for k=3
/// (denominator 288).
pub fn cm_volume(lengths: &[f64], k: usize) -> Result<f64, GeometryError> {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    let expected = k * (k + 1) / 2;
    assert_eq!(lengths.len(), expected, "need {expected} lengths for k={k}");
    if lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(GeometryError::Degenerate(
            "nonpositive edge length".to_string(),
        ));
    }
    let mean: f64 = lengths.iter().sum::<f64>() / lengths.len() as f64;
    let cm = cayley_menger(lengths, k);
    if cm <= VOLUME_EPS * mean.powi(2 * k as i32) {
        return Err(GeometryError::Degenerate(format!(
            "Cayley-Menger determinant {cm:e} below threshold for k={k}"
        )));
    }
    let denominator = match k {
        1 => 2.0,
        2 => 16.0,
        _ => 288.0,
    };
    Ok((cm / denominator).sqrt())
}

/// Interior angle between the edges of lengths `a` and `b`, opposite the
/// edge of length `c`: gamma = arccos((a^2+b^2-c^2)/(2ab)).
pub fn face_angle(a: f64, b: f64, c: f64) -> Result<f64, GeometryError> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(GeometryError::Degenerate(
            "nonpositive edge length".to_string(),
        ));
    }
    if a + b <= c || a + c <= b || b + c <= a {
        return Err(GeometryError::Degenerate(format!(
            "triangle inequality fails for ({a}, {b}, {c})"
        )));
    }
    guarded_acos((a * a + b * b - c * c) / (2.0 * a * b), "face angle")
}

/// Edge lengths of a tetrahedron on local vertices 0..4, stored in pair
/// order (01, 02, 03, 12, 13, 23).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetLengths(pub [f64; 6]);

pub(crate) fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("invalid tetrahedron vertex pair ({i}, {j})"),
    }
}

impl TetLengths {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[pair_index(i, j)]
    }

    pub fn volume(&self) -> Result<f64, GeometryError> {
        cm_volume(&self.0, 3)
    }

    /// Face angle at vertex `i` in the face {i, j, k}.
    pub fn face_angle_at(&self, i: usize, j: usize, k: usize) -> Result<f64, GeometryError> {
        face_angle(self.get(i, j), self.get(i, k), self.get(j, k))
    }

    fn other_two(i: usize, j: usize) -> (usize, usize) {
        let mut rest = (0..4).filter(|&v| v != i && v != j);
        (rest.next().unwrap(), rest.next().unwrap())
    }
}

fn dihedral_from_end(
    l: &TetLengths,
    i: usize,
    j: usize,
    k: usize,
    m: usize,
) -> Result<f64, GeometryError> {
    // Spherical cosine law on the vertex figure at i.
    let g_jk = l.face_angle_at(i, j, k)?;
    let g_jm = l.face_angle_at(i, j, m)?;
    let g_km = l.face_angle_at(i, k, m)?;
    let cos_beta = (g_km.cos() - g_jk.cos() * g_jm.cos()) / (g_jk.sin() * g_jm.sin());
    guarded_acos(cos_beta, "dihedral angle")
}

/// Dihedral angle at edge {i, j}, computed from both end vertices and
/// averaged; a disagreement beyond 1e-9 is reported as degenerate.
pub fn dihedral_angle(l: &TetLengths, i: usize, j: usize) -> Result<f64, GeometryError> {
    let (k, m) = TetLengths::other_two(i, j);
    let from_i = dihedral_from_end(l, i, j, k, m)?;
    let from_j = dihedral_from_end(l, j, i, k, m)?;
    if (from_i - from_j).abs() > 1e-9 {
        return Err(GeometryError::Degenerate(format!(
            "dihedral angle at edge ({i},{j}) inconsistent between ends: {from_i} vs {from_j}"
        )));
    }
    Ok(0.5 * (from_i + from_j))
}

/// Solid angle at vertex `i`: the three dihedral angles at the edges
/// through `i`, minus pi.
pub fn solid_angle(l: &TetLengths, i: usize) -> Result<f64, GeometryError> {
    let mut sum = 0.0;
    for j in 0..4 {
        if j != i {
            sum += dihedral_angle(l, i, j)?;
        }
    }
    Ok(sum - std::f64::consts::PI)
}

/// Derivative of the tetrahedron volume with respect to the length of
/// edge {i, j}: (1/6) l_ij l_km cot(beta at the opposite edge {k, m}).
pub fn volume_length_gradient(l: &TetLengths, i: usize, j: usize) -> Result<f64, GeometryError> {
    let (k, m) = TetLengths::other_two(i, j);
    let beta_opp = dihedral_angle(l, k, m)?;
    Ok(l.get(i, j) * l.get(k, m) / (6.0 * beta_opp.tan()))
}

/// Plane embedding of a triangle with lengths (l01, l02, l12): vertex 0
/// at the origin, vertex 1 on the positive x-axis, vertex 2 in the upper
/// half-plane.
pub fn embed_triangle(l01: f64, l02: f64, l12: f64) -> Result<[[f64; 2]; 3], GeometryError> {
    cm_volume(&[l01, l02, l12], 2)?;
    let x2 = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01);
    let y2sq = l02 * l02 - x2 * x2;
    if y2sq <= 0.0 {
        return Err(GeometryError::Degenerate(
            "triangle embedding has no height".to_string(),
        ));
    }
    Ok([[0.0, 0.0], [l01, 0.0], [x2, y2sq.sqrt()]])
}

/// Space embedding of a tetrahedron: vertex 0 at the origin, vertex 1 on
/// the positive x-axis, vertex 2 in the upper half of the xy-plane,
/// vertex 3 above it.
pub fn embed_tetrahedron(l: &TetLengths) -> Result<[[f64; 3]; 4], GeometryError> {
    let volume = l.volume()?;
    let tri = embed_triangle(l.get(0, 1), l.get(0, 2), l.get(1, 2))?;
    let (x2, y2) = (tri[2][0], tri[2][1]);
    let l01 = l.get(0, 1);
    let (l03, l13, l23) = (l.get(0, 3), l.get(1, 3), l.get(2, 3));
    let x3 = (l01 * l01 + l03 * l03 - l13 * l13) / (2.0 * l01);
    let y3 = (l03 * l03 + l.get(0, 2) * l.get(0, 2) - l23 * l23 - 2.0 * x2 * x3) / (2.0 * y2);
    let z3sq = l03 * l03 - x3 * x3 - y3 * y3;
    let z3 = if z3sq > 0.0 {
        z3sq.sqrt()
    } else {
        // Near-degenerate: recover the height from the robust CM volume.
        let base_area = cm_volume(&[l01, l.get(0, 2), l.get(1, 2)], 2)?;
        3.0 * volume / base_area
    };
    Ok([
        [0.0, 0.0, 0.0],
        [l01, 0.0, 0.0],
        [x2, y2, 0.0],
        [x3, y3, z3],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn regular_tet() -> TetLengths {
        TetLengths([1.0; 6])
    }

    #[test]
    fn equilateral_area() {
        let a = cm_volume(&[1.0, 1.0, 1.0], 2).unwrap();
        assert_relative_eq!(a, 3.0f64.sqrt() / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn regular_tetrahedron_volume() {
        let v = cm_volume(&[1.0; 6], 3).unwrap();
        assert_relative_eq!(v, 1.0 / (6.0 * 2.0f64.sqrt()), max_relative = 1e-13);
    }

    #[test]
    fn collinear_triangle_degenerate() {
        assert!(cm_volume(&[1.0, 1.0, 2.0], 2).is_err());
    }

    #[test]
    fn face_angle_basics() {
        assert_relative_eq!(
            face_angle(1.0, 1.0, 1.0).unwrap(),
            PI / 3.0,
            epsilon = 1e-15
        );
        // Right angle between the legs of the (3,4,5) triangle.
        assert_relative_eq!(
            face_angle(3.0, 4.0, 5.0).unwrap(),
            PI / 2.0,
            epsilon = 1e-15
        );
        assert!(face_angle(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn angle_sum_is_pi() {
        let (a, b, c) = (1.3, 0.9, 1.7);
        let sum = face_angle(a, b, c).unwrap()
            + face_angle(b, c, a).unwrap()
            + face_angle(c, a, b).unwrap();
        assert!((sum - PI).abs() < 4.0 * f64::EPSILON * PI);
    }

    #[test]
    fn near_degenerate_angle_matches_embedding() {
        // (1, 1, 1.999) is valid but nearly collinear; measure the angle
        // from the planar embedding as an independent oracle.
        let (a, b, c) = (1.0, 1.0, 1.999);
        let v = embed_triangle(a, b, c).unwrap();
        let u = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
        let w = [v[2][0] - v[0][0], v[2][1] - v[0][1]];
        let dot = u[0] * w[0] + u[1] * w[1];
        let measured = (dot / (a * b)).acos();
        let gamma = face_angle(a, b, c).unwrap();
        assert_relative_eq!(gamma, measured, epsilon = 1e-10);
        assert!(gamma > 3.0 && gamma < PI);
    }

    #[test]
    fn regular_dihedral_angle() {
        let beta = dihedral_angle(&regular_tet(), 0, 1).unwrap();
        assert_relative_eq!(beta, (1.0f64 / 3.0).acos(), epsilon = 1e-14);
    }

    #[test]
    fn dihedral_matches_embedding_on_random_tetrahedra() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut tested = 0;
        while tested < 100 {
            let l = TetLengths(std::array::from_fn(|_| rng.random_range(0.7..1.4)));
            if l.volume().is_err() {
                continue;
            }
            let verts = embed_tetrahedron(&l).unwrap();
            for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
                let beta = dihedral_angle(&l, i, j).unwrap();
                assert_relative_eq!(beta, embedded_dihedral(&verts, i, j), epsilon = 1e-10);
            }
            tested += 1;
        }
    }

    fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }
    fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }
    fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }
    fn norm(a: [f64; 3]) -> f64 {
        dot(a, a).sqrt()
    }

    fn embedded_dihedral(v: &[[f64; 3]; 4], i: usize, j: usize) -> f64 {
        let (k, m) = TetLengths::other_two(i, j);
        let e = sub(v[j], v[i]);
        let n1 = cross(e, sub(v[k], v[i]));
        let n2 = cross(e, sub(v[m], v[i]));
        (dot(n1, n2) / (norm(n1) * norm(n2))).acos()
    }

    #[test]
    fn regular_solid_angle() {
        let alpha = solid_angle(&regular_tet(), 0).unwrap();
        assert_relative_eq!(alpha, 3.0 * (1.0f64 / 3.0).acos() - PI, epsilon = 1e-13);
    }

    #[test]
    fn solid_angle_sum_identity() {
        let l = TetLengths([1.0, 1.1, 0.9, 1.2, 1.0, 0.95]);
        let alpha_sum: f64 = (0..4).map(|i| solid_angle(&l, i).unwrap()).sum();
        let beta_sum: f64 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(i, j)| dihedral_angle(&l, i, j).unwrap())
            .sum();
        assert_relative_eq!(alpha_sum, 2.0 * beta_sum - 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn solid_angle_vanishes_as_base_vertex_flattens() {
        // Apex over the centroid of a unit equilateral base; as the apex
        // height shrinks the solid angle at a base corner goes to zero.
        let mut previous = f64::INFINITY;
        for &h in &[0.8, 0.4, 0.2, 0.1, 0.05] {
            let apex = (1.0f64 / 3.0 + h * h).sqrt();
            let l = TetLengths([1.0, 1.0, apex, 1.0, apex, apex]);
            let alpha = solid_angle(&l, 0).unwrap();
            assert!(alpha < previous && alpha > 0.0);
            previous = alpha;
        }
        assert!(previous < 0.05);
    }

    #[test]
    fn embed_triangle_canonical() {
        let v = embed_triangle(1.0, 1.0, 1.0).unwrap();
        assert_eq!(v[0], [0.0, 0.0]);
        assert_eq!(v[1], [1.0, 0.0]);
        assert_relative_eq!(v[2][0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(v[2][1], 0.8660254037844386, epsilon = 1e-15);
        assert!(embed_triangle(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn embed_regular_tetrahedron_height() {
        let v = embed_tetrahedron(&regular_tet()).unwrap();
        assert_relative_eq!(v[3][2], (2.0f64 / 3.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn embedding_reproduces_lengths() {
        let l = TetLengths([1.0, 1.2, 0.8, 1.1, 1.3, 0.9]);
        let v = embed_tetrahedron(&l).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let d = norm(sub(v[j], v[i]));
                assert_relative_eq!(d, l.get(i, j), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn volume_gradient_matches_finite_differences() {
        let l = TetLengths([1.0, 1.2, 0.8, 1.1, 1.3, 0.9]);
        let h = 1e-6;
        for idx in 0..6 {
            let mut lp = l;
            let mut lm = l;
            lp.0[idx] += h;
            lm.0[idx] -= h;
            let fd = (lp.volume().unwrap() - lm.volume().unwrap()) / (2.0 * h);
            let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let (i, j) = pairs[idx];
            let analytic = volume_length_gradient(&l, i, j).unwrap();
            assert_relative_eq!(analytic, fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn schlafli_identity_under_random_perturbations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut tested = 0;
        while tested < 50 {
            let l = TetLengths(std::array::from_fn(|_| rng.random_range(0.7..1.4)));
            if l.volume().is_err() {
                continue;
            }
            let dir: [f64; 6] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let h = 1e-6;
            let mut weighted = 0.0;
            let mut magnitude = 0.0;
            let mut ok = true;
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                let mut lp = l;
                let mut lm = l;
                for t in 0..6 {
                    lp.0[t] += h * dir[t];
                    lm.0[t] -= h * dir[t];
                }
                let (bp, bm) = match (dihedral_angle(&lp, i, j), dihedral_angle(&lm, i, j)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        ok = false;
                        break;
                    }
                };
                let db = (bp - bm) / (2.0 * h);
                weighted += l.0[idx] * db;
                magnitude += l.0[idx] * db.abs();
            }
            if !ok {
                continue;
            }
            assert!(
                weighted.abs() < 1e-7 * magnitude,
                "Schlafli defect {weighted:e} vs scale {magnitude:e}"
            );
            tested += 1;
        }
    }
}
