//! Curvatures and scalar functionals.
//!
//! In 2D curvature concentrates at vertices: K_i = 2 pi - sum of interior
//! angles at i. In 3D it concentrates at edges, K_ij = (2 pi - sum of
//! dihedral angles) l_ij, and moves to vertices through the metric as
//! K_i = sum_j (2 pi - sum beta) d_ij. The total curvature functional is
//! the sum of edge curvatures and equals the sum of vertex scalar
//! curvatures.
//!
//! Sums are accumulated in sorted simplex-id order so results are
//! deterministic; per-vertex and per-edge work is parallelized with the
//! order inside each sum fixed.

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::geometry::{dihedral_angle, face_angle, volume_length_gradient, GeometryError};
use crate::metric::{tet_lengths, triangle_lengths, vertex_volumes, PreMetric};

/// Per-vertex angle defects K_i = 2 pi - sum of angles at i (2D).
pub fn vertex_curvatures_2d(
    complex: &SimplicialComplex,
    lengths: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    assert_eq!(
        complex.dimension(),
        2,
        "vertex angle defects require dimension 2"
    );
    (0..complex.vertex_count())
        .into_par_iter()
        .map(|v| {
            let mut total = 0.0;
            for &t in complex.triangles_at_vertex(v) {
                let [a, b, c] = complex.triangle(t);
                let (j, k) = if a == v {
                    (b, c)
                } else if b == v {
                    (a, c)
                } else {
                    (a, b)
                };
                let lv = |x: usize, y: usize| lengths[complex.edge_id([x, y]).unwrap()];
                total += face_angle(lv(v, j), lv(v, k), lv(j, k))?;
            }
            Ok(2.0 * std::f64::consts::PI - total)
        })
        .collect()
}

/// Dihedral angle deficits 2 pi - sum beta per edge (3D).
pub fn edge_deficits_3d(
    complex: &SimplicialComplex,
    lengths: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    assert_eq!(complex.dimension(), 3, "edge deficits require dimension 3");
    (0..complex.edge_count())
        .into_par_iter()
        .map(|e| {
            let [u, v] = complex.edge(e);
            let mut total = 0.0;
            for &s in complex.tetrahedra_at_edge(e) {
                let verts = complex.tetrahedron(s);
                let local = |w: usize| verts.iter().position(|&x| x == w).unwrap();
                total += dihedral_angle(&tet_lengths(complex, lengths, s), local(u), local(v))?;
            }
            Ok(2.0 * std::f64::consts::PI - total)
        })
        .collect()
}

/// Edge curvatures K_ij = (2 pi - sum beta) l_ij. Depends only on the
/// lengths, not on the splitting into d.
pub fn edge_curvatures_3d(
    complex: &SimplicialComplex,
    lengths: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    Ok(edge_deficits_3d(complex, lengths)?
        .iter()
        .zip(lengths)
        .map(|(deficit, l)| deficit * l)
        .collect())
}

/// Vertex scalar curvatures K_i = sum_j (2 pi - sum beta) d_ij (3D).
/// Unlike the edge curvatures, these depend on the metric.
pub fn scalar_curvatures_3d(
    complex: &SimplicialComplex,
    d: &PreMetric,
) -> Result<Vec<f64>, GeometryError> {
    let deficits = edge_deficits_3d(complex, &d.lengths())?;
    Ok((0..complex.vertex_count())
        .map(|v| {
            complex
                .edges_at_vertex(v)
                .iter()
                .map(|&e| deficits[e] * d.d_from(complex, e, v))
                .sum()
        })
        .collect())
}

/// Total curvature functional: the sum of the edge curvatures.
pub fn ehr(complex: &SimplicialComplex, lengths: &[f64]) -> Result<f64, GeometryError> {
    Ok(edge_curvatures_3d(complex, lengths)?.iter().sum())
}

/// Total volume: the sum of the tetrahedron volumes.
pub fn total_volume(complex: &SimplicialComplex, lengths: &[f64]) -> Result<f64, GeometryError> {
    assert_eq!(complex.dimension(), 3, "total volume requires dimension 3");
    (0..complex.tetrahedron_count())
        .map(|s| tet_lengths(complex, lengths, s).volume())
        .sum()
}

/// The diagnostic ratio lambda = EHR / (3 V); on a constant-scalar-
/// curvature metric this is the curvature constant.
pub fn lambda(complex: &SimplicialComplex, lengths: &[f64]) -> Result<f64, GeometryError> {
    Ok(ehr(complex, lengths)? / (3.0 * total_volume(complex, lengths)?))
}

/// Gradient of the total volume in the edge lengths: per edge, the sum
/// over incident tetrahedra of (1/6) l_ij l_kl cot beta_{kl,ij}.
pub fn volume_gradient_lengths(
    complex: &SimplicialComplex,
    lengths: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    (0..complex.edge_count())
        .into_par_iter()
        .map(|e| {
            let [u, v] = complex.edge(e);
            let mut total = 0.0;
            for &s in complex.tetrahedra_at_edge(e) {
                let verts = complex.tetrahedron(s);
                let local = |w: usize| verts.iter().position(|&x| x == w).unwrap();
                total +=
                    volume_length_gradient(&tet_lengths(complex, lengths, s), local(u), local(v))?;
            }
            Ok(total)
        })
        .collect()
}

/// Per-edge residuals of the Einstein condition
/// K_ij = lambda l_ij dV/dl_ij, with lambda = EHR/(3V).
pub fn einstein_residuals(
    complex: &SimplicialComplex,
    d: &PreMetric,
) -> Result<Vec<f64>, GeometryError> {
    let lengths = d.lengths();
    let k = edge_curvatures_3d(complex, &lengths)?;
    let dv = volume_gradient_lengths(complex, &lengths)?;
    let lam = lambda(complex, &lengths)?;
    Ok((0..complex.edge_count())
        .map(|e| k[e] - lam * lengths[e] * dv[e])
        .collect())
}

/// Per-vertex residuals of the constant-scalar-curvature condition
/// K_i = lambda V_i, with lambda = EHR/(3V).
pub fn csc_residuals(
    complex: &SimplicialComplex,
    d: &PreMetric,
) -> Result<Vec<f64>, GeometryError> {
    let k = scalar_curvatures_3d(complex, d)?;
    let volumes = vertex_volumes(complex, d)?;
    let lam = lambda(complex, &d.lengths())?;
    Ok((0..complex.vertex_count())
        .map(|v| k[v] - lam * volumes[v])
        .collect())
}

/// Everything the curvature side computes for one metric, keyed by
/// vertex/edge labels. 3D-only quantities are None in 2D.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub dimension: usize,
    pub vertex_curvatures: Vec<(u64, f64)>,
    pub edge_curvatures: Option<Vec<([u64; 2], f64)>>,
    pub ehr: Option<f64>,
    pub total_volume: f64,
    pub lambda: Option<f64>,
    pub einstein_residuals: Option<Vec<([u64; 2], f64)>>,
    pub csc_residuals: Option<Vec<(u64, f64)>>,
}

/// Assemble the full report. In 2D `total_volume` is the total area and
/// the vertex curvatures are the angle defects.
pub fn curvature_report(
    complex: &SimplicialComplex,
    d: &PreMetric,
) -> Result<CurvatureReport, GeometryError> {
    let lengths = d.lengths();
    let label = |v: usize| complex.vertex_label(v);
    if complex.dimension() == 2 {
        let k = vertex_curvatures_2d(complex, &lengths)?;
        let area: f64 = (0..complex.triangle_count())
            .map(|t| crate::geometry::cm_volume(&triangle_lengths(complex, &lengths, t), 2))
            .sum::<Result<f64, _>>()?;
        Ok(CurvatureReport {
            dimension: 2,
            vertex_curvatures: k.iter().enumerate().map(|(v, &x)| (label(v), x)).collect(),
            edge_curvatures: None,
            ehr: None,
            total_volume: area,
            lambda: None,
            einstein_residuals: None,
            csc_residuals: None,
        })
    } else {
        let k = scalar_curvatures_3d(complex, d)?;
        let kedge = edge_curvatures_3d(complex, &lengths)?;
        let volume = total_volume(complex, &lengths)?;
        let ehr_value: f64 = kedge.iter().sum();
        let einstein = einstein_residuals(complex, d)?;
        let csc = csc_residuals(complex, d)?;
        let edge_label = |e: usize| complex.edge_labels(e);
        Ok(CurvatureReport {
            dimension: 3,
            vertex_curvatures: k.iter().enumerate().map(|(v, &x)| (label(v), x)).collect(),
            edge_curvatures: Some(
                kedge
                    .iter()
                    .enumerate()
                    .map(|(e, &x)| (edge_label(e), x))
                    .collect(),
            ),
            ehr: Some(ehr_value),
            total_volume: volume,
            lambda: Some(ehr_value / (3.0 * volume)),
            einstein_residuals: Some(
                einstein
                    .iter()
                    .enumerate()
                    .map(|(e, &x)| (edge_label(e), x))
                    .collect(),
            ),
            csc_residuals: Some(
                csc.iter()
                    .enumerate()
                    .map(|(v, &x)| (label(v), x))
                    .collect(),
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ConformalChart;
    use crate::fixtures;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn sphere_curvatures_are_pi() {
        let c = fixtures::sphere_tetrahedron();
        let k = vertex_curvatures_2d(&c, &vec![1.0; c.edge_count()]).unwrap();
        for &x in &k {
            assert_relative_eq!(x, PI, epsilon = 1e-14);
        }
        assert_relative_eq!(k.iter().sum::<f64>(), 4.0 * PI, epsilon = 1e-13);
    }

    #[test]
    fn icosahedron_curvatures() {
        let c = fixtures::icosahedron();
        let k = vertex_curvatures_2d(&c, &vec![1.0; c.edge_count()]).unwrap();
        for &x in &k {
            assert_relative_eq!(x, PI / 3.0, epsilon = 1e-13);
        }
        assert_relative_eq!(k.iter().sum::<f64>(), 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn flat_torus_is_flat() {
        let (c, lengths) = fixtures::flat_torus_2d(3);
        let k = vertex_curvatures_2d(&c, &lengths).unwrap();
        for &x in &k {
            assert!(x.abs() < 1e-13, "expected flat vertex, got {x}");
        }
    }

    #[test]
    fn genus2_gauss_bonnet() {
        let c = fixtures::genus2_surface();
        let k = vertex_curvatures_2d(&c, &vec![1.0; c.edge_count()]).unwrap();
        assert_relative_eq!(k.iter().sum::<f64>(), -4.0 * PI, epsilon = 1e-12);
        // Curvature concentrates at the three glued vertices.
        let negative: Vec<f64> = k.iter().copied().filter(|&x| x.abs() > 1e-12).collect();
        assert_eq!(negative.len(), 3);
        for x in negative {
            assert_relative_eq!(x, -4.0 * PI / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn s3_edge_curvatures() {
        let c = fixtures::sphere_4simplex();
        let k = edge_curvatures_3d(&c, &vec![1.0; c.edge_count()]).unwrap();
        let expected = 2.0 * PI - 3.0 * (1.0f64 / 3.0).acos();
        for &x in &k {
            assert_relative_eq!(x, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn suspension_edge_curvatures_by_star_count() {
        // Base edges lie in 4 regular tetrahedra, polar edges in 3.
        let c = fixtures::suspension_sphere_3d();
        let k = edge_curvatures_3d(&c, &vec![1.0; c.edge_count()]).unwrap();
        let beta = (1.0f64 / 3.0).acos();
        for e in 0..c.edge_count() {
            let stars = c.tetrahedra_at_edge(e).len() as f64;
            assert_relative_eq!(k[e], 2.0 * PI - stars * beta, epsilon = 1e-13);
        }
    }

    #[test]
    fn edge_curvature_scales_linearly() {
        let c = fixtures::sphere_4simplex();
        let base: Vec<f64> = (0..c.edge_count()).map(|e| 1.0 + 0.02 * e as f64).collect();
        let k1 = edge_curvatures_3d(&c, &base).unwrap();
        let scaled: Vec<f64> = base.iter().map(|l| 1.7 * l).collect();
        let k2 = edge_curvatures_3d(&c, &scaled).unwrap();
        for e in 0..c.edge_count() {
            assert_relative_eq!(k2[e], 1.7 * k1[e], max_relative = 1e-12);
        }
    }

    #[test]
    fn s3_scalar_curvatures() {
        let c = fixtures::sphere_4simplex();
        let d = PreMetric::constant(&c, 0.5);
        let k = scalar_curvatures_3d(&c, &d).unwrap();
        let expected = 4.0 * (2.0 * PI - 3.0 * (1.0f64 / 3.0).acos()) / 2.0;
        for &x in &k {
            assert_relative_eq!(x, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn flat_3_torus_curvatures_vanish() {
        let (c, lengths) = fixtures::flat_torus_3d(3);
        let k = edge_curvatures_3d(&c, &lengths).unwrap();
        for &x in &k {
            assert!(x.abs() < 1e-12, "expected flat edge, got {x}");
        }
        let d = PreMetric::from_lengths_halved(&lengths);
        for &x in &scalar_curvatures_3d(&c, &d).unwrap() {
            assert!(x.abs() < 1e-12);
        }
        assert!(ehr(&c, &lengths).unwrap().abs() < 1e-10);
        assert!(lambda(&c, &lengths).unwrap().abs() < 1e-10);
    }

    #[test]
    fn ehr_identities_on_s3() {
        let c = fixtures::sphere_4simplex();
        let lengths = vec![1.0; c.edge_count()];
        let total = ehr(&c, &lengths).unwrap();
        let expected = 10.0 * (2.0 * PI - 3.0 * (1.0f64 / 3.0).acos());
        assert_relative_eq!(total, expected, max_relative = 1e-13);
        let volume = total_volume(&c, &lengths).unwrap();
        assert_relative_eq!(volume, 5.0 / (6.0 * 2.0f64.sqrt()), max_relative = 1e-13);
        assert_relative_eq!(
            lambda(&c, &lengths).unwrap(),
            expected / (3.0 * volume),
            max_relative = 1e-13
        );

        // Sum of scalar curvatures equals the functional, also for
        // asymmetric metrics sharing the lengths.
        let d = PreMetric::constant(&c, 0.5);
        let ksum: f64 = scalar_curvatures_3d(&c, &d).unwrap().iter().sum();
        assert_relative_eq!(ksum, total, max_relative = 1e-13);

        let f: Vec<f64> = (0..c.vertex_count())
            .map(|v| -0.8 + 0.07 * v as f64)
            .collect();
        let dp = ConformalChart::packing().apply(&c, &f).unwrap();
        let ksum: f64 = scalar_curvatures_3d(&c, &dp).unwrap().iter().sum();
        assert_relative_eq!(ksum, ehr(&c, &dp.lengths()).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn ehr_scaling_homogeneity() {
        let c = fixtures::sphere_4simplex();
        let base: Vec<f64> = (0..c.edge_count())
            .map(|e| 1.0 + 0.015 * e as f64)
            .collect();
        let a = 1.3;
        let scaled: Vec<f64> = base.iter().map(|l| a * l).collect();
        assert_relative_eq!(
            ehr(&c, &scaled).unwrap(),
            a * ehr(&c, &base).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            total_volume(&c, &scaled).unwrap(),
            a.powi(3) * total_volume(&c, &base).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            lambda(&c, &scaled).unwrap(),
            lambda(&c, &base).unwrap() / (a * a),
            max_relative = 1e-11
        );
    }

    #[test]
    fn symmetric_residuals_vanish() {
        let c = fixtures::sphere_4simplex();
        let d = PreMetric::constant(&c, 0.5);
        for r in einstein_residuals(&c, &d).unwrap() {
            assert!(r.abs() < 1e-12, "einstein residual {r}");
        }
        for r in csc_residuals(&c, &d).unwrap() {
            assert!(r.abs() < 1e-12, "csc residual {r}");
        }

        let (t3, lengths) = fixtures::flat_torus_3d(3);
        let d = PreMetric::from_lengths_halved(&lengths);
        for r in einstein_residuals(&t3, &d).unwrap() {
            assert!(r.abs() < 1e-10);
        }
        for r in csc_residuals(&t3, &d).unwrap() {
            assert!(r.abs() < 1e-10);
        }
    }

    #[test]
    fn perturbed_residuals_are_nonzero() {
        let c = fixtures::sphere_4simplex();
        let f: Vec<f64> = (0..c.vertex_count())
            .map(|v| -0.7 + 0.05 * v as f64)
            .collect();
        let d = ConformalChart::packing().apply(&c, &f).unwrap();
        let residuals = einstein_residuals(&c, &d).unwrap();
        assert!(residuals.iter().any(|r| r.abs() > 1e-4));
    }

    #[test]
    fn kij_is_chart_independent_ki_is_not() {
        // Packing with unequal radii vs perpendicular bisector over the
        // same lengths: equal K_ij, different K_i.
        let c = fixtures::sphere_4simplex();
        let f: Vec<f64> = (0..c.vertex_count())
            .map(|v| -0.8 + 0.1 * v as f64)
            .collect();
        let packing = ConformalChart::packing().apply(&c, &f).unwrap();
        let lengths = packing.lengths();
        let pb = ConformalChart::perp_bisector(&c, lengths.clone())
            .unwrap()
            .apply(&c, &vec![0.0; c.vertex_count()])
            .unwrap();
        assert!(lengths
            .iter()
            .zip(pb.lengths().iter())
            .all(|(a, b)| (a - b).abs() < 1e-14));
        let ka = scalar_curvatures_3d(&c, &packing).unwrap();
        let kb = scalar_curvatures_3d(&c, &pb).unwrap();
        assert!(ka.iter().zip(&kb).any(|(a, b)| (a - b).abs() > 1e-3));
        assert_relative_eq!(
            ka.iter().sum::<f64>(),
            kb.iter().sum::<f64>(),
            max_relative = 1e-12
        );
    }
}
