//! Pre-metrics, the metric compatibility condition, and the induced
//! duality structure: centers (as signed heights h), dual areas, dual
//! lengths, and vertex/edge volumes.
//!
//! Centers are never stored as coordinates; every dual quantity is
//! computed from the signed-height formulas
//!
//!   h_{ij,k}  = (d_ik - d_ij cos gamma_{i,jk}) / sin gamma_{i,jk}
//!   h_{ijk,l} = (h_{ij,l} - h_{ij,k} cos beta_{ij,kl}) / sin beta_{ij,kl}
//!   A_{ij,kl} = (h_{ij,k} h_{ijk,l} + h_{ij,l} h_{ijl,k}) / 2
//!
//! which stay valid for negative d's and h's. Coordinate-based centers
//! exist only in the test oracle.

use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::geometry::{cm_volume, face_angle, pair_index, GeometryError, TetLengths};

/// Relative tolerance on the per-triangle metric condition residual.
pub const METRIC_CONDITION_TOL: f64 = 1e-10;

/// Assignment of a real number to each directed edge. For edge id `e`
/// with sorted vertices `[u, v]`, slot 0 holds `d_{u->v}` and slot 1
/// holds `d_{v->u}`; the induced length is their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PreMetric {
    d: Vec<[f64; 2]>,
}

impl PreMetric {
    pub fn new(d: Vec<[f64; 2]>) -> Self {
        PreMetric { d }
    }

    /// d from a closure over directed dense-index pairs.
    pub fn from_fn(complex: &SimplicialComplex, mut d: impl FnMut(usize, usize) -> f64) -> Self {
        let values = (0..complex.edge_count())
            .map(|e| {
                let [u, v] = complex.edge(e);
                [d(u, v), d(v, u)]
            })
            .collect();
        PreMetric { d: values }
    }

    pub fn constant(complex: &SimplicialComplex, value: f64) -> Self {
        PreMetric {
            d: vec![[value; 2]; complex.edge_count()],
        }
    }

    /// The perpendicular-bisector splitting d = l/2 of given edge lengths.
    pub fn from_lengths_halved(lengths: &[f64]) -> Self {
        PreMetric {
            d: lengths.iter().map(|&l| [0.5 * l; 2]).collect(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.d.len()
    }

    /// d along edge `e` from its lower-indexed endpoint (`end` = 0) or
    /// its higher-indexed endpoint (`end` = 1).
    pub fn d_end(&self, e: usize, end: usize) -> f64 {
        self.d[e][end]
    }

    /// d along edge `e` starting from vertex `from`.
    pub fn d_from(&self, complex: &SimplicialComplex, e: usize, from: usize) -> f64 {
        let [u, v] = complex.edge(e);
        if from == u {
            self.d[e][0]
        } else {
            debug_assert_eq!(from, v);
            self.d[e][1]
        }
    }

    pub fn length(&self, e: usize) -> f64 {
        self.d[e][0] + self.d[e][1]
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.d.iter().map(|d| d[0] + d[1]).collect()
    }

    pub fn raw(&self) -> &[[f64; 2]] {
        &self.d
    }
}

/// Per-triangle entry of a metric validation report.
#[derive(Debug, Clone, Serialize)]
pub struct TriangleResidual {
    pub triangle: [u64; 3],
    pub residual: f64,
    pub within_tolerance: bool,
}

/// Report-style validation of a pre-metric: length positivity, top-simplex
/// nondegeneracy, and the per-triangle metric condition
/// d_ij^2 + d_jk^2 + d_ki^2 = d_ji^2 + d_ik^2 + d_kj^2.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub triangle_residuals: Vec<TriangleResidual>,
    pub max_residual: f64,
    pub nonpositive_lengths: Vec<[u64; 2]>,
    pub degenerate_simplices: Vec<Vec<u64>>,
    /// Informational: all directed d positive (one candidate notion of a
    /// "Riemannian" pre-metric; not required).
    pub all_d_positive: bool,
    /// Informational: all dual lengths positive; only evaluated when the
    /// metric itself is valid.
    pub all_dual_lengths_positive: Option<bool>,
    pub passes: bool,
}

pub fn check_metric(complex: &SimplicialComplex, d: &PreMetric) -> MetricReport {
    let lengths = d.lengths();
    let mean_len = lengths.iter().sum::<f64>() / lengths.len().max(1) as f64;

    let nonpositive_lengths: Vec<[u64; 2]> = (0..complex.edge_count())
        .filter(|&e| !(lengths[e] > 0.0))
        .map(|e| complex.edge_labels(e))
        .collect();

    let mut degenerate_simplices = Vec::new();
    if nonpositive_lengths.is_empty() {
        for t in 0..complex.triangle_count() {
            let ls = triangle_lengths(complex, &lengths, t);
            if cm_volume(&ls, 2).is_err() {
                degenerate_simplices.push(complex.triangle_labels(t).to_vec());
            }
        }
        for s in 0..complex.tetrahedron_count() {
            let ls = tet_lengths(complex, &lengths, s);
            if ls.volume().is_err() {
                degenerate_simplices.push(
                    complex
                        .tetrahedron(s)
                        .map(|v| complex.vertex_label(v))
                        .to_vec(),
                );
            }
        }
    }

    let tol = METRIC_CONDITION_TOL * mean_len * mean_len;
    let mut max_residual = 0.0f64;
    let mut triangle_residuals = Vec::with_capacity(complex.triangle_count());
    for t in 0..complex.triangle_count() {
        let [a, b, c] = complex.triangle(t);
        // Forward cycle a->b->c->a against its reverse.
        let fwd = sq(d.d_from(complex, complex.edge_id([a, b]).unwrap(), a))
            + sq(d.d_from(complex, complex.edge_id([b, c]).unwrap(), b))
            + sq(d.d_from(complex, complex.edge_id([a, c]).unwrap(), c));
        let rev = sq(d.d_from(complex, complex.edge_id([a, b]).unwrap(), b))
            + sq(d.d_from(complex, complex.edge_id([b, c]).unwrap(), c))
            + sq(d.d_from(complex, complex.edge_id([a, c]).unwrap(), a));
        let residual = fwd - rev;
        max_residual = max_residual.max(residual.abs());
        triangle_residuals.push(TriangleResidual {
            triangle: complex.triangle_labels(t),
            residual,
            within_tolerance: residual.abs() <= tol,
        });
    }

    let structure_ok = nonpositive_lengths.is_empty() && degenerate_simplices.is_empty();
    let passes = structure_ok && triangle_residuals.iter().all(|r| r.within_tolerance);
    let all_d_positive = d.raw().iter().all(|v| v[0] > 0.0 && v[1] > 0.0);
    let all_dual_lengths_positive = if passes {
        let ok = (0..complex.edge_count())
            .all(|e| matches!(dual_length(complex, d, e), Ok(l) if l > 0.0));
        Some(ok)
    } else {
        None
    };

    MetricReport {
        triangle_residuals,
        max_residual,
        nonpositive_lengths,
        degenerate_simplices,
        all_d_positive,
        all_dual_lengths_positive,
        passes,
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

pub fn triangle_lengths(complex: &SimplicialComplex, lengths: &[f64], t: usize) -> [f64; 3] {
    complex.edges_of_triangle(t).map(|e| lengths[e])
}

pub fn tet_lengths(complex: &SimplicialComplex, lengths: &[f64], s: usize) -> TetLengths {
    TetLengths(complex.edges_of_tetrahedron(s).map(|e| lengths[e]))
}

/// Directed-edge data of one triangle, on local vertices 0..3 with edges
/// in pair order (01, 02, 12). `d[e][0]` points from the lower local
/// vertex.
#[derive(Debug, Clone, Copy)]
pub struct TriangleMetric {
    pub d: [[f64; 2]; 3],
}

impl TriangleMetric {
    fn edge_slot(i: usize, j: usize) -> (usize, usize) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let idx = match (a, b) {
            (0, 1) => 0,
            (0, 2) => 1,
            (1, 2) => 2,
            _ => panic!("invalid triangle vertex pair ({i}, {j})"),
        };
        (idx, if i < j { 0 } else { 1 })
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        let (e, s) = Self::edge_slot(i, j);
        self.d[e][s]
    }

    pub fn length(&self, i: usize, j: usize) -> f64 {
        self.d(i, j) + self.d(j, i)
    }

    pub fn lengths(&self) -> [f64; 3] {
        [self.length(0, 1), self.length(0, 2), self.length(1, 2)]
    }

    /// Angle at local vertex `i`.
    pub fn angle(&self, i: usize) -> Result<f64, GeometryError> {
        let mut rest = (0..3).filter(|&v| v != i);
        let (j, k) = (rest.next().unwrap(), rest.next().unwrap());
        face_angle(self.length(i, j), self.length(i, k), self.length(j, k))
    }

    /// Signed height h_{ij,k} from one end vertex of the edge.
    pub fn height_one_sided(&self, i: usize, j: usize) -> Result<f64, GeometryError> {
        let k = 3 - i - j;
        let gamma = self.angle(i)?;
        Ok((self.d(i, k) - self.d(i, j) * gamma.cos()) / gamma.sin())
    }

    /// Signed distance h_{ij,k} from the edge center to the triangle
    /// center, averaged over the two end-vertex formulas (which agree for
    /// a metric).
    pub fn height(&self, i: usize, j: usize) -> Result<f64, GeometryError> {
        Ok(0.5 * (self.height_one_sided(i, j)? + self.height_one_sided(j, i)?))
    }
}

/// Directed-edge data of one tetrahedron, local vertices 0..4, edges in
/// pair order (01, 02, 03, 12, 13, 23).
#[derive(Debug, Clone, Copy)]
pub struct TetraMetric {
    pub d: [[f64; 2]; 6],
}

impl TetraMetric {
    pub fn d(&self, i: usize, j: usize) -> f64 {
        let idx = pair_index(i, j);
        if i < j {
            self.d[idx][0]
        } else {
            self.d[idx][1]
        }
    }

    pub fn length(&self, i: usize, j: usize) -> f64 {
        self.d(i, j) + self.d(j, i)
    }

    pub fn lengths(&self) -> TetLengths {
        TetLengths([
            self.length(0, 1),
            self.length(0, 2),
            self.length(0, 3),
            self.length(1, 2),
            self.length(1, 3),
            self.length(2, 3),
        ])
    }

    /// The face {i, j, k} as a triangle metric on local vertices (i, j, k)
    /// in sorted order.
    pub fn face(&self, mut verts: [usize; 3]) -> TriangleMetric {
        verts.sort_unstable();
        let [a, b, c] = verts;
        TriangleMetric {
            d: [
                [self.d(a, b), self.d(b, a)],
                [self.d(a, c), self.d(c, a)],
                [self.d(b, c), self.d(c, b)],
            ],
        }
    }

    /// h_{ij,k} inside the face {i, j, k} of this tetrahedron.
    pub fn face_height(&self, i: usize, j: usize, k: usize) -> Result<f64, GeometryError> {
        let mut verts = [i, j, k];
        verts.sort_unstable();
        let local = |v: usize| verts.iter().position(|&w| w == v).unwrap();
        self.face(verts).height(local(i), local(j))
    }

    fn height_to_face_via(
        &self,
        i: usize,
        j: usize,
        k: usize,
        l: usize,
    ) -> Result<f64, GeometryError> {
        let beta = crate::geometry::dihedral_angle(&self.lengths(), i, j)?;
        let h_ij_l = self.face_height(i, j, l)?;
        let h_ij_k = self.face_height(i, j, k)?;
        Ok((h_ij_l - h_ij_k * beta.cos()) / beta.sin())
    }

    /// Signed distance h_{ijk,l} from the center of face {i, j, k} to the
    /// center of the tetrahedron, averaged over the three in-face edge
    /// formulas; disagreement beyond 1e-9 of the mean length is reported
    /// as degenerate.
    pub fn height_to_face(&self, face: [usize; 3]) -> Result<f64, GeometryError> {
        let [i, j, k] = face;
        let l = 6 - i - j - k;
        let values = [
            self.height_to_face_via(i, j, k, l)?,
            self.height_to_face_via(i, k, j, l)?,
            self.height_to_face_via(j, k, i, l)?,
        ];
        let mean_len = self.lengths().0.iter().sum::<f64>() / 6.0;
        let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().cloned().fold(f64::INFINITY, f64::min);
        if spread > 1e-9 * mean_len.max(1.0) {
            return Err(GeometryError::Degenerate(format!(
                "face height for {face:?} inconsistent across edges: {values:?}"
            )));
        }
        Ok(values.iter().sum::<f64>() / 3.0)
    }

    /// Signed dual area A_{ij,kl} of edge {i, j} inside this tetrahedron.
    pub fn dual_area(&self, i: usize, j: usize) -> Result<f64, GeometryError> {
        let mut rest = (0..4).filter(|&v| v != i && v != j);
        let (k, l) = (rest.next().unwrap(), rest.next().unwrap());
        let h_ij_k = self.face_height(i, j, k)?;
        let h_ij_l = self.face_height(i, j, l)?;
        let h_ijk_l = self.height_to_face([i, j, k])?;
        let h_ijl_k = self.height_to_face([i, j, l])?;
        Ok(0.5 * (h_ij_k * h_ijk_l + h_ij_l * h_ijl_k))
    }
}

/// Extract the directed-edge data of triangle `t`.
pub fn triangle_metric(complex: &SimplicialComplex, d: &PreMetric, t: usize) -> TriangleMetric {
    let [a, b, c] = complex.triangle(t);
    let get = |u: usize, v: usize| {
        let e = complex.edge_id([u, v]).unwrap();
        [d.d_from(complex, e, u), d.d_from(complex, e, v)]
    };
    TriangleMetric {
        d: [get(a, b), get(a, c), get(b, c)],
    }
}

/// Extract the directed-edge data of tetrahedron `s`.
pub fn tetra_metric(complex: &SimplicialComplex, d: &PreMetric, s: usize) -> TetraMetric {
    let verts = complex.tetrahedron(s);
    let mut out = [[0.0; 2]; 6];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let e = complex.edge_id([verts[i], verts[j]]).unwrap();
            out[pair_index(i, j)] = [
                d.d_from(complex, e, verts[i]),
                d.d_from(complex, e, verts[j]),
            ];
        }
    }
    TetraMetric { d: out }
}

/// h_{ij,k}: signed distance from the center of edge `e` to the center of
/// triangle `t`.
pub fn height_2d(
    complex: &SimplicialComplex,
    d: &PreMetric,
    t: usize,
    e: usize,
) -> Result<f64, GeometryError> {
    let tm = triangle_metric(complex, d, t);
    let verts = complex.triangle(t);
    let [u, v] = complex.edge(e);
    let local = |w: usize| verts.iter().position(|&x| x == w).unwrap();
    tm.height(local(u), local(v))
}

/// h_{ijk,l}: signed distance from the center of face `t` to the center
/// of tetrahedron `s`.
pub fn height_3d(
    complex: &SimplicialComplex,
    d: &PreMetric,
    s: usize,
    t: usize,
) -> Result<f64, GeometryError> {
    let tm = tetra_metric(complex, d, s);
    let verts = complex.tetrahedron(s);
    let local = |w: usize| verts.iter().position(|&x| x == w).unwrap();
    let face = complex.triangle(t).map(local);
    tm.height_to_face(face)
}

/// Signed dual area A_{ij,kl} of edge `e` inside tetrahedron `s`.
pub fn dual_area(
    complex: &SimplicialComplex,
    d: &PreMetric,
    s: usize,
    e: usize,
) -> Result<f64, GeometryError> {
    let tm = tetra_metric(complex, d, s);
    let verts = complex.tetrahedron(s);
    let local = |w: usize| verts.iter().position(|&x| x == w).unwrap();
    let [u, v] = complex.edge(e).map(local);
    tm.dual_area(u, v)
}

/// Dual length of edge `e`: in 2D the sum of the two adjacent triangle
/// heights, in 3D the sum of dual areas over the tetrahedra containing
/// the edge (each tetrahedron counted once).
pub fn dual_length(
    complex: &SimplicialComplex,
    d: &PreMetric,
    e: usize,
) -> Result<f64, GeometryError> {
    if complex.dimension() == 2 {
        let mut sum = 0.0;
        for &t in complex.triangles_at_edge(e) {
            sum += height_2d(complex, d, t, e)?;
        }
        Ok(sum)
    } else {
        let mut sum = 0.0;
        for &s in complex.tetrahedra_at_edge(e) {
            sum += dual_area(complex, d, s, e)?;
        }
        Ok(sum)
    }
}

pub fn dual_lengths(complex: &SimplicialComplex, d: &PreMetric) -> Result<Vec<f64>, GeometryError> {
    (0..complex.edge_count())
        .map(|e| dual_length(complex, d, e))
        .collect()
}

/// V_i = (1/3) sum over tetrahedra containing `v` and faces of those
/// tetrahedra containing `v` of h_{ijk,l} A_{ijk}. Only defined in 3D.
pub fn vertex_volume(
    complex: &SimplicialComplex,
    d: &PreMetric,
    v: usize,
) -> Result<f64, GeometryError> {
    assert_eq!(complex.dimension(), 3, "vertex volumes require dimension 3");
    let lengths = d.lengths();
    let mut sum = 0.0;
    for &s in complex.tetrahedra_at_vertex(v) {
        for &t in &complex.triangles_of_tetrahedron(s) {
            if !complex.triangle(t).contains(&v) {
                continue;
            }
            let area = cm_volume(&triangle_lengths(complex, &lengths, t), 2)?;
            sum += height_3d(complex, d, s, t)? * area;
        }
    }
    Ok(sum / 3.0)
}

pub fn vertex_volumes(
    complex: &SimplicialComplex,
    d: &PreMetric,
) -> Result<Vec<f64>, GeometryError> {
    (0..complex.vertex_count())
        .map(|v| vertex_volume(complex, d, v))
        .collect()
}

/// V_ij = (1/n) l*_ij l_ij, the volume associated to an edge.
pub fn edge_volume(
    complex: &SimplicialComplex,
    d: &PreMetric,
    e: usize,
) -> Result<f64, GeometryError> {
    let n = complex.dimension() as f64;
    Ok(dual_length(complex, d, e)? * d.length(e) / n)
}
