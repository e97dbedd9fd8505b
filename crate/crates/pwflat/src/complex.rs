//! Closed triangulated 2- and 3-manifolds with incidence queries.
//!
//! A complex is built from its list of top-dimensional simplices (vertex
//! label lists). All lower simplices are generated, incidence maps are
//! precomputed, and the closed-manifold invariants are verified:
//!
//! - every codimension-1 simplex bounds exactly two top simplices,
//! - the link of every vertex is connected (a cycle in 2D, a surface of
//!   Euler characteristic 2 in 3D),
//! - in 3D the tetrahedra around every edge form a single cycle,
//! - the complex is connected.
//!
//! Simplices are keyed by dense integer ids assigned in lexicographic
//! order of their sorted vertex lists, so all iteration orders are
//! deterministic. The complex is immutable after construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("non-manifold complex: {0}")]
    NonManifold(String),
    #[error("duplicate simplex on vertices {0:?}")]
    DuplicateSimplex(Vec<u64>),
    #[error("invalid simplex {0:?}: need dimension+1 distinct vertices")]
    InvalidSimplex(Vec<u64>),
    #[error("complex is disconnected")]
    Disconnected,
    #[error("unknown simplex: {0}")]
    UnknownSimplex(String),
}

/// Reference to a simplex of any dimension, by dense id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexId {
    Vertex(usize),
    Edge(usize),
    Triangle(usize),
    Tetrahedron(usize),
}

#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    dimension: usize,
    vertex_labels: Vec<u64>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    tetrahedra: Vec<[usize; 4]>,
    edge_ids: HashMap<[usize; 2], usize>,
    triangle_ids: HashMap<[usize; 3], usize>,
    // faces
    triangle_edges: Vec<[usize; 3]>,
    tet_edges: Vec<[usize; 6]>,
    tet_triangles: Vec<[usize; 4]>,
    // cofaces, each list sorted by id
    vertex_edges: Vec<Vec<usize>>,
    vertex_triangles: Vec<Vec<usize>>,
    vertex_tets: Vec<Vec<usize>>,
    edge_triangles: Vec<Vec<usize>>,
    edge_tets: Vec<Vec<usize>>,
    triangle_tets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Build a complex from top-simplex vertex lists and verify the
    /// closed-manifold invariants.
    pub fn build(dimension: usize, tops: &[Vec<u64>]) -> Result<Self, ComplexError> {
        if dimension != 2 && dimension != 3 {
            return Err(ComplexError::NonManifold(format!(
                "dimension must be 2 or 3, got {dimension}"
            )));
        }
        let arity = dimension + 1;
        for t in tops {
            let distinct: BTreeSet<&u64> = t.iter().collect();
            if t.len() != arity || distinct.len() != arity {
                return Err(ComplexError::InvalidSimplex(t.clone()));
            }
        }

        // Dense vertex indices in label order.
        let mut labels: Vec<u64> = tops.iter().flatten().copied().collect();
        labels.sort_unstable();
        labels.dedup();
        let index_of: HashMap<u64, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

        let mut top_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for t in tops {
            let mut s: Vec<usize> = t.iter().map(|l| index_of[l]).collect();
            s.sort_unstable();
            if !top_sets.insert(s) {
                return Err(ComplexError::DuplicateSimplex(t.clone()));
            }
        }

        let mut complex = SimplicialComplex {
            dimension,
            vertex_labels: labels,
            edges: Vec::new(),
            triangles: Vec::new(),
            tetrahedra: Vec::new(),
            edge_ids: HashMap::new(),
            triangle_ids: HashMap::new(),
            triangle_edges: Vec::new(),
            tet_edges: Vec::new(),
            tet_triangles: Vec::new(),
            vertex_edges: Vec::new(),
            vertex_triangles: Vec::new(),
            vertex_tets: Vec::new(),
            edge_triangles: Vec::new(),
            edge_tets: Vec::new(),
            triangle_tets: Vec::new(),
        };

        // Generate lower simplices; ids follow lexicographic vertex order.
        let mut edge_set: BTreeSet<[usize; 2]> = BTreeSet::new();
        let mut tri_set: BTreeSet<[usize; 3]> = BTreeSet::new();
        for s in &top_sets {
            for a in 0..arity {
                for b in (a + 1)..arity {
                    edge_set.insert([s[a], s[b]]);
                    for c in (b + 1)..arity {
                        tri_set.insert([s[a], s[b], s[c]]);
                    }
                }
            }
        }
        complex.edges = edge_set.into_iter().collect();
        complex.triangles = tri_set.into_iter().collect();
        if dimension == 3 {
            complex.tetrahedra = top_sets.iter().map(|s| [s[0], s[1], s[2], s[3]]).collect();
        }
        complex.edge_ids = complex
            .edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        complex.triangle_ids = complex
            .triangles
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, i))
            .collect();

        complex.build_incidence();
        complex.check_manifold()?;
        complex.check_connected()?;
        Ok(complex)
    }

    fn build_incidence(&mut self) {
        let nv = self.vertex_labels.len();
        self.vertex_edges = vec![Vec::new(); nv];
        self.vertex_triangles = vec![Vec::new(); nv];
        self.vertex_tets = vec![Vec::new(); nv];
        self.edge_triangles = vec![Vec::new(); self.edges.len()];
        self.edge_tets = vec![Vec::new(); self.edges.len()];
        self.triangle_tets = vec![Vec::new(); self.triangles.len()];

        for (ei, e) in self.edges.iter().enumerate() {
            for &v in e {
                self.vertex_edges[v].push(ei);
            }
        }
        for (ti, t) in self.triangles.iter().enumerate() {
            let mut edges = [0usize; 3];
            let mut k = 0;
            for a in 0..3 {
                self.vertex_triangles[t[a]].push(ti);
                for b in (a + 1)..3 {
                    let ei = self.edge_ids[&[t[a], t[b]]];
                    edges[k] = ei;
                    k += 1;
                    self.edge_triangles[ei].push(ti);
                }
            }
            self.triangle_edges.push(edges);
        }
        for (si, s) in self.tetrahedra.iter().enumerate() {
            let mut edges = [0usize; 6];
            let mut tris = [0usize; 4];
            let mut ke = 0;
            for a in 0..4 {
                self.vertex_tets[s[a]].push(si);
                for b in (a + 1)..4 {
                    let ei = self.edge_ids[&[s[a], s[b]]];
                    edges[ke] = ei;
                    ke += 1;
                    self.edge_tets[ei].push(si);
                }
            }
            for (k, omit) in (0..4).rev().enumerate() {
                let mut f = [0usize; 3];
                let mut kf = 0;
                for a in 0..4 {
                    if a != omit {
                        f[kf] = s[a];
                        kf += 1;
                    }
                }
                let ti = self.triangle_ids[&f];
                tris[k] = ti;
                self.triangle_tets[ti].push(si);
            }
            tris.sort_unstable();
            self.tet_edges.push(edges);
            self.tet_triangles.push(tris);
        }
        // Lists are filled in id order already; keep them sorted explicitly.
        for l in self
            .vertex_edges
            .iter_mut()
            .chain(self.vertex_triangles.iter_mut())
            .chain(self.vertex_tets.iter_mut())
            .chain(self.edge_triangles.iter_mut())
            .chain(self.edge_tets.iter_mut())
            .chain(self.triangle_tets.iter_mut())
        {
            l.sort_unstable();
        }
    }

    fn check_manifold(&self) -> Result<(), ComplexError> {
        if self.dimension == 2 {
            for (ei, tris) in self.edge_triangles.iter().enumerate() {
                if tris.len() != 2 {
                    return Err(ComplexError::NonManifold(format!(
                        "edge {:?} lies in {} triangles, expected 2",
                        self.edge_labels(ei),
                        tris.len()
                    )));
                }
            }
            // Vertex links must be single cycles.
            for v in 0..self.vertex_labels.len() {
                let mut link: Vec<[usize; 2]> = Vec::new();
                for &ti in &self.vertex_triangles[v] {
                    let t = self.triangles[ti];
                    let others: Vec<usize> = t.iter().copied().filter(|&u| u != v).collect();
                    link.push([others[0], others[1]]);
                }
                if !is_single_cycle(&link) {
                    return Err(ComplexError::NonManifold(format!(
                        "link of vertex {} is not a single cycle",
                        self.vertex_labels[v]
                    )));
                }
            }
        } else {
            for (ti, tets) in self.triangle_tets.iter().enumerate() {
                if tets.len() != 2 {
                    return Err(ComplexError::NonManifold(format!(
                        "triangle {:?} lies in {} tetrahedra, expected 2",
                        self.triangle_labels(ti),
                        tets.len()
                    )));
                }
            }
            // Tetrahedra around each edge must form a single cycle.
            for (ei, tets) in self.edge_tets.iter().enumerate() {
                let e = self.edges[ei];
                let mut link: Vec<[usize; 2]> = Vec::new();
                for &si in tets {
                    let s = self.tetrahedra[si];
                    let others: Vec<usize> = s
                        .iter()
                        .copied()
                        .filter(|&u| u != e[0] && u != e[1])
                        .collect();
                    link.push([others[0], others[1]]);
                }
                if !is_single_cycle(&link) {
                    return Err(ComplexError::NonManifold(format!(
                        "tetrahedra around edge {:?} do not form a single cycle",
                        self.edge_labels(ei)
                    )));
                }
            }
            // Vertex links: connected closed surfaces with chi = 2.
            for v in 0..self.vertex_labels.len() {
                let mut lv: BTreeSet<usize> = BTreeSet::new();
                let mut le: BTreeSet<[usize; 2]> = BTreeSet::new();
                let lf = self.vertex_tets[v].len() as i64;
                for &ti in &self.vertex_triangles[v] {
                    let t = self.triangles[ti];
                    let others: Vec<usize> = t.iter().copied().filter(|&u| u != v).collect();
                    le.insert([others[0], others[1]]);
                }
                for &ei in &self.vertex_edges[v] {
                    let e = self.edges[ei];
                    lv.insert(if e[0] == v { e[1] } else { e[0] });
                }
                let chi = lv.len() as i64 - le.len() as i64 + lf;
                if chi != 2 {
                    return Err(ComplexError::NonManifold(format!(
                        "link of vertex {} has Euler characteristic {}, expected 2",
                        self.vertex_labels[v], chi
                    )));
                }
                let link_edges: Vec<[usize; 2]> = le.into_iter().collect();
                if !is_connected_graph(&link_edges) {
                    return Err(ComplexError::NonManifold(format!(
                        "link of vertex {} is disconnected",
                        self.vertex_labels[v]
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<(), ComplexError> {
        let edges: Vec<[usize; 2]> = self.edges.clone();
        if self.vertex_labels.is_empty() {
            return Err(ComplexError::NonManifold("empty complex".into()));
        }
        let mut seen = vec![false; self.vertex_labels.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_labels.len()];
        for e in &edges {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(ComplexError::Disconnected)
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
    pub fn tetrahedron_count(&self) -> usize {
        self.tetrahedra.len()
    }
    /// Number of top-dimensional simplices.
    pub fn top_count(&self) -> usize {
        if self.dimension == 2 {
            self.triangles.len()
        } else {
            self.tetrahedra.len()
        }
    }

    pub fn vertex_label(&self, v: usize) -> u64 {
        self.vertex_labels[v]
    }
    pub fn vertex_index(&self, label: u64) -> Option<usize> {
        self.vertex_labels.binary_search(&label).ok()
    }
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }
    pub fn tetrahedron(&self, s: usize) -> [usize; 4] {
        self.tetrahedra[s]
    }
    pub fn edge_labels(&self, e: usize) -> [u64; 2] {
        self.edges[e].map(|v| self.vertex_labels[v])
    }
    pub fn triangle_labels(&self, t: usize) -> [u64; 3] {
        self.triangles[t].map(|v| self.vertex_labels[v])
    }

    /// Edge id for a vertex-index pair, in either order.
    pub fn edge_id(&self, mut pair: [usize; 2]) -> Option<usize> {
        pair.sort_unstable();
        self.edge_ids.get(&pair).copied()
    }
    pub fn triangle_id(&self, mut verts: [usize; 3]) -> Option<usize> {
        verts.sort_unstable();
        self.triangle_ids.get(&verts).copied()
    }

    pub fn edges_of_triangle(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }
    pub fn edges_of_tetrahedron(&self, s: usize) -> [usize; 6] {
        self.tet_edges[s]
    }
    pub fn triangles_of_tetrahedron(&self, s: usize) -> [usize; 4] {
        self.tet_triangles[s]
    }
    pub fn triangles_at_edge(&self, e: usize) -> &[usize] {
        &self.edge_triangles[e]
    }
    pub fn tetrahedra_at_edge(&self, e: usize) -> &[usize] {
        &self.edge_tets[e]
    }
    pub fn tetrahedra_at_triangle(&self, t: usize) -> &[usize] {
        &self.triangle_tets[t]
    }
    pub fn edges_at_vertex(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }
    pub fn triangles_at_vertex(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }
    pub fn tetrahedra_at_vertex(&self, v: usize) -> &[usize] {
        &self.vertex_tets[v]
    }

    /// Top simplices containing the given simplex, sorted by id.
    pub fn star(&self, simplex: SimplexId) -> Result<Vec<usize>, ComplexError> {
        let unknown = |what: String| ComplexError::UnknownSimplex(what);
        match simplex {
            SimplexId::Vertex(v) => {
                if v >= self.vertex_count() {
                    return Err(unknown(format!("vertex #{v}")));
                }
                Ok(if self.dimension == 2 {
                    self.vertex_triangles[v].clone()
                } else {
                    self.vertex_tets[v].clone()
                })
            }
            SimplexId::Edge(e) => {
                if e >= self.edge_count() {
                    return Err(unknown(format!("edge #{e}")));
                }
                Ok(if self.dimension == 2 {
                    self.edge_triangles[e].clone()
                } else {
                    self.edge_tets[e].clone()
                })
            }
            SimplexId::Triangle(t) => {
                if t >= self.triangle_count() {
                    return Err(unknown(format!("triangle #{t}")));
                }
                Ok(if self.dimension == 2 {
                    vec![t]
                } else {
                    self.triangle_tets[t].clone()
                })
            }
            SimplexId::Tetrahedron(s) => {
                if self.dimension != 3 || s >= self.tetrahedron_count() {
                    return Err(unknown(format!("tetrahedron #{s}")));
                }
                Ok(vec![s])
            }
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
            - self.tetrahedron_count() as i64
    }

    /// Top simplices as vertex-label lists, in id order.
    pub fn top_simplex_labels(&self) -> Vec<Vec<u64>> {
        if self.dimension == 2 {
            self.triangles
                .iter()
                .map(|t| t.iter().map(|&v| self.vertex_labels[v]).collect())
                .collect()
        } else {
            self.tetrahedra
                .iter()
                .map(|t| t.iter().map(|&v| self.vertex_labels[v]).collect())
                .collect()
        }
    }
}

/// True if the multigraph given by its edge list is a single cycle.
fn is_single_cycle(edges: &[[usize; 2]]) -> bool {
    if edges.is_empty() {
        return false;
    }
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for e in edges {
        if e[0] == e[1] {
            return false;
        }
        *degree.entry(e[0]).or_insert(0) += 1;
        *degree.entry(e[1]).or_insert(0) += 1;
    }
    if degree.values().any(|&d| d != 2) || degree.len() != edges.len() {
        return false;
    }
    is_connected_graph(edges)
}

fn is_connected_graph(edges: &[[usize; 2]]) -> bool {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in edges {
        adj.entry(e[0]).or_default().push(e[1]);
        adj.entry(e[1]).or_default().push(e[0]);
    }
    let Some((&start, _)) = adj.iter().next() else {
        return false;
    };
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(v) = stack.pop() {
        for &w in &adj[&v] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == adj.len()
}
