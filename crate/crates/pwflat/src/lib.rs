//! Metrized piecewise flat 2- and 3-manifolds.
//!
//! This crate implements the discrete conformal-variation toolkit for
//! closed triangulated surfaces and 3-manifolds carrying a directed-edge
//! metric d (with induced lengths l_ij = d_ij + d_ji):
//!
//! - [`complex`]: validated closed-manifold complexes with incidence queries;
//! - [`geometry`]: per-simplex volumes, angles, and an embedding oracle;
//! - [`metric`]: the duality structure (signed heights, dual areas and
//!   lengths) and vertex/edge volumes;
//! - [`conformal`]: the packing, fixed-inversive-distance, and
//!   perpendicular-bisector conformal structures;
//! - [`curvature`]: vertex/edge/scalar curvatures, the total-curvature
//!   functional, volume, and Einstein / constant-scalar-curvature residuals;
//! - [`variation`]: analytic first and second variations (angle gradients,
//!   curvature Jacobians, the discrete Laplacian, the curvature-functional
//!   Hessian) plus finite-difference oracles;
//! - [`solver`]: Newton and gradient-flow solvers for prescribed curvature,
//!   with definiteness and rigidity diagnostics;
//! - [`meshfile`] / [`cli`]: the text mesh format and the command-line
//!   entry points;
//! - [`fixtures`]: model complexes (spheres, flat tori, a genus-2 surface).
//!
//! Every analytic formula in [`variation`] is cross-checked against
//! finite differences in the test suite; see `tests/acceptance.rs` for
//! the full criteria run.

// Index-parallel loops over simplex tables read better than iterator
// chains here, and `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod complex;
pub mod conformal;
pub mod curvature;
pub mod fixtures;
pub mod geometry;
pub mod meshfile;
pub mod metric;
pub mod solver;
pub mod variation;

pub use complex::{ComplexError, SimplexId, SimplicialComplex};
pub use conformal::{ChartError, ChartKind, ConformalChart};
pub use geometry::{GeometryError, TetLengths};
pub use metric::{MetricReport, PreMetric};
