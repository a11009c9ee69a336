//! Closed geodesics on regular tetrahedra of the hyperbolic plane.
//!
//! The crate is organised bottom-up:
//!
//! - [`hyperbolic`]: points, lines and isometries in the hyperboloid model.
//! - [`tetra`]: labels, face charts and the metric of the regular tetrahedron.
//! - [`development`]: unfolding face strips along a crossing sequence.
//! - [`solver`]: the holonomy-axis solver, midpoint construction, shooting
//!   oracle and the checks run on the resulting geodesics.
//! - [`cone`]: self-intersection counts of geodesics on cones.
//! - [`euclid`]: lines on the flat triangular lattice and the crossing
//!   sequences they trace.

pub mod cone;
pub mod development;
pub mod error;
pub mod euclid;
pub mod hyperbolic;
pub mod solver;
pub mod tetra;

pub use error::{Error, Result};
