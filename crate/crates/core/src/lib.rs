//! Computational tools for extremal distance: discrete conformal modulus under
//! avoidance and intersection-budget constraints, egg-yolk and 5B coverings,
//! distortion estimators for sampled maps, and quasihyperbolic diagnostics.

pub mod cover;
pub mod distort;
pub mod error;
pub mod geom;
pub mod grid;
pub mod io;
pub mod modfam;
pub mod qhyp;
pub mod sets;

pub use error::{Error, Result};
