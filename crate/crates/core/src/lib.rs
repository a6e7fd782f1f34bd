//! Radial spherical-means integral equations for semilinear waves.

pub mod cli;
pub mod comparison;
pub mod duhamel;
pub mod error;
pub mod fields;
pub mod linear_part;
pub mod norms;
pub mod output;
pub mod quadrature;
pub mod residual;
pub mod solver;
pub mod sphmeans;

pub use error::{Error, Result};
pub use fields::{Lattice, ProfileFamily, RadialProfile, SpaceTimeField};
pub use sphmeans::{Dimension, QuadratureSpec};
