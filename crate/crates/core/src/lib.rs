//! Shared types for sampling, discrete sets, changes of variables and lattices.

pub mod cov;
pub mod error;
pub mod grid;
pub mod lattice;
pub mod quad;
pub mod sets;

pub use cov::{norm, ChangeOfVariables};
pub use error::{Error, ErrorClass, Result};
pub use grid::{ClosedForm, Decay, Grid, SampledFunction};
pub use lattice::LatticeSpec;
pub use quad::GaussLegendre;
pub use sets::{generate_set, generate_set_capped, DiscreteSet, Generator, DEFAULT_POINT_CAP};
