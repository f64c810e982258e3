//! A computable model of the constructible plumbing model on chordal ribbon graphs.

pub mod error;
pub mod field;
pub mod homalg;
pub mod matrix;

pub use error::{CpmError, Result};
pub use field::{Field, Scalar};
pub mod ribbon;
pub mod quiverize;
pub mod cpmcat;
pub mod moves;
pub mod bbside;
