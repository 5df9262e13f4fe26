//! Construction and analysis of the smallest linear programs that make the
//! simplex method cycle.
//!
//! The crate builds a three-parameter family of degenerate LPs whose tableau
//! pattern repeats every two iterations, runs them through a dense tableau
//! simplex engine under Dantzig or steepest-edge pricing and the standard or
//! EXPAND ratio test, and checks the closed-form cycling conditions against
//! simulation.
//!
//! Arithmetic is generic over [`numeric::Scalar`]: exact big-rational for
//! proofs-by-execution, binary64 for runs with realistic tolerances. The two
//! backends are never mixed within a run; the type system enforces it.

pub mod engine;
pub mod family;
pub mod model;
pub mod numeric;
pub mod pricing;
pub mod ratio;
pub mod sweep;

mod error;

pub use error::Error;
pub use numeric::{Rational, Scalar};

pub type Result<T> = std::result::Result<T, Error>;
