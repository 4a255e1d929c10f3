//! Numerical laboratory for the thin obstacle (Signorini) problem.
//!
//! The crate solves the discrete problem on uniform grids by projected SOR,
//! evaluates the Almgren, Weiss, Monneau and truncated (generalized)
//! frequency functionals on radial ladders, and classifies free-boundary
//! points into regular and singular strata from frequency, coincidence-set
//! density and polynomial blowup fits.
//!
//! Module map:
//!
//! - [`geometry`]: grids, fields, interpolation, sphere and ball quadrature.
//! - [`poly`]: exact homogeneous polynomial algebra and explicit solutions.
//! - [`solver`]: PSOR, complementarity checks, obstacle normalization.
//! - [`functionals`]: radial profiles and monotonicity functionals.
//! - [`classifier`]: free-boundary extraction and stratification.
//! - [`verify`]: the acceptance criteria, shared by tests and the CLI.

pub mod classifier;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod poly;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
