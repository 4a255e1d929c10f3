//! Uniform grids on `[-1, 1]^n`, scalar fields with even symmetry in `x_n`,
//! multilinear interpolation, and sphere/ball quadrature.

mod field;
mod grid;
pub mod io;
pub mod quadrature;

pub use field::ScalarField;
pub use grid::{Grid, MAX_DIM};
pub use quadrature::{integrate_ball, integrate_sphere, SphereRule};
