//! Exact polynomial algebra on `R^n` with rational coefficients, harmonic
//! extension from the thin plane, the class `P_kappa`, and the explicit
//! solutions used as test fields.

pub mod harmonic;
pub mod hat;
pub mod obstacle;
mod polynomial;
pub mod text;

pub use harmonic::{check_pkappa, harmonic_extend, harmonic_extend_poly, pkappa_basis, PkappaVerdict};
pub use hat::{HatSolution, Variant};
pub use obstacle::{taylor_obstacle, Obstacle, TaylorObstacle};
pub use polynomial::{rat, rat_from_f64, rat_int, Exponents, FloatPoly, HomPoly, Poly};

/// The harmonic quartic `x1^2 x2^2 - (x1^2 + x2^2) x3^2 + x3^4 / 3` whose
/// coincidence set is the union of the two coordinate axes of the plane.
pub fn cross_example() -> HomPoly {
    let p = text::parse_poly("2 2 0 1; 2 0 2 -1; 0 2 2 -1; 0 0 4 1/3", 3)
        .expect("static polynomial");
    HomPoly::new(p, 4).expect("homogeneous")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_example_values() {
        let u = cross_example();
        assert_eq!(u.eval(&[1.0, 1.0, 0.0]), 1.0);
        assert!((u.eval(&[0.0, 0.0, 1.0]) - 1.0 / 3.0).abs() < 1e-15);
        assert!(u.laplacian().is_zero());
        assert!(check_pkappa(&u, 10_000).is_member());
        assert!(u.euler_residual().is_zero());
    }
}
