use super::harmonic::harmonic_extend_poly;
use super::polynomial::{rat_from_f64, Poly};
use super::text::{parse_poly, write_poly_inline};
use crate::error::{Error, Result};

/// Thin obstacle `phi(x')` on the plane `{x_n = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstacle {
    Zero,
    /// Exact polynomial in the `n - 1` plane variables.
    Polynomial(Poly),
}

impl Obstacle {
    /// Parse `zero` or polynomial text in `plane_vars` variables.
    ///
    /// Named non-polynomial obstacles are recognised and rejected with an
    /// unsupported-obstacle error.
    pub fn parse(spec: &str, plane_vars: usize) -> Result<Self> {
        let s = spec.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("zero") || s == "0" {
            return Ok(Obstacle::Zero);
        }
        if s.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(Error::UnsupportedObstacle(format!(
                "'{s}' is not a polynomial; only exact polynomial obstacles are supported"
            )));
        }
        let p = parse_poly(s, plane_vars)?;
        Ok(Obstacle::from_poly(p))
    }

    pub fn from_poly(p: Poly) -> Self {
        if p.is_zero() {
            Obstacle::Zero
        } else {
            Obstacle::Polynomial(p)
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Obstacle::Zero)
    }

    pub fn poly(&self, plane_vars: usize) -> Poly {
        match self {
            Obstacle::Zero => Poly::zero(plane_vars),
            Obstacle::Polynomial(p) => p.clone(),
        }
    }

    /// Value at a plane point `x'`.
    pub fn eval(&self, xp: &[f64]) -> f64 {
        match self {
            Obstacle::Zero => 0.0,
            Obstacle::Polynomial(p) => p.eval(xp),
        }
    }

    /// Single-line text form (`zero` or `;`-separated terms).
    pub fn to_text(&self) -> String {
        match self {
            Obstacle::Zero => "zero".into(),
            Obstacle::Polynomial(p) => write_poly_inline(p),
        }
    }
}

/// Taylor data of an obstacle at a plane point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorObstacle {
    /// `Q_k(y) = sum_{|alpha| <= k} D^alpha phi(x0) y^alpha / alpha!`,
    /// in the recentred plane variables `y = x' - x0`.
    pub q: Poly,
    /// Harmonic extension of `Q_k` to `R^n`, even in `x_n`.
    pub q_ext: Poly,
    /// `phi(x0 + y)` in the recentred variables.
    pub shifted: Poly,
}

/// Order-`k` Taylor polynomial of `phi` at the plane point `x0` and its
/// harmonic extension. Exact because `phi` is polynomial and `x0` is
/// converted to a rational without rounding.
pub fn taylor_obstacle(phi: &Obstacle, x0: &[f64], k: u32) -> Result<TaylorObstacle> {
    let d = x0.len();
    let base = phi.poly(d);
    if base.nvars() != d {
        return Err(Error::Argument(format!(
            "obstacle has {} variables, point has {d}",
            base.nvars()
        )));
    }
    let a = x0.iter().map(|&v| rat_from_f64(v)).collect::<Result<Vec<_>>>()?;
    let shifted = base.shift(&a)?;
    let q = shifted.truncate(k);
    let q_ext = harmonic_extend_poly(&q);
    Ok(TaylorObstacle { q, q_ext, shifted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_obstacle() {
        let t = taylor_obstacle(&Obstacle::Zero, &[0.3, -0.1], 2).unwrap();
        assert!(t.q.is_zero() && t.q_ext.is_zero());
    }

    #[test]
    fn square_at_origin_and_shifted() {
        let phi = Obstacle::parse("2 0 1", 2).unwrap();
        let t = taylor_obstacle(&phi, &[0.0, 0.0], 2).unwrap();
        let want = parse_poly("2 0 0 1; 0 0 2 -1", 3).unwrap();
        assert_eq!(t.q_ext, want);
        let t = taylor_obstacle(&phi, &[1.0, 0.0], 2).unwrap();
        assert_eq!(t.q, parse_poly("0 0 1; 1 0 2; 2 0 1", 2).unwrap());
        assert_eq!(t.q_ext.trace(), t.q);
        assert!(t.q_ext.laplacian().is_zero());
    }

    #[test]
    fn truncation_drops_high_orders() {
        let phi = Obstacle::parse("3 1", 1).unwrap();
        let t = taylor_obstacle(&phi, &[0.5], 2).unwrap();
        // (y + 1/2)^3 truncated at order 2: 1/8 + 3/4 y + 3/2 y^2
        assert_eq!(t.q, parse_poly("0 1/8; 1 3/4; 2 3/2", 1).unwrap());
        assert_eq!(t.shifted.degree(), Some(3));
        let t = taylor_obstacle(&phi, &[0.5], 6).unwrap();
        assert_eq!(t.q, t.shifted);
    }

    #[test]
    fn rejects_named_obstacles() {
        let e = Obstacle::parse("cos(x1)", 2).unwrap_err();
        assert!(matches!(e, Error::UnsupportedObstacle(_)));
        assert_eq!(Obstacle::parse("zero", 2).unwrap(), Obstacle::Zero);
        assert_eq!(Obstacle::parse("2 0 0", 2).unwrap(), Obstacle::Zero);
    }
}
