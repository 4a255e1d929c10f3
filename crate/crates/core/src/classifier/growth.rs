use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::linear_fit;
use crate::geometry::{ScalarField, SphereRule, MAX_DIM};

#[derive(Debug, Clone, Serialize)]
pub struct GrowthCheck {
    pub radii: Vec<f64>,
    /// `sup_{dB_r(x0)} |u|` at each radius.
    pub sup: Vec<f64>,
    /// Slope of `log sup` against `log r`.
    pub slope: f64,
    /// Range of `sup / r^kappa` over the ladder.
    pub c_min: f64,
    pub c_max: f64,
}

impl GrowthCheck {
    /// Slope within `tol` of `kappa` and a positive growth constant.
    pub fn passes(&self, kappa: f64, tol: f64) -> bool {
        (self.slope - kappa).abs() <= tol && self.c_min > 0.0
    }
}

/// Growth of `|u|` about `x0` on the given radii.
pub fn growth_check(u: &ScalarField, x0: &[f64], kappa: f64, radii: &[f64]) -> Result<GrowthCheck> {
    let grid = u.grid();
    let n = grid.n();
    if radii.len() < 2 {
        return Err(Error::Argument("growth check needs at least two radii".into()));
    }
    let mut x = [0.0; MAX_DIM];
    let sup: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let rule = SphereRule::for_radius(grid, r);
            let mut best = 0.0f64;
            for (dir, _) in rule.iter() {
                for k in 0..n {
                    x[k] = x0[k] + r * dir[k];
                }
                best = best.max(u.interp_raw(&x[..n]).abs());
            }
            best
        })
        .collect();
    if sup.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::Domain(format!("u vanishes on a sphere about {x0:?}")));
    }
    let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ls: Vec<f64> = sup.iter().map(|s| s.ln()).collect();
    let (_, slope) = linear_fit(&lr, &ls).ok_or_else(|| Error::Fit("degenerate radius ladder".into()))?;
    let cs: Vec<f64> = radii.iter().zip(&sup).map(|(r, s)| s / r.powf(kappa)).collect();
    Ok(GrowthCheck {
        radii: radii.to_vec(),
        slope,
        c_min: cs.iter().copied().fold(f64::INFINITY, f64::min),
        c_max: cs.iter().copied().fold(0.0, f64::max),
        sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::poly::cross_example;

    #[test]
    fn homogeneous_growth() {
        let g = Grid::new(3, 65).unwrap();
        let p = cross_example().to_float();
        let u = ScalarField::sample(g, |x| p.eval(x)).unwrap();
        let c = growth_check(&u, &[0.0; 3], 4.0, &[0.2, 0.3, 0.4, 0.5]).unwrap();
        assert!(c.passes(4.0, 0.1), "{c:?}");
        assert!((c.c_max / c.c_min - 1.0) < 0.05);
    }
}
