use crate::error::{Error, Result};
use crate::geometry::quadrature::check_radius;
use crate::geometry::{ScalarField, MAX_DIM};
use crate::poly::{check_pkappa, HomPoly};

use super::profile::sphere_integral;

/// `M_k(r) = r^{-(n-1+2k)} \int_{dB_r(x0)} (u - p(x - x0))^2` for a candidate
/// `p` of even degree `k` that is harmonic and even in `x_n`.
pub fn monneau(u: &ScalarField, x0: &[f64], p: &HomPoly, radii: &[f64]) -> Result<Vec<f64>> {
    let grid = u.grid();
    let n = grid.n();
    let kappa = p.degree();
    if kappa % 2 == 1 || kappa == 0 {
        return Err(Error::Argument(format!(
            "Monneau functional needs an even positive degree, got {kappa}"
        )));
    }
    if p.nvars() != n {
        return Err(Error::Argument(format!(
            "polynomial has {} variables, grid dimension is {n}",
            p.nvars()
        )));
    }
    let verdict = check_pkappa(p, 64);
    if !verdict.is_structural() {
        return Err(Error::Argument(format!(
            "candidate is not harmonic and even: {}",
            verdict.describe()
        )));
    }
    if radii.is_empty() {
        return Err(Error::Argument("empty radius list".into()));
    }
    let edge = u.dist_to_edge(x0).min(grid.dist_to_boundary(x0));
    for &r in radii {
        check_radius(grid, edge, r)?;
    }
    let fp = p.to_float();
    let expo = n as f64 - 1.0 + 2.0 * kappa as f64;
    Ok(radii
        .iter()
        .map(|&r| {
            let mut y = [0.0; MAX_DIM];
            let s = sphere_integral(u, x0, r, |x| {
                for k in 0..n {
                    y[k] = x[k] - x0[k];
                }
                let d = u.interp_raw(x) - fp.eval(&y[..n]);
                d * d
            });
            s / r.powf(expo)
        })
        .collect())
}
