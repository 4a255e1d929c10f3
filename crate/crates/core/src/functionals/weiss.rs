use serde::Serialize;

use crate::error::Result;
use crate::geometry::{ScalarField, MAX_DIM};

use super::profile::{radial_profile, sphere_integral};

/// Both sides of `W_k'(r) = 2 r^{-(n+2k)} \int_{dB_r} ((x-x0).grad u - k u)^2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeissIdentity {
    pub r: f64,
    pub kappa: f64,
    pub delta: f64,
    /// Centred difference of `W_k` over `[r - delta, r + delta]`.
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / (|rhs| + eps)`.
    pub residual: f64,
    pub eps: f64,
}

/// Relative floor of the residual denominator, as a fraction of the scale
/// `2 k^2 H(r) / r^{n+2k}` of the right-hand side integrand.
pub const WEISS_EPS_FRACTION: f64 = 0.01;

/// Check the Weiss derivative identity at radius `r` about `x0`, with the
/// difference step `delta = max(2h, 0.05 r)`.
pub fn weiss_derivative_check(u: &ScalarField, x0: &[f64], kappa: f64, r: f64) -> Result<WeissIdentity> {
    let grid = u.grid();
    let n = grid.n();
    let delta = (2.0 * grid.h()).max(0.05 * r);
    let prof = radial_profile(u, x0, &[r - delta, r, r + delta])?;
    let nf = n as f64;
    let (lhs, h_r) = if prof.len() == 3 {
        let w = prof.weiss(kappa).w;
        ((w[2] - w[0]) / (prof.radii[2] - prof.radii[0]), prof.h[1])
    } else {
        (0.0, 0.0)
    };
    let mut gr = [0.0; MAX_DIM];
    let integral = sphere_integral(u, x0, r, |x| {
        u.grad_raw(x, &mut gr);
        let mut dot = 0.0;
        for k in 0..n {
            dot += (x[k] - x0[k]) * gr[k];
        }
        let e = dot - kappa * u.interp_raw(x);
        e * e
    });
    let scale = r.powf(-(nf + 2.0 * kappa));
    let rhs = 2.0 * scale * integral;
    let eps = WEISS_EPS_FRACTION * 2.0 * kappa * kappa * h_r * scale;
    let denom = rhs.abs() + eps;
    let residual = if denom > 0.0 { (lhs - rhs).abs() / denom } else { 0.0 };
    Ok(WeissIdentity {
        r,
        kappa,
        delta,
        lhs,
        rhs,
        residual,
        eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::poly::HatSolution;

    #[test]
    fn hat_identity() {
        let g = Grid::new(2, 513).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let u = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        let c = weiss_derivative_check(&u, &[0.0, 0.0], 1.0, 0.3).unwrap();
        assert!(c.residual < 0.05, "{c:?}");
        let c = weiss_derivative_check(&u, &[0.0, 0.0], 1.5, 0.3).unwrap();
        assert!(c.residual < 0.05, "{c:?}");
    }
}
