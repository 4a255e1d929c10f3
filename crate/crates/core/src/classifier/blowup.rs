use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use super::ClassifierConfig;
use crate::error::{Error, Result};
use crate::functionals::{geometric_radii, radius_range};
use crate::geometry::{ScalarField, SphereRule, MAX_DIM};
use crate::poly::text::rat_approx;
use crate::poly::{pkappa_basis, FloatPoly, HomPoly};

/// Denominator bound used when rationalizing fitted coefficients.
pub const FIT_MAX_DEN: i64 = 10_000;

#[derive(Debug, Clone)]
pub struct BlowupFit {
    pub kappa: u32,
    /// Fitted blowup, rationalized in the `P_kappa` basis so it is exactly
    /// harmonic and even.
    pub p_hat: HomPoly,
    /// Float coefficients in the basis of harmonic extensions of
    /// `x'^alpha`, which are also the trace coefficients.
    pub coeffs: Vec<f64>,
    /// Decreasing radius ladder.
    pub radii: Vec<f64>,
    /// `L^2(dB_1)` misfit at each radius.
    pub residuals: Vec<f64>,
    /// Largest coefficient change between the two smallest radii.
    pub drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitStep {
    pub r: f64,
    pub residual: f64,
    pub coeffs: Vec<f64>,
}

/// Weighted least-squares projection of the homogeneous rescaling
/// `u(x0 + r y) / r^kappa`, sampled on the unit sphere, onto `P_kappa`.
pub fn fit_at_radius(
    u: &ScalarField,
    x0: &[f64],
    kappa: u32,
    r: f64,
    basis: &[FloatPoly],
) -> Result<FitStep> {
    let grid = u.grid();
    let n = grid.n();
    let rule = SphereRule::for_radius(grid, r);
    let rows = rule.len();
    let cols = basis.len();
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    let scale = r.powi(kappa as i32);
    let mut x = [0.0; MAX_DIM];
    for (i, (dir, w)) in rule.iter().enumerate() {
        let sw = w.sqrt();
        for k in 0..n {
            x[k] = x0[k] + r * dir[k];
        }
        let v = u.interp_raw(&x[..n]);
        if !v.is_finite() {
            return Err(Error::Domain(format!("sphere of radius {r} about {x0:?} leaves the data")));
        }
        b[i] = sw * v / scale;
        for (j, q) in basis.iter().enumerate() {
            a[(i, j)] = sw * q.eval(dir);
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin / smax < 1e-10 {
        return Err(Error::Fit(format!(
            "rank-deficient blowup fit at r = {r} (sigma ratio {:.3e})",
            smin / smax
        )));
    }
    let c = svd
        .solve(&b, 1e-14 * smax)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let resid = (&a * &c - &b).norm();
    Ok(FitStep {
        r,
        residual: resid,
        coeffs: c.iter().copied().collect(),
    })
}

/// Fit ladder: geometric radii from `fit_min_radius_h * h` to
/// `fit_max_radius`, clipped to the admissible range, largest first.
pub(crate) fn fit_ladder(u: &ScalarField, x0: &[f64], cfg: &ClassifierConfig) -> Result<Vec<f64>> {
    let h = u.grid().h();
    let (lo, hi) = radius_range(u, x0);
    let lo = lo.max(cfg.fit_min_radius_h * h);
    let hi = hi.min(cfg.fit_max_radius);
    if !(hi > lo) {
        return Err(Error::InsufficientResolution(format!(
            "no admissible fit radii about {x0:?}"
        )));
    }
    let mut radii = geometric_radii(lo, hi, cfg.fit_radii.max(2));
    radii.reverse();
    Ok(radii)
}

/// Blowup polynomial of even degree `kappa` at `x0`.
pub fn blowup_fit(u: &ScalarField, x0: &[f64], kappa: u32, cfg: &ClassifierConfig) -> Result<BlowupFit> {
    let n = u.grid().n();
    if x0.len() != n {
        return Err(Error::Argument(format!(
            "centre has {} coordinates, grid dimension is {n}",
            x0.len()
        )));
    }
    let basis = pkappa_basis(n, kappa)?;
    let fbasis: Vec<FloatPoly> = basis.iter().map(HomPoly::to_float).collect();
    let radii = fit_ladder(u, x0, cfg)?;
    let steps = radii
        .iter()
        .map(|&r| fit_at_radius(u, x0, kappa, r, &fbasis))
        .collect::<Result<Vec<_>>>()?;
    let last = steps.last().expect("nonempty ladder");
    let drift = if steps.len() >= 2 {
        let prev = &steps[steps.len() - 2];
        last.coeffs
            .iter()
            .zip(&prev.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let mut p_hat = HomPoly::zero(n, kappa);
    for (q, &c) in basis.iter().zip(&last.coeffs) {
        let c = rat_approx(c, FIT_MAX_DEN);
        if !c.is_zero() {
            p_hat = p_hat.add(&q.scale(&c))?;
        }
    }
    Ok(BlowupFit {
        kappa,
        p_hat,
        coeffs: last.coeffs.clone(),
        radii,
        residuals: steps.iter().map(|s| s.residual).collect(),
        drift,
    })
}

/// `L^2(dB_1)` distance between two homogeneous polynomials.
pub fn sphere_distance(p: &HomPoly, q: &HomPoly) -> f64 {
    let n = p.nvars();
    let fp = p.to_float();
    let fq = q.to_float();
    let rule = SphereRule::with_resolution(n, 64);
    rule.integrate(&[0.0; MAX_DIM][..n], 1.0, |x| (fp.eval(x) - fq.eval(x)).powi(2))
        .sqrt()
}
