use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::quadrature::check_radius;
use crate::geometry::{ScalarField, SphereRule, MAX_DIM};

use super::profile::{radial_profile, sphere_integral};

/// Normalization of a rescaling `u(x0 + r x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RescaleMode {
    /// Divide by `(r^{-(n-1)} H(r))^{1/2}`, giving unit `L^2(dB_1)` norm.
    L2,
    /// Divide by `r^kappa`.
    Homogeneous(f64),
}

#[derive(Debug, Clone)]
pub struct Rescaled {
    pub field: ScalarField,
    pub normalizer: f64,
    /// `\int_{dB_1} u_r^2` measured on the resampled field, when the unit
    /// sphere lies inside its valid region.
    pub unit_sphere_norm: Option<f64>,
}

/// Resample `u(x0 + r x) / normalizer` on the grid of `u`.
///
/// Nodes whose preimage leaves the valid region of `u` hold `NaN`. For an
/// even field and a thin-plane centre the result is even by construction.
pub fn rescale(u: &ScalarField, x0: &[f64], r: f64, mode: RescaleMode) -> Result<Rescaled> {
    let grid = *u.grid();
    let n = grid.n();
    let h = grid.h();
    if x0.len() != n {
        return Err(Error::Argument(format!(
            "centre has {} coordinates, grid dimension is {n}",
            x0.len()
        )));
    }
    if !(r >= 4.0 * h - 1e-12) {
        return Err(Error::Domain(format!(
            "rescaling radius {r} below 4h = {}",
            4.0 * h
        )));
    }
    let edge = u.dist_to_edge(x0).min(grid.dist_to_boundary(x0));
    if edge <= 0.0 {
        return Err(Error::Domain(format!("centre {x0:?} outside the valid region")));
    }
    let normalizer = match mode {
        RescaleMode::L2 => {
            check_radius(&grid, edge, r)?;
            let hh = sphere_integral(u, x0, r, |x| u.interp_raw(x).powi(2));
            if !(hh > 0.0) {
                return Err(Error::DegenerateRescale(format!(
                    "H({r}) = {hh} about {x0:?}"
                )));
            }
            (hh / r.powi(n as i32 - 1)).sqrt()
        }
        RescaleMode::Homogeneous(k) => r.powf(k),
    };
    let mut lim = [0.0; MAX_DIM];
    for k in 0..n {
        lim[k] = u.extent() - x0[k].abs();
    }
    let extent = lim[..n]
        .iter()
        .map(|l| l / r)
        .fold(1.0, f64::min);
    let symmetric = u.is_even() && x0[n - 1] == 0.0;
    let m = grid.m();
    let c = grid.center_index();
    let mut values = vec![f64::NAN; grid.len()];
    let mut y = [0.0; MAX_DIM];
    let inv = 1.0 / normalizer;
    for flat in 0..grid.len() {
        if symmetric && flat % m < c {
            continue;
        }
        let x = grid.point(flat);
        let mut inside = true;
        for k in 0..n {
            y[k] = x0[k] + r * x[k];
            if (y[k]).abs() > u.extent() + 1e-12 || y[k].abs() > 1.0 + 1e-12 {
                inside = false;
            }
        }
        if !inside {
            continue;
        }
        let v = u.interp_raw(&y[..n]) * inv;
        values[flat] = v;
        if symmetric {
            values[grid.mirror(flat)] = v;
        }
    }
    let field = ScalarField::from_parts(grid, values, symmetric, extent);
    let unit_sphere_norm = (extent >= 1.0).then(|| {
        let rule = SphereRule::for_radius(&grid, 1.0);
        rule.integrate(&[0.0; MAX_DIM][..n], 1.0, |x| field.interp_raw(x).powi(2))
    });
    Ok(Rescaled {
        field,
        normalizer,
        unit_sphere_norm,
    })
}

/// Outcome of the scale-invariance check `N(rho, u_r) = N(r rho, u)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingCheck {
    pub r: f64,
    pub rho: f64,
    pub rescaled: f64,
    pub direct: f64,
    pub residual: f64,
}

pub fn frequency_scaling_check(u: &ScalarField, x0: &[f64], r: f64, rho: f64) -> Result<ScalingCheck> {
    let n = u.grid().n();
    let ur = rescale(u, x0, r, RescaleMode::L2)?;
    let origin = vec![0.0; n];
    let pr = radial_profile(&ur.field, &origin, &[rho])?;
    let pd = radial_profile(u, x0, &[r * rho])?;
    if pr.is_empty() || pd.is_empty() {
        return Err(Error::DegenerateRescale("H vanishes at the tested radius".into()));
    }
    let a = pr.frequency()[0];
    let b = pd.frequency()[0];
    Ok(ScalingCheck {
        r,
        rho,
        rescaled: a,
        direct: b,
        residual: (a - b).abs(),
    })
}
