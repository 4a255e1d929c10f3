use serde::Serialize;

use super::ClassifierConfig;
use crate::error::{Error, Result};
use crate::functionals::{geometric_radii, limit_at_zero, radial_profile, radius_range, RadialProfile};
use crate::geometry::ScalarField;
use crate::poly::Obstacle;
use crate::solver::normalize;

#[derive(Debug, Clone, Serialize)]
pub struct PointFrequency {
    pub kappa_raw: f64,
    pub kappa_snapped: Option<f64>,
    /// Radii and frequencies used for the fit.
    pub radii: Vec<f64>,
    pub freq: Vec<f64>,
}

/// Admissible frequencies `{2j - 1/2, 2j : j >= 1}` up to `max`.
pub fn admissible_frequencies(max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut j = 1.0;
    while 2.0 * j - 0.5 <= max {
        out.push(2.0 * j - 0.5);
        if 2.0 * j <= max {
            out.push(2.0 * j);
        }
        j += 1.0;
    }
    out
}

/// Nearest admissible value within `tol`, not exceeding `ceiling`.
pub fn snap_frequency(raw: f64, tol: f64, ceiling: Option<f64>) -> Option<f64> {
    if !raw.is_finite() {
        return None;
    }
    let top = ceiling.unwrap_or(f64::INFINITY).min(raw + tol + 2.0);
    admissible_frequencies(top)
        .into_iter()
        .filter(|v| (v - raw).abs() <= tol)
        .min_by(|a, b| (a - raw).abs().total_cmp(&(b - raw).abs()))
}

/// Frequency ladder about `x0` for the field `u`: geometric radii from
/// `freq_min_radius_h * h` to the smaller of `freq_max_radius` and the
/// admissible limit.
pub(crate) fn frequency_ladder(u: &ScalarField, x0: &[f64], cfg: &ClassifierConfig) -> Result<Vec<f64>> {
    let h = u.grid().h();
    let (lo, hi) = radius_range(u, x0);
    let lo = lo.max(cfg.freq_min_radius_h * h);
    let hi = hi.min(cfg.freq_max_radius);
    if !(hi > lo) {
        return Err(Error::InsufficientResolution(format!(
            "no admissible radii about {x0:?} (need r in [{lo:.4}, {hi:.4}])"
        )));
    }
    let count = cfg.freq_radii.max(cfg.freq_fit_count).max(3);
    Ok(geometric_radii(lo, hi, count))
}

/// Field and centre used for frequency analysis at `x0`: the normalized
/// field at the origin when the obstacle is nonzero, otherwise `u` at `x0`.
pub(crate) fn analysis_field(
    u: &ScalarField,
    obstacle: &Obstacle,
    x0: &[f64],
    k: u32,
) -> Result<(ScalarField, Vec<f64>)> {
    if obstacle.is_zero() {
        Ok((u.clone(), x0.to_vec()))
    } else {
        let v = normalize(u, obstacle, x0, k)?;
        Ok((v, vec![0.0; x0.len()]))
    }
}

/// Frequency `N(0+)` at a free-boundary point and its snapped value.
pub fn point_frequency(
    u: &ScalarField,
    x0: &[f64],
    obstacle: &Obstacle,
    k: u32,
    cfg: &ClassifierConfig,
) -> Result<PointFrequency> {
    let (field, center) = analysis_field(u, obstacle, x0, k)?;
    let prof = profile_at(&field, &center, cfg)?;
    frequency_from_profile(&prof, obstacle, k, cfg)
}

pub(crate) fn profile_at(field: &ScalarField, center: &[f64], cfg: &ClassifierConfig) -> Result<RadialProfile> {
    let radii = frequency_ladder(field, center, cfg)?;
    radial_profile(field, center, &radii)
}

pub(crate) fn frequency_from_profile(
    prof: &RadialProfile,
    obstacle: &Obstacle,
    k: u32,
    cfg: &ClassifierConfig,
) -> Result<PointFrequency> {
    if prof.len() < 3 {
        return Err(Error::InsufficientResolution(format!(
            "only {} radii with H > 0",
            prof.len()
        )));
    }
    let freq = prof.frequency_flux();
    let raw = limit_at_zero(&prof.radii, &freq, cfg.freq_fit_count)
        .ok_or_else(|| Error::InsufficientResolution("frequency fit failed".into()))?;
    let ceiling = (!obstacle.is_zero()).then(|| k as f64 - 0.5);
    Ok(PointFrequency {
        kappa_raw: raw,
        kappa_snapped: snap_frequency(raw, cfg.snap_tol, ceiling),
        radii: prof.radii.clone(),
        freq,
    })
}
