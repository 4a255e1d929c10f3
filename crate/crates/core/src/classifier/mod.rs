//! Free-boundary extraction and classification: coincidence set, free
//! boundary, frequency at each point, plane density of the coincidence set,
//! polynomial blowups and the stratification dimension.

mod blowup;
mod coincidence;
mod density;
mod frequency;
mod growth;
mod report;
mod stratify;

use serde::Serialize;

use crate::error::{Error, Result};

pub use blowup::{blowup_fit, fit_at_radius, sphere_distance, BlowupFit, FitStep, FIT_MAX_DEN};
pub use coincidence::{coincidence_set, free_boundary, PlaneSet};
pub use density::{density_profile, DensityProfile, DensitySample};
pub use frequency::{admissible_frequencies, point_frequency, snap_frequency, PointFrequency};
pub use growth::{growth_check, GrowthCheck};
pub use report::{
    classify_all, classify_point, continuity_check, ContinuityCheck, FitResidual, FreeBoundaryReport,
    PointClass, PointRecord, PointSelection, REPORT_VERSION,
};
pub use stratify::{stratify, RankMode};

/// Classifier tolerances and radius ladders. Radii given as `*_h` are in
/// units of the grid spacing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierConfig {
    pub tol_lambda: f64,
    pub snap_tol: f64,
    pub theta: f64,
    pub density_min_radius_h: f64,
    pub density_max_radius: f64,
    pub density_radii: usize,
    pub freq_min_radius_h: f64,
    pub freq_max_radius: f64,
    pub freq_radii: usize,
    pub freq_fit_count: usize,
    pub fit_min_radius_h: f64,
    pub fit_max_radius: f64,
    pub fit_radii: usize,
    pub stratify_rel_tol: f64,
    pub tol_fit: f64,
    pub max_points: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            tol_lambda: 1e-9,
            snap_tol: 0.15,
            theta: 0.1,
            density_min_radius_h: 16.0,
            density_max_radius: 0.5,
            density_radii: 8,
            freq_min_radius_h: 4.0,
            freq_max_radius: 0.5,
            freq_radii: 24,
            freq_fit_count: 8,
            fit_min_radius_h: 8.0,
            fit_max_radius: 0.4,
            fit_radii: 5,
            stratify_rel_tol: 0.05,
            tol_fit: 0.02,
            max_points: 64,
        }
    }
}

impl ClassifierConfig {
    /// Set one parameter by name. Returns `Ok(false)` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        fn f(key: &str, v: &str) -> Result<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x >= 0.0)
                .ok_or_else(|| Error::Config(format!("bad value for {key}: '{v}'")))
        }
        fn u(key: &str, v: &str) -> Result<usize> {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("bad value for {key}: '{v}'")))
        }
        match key {
            "tol_lambda" => self.tol_lambda = f(key, value)?,
            "snap_tol" => self.snap_tol = f(key, value)?,
            "theta" => self.theta = f(key, value)?,
            "density_min_radius_h" => self.density_min_radius_h = f(key, value)?,
            "density_max_radius" => self.density_max_radius = f(key, value)?,
            "density_radii" => self.density_radii = u(key, value)?,
            "freq_min_radius_h" => self.freq_min_radius_h = f(key, value)?,
            "freq_max_radius" => self.freq_max_radius = f(key, value)?,
            "freq_radii" => self.freq_radii = u(key, value)?,
            "freq_fit_count" => self.freq_fit_count = u(key, value)?,
            "fit_min_radius_h" => self.fit_min_radius_h = f(key, value)?,
            "fit_max_radius" => self.fit_max_radius = f(key, value)?,
            "fit_radii" => self.fit_radii = u(key, value)?,
            "stratify_rel_tol" => self.stratify_rel_tol = f(key, value)?,
            "tol_fit" => self.tol_fit = f(key, value)?,
            "max_points" => self.max_points = u(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Parse `key = value` lines (`#` comments). Unknown keys are errors.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = ClassifierConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected key = value, got '{line}'")))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::parse(line_no, format!("duplicate key '{key}'")));
            }
            match cfg.set(key, value.trim()) {
                Ok(true) => {}
                Ok(false) => return Err(Error::parse(line_no, format!("unknown key '{key}'"))),
                Err(e) => return Err(Error::parse(line_no, e.to_string())),
            }
        }
        Ok(cfg)
    }

    pub fn to_config_string(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        let mut out = String::new();
        if let serde_json::Value::Object(map) = v {
            for (k, v) in map {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }
}
