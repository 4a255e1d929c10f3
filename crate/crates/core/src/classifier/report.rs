use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::blowup::{blowup_fit, fit_ladder, sphere_distance};
use super::coincidence::{coincidence_set, free_boundary};
use super::density::{density_ladder, density_profile, DensitySample};
use super::frequency::{analysis_field, frequency_from_profile, profile_at};
use super::growth::growth_check;
use super::stratify::{stratify, RankMode};
use super::ClassifierConfig;
use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use crate::poly::text::write_poly_inline;
use crate::poly::{HomPoly, Obstacle};

pub const REPORT_VERSION: &str = "fbreport/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    #[serde(rename = "regular")]
    Regular,
    #[serde(rename = "singular")]
    Singular,
    #[serde(rename = "other")]
    Other,
    #[serde(rename = "degenerate?")]
    Degenerate,
    /// No frequency could be measured (for instance too close to the edge).
    #[serde(rename = "unresolved")]
    Unresolved,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResidual {
    pub r: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub x0: Vec<f64>,
    pub kappa_raw: Option<f64>,
    #[serde(serialize_with = "snapped")]
    pub kappa_snapped: Option<f64>,
    pub class: PointClass,
    pub p_hat: Option<String>,
    pub residuals: Vec<FitResidual>,
    pub d: Option<usize>,
    pub density: Vec<DensitySample>,
    pub singular_flag: bool,
    pub fit_drift: Option<f64>,
    pub growth_slope: Option<f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub blowup: Option<HomPoly>,
}

fn snapped<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(k) => s.serialize_f64(*k),
        None => s.serialize_str("unsnapped"),
    }
}

impl PointRecord {
    fn new(x0: &[f64]) -> Self {
        PointRecord {
            x0: x0.to_vec(),
            kappa_raw: None,
            kappa_snapped: None,
            class: PointClass::Unresolved,
            p_hat: None,
            residuals: Vec::new(),
            d: None,
            density: Vec::new(),
            singular_flag: false,
            fit_drift: None,
            growth_slope: None,
            notes: Vec::new(),
            blowup: None,
        }
    }

    /// Even snapped frequency, as an integer.
    pub fn even_kappa(&self) -> Option<u32> {
        self.kappa_snapped
            .filter(|k| k.fract() == 0.0 && (*k as u32) % 2 == 0)
            .map(|k| k as u32)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportConfig {
    pub n: usize,
    pub m: usize,
    pub obstacle: String,
    pub k: u32,
    pub classifier: ClassifierConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeBoundaryReport {
    pub version: &'static str,
    pub config: ReportConfig,
    pub coincidence_nodes: usize,
    pub free_boundary_nodes: usize,
    pub points: Vec<PointRecord>,
}

impl FreeBoundaryReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn count(&self, class: PointClass) -> usize {
        self.points.iter().filter(|p| p.class == class).count()
    }

    /// Record whose centre is closest to `x0`.
    pub fn nearest(&self, x0: &[f64]) -> Option<&PointRecord> {
        self.points.iter().min_by(|a, b| {
            dist(&a.x0, x0).total_cmp(&dist(&b.x0, x0))
        })
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Which free-boundary points are classified.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSelection {
    /// Every node of `Gamma`, thinned by a stride when there are more than
    /// `max_points` of them.
    Auto,
    All,
    /// Every `s`-th node of `Gamma` in plane-lexicographic order.
    Stride(usize),
    /// Given plane points (last coordinate zero).
    Explicit(Vec<Vec<f64>>),
}

/// Classify one point. Errors end up in the record rather than aborting.
pub fn classify_point(
    u: &ScalarField,
    obstacle: &Obstacle,
    k: u32,
    lambda: &super::PlaneSet,
    x0: &[f64],
    cfg: &ClassifierConfig,
) -> PointRecord {
    let mut rec = PointRecord::new(x0);
    let ladder = density_ladder(lambda, x0, cfg);
    if ladder.len() < 2 {
        rec.notes.push("no admissible density radii".into());
        return rec;
    }
    let dens = density_profile(lambda, x0, &ladder, cfg.theta);
    rec.density = dens.samples;
    rec.singular_flag = dens.singular;

    let (field, center) = match analysis_field(u, obstacle, x0, k) {
        Ok(v) => v,
        Err(e) => {
            rec.notes.push(format!("normalization: {e}"));
            return rec;
        }
    };
    let freq = profile_at(&field, &center, cfg).and_then(|p| frequency_from_profile(&p, obstacle, k, cfg));
    let freq = match freq {
        Ok(f) => f,
        Err(e) => {
            rec.notes.push(format!("frequency: {e}"));
            return rec;
        }
    };
    rec.kappa_raw = Some(freq.kappa_raw);
    rec.kappa_snapped = freq.kappa_snapped;

    let Some(kappa) = rec.even_kappa() else {
        rec.class = match rec.kappa_snapped {
            Some(s) if s == 1.5 && !rec.singular_flag => PointClass::Regular,
            _ => PointClass::Other,
        };
        if rec.singular_flag {
            rec.notes.push("density vanishes but frequency is not even".into());
        }
        return rec;
    };
    if !rec.singular_flag {
        rec.class = PointClass::Other;
        rec.notes.push("even frequency but density does not vanish".into());
        return rec;
    }

    let fit = match blowup_fit(&field, &center, kappa, cfg) {
        Ok(f) => f,
        Err(e) => {
            rec.class = PointClass::Other;
            rec.notes.push(format!("blowup fit: {e}"));
            return rec;
        }
    };
    rec.residuals = fit
        .radii
        .iter()
        .zip(&fit.residuals)
        .map(|(&r, &residual)| FitResidual { r, residual })
        .collect();
    rec.fit_drift = Some(fit.drift);
    rec.p_hat = Some(write_poly_inline(fit.p_hat.poly()));
    if let Ok(ladder) = fit_ladder(&field, &center, cfg) {
        let mut radii = ladder;
        radii.reverse();
        if let Ok(g) = growth_check(&field, &center, kappa as f64, &radii) {
            rec.growth_slope = Some(g.slope);
        }
    }
    match stratify(&fit.p_hat, RankMode::Numeric { rel_tol: cfg.stratify_rel_tol }) {
        Ok(d) => {
            rec.d = Some(d);
            rec.class = PointClass::Singular;
        }
        Err(e @ Error::DegenerateCandidate) => {
            rec.class = PointClass::Degenerate;
            rec.notes.push(e.to_string());
        }
        Err(e) => {
            rec.class = PointClass::Other;
            rec.notes.push(format!("stratify: {e}"));
        }
    }
    rec.blowup = Some(fit.p_hat);
    rec
}

/// Coincidence set, free boundary and a per-point classification.
pub fn classify_all(
    u: &ScalarField,
    obstacle: &Obstacle,
    k: u32,
    cfg: &ClassifierConfig,
    selection: &PointSelection,
) -> Result<FreeBoundaryReport> {
    let grid = *u.grid();
    let n = grid.n();
    if !obstacle.is_zero() && k < 2 {
        return Err(Error::Argument(format!(
            "nonzero obstacle needs a truncation order k >= 2, got {k}"
        )));
    }
    let lambda = coincidence_set(u, obstacle, cfg.tol_lambda);
    let gamma = free_boundary(&lambda);
    let nodes = gamma.nodes();
    let centers: Vec<Vec<f64>> = match selection {
        PointSelection::Explicit(pts) => {
            for p in pts {
                if p.len() != n || p[n - 1] != 0.0 {
                    return Err(Error::Argument(format!("{p:?} is not a thin-plane point")));
                }
            }
            pts.clone()
        }
        _ => {
            let stride = match selection {
                PointSelection::All => 1,
                PointSelection::Stride(s) => (*s).max(1),
                _ => nodes.len().div_ceil(cfg.max_points.max(1)).max(1),
            };
            nodes
                .iter()
                .step_by(stride)
                .map(|&f| grid.point(f)[..n].to_vec())
                .collect()
        }
    };
    let points: Vec<PointRecord> = centers
        .par_iter()
        .map(|x0| classify_point(u, obstacle, k, &lambda, x0, cfg))
        .collect();
    Ok(FreeBoundaryReport {
        version: REPORT_VERSION,
        config: ReportConfig {
            n,
            m: grid.m(),
            obstacle: obstacle.to_text(),
            k,
            classifier: cfg.clone(),
        },
        coincidence_nodes: lambda.len(),
        free_boundary_nodes: gamma.len(),
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityCheck {
    pub jumps: Vec<f64>,
    pub distances: Vec<f64>,
    /// Lipschitz constant estimated from the segment.
    pub lipschitz: f64,
    pub tol_fit: f64,
    pub max_jump: f64,
    pub pass: bool,
}

/// Blowup continuity along an ordered segment of singular points of equal
/// frequency: every adjacent `L^2(dB_1)` jump must stay below
/// `L |x0 - x0'| + tol_fit`, with `L` twice the lower median of the
/// observed ratios.
pub fn continuity_check(points: &[&PointRecord], tol_fit: f64) -> Result<ContinuityCheck> {
    if points.len() < 3 {
        return Err(Error::Argument(format!(
            "continuity check needs at least 3 singular points, got {}",
            points.len()
        )));
    }
    let mut polys = Vec::with_capacity(points.len());
    let kappa = points[0].even_kappa();
    for p in points {
        if p.class != PointClass::Singular {
            return Err(Error::Argument(format!("point {:?} is not singular", p.x0)));
        }
        if p.even_kappa() != kappa {
            return Err(Error::Argument(format!(
                "frequency mismatch: {:?} vs {:?} at {:?}",
                p.kappa_snapped, points[0].kappa_snapped, p.x0
            )));
        }
        polys.push(p.blowup.as_ref().ok_or_else(|| {
            Error::Argument(format!("point {:?} carries no blowup", p.x0))
        })?);
    }
    let mut jumps = Vec::new();
    let mut distances = Vec::new();
    for i in 1..points.len() {
        jumps.push(sphere_distance(polys[i - 1], polys[i]));
        distances.push(dist(&points[i - 1].x0, &points[i].x0));
    }
    let mut ratios: Vec<f64> = jumps.iter().zip(&distances).map(|(j, d)| j / d).collect();
    ratios.sort_by(f64::total_cmp);
    let lipschitz = 2.0 * ratios[(ratios.len() - 1) / 2];
    let pass = jumps
        .iter()
        .zip(&distances)
        .all(|(j, d)| *j <= lipschitz * d + tol_fit);
    Ok(ContinuityCheck {
        max_jump: jumps.iter().copied().fold(0.0, f64::max),
        jumps,
        distances,
        lipschitz,
        tol_fit,
        pass,
    })
}
