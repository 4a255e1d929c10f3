use serde::Serialize;

use super::coincidence::PlaneSet;
use super::ClassifierConfig;
use crate::functionals::geometric_radii;

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct DensitySample {
    pub r: f64,
    pub val: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityProfile {
    pub samples: Vec<DensitySample>,
    pub singular: bool,
}

/// Measure of the plane ball `B'_r` in `R^{n-1}`.
fn plane_ball_measure(d: usize, r: f64) -> f64 {
    if d == 1 {
        2.0 * r
    } else {
        std::f64::consts::PI * r * r
    }
}

/// Density of the coincidence set in plane balls about `x0`:
/// `#(Lambda in B'_r) h^{n-1} / |B'_r|`.
///
/// The singular flag requires the densities at the two smallest radii to be
/// below `theta` and the sequence to be non-increasing up to `h / r`
/// between neighbours.
pub fn density_profile(lambda: &PlaneSet, x0: &[f64], radii: &[f64], theta: f64) -> DensityProfile {
    let g = lambda.grid();
    let d = g.n() - 1;
    let cell = g.h().powi(d as i32);
    let samples: Vec<DensitySample> = radii
        .iter()
        .map(|&r| DensitySample {
            r,
            val: lambda.count_within(&x0[..d], r) as f64 * cell / plane_ball_measure(d, r),
        })
        .collect();
    let small = samples.len() >= 2 && samples[0].val < theta && samples[1].val < theta;
    let monotone = samples
        .windows(2)
        .all(|w| w[1].val <= w[0].val + g.h() / w[1].r);
    DensityProfile {
        singular: small && monotone,
        samples,
    }
}

/// Density ladder: geometric radii from `density_min_radius_h * h` to the
/// largest plane ball about `x0` that stays inside the cube.
pub(crate) fn density_ladder(lambda: &PlaneSet, x0: &[f64], cfg: &ClassifierConfig) -> Vec<f64> {
    let g = lambda.grid();
    let d = g.n() - 1;
    let edge = x0[..d].iter().map(|c| 1.0 - c.abs()).fold(f64::INFINITY, f64::min);
    let lo = cfg.density_min_radius_h * g.h();
    let hi = (edge - g.h()).min(cfg.density_max_radius);
    if hi <= lo {
        return Vec::new();
    }
    geometric_radii(lo, hi, cfg.density_radii.max(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::coincidence::coincidence_set;
    use crate::geometry::{Grid, ScalarField};
    use crate::poly::{cross_example, HatSolution, Obstacle};

    #[test]
    fn half_line_density() {
        let g = Grid::new(2, 257).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let u = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        let lambda = coincidence_set(&u, &Obstacle::Zero, 1e-9);
        let cfg = ClassifierConfig::default();
        let radii = density_ladder(&lambda, &[0.0, 0.0], &cfg);
        let p = density_profile(&lambda, &[0.0, 0.0], &radii, 0.1);
        assert!(!p.singular);
        assert!(p.samples.iter().all(|s| (s.val - 0.5).abs() < 0.05), "{:?}", p.samples);
    }

    #[test]
    fn axes_have_vanishing_density() {
        let g = Grid::new(3, 129).unwrap();
        let q = cross_example().to_float();
        let u = ScalarField::sample(g, |x| q.eval(x)).unwrap();
        let lambda = coincidence_set(&u, &Obstacle::Zero, 1e-9);
        let cfg = ClassifierConfig::default();
        for x0 in [[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, -0.3, 0.0]] {
            let radii = density_ladder(&lambda, &x0, &cfg);
            let p = density_profile(&lambda, &x0, &radii, 0.1);
            assert!(p.singular, "{x0:?} {:?}", p.samples);
        }
    }

    #[test]
    fn full_plane_density_is_one() {
        let g = Grid::new(3, 33).unwrap();
        let u = ScalarField::sample(g, |_| 0.0).unwrap();
        let lambda = coincidence_set(&u, &Obstacle::Zero, 1e-9);
        let p = density_profile(&lambda, &[0.0, 0.0, 0.0], &[0.3, 0.4, 0.5], 0.1);
        assert!(!p.singular);
        assert!(p.samples.iter().all(|s| (s.val - 1.0).abs() < 0.1));
    }
}
