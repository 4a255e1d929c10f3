use std::f64::consts::PI;

use super::grid::{Grid, MAX_DIM};
use crate::error::{Error, Result};

/// Product quadrature on the unit sphere `S^{n-1}`.
///
/// For `n = 2` this is the midpoint-offset trapezoid rule on `K` uniform
/// angles. For `n = 3` it is a latitude-longitude rule with the pole on the
/// `x_n` axis, midpoint nodes in the polar angle weighted by `sin(theta)`,
/// and `2 K_theta` uniform longitudes. Node counts are even, so the thin
/// plane `{x_n = 0}` separates the nodes symmetrically.
#[derive(Debug, Clone)]
pub struct SphereRule {
    n: usize,
    dirs: Vec<[f64; MAX_DIM]>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// Rule for a sphere of radius `r` with arc spacing at most `h / 2`.
    pub fn for_radius(grid: &Grid, r: f64) -> Self {
        let spacing = 0.5 * grid.h();
        let k = match grid.n() {
            2 => (2.0 * PI * r / spacing).ceil() as usize,
            _ => (PI * r / spacing).ceil() as usize,
        };
        Self::with_resolution(grid.n(), k)
    }

    /// `k` angles for `n = 2`; `k` polar by `2k` azimuthal nodes for `n = 3`.
    pub fn with_resolution(n: usize, k: usize) -> Self {
        let k = (k.max(8) + 1) & !1;
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        if n == 2 {
            let w = 2.0 * PI / k as f64;
            for j in 0..k {
                let t = (j as f64 + 0.5) * w;
                dirs.push([t.cos(), t.sin(), 0.0]);
                weights.push(w);
            }
        } else {
            let k_phi = 2 * k;
            let dt = PI / k as f64;
            let dp = 2.0 * PI / k_phi as f64;
            for j in 0..k {
                let theta = (j as f64 + 0.5) * dt;
                let (st, ct) = theta.sin_cos();
                // exact ring weight: integral of sin over the polar panel
                let w_ring = (j as f64 * dt).cos() - ((j + 1) as f64 * dt).cos();
                for l in 0..k_phi {
                    let phi = l as f64 * dp;
                    let (sp, cp) = phi.sin_cos();
                    dirs.push([st * cp, st * sp, ct]);
                    weights.push(w_ring * dp);
                }
            }
        }
        SphereRule { n, dirs, weights }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// Unit directions and weights (weights sum to the area of `S^{n-1}`).
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.dirs
            .iter()
            .zip(&self.weights)
            .map(move |(d, &w)| (&d[..self.n], w))
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Integrate `g` over the sphere of radius `r` about `center`; `g`
    /// receives absolute points.
    pub fn integrate(&self, center: &[f64], r: f64, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        let n = self.n;
        let scale = r.powi(n as i32 - 1);
        let mut x = [0.0; MAX_DIM];
        let mut acc = 0.0;
        for (d, w) in self.dirs.iter().zip(&self.weights) {
            for k in 0..n {
                x[k] = center[k] + r * d[k];
            }
            acc += w * g(&x[..n]);
        }
        acc * scale
    }
}

/// Check `2h <= r <= dist(center, edge) - 2h`, where `edge_dist` is the
/// sup-norm distance from `center` to the edge of the valid region.
pub fn check_radius(grid: &Grid, edge_dist: f64, r: f64) -> Result<()> {
    let h = grid.h();
    let lo = 2.0 * h;
    let hi = edge_dist - 2.0 * h;
    if !(r.is_finite() && r >= lo - 1e-12 && r <= hi + 1e-12) {
        return Err(Error::Domain(format!(
            "radius {r} outside admissible range [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Integral of `g` over the sphere `\partial B_r(center)`.
pub fn integrate_sphere(
    grid: &Grid,
    center: &[f64],
    r: f64,
    g: impl FnMut(&[f64]) -> f64,
) -> Result<f64> {
    check_center(grid, center)?;
    check_radius(grid, grid.dist_to_boundary(center), r)?;
    Ok(SphereRule::for_radius(grid, r).integrate(center, r, g))
}

/// Integral of `g` over the ball `B_r(center)` as a lattice node sum.
///
/// Nodes deeper than `h/2` inside get weight one; nodes within `h/2` of the
/// sphere get a weight ramping linearly from one to zero across the shell,
/// so a node exactly on the sphere counts one half.
pub fn integrate_ball(
    grid: &Grid,
    center: &[f64],
    r: f64,
    mut g: impl FnMut(&[f64]) -> f64,
) -> Result<f64> {
    check_center(grid, center)?;
    check_radius(grid, grid.dist_to_boundary(center), r)?;
    let n = grid.n();
    let h = grid.h();
    let mut acc = 0.0;
    for (flat, dist) in ball_nodes(grid, center, r + 0.5 * h) {
        let w = ball_weight(dist, r, h);
        if w > 0.0 {
            let x = grid.point(flat);
            acc += w * g(&x[..n]);
        }
    }
    Ok(acc * h.powi(n as i32))
}

/// Node weight for the ball of radius `r` at distance `dist` from the centre.
#[inline]
pub fn ball_weight(dist: f64, r: f64, h: f64) -> f64 {
    (0.5 + (r - dist) / h).clamp(0.0, 1.0)
}

/// All nodes within distance `reach` of `center`, with their distances.
pub(crate) fn ball_nodes(grid: &Grid, center: &[f64], reach: f64) -> Vec<(usize, f64)> {
    let n = grid.n();
    let m = grid.m() as isize;
    let mut lo = [0isize; MAX_DIM];
    let mut hi = [0isize; MAX_DIM];
    for k in 0..n {
        lo[k] = (grid.lattice_coord(center[k] - reach).floor() as isize).clamp(0, m - 1);
        hi[k] = (grid.lattice_coord(center[k] + reach).ceil() as isize).clamp(0, m - 1);
    }
    let mut out = Vec::new();
    let mut idx = lo;
    loop {
        let mut d2 = 0.0;
        let mut flat = 0usize;
        for k in 0..n {
            let c = grid.coord(idx[k] as usize) - center[k];
            d2 += c * c;
            flat = flat * grid.m() + idx[k] as usize;
        }
        let d = d2.sqrt();
        if d <= reach {
            out.push((flat, d));
        }
        // odometer increment, last axis fastest
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < hi[k] {
                idx[k] += 1;
                break;
            }
            idx[k] = lo[k];
        }
    }
}

fn check_center(grid: &Grid, center: &[f64]) -> Result<()> {
    if center.len() != grid.n() || !grid.contains(center) {
        return Err(Error::Domain(format!(
            "centre {center:?} is not a point of the cube"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScalarField;
    use crate::poly::hat::HatSolution;

    #[test]
    fn circumference_and_sphere_area() {
        let g2 = Grid::new(2, 129).unwrap();
        let c = integrate_sphere(&g2, &[0.0, 0.0], 0.5, |_| 1.0).unwrap();
        assert!((c - PI).abs() < 1e-12);
        let g3 = Grid::new(3, 65).unwrap();
        let a = integrate_sphere(&g3, &[0.0, 0.0, 0.0], 0.5, |_| 1.0).unwrap();
        assert!((a - PI).abs() < 1e-12, "{a}");
    }

    #[test]
    fn sphere_rule_polynomial_moments() {
        // mean of x_3^2 over S^2 is 1/3
        let rule = SphereRule::with_resolution(3, 64);
        let v: f64 = rule.iter().map(|(d, w)| w * d[2] * d[2]).sum();
        assert!((v - 4.0 * PI / 3.0).abs() < 2e-3, "{v}");
        let rule = SphereRule::with_resolution(2, 64);
        let v: f64 = rule.iter().map(|(d, w)| w * d[0].powi(4)).sum();
        assert!((v - 0.75 * PI).abs() < 1e-12, "{v}");
    }

    #[test]
    fn radius_range() {
        let g = Grid::new(2, 65).unwrap();
        assert!(integrate_sphere(&g, &[0.0, 0.0], 0.01, |_| 1.0).is_err());
        assert!(integrate_sphere(&g, &[0.0, 0.0], 0.99, |_| 1.0).is_err());
        assert!(integrate_ball(&g, &[0.0, 0.0], 0.99, |_| 1.0).is_err());
        assert!(integrate_ball(&g, &[0.5, 0.0], 0.45, |_| 1.0).is_err());
    }

    #[test]
    fn disk_area() {
        let g = Grid::new(2, 129).unwrap();
        let a = integrate_ball(&g, &[0.0, 0.0], 0.5, |_| 1.0).unwrap();
        assert!((a - 0.25 * PI).abs() < g.h(), "{a}");
        assert_eq!(integrate_ball(&g, &[0.0, 0.0], 0.5, |_| 0.0).unwrap(), 0.0);
    }

    #[test]
    fn hat_sphere_scaling() {
        // H(r) = r^{n-1+2 kappa} H(1): H(0.5) / H(0.25) = 2^4
        let g = Grid::new(2, 513).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let f = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        let h = |r: f64| integrate_sphere(&g, &[0.0, 0.0], r, |x| f.interp_raw(x).powi(2)).unwrap();
        let ratio = h(0.5) / h(0.25);
        assert!((ratio / 16.0 - 1.0).abs() < 2e-3, "{ratio}");
    }

    #[test]
    fn hat_ball_scaling() {
        // D(r) = r^{n-2+2 kappa} D(1): D(0.5) / D(0.25) = 2^3
        let g = Grid::new(2, 513).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let d = |r: f64| {
            integrate_ball(&g, &[0.0, 0.0], r, |x| {
                let gr = hat.grad(x);
                gr[0] * gr[0] + gr[1] * gr[1]
            })
            .unwrap()
        };
        let ratio = d(0.5) / d(0.25);
        assert!((ratio / 8.0 - 1.0).abs() < 5e-3, "{ratio}");
    }
}
