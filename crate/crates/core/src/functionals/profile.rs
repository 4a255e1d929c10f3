use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::quadrature::check_radius;
use crate::geometry::{ScalarField, SphereRule, MAX_DIM};

/// Radial quantities about a centre `x0`:
///
/// - `H(r)`, the integral of `u^2` over the sphere `dB_r(x0)`;
/// - `D(r)`, the integral of `|grad u|^2` over the ball `B_r(x0)`;
/// - `G(r)`, the integral of `u^2` over the ball;
/// - `I(r)`, the integral of `u u_nu` over the sphere.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub n: usize,
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    pub g: Vec<f64>,
    pub i: Vec<f64>,
    /// Grid spacing of the field the profile was measured on.
    pub spacing: f64,
}

/// Admissible radius range `[2h, dist(x0, edge) - 2h]`, capped at `1 - 2h`.
pub fn radius_range(u: &ScalarField, x0: &[f64]) -> (f64, f64) {
    let h = u.grid().h();
    let edge = u.dist_to_edge(x0).min(1.0);
    (2.0 * h, edge - 2.0 * h)
}

/// Geometric ladder of `count` radii from `lo` to `hi`.
pub fn geometric_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let q = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (q * i as f64).exp()).collect()
}

/// Default ladder: 40 geometric radii from 0.05 to 0.6, restricted to the
/// admissible range about `x0`.
pub fn default_radii(u: &ScalarField, x0: &[f64]) -> Vec<f64> {
    let (lo, hi) = radius_range(u, x0);
    geometric_radii(0.05, 0.6, 40)
        .into_iter()
        .filter(|&r| r >= lo && r <= hi)
        .collect()
}

/// Sphere integral without range checks, used on admissible radii.
pub(crate) fn sphere_integral(
    u: &ScalarField,
    x0: &[f64],
    r: f64,
    g: impl FnMut(&[f64]) -> f64,
) -> f64 {
    SphereRule::for_radius(u.grid(), r).integrate(x0, r, g)
}

/// Ball integrals of `u^2` and `|grad u|^2` for every radius up to `rmax`,
/// by two-point Gauss-Legendre over spherical shells of width at most `h`.
///
/// Sphere sums of the interpolated gradient avoid the `O(h / r)` error of a
/// node sum over the ball.
struct ShellTable {
    step: f64,
    cum_u2: Vec<f64>,
    cum_g2: Vec<f64>,
}

fn shell_sums(u: &ScalarField, x0: &[f64], s: f64) -> (f64, f64) {
    let n = u.grid().n();
    let rule = SphereRule::for_radius(u.grid(), s);
    let hh = rule.integrate(x0, s, |x| u.interp_raw(x).powi(2));
    let mut gr = [0.0; MAX_DIM];
    let gg = rule.integrate(x0, s, |x| {
        u.grad_raw(x, &mut gr);
        gr[..n].iter().map(|c| c * c).sum::<f64>()
    });
    (hh, gg)
}

/// Integrals over the shell `a < |x - x0| < a + w`.
fn shell(u: &ScalarField, x0: &[f64], a: f64, w: f64) -> (f64, f64) {
    let off = 0.5 / 3f64.sqrt();
    let (h1, g1) = shell_sums(u, x0, a + (0.5 - off) * w);
    let (h2, g2) = shell_sums(u, x0, a + (0.5 + off) * w);
    (0.5 * w * (h1 + h2), 0.5 * w * (g1 + g2))
}

impl ShellTable {
    fn new(u: &ScalarField, x0: &[f64], rmax: f64) -> Self {
        let k = (rmax / u.grid().h()).ceil().max(1.0) as usize;
        let step = rmax / k as f64;
        let shells: Vec<(f64, f64)> = (0..k)
            .into_par_iter()
            .map(|j| shell(u, x0, j as f64 * step, step))
            .collect();
        let mut cum_u2 = Vec::with_capacity(k + 1);
        let mut cum_g2 = Vec::with_capacity(k + 1);
        let (mut a, mut b) = (0.0, 0.0);
        cum_u2.push(0.0);
        cum_g2.push(0.0);
        for (x, y) in shells {
            a += x;
            b += y;
            cum_u2.push(a);
            cum_g2.push(b);
        }
        ShellTable { step, cum_u2, cum_g2 }
    }

    /// `(G, D)` at radius `r`.
    fn sums(&self, u: &ScalarField, x0: &[f64], r: f64) -> (f64, f64) {
        let full = ((r / self.step).floor() as usize).min(self.cum_u2.len() - 1);
        let base = full as f64 * self.step;
        let (mut g, mut d) = (self.cum_u2[full], self.cum_g2[full]);
        let rest = r - base;
        if rest > 1e-12 * self.step {
            let (x, y) = shell(u, x0, base, rest);
            g += x;
            d += y;
        }
        (g, d)
    }
}

/// Measure `H, D, G, I` of `u` about `x0` on the given radii.
///
/// Radii must be admissible (see [`radius_range`]). Radii where `H` is not
/// positive are dropped with a warning; the remaining radii are sorted.
pub fn radial_profile(u: &ScalarField, x0: &[f64], radii: &[f64]) -> Result<RadialProfile> {
    let grid = u.grid();
    let n = grid.n();
    if radii.is_empty() {
        return Err(Error::Argument("empty radius list".into()));
    }
    if x0.len() != n {
        return Err(Error::Argument(format!(
            "centre has {} coordinates, grid dimension is {n}",
            x0.len()
        )));
    }
    let edge = u.dist_to_edge(x0).min(grid.dist_to_boundary(x0));
    for &r in radii {
        check_radius(grid, edge, r)?;
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let h = grid.h();
    let rmax = *sorted.last().expect("nonempty");
    let table = ShellTable::new(u, x0, rmax);

    let rows: Vec<(f64, f64, f64, f64, f64)> = sorted
        .par_iter()
        .map(|&r| {
            let mut gr = [0.0; MAX_DIM];
            let hh = sphere_integral(u, x0, r, |x| {
                let v = u.interp_raw(x);
                v * v
            });
            let ii = sphere_integral(u, x0, r, |x| {
                let v = u.interp_raw(x);
                u.grad_raw(x, &mut gr);
                let mut dot = 0.0;
                for k in 0..n {
                    dot += (x[k] - x0[k]) * gr[k];
                }
                v * dot / r
            });
            let (g, d) = table.sums(u, x0, r);
            (r, hh, d, g, ii)
        })
        .collect();

    let mut p = RadialProfile {
        n,
        center: x0.to_vec(),
        radii: Vec::new(),
        h: Vec::new(),
        d: Vec::new(),
        g: Vec::new(),
        i: Vec::new(),
        spacing: h,
    };
    let mut dropped = 0;
    for (r, hh, d, g, ii) in rows {
        if !(hh > 0.0 && hh.is_finite() && d.is_finite()) {
            dropped += 1;
            continue;
        }
        p.radii.push(r);
        p.h.push(hh);
        p.d.push(d);
        p.g.push(g);
        p.i.push(ii);
    }
    if dropped > 0 {
        log::warn!(
            "dropped {dropped} of {} radii about {x0:?} with H(r) <= 0",
            sorted.len()
        );
    }
    Ok(p)
}

/// Weiss energy and its equivalent form `H / r^{n-1+2k} (N - k)`.
#[derive(Debug, Clone, Serialize)]
pub struct WeissColumns {
    pub kappa: f64,
    pub w: Vec<f64>,
    pub w_alt: Vec<f64>,
}

/// Generalized frequency and the cross-check `(1 + C r)(n - 1 + 2N)`.
#[derive(Debug, Clone, Serialize)]
pub struct PhiColumns {
    pub k: u32,
    pub cm: f64,
    pub phi: Vec<f64>,
    pub phi_tilde: Vec<f64>,
    /// Whether `H(r) <= r^{n-1+2k}` at each radius.
    pub truncated: Vec<bool>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Almgren frequency `N(r) = r D(r) / H(r)`.
    pub fn frequency(&self) -> Vec<f64> {
        self.radii
            .iter()
            .zip(&self.d)
            .zip(&self.h)
            .map(|((r, d), h)| r * d / h)
            .collect()
    }

    /// Frequency in flux form `r I(r) / H(r)`. Equal to `N` for solutions
    /// (`u u_nu` vanishes on the plane) and free of the ball-gradient error.
    pub fn frequency_flux(&self) -> Vec<f64> {
        self.radii
            .iter()
            .zip(&self.i)
            .zip(&self.h)
            .map(|((r, i), h)| r * i / h)
            .collect()
    }

    /// `W_k(r) = r^{-(n-2+2k)} D - k r^{-(n-1+2k)} H`.
    pub fn weiss(&self, kappa: f64) -> WeissColumns {
        let n = self.n as f64;
        let freq = self.frequency();
        let mut w = Vec::with_capacity(self.len());
        let mut w_alt = Vec::with_capacity(self.len());
        for (idx, &r) in self.radii.iter().enumerate() {
            let a = r.powf(-(n - 2.0 + 2.0 * kappa));
            let b = r.powf(-(n - 1.0 + 2.0 * kappa));
            w.push(a * self.d[idx] - kappa * b * self.h[idx]);
            w_alt.push(b * self.h[idx] * (freq[idx] - kappa));
        }
        WeissColumns { kappa, w, w_alt }
    }

    /// `Phi_k(r) = (r + C r^2) d/dr log max{H(r), r^{n-1+2k}}`.
    ///
    /// The log-derivative is a centred difference in `log r` (one-sided at
    /// the ends), which is exact for power laws. On the truncated branch the
    /// value is set to `(n - 1 + 2k)(1 + C r)` exactly.
    pub fn phi_k(&self, k: u32, cm: f64) -> Result<PhiColumns> {
        if self.len() < 3 {
            return Err(Error::Argument(format!(
                "generalized frequency needs at least 3 radii, have {}",
                self.len()
            )));
        }
        if k < 1 {
            return Err(Error::Argument("truncation order must be positive".into()));
        }
        if !(cm >= 0.0 && cm.is_finite()) {
            return Err(Error::Argument(format!("C_M must be nonnegative, got {cm}")));
        }
        let n = self.n as f64;
        let expo = n - 1.0 + 2.0 * k as f64;
        let lr: Vec<f64> = self.radii.iter().map(|r| r.ln()).collect();
        let truncated: Vec<bool> = self
            .radii
            .iter()
            .zip(&self.h)
            .map(|(r, h)| *h <= r.powf(expo))
            .collect();
        let ll: Vec<f64> = self
            .radii
            .iter()
            .zip(&self.h)
            .zip(&lr)
            .map(|((_, h), l)| h.ln().max(expo * l))
            .collect();
        let last = self.len() - 1;
        let freq = self.frequency();
        let mut phi = Vec::with_capacity(self.len());
        let mut phi_tilde = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let r = self.radii[i];
            let scale = 1.0 + cm * r;
            let slope = if truncated[i] {
                expo
            } else {
                let (a, b) = match i {
                    0 => (0, 1),
                    _ if i == last => (last - 1, last),
                    _ => (i - 1, i + 1),
                };
                (ll[b] - ll[a]) / (lr[b] - lr[a])
            };
            phi.push(scale * slope);
            phi_tilde.push(scale * (n - 1.0 + 2.0 * freq[i]));
        }
        Ok(PhiColumns {
            k,
            cm,
            phi,
            phi_tilde,
            truncated,
        })
    }

    /// Relative mismatch between a finite-difference `H'(r)` and
    /// `(n-1)/r H + 2 I` at the interior radii, as `(r, rel)` pairs.
    pub fn h_derivative_check(&self) -> Vec<(f64, f64)> {
        let n = self.n as f64;
        (1..self.len().saturating_sub(1))
            .map(|i| {
                let (r0, r1) = (self.radii[i - 1], self.radii[i + 1]);
                let fd = (self.h[i + 1] - self.h[i - 1]) / (r1 - r0);
                let r = self.radii[i];
                let rhs = (n - 1.0) / r * self.h[i] + 2.0 * self.i[i];
                (r, (fd - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE))
            })
            .collect()
    }

    /// Restrict to radii in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> RadialProfile {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.radii[i] >= lo && self.radii[i] <= hi)
            .collect();
        let pick = |v: &Vec<f64>| keep.iter().map(|&i| v[i]).collect();
        RadialProfile {
            n: self.n,
            center: self.center.clone(),
            radii: pick(&self.radii),
            h: pick(&self.h),
            d: pick(&self.d),
            g: pick(&self.g),
            i: pick(&self.i),
            spacing: self.spacing,
        }
    }
}

/// Least-squares line `y = a + b x`; returns `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let k = x.len().min(y.len());
    if k < 2 {
        return None;
    }
    let mx = x[..k].iter().sum::<f64>() / k as f64;
    let my = y[..k].iter().sum::<f64>() / k as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..k {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

/// Limit at `0+` of a column: intercept of the line fitted through the
/// smallest `count` radii.
pub fn limit_at_zero(radii: &[f64], values: &[f64], count: usize) -> Option<f64> {
    let k = count.min(radii.len());
    linear_fit(&radii[..k], &values[..k]).map(|(a, _)| a)
}

/// Length of the longest prefix on which `values` is nondecreasing up to
/// `slack` between neighbours.
pub fn monotone_prefix(values: &[f64], slack: f64) -> usize {
    if values.is_empty() {
        return 0;
    }
    for i in 1..values.len() {
        if values[i] < values[i - 1] - slack {
            return i;
        }
    }
    values.len()
}

/// Largest drop `values[i] - values[i+1]` between neighbours (0 if none).
pub fn max_decrease(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::poly::HatSolution;

    fn hat_field(m: usize) -> ScalarField {
        let g = Grid::new(2, m).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        ScalarField::sample(g, |x| hat.eval(x)).unwrap()
    }

    #[test]
    fn hat_frequency_is_three_halves() {
        let u = hat_field(257);
        let radii = geometric_radii(0.1, 0.5, 9);
        let p = radial_profile(&u, &[0.0, 0.0], &radii).unwrap();
        for n in p.frequency() {
            assert!((n - 1.5).abs() < 0.03, "{n}");
        }
        let (a, b) = linear_fit(
            &p.radii.iter().map(|r| r.ln()).collect::<Vec<_>>(),
            &p.h.iter().map(|h| h.ln()).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!((b - 4.0).abs() < 0.01, "{a} {b}");
    }

    #[test]
    fn zero_field_drops_everything() {
        let g = Grid::new(2, 65).unwrap();
        let u = ScalarField::sample(g, |_| 0.0).unwrap();
        let p = radial_profile(&u, &[0.0, 0.0], &[0.2, 0.3]).unwrap();
        assert!(p.is_empty());
        assert!(radial_profile(&u, &[0.0, 0.0], &[]).is_err());
        assert!(radial_profile(&u, &[0.0, 0.0], &[0.99]).is_err());
    }

    #[test]
    fn ladder_helpers() {
        let r = geometric_radii(0.05, 0.6, 40);
        assert_eq!(r.len(), 40);
        assert!((r[39] - 0.6).abs() < 1e-12);
        assert_eq!(monotone_prefix(&[1.0, 2.0, 1.95, 3.0, 1.0], 0.1), 4);
        assert_eq!(limit_at_zero(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0], 10), Some(1.0));
        assert_eq!(max_decrease(&[1.0, 0.5, 2.0]), 0.5);
    }

    #[test]
    fn phi_truncated_branch() {
        let p = RadialProfile {
            n: 2,
            center: vec![0.0, 0.0],
            radii: vec![0.1, 0.2, 0.3],
            h: vec![1e-12; 3],
            d: vec![1e-12; 3],
            g: vec![0.0; 3],
            i: vec![0.0; 3],
            spacing: 0.01,
        };
        let c = p.phi_k(2, 1.0).unwrap();
        for (r, v) in p.radii.iter().zip(&c.phi) {
            assert_eq!(*v, 5.0 * (1.0 + r));
        }
        assert!(p.window(0.15, 0.3).phi_k(2, 1.0).is_err());
    }
}
