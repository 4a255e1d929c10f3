use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::MAX_DIM;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Re,
    Im,
}

/// The explicit global solutions `Re (e'.x' + i|x_n|)^kappa` and, for odd
/// integer `kappa`, `Im (e'.x' + i|x_n|)^kappa`.
///
/// Powers use the principal branch; with `|x_n|` the argument stays in
/// `[0, pi]`, so the Re variant is even in `x_n` and, for half-integer
/// `kappa`, vanishes on the half-line `{x_n = 0, e'.x' <= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HatSolution {
    kappa: f64,
    variant: Variant,
    axis: [f64; MAX_DIM - 1],
    n: usize,
    half_integer: bool,
    integer: Option<i32>,
}

impl HatSolution {
    /// `axis` is the direction `e'` in `R^{n-1}` and fixes the dimension;
    /// it is normalized.
    pub fn new(kappa: f64, variant: Variant, axis: &[f64]) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Argument(format!("kappa must be positive, got {kappa}")));
        }
        let twice = 2.0 * kappa;
        if (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "kappa must be an integer or a half-integer, got {kappa}"
            )));
        }
        let twice = twice.round() as i64;
        let half_integer = twice % 2 == 1;
        let integer = (!half_integer).then_some((twice / 2) as i32);
        if variant == Variant::Im && !matches!(integer, Some(k) if k % 2 == 1) {
            return Err(Error::Argument(format!(
                "the Im variant needs an odd integer kappa, got {kappa}"
            )));
        }
        if axis.is_empty() || axis.len() > MAX_DIM - 1 {
            return Err(Error::Argument(format!(
                "axis must have 1 or 2 components, got {}",
                axis.len()
            )));
        }
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Argument("axis must be a nonzero vector".into()));
        }
        let mut e = [0.0; MAX_DIM - 1];
        for (k, a) in axis.iter().enumerate() {
            e[k] = a / norm;
        }
        Ok(HatSolution {
            kappa: twice as f64 / 2.0,
            variant,
            axis: e,
            n: axis.len() + 1,
            half_integer,
            integer,
        })
    }

    /// `Re (x1 + i|x_n|)^kappa` in dimension `n`.
    pub fn standard(kappa: f64, n: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Argument(format!("dimension must be 2 or 3, got {n}")));
        }
        let mut axis = vec![0.0; n - 1];
        axis[0] = 1.0;
        Self::new(kappa, Variant::Re, &axis)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis[..self.n - 1]
    }

    fn z(&self, x: &[f64]) -> Complex64 {
        let t: f64 = self.axis().iter().zip(x).map(|(e, v)| e * v).sum();
        Complex64::new(t, x[self.n - 1].abs())
    }

    fn power(&self, z: Complex64, kappa: f64, exact: Option<i32>) -> Complex64 {
        if z.re == 0.0 && z.im == 0.0 {
            return if kappa == 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        match exact {
            Some(k) => z.powi(k),
            None => z.powf(kappa),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let z = self.z(x);
        if self.half_integer && z.im == 0.0 && z.re <= 0.0 {
            // principal argument pi, cos(kappa pi) = 0
            return 0.0;
        }
        let w = self.power(z, self.kappa, self.integer);
        match self.variant {
            Variant::Re => w.re,
            Variant::Im => w.im,
        }
    }

    /// Gradient from the holomorphic derivative `kappa z^{kappa-1}`. On the
    /// thin plane the `x_n` component is the limit from `x_n > 0`.
    pub fn grad(&self, x: &[f64]) -> [f64; MAX_DIM] {
        let n = self.n;
        let z = self.z(x);
        let dw = self.power(z, self.kappa - 1.0, self.integer.map(|k| k - 1)) * self.kappa;
        let s = if x[n - 1] < 0.0 { -1.0 } else { 1.0 };
        // d/dx'_i = dw * e_i, d/dx_n = dw * i * sign(x_n)
        let (tan, nor) = match self.variant {
            Variant::Re => (dw.re, -s * dw.im),
            Variant::Im => (dw.im, s * dw.re),
        };
        let mut g = [0.0; MAX_DIM];
        for k in 0..n - 1 {
            g[k] = tan * self.axis[k];
        }
        g[n - 1] = nor;
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_power_values() {
        let u = HatSolution::standard(1.5, 2).unwrap();
        assert_abs_diff_eq!(u.eval(&[1.0, 0.0]), 1.0, epsilon = 1e-15);
        assert_eq!(u.eval(&[-1.0, 0.0]), 0.0);
        assert_abs_diff_eq!(u.eval(&[0.0, 1.0]), -std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(u.eval(&[0.0, 0.5]), -0.25, epsilon = 1e-15);
        assert_eq!(u.eval(&[0.3, -0.2]), u.eval(&[0.3, 0.2]));
    }

    #[test]
    fn integer_power_is_polynomial() {
        let u = HatSolution::standard(4.0, 2).unwrap();
        let (a, b): (f64, f64) = (0.3, -0.7);
        let want = a.powi(4) - 6.0 * a * a * b * b + b.powi(4);
        assert_abs_diff_eq!(u.eval(&[a, b]), want, epsilon = 1e-14);
        let v = HatSolution::new(3.0, Variant::Im, &[1.0]).unwrap();
        // Im (a + i|b|)^3 = 3a^2|b| - |b|^3
        assert_abs_diff_eq!(v.eval(&[a, b]), 3.0 * a * a * b.abs() - b.abs().powi(3), epsilon = 1e-14);
    }

    #[test]
    fn gradient_matches_differences() {
        for (u, x) in [
            (HatSolution::standard(1.5, 2).unwrap(), vec![0.4, 0.3]),
            (HatSolution::standard(2.5, 3).unwrap(), vec![-0.2, 0.1, -0.5]),
            (HatSolution::new(3.0, Variant::Im, &[0.6, 0.8]).unwrap(), vec![0.1, 0.2, 0.3]),
        ] {
            let g = u.grad(&x);
            for k in 0..x.len() {
                let e = 1e-6;
                let mut p = x.clone();
                let mut m = x.clone();
                p[k] += e;
                m[k] -= e;
                let fd = (u.eval(&p) - u.eval(&m)) / (2.0 * e);
                assert_abs_diff_eq!(g[k], fd, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HatSolution::standard(1.2, 2).is_err());
        assert!(HatSolution::new(2.0, Variant::Im, &[1.0]).is_err());
        assert!(HatSolution::new(1.5, Variant::Im, &[1.0]).is_err());
        assert!(HatSolution::new(1.5, Variant::Re, &[0.0]).is_err());
        assert!(HatSolution::standard(1.5, 4).is_err());
    }
}
