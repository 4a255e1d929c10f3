use super::grid::{Grid, MAX_DIM};
use crate::error::{Error, Result};

/// Node values on a [`Grid`], optionally flagged even in `x_n`.
///
/// Fields built by shifting or rescaling another field may only carry valid
/// data on a sub-cube `[-extent, extent]^n`; nodes outside it hold `NaN`
/// and are never read by interpolation with nonzero weight inside the valid
/// region.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    even: bool,
    extent: f64,
}

impl ScalarField {
    /// Sample `f` at every node. The even flag is set iff the sampled values
    /// are exactly symmetric under `x_n -> -x_n`.
    pub fn sample(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let x = grid.point(flat);
            let v = f(&x[..n]);
            if !v.is_finite() {
                return Err(Error::Data {
                    node: flat,
                    msg: format!("non-finite sample {v} at {:?}", &x[..n]),
                });
            }
            values.push(v);
        }
        Ok(Self::with_detected_symmetry(grid, values))
    }

    /// Sample `f` on the upper half `x_n >= 0` and mirror, producing a field
    /// that is even by construction.
    pub fn sample_even(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = grid.n();
        let c = grid.center_index();
        let m = grid.m();
        let mut values = vec![0.0; grid.len()];
        for flat in 0..grid.len() {
            let i_n = flat % m;
            if i_n < c {
                continue;
            }
            let x = grid.point(flat);
            let v = f(&x[..n]);
            if !v.is_finite() {
                return Err(Error::Data {
                    node: flat,
                    msg: format!("non-finite sample {v} at {:?}", &x[..n]),
                });
            }
            values[flat] = v;
            values[grid.mirror(flat)] = v;
        }
        Ok(ScalarField {
            grid,
            values,
            even: true,
            extent: 1.0,
        })
    }

    /// Wrap raw node values; all must be finite.
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Argument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data {
                node,
                msg: "non-finite value".into(),
            });
        }
        Ok(Self::with_detected_symmetry(grid, values))
    }

    /// Values known to be even (mirrored by the caller), possibly holding
    /// `NaN` outside `[-extent, extent]^n`.
    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>, even: bool, extent: f64) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField {
            grid,
            values,
            even,
            extent,
        }
    }

    fn with_detected_symmetry(grid: Grid, values: Vec<f64>) -> Self {
        let even = (0..grid.len()).all(|f| values[f] == values[grid.mirror(f)]);
        ScalarField {
            grid,
            values,
            even,
            extent: 1.0,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    #[inline]
    pub fn is_even(&self) -> bool {
        self.even
    }

    /// Half-width of the origin-centred cube on which values are valid.
    #[inline]
    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Sup-norm distance from `x` to the edge of the valid region.
    pub fn dist_to_edge(&self, x: &[f64]) -> f64 {
        x.iter()
            .take(self.grid.n())
            .map(|c| self.extent - c.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|u(x', x_n) - u(x', -x_n)|` over the valid nodes.
    pub fn symmetry_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|f| (self.values[f] - self.values[self.grid.mirror(f)]).abs())
            .filter(|d| !d.is_nan())
            .fold(0.0, f64::max)
    }

    fn check_point(&self, x: &[f64], margin: f64) -> Result<()> {
        if x.len() != self.grid.n() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, grid dimension is {}",
                x.len(),
                self.grid.n()
            )));
        }
        if x.iter().any(|c| !c.is_finite()) || self.dist_to_edge(x) < margin - 1e-12 {
            return Err(Error::Domain(format!(
                "point {x:?} is outside the admissible region (margin {margin})"
            )));
        }
        Ok(())
    }

    /// Multilinear interpolation over the containing cell.
    pub fn interp(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x, 0.0)?;
        Ok(self.interp_raw(x))
    }

    /// Nodal gradients (fourth-order differences, one-sided on the thin plane of
    /// an even field and on the cube boundary) interpolated multilinearly.
    pub fn grad_interp(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x, self.grid.h())?;
        let mut g = [0.0; MAX_DIM];
        self.grad_raw(x, &mut g);
        Ok(g[..self.grid.n()].to_vec())
    }

    #[inline]
    fn locate(&self, x: &[f64]) -> ([usize; MAX_DIM], [f64; MAX_DIM]) {
        let m = self.grid.m();
        let mut base = [0usize; MAX_DIM];
        let mut frac = [0.0; MAX_DIM];
        for k in 0..self.grid.n() {
            let t = self.grid.lattice_coord(x[k]);
            let i = (t.floor().max(0.0) as usize).min(m - 2);
            base[k] = i;
            frac[k] = t - i as f64;
        }
        (base, frac)
    }

    /// Interpolate without range checks; `x` must lie in the cube.
    #[inline]
    pub(crate) fn interp_raw(&self, x: &[f64]) -> f64 {
        let n = self.grid.n();
        let (base, frac) = self.locate(x);
        let strides = self.grid.strides();
        let origin: usize = (0..n).map(|k| base[k] * strides[k]).sum();
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut off = 0;
            for k in 0..n {
                if corner >> k & 1 == 1 {
                    w *= frac[k];
                    off += strides[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w != 0.0 {
                acc += w * self.values[origin + off];
            }
        }
        acc
    }

    /// Gradient interpolation without range checks; `x` must be at least
    /// `h` inside the cube.
    #[inline]
    pub(crate) fn grad_raw(&self, x: &[f64], out: &mut [f64; MAX_DIM]) {
        let n = self.grid.n();
        let (base, frac) = self.locate(x);
        let strides = self.grid.strides();
        let origin: usize = (0..n).map(|k| base[k] * strides[k]).sum();
        let upper = x[n - 1] >= 0.0;
        *out = [0.0; MAX_DIM];
        let mut g = [0.0; MAX_DIM];
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut off = 0;
            for k in 0..n {
                if corner >> k & 1 == 1 {
                    w *= frac[k];
                    off += strides[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w != 0.0 {
                self.nodal_grad_into(origin + off, upper, &mut g);
                for k in 0..n {
                    out[k] += w * g[k];
                }
            }
        }
    }

    /// Finite-difference gradient at a node. On the thin plane of an even
    /// field the normal derivative is the one-sided limit from the side
    /// selected by `upper`.
    pub fn nodal_grad(&self, flat: usize, upper: bool) -> [f64; MAX_DIM] {
        let mut g = [0.0; MAX_DIM];
        self.nodal_grad_into(flat, upper, &mut g);
        g
    }

    #[inline]
    fn nodal_grad_into(&self, flat: usize, upper: bool, g: &mut [f64; MAX_DIM]) {
        let n = self.grid.n();
        let m = self.grid.m() as isize;
        let c = self.grid.center_index() as isize;
        let strides = self.grid.strides();
        let inv12h = 1.0 / (12.0 * self.grid.h());
        let idx = self.grid.multi(flat);
        let v = &self.values;
        for k in 0..n {
            let s = strides[k] as isize;
            let i = idx[k] as isize;
            let at = |o: isize| v[(flat as isize + o * s) as usize];
            // stencils stay on one side of the plane of an even field
            let (lo, hi) = if self.even && k == n - 1 {
                if i >= c {
                    (c, m - 1)
                } else {
                    (0, c)
                }
            } else {
                (0, m - 1)
            };
            let d = if self.even && k == n - 1 && i == c {
                let d = fwd(&at);
                if upper {
                    d
                } else {
                    -d
                }
            } else if i - 2 >= lo && i + 2 <= hi {
                at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)
            } else if i == lo {
                fwd(&at)
            } else if i == hi {
                -fwd(&|o| at(-o))
            } else if i - 1 == lo {
                -3.0 * at(-1) - 10.0 * at(0) + 18.0 * at(1) - 6.0 * at(2) + at(3)
            } else {
                3.0 * at(1) + 10.0 * at(0) - 18.0 * at(-1) + 6.0 * at(-2) - at(-3)
            };
            g[k] = d * inv12h;
        }
    }
}

/// Fourth-order one-sided difference (times `12 h`) from offsets `0..=4`.
#[inline]
fn fwd(at: &impl Fn(isize) -> f64) -> f64 {
    -25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::hat::HatSolution;

    fn hat32(n: usize) -> HatSolution {
        HatSolution::standard(1.5, n).unwrap()
    }

    #[test]
    fn hat_field_is_even() {
        let g = Grid::new(2, 33).unwrap();
        let hat = hat32(2);
        let f = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        assert!(f.is_even());
    }

    #[test]
    fn odd_and_zero_fields() {
        let g = Grid::new(2, 17).unwrap();
        let f = ScalarField::sample(g, |x| x[1]).unwrap();
        assert!(!f.is_even());
        let z = ScalarField::sample(g, |_| 0.0).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        assert!(z.is_even());
    }

    #[test]
    fn non_finite_sample_reports_node() {
        let g = Grid::new(2, 9).unwrap();
        let err = ScalarField::sample(g, |x| if x[0] == 1.0 { f64::NAN } else { 0.0 }).unwrap_err();
        match err {
            Error::Data { node, .. } => assert_eq!(g.point(node)[0], 1.0),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn interp_exact_at_nodes_and_affine() {
        let g = Grid::new(2, 17).unwrap();
        let f = ScalarField::sample(g, |x| x[0] * x[0] + 3.0 * x[1]).unwrap();
        for flat in [0, 5, 100, g.len() - 1] {
            let p = g.point(flat);
            assert_eq!(f.interp(&p[..2]).unwrap(), f.value(flat));
        }
        let a = ScalarField::sample(g, |x| x[0]).unwrap();
        assert!((a.interp(&[0.3, 0.1]).unwrap() - 0.3).abs() < 1e-15);
        assert!(a.interp(&[1.1, 0.0]).is_err());
    }

    #[test]
    fn hat_interp_matches_complex_power() {
        // Re((0.5 i)^{3/2}) = 0.5^{3/2} cos(3 pi / 4) = -0.25
        let g = Grid::new(2, 1025).unwrap();
        let hat = hat32(2);
        let f = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        let v = f.interp(&[0.0, 0.5]).unwrap();
        assert!((v - (-0.25)).abs() < 1e-5, "{v}");
    }

    #[test]
    fn grad_affine_and_constant() {
        let g = Grid::new(3, 17).unwrap();
        let f = ScalarField::sample(g, |x| x[0]).unwrap();
        let d = f.grad_interp(&[0.31, -0.2, 0.17]).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-13 && d[1].abs() < 1e-13 && d[2].abs() < 1e-13);
        let c = ScalarField::sample(g, |_| 2.5).unwrap();
        let d = c.grad_interp(&[0.1, 0.2, 0.0]).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-13));
        assert!(f.grad_interp(&[0.95, 0.0, 0.0]).is_err());
    }

    #[test]
    fn grad_quadratic() {
        let g = Grid::new(2, 257).unwrap();
        let f = ScalarField::sample(g, |x| x[0] * x[0] - x[1] * x[1]).unwrap();
        let d = f.grad_interp(&[0.5, 0.25]).unwrap();
        let h2 = g.h() * g.h();
        assert!((d[0] - 1.0).abs() < 4.0 * h2 && (d[1] + 0.5).abs() < 4.0 * h2, "{d:?}");
    }

    #[test]
    fn one_sided_normal_derivative_on_plane() {
        // |x_n| has normal derivative +1 from above and -1 from below
        let g = Grid::new(2, 33).unwrap();
        let f = ScalarField::sample(g, |x| x[1].abs()).unwrap();
        assert!(f.is_even());
        let up = f.grad_interp(&[0.1, 0.0]).unwrap();
        assert!((up[1] - 1.0).abs() < 1e-12);
        let down = f.grad_interp(&[0.1, -0.01]).unwrap();
        assert!((down[1] + 1.0).abs() < 1e-12);
    }
}
