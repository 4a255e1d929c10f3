use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Uniform lattice on the cube `[-1, 1]^n` with `m` nodes per axis.
///
/// `m` is odd so that the thin plane `{x_n = 0}` is a lattice plane, and
/// node coordinates are computed as `(2i - (m-1)) / (m-1)`, which reproduces
/// `-1`, `0` and `1` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    m: usize,
    h: f64,
}

impl Grid {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {n}")));
        }
        if m % 2 == 0 {
            return Err(Error::Config(format!("m must be odd, got {m}")));
        }
        let max_m = if n == 2 { 2049 } else { 257 };
        if !(9..=max_m).contains(&m) {
            return Err(Error::Config(format!(
                "m must lie in [9, {max_m}] for n = {n}, got {m}"
            )));
        }
        Ok(Grid {
            n,
            m,
            h: 2.0 / (m - 1) as f64,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total node count `m^n`.
    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the coordinate 0 along any axis.
    #[inline]
    pub fn center_index(&self) -> usize {
        (self.m - 1) / 2
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        (2 * i as i64 - (self.m as i64 - 1)) as f64 / (self.m - 1) as f64
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> [usize; MAX_DIM] {
        let mut s = [0; MAX_DIM];
        let mut acc = 1;
        for k in (0..self.n).rev() {
            s[k] = acc;
            acc *= self.m;
        }
        s
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.n);
        idx.iter().fold(0, |acc, &i| acc * self.m + i)
    }

    pub fn multi(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for k in (0..self.n).rev() {
            idx[k] = flat % self.m;
            flat /= self.m;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi(flat);
        let mut x = [0.0; MAX_DIM];
        for k in 0..self.n {
            x[k] = self.coord(idx[k]);
        }
        x
    }

    /// Flat index of the node reflected through `{x_n = 0}`.
    pub fn mirror(&self, flat: usize) -> usize {
        let i_n = flat % self.m;
        flat - i_n + (self.m - 1 - i_n)
    }

    /// Continuous lattice coordinate `t = (x + 1) / h`, snapped to the
    /// nearest integer when within rounding distance of a node.
    #[inline]
    pub(crate) fn lattice_coord(&self, x: f64) -> f64 {
        let t = (x + 1.0) * 0.5 * (self.m - 1) as f64;
        let r = t.round();
        if (t - r).abs() < 1e-9 {
            r
        } else {
            t
        }
    }

    /// Distance from `x` to the cube boundary in the sup norm.
    pub fn dist_to_boundary(&self, x: &[f64]) -> f64 {
        x.iter()
            .take(self.n)
            .map(|c| 1.0 - c.abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n && x.iter().all(|c| c.abs() <= 1.0 + 1e-12)
    }

    /// Whether node `flat` lies on the thin plane `{x_n = 0}`.
    #[inline]
    pub fn on_plane(&self, flat: usize) -> bool {
        flat % self.m == self.center_index()
    }

    /// Whether node `flat` lies on the cube boundary.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let idx = self.multi(flat);
        idx[..self.n].iter().any(|&i| i == 0 || i == self.m - 1)
    }

    /// Flat indices of all thin-plane nodes, ordered lexicographically in `x'`.
    pub fn plane_nodes(&self) -> Vec<usize> {
        let c = self.center_index();
        (0..self.m.pow(self.n as u32 - 1))
            .map(|p| p * self.m + c)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_origin() {
        let g = Grid::new(2, 9).unwrap();
        assert_eq!(g.h(), 0.25);
        let origin = g.flat(&[4, 4]);
        assert_eq!(&g.point(origin)[..2], &[0.0, 0.0]);
        assert_eq!(Grid::new(3, 65).unwrap().h(), 0.03125);
    }

    #[test]
    fn even_m_rejected() {
        let err = Grid::new(2, 10).unwrap_err();
        assert!(err.to_string().contains("m must be odd"));
    }

    #[test]
    fn range_checks() {
        assert!(Grid::new(2, 7).is_err());
        assert!(Grid::new(2, 2049).is_ok());
        assert!(Grid::new(2, 2051).is_err());
        assert!(Grid::new(3, 257).is_ok());
        assert!(Grid::new(3, 259).is_err());
        assert!(Grid::new(4, 9).is_err());
        assert!(Grid::new(1, 9).is_err());
    }

    #[test]
    fn coordinates_are_exact_at_corners_and_center() {
        for m in [9, 65, 129, 513] {
            let g = Grid::new(2, m).unwrap();
            assert_eq!(g.coord(0), -1.0);
            assert_eq!(g.coord(m - 1), 1.0);
            assert_eq!(g.coord(g.center_index()), 0.0);
            for i in 0..m {
                assert_eq!(g.coord(i), -g.coord(m - 1 - i));
            }
        }
    }

    #[test]
    fn flat_multi_roundtrip_and_mirror() {
        let g = Grid::new(3, 9).unwrap();
        for f in [0, 17, 300, g.len() - 1] {
            let idx = g.multi(f);
            assert_eq!(g.flat(&idx[..3]), f);
            let mf = g.mirror(f);
            let p = g.point(f);
            let q = g.point(mf);
            assert_eq!(p[0], q[0]);
            assert_eq!(p[1], q[1]);
            assert_eq!(p[2], -q[2]);
        }
        assert_eq!(g.plane_nodes().len(), 81);
        assert!(g.plane_nodes().iter().all(|&f| g.on_plane(f)));
    }
}
