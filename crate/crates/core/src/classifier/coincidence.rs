use crate::geometry::{Grid, ScalarField, MAX_DIM};
use crate::poly::Obstacle;

/// Thin-plane node set, stored as a mask over the plane lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSet {
    grid: Grid,
    mask: Vec<bool>,
}

impl PlaneSet {
    pub fn empty(grid: Grid) -> Self {
        PlaneSet {
            grid,
            mask: vec![false; grid.m().pow(grid.n() as u32 - 1)],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Plane index `p` of a plane node `flat = p * m + c`.
    #[inline]
    pub fn plane_index(&self, flat: usize) -> usize {
        flat / self.grid.m()
    }

    #[inline]
    pub fn flat_of(&self, p: usize) -> usize {
        p * self.grid.m() + self.grid.center_index()
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.mask[self.plane_index(flat)]
    }

    pub fn insert(&mut self, flat: usize) {
        let p = self.plane_index(flat);
        self.mask[p] = true;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// Member nodes as flat grid indices, in plane-lexicographic order.
    pub fn nodes(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(p, _)| self.flat_of(p))
            .collect()
    }

    /// Members within Euclidean distance `r` of the plane point `x0'`.
    pub fn count_within(&self, x0: &[f64], r: f64) -> usize {
        let g = &self.grid;
        let d = g.n() - 1;
        let m = g.m() as isize;
        let mut lo = [0isize; MAX_DIM];
        let mut hi = [0isize; MAX_DIM];
        for k in 0..d {
            let t0 = (x0[k] - r + 1.0) / g.h();
            let t1 = (x0[k] + r + 1.0) / g.h();
            lo[k] = (t0.floor() as isize).clamp(0, m - 1);
            hi[k] = (t1.ceil() as isize).clamp(0, m - 1);
        }
        let r2 = r * r * (1.0 + 1e-12);
        let mut count = 0;
        if d == 1 {
            for i in lo[0]..=hi[0] {
                let dx = g.coord(i as usize) - x0[0];
                if dx * dx <= r2 && self.mask[i as usize] {
                    count += 1;
                }
            }
        } else {
            for i in lo[0]..=hi[0] {
                let dx = g.coord(i as usize) - x0[0];
                for j in lo[1]..=hi[1] {
                    let dy = g.coord(j as usize) - x0[1];
                    if dx * dx + dy * dy <= r2 && self.mask[i as usize * g.m() + j as usize] {
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

/// Thin-plane nodes where `u - phi <= tol_lambda`.
pub fn coincidence_set(u: &ScalarField, obstacle: &Obstacle, tol_lambda: f64) -> PlaneSet {
    let grid = *u.grid();
    let n = grid.n();
    let phi = obstacle.poly(n - 1).to_float();
    let mut set = PlaneSet::empty(grid);
    for flat in grid.plane_nodes() {
        let v = u.value(flat);
        if v.is_nan() {
            continue;
        }
        let x = grid.point(flat);
        if v - phi.eval(&x[..n - 1]) <= tol_lambda {
            set.insert(flat);
        }
    }
    set
}

/// Members of `lambda` with at least one plane neighbour (including
/// diagonal neighbours) outside `lambda`. Neighbours beyond the cube are
/// ignored.
pub fn free_boundary(lambda: &PlaneSet) -> PlaneSet {
    let grid = *lambda.grid();
    let m = grid.m() as isize;
    let d = grid.n() - 1;
    let mut out = PlaneSet::empty(grid);
    for (p, &inside) in lambda.mask.iter().enumerate() {
        if !inside {
            continue;
        }
        let (i, j) = if d == 1 {
            (p as isize, 0)
        } else {
            ((p / grid.m()) as isize, (p % grid.m()) as isize)
        };
        let mut boundary = false;
        'scan: for di in -1..=1 {
            let dj_range = if d == 1 { 0..=0 } else { -1..=1 };
            for dj in dj_range {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (a, b) = (i + di, j + dj);
                if a < 0 || a >= m || (d == 2 && (b < 0 || b >= m)) {
                    continue;
                }
                let q = if d == 1 { a as usize } else { a as usize * grid.m() + b as usize };
                if !lambda.mask[q] {
                    boundary = true;
                    break 'scan;
                }
            }
        }
        if boundary {
            out.mask[p] = true;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{cross_example, HatSolution};

    #[test]
    fn hat_coincidence_is_half_line() {
        let g = Grid::new(2, 65).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let u = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        let lambda = coincidence_set(&u, &Obstacle::Zero, 1e-9);
        assert_eq!(lambda.len(), 33);
        assert!(lambda.nodes().iter().all(|&f| g.point(f)[0] <= 0.0));
        let gamma = free_boundary(&lambda);
        assert_eq!(gamma.nodes(), vec![g.flat(&[32, 32])]);
    }

    #[test]
    fn cross_example_axes() {
        let g = Grid::new(3, 33).unwrap();
        let p = cross_example().to_float();
        let u = ScalarField::sample(g, |x| p.eval(x)).unwrap();
        let lambda = coincidence_set(&u, &Obstacle::Zero, 1e-9);
        assert_eq!(lambda.len(), 2 * 33 - 1);
        for f in lambda.nodes() {
            let x = g.point(f);
            assert!(x[0] == 0.0 || x[1] == 0.0);
        }
        assert_eq!(free_boundary(&lambda), lambda);
        assert_eq!(lambda.count_within(&[0.0, 0.0], 2.0 * g.h()), 9);
    }

    #[test]
    fn no_contact() {
        let g = Grid::new(2, 33).unwrap();
        let u = ScalarField::sample(g, |_| 1.0).unwrap();
        let lambda = coincidence_set(&u, &Obstacle::Zero, 1e-9);
        assert!(lambda.is_empty());
        assert!(free_boundary(&lambda).is_empty());
    }
}
