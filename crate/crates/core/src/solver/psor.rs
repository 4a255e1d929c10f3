use serde::Serialize;

use super::problem::SignoriniProblem;
use crate::geometry::{ScalarField, MAX_DIM};

/// Solver state recorded every [`CHECKPOINT_EVERY`] sweeps and at exit.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Checkpoint {
    pub iter: usize,
    pub residual: f64,
    pub energy: f64,
    pub active: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub omega: f64,
    pub checkpoints: Vec<Checkpoint>,
}

impl SolveStats {
    /// Whether the recorded energies never increase (up to rounding).
    pub fn energy_monotone(&self) -> bool {
        self.checkpoints.windows(2).all(|w| {
            w[1].energy <= w[0].energy + 1e-12 * w[0].energy.abs().max(1.0)
        })
    }

    /// Active-set sizes at the checkpoints.
    pub fn active_history(&self) -> Vec<usize> {
        self.checkpoints.iter().map(|c| c.active).collect()
    }
}

pub const CHECKPOINT_EVERY: usize = 50;

/// Upper half of the grid, `x_n >= 0`, stored plane-major: node `(p, j)`
/// with plane index `p` over the first `n - 1` axes and `j = i_n - c`.
struct HalfGrid {
    n: usize,
    m: usize,
    /// `c + 1` layers, `j = 0` is the thin plane.
    layers: usize,
    plane_len: usize,
    u: Vec<f64>,
    fixed: Vec<bool>,
    phi: Vec<f64>,
}

impl HalfGrid {
    fn new(problem: &SignoriniProblem) -> Self {
        let grid = &problem.grid;
        let n = grid.n();
        let m = grid.m();
        let c = grid.center_index();
        let layers = c + 1;
        let plane_len = m.pow(n as u32 - 1);
        let len = plane_len * layers;
        let mut u = vec![0.0; len];
        let mut fixed = vec![false; len];
        let mut phi = vec![0.0; plane_len];
        let fphi = problem.obstacle.poly(n - 1).to_float();
        for p in 0..plane_len {
            for j in 0..layers {
                let flat = p * m + c + j;
                let x = grid.point(flat);
                let h = p * layers + j;
                if grid.on_boundary(flat) {
                    fixed[h] = true;
                    u[h] = problem.boundary.eval(&x[..n]);
                }
                if j == 0 {
                    phi[p] = fphi.eval(&x[..n - 1]);
                    if !fixed[h] {
                        u[h] = phi[p].max(0.0);
                    }
                }
            }
        }
        HalfGrid {
            n,
            m,
            layers,
            plane_len,
            u,
            fixed,
            phi,
        }
    }

    /// Offsets of the in-plane neighbours for the first `n - 1` axes.
    fn plane_strides(&self) -> [usize; MAX_DIM] {
        let mut s = [0; MAX_DIM];
        let mut acc = self.layers;
        for k in (0..self.n - 1).rev() {
            s[k] = acc;
            acc *= self.m;
        }
        s
    }

    /// One lexicographic projected SOR sweep; returns the largest
    /// `|P(gs) - u|` seen during the sweep.
    fn sweep(&mut self, omega: f64) -> f64 {
        let n = self.n;
        let inv = 1.0 / (2 * n) as f64;
        let ps = self.plane_strides();
        let layers = self.layers;
        let mut res: f64 = 0.0;
        for p in 0..self.plane_len {
            let base = p * layers;
            if self.fixed[base] {
                continue;
            }
            for j in 0..layers - 1 {
                let h = base + j;
                let u = &mut self.u;
                let mut s = 0.0;
                for &st in &ps[..n - 1] {
                    s += u[h - st] + u[h + st];
                }
                let gs = if j == 0 {
                    (s + 2.0 * u[h + 1]) * inv
                } else {
                    (s + u[h - 1] + u[h + 1]) * inv
                };
                let old = u[h];
                if j == 0 {
                    let phi = self.phi[p];
                    res = res.max((gs.max(phi) - old).abs());
                    u[h] = (old + omega * (gs - old)).max(phi);
                } else {
                    res = res.max((gs - old).abs());
                    u[h] = old + omega * (gs - old);
                }
            }
        }
        res
    }

    /// Half-grid Dirichlet energy; edges inside the thin plane count one
    /// half, being shared with the mirrored half.
    fn energy(&self) -> f64 {
        let n = self.n;
        let ps = self.plane_strides();
        let layers = self.layers;
        let plane_m = self.m;
        let mut e = 0.0;
        for p in 0..self.plane_len {
            // plane multi-index to know which forward neighbours exist
            let mut idx = [0usize; MAX_DIM];
            let mut q = p;
            for k in (0..n - 1).rev() {
                idx[k] = q % plane_m;
                q /= plane_m;
            }
            for j in 0..layers {
                let h = p * layers + j;
                let u0 = self.u[h];
                let w = if j == 0 { 0.5 } else { 1.0 };
                for k in 0..n - 1 {
                    if idx[k] + 1 < plane_m {
                        let d = self.u[h + ps[k]] - u0;
                        e += w * d * d;
                    }
                }
                if j + 1 < layers {
                    let d = self.u[h + 1] - u0;
                    e += d * d;
                }
            }
        }
        0.5 * e
    }

    fn active(&self) -> usize {
        (0..self.plane_len)
            .filter(|&p| !self.fixed[p * self.layers] && self.u[p * self.layers] <= self.phi[p])
            .count()
    }
}

/// Solve the discrete thin obstacle problem by projected SOR on the upper
/// half-grid and reflect.
///
/// Interior nodes take the standard `2n + 1` point SOR update. Thin-plane
/// nodes use the reflected stencil (ghost value `u(x', -h) = u(x', h)`)
/// followed by projection onto `u >= phi`. Cube-boundary nodes hold the
/// Dirichlet data. Non-convergence is reported in the stats, not as an
/// error.
pub fn psor_solve(problem: &SignoriniProblem) -> (ScalarField, SolveStats) {
    let omega = problem.omega_value();
    let mut half = HalfGrid::new(problem);
    let mut checkpoints = vec![Checkpoint {
        iter: 0,
        residual: f64::INFINITY,
        energy: half.energy(),
        active: half.active(),
    }];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < problem.max_iters {
        residual = half.sweep(omega);
        iterations += 1;
        converged = residual <= problem.tol;
        if converged || iterations % CHECKPOINT_EVERY == 0 || iterations == problem.max_iters {
            checkpoints.push(Checkpoint {
                iter: iterations,
                residual,
                energy: half.energy(),
                active: half.active(),
            });
        }
        if iterations % 1000 == 0 {
            log::debug!("psor sweep {iterations}: residual {residual:.3e}");
        }
        if converged {
            break;
        }
    }
    if !converged {
        log::warn!("psor stopped after {iterations} sweeps with residual {residual:.3e}");
    }
    let field = reflect(problem, &half);
    (
        field,
        SolveStats {
            iterations,
            residual,
            converged,
            omega,
            checkpoints,
        },
    )
}

fn reflect(problem: &SignoriniProblem, half: &HalfGrid) -> ScalarField {
    let grid = problem.grid;
    let m = grid.m();
    let c = grid.center_index();
    let mut values = vec![0.0; grid.len()];
    for p in 0..half.plane_len {
        for j in 0..half.layers {
            let v = half.u[p * half.layers + j];
            values[p * m + c + j] = v;
            values[p * m + c - j] = v;
        }
    }
    ScalarField::from_parts(grid, values, true, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::poly::{HatSolution, Obstacle};
    use crate::solver::problem::{Boundary, Omega};
    use crate::poly::text::parse_poly;

    fn solve(problem: SignoriniProblem) -> (ScalarField, SolveStats) {
        psor_solve(&problem.with_omega(Omega::Auto).unwrap())
    }

    #[test]
    fn constant_data_gives_no_contact() {
        let g = Grid::new(2, 33).unwrap();
        let p = SignoriniProblem::new(g, Obstacle::Zero, Boundary::constant(2, 1.0)).unwrap();
        let (u, stats) = solve(p);
        assert!(stats.converged);
        assert!(u.values().iter().all(|v| (v - 1.0).abs() < 1e-8));
        assert_eq!(stats.checkpoints.last().unwrap().active, 0);
        assert!(u.is_even());
    }

    #[test]
    fn saddle_is_reproduced() {
        let g = Grid::new(2, 33).unwrap();
        let p2 = parse_poly("2 0 1; 0 2 -1", 2).unwrap();
        let b = Boundary::polynomial(p2.clone()).unwrap();
        let (u, stats) = solve(SignoriniProblem::new(g, Obstacle::Zero, b).unwrap());
        assert!(stats.converged);
        let f = p2.to_float();
        let err = (0..g.len())
            .map(|i| (u.value(i) - f.eval(&g.point(i)[..2])).abs())
            .fold(0.0, f64::max);
        // the discrete Laplacian is exact on quadratics
        assert!(err < 1e-8, "{err}");
        assert!(stats.energy_monotone());
    }

    #[test]
    fn hat_problem_small() {
        let g = Grid::new(2, 65).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let (u, stats) = solve(SignoriniProblem::new(g, Obstacle::Zero, Boundary::hat(hat.clone())).unwrap());
        assert!(stats.converged);
        assert!(stats.energy_monotone());
        let err = (0..g.len())
            .map(|i| (u.value(i) - hat.eval(&g.point(i)[..2])).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.05, "{err}");
        assert_eq!(u.symmetry_defect(), 0.0);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let g = Grid::new(2, 65).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let p = SignoriniProblem::new(g, Obstacle::Zero, Boundary::hat(hat))
            .unwrap()
            .with_max_iters(3);
        let (_, stats) = psor_solve(&p);
        assert!(!stats.converged);
        assert_eq!(stats.iterations, 3);
    }
}
