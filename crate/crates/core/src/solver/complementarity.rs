use serde::Serialize;

use crate::geometry::ScalarField;
use crate::poly::Obstacle;

/// Slack, one-sided flux and their product at one thin-plane node.
#[derive(Debug, Clone, Serialize)]
pub struct PlaneNodeCheck {
    pub x: Vec<f64>,
    pub slack: f64,
    pub flux: f64,
    pub product: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplementarityReport {
    pub tol: f64,
    pub min_slack: f64,
    pub min_flux: f64,
    pub max_product: f64,
    pub pass: bool,
    pub nodes: Vec<PlaneNodeCheck>,
}

/// Check the discrete Signorini conditions `u - phi >= 0`,
/// `-d_{x_n} u >= 0` and `(u - phi) d_{x_n} u = 0` on the interior thin-plane
/// nodes, with the one-sided flux `-(u(x', h) - u(x', 0)) / h` and tolerance
/// `10 h`.
pub fn complementarity_check(u: &ScalarField, obstacle: &Obstacle) -> ComplementarityReport {
    let grid = u.grid();
    let n = grid.n();
    let h = grid.h();
    let tol = 10.0 * h;
    let phi = obstacle.poly(n - 1).to_float();
    let mut nodes = Vec::new();
    for flat in grid.plane_nodes() {
        if grid.on_boundary(flat) {
            continue;
        }
        let x = grid.point(flat);
        let u0 = u.value(flat);
        let u1 = u.value(flat + 1);
        if !(u0.is_finite() && u1.is_finite()) {
            continue;
        }
        let slack = u0 - phi.eval(&x[..n - 1]);
        let flux = -(u1 - u0) / h;
        nodes.push(PlaneNodeCheck {
            x: x[..n].to_vec(),
            slack,
            flux,
            product: slack * flux,
        });
    }
    let min_slack = nodes.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    let min_flux = nodes.iter().map(|c| c.flux).fold(f64::INFINITY, f64::min);
    let max_product = nodes.iter().map(|c| c.product).fold(f64::NEG_INFINITY, f64::max);
    let pass = nodes.is_empty() || (min_slack >= -tol && min_flux >= -tol && max_product <= tol);
    ComplementarityReport {
        tol,
        min_slack,
        min_flux,
        max_product,
        pass,
        nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::poly::HatSolution;

    #[test]
    fn hat_passes() {
        let g = Grid::new(2, 257).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let u = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        let r = complementarity_check(&u, &Obstacle::Zero);
        assert!(r.pass, "{} {} {}", r.min_slack, r.min_flux, r.max_product);
    }

    #[test]
    fn odd_field_fails_flux() {
        let g = Grid::new(2, 65).unwrap();
        let u = ScalarField::sample(g, |x| x[1]).unwrap();
        let r = complementarity_check(&u, &Obstacle::Zero);
        assert!(!r.pass);
        assert!(r.min_flux < -r.tol);
    }

    #[test]
    fn zero_field_passes_trivially() {
        let g = Grid::new(3, 17).unwrap();
        let u = ScalarField::sample(g, |_| 0.0).unwrap();
        let r = complementarity_check(&u, &Obstacle::Zero);
        assert!(r.pass);
        assert_eq!(r.max_product, 0.0);
        assert_eq!(r.min_slack, 0.0);
    }
}
