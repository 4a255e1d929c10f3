use crate::error::{Error, Result};
use crate::geometry::{ScalarField, MAX_DIM};
use crate::poly::{taylor_obstacle, Obstacle};

/// Recentre `v` at the thin-plane point `x0` and subtract the obstacle's
/// Taylor data of order `k`:
///
/// `u(x) = v(x + x0) - Qext(x) - (phi(x' + x0) - Q(x'))`.
///
/// The result lives on the same grid. Nodes whose shifted position leaves
/// the valid region of `v` hold `NaN` and the extent shrinks accordingly.
/// When `x0` is a lattice node the shift is an exact index shift, otherwise
/// `v` is interpolated.
pub fn normalize(v: &ScalarField, obstacle: &Obstacle, x0: &[f64], k: u32) -> Result<ScalarField> {
    let grid = *v.grid();
    let n = grid.n();
    if x0.len() != n {
        return Err(Error::Argument(format!(
            "x0 has {} coordinates, grid dimension is {n}",
            x0.len()
        )));
    }
    if x0[n - 1] != 0.0 {
        return Err(Error::Argument(format!("x0 = {x0:?} is not on the thin plane")));
    }
    let shift = x0.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let extent = v.extent() - shift;
    if extent <= 0.0 {
        return Err(Error::Argument(format!("x0 = {x0:?} leaves no valid region")));
    }
    let taylor = taylor_obstacle(obstacle, &x0[..n - 1], k)?;
    let qext = taylor.q_ext.to_float();
    let rem = (&taylor.shifted - &taylor.q).to_float();
    let identity = taylor.q_ext.is_zero() && taylor.shifted.is_zero();

    let m = grid.m();
    let mut offset = [0isize; MAX_DIM];
    let mut on_node = true;
    for k in 0..n {
        let t = grid.lattice_coord(x0[k]) - grid.center_index() as f64;
        if t.fract() != 0.0 {
            on_node = false;
        }
        offset[k] = t as isize;
    }

    let c = grid.center_index();
    let mut values = vec![f64::NAN; grid.len()];
    let mut y = [0.0; MAX_DIM];
    for flat in 0..grid.len() {
        if flat % m < c {
            continue;
        }
        let x = grid.point(flat);
        let mut inside = true;
        for k in 0..n {
            y[k] = x[k] + x0[k];
            if y[k].abs() > v.extent() + 1e-12 {
                inside = false;
            }
        }
        if !inside {
            continue;
        }
        let shifted = if on_node {
            let idx = grid.multi(flat);
            let mut j = [0usize; MAX_DIM];
            for k in 0..n {
                j[k] = (idx[k] as isize + offset[k]) as usize;
            }
            v.value(grid.flat(&j[..n]))
        } else {
            v.interp_raw(&y[..n])
        };
        let val = if identity {
            shifted
        } else {
            shifted - qext.eval(&x[..n]) - rem.eval(&x[..n - 1])
        };
        values[flat] = val;
        values[grid.mirror(flat)] = val;
    }
    Ok(ScalarField::from_parts(grid, values, true, extent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid;
    use crate::poly::text::parse_poly;
    use crate::poly::HatSolution;

    #[test]
    fn zero_obstacle_at_origin_is_identity() {
        let g = Grid::new(2, 33).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let v = ScalarField::sample(g, |x| hat.eval(x)).unwrap();
        let u = normalize(&v, &Obstacle::Zero, &[0.0, 0.0], 2).unwrap();
        assert_eq!(u.values(), v.values());
    }

    #[test]
    fn removes_extended_taylor_polynomial() {
        let g = Grid::new(3, 33).unwrap();
        let hat = HatSolution::standard(1.5, 3).unwrap();
        let v = ScalarField::sample(g, |x| hat.eval(x) + x[0] * x[0] - x[2] * x[2]).unwrap();
        let phi = Obstacle::from_poly(parse_poly("2 0 1", 2).unwrap());
        let u = normalize(&v, &phi, &[0.0, 0.0, 0.0], 2).unwrap();
        for i in 0..g.len() {
            let x = g.point(i);
            assert!((u.value(i) - hat.eval(&x)).abs() < 1e-14);
        }
    }

    #[test]
    fn shifted_point_vanishes() {
        // v = hat(x1 - 1/4) + phi-extension, x0 = (1/4, 0) is a free boundary point
        let g = Grid::new(2, 65).unwrap();
        let hat = HatSolution::standard(1.5, 2).unwrap();
        let phi = Obstacle::from_poly(parse_poly("2 1", 1).unwrap());
        let v = ScalarField::sample(g, |x| hat.eval(&[x[0] - 0.25, x[1]]) + x[0] * x[0] - x[1] * x[1]).unwrap();
        let u = normalize(&v, &phi, &[0.25, 0.0], 2).unwrap();
        let origin = g.flat(&[32, 32]);
        assert!(u.value(origin).abs() < 1e-14);
        assert!((u.extent() - 0.75).abs() < 1e-15);
        assert!(u.value(g.flat(&[64, 32])).is_nan());
        assert!(!u.value(g.flat(&[0, 32])).is_nan());
        let off = normalize(&v, &phi, &[0.2, 0.0], 2).unwrap();
        assert!(off.interp(&[0.05, 0.0]).unwrap().abs() < 1e-2);
        assert!(normalize(&v, &phi, &[0.2, 0.1], 2).is_err());
    }
}
