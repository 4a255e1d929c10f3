use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::harmonic::{coefficient_rows, exact_rank};
use crate::poly::HomPoly;

/// How the rank of the trace gradient is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RankMode {
    /// Fraction-exact elimination on the rational coefficients.
    Exact,
    /// Singular values above `rel_tol * sigma_max`.
    Numeric { rel_tol: f64 },
}

/// Stratification dimension `d = (n - 1) - rank` of the matrix whose rows
/// are the coefficient vectors of `d/dx'_i (p restricted to the plane)`.
pub fn stratify(p: &HomPoly, mode: RankMode) -> Result<usize> {
    let trace = p.trace();
    if trace.is_zero() {
        return Err(Error::DegenerateCandidate);
    }
    let d = p.nvars() - 1;
    let partials: Vec<_> = (0..d).map(|i| trace.poly().partial(i)).collect();
    let rows = coefficient_rows(partials.iter());
    let rank = match mode {
        RankMode::Exact => exact_rank(rows),
        RankMode::Numeric { rel_tol } => numeric_rank(&rows, rel_tol),
    };
    Ok(d - rank)
}

fn numeric_rank(rows: &[Vec<num_rational::BigRational>], rel_tol: f64) -> usize {
    use num_traits::ToPrimitive;
    let ncols = rows.first().map_or(0, Vec::len);
    if ncols == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j].to_f64().unwrap_or(0.0));
    let sv = m.singular_values();
    let smax = sv.max();
    if !(smax > 0.0) {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::text::parse_poly;
    use crate::poly::{cross_example, harmonic_extend, rat};

    fn ext(text: &str, degree: u32) -> HomPoly {
        harmonic_extend(&HomPoly::new(parse_poly(text, 2).unwrap(), degree).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(stratify(&cross_example(), RankMode::Exact).unwrap(), 0);
        assert_eq!(stratify(&ext("0 2 1", 2), RankMode::Exact).unwrap(), 1);
        assert_eq!(stratify(&ext("2 0 1; 0 2 1", 2), RankMode::Exact).unwrap(), 0);
        let noisy = ext("0 2 1; 2 0 1/1000; 1 1 -1/2000", 2);
        assert_eq!(stratify(&noisy, RankMode::Exact).unwrap(), 0);
        assert_eq!(stratify(&noisy, RankMode::Numeric { rel_tol: 0.05 }).unwrap(), 1);
    }

    #[test]
    fn scale_invariant() {
        let p = ext("2 0 1; 1 1 3; 0 2 9/4", 2);
        let q = p.scale(&rat(7, 3));
        assert_eq!(
            stratify(&p, RankMode::Exact).unwrap(),
            stratify(&q, RankMode::Exact).unwrap()
        );
        // (x1 + 3/2 x2)^2: one invariant direction
        assert_eq!(stratify(&p, RankMode::Exact).unwrap(), 1);
    }

    #[test]
    fn zero_trace_is_degenerate() {
        let p = HomPoly::new(parse_poly("1 0 1 1", 3).unwrap(), 2).unwrap();
        assert!(matches!(
            stratify(&p, RankMode::Exact),
            Err(Error::DegenerateCandidate)
        ));
    }
}
