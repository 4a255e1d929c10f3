use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::polynomial::{Exponents, HomPoly, Poly};
use crate::error::{Error, Result};

/// Harmonic extension of a thin polynomial `q(x')` to `R^n`, even in `x_n`.
///
/// Returns `sum_j (-Delta')^j q * x_n^{2j} / (2j)!`. The series terminates
/// because each application of `Delta'` lowers the degree by two.
pub fn harmonic_extend_poly(q: &Poly) -> Poly {
    let n = q.nvars() + 1;
    let mut out = Poly::zero(n);
    let mut term = q.clone();
    let mut j: u32 = 0;
    let mut fact = BigInt::one();
    let minus_one = -BigRational::one();
    while !term.is_zero() {
        let c = BigRational::from_integer(fact.clone()).recip();
        for (e, v) in term.terms() {
            let mut f = e.clone();
            f.push(2 * j);
            out.add_term(f, v * &c);
        }
        term = term.laplacian().scale(&minus_one);
        j += 1;
        fact *= BigInt::from(2 * j - 1) * BigInt::from(2 * j);
    }
    out
}

/// [`harmonic_extend_poly`] for a homogeneous input; the degree is kept.
pub fn harmonic_extend(q: &HomPoly) -> HomPoly {
    HomPoly::new(harmonic_extend_poly(q.poly()), q.degree())
        .expect("harmonic extension preserves homogeneity")
}

/// All exponent vectors of length `nvars` and total degree `degree`, in
/// decreasing lexicographic order (`x1^degree` first).
pub fn multi_indices(nvars: usize, degree: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fill(&mut out, &mut cur, 0, degree);
    out
}

fn fill(out: &mut Vec<Exponents>, cur: &mut Exponents, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        return;
    }
    for a in (0..=left).rev() {
        cur[pos] = a;
        fill(out, cur, pos + 1, left - a);
    }
}

/// Basis of the `kappa`-homogeneous harmonic polynomials in `n` variables
/// that are even in `x_n`: the harmonic extensions of the thin monomials
/// `x'^alpha`, `|alpha| = kappa`.
///
/// The result has `C(kappa + n - 2, n - 2)` elements; linear independence
/// is checked by an exact rank computation.
pub fn pkappa_basis(n: usize, kappa: u32) -> Result<Vec<HomPoly>> {
    if kappa == 0 || kappa % 2 == 1 {
        return Err(Error::Argument(format!(
            "P_kappa basis needs an even positive degree, got {kappa}"
        )));
    }
    if n < 2 {
        return Err(Error::Argument(format!("dimension {n} has no thin plane")));
    }
    let basis: Vec<HomPoly> = multi_indices(n - 1, kappa)
        .into_iter()
        .map(|alpha| {
            let q = HomPoly::new(Poly::monomial(alpha, BigRational::one()), kappa)
                .expect("monomial is homogeneous");
            harmonic_extend(&q)
        })
        .collect();
    let rows = coefficient_rows(basis.iter().map(HomPoly::poly));
    let rank = exact_rank(rows);
    if rank != basis.len() {
        return Err(Error::Fit(format!(
            "basis rank {rank} below its size {}",
            basis.len()
        )));
    }
    Ok(basis)
}

/// Coefficient vectors of `polys` over the union of their monomials.
pub fn coefficient_rows<'a>(polys: impl Iterator<Item = &'a Poly> + Clone) -> Vec<Vec<BigRational>> {
    let mut monos: Vec<Exponents> = polys
        .clone()
        .flat_map(|p| p.terms().map(|(e, _)| e.clone()).collect::<Vec<_>>())
        .collect();
    monos.sort();
    monos.dedup();
    polys
        .map(|p| monos.iter().map(|e| p.coeff(e)).collect())
        .collect()
}

/// Rank of a rational matrix by fraction-exact Gaussian elimination.
pub fn exact_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] * &inv;
            for c in col..ncols {
                let d = &f * &rows[rank][c];
                rows[r][c] -= d;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Outcome of a `P_kappa` membership test.
///
/// Harmonicity and evenness are exact. Nonnegativity of the trace is only
/// checked on `samples` directions of the unit sphere in `R^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PkappaVerdict {
    pub harmonic: bool,
    pub even: bool,
    pub min_trace: f64,
    pub trace_nonnegative: bool,
    pub samples: usize,
}

impl PkappaVerdict {
    pub fn is_member(&self) -> bool {
        self.harmonic && self.even && self.trace_nonnegative
    }

    /// Exact clauses only.
    pub fn is_structural(&self) -> bool {
        self.harmonic && self.even
    }

    pub fn describe(&self) -> String {
        format!(
            "harmonic={} even={} trace>=0 checked on {} directions (min {:.3e})",
            self.harmonic, self.even, self.samples, self.min_trace
        )
    }
}

/// Membership test for `P_kappa`.
pub fn check_pkappa(p: &HomPoly, samples: usize) -> PkappaVerdict {
    let n = p.nvars();
    let harmonic = p.poly().laplacian().is_zero();
    let even = p.poly().is_even_in(n - 1);
    let trace = p.poly().trace().to_float();
    let dirs = plane_directions(n - 1, samples);
    let min_trace = dirs
        .iter()
        .map(|d| trace.eval(d))
        .fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * p.poly().max_abs_coeff().max(1.0);
    PkappaVerdict {
        harmonic,
        even,
        min_trace,
        trace_nonnegative: min_trace >= -tol,
        samples: dirs.len(),
    }
}

/// Quasi-uniform unit directions in `R^d` for `d` in `{1, 2}`.
pub fn plane_directions(d: usize, samples: usize) -> Vec<Vec<f64>> {
    match d {
        0 => vec![vec![]],
        1 => vec![vec![1.0], vec![-1.0]],
        _ => (0..samples.max(1))
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / samples.max(1) as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
    }
}

/// Number of thin monomials of degree `kappa` in `n - 1` variables.
pub fn pkappa_dim(n: usize, kappa: u32) -> usize {
    // C(kappa + n - 2, n - 2)
    let k = n as u64 - 2;
    let mut acc: u64 = 1;
    for i in 1..=k {
        acc = acc * (kappa as u64 + i) / i;
    }
    acc as usize
}
