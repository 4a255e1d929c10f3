use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::MAX_DIM;

/// Exponent vector `alpha`, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact rational value of a finite float.
pub fn rat_from_f64(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::Argument(format!("non-finite value {v}")))
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exps: Exponents, c: BigRational) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, BigRational)>,
    ) -> Result<Self> {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Argument(format!(
                    "exponent vector of length {} in a {nvars}-variable polynomial",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, exps: Exponents, c: BigRational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Whether every term has an even exponent in variable `var`.
    pub fn is_even_in(&self, var: usize) -> bool {
        self.terms.keys().all(|e| e[var] % 2 == 0)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn partial(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[var] -= 1;
            out.add_term(f, c * rat_int(e[var] as i64));
        }
        out
    }

    /// Sum of second derivatives in the first `k` variables.
    pub fn laplacian_first(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            for (var, &p) in e.iter().enumerate().take(k) {
                if p < 2 {
                    continue;
                }
                let mut f = e.clone();
                f[var] -= 2;
                out.add_term(f, c * rat_int(p as i64 * (p as i64 - 1)));
            }
        }
        out
    }

    pub fn laplacian(&self) -> Poly {
        self.laplacian_first(self.nvars)
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Nonzero homogeneous components in increasing degree.
    pub fn homogeneous_parts(&self) -> Vec<HomPoly> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        (0..=deg)
            .map(|d| HomPoly {
                degree: d,
                poly: self.homogeneous_part(d),
            })
            .filter(|h| !h.poly.is_zero())
            .collect()
    }

    /// Sum of homogeneous components of degree at most `k`.
    pub fn truncate(&self, k: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= k)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Restriction to `{x_last = 0}` as a polynomial in one fewer variable.
    pub fn trace(&self) -> Poly {
        let k = self.nvars - 1;
        Poly {
            nvars: k,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[k] == 0)
                .map(|(e, c)| (e[..k].to_vec(), c.clone()))
                .collect(),
        }
    }

    /// The same polynomial viewed in `nvars + 1` variables (new last variable
    /// absent).
    pub fn embed(&self) -> Poly {
        Poly {
            nvars: self.nvars + 1,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e.clone();
                    f.push(0);
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// `x -> p(x + a)`, exact.
    pub fn shift(&self, a: &[BigRational]) -> Result<Poly> {
        if a.len() != self.nvars {
            return Err(Error::Argument(format!(
                "shift vector has {} entries, polynomial has {} variables",
                a.len(),
                self.nvars
            )));
        }
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            // expand prod_i (x_i + a_i)^{e_i}
            let mut partial = vec![(vec![0u32; self.nvars], c.clone())];
            for (i, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (p as usize + 1));
                for (pe, pc) in &partial {
                    let mut binom = BigInt::one();
                    for j in 0..=p {
                        // C(p, j) x_i^j a_i^{p-j}
                        let mut f = pe.clone();
                        f[i] += j;
                        let coeff = pc * BigRational::from_integer(binom.clone()) * pow_rat(&a[i], p - j);
                        next.push((f, coeff));
                        binom = binom * BigInt::from(p - j) / BigInt::from(j + 1);
                    }
                }
                partial = next;
            }
            for (f, v) in partial {
                out.add_term(f, v);
            }
        }
        Ok(out)
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &p) in x.iter().zip(e) {
                if p > 0 {
                    t *= pow_rat(xi, p);
                }
            }
            acc += t;
        }
        acc
    }

    /// Floating-point evaluation. For repeated evaluation prefer
    /// [`Poly::to_float`].
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.to_float().eval(x)
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut ex = [0u32; MAX_DIM + 1];
                    for (k, &p) in e.iter().enumerate().take(MAX_DIM + 1) {
                        ex[k] = p;
                    }
                    (c.to_f64().unwrap_or(f64::NAN), ex)
                })
                .collect(),
        }
    }

    /// Largest absolute coefficient as a float.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    fn combine(&self, other: &Poly, sign: i64) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), if sign < 0 { -c.clone() } else { c.clone() });
        }
        out
    }
}

pub(crate) fn pow_rat(x: &BigRational, p: u32) -> BigRational {
    num_traits::pow::pow(x.clone(), p as usize)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}](", self.nvars)?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (k, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", k + 1)?,
                    _ => write!(f, "*x{}^{p}", k + 1)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.combine(rhs, 1)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.combine(rhs, -1)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

/// Float copy of a [`Poly`] for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct FloatPoly {
    nvars: usize,
    terms: Vec<(f64, [u32; MAX_DIM + 1])>,
}

impl FloatPoly {
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for k in 0..self.nvars {
                if e[k] > 0 {
                    t *= x[k].powi(e[k] as i32);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

/// Homogeneous polynomial of a fixed degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomPoly {
    degree: u32,
    poly: Poly,
}

impl HomPoly {
    /// Wrap `poly` after checking every term has total degree `degree`.
    pub fn new(poly: Poly, degree: u32) -> Result<Self> {
        if let Some((e, _)) = poly.terms().find(|(e, _)| e.iter().sum::<u32>() != degree) {
            return Err(Error::Argument(format!(
                "term with exponents {e:?} is not of degree {degree}"
            )));
        }
        Ok(HomPoly { degree, poly })
    }

    /// Infer the degree; the zero polynomial gets degree 0.
    pub fn from_poly(poly: Poly) -> Result<Self> {
        let d = poly.degree().unwrap_or(0);
        Self::new(poly, d)
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomPoly {
            degree,
            poly: Poly::zero(nvars),
        }
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.poly.eval(x)
    }

    pub fn to_float(&self) -> FloatPoly {
        self.poly.to_float()
    }

    pub fn laplacian(&self) -> HomPoly {
        HomPoly {
            degree: self.degree.saturating_sub(2),
            poly: self.poly.laplacian(),
        }
    }

    pub fn partial(&self, var: usize) -> HomPoly {
        HomPoly {
            degree: self.degree.saturating_sub(1),
            poly: self.poly.partial(var),
        }
    }

    /// Restriction to the thin plane `{x_n = 0}`.
    pub fn trace(&self) -> HomPoly {
        HomPoly {
            degree: self.degree,
            poly: self.poly.trace(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> HomPoly {
        HomPoly {
            degree: self.degree,
            poly: self.poly.scale(c),
        }
    }

    /// `x . grad p - degree * p`, identically zero for homogeneous `p`.
    pub fn euler_residual(&self) -> Poly {
        let n = self.nvars();
        let mut acc = self.poly.scale(&-rat_int(self.degree as i64));
        for i in 0..n {
            acc = &acc + &(&Poly::var(n, i) * &self.poly.partial(i));
        }
        acc
    }

    pub fn add(&self, other: &HomPoly) -> Result<HomPoly> {
        if other.degree != self.degree && !other.is_zero() && !self.is_zero() {
            return Err(Error::Argument("degree mismatch in sum".into()));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        Ok(HomPoly {
            degree,
            poly: &self.poly + &other.poly,
        })
    }
}

impl fmt::Debug for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomPoly[deg {}; {:?}]", self.degree, self.poly)
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.poly, f)
    }
}
