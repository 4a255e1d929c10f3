//! Plain-text polynomial format.
//!
//! One term per line: `a1 a2 ... an  num/den`, exponents first and the
//! rational coefficient last. A bare integer coefficient is accepted on
//! input. `#` starts a comment, blank lines are ignored and `;` may be used
//! in place of a newline so that a polynomial fits on one config line.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::polynomial::Poly;
use crate::error::{Error, Result};

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u32 = 64;

/// Parse a polynomial in `nvars` variables.
pub fn parse_poly(text: &str, nvars: usize) -> Result<Poly> {
    let p = parse_terms(text, Some(nvars))?;
    Ok(p.unwrap_or_else(|| Poly::zero(nvars)))
}

/// Parse a polynomial, taking the variable count from the first term.
/// Fails on input without terms.
pub fn parse_poly_infer(text: &str) -> Result<Poly> {
    parse_terms(text, None)?.ok_or_else(|| Error::parse(1, "no terms; cannot infer the dimension"))
}

fn parse_terms(text: &str, nvars: Option<usize>) -> Result<Option<Poly>> {
    let mut poly: Option<Poly> = nvars.map(Poly::zero);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        for chunk in line.split(';') {
            let toks: Vec<&str> = chunk.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            if toks.len() < 2 {
                return Err(Error::parse(line_no, "a term needs exponents and a coefficient"));
            }
            let (exp_toks, coeff_tok) = toks.split_at(toks.len() - 1);
            let want = poly.as_ref().map_or(exp_toks.len(), Poly::nvars);
            if exp_toks.len() != want {
                return Err(Error::parse(
                    line_no,
                    format!("expected {want} exponents, found {}", exp_toks.len()),
                ));
            }
            let mut exps = Vec::with_capacity(want);
            for t in exp_toks {
                let e: u32 = t
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad exponent '{t}'")))?;
                if e > MAX_EXPONENT {
                    return Err(Error::parse(
                        line_no,
                        format!("exponent {e} exceeds the limit {MAX_EXPONENT}"),
                    ));
                }
                exps.push(e);
            }
            let c = parse_rational(coeff_tok[0])
                .ok_or_else(|| Error::parse(line_no, format!("bad coefficient '{}'", coeff_tok[0])))?;
            poly.get_or_insert_with(|| Poly::zero(want)).add_term(exps, c);
        }
    }
    Ok(poly)
}

/// `num/den` or `num` with optional sign; the denominator must be nonzero.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    if num.len() > 4096 || den.len() > 4096 {
        return None;
    }
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Write a polynomial, one term per line in decreasing exponent order,
/// coefficients always as `num/den`.
pub fn write_poly(p: &Poly) -> String {
    let mut out = String::new();
    for (e, c) in p.terms().rev() {
        for a in e {
            let _ = write!(out, "{a} ");
        }
        let _ = writeln!(out, " {}/{}", c.numer(), c.denom());
    }
    out
}

/// Single-line form with `;` separators.
pub fn write_poly_inline(p: &Poly) -> String {
    if p.is_zero() {
        return "zero".into();
    }
    write_poly(p)
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Best rational approximation of `v` with denominator at most `max_den`,
/// by continued fractions.
pub fn rat_approx(v: f64, max_den: i64) -> BigRational {
    if !v.is_finite() || v == 0.0 {
        return BigRational::zero();
    }
    let neg = v < 0.0;
    let mut x = v.abs();
    if x > 1e15 {
        let r = BigRational::from_float(x.round()).unwrap_or_else(BigRational::zero);
        return if neg { -r } else { r };
    }
    // convergents p/q
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1 == 0 {
        return BigRational::zero();
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// Rationalize every coefficient of a float polynomial given as terms.
pub fn poly_from_floats(
    nvars: usize,
    terms: impl IntoIterator<Item = (Vec<u32>, f64)>,
    max_den: i64,
) -> Result<Poly> {
    Poly::from_terms(
        nvars,
        terms.into_iter().map(|(e, c)| (e, rat_approx(c, max_den))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::polynomial::{rat, rat_int};
    use proptest::prelude::*;

    #[test]
    fn parse_example() {
        let p = parse_poly("# u_ex\n2 2 0  1\n2 0 2 -1; 0 2 2 -1/1\n0 0 4  1/3\n", 3).unwrap();
        assert_eq!(p.eval(&[1.0, 1.0, 0.0]), 1.0);
        assert!((p.eval(&[0.0, 0.0, 1.0]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.coeff(&[0, 0, 4]), rat(1, 3));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_poly("2 0 1\n1 1 x\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_poly("2 0 1 1\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(parse_poly("1 1 1/0", 2).is_err());
        assert!(parse_poly("65 0 1", 2).is_err());
        assert!(parse_poly_infer("# nothing\n").is_err());
        assert_eq!(parse_poly_infer("3 1\n").unwrap().nvars(), 1);
    }

    #[test]
    fn approximations() {
        assert_eq!(rat_approx(1.0 / 3.0, 1000), rat(1, 3));
        assert_eq!(rat_approx(-0.5000000001, 1000), rat(-1, 2));
        assert_eq!(rat_approx(2.0, 10), rat_int(2));
        assert_eq!(rat_approx(-0.25, 10), rat(-1, 4));
    }

    #[test]
    fn inline_form() {
        let p = parse_poly("2 0 1; 0 2 -1", 2).unwrap();
        assert_eq!(write_poly_inline(&p), "2 0 1/1; 0 2 -1/1");
        assert_eq!(parse_poly(&write_poly_inline(&p), 2).unwrap(), p);
        assert_eq!(write_poly_inline(&Poly::zero(2)), "zero");
    }

    proptest! {
        #[test]
        fn roundtrip(terms in prop::collection::vec(
            ((0u32..9, 0u32..9, 0u32..9), -50i64..50, 1i64..20), 0..12)) {
            let p = Poly::from_terms(3, terms.iter().map(|((a, b, c), num, den)| {
                (vec![*a, *b, *c], rat(*num, *den))
            })).unwrap();
            let text = write_poly(&p);
            prop_assert_eq!(parse_poly(&text, 3).unwrap(), p);
        }
    }
}
