use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Grid;
use crate::poly::text::{parse_poly, write_poly_inline};
use crate::poly::{FloatPoly, HatSolution, Obstacle, Poly, Variant};

/// One summand of the Dirichlet data.
#[derive(Debug, Clone)]
pub enum BoundaryTerm {
    Const(f64),
    Hat { coeff: f64, hat: HatSolution },
    Poly { coeff: f64, poly: Poly, fast: FloatPoly },
}

impl BoundaryTerm {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            BoundaryTerm::Const(c) => *c,
            BoundaryTerm::Hat { coeff, hat } => coeff * hat.eval(x),
            BoundaryTerm::Poly { coeff, fast, .. } => coeff * fast.eval(x),
        }
    }

    fn to_text(&self) -> String {
        match self {
            BoundaryTerm::Const(c) => format!("const {c}"),
            BoundaryTerm::Hat { coeff, hat } => {
                let mut s = String::new();
                if *coeff != 1.0 {
                    let _ = write!(s, "{coeff} * ");
                }
                let _ = write!(s, "hat {}", hat.kappa());
                if hat.variant() == Variant::Im {
                    s.push_str(" im");
                }
                let axis = hat.axis();
                if axis[0] != 1.0 {
                    s.push_str(" axis");
                    for a in axis {
                        let _ = write!(s, " {a}");
                    }
                }
                s
            }
            BoundaryTerm::Poly { coeff, poly, .. } => {
                let body = format!("poly({})", write_poly_inline(poly));
                if *coeff != 1.0 {
                    format!("{coeff} * {body}")
                } else {
                    body
                }
            }
        }
    }
}

/// Dirichlet data `g`, a sum of constants, explicit solutions and
/// polynomials, all even in `x_n`. Defined on the whole cube.
///
/// Text grammar, terms joined by `+`:
/// `[c *] hat KAPPA [im] [axis a1 ...]`, `const C`, `[c *] poly(TERMS)`
/// where `TERMS` is polynomial text with `;` separators.
#[derive(Debug, Clone)]
pub struct Boundary {
    n: usize,
    terms: Vec<BoundaryTerm>,
}

impl Boundary {
    pub fn new(n: usize, terms: Vec<BoundaryTerm>) -> Result<Self> {
        for t in &terms {
            match t {
                BoundaryTerm::Hat { hat, .. } if hat.dim() != n => {
                    return Err(Error::Config(format!(
                        "hat term has dimension {}, problem has {n}",
                        hat.dim()
                    )))
                }
                BoundaryTerm::Poly { poly, .. } => {
                    if poly.nvars() != n {
                        return Err(Error::Config(format!(
                            "boundary polynomial has {} variables, problem has {n}",
                            poly.nvars()
                        )));
                    }
                    if !poly.is_even_in(n - 1) {
                        return Err(Error::Config(
                            "boundary polynomial must be even in x_n".into(),
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(Boundary { n, terms })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Boundary {
            n,
            terms: vec![BoundaryTerm::Const(c)],
        }
    }

    pub fn hat(hat: HatSolution) -> Self {
        Boundary {
            n: hat.dim(),
            terms: vec![BoundaryTerm::Hat { coeff: 1.0, hat }],
        }
    }

    pub fn polynomial(poly: Poly) -> Result<Self> {
        let n = poly.nvars();
        let fast = poly.to_float();
        Self::new(n, vec![BoundaryTerm::Poly { coeff: 1.0, poly, fast }])
    }

    pub fn plus(mut self, other: Boundary) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::Config("dimension mismatch in boundary sum".into()));
        }
        self.terms.extend(other.terms);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[BoundaryTerm] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn parse(spec: &str, n: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in split_top_level(spec) {
            let t = raw.trim();
            if t.is_empty() {
                return Err(Error::Config(format!("empty term in boundary '{spec}'")));
            }
            terms.push(parse_term(t, n)?);
        }
        Self::new(n, terms)
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "const 0".into();
        }
        self.terms
            .iter()
            .map(BoundaryTerm::to_text)
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            // a '+' directly after 'e' or 'E' belongs to a float exponent
            b'+' if depth == 0 && !(i > 0 && matches!(bytes[i - 1], b'e' | b'E') && i >= 2 && bytes[i - 2].is_ascii_digit()) => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_f64(tok: &str, what: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Config(format!("bad {what} '{tok}'")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("{what} must be finite, got '{tok}'")));
    }
    Ok(v)
}

fn parse_term(t: &str, n: usize) -> Result<BoundaryTerm> {
    let (coeff, body) = match t.split_once('*') {
        Some((c, rest)) if !c.contains('(') => (parse_f64(c.trim(), "coefficient")?, rest.trim()),
        _ => (1.0, t),
    };
    if let Some(inner) = body.strip_prefix("poly(") {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| Error::Config(format!("unterminated poly( in '{t}'")))?;
        let poly = parse_poly(inner, n).map_err(|e| Error::Config(format!("in boundary polynomial: {e}")))?;
        let fast = poly.to_float();
        return Ok(BoundaryTerm::Poly { coeff, poly, fast });
    }
    let toks: Vec<&str> = body.split_whitespace().collect();
    match toks.as_slice() {
        ["const", c] => Ok(BoundaryTerm::Const(coeff * parse_f64(c, "constant")?)),
        ["hat", k, rest @ ..] => {
            let kappa = parse_f64(k, "kappa")?;
            let mut variant = Variant::Re;
            let mut axis = vec![0.0; n - 1];
            axis[0] = 1.0;
            let mut i = 0;
            while i < rest.len() {
                match rest[i] {
                    "im" => variant = Variant::Im,
                    "re" => variant = Variant::Re,
                    "axis" => {
                        if rest.len() < i + n {
                            return Err(Error::Config(format!("axis needs {} components", n - 1)));
                        }
                        for k in 0..n - 1 {
                            axis[k] = parse_f64(rest[i + 1 + k], "axis component")?;
                        }
                        i += n - 1;
                    }
                    other => return Err(Error::Config(format!("unknown hat option '{other}'"))),
                }
                i += 1;
            }
            let hat = HatSolution::new(kappa, variant, &axis)
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(BoundaryTerm::Hat { coeff, hat })
        }
        _ => Err(Error::Config(format!("cannot parse boundary term '{t}'"))),
    }
}

/// Relaxation parameter for PSOR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omega {
    Fixed(f64),
    /// `2 / (1 + sin(pi / (m - 1)))`, optimal for the Laplacian on the cube.
    Auto,
}

impl Omega {
    pub fn resolve(self, grid: &Grid) -> f64 {
        match self {
            Omega::Fixed(w) => w,
            Omega::Auto => optimal_omega(grid.m()),
        }
    }
}

pub fn optimal_omega(m: usize) -> f64 {
    2.0 / (1.0 + (std::f64::consts::PI / (m - 1) as f64).sin())
}

pub const DEFAULT_OMEGA: f64 = 1.8;
pub const DEFAULT_TOL: f64 = 1e-10;

pub fn default_max_iters(n: usize) -> usize {
    if n == 2 {
        1_000_000
    } else {
        100_000
    }
}

/// Discrete thin obstacle problem on the cube.
#[derive(Debug, Clone)]
pub struct SignoriniProblem {
    pub grid: Grid,
    pub obstacle: Obstacle,
    pub boundary: Boundary,
    pub omega: Omega,
    pub tol: f64,
    pub max_iters: usize,
}

impl SignoriniProblem {
    /// Problem with default solver settings; validates the data.
    pub fn new(grid: Grid, obstacle: Obstacle, boundary: Boundary) -> Result<Self> {
        let p = SignoriniProblem {
            grid,
            obstacle,
            boundary,
            omega: Omega::Fixed(DEFAULT_OMEGA),
            tol: DEFAULT_TOL,
            max_iters: default_max_iters(grid.n()),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_omega(mut self, omega: Omega) -> Result<Self> {
        self.omega = omega;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_iters(mut self, it: usize) -> Self {
        self.max_iters = it;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.n();
        if self.boundary.dim() != n {
            return Err(Error::Config(format!(
                "boundary data has dimension {}, grid has {n}",
                self.boundary.dim()
            )));
        }
        if let Obstacle::Polynomial(p) = &self.obstacle {
            if p.nvars() != n - 1 {
                return Err(Error::Config(format!(
                    "obstacle must be a polynomial in {} variables, got {}",
                    n - 1,
                    p.nvars()
                )));
            }
        }
        if let Omega::Fixed(w) = self.omega {
            if !(w > 0.0 && w < 2.0) {
                return Err(Error::Config(format!("omega must lie in (0, 2), got {w}")));
            }
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        // g >= phi on the boundary of the thin plane
        let phi = self.obstacle.poly(n - 1).to_float();
        for flat in self.grid.plane_nodes() {
            if !self.grid.on_boundary(flat) {
                continue;
            }
            let x = self.grid.point(flat);
            let g = self.boundary.eval(&x[..n]);
            let f = phi.eval(&x[..n - 1]);
            if g < f {
                return Err(Error::Config(format!(
                    "boundary data {g} below the obstacle {f} at plane boundary point {:?}",
                    &x[..n]
                )));
            }
        }
        Ok(())
    }

    pub fn omega_value(&self) -> f64 {
        self.omega.resolve(&self.grid)
    }

    /// Parse a `key = value` problem file. Keys: `n`, `m`, `omega` (number
    /// or `auto`), `tol`, `max_iters`, `obstacle` and `boundary`. `#`
    /// starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut n = None;
        let mut m = None;
        let mut omega = None;
        let mut tol = None;
        let mut max_iters = None;
        let mut obstacle: Option<(usize, String)> = None;
        let mut boundary: Option<(usize, String)> = None;
        let mut seen = std::collections::BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected key = value, got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::parse(line_no, format!("duplicate key '{key}'")));
            }
            let bad = |what: &str| Error::parse(line_no, format!("bad value for {what}: '{value}'"));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n"))?),
                "m" => m = Some(value.parse::<usize>().map_err(|_| bad("m"))?),
                "omega" => {
                    omega = Some(if value == "auto" {
                        Omega::Auto
                    } else {
                        Omega::Fixed(value.parse::<f64>().map_err(|_| bad("omega"))?)
                    })
                }
                "tol" => tol = Some(value.parse::<f64>().map_err(|_| bad("tol"))?),
                "max_iters" => max_iters = Some(value.parse::<usize>().map_err(|_| bad("max_iters"))?),
                "obstacle" => obstacle = Some((line_no, value.to_string())),
                "boundary" => boundary = Some((line_no, value.to_string())),
                _ => return Err(Error::parse(line_no, format!("unknown key '{key}'"))),
            }
        }
        let n = n.ok_or_else(|| Error::Config("missing key 'n'".into()))?;
        let m = m.ok_or_else(|| Error::Config("missing key 'm'".into()))?;
        let grid = Grid::new(n, m)?;
        let obstacle = match obstacle {
            None => Obstacle::Zero,
            Some((line, s)) => Obstacle::parse(&s, n - 1).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse(line, format!("obstacle: {msg}")),
                Error::UnsupportedObstacle(_) => e,
                other => Error::parse(line, other.to_string()),
            })?,
        };
        let (bline, bspec) = boundary.ok_or_else(|| Error::Config("missing key 'boundary'".into()))?;
        let boundary = Boundary::parse(&bspec, n).map_err(|e| Error::parse(bline, e.to_string()))?;
        let mut p = SignoriniProblem {
            grid,
            obstacle,
            boundary,
            omega: omega.unwrap_or(Omega::Fixed(DEFAULT_OMEGA)),
            tol: tol.unwrap_or(DEFAULT_TOL),
            max_iters: max_iters.unwrap_or_else(|| default_max_iters(n)),
        };
        p.validate()?;
        if p.max_iters == 0 {
            p.max_iters = 1;
        }
        Ok(p)
    }

    /// Resolved configuration in the same `key = value` format.
    pub fn to_config_string(&self) -> String {
        let omega = match self.omega {
            Omega::Auto => "auto".to_string(),
            Omega::Fixed(w) => format!("{w}"),
        };
        format!(
            "n = {}\nm = {}\nomega = {omega}\ntol = {:e}\nmax_iters = {}\nobstacle = {}\nboundary = {}\n",
            self.grid.n(),
            self.grid.m(),
            self.tol,
            self.max_iters,
            self.obstacle.to_text(),
            self.boundary.to_text()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config() {
        let text = "# hat problem\nn = 2\nm = 65\nomega = auto\nboundary = hat 1.5 + 0.2 * hat 4\n";
        let p = SignoriniProblem::from_config_str(text).unwrap();
        assert_eq!(p.grid.m(), 65);
        assert_eq!(p.omega, Omega::Auto);
        assert_eq!(p.boundary.terms().len(), 2);
        let again = SignoriniProblem::from_config_str(&p.to_config_string()).unwrap();
        assert_eq!(again.to_config_string(), p.to_config_string());
        let x = [0.3, -0.4];
        assert_eq!(again.boundary.eval(&x), p.boundary.eval(&x));
    }

    #[test]
    fn parse_polynomial_pieces() {
        let text = "n = 3\nm = 17\nobstacle = 2 0 1\nboundary = hat 1.5 axis 1 0 + poly(2 0 0 1; 0 0 2 -1)\n";
        let p = SignoriniProblem::from_config_str(text).unwrap();
        assert!(!p.obstacle.is_zero());
        let x = [0.5, 0.1, 0.2];
        let want = HatSolution::standard(1.5, 3).unwrap().eval(&x) + 0.25 - 0.04;
        assert!((p.boundary.eval(&x) - want).abs() < 1e-15);
        let again = SignoriniProblem::from_config_str(&p.to_config_string()).unwrap();
        assert_eq!(again.to_config_string(), p.to_config_string());
    }

    #[test]
    fn config_errors_have_lines() {
        let e = SignoriniProblem::from_config_str("n = 2\nm = x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = SignoriniProblem::from_config_str("n = 2\nm = 9\nboundary = hat 1.5\nfoo = 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
        let e = SignoriniProblem::from_config_str("n = 2\nm = 10\nboundary = const 1\n").unwrap_err();
        assert!(e.to_string().contains("m must be odd"));
        let e = SignoriniProblem::from_config_str("n = 2\nm = 9\nboundary = hat 1.3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(SignoriniProblem::from_config_str("n = 2\nm = 9\nomega = 2.5\nboundary = const 1\n").is_err());
        let e = SignoriniProblem::from_config_str("n = 2\nm = 9\nobstacle = sin\nboundary = const 1\n").unwrap_err();
        assert!(matches!(e, Error::UnsupportedObstacle(_)));
    }

    #[test]
    fn boundary_below_obstacle_rejected() {
        let text = "n = 2\nm = 9\nobstacle = 0 1\nboundary = const 0.5\n";
        assert!(SignoriniProblem::from_config_str(text).is_err());
    }

    #[test]
    fn odd_boundary_polynomial_rejected() {
        let text = "n = 2\nm = 9\nboundary = poly(0 1 1)\n";
        assert!(SignoriniProblem::from_config_str(text).is_err());
    }

    #[test]
    fn float_exponents_do_not_split() {
        let b = Boundary::parse("1e+0 * hat 1.5", 2).unwrap();
        assert_eq!(b.terms().len(), 1);
    }
}
