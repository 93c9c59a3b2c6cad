//! Expression language for scalar Young profiles `V(r)` and the radial
//! lifter `L(x) = V(||x||)`.
//!
//! Grammar (whitespace insignificant, versioned public contract):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := number | 'r' | ident '(' expr {',' expr} ')' | '(' expr ')'
//! ident  := pow | log | log1p | max | min | abs
//! ```
//!
//! Numbers are decimal literals with an optional exponent. The grammar is
//! deliberately small: every registry profile is expressible, while
//! non-convex or non-Young input is cheap to detect by grid validation.

use std::fmt;

use rand::Rng;

use crate::config::SearchConfig;
use crate::convex_core::scalar_conjugate;
use crate::error::Error;
use crate::extreal::ExtReal;
use crate::oracle::{ConjugateKind, ConvexOracle};
use crate::rng::{rng_for, Salt};
use crate::Result;

/// Built-in scalar functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Pow,
    Log,
    Log1p,
    Max,
    Min,
    Abs,
}

impl Func {
    fn from_ident(name: &str) -> Option<Func> {
        match name {
            "pow" => Some(Func::Pow),
            "log" => Some(Func::Log),
            "log1p" => Some(Func::Log1p),
            "max" => Some(Func::Max),
            "min" => Some(Func::Min),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Pow | Func::Max | Func::Min => 2,
            Func::Log | Func::Log1p | Func::Abs => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Pow => "pow",
            Func::Log => "log",
            Func::Log1p => "log1p",
            Func::Max => "max",
            Func::Min => "min",
            Func::Abs => "abs",
        }
    }
}

/// Expression tree over the grammar above.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::Var => r,
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Sub(a, b) => a.eval(r) - b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Call(f, args) => {
                let a = args[0].eval(r);
                match f {
                    Func::Pow => a.powf(args[1].eval(r)),
                    Func::Log => a.ln(),
                    Func::Log1p => a.ln_1p(),
                    Func::Max => a.max(args[1].eval(r)),
                    Func::Min => a.min(args[1].eval(r)),
                    Func::Abs => a.abs(),
                }
            }
        }
    }

    /// `Some(p)` iff the tree is syntactically `pow(r, p)`.
    pub fn as_pure_power(&self) -> Option<f64> {
        if let Expr::Call(Func::Pow, args) = self {
            if let (Expr::Var, Expr::Num(p)) = (&args[0], &args[1]) {
                return Some(*p);
            }
        }
        None
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min_prec;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Expr::Num(c) => write!(f, "{c}")?,
            Expr::Var => write!(f, "r")?,
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    a.fmt_prec(f, 1)?;
                }
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::Parse {
                offset: self.pos,
                expected: format!("'{}'", c as char),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.parse_factor()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.parse_number(),
            Some(c) if c.is_ascii_lowercase() => self.parse_ident(),
            _ => Err(Error::Parse {
                offset: self.pos,
                expected: "number, 'r', identifier or '('".into(),
            }),
        }
    }

    fn parse_number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save; // bare 'e' is not an exponent
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| Error::Parse {
                offset: start,
                expected: "decimal literal".into(),
            })
    }

    fn parse_ident(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_lowercase()
                || self.src[self.pos].is_ascii_digit()
                || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
        if name == "r" {
            return Ok(Expr::Var);
        }
        let func = Func::from_ident(name).ok_or_else(|| Error::UnknownFunction {
            offset: start,
            name: name.to_string(),
        })?;
        self.expect(b'(')?;
        let mut args = vec![self.parse_expr()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            args.push(self.parse_expr()?);
        }
        self.expect(b')')?;
        if args.len() != func.arity() {
            return Err(Error::Arity {
                offset: start,
                func: func.name().to_string(),
                expected: func.arity(),
                got: args.len(),
            });
        }
        Ok(Expr::Call(func, args))
    }
}

// ---------------------------------------------------------------------------
// profiles and validation
// ---------------------------------------------------------------------------

/// A parsed scalar profile together with flags derived from grid validation.
#[derive(Debug, Clone)]
pub struct YoungProfile {
    pub ast: Expr,
    pub source: String,
    /// Midpoint convexity held on the default grid.
    pub claims_convex: bool,
    /// `V(0) = 0`, positivity and monotonicity held on the default grid.
    pub claims_young: bool,
}

/// Parses a profile and derives its flags from the default validation grid.
pub fn parse_young(src: &str) -> Result<YoungProfile> {
    if src.trim().is_empty() {
        return Err(Error::Parse {
            offset: 0,
            expected: "non-empty expression".into(),
        });
    }
    let mut p = Parser::new(src);
    let ast = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(Error::Parse {
            offset: p.pos,
            expected: "end of input, operator or '('".into(),
        });
    }
    let mut profile = YoungProfile {
        ast,
        source: src.to_string(),
        claims_convex: false,
        claims_young: false,
    };
    let report = validate_profile(&profile, &default_radial_grid());
    profile.claims_convex = report.convexity_ok();
    profile.claims_young = report.young_ok();
    Ok(profile)
}

/// Default validation grid: zero plus a log-spaced sweep of `[1e-3, 1e3]`.
pub fn default_radial_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    let n = 61;
    for i in 0..n {
        let e = -3.0 + 6.0 * i as f64 / (n - 1) as f64;
        g.push(10f64.powf(e));
    }
    g
}

/// Outcome of grid validation. Violations are report content, not errors.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub zero_value: f64,
    pub nonfinite_points: Vec<f64>,
    pub positivity_violations: Vec<(f64, f64)>,
    /// `(r_i, r_j, V(r_i), V(r_j))` with `r_i < r_j` but `V(r_i) > V(r_j)`.
    pub monotonicity_violations: Vec<(f64, f64, f64, f64)>,
    /// `(r_i, r_j, excess)` where the midpoint value exceeded the chord.
    pub convexity_violations: Vec<(f64, f64, f64)>,
}

impl ValidationReport {
    pub fn young_ok(&self) -> bool {
        self.zero_value == 0.0
            && self.nonfinite_points.is_empty()
            && self.positivity_violations.is_empty()
            && self.monotonicity_violations.is_empty()
    }

    pub fn convexity_ok(&self) -> bool {
        self.convexity_violations.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.young_ok() && self.convexity_ok()
    }

    pub fn summary(&self) -> String {
        if self.is_valid() {
            return "valid Young profile".into();
        }
        let mut parts = Vec::new();
        if self.zero_value != 0.0 {
            parts.push(format!("V(0) = {} != 0", self.zero_value));
        }
        if !self.nonfinite_points.is_empty() {
            parts.push(format!("non-finite at {} grid points", self.nonfinite_points.len()));
        }
        if !self.positivity_violations.is_empty() {
            parts.push(format!(
                "non-positive at {} points",
                self.positivity_violations.len()
            ));
        }
        if !self.monotonicity_violations.is_empty() {
            parts.push(format!(
                "{} monotonicity violations",
                self.monotonicity_violations.len()
            ));
        }
        if !self.convexity_violations.is_empty() {
            parts.push(format!(
                "{} convexity violations",
                self.convexity_violations.len()
            ));
        }
        parts.join("; ")
    }
}

/// Checks `V(0) = 0`, positivity, monotonicity and discrete midpoint
/// convexity `V((r_i + r_j)/2) <= (V(r_i) + V(r_j))/2 + tol` on all grid
/// pairs.
pub fn validate_profile(profile: &YoungProfile, grid: &[f64]) -> ValidationReport {
    assert!(
        !grid.is_empty() && grid[0] == 0.0 && grid.windows(2).all(|w| w[0] < w[1]),
        "grid must be strictly increasing and start at 0"
    );
    let v = |r: f64| profile.ast.eval(r);
    let mut report = ValidationReport {
        zero_value: v(0.0),
        ..ValidationReport::default()
    };
    let values: Vec<f64> = grid.iter().map(|&r| v(r)).collect();
    for (&r, &val) in grid.iter().zip(&values) {
        if !val.is_finite() {
            report.nonfinite_points.push(r);
        } else if r > 0.0 && val <= 0.0 {
            report.positivity_violations.push((r, val));
        }
    }
    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            let (ri, rj) = (grid[i], grid[j]);
            let (vi, vj) = (values[i], values[j]);
            if !vi.is_finite() || !vj.is_finite() {
                continue;
            }
            if vi > vj + 1e-12 * (1.0 + vi.abs()) {
                report.monotonicity_violations.push((ri, rj, vi, vj));
            }
            let mid = 0.5 * (ri + rj);
            let vm = v(mid);
            let chord = 0.5 * (vi + vj);
            // absolute-plus-relative guard against cancellation at large r
            let tol = 1e-9 * (1.0 + chord.abs());
            if vm.is_finite() && vm > chord + tol {
                report.convexity_violations.push((ri, rj, vm - chord));
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

/// Norm selector for radial lifts.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    Euclidean,
    /// `ell_p` with `p >= 1`.
    EllP(f64),
    EllInf,
    /// `sqrt(sum (w_i x_i)^2)` with positive weights.
    WeightedEuclidean(Vec<f64>),
}

impl NormSpec {
    pub fn ell_p(p: f64) -> Result<NormSpec> {
        if !(p >= 1.0) {
            return Err(Error::InvalidInput(format!("ell_p requires p >= 1, got {p}")));
        }
        Ok(NormSpec::EllP(p))
    }

    pub fn weighted(weights: Vec<f64>) -> Result<NormSpec> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        Ok(NormSpec::WeightedEuclidean(weights))
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean => crate::linalg::norm2(x),
            NormSpec::EllP(p) => {
                if *p == 1.0 {
                    x.iter().map(|v| v.abs()).sum()
                } else {
                    x.iter().map(|v| v.abs().powf(*p)).sum::<f64>().powf(1.0 / p)
                }
            }
            NormSpec::EllInf => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            NormSpec::WeightedEuclidean(w) => {
                debug_assert_eq!(w.len(), x.len());
                x.iter()
                    .zip(w)
                    .map(|(v, wi)| (v * wi) * (v * wi))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    /// The dual norm (used for radial conjugates).
    pub fn dual(&self) -> NormSpec {
        match self {
            NormSpec::Euclidean => NormSpec::Euclidean,
            NormSpec::EllP(p) => {
                if *p == 1.0 {
                    NormSpec::EllInf
                } else {
                    NormSpec::EllP(p / (p - 1.0))
                }
            }
            NormSpec::EllInf => NormSpec::EllP(1.0),
            NormSpec::WeightedEuclidean(w) => {
                NormSpec::WeightedEuclidean(w.iter().map(|wi| 1.0 / wi).collect())
            }
        }
    }

    /// Probes the triangle inequality and absolute homogeneity.
    pub fn validate(&self, dim: usize, cfg: &SearchConfig) -> Result<()> {
        if let NormSpec::WeightedEuclidean(w) = self {
            if w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: w.len(),
                });
            }
        }
        let mut rng = rng_for(cfg.seed, Salt::OracleProbe);
        for _ in 0..32 {
            let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let t: f64 = rng.gen_range(-3.0..3.0);
            let sum = crate::linalg::add(&a, &b);
            if self.norm(&sum) > self.norm(&a) + self.norm(&b) + 1e-9 {
                return Err(Error::InvalidInput("triangle inequality probe failed".into()));
            }
            let scaled = crate::linalg::scaled(&a, t);
            let lhs = self.norm(&scaled);
            let rhs = t.abs() * self.norm(&a);
            if (lhs - rhs).abs() > 1e-9 * (1.0 + rhs) {
                return Err(Error::InvalidInput("homogeneity probe failed".into()));
            }
        }
        Ok(())
    }

    /// Parses `euclidean`, `ell_inf`, `ell_p:<p>` or `weighted:<w1,...>`.
    pub fn parse(text: &str) -> Result<NormSpec> {
        let t = text.trim();
        match t {
            "euclidean" | "l2" | "ell_2" => return Ok(NormSpec::Euclidean),
            "ell_inf" | "linf" | "inf" => return Ok(NormSpec::EllInf),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("ell_p:") {
            let p: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad ell_p exponent `{rest}`")))?;
            return NormSpec::ell_p(p);
        }
        if let Some(rest) = t.strip_prefix("weighted:") {
            let ws: Result<Vec<f64>> = rest
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("bad weight `{s}`")))
                })
                .collect();
            return NormSpec::weighted(ws?);
        }
        Err(Error::InvalidInput(format!("unknown norm spec `{t}`")))
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Euclidean => write!(f, "euclidean"),
            NormSpec::EllP(p) => write!(f, "ell_p:{p}"),
            NormSpec::EllInf => write!(f, "ell_inf"),
            NormSpec::WeightedEuclidean(w) => {
                write!(f, "weighted:")?;
                for (i, wi) in w.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{wi}")?;
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// radial lift
// ---------------------------------------------------------------------------

/// Lifts a validated profile to the radial oracle `x -> V(||x||)`.
///
/// The homogeneity order is recorded iff the profile is syntactically
/// `pow(r, p)`; in that case the closed-form conjugate of the power is
/// attached, otherwise the conjugate is the exact radial reduction
/// `V*(||y||_dual)` evaluated by a one-dimensional search.
pub fn lift_radial(
    profile: &YoungProfile,
    norm: &NormSpec,
    dim: usize,
    cfg: &SearchConfig,
) -> Result<ConvexOracle> {
    let report = validate_profile(profile, &default_radial_grid());
    if !report.is_valid() {
        return Err(Error::InvalidProfile(report.summary()));
    }
    norm.validate(dim, cfg)?;

    let ast = profile.ast.clone();
    let norm_eval = norm.clone();
    let eval = move |x: &[f64]| -> ExtReal {
        let v = ast.eval(norm_eval.norm(x));
        if v.is_finite() && v >= 0.0 {
            ExtReal::from_value(v)
        } else {
            // off-grid pathologies surface as +inf and trip downstream probes
            ExtReal::INFINITY
        }
    };

    let name = format!("lift({}; {})", profile.source.trim(), norm);
    let mut builder = ConvexOracle::builder(name, dim, eval).finite_everywhere(true);

    let dual = norm.dual();
    if let Some(p) = profile.ast.as_pure_power() {
        builder = builder.homogeneous(p);
        if p > 1.0 {
            let q = p / (p - 1.0);
            let coeff = (p - 1.0) / p.powf(q);
            builder = builder.with_conjugate(ConjugateKind::ClosedForm, move |y: &[f64]| {
                ExtReal::from_value(coeff * dual.norm(y).powf(q))
            });
        } else {
            // conjugate of ||x|| is the indicator of the dual unit ball
            builder = builder.with_conjugate(ConjugateKind::ClosedForm, move |y: &[f64]| {
                if dual.norm(y) <= 1.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::INFINITY
                }
            });
        }
    } else {
        let ast = profile.ast.clone();
        let threshold = cfg.divergence_threshold;
        builder = builder.with_conjugate(ConjugateKind::RadialNumeric, move |y: &[f64]| {
            scalar_conjugate(&|r| ast.eval(r), dual.norm(y), threshold)
        });
    }
    builder.build(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parses_registry_profiles() {
        let p = parse_young("pow(r,2)*max(r,1)").unwrap();
        assert_eq!(
            p.ast,
            Expr::Mul(
                Box::new(Expr::Call(
                    Func::Pow,
                    vec![Expr::Var, Expr::Num(2.0)]
                )),
                Box::new(Expr::Call(Func::Max, vec![Expr::Var, Expr::Num(1.0)])),
            )
        );
        assert!(p.claims_young && p.claims_convex);

        let p = parse_young("pow(r,3)*log1p(r)").unwrap();
        assert_abs_diff_eq!(p.ast.eval(2.0), 8.0 * 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn truncated_input_reports_offset() {
        match parse_young("pow(r,") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_function_and_arity_errors() {
        assert!(matches!(
            parse_young("exp(r)"),
            Err(Error::UnknownFunction { .. })
        ));
        assert!(matches!(parse_young("pow(r)"), Err(Error::Arity { .. })));
        assert!(matches!(
            parse_young("pow(r,2"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        assert!(matches!(parse_young("r r"), Err(Error::Parse { .. })));
    }

    #[test]
    fn print_reparse_roundtrip_is_structural() {
        for src in [
            "pow(r,2)*max(r,1)",
            "pow(r,3)*log1p(r)",
            "r*r + 2*r - min(r,3)",
            "abs(r - 2) + pow(r,1.5)",
            "(r + 1)*(r - 1)",
        ] {
            let a = parse_young(src).unwrap();
            let printed = a.ast.to_string();
            let b = parse_young(&printed).unwrap();
            assert_eq!(a.ast, b.ast, "{src} -> {printed}");
        }
    }

    #[test]
    fn validation_flags_non_convex_profiles() {
        let g = default_radial_grid();
        let ok = validate_profile(&parse_young("pow(r,2)").unwrap(), &g);
        assert!(ok.is_valid());

        // Example: r^2 * min(r,1) is not convex near r = 1.
        let bad = validate_profile(&parse_young("pow(r,2)*min(r,1)").unwrap(), &g);
        assert!(bad.young_ok());
        assert!(!bad.convexity_ok());
        assert!(bad
            .convexity_violations
            .iter()
            .any(|(ri, rj, _)| 0.5 * (ri + rj) > 0.5 && 0.5 * (ri + rj) < 2.0));

        // log1p is concave yet vanishes at zero.
        let conc = validate_profile(&parse_young("log1p(r)").unwrap(), &g);
        assert_eq!(conc.zero_value, 0.0);
        assert!(conc.young_ok());
        assert!(!conc.convexity_ok());
    }

    #[test]
    fn lift_examples() {
        let cfg = SearchConfig::with_seed(2);
        let o = lift_radial(
            &parse_young("pow(r,2)").unwrap(),
            &NormSpec::Euclidean,
            3,
            &cfg,
        )
        .unwrap();
        assert_abs_diff_eq!(o.eval(&[1.0, 2.0, 2.0]).value(), 9.0, epsilon = 1e-12);
        assert_eq!(o.homogeneity_order(), Some(2.0));

        let o = lift_radial(
            &parse_young("pow(r,1)*max(r,1)").unwrap(),
            &NormSpec::Euclidean,
            2,
            &cfg,
        )
        .unwrap();
        assert_abs_diff_eq!(o.eval(&[0.6, 0.8]).value(), 1.0, epsilon = 1e-12);
        assert!(o.homogeneity_order().is_none());

        let o = lift_radial(
            &parse_young("pow(r,2)*log1p(r)").unwrap(),
            &NormSpec::ell_p(3.0).unwrap(),
            2,
            &cfg,
        )
        .unwrap();
        assert_eq!(o.eval(&[0.0, 0.0]).value(), 0.0);
    }

    #[test]
    fn lift_rejects_invalid_profiles() {
        let cfg = SearchConfig::with_seed(2);
        let bad = parse_young("pow(r,2)*min(r,1)").unwrap();
        assert!(matches!(
            lift_radial(&bad, &NormSpec::Euclidean, 1, &cfg),
            Err(Error::InvalidProfile(_))
        ));
    }

    #[test]
    fn norm_parsing_and_duals() {
        assert_eq!(NormSpec::parse("euclidean").unwrap(), NormSpec::Euclidean);
        assert_eq!(
            NormSpec::parse("ell_p:3").unwrap().dual(),
            NormSpec::EllP(1.5)
        );
        assert_eq!(NormSpec::parse("ell_inf").unwrap().dual(), NormSpec::EllP(1.0));
        assert!(NormSpec::parse("ell_p:0.5").is_err());
        let w = NormSpec::parse("weighted:1,2").unwrap();
        assert_abs_diff_eq!(w.norm(&[1.0, 1.0]), 5f64.sqrt(), epsilon = 1e-15);
    }
}
