//! Evaluation oracles for non-negative convex functions on `R^n`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::config::SearchConfig;
use crate::error::Error;
use crate::extreal::ExtReal;
use crate::linalg;
use crate::rng::{rng_for, Salt};
use crate::Result;

type EvalFn = Arc<dyn Fn(&[f64]) -> ExtReal + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Provenance of a registered conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugateKind {
    /// A genuine closed form.
    ClosedForm,
    /// Exact radial reduction, evaluated by a one-dimensional search.
    RadialNumeric,
}

/// An oracle for a convex `L: R^n -> [0, inf]` with `L(0) = 0` and
/// `L(x) > 0` for `x != 0`.
///
/// Construction probes the defining properties on random points and fails
/// loudly instead of producing garbage downstream. Oracles are immutable
/// after construction and cheap to clone (the closures are shared).
#[derive(Clone)]
pub struct ConvexOracle {
    dim: usize,
    eval: EvalFn,
    analytic_gradient: Option<GradFn>,
    analytic_conjugate: Option<EvalFn>,
    conjugate_kind: Option<ConjugateKind>,
    homogeneity_order: Option<f64>,
    finite_everywhere: bool,
    name: String,
}

impl fmt::Debug for ConvexOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexOracle")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("homogeneity_order", &self.homogeneity_order)
            .field("finite_everywhere", &self.finite_everywhere)
            .field("has_gradient", &self.analytic_gradient.is_some())
            .field("conjugate_kind", &self.conjugate_kind)
            .finish()
    }
}

impl ConvexOracle {
    pub fn builder<F>(name: impl Into<String>, dim: usize, eval: F) -> OracleBuilder
    where
        F: Fn(&[f64]) -> ExtReal + Send + Sync + 'static,
    {
        OracleBuilder {
            oracle: ConvexOracle {
                dim,
                eval: Arc::new(eval),
                analytic_gradient: None,
                analytic_conjugate: None,
                conjugate_kind: None,
                homogeneity_order: None,
                finite_everywhere: false,
                name: name.into(),
            },
            skip_positivity: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    /// Finite value of `L(x)`, or `NonFiniteNearPoint`.
    pub fn eval_finite(&self, x: &[f64]) -> Result<f64> {
        self.eval(x)
            .as_finite()
            .ok_or_else(|| Error::NonFiniteNearPoint(format!("L({x:?}) = inf")))
    }

    pub fn analytic_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.analytic_gradient.as_ref().map(|g| g(x))
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.analytic_gradient.is_some()
    }

    pub fn analytic_conjugate(&self, y: &[f64]) -> Option<ExtReal> {
        self.analytic_conjugate.as_ref().map(|c| c(y))
    }

    pub fn conjugate_kind(&self) -> Option<ConjugateKind> {
        self.conjugate_kind
    }

    pub fn homogeneity_order(&self) -> Option<f64> {
        self.homogeneity_order
    }

    pub fn finite_everywhere(&self) -> bool {
        self.finite_everywhere
    }

    /// The conjugate `L*` as an oracle of its own.
    ///
    /// Uses the registered conjugate when present and falls back to the
    /// numerical Legendre transform otherwise. The positivity probe is
    /// skipped: `L*` may legitimately vanish on a neighbourhood of zero
    /// when `L` grows linearly.
    pub fn conjugate_oracle(&self, cfg: &SearchConfig) -> ConvexOracle {
        let name = format!("conj({})", self.name);
        let dim = self.dim;
        let finite = self.conjugate_finite_everywhere();
        let order = self.homogeneity_order.and_then(|p| {
            (p > 1.0).then(|| p / (p - 1.0)) // dual order; p = 1 conjugates are 0/inf valued
        });
        let eval: EvalFn = if let Some(c) = &self.analytic_conjugate {
            c.clone()
        } else {
            let f = self.clone();
            let cfg = cfg.clone();
            Arc::new(move |y: &[f64]| crate::convex_core::legendre(&f, y, &cfg))
        };
        ConvexOracle {
            dim,
            eval,
            analytic_gradient: None,
            analytic_conjugate: None,
            conjugate_kind: None,
            homogeneity_order: order,
            finite_everywhere: finite,
            name,
        }
    }

    fn conjugate_finite_everywhere(&self) -> bool {
        // L* is finite everywhere iff L is superlinear; order > 1 guarantees it.
        match self.homogeneity_order {
            Some(p) => p > 1.0,
            None => self.name.starts_with("hinge") || self.name.starts_with("quadratic"),
        }
    }

    /// The sum oracle `L + eps * L0` (perturbation family).
    pub(crate) fn sum_with(&self, other: &ConvexOracle, eps: f64) -> Result<ConvexOracle> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let f = self.eval.clone();
        let g = other.eval.clone();
        let grad = match (&self.analytic_gradient, &other.analytic_gradient) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |x: &[f64]| {
                    linalg::axpy(&a(x), eps, &b(x))
                }) as GradFn)
            }
            _ => None,
        };
        Ok(ConvexOracle {
            dim: self.dim,
            eval: Arc::new(move |x: &[f64]| {
                f(x) + g(x).try_scale(eps).expect("eps > 0 scaling")
            }),
            analytic_gradient: grad,
            analytic_conjugate: None,
            conjugate_kind: None,
            // sums of different orders are inhomogeneous; metadata cleared
            homogeneity_order: None,
            finite_everywhere: self.finite_everywhere && other.finite_everywhere,
            name: format!("{} + {}*{}", self.name, eps, other.name),
        })
    }
}

/// Builder running the construction probes.
pub struct OracleBuilder {
    oracle: ConvexOracle,
    skip_positivity: bool,
}

impl OracleBuilder {
    pub fn with_gradient<G>(mut self, grad: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.oracle.analytic_gradient = Some(Arc::new(grad));
        self
    }

    pub fn with_conjugate<C>(mut self, kind: ConjugateKind, conj: C) -> Self
    where
        C: Fn(&[f64]) -> ExtReal + Send + Sync + 'static,
    {
        self.oracle.analytic_conjugate = Some(Arc::new(conj));
        self.oracle.conjugate_kind = Some(kind);
        self
    }

    pub fn homogeneous(mut self, order: f64) -> Self {
        self.oracle.homogeneity_order = Some(order);
        self
    }

    pub fn finite_everywhere(mut self, yes: bool) -> Self {
        self.oracle.finite_everywhere = yes;
        self
    }

    /// Allows `eval(x) = 0` off the origin. Conjugates of linearly growing
    /// functions vanish near zero, and one-sided pieces like `max(x, 0)` are
    /// legitimate subjects for the subgradient machinery; Young-function and
    /// norm diagnostics still require strict positivity.
    pub fn allow_vanishing(mut self) -> Self {
        self.skip_positivity = true;
        self
    }

    /// Runs the construction probes and returns the oracle.
    pub fn build(self, cfg: &SearchConfig) -> Result<ConvexOracle> {
        let o = self.oracle;
        let n = o.dim;
        if n == 0 {
            return Err(Error::OracleConstruction("dimension must be positive".into()));
        }
        let zero = vec![0.0; n];
        let at_zero = o.eval(&zero);
        if at_zero != 0.0 {
            return Err(Error::OracleConstruction(format!(
                "{}: eval(0) = {at_zero}, expected 0",
                o.name
            )));
        }

        let mut rng = rng_for(cfg.seed, Salt::OracleProbe);
        let probes = 32usize;
        let mut points = Vec::with_capacity(probes);
        for _ in 0..probes {
            let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
            let p: Vec<f64> = (0..n)
                .map(|_| scale * rng.gen_range(-1.0..1.0f64))
                .collect();
            points.push(p);
        }

        if !self.skip_positivity {
            for p in &points {
                if linalg::norm2(p) > 1e-9 && o.eval(p) <= 0.0 {
                    return Err(Error::OracleConstruction(format!(
                        "{}: eval({p:?}) = {} <= 0 off the origin",
                        o.name,
                        o.eval(p)
                    )));
                }
            }
        }

        // convexity probe on random chords
        for _ in 0..probes {
            let i = rng.gen_range(0..points.len());
            let j = rng.gen_range(0..points.len());
            let t: f64 = rng.gen_range(0.05..0.95);
            let (x, z) = (&points[i], &points[j]);
            let mid: Vec<f64> = x
                .iter()
                .zip(z)
                .map(|(a, b)| t * a + (1.0 - t) * b)
                .collect();
            let (fx, fz, fm) = (o.eval(x), o.eval(z), o.eval(&mid));
            if let (Some(fx), Some(fz), Some(fm)) =
                (fx.as_finite(), fz.as_finite(), fm.as_finite())
            {
                let bound = t * fx + (1.0 - t) * fz;
                let tol = cfg.tol_convexity * (1.0 + bound.abs());
                if fm > bound + tol {
                    return Err(Error::OracleConstruction(format!(
                        "{}: convexity probe failed at t={t}: {fm} > {bound}",
                        o.name
                    )));
                }
            }
        }

        if let Some(p) = o.homogeneity_order {
            for probe in points.iter().take(8) {
                if linalg::norm2(probe) < 1e-9 {
                    continue;
                }
                for r in [0.5f64, 2.0, 7.5] {
                    let scaled = linalg::scaled(probe, r);
                    let lhs = o.eval(&scaled);
                    let rhs = o.eval(probe).try_scale(r.powf(p))?;
                    match (lhs.as_finite(), rhs.as_finite()) {
                        (Some(a), Some(b)) => {
                            if (a - b).abs() > cfg.tol_homogeneity * (1.0 + b.abs()) {
                                return Err(Error::OracleConstruction(format!(
                                    "{}: homogeneity probe failed at r={r}: {a} vs {b}",
                                    o.name
                                )));
                            }
                        }
                        (None, None) => {}
                        _ => {
                            return Err(Error::OracleConstruction(format!(
                                "{}: homogeneity probe mixes finite and infinite values",
                                o.name
                            )))
                        }
                    }
                }
            }
        }

        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SearchConfig {
        SearchConfig::with_seed(11)
    }

    #[test]
    fn quadratic_passes_probes() {
        let o = ConvexOracle::builder("q", 2, |x: &[f64]| {
            ExtReal::from_value(0.5 * linalg::dot(x, x))
        })
        .homogeneous(2.0)
        .finite_everywhere(true)
        .build(&cfg())
        .unwrap();
        assert_eq!(o.eval(&[3.0, 4.0]).value(), 12.5);
    }

    #[test]
    fn nonzero_at_origin_is_rejected() {
        let r = ConvexOracle::builder("bad", 1, |_: &[f64]| ExtReal::from_value(1.0)).build(&cfg());
        assert!(matches!(r, Err(Error::OracleConstruction(_))));
    }

    #[test]
    fn nonconvex_is_rejected() {
        let r = ConvexOracle::builder("sqrt", 1, |x: &[f64]| ExtReal::from_value(x[0].abs().sqrt()))
            .build(&cfg());
        assert!(matches!(r, Err(Error::OracleConstruction(_))));
    }

    #[test]
    fn wrong_homogeneity_order_is_rejected() {
        let r = ConvexOracle::builder("q", 1, |x: &[f64]| ExtReal::from_value(x[0] * x[0]))
            .homogeneous(3.0)
            .build(&cfg());
        assert!(matches!(r, Err(Error::OracleConstruction(_))));
    }

    #[test]
    fn sum_oracle_adds_values_and_clears_order() {
        let c = cfg();
        let abs = ConvexOracle::builder("abs", 1, |x: &[f64]| ExtReal::from_value(x[0].abs()))
            .homogeneous(1.0)
            .finite_everywhere(true)
            .build(&c)
            .unwrap();
        let quad = ConvexOracle::builder("q", 1, |x: &[f64]| {
            ExtReal::from_value(0.5 * x[0] * x[0])
        })
        .homogeneous(2.0)
        .finite_everywhere(true)
        .build(&c)
        .unwrap();
        let s = abs.sum_with(&quad, 1.0).unwrap();
        assert_eq!(s.eval(&[2.0]).value(), 4.0);
        assert!(s.homogeneity_order().is_none());
    }
}
