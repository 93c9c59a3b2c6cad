//! Built-in convex functions with closed-form metadata.
//!
//! Every constructor returns an oracle that has passed the construction
//! probes; gradients and conjugates are attached wherever a closed form
//! exists, and radial profiles without one carry the exact one-dimensional
//! radial reduction of their conjugate.

use crate::config::SearchConfig;
use crate::convex_core::scalar_conjugate;
use crate::error::Error;
use crate::extreal::ExtReal;
use crate::func_dsl::NormSpec;
use crate::linalg::{norm2, scaled};
use crate::oracle::{ConjugateKind, ConvexOracle};
use crate::Result;

/// `L(x) = |x|^p` (Euclidean), `p >= 1`.
pub fn power(p: f64, dim: usize, cfg: &SearchConfig) -> Result<ConvexOracle> {
    power_with_norm(p, &NormSpec::Euclidean, dim, cfg)
}

/// `L(x) = ||x||^p` for an arbitrary norm, `p >= 1`.
pub fn power_with_norm(
    p: f64,
    norm: &NormSpec,
    dim: usize,
    cfg: &SearchConfig,
) -> Result<ConvexOracle> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("power requires p >= 1, got {p}")));
    }
    norm.validate(dim, cfg)?;
    let n = norm.clone();
    let name = if *norm == NormSpec::Euclidean {
        format!("pow{p}")
    } else {
        format!("pow{p}[{norm}]")
    };
    let mut b = ConvexOracle::builder(name, dim, move |x: &[f64]| {
        ExtReal::from_value(n.norm(x).powf(p))
    })
    .homogeneous(p)
    .finite_everywhere(true);

    if *norm == NormSpec::Euclidean {
        b = b.with_gradient(move |x: &[f64]| {
            let r = norm2(x);
            if r == 0.0 {
                vec![0.0; x.len()]
            } else {
                scaled(x, p * r.powf(p - 2.0))
            }
        });
    }

    let dual = norm.dual();
    if p > 1.0 {
        let q = p / (p - 1.0);
        let coeff = (p - 1.0) / p.powf(q);
        b = b.with_conjugate(ConjugateKind::ClosedForm, move |y: &[f64]| {
            ExtReal::from_value(coeff * dual.norm(y).powf(q))
        });
    } else {
        b = b.with_conjugate(ConjugateKind::ClosedForm, move |y: &[f64]| {
            if dual.norm(y) <= 1.0 {
                ExtReal::ZERO
            } else {
                ExtReal::INFINITY
            }
        });
    }
    b.build(cfg)
}

/// `L(x) = |x|^2 / 2`, the self-dual quadratic.
pub fn quadratic(dim: usize, cfg: &SearchConfig) -> Result<ConvexOracle> {
    ConvexOracle::builder("quadratic", dim, |x: &[f64]| {
        ExtReal::from_value(0.5 * crate::linalg::dot(x, x))
    })
    .homogeneous(2.0)
    .finite_everywhere(true)
    .with_gradient(|x: &[f64]| x.to_vec())
    .with_conjugate(ConjugateKind::ClosedForm, |y: &[f64]| {
        ExtReal::from_value(0.5 * crate::linalg::dot(y, y))
    })
    .build(cfg)
}

/// Scalar profile `V(r) = r^p max(r, 1)` for the hinge family.
pub fn hinge_profile(p: f64) -> impl Fn(f64) -> f64 + Copy {
    move |r: f64| r.powf(p) * r.max(1.0)
}

fn hinge_profile_derivative(p: f64, r: f64) -> f64 {
    if r < 1.0 {
        p * r.powf(p - 1.0)
    } else if r > 1.0 {
        (p + 1.0) * r.powf(p)
    } else {
        // both one-sided slopes are valid subgradient scales; return the middle
        p + 0.5
    }
}

/// Conjugate of the hinge profile: the power branch below the slope gap
/// `[p, p+1]`, linear inside it, the steep branch above.
pub fn hinge_conjugate_value(p: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        // V(r) = r max(r,1): vanishes up to slope 1, then linear, then r^2/4
        if s <= 1.0 {
            0.0
        } else if s <= 2.0 {
            s - 1.0
        } else {
            s * s / 4.0
        }
    } else if s <= p {
        let q = p / (p - 1.0);
        (p - 1.0) / p.powf(q) * s.powf(q)
    } else if s <= p + 1.0 {
        s - 1.0
    } else {
        let q = (p + 1.0) / p;
        p / (p + 1.0).powf(q) * s.powf(q)
    }
}

/// `L(x) = |x|^p max(|x|, 1)` (Euclidean radial hinge), `p >= 1`.
pub fn hinge_power(p: f64, dim: usize, cfg: &SearchConfig) -> Result<ConvexOracle> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("hinge requires p >= 1, got {p}")));
    }
    let v = hinge_profile(p);
    ConvexOracle::builder(format!("hinge{p}"), dim, move |x: &[f64]| {
        ExtReal::from_value(v(norm2(x)))
    })
    .finite_everywhere(true)
    .with_gradient(move |x: &[f64]| {
        let r = norm2(x);
        if r == 0.0 {
            vec![0.0; x.len()]
        } else {
            scaled(x, hinge_profile_derivative(p, r) / r)
        }
    })
    .with_conjugate(ConjugateKind::ClosedForm, move |y: &[f64]| {
        ExtReal::from_value(hinge_conjugate_value(p, norm2(y)))
    })
    .build(cfg)
}

/// `L(x) = |x|^p log(1 + |x|)`, `p >= 1`.
pub fn plog(p: f64, dim: usize, cfg: &SearchConfig) -> Result<ConvexOracle> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("plog requires p >= 1, got {p}")));
    }
    let v = move |r: f64| r.powf(p) * r.ln_1p();
    let threshold = cfg.divergence_threshold;
    ConvexOracle::builder(format!("plog{p}"), dim, move |x: &[f64]| {
        ExtReal::from_value(v(norm2(x)))
    })
    .finite_everywhere(true)
    .with_gradient(move |x: &[f64]| {
        let r = norm2(x);
        if r == 0.0 {
            vec![0.0; x.len()]
        } else {
            let dv = p * r.powf(p - 1.0) * r.ln_1p() + r.powf(p) / (1.0 + r);
            scaled(x, dv / r)
        }
    })
    .with_conjugate(ConjugateKind::RadialNumeric, move |y: &[f64]| {
        scalar_conjugate(&v, norm2(y), threshold)
    })
    .build(cfg)
}

/// `L(x) = |x|^p log(2 + |x|)`, `p >= 1`.
pub fn plog2(p: f64, dim: usize, cfg: &SearchConfig) -> Result<ConvexOracle> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("plog2 requires p >= 1, got {p}")));
    }
    let v = move |r: f64| r.powf(p) * (2.0 + r).ln();
    let threshold = cfg.divergence_threshold;
    ConvexOracle::builder(format!("plog2_{p}"), dim, move |x: &[f64]| {
        ExtReal::from_value(v(norm2(x)))
    })
    .finite_everywhere(true)
    .with_gradient(move |x: &[f64]| {
        let r = norm2(x);
        if r == 0.0 {
            vec![0.0; x.len()]
        } else {
            let dv = p * r.powf(p - 1.0) * (2.0 + r).ln() + r.powf(p) / (2.0 + r);
            scaled(x, dv / r)
        }
    })
    .with_conjugate(ConjugateKind::RadialNumeric, move |y: &[f64]| {
        scalar_conjugate(&v, norm2(y), threshold)
    })
    .build(cfg)
}

/// Looks a function up by name: `quadratic`, `pow<p>`, `hinge<p>`,
/// `plog<p>`, `plog2_<p>`, or `<family>:<p>`. Bare family names use the
/// canonical parameter (`hinge` -> p=1, `plog`/`plog2` -> p=2).
pub fn from_name(name: &str, dim: usize, cfg: &SearchConfig) -> Result<ConvexOracle> {
    let t = name.trim();
    if t == "quadratic" {
        return quadratic(dim, cfg);
    }
    if t == "abs" {
        return power(1.0, dim, cfg);
    }
    let (family, param) = match t.split_once(':') {
        Some((f, p)) => (f, Some(p.to_string())),
        None => {
            let idx = t
                .char_indices()
                .find(|(_, c)| c.is_ascii_digit())
                .map(|(i, _)| i);
            match idx {
                // "plog2" is a family name, not plog with p=2
                Some(i) if t != "plog2" => (&t[..i], Some(t[i..].to_string())),
                _ => (t, None),
            }
        }
    };
    let parse_p = |s: Option<String>, default: f64| -> Result<f64> {
        match s {
            Some(text) => text
                .trim_start_matches('_')
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad parameter in `{name}`"))),
            None => Ok(default),
        }
    };
    match family {
        "pow" | "power" => power(parse_p(param, 2.0)?, dim, cfg),
        "hinge" | "hinge_power" => hinge_power(parse_p(param, 1.0)?, dim, cfg),
        "plog" => plog(parse_p(param, 2.0)?, dim, cfg),
        "plog2" => plog2(parse_p(param, 2.0)?, dim, cfg),
        _ => Err(Error::InvalidInput(format!("unknown registry function `{name}`"))),
    }
}

/// The canonical desk-scale registry used by verification suites.
pub fn standard_registry(dim: usize, cfg: &SearchConfig) -> Result<Vec<ConvexOracle>> {
    Ok(vec![
        quadratic(dim, cfg)?,
        power(1.0, dim, cfg)?,
        power(1.5, dim, cfg)?,
        power(2.0, dim, cfg)?,
        power(3.0, dim, cfg)?,
        hinge_power(1.0, dim, cfg)?,
        hinge_power(2.0, dim, cfg)?,
        plog(2.0, dim, cfg)?,
        plog2(2.0, dim, cfg)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SearchConfig {
        SearchConfig::with_seed(9)
    }

    #[test]
    fn registry_builds_in_all_dims() {
        let c = cfg();
        for dim in 1..=3 {
            let fns = standard_registry(dim, &c).unwrap();
            assert_eq!(fns.len(), 9);
        }
    }

    #[test]
    fn hinge_conjugate_matches_direct_sup() {
        let c = cfg();
        for p in [1.0, 2.0, 3.5] {
            let v = hinge_profile(p);
            for s in [0.3, 0.9, p, p + 0.5, p + 1.0, p + 3.0, 10.0] {
                let direct = scalar_conjugate(&v, s, c.divergence_threshold);
                assert_abs_diff_eq!(
                    hinge_conjugate_value(p, s),
                    direct.value(),
                    epsilon = 1e-7 * (1.0 + direct.value())
                );
            }
        }
    }

    #[test]
    fn power_conjugate_matches_paper_constant() {
        // For L = |x|^p the conjugate is |y|^q / (q p^{q-1}).
        let c = cfg();
        let f = power(3.0, 1, &c).unwrap();
        let q: f64 = 1.5;
        let want = 2f64.powf(q) / (q * 3f64.powf(q - 1.0));
        assert_abs_diff_eq!(
            f.analytic_conjugate(&[2.0]).unwrap().value(),
            want,
            epsilon = 1e-12
        );
    }

    #[test]
    fn name_lookup() {
        let c = cfg();
        assert_eq!(from_name("pow2", 2, &c).unwrap().homogeneity_order(), Some(2.0));
        assert_eq!(from_name("pow:1.5", 1, &c).unwrap().homogeneity_order(), Some(1.5));
        assert!(from_name("hinge", 1, &c).is_ok());
        assert!(from_name("plog2", 2, &c).unwrap().name().starts_with("plog2"));
        assert!(from_name("plog3", 2, &c).unwrap().name().starts_with("plog3"));
        assert!(from_name("nope", 1, &c).is_err());
    }

    #[test]
    fn plog_gradient_is_consistent_with_finite_differences() {
        let c = cfg();
        let f = plog(2.0, 2, &c).unwrap();
        let x = [0.7, -0.4];
        let g = f.analytic_gradient(&x).unwrap();
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let fd = (f.eval(&xp).value() - f.eval(&xm).value()) / 2e-6;
            assert_abs_diff_eq!(g[i], fd, epsilon = 1e-6);
        }
    }
}
