//! Named verification suites shared by the CLI `verify` command and the
//! acceptance tests. Each suite exercises one family of inequalities over a
//! function set and returns per-check records.

use rand::Rng;

use crate::config::SearchConfig;
use crate::convex_core::{
    biconjugate, difference_quotients, directional_derivative, legendre, local_oscillation,
};
use crate::delta2::{young_estimate, YoungKind};
use crate::error::Error;
use crate::linalg::{add, dot, norm2, scaled};
use crate::oracle::{ConjugateKind, ConvexOracle};
use crate::orlicz::{
    holder_check, luxemburg_norm, modular, sandwich_check, DiscreteProbabilitySpace, VectorField,
};
use crate::registry;
use crate::report::{number, CheckRecord};
use crate::rng::{rng_for, Salt};
use crate::subgrad::{barycenter_subgradient, mollified_subgradient, sphere_average_subgradient};
use crate::Result;

pub const SUITE_NAMES: &[&str] = &[
    "quotient",
    "young_fenchel",
    "biconjugacy",
    "triangle",
    "attainment",
    "reciprocal",
    "sandwich",
    "holder",
    "bounds",
    "all",
];

/// Runs a named suite over the given oracles. `trials` scales the number of
/// random instances per function.
pub fn run_suite(
    name: &str,
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    match name {
        "quotient" => quotient_suite(fns, trials, cfg),
        "young_fenchel" => young_fenchel_suite(fns, trials, cfg),
        "biconjugacy" => biconjugacy_suite(fns, trials, cfg),
        "triangle" => triangle_suite(fns, trials, cfg),
        "attainment" => attainment_suite(fns, trials, cfg),
        "reciprocal" => reciprocal_suite(fns, cfg),
        "sandwich" => sandwich_suite(fns, trials, cfg),
        "holder" => holder_suite(fns, trials, cfg),
        "bounds" => bounds_suite(fns, trials, cfg),
        "all" => {
            let mut out = Vec::new();
            for sub in SUITE_NAMES.iter().filter(|s| **s != "all") {
                out.extend(run_suite(sub, fns, trials, cfg)?);
            }
            Ok(out)
        }
        other => Err(Error::InvalidInput(format!(
            "unknown suite `{other}`; expected one of {SUITE_NAMES:?}"
        ))),
    }
}

/// Default function set for suite runs: the whole registry in dimensions
/// 1 and 2.
pub fn default_suite_functions(cfg: &SearchConfig) -> Result<Vec<ConvexOracle>> {
    let mut fns = registry::standard_registry(1, cfg)?;
    fns.extend(registry::standard_registry(2, cfg)?);
    Ok(fns)
}

fn random_point(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Monotone quotients plus positive homogeneity and subadditivity of the
/// directional derivative in its direction argument.
fn quotient_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        let mut rng = rng_for(cfg.seed ^ 0x71, Salt::NormProbe);
        let mut worst_mono = f64::INFINITY;
        let mut worst_homog = 0.0f64;
        let mut worst_subadd = f64::INFINITY;
        for _ in 0..trials.max(1) {
            let x = random_point(&mut rng, f.dim(), 2.0);
            let theta = random_point(&mut rng, f.dim(), 1.0);
            if norm2(&theta) < 1e-6 {
                continue;
            }
            let qs = difference_quotients(f, &x, &theta, cfg)?;
            for w in qs.windows(2) {
                // eps decreases along the schedule: quotients must not rise
                worst_mono = worst_mono.min(w[0].1 - w[1].1 + cfg.tol_mono);
            }
            let d1 = directional_derivative(f, &x, &theta, cfg)?;
            let t = rng.gen_range(0.5..3.0);
            let dt = directional_derivative(f, &x, &scaled(&theta, t), cfg)?;
            worst_homog = worst_homog.max((dt - t * d1).abs() / (1.0 + (t * d1).abs()));
            let theta2 = random_point(&mut rng, f.dim(), 1.0);
            let d2 = directional_derivative(f, &x, &theta2, cfg)?;
            let dsum = directional_derivative(f, &x, &add(&theta, &theta2), cfg)?;
            worst_subadd = worst_subadd.min(d1 + d2 - dsum + 1e-7 * (1.0 + dsum.abs()));
        }
        let ok = worst_mono >= 0.0 && worst_homog <= 1e-6 && worst_subadd >= 0.0;
        out.push(
            CheckRecord::from_bool(format!("quotient[{}]", f.name()), ok)
                .slack("monotone_min", worst_mono)
                .slack("subadditivity_min", worst_subadd)
                .value("homogeneity_rel_err", worst_homog),
        );
    }
    Ok(out)
}

/// `<x, y> <= L(x) + L*(y)` on random pairs.
fn young_fenchel_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        let mut rng = rng_for(cfg.seed ^ 0x79, Salt::NormProbe);
        let mut min_slack = f64::INFINITY;
        for _ in 0..trials.max(1) {
            let x = random_point(&mut rng, f.dim(), 3.0);
            let y = random_point(&mut rng, f.dim(), 3.0);
            let lx = f.eval(&x);
            let ls = legendre(f, &y, cfg);
            match (lx.as_finite(), ls.as_finite()) {
                (Some(a), Some(b)) => {
                    let slack = a + b - dot(&x, &y);
                    min_slack = min_slack.min(slack + 1e-6 * (1.0 + a + b));
                }
                _ => continue,
            }
        }
        out.push(
            CheckRecord::from_bool(format!("young_fenchel[{}]", f.name()), min_slack >= 0.0)
                .slack("min", min_slack),
        );
    }
    Ok(out)
}

/// `L**` recomputed numerically from the registered conjugate matches `L`.
fn biconjugacy_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        if !(f.finite_everywhere() && f.conjugate_kind() == Some(ConjugateKind::ClosedForm)) {
            continue;
        }
        let mut rng = rng_for(cfg.seed ^ 0x81, Salt::NormProbe);
        let mut worst = 0.0f64;
        for _ in 0..trials.max(1) {
            let x = random_point(&mut rng, f.dim(), 2.5);
            let lx = f.eval(&x).value();
            let back = biconjugate(f, &x, cfg).value();
            worst = worst.max((lx - back).abs() / (1.0 + lx.abs()));
        }
        out.push(
            CheckRecord::from_bool(
                format!("biconjugacy[{}]", f.name()),
                worst <= cfg.tol_biconj,
            )
            .value("max_rel_err", worst),
        );
    }
    Ok(out)
}

/// Subadditivity of the Luxemburg pseudo-norm on random pairs.
fn triangle_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        let mut rng = rng_for(cfg.seed ^ 0x89, Salt::NormProbe);
        let mut min_slack = f64::INFINITY;
        for _ in 0..trials.max(1) {
            let atoms = rng.gen_range(2..9);
            let sp = DiscreteProbabilitySpace::uniform(atoms);
            let u1 = VectorField::random(f.dim(), atoms, 2.0, rng.gen());
            let u2 = VectorField::random(f.dim(), atoms, 2.0, rng.gen());
            let a = luxemburg_norm(f, &sp, &u1)?.value();
            let b = luxemburg_norm(f, &sp, &u2)?.value();
            let s = luxemburg_norm(f, &sp, &u1.add(&u2)?)?.value();
            min_slack = min_slack.min(a + b - s + 1e-8 * (1.0 + a + b));
        }
        out.push(
            CheckRecord::from_bool(format!("triangle[{}]", f.name()), min_slack >= 0.0)
                .slack("min", min_slack),
        );
    }
    Ok(out)
}

/// `sum lambda_i L(u_i / |u|) = 1` whenever the norm is finite positive.
fn attainment_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        let mut rng = rng_for(cfg.seed ^ 0x91, Salt::NormProbe);
        let mut worst = 0.0f64;
        for _ in 0..trials.max(1) {
            let atoms = rng.gen_range(1..9);
            let sp = DiscreteProbabilitySpace::uniform(atoms);
            let u = VectorField::random(f.dim(), atoms, 3.0, rng.gen());
            if u.is_zero() {
                continue;
            }
            let n = luxemburg_norm(f, &sp, &u)?;
            if let Some(r) = n.as_finite() {
                if r > 0.0 {
                    worst = worst.max((modular(f, &sp, &u, r).value() - 1.0).abs());
                }
            }
        }
        out.push(
            CheckRecord::from_bool(format!("attainment[{}]", f.name()), worst <= 1e-8)
                .value("max_abs_err", worst),
        );
    }
    Ok(out)
}

/// `Psi(r) * Phi(1/r)` stays within 5% of one (opposite-sided estimates).
fn reciprocal_suite(fns: &[ConvexOracle], cfg: &SearchConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        let mut worst = 0.0f64;
        for r in [0.25f64, 0.5, 2.0, 4.0] {
            let psi = young_estimate(f, YoungKind::Psi, &[r], cfg)?.values[0];
            let phi_inv = young_estimate(f, YoungKind::Phi, &[1.0 / r], cfg)?.values[0];
            if psi.is_finite() && phi_inv.is_finite() {
                worst = worst.max((psi * phi_inv - 1.0).abs());
            }
        }
        out.push(
            CheckRecord::from_bool(format!("reciprocal[{}]", f.name()), worst <= 0.05)
                .value("max_abs_dev", worst),
        );
    }
    Ok(out)
}

/// The duality sandwich on random instances of everywhere-finite functions.
fn sandwich_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        if !f.finite_everywhere() {
            continue;
        }
        let mut rng = rng_for(cfg.seed ^ 0x99, Salt::NormProbe);
        let mut failures = 0usize;
        let mut worst_gap_rel = 0.0f64;
        for _ in 0..trials.max(1) {
            let atoms = rng.gen_range(2..17);
            let sp = DiscreteProbabilitySpace::uniform(atoms);
            let u = VectorField::random(f.dim(), atoms, 2.5, rng.gen());
            let rep = sandwich_check(f, &sp, &u, cfg)?;
            if !rep.ok() {
                failures += 1;
            }
            if rep.norms.orlicz_upper > 0.0 {
                worst_gap_rel = worst_gap_rel.max(rep.norms.gap / rep.norms.orlicz_upper);
            }
        }
        out.push(
            CheckRecord::from_bool(format!("sandwich[{}]", f.name()), failures == 0)
                .value("failures", failures as f64)
                .value("max_gap_rel", worst_gap_rel),
        );
    }
    Ok(out)
}

/// The generalised Hoelder bound on random field pairs.
fn holder_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        let mut rng = rng_for(cfg.seed ^ 0xa1, Salt::NormProbe);
        let mut failures = 0usize;
        let mut min_slack = f64::INFINITY;
        for _ in 0..trials.max(1) {
            let atoms = rng.gen_range(2..17);
            let sp = DiscreteProbabilitySpace::uniform(atoms);
            let u = VectorField::random(f.dim(), atoms, 2.5, rng.gen());
            let v = VectorField::random(f.dim(), atoms, 2.5, rng.gen());
            let rep = holder_check(f, &sp, &u, &v, cfg)?;
            if !rep.ok {
                failures += 1;
            }
            if rep.slack.is_finite() {
                min_slack = min_slack.min(rep.slack);
            }
        }
        out.push(
            CheckRecord::from_bool(format!("holder[{}]", f.name()), failures == 0)
                .value("failures", failures as f64)
                .slack("min", min_slack),
        );
    }
    Ok(out)
}

/// A-priori magnitude and conjugate bounds for certified subgradients:
/// `|y| <= osc(x, 1)` and `L*(y) <= |x| osc(x, 1) - L(x)`.
fn bounds_suite(
    fns: &[ConvexOracle],
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for f in fns {
        let mut rng = rng_for(cfg.seed ^ 0xa9, Salt::NormProbe);
        let mut ok = true;
        let mut min_mag_slack = f64::INFINITY;
        let mut min_conj_slack = f64::INFINITY;
        for _ in 0..trials.max(1).min(8) {
            let x = random_point(&mut rng, f.dim(), 2.0);
            let osc = local_oscillation(f, &x, 1.0, cfg)?;
            let lx = f.eval(&x).value();
            let candidates = [
                sphere_average_subgradient(f, &x, cfg)?.0,
                barycenter_subgradient(f, &x, cfg)?.0,
                mollified_subgradient(f, &x, 3e-5, cfg)?,
            ];
            for y in &candidates {
                let tol = 1e-6 * (1.0 + osc.abs());
                let mag_slack = osc - norm2(y) + tol;
                min_mag_slack = min_mag_slack.min(mag_slack);
                ok &= mag_slack >= 0.0;
                // numeric conjugate values are lower bounds: safe side
                if let Some(ls) = legendre(f, y, cfg).as_finite() {
                    let bound = norm2(&x) * osc - lx;
                    let conj_slack = bound - ls + tol;
                    min_conj_slack = min_conj_slack.min(conj_slack);
                    ok &= conj_slack >= 0.0;
                }
            }
        }
        out.push(
            CheckRecord::from_bool(format!("bounds[{}]", f.name()), ok)
                .slack("magnitude_min", min_mag_slack)
                .slack("conjugate_min", min_conj_slack),
        );
    }
    Ok(out)
}

/// Random two-component mixture trials for the Luxemburg functional.
pub fn mixture_trials(
    f: &ConvexOracle,
    trials: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    let mut rng = rng_for(cfg.seed ^ 0x6d69, Salt::NormProbe);
    let atoms = 8;
    let mut out = Vec::new();
    for trial in 0..trials {
        let raw1: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.1..1.0)).collect();
        let raw2: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.1..1.0)).collect();
        let s1 = crate::orlicz::DiscreteProbabilitySpace::normalized(raw1)?;
        let s2 = crate::orlicz::DiscreteProbabilitySpace::normalized(raw2)?;
        let t1: f64 = rng.gen_range(0.05..0.95);
        let u = VectorField::random(f.dim(), atoms, 2.0, rng.gen());
        let rep = crate::orlicz::mixture_concavity_check(f, &u, &[&s1, &s2], &[t1, 1.0 - t1], cfg)?;
        let mut rec = CheckRecord::from_bool(format!("mixture[{}][{trial}]", f.name()), rep.ok)
            .value("mixture_norm", rep.mixture_norm)
            .slack("quasi", rep.quasi_slack);
        if let Some(s) = rep.concavity_slack {
            rec = rec.slack("concavity", s);
        }
        if let Some(s) = rep.gamma_slack {
            rec = rec
                .slack("gamma", s)
                .value("gamma", rep.gamma_used.unwrap_or(f64::NAN));
        }
        out.push(rec);
    }
    Ok(out)
}

/// Random grid-convolution trials (homogeneous functions only).
pub fn convolution_trials(
    f: &ConvexOracle,
    trials: usize,
    ambient: usize,
    cfg: &SearchConfig,
) -> Result<Vec<CheckRecord>> {
    if f.homogeneity_order().is_none() {
        return Ok(Vec::new());
    }
    let mut rng = rng_for(cfg.seed ^ 0x636f, Salt::NormProbe);
    let span = 2i64;
    let mut out = Vec::new();
    for trial in 0..trials {
        let coords = grid_coords(ambient, span);
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<crate::orlicz::GridMeasure> {
            let raw: Vec<(Vec<i64>, f64)> = coords
                .iter()
                .map(|c| (c.clone(), rng.gen_range(0.1..1.0)))
                .collect();
            let total: f64 = raw.iter().map(|(_, w)| *w).sum();
            crate::orlicz::GridMeasure::new(
                raw.into_iter().map(|(c, w)| (c, w / total)).collect(),
            )
        };
        let lam = mk(&mut rng)?;
        let kap = mk(&mut rng)?;
        let mut values = std::collections::BTreeMap::new();
        for c in grid_coords(ambient, 2 * span) {
            values.insert(c, (0..f.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect());
        }
        let u = crate::orlicz::GridField {
            dim: f.dim(),
            values,
        };
        let rep = crate::orlicz::convolution_check(f, &u, &lam, &kap, cfg)?;
        out.push(
            CheckRecord::from_bool(format!("convolution[{}][{trial}]", f.name()), rep.ok)
                .value("lhs", rep.lhs)
                .value("rhs", rep.rhs)
                .slack("excess", rep.slack),
        );
    }
    Ok(out)
}

fn grid_coords(ambient: usize, span: i64) -> Vec<Vec<i64>> {
    let mut coords: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..ambient {
        let mut next = Vec::new();
        for c in &coords {
            for k in -span..=span {
                let mut cc = c.clone();
                cc.push(k);
                next.push(cc);
            }
        }
        coords = next;
    }
    coords
}

/// Convenience wrapper for reporting: stamps a summary record with the pass
/// count.
pub fn summary_record(name: &str, checks: &[CheckRecord]) -> CheckRecord {
    let failed: Vec<&CheckRecord> = checks
        .iter()
        .filter(|c| c.status == crate::report::CheckStatus::Fail)
        .collect();
    let mut rec = CheckRecord::from_bool(format!("{name}: summary"), failed.is_empty())
        .value("checks", checks.len() as f64)
        .value("failures", failed.len() as f64);
    if let Some(first) = failed.first() {
        rec = rec.witness("first_failure", number(0.0)).value_json(
            "first_failure_name",
            serde_json::Value::String(first.name.clone()),
        );
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = SearchConfig::with_seed(1);
        let fns = vec![registry::quadratic(1, &cfg).unwrap()];
        assert!(run_suite("bogus", &fns, 1, &cfg).is_err());
    }

    #[test]
    fn quick_suites_pass_on_quadratic() {
        let cfg = SearchConfig::with_seed(4);
        let fns = vec![
            registry::quadratic(1, &cfg).unwrap(),
            registry::quadratic(2, &cfg).unwrap(),
        ];
        for suite in ["quotient", "young_fenchel", "triangle", "attainment"] {
            let checks = run_suite(suite, &fns, 5, &cfg).unwrap();
            assert!(
                checks
                    .iter()
                    .all(|c| c.status != crate::report::CheckStatus::Fail),
                "{suite}: {checks:?}"
            );
        }
    }
}
