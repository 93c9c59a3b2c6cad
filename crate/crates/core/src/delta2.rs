//! Associated Young functions `R`, `Phi`, `Psi`, growth exponents,
//! Delta-2 diagnostics, and the affine-minorant constant `gamma(p1, p0)`.

use serde::Serialize;

use crate::config::SearchConfig;
use crate::convex_core::{directional_derivative, golden_max};
use crate::error::Error;
use crate::linalg::scaled;
use crate::oracle::ConvexOracle;
use crate::rng::{rng_for, Salt};
use crate::sphere;
use crate::Result;

/// Which associated Young function is being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum YoungKind {
    /// `R(r) = sup_{|x| >= 1} L(rx)/L(x)`.
    R,
    /// `Phi(r) = sup_{x != 0} L(rx)/L(x)`.
    Phi,
    /// `Psi(r) = inf_{x != 0} L(rx)/L(x)`.
    Psi,
}

/// Which side of the true value an estimate sits on. Suprema can only be
/// under-estimated from oracle samples and infima over-estimated; labelling
/// the side keeps the semantics honest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSide {
    LowerBoundOfSup,
    UpperBoundOfInf,
}

/// Best witness found for one grid value.
#[derive(Debug, Clone, Serialize)]
pub struct RatioWitness {
    pub x: Vec<f64>,
    pub ratio: f64,
}

/// Grid estimate of an associated Young function.
#[derive(Debug, Clone, Serialize)]
pub struct YoungFunctionEstimate {
    pub kind: YoungKind,
    pub r_grid: Vec<f64>,
    /// `f64::INFINITY` marks divergent ratios.
    pub values: Vec<f64>,
    pub bound_side: BoundSide,
    pub witnesses: Vec<Option<RatioWitness>>,
}

/// Estimates the associated Young function on `r_grid`.
///
/// `r = 0` and `r = 1` are exact (`0` and `1`); homogeneous oracles
/// short-circuit to `r^p`. Everything else searches the ratio
/// `L(rx)/L(x)` over a radial log grid times a direction set, with
/// golden-section refinement around the best cell, extending the radial
/// range adaptively while the best witness sits on its boundary (the
/// suprema of log-perturbed powers are approached only as `|x| -> 0` or
/// `|x| -> inf`).
pub fn young_estimate(
    f: &ConvexOracle,
    kind: YoungKind,
    r_grid: &[f64],
    cfg: &SearchConfig,
) -> Result<YoungFunctionEstimate> {
    if r_grid.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::InvalidInput("r grid must be non-negative".into()));
    }
    let bound_side = match kind {
        YoungKind::Psi => BoundSide::UpperBoundOfInf,
        _ => BoundSide::LowerBoundOfSup,
    };
    let mut values = Vec::with_capacity(r_grid.len());
    let mut witnesses = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if r == 0.0 {
            values.push(0.0);
            witnesses.push(None);
            continue;
        }
        if r == 1.0 {
            values.push(1.0);
            witnesses.push(None);
            continue;
        }
        if let Some(p) = f.homogeneity_order() {
            values.push(r.powf(p));
            witnesses.push(None);
            continue;
        }
        let (v, w) = ratio_search(f, r, kind, cfg)?;
        values.push(v);
        witnesses.push(w);
    }
    Ok(YoungFunctionEstimate {
        kind,
        r_grid: r_grid.to_vec(),
        values,
        bound_side,
        witnesses,
    })
}

fn ratio_search(
    f: &ConvexOracle,
    r: f64,
    kind: YoungKind,
    cfg: &SearchConfig,
) -> Result<(f64, Option<RatioWitness>)> {
    let n = f.dim();
    let maximize = !matches!(kind, YoungKind::Psi);
    let mut rng = rng_for(cfg.seed, Salt::RatioSearch);
    let dirs = sphere::directions(n, cfg.ratio_directions_per_dim * n, &mut rng);

    let ratio_at = |x: &[f64]| -> f64 {
        let den = f.eval(x);
        let num = f.eval(&scaled(x, r));
        match (num.as_finite(), den.as_finite()) {
            (Some(nu), Some(de)) if de > 0.0 => nu / de,
            (None, Some(de)) if de > 0.0 => f64::INFINITY,
            _ => {
                if maximize {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
        }
    };
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };

    let min_exp = if matches!(kind, YoungKind::R) {
        0.0
    } else {
        -cfg.ratio_exp_range
    };
    let mut lo_e = min_exp;
    let mut hi_e = cfg.ratio_exp_range;
    let mut best = if maximize {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };
    let mut best_exp = 0.0;
    let mut best_dir = dirs[0].clone();

    loop {
        let mut best_idx = 0usize;
        for i in 0..cfg.ratio_radii {
            let e = lo_e + (hi_e - lo_e) * i as f64 / (cfg.ratio_radii - 1) as f64;
            let radius = 10f64.powf(e);
            for d in &dirs {
                let v = ratio_at(&scaled(d, radius));
                if better(v, best) {
                    best = v;
                    best_exp = e;
                    best_dir = d.clone();
                    best_idx = i;
                }
            }
        }
        // extend while the optimum is pinned to the boundary of the range
        let span = hi_e - lo_e;
        if best_idx == cfg.ratio_radii - 1 && hi_e < cfg.ratio_exp_cap {
            hi_e = (hi_e + span).min(cfg.ratio_exp_cap);
        } else if best_idx == 0
            && !matches!(kind, YoungKind::R)
            && lo_e > -cfg.ratio_exp_cap
        {
            lo_e = (lo_e - span).max(-cfg.ratio_exp_cap);
        } else {
            break;
        }
    }

    if best.is_infinite() {
        return Ok((
            best,
            Some(RatioWitness {
                x: scaled(&best_dir, 10f64.powf(best_exp)),
                ratio: best,
            }),
        ));
    }

    // golden refinement rounds in log-radius around the best cell
    let cell = (hi_e - lo_e) / (cfg.ratio_radii - 1) as f64;
    let mut centre = best_exp;
    let mut width = cell;
    for _ in 0..cfg.ratio_refine_rounds {
        let a = (centre - width).max(min_exp.min(lo_e));
        let b = (centre + width).min(cfg.ratio_exp_cap);
        let sign = if maximize { 1.0 } else { -1.0 };
        let (e_star, v_signed) = golden_max(
            |e| sign * ratio_at(&scaled(&best_dir, 10f64.powf(e))),
            a,
            b,
            1e-6 * width.max(1e-12),
        );
        let v = sign * v_signed;
        if better(v, best) {
            best = v;
            best_exp = e_star;
        }
        centre = best_exp;
        width *= 0.25;
    }

    let witness = scaled(&best_dir, 10f64.powf(best_exp));
    Ok((
        best,
        Some(RatioWitness {
            x: witness,
            ratio: best,
        }),
    ))
}

/// Growth exponents `(p_minus, p_plus)`: one-sided slopes of `log Phi` at
/// `r = 1` from secants at offsets `{1e-2, 5e-3, 2.5e-3}` with Richardson
/// extrapolation. Homogeneous oracles return `(p, p)` exactly.
pub fn growth_exponents(f: &ConvexOracle, cfg: &SearchConfig) -> Result<(f64, f64)> {
    if let Some(p) = f.homogeneity_order() {
        return Ok((p, p));
    }
    let offsets = [1e-2f64, 5e-3, 2.5e-3];
    let side = |sign: f64| -> Result<f64> {
        let mut secants = Vec::new();
        for &h in &offsets {
            let r = 1.0 + sign * h;
            let (phi, _) = ratio_search(f, r, YoungKind::Phi, cfg)?;
            secants.push(phi.ln() / r.ln());
        }
        // two Richardson levels for the h + h^2 error model
        let t1 = 2.0 * secants[1] - secants[0];
        let t2 = 2.0 * secants[2] - secants[1];
        Ok((4.0 * t2 - t1) / 3.0)
    };
    let p_plus = side(1.0)?;
    let p_minus = side(-1.0)?;
    Ok((p_minus, p_plus))
}

/// Violation classification: lower bounds of suprema can fail an inequality
/// merely by under-shooting, which is an estimator artefact rather than a
/// counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationClass {
    Genuine,
    EstimatorShortfall,
}

/// Property-check outcome for a Young function estimate.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub p_minus: f64,
    pub p_plus: f64,
    pub pairs_tested: usize,
    /// `(r_i, r_j)` with `r_i < r_j` but estimate decreasing.
    pub monotonicity_violations: Vec<(f64, f64)>,
    /// `(r, s, excess, class)` against sub/super-multiplicativity.
    pub multiplicativity_violations: Vec<(f64, f64, f64, ViolationClass)>,
    /// `(r, value, bound)` against the polynomial envelopes.
    pub envelope_violations: Vec<(f64, f64, f64)>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.monotonicity_violations.is_empty()
            && self.multiplicativity_violations.is_empty()
            && self.envelope_violations.is_empty()
    }
}

/// Verifies monotonicity, sub-multiplicativity (`Phi`, `R`) or
/// super-multiplicativity (`Psi`) on multiplicatively closed grid pairs, and
/// the polynomial envelopes from the estimated growth exponents.
pub fn young_properties_check(
    f: &ConvexOracle,
    est: &YoungFunctionEstimate,
    cfg: &SearchConfig,
) -> Result<PropertyReport> {
    let (p_minus, p_plus) = growth_exponents(f, cfg)?;
    let g = &est.r_grid;
    let v = &est.values;
    let mut report = PropertyReport {
        p_minus,
        p_plus,
        pairs_tested: 0,
        monotonicity_violations: Vec::new(),
        multiplicativity_violations: Vec::new(),
        envelope_violations: Vec::new(),
    };

    for i in 0..g.len() {
        for j in (i + 1)..g.len() {
            if v[i].is_finite() && v[j].is_finite() && v[i] > v[j] * (1.0 + 1e-9) + 1e-12 {
                report.monotonicity_violations.push((g[i], g[j]));
            }
        }
    }

    let find = |target: f64| -> Option<usize> {
        g.iter()
            .position(|r| (r - target).abs() <= 1e-12 * (1.0 + target.abs()))
    };
    for i in 0..g.len() {
        for j in i..g.len() {
            let prod = g[i] * g[j];
            let Some(k) = find(prod) else { continue };
            if !(v[i].is_finite() && v[j].is_finite() && v[k].is_finite()) {
                continue;
            }
            report.pairs_tested += 1;
            let tol = 1e-9 * (1.0 + v[i] * v[j]);
            match est.kind {
                YoungKind::Phi | YoungKind::R => {
                    if v[k] > v[i] * v[j] + tol {
                        report.multiplicativity_violations.push((
                            g[i],
                            g[j],
                            v[k] - v[i] * v[j],
                            ViolationClass::EstimatorShortfall,
                        ));
                    }
                }
                YoungKind::Psi => {
                    if v[k] < v[i] * v[j] - tol {
                        report.multiplicativity_violations.push((
                            g[i],
                            g[j],
                            v[i] * v[j] - v[k],
                            ViolationClass::EstimatorShortfall,
                        ));
                    }
                }
            }
        }
    }
    if report.pairs_tested == 0 {
        return Err(Error::GridNotClosed);
    }

    for (&r, &val) in g.iter().zip(v) {
        if !val.is_finite() || r == 0.0 {
            continue;
        }
        let tol = 1e-6 * (1.0 + val);
        match est.kind {
            YoungKind::Phi | YoungKind::R => {
                let bound = if r <= 1.0 {
                    r.powf(p_minus)
                } else {
                    r.powf(p_plus)
                };
                if val > bound + tol {
                    report.envelope_violations.push((r, val, bound));
                }
            }
            YoungKind::Psi => {
                let bound = if r <= 1.0 {
                    r.powf(p_plus)
                } else {
                    r.powf(p_minus)
                };
                if val < bound - tol {
                    report.envelope_violations.push((r, val, bound));
                }
            }
        }
    }
    Ok(report)
}

/// Domain of the Delta-2 ratio supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Delta2Domain {
    /// `|x| >= 1`: the one-sided condition.
    OutsideUnitBall,
    /// `x != 0`: the two-sided condition.
    AllNonzero,
}

#[derive(Debug, Clone, Serialize)]
pub enum Delta2Verdict {
    Delta2Evidence,
    /// Best point at which the ratio still grew at the search cap.
    ViolationWitness(Vec<f64>),
}

/// Diagnostic for `sup L'(x, x) / L(x)` over the chosen domain.
#[derive(Debug, Clone, Serialize)]
pub struct Delta2Report {
    pub domain: Delta2Domain,
    pub sup_ratio_estimate: f64,
    /// Doubling evidence `L(2x) <= 2^c L(x)`.
    pub doubling_constant: f64,
    pub p_minus: f64,
    pub p_plus: f64,
    /// Whether the estimate exceeded `p_plus` beyond tolerance (it must not).
    pub exceeds_p_plus: bool,
    pub witness: Vec<f64>,
    pub verdict: Delta2Verdict,
}

/// Maximises `L'(x, x)/L(x)` over the domain with the ratio-search scaffold
/// and cross-checks the estimate against the growth exponent `p_plus`.
pub fn delta2_diagnostic(
    f: &ConvexOracle,
    domain: Delta2Domain,
    cfg: &SearchConfig,
) -> Result<Delta2Report> {
    let n = f.dim();
    let mut rng = rng_for(cfg.seed, Salt::RatioSearch);
    let dirs = sphere::directions(n, cfg.ratio_directions_per_dim * n, &mut rng);

    let ratio_at = |x: &[f64]| -> Result<f64> {
        let lx = f.eval_finite(x)?;
        let d = directional_derivative(f, x, x, cfg)?;
        Ok(d / lx)
    };

    let min_exp = match domain {
        Delta2Domain::OutsideUnitBall => 0.0,
        Delta2Domain::AllNonzero => -cfg.ratio_exp_range,
    };
    let mut lo_e = min_exp;
    let mut hi_e = cfg.ratio_exp_range;
    let mut best = f64::NEG_INFINITY;
    let mut best_exp = 0.0;
    let mut best_dir = dirs[0].clone();
    let stuck_at_cap;

    loop {
        let mut best_idx = 0usize;
        for i in 0..cfg.ratio_radii {
            let e = lo_e + (hi_e - lo_e) * i as f64 / (cfg.ratio_radii - 1) as f64;
            let radius = 10f64.powf(e);
            for d in &dirs {
                let v = ratio_at(&scaled(d, radius))?;
                if v > best {
                    best = v;
                    best_exp = e;
                    best_dir = d.clone();
                    best_idx = i;
                }
            }
        }
        let span = hi_e - lo_e;
        if best_idx == cfg.ratio_radii - 1 && hi_e < cfg.ratio_exp_cap {
            hi_e = (hi_e + span).min(cfg.ratio_exp_cap);
        } else if best_idx == 0 && lo_e > -cfg.ratio_exp_cap && min_exp < 0.0 {
            lo_e = (lo_e - span).max(-cfg.ratio_exp_cap);
        } else {
            stuck_at_cap = best_idx == cfg.ratio_radii - 1 && hi_e >= cfg.ratio_exp_cap;
            break;
        }
    }

    let cell = (hi_e - lo_e) / (cfg.ratio_radii - 1) as f64;
    let mut centre = best_exp;
    let mut width = cell;
    for _ in 0..cfg.ratio_refine_rounds {
        let a = (centre - width).max(min_exp.min(lo_e));
        let b = (centre + width).min(cfg.ratio_exp_cap);
        let dir = best_dir.clone();
        let (e_star, v) = golden_max(
            |e| match ratio_at(&scaled(&dir, 10f64.powf(e))) {
                Ok(v) => v,
                Err(_) => f64::NEG_INFINITY,
            },
            a,
            b,
            1e-6 * width.max(1e-12),
        );
        if v > best {
            best = v;
            best_exp = e_star;
        }
        centre = best_exp;
        width *= 0.25;
    }

    let witness = scaled(&best_dir, 10f64.powf(best_exp));
    let (p_minus, p_plus) = growth_exponents(f, cfg)?;
    let exceeds = best > p_plus * 1.02 + 1e-9;
    // a ratio still climbing at the radial cap is evidence against Delta-2
    let verdict = if stuck_at_cap && {
        let back = ratio_at(&scaled(&best_dir, 10f64.powf(best_exp - 1.0)))?;
        best > back * 1.02
    } {
        Delta2Verdict::ViolationWitness(witness.clone())
    } else {
        Delta2Verdict::Delta2Evidence
    };

    Ok(Delta2Report {
        domain,
        sup_ratio_estimate: best,
        doubling_constant: 2f64.powf(best),
        p_minus,
        p_plus,
        exceeds_p_plus: exceeds,
        witness,
        verdict,
    })
}

/// Dual growth-exponent bounds `(q_plus, q_minus) = (p-/(p- - 1), p+/(p+ - 1))`
/// for the conjugate under the two-sided Delta-2 condition.
pub fn dual_exponent_bounds(p_minus: f64, p_plus: f64) -> Result<(f64, f64)> {
    if !(p_minus > 1.0) {
        return Err(Error::PMinusNotGreaterThanOne(p_minus));
    }
    if !(p_plus >= p_minus) {
        return Err(Error::InvalidInput(format!(
            "p_plus = {p_plus} < p_minus = {p_minus}"
        )));
    }
    Ok((p_minus / (p_minus - 1.0), p_plus / (p_plus - 1.0)))
}

/// `gamma(p1, p0) = sup { a + b : a + b r <= min(r^p1, r^p0) for all r >= 0 }`
/// by exact maximisation over the line slope; the inner infimum over `r` has
/// a closed form on each branch. Equals 1 iff `p1 = p0`.
pub fn gamma(p1: f64, p0: f64) -> Result<f64> {
    check_gamma_args(p1, p0)?;
    if p1 == p0 {
        return Ok(1.0);
    }
    let b_hi = if p0 == 1.0 { 1.0 } else { 3.0 * p1 + 3.0 };
    let (_, val) = golden_max(|b| b + max_feasible_intercept(p1, p0, b), 0.0, b_hi, 1e-14);
    // the supremum can sit on the slope boundary (p0 = 1); probe it exactly
    let at_hi = b_hi + max_feasible_intercept(p1, p0, b_hi);
    let at_lo = max_feasible_intercept(p1, p0, 0.0);
    Ok(val.max(at_hi).max(at_lo))
}

fn check_gamma_args(p1: f64, p0: f64) -> Result<()> {
    if !(p0 >= 1.0 && p1 >= p0) {
        return Err(Error::InvalidInput(format!(
            "gamma requires p1 >= p0 >= 1, got ({p1}, {p0})"
        )));
    }
    Ok(())
}

/// Largest intercept `a` with `a + b r <= min(r^p1, r^p0)` for all `r >= 0`.
fn max_feasible_intercept(p1: f64, p0: f64, b: f64) -> f64 {
    // branch r in [0, 1]: min of r^p1 - b r
    let steep = if p1 > 1.0 {
        let r_star = (b / p1).powf(1.0 / (p1 - 1.0));
        if r_star <= 1.0 {
            r_star.powf(p1) - b * r_star
        } else {
            1.0 - b
        }
    } else {
        // p1 = 1 forces p0 = 1, handled by the caller's p1 == p0 shortcut
        (1.0 - b).min(0.0)
    };
    // branch r >= 1: min of r^p0 - b r
    let shallow = if p0 == 1.0 {
        if b > 1.0 {
            f64::NEG_INFINITY
        } else {
            1.0 - b
        }
    } else {
        let r_star = (b / p0).powf(1.0 / (p0 - 1.0));
        if r_star >= 1.0 {
            r_star.powf(p0) - b * r_star
        } else {
            1.0 - b
        }
    };
    steep.min(shallow).min(0.0) // r = 0 forces a <= 0
}

/// Independent dense-grid linear-program oracle for `gamma`.
///
/// Constraints `a + b r_j <= min(r_j^p1, r_j^p0)` on `{0}` plus a
/// log-spaced grid of `gamma_grid_points` points in `[1e-6, 100]`, with the
/// analytic tail guard for `r > 100` (without it the truncated LP inflates
/// the optimum whenever the binding tail constraint lies beyond the grid).
/// Solved by an outer slope scan with shrinking refinement.
pub fn gamma_lp_oracle(p1: f64, p0: f64, cfg: &SearchConfig) -> Result<f64> {
    check_gamma_args(p1, p0)?;
    let m = cfg.gamma_grid_points;
    let mut grid = Vec::with_capacity(m + 1);
    grid.push(0.0f64);
    for i in 0..m {
        let e = -6.0 + 8.0 * i as f64 / (m - 1) as f64;
        grid.push(10f64.powf(e));
    }
    let envelope: Vec<f64> = grid.iter().map(|r| r.powf(p1).min(r.powf(p0))).collect();

    let intercept = |b: f64| -> f64 {
        let mut a = f64::INFINITY;
        for (r, m_r) in grid.iter().zip(&envelope) {
            a = a.min(m_r - b * r);
        }
        // tail r > 100: inf of r^p0 - b r beyond the grid
        if p0 == 1.0 {
            if b > 1.0 {
                return f64::NEG_INFINITY;
            }
        } else {
            let r_star = (b / p0).powf(1.0 / (p0 - 1.0));
            if r_star > 100.0 {
                a = a.min(r_star.powf(p0) - b * r_star);
            }
        }
        a
    };

    let b_hi = if p0 == 1.0 { 1.0 } else { 3.0 * p1 + 3.0 };
    let mut lo = 0.0f64;
    let mut hi = b_hi;
    let mut best_b = 0.0;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..4 {
        let steps = 10_000usize;
        for i in 0..=steps {
            let b = lo + (hi - lo) * i as f64 / steps as f64;
            let v = b + intercept(b);
            if v > best {
                best = v;
                best_b = b;
            }
        }
        let span = (hi - lo) / steps as f64;
        lo = (best_b - 2.0 * span).max(0.0);
        hi = (best_b + 2.0 * span).min(b_hi);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SearchConfig {
        SearchConfig::with_seed(23)
    }

    #[test]
    fn homogeneous_phi_is_exact_power() {
        let c = cfg();
        let f = registry::power(2.0, 2, &c).unwrap();
        let grid = [0.0, 0.5, 1.0, 2.0, 3.0];
        let est = young_estimate(&f, YoungKind::Phi, &grid, &c).unwrap();
        for (r, v) in grid.iter().zip(&est.values) {
            assert_abs_diff_eq!(*v, r * r, epsilon = 1e-12);
        }
        assert_eq!(est.bound_side, BoundSide::LowerBoundOfSup);
    }

    #[test]
    fn hinge_phi_matches_its_own_profile() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 1, &c).unwrap();
        let grid = [0.25, 0.5, 2.0, 3.0, 4.0];
        let est = young_estimate(&f, YoungKind::Phi, &grid, &c).unwrap();
        for (r, v) in grid.iter().zip(&est.values) {
            let want = r.powi(2) * r.max(1.0);
            assert!((v - want).abs() <= 0.02 * want, "Phi({r}) = {v}, want {want}");
        }
    }

    #[test]
    fn plog_phi_matches_hinge_closed_form() {
        let c = cfg();
        let f = registry::plog(2.0, 1, &c).unwrap();
        for (r, want) in [(0.1, 0.01), (3.0, 27.0), (10.0, 1000.0)] {
            let est = young_estimate(&f, YoungKind::Phi, &[r], &c).unwrap();
            let v = est.values[0];
            assert!(
                (v - want).abs() <= 0.02 * want,
                "Phi({r}) = {v}, want {want}"
            );
        }
    }

    #[test]
    fn psi_of_hinge_is_min_profile() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 1, &c).unwrap();
        let grid = [0.5, 2.0];
        let est = young_estimate(&f, YoungKind::Psi, &grid, &c).unwrap();
        for (r, v) in grid.iter().zip(&est.values) {
            let want = r.powi(2) * r.min(1.0);
            assert!((v - want).abs() <= 0.02 * want, "Psi({r}) = {v}, want {want}");
        }
        assert_eq!(est.bound_side, BoundSide::UpperBoundOfInf);
    }

    #[test]
    fn reciprocal_identity_for_hinge() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 1, &c).unwrap();
        for r in [0.5f64, 2.0, 4.0] {
            let psi = young_estimate(&f, YoungKind::Psi, &[r], &c).unwrap().values[0];
            let phi_inv = young_estimate(&f, YoungKind::Phi, &[1.0 / r], &c)
                .unwrap()
                .values[0];
            let prod = psi * phi_inv;
            assert!((prod - 1.0).abs() < 0.05, "Psi({r}) * Phi(1/{r}) = {prod}");
        }
    }

    #[test]
    fn growth_exponents_of_hinge() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 2, &c).unwrap();
        let (pm, pp) = growth_exponents(&f, &c).unwrap();
        assert_abs_diff_eq!(pm, 2.0, epsilon = 0.02);
        assert_abs_diff_eq!(pp, 3.0, epsilon = 0.02);
    }

    #[test]
    fn properties_check_on_hinge_phi() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 1, &c).unwrap();
        let grid = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        let est = young_estimate(&f, YoungKind::Phi, &grid, &c).unwrap();
        let rep = young_properties_check(&f, &est, &c).unwrap();
        assert!(rep.pairs_tested > 0);
        assert!(rep.passed(), "{rep:?}");

        let psi = young_estimate(&f, YoungKind::Psi, &grid, &c).unwrap();
        let rep = young_properties_check(&f, &psi, &c).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn properties_check_requires_closed_grid() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 1, &c).unwrap();
        let est = young_estimate(&f, YoungKind::Phi, &[3.0, 5.0], &c).unwrap();
        assert!(matches!(
            young_properties_check(&f, &est, &c),
            Err(Error::GridNotClosed)
        ));
    }

    #[test]
    fn delta2_diagnostic_examples() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let rep = delta2_diagnostic(&f, Delta2Domain::OutsideUnitBall, &c).unwrap();
        assert_abs_diff_eq!(rep.sup_ratio_estimate, 2.0, epsilon = 0.02);
        assert!(!rep.exceeds_p_plus);
        assert!(matches!(rep.verdict, Delta2Verdict::Delta2Evidence));

        let f = registry::hinge_power(2.0, 1, &c).unwrap();
        let rep = delta2_diagnostic(&f, Delta2Domain::AllNonzero, &c).unwrap();
        assert_abs_diff_eq!(rep.sup_ratio_estimate, 3.0, epsilon = 0.06);

        let f = registry::hinge_power(1.0, 1, &c).unwrap();
        let rep = delta2_diagnostic(&f, Delta2Domain::AllNonzero, &c).unwrap();
        assert_abs_diff_eq!(rep.sup_ratio_estimate, 2.0, epsilon = 0.04);
    }

    #[test]
    fn dual_exponent_examples() {
        assert_eq!(dual_exponent_bounds(2.0, 2.0).unwrap(), (2.0, 2.0));
        let (qp, qm) = dual_exponent_bounds(1.5, 3.0).unwrap();
        assert_abs_diff_eq!(qp, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(qm, 1.5, epsilon = 1e-12);
        assert!(matches!(
            dual_exponent_bounds(1.0, 2.0),
            Err(Error::PMinusNotGreaterThanOne(_))
        ));
    }

    #[test]
    fn gamma_examples() {
        let c = cfg();
        assert_eq!(gamma(2.0, 2.0).unwrap(), 1.0);
        let g = gamma(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(g, 0.75, epsilon = 1e-9);
        let lp = gamma_lp_oracle(2.0, 1.0, &c).unwrap();
        assert_abs_diff_eq!(g, lp, epsilon = 1e-6);
    }

    #[test]
    fn gamma_is_monotone_and_bounded() {
        let mut prev = 1.0;
        for p1 in [1.0f64, 1.5, 2.0, 3.0, 4.0] {
            let g = gamma(p1, 1.0).unwrap();
            assert!(g > 0.0 && g <= 1.0);
            assert!(g <= prev + 1e-12, "gamma not non-increasing in p1");
            prev = g;
        }
    }

    #[test]
    fn gamma_cross_validates_against_lp() {
        let c = cfg();
        for (p1, p0) in [(3.0, 2.0), (2.5, 1.5), (4.0, 1.0), (1.5, 1.2)] {
            let g = gamma(p1, p0).unwrap();
            let lp = gamma_lp_oracle(p1, p0, &c).unwrap();
            assert!(
                (g - lp).abs() <= c.gamma_cross_tol,
                "gamma({p1},{p0}) = {g} vs LP {lp}"
            );
        }
    }
}
