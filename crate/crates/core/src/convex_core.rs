//! Directional derivatives, the numerical Legendre transform, Fenchel gaps
//! and local oscillation bounds.

use rand::Rng;

use crate::config::SearchConfig;
use crate::error::Error;
use crate::extreal::ExtReal;
use crate::linalg::{axpy, dot, norm2, scaled};
use crate::oracle::ConvexOracle;
use crate::rng::{rng_for, Salt};
use crate::sphere;
use crate::Result;

/// Difference quotients `(L(x + eps*theta) - L(x)) / eps` along the geometric
/// schedule `eps_k = eps_init * 2^-k`, truncated at the floor. Quotients whose
/// probe landed outside the effective domain are skipped.
pub fn difference_quotients(
    f: &ConvexOracle,
    x: &[f64],
    theta: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<(f64, f64)>> {
    let fx = f.eval_finite(x)?;
    let mut out = Vec::new();
    let mut eps = cfg.dd_eps_init;
    while eps >= cfg.dd_eps_floor {
        let z = axpy(x, eps, theta);
        if let Some(fz) = f.eval(&z).as_finite() {
            out.push((eps, (fz - fx) / eps));
        }
        eps *= 0.5;
    }
    if out.is_empty() {
        return Err(Error::NonFiniteNearPoint(format!(
            "all probes along {theta:?} from {x:?} are infinite"
        )));
    }
    Ok(out)
}

/// One-sided directional derivative `L'(x, theta)`, the infimum of the
/// difference quotients.
///
/// The quotients are non-increasing as `eps` decreases, so the schedule is
/// descended until either two successive raw quotients agree to within the
/// stabilisation tolerance, or the step-halving extrapolants
/// `2 q_{k+1} - q_k` do (the extrapolant cancels the linear truncation term,
/// which the raw quotients of smooth functions cannot shed before the floor).
pub fn directional_derivative(
    f: &ConvexOracle,
    x: &[f64],
    theta: &[f64],
    cfg: &SearchConfig,
) -> Result<f64> {
    let qs = difference_quotients(f, x, theta, cfg)?;
    // scale-aware stabilisation: at unit scale this is the absolute rule,
    // at |q| >> 1 it stays above the f64 rounding floor of the quotients
    let tol = |q: f64| cfg.dd_stab_tol * (1.0 + q.abs());
    for w in qs.windows(2) {
        if (w[1].1 - w[0].1).abs() < tol(w[1].1) {
            return Ok(w[1].1);
        }
    }
    let extr: Vec<f64> = qs.windows(2).map(|w| 2.0 * w[1].1 - w[0].1).collect();
    for w in extr.windows(2) {
        if (w[1] - w[0]).abs() < tol(w[1]) {
            return Ok(w[1]);
        }
    }
    let last_delta = if extr.len() >= 2 {
        (extr[extr.len() - 1] - extr[extr.len() - 2]).abs()
    } else {
        f64::INFINITY
    };
    Err(Error::PrecisionLoss { last_delta })
}

/// Detailed outcome of a conjugate evaluation.
#[derive(Debug, Clone)]
pub struct LegendreEstimate {
    /// Best available value: the registered conjugate when present, else the
    /// numeric estimate.
    pub value: ExtReal,
    /// The certified numeric lower bound from the ascent.
    pub numeric: ExtReal,
    /// Registered conjugate value, when the oracle carries one.
    pub analytic: Option<ExtReal>,
    /// `analytic - numeric` when both are finite.
    pub gap: Option<f64>,
    /// Maximiser found by the search (absent for `+inf` results).
    pub witness: Option<Vec<f64>>,
}

/// Conjugate value `L*(x) = sup_y [<x,y> - L(y)]`.
///
/// Returns the registered conjugate when the oracle has one, otherwise a
/// certified lower bound from a multi-start ascent. `+inf` is a legitimate
/// result when the objective diverges along a ray.
pub fn legendre(f: &ConvexOracle, x: &[f64], cfg: &SearchConfig) -> ExtReal {
    if let Some(v) = f.analytic_conjugate(x) {
        return v;
    }
    legendre_numeric(f, x, cfg).0
}

/// Always runs the numeric search; records the gap against the registered
/// conjugate when one exists.
pub fn legendre_detailed(f: &ConvexOracle, x: &[f64], cfg: &SearchConfig) -> LegendreEstimate {
    let (numeric, witness) = legendre_numeric(f, x, cfg);
    let analytic = f.analytic_conjugate(x);
    let value = analytic.unwrap_or(numeric);
    let gap = match (analytic, numeric.as_finite()) {
        (Some(a), Some(nv)) => a.as_finite().map(|av| av - nv),
        _ => None,
    };
    LegendreEstimate {
        value,
        numeric,
        analytic,
        gap,
        witness,
    }
}

/// Numeric conjugate: divergence classification, then concave ascent.
pub fn legendre_numeric(
    f: &ConvexOracle,
    x: &[f64],
    cfg: &SearchConfig,
) -> (ExtReal, Option<Vec<f64>>) {
    let n = f.dim();
    let phi = |y: &[f64]| -> f64 {
        match f.eval(y).as_finite() {
            Some(v) => dot(x, y) - v,
            None => f64::NEG_INFINITY,
        }
    };

    // Probe directions: the 2n axes, the ray of x, and a handful of seeded
    // extras for general position.
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e.clone());
        e[i] = -1.0;
        dirs.push(e);
    }
    let xn = norm2(x);
    if xn > 0.0 {
        dirs.push(scaled(x, 1.0 / xn));
        dirs.push(scaled(x, -1.0 / xn));
    }
    let mut rng = rng_for(cfg.seed, Salt::Legendre);
    if n > 1 {
        for _ in 0..4 {
            dirs.push(sphere::random_direction(n, &mut rng));
        }
    }

    // Double the radius until the objective stops growing along every probe
    // ray; a value beyond the divergence threshold declares +inf.
    let mut radius = 1.0f64;
    let cap = 2f64.powi(62);
    loop {
        let mut growing = false;
        for d in &dirs {
            let a = phi(&scaled(d, radius * 0.5));
            let b = phi(&scaled(d, radius));
            if b > cfg.divergence_threshold {
                return (ExtReal::INFINITY, None);
            }
            if b.is_finite() && b > a + 1e-12 * (1.0 + a.abs()) {
                growing = true;
            }
        }
        if !growing || radius > cap {
            break;
        }
        radius *= 2.0;
    }
    let search_radius = 2.0 * radius;

    let (best, val) = if n == 1 {
        let (lo, hi) = shrink_to_finite(&phi, -search_radius, search_radius);
        let (y, v) = golden_max(|t| phi(&[t]), lo, hi, 1e-13 * (1.0 + search_radius));
        (vec![y], v)
    } else {
        ascend_multi_start(&phi, x, n, search_radius, &dirs, cfg, &mut rng)
    };

    if !val.is_finite() {
        // The origin is always feasible with value 0.
        return (ExtReal::from_value(0.0), Some(vec![0.0; n]));
    }
    (ExtReal::from_value(val.max(0.0)), Some(best))
}

fn ascend_multi_start(
    phi: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    n: usize,
    radius: f64,
    dirs: &[Vec<f64>],
    cfg: &SearchConfig,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (Vec<f64>, f64) {
    let mut candidates: Vec<Vec<f64>> = vec![vec![0.0; n]];
    // best point along each probe ray
    for d in dirs {
        let (t, _) = golden_max(|t| phi(&scaled(d, t)), 0.0, radius, 1e-10 * (1.0 + radius));
        candidates.push(scaled(d, t));
    }
    for _ in 0..cfg.legendre_starts {
        candidates.push(sphere::ball_point(&vec![0.0; n], radius, rng));
    }
    candidates.retain(|c| phi(c).is_finite());
    candidates.sort_by(|a, b| phi(b).total_cmp(&phi(a)));
    candidates.truncate(4.max(1));

    let mut best = vec![0.0; n];
    let mut best_val = phi(&best);
    for c in candidates {
        let (y, v) = compass_max(phi, c, 0.1 * (1.0 + norm2(x)), 1e-9);
        if v > best_val {
            best = y;
            best_val = v;
        }
    }
    (best, best_val)
}

/// Pattern search maximising a concave function. Steps over all axes with a
/// shrinking step; rejected moves into the infinite region cost one probe.
fn compass_max(
    phi: &dyn Fn(&[f64]) -> f64,
    start: Vec<f64>,
    h0: f64,
    h_min: f64,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut y = start;
    let mut v = phi(&y);
    let mut h = h0;
    while h > h_min {
        let mut improved = false;
        for i in 0..n {
            for s in [1.0f64, -1.0] {
                let mut cand = y.clone();
                cand[i] += s * h;
                let cv = phi(&cand);
                if cv > v {
                    y = cand;
                    v = cv;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (y, v)
}

/// Shrinks `[lo, hi]` so both ends have finite objective; the origin is
/// assumed feasible.
fn shrink_to_finite(phi: &dyn Fn(&[f64]) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..80 {
        if phi(&[lo]).is_finite() {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..80 {
        if phi(&[hi]).is_finite() {
            break;
        }
        hi *= 0.5;
    }
    (lo, hi)
}

/// Golden-section maximisation of a unimodal (here: concave) function.
pub(crate) fn golden_max(
    phi: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = phi(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, phi(mid).max(fc).max(fd))
}

/// Fenchel gap `g = L(x) + L*(y) - <x, y> >= 0`; `g ~ 0` certifies
/// `y` as a subgradient at `x`. `+inf` means `y` lies far outside the
/// conjugate's effective domain.
pub fn fenchel_gap(f: &ConvexOracle, x: &[f64], y: &[f64], cfg: &SearchConfig) -> Result<f64> {
    let lx = f.eval_finite(x)?;
    let ls = legendre(f, y, cfg);
    match ls.as_finite() {
        Some(v) => Ok(lx + v - dot(x, y)),
        None => Ok(f64::INFINITY),
    }
}

/// Estimate of `sup_{|h| <= r} (L(x+h) - L(x))`.
///
/// The supremum of a convex function over a ball is attained on the sphere,
/// so the search samples directions and refines around the best one.
pub fn local_oscillation(f: &ConvexOracle, x: &[f64], r: f64, cfg: &SearchConfig) -> Result<f64> {
    assert!(r > 0.0, "oscillation radius must be positive");
    let n = f.dim();
    let fx = f.eval_finite(x)?;
    let probe = |theta: &[f64]| -> Result<f64> {
        let z = axpy(x, r, theta);
        Ok(f.eval_finite(&z)? - fx)
    };

    if n == 1 {
        return Ok(probe(&[1.0])?.max(probe(&[-1.0])?));
    }

    let mut rng = rng_for(cfg.seed, Salt::Oscillation);
    let dirs = sphere::directions(n, cfg.hull_directions(n), &mut rng);
    let mut best_dir = dirs[0].clone();
    let mut best = f64::NEG_INFINITY;
    for d in &dirs {
        let v = probe(d)?;
        if v > best {
            best = v;
            best_dir = d.clone();
        }
    }
    // local refinement on the sphere around the best direction
    let mut h = 0.5;
    while h > 1e-9 {
        let mut improved = false;
        for i in 0..n {
            for s in [1.0f64, -1.0] {
                let mut cand = best_dir.clone();
                cand[i] += s * h;
                let nrm = norm2(&cand);
                if nrm < 1e-12 {
                    continue;
                }
                let cand = scaled(&cand, 1.0 / nrm);
                let v = probe(&cand)?;
                if v > best {
                    best = v;
                    best_dir = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best)
}

/// `L**(x)` computed numerically from the conjugate oracle; used by the
/// biconjugacy suite.
pub fn biconjugate(f: &ConvexOracle, x: &[f64], cfg: &SearchConfig) -> ExtReal {
    let conj = f.conjugate_oracle(cfg);
    legendre_numeric(&conj, x, cfg).0
}

/// One-dimensional conjugate `V*(s) = sup_{r >= 0} [s r - V(r)]` of a scalar
/// Young profile. Radial functions reduce their full conjugate to this.
pub(crate) fn scalar_conjugate(
    v: &dyn Fn(f64) -> f64,
    s: f64,
    divergence_threshold: f64,
) -> ExtReal {
    if s <= 0.0 {
        // s r - V(r) <= 0 on r >= 0 with equality at r = 0
        return ExtReal::ZERO;
    }
    let g = |r: f64| {
        let vr = v(r);
        if vr.is_finite() {
            s * r - vr
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut hi = 1.0f64;
    for _ in 0..200 {
        let a = g(hi);
        if a > divergence_threshold {
            return ExtReal::INFINITY;
        }
        let b = g(2.0 * hi);
        if !(b > a + 1e-14 * (1.0 + a.abs())) {
            break;
        }
        hi *= 2.0;
    }
    let (_, val) = golden_max(g, 0.0, 2.0 * hi, 1e-12 * (1.0 + 2.0 * hi));
    if val > divergence_threshold {
        return ExtReal::INFINITY;
    }
    ExtReal::from_value(val.max(0.0))
}

#[allow(unused)]
fn seeded_unit(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nn = norm2(&v);
    scaled(&v, 1.0 / nn.max(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SearchConfig {
        SearchConfig::with_seed(5)
    }

    #[test]
    fn quadratic_directional_derivative_is_orthogonal_zero() {
        let c = cfg();
        let f = registry::power(2.0, 2, &c).unwrap();
        let d = directional_derivative(&f, &[1.0, 0.0], &[0.0, 1.0], &c).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn abs_right_derivative_at_zero() {
        let c = cfg();
        let f = registry::power(1.0, 1, &c).unwrap();
        let d = directional_derivative(&f, &[0.0], &[1.0], &c).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hinge_right_derivative_at_one() {
        // V(r) = r^2 on r >= 1; right derivative at r = 1 is 2.
        let c = cfg();
        let f = registry::hinge_power(1.0, 1, &c).unwrap();
        let d = directional_derivative(&f, &[1.0], &[1.0], &c).unwrap();
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-7);
    }

    #[test]
    fn quotients_are_monotone_in_eps() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 2, &c).unwrap();
        let qs = difference_quotients(&f, &[0.3, 0.4], &[1.0, -0.2], &c).unwrap();
        for w in qs.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-10, "quotient increased as eps fell");
        }
    }

    #[test]
    fn legendre_of_half_square_is_self_dual() {
        let c = cfg();
        let f = registry::quadratic(1, &c).unwrap();
        let v = legendre_numeric(&f, &[3.0], &c).0;
        assert_abs_diff_eq!(v.value(), 4.5, epsilon = 1e-8);
    }

    #[test]
    fn legendre_of_hinge_matches_piecewise_closed_form() {
        let c = cfg();
        let f = registry::hinge_power(1.0, 1, &c).unwrap();
        for (x, want) in [(3.0, 2.25), (0.5, 0.0), (1.5, 0.5), (2.0, 1.0)] {
            let v = legendre_numeric(&f, &[x], &c).0;
            assert_abs_diff_eq!(v.value(), want, epsilon = 1e-7);
        }
    }

    #[test]
    fn legendre_of_power_example() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let v = legendre_numeric(&f, &[2.0], &c).0;
        assert_abs_diff_eq!(v.value(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn legendre_detects_divergence_for_linear_growth() {
        let c = cfg();
        let f = registry::power(1.0, 1, &c).unwrap();
        assert!(legendre_numeric(&f, &[1.5], &c).0.is_infinite());
        assert_abs_diff_eq!(legendre_numeric(&f, &[0.7], &c).0.value(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn fenchel_gap_examples() {
        let c = cfg();
        let q = registry::quadratic(2, &c).unwrap();
        let g = fenchel_gap(&q, &[1.0, 2.0], &[1.0, 2.0], &c).unwrap();
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-8);
        let g = fenchel_gap(&q, &[1.0, 0.0], &[2.0, 0.0], &c).unwrap();
        assert_abs_diff_eq!(g, 0.5, epsilon = 1e-8);
        let a = registry::power(1.0, 1, &c).unwrap();
        let g = fenchel_gap(&a, &[0.0], &[0.3], &c).unwrap();
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn local_oscillation_examples() {
        let c = cfg();
        let q = registry::quadratic(2, &c).unwrap();
        assert_abs_diff_eq!(
            local_oscillation(&q, &[0.0, 0.0], 1.0, &c).unwrap(),
            0.5,
            epsilon = 1e-9
        );
        let a = registry::power(1.0, 1, &c).unwrap();
        assert_abs_diff_eq!(local_oscillation(&a, &[2.0], 1.0, &c).unwrap(), 1.0, epsilon = 1e-12);
        let h = registry::hinge_power(1.0, 1, &c).unwrap();
        assert_abs_diff_eq!(local_oscillation(&h, &[1.0], 1.0, &c).unwrap(), 3.0, epsilon = 1e-12);
    }
}
