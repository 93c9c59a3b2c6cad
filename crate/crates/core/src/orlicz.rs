//! Luxemburg and Orlicz pseudo-norms of vector fields over discrete
//! probability spaces, the duality sandwich, perturbation families, and
//! mixture/convolution concavity of the Luxemburg functional.

use std::collections::BTreeMap;

use rand::Rng;

use crate::config::SearchConfig;
use crate::convex_core::golden_max;
use crate::error::Error;
use crate::extreal::ExtReal;
use crate::linalg::{dot, kahan_sum, norm2, scaled};
use crate::oracle::ConvexOracle;
use crate::rng::{rng_for, Salt};
use crate::subgrad::gradient_selection;
use crate::Result;

/// Finitely many atoms with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProbabilitySpace {
    weights: Vec<f64>,
}

impl DiscreteProbabilitySpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("space needs at least one atom".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        let total = kahan_sum(weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(DiscreteProbabilitySpace { weights })
    }

    pub fn uniform(atoms: usize) -> Self {
        DiscreteProbabilitySpace {
            weights: vec![1.0 / atoms as f64; atoms],
        }
    }

    /// Positive weights normalised to sum one.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() || raw.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        let total: f64 = kahan_sum(raw.iter().copied());
        DiscreteProbabilitySpace::new(raw.into_iter().map(|w| w / total).collect())
            .or_else(|_| {
                Err(Error::InvalidInput("normalisation failed".into()))
            })
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Convex mixture `sum t_i lambda_i` of spaces over the same atoms.
    pub fn mixture(spaces: &[&DiscreteProbabilitySpace], t: &[f64]) -> Result<Self> {
        if spaces.is_empty() || spaces.len() != t.len() {
            return Err(Error::InvalidInput("mixture needs matching weights".into()));
        }
        let atoms = spaces[0].atom_count();
        for sp in spaces {
            if sp.atom_count() != atoms {
                return Err(Error::AtomMismatch(format!(
                    "expected {atoms} atoms, got {}",
                    sp.atom_count()
                )));
            }
        }
        if t.iter().any(|ti| *ti < 0.0) || (kahan_sum(t.iter().copied()) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(
                "mixture weights must be non-negative and sum to 1".into(),
            ));
        }
        let weights: Vec<f64> = (0..atoms)
            .map(|i| kahan_sum(spaces.iter().zip(t).map(|(sp, ti)| ti * sp.weights[i])))
            .collect();
        // zero-weight atoms can appear when some t_i = 0; drop is wrong, keep
        // a floor consistent with the positivity invariant
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidInput(
                "mixture produced a non-positive atom weight".into(),
            ));
        }
        DiscreteProbabilitySpace::new(weights)
    }
}

/// An `R^n`-valued function on the atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    dim: usize,
    values: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(dim: usize, values: Vec<Vec<f64>>) -> Result<Self> {
        for v in &values {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("field entries must be finite".into()));
            }
        }
        Ok(VectorField { dim, values })
    }

    pub fn zeros(dim: usize, atoms: usize) -> Self {
        VectorField {
            dim,
            values: vec![vec![0.0; dim]; atoms],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atom_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn scale(&self, alpha: f64) -> VectorField {
        VectorField {
            dim: self.dim,
            values: self.values.iter().map(|v| scaled(v, alpha)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if self.dim != other.dim || self.values.len() != other.values.len() {
            return Err(Error::AtomMismatch("field shapes differ".into()));
        }
        Ok(VectorField {
            dim: self.dim,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| crate::linalg::add(a, b))
                .collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|x| *x == 0.0))
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(norm2(v)))
    }

    /// Seeded random field with entries in `[-scale, scale]`.
    pub fn random(dim: usize, atoms: usize, scale: f64, seed: u64) -> VectorField {
        let mut rng = rng_for(seed, Salt::NormProbe);
        VectorField {
            dim,
            values: (0..atoms)
                .map(|_| (0..dim).map(|_| rng.gen_range(-scale..scale)).collect())
                .collect(),
        }
    }
}

fn check_pairing(f: &ConvexOracle, sp: &DiscreteProbabilitySpace, u: &VectorField) -> Result<()> {
    if f.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: u.dim(),
        });
    }
    if sp.atom_count() != u.atom_count() {
        return Err(Error::AtomMismatch(format!(
            "space has {} atoms, field has {}",
            sp.atom_count(),
            u.atom_count()
        )));
    }
    Ok(())
}

/// `G(r) = sum_i lambda_i L(u_i / r)`, the Luxemburg modular at scale `r`.
pub fn modular(
    f: &ConvexOracle,
    sp: &DiscreteProbabilitySpace,
    u: &VectorField,
    r: f64,
) -> ExtReal {
    let mut total = 0.0f64;
    for (w, v) in sp.weights().iter().zip(u.values()) {
        let val = f.eval(&scaled(v, 1.0 / r));
        match val.as_finite() {
            Some(x) => total += w * x,
            None => return ExtReal::INFINITY,
        }
    }
    ExtReal::from_value(total)
}

/// Luxemburg pseudo-norm `inf { r > 0 : sum_i lambda_i L(u_i/r) <= 1 }`.
///
/// `G` is non-increasing in `r` (radial monotonicity of convex `L` with
/// `L(0) = 0`), so the crossing is bracketed by doubling/halving from
/// `r = 1` and then bisected to relative width `bisect_rel_width`. Returns
/// `0` iff the field vanishes, `+inf` iff the modular exceeds one all the
/// way up to the bracket ceiling (possible only for extended-valued `L`).
pub fn luxemburg_norm(
    f: &ConvexOracle,
    sp: &DiscreteProbabilitySpace,
    u: &VectorField,
) -> Result<ExtReal> {
    check_pairing(f, sp, u)?;
    if u.is_zero() {
        return Ok(ExtReal::ZERO);
    }
    let scale = 1.0 + u.max_norm();
    let ceiling = 2f64.powi(60) * scale;
    let floor = 2f64.powi(-60) * scale;

    let feasible = |r: f64| modular(f, sp, u, r) <= 1.0;

    let mut hi = 1.0f64;
    while !feasible(hi) {
        hi *= 2.0;
        if hi > ceiling {
            return Ok(ExtReal::INFINITY);
        }
    }
    let mut lo = hi * 0.5;
    while feasible(lo) {
        hi = lo;
        lo *= 0.5;
        if lo < floor {
            // only reachable through rounding; the infimum is at the floor
            return Ok(ExtReal::from_value(hi));
        }
    }
    // invariant: G(lo) > 1 >= G(hi)
    let width = |lo: f64, hi: f64| (hi - lo) / hi;
    while width(lo, hi) > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ExtReal::from_value(hi))
}

/// Two-sided bracket of the Orlicz pseudo-norm together with the dual
/// witness that produced the lower end.
#[derive(Debug, Clone)]
pub struct NormResult {
    pub luxemburg: ExtReal,
    /// Value of a feasible dual witness: a true lower bound of the supremum.
    pub orlicz_lower: f64,
    /// Scale-relaxed value `inf_mu mu (1 + sum lambda_i L(u_i/mu))`: a true
    /// upper bound of the supremum.
    pub orlicz_upper: f64,
    pub witness_v: VectorField,
    /// `orlicz_upper - orlicz_lower`.
    pub gap: f64,
}

/// Brackets the Orlicz pseudo-norm
/// `sup { sum lambda_i <u_i, v_i> : sum lambda_i L*(v_i) <= 1 }`.
///
/// Upper end: golden-section over `log mu` of the convex scale relaxation.
/// Lower end: the subgradient selection `v_i in dL(u_i / |u|_Lux)` gives the
/// witness direction, and the witness is rescaled to saturate the dual
/// constraint (`t v` stays feasible for every `t <= 1/|v|_{L*}`).
pub fn orlicz_norm(
    f: &ConvexOracle,
    sp: &DiscreteProbabilitySpace,
    u: &VectorField,
    cfg: &SearchConfig,
) -> Result<NormResult> {
    check_pairing(f, sp, u)?;
    if u.is_zero() {
        return Ok(NormResult {
            luxemburg: ExtReal::ZERO,
            orlicz_lower: 0.0,
            orlicz_upper: 0.0,
            witness_v: VectorField::zeros(u.dim(), u.atom_count()),
            gap: 0.0,
        });
    }
    let lux = luxemburg_norm(f, sp, u)?;
    let Some(s) = lux.as_finite() else {
        return Ok(NormResult {
            luxemburg: lux,
            orlicz_lower: f64::INFINITY,
            orlicz_upper: f64::INFINITY,
            witness_v: VectorField::zeros(u.dim(), u.atom_count()),
            gap: 0.0,
        });
    };

    // upper bracket: A(mu) = mu (1 + G(mu)) is convex in mu; A(s) = 2s caps it
    let amemiya = |e: f64| -> f64 {
        let mu = e.exp();
        match modular(f, sp, u, mu).as_finite() {
            Some(g) => mu * (1.0 + g),
            None => f64::INFINITY,
        }
    };
    let centre = s.ln();
    let mut lo_e = centre - 2.0;
    let mut hi_e = centre + 2.0;
    for _ in 0..40 {
        if amemiya(lo_e) > amemiya(lo_e + 0.5) || lo_e < centre - 46.0 {
            break;
        }
        lo_e -= 2.0;
    }
    for _ in 0..40 {
        if amemiya(hi_e) > amemiya(hi_e - 0.5) {
            break;
        }
        hi_e += 2.0;
    }
    let (_, neg_best) = golden_max(|e| -amemiya(e), lo_e, hi_e, 1e-12);
    let upper = (-neg_best).min(2.0 * s);

    // lower bracket: measurable selection at the normalised field
    let dim = u.dim();
    let mut witness_dir = Vec::with_capacity(u.atom_count());
    for v in u.values() {
        if v.iter().all(|x| *x == 0.0) {
            witness_dir.push(vec![0.0; dim]);
        } else {
            witness_dir.push(gradient_selection(f, &scaled(v, 1.0 / s), cfg)?);
        }
    }
    let witness = VectorField::new(dim, witness_dir)?;
    let base = kahan_sum(
        sp.weights()
            .iter()
            .zip(u.values())
            .zip(witness.values())
            .map(|((w, ui), vi)| w * dot(ui, vi)),
    );
    let (lower, scaled_witness) = if base <= 0.0 || witness.is_zero() {
        (0.0, witness.clone())
    } else {
        let conj = f.conjugate_oracle(cfg);
        let vnorm = luxemburg_norm(&conj, sp, &witness)?;
        match vnorm.as_finite() {
            Some(nv) if nv > 0.0 => {
                let t = 1.0 / nv;
                (t * base, witness.scale(t))
            }
            _ => (0.0, witness.clone()),
        }
    };

    Ok(NormResult {
        luxemburg: lux,
        orlicz_lower: lower,
        orlicz_upper: upper,
        witness_v: scaled_witness,
        gap: upper - lower,
    })
}

/// Outcome of the generalised Hoelder inequality
/// `sum lambda <u, v>^+ <= 2 |u|_Lux |v|_{Lux(L*)}`.
#[derive(Debug, Clone)]
pub struct HolderReport {
    pub lhs: f64,
    pub norm_u: ExtReal,
    pub norm_v_dual: ExtReal,
    pub rhs: ExtReal,
    /// `rhs - lhs` when finite.
    pub slack: f64,
    pub ok: bool,
}

pub fn holder_check(
    f: &ConvexOracle,
    sp: &DiscreteProbabilitySpace,
    u: &VectorField,
    v: &VectorField,
    cfg: &SearchConfig,
) -> Result<HolderReport> {
    check_pairing(f, sp, u)?;
    check_pairing(f, sp, v)?;
    let lhs = kahan_sum(
        sp.weights()
            .iter()
            .zip(u.values())
            .zip(v.values())
            .map(|((w, ui), vi)| w * dot(ui, vi).max(0.0)),
    );
    let norm_u = luxemburg_norm(f, sp, u)?;
    let conj = f.conjugate_oracle(cfg);
    let norm_v = luxemburg_norm(&conj, sp, v)?;
    if norm_u == ExtReal::ZERO || norm_v == ExtReal::ZERO {
        // a vanishing norm forces a vanishing field, hence lhs = 0
        let ok = lhs.abs() <= 1e-12;
        return Ok(HolderReport {
            lhs,
            norm_u,
            norm_v_dual: norm_v,
            rhs: ExtReal::ZERO,
            slack: -lhs,
            ok,
        });
    }
    let rhs = match (norm_u.as_finite(), norm_v.as_finite()) {
        (Some(a), Some(b)) => ExtReal::from_value(2.0 * a * b),
        _ => ExtReal::INFINITY,
    };
    let (slack, ok) = match rhs.as_finite() {
        Some(r) => (r - lhs, lhs <= r + 1e-8 * (1.0 + r)),
        None => (f64::INFINITY, true),
    };
    Ok(HolderReport {
        lhs,
        norm_u,
        norm_v_dual: norm_v,
        rhs,
        slack,
        ok,
    })
}

/// Sandwich `|u|_Lux <= lower <= upper <= 2 |u|_Lux` plus the attainment
/// identity of the Luxemburg modular.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub norms: NormResult,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `sum lambda_i L(u_i / |u|)`, when the norm is finite positive.
    pub attainment_integral: Option<f64>,
    pub attainment_ok: bool,
}

impl SandwichReport {
    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.attainment_ok
    }
}

pub fn sandwich_check(
    f: &ConvexOracle,
    sp: &DiscreteProbabilitySpace,
    u: &VectorField,
    cfg: &SearchConfig,
) -> Result<SandwichReport> {
    if !f.finite_everywhere() {
        return Err(Error::InvalidInput(
            "sandwich requires an everywhere-finite function".into(),
        ));
    }
    let norms = orlicz_norm(f, sp, u, cfg)?;
    let tol = 1e-7;
    let (lower_ok, upper_ok) = match norms.luxemburg.as_finite() {
        Some(s) => (
            s <= norms.orlicz_lower + tol * (1.0 + s),
            norms.orlicz_upper <= 2.0 * s + tol * (1.0 + s),
        ),
        None => (true, true),
    };
    let (attainment_integral, attainment_ok) = match norms.luxemburg.as_finite() {
        Some(s) if s > 0.0 => {
            let g = modular(f, sp, u, s).value();
            (Some(g), (g - 1.0).abs() <= 1e-8)
        }
        _ => (None, true),
    };
    Ok(SandwichReport {
        norms,
        lower_ok,
        upper_ok,
        attainment_integral,
        attainment_ok,
    })
}

/// The perturbed function `L + eps L0`. Requires `eps > 0` and a
/// super-linearly growing `L0` (probed along rays).
pub fn perturb(
    f: &ConvexOracle,
    f0: &ConvexOracle,
    eps: f64,
    cfg: &SearchConfig,
) -> Result<ConvexOracle> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    let n = f0.dim();
    let mut rng = rng_for(cfg.seed, Salt::OracleProbe);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        dirs.push(e.clone());
        e[i] = -1.0;
        dirs.push(e);
    }
    dirs.push(crate::sphere::random_direction(n, &mut rng));
    for d in &dirs {
        let slope_lo = f0.eval(d).value();
        let hi = 2f64.powi(20);
        let slope_hi = match f0.eval(&scaled(d, hi)).as_finite() {
            Some(v) => v / hi,
            None => f64::INFINITY,
        };
        if !(slope_hi > 100.0 * slope_lo.max(1e-12)) {
            return Err(Error::InvalidInput(format!(
                "perturbation base {} is not super-linear along {d:?}",
                f0.name()
            )));
        }
    }
    f.sum_with(f0, eps)
}

/// Sweep of Luxemburg norms under the perturbation family `L + eps L0`.
#[derive(Debug, Clone)]
pub struct PerturbationSweepReport {
    pub eps_grid: Vec<f64>,
    /// `|u|` under `L_eps`, in the order of `eps_grid`.
    pub primal_norms: Vec<f64>,
    /// `|u|` under `(L_eps)*`.
    pub dual_norms: Vec<f64>,
    pub base_primal: f64,
    pub base_dual: f64,
    /// Pointwise checks `L <= L_eps` decreasing and `L*_eps <= L*` increasing.
    pub pointwise_ok: bool,
    pub primal_monotone: bool,
    pub dual_monotone: bool,
    pub primal_terminal_gap: f64,
    pub dual_terminal_gap: f64,
    pub violations: Vec<String>,
}

impl PerturbationSweepReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies the perturbation monotonicity claims on a decreasing `eps` grid:
/// values and primal norms decrease to their unperturbed limits, conjugate
/// values and dual norms increase to theirs.
pub fn perturbation_sweep(
    f: &ConvexOracle,
    f0: &ConvexOracle,
    sp: &DiscreteProbabilitySpace,
    u: &VectorField,
    eps_grid: &[f64],
    cfg: &SearchConfig,
) -> Result<PerturbationSweepReport> {
    if eps_grid.is_empty() || eps_grid.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidInput(
            "eps grid must be strictly decreasing".into(),
        ));
    }
    let mut violations = Vec::new();
    let mut rng = rng_for(cfg.seed, Salt::NormProbe);
    let probes: Vec<Vec<f64>> = (0..6)
        .map(|_| (0..f.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();

    let base_primal = luxemburg_norm(f, sp, u)?.value();
    let base_conj = f.conjugate_oracle(cfg);
    let base_dual = luxemburg_norm(&base_conj, sp, u)?.value();

    let mut primal_norms = Vec::new();
    let mut dual_norms = Vec::new();
    let mut prev_values: Option<Vec<f64>> = None;
    let mut prev_conj_values: Option<Vec<f64>> = None;
    let mut pointwise_ok = true;

    for &eps in eps_grid {
        let f_eps = perturb(f, f0, eps, cfg)?;
        let conj_eps = f_eps.conjugate_oracle(cfg);

        let values: Vec<f64> = probes.iter().map(|x| f_eps.eval(x).value()).collect();
        let conj_values: Vec<f64> = probes
            .iter()
            .map(|x| conj_eps.eval(x).value())
            .collect();
        for (i, x) in probes.iter().enumerate() {
            let base = f.eval(x).value();
            if values[i] < base - 1e-9 * (1.0 + base) {
                pointwise_ok = false;
                violations.push(format!("L_eps({x:?}) < L at eps={eps}"));
            }
            let base_star = base_conj.eval(x).value();
            if conj_values[i] > base_star + 1e-6 * (1.0 + base_star.abs()) {
                pointwise_ok = false;
                violations.push(format!("L*_eps({x:?}) > L* at eps={eps}"));
            }
            if let Some(prev) = &prev_values {
                if values[i] > prev[i] + 1e-9 * (1.0 + prev[i].abs()) {
                    pointwise_ok = false;
                    violations.push(format!("L_eps({x:?}) increased as eps fell"));
                }
            }
            if let Some(prev) = &prev_conj_values {
                if conj_values[i] < prev[i] - 1e-6 * (1.0 + prev[i].abs()) {
                    pointwise_ok = false;
                    violations.push(format!("L*_eps({x:?}) decreased as eps fell"));
                }
            }
        }
        prev_values = Some(values);
        prev_conj_values = Some(conj_values);

        primal_norms.push(luxemburg_norm(&f_eps, sp, u)?.value());
        dual_norms.push(luxemburg_norm(&conj_eps, sp, u)?.value());
    }

    let mono_tol = 1e-9;
    let primal_monotone = primal_norms.windows(2).all(|w| w[1] <= w[0] + mono_tol * (1.0 + w[0]))
        && primal_norms
            .iter()
            .all(|v| *v >= base_primal - mono_tol * (1.0 + base_primal));
    if !primal_monotone {
        violations.push("primal norms not decreasing to the base norm".into());
    }
    let dual_monotone = dual_norms.windows(2).all(|w| w[1] >= w[0] - 1e-6 * (1.0 + w[0].abs()))
        && dual_norms
            .iter()
            .all(|v| *v <= base_dual + 1e-6 * (1.0 + base_dual.abs()));
    if !dual_monotone {
        violations.push("dual norms not increasing to the base norm".into());
    }
    let primal_terminal_gap = (primal_norms.last().unwrap() - base_primal).abs();
    let dual_terminal_gap = if base_dual.is_finite() {
        (dual_norms.last().unwrap() - base_dual).abs()
    } else {
        f64::INFINITY
    };

    Ok(PerturbationSweepReport {
        eps_grid: eps_grid.to_vec(),
        primal_norms,
        dual_norms,
        base_primal,
        base_dual,
        pointwise_ok,
        primal_monotone,
        dual_monotone,
        primal_terminal_gap,
        dual_terminal_gap,
        violations,
    })
}

/// Mixture-concavity outcome for the Luxemburg functional
/// `S(lambda) = |u|_{Lux(lambda)}`.
#[derive(Debug, Clone)]
pub struct MixtureReport {
    pub component_norms: Vec<f64>,
    pub mixture_norm: f64,
    /// `S(mix) - min_i S_i` (quasi-concavity slack).
    pub quasi_slack: f64,
    /// `S(mix) - sum t_i S_i` for homogeneous functions.
    pub concavity_slack: Option<f64>,
    /// `S(mix) - gamma(p+, p-) sum t_i S_i` otherwise.
    pub gamma_slack: Option<f64>,
    pub gamma_used: Option<f64>,
    pub exponents: Option<(f64, f64)>,
    pub ok: bool,
}

pub fn mixture_concavity_check(
    f: &ConvexOracle,
    u: &VectorField,
    spaces: &[&DiscreteProbabilitySpace],
    t: &[f64],
    cfg: &SearchConfig,
) -> Result<MixtureReport> {
    let mix = DiscreteProbabilitySpace::mixture(spaces, t)?;
    let mut component_norms = Vec::with_capacity(spaces.len());
    for sp in spaces {
        component_norms.push(luxemburg_norm(f, sp, u)?.value());
    }
    let mixture_norm = luxemburg_norm(f, &mix, u)?.value();
    let min_comp = component_norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = 1.0 + mixture_norm.abs();
    let tol = 1e-8 * scale;
    let quasi_slack = mixture_norm - min_comp;
    let weighted: f64 = kahan_sum(
        component_norms
            .iter()
            .zip(t)
            .map(|(s, ti)| ti * s),
    );

    let mut ok = quasi_slack >= -tol;
    let (concavity_slack, gamma_slack, gamma_used, exponents) =
        if f.homogeneity_order().is_some() {
            let slack = mixture_norm - weighted;
            ok = ok && slack >= -tol;
            (Some(slack), None, None, None)
        } else {
            let (pm, pp) = crate::delta2::growth_exponents(f, cfg)?;
            let g = crate::delta2::gamma(pp.max(pm), pm.min(pp).max(1.0))?;
            let slack = mixture_norm - g * weighted;
            ok = ok && slack >= -tol;
            (None, Some(slack), Some(g), Some((pm, pp)))
        };

    Ok(MixtureReport {
        component_norms,
        mixture_norm,
        quasi_slack,
        concavity_slack,
        gamma_slack,
        gamma_used,
        exponents,
        ok,
    })
}

/// A finitely supported probability measure on an integer grid in `Z^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    atoms: BTreeMap<Vec<i64>, f64>,
}

impl GridMeasure {
    pub fn new(atoms: Vec<(Vec<i64>, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("measure needs atoms".into()));
        }
        let m = atoms[0].0.len();
        let mut map = BTreeMap::new();
        for (coord, w) in atoms {
            if coord.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: coord.len(),
                });
            }
            if !(w > 0.0) {
                return Err(Error::InvalidInput("weights must be positive".into()));
            }
            *map.entry(coord).or_insert(0.0) += w;
        }
        let total = kahan_sum(map.values().copied());
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "measure weights sum to {total}"
            )));
        }
        Ok(GridMeasure { atoms: map })
    }

    pub fn dirac(coord: Vec<i64>) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(coord, 1.0);
        GridMeasure { atoms }
    }

    pub fn atoms(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.atoms
    }

    /// Pushforward of the product measure under addition; duplicate atoms
    /// coalesce by exact integer-coordinate match.
    pub fn convolve(&self, other: &GridMeasure) -> GridMeasure {
        let mut atoms: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (x, wx) in &self.atoms {
            for (y, wy) in &other.atoms {
                let z: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                *atoms.entry(z).or_insert(0.0) += wx * wy;
            }
        }
        GridMeasure { atoms }
    }
}

/// Field values indexed by grid points.
#[derive(Debug, Clone)]
pub struct GridField {
    pub dim: usize,
    pub values: BTreeMap<Vec<i64>, Vec<f64>>,
}

impl GridField {
    pub fn get(&self, coord: &[i64]) -> Result<&Vec<f64>> {
        self.values
            .get(coord)
            .ok_or_else(|| Error::SupportNotCovered(format!("{coord:?}")))
    }
}

/// Convolution-concavity outcome: the Luxemburg norm under `lambda * kappa`
/// dominates the `kappa`-average of shifted norms for homogeneous `L`.
#[derive(Debug, Clone)]
pub struct ConvolutionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
}

pub fn convolution_check(
    f: &ConvexOracle,
    u: &GridField,
    lam: &GridMeasure,
    kap: &GridMeasure,
    cfg: &SearchConfig,
) -> Result<ConvolutionReport> {
    let Some(p) = f.homogeneity_order() else {
        return Err(Error::InvalidInput(
            "convolution concavity requires a homogeneous function".into(),
        ));
    };
    if p < 1.0 {
        return Err(Error::InvalidInput(format!(
            "homogeneity order must be >= 1, got {p}"
        )));
    }
    let _ = cfg;

    let conv = lam.convolve(kap);
    let lhs = grid_luxemburg(f, &conv, u, &[])?;

    let mut rhs = 0.0;
    for (y, wy) in kap.atoms() {
        let shifted = grid_luxemburg(f, lam, u, y)?;
        rhs += wy * shifted;
    }
    let slack = lhs - rhs;
    Ok(ConvolutionReport {
        lhs,
        rhs,
        slack,
        ok: slack >= -1e-8 * (1.0 + rhs.abs()),
    })
}

/// Luxemburg norm of `x -> u(x + shift)` under a grid measure.
fn grid_luxemburg(
    f: &ConvexOracle,
    measure: &GridMeasure,
    u: &GridField,
    shift: &[i64],
) -> Result<f64> {
    let mut weights = Vec::with_capacity(measure.atoms().len());
    let mut values = Vec::with_capacity(measure.atoms().len());
    for (coord, w) in measure.atoms() {
        let looked_up: Vec<i64> = if shift.is_empty() {
            coord.clone()
        } else {
            coord.iter().zip(shift).map(|(a, b)| a + b).collect()
        };
        values.push(u.get(&looked_up)?.clone());
        weights.push(*w);
    }
    let total = kahan_sum(weights.iter().copied());
    let sp = DiscreteProbabilitySpace::new(weights.iter().map(|w| w / total).collect())?;
    let field = VectorField::new(u.dim, values)?;
    Ok(luxemburg_norm(f, &sp, &field)?.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SearchConfig {
        SearchConfig::with_seed(31)
    }

    #[test]
    fn space_invariants() {
        assert!(DiscreteProbabilitySpace::new(vec![0.5, 0.5]).is_ok());
        assert!(DiscreteProbabilitySpace::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteProbabilitySpace::new(vec![1.5, -0.5]).is_err());
        let sp = DiscreteProbabilitySpace::normalized(vec![2.0, 6.0]).unwrap();
        assert_abs_diff_eq!(sp.weights()[0], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn luxemburg_of_square_is_weighted_l2() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(2);
        let u = VectorField::new(1, vec![vec![3.0], vec![4.0]]).unwrap();
        let norm = luxemburg_norm(&f, &sp, &u).unwrap();
        assert_abs_diff_eq!(norm.value(), 12.5f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn luxemburg_zero_iff_zero_field() {
        let c = cfg();
        let f = registry::power(2.0, 2, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(3);
        let zero = VectorField::zeros(2, 3);
        assert_eq!(luxemburg_norm(&f, &sp, &zero).unwrap(), ExtReal::ZERO);
        let tiny = VectorField::new(2, vec![vec![0.0; 2], vec![1e-9, 0.0], vec![0.0; 2]]).unwrap();
        assert!(luxemburg_norm(&f, &sp, &tiny).unwrap().value() > 0.0);
    }

    #[test]
    fn luxemburg_is_positively_homogeneous() {
        let c = cfg();
        let f = registry::plog(2.0, 2, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(4);
        let u = VectorField::random(2, 4, 2.0, 7);
        let n1 = luxemburg_norm(&f, &sp, &u).unwrap().value();
        let n2 = luxemburg_norm(&f, &sp, &u.scale(2.0)).unwrap().value();
        assert_abs_diff_eq!(n2, 2.0 * n1, epsilon = 1e-8 * n1);
    }

    #[test]
    fn attainment_identity_holds() {
        let c = cfg();
        let f = registry::hinge_power(2.0, 2, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(5);
        let u = VectorField::random(2, 5, 3.0, 11);
        let norm = luxemburg_norm(&f, &sp, &u).unwrap().value();
        let g = modular(&f, &sp, &u, norm).value();
        assert_abs_diff_eq!(g, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn orlicz_ratio_is_two_for_squares() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(4);
        let u = VectorField::random(1, 4, 2.0, 3);
        let res = orlicz_norm(&f, &sp, &u, &c).unwrap();
        let s = res.luxemburg.value();
        assert_abs_diff_eq!(res.orlicz_lower, 2.0 * s, epsilon = 2e-3 * s);
        assert_abs_diff_eq!(res.orlicz_upper, 2.0 * s, epsilon = 2e-3 * s);
        assert!(res.gap >= -1e-10);
    }

    #[test]
    fn orlicz_ratio_matches_power_constant_p3() {
        let c = cfg();
        let f = registry::power(3.0, 1, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(8);
        let u = VectorField::random(1, 8, 1.5, 5);
        let res = orlicz_norm(&f, &sp, &u, &c).unwrap();
        let s = res.luxemburg.value();
        let q: f64 = 1.5;
        let constant = 3f64.powf(1.0 / 3.0) * q.powf(1.0 / q);
        assert_abs_diff_eq!(res.orlicz_lower / s, constant, epsilon = 1e-3 * constant);
        assert_abs_diff_eq!(res.orlicz_upper / s, constant, epsilon = 1e-3 * constant);
    }

    #[test]
    fn orlicz_of_zero_field() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(2);
        let res = orlicz_norm(&f, &sp, &VectorField::zeros(1, 2), &c).unwrap();
        assert_eq!(res.luxemburg, ExtReal::ZERO);
        assert_eq!(res.orlicz_lower, 0.0);
        assert_eq!(res.orlicz_upper, 0.0);
    }

    #[test]
    fn holder_examples() {
        let c = cfg();
        let f = registry::quadratic(2, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(4);
        let u = VectorField::random(2, 4, 2.0, 13);
        let rep = holder_check(&f, &sp, &u, &u, &c).unwrap();
        assert!(rep.ok, "{rep:?}");

        let zero = VectorField::zeros(2, 4);
        let rep = holder_check(&f, &sp, &zero, &u, &c).unwrap();
        assert!(rep.ok);

        let f3 = registry::power(3.0, 2, &c).unwrap();
        let v = VectorField::random(2, 4, 3.0, 17);
        let rep = holder_check(&f3, &sp, &u, &v, &c).unwrap();
        assert!(rep.ok && rep.slack >= 0.0, "{rep:?}");
    }

    #[test]
    fn holder_with_vanishing_conjugate() {
        // L = |x| hinge with p = 1: L* vanishes near zero; the dual-norm
        // bisection must still terminate
        let c = cfg();
        let f = registry::hinge_power(1.0, 1, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(3);
        let u = VectorField::random(1, 3, 2.0, 19);
        let v = VectorField::random(1, 3, 0.4, 23);
        let rep = holder_check(&f, &sp, &u, &v, &c).unwrap();
        assert!(rep.ok, "{rep:?}");
        assert!(rep.norm_v_dual.is_finite());
    }

    #[test]
    fn sandwich_examples() {
        let c = cfg();
        for f in [
            registry::power(1.5, 1, &c).unwrap(),
            registry::power(2.0, 3, &c).unwrap(),
            registry::plog(2.0, 2, &c).unwrap(),
        ] {
            let sp = DiscreteProbabilitySpace::uniform(6);
            let u = VectorField::random(f.dim(), 6, 2.0, 29);
            let rep = sandwich_check(&f, &sp, &u, &c).unwrap();
            assert!(rep.ok(), "{} failed: {rep:?}", f.name());
            let s = rep.norms.luxemburg.value();
            assert!(rep.norms.orlicz_upper <= 2.0 * s * (1.0 + 1e-9));
        }
    }

    #[test]
    fn sandwich_ratio_for_p15() {
        let c = cfg();
        let f = registry::power(1.5, 1, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(6);
        let u = VectorField::random(1, 6, 2.0, 31);
        let rep = sandwich_check(&f, &sp, &u, &c).unwrap();
        let s = rep.norms.luxemburg.value();
        let q: f64 = 3.0;
        let constant = 1.5f64.powf(1.0 / 1.5) * q.powf(1.0 / q);
        assert_abs_diff_eq!(rep.norms.orlicz_upper / s, constant, epsilon = 1e-3 * constant);
    }

    #[test]
    fn perturb_examples() {
        let c = cfg();
        let abs = registry::power(1.0, 1, &c).unwrap();
        let quad = registry::quadratic(1, &c).unwrap();
        let sum = perturb(&abs, &quad, 1.0, &c).unwrap();
        assert_abs_diff_eq!(sum.eval(&[2.0]).value(), 4.0, epsilon = 1e-12);
        assert!(perturb(&abs, &quad, 0.0, &c).is_err());
        // like terms: |x|^2 + 2 * |x|^2/2 = 2 |x|^2
        let sq = registry::power(2.0, 1, &c).unwrap();
        let doubled = perturb(&sq, &quad, 2.0, &c).unwrap();
        assert_abs_diff_eq!(doubled.eval(&[3.0]).value(), 18.0, epsilon = 1e-12);
        // |x| is not super-linear, so it cannot be a perturbation base
        assert!(perturb(&sq, &abs, 0.5, &c).is_err());
    }

    #[test]
    fn perturbation_sweep_scaling_oracle() {
        // L = |x|^2, L0 = |x|^2/2: L_eps = (1 + eps/2) L, so the norm scales
        // by sqrt(1 + eps/2) exactly
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let f0 = registry::quadratic(1, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(4);
        let u = VectorField::random(1, 4, 2.0, 37);
        let base = luxemburg_norm(&f, &sp, &u).unwrap().value();
        for eps in [0.5, 0.1, 0.01] {
            let f_eps = perturb(&f, &f0, eps, &c).unwrap();
            let n = luxemburg_norm(&f_eps, &sp, &u).unwrap().value();
            assert_abs_diff_eq!(n, base * (1.0 + eps / 2.0).sqrt(), epsilon = 1e-8 * base);
        }
    }

    #[test]
    fn mixture_concavity_for_squares() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let u = VectorField::random(1, 4, 2.0, 41);
        let s1 = DiscreteProbabilitySpace::normalized(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let s2 = DiscreteProbabilitySpace::normalized(vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        let rep =
            mixture_concavity_check(&f, &u, &[&s1, &s2], &[0.5, 0.5], &c).unwrap();
        assert!(rep.ok, "{rep:?}");
        // identical mixture: equality
        let rep = mixture_concavity_check(&f, &u, &[&s1, &s1], &[0.5, 0.5], &c).unwrap();
        assert_abs_diff_eq!(rep.concavity_slack.unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn convolution_with_dirac_is_identity() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let lam = GridMeasure::new(vec![
            (vec![0], 0.25),
            (vec![1], 0.5),
            (vec![2], 0.25),
        ])
        .unwrap();
        let kap = GridMeasure::dirac(vec![0]);
        let mut values = BTreeMap::new();
        for k in -2..=4i64 {
            values.insert(vec![k], vec![(k as f64) * 0.7 - 0.3]);
        }
        let u = GridField { dim: 1, values };
        let rep = convolution_check(&f, &u, &lam, &kap, &c).unwrap();
        assert_abs_diff_eq!(rep.lhs, rep.rhs, epsilon = 1e-10 * (1.0 + rep.rhs));
        assert!(rep.ok);
    }

    #[test]
    fn convolution_missing_support_errors() {
        let c = cfg();
        let f = registry::power(2.0, 1, &c).unwrap();
        let lam = GridMeasure::new(vec![(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        let kap = GridMeasure::new(vec![(vec![0], 0.5), (vec![5], 0.5)]).unwrap();
        let mut values = BTreeMap::new();
        for k in 0..=1i64 {
            values.insert(vec![k], vec![1.0]);
        }
        let u = GridField { dim: 1, values };
        assert!(matches!(
            convolution_check(&f, &u, &lam, &kap, &c),
            Err(Error::SupportNotCovered(_))
        ));
    }
}
