//! Subdifferential machinery: support-function tables, Hausdorff distance,
//! and the measurable subgradient selections (sphere average, barycenter,
//! mollified) with validity certificates.

use nalgebra::DMatrix;
use rand::Rng;

use crate::config::SearchConfig;
use crate::convex_core::directional_derivative;
use crate::error::Error;
use crate::linalg::{add, axpy, dot, kahan_sum, norm2, scaled, sub};
use crate::oracle::ConvexOracle;
use crate::rng::{rng_for, Salt};
use crate::sphere;
use crate::Result;

/// Support-function sampling of a compact convex set: unit directions
/// `theta_j` and values `h(theta_j)`. The set is contained in the
/// intersection of the halfspaces `{y : <y, theta_j> <= h_j}`.
#[derive(Debug, Clone)]
pub struct SupportApprox {
    dim: usize,
    directions: Vec<Vec<f64>>,
    support_values: Vec<f64>,
}

impl SupportApprox {
    pub fn new(dim: usize, directions: Vec<Vec<f64>>, support_values: Vec<f64>) -> Result<Self> {
        if directions.len() != support_values.len() {
            return Err(Error::InvalidInput(
                "direction/value count mismatch".into(),
            ));
        }
        for d in &directions {
            if d.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: d.len(),
                });
            }
            if (norm2(d) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "direction {d:?} is not unit length"
                )));
            }
        }
        Ok(SupportApprox {
            dim,
            directions,
            support_values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support_values
    }

    /// Width `h(theta) + h(-theta)` per antipodal pair; negative widths mean
    /// the data is inconsistent with any non-empty convex set.
    pub fn antipodal_widths(&self) -> Vec<f64> {
        let half = self.directions.len() / 2;
        (0..half)
            .map(|j| self.support_values[j] + self.support_values[j + half])
            .collect()
    }
}

/// Singleton support table for `{point}` over the same directions.
pub fn singleton_support(point: &[f64], directions: &[Vec<f64>]) -> Result<SupportApprox> {
    let values = directions.iter().map(|d| dot(point, d)).collect();
    SupportApprox::new(point.len(), directions.to_vec(), values)
}

/// `h_{dL(x)}(theta) = L'(x, theta)`: the support function of the
/// subdifferential in direction `theta`.
pub fn support_of_subdifferential(
    f: &ConvexOracle,
    x: &[f64],
    theta: &[f64],
    cfg: &SearchConfig,
) -> Result<f64> {
    directional_derivative(f, x, theta, cfg)
}

/// Samples the support function of `dL(x)` over a deterministic antipodal
/// direction set.
pub fn subdifferential_hull(
    f: &ConvexOracle,
    x: &[f64],
    cfg: &SearchConfig,
) -> Result<SupportApprox> {
    let n = f.dim();
    let mut rng = rng_for(cfg.seed, Salt::HitAndRun);
    let dirs = sphere::directions(n, cfg.hull_directions(n), &mut rng);
    let mut values = Vec::with_capacity(dirs.len());
    for d in &dirs {
        values.push(directional_derivative(f, x, d, cfg)?);
    }
    SupportApprox::new(n, dirs, values)
}

/// `max_j |h1(theta_j) - h2(theta_j)|`: a lower bound of the Hausdorff
/// distance, exact in the limit of dense directions.
pub fn hausdorff_distance(k1: &SupportApprox, k2: &SupportApprox) -> Result<f64> {
    if k1.dim != k2.dim {
        return Err(Error::DimensionMismatch {
            expected: k1.dim,
            got: k2.dim,
        });
    }
    if k1.directions.len() != k2.directions.len() {
        return Err(Error::DirectionSetMismatch);
    }
    for (a, b) in k1.directions.iter().zip(&k2.directions) {
        if a.iter().zip(b).any(|(x, y)| (x - y).abs() > 1e-12) {
            return Err(Error::DirectionSetMismatch);
        }
    }
    Ok(k1
        .support_values
        .iter()
        .zip(&k2.support_values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
}

/// How a candidate subgradient was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMethod {
    Barycenter,
    SphereAverage,
    Mollified,
    Analytic,
}

impl std::fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SelectionMethod::Barycenter => "barycenter",
            SelectionMethod::SphereAverage => "sphere_average",
            SelectionMethod::Mollified => "mollified",
            SelectionMethod::Analytic => "analytic",
        };
        write!(f, "{s}")
    }
}

/// Outcome of probing the subgradient inequality
/// `L(z) >= L(x) + <y, z - x>` at random points.
#[derive(Debug, Clone)]
pub struct SubgradientCertificate {
    pub point: Vec<f64>,
    pub candidate: Vec<f64>,
    pub probe_count: usize,
    /// Minimum over probes of `L(z) - L(x) - <y, z - x>`.
    pub min_slack: f64,
    /// Probe attaining the minimum slack.
    pub worst_probe: Vec<f64>,
    pub method: SelectionMethod,
    /// Scale-aware validity threshold.
    pub tol_slack: f64,
}

impl SubgradientCertificate {
    pub fn is_valid(&self) -> bool {
        self.min_slack >= -self.tol_slack
    }
}

/// Probes the subgradient inequality for `y` at `x` over the certificate
/// distribution: uniform points of `B(x, probe_radius)` plus the `2n` axis
/// points `x +- e_i`.
pub fn certify(
    f: &ConvexOracle,
    x: &[f64],
    y: &[f64],
    method: SelectionMethod,
    cfg: &SearchConfig,
) -> Result<SubgradientCertificate> {
    let n = f.dim();
    let lx = f.eval_finite(x)?;
    let mut rng = rng_for(cfg.seed, Salt::Certificate);
    let mut min_slack = f64::INFINITY;
    let mut worst = x.to_vec();
    let mut count = 0usize;
    let consider = |z: Vec<f64>, min_slack: &mut f64, worst: &mut Vec<f64>| {
        if let Some(lz) = f.eval(&z).as_finite() {
            let slack = lz - lx - dot(y, &sub(&z, x));
            if slack < *min_slack {
                *min_slack = slack;
                *worst = z;
            }
        }
    };
    for i in 0..n {
        for s in [1.0f64, -1.0] {
            let mut z = x.to_vec();
            z[i] += s;
            consider(z, &mut min_slack, &mut worst);
            count += 1;
        }
    }
    for _ in 0..cfg.probe_count {
        let z = sphere::ball_point(x, cfg.probe_radius, &mut rng);
        consider(z, &mut min_slack, &mut worst);
        count += 1;
    }
    Ok(SubgradientCertificate {
        point: x.to_vec(),
        candidate: y.to_vec(),
        probe_count: count,
        min_slack,
        worst_probe: worst,
        method,
        tol_slack: cfg.tol_slack_rel * (1.0 + lx.abs()),
    })
}

/// The spherical selection `y(x) = n * E_sigma[ L'(x, theta) theta ]`.
///
/// Dimension 1 reduces exactly to `(L'(x+) + L'(x-)) / 2`. In higher
/// dimensions the quadrature runs over the deterministic antipodal direction
/// set and is de-biased by the empirical second moment, which makes it exact
/// whenever the support function is linear (singleton subdifferentials).
pub fn sphere_average_subgradient(
    f: &ConvexOracle,
    x: &[f64],
    cfg: &SearchConfig,
) -> Result<(Vec<f64>, SubgradientCertificate)> {
    let y = sphere_average_raw(f, x, cfg.sphere_directions(f.dim()), cfg)?;
    let cert = certify(f, x, &y, SelectionMethod::SphereAverage, cfg)?;
    Ok((y, cert))
}

fn sphere_average_raw(
    f: &ConvexOracle,
    x: &[f64],
    directions: usize,
    cfg: &SearchConfig,
) -> Result<Vec<f64>> {
    let n = f.dim();
    if n == 1 {
        let d_plus = directional_derivative(f, x, &[1.0], cfg)?;
        let d_minus = directional_derivative(f, x, &[-1.0], cfg)?;
        // L'(x-) = -L'(x, -1)
        return Ok(vec![0.5 * (d_plus - d_minus)]);
    }
    let mut rng = rng_for(cfg.seed, Salt::SphereAverage);
    let dirs = sphere::directions(n, directions, &mut rng);
    let m = dirs.len();
    let mut h = Vec::with_capacity(m);
    for d in &dirs {
        h.push(directional_derivative(f, x, d, cfg)?);
    }
    // raw estimate (n / M) * sum h_j theta_j, coordinatewise compensated
    let raw: Vec<f64> = (0..n)
        .map(|i| n as f64 / m as f64 * kahan_sum(dirs.iter().zip(&h).map(|(d, hj)| hj * d[i])))
        .collect();
    // second-moment de-bias: solve A y = raw with A = (n / M) sum theta theta^T
    let mut a = DMatrix::<f64>::zeros(n, n);
    for d in &dirs {
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += d[i] * d[j];
            }
        }
    }
    a.scale_mut(n as f64 / m as f64);
    let rhs = DMatrix::<f64>::from_column_slice(n, 1, &raw);
    let solved = a
        .lu()
        .solve(&rhs)
        .map(|s| s.column(0).iter().copied().collect::<Vec<f64>>())
        .unwrap_or(raw);
    Ok(solved)
}

/// Barycenter of the uniform measure on `dL(x)`.
///
/// The hull's touching points are recovered as gradients of the support
/// function (central differences of `L'(x, .)` in the direction argument);
/// the affine dimension comes from the singular values of the centred cloud.
/// Dimensions 0/1/2 use exact midpoint/polygon centroids, higher dimensions
/// a seeded hit-and-run average over the halfspace intersection.
pub fn barycenter_subgradient(
    f: &ConvexOracle,
    x: &[f64],
    cfg: &SearchConfig,
) -> Result<(Vec<f64>, SubgradientCertificate)> {
    let hull = subdifferential_hull(f, x, cfg)?;
    let y = barycenter_of_support(f, x, &hull, cfg)?;
    let cert = certify(f, x, &y, SelectionMethod::Barycenter, cfg)?;
    Ok((y, cert))
}

fn barycenter_of_support(
    f: &ConvexOracle,
    x: &[f64],
    hull: &SupportApprox,
    cfg: &SearchConfig,
) -> Result<Vec<f64>> {
    let n = hull.dim();
    let h_scale = hull
        .support_values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));

    for w in hull.antipodal_widths() {
        if w < -1e-6 * (1.0 + h_scale) {
            return Err(Error::HullDegenerate { gap: -w });
        }
    }

    if n == 1 {
        // dL(x) = [-h(-1), h(+1)]
        let hi = hull.support_values[0];
        let lo = -hull.support_values[1];
        if lo > hi + 1e-9 * (1.0 + h_scale) {
            return Err(Error::HullDegenerate { gap: lo - hi });
        }
        return Ok(vec![0.5 * (lo + hi)]);
    }

    // Touching points: gradient of the support function in the direction
    // slot. Directions whose finite difference straddles a kink of h mix two
    // faces with inconsistent per-coordinate weights; one-sided slopes
    // disagreeing flags those, and the points are dropped (clean neighbours
    // already carry the extreme points).
    let fd = 1e-3;
    let mut cloud: Vec<Vec<f64>> = Vec::with_capacity(hull.directions.len());
    for (d, &h0) in hull.directions.iter().zip(&hull.support_values) {
        let mut y = vec![0.0; n];
        let mut straddles_kink = false;
        for i in 0..n {
            let mut dp = d.clone();
            let mut dm = d.clone();
            dp[i] += fd;
            dm[i] -= fd;
            let hp = directional_derivative(f, x, &dp, cfg)?;
            let hm = directional_derivative(f, x, &dm, cfg)?;
            let forward = (hp - h0) / fd;
            let backward = (h0 - hm) / fd;
            if (forward - backward).abs() > 0.05 * (1.0 + h0.abs()) {
                straddles_kink = true;
                break;
            }
            y[i] = (hp - hm) / (2.0 * fd);
        }
        if !straddles_kink {
            cloud.push(y);
        }
    }
    if cloud.is_empty() {
        return singleton_from_support(hull);
    }

    let m = cloud.len();
    let center: Vec<f64> = (0..n)
        .map(|i| kahan_sum(cloud.iter().map(|p| p[i])) / m as f64)
        .collect();
    let centred = DMatrix::<f64>::from_fn(m, n, |r, c| cloud[r][c] - center[c]);
    let svd = centred.clone().svd(false, true);
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0) / (m as f64).sqrt();

    let noise_floor = cfg.sv_noise_floor * (1.0 + norm2(&center));
    if sigma_max <= noise_floor {
        // singleton: least-squares fit of the support data is the point
        return singleton_from_support(hull);
    }
    let k = sigma
        .iter()
        .filter(|s| **s > cfg.sv_threshold_rel * sigma[0] && **s / (m as f64).sqrt() > noise_floor)
        .count()
        .min(n);
    let vt = svd.v_t.expect("requested V^T");
    let basis: Vec<Vec<f64>> = (0..k).map(|i| vt.row(i).iter().copied().collect()).collect();

    match k {
        0 => singleton_from_support(hull),
        1 => {
            let axis = &basis[0];
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for p in &cloud {
                let t = dot(&sub(p, &center), axis);
                lo = lo.min(t);
                hi = hi.max(t);
            }
            Ok(axpy(&center, 0.5 * (lo + hi), axis))
        }
        2 => {
            let pts: Vec<[f64; 2]> = cloud
                .iter()
                .map(|p| {
                    let d = sub(p, &center);
                    [dot(&d, &basis[0]), dot(&d, &basis[1])]
                })
                .collect();
            match polygon_centroid(&pts) {
                Some(c2) => {
                    let mut y = center.clone();
                    y = axpy(&y, c2[0], &basis[0]);
                    y = axpy(&y, c2[1], &basis[1]);
                    Ok(y)
                }
                None => {
                    // sliver: treat as a segment along the principal axis
                    let axis = &basis[0];
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for p in &cloud {
                        let t = dot(&sub(p, &center), axis);
                        lo = lo.min(t);
                        hi = hi.max(t);
                    }
                    Ok(axpy(&center, 0.5 * (lo + hi), axis))
                }
            }
        }
        _ => hit_and_run_centroid(hull, &center, &basis, h_scale, cfg),
    }
}

fn singleton_from_support(hull: &SupportApprox) -> Result<Vec<f64>> {
    let n = hull.dim();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, 1);
    for (d, h) in hull.directions.iter().zip(&hull.support_values) {
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += d[i] * d[j];
            }
            b[(i, 0)] += h * d[i];
        }
    }
    a.lu()
        .solve(&b)
        .map(|s| s.column(0).iter().copied().collect())
        .ok_or_else(|| Error::HullDegenerate { gap: f64::NAN })
}

/// Centroid of the convex hull of planar points, `None` for slivers.
fn polygon_centroid(points: &[[f64; 2]]) -> Option<[f64; 2]> {
    let hull = planar_hull(points);
    if hull.len() < 3 {
        return None;
    }
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..hull.len() {
        let [x0, y0] = hull[i];
        let [x1, y1] = hull[(i + 1) % hull.len()];
        let cross = x0 * y1 - x1 * y0;
        area2 += cross;
        cx += (x0 + x1) * cross;
        cy += (y0 + y1) * cross;
    }
    let spread = hull
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0f64, f64::max);
    if area2.abs() < 1e-12 * (1.0 + spread * spread) {
        return None;
    }
    Some([cx / (3.0 * area2), cy / (3.0 * area2)])
}

/// Andrew monotone chain.
fn planar_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn hit_and_run_centroid(
    hull: &SupportApprox,
    center: &[f64],
    basis: &[Vec<f64>],
    h_scale: f64,
    cfg: &SearchConfig,
) -> Result<Vec<f64>> {
    let k = basis.len();
    // reduced constraints <t, a_j> <= b_j
    let mut constraints: Vec<(Vec<f64>, f64)> = Vec::with_capacity(hull.directions.len());
    for (d, h) in hull.directions.iter().zip(&hull.support_values) {
        let a: Vec<f64> = basis.iter().map(|v| dot(v, d)).collect();
        let b = h - dot(center, d);
        if b < -1e-6 * (1.0 + h_scale) {
            return Err(Error::HullDegenerate { gap: -b });
        }
        constraints.push((a, b.max(0.0)));
    }
    let mut rng = rng_for(cfg.seed, Salt::HitAndRun);
    let burn_in = 1000usize;
    let mut t = vec![0.0; k];
    let mut acc = vec![0.0; k];
    let mut kept = 0usize;
    for step in 0..(burn_in + cfg.hitrun_samples) {
        let d = sphere::random_direction(k, &mut rng);
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        for (a, b) in &constraints {
            let ad = dot(a, &d);
            let slack = b - dot(a, &t);
            if ad > 1e-14 {
                t_hi = t_hi.min(slack / ad);
            } else if ad < -1e-14 {
                t_lo = t_lo.max(slack / ad);
            }
        }
        if !(t_lo.is_finite() && t_hi.is_finite()) || t_hi < t_lo - 1e-9 * (1.0 + h_scale) {
            return Err(Error::HullDegenerate { gap: t_lo - t_hi });
        }
        let (lo, hi) = (t_lo.min(t_hi), t_hi.max(t_lo));
        let u: f64 = rng.gen_range(0.0..1.0);
        let step_len = lo + u * (hi - lo);
        for (ti, di) in t.iter_mut().zip(&d) {
            *ti += step_len * di;
        }
        if step >= burn_in {
            for (ai, ti) in acc.iter_mut().zip(&t) {
                *ai += ti;
            }
            kept += 1;
        }
    }
    let mut y = center.to_vec();
    for (coef, v) in acc.iter().zip(basis) {
        y = axpy(&y, coef / kept as f64, v);
    }
    Ok(y)
}

/// Returns a subgradient at `z`: the analytic gradient when registered,
/// otherwise a reduced-direction sphere average (almost every point is a
/// differentiability point, where the average equals the gradient).
pub fn gradient_selection(f: &ConvexOracle, z: &[f64], cfg: &SearchConfig) -> Result<Vec<f64>> {
    if let Some(g) = f.analytic_gradient(z) {
        return Ok(g);
    }
    sphere_average_raw(f, z, cfg.mollify_inner_directions * f.dim(), cfg)
}

/// The mollified selection `T_eps(x)`: the average of `grad L` over the ball
/// `B(x, eps)`, estimated by antithetic Monte Carlo.
pub fn mollified_subgradient(
    f: &ConvexOracle,
    x: &[f64],
    eps: f64,
    cfg: &SearchConfig,
) -> Result<Vec<f64>> {
    assert!(eps > 0.0, "mollification radius must be positive");
    let n = f.dim();
    f.eval_finite(x)?;
    let mut rng = rng_for(cfg.seed, Salt::Mollify);
    let pairs = (cfg.mollify_samples / 2).max(1);
    let mut acc = vec![0.0; n];
    for _ in 0..pairs {
        let offset = sub(&sphere::ball_point(&vec![0.0; n], eps, &mut rng), &vec![0.0; n]);
        let zp = add(x, &offset);
        let zm = sub(x, &offset);
        let gp = gradient_selection(f, &zp, cfg)?;
        let gm = gradient_selection(f, &zm, cfg)?;
        for i in 0..n {
            acc[i] += gp[i] + gm[i];
        }
    }
    Ok(scaled(&acc, 1.0 / (2.0 * pairs as f64)))
}

/// Side-by-side comparison of the three selections at one point, including
/// an `eps`-sweep of the mollified map. This is an empirical probe of the
/// open question whether the spherical selection always lands in `dL(x)`
/// and agrees with the barycenter; nothing here asserts it.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub point: Vec<f64>,
    pub sphere: Vec<f64>,
    pub barycenter: Vec<f64>,
    pub mollified_sweep: Vec<(f64, Vec<f64>)>,
    pub certificates: Vec<SubgradientCertificate>,
    /// `(method a, method b, |a - b|)` for the three candidates.
    pub pairwise_distances: Vec<(String, String, f64)>,
    /// `|T_{eps_{j+1}} - T_{eps_j}|` along the sweep.
    pub mollified_increments: Vec<f64>,
    /// Increments non-increasing within a factor of 2 slack.
    pub appears_cauchy: bool,
}

pub fn selection_consistency_test(
    f: &ConvexOracle,
    x: &[f64],
    eps_sweep: &[f64],
    cfg: &SearchConfig,
) -> Result<ConsistencyReport> {
    let (sphere_y, cert_s) = sphere_average_subgradient(f, x, cfg)?;
    let (bary_y, cert_b) = barycenter_subgradient(f, x, cfg)?;
    let mut sweep = Vec::new();
    for &eps in eps_sweep {
        sweep.push((eps, mollified_subgradient(f, x, eps, cfg)?));
    }
    let last = sweep
        .last()
        .map(|(_, y)| y.clone())
        .unwrap_or_else(|| sphere_y.clone());
    let cert_m = certify(f, x, &last, SelectionMethod::Mollified, cfg)?;

    let mut increments = Vec::new();
    for w in sweep.windows(2) {
        increments.push(crate::linalg::dist(&w[0].1, &w[1].1));
    }
    let appears_cauchy = increments.windows(2).all(|w| w[1] <= 2.0 * w[0] + 1e-9);

    let pairwise = vec![
        (
            "sphere_average".to_string(),
            "barycenter".to_string(),
            crate::linalg::dist(&sphere_y, &bary_y),
        ),
        (
            "sphere_average".to_string(),
            "mollified".to_string(),
            crate::linalg::dist(&sphere_y, &last),
        ),
        (
            "barycenter".to_string(),
            "mollified".to_string(),
            crate::linalg::dist(&bary_y, &last),
        ),
    ];

    Ok(ConsistencyReport {
        point: x.to_vec(),
        sphere: sphere_y,
        barycenter: bary_y,
        mollified_sweep: sweep,
        certificates: vec![cert_s, cert_b, cert_m],
        pairwise_distances: pairwise,
        mollified_increments: increments,
        appears_cauchy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func_dsl::{lift_radial, parse_young, NormSpec};
    use crate::registry;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SearchConfig {
        SearchConfig::with_seed(17)
    }

    fn relu(c: &SearchConfig) -> ConvexOracle {
        // max(x, 0): one-sided kink at the origin with dL(0) = [0, 1];
        // vanishes on the negative axis, so skip the positivity probe
        ConvexOracle::builder("relu", 1, |x: &[f64]| {
            crate::extreal::ExtReal::from_value(x[0].max(0.0))
        })
        .finite_everywhere(true)
        .allow_vanishing()
        .build(c)
        .unwrap()
    }

    #[test]
    fn support_values_of_abs_at_zero() {
        let c = cfg();
        let f = registry::power(1.0, 1, &c).unwrap();
        assert_abs_diff_eq!(
            support_of_subdifferential(&f, &[0.0], &[1.0], &c).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            support_of_subdifferential(&f, &[0.0], &[-1.0], &c).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let g = relu(&c);
        assert_abs_diff_eq!(
            support_of_subdifferential(&g, &[0.0], &[-1.0], &c).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hull_of_euclidean_norm_at_zero_is_unit_disc() {
        let c = cfg();
        let f = registry::power(1.0, 2, &c).unwrap();
        let hull = subdifferential_hull(&f, &[0.0, 0.0], &c).unwrap();
        for h in hull.support_values() {
            assert_abs_diff_eq!(*h, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn hull_of_smooth_point_has_linear_support() {
        let c = cfg();
        let f = registry::quadratic(2, &c).unwrap();
        let hull = subdifferential_hull(&f, &[1.0, 2.0], &c).unwrap();
        for (d, h) in hull.directions().iter().zip(hull.support_values()) {
            assert_abs_diff_eq!(*h, d[0] + 2.0 * d[1], epsilon = 1e-7);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let c = cfg();
        let f = registry::power(1.0, 2, &c).unwrap();
        let ball = subdifferential_hull(&f, &[0.0, 0.0], &c).unwrap();
        let origin = singleton_support(&[0.0, 0.0], ball.directions()).unwrap();
        assert_abs_diff_eq!(hausdorff_distance(&ball, &origin).unwrap(), 1.0, epsilon = 1e-9);

        let a = singleton_support(&[1.0, 0.0], ball.directions()).unwrap();
        let b = singleton_support(&[0.0, 2.0], ball.directions()).unwrap();
        let d = hausdorff_distance(&a, &b).unwrap();
        // support max over the sampled circle of |<a-b, theta>| = |a-b|
        assert_abs_diff_eq!(d, 5f64.sqrt(), epsilon = 1e-4);

        // 1D: [-1,1] vs [0,1] differ by 1 (at theta = -1)
        let f1 = registry::power(1.0, 1, &c).unwrap();
        let k1 = subdifferential_hull(&f1, &[0.0], &c).unwrap();
        let g = relu(&c);
        let k2 = subdifferential_hull(&g, &[0.0], &c).unwrap();
        assert_abs_diff_eq!(hausdorff_distance(&k1, &k2).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn sphere_average_in_one_dimension_is_the_two_sided_mean() {
        let c = cfg();
        let f = registry::power(1.0, 1, &c).unwrap();
        let (y, cert) = sphere_average_subgradient(&f, &[0.0], &c).unwrap();
        assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-12);
        assert!(cert.is_valid());

        let g = relu(&c);
        let (y, cert) = sphere_average_subgradient(&g, &[0.0], &c).unwrap();
        assert_abs_diff_eq!(y[0], 0.5, epsilon = 1e-12);
        assert!(cert.is_valid());
    }

    #[test]
    fn sphere_average_recovers_gradients_at_smooth_points() {
        let c = cfg();
        let f = registry::quadratic(2, &c).unwrap();
        let (y, cert) = sphere_average_subgradient(&f, &[1.0, 2.0], &c).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(y[1], 2.0, epsilon = 1e-6);
        assert!(cert.is_valid());
    }

    #[test]
    fn barycenter_examples() {
        let c = cfg();
        let f = registry::power(1.0, 1, &c).unwrap();
        let (y, cert) = barycenter_subgradient(&f, &[0.0], &c).unwrap();
        assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-10);
        assert!(cert.is_valid());

        let g = relu(&c);
        let (y, cert) = barycenter_subgradient(&g, &[0.0], &c).unwrap();
        assert_abs_diff_eq!(y[0], 0.5, epsilon = 1e-10);
        assert!(cert.is_valid());

        // centroid of the ell_1 unit ball is the origin
        let p = parse_young("pow(r,1)").unwrap();
        let inf_lift = lift_radial(&p, &NormSpec::EllInf, 2, &c).unwrap();
        let (y, cert) = barycenter_subgradient(&inf_lift, &[0.0, 0.0], &c).unwrap();
        assert!(norm2(&y) < 1e-7, "centroid {y:?}");
        assert!(cert.is_valid());
    }

    #[test]
    fn barycenter_of_segment_subdifferential() {
        // hinge kink at |x| = 1: dL(x) = [1, 2] * x/|x|, midpoint 1.5 x
        let c = cfg();
        let f = registry::hinge_power(1.0, 2, &c).unwrap();
        let x = [0.6, 0.8];
        let (y, cert) = barycenter_subgradient(&f, &x, &c).unwrap();
        assert_abs_diff_eq!(y[0], 1.5 * 0.6, epsilon = 1e-4);
        assert_abs_diff_eq!(y[1], 1.5 * 0.8, epsilon = 1e-4);
        assert!(cert.is_valid(), "min_slack = {}", cert.min_slack);
    }

    #[test]
    fn mollified_examples() {
        let c = cfg();
        let q = registry::quadratic(2, &c).unwrap();
        let y = mollified_subgradient(&q, &[1.0, 0.0], 0.1, &c).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(y[1], 0.0, epsilon = 1e-3);

        let a = registry::power(1.0, 1, &c).unwrap();
        let y = mollified_subgradient(&a, &[0.0], 0.3, &c).unwrap();
        assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-12);

        let g = relu(&c);
        let y = mollified_subgradient(&g, &[0.0], 0.2, &c).unwrap();
        assert_abs_diff_eq!(y[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn consistency_report_on_smooth_and_kinked_points() {
        let c = cfg();
        let q = registry::quadratic(1, &c).unwrap();
        let rep = selection_consistency_test(&q, &[0.7], &[1e-1, 1e-2, 1e-3], &c).unwrap();
        for cert in &rep.certificates {
            assert!(cert.is_valid());
        }
        for (_, _, d) in &rep.pairwise_distances {
            assert!(*d < 1e-6);
        }

        let hinf = lift_radial(
            &parse_young("pow(r,1)").unwrap(),
            &NormSpec::EllInf,
            2,
            &c,
        )
        .unwrap();
        let rep = selection_consistency_test(&hinf, &[1.0, 1.0], &[1e-1, 1e-2, 1e-3], &c).unwrap();
        for cert in &rep.certificates {
            assert!(cert.is_valid(), "{:?} slack {}", cert.method, cert.min_slack);
        }
    }

    #[test]
    fn certificate_rejects_non_subgradients() {
        let c = cfg();
        let f = registry::power(1.0, 1, &c).unwrap();
        // 1.5 is outside dL(x) = [-1, 1] everywhere
        let cert = certify(&f, &[2.0], &[1.5], SelectionMethod::Analytic, &c).unwrap();
        assert!(!cert.is_valid());
    }
}
