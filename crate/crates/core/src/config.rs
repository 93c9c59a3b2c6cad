//! Shared search/tolerance configuration.

use serde::{Deserialize, Serialize};

/// All knobs for the stochastic and iterative searches in one record.
///
/// Every report echoes the configuration it was produced with, so a run is
/// reproducible from its output alone.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    /// Master seed; all operation-local generators derive from it.
    pub seed: u64,

    /// Initial step of the difference-quotient schedule `eps_k = eps_init * 2^-k`.
    pub dd_eps_init: f64,
    /// Floor of the schedule; reaching it without stabilising is an error.
    pub dd_eps_floor: f64,
    /// Absolute stabilisation tolerance between successive quotients.
    pub dd_stab_tol: f64,

    /// Seeded starts for the Legendre ascent.
    pub legendre_starts: usize,
    /// Objective values beyond this are declared `+inf`.
    pub divergence_threshold: f64,

    /// Convexity-probe slack used at oracle construction.
    pub tol_convexity: f64,
    /// Relative tolerance of the homogeneity probe.
    pub tol_homogeneity: f64,

    /// Quadrature directions per ambient dimension (sphere averages).
    pub sphere_directions_per_dim: usize,
    /// Hull directions per ambient dimension (support tables). Smaller than
    /// the quadrature default: hull post-processing cost is quadratic in it.
    pub hull_directions_per_dim: usize,

    /// Certificate probes per candidate subgradient.
    pub probe_count: usize,
    /// Radius of the certificate probe ball around the base point.
    pub probe_radius: f64,
    /// Scale-aware slack: a certificate is valid iff
    /// `min_slack >= -tol_slack_rel * (1 + |L(x)|)`.
    pub tol_slack_rel: f64,

    /// Samples of the ball average in the mollified selection.
    pub mollify_samples: usize,
    /// Directions for inner sphere averages when no analytic gradient exists.
    pub mollify_inner_directions: usize,

    /// Hit-and-run sample count for barycenters of full-dimensional sets.
    pub hitrun_samples: usize,
    /// Singular values below `rel * sigma_max` are treated as zero when
    /// detecting the affine dimension of a subdifferential.
    pub sv_threshold_rel: f64,
    /// Resolution floor of the touching-point cloud: per-point extents below
    /// `floor * (1 + |center|)` are indistinguishable from finite-difference
    /// noise and treated as zero.
    pub sv_noise_floor: f64,

    /// Relative width at which the Luxemburg bisection stops.
    pub bisect_rel_width: f64,
    /// The bracket ceiling is `2^exp * (1 + max_i |u_i|)`.
    pub bracket_ceiling_exp: u32,

    /// Points of the radial log grid for ratio searches.
    pub ratio_radii: usize,
    /// Initial radial exponent range `[10^-e, 10^e]` of the ratio search.
    pub ratio_exp_range: f64,
    /// Hard cap for the adaptive exponent extension.
    pub ratio_exp_cap: f64,
    /// Directions per dimension in the ratio search.
    pub ratio_directions_per_dim: usize,
    /// Golden-section refinement rounds around the best ratio cell.
    pub ratio_refine_rounds: usize,

    /// Monotone-quotient slack in property checks.
    pub tol_mono: f64,
    /// Fenchel-gap non-negativity slack.
    pub tol_fenchel: f64,
    /// Relative tolerance of the biconjugacy probe `L** = L`.
    pub tol_biconj: f64,

    /// Grid points of the dense LP oracle for `gamma`.
    pub gamma_grid_points: usize,
    /// Cross-validation tolerance between the tangent and LP routes.
    pub gamma_cross_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            dd_eps_init: 1e-2,
            dd_eps_floor: 1e-7,
            dd_stab_tol: 1e-8,
            legendre_starts: 16,
            divergence_threshold: 1e12,
            tol_convexity: 1e-9,
            tol_homogeneity: 1e-8,
            sphere_directions_per_dim: 4096,
            hull_directions_per_dim: 256,
            probe_count: 1000,
            probe_radius: 10.0,
            tol_slack_rel: 1e-7,
            mollify_samples: 2048,
            mollify_inner_directions: 128,
            hitrun_samples: 50_000,
            sv_threshold_rel: 1e-7,
            sv_noise_floor: 1e-4,
            bisect_rel_width: 1e-10,
            bracket_ceiling_exp: 60,
            ratio_radii: 61,
            ratio_exp_range: 3.0,
            ratio_exp_cap: 60.0,
            ratio_directions_per_dim: 32,
            ratio_refine_rounds: 3,
            tol_mono: 1e-9,
            tol_fenchel: 1e-7,
            tol_biconj: 1e-5,
            gamma_grid_points: 10_000,
            gamma_cross_tol: 1e-6,
        }
    }
}

impl SearchConfig {
    /// Config with a given master seed and default tolerances.
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig {
            seed,
            ..SearchConfig::default()
        }
    }

    /// Quadrature direction count for dimension `n`.
    pub fn sphere_directions(&self, dim: usize) -> usize {
        self.sphere_directions_per_dim * dim.max(1)
    }

    /// Hull direction count for dimension `n`.
    pub fn hull_directions(&self, dim: usize) -> usize {
        self.hull_directions_per_dim * dim.max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roundtrips_through_json() {
        let cfg = SearchConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: SearchConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let r: Result<SearchConfig, _> = serde_json::from_str(r#"{"seed":1,"bogus":2}"#);
        assert!(r.is_err());
    }
}
