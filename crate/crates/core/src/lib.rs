//! Numerical convex analysis toolkit.
//!
//! The crate is organised around evaluation oracles for non-negative convex
//! functions `L: R^n -> [0, inf]` with `L(0) = 0` and `L(x) > 0` off the
//! origin. On top of those oracles it provides:
//!
//! * directional derivatives, a numerical Legendre transform and
//!   Fenchel-equality checks ([`convex_core`]);
//! * a small expression language for scalar Young profiles `V(r)` and a
//!   lifter producing radial functions `V(||x||)` ([`func_dsl`]);
//! * support-function approximations of subdifferentials and three
//!   measurable subgradient selections with validity certificates
//!   ([`subgrad`]);
//! * estimates of the associated Young functions `R`, `Phi`, `Psi`,
//!   growth-exponent and Delta-2 diagnostics, and the mixture constant
//!   `gamma(p1, p0)` ([`delta2`]);
//! * Luxemburg and Orlicz pseudo-norms of vector fields over discrete
//!   probability spaces, duality brackets, perturbation sweeps and
//!   mixture/convolution concavity checks ([`orlicz`]).
//!
//! Every stochastic routine takes its randomness from the seed recorded in
//! [`SearchConfig`]; for a fixed seed all results are bit-reproducible.

pub mod config;
pub mod convex_core;
pub mod delta2;
pub mod error;
pub mod extreal;
pub mod func_dsl;
pub mod oracle;
pub mod orlicz;
pub mod registry;
pub mod report;
pub mod subgrad;
pub mod suites;

pub(crate) mod linalg;
pub(crate) mod rng;
pub(crate) mod sphere;

pub use config::SearchConfig;
pub use error::Error;
pub use extreal::ExtReal;
pub use oracle::ConvexOracle;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
