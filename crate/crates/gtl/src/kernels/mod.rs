//! The regularized sampling operator and its analysis.
//!
//! `h = s_N * G_{r,sigma}` reconstructs a bandlimited signal from its uniform
//! samples with a kernel of width `2r`. The pieces here are the sampling
//! function, the periodic Gaussian regularizer, the reconstruction itself,
//! the spectral weights that give its exact L2 error and the rate function
//! that bounds it.

mod alias;
mod bound;
mod gaussian;
mod params;
pub mod precise;
mod sampling;

pub use alias::{exact_l2_error, mode_error, AliasEngine, AliasingCoefficients, MAX_SHELLS};
pub use bound::{error_bound_tilde, error_bound_tilde_raw, TildeBound};
pub use gaussian::{wrap, PeriodicGaussian, Route};
pub use params::{
    plan_params, schedule, PlanReport, RegularizerParams, DEFAULT_ALPHA, DEFAULT_BETA,
    DEFAULT_SERIES_TOL,
};
pub use sampling::{eval_sn, eval_sn_direct, reconstruct_exact, sin_pi, sn_derivs, SamplingKernel};
