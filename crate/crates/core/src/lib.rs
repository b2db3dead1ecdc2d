//! Block-sampling (sampling-window) inference for the mean of long-range
//! dependent processes Y_i = K(X_i), with X_i a truncated causal linear
//! process.
//!
//! The crate provides:
//! - model definitions and deterministic path simulation ([`process`]),
//! - overlapping block sums and the sampling distributions F_n / F~_n
//!   ([`block`], [`empirical`]),
//! - the two-time-scale H-hat estimator and its confidence intervals
//!   ([`scale`]),
//! - subsampling intervals that avoid estimating H ([`subsample`]),
//! - limit-distribution oracles: Volterra samplers for Hermite marginals,
//!   the zeta variance constant by quadrature ([`oracle`], [`quad`]),
//! - a config-driven Monte Carlo coverage harness ([`harness`]).

pub mod block;
pub mod empirical;
pub mod error;
pub mod fftconv;
pub mod harness;
pub mod oracle;
pub mod process;
pub mod quad;
pub mod rng;
pub mod scale;
pub mod subsample;

pub use block::{
    block_sums, f_n, f_n_tilde, f_n_tilde_forward, forward_sums, variance_hat, variance_tilde,
    variance_tilde_forward, BlockConvention,
};
pub use empirical::EmpiricalDist;
pub use error::{Error, Result};
pub use harness::{
    parse_config, run_coverage, run_single, sweep, write_sweep_csv, CoverageReport,
    ExperimentConfig, Method, SingleRun, SweepRow,
};
pub use oracle::{
    exact_variance, normal_cdf, sample_limit, untruncated_variance_r1, volterra_sum,
    volterra_sum_direct, zeta, HermiteSpec, ZetaConstant,
};
pub use process::{
    draw_innovations, simulate_window, true_mean, truncated_autocov, CoefficientSeq,
    InnovationLaw, MeanEstimate, ModelName, ModelSpec, SeriesWindow, TransformKind, TransformSpec,
};
pub use scale::{
    ci_mean, estimate_scales, theoretical_h, ConfidenceInterval, IntervalKind, ScaleEstimates,
};
pub use subsample::{choose_scales, ci_mean_subsample, f_l_star, local_variance, SubsampleScales};
