//! Ordinal classification with a fitted category ordering, and causal
//! direction inference for categorical variable pairs built on top of it.
//!
//! The pieces, bottom up:
//!
//! - [`link`](Link): logit/probit link functions.
//! - [`perm`]: permutations of category labels, canonical forms,
//!   transposition neighborhoods, Kendall's tau.
//! - [`ordinal`]: maximum-likelihood cumulative-link regression at a fixed
//!   label permutation.
//! - [`colp`]: search over permutations (exhaustive or greedy) for the
//!   best-fitting ordering, plus model-complexity accounting.
//! - [`causal`]: fits both causal hypotheses X->Y and Y->X as joint models
//!   (multinomial marginal times conditional) and decides direction by
//!   comparing maximized likelihoods.
//! - [`synth`]: seeded scenario generators and benchmark sweeps.
//! - [`ingest`]: CSV pair ingestion, level encoding, quantile discretization.

pub mod causal;
pub mod colp;
mod error;
pub mod ingest;
mod link;
pub mod ordinal;
pub mod perm;
pub mod rng;
mod sample;
pub mod synth;

pub use causal::{
    decide, decide_with_fixed_forward, fit_direction, marginal_mle, saturated_log_likelihood,
    CausalConfig, CausalVerdict, Decision, Direction, DirectionFit, MarginalFit, SearchChoice,
};
pub use colp::{
    complexity, fit_colp_exhaustive, fit_colp_fixed, fit_colp_greedy, fit_colp_greedy_restarts,
    predict_proba, ColpConfig, ColpFit, ComplexityReport, SearchMethod,
};
pub use error::{Error, Result};
pub use ingest::{
    discretize, read_manifest, read_pair, read_pair_discretized, write_pair, IngestReport,
    PairFile,
};
pub use link::Link;
pub use ordinal::{
    conditional_pmf, fit_ordinal, fit_ordinal_with_init, negative_log_likelihood, nll_gradient,
    FitConfig, OrdinalFit, OrdinalParams,
};
pub use perm::{enumerate_all, enumerate_canonical, kendall_tau, Permutation};
pub use sample::PairedSample;
pub use synth::{
    calibrate_thresholds, generate_replication, permutation_at_tau, run_ablation, run_scenario,
    run_sweep, AblationTable, Calibrated, GenParams, GroundTruth, RepOutcome, Scenario,
    ScenarioConfig, ScenarioRun, SweepTable,
};
