//! Bayesian bandits under misspecified priors.
//!
//! The crate provides the three prior families used throughout (Gaussian,
//! Beta product, discrete), their divergences and tail quantities,
//! conjugate posteriors, the n-Monte-Carlo policy family, bandit
//! environments including worst-case lower-bound instances, prior
//! estimators and an explore-then-commit meta-learning harness.

pub mod envs;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod metalearn;
pub mod policies;
pub mod posteriors;
pub mod priors;
pub mod rng;
pub mod types;

pub use envs::lincb::{lincb_explore_episode, lincb_play_episode, LinCbTrace, LinearCbEnv};
pub use envs::lower_bound::{
    anlb_reward_gap, anlb_rollout, lb_two_arm_tv, make_anlb_instance, make_lb_pair, AnLbInstance, WhichPrior,
};
pub use envs::{play_episode, play_on_mean, EpisodeTrace, RewardModel};
pub use error::{Error, Result};
pub use linalg::{mvn_sample, psd_project, MvnSampler};
pub use metalearn::{
    run_meta, run_replicates, sensitivity_experiment, upper_envelope, BasePolicy, Baseline, Estimator, MetaConfig,
    MetaResult, Task,
};
pub use policies::{monte_carlo_n, rhc2_value, select_action, softmax_selector, Policy, PolicyKind, TieBreak};
pub use posteriors::{
    gaussian_posterior, log_marginal_likelihood_gaussian, mle_weighted_mean, DiscretePosterior, PosteriorState,
    SufficientStats,
};
pub use priors::{
    kl_beta_product, kl_gaussian, kveton_comparison, sensitivity_bound, tail_bound, tail_expectation_discrete,
    trajectory_tv_bound, tv_discrete, tv_upper_beta, tv_upper_gaussian, BetaProductPrior, DiscretePrior,
    GaussianPrior, Prior, TailSpec,
};
pub use rng::RngStream;
pub use types::{argmax_tiebreak, ActionIndex, CovMatrix, MeanVector};
