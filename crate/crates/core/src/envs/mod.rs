//! Reward models, episode rollouts and the lower-bound instance generators.

pub mod lincb;
pub mod lower_bound;
pub mod presets;

use crate::error::{invalid, Error, Result};
use crate::policies::{select_action, Policy};
use crate::posteriors::PosteriorState;
use crate::priors::Prior;
use crate::rng::RngStream;
use crate::types::{ActionIndex, MeanVector};

/// Reward distribution `D(μ)` with `E[r] = μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardModel {
    GaussianNoise { obs_var: f64 },
    Bernoulli,
    Deterministic,
}

impl RewardModel {
    pub fn sample(&self, mean: f64, rng: &mut RngStream) -> f64 {
        match *self {
            RewardModel::GaussianNoise { obs_var } => mean + obs_var.sqrt() * rng.standard_normal(),
            RewardModel::Bernoulli => {
                if rng.bernoulli(mean) {
                    1.0
                } else {
                    0.0
                }
            }
            RewardModel::Deterministic => mean,
        }
    }

    /// Log-likelihood of `reward` given arm mean `mean`, up to a constant that
    /// does not depend on `mean`.
    pub fn log_likelihood(&self, mean: f64, reward: f64) -> f64 {
        match *self {
            RewardModel::GaussianNoise { obs_var } => -0.5 * (reward - mean).powi(2) / obs_var,
            RewardModel::Bernoulli => {
                if reward == 1.0 {
                    mean.ln()
                } else if reward == 0.0 {
                    (1.0 - mean).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            RewardModel::Deterministic => {
                if reward == mean {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Checks that an environment mean vector is admissible for this model.
    pub fn validate(&self, mean: &MeanVector) -> Result<()> {
        if !mean.is_finite() {
            return Err(Error::NonFinite);
        }
        if let RewardModel::Bernoulli = self {
            if mean.iter().any(|m| !(0.0..=1.0).contains(m)) {
                return Err(invalid("mean", "bernoulli means must lie in [0, 1]"));
            }
        }
        if let RewardModel::GaussianNoise { obs_var } = self {
            if !(*obs_var > 0.0) {
                return Err(invalid("obs_var", "must be positive"));
            }
        }
        Ok(())
    }
}

/// One episode of interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub realized_mean: MeanVector,
    pub actions: Vec<ActionIndex>,
    pub rewards: Vec<f64>,
    /// Mean reward of the chosen action at each step.
    pub step_means: Vec<f64>,
    pub horizon: usize,
    /// Number of times the policy's posterior left its prior's support and
    /// was rebuilt from the fallback prior.
    pub support_fallbacks: u32,
}

impl EpisodeTrace {
    fn with_capacity(realized_mean: MeanVector, horizon: usize) -> Self {
        Self {
            realized_mean,
            actions: Vec::with_capacity(horizon),
            rewards: Vec::with_capacity(horizon),
            step_means: Vec::with_capacity(horizon),
            horizon,
            support_fallbacks: 0,
        }
    }

    fn push(&mut self, action: ActionIndex, reward: f64, mean: f64) {
        self.actions.push(action);
        self.rewards.push(reward);
        self.step_means.push(mean);
    }

    /// `Σ_h μ_{a_h}`, the noiseless episode score.
    pub fn score(&self) -> f64 {
        self.step_means.iter().sum()
    }

    pub fn first_action(&self) -> Option<ActionIndex> {
        self.actions.first().copied()
    }
}

/// Draws `μ ~ prior_true` and plays one episode of `policy` against it.
pub fn play_episode(
    prior_true: &Prior,
    policy: &Policy,
    horizon: usize,
    model: RewardModel,
    rng: &mut RngStream,
) -> Result<EpisodeTrace> {
    let mean = prior_true.sample_mean(rng)?;
    play_on_mean(mean, policy, horizon, model, None, rng)
}

/// Plays `policy` for `horizon` steps on a fixed mean vector.
///
/// When the policy's posterior rejects an observation as outside its support
/// and `fallback` is given, the posterior is rebuilt from `fallback` and the
/// episode's observations are replayed into it.
pub fn play_on_mean(
    mean: MeanVector,
    policy: &Policy,
    horizon: usize,
    model: RewardModel,
    fallback: Option<&Prior>,
    rng: &mut RngStream,
) -> Result<EpisodeTrace> {
    if mean.len() != policy.prior().num_arms() {
        return Err(Error::DimensionMismatch {
            expected: policy.prior().num_arms(),
            got: mean.len(),
        });
    }
    model.validate(&mean)?;
    let mut posterior = PosteriorState::from_prior(policy.prior(), model)?;
    let mut trace = EpisodeTrace::with_capacity(mean, horizon);
    for _ in 0..horizon {
        let a = select_action(policy, &posterior, rng)?;
        let mu = trace.realized_mean[a.0];
        let r = model.sample(mu, rng);
        trace.push(a, r, mu);
        match posterior.observe(a, r) {
            Ok(()) => {}
            Err(Error::OutsideSupport) if fallback.is_some() => {
                log::debug!("posterior left its support at step {}; replaying under fallback prior", trace.actions.len());
                posterior = replay(fallback.unwrap(), model, &trace)?;
                trace.support_fallbacks += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(trace)
}

fn replay(prior: &Prior, model: RewardModel, trace: &EpisodeTrace) -> Result<PosteriorState> {
    let mut post = PosteriorState::from_prior(prior, model)?;
    for (&a, &r) in trace.actions.iter().zip(&trace.rewards) {
        post.observe(a, r)?;
    }
    Ok(post)
}

/// Plays uniformly random actions for `horizon` steps.
pub fn play_uniform(mean: MeanVector, horizon: usize, model: RewardModel, rng: &mut RngStream) -> Result<EpisodeTrace> {
    model.validate(&mean)?;
    let n = mean.len();
    let mut trace = EpisodeTrace::with_capacity(mean, horizon);
    for _ in 0..horizon {
        let a = ActionIndex(rng.below(n));
        let mu = trace.realized_mean[a.0];
        let r = model.sample(mu, rng);
        trace.push(a, r, mu);
    }
    Ok(trace)
}
