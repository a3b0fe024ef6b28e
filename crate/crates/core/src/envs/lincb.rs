//! Linear contextual bandit with a Gaussian prior over the weight vector.

use nalgebra::{DMatrix, DVector};

use super::EpisodeTrace;
use crate::error::{invalid, Error, Result};
use crate::policies::{Policy, PolicyKind, TieBreak};
use crate::posteriors::GaussianBelief;
use crate::priors::{GaussianPrior, Prior};
use crate::rng::RngStream;
use crate::types::{argmax_random_tiebreak, argmax_tiebreak, ActionIndex, MeanVector};

/// Environment whose per-episode weight vector `w ~ weight_prior` yields
/// rewards `r ~ N(⟨w, x_a⟩, obs_var)` for freshly drawn unit-norm contexts.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCbEnv {
    pub weight_prior: GaussianPrior,
    pub num_actions: usize,
    pub obs_var: f64,
}

impl LinearCbEnv {
    pub fn new(weight_prior: GaussianPrior, num_actions: usize, obs_var: f64) -> Result<Self> {
        if num_actions == 0 {
            return Err(invalid("num_actions", "must be at least 1"));
        }
        if !(obs_var > 0.0) {
            return Err(invalid("obs_var", "must be positive"));
        }
        Ok(Self {
            weight_prior,
            num_actions,
            obs_var,
        })
    }

    pub fn dim(&self) -> usize {
        self.weight_prior.dim()
    }

    /// `A × d` matrix of contexts; rows have iid standard-normal entries
    /// scaled to unit ℓ₂ norm.
    pub fn sample_contexts(&self, rng: &mut RngStream) -> DMatrix<f64> {
        let d = self.dim();
        let mut x = DMatrix::zeros(self.num_actions, d);
        for a in 0..self.num_actions {
            loop {
                for j in 0..d {
                    x[(a, j)] = rng.standard_normal();
                }
                let norm = x.row(a).norm();
                if norm > 0.0 {
                    x.row_mut(a).unscale_mut(norm);
                    break;
                }
            }
        }
        x
    }
}

/// Trace of a contextual episode. `trace.realized_mean` holds the weight
/// vector; `features[h]` is the context of the action taken at step `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinCbTrace {
    pub trace: EpisodeTrace,
    pub contexts: Vec<DMatrix<f64>>,
    pub features: Vec<DVector<f64>>,
}

/// Plays Thompson sampling over the weight posterior seeded by the policy's
/// Gaussian prior.
pub fn lincb_play_episode(env: &LinearCbEnv, policy: &Policy, horizon: usize, rng: &mut RngStream) -> Result<LinCbTrace> {
    let prior = match policy.prior() {
        Prior::Gaussian(p) => p,
        other => {
            return Err(Error::Incompatible(format!(
                "linear bandit needs a gaussian weight prior, got {}",
                other.family()
            )))
        }
    };
    if !matches!(policy.kind(), PolicyKind::Ts) {
        return Err(Error::Incompatible("linear bandit supports thompson sampling only".into()));
    }
    if prior.dim() != env.dim() {
        return Err(Error::DimensionMismatch {
            expected: env.dim(),
            got: prior.dim(),
        });
    }
    let weights = crate::linalg::mvn_sample(&env.weight_prior.mean, &env.weight_prior.cov, rng)?;
    play_weights(env, weights, Some((prior, policy.tie_break())), horizon, rng)
}

/// Plays uniformly random actions.
pub fn lincb_explore_episode(env: &LinearCbEnv, horizon: usize, rng: &mut RngStream) -> Result<LinCbTrace> {
    let weights = crate::linalg::mvn_sample(&env.weight_prior.mean, &env.weight_prior.cov, rng)?;
    play_weights(env, weights, None, horizon, rng)
}

/// Plays on a fixed weight vector; `ts` selects Thompson sampling with the
/// given prior, otherwise actions are uniform.
pub fn play_weights(
    env: &LinearCbEnv,
    weights: MeanVector,
    ts: Option<(&GaussianPrior, TieBreak)>,
    horizon: usize,
    rng: &mut RngStream,
) -> Result<LinCbTrace> {
    if weights.len() != env.dim() {
        return Err(Error::DimensionMismatch {
            expected: env.dim(),
            got: weights.len(),
        });
    }
    let mut belief = ts.map(|(p, _)| GaussianBelief::new(p)).transpose()?;
    let mut draw = DVector::zeros(env.dim());
    let mut out = LinCbTrace {
        trace: EpisodeTrace::with_capacity(weights, horizon),
        contexts: Vec::with_capacity(horizon),
        features: Vec::with_capacity(horizon),
    };
    for _ in 0..horizon {
        let x = env.sample_contexts(rng);
        let a = match (&belief, ts) {
            (Some(b), Some((_, tie))) => {
                b.draw_into(rng, &mut draw);
                let predicted = &x * &draw;
                match tie {
                    TieBreak::LowestIndex => argmax_tiebreak(predicted.as_slice())?,
                    TieBreak::Random => argmax_random_tiebreak(predicted.as_slice(), rng)?,
                }
            }
            _ => ActionIndex(rng.below(env.num_actions)),
        };
        let feature: DVector<f64> = x.row(a.0).transpose();
        let mu = feature.dot(&out.trace.realized_mean.0);
        let r = mu + env.obs_var.sqrt() * rng.standard_normal();
        if let Some(b) = belief.as_mut() {
            b.observe_features(&feature, r)?;
        }
        out.trace.push(a, r, mu);
        out.contexts.push(x);
        out.features.push(feature);
    }
    Ok(out)
}
