//! Worst-case instances showing that prior sensitivity can be as large as
//! the upper bounds allow.

use std::sync::Arc;

use super::{play_on_mean, EpisodeTrace, RewardModel};
use crate::error::{invalid, Error, Result};
use crate::policies::{Policy, PolicyKind};
use crate::priors::{DiscretePrior, Prior};
use crate::rng::RngStream;
use crate::types::{ActionIndex, MeanVector};

/// `θ` = point mass at `(½, 0)`; `θ′ = (1−ε)·δ_{(½,0)} + ε·δ_{(½,1)}`.
pub fn make_lb_pair(eps: f64) -> Result<(DiscretePrior, DiscretePrior)> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid("eps", "must lie in [0, 1]"));
    }
    let base = MeanVector::new(vec![0.5, 0.0]);
    let alt = MeanVector::new(vec![0.5, 1.0]);
    let theta = DiscretePrior::point_mass(base.clone());
    let theta_prime = if eps == 0.0 {
        theta.clone()
    } else if eps == 1.0 {
        DiscretePrior::point_mass(alt)
    } else {
        DiscretePrior::new(vec![base, alt], vec![1.0 - eps, eps])?
    };
    Ok((theta, theta_prime))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbTv {
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
}

/// Analytic `1 − (1−ε)^{Hk}` next to the fraction of k-TS(θ′) episodes on
/// `μ = (½, 0)` that ever pull arm 1.
pub fn lb_two_arm_tv(eps: f64, horizon: usize, k: usize, episodes: usize, rng: &mut RngStream) -> Result<LbTv> {
    if k == 0 || episodes == 0 {
        return Err(invalid("k/episodes", "must be at least 1"));
    }
    let analytic = 1.0 - (1.0 - eps).powi((horizon * k) as i32);
    let (theta, theta_prime) = make_lb_pair(eps)?;
    let env = theta.atoms()[0].clone();
    let policy = Policy::new(PolicyKind::Kts { k }, Prior::Discrete(theta_prime))?;
    let mut hits = 0usize;
    for _ in 0..episodes {
        let t = play_on_mean(env.clone(), &policy, horizon, RewardModel::Bernoulli, None, rng)?;
        hits += t.actions.contains(&ActionIndex(1)) as usize;
    }
    let p = hits as f64 / episodes as f64;
    Ok(LbTv {
        analytic,
        empirical: p,
        stderr: (p * (1.0 - p) / episodes as f64).sqrt(),
    })
}

/// Instance with `N` base arms plus a revealing arm `N+1` (index `N`).
#[derive(Debug, Clone, PartialEq)]
pub struct AnLbInstance {
    pub num_base_arms: usize,
    pub eps: f64,
    pub delta: f64,
    pub theta: DiscretePrior,
    pub theta_prime: DiscretePrior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichPrior {
    Theta,
    ThetaPrime,
}

/// `μ(ā, b)`: arm `ā` (1-based) gets `1−δ`, other base arms `δ`, and the
/// revealing arm `δā/(2N)` when `b = 0` or `1` when `b = 1`.
pub fn anlb_mean(num_base_arms: usize, delta: f64, best: usize, b: bool) -> MeanVector {
    let n = num_base_arms;
    let mut m = vec![delta; n + 1];
    m[best - 1] = 1.0 - delta;
    m[n] = if b { 1.0 } else { delta * best as f64 / (2.0 * n as f64) };
    MeanVector::new(m)
}

pub fn make_anlb_instance(num_base_arms: usize, eps: f64, delta: f64) -> Result<AnLbInstance> {
    let n = num_base_arms;
    if n < 2 {
        return Err(invalid("num_base_arms", "must be at least 2"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("eps", "must lie in (0, 1]"));
    }
    if !(delta > 0.0 && delta < 1.0 / 32.0) {
        return Err(invalid("delta", "must lie in (0, 2^-5)"));
    }
    let lows: Vec<MeanVector> = (1..=n).map(|a| anlb_mean(n, delta, a, false)).collect();
    let highs: Vec<MeanVector> = (1..=n).map(|a| anlb_mean(n, delta, a, true)).collect();
    let theta_prime = DiscretePrior::uniform(lows.clone().into())?;
    let theta = if eps == 1.0 {
        DiscretePrior::uniform(highs.into())?
    } else {
        let atoms: Arc<[MeanVector]> = lows.into_iter().chain(highs).collect::<Vec<_>>().into();
        let mut weights: Vec<f64> = (0..n)
            .map(|_| (1.0 - eps) / n as f64)
            .chain((0..n).map(|_| eps / n as f64))
            .collect();
        let rest: f64 = weights[1..].iter().sum();
        weights[0] = 1.0 - rest;
        DiscretePrior::from_shared(atoms, weights)?
    };
    Ok(AnLbInstance {
        num_base_arms: n,
        eps,
        delta,
        theta,
        theta_prime,
    })
}

/// Draws `(ā, b) ~ θ` and runs k-TS with the chosen prior.
pub fn anlb_rollout(
    instance: &AnLbInstance,
    which: WhichPrior,
    k: usize,
    horizon: usize,
    rng: &mut RngStream,
) -> Result<EpisodeTrace> {
    let best = 1 + rng.below(instance.num_base_arms);
    let b = rng.bernoulli(instance.eps);
    anlb_rollout_on(instance, best, b, which, k, horizon, rng)
}

/// Exact k-TS on the instance `μ(best, b)` without materializing the
/// posterior: the posterior over `ā` is uniform on the unpulled base arms
/// until the best arm or the revealing arm is pulled, and `b` stays
/// `Bernoulli(ε)` (or `0` under `θ′`) until the revealing arm is pulled.
pub fn anlb_rollout_on(
    instance: &AnLbInstance,
    best: usize,
    b: bool,
    which: WhichPrior,
    k: usize,
    horizon: usize,
    rng: &mut RngStream,
) -> Result<EpisodeTrace> {
    let n = instance.num_base_arms;
    let delta = instance.delta;
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if !(1..=n).contains(&best) {
        return Err(invalid("best", "must lie in 1..=N"));
    }
    let eps = match which {
        WhichPrior::Theta => instance.eps,
        WhichPrior::ThetaPrime => 0.0,
    };
    let mean = anlb_mean(n, delta, best, b);
    let mut trace = EpisodeTrace::with_capacity(mean, horizon);

    let mut unpulled: Vec<usize> = (0..n).collect();
    let mut slot: Vec<usize> = (0..n).collect();
    let mut found: Option<usize> = None;
    let mut reveal: Option<f64> = None;

    for _ in 0..horizon {
        let arm = if let Some(r) = reveal {
            if r == 1.0 {
                n
            } else {
                decode(r, n, delta)? - 1
            }
        } else if eps > 0.0 && (0..k).fold(false, |any, _| rng.bernoulli(eps) | any) {
            n
        } else if let Some(a) = found {
            a
        } else {
            (0..k).map(|_| unpulled[rng.below(unpulled.len())]).min().unwrap()
        };
        let mu = trace.realized_mean[arm];
        trace.push(ActionIndex(arm), mu, mu);
        if arm == n {
            reveal = Some(mu);
        } else if mu == 1.0 - delta {
            found = Some(arm);
        } else if slot[arm] != usize::MAX {
            let pos = slot[arm];
            unpulled.swap_remove(pos);
            if pos < unpulled.len() {
                slot[unpulled[pos]] = pos;
            }
            slot[arm] = usize::MAX;
        }
    }
    Ok(trace)
}

/// Recovers `ā` from the revealing arm's reward `δā/(2N)`.
fn decode(reward: f64, n: usize, delta: f64) -> Result<usize> {
    let scaled = 2.0 * n as f64 * reward / delta;
    let best = scaled.round();
    if (scaled - best).abs() > 1e-9 || best < 1.0 || best > n as f64 {
        return Err(Error::DecodeMismatch(reward));
    }
    Ok(best as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub gap: f64,
    pub stderr: f64,
}

/// Monte-Carlo estimate of `R(θ, k-TS(θ)) − R(θ, k-TS(θ′))` from paired
/// rollouts that share the environment draw.
pub fn anlb_reward_gap(
    instance: &AnLbInstance,
    k: usize,
    horizon: usize,
    rollouts: usize,
    rng: &mut RngStream,
) -> Result<GapEstimate> {
    if rollouts < 2 {
        return Err(invalid("rollouts", "need at least 2"));
    }
    let mut own = rng.substream(1);
    let mut other = rng.substream(2);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..rollouts {
        let best = 1 + rng.below(instance.num_base_arms);
        let b = rng.bernoulli(instance.eps);
        let r1 = anlb_rollout_on(instance, best, b, WhichPrior::Theta, k, horizon, &mut own)?.score();
        let r2 = anlb_rollout_on(instance, best, b, WhichPrior::ThetaPrime, k, horizon, &mut other)?.score();
        let d = r1 - r2;
        sum += d;
        sum_sq += d * d;
    }
    let m = rollouts as f64;
    let mean = sum / m;
    let var = (sum_sq - m * mean * mean) / (m - 1.0);
    Ok(GapEstimate {
        gap: mean,
        stderr: (var.max(0.0) / m).sqrt(),
    })
}
