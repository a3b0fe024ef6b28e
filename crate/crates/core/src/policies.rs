//! The n-Monte-Carlo policy family: Thompson sampling, k-shot TS, generic
//! (k, f)-posterior sampling and two-step receding-horizon control.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::RngCore;

use crate::error::{invalid, Error, Result};
use crate::posteriors::PosteriorState;
use crate::priors::Prior;
use crate::rng::RngStream;
use crate::types::{argmax_random_tiebreak, argmax_tiebreak, ActionIndex, MeanVector};

/// Maps `k` posterior draws to a probability vector over actions.
pub type Selector = Arc<dyn Fn(&[MeanVector]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum PolicyKind {
    Ts,
    Kts { k: usize },
    PosteriorSample { k: usize, selector: Selector },
    Rhc2 { alpha: f64, k1: usize, k2: usize },
}

impl fmt::Debug for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Ts => write!(f, "Ts"),
            PolicyKind::Kts { k } => write!(f, "Kts {{ k: {k} }}"),
            PolicyKind::PosteriorSample { k, .. } => write!(f, "PosteriorSample {{ k: {k} }}"),
            PolicyKind::Rhc2 { alpha, k1, k2 } => write!(f, "Rhc2 {{ alpha: {alpha}, k1: {k1}, k2: {k2} }}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
    Random,
}

/// A policy together with its internal (possibly misspecified) prior.
#[derive(Debug, Clone)]
pub struct Policy {
    kind: PolicyKind,
    prior: Prior,
    tie_break: TieBreak,
}

impl Policy {
    pub fn new(kind: PolicyKind, prior: Prior) -> Result<Self> {
        match &kind {
            PolicyKind::Kts { k } | PolicyKind::PosteriorSample { k, .. } if *k == 0 => {
                return Err(invalid("k", "must be at least 1"))
            }
            PolicyKind::Rhc2 { alpha, k1, k2 } => {
                if !(0.0..=1.0).contains(alpha) {
                    return Err(invalid("alpha", "must lie in [0, 1]"));
                }
                if *k1 == 0 || *k2 == 0 {
                    return Err(invalid("k1/k2", "must be at least 1"));
                }
            }
            _ => {}
        }
        Ok(Self {
            kind,
            prior,
            tie_break: TieBreak::LowestIndex,
        })
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    /// Same policy with a different internal prior.
    pub fn with_prior(&self, prior: Prior) -> Self {
        Self {
            kind: self.kind.clone(),
            prior,
            tie_break: self.tie_break,
        }
    }

    pub fn kind(&self) -> &PolicyKind {
        &self.kind
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    pub fn num_arms(&self) -> usize {
        self.prior.num_arms()
    }
}

/// Number of posterior samples the policy consumes per decision.
pub fn monte_carlo_n(policy: &Policy) -> u64 {
    match policy.kind {
        PolicyKind::Ts => 1,
        PolicyKind::Kts { k } | PolicyKind::PosteriorSample { k, .. } => k as u64,
        PolicyKind::Rhc2 { k1, k2, .. } => (policy.num_arms() * k1 * (2 * k2 + 3)) as u64,
    }
}

fn argmax(values: &[f64], tie_break: TieBreak, rng: &mut RngStream) -> Result<ActionIndex> {
    match tie_break {
        TieBreak::LowestIndex => argmax_tiebreak(values),
        TieBreak::Random => argmax_random_tiebreak(values, rng),
    }
}

pub fn select_action(policy: &Policy, posterior: &PosteriorState, rng: &mut RngStream) -> Result<ActionIndex> {
    let n = policy.num_arms();
    if posterior.num_arms() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: posterior.num_arms(),
        });
    }
    if let Some(atom) = posterior.collapsed_atom() {
        return argmax(atom.as_slice(), policy.tie_break, rng);
    }
    match &policy.kind {
        PolicyKind::Ts => {
            let mut buf = DVector::zeros(n);
            posterior.draw_into(rng, &mut buf);
            argmax(buf.as_slice(), policy.tie_break, rng)
        }
        PolicyKind::Kts { k } => {
            let mut buf = DVector::zeros(n);
            let mut best = vec![f64::NEG_INFINITY; n];
            for _ in 0..*k {
                posterior.draw_into(rng, &mut buf);
                for (b, v) in best.iter_mut().zip(buf.iter()) {
                    *b = b.max(*v);
                }
            }
            argmax(&best, policy.tie_break, rng)
        }
        PolicyKind::PosteriorSample { k, selector } => {
            let draws: Vec<MeanVector> = (0..*k).map(|_| posterior.draw(rng)).collect();
            let probs = selector(&draws);
            if probs.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: probs.len(),
                });
            }
            if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || probs.iter().sum::<f64>() <= 0.0 {
                return Err(invalid("selector", "must return a probability vector"));
            }
            Ok(ActionIndex(rng.categorical(&probs)))
        }
        PolicyKind::Rhc2 { alpha, k1, k2 } => {
            let base = rng.next_u64();
            let values = (0..n)
                .map(|a| rhc2_value_seeded(*alpha, *k1, *k2, posterior, ActionIndex(a), base))
                .collect::<Result<Vec<_>>>()?;
            argmax(&values, policy.tie_break, rng)
        }
    }
}

/// `V_a = Σ_i ((1−α)μ̃_a^{(a,i)} + α·max_{a'} (1/k₂)Σ_j μ̂_{a'}^{(a,i,j)})`, where
/// `μ̃^{(a,i)}` is a posterior draw, `r̃ ~ D(μ̃^{(a,i)})` is a hallucinated
/// reward on arm `a`, and the `μ̂^{(a,i,j)}` are draws from the posterior
/// updated with `(a, r̃)`.
pub fn rhc2_value(
    alpha: f64,
    k1: usize,
    k2: usize,
    posterior: &PosteriorState,
    action: ActionIndex,
    rng: &mut RngStream,
) -> Result<f64> {
    let base = rng.next_u64();
    rhc2_value_seeded(alpha, k1, k2, posterior, action, base)
}

// Sample i of arm a runs on its own stream `a·k1 + i` under a shared base
// seed, so arms can be evaluated in any order with identical results.
fn rhc2_value_seeded(
    alpha: f64,
    k1: usize,
    k2: usize,
    posterior: &PosteriorState,
    action: ActionIndex,
    base: u64,
) -> Result<f64> {
    let n = posterior.num_arms();
    let a = ActionIndex::checked(action.0, n)?.0;
    let model = posterior.model();
    let mut draw = DVector::zeros(n);
    let mut look = DVector::zeros(n);
    let mut total = 0.0;
    for i in 0..k1 {
        let mut rng = RngStream::new(base, (a * k1 + i) as u64);
        posterior.draw_into(&mut rng, &mut draw);
        let mut value = (1.0 - alpha) * draw[a];
        if alpha > 0.0 {
            let r = model.sample(draw[a], &mut rng);
            let mut ahead = posterior.clone();
            ahead.observe(action, r)?;
            let mut avg = DVector::<f64>::zeros(n);
            for _ in 0..k2 {
                ahead.draw_into(&mut rng, &mut look);
                avg += &look;
            }
            value += alpha * avg.max() / k2 as f64;
        }
        total += value;
    }
    Ok(total)
}

/// Softmax over the per-arm sums `Σ_i μ̃_a^{(i)}` at the given temperature.
pub fn softmax_selector(temperature: f64) -> Result<Selector> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(invalid("temperature", "must be positive"));
    }
    Ok(Arc::new(move |draws: &[MeanVector]| {
        let n = draws.first().map_or(0, |d| d.len());
        let mut sums = vec![0.0; n];
        for d in draws {
            for (s, v) in sums.iter_mut().zip(d.iter()) {
                *s += v;
            }
        }
        let max = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = sums.iter().map(|s| ((s - max) / temperature).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        probs
    }))
}
