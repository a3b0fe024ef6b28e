//! Conjugate posterior updates, the Gaussian log-marginal likelihood, and
//! the MLE-weighted mean estimator for adaptively stopped episodes.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Beta, Distribution};

use crate::envs::RewardModel;
use crate::error::{invalid, Error, Result};
use crate::linalg::{cholesky_pd, log_det_pd, MvnSampler};
use crate::priors::{BetaProductPrior, DiscretePrior, GaussianPrior, Prior};
use crate::rng::RngStream;
use crate::types::{ActionIndex, CovMatrix, MeanVector};

/// Per-arm pull counts and reward sums.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SufficientStats {
    counts: Vec<u64>,
    sums: Vec<f64>,
}

impl SufficientStats {
    pub fn new(num_arms: usize) -> Self {
        Self {
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
        }
    }

    pub fn from_parts(counts: Vec<u64>, sums: Vec<f64>) -> Result<Self> {
        if counts.len() != sums.len() {
            return Err(Error::DimensionMismatch {
                expected: counts.len(),
                got: sums.len(),
            });
        }
        Ok(Self { counts, sums })
    }

    pub fn record(&mut self, action: ActionIndex, reward: f64) {
        self.counts[action.0] += 1;
        self.sums[action.0] += reward;
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Empirical mean on arm `a`, if it was pulled.
    pub fn mean(&self, a: usize) -> Option<f64> {
        (self.counts[a] > 0).then(|| self.sums[a] / self.counts[a] as f64)
    }

    /// `D^{1/2}(x̄ − μ)` and `D^{1/2}` diagonal, with `D = diag(τ_a)/σ²`.
    fn whitened(&self, center: &DVector<f64>, obs_var: f64) -> (DVector<f64>, DVector<f64>) {
        let n = self.counts.len();
        let mut scale = DVector::zeros(n);
        let mut resid = DVector::zeros(n);
        for a in 0..n {
            if self.counts[a] > 0 {
                let tau = self.counts[a] as f64;
                scale[a] = (tau / obs_var).sqrt();
                resid[a] = scale[a] * (self.sums[a] / tau - center[a]);
            }
        }
        (scale, resid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPosterior {
    pub mean: MeanVector,
    pub cov: CovMatrix,
}

/// Posterior `N((Ψ⁻¹ + D)⁻¹(Ψ⁻¹ν + Dx̄), (Ψ⁻¹ + D)⁻¹)`, evaluated in the
/// equivalent form `Ψ − ΨS(I + SΨS)⁻¹SΨ` with `S = D^{1/2}` so that singular
/// prior covariances need no inversion.
pub fn gaussian_posterior(prior: &GaussianPrior, stats: &SufficientStats) -> Result<GaussianPosterior> {
    let n = prior.dim();
    if stats.num_arms() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: stats.num_arms(),
        });
    }
    if stats.total() == 0 {
        return Ok(GaussianPosterior {
            mean: prior.mean.clone(),
            cov: prior.cov.clone(),
        });
    }
    let (scale, resid) = stats.whitened(&prior.mean.0, prior.obs_var);
    let s = DMatrix::from_diagonal(&scale);
    let psi_s = &prior.cov.0 * &s;
    let k = DMatrix::identity(n, n) + &s * &psi_s;
    let ch = cholesky_pd(&k, "posterior precision")?;
    let gain_t = ch.solve(&psi_s.transpose());
    let cov = &prior.cov.0 - &psi_s * &gain_t;
    let mean = &prior.mean.0 + gain_t.transpose() * resid;
    Ok(GaussianPosterior {
        mean: MeanVector(mean),
        cov: CovMatrix(cov).symmetrized(),
    })
}

/// `−½(log det(I + ΣD) + ‖x̄ − μ‖²_B)` with `B = D − D(D + Σ⁻¹)⁻¹D`: the
/// log-evidence of the data up to an additive constant that depends only on
/// the data.
pub fn log_marginal_likelihood_gaussian(
    mu: &MeanVector,
    cov: &CovMatrix,
    stats: &SufficientStats,
    obs_var: f64,
) -> Result<f64> {
    let n = mu.len();
    if cov.dim() != n || stats.num_arms() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cov.dim().min(stats.num_arms()),
        });
    }
    if !(obs_var > 0.0) {
        return Err(invalid("obs_var", "must be positive"));
    }
    // With S = D^{1/2}: det(I + ΣD) = det(I + SΣS) and B = S(I + SΣS)⁻¹S.
    let (scale, resid) = stats.whitened(&mu.0, obs_var);
    let s = DMatrix::from_diagonal(&scale);
    let k = DMatrix::identity(n, n) + &s * &cov.0 * &s;
    let ch = cholesky_pd(&k, "D + Σ⁻¹")?;
    let quad = resid.dot(&ch.solve(&resid));
    Ok(-0.5 * (log_det_pd(&ch) + quad))
}

/// `Σ x̄ᵢ(1 − σ²_τᵢ) / Σ (1 − σ²_τᵢ)` with `σ²_τ = σ²/(σ₀²τ + σ²)`.
pub fn mle_weighted_mean(episodes: &[(f64, u64)], obs_var: f64, prior_var: f64) -> Result<f64> {
    if episodes.is_empty() {
        return Err(Error::Empty("mle_weighted_mean episodes"));
    }
    if episodes.iter().any(|&(_, tau)| tau == 0) {
        return Err(invalid("tau", "every episode needs at least one sample"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &(xbar, tau) in episodes {
        let shrink = obs_var / (prior_var * tau as f64 + obs_var);
        let w = 1.0 - shrink;
        num += xbar * w;
        den += w;
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaPosterior {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl BetaPosterior {
    pub fn mean(&self, a: usize) -> f64 {
        self.alpha[a] / (self.alpha[a] + self.beta[a])
    }
}

pub fn beta_posterior(prior: &BetaProductPrior, successes: &[u64], failures: &[u64]) -> Result<BetaPosterior> {
    let n = prior.dim();
    if successes.len() != n || failures.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: successes.len().max(failures.len()),
        });
    }
    Ok(BetaPosterior {
        alpha: prior.alpha.iter().zip(successes).map(|(a, &s)| a + s as f64).collect(),
        beta: prior.beta.iter().zip(failures).map(|(b, &f)| b + f as f64).collect(),
    })
}

const COLLAPSE_THRESHOLD: f64 = 1.0 - 1e-12;

/// Posterior over a finite atom set, kept as log-weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePosterior {
    atoms: Arc<[MeanVector]>,
    logw: Vec<f64>,
    probs: Vec<f64>,
    model: RewardModel,
    collapsed: Option<usize>,
}

impl DiscretePosterior {
    pub fn new(prior: &DiscretePrior, model: RewardModel) -> Self {
        let logw = prior.weights().iter().map(|w| w.ln()).collect();
        let mut post = Self {
            atoms: prior.shared_atoms(),
            logw,
            probs: Vec::new(),
            model,
            collapsed: None,
        };
        post.renormalize();
        post
    }

    fn renormalize(&mut self) {
        let max = self.logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = self.logw.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let heavy: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > COLLAPSE_THRESHOLD).collect();
        self.collapsed = (heavy.len() == 1).then(|| heavy[0]);
        self.probs = probs;
    }

    pub fn atoms(&self) -> &[MeanVector] {
        &self.atoms
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.logw
    }

    /// Normalized weights.
    pub fn weights(&self) -> &[f64] {
        &self.probs
    }

    pub fn collapsed(&self) -> Option<usize> {
        self.collapsed
    }

    pub fn model(&self) -> RewardModel {
        self.model
    }

    pub fn num_arms(&self) -> usize {
        self.atoms[0].len()
    }

    /// In-place Bayes update; on `OutsideSupport` the state is unchanged.
    pub fn observe(&mut self, action: ActionIndex, reward: f64) -> Result<()> {
        let a = ActionIndex::checked(action.0, self.num_arms())?.0;
        let updated: Vec<f64> = self
            .logw
            .iter()
            .zip(self.atoms.iter())
            .map(|(&lw, atom)| lw + self.model.log_likelihood(atom[a], reward))
            .collect();
        if updated.iter().all(|l| *l == f64::NEG_INFINITY || l.is_nan()) {
            return Err(Error::OutsideSupport);
        }
        self.logw = updated
            .into_iter()
            .map(|l| if l.is_nan() { f64::NEG_INFINITY } else { l })
            .collect();
        self.renormalize();
        Ok(())
    }

    pub fn updated(&self, action: ActionIndex, reward: f64) -> Result<Self> {
        let mut next = self.clone();
        next.observe(action, reward)?;
        Ok(next)
    }

    pub fn sample_atom(&self, rng: &mut RngStream) -> usize {
        match self.collapsed {
            Some(i) => i,
            None => rng.categorical(&self.probs),
        }
    }

    /// Total variation between the normalized weight vectors of two posteriors
    /// over the same atom list.
    pub fn tv(&self, other: &DiscretePosterior) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// Gaussian belief over mean vectors maintained by rank-one updates.
#[derive(Debug, Clone)]
pub struct GaussianBelief {
    obs_var: f64,
    post: GaussianPosterior,
    stats: SufficientStats,
    sampler: MvnSampler,
}

impl GaussianBelief {
    pub fn new(prior: &GaussianPrior) -> Result<Self> {
        Ok(Self {
            obs_var: prior.obs_var,
            sampler: MvnSampler::new(&prior.mean, &prior.cov)?,
            post: GaussianPosterior {
                mean: prior.mean.clone(),
                cov: prior.cov.clone(),
            },
            stats: SufficientStats::new(prior.dim()),
        })
    }

    pub fn posterior(&self) -> &GaussianPosterior {
        &self.post
    }

    pub fn stats(&self) -> &SufficientStats {
        &self.stats
    }

    pub fn obs_var(&self) -> f64 {
        self.obs_var
    }

    pub fn dim(&self) -> usize {
        self.post.mean.len()
    }

    /// Conditions on one reward `r ~ N(xᵀμ, σ²)`.
    pub fn observe_features(&mut self, x: &DVector<f64>, reward: f64) -> Result<()> {
        let cov_x = &self.post.cov.0 * x;
        let s = x.dot(&cov_x) + self.obs_var;
        let innovation = reward - x.dot(&self.post.mean.0);
        self.post.mean.0.axpy(innovation / s, &cov_x, 1.0);
        self.post.cov.0.ger(-1.0 / s, &cov_x, &cov_x, 1.0);
        self.post.cov = self.post.cov.symmetrized();
        self.sampler = MvnSampler::new(&self.post.mean, &self.post.cov)?;
        Ok(())
    }

    /// Conditions on a reward from arm `action`.
    pub fn observe(&mut self, action: ActionIndex, reward: f64) -> Result<()> {
        let a = ActionIndex::checked(action.0, self.dim())?.0;
        let mut e = DVector::zeros(self.dim());
        e[a] = 1.0;
        self.stats.record(action, reward);
        self.observe_features(&e, reward)
    }

    pub fn draw_into(&self, rng: &mut RngStream, out: &mut DVector<f64>) {
        self.sampler.sample_into(rng, out)
    }
}

/// Posterior state for any of the three prior families.
#[derive(Debug, Clone)]
pub enum PosteriorState {
    Gaussian(GaussianBelief),
    Beta(BetaPosterior),
    Discrete(DiscretePosterior),
}

impl PosteriorState {
    /// Initial posterior (the prior itself) for the given observation model.
    pub fn from_prior(prior: &Prior, model: RewardModel) -> Result<Self> {
        Ok(match prior {
            Prior::Gaussian(p) => {
                if !matches!(model, RewardModel::GaussianNoise { .. }) {
                    return Err(Error::Incompatible(format!(
                        "gaussian prior requires gaussian rewards, got {model:?}"
                    )));
                }
                PosteriorState::Gaussian(GaussianBelief::new(p)?)
            }
            Prior::Beta(p) => {
                if model != RewardModel::Bernoulli {
                    return Err(Error::Incompatible(format!(
                        "beta prior requires bernoulli rewards, got {model:?}"
                    )));
                }
                PosteriorState::Beta(BetaPosterior {
                    alpha: p.alpha.clone(),
                    beta: p.beta.clone(),
                })
            }
            Prior::Discrete(p) => PosteriorState::Discrete(DiscretePosterior::new(p, model)),
        })
    }

    pub fn num_arms(&self) -> usize {
        match self {
            PosteriorState::Gaussian(g) => g.dim(),
            PosteriorState::Beta(b) => b.alpha.len(),
            PosteriorState::Discrete(d) => d.num_arms(),
        }
    }

    /// Reward model used for look-ahead simulation.
    pub fn model(&self) -> RewardModel {
        match self {
            PosteriorState::Gaussian(g) => RewardModel::GaussianNoise { obs_var: g.obs_var },
            PosteriorState::Beta(_) => RewardModel::Bernoulli,
            PosteriorState::Discrete(d) => d.model(),
        }
    }

    pub fn observe(&mut self, action: ActionIndex, reward: f64) -> Result<()> {
        let a = ActionIndex::checked(action.0, self.num_arms())?.0;
        match self {
            PosteriorState::Gaussian(g) => g.observe(action, reward),
            PosteriorState::Beta(b) => {
                if reward == 1.0 {
                    b.alpha[a] += 1.0;
                } else if reward == 0.0 {
                    b.beta[a] += 1.0;
                } else {
                    return Err(invalid("reward", format!("bernoulli reward must be 0 or 1, got {reward}")));
                }
                Ok(())
            }
            PosteriorState::Discrete(d) => d.observe(action, reward),
        }
    }

    /// One posterior draw of the mean vector, written into `out`.
    pub fn draw_into(&self, rng: &mut RngStream, out: &mut DVector<f64>) {
        match self {
            PosteriorState::Gaussian(g) => g.draw_into(rng, out),
            PosteriorState::Beta(b) => {
                if out.len() != b.alpha.len() {
                    *out = DVector::zeros(b.alpha.len());
                }
                for (i, (&a, &bb)) in b.alpha.iter().zip(&b.beta).enumerate() {
                    out[i] = Beta::new(a, bb).expect("positive beta parameters").sample(rng);
                }
            }
            PosteriorState::Discrete(d) => {
                let atom = &d.atoms()[d.sample_atom(rng)];
                if out.len() != atom.len() {
                    *out = DVector::zeros(atom.len());
                }
                out.copy_from(&atom.0);
            }
        }
    }

    pub fn draw(&self, rng: &mut RngStream) -> MeanVector {
        let mut out = DVector::zeros(self.num_arms());
        self.draw_into(rng, &mut out);
        MeanVector(out)
    }

    /// The surviving atom when a discrete posterior has collapsed.
    pub fn collapsed_atom(&self) -> Option<&MeanVector> {
        match self {
            PosteriorState::Discrete(d) => d.collapsed().map(|i| &d.atoms()[i]),
            _ => None,
        }
    }
}
