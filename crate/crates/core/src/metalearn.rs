//! Explore-then-commit meta-learning over a stream of bandit episodes, with
//! oracle and misspecified baselines and a replicate harness.

use rayon::prelude::*;

use crate::envs::lincb::{play_weights, LinearCbEnv};
use crate::envs::{play_on_mean, play_uniform, EpisodeTrace, RewardModel};
use crate::error::{invalid, Error, Result};
use crate::estimators::{
    beta_binomial_mom, discrete_prior_freq, gaussian_cov_diff, gaussian_full_episode, gaussian_mean_first_round,
    lincb_prior_estimator, pair_episodes, LinEpisode, PairRecord,
};
use crate::policies::{monte_carlo_n, select_action, Policy, PolicyKind, TieBreak};
use crate::posteriors::{DiscretePosterior, PosteriorState};
use crate::priors::{
    sensitivity_bound, tv_discrete, tv_upper_beta, tv_upper_gaussian, BetaProductPrior, DiscretePrior,
    GaussianPrior, Prior, PriorSampler, TailSpec,
};
use crate::rng::RngStream;
use crate::types::{ActionIndex, CovMatrix, MeanVector};

/// How exploration episodes are played and the prior is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Uniform actions at every step; full-episode mean and covariance.
    GaussianFull,
    /// Uniform first step, TS under `N(ν̂, I)` afterwards; commits to `N(ν̂, I)`.
    GaussianNoCov,
    /// Uniform play with shared first-two-round actions across episode
    /// pairs; first-round mean and paired-difference covariance.
    GaussianMoments,
    /// Each episode pulls one arm `H` times; per-arm Beta-Binomial moments.
    BetaMom,
    /// Uniform play; counts the tasks identified by a collapsed posterior.
    DiscreteFreq,
    /// Uniform play; per-episode least squares.
    LinCbOls,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    Oracle,
    Misspecified(Prior),
    MetaEtc(Estimator),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePolicy {
    Ts,
    Kts { k: usize },
    Rhc2 { alpha: f64, k1: usize, k2: usize },
}

impl BasePolicy {
    pub fn kind(&self) -> PolicyKind {
        match *self {
            BasePolicy::Ts => PolicyKind::Ts,
            BasePolicy::Kts { k } => PolicyKind::Kts { k },
            BasePolicy::Rhc2 { alpha, k1, k2 } => PolicyKind::Rhc2 { alpha, k1, k2 },
        }
    }
}

/// The environment family episodes are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Mab { prior: Prior, model: RewardModel },
    LinCb(LinearCbEnv),
}

impl Task {
    fn true_prior(&self) -> Prior {
        match self {
            Task::Mab { prior, .. } => prior.clone(),
            Task::LinCb(env) => Prior::Gaussian(env.weight_prior.clone()),
        }
    }

    fn num_arms(&self) -> usize {
        match self {
            Task::Mab { prior, .. } => prior.num_arms(),
            Task::LinCb(env) => env.num_actions,
        }
    }

    fn obs_var(&self) -> f64 {
        match self {
            Task::Mab {
                model: RewardModel::GaussianNoise { obs_var },
                ..
            } => *obs_var,
            Task::LinCb(env) => env.obs_var,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaConfig {
    pub num_episodes: usize,
    pub explore_episodes: usize,
    pub horizon: usize,
    pub base_policy: BasePolicy,
    pub tie_break: TieBreak,
    pub baseline: Baseline,
    pub replicates: usize,
    pub seed: u64,
    /// Worker threads for replicates; 0 uses all cores.
    pub jobs: usize,
}

impl MetaConfig {
    pub fn validate(&self, task: &Task) -> Result<()> {
        if self.explore_episodes > self.num_episodes {
            return Err(invalid("explore_episodes", "must not exceed num_episodes"));
        }
        if self.horizon == 0 {
            return Err(invalid("horizon", "must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if let Task::LinCb(_) = task {
            if self.base_policy != BasePolicy::Ts {
                return Err(Error::Incompatible("linear bandits run thompson sampling only".into()));
            }
        }
        if let Baseline::Misspecified(p) = &self.baseline {
            if p.num_arms() != task.true_prior().num_arms() {
                return Err(Error::DimensionMismatch {
                    expected: task.true_prior().num_arms(),
                    got: p.num_arms(),
                });
            }
        }
        if let Baseline::MetaEtc(est) = self.baseline {
            let ok = matches!(
                (est, task),
                (
                    Estimator::GaussianFull | Estimator::GaussianNoCov | Estimator::GaussianMoments,
                    Task::Mab {
                        prior: Prior::Gaussian(_),
                        model: RewardModel::GaussianNoise { .. }
                    }
                ) | (
                    Estimator::BetaMom,
                    Task::Mab {
                        prior: Prior::Beta(_),
                        model: RewardModel::Bernoulli
                    }
                ) | (Estimator::DiscreteFreq, Task::Mab { prior: Prior::Discrete(_), .. })
                    | (Estimator::LinCbOls, Task::LinCb(_))
            );
            if !ok {
                return Err(Error::Incompatible(format!("estimator {est:?} does not fit this task")));
            }
            let needs_two_rounds = matches!(
                est,
                Estimator::GaussianFull | Estimator::GaussianMoments | Estimator::BetaMom
            );
            if needs_two_rounds && self.horizon < 2 && self.explore_episodes > 0 {
                return Err(invalid("horizon", "this estimator needs H >= 2"));
            }
        }
        Ok(())
    }
}

/// Outcome of one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRun {
    /// `Σ_h μ_{a_h}` per episode.
    pub rewards: Vec<f64>,
    pub first_actions: Vec<usize>,
    /// Prior the committed phase ran with (meta-learners only).
    pub estimate: Option<Prior>,
    /// Divergence between the committed prior and the truth.
    pub divergence: Option<f64>,
    pub estimator_failed: bool,
    pub support_fallbacks: u64,
}

/// Aggregate over replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaResult {
    /// Per-episode reward, mean and standard error over replicates.
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub runs: Vec<ReplicateRun>,
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

impl MetaResult {
    fn from_runs(runs: Vec<ReplicateRun>) -> Self {
        let len = runs.first().map_or(0, |r| r.rewards.len());
        let (mean, stderr) = (0..len)
            .map(|t| mean_and_stderr(&runs.iter().map(|r| r.rewards[t]).collect::<Vec<_>>()))
            .unzip();
        Self { mean, stderr, runs }
    }

    /// Cumulative average per-episode reward: mean and standard error over
    /// replicates at each episode.
    pub fn learning_curve(&self) -> (Vec<f64>, Vec<f64>) {
        let curves: Vec<Vec<f64>> = self
            .runs
            .iter()
            .map(|r| {
                let mut acc = 0.0;
                r.rewards
                    .iter()
                    .enumerate()
                    .map(|(t, x)| {
                        acc += x;
                        acc / (t + 1) as f64
                    })
                    .collect()
            })
            .collect();
        let len = self.mean.len();
        (0..len)
            .map(|t| mean_and_stderr(&curves.iter().map(|c| c[t]).collect::<Vec<_>>()))
            .unzip()
    }

    /// Average per-episode reward over episodes `from..`, as mean and
    /// standard error over replicates.
    pub fn window_average(&self, from: usize) -> (f64, f64) {
        let per_run: Vec<f64> = self
            .runs
            .iter()
            .map(|r| {
                let tail = &r.rewards[from.min(r.rewards.len())..];
                tail.iter().sum::<f64>() / tail.len().max(1) as f64
            })
            .collect();
        mean_and_stderr(&per_run)
    }

    /// Empirical distribution of the first action over all episodes and
    /// replicates.
    pub fn first_action_freq(&self, num_arms: usize) -> Vec<f64> {
        let mut counts = vec![0usize; num_arms];
        let mut total = 0usize;
        for r in &self.runs {
            for &a in &r.first_actions {
                counts[a] += 1;
                total += 1;
            }
        }
        counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
    }
}

/// Uniform-weight fallback over the true prior's atoms, for discrete tasks.
fn support_fallback(task: &Task) -> Option<Prior> {
    match task {
        Task::Mab {
            prior: Prior::Discrete(p),
            ..
        } => DiscretePrior::uniform(p.shared_atoms()).ok().map(Prior::Discrete),
        _ => None,
    }
}

fn default_prior(task: &Task) -> Result<Prior> {
    Ok(match task.true_prior() {
        Prior::Gaussian(p) => Prior::Gaussian(GaussianPrior::standard(p.dim(), task.obs_var())),
        Prior::Beta(p) => Prior::Beta(BetaProductPrior::uniform(p.dim())),
        Prior::Discrete(p) => Prior::Discrete(DiscretePrior::uniform(p.shared_atoms())?),
    })
}

/// Divergence diagnostic between an estimate and the truth: exact TV for
/// discrete priors, the Pinsker upper bound otherwise.
pub fn prior_divergence(estimate: &Prior, truth: &Prior) -> Option<f64> {
    match (estimate, truth) {
        (Prior::Gaussian(p), Prior::Gaussian(q)) => tv_upper_gaussian(p, q).ok(),
        (Prior::Beta(p), Prior::Beta(q)) => tv_upper_beta(p, q).ok(),
        (Prior::Discrete(p), Prior::Discrete(q)) => Some(tv_discrete(p, q)),
        _ => None,
    }
}

struct Runner<'a> {
    config: &'a MetaConfig,
    task: &'a Task,
    sampler: Option<PriorSampler>,
    fallback: Option<Prior>,
    run: ReplicateRun,
}

impl Runner<'_> {
    fn draw_mean(&self, rng: &mut RngStream) -> Result<MeanVector> {
        match (&self.sampler, self.task) {
            (Some(s), _) => Ok(s.sample(rng)),
            (None, Task::LinCb(env)) => {
                crate::linalg::mvn_sample(&env.weight_prior.mean, &env.weight_prior.cov, rng)
            }
            (None, Task::Mab { prior, .. }) => prior.sample_mean(rng),
        }
    }

    fn record(&mut self, trace: &EpisodeTrace) {
        self.run.rewards.push(trace.score());
        if let Some(a) = trace.first_action() {
            self.run.first_actions.push(a.0);
        }
        self.run.support_fallbacks += trace.support_fallbacks as u64;
    }

    fn play_policy(&mut self, policy: &Policy, rng: &mut RngStream) -> Result<()> {
        let mean = self.draw_mean(rng)?;
        let trace = match self.task {
            Task::Mab { model, .. } => {
                play_on_mean(mean, policy, self.config.horizon, *model, self.fallback.as_ref(), rng)?
            }
            Task::LinCb(env) => {
                let Prior::Gaussian(p) = policy.prior() else {
                    return Err(Error::Incompatible("linear bandit needs a gaussian prior".into()));
                };
                play_weights(env, mean, Some((p, policy.tie_break())), self.config.horizon, rng)?.trace
            }
        };
        self.record(&trace);
        Ok(())
    }

    fn policy(&self, prior: Prior) -> Result<Policy> {
        Ok(Policy::new(self.config.base_policy.kind(), prior)?.with_tie_break(self.config.tie_break))
    }

    fn commit(&mut self, prior: Prior, from: usize, rng: &mut RngStream) -> Result<()> {
        let policy = self.policy(prior)?;
        for _ in from..self.config.num_episodes {
            self.play_policy(&policy, rng)?;
        }
        Ok(())
    }

    fn fitted(&mut self, fit: Result<Prior>) -> Result<Prior> {
        match fit {
            Ok(p) => Ok(p),
            Err(e) => {
                log::info!("prior estimate failed ({e}); committing to the fallback prior");
                self.run.estimator_failed = true;
                default_prior(self.task)
            }
        }
    }

    fn meta_etc(&mut self, est: Estimator, rng: &mut RngStream) -> Result<Prior> {
        let t0 = self.config.explore_episodes;
        let h = self.config.horizon;
        let n = self.task.num_arms();
        if t0 == 0 {
            self.run.estimator_failed = true;
            return default_prior(self.task);
        }
        let obs_var = self.task.obs_var();
        match (est, self.task) {
            (Estimator::GaussianFull, Task::Mab { model, .. }) => {
                let mut episodes = Vec::with_capacity(t0);
                for _ in 0..t0 {
                    let trace = play_uniform(self.draw_mean(rng)?, h, *model, rng)?;
                    self.record(&trace);
                    episodes.push(trace.actions.iter().map(|a| a.0).zip(trace.rewards.iter().copied()).collect());
                }
                let fit = gaussian_full_episode(&episodes, n, h, obs_var)
                    .and_then(|e| GaussianPrior::new(e.mean_hat, e.cov_hat, obs_var))
                    .map(Prior::Gaussian);
                self.fitted(fit)
            }
            (Estimator::GaussianNoCov, Task::Mab { model, .. }) => {
                let mut first = Vec::with_capacity(t0);
                for t in 0..t0 {
                    let nu = if t == 0 {
                        MeanVector::zeros(n)
                    } else {
                        gaussian_mean_first_round(&first, n)?
                    };
                    let prior = Prior::Gaussian(GaussianPrior::new(nu, CovMatrix::identity(n), obs_var)?);
                    let policy = self.policy(prior)?;
                    let trace = self.uniform_then_policy(&policy, *model, 1, rng)?;
                    first.push((trace.actions[0].0, trace.rewards[0]));
                    self.record(&trace);
                }
                let fit = gaussian_mean_first_round(&first, n)
                    .and_then(|nu| GaussianPrior::new(nu, CovMatrix::identity(n), obs_var))
                    .map(Prior::Gaussian);
                self.fitted(fit)
            }
            (Estimator::GaussianMoments, Task::Mab { model, .. }) => {
                let mut rounds = Vec::with_capacity(t0);
                let mut shared = (0, 0);
                for t in 0..t0 {
                    if t % 2 == 0 {
                        shared = (rng.below(n), rng.below(n));
                    }
                    let mean = self.draw_mean(rng)?;
                    let mut trace = play_uniform(mean, h, *model, rng)?;
                    // Replay the first two steps on the shared actions.
                    for (step, a) in [shared.0, shared.1].into_iter().enumerate() {
                        let mu = trace.realized_mean[a];
                        trace.actions[step] = ActionIndex(a);
                        trace.step_means[step] = mu;
                        trace.rewards[step] = model.sample(mu, rng);
                    }
                    rounds.push(PairRecord {
                        a: shared.0,
                        r: trace.rewards[0],
                        b: shared.1,
                        s: trace.rewards[1],
                    });
                    self.record(&trace);
                }
                let first: Vec<(usize, f64)> = rounds.iter().map(|p| (p.a, p.r)).collect();
                let even = rounds.len() - rounds.len() % 2;
                let fit = gaussian_mean_first_round(&first, n).and_then(|nu| {
                    let cov = gaussian_cov_diff(&pair_episodes(&rounds[..even])?, n)?;
                    let cov = crate::linalg::psd_project(&cov)?;
                    Ok(Prior::Gaussian(GaussianPrior::new(nu, cov, obs_var)?))
                });
                self.fitted(fit)
            }
            (Estimator::BetaMom, Task::Mab { model, .. }) => {
                let mut samples: Vec<Vec<u32>> = vec![Vec::new(); n];
                for t in 0..t0 {
                    let arm = t * n / t0;
                    let mean = self.draw_mean(rng)?;
                    let mu = mean[arm];
                    let mut trace = play_uniform(mean, 0, *model, rng)?;
                    trace.horizon = h;
                    let mut successes = 0;
                    for _ in 0..h {
                        let r = model.sample(mu, rng);
                        successes += (r == 1.0) as u32;
                        trace.actions.push(ActionIndex(arm));
                        trace.rewards.push(r);
                        trace.step_means.push(mu);
                    }
                    samples[arm].push(successes);
                    self.record(&trace);
                }
                let (mut alpha, mut beta) = (Vec::with_capacity(n), Vec::with_capacity(n));
                for (arm, s) in samples.iter().enumerate() {
                    match beta_binomial_mom(s, h as u32) {
                        Ok(e) => {
                            alpha.push(e.alpha_hat);
                            beta.push(e.beta_hat);
                        }
                        Err(e) => {
                            log::info!("moment fit for arm {arm} failed ({e}); using Beta(1, 1)");
                            self.run.estimator_failed = true;
                            alpha.push(1.0);
                            beta.push(1.0);
                        }
                    }
                }
                Ok(Prior::Beta(BetaProductPrior::new(alpha, beta)?))
            }
            (
                Estimator::DiscreteFreq,
                Task::Mab {
                    prior: Prior::Discrete(truth),
                    model,
                },
            ) => {
                let tracker = DiscretePosterior::new(&DiscretePrior::uniform(truth.shared_atoms())?, *model);
                let mut counts = vec![0u64; truth.atoms().len()];
                for _ in 0..t0 {
                    let trace = play_uniform(self.draw_mean(rng)?, h, *model, rng)?;
                    let mut post = tracker.clone();
                    for (&a, &r) in trace.actions.iter().zip(&trace.rewards) {
                        post.observe(a, r)?;
                    }
                    if let Some(i) = post.collapsed() {
                        counts[i] += 1;
                    }
                    self.record(&trace);
                }
                let fit = discrete_prior_freq(&counts, truth).map(Prior::Discrete);
                self.fitted(fit)
            }
            (Estimator::LinCbOls, Task::LinCb(env)) => {
                let mut episodes = Vec::with_capacity(t0);
                for _ in 0..t0 {
                    let t = play_weights(env, self.draw_mean(rng)?, None, h, rng)?;
                    self.record(&t.trace);
                    episodes.push(LinEpisode {
                        features: t.features,
                        rewards: t.trace.rewards,
                    });
                }
                let fit = lincb_prior_estimator(&episodes, env.dim(), env.obs_var).and_then(|e| {
                    if e.skipped > 0 {
                        log::info!("{} exploration episodes had singular designs", e.skipped);
                    }
                    GaussianPrior::new(e.estimate.mean_hat, e.estimate.cov_hat, env.obs_var).map(Prior::Gaussian)
                });
                self.fitted(fit)
            }
            _ => Err(Error::Incompatible(format!("estimator {est:?} does not fit this task"))),
        }
    }

    /// Uniform actions for the first `uniform_steps` steps, then `policy`
    /// with its posterior conditioned on everything observed so far.
    fn uniform_then_policy(
        &self,
        policy: &Policy,
        model: RewardModel,
        uniform_steps: usize,
        rng: &mut RngStream,
    ) -> Result<EpisodeTrace> {
        let h = self.config.horizon;
        let mean = self.draw_mean(rng)?;
        let mut trace = play_uniform(mean, uniform_steps.min(h), model, rng)?;
        trace.horizon = h;
        let mut post = PosteriorState::from_prior(policy.prior(), model)?;
        for (&a, &r) in trace.actions.iter().zip(&trace.rewards) {
            post.observe(a, r)?;
        }
        for _ in trace.actions.len()..h {
            let a = select_action(policy, &post, rng)?;
            let mu = trace.realized_mean[a.0];
            let r = model.sample(mu, rng);
            post.observe(a, r)?;
            trace.actions.push(a);
            trace.rewards.push(r);
            trace.step_means.push(mu);
        }
        Ok(trace)
    }
}

/// Runs one replicate of the configured algorithm.
pub fn run_meta(config: &MetaConfig, task: &Task, rng: &mut RngStream) -> Result<ReplicateRun> {
    config.validate(task)?;
    let truth = task.true_prior();
    let mut runner = Runner {
        config,
        task,
        sampler: match task {
            Task::Mab { prior, .. } => Some(prior.sampler()?),
            Task::LinCb(_) => None,
        },
        fallback: support_fallback(task),
        run: ReplicateRun {
            rewards: Vec::with_capacity(config.num_episodes),
            first_actions: Vec::with_capacity(config.num_episodes),
            estimate: None,
            divergence: None,
            estimator_failed: false,
            support_fallbacks: 0,
        },
    };
    match &config.baseline {
        Baseline::Oracle => runner.commit(truth, 0, rng)?,
        Baseline::Misspecified(p) => {
            runner.run.divergence = prior_divergence(p, &truth);
            runner.commit(p.clone(), 0, rng)?
        }
        Baseline::MetaEtc(est) => {
            let fitted = runner.meta_etc(*est, rng)?;
            runner.run.divergence = prior_divergence(&fitted, &truth);
            runner.run.estimate = Some(fitted.clone());
            runner.commit(fitted, config.explore_episodes, rng)?;
        }
    }
    Ok(runner.run)
}

/// Runs `config.replicates` replicates, replicate `r` on stream `r` of
/// `config.seed`, and aggregates them in replicate order.
pub fn run_replicates(config: &MetaConfig, task: &Task) -> Result<MetaResult> {
    config.validate(task)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| invalid("jobs", e.to_string()))?;
    let runs = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| run_meta(config, task, &mut RngStream::new(config.seed, r as u64)))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(MetaResult::from_runs(runs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub values: Vec<f64>,
    /// Index of the series attaining the maximum at each point.
    pub argmax: Vec<usize>,
}

/// Pointwise maximum over equal-length series.
pub fn upper_envelope(series: &[Vec<f64>]) -> Result<Envelope> {
    let Some(first) = series.first() else {
        return Err(Error::Empty("envelope series"));
    };
    let len = first.len();
    if let Some(bad) = series.iter().find(|s| s.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: bad.len(),
        });
    }
    let mut env = Envelope {
        values: first.clone(),
        argmax: vec![0; len],
    };
    for (i, s) in series.iter().enumerate().skip(1) {
        for t in 0..len {
            if s[t] > env.values[t] {
                env.values[t] = s[t];
                env.argmax[t] = i;
            }
        }
    }
    Ok(env)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityOutcome {
    pub measured_gap: f64,
    pub gap_stderr: f64,
    pub bound: f64,
    pub tv: f64,
    /// Exact `B` with every mean in `[−B, B]` under both priors.
    pub bound_b: f64,
    pub n: u64,
}

fn max_abs_mean(p: &DiscretePrior) -> f64 {
    p.atoms()
        .iter()
        .zip(p.weights())
        .filter(|(_, &w)| w > 0.0)
        .flat_map(|(a, _)| a.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
}

/// Monte-Carlo `R(θ, alg(θ)) − R(θ, alg(θ′))` from paired episodes that
/// share the environment draw, next to the sensitivity bound evaluated at
/// the exact TV distance and range of the two priors.
pub fn sensitivity_experiment(
    theta: &DiscretePrior,
    theta_prime: &DiscretePrior,
    kind: PolicyKind,
    horizon: usize,
    trials: usize,
    model: RewardModel,
    rng: &mut RngStream,
) -> Result<SensitivityOutcome> {
    if trials < 2 {
        return Err(invalid("trials", "need at least 2"));
    }
    let own = Policy::new(kind.clone(), Prior::Discrete(theta.clone()))?;
    let other = Policy::new(kind, Prior::Discrete(theta_prime.clone()))?;
    let fallback = Prior::Discrete(DiscretePrior::uniform(theta_prime.shared_atoms())?);
    let env = Prior::Discrete(theta.clone()).sampler()?;
    let (mut r1, mut r2) = (rng.substream(1), rng.substream(2));
    let mut diffs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mean = env.sample(rng);
        let a = play_on_mean(mean.clone(), &own, horizon, model, None, &mut r1)?.score();
        let b = play_on_mean(mean, &other, horizon, model, Some(&fallback), &mut r2)?.score();
        diffs.push(a - b);
    }
    let (gap, se) = mean_and_stderr(&diffs);
    let tv = tv_discrete(theta, theta_prime);
    let b = max_abs_mean(theta).max(max_abs_mean(theta_prime));
    let n = monte_carlo_n(&own);
    Ok(SensitivityOutcome {
        measured_gap: gap,
        gap_stderr: se,
        bound: sensitivity_bound(n, horizon as u64, tv, TailSpec::Bounded { bound: b }, theta.dim()),
        tv,
        bound_b: b,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::lower_bound::make_lb_pair;
    use crate::envs::presets;

    fn small_gaussian_task() -> Task {
        Task::Mab {
            prior: Prior::Gaussian(presets::gaussian_mab_prior()),
            model: RewardModel::GaussianNoise { obs_var: 1.0 },
        }
    }

    fn config(baseline: Baseline, t: usize, t0: usize, r: usize) -> MetaConfig {
        MetaConfig {
            num_episodes: t,
            explore_episodes: t0,
            horizon: 10,
            base_policy: BasePolicy::Ts,
            tie_break: TieBreak::LowestIndex,
            baseline,
            replicates: r,
            seed: 17,
            jobs: 2,
        }
    }

    #[test]
    fn envelope_examples() {
        let single = upper_envelope(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(single.values, vec![1.0, 2.0]);
        let c = upper_envelope(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(c.values, vec![2.0, 2.0]);
        let x = upper_envelope(&[vec![1.0, 3.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(x.values, vec![2.0, 3.0]);
        assert_eq!(x.argmax, vec![1, 0]);
        assert!(upper_envelope(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn zero_exploration_equals_fallback_prior() {
        let task = small_gaussian_task();
        let meta = run_meta(
            &config(Baseline::MetaEtc(Estimator::GaussianFull), 30, 0, 1),
            &task,
            &mut RngStream::new(1, 0),
        )
        .unwrap();
        let mis = run_meta(
            &config(
                Baseline::Misspecified(Prior::Gaussian(GaussianPrior::standard(6, 1.0))),
                30,
                0,
                1,
            ),
            &task,
            &mut RngStream::new(1, 0),
        )
        .unwrap();
        assert_eq!(meta.rewards, mis.rewards);
    }

    #[test]
    fn oracle_on_point_mass_earns_max() {
        let atom = MeanVector::new(vec![0.3, 0.8, 0.1]);
        let task = Task::Mab {
            prior: Prior::Discrete(DiscretePrior::point_mass(atom)),
            model: RewardModel::Deterministic,
        };
        let res = run_replicates(&config(Baseline::Oracle, 20, 0, 3), &task).unwrap();
        assert!(res.mean.iter().all(|&m| (m - 8.0).abs() < 1e-12));
    }

    #[test]
    fn replicates_are_independent_and_order_free() {
        let task = small_gaussian_task();
        let mut c = config(Baseline::Oracle, 20, 0, 2);
        let res = run_replicates(&c, &task).unwrap();
        assert_ne!(res.runs[0].rewards, res.runs[1].rewards);
        c.jobs = 1;
        let serial = run_replicates(&c, &task).unwrap();
        assert_eq!(res, serial);
    }

    #[test]
    fn doubling_replicates_shrinks_stderr() {
        let task = small_gaussian_task();
        let small = run_replicates(&config(Baseline::Oracle, 50, 0, 40), &task).unwrap();
        let big = run_replicates(&config(Baseline::Oracle, 50, 0, 80), &task).unwrap();
        let ratio = small.window_average(0).1 / big.window_average(0).1;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.25, "ratio {ratio}");
    }

    #[test]
    fn all_exploration_matches_uniform_play() {
        let task = small_gaussian_task();
        let res = run_replicates(&config(Baseline::MetaEtc(Estimator::GaussianFull), 400, 400, 4), &task).unwrap();
        let (m, se) = res.window_average(0);
        let uniform = 10.0 * 0.6 / 6.0;
        assert!((m - uniform).abs() < 4.0 * se + 0.05, "{m} vs {uniform}");
    }

    #[test]
    fn estimators_run_for_every_family() {
        let beta = Task::Mab {
            prior: Prior::Beta(BetaProductPrior::new(vec![2.0, 1.0], vec![1.0, 3.0]).unwrap()),
            model: RewardModel::Bernoulli,
        };
        let r = run_meta(&config(Baseline::MetaEtc(Estimator::BetaMom), 400, 300, 1), &beta, &mut RngStream::new(3, 0))
            .unwrap();
        assert!(matches!(r.estimate, Some(Prior::Beta(_))));
        assert_eq!(r.rewards.len(), 400);

        let discrete = Task::Mab {
            prior: Prior::Discrete(presets::discrete_prior()),
            model: RewardModel::Deterministic,
        };
        let r = run_meta(
            &config(Baseline::MetaEtc(Estimator::DiscreteFreq), 100, 60, 1),
            &discrete,
            &mut RngStream::new(3, 0),
        )
        .unwrap();
        assert!(matches!(r.estimate, Some(Prior::Discrete(_))));

        let lin = Task::LinCb(presets::lincb_env());
        let mut c = config(Baseline::MetaEtc(Estimator::LinCbOls), 60, 40, 1);
        c.horizon = 20;
        let r = run_meta(&c, &lin, &mut RngStream::new(3, 0)).unwrap();
        assert!(!r.estimator_failed);

        for est in [Estimator::GaussianNoCov, Estimator::GaussianMoments] {
            let r = run_meta(&config(Baseline::MetaEtc(est), 60, 40, 1), &small_gaussian_task(), &mut RngStream::new(3, 0))
                .unwrap();
            assert!(matches!(r.estimate, Some(Prior::Gaussian(_))));
        }
    }

    #[test]
    fn incompatible_estimator_is_rejected() {
        let c = config(Baseline::MetaEtc(Estimator::BetaMom), 10, 5, 1);
        assert!(matches!(c.validate(&small_gaussian_task()), Err(Error::Incompatible(_))));
        let c = config(Baseline::Oracle, 10, 20, 1);
        assert!(c.validate(&small_gaussian_task()).is_err());
    }

    #[test]
    fn discrete_freq_recovers_head_mass() {
        let task = Task::Mab {
            prior: Prior::Discrete(presets::discrete_prior()),
            model: RewardModel::Deterministic,
        };
        let r = run_meta(
            &config(Baseline::MetaEtc(Estimator::DiscreteFreq), 200, 200, 1),
            &task,
            &mut RngStream::new(8, 0),
        )
        .unwrap();
        let Some(Prior::Discrete(p)) = r.estimate else { panic!() };
        let head: f64 = p.weights()[..4].iter().sum();
        assert!((head - 0.9).abs() < 0.06, "head mass {head}");
    }

    #[test]
    fn sensitivity_examples() {
        let (theta, theta_prime) = make_lb_pair(0.05).unwrap();
        let mut rng = RngStream::new(5, 0);
        let same = sensitivity_experiment(&theta, &theta, PolicyKind::Ts, 5, 1000, RewardModel::Bernoulli, &mut rng)
            .unwrap();
        assert_eq!(same.bound, 0.0);
        assert!(same.measured_gap.abs() <= 3.0 * same.gap_stderr + 1e-12);
        let s = sensitivity_experiment(&theta, &theta_prime, PolicyKind::Ts, 5, 5000, RewardModel::Bernoulli, &mut rng)
            .unwrap();
        assert!((s.bound - 2.5).abs() < 1e-12);
        assert!(s.measured_gap <= s.bound + 3.0 * s.gap_stderr);
    }
}
