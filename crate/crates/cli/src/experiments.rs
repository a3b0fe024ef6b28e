//! The six experiment suites.

use std::path::{Path, PathBuf};

use priorsens::envs::presets;
use priorsens::{
    anlb_reward_gap, lb_two_arm_tv, make_anlb_instance, make_lb_pair, run_meta, run_replicates,
    sensitivity_experiment, upper_envelope, BasePolicy, Baseline, Estimator, GaussianPrior, MetaConfig, MetaResult,
    Prior, RewardModel, RngStream, Task, TieBreak,
};

use crate::config::{require, ExperimentConfig};
use crate::output::{self, BoundsRow, EstimateRow, LearningCurveRow, LowerBoundRow};
use crate::CliError;

/// `δ` of the `A_n` reward-gap instances, and their size in the sensitivity grid.
const ANLB_DELTA: f64 = 1.0 / 64.0;
const SENSITIVITY_ANLB_ARMS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Sensitivity,
    LowerBound,
    MetaGaussian,
    MetaLinCb,
    MetaDiscrete,
    Estimate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sensitivity => "sensitivity",
            Experiment::LowerBound => "lowerbound",
            Experiment::MetaGaussian => "meta-gaussian",
            Experiment::MetaLinCb => "meta-lincb",
            Experiment::MetaDiscrete => "meta-discrete",
            Experiment::Estimate => "estimate",
        }
    }

    fn default_preset(self) -> &'static str {
        match self {
            Experiment::MetaLinCb => "appA-lincb",
            Experiment::MetaDiscrete => "appA-discrete",
            _ => "appA-mab",
        }
    }
}

/// Resolved settings shared by every experiment.
pub struct Run<'a> {
    pub config: &'a ExperimentConfig,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Runs `exp`, writes its CSVs and returns the summary line.
pub fn run(exp: Experiment, ctx: &Run) -> Result<String, CliError> {
    std::fs::create_dir_all(&ctx.out_dir)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", ctx.out_dir.display())))?;
    match exp {
        Experiment::Sensitivity => sensitivity(ctx),
        Experiment::LowerBound => lowerbound(ctx),
        Experiment::MetaGaussian | Experiment::MetaLinCb | Experiment::MetaDiscrete => meta(exp, ctx),
        Experiment::Estimate => estimate(ctx),
    }
}

fn config_err(e: priorsens::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn base_policy(c: &ExperimentConfig) -> Result<BasePolicy, CliError> {
    match c.base_policy.as_deref().unwrap_or("ts") {
        "ts" => Ok(BasePolicy::Ts),
        "kts" => Ok(BasePolicy::Kts { k: c.k.unwrap_or(1) }),
        "rhc2" => Ok(kg_policy(c)),
        other => Err(CliError::Config(format!(
            "`base_policy` must be ts, kts or rhc2, got {other:?}"
        ))),
    }
}

fn kg_policy(c: &ExperimentConfig) -> BasePolicy {
    BasePolicy::Rhc2 {
        alpha: c.alpha.unwrap_or(1.0),
        k1: c.k1.unwrap_or(10),
        k2: c.k2.unwrap_or(10),
    }
}

fn tie_break(c: &ExperimentConfig, default_random: bool) -> TieBreak {
    if c.random_ties.unwrap_or(default_random) {
        TieBreak::Random
    } else {
        TieBreak::LowestIndex
    }
}

fn sensitivity(ctx: &Run) -> Result<String, CliError> {
    let c = ctx.config;
    let eps_grid = require(&c.eps_grid, "eps_grid")?;
    let horizon_grid = require(&c.horizon_grid, "horizon_grid")?;
    let trials = c.trials.unwrap_or(10_000);
    let kind = base_policy(c)?.kind();
    if let Some(e) = eps_grid.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(CliError::Config(format!("`eps_grid` entries must lie in (0, 1], got {e}")));
    }
    if horizon_grid.contains(&0) {
        return Err(CliError::Config("`horizon_grid` entries must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &eps in &eps_grid {
        let (theta, theta_prime) = make_lb_pair(eps).map_err(config_err)?;
        let anlb = make_anlb_instance(SENSITIVITY_ANLB_ARMS, eps, ANLB_DELTA).map_err(config_err)?;
        for &h in &horizon_grid {
            let instances = [
                ("lb-two-arm", &theta, &theta_prime, RewardModel::Bernoulli),
                ("anlb", &anlb.theta, &anlb.theta_prime, RewardModel::Deterministic),
            ];
            for (name, t, tp, model) in instances {
                let mut rng = RngStream::new(ctx.seed, cell);
                cell += 1;
                let s = sensitivity_experiment(t, tp, kind.clone(), h, trials, model, &mut rng)?;
                rows.push(BoundsRow {
                    instance: name.into(),
                    n: s.n,
                    horizon: h,
                    eps,
                    b: s.bound_b,
                    bound: s.bound,
                    measured_gap: s.measured_gap,
                    gap_stderr: s.gap_stderr,
                });
            }
        }
    }
    let path = ctx.out_dir.join("bounds.csv");
    output::emit_bounds_csv(&path, &rows)?;
    let violations = rows
        .iter()
        .filter(|r| r.measured_gap > r.bound + 3.0 * r.gap_stderr)
        .count();
    Ok(format!(
        "sensitivity: {} cells, {violations} above bound + 3se -> {}",
        rows.len(),
        path.display()
    ))
}

fn lowerbound(ctx: &Run) -> Result<String, CliError> {
    let c = ctx.config;
    let eps = require(&c.eps, "eps")?;
    let h = require(&c.horizon, "horizon")?;
    let k = require(&c.k, "k")?;
    let trials = c.trials.unwrap_or(100_000);
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CliError::Config(format!("`eps` must lie in (0, 1], got {eps}")));
    }
    if h == 0 || k == 0 {
        return Err(CliError::Config("`horizon` and `k` must be at least 1".into()));
    }
    let tv = lb_two_arm_tv(eps, h, k, trials, &mut RngStream::new(ctx.seed, 0))?;
    let inst = make_anlb_instance(20 * h, eps, ANLB_DELTA).map_err(config_err)?;
    let gap = anlb_reward_gap(&inst, k, h, trials, &mut RngStream::new(ctx.seed, 1))?;
    let row = LowerBoundRow {
        eps,
        horizon: h,
        k,
        analytic_tv: tv.analytic,
        empirical_tv: tv.empirical,
        empirical_stderr: tv.stderr,
        reward_gap: gap.gap,
        gap_stderr: gap.stderr,
    };
    let path = ctx.out_dir.join("lowerbound.csv");
    output::emit_lowerbound_csv(&path, std::slice::from_ref(&row))?;
    Ok(format!(
        "lowerbound: eps={} H={h} k={k} tv {} (analytic {}) reward gap {} -> {}",
        output::fmt_g(eps),
        output::fmt_g(tv.empirical),
        output::fmt_g(tv.analytic),
        output::fmt_g(gap.gap),
        path.display()
    ))
}

/// Task, default horizon and the misspecified prior of a preset.
fn preset(name: &str) -> Result<(Task, usize, Prior), CliError> {
    Ok(match name {
        "appA-mab" => {
            let prior = presets::gaussian_mab_prior();
            let mis = Prior::Gaussian(GaussianPrior::standard(prior.dim(), prior.obs_var));
            let model = RewardModel::GaussianNoise {
                obs_var: prior.obs_var,
            };
            let task = Task::Mab {
                prior: Prior::Gaussian(prior),
                model,
            };
            (task, presets::GAUSSIAN_MAB_HORIZON, mis)
        }
        "appA-lincb" => {
            let env = presets::lincb_env();
            let mis = Prior::Gaussian(GaussianPrior::standard(env.dim(), env.obs_var));
            (Task::LinCb(env), presets::LINCB_HORIZON, mis)
        }
        "appA-discrete" => {
            let task = Task::Mab {
                prior: Prior::Discrete(presets::discrete_prior()),
                model: RewardModel::Deterministic,
            };
            let mis = Prior::Discrete(presets::discrete_uniform_prior());
            (task, presets::DISCRETE_HORIZON, mis)
        }
        other => {
            return Err(CliError::Config(format!(
                "`preset` must be appA-mab, appA-lincb or appA-discrete, got {other:?}"
            )))
        }
    })
}

fn num_arms(task: &Task) -> usize {
    match task {
        Task::Mab { prior, .. } => prior.num_arms(),
        Task::LinCb(env) => env.num_actions,
    }
}

/// One learning-curve series family: a named algorithm run at one or more
/// exploration lengths.
struct Algorithm {
    name: String,
    configs: Vec<(String, MetaConfig)>,
}

fn meta_algorithms(exp: Experiment, ctx: &Run, task: &Task, horizon: usize, mis: Prior) -> Result<Vec<Algorithm>, CliError> {
    let c = ctx.config;
    let num_episodes = require(&c.num_episodes, "num_episodes")?;
    let replicates = require(&c.replicates, "replicates")?;
    let explore = require(&c.explore_episodes, "explore_episodes")?;
    let template = MetaConfig {
        num_episodes,
        explore_episodes: 0,
        horizon,
        base_policy: BasePolicy::Ts,
        tie_break: tie_break(c, exp == Experiment::MetaDiscrete),
        baseline: Baseline::Oracle,
        replicates,
        seed: ctx.seed,
        jobs: c.jobs.unwrap_or(0),
    };
    let single = |name: &str, base: BasePolicy, baseline: Baseline| Algorithm {
        name: name.into(),
        configs: vec![(
            "default".into(),
            MetaConfig {
                base_policy: base,
                baseline,
                ..template.clone()
            },
        )],
    };
    let etc = |name: &str, base: BasePolicy, est: Estimator| Algorithm {
        name: name.into(),
        configs: explore
            .iter()
            .map(|&t0| {
                let cfg = MetaConfig {
                    base_policy: base,
                    baseline: Baseline::MetaEtc(est),
                    explore_episodes: t0,
                    ..template.clone()
                };
                (format!("T0={t0}"), cfg)
            })
            .collect(),
    };
    let algs = match exp {
        Experiment::MetaGaussian => {
            let base = base_policy(c)?;
            vec![
                single("Oracle", base, Baseline::Oracle),
                single("Misspecified", base, Baseline::Misspecified(mis)),
                etc("MetaTS:full", base, Estimator::GaussianFull),
                etc("MetaTS:no-cov", base, Estimator::GaussianNoCov),
            ]
        }
        Experiment::MetaLinCb => {
            let base = base_policy(c)?;
            vec![
                single("Oracle", base, Baseline::Oracle),
                single("Misspecified", base, Baseline::Misspecified(mis)),
                etc("MetaTS", base, Estimator::LinCbOls),
            ]
        }
        Experiment::MetaDiscrete => {
            let kg = kg_policy(c);
            vec![
                single("OracleTS", BasePolicy::Ts, Baseline::Oracle),
                single("MisTS", BasePolicy::Ts, Baseline::Misspecified(mis.clone())),
                etc("MetaTS", BasePolicy::Ts, Estimator::DiscreteFreq),
                single("OracleKG", kg, Baseline::Oracle),
                single("MisKG", kg, Baseline::Misspecified(mis)),
                etc("MetaKG", kg, Estimator::DiscreteFreq),
            ]
        }
        _ => unreachable!("not a meta-learning experiment"),
    };
    for alg in &algs {
        for (_, cfg) in &alg.configs {
            cfg.validate(task).map_err(config_err)?;
        }
    }
    Ok(algs)
}

fn meta(exp: Experiment, ctx: &Run) -> Result<String, CliError> {
    let c = ctx.config;
    let (task, default_h, mis) = preset(c.preset.as_deref().unwrap_or(exp.default_preset()))?;
    let horizon = c.horizon.unwrap_or(default_h);
    let algs = meta_algorithms(exp, ctx, &task, horizon, mis)?;

    let mut results: Vec<(&Algorithm, Vec<MetaResult>)> = Vec::new();
    for alg in &algs {
        let runs = alg
            .configs
            .iter()
            .map(|(_, cfg)| run_replicates(cfg, &task))
            .collect::<Result<Vec<_>, _>>()?;
        results.push((alg, runs));
    }

    let arms = num_arms(&task);
    let mut rows = Vec::new();
    let mut hists = Vec::new();
    let mut best = (String::new(), f64::NEG_INFINITY);
    for (alg, runs) in &results {
        let curves: Vec<(Vec<f64>, Vec<f64>)> = runs.iter().map(MetaResult::learning_curve).collect();
        let means: Vec<Vec<f64>> = curves.iter().map(|c| c.0.clone()).collect();
        let env = upper_envelope(&means)?;
        for (i, ((config_id, _), (mean, se))) in alg.configs.iter().zip(&curves).enumerate() {
            for t in 0..mean.len() {
                rows.push(LearningCurveRow {
                    algorithm: &alg.name,
                    config_id,
                    episode: t + 1,
                    mean_reward: mean[t],
                    stderr: se[t],
                    on_envelope: env.argmax[t] == i,
                });
            }
        }
        for ((config_id, _), r) in alg.configs.iter().zip(runs) {
            let label = if alg.configs.len() == 1 {
                alg.name.clone()
            } else {
                format!("{}[{config_id}]", alg.name)
            };
            hists.push((label, r.first_action_freq(arms)));
        }
        if let Some(&last) = env.values.last() {
            if last > best.1 {
                best = (alg.name.clone(), last);
            }
        }
    }
    let curve_path = ctx.out_dir.join("learning_curve.csv");
    output::emit_learning_curve_csv(&curve_path, rows)?;
    output::emit_first_action_csv(&ctx.out_dir.join("first_action.csv"), &hists)?;
    Ok(format!(
        "{}: {} algorithms, best final average {} ({}) -> {}",
        exp.name(),
        algs.len(),
        output::fmt_g(best.1),
        best.0,
        curve_path.display()
    ))
}

fn estimators_for(task: &Task) -> Vec<(&'static str, Estimator)> {
    match task {
        Task::LinCb(_) => vec![("LinCbOls", Estimator::LinCbOls)],
        Task::Mab {
            prior: Prior::Discrete(_),
            ..
        } => vec![("DiscreteFreq", Estimator::DiscreteFreq)],
        Task::Mab {
            prior: Prior::Beta(_),
            ..
        } => vec![("BetaMom", Estimator::BetaMom)],
        Task::Mab { .. } => vec![
            ("GaussianFull", Estimator::GaussianFull),
            ("GaussianNoCov", Estimator::GaussianNoCov),
            ("GaussianMoments", Estimator::GaussianMoments),
        ],
    }
}

fn prior_rows(name: &str, estimate: &Prior, truth: &Prior, rows: &mut Vec<EstimateRow>) {
    let mut push = |parameter, row, col, estimate, truth| {
        rows.push(EstimateRow {
            estimator: name.into(),
            parameter,
            row,
            col,
            estimate,
            truth,
        })
    };
    match (estimate, truth) {
        (Prior::Gaussian(e), Prior::Gaussian(t)) => {
            for i in 0..t.dim() {
                push("mean", i, 0, e.mean[i], t.mean[i]);
            }
            for i in 0..t.dim() {
                for j in 0..t.dim() {
                    push("cov", i, j, e.cov[(i, j)], t.cov[(i, j)]);
                }
            }
        }
        (Prior::Beta(e), Prior::Beta(t)) => {
            for i in 0..t.dim() {
                push("alpha", i, 0, e.alpha[i], t.alpha[i]);
                push("beta", i, 0, e.beta[i], t.beta[i]);
            }
        }
        (Prior::Discrete(e), Prior::Discrete(t)) => {
            for (i, (we, wt)) in e.weights().iter().zip(t.weights()).enumerate() {
                push("weight", i, 0, *we, *wt);
            }
        }
        _ => {}
    }
}

fn estimate(ctx: &Run) -> Result<String, CliError> {
    let c = ctx.config;
    let num_episodes = require(&c.num_episodes, "num_episodes")?;
    let (task, default_h, _) = preset(c.preset.as_deref().unwrap_or(Experiment::Estimate.default_preset()))?;
    let truth = match &task {
        Task::Mab { prior, .. } => prior.clone(),
        Task::LinCb(env) => Prior::Gaussian(env.weight_prior.clone()),
    };
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    for (name, est) in estimators_for(&task) {
        let cfg = MetaConfig {
            num_episodes,
            explore_episodes: num_episodes,
            horizon: c.horizon.unwrap_or(default_h),
            base_policy: BasePolicy::Ts,
            tie_break: TieBreak::LowestIndex,
            baseline: Baseline::MetaEtc(est),
            replicates: 1,
            seed: ctx.seed,
            jobs: 1,
        };
        cfg.validate(&task).map_err(config_err)?;
        let run = run_meta(&cfg, &task, &mut RngStream::new(ctx.seed, 0))?;
        if let Some(e) = &run.estimate {
            prior_rows(name, e, &truth, &mut rows);
        }
        let div = run.divergence.map_or("n/a".to_string(), output::fmt_g);
        let failed = if run.estimator_failed { " (fallback)" } else { "" };
        parts.push(format!("{name} divergence {div}{failed}"));
    }
    let path = ctx.out_dir.join("estimates.csv");
    output::emit_estimates_csv(&path, &rows)?;
    Ok(format!("estimate: T={num_episodes}; {} -> {}", parts.join(", "), path.display()))
}

pub fn out_dir(c: &ExperimentConfig) -> PathBuf {
    c.out_dir.clone().unwrap_or_else(|| Path::new("results").to_path_buf())
}
