//! Method-of-moments prior estimators.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linalg::psd_project;
use crate::priors::DiscretePrior;
use crate::types::{CovMatrix, MeanVector};

/// Beta-Binomial method-of-moments fit for one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomEstimate {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub m1_hat: f64,
    pub m2_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPriorEstimate {
    pub mean_hat: MeanVector,
    /// PSD projection of `raw_cov`.
    pub cov_hat: CovMatrix,
    pub raw_cov: CovMatrix,
}

impl GaussianPriorEstimate {
    fn from_raw(mean_hat: MeanVector, raw: DMatrix<f64>) -> Result<Self> {
        let raw_cov = CovMatrix(raw).symmetrized();
        Ok(Self {
            mean_hat,
            cov_hat: psd_project(&raw_cov)?,
            raw_cov,
        })
    }
}

/// First and second moments of `Binomial(n, p)` with `p ~ Beta(α, β)`.
pub fn beta_binomial_moments(alpha: f64, beta: f64, n: u32) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(invalid("alpha/beta", "must be positive"));
    }
    if n < 2 {
        return Err(invalid("n", "moments identify the parameters only for n >= 2"));
    }
    let n = n as f64;
    let s = alpha + beta;
    let m1 = n * alpha / s;
    let m2 = n * alpha * (n * (1.0 + alpha) + beta) / (s * (1.0 + s));
    Ok((m1, m2))
}

/// Inverts the moment map at given (possibly empirical) moments.
pub fn beta_binomial_from_moments(m1: f64, m2: f64, n: u32) -> Result<MomEstimate> {
    if n < 2 {
        return Err(invalid("n", "moments identify the parameters only for n >= 2"));
    }
    let nf = n as f64;
    if !(m1 > 0.0) {
        return Err(Error::DegenerateMoments);
    }
    let denom = nf * (m2 / m1 - m1 - 1.0) + m1;
    if !(denom > 1e-12) {
        return Err(Error::DegenerateMoments);
    }
    let alpha_hat = (nf * m1 - m2) / denom;
    let beta_hat = (nf - m1) * (nf - m2 / m1) / denom;
    if !(alpha_hat > 0.0 && beta_hat > 0.0) {
        return Err(Error::DegenerateMoments);
    }
    Ok(MomEstimate {
        alpha_hat,
        beta_hat,
        m1_hat: m1,
        m2_hat: m2,
    })
}

/// Plug-in moments of success counts out of `n`, then the inverse map.
pub fn beta_binomial_mom(samples: &[u32], n: u32) -> Result<MomEstimate> {
    if samples.is_empty() {
        return Err(Error::Empty("beta-binomial samples"));
    }
    if let Some(&s) = samples.iter().find(|&&s| s > n) {
        return Err(invalid("samples", format!("count {s} exceeds n = {n}")));
    }
    let t = samples.len() as f64;
    let m1 = samples.iter().map(|&s| s as f64).sum::<f64>() / t;
    let m2 = samples.iter().map(|&s| (s as f64).powi(2)).sum::<f64>() / t;
    beta_binomial_from_moments(m1, m2, n)
}

/// `ν̂ = (A/T) Σ_t r_t e_{a_t}` from one uniform action per episode.
pub fn gaussian_mean_first_round(records: &[(usize, f64)], num_actions: usize) -> Result<MeanVector> {
    if records.is_empty() {
        return Err(Error::Empty("first-round log"));
    }
    let mut nu = DVector::zeros(num_actions);
    for &(a, r) in records {
        check_action(a, num_actions)?;
        nu[a] += r;
    }
    nu *= num_actions as f64 / records.len() as f64;
    Ok(MeanVector(nu))
}

fn check_action(a: usize, num_actions: usize) -> Result<()> {
    if a >= num_actions {
        return Err(Error::ActionOutOfRange {
            index: a,
            num_arms: num_actions,
        });
    }
    Ok(())
}

/// Two independent uniform actions `a, b` with rewards `r, s` in one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRecord {
    pub a: usize,
    pub r: f64,
    pub b: usize,
    pub s: f64,
}

/// Two episodes that played the same `(a, b)`; tilde values are from the
/// second episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffRecord {
    pub a: usize,
    pub b: usize,
    pub r: f64,
    pub s: f64,
    pub r_tilde: f64,
    pub s_tilde: f64,
}

fn add_sym(m: &mut DMatrix<f64>, a: usize, b: usize, v: f64) {
    m[(a, b)] += v;
    m[(b, a)] += v;
}

/// `Ψ̂ = (A²/2T) Σ_t (r_t−ν_a)(s_t−ν_b)(e_a e_bᵀ + e_b e_aᵀ)` with known `ν`.
pub fn gaussian_cov_pairs(records: &[PairRecord], mean_known: &MeanVector, num_actions: usize) -> Result<CovMatrix> {
    if records.is_empty() {
        return Err(Error::Empty("paired log"));
    }
    if mean_known.len() != num_actions {
        return Err(Error::DimensionMismatch {
            expected: num_actions,
            got: mean_known.len(),
        });
    }
    let mut m = DMatrix::zeros(num_actions, num_actions);
    for p in records {
        check_action(p.a, num_actions)?;
        check_action(p.b, num_actions)?;
        add_sym(&mut m, p.a, p.b, (p.r - mean_known[p.a]) * (p.s - mean_known[p.b]));
    }
    let a2 = (num_actions * num_actions) as f64;
    m *= a2 / (2.0 * records.len() as f64);
    Ok(CovMatrix(m))
}

/// `Ψ̂ = (A²/4T) Σ_t (r_t−r̃_t)(s_t−s̃_t)(e_a e_bᵀ + e_b e_aᵀ)` over `T` episode
/// pairs; needs no knowledge of the prior mean.
pub fn gaussian_cov_diff(records: &[DiffRecord], num_actions: usize) -> Result<CovMatrix> {
    if records.is_empty() {
        return Err(Error::Empty("paired-episode log"));
    }
    let mut m = DMatrix::zeros(num_actions, num_actions);
    for p in records {
        check_action(p.a, num_actions)?;
        check_action(p.b, num_actions)?;
        add_sym(&mut m, p.a, p.b, (p.r - p.r_tilde) * (p.s - p.s_tilde));
    }
    let a2 = (num_actions * num_actions) as f64;
    m *= a2 / (4.0 * records.len() as f64);
    Ok(CovMatrix(m))
}

/// Groups consecutive episodes into pairs; each pair must share its actions.
pub fn pair_episodes(first_two_rounds: &[PairRecord]) -> Result<Vec<DiffRecord>> {
    if first_two_rounds.len() % 2 != 0 {
        return Err(invalid("episodes", "paired estimator needs an even episode count"));
    }
    first_two_rounds
        .chunks_exact(2)
        .map(|c| {
            let (x, y) = (c[0], c[1]);
            if x.a != y.a || x.b != y.b {
                return Err(invalid("episodes", "paired episodes must share their actions"));
            }
            Ok(DiffRecord {
                a: x.a,
                b: x.b,
                r: x.r,
                s: x.s,
                r_tilde: y.r,
                s_tilde: y.s,
            })
        })
        .collect()
}

/// Mean and covariance from episodes that played uniformly at every step.
///
/// With `μ̂ᵢ = (1/H)Σ_h 𝟙{a_h = ·} r_h`: `ν̂ = (A/T₀)Σᵢ μ̂ᵢ`; the diagonal of
/// `Ψ̂` is `(1/T₀)Σᵢ (A/H)Σ_h 𝟙{a_h = a} r_h² − σ² − ν̂_a²` and the
/// off-diagonal is `(1/T₀)Σᵢ (H/(H−1))·A²μ̂ᵢ_a μ̂ᵢ_b − ν̂_a ν̂_b`; the `H/(H−1)`
/// factor removes the missing same-step terms so the raw estimate is
/// unbiased.
pub fn gaussian_full_episode(
    episodes: &[Vec<(usize, f64)>],
    num_actions: usize,
    horizon: usize,
    obs_var: f64,
) -> Result<GaussianPriorEstimate> {
    if episodes.is_empty() {
        return Err(Error::Empty("exploration episodes"));
    }
    if horizon == 0 || (num_actions > 1 && horizon < 2) {
        return Err(invalid("horizon", "needs H >= 2 to estimate covariances"));
    }
    let a_f = num_actions as f64;
    let h_f = horizon as f64;
    let t0 = episodes.len() as f64;
    let mut nu = DVector::zeros(num_actions);
    let mut second = DMatrix::zeros(num_actions, num_actions);
    let cross = if horizon > 1 { h_f / (h_f - 1.0) } else { 0.0 };
    for ep in episodes {
        if ep.len() != horizon {
            return Err(Error::DimensionMismatch {
                expected: horizon,
                got: ep.len(),
            });
        }
        let mut mu = DVector::<f64>::zeros(num_actions);
        let mut sq = DVector::<f64>::zeros(num_actions);
        for &(a, r) in ep {
            check_action(a, num_actions)?;
            mu[a] += r / h_f;
            sq[a] += r * r;
        }
        nu += &mu;
        for i in 0..num_actions {
            second[(i, i)] += a_f / h_f * sq[i] - obs_var;
            for j in 0..num_actions {
                if i != j {
                    second[(i, j)] += cross * a_f * a_f * mu[i] * mu[j];
                }
            }
        }
    }
    nu *= a_f / t0;
    second /= t0;
    let raw = second - &nu * nu.transpose();
    GaussianPriorEstimate::from_raw(MeanVector(nu), raw)
}

/// One linear-bandit episode: chosen context features and rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct LinEpisode {
    pub features: Vec<DVector<f64>>,
    pub rewards: Vec<f64>,
}

/// Result of the per-episode least-squares prior fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinEstimate {
    pub estimate: GaussianPriorEstimate,
    pub used: usize,
    pub skipped: usize,
}

/// `ν̂` averages the per-episode OLS solutions `μ̂ᵢ`;
/// `Ψ̂ = (1/T₀)Σᵢ(μ̂ᵢμ̂ᵢᵀ − σ²Σᵢ⁻¹) − ν̂ν̂ᵀ` with `Σᵢ = Σ_h x_h x_hᵀ`.
/// Episodes with a singular design are skipped and counted.
pub fn lincb_prior_estimator(episodes: &[LinEpisode], dim: usize, obs_var: f64) -> Result<LinEstimate> {
    let mut sum_mu = DVector::zeros(dim);
    let mut sum_second = DMatrix::zeros(dim, dim);
    let (mut used, mut skipped) = (0usize, 0usize);
    for ep in episodes {
        if ep.features.len() != ep.rewards.len() {
            return Err(Error::DimensionMismatch {
                expected: ep.features.len(),
                got: ep.rewards.len(),
            });
        }
        let mut design = DMatrix::zeros(dim, dim);
        let mut xty = DVector::zeros(dim);
        for (x, &r) in ep.features.iter().zip(&ep.rewards) {
            if x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
            }
            design.ger(1.0, x, x, 1.0);
            xty.axpy(r, x, 1.0);
        }
        let Some(ch) = design.clone().cholesky() else {
            skipped += 1;
            continue;
        };
        let inv = ch.inverse();
        if !inv.iter().all(|v| v.is_finite()) || inv.diagonal().max() > 1e12 {
            skipped += 1;
            continue;
        }
        let mu = &inv * &xty;
        sum_second += &mu * mu.transpose() - inv * obs_var;
        sum_mu += mu;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Singular("every episode design matrix"));
    }
    let n = used as f64;
    let nu = sum_mu / n;
    let raw = sum_second / n - &nu * nu.transpose();
    Ok(LinEstimate {
        estimate: GaussianPriorEstimate::from_raw(MeanVector(nu), raw)?,
        used,
        skipped,
    })
}

/// Normalized task counts; uniform when no episode identified its task.
pub fn discrete_prior_freq(counts: &[u64], template: &DiscretePrior) -> Result<DiscretePrior> {
    if counts.len() != template.atoms().len() {
        return Err(Error::DimensionMismatch {
            expected: template.atoms().len(),
            got: counts.len(),
        });
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return DiscretePrior::uniform(template.shared_atoms());
    }
    let mut weights: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    // Absorb rounding into the largest weight so the sum is exactly 1.
    let top = (0..weights.len()).max_by(|&i, &j| weights[i].total_cmp(&weights[j])).unwrap();
    let rest: f64 = weights.iter().enumerate().filter(|(i, _)| *i != top).map(|(_, w)| w).sum();
    weights[top] = 1.0 - rest;
    template.with_weights(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::presets::{block_cov, gaussian_mab_prior};
    use crate::linalg::MvnSampler;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn moment_examples() {
        let (m1, m2) = beta_binomial_moments(1.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(m1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m2, 5.0 / 3.0, epsilon = 1e-15);
        let (m1, m2) = beta_binomial_moments(2.0, 3.0, 4).unwrap();
        assert_abs_diff_eq!(m1, 1.6, epsilon = 1e-15);
        assert_abs_diff_eq!(m2, 4.0, epsilon = 1e-14);
        assert!(beta_binomial_moments(1.0, 1.0, 1).is_err());
    }

    #[test]
    fn mom_inverts_exact_moments() {
        let e = beta_binomial_from_moments(1.6, 4.0, 4).unwrap();
        assert_abs_diff_eq!(e.alpha_hat, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.beta_hat, 3.0, epsilon = 1e-12);
        let e = beta_binomial_from_moments(1.0, 5.0 / 3.0, 2).unwrap();
        assert_abs_diff_eq!(e.alpha_hat, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.beta_hat, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mom_on_samples_with_exact_moments() {
        // Beta(1,1)-Binomial(2) is uniform on {0,1,2}.
        let e = beta_binomial_mom(&[0, 1, 2], 2).unwrap();
        assert_abs_diff_eq!(e.alpha_hat, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.beta_hat, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mom_degenerate_inputs() {
        assert_eq!(beta_binomial_mom(&[0, 0, 0], 3), Err(Error::DegenerateMoments));
        assert_eq!(beta_binomial_mom(&[2, 2, 2], 4), Err(Error::DegenerateMoments));
        assert!(beta_binomial_mom(&[], 4).is_err());
        assert!(beta_binomial_mom(&[5], 4).is_err());
    }

    proptest! {
        #[test]
        fn mom_round_trip(alpha in 0.2f64..20.0, beta in 0.2f64..20.0, n in 2u32..=10) {
            let (m1, m2) = beta_binomial_moments(alpha, beta, n).unwrap();
            let e = beta_binomial_from_moments(m1, m2, n).unwrap();
            prop_assert!((e.alpha_hat - alpha).abs() <= 1e-9 * alpha.max(1.0));
            prop_assert!((e.beta_hat - beta).abs() <= 1e-9 * beta.max(1.0));
        }
    }

    #[test]
    fn first_round_examples() {
        let nu = gaussian_mean_first_round(&[(0, 0.6)], 2).unwrap();
        assert_abs_diff_eq!(nu[0], 1.2, epsilon = 1e-15);
        assert_eq!(nu[1], 0.0);
        let z = gaussian_mean_first_round(&[(0, 0.0), (1, 0.0)], 2).unwrap();
        assert_eq!(z.as_slice(), &[0.0, 0.0]);
        assert!(gaussian_mean_first_round(&[], 2).is_err());
    }

    #[test]
    fn cov_pairs_examples() {
        let nu = MeanVector::zeros(2);
        let m = gaussian_cov_pairs(&[PairRecord { a: 0, r: 1.0, b: 1, s: 1.0 }], &nu, 2).unwrap();
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 0)], 2.0);
        assert_eq!(m[(0, 0)], 0.0);
        let nu = MeanVector::new(vec![0.3, -0.1]);
        let z = gaussian_cov_pairs(&[PairRecord { a: 1, r: -0.1, b: 0, s: 0.3 }], &nu, 2).unwrap();
        assert_eq!(z.max_abs_diff(&CovMatrix::zeros(2)), 0.0);
    }

    #[test]
    fn cov_diff_examples() {
        let rec = DiffRecord {
            a: 0,
            b: 1,
            r: 3.0,
            r_tilde: 1.0,
            s: 1.5,
            s_tilde: 0.5,
        };
        let m = gaussian_cov_diff(&[rec], 2).unwrap();
        assert_eq!(m[(0, 1)], 2.0);
        let same = DiffRecord {
            r_tilde: 3.0,
            s_tilde: 1.5,
            ..rec
        };
        assert_eq!(gaussian_cov_diff(&[same], 2).unwrap().max_abs_diff(&CovMatrix::zeros(2)), 0.0);
        let p = PairRecord { a: 0, r: 1.0, b: 1, s: 2.0 };
        assert!(pair_episodes(&[p]).is_err());
        assert!(pair_episodes(&[p, PairRecord { a: 1, ..p }]).is_err());
        assert_eq!(pair_episodes(&[p, p]).unwrap().len(), 1);
    }

    #[test]
    fn full_episode_examples() {
        let e = gaussian_full_episode(&[vec![(0, 2.0)]], 1, 1, 1.0).unwrap();
        assert_eq!(e.mean_hat[0], 2.0);
        assert_eq!(e.raw_cov[(0, 0)], -1.0);
        assert_eq!(e.cov_hat[(0, 0)], 0.0);
        let z = gaussian_full_episode(&[vec![(0, 0.0), (1, 0.0)], vec![(1, 0.0), (1, 0.0)]], 2, 2, 1.0).unwrap();
        assert_eq!(z.mean_hat.as_slice(), &[0.0, 0.0]);
        assert_eq!(z.cov_hat.max_abs_diff(&CovMatrix::zeros(2)), 0.0);
        assert!(gaussian_full_episode(&[], 2, 2, 1.0).is_err());
        assert!(gaussian_full_episode(&[vec![(0, 1.0)]], 2, 1, 1.0).is_err());
    }

    #[test]
    fn full_episode_recovers_prior() {
        let prior = gaussian_mab_prior();
        let sampler = MvnSampler::new(&prior.mean, &prior.cov).unwrap();
        let mut rng = RngStream::new(31, 0);
        let (h, t0) = (10, 20_000);
        let episodes: Vec<Vec<(usize, f64)>> = (0..t0)
            .map(|_| {
                let mu = sampler.sample(&mut rng);
                (0..h)
                    .map(|_| {
                        let a = rng.below(6);
                        (a, mu[a] + rng.standard_normal())
                    })
                    .collect()
            })
            .collect();
        let e = gaussian_full_episode(&episodes, 6, h, 1.0).unwrap();
        for a in 0..6 {
            assert!((e.mean_hat[a] - prior.mean[a]).abs() < 0.1);
        }
        assert!(e.cov_hat.max_abs_diff(&prior.cov) < 0.2, "{}", e.cov_hat.max_abs_diff(&prior.cov));
    }

    #[test]
    fn ols_recovers_noiseless_weights() {
        let w = DVector::from_vec(vec![0.5, -1.0, 2.0]);
        let mut rng = RngStream::new(2, 0);
        let features: Vec<DVector<f64>> = (0..8)
            .map(|_| DVector::from_fn(3, |_, _| rng.standard_normal()))
            .collect();
        let rewards = features.iter().map(|x| x.dot(&w)).collect();
        let est = lincb_prior_estimator(&[LinEpisode { features, rewards }], 3, 0.0).unwrap();
        assert_abs_diff_eq!(est.estimate.mean_hat.0, w, epsilon = 1e-8);
    }

    #[test]
    fn ols_single_episode_example() {
        let (w, h) = (0.7, 4);
        let features: Vec<DVector<f64>> = (0..h)
            .map(|i| DVector::from_vec(vec![if i % 2 == 0 { 1.0 } else { -1.0 }]))
            .collect();
        let rewards = features.iter().map(|x| w * x[0]).collect();
        let est = lincb_prior_estimator(&[LinEpisode { features, rewards }], 1, 1.0).unwrap();
        assert_abs_diff_eq!(est.estimate.mean_hat[0], w, epsilon = 1e-12);
        assert_abs_diff_eq!(est.estimate.raw_cov[(0, 0)], -1.0 / h as f64, epsilon = 1e-12);
        assert_eq!(est.estimate.cov_hat[(0, 0)], 0.0);
    }

    #[test]
    fn ols_skips_singular_designs() {
        let x = DVector::from_vec(vec![1.0, 0.0]);
        let bad = LinEpisode {
            features: vec![x.clone(), x],
            rewards: vec![1.0, 1.0],
        };
        assert!(lincb_prior_estimator(&[bad.clone()], 2, 1.0).is_err());
        let good = LinEpisode {
            features: vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])],
            rewards: vec![1.0, 2.0],
        };
        let est = lincb_prior_estimator(&[bad, good], 2, 1.0).unwrap();
        assert_eq!((est.used, est.skipped), (1, 1));
    }

    #[test]
    fn discrete_freq_examples() {
        let atoms: Vec<MeanVector> = (0..4).map(|i| MeanVector::new(vec![i as f64])).collect();
        let template = DiscretePrior::uniform(atoms.into()).unwrap();
        let p = discrete_prior_freq(&[3, 1, 0, 0], &template).unwrap();
        assert_eq!(p.weights(), &[0.75, 0.25, 0.0, 0.0]);
        let u = discrete_prior_freq(&[0, 0, 0, 0], &template).unwrap();
        assert_eq!(u.weights(), &[0.25; 4]);
    }

    #[test]
    fn cov_estimators_agree() {
        let prior = gaussian_mab_prior();
        let sampler = MvnSampler::new(&prior.mean, &prior.cov).unwrap();
        let mut rng = RngStream::new(5, 0);
        let t = 100_000;
        let mut pairs = Vec::with_capacity(t);
        let mut diffs = Vec::with_capacity(t);
        for _ in 0..t {
            let (a, b) = (rng.below(6), rng.below(6));
            let (m1, m2) = (sampler.sample(&mut rng), sampler.sample(&mut rng));
            let r = m1[a] + rng.standard_normal();
            let s = m1[b] + rng.standard_normal();
            pairs.push(PairRecord { a, r, b, s });
            diffs.push(DiffRecord {
                a,
                b,
                r,
                s,
                r_tilde: m2[a] + rng.standard_normal(),
                s_tilde: m2[b] + rng.standard_normal(),
            });
        }
        let p = gaussian_cov_pairs(&pairs, &prior.mean, 6).unwrap();
        let d = gaussian_cov_diff(&diffs, 6).unwrap();
        assert!(p.max_abs_diff(&d) <= 0.15, "{}", p.max_abs_diff(&d));
        assert!(block_cov(1.0).max_abs_diff(&prior.cov) == 0.0);
    }

    #[test]
    fn projection_never_moves_away_from_psd_truth() {
        let truth = gaussian_mab_prior().cov;
        let mut rng = RngStream::new(6, 0);
        for _ in 0..100 {
            let noise = DMatrix::from_fn(6, 6, |_, _| rng.standard_normal());
            let raw = CovMatrix(&truth.0 + (&noise + noise.transpose()) * 0.5);
            let proj = psd_project(&raw).unwrap();
            assert!((&proj.0 - &truth.0).norm() <= (&raw.0 - &truth.0).norm() + 1e-12);
        }
    }
}
