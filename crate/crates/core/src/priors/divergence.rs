//! Divergences between priors.

use std::collections::HashMap;

use nalgebra::SymmetricEigen;
use statrs::function::gamma::{digamma, ln_gamma};

use super::{atom_key, BetaProductPrior, DiscretePrior, GaussianPrior};
use crate::error::{invalid, Error, Result};
use crate::linalg::cholesky_pd;
use crate::types::MeanVector;

/// `KL(p ‖ q)` between Gaussian priors over mean vectors. `q.cov` must be
/// strictly positive definite. Returns `+∞` when `p.cov` is singular.
pub fn kl_gaussian(p: &GaussianPrior, q: &GaussianPrior) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: p.dim(),
        });
    }
    let n = q.dim();
    let ch = cholesky_pd(&q.cov.0, "kl_gaussian denominator covariance")?;
    let ratio = ch.solve(&p.cov.0);
    let trace_term = ratio.trace() - n as f64;

    let log_det_q = crate::linalg::log_det_pd(&ch);
    let eig = SymmetricEigen::new(p.cov.symmetrized().0);
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Ok(f64::INFINITY);
    }
    let log_det_p: f64 = eig.eigenvalues.iter().map(|l| l.ln()).sum();

    let diff = &p.mean.0 - &q.mean.0;
    let maha = diff.dot(&ch.solve(&diff));
    let kl = 0.5 * (trace_term - (log_det_p - log_det_q) + maha);
    Ok(kl.max(0.0))
}

fn pinsker(kl: f64) -> f64 {
    (kl / 2.0).sqrt().min(1.0)
}

/// Pinsker upper bound `min(1, √(KL/2))` on the total variation between two
/// Gaussian priors.
pub fn tv_upper_gaussian(p: &GaussianPrior, q: &GaussianPrior) -> Result<f64> {
    Ok(pinsker(kl_gaussian(p, q)?))
}

/// `KL(p ‖ q)` for products of Beta distributions, summed over arms.
pub fn kl_beta_product(p: &BetaProductPrior, q: &BetaProductPrior) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            got: p.dim(),
        });
    }
    let params = p.alpha.iter().chain(&p.beta).chain(&q.alpha).chain(&q.beta);
    if params.into_iter().any(|&v| !(v > 0.0)) {
        return Err(invalid("alpha/beta", "must be positive"));
    }
    let ln_beta = |a: f64, b: f64| ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let mut total = 0.0;
    for i in 0..p.dim() {
        let (a, b) = (p.alpha[i], p.beta[i]);
        let (a2, b2) = (q.alpha[i], q.beta[i]);
        total += ln_beta(a2, b2) - ln_beta(a, b)
            + (a - a2) * digamma(a)
            + (b - b2) * digamma(b)
            + (a2 - a + b2 - b) * digamma(a + b);
    }
    Ok(total.max(0.0))
}

pub fn tv_upper_beta(p: &BetaProductPrior, q: &BetaProductPrior) -> Result<f64> {
    Ok(pinsker(kl_beta_product(p, q)?))
}

/// Exact total variation `½ Σ |w_p − w_q|` over the union of atoms. Atoms are
/// matched by bitwise equality of their coordinates.
pub fn tv_discrete(p: &DiscretePrior, q: &DiscretePrior) -> f64 {
    let mut mass: HashMap<Vec<u64>, (f64, f64)> = HashMap::new();
    for (a, &w) in p.atoms().iter().zip(p.weights()) {
        mass.entry(atom_key(a)).or_default().0 += w;
    }
    for (a, &w) in q.atoms().iter().zip(q.weights()) {
        mass.entry(atom_key(a)).or_default().1 += w;
    }
    let tv: f64 = 0.5 * mass.values().map(|(wp, wq)| (wp - wq).abs()).sum::<f64>();
    tv.min(1.0)
}

/// Misspecification levels for isotropic Gaussian priors `N(ν, σ₀² I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KvetonComparison {
    /// `|A| · ‖ν − ν̂‖_∞ / σ₀`.
    pub eps_tilde: f64,
    /// `‖ν − ν̂‖₂ / σ₀`, an upper bound on the prior total variation.
    pub eps_ours: f64,
}

pub fn kveton_comparison(nu: &MeanVector, nu_hat: &MeanVector, sigma0: f64) -> Result<KvetonComparison> {
    if !(sigma0 > 0.0) {
        return Err(invalid("sigma0", "must be positive"));
    }
    if nu.len() != nu_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: nu.len(),
            got: nu_hat.len(),
        });
    }
    let diff = &nu.0 - &nu_hat.0;
    Ok(KvetonComparison {
        eps_tilde: nu.len() as f64 * diff.amax() / sigma0,
        eps_ours: diff.norm() / sigma0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::types::CovMatrix;
    use approx::assert_abs_diff_eq;

    fn gauss(mean: Vec<f64>, cov: CovMatrix) -> GaussianPrior {
        GaussianPrior::new(MeanVector::new(mean), cov, 1.0).unwrap()
    }

    #[test]
    fn kl_gaussian_examples() {
        let p = gauss(vec![0.3, -0.1], CovMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]));
        assert_abs_diff_eq!(kl_gaussian(&p, &p).unwrap(), 0.0, epsilon = 1e-12);

        let shifted = gauss(vec![1.0], CovMatrix::identity(1));
        let base = gauss(vec![0.0], CovMatrix::identity(1));
        assert_abs_diff_eq!(kl_gaussian(&shifted, &base).unwrap(), 0.5, epsilon = 1e-12);

        let wide = gauss(vec![0.0, 0.0], CovMatrix::from_diagonal(&[2.0, 2.0]));
        let unit = gauss(vec![0.0, 0.0], CovMatrix::identity(2));
        assert_abs_diff_eq!(kl_gaussian(&wide, &unit).unwrap(), 1.0 - 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn kl_gaussian_singular_denominator() {
        let p = gauss(vec![0.0], CovMatrix::identity(1));
        let q = gauss(vec![0.0], CovMatrix::zeros(1));
        assert!(matches!(kl_gaussian(&p, &q), Err(Error::Singular(_))));
    }

    #[test]
    fn tv_upper_gaussian_examples() {
        let p = gauss(vec![1.0], CovMatrix::identity(1));
        let q = gauss(vec![0.0], CovMatrix::identity(1));
        assert_abs_diff_eq!(tv_upper_gaussian(&q, &q).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tv_upper_gaussian(&p, &q).unwrap(), 0.5, epsilon = 1e-12);
        // KL = ½·20 = 10 → clamped.
        let far = gauss(vec![20f64.sqrt()], CovMatrix::identity(1));
        assert_abs_diff_eq!(kl_gaussian(&far, &q).unwrap(), 10.0, epsilon = 1e-9);
        assert_eq!(tv_upper_gaussian(&far, &q).unwrap(), 1.0);
    }

    #[test]
    fn kl_gaussian_nonnegative_random() {
        let mut rng = RngStream::new(9, 0);
        for _ in 0..200 {
            let mk = |rng: &mut RngStream| {
                let a: Vec<f64> = (0..9).map(|_| rng.standard_normal()).collect();
                let m = nalgebra::DMatrix::from_row_slice(3, 3, &a);
                let cov = &m * m.transpose() + nalgebra::DMatrix::identity(3, 3) * 0.1;
                gauss((0..3).map(|_| rng.standard_normal()).collect(), CovMatrix(cov))
            };
            let p = mk(&mut rng);
            let q = mk(&mut rng);
            assert!(kl_gaussian(&p, &q).unwrap() >= 0.0);
            assert!(kl_gaussian(&p, &p).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn kl_beta_examples() {
        let one = BetaProductPrior::new(vec![1.0], vec![1.0]).unwrap();
        let two = BetaProductPrior::new(vec![2.0], vec![1.0]).unwrap();
        assert_abs_diff_eq!(kl_beta_product(&one, &one).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kl_beta_product(&one, &two).unwrap(), 1.0 - 2f64.ln(), epsilon = 1e-10);
        let one2 = BetaProductPrior::new(vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let two2 = BetaProductPrior::new(vec![2.0, 2.0], vec![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(kl_beta_product(&one2, &two2).unwrap(), 0.61370563888, epsilon = 1e-9);
        let tv = tv_upper_beta(&one, &two).unwrap();
        assert_abs_diff_eq!(tv, ((1.0 - 2f64.ln()) / 2.0).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn tv_discrete_examples() {
        let a = MeanVector::new(vec![0.5, 0.0]);
        let b = MeanVector::new(vec![0.5, 1.0]);
        let p = DiscretePrior::new(vec![a.clone(), b.clone()], vec![0.5, 0.5]).unwrap();
        let q = DiscretePrior::new(vec![a.clone(), b.clone()], vec![1.0, 0.0]).unwrap();
        assert_eq!(tv_discrete(&p, &p), 0.0);
        assert_abs_diff_eq!(tv_discrete(&p, &q), 0.5, epsilon = 1e-15);

        let theta = DiscretePrior::point_mass(a.clone());
        let eps = 0.01;
        let theta_prime = DiscretePrior::new(vec![a, b], vec![1.0 - eps, eps]).unwrap();
        assert_abs_diff_eq!(tv_discrete(&theta, &theta_prime), eps, epsilon = 1e-15);
    }

    #[test]
    fn tv_discrete_metric_axioms() {
        let mut rng = RngStream::new(21, 0);
        let atoms: Vec<MeanVector> = (0..5).map(|i| MeanVector::new(vec![i as f64, 0.0])).collect();
        let random_prior = |rng: &mut RngStream| {
            // Random subset of atoms with random weights.
            let chosen: Vec<usize> = (0..5).filter(|_| rng.bernoulli(0.6)).collect();
            let chosen = if chosen.is_empty() { vec![rng.below(5)] } else { chosen };
            let raw: Vec<f64> = chosen.iter().map(|_| rng.uniform() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let rest: f64 = w[1..].iter().sum();
            w[0] = 1.0 - rest;
            DiscretePrior::new(chosen.iter().map(|&i| atoms[i].clone()).collect(), w).unwrap()
        };
        for _ in 0..1000 {
            let p = random_prior(&mut rng);
            let q = random_prior(&mut rng);
            let r = random_prior(&mut rng);
            assert_abs_diff_eq!(tv_discrete(&p, &q), tv_discrete(&q, &p), epsilon = 1e-15);
            assert!(tv_discrete(&p, &r) <= tv_discrete(&p, &q) + tv_discrete(&q, &r) + 1e-12);
        }
    }

    #[test]
    fn kveton_examples() {
        let nu = MeanVector::new(vec![0.0; 4]);
        let same = kveton_comparison(&nu, &nu, 1.0).unwrap();
        assert_eq!((same.eps_tilde, same.eps_ours), (0.0, 0.0));

        let hat = MeanVector::new(vec![1.0; 4]);
        let c = kveton_comparison(&nu, &hat, 1.0).unwrap();
        assert_abs_diff_eq!(c.eps_tilde, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.eps_ours, 2.0, epsilon = 1e-12);

        let c2 = kveton_comparison(
            &MeanVector::new(vec![0.0, 0.0]),
            &MeanVector::new(vec![1.0, 0.0]),
            2.0,
        )
        .unwrap();
        assert_abs_diff_eq!(c2.eps_tilde, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c2.eps_ours, 0.5, epsilon = 1e-12);
        assert!(kveton_comparison(&nu, &hat, 0.0).is_err());
    }
}
