//! Prior families over arm-mean vectors.

mod divergence;
mod tail;

use std::collections::HashSet;
use std::sync::Arc;

use rand_distr::{Beta, Distribution};

pub use divergence::{
    kl_beta_product, kl_gaussian, kveton_comparison, tv_discrete, tv_upper_beta,
    tv_upper_gaussian, KvetonComparison,
};
pub use tail::{
    sensitivity_bound, tail_bound, tail_expectation_discrete, trajectory_tv_bound, TailSpec,
};

use crate::error::{invalid, Error, Result};
use crate::linalg::{min_eigenvalue, MvnSampler};
use crate::rng::RngStream;
use crate::types::{CovMatrix, MeanVector};

/// `N(mean, cov)` over mean vectors with Gaussian reward noise of variance
/// `obs_var`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPrior {
    pub mean: MeanVector,
    pub cov: CovMatrix,
    pub obs_var: f64,
}

impl GaussianPrior {
    pub fn new(mean: MeanVector, cov: CovMatrix, obs_var: f64) -> Result<Self> {
        if cov.dim() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: cov.dim(),
            });
        }
        if !(obs_var > 0.0 && obs_var.is_finite()) {
            return Err(invalid("obs_var", "must be positive"));
        }
        if !mean.is_finite() {
            return Err(Error::NonFinite);
        }
        if !cov.is_symmetric(1e-10) {
            return Err(invalid("cov", "not symmetric"));
        }
        if cov.dim() > 0 && min_eigenvalue(&cov) < -1e-8 {
            return Err(Error::NotPsd);
        }
        Ok(Self { mean, cov, obs_var })
    }

    /// `N(0, I)` with the given noise variance.
    pub fn standard(dim: usize, obs_var: f64) -> Self {
        Self {
            mean: MeanVector::zeros(dim),
            cov: CovMatrix::identity(dim),
            obs_var,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Independent `Beta(alpha_a, beta_a)` per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaProductPrior {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl BetaProductPrior {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: alpha.len(),
                got: beta.len(),
            });
        }
        if alpha.iter().chain(&beta).any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("alpha/beta", "all entries must be positive"));
        }
        Ok(Self { alpha, beta })
    }

    pub fn uniform(num_arms: usize) -> Self {
        Self {
            alpha: vec![1.0; num_arms],
            beta: vec![1.0; num_arms],
        }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }
}

/// A finitely supported prior over mean vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePrior {
    atoms: Arc<[MeanVector]>,
    weights: Vec<f64>,
}

fn atom_key(atom: &MeanVector) -> Vec<u64> {
    atom.iter().map(|v| v.to_bits()).collect()
}

impl DiscretePrior {
    pub fn new(atoms: Vec<MeanVector>, weights: Vec<f64>) -> Result<Self> {
        Self::from_shared(atoms.into(), weights)
    }

    /// Builds a prior over an existing shared atom list.
    pub fn from_shared(atoms: Arc<[MeanVector]>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("discrete prior atoms"));
        }
        if atoms.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: atoms.len(),
                got: weights.len(),
            });
        }
        let dim = atoms[0].len();
        if atoms.iter().any(|a| a.len() != dim) {
            return Err(invalid("atoms", "atoms have different dimensions"));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(invalid("weights", "must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("weights", format!("sum to {total}, not 1")));
        }
        let mut seen = HashSet::with_capacity(atoms.len());
        if !atoms.iter().all(|a| seen.insert(atom_key(a))) {
            return Err(invalid("atoms", "atoms must be pairwise distinct"));
        }
        Ok(Self { atoms, weights })
    }

    pub fn point_mass(atom: MeanVector) -> Self {
        Self {
            atoms: vec![atom].into(),
            weights: vec![1.0],
        }
    }

    /// Uniform weights over the given atoms.
    pub fn uniform(atoms: Arc<[MeanVector]>) -> Result<Self> {
        let n = atoms.len();
        let mut weights = vec![1.0 / n as f64; n];
        // Keep the sum exactly 1 for the validation check.
        let rest: f64 = weights[1..].iter().sum();
        weights[0] = 1.0 - rest;
        Self::from_shared(atoms, weights)
    }

    /// Same atoms, new weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::from_shared(self.atoms.clone(), weights)
    }

    pub fn atoms(&self) -> &[MeanVector] {
        &self.atoms
    }

    pub fn shared_atoms(&self) -> Arc<[MeanVector]> {
        self.atoms.clone()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].len()
    }

    /// Largest `diam(μ)` over atoms with positive weight; the exact `B` for
    /// which the prior is B-bounded.
    pub fn max_diam(&self) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(a, _)| a.diam())
            .fold(0.0, f64::max)
    }

    /// Mean vector under the prior.
    pub fn expected_mean(&self) -> MeanVector {
        let mut out = MeanVector::zeros(self.dim());
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            out.0 += &a.0 * w;
        }
        out
    }
}

/// A prior over mean vectors.
#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    Gaussian(GaussianPrior),
    Beta(BetaProductPrior),
    Discrete(DiscretePrior),
}

impl Prior {
    pub fn num_arms(&self) -> usize {
        match self {
            Prior::Gaussian(p) => p.dim(),
            Prior::Beta(p) => p.dim(),
            Prior::Discrete(p) => p.dim(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Prior::Gaussian(_) => "gaussian",
            Prior::Beta(_) => "beta",
            Prior::Discrete(_) => "discrete",
        }
    }

    /// Prepares a reusable sampler (factors Gaussian covariances once).
    pub fn sampler(&self) -> Result<PriorSampler> {
        Ok(match self {
            Prior::Gaussian(p) => PriorSampler::Gaussian(MvnSampler::new(&p.mean, &p.cov)?),
            Prior::Beta(p) => PriorSampler::Beta(
                p.alpha
                    .iter()
                    .zip(&p.beta)
                    .map(|(&a, &b)| Beta::new(a, b).map_err(|e| invalid("alpha/beta", e.to_string())))
                    .collect::<Result<_>>()?,
            ),
            Prior::Discrete(p) => PriorSampler::Discrete(p.clone()),
        })
    }

    /// Draws one environment `μ` from the prior.
    pub fn sample_mean(&self, rng: &mut RngStream) -> Result<MeanVector> {
        Ok(self.sampler()?.sample(rng))
    }
}

impl From<GaussianPrior> for Prior {
    fn from(p: GaussianPrior) -> Self {
        Prior::Gaussian(p)
    }
}

impl From<BetaProductPrior> for Prior {
    fn from(p: BetaProductPrior) -> Self {
        Prior::Beta(p)
    }
}

impl From<DiscretePrior> for Prior {
    fn from(p: DiscretePrior) -> Self {
        Prior::Discrete(p)
    }
}

#[derive(Debug, Clone)]
pub enum PriorSampler {
    Gaussian(MvnSampler),
    Beta(Vec<Beta<f64>>),
    Discrete(DiscretePrior),
}

impl PriorSampler {
    pub fn sample(&self, rng: &mut RngStream) -> MeanVector {
        match self {
            PriorSampler::Gaussian(s) => s.sample(rng),
            PriorSampler::Beta(ds) => MeanVector::new(ds.iter().map(|d| d.sample(rng)).collect()),
            PriorSampler::Discrete(p) => p.atoms[rng.categorical(&p.weights)].clone(),
        }
    }

    /// Index of the sampled atom, for discrete priors.
    pub fn sample_atom(&self, rng: &mut RngStream) -> Option<usize> {
        match self {
            PriorSampler::Discrete(p) => Some(rng.categorical(&p.weights)),
            _ => None,
        }
    }
}
