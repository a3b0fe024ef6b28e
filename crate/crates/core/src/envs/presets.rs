//! Built-in experiment instances.

use std::sync::Arc;

use super::lincb::LinearCbEnv;
use crate::priors::{DiscretePrior, GaussianPrior};
use crate::types::{CovMatrix, MeanVector};

pub const GAUSSIAN_MAB_HORIZON: usize = 10;
pub const LINCB_HORIZON: usize = 20;
pub const DISCRETE_HORIZON: usize = 10;
pub const DISCRETE_ARMS: usize = 20;
pub const DISCRETE_TASKS: usize = 16;

/// Six-dimensional block matrix: two 3×3 blocks with unit diagonal and 0.9
/// off the diagonal.
pub fn block_cov(scale: f64) -> CovMatrix {
    let mut m = CovMatrix::zeros(6);
    for i in 0..6 {
        for j in 0..6 {
            if i / 3 == j / 3 {
                m[(i, j)] = scale * if i == j { 1.0 } else { 0.9 };
            }
        }
    }
    m
}

/// Six-armed Gaussian bandit prior with unit reward noise.
pub fn gaussian_mab_prior() -> GaussianPrior {
    GaussianPrior::new(MeanVector::new(vec![0.5, 0.0, 0.0, 0.1, 0.0, 0.0]), block_cov(1.0), 1.0)
        .expect("valid preset")
}

/// Linear contextual bandit: `d = A = 6`, weight prior `N(1, 0.1·block)`.
pub fn lincb_env() -> LinearCbEnv {
    let prior = GaussianPrior::new(MeanVector::new(vec![1.0; 6]), block_cov(0.1), 1.0).expect("valid preset");
    LinearCbEnv::new(prior, 6, 1.0).expect("valid preset")
}

/// The 16 task mean vectors over 20 arms.
///
/// Tasks come in four groups of four. Arm `5g` identifies group `g`: it pays
/// `0.1·(p+1)` under the group's task `p` and nothing elsewhere. Task
/// `(g, p)` has its unique optimal arm `5g + 1 + p`, paying 1. All other
/// arms pay 0.
pub fn discrete_atoms() -> Arc<[MeanVector]> {
    (0..DISCRETE_TASKS)
        .map(|task| {
            let (g, p) = (task / 4, task % 4);
            let mut m = vec![0.0; DISCRETE_ARMS];
            m[5 * g] = 0.1 * (p + 1) as f64;
            m[5 * g + 1 + p] = 1.0;
            MeanVector::new(m)
        })
        .collect::<Vec<_>>()
        .into()
}

/// Prior with mass 9/40 on each task of the first group and 1/120 on the
/// other twelve.
pub fn discrete_prior() -> DiscretePrior {
    let mut weights: Vec<f64> = (0..DISCRETE_TASKS)
        .map(|t| if t < 4 { 9.0 / 40.0 } else { 1.0 / 120.0 })
        .collect();
    let rest: f64 = weights[1..].iter().sum();
    weights[0] = 1.0 - rest;
    DiscretePrior::from_shared(discrete_atoms(), weights).expect("valid preset")
}

/// Uniform prior over the same tasks.
pub fn discrete_uniform_prior() -> DiscretePrior {
    DiscretePrior::uniform(discrete_atoms()).expect("valid preset")
}
