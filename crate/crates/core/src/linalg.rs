//! Dense linear algebra used by the samplers, posteriors and estimators.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{CovMatrix, MeanVector};

const JITTER_SCALE: f64 = 1e-10;
const JITTER_RETRIES: usize = 3;

/// Lower-triangular factor `L` with `L Lᵀ ≈ cov`.
///
/// Tries a plain Cholesky first; on failure adds `1e-10·tr(cov)/A·I`, growing
/// tenfold per retry, for at most three retries. An all-zero matrix factors to
/// the zero matrix.
pub fn psd_factor(cov: &CovMatrix) -> Result<DMatrix<f64>> {
    let n = cov.dim();
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let sym = cov.symmetrized();
    if let Some(ch) = Cholesky::new(sym.0.clone()) {
        return Ok(ch.unpack());
    }
    let trace = sym.trace();
    if trace <= 0.0 {
        if sym.iter().all(|&v| v == 0.0) {
            return Ok(DMatrix::zeros(n, n));
        }
        return Err(Error::NotPsd);
    }
    let mut jitter = JITTER_SCALE * trace / n as f64;
    for _ in 0..JITTER_RETRIES {
        let mut m = sym.0.clone();
        for i in 0..n {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = Cholesky::new(m) {
            return Ok(ch.unpack());
        }
        jitter *= 10.0;
    }
    Err(Error::NotPsd)
}

/// Reusable sampler for `N(mean, cov)`; factors the covariance once.
#[derive(Debug, Clone)]
pub struct MvnSampler {
    mean: DVector<f64>,
    factor: DMatrix<f64>,
}

impl MvnSampler {
    pub fn new(mean: &MeanVector, cov: &CovMatrix) -> Result<Self> {
        if cov.dim() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: cov.dim(),
            });
        }
        Ok(Self {
            mean: mean.0.clone(),
            factor: psd_factor(cov)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// Writes one draw into `out` (resized as needed).
    pub fn sample_into(&self, rng: &mut RngStream, out: &mut DVector<f64>) {
        let n = self.mean.len();
        let z: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        if out.len() != n {
            *out = DVector::zeros(n);
        }
        for i in 0..n {
            let mut acc = self.mean[i];
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                acc += self.factor[(i, j)] * zj;
            }
            out[i] = acc;
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> MeanVector {
        let mut out = DVector::zeros(self.mean.len());
        self.sample_into(rng, &mut out);
        MeanVector(out)
    }
}

/// One draw from `N(mean, cov)`.
pub fn mvn_sample(mean: &MeanVector, cov: &CovMatrix, rng: &mut RngStream) -> Result<MeanVector> {
    Ok(MvnSampler::new(mean, cov)?.sample(rng))
}

/// Projection onto the PSD cone: symmetrize, eigendecompose, clamp negative
/// eigenvalues to zero and reconstruct.
pub fn psd_project(m: &CovMatrix) -> Result<CovMatrix> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sym = m.symmetrized();
    let eig = SymmetricEigen::try_new(sym.0, f64::EPSILON, 10_000).ok_or(Error::NonFinite)?;
    let clamped = eig.eigenvalues.map(|l| l.max(0.0));
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&clamped) * v.transpose();
    Ok(CovMatrix(out).symmetrized())
}

/// Smallest eigenvalue of the symmetric part.
pub fn min_eigenvalue(m: &CovMatrix) -> f64 {
    SymmetricEigen::new(m.symmetrized().0)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Cholesky of a strictly positive-definite matrix, or `Singular`.
pub fn cholesky_pd(m: &DMatrix<f64>, what: &'static str) -> Result<Cholesky<f64, Dyn>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Cholesky::new(m.clone()).ok_or(Error::Singular(what))
}

/// `log det` of a positive-definite matrix via its Cholesky factor.
pub fn log_det_pd(ch: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * ch.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}
