//! Upper-tail expectations and the sensitivity bounds built on them.

use crate::error::{invalid, Result};

/// Tail condition on the prior over `diam(μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailSpec {
    /// `diam(μ) ≤ bound` almost surely.
    Bounded { bound: f64 },
    /// Coordinate-wise sub-Gaussian with scale `sigma` around a mean vector
    /// of diameter `mean_diam`.
    SubGaussian { sigma: f64, mean_diam: f64 },
    /// Coordinate-wise sub-Gamma with variance scale `sigma` and scale `nu`.
    SubGamma { sigma: f64, nu: f64, mean_diam: f64 },
}

/// `Ψ_X(p) = sup { E[XY]/p : 0 ≤ Y ≤ 1, E[Y] ≤ p }` for a finitely supported
/// nonnegative `X` given as `(value, probability)` pairs. For `p ≥ 1` this is
/// `E[X]`.
///
/// Evaluated through the quantile `q = q_X(p)`: all mass strictly above `q`
/// is kept, and the atom at `q` receives weight
/// `(p − Pr[X > q]) / Pr[X = q]`, so that the selector has expectation `p`.
pub fn tail_expectation_discrete(dist: &[(f64, f64)], p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid("p", "must be positive"));
    }
    if dist.is_empty() {
        return Err(invalid("dist", "empty distribution"));
    }
    if dist.iter().any(|&(v, _)| !(v >= 0.0) || !v.is_finite()) {
        return Err(invalid("dist", "values must be finite and nonnegative"));
    }
    if dist.iter().any(|&(_, w)| !(w >= 0.0)) {
        return Err(invalid("dist", "probabilities must be nonnegative"));
    }
    let total: f64 = dist.iter().map(|&(_, w)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid("dist", format!("probabilities sum to {total}")));
    }

    // Merge equal values and sort ascending.
    let mut atoms: Vec<(f64, f64)> = dist.iter().copied().filter(|&(_, w)| w > 0.0).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (v, w) in atoms {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += w,
            _ => merged.push((v, w)),
        }
    }

    let mean: f64 = merged.iter().map(|&(v, w)| v * w).sum();
    if p >= 1.0 {
        return Ok(mean);
    }

    // survival[i] = Pr[X > merged[i].0]
    let mut survival = vec![0.0; merged.len()];
    let mut acc = 0.0;
    for i in (0..merged.len()).rev() {
        survival[i] = acc;
        acc += merged[i].1;
    }
    // q_X(p) = smallest support point with Pr[X > q] ≤ p.
    let q_idx = survival
        .iter()
        .position(|&s| s <= p)
        .unwrap_or(merged.len() - 1);
    let (q, _) = merged[q_idx];
    let above: f64 = merged[q_idx + 1..].iter().map(|&(v, w)| v * w).sum();
    let boundary_mass = p - survival[q_idx];
    Ok((above + q * boundary_mass) / p)
}

/// Upper bound on `Ψ_θ(p)` under the given tail condition; `p` is clamped to
/// `min(1, p)`.
pub fn tail_bound(spec: TailSpec, num_arms: usize, p: f64) -> f64 {
    let p = p.min(1.0);
    let log_term = || (2.0 * num_arms as f64 / p).ln();
    match spec {
        TailSpec::Bounded { bound } => bound,
        TailSpec::SubGaussian { sigma, mean_diam } => {
            mean_diam + sigma * (8.0 + 5.0 * log_term().sqrt())
        }
        TailSpec::SubGamma {
            sigma,
            nu,
            mean_diam,
        } => {
            let l = log_term();
            mean_diam + sigma * (8.0 + 5.0 * l.sqrt()) + nu * (11.0 + 7.0 * l)
        }
    }
}

/// `2 n H² ε · Ψ(2nHε)`: the largest possible reward gap between an
/// `n`-Monte-Carlo algorithm run with the true prior and with a prior at total
/// variation `eps`.
pub fn sensitivity_bound(n: u64, horizon: u64, eps: f64, spec: TailSpec, num_arms: usize) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let (n, h) = (n as f64, horizon as f64);
    2.0 * n * h * h * eps * tail_bound(spec, num_arms, 2.0 * n * h * eps)
}

/// `min(1, 2nHε)`: bound on the total variation between the joint laws of
/// `(μ, τ_H)` under the true and misspecified algorithms.
pub fn trajectory_tv_bound(n: u64, horizon: u64, eps: f64) -> f64 {
    (2.0 * n as f64 * horizon as f64 * eps).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tail_expectation_examples() {
        for p in [0.01, 0.3, 1.0, 5.0] {
            assert_abs_diff_eq!(tail_expectation_discrete(&[(2.5, 1.0)], p).unwrap(), 2.5, epsilon = 1e-12);
        }
        let coin = [(0.0, 0.5), (1.0, 0.5)];
        assert_abs_diff_eq!(tail_expectation_discrete(&coin, 0.5).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tail_expectation_discrete(&coin, 2.0).unwrap(), 0.5, epsilon = 1e-12);
        // Boundary atom split: p = 0.75 takes all of 1 and half the mass at 0.
        assert_abs_diff_eq!(tail_expectation_discrete(&coin, 0.75).unwrap(), 0.5 / 0.75, epsilon = 1e-12);
    }

    #[test]
    fn tail_expectation_errors() {
        assert!(tail_expectation_discrete(&[(-1.0, 1.0)], 0.5).is_err());
        assert!(tail_expectation_discrete(&[(1.0, 1.0)], 0.0).is_err());
        assert!(tail_expectation_discrete(&[(1.0, 0.4)], 0.5).is_err());
    }

    #[test]
    fn tail_bound_examples() {
        assert_eq!(tail_bound(TailSpec::Bounded { bound: 1.0 }, 5, 0.3), 1.0);
        let sg = tail_bound(TailSpec::SubGaussian { sigma: 1.0, mean_diam: 0.0 }, 1, 2.0);
        assert_abs_diff_eq!(sg, 8.0 + 5.0 * 2f64.ln().sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(sg, 12.1628, epsilon = 1e-3);
        let sgam = tail_bound(TailSpec::SubGamma { sigma: 0.0, nu: 1.0, mean_diam: 0.0 }, 1, 1.0);
        assert_abs_diff_eq!(sgam, 11.0 + 7.0 * 2f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(sgam, 15.852, epsilon = 1e-3);
    }

    #[test]
    fn sensitivity_bound_examples() {
        let b1 = TailSpec::Bounded { bound: 1.0 };
        assert_abs_diff_eq!(sensitivity_bound(1, 10, 0.01, b1, 2), 2.0, epsilon = 1e-12);
        assert_eq!(sensitivity_bound(1, 10, 0.0, b1, 2), 0.0);
        let b3 = TailSpec::Bounded { bound: 3.0 };
        assert_abs_diff_eq!(sensitivity_bound(2, 5, 0.1, b3, 2), 30.0, epsilon = 1e-12);
        let sg = TailSpec::SubGaussian { sigma: 1.0, mean_diam: 0.0 };
        assert_eq!(sensitivity_bound(1, 10, 0.0, sg, 3), 0.0);
    }

    #[test]
    fn sensitivity_bound_scaling() {
        let base = sensitivity_bound(2, 7, 0.003, TailSpec::Bounded { bound: 1.5 }, 4);
        let double_b = sensitivity_bound(2, 7, 0.003, TailSpec::Bounded { bound: 3.0 }, 4);
        let double_n = sensitivity_bound(4, 7, 0.003, TailSpec::Bounded { bound: 1.5 }, 4);
        let double_eps = sensitivity_bound(2, 7, 0.006, TailSpec::Bounded { bound: 1.5 }, 4);
        let double_h = sensitivity_bound(2, 14, 0.003, TailSpec::Bounded { bound: 1.5 }, 4);
        assert_abs_diff_eq!(double_b / base, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(double_n / base, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(double_eps / base, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(double_h / base, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn trajectory_tv_examples() {
        assert_abs_diff_eq!(trajectory_tv_bound(1, 5, 0.01), 0.1, epsilon = 1e-12);
        assert_eq!(trajectory_tv_bound(1, 5, 0.0), 0.0);
        assert_eq!(trajectory_tv_bound(3, 100, 0.5), 1.0);
    }
}
