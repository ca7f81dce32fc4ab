//! First-order conditions for the single-witness problem.
//!
//! With `β_a = 1 − Σ_{j<a} β_j` eliminated, a constrained maximum satisfies
//!
//! ```text
//! Y'_{β_j} = λ Z'_{β_j} − 2 λ_j      (j ∈ [a−1])
//! Y'_δ     = λ Z'_δ
//! λ_j (β_a − β_j) = 0,  λ_j ≥ 0
//! ```
//!
//! where `Z` is the summed membership of the witness tuple. `λ` comes from the
//! δ equation; each `λ_j` from its own equation. Constraints with
//! `β_j > β_a` are inactive and carry `λ_j = 0`.

use serde::Serialize;

use super::{delta_derivative, gaussian_pdf, grad_smoothed_count, BetaVector};
use crate::error::{domain, Error, Result};
use crate::families::KSet;

/// Gap below which `β_j` and `β_a` count as tied.
pub const ACTIVE_TOL: f64 = 1e-9;
/// Coordinates at or below this are outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KktReport {
    /// Last support index, eliminated through the sum constraint.
    pub support: usize,
    /// Multiplier of the witness constraint.
    pub lambda: f64,
    /// `λ_j` for `j ∈ [a−1]`: solved value on active constraints, zero elsewhere.
    pub lambdas: Vec<f64>,
    pub stationarity_residual: f64,
    pub slackness_violation: f64,
    pub delta_residual: f64,
    /// Smallest entry of `lambdas` (negative means the conditions fail).
    pub min_lambda: f64,
}

impl KktReport {
    pub fn satisfied(&self, residual_tol: f64, lambda_tol: f64) -> bool {
        self.stationarity_residual < residual_tol && self.min_lambda >= -lambda_tol
    }
}

pub fn kkt_check(
    beta: &BetaVector,
    delta: f64,
    sigma: f64,
    witness: &[KSet],
    n: usize,
    k: usize,
) -> Result<KktReport> {
    if witness.is_empty() {
        return domain("witness tuple is empty");
    }
    let a = beta.support(SUPPORT_TOL).min(n);
    if a == 0 {
        return domain("weight vector has empty support");
    }
    let y_beta = grad_smoothed_count(beta, delta, sigma, n, k, a)?;
    let y_delta = delta_derivative(beta, delta, sigma, n, k)?;

    let dens: Vec<f64> = witness
        .iter()
        .map(|&x| gaussian_pdf((beta.weight(x) - delta) / sigma) / sigma)
        .collect();
    let z_delta = -dens.iter().sum::<f64>();
    if z_delta.abs() <= 1e-300 {
        return Err(Error::Degenerate(
            "witness memberships are flat in delta; multiplier undefined".into(),
        ));
    }
    let z_beta = |j: usize| -> f64 {
        witness
            .iter()
            .zip(&dens)
            .map(|(&x, &d)| d * (x.contains(j) as i32 - x.contains(a) as i32) as f64)
            .sum()
    };

    let lambda = y_delta / z_delta;
    let beta_a = beta[a - 1];
    let mut lambdas = Vec::with_capacity(a.saturating_sub(1));
    let mut residual: f64 = 0.0;
    let mut slackness: f64 = 0.0;
    for j in 1..a {
        let zj = z_beta(j);
        let active = beta[j - 1] - beta_a <= ACTIVE_TOL;
        let lj = if active { (lambda * zj - y_beta[j - 1]) / 2.0 } else { 0.0 };
        let used = lj.max(0.0);
        residual = residual.max((y_beta[j - 1] - lambda * zj + 2.0 * used).abs());
        slackness = slackness.max((lj * (beta_a - beta[j - 1])).abs());
        lambdas.push(lj);
    }
    let min_lambda = lambdas.iter().copied().fold(0.0, f64::min);
    Ok(KktReport {
        support: a,
        lambda,
        lambdas,
        stationarity_residual: residual,
        slackness_violation: slackness,
        delta_residual: (y_delta - lambda * z_delta).abs(),
        min_lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::canonical_matching_witness;

    #[test]
    fn slackness_is_exact_on_step_vectors() {
        let w = canonical_matching_witness(2, 3).unwrap();
        for a in 1..=5 {
            let b = BetaVector::step(a, 5).unwrap();
            let r = kkt_check(&b, 0.3, 0.05, &w, 6, 3).unwrap();
            assert_eq!(r.slackness_violation, 0.0);
            assert_eq!(r.support, a);
            assert!(r.delta_residual < 1e-9);
        }
    }

    #[test]
    fn negative_control() {
        let w = canonical_matching_witness(2, 3).unwrap();
        let b = BetaVector::new(vec![0.45, 0.3, 0.15, 0.1, 0.0]).unwrap();
        let r = kkt_check(&b, 0.3, 0.1, &w, 6, 3).unwrap();
        assert!(r.stationarity_residual > 1e-2, "{r:?}");
    }

    #[test]
    fn flat_witness_is_degenerate() {
        let w = canonical_matching_witness(2, 3).unwrap();
        let b = BetaVector::step(1, 5).unwrap();
        assert!(matches!(
            kkt_check(&b, 0.5, 1e-3, &w, 6, 3),
            Err(Error::Degenerate(_))
        ));
    }
}
