//! Projected gradient ascent on `Y − w · penalty` over the monotone simplex.
//!
//! `σ` decreases geometrically from `sigma_start` to `sigma` over the run and
//! the penalty weight grows geometrically, so early iterations see a smooth
//! landscape and late ones a nearly exact count. Steps are normalized to
//! length `step · σ_t`, tapered linearly to let the iterates settle, in
//! `(β, δ)` jointly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::kkt::{kkt_check, KktReport};
use super::{
    gaussian_pdf, project_monotone_simplex, smoothed_count, smoothed_membership, witness_penalty,
    BetaVector, Landscape,
};
use crate::error::{domain, Result};
use crate::exactmath::binom;
use crate::families::{canonical_matching_witness, canonical_swise_witness, KSet};
use crate::formulas::{IntersectParams, MatchingParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Problem {
    Matching(MatchingParams),
    Intersect(IntersectParams),
}

impl Problem {
    pub fn n(&self) -> usize {
        match self {
            Problem::Matching(p) => p.n(),
            Problem::Intersect(q) => q.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Problem::Matching(p) => p.k(),
            Problem::Intersect(q) => q.k(),
        }
    }

    /// Length of `β`: `kℓ − 1` for matchings, `n − 1` for intersections,
    /// capped at `n`.
    pub fn support_len(&self) -> usize {
        let len = match self {
            Problem::Matching(p) => p.k() * p.ell() - 1,
            Problem::Intersect(q) => q.n() - 1,
        };
        len.min(self.n()).max(1)
    }

    /// The forbidden tuple whose exclusion the penalty enforces.
    pub fn witness(&self) -> Result<Vec<KSet>> {
        match self {
            Problem::Matching(p) => {
                if p.k() * p.ell() > p.n() {
                    return domain(format!(
                        "no {}-matching of {}-sets fits in [{}]",
                        p.ell(),
                        p.k(),
                        p.n()
                    ));
                }
                canonical_matching_witness(p.ell(), p.k())
            }
            Problem::Intersect(q) => canonical_swise_witness(q.s(), q.t(), q.k(), q.n()),
        }
    }

    fn slack(&self, cfg: &SmoothingConfig) -> f64 {
        match self {
            Problem::Matching(_) => cfg.mu1,
            Problem::Intersect(_) => cfg.mu2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingConfig {
    /// Final smoothing width.
    pub sigma: f64,
    /// Initial smoothing width.
    pub sigma_start: f64,
    /// Membership slack: `Z > 1 − μ` reads as membership.
    pub mu: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Starting threshold; drawn from the seed when absent.
    pub delta: Option<f64>,
    pub epsilon1: f64,
    /// Step length per unit of `σ`.
    pub step: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Penalty weight at the first and last iteration, in units of `C(n, k)`.
    pub penalty_start: f64,
    pub penalty_end: f64,
    /// Pins the support of `β` to `[a]`.
    pub support: Option<usize>,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        SmoothingConfig {
            sigma: 1e-3,
            sigma_start: 0.5,
            mu: 0.1,
            mu1: 0.1,
            mu2: 0.1,
            delta: None,
            epsilon1: 1e-6,
            step: 0.2,
            max_iter: 20_000,
            seed: 0,
            penalty_start: 1.0,
            penalty_end: 1000.0,
            support: None,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.sigma) || !pos(self.sigma_start) || self.sigma_start < self.sigma {
            return domain("need 0 < sigma <= sigma_start");
        }
        for (name, v) in [("mu", self.mu), ("mu1", self.mu1), ("mu2", self.mu2)] {
            if !(v > 0.0 && v < 1.0) {
                return domain(format!("{name} must lie in (0, 1)"));
            }
        }
        if !pos(self.epsilon1) || !pos(self.step) {
            return domain("epsilon1 and step must be positive");
        }
        if self.max_iter < 2 {
            return domain("max_iter must be at least 2");
        }
        if !pos(self.penalty_start) || self.penalty_end < self.penalty_start {
            return domain("need 0 < penalty_start <= penalty_end");
        }
        if self.delta.is_some_and(|d| !d.is_finite()) {
            return domain("delta must be finite");
        }
        if self.support == Some(0) {
            return domain("support must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub y: f64,
    pub penalty: f64,
    pub sigma: f64,
    pub step_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingOutcome {
    pub beta: BetaVector,
    pub delta: f64,
    pub sigma: f64,
    /// `Y` at the final point and final `σ`.
    pub smoothed_count: f64,
    pub penalty: f64,
    /// Exact size of `{x : (β, x) > δ}`.
    pub family_size: u64,
    /// Whether every witness member is outside the exact family but one or more.
    pub witness_excluded: bool,
    /// Nearest step vector and its max-norm distance.
    pub nearest_step: (usize, f64),
    pub kkt: Option<KktReport>,
    /// Feasible and moved less than `1e-4` over the last hundredth of the run.
    pub converged: bool,
    pub trace: Vec<TraceRecord>,
}

/// Nonincreasing, unit-sum start drawn from the seed.
fn initial_beta(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..len).map(|_| -rng.gen::<f64>().ln()).collect();
    raw.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = raw.iter().sum();
    project_monotone_simplex(&raw.iter().map(|v| v / total).collect::<Vec<_>>())
}

pub fn maximize(problem: Problem, config: &SmoothingConfig) -> Result<SmoothingOutcome> {
    config.validate()?;
    let (n, k) = (problem.n(), problem.k());
    let len = problem.support_len();
    let active = config.support.map_or(len, |a| a.min(len));
    let witness = problem.witness()?;
    let slack = problem.slack(config);
    let landscape = Landscape::new(n, k, len)?;
    let scale = binom(n as i64, k as i64).to_f64();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut beta = vec![0.0; len];
    beta[..active].copy_from_slice(&initial_beta(&mut rng, active));
    let mut delta = config.delta.unwrap_or_else(|| rng.gen_range(0.05..0.95));

    let iters = config.max_iter;
    let settle_from = iters - (iters / 100).max(2).min(iters - 1);
    let mut anchor: Option<(Vec<f64>, f64)> = None;
    let mut drift: f64 = 0.0;
    let mut trace = Vec::with_capacity(iters);

    for it in 0..iters {
        let frac = it as f64 / (iters - 1) as f64;
        let sigma = config.sigma_start * (config.sigma / config.sigma_start).powf(frac);
        let weight = scale * config.penalty_start * (config.penalty_end / config.penalty_start).powf(frac);

        let (y, mut g_beta, mut g_delta) = landscape.evaluate(&beta, delta, sigma);
        let bv = BetaVector(beta.clone());
        let penalty = witness_penalty(&witness, &bv, delta, sigma, slack);
        if penalty > 0.0 {
            for &x in &witness {
                let d = gaussian_pdf((bv.weight(x) - delta) / sigma) / sigma;
                for e in x.elements().filter(|&e| e <= len) {
                    g_beta[e - 1] -= weight * d;
                }
                g_delta += weight * d;
            }
        }
        trace.push(TraceRecord {
            iter: it,
            y,
            penalty,
            sigma,
            step_deviation: bv.nearest_step().1,
        });

        g_beta[active..].iter_mut().for_each(|g| *g = 0.0);
        let norm = (g_beta.iter().map(|g| g * g).sum::<f64>() + g_delta * g_delta).sqrt();
        if norm > 0.0 && norm.is_finite() {
            let eta = config.step * sigma * (1.0 - frac).max(1e-3) / norm;
            let moved: Vec<f64> = beta[..active].iter().zip(&g_beta).map(|(b, g)| b + eta * g).collect();
            beta[..active].copy_from_slice(&project_monotone_simplex(&moved));
            delta += eta * g_delta;
        }

        if it >= settle_from {
            match &anchor {
                None => anchor = Some((beta.clone(), delta)),
                Some((b0, d0)) => {
                    let d = beta.iter().zip(b0).map(|(a, b)| (a - b).abs()).fold((delta - d0).abs(), f64::max);
                    drift = drift.max(d);
                }
            }
        }
    }

    let beta = BetaVector(beta);
    let sigma = config.sigma;
    let smoothed = smoothed_count(&beta, delta, sigma, n, k)?;
    let penalty = witness_penalty(&witness, &beta, delta, sigma, slack);
    let family_size = crate::families::ksets(n, k)?
        .into_iter()
        .filter(|&x| beta.weight(x) > delta)
        .count() as u64;
    let witness_excluded = witness.iter().any(|&x| beta.weight(x) <= delta);
    let kkt = kkt_check(&beta, delta, sigma, &witness, n, k).ok();
    debug_assert!(witness.iter().all(|&x| smoothed_membership(x, &beta, delta, sigma).is_finite()));
    Ok(SmoothingOutcome {
        nearest_step: beta.nearest_step(),
        converged: penalty == 0.0 && drift < 1e-4,
        beta,
        delta,
        sigma,
        smoothed_count: smoothed,
        penalty,
        family_size,
        witness_excluded,
        kkt,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching(ell: usize, n: usize, k: usize) -> Problem {
        Problem::Matching(MatchingParams::new(ell, n, k).unwrap())
    }

    #[test]
    fn forced_star() {
        let cfg = SmoothingConfig {
            support: Some(1),
            ..Default::default()
        };
        let out = maximize(matching(2, 6, 3), &cfg).unwrap();
        assert_eq!(out.beta.to_vec(), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(out.family_size, 10);
        assert!(out.witness_excluded);
        // The slack lets the excluded witness keep membership up to μ₁, and the
        // ten sets sharing its weight follow it; a tight slack removes the excess.
        let tight = SmoothingConfig { mu1: 1e-6, ..cfg };
        let out = maximize(matching(2, 6, 3), &tight).unwrap();
        assert!((out.smoothed_count - 10.0).abs() < 1e-3);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = SmoothingConfig {
            max_iter: 500,
            seed: 9,
            ..Default::default()
        };
        let a = maximize(matching(2, 6, 3), &cfg).unwrap();
        let b = maximize(matching(2, 6, 3), &cfg).unwrap();
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = SmoothingConfig {
            mu1: 1.5,
            ..Default::default()
        };
        assert!(maximize(matching(2, 6, 3), &cfg).is_err());
        assert!(maximize(matching(3, 5, 2), &SmoothingConfig::default()).is_err());
    }
}
