//! Gaussian smoothing of the family-size objective.
//!
//! A k-set `x` belongs to the halfspace family `{(β, x) > δ}`; replacing the
//! indicator by `Z(x, σ) = Φ(((β, x) − δ)/σ)` turns the family size into the
//! smooth count `Y = Σ_x Z(x, σ)`, which this module evaluates, differentiates
//! and maximizes over the monotone simplex.

mod kkt;
mod optimize;
mod projection;

use std::f64::consts::{PI, SQRT_2};
use std::ops::Deref;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::exactmath::{binom, tail_sum, BigCount};
use crate::families::{ksets, KSet};

pub use kkt::{kkt_check, KktReport};
pub use optimize::{maximize, Problem, SmoothingConfig, SmoothingOutcome, TraceRecord};
pub use projection::{isotonic_nonincreasing, project_monotone_simplex, simplex_projection};

/// Largest number of k-sets the generic path will enumerate.
pub const ENUMERATION_LIMIT: u64 = 5_000_000;

/// Above this many terms the per-set work is spread over the rayon pool.
const PARALLEL_THRESHOLD: usize = 4096;

/// Standard normal CDF.
pub fn gaussian_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn gaussian_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Sum with a fixed binary tree, so the rounding does not depend on how the
/// terms were produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1..=8 => v.iter().sum(),
        n => {
            let (a, b) = v.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// A point of the monotone simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaVector(Vec<f64>);

impl BetaVector {
    pub const TOLERANCE: f64 = 1e-9;

    /// Checks nonnegativity, monotonicity and unit sum (to [`Self::TOLERANCE`]).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("weight vector is empty");
        }
        if values.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return domain("weights must be finite and nonnegative");
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return domain("weights must be nonincreasing");
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > Self::TOLERANCE {
            return domain(format!("weights sum to {total}, not 1"));
        }
        Ok(BetaVector(values))
    }

    /// Nearest point of the monotone simplex to `values`.
    pub fn project(values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return domain("cannot project an empty or non-finite vector");
        }
        Ok(BetaVector(project_monotone_simplex(values)))
    }

    /// `1/a` on the first `a` coordinates, zero on the rest.
    pub fn step(a: usize, len: usize) -> Result<Self> {
        if a == 0 || a > len {
            return domain(format!("step support {a} outside 1..={len}"));
        }
        let w = 1.0 / a as f64;
        Ok(BetaVector((0..len).map(|j| if j < a { w } else { 0.0 }).collect()))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Last coordinate above `tol`.
    pub fn support(&self, tol: f64) -> usize {
        self.0.iter().rposition(|&b| b > tol).map_or(0, |j| j + 1)
    }

    /// `Some(a)` when the vector is bit-for-bit `step(a)`.
    pub fn exact_step(&self) -> Option<usize> {
        let a = self.support(0.0);
        (a > 0 && self.0[..a].iter().all(|&b| b == self.0[0]) && self.0[0] == 1.0 / a as f64)
            .then_some(a)
    }

    /// Nearest step vector in max-norm, as `(a, distance)`.
    pub fn nearest_step(&self) -> (usize, f64) {
        let len = self.0.len();
        (1..=len)
            .map(|a| {
                let w = 1.0 / a as f64;
                let d = self
                    .0
                    .iter()
                    .enumerate()
                    .map(|(j, &b)| (b - if j < a { w } else { 0.0 }).abs())
                    .fold(0.0, f64::max);
                (a, d)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty")
    }

    pub fn weight(&self, x: KSet) -> f64 {
        x.elements().filter_map(|e| self.0.get(e - 1)).sum()
    }
}

impl Deref for BetaVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return domain(format!("sigma must be positive and finite, got {sigma}"));
    }
    Ok(())
}

/// `Z(x, σ) = Φ(((β, x) − δ)/σ)`.
pub fn smoothed_membership(x: KSet, beta: &BetaVector, delta: f64, sigma: f64) -> f64 {
    gaussian_cdf((beta.weight(x) - delta) / sigma)
}

fn enumerate(n: usize, k: usize) -> Result<Vec<KSet>> {
    let count = binom(n as i64, k as i64);
    if count > BigCount::from(ENUMERATION_LIMIT) {
        return Err(Error::Capacity(format!(
            "C({n},{k}) = {count} exceeds the enumeration limit {ENUMERATION_LIMIT}"
        )));
    }
    ksets(n, k)
}

fn map_sets(sets: &[KSet], f: impl Fn(KSet) -> f64 + Sync) -> Vec<f64> {
    if sets.len() >= PARALLEL_THRESHOLD {
        sets.par_iter().map(|&x| f(x)).collect()
    } else {
        sets.iter().map(|&x| f(x)).collect()
    }
}

/// `Y = Σ_x Z(x, σ)` over `C([n], k)`. Step vectors take the grouped closed
/// form; everything else is enumerated.
pub fn smoothed_count(beta: &BetaVector, delta: f64, sigma: f64, n: usize, k: usize) -> Result<f64> {
    check_sigma(sigma)?;
    match beta.exact_step() {
        Some(a) if a <= n => Ok(step_smoothed_count(a, delta, sigma, n, k)),
        _ => smoothed_count_enumerated(beta, delta, sigma, n, k),
    }
}

/// Plain enumeration of `Y`, bypassing the step fast path.
pub fn smoothed_count_enumerated(
    beta: &BetaVector,
    delta: f64,
    sigma: f64,
    n: usize,
    k: usize,
) -> Result<f64> {
    check_sigma(sigma)?;
    let sets = enumerate(n, k)?;
    Ok(pairwise_sum(&map_sets(&sets, |x| smoothed_membership(x, beta, delta, sigma))))
}

/// `Σ_p C(a,p) C(n−a,k−p) Φ((p/a − δ)/σ)`.
pub fn step_smoothed_count(a: usize, delta: f64, sigma: f64, n: usize, k: usize) -> f64 {
    let terms: Vec<f64> = (0..=k.min(a))
        .map(|p| {
            let mult = (binom(a as i64, p as i64) * binom((n - a) as i64, (k - p) as i64)).to_f64();
            mult * gaussian_cdf((p as f64 / a as f64 - delta) / sigma)
        })
        .collect();
    pairwise_sum(&terms)
}

/// Derivatives of `Y` with `β_a = 1 − Σ_{j<a} β_j` eliminated: entry `j − 1`
/// is `∂Y/∂β_j − ∂Y/∂β_a` for `j ∈ [a−1]`.
pub fn grad_smoothed_count(
    beta: &BetaVector,
    delta: f64,
    sigma: f64,
    n: usize,
    k: usize,
    a: usize,
) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    if a == 0 || a > beta.len() || a > n {
        return domain(format!("eliminated index {a} outside 1..={}", beta.len().min(n)));
    }
    let sets = enumerate(n, k)?;
    let c = 1.0 / (sigma * (2.0 * PI).sqrt());
    let dens = map_sets(&sets, |x| {
        let u = (beta.weight(x) - delta) / sigma;
        (-0.5 * u * u).exp()
    });
    Ok((1..a)
        .map(|j| {
            let signed: Vec<f64> = sets
                .iter()
                .zip(&dens)
                .map(|(&x, &g)| match (x.contains(j), x.contains(a)) {
                    (true, false) => g,
                    (false, true) => -g,
                    _ => 0.0,
                })
                .collect();
            c * pairwise_sum(&signed)
        })
        .collect())
}

/// `∂Y/∂δ`.
pub fn delta_derivative(beta: &BetaVector, delta: f64, sigma: f64, n: usize, k: usize) -> Result<f64> {
    check_sigma(sigma)?;
    let sets = enumerate(n, k)?;
    let dens = map_sets(&sets, |x| gaussian_pdf((beta.weight(x) - delta) / sigma));
    Ok(-pairwise_sum(&dens) / sigma)
}

/// `max(0, Σ_m Z(x_m, σ) − (|witness| − 1 + slack))`. Positive when the
/// forbidden tuple is not sufficiently excluded.
pub fn witness_penalty(witness: &[KSet], beta: &BetaVector, delta: f64, sigma: f64, slack: f64) -> f64 {
    let total: f64 = witness.iter().map(|&x| smoothed_membership(x, beta, delta, sigma)).sum();
    (total - (witness.len() as f64 - 1.0 + slack)).max(0.0)
}

/// Second root `γ` of the two-value dichotomy: `2(δ − c) / (1 − 2c)` with
/// `c = (k−1)/(n−2)`.
pub fn gamma_threshold(delta: f64, n: usize, k: usize) -> Result<f64> {
    if n <= 2 {
        return domain("gamma threshold needs n > 2");
    }
    if n == 2 * k {
        return domain("gamma threshold undefined when n = 2k");
    }
    let c = (k as f64 - 1.0) / (n as f64 - 2.0);
    Ok(2.0 * (delta - c) / (1.0 - 2.0 * c))
}

/// Distance of `β` from the manifold `β_j + β_a = γ`, minimized over `j < a`.
pub fn spurious_manifold_distance(beta: &BetaVector, a: usize, gamma: f64) -> Option<f64> {
    (a >= 2 && a <= beta.len()).then(|| {
        (0..a - 1)
            .map(|j| (beta[j] + beta[a - 1] - gamma).abs())
            .fold(f64::INFINITY, f64::min)
    })
}

/// Support size `a = (m−1)ℓ + p` and the threshold `ψ = (m−1)/a` that
/// excludes the canonical matching under the step vector on `[a]`.
pub fn psi_threshold(m: usize, ell: usize, p: usize) -> Result<(usize, f64)> {
    if m < 1 || p >= ell {
        return domain(format!("need m >= 1 and 0 <= p < ell; got m={m} p={p} ell={ell}"));
    }
    let a = (m - 1) * ell + p;
    if a == 0 {
        return domain("support size a = 0");
    }
    Ok((a, (m - 1) as f64 / a as f64))
}

/// `Σ_{j ≥ m} C(a, j) C(n−a, k−j)`: k-sets meeting `[a]` in at least `m` points.
pub fn admissible_count(a: usize, m: usize, n: usize, k: usize) -> Result<BigCount> {
    if a < 1 || a > n {
        return domain(format!("need 1 <= a <= n; got a={a} n={n}"));
    }
    Ok(tail_sum(a as i64, m as i64, n as i64, k as i64))
}

/// Sets grouped by their trace on the first `len` coordinates; the optimizer
/// works on these classes instead of on every k-set.
#[derive(Clone, Debug)]
pub(crate) struct Landscape {
    /// `(trace mask, number of k-sets with this trace)`.
    classes: Vec<(KSet, f64)>,
}

impl Landscape {
    pub(crate) fn new(n: usize, k: usize, len: usize) -> Result<Self> {
        let len = len.min(n);
        let mut classes = Vec::new();
        for p in 0..=k.min(len) {
            let mult = binom((n - len) as i64, (k - p) as i64);
            if mult.is_zero() {
                continue;
            }
            for t in ksets(len, p)? {
                classes.push((t, mult.to_f64()));
            }
        }
        Ok(Landscape { classes })
    }

    /// `Y`, `∂Y/∂β` (full length) and `∂Y/∂δ`.
    pub(crate) fn evaluate(&self, beta: &[f64], delta: f64, sigma: f64) -> (f64, Vec<f64>, f64) {
        let mut y = Vec::with_capacity(self.classes.len());
        let mut dens = Vec::with_capacity(self.classes.len());
        for &(t, mult) in &self.classes {
            let u = (t.elements().map(|e| beta[e - 1]).sum::<f64>() - delta) / sigma;
            y.push(mult * gaussian_cdf(u));
            dens.push(mult * gaussian_pdf(u) / sigma);
        }
        let mut grad = vec![0.0; beta.len()];
        for (&(t, _), &d) in self.classes.iter().zip(&dens) {
            for e in t.elements() {
                grad[e - 1] += d;
            }
        }
        (pairwise_sum(&y), grad, -pairwise_sum(&dens))
    }
}
