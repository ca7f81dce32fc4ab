//! Closed-form extremal values and the audits built on them.
//!
//! Matching side: the prefix families `{A : |A ∩ [ℓi−1]| ≥ i}` and the
//! two-term Erdős value. Intersecting side: the Frankl-type families
//! `{E : |E ∩ [t+rs]| ≥ t+(s−1)r}` and the prefix-threshold bound over
//! all support sizes.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::exactmath::{binom, tail_sum, BigCount};

/// Parameters of the matching problem: families of `k`-subsets of `[n]`
/// without `ell` pairwise-disjoint members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MatchingParams {
    ell: usize,
    n: usize,
    k: usize,
}

impl MatchingParams {
    pub fn new(ell: usize, n: usize, k: usize) -> Result<Self> {
        if ell < 2 {
            return domain(format!("matching size must be at least 2, got {ell}"));
        }
        if k < 1 || k > n {
            return domain(format!("need 1 <= k <= n, got k={k} n={n}"));
        }
        Ok(MatchingParams { ell, n, k })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }

    /// `i` is usable when the prefix `[ℓi−1]` fits in the ground set.
    pub fn index_feasible(&self, i: usize) -> bool {
        i >= 1 && i <= self.k && self.ell * i - 1 <= self.n
    }
}

/// Parameters of the s-wise t-intersecting problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntersectParams {
    s: usize,
    n: usize,
    k: usize,
    t: usize,
}

impl IntersectParams {
    pub fn new(s: usize, n: usize, k: usize, t: usize) -> Result<Self> {
        if s < 2 {
            return domain(format!("wise-ness must be at least 2, got {s}"));
        }
        if t < 1 || t > k || k > n {
            return domain(format!("need 1 <= t <= k <= n, got t={t} k={k} n={n}"));
        }
        Ok(IntersectParams { s, n, k, t })
    }

    pub fn s(&self) -> usize {
        self.s
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn t(&self) -> usize {
        self.t
    }

    /// `s·k ≥ (s−1)·n + t`: every s members of `C([n], k)` share `t` elements.
    pub fn is_degenerate(&self) -> bool {
        self.s * self.k >= (self.s - 1) * self.n + self.t
    }

    pub fn radius_feasible(&self, r: usize) -> bool {
        self.t + r * self.s <= self.n && self.t + (self.s - 1) * r <= self.k
    }

    /// Largest `d` with `t + (s−1)d ≤ k`.
    pub fn block_count(&self) -> usize {
        (self.k - self.t) / (self.s - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqualityReport {
    pub lhs: BigCount,
    pub rhs: BigCount,
    pub equal: bool,
    pub argmax_index: i64,
}

fn argmax_first<I>(iter: I) -> Option<(BigCount, i64)>
where
    I: IntoIterator<Item = (i64, BigCount)>,
{
    let mut best: Option<(BigCount, i64)> = None;
    for (idx, v) in iter {
        match &best {
            Some((b, _)) if *b >= v => {}
            _ => best = Some((v, idx)),
        }
    }
    best
}

/// `|{A : |A ∩ [ℓi−1]| ≥ i}|`.
pub fn matching_term(p: &MatchingParams, i: usize) -> Result<BigCount> {
    if !p.index_feasible(i) {
        return domain(format!(
            "index i={i} infeasible for ell={} n={} k={}",
            p.ell, p.n, p.k
        ));
    }
    let a = (p.ell * i - 1) as i64;
    Ok(tail_sum(a, i as i64, p.n as i64, p.k as i64))
}

/// Maximum of [`matching_term`] over feasible `i`, smallest maximizer.
pub fn matching_formula_value(p: &MatchingParams) -> Result<(BigCount, usize)> {
    let best = argmax_first(
        (1..=p.k)
            .filter(|&i| p.index_feasible(i))
            .map(|i| (i as i64, matching_term(p, i).expect("feasible index"))),
    );
    match best {
        Some((v, i)) => Ok((v, i as usize)),
        None => domain(format!(
            "no feasible index for ell={} n={} k={}",
            p.ell, p.n, p.k
        )),
    }
}

/// `max{ C(kℓ−1, k), C(n, k) − C(n−ℓ+1, k) }`.
pub fn erdos_value(p: &MatchingParams) -> BigCount {
    let (ell, n, k) = (p.ell as i64, p.n as i64, p.k as i64);
    let clique = binom(k * ell - 1, k);
    let star = binom(n, k).saturating_sub(&binom(n - ell + 1, k));
    clique.max(star)
}

/// Compares the prefix-family maximum against the Erdős value. Reports, never asserts.
pub fn lemma2_check(p: &MatchingParams) -> Result<EqualityReport> {
    let (lhs, i) = matching_formula_value(p)?;
    let rhs = erdos_value(p);
    Ok(EqualityReport {
        equal: lhs == rhs,
        lhs,
        rhs,
        argmax_index: i as i64,
    })
}

/// Count admitted by the step vector of support `a` with the largest
/// threshold that still forbids the canonical matching: sets with more than
/// `a/ℓ` elements inside `[a]`.
pub fn a_sweep_term(p: &MatchingParams, a: usize) -> BigCount {
    let m = a / p.ell + 1;
    tail_sum(a as i64, m as i64, p.n as i64, p.k as i64)
}

/// Maximum of [`a_sweep_term`] over `a ∈ [kℓ−1]`, smallest maximizer.
pub fn a_sweep_matching(p: &MatchingParams) -> (BigCount, usize) {
    let top = p.k * p.ell - 1;
    let (v, a) = argmax_first((1..=top).map(|a| (a as i64, a_sweep_term(p, a))))
        .expect("k*ell - 1 >= 1");
    (v, a as usize)
}

/// `|{E : |E ∩ [t+rs]| ≥ t+(s−1)r}|`.
pub fn intersect_term(q: &IntersectParams, r: usize) -> Result<BigCount> {
    if !q.radius_feasible(r) {
        return domain(format!(
            "radius r={r} infeasible for s={} t={} n={} k={}",
            q.s, q.t, q.n, q.k
        ));
    }
    let a = (q.t + r * q.s) as i64;
    let m = (q.t + (q.s - 1) * r) as i64;
    Ok(tail_sum(a, m, q.n as i64, q.k as i64))
}

/// Frankl-type maximum; `(C(n,k), -1)` in the degenerate regime.
pub fn intersect_value(q: &IntersectParams) -> (BigCount, i64) {
    if q.is_degenerate() {
        return (binom(q.n as i64, q.k as i64), -1);
    }
    argmax_first(
        (0..=q.k)
            .take_while(|&r| q.t + (q.s - 1) * r <= q.k)
            .filter(|&r| q.radius_feasible(r))
            .map(|r| (r as i64, intersect_term(q, r).expect("feasible radius"))),
    )
    .expect("r = 0 is always feasible")
}

/// Prefix-threshold bound: for every support size `a = t + sp + r ≤ min(n, k+d)`,
/// the sets meeting `[a]` in at least `t + (s−1)p + r` elements. For fixed `a`
/// the largest `p` gives the loosest threshold, so only that one is evaluated.
pub fn section3_bound(q: &IntersectParams) -> Result<BigCount> {
    if q.is_degenerate() {
        return domain("bound is only stated outside the degenerate regime");
    }
    let top = q.n.min(q.k + q.block_count());
    Ok((q.t..=top)
        .map(|a| {
            let p = (a - q.t) / q.s;
            tail_sum(a as i64, (a - p) as i64, q.n as i64, q.k as i64)
        })
        .max()
        .unwrap_or_default())
}

/// `Σ_{j≥i−1} C(a−1,j)C(n−a+1,k−j) ≥ Σ_{j≥i} C(a,j)C(n−a,k−j)`.
pub fn step_dominance_check(a: usize, n: usize, k: usize, i: usize) -> Result<bool> {
    if a < 1 || a > n || i < 1 || i > k {
        return domain(format!("need 1<=a<=n and 1<=i<=k, got a={a} n={n} k={k} i={i}"));
    }
    let (a, n, k, i) = (a as i64, n as i64, k as i64, i as i64);
    let lhs = tail_sum(a - 1, i - 1, n, k);
    let rhs = tail_sum(a, i, n, k);
    Ok(lhs >= rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma2Row {
    pub ell: usize,
    pub n: usize,
    pub k: usize,
    pub formula: BigCount,
    pub erdos: BigCount,
    pub equal: bool,
    pub argmax_i: usize,
}

/// The (ℓ, n, k) audit grid: `2 ≤ ℓ ≤ ell_max`, `1 ≤ k ≤ k_max`, `kℓ ≤ n ≤ n_max`.
/// Below `n = kℓ` no ℓ-matching fits and the answer is trivially `C(n,k)`.
pub fn lemma2_grid(ell_max: usize, k_max: usize, n_max: usize) -> Vec<MatchingParams> {
    let mut out = Vec::new();
    for ell in 2..=ell_max {
        for k in 1..=k_max {
            for n in (k * ell)..=n_max {
                out.push(MatchingParams::new(ell, n, k).expect("grid params valid"));
            }
        }
    }
    out
}

/// Evaluates both formulas over the grid. Rows come back in grid order
/// regardless of how rayon schedules the work.
pub fn lemma2_sweep(ell_max: usize, k_max: usize, n_max: usize) -> Vec<Lemma2Row> {
    lemma2_grid(ell_max, k_max, n_max)
        .par_iter()
        .map(|p| {
            let rep = lemma2_check(p).expect("grid has feasible i");
            Lemma2Row {
                ell: p.ell,
                n: p.n,
                k: p.k,
                formula: rep.lhs,
                erdos: rep.rhs,
                equal: rep.equal,
                argmax_i: rep.argmax_index as usize,
            }
        })
        .collect()
}

/// A place where the a-sweep count grows as `a` shrinks inside one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityViolation {
    pub ell: usize,
    pub n: usize,
    pub k: usize,
    pub i: usize,
    pub a: usize,
    pub value_at_a: BigCount,
    pub value_at_a_minus_1: BigCount,
}

/// Checks that [`a_sweep_term`] does not increase as `a` decreases from
/// `ℓi−1` to `ℓ(i−1)+1`, for every `i ∈ [k]`. Prefixes longer than `n` are skipped.
pub fn monotonicity_audit(p: &MatchingParams) -> Vec<MonotonicityViolation> {
    let mut out = Vec::new();
    for i in 1..=p.k {
        let hi = (p.ell * i - 1).min(p.n);
        let lo = (p.ell * (i - 1) + 1).max(1);
        let mut a = hi;
        while a > lo {
            let here = a_sweep_term(p, a);
            let below = a_sweep_term(p, a - 1);
            if below > here {
                out.push(MonotonicityViolation {
                    ell: p.ell,
                    n: p.n,
                    k: p.k,
                    i,
                    a,
                    value_at_a: here,
                    value_at_a_minus_1: below,
                });
            }
            a -= 1;
        }
    }
    out
}

/// [`monotonicity_audit`] over `2 ≤ ℓ ≤ ell_max`, `1 ≤ k ≤ k_max`, `k ≤ n ≤ n_max`.
pub fn monotonicity_sweep(ell_max: usize, k_max: usize, n_max: usize) -> Vec<MonotonicityViolation> {
    let mut grid = Vec::new();
    for ell in 2..=ell_max {
        for k in 1..=k_max {
            for n in k..=n_max {
                grid.push(MatchingParams::new(ell, n, k).expect("grid params valid"));
            }
        }
    }
    grid.par_iter()
        .map(monotonicity_audit)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section3Row {
    pub s: usize,
    pub t: usize,
    pub n: usize,
    pub k: usize,
    pub frankl: BigCount,
    pub argmax_r: i64,
    pub bound: Option<BigCount>,
    pub equal: bool,
}

/// Compares [`intersect_value`] with [`section3_bound`] over
/// `2 ≤ s ≤ s_max`, `1 ≤ t ≤ t_max`, `t ≤ k ≤ k_max`, `k ≤ n ≤ n_max`.
/// Degenerate triples carry no bound and count as equal.
pub fn section3_sweep(s_max: usize, t_max: usize, k_max: usize, n_max: usize) -> Vec<Section3Row> {
    let mut grid = Vec::new();
    for s in 2..=s_max {
        for t in 1..=t_max {
            for k in t..=k_max {
                for n in k..=n_max {
                    grid.push(IntersectParams::new(s, n, k, t).expect("grid params valid"));
                }
            }
        }
    }
    grid.par_iter()
        .map(|q| {
            let (frankl, argmax_r) = intersect_value(q);
            let bound = section3_bound(q).ok();
            let equal = bound.as_ref().is_none_or(|b| *b == frankl);
            Section3Row {
                s: q.s,
                t: q.t,
                n: q.n,
                k: q.k,
                frankl,
                argmax_r,
                bound,
                equal,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(ell: usize, n: usize, k: usize) -> MatchingParams {
        MatchingParams::new(ell, n, k).unwrap()
    }

    fn ip(s: usize, n: usize, k: usize, t: usize) -> IntersectParams {
        IntersectParams::new(s, n, k, t).unwrap()
    }

    fn u(c: BigCount) -> u64 {
        c.to_u64().unwrap()
    }

    /// Enumerates k-subsets of [n] as bitmasks.
    fn brute_count(n: usize, k: usize, pred: impl Fn(u64) -> bool) -> u64 {
        (0u64..(1 << n))
            .filter(|m| m.count_ones() as usize == k && pred(*m))
            .count() as u64
    }

    fn prefix(a: usize) -> u64 {
        (1u64 << a) - 1
    }

    #[test]
    fn param_validation() {
        assert!(MatchingParams::new(1, 5, 2).is_err());
        assert!(MatchingParams::new(2, 3, 4).is_err());
        assert!(MatchingParams::new(2, 3, 0).is_err());
        assert!(IntersectParams::new(1, 5, 2, 1).is_err());
        assert!(IntersectParams::new(2, 5, 2, 3).is_err());
        assert!(IntersectParams::new(2, 5, 2, 0).is_err());
    }

    #[test]
    fn matching_term_examples() {
        assert_eq!(u(matching_term(&mp(2, 6, 3), 1).unwrap()), 10);
        assert_eq!(u(matching_term(&mp(3, 9, 3), 2).unwrap()), 50);
        assert_eq!(u(matching_term(&mp(3, 9, 3), 3).unwrap()), 56);
        assert!(matching_term(&mp(3, 6, 3), 3).is_err());
        assert!(matching_term(&mp(3, 9, 3), 0).is_err());
    }

    #[test]
    fn matching_term_matches_enumeration() {
        for ell in 2..=4 {
            for n in 1..=12 {
                for k in 1..=n {
                    let p = mp(ell, n, k);
                    for i in (1..=k).filter(|&i| p.index_feasible(i)) {
                        let expect = brute_count(n, k, |m| {
                            (m & prefix(ell * i - 1)).count_ones() as usize >= i
                        });
                        assert_eq!(u(matching_term(&p, i).unwrap()), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn formula_value_examples() {
        let (v, i) = matching_formula_value(&mp(2, 6, 3)).unwrap();
        assert_eq!((u(v), i), (10, 1));
        let (v, i) = matching_formula_value(&mp(3, 9, 3)).unwrap();
        assert_eq!((u(v), i), (56, 3));
        let (v, i) = matching_formula_value(&mp(2, 100, 3)).unwrap();
        assert_eq!((u(v), i), (4851, 1));
    }

    #[test]
    fn erdos_examples() {
        assert_eq!(u(erdos_value(&mp(2, 6, 3))), 10);
        assert_eq!(u(erdos_value(&mp(3, 9, 3))), 56);
        assert_eq!(u(erdos_value(&mp(2, 4, 2))), 3);
    }

    #[test]
    fn lemma2_examples() {
        let r = lemma2_check(&mp(2, 6, 3)).unwrap();
        assert!(r.equal);
        assert_eq!(u(r.lhs), 10);
        let r = lemma2_check(&mp(3, 9, 3)).unwrap();
        assert!(r.equal);
        assert_eq!(u(r.rhs), 56);
        // Both sides evaluated independently: EKR regime, C(9,3) = 84.
        let r = lemma2_check(&mp(2, 10, 4)).unwrap();
        assert_eq!(u(r.lhs.clone()), 84);
        assert_eq!(u(r.rhs.clone()), 84);
        assert!(r.equal);
    }

    #[test]
    fn a_sweep_examples() {
        let (v, a) = a_sweep_matching(&mp(2, 6, 3));
        assert_eq!((u(v), a), (10, 1));
        let (v, a) = a_sweep_matching(&mp(3, 9, 3));
        assert_eq!((u(v), a), (56, 8));
        let (v, a) = a_sweep_matching(&mp(2, 5, 2));
        assert_eq!((u(v), a), (4, 1));
        // Individual a-terms for (2,5,2): a=1 → 4, a=2 → 1, a=3 → 3.
        let p = mp(2, 5, 2);
        let terms: Vec<u64> = (1..=3).map(|a| u(a_sweep_term(&p, a))).collect();
        assert_eq!(terms, vec![4, 1, 3]);
    }

    #[test]
    fn a_sweep_agrees_with_formula() {
        for ell in 2..=6 {
            for k in 1..=8 {
                for n in (k * ell)..=40 {
                    let p = mp(ell, n, k);
                    assert_eq!(
                        a_sweep_matching(&p).0,
                        matching_formula_value(&p).unwrap().0,
                        "ell={ell} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn intersect_term_examples() {
        assert_eq!(u(intersect_term(&ip(2, 8, 4, 2), 1).unwrap()), 17);
        assert_eq!(u(intersect_term(&ip(3, 5, 3, 1), 0).unwrap()), 6);
        assert_eq!(u(intersect_term(&ip(2, 8, 3, 1), 0).unwrap()), 21);
        assert!(intersect_term(&ip(2, 8, 4, 2), 3).is_err());
    }

    #[test]
    fn intersect_term_matches_enumeration() {
        for s in 2..=4 {
            for t in 1..=3 {
                for n in 1..=12 {
                    for k in t..=n {
                        let q = ip(s, n, k, t);
                        for r in (0..=n).filter(|&r| q.radius_feasible(r)) {
                            let expect = brute_count(n, k, |m| {
                                (m & prefix(t + r * s)).count_ones() as usize >= t + (s - 1) * r
                            });
                            assert_eq!(u(intersect_term(&q, r).unwrap()), expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn intersect_value_examples() {
        let (v, r) = intersect_value(&ip(2, 8, 4, 2));
        assert_eq!((u(v), r), (17, 1));
        let (v, r) = intersect_value(&ip(3, 5, 3, 1));
        assert_eq!((u(v), r), (6, 0));
        let (v, r) = intersect_value(&ip(2, 4, 3, 1));
        assert_eq!((u(v), r), (4, -1));
        let q = ip(2, 8, 4, 2);
        let terms: Vec<u64> = (0..3).map(|r| u(intersect_term(&q, r).unwrap())).collect();
        assert_eq!(terms, vec![15, 17, 15]);
    }

    #[test]
    fn section3_examples() {
        assert_eq!(u(section3_bound(&ip(2, 8, 4, 2)).unwrap()), 17);
        assert_eq!(u(section3_bound(&ip(3, 5, 3, 1)).unwrap()), 6);
        assert_eq!(u(section3_bound(&ip(2, 6, 3, 1)).unwrap()), 10);
        assert!(section3_bound(&ip(2, 4, 3, 1)).is_err());
    }

    /// Enumerates every decomposition `a = t + sp + r` with `r ≥ 0` directly.
    fn section3_by_decomposition(q: &IntersectParams) -> BigCount {
        let top = q.n().min(q.k() + q.block_count());
        let mut best = BigCount::zero();
        for a in q.t()..=top {
            for p in 0..=(a - q.t()) / q.s() {
                let r = a - q.t() - q.s() * p;
                let m = q.t() + (q.s() - 1) * p + r;
                let v = tail_sum(a as i64, m as i64, q.n() as i64, q.k() as i64);
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn section3_max_p_matches_decomposition_and_frankl() {
        for s in 2..=4 {
            for t in 1..=3 {
                for k in t..=8 {
                    for n in k..=24 {
                        let q = ip(s, n, k, t);
                        if q.is_degenerate() {
                            continue;
                        }
                        let b = section3_bound(&q).unwrap();
                        assert_eq!(b, section3_by_decomposition(&q));
                        assert_eq!(b, intersect_value(&q).0, "s={s} t={t} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn step_dominance_examples() {
        assert!(step_dominance_check(4, 8, 3, 2).unwrap());
        assert!(step_dominance_check(1, 5, 2, 1).unwrap());
        assert!(step_dominance_check(6, 9, 3, 3).unwrap());
        assert!(step_dominance_check(0, 9, 3, 3).is_err());
        assert!(step_dominance_check(3, 9, 3, 4).is_err());
    }

    #[test]
    fn monotonicity_small_grid_clean() {
        assert!(monotonicity_sweep(4, 5, 30).is_empty());
    }
}
