//! k-set families over `[n]`, `n ≤ 64`, one machine word per set.
//!
//! Element `e ∈ [n]` is bit `e − 1`. Ascending mask order is colexicographic
//! order, which is the order members are stored in.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::formulas::{IntersectParams, MatchingParams};

pub const MAX_GROUND: usize = 64;

/// Families larger than this are not checked for s-wise intersection with s ≥ 3.
pub const SWISE_CAPACITY: usize = 5_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSet(u64);

impl KSet {
    pub const EMPTY: KSet = KSet(0);

    pub fn from_mask(mask: u64) -> Self {
        KSet(mask)
    }

    /// Builds a set from 1-based elements. Duplicates are rejected.
    pub fn from_elements(elements: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &e in elements {
            if e == 0 || e > MAX_GROUND {
                return domain(format!("element {e} outside [1, {MAX_GROUND}]"));
            }
            let bit = 1u64 << (e - 1);
            if mask & bit != 0 {
                return domain(format!("duplicate element {e}"));
            }
            mask |= bit;
        }
        Ok(KSet(mask))
    }

    /// `[m] = {1, ..., m}`.
    pub fn prefix(m: usize) -> Self {
        if m >= 64 {
            KSet(u64::MAX)
        } else {
            KSet((1u64 << m) - 1)
        }
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        (1..=64).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    /// Largest element, 0 for the empty set.
    pub fn max_element(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn is_disjoint(self, other: KSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn intersection(self, other: KSet) -> KSet {
        KSet(self.0 & other.0)
    }

    pub fn union(self, other: KSet) -> KSet {
        KSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: KSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Replaces `from` by `to`; the caller guarantees `from ∈ self`, `to ∉ self`.
    pub fn swap(self, from: usize, to: usize) -> KSet {
        KSet(self.0 & !(1u64 << (from - 1)) | 1u64 << (to - 1))
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let e = m.trailing_zeros() as usize + 1;
                m &= m - 1;
                Some(e)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.elements().collect()
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elements()).finish()
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.elements() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// All k-subsets of `[n]` in ascending mask order (Gosper's hack).
pub fn ksets(n: usize, k: usize) -> Result<Vec<KSet>> {
    if n > MAX_GROUND {
        return Err(Error::Capacity(format!("ground set {n} exceeds {MAX_GROUND}")));
    }
    if k > n {
        return domain(format!("k={k} exceeds n={n}"));
    }
    if k == 0 {
        return Ok(vec![KSet::EMPTY]);
    }
    let limit: u128 = 1u128 << n;
    let mut out = Vec::new();
    let mut v: u128 = (1u128 << k) - 1;
    while v < limit {
        out.push(KSet(v as u64));
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    Ok(out)
}

/// Distinct k-subsets of `[n]` sharing `(n, k)`, sorted by mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    k: usize,
    members: Vec<KSet>,
}

impl SetFamily {
    /// Validates, sorts and rejects duplicates.
    pub fn new(n: usize, k: usize, mut members: Vec<KSet>) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::Capacity(format!("ground set {n} exceeds {MAX_GROUND}")));
        }
        if k > n {
            return domain(format!("k={k} exceeds n={n}"));
        }
        let ground = KSet::prefix(n);
        for m in &members {
            if m.len() != k {
                return domain(format!("member {m:?} does not have {k} elements"));
            }
            if !m.is_subset(ground) {
                return domain(format!("member {m:?} leaves [{n}]"));
            }
        }
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return domain("duplicate member");
        }
        Ok(SetFamily { n, k, members })
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Vec::new())
    }

    /// Members already sorted, distinct and valid.
    pub(crate) fn from_sorted_unchecked(n: usize, k: usize, members: Vec<KSet>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        SetFamily { n, k, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn members(&self) -> &[KSet] {
        &self.members
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = KSet> + '_ {
        self.members.iter().copied()
    }
    pub fn contains(&self, s: KSet) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    /// Members satisfying `pred`, same context.
    pub fn filter(&self, mut pred: impl FnMut(KSet) -> bool) -> SetFamily {
        SetFamily::from_sorted_unchecked(
            self.n,
            self.k,
            self.members.iter().copied().filter(|&m| pred(m)).collect(),
        )
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, k={}, ", self.n, self.k)?;
        f.debug_list().entries(&self.members).finish()?;
        f.write_str(")")
    }
}

/// Line format: header `n=<n> k=<k>`, then one member per line as sorted
/// comma-separated elements. Every line ends in `\n`; the empty set is an
/// empty line.
impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} k={}", self.n, self.k)?;
        for m in &self.members {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for SetFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let perr = |msg: String| Error::Parse(msg);
        let body = s
            .strip_suffix('\n')
            .ok_or_else(|| perr("family text must end with a newline".into()))?;
        let mut lines = body.split('\n');
        let header = lines.next().unwrap_or_default();
        let (n, k) = parse_header(header).ok_or_else(|| perr(format!("bad header {header:?}")))?;
        let mut members = Vec::new();
        for line in lines {
            let mut elems = Vec::new();
            if !line.is_empty() {
                for tok in line.split(',') {
                    let e: usize = tok
                        .parse()
                        .map_err(|_| perr(format!("bad element {tok:?} in line {line:?}")))?;
                    elems.push(e);
                }
            }
            if elems.windows(2).any(|w| w[0] >= w[1]) {
                return Err(perr(format!("elements not strictly increasing: {line:?}")));
            }
            members.push(KSet::from_elements(&elems).map_err(|e| perr(e.to_string()))?);
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(perr("members not in ascending order".into()));
        }
        SetFamily::new(n, k, members).map_err(|e| perr(e.to_string()))
    }
}

fn parse_header(h: &str) -> Option<(usize, usize)> {
    let (a, b) = h.split_once(' ')?;
    let n = a.strip_prefix("n=")?.parse().ok()?;
    let k = b.strip_prefix("k=")?.parse().ok()?;
    Some((n, k))
}

pub fn all_ksets(n: usize, k: usize) -> Result<SetFamily> {
    Ok(SetFamily::from_sorted_unchecked(n, k, ksets(n, k)?))
}

/// `{A : |A ∩ [ℓi−1]| ≥ i}`.
pub fn build_matching_extremal(p: &MatchingParams, i: usize) -> Result<SetFamily> {
    if !p.index_feasible(i) {
        return domain(format!("index i={i} infeasible"));
    }
    let pre = KSet::prefix(p.ell() * i - 1);
    Ok(all_ksets(p.n(), p.k())?.filter(|a| a.intersection(pre).len() >= i))
}

/// `{E : |E ∩ [t+rs]| ≥ t+(s−1)r}`.
pub fn build_intersect_extremal(q: &IntersectParams, r: usize) -> Result<SetFamily> {
    if !q.radius_feasible(r) {
        return domain(format!("radius r={r} infeasible"));
    }
    let pre = KSet::prefix(q.t() + r * q.s());
    let need = q.t() + (q.s() - 1) * r;
    Ok(all_ksets(q.n(), q.k())?.filter(|e| e.intersection(pre).len() >= need))
}

/// How [`has_l_matching_with`] chooses its search space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MatchingSearch {
    /// Every member is a candidate.
    #[default]
    General,
    /// Only members inside `[ℓk]`. Complete for left-compressed families only.
    CompressedPrefix,
}

/// `ell` pairwise-disjoint members, if any. The witness is the first one in
/// member order.
pub fn has_l_matching(family: &SetFamily, ell: usize) -> Option<Vec<KSet>> {
    has_l_matching_with(family, ell, MatchingSearch::General)
}

pub fn has_l_matching_with(
    family: &SetFamily,
    ell: usize,
    mode: MatchingSearch,
) -> Option<Vec<KSet>> {
    let pool: Vec<KSet> = match mode {
        MatchingSearch::General => family.members.clone(),
        MatchingSearch::CompressedPrefix => {
            let box_ = KSet::prefix(ell * family.k);
            family.iter().filter(|m| m.is_subset(box_)).collect()
        }
    };
    find_matching(&pool, ell)
}

/// First `ell` pairwise-disjoint sets of `pool` in index order.
pub(crate) fn find_matching(pool: &[KSet], ell: usize) -> Option<Vec<KSet>> {
    fn go(pool: &[KSet], start: usize, used: KSet, need: usize, acc: &mut Vec<KSet>) -> bool {
        if need == 0 {
            return true;
        }
        if pool.len() - start < need {
            return false;
        }
        for idx in start..pool.len() {
            let m = pool[idx];
            if m.is_disjoint(used) {
                acc.push(m);
                if go(pool, idx + 1, used.union(m), need - 1, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::with_capacity(ell);
    if go(pool, 0, KSet::EMPTY, ell, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

/// A violating tuple if the family is not s-wise t-intersecting.
///
/// Tuples may repeat members, so a family with fewer than `s` members must
/// still have `t` common elements. A returned tuple holds `min(s, |F|)`
/// distinct members whose common intersection has fewer than `t` elements.
pub fn is_swise_t_intersecting(family: &SetFamily, s: usize, t: usize) -> Result<Option<Vec<KSet>>> {
    if s < 2 || t < 1 {
        return domain(format!("need s >= 2 and t >= 1, got s={s} t={t}"));
    }
    if s >= 3 && family.len() > SWISE_CAPACITY {
        return Err(Error::Capacity(format!(
            "family of {} members exceeds the {SWISE_CAPACITY}-member limit for s >= 3",
            family.len()
        )));
    }
    Ok(find_swise_violation(&family.members, s, t))
}

pub(crate) fn find_swise_violation(members: &[KSet], s: usize, t: usize) -> Option<Vec<KSet>> {
    if members.is_empty() {
        return None;
    }
    let all = members.iter().fold(KSet(u64::MAX), |acc, &m| acc.intersection(m));
    if all.len() >= t {
        return None;
    }

    // Depth-first over running intersections; (mask, depth) pairs proven safe are memoized.
    fn go(
        members: &[KSet],
        cur: KSet,
        left: usize,
        t: usize,
        safe: &mut HashSet<(u64, usize)>,
        acc: &mut Vec<KSet>,
    ) -> bool {
        if cur.len() < t {
            return true;
        }
        if left == 0 || safe.contains(&(cur.0, left)) {
            return false;
        }
        for &m in members {
            let next = cur.intersection(m);
            if next == cur {
                continue;
            }
            acc.push(m);
            if go(members, next, left - 1, t, safe, acc) {
                return true;
            }
            acc.pop();
        }
        safe.insert((cur.0, left));
        false
    }

    let mut acc = Vec::new();
    let mut safe = HashSet::new();
    if !go(members, KSet(u64::MAX), s, t, &mut safe, &mut acc) {
        return None;
    }
    acc.sort_unstable();
    acc.dedup();
    for &m in members {
        if acc.len() >= s {
            break;
        }
        if !acc.contains(&m) {
            acc.push(m);
        }
    }
    acc.sort_unstable();
    Some(acc)
}

/// Applies the shift `S_{i,j}` (`i < j`): every member holding `j` but not `i`
/// moves to `A − j + i` unless that set is already present.
fn shift(members: &[KSet], present: &HashSet<KSet>, i: usize, j: usize) -> Option<Vec<KSet>> {
    let mut changed = false;
    let out: Vec<KSet> = members
        .iter()
        .map(|&a| {
            if a.contains(j) && !a.contains(i) {
                let b = a.swap(j, i);
                if !present.contains(&b) {
                    changed = true;
                    return b;
                }
            }
            a
        })
        .collect();
    changed.then_some(out)
}

/// Shifts to a fixpoint, scanning `(i, j)` lexicographically and restarting
/// after every effective shift.
pub fn left_compress(family: &SetFamily) -> SetFamily {
    let n = family.n;
    let mut members = family.members.clone();
    'outer: loop {
        let present: HashSet<KSet> = members.iter().copied().collect();
        for i in 1..=n {
            for j in (i + 1)..=n {
                if let Some(next) = shift(&members, &present, i, j) {
                    members = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    members.sort_unstable();
    SetFamily::from_sorted_unchecked(family.n, family.k, members)
}

/// Closed under replacing any element `e` by `e − 1` when `e − 1` is absent.
/// These moves generate the coordinatewise order on sorted k-tuples.
pub fn is_left_compressed(family: &SetFamily) -> bool {
    family.iter().all(|a| {
        a.elements()
            .filter(|&e| e > 1 && !a.contains(e - 1))
            .all(|e| family.contains(a.swap(e, e - 1)))
    })
}

/// Single-threshold family `{x : (β, x) > δ}` with a nonnegative,
/// nonincreasing weight vector. Generic over the weight type so exact
/// rationals can sit on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceSpec<W = f64> {
    beta: Vec<W>,
    delta: W,
}

impl<W> HalfspaceSpec<W>
where
    W: Copy + PartialOrd + Zero,
{
    pub fn new(beta: Vec<W>, delta: W) -> Result<Self> {
        // Written to reject NaN as well as negatives.
        if beta.iter().any(|&b| b.partial_cmp(&W::zero()).is_none_or(|o| o.is_lt())) {
            return domain("weights must be nonnegative");
        }
        if beta.windows(2).any(|w| w[1] > w[0]) {
            return domain("weights must be nonincreasing");
        }
        Ok(HalfspaceSpec { beta, delta })
    }

    pub fn beta(&self) -> &[W] {
        &self.beta
    }

    pub fn delta(&self) -> W {
        self.delta
    }

    /// `(β, x)`; coordinates past the end of `β` weigh zero.
    pub fn weight(&self, x: KSet) -> W {
        x.elements()
            .filter_map(|e| self.beta.get(e - 1).copied())
            .fold(W::zero(), |acc, b| acc + b)
    }

    pub fn admits(&self, x: KSet) -> bool {
        self.weight(x) > self.delta
    }
}

pub fn halfspace_family<W>(h: &HalfspaceSpec<W>, n: usize, k: usize) -> Result<SetFamily>
where
    W: Copy + PartialOrd + Zero,
{
    if h.beta.len() > n && h.beta[n..].iter().any(|b| !b.is_zero()) {
        return domain(format!("weight vector has mass beyond coordinate {n}"));
    }
    Ok(all_ksets(n, k)?.filter(|x| h.admits(x)))
}

/// Weights `ω`, nonincreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.iter().any(|w| !w.is_finite()) {
            return domain("weights must be finite");
        }
        if omega.windows(2).any(|w| w[1] > w[0]) {
            return domain("weights must be nonincreasing");
        }
        Ok(WeightVector(omega))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Family `{x : (ω, x) > 0}`.
    pub fn family(&self, k: usize) -> Result<SetFamily> {
        let n = self.0.len();
        Ok(all_ksets(n, k)?.filter(|x| x.elements().map(|e| self.0[e - 1]).sum::<f64>() > 0.0))
    }
}

/// Rewrites `(ω, x) > 0` on `C([n], k)` as `(β, x) > δ` with `β` on the
/// monotone simplex of length `kℓ − 1`.
///
/// With `α_j = (ω_j − ω_{j+1}) / (kℓ)` and `S = Σ j·α_j`, `β_j = Σ_{m≥j} α_m / S`
/// and `δ = −ω_{kℓ} / (ℓ S)`. The two families coincide when `ω` is constant
/// from coordinate `kℓ` on.
pub fn weight_to_beta(w: &WeightVector, k: usize, ell: usize) -> Result<HalfspaceSpec<f64>> {
    let len = k * ell;
    let omega = &w.0;
    if len < 2 {
        return domain("need k*ell >= 2");
    }
    if omega.len() < len {
        return domain(format!("weight vector shorter than k*ell = {len}"));
    }
    let alpha: Vec<f64> = (0..len - 1)
        .map(|j| (omega[j] - omega[j + 1]) / len as f64)
        .collect();
    let normalizer: f64 = alpha.iter().enumerate().map(|(j, a)| (j + 1) as f64 * a).sum();
    if normalizer <= 0.0 {
        return Err(Error::Degenerate(
            "weights constant on [k*ell]: zero normalizer".into(),
        ));
    }
    let mut beta = vec![0.0; len - 1];
    let mut tail = 0.0;
    for j in (0..len - 1).rev() {
        tail += alpha[j];
        beta[j] = tail / normalizer;
    }
    let delta = -omega[len - 1] / (ell as f64 * normalizer);
    HalfspaceSpec::new(beta, delta)
}

/// The `ell` sets `x_j = {j, j+ℓ, ..., j+(k−1)ℓ}`, pairwise disjoint inside `[ℓk]`.
pub fn canonical_matching_witness(ell: usize, k: usize) -> Result<Vec<KSet>> {
    if ell < 1 || k < 1 {
        return domain("need ell >= 1 and k >= 1");
    }
    if ell * k > MAX_GROUND {
        return Err(Error::Capacity(format!("ell*k = {} exceeds {MAX_GROUND}", ell * k)));
    }
    let sets: Vec<KSet> = (1..=ell)
        .map(|j| KSet::from_elements(&(0..k).map(|q| j + q * ell).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let union = sets.iter().fold(KSet::EMPTY, |u, &s| {
        debug_assert!(u.is_disjoint(s));
        u.union(s)
    });
    debug_assert_eq!(union.len(), ell * k);
    Ok(sets)
}

/// `s` distinct k-sets of `[n]` whose common intersection is `[t−1]`.
///
/// Layout past the prefix: blocks of `s` consecutive elements starting at
/// `t+1`, each set omitting a different position in every block, then a tail
/// block of `s` elements holding the remainder as cyclic windows at distinct
/// offsets. `x_1` carries `[t−1]` and one extra tail element; the other sets
/// carry `[t]`. When `k = t` the sets are `[t−1] ∪ {t−1+m}`.
///
/// The tuple is verified before it is returned.
pub fn canonical_swise_witness(s: usize, t: usize, k: usize, n: usize) -> Result<Vec<KSet>> {
    if s < 2 || t < 1 || k < t {
        return domain(format!("need s >= 2, 1 <= t <= k; got s={s} t={t} k={k}"));
    }
    if n > MAX_GROUND {
        return Err(Error::Capacity(format!("ground set {n} exceeds {MAX_GROUND}")));
    }
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(s);
    if k == t {
        for m in 1..=s {
            let mut v: Vec<usize> = (1..t).collect();
            v.push(t - 1 + m);
            sets.push(v);
        }
    } else {
        let d = (k - t) / (s - 1);
        let rem = k - t - (s - 1) * d;
        let tail_start = t + d * s + 1;
        for m in 1..=s {
            let mut v: Vec<usize> = if m == 1 { (1..t).collect() } else { (1..=t).collect() };
            let omit = if m == 1 { s - 1 } else { m - 2 };
            for j in 0..d {
                let base = t + j * s + 1;
                v.extend((0..s).filter(|&pos| pos != omit).map(|pos| base + pos));
            }
            let take = if m == 1 { rem + 1 } else { rem };
            v.extend((0..take).map(|q| tail_start + (m - 1 + q) % s));
            v.sort_unstable();
            sets.push(v);
        }
    }
    let tuple: Vec<KSet> = sets
        .iter()
        .map(|v| KSet::from_elements(v))
        .collect::<Result<_>>()?;
    if let Some(top) = tuple.iter().map(|x| x.max_element()).max() {
        if top > n {
            return domain(format!("witness needs a ground set of {top} elements, have {n}"));
        }
    }
    verify_swise_witness(tuple, s, t, k)
}

fn verify_swise_witness(tuple: Vec<KSet>, s: usize, t: usize, k: usize) -> Result<Vec<KSet>> {
    let fail = |reason: &str, tuple: Vec<KSet>| Err(Error::Construction {
        reason: reason.to_string(),
        tuple,
    });
    if tuple.len() != s || tuple.iter().any(|x| x.len() != k) {
        return fail("wrong shape", tuple);
    }
    let distinct: HashSet<KSet> = tuple.iter().copied().collect();
    if distinct.len() != s {
        return fail("members not distinct", tuple);
    }
    if find_swise_violation(&tuple, s, t).is_none() {
        return fail("tuple is s-wise t-intersecting", tuple);
    }
    Ok(tuple)
}

/// Number of members by `|x ∩ [a]|`, used to cross-check prefix counts.
pub fn prefix_profile(family: &SetFamily, a: usize) -> HashMap<usize, usize> {
    let pre = KSet::prefix(a);
    let mut out = HashMap::new();
    for m in family.iter() {
        *out.entry(m.intersection(pre).len()).or_insert(0) += 1;
    }
    out
}
