//! Exact maxima by branch and bound over the k-sets of `[n]`.
//!
//! Vertices are the k-sets in colex order, at most 128 of them so a candidate
//! set fits in a `u128`. The exhaustive search follows the colour-bound scheme
//! used for maximum clique: candidates are greedily packed into groups whose
//! members cannot all coexist, each group caps how many of its members a valid
//! family can hold, and the running sum of caps bounds every branch. The
//! compressed search enumerates only down-sets of the shift order.
//!
//! Both searches are single-threaded and scan vertices in a fixed order, so the
//! witness is a function of the input alone.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmath::BigCount;
use crate::families::{
    build_intersect_extremal, build_matching_extremal, find_matching, find_swise_violation,
    has_l_matching, is_left_compressed, is_swise_t_intersecting, ksets, KSet, SetFamily,
};
use crate::formulas::{
    erdos_value, intersect_value, matching_formula_value, IntersectParams, MatchingParams,
};

/// Largest vertex count a search accepts for the matching problem and for s = 2.
pub const PAIRWISE_ENVELOPE: usize = 128;
/// Largest vertex count for the s-wise problem with s ≥ 3.
pub const HYPER_ENVELOPE: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 100_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchMode {
    #[default]
    Exhaustive,
    /// Restrict to left-compressed families.
    Compressed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub max_size: usize,
    pub witness: SetFamily,
    pub nodes_explored: u64,
    /// `false` only when the budget ran out; `max_size` is then a lower bound.
    pub optimal: bool,
    pub elapsed: Duration,
}

/// JSON shape of an [`OracleResult`]; the witness uses the family line format.
#[derive(Serialize)]
pub struct OracleJson {
    pub max_size: usize,
    pub optimal: bool,
    pub nodes_explored: u64,
    pub witness: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl OracleResult {
    pub fn to_json(&self, with_timing: bool) -> OracleJson {
        OracleJson {
            max_size: self.max_size,
            optimal: self.optimal,
            nodes_explored: self.nodes_explored,
            witness: self.witness.to_string(),
            elapsed_ms: with_timing.then_some(self.elapsed.as_millis()),
        }
    }
}

/// What a valid family must avoid.
#[derive(Clone, Copy, Debug)]
enum Forbidden {
    /// `ell` pairwise-disjoint members.
    Matching { ell: usize },
    /// At most `s` members with fewer than `t` common elements.
    SWise { s: usize, t: usize },
}

impl Forbidden {
    /// Any `cap + 1` members of a group violate the constraint.
    fn grouped(self, a: KSet, b: KSet) -> bool {
        match self {
            Forbidden::Matching { .. } => a.is_disjoint(b),
            Forbidden::SWise { t, .. } => a.intersection(b).len() < t,
        }
    }

    fn cap(self) -> usize {
        match self {
            Forbidden::Matching { ell } => ell - 1,
            Forbidden::SWise { .. } => 1,
        }
    }

    /// Whether the constraint is decided by pairs alone.
    fn pairwise(self) -> bool {
        match self {
            Forbidden::Matching { ell } => ell == 2,
            Forbidden::SWise { s, .. } => s == 2,
        }
    }

    /// Whether `chosen ∪ {u}` violates, given that `chosen` does not.
    fn blocks(self, chosen: &[KSet], u: KSet) -> bool {
        match self {
            Forbidden::Matching { ell } => {
                let pool: Vec<KSet> = chosen.iter().copied().filter(|c| c.is_disjoint(u)).collect();
                pool.len() + 1 >= ell && find_matching(&pool, ell - 1).is_some()
            }
            Forbidden::SWise { s, t } => {
                if u.len() < t {
                    return true;
                }
                fn go(chosen: &[KSet], start: usize, cur: KSet, left: usize, t: usize) -> bool {
                    if cur.len() < t {
                        return true;
                    }
                    left > 0
                        && (start..chosen.len())
                            .any(|i| go(chosen, i + 1, cur.intersection(chosen[i]), left - 1, t))
                }
                go(chosen, 0, u, s - 1, t)
            }
        }
    }

    fn family_ok(self, f: &SetFamily) -> bool {
        match self {
            Forbidden::Matching { ell } => has_l_matching(f, ell).is_none(),
            Forbidden::SWise { s, t } => find_swise_violation(f.members(), s, t).is_none(),
        }
    }
}

struct Search<'a> {
    verts: &'a [KSet],
    rule: Forbidden,
    /// `compat[v]`: vertices that are not pairwise-grouped with `v` (pairwise rules only).
    compat: Vec<u128>,
    best: Vec<usize>,
    nodes: u64,
    budget: Budget,
    start: Instant,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(verts: &'a [KSet], rule: Forbidden, incumbent: Vec<usize>, budget: Budget) -> Self {
        let compat = verts
            .iter()
            .map(|&a| {
                verts
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| !(rule.pairwise() && rule.grouped(a, b)))
                    .fold(0u128, |m, (j, _)| m | 1u128 << j)
            })
            .collect();
        Search {
            verts,
            rule,
            compat,
            best: incumbent,
            nodes: 0,
            budget,
            start: Instant::now(),
            exhausted: false,
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes >= self.budget.max_nodes
            || (self.nodes & 0xfff == 0 && self.start.elapsed() >= self.budget.max_time)
        {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn chosen_sets(&self, chosen: &[usize]) -> Vec<KSet> {
        chosen.iter().map(|&i| self.verts[i]).collect()
    }

    /// Greedy grouping of `cand` in order; returns the candidates sorted by
    /// group with the bound for each prefix.
    fn group_bounds(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &v in cand {
            let a = self.verts[v];
            match groups
                .iter_mut()
                .find(|g| g.iter().all(|&w| self.rule.grouped(a, self.verts[w])))
            {
                Some(g) => g.push(v),
                None => groups.push(vec![v]),
            }
        }
        let cap = self.rule.cap();
        let mut order = Vec::with_capacity(cand.len());
        let mut bounds = Vec::with_capacity(cand.len());
        let mut base = 0;
        for g in &groups {
            for (pos, &v) in g.iter().enumerate() {
                order.push(v);
                bounds.push(base + (pos + 1).min(cap));
            }
            base += g.len().min(cap);
        }
        (order, bounds)
    }

    fn expand(&mut self, chosen: &mut Vec<usize>, cand: &[usize]) {
        if !self.tick() {
            return;
        }
        let (order, bounds) = self.group_bounds(cand);
        for idx in (0..order.len()).rev() {
            if chosen.len() + bounds[idx] <= self.best.len() || self.exhausted {
                return;
            }
            let v = order[idx];
            chosen.push(v);
            if chosen.len() > self.best.len() {
                self.best = chosen.clone();
            }
            let sets = self.chosen_sets(chosen);
            let next: Vec<usize> = order[..idx]
                .iter()
                .copied()
                .filter(|&u| {
                    self.compat[v] >> u & 1 == 1
                        && (self.rule.pairwise() || !self.rule.blocks(&sets, self.verts[u]))
                })
                .collect();
            if !next.is_empty() {
                self.expand(chosen, &next);
            }
            chosen.pop();
        }
    }

    /// Down-sets of the shift order, vertices decided in colex order.
    fn expand_compressed(
        &mut self,
        pos: usize,
        chosen: &mut Vec<usize>,
        state: &mut Vec<Option<bool>>,
        lower: &[Vec<usize>],
    ) {
        if !self.tick() {
            return;
        }
        let open = (pos..self.verts.len())
            .filter(|&u| lower[u].iter().all(|&w| w >= pos || state[w] == Some(true)))
            .count();
        if chosen.len() + open <= self.best.len() {
            return;
        }
        if pos == self.verts.len() {
            return;
        }
        let v = pos;
        let ready = lower[v].iter().all(|&w| state[w] == Some(true));
        if ready && !self.rule.blocks(&self.chosen_sets(chosen), self.verts[v]) {
            state[v] = Some(true);
            chosen.push(v);
            if chosen.len() > self.best.len() {
                self.best = chosen.clone();
            }
            self.expand_compressed(pos + 1, chosen, state, lower);
            chosen.pop();
        }
        state[v] = Some(false);
        self.expand_compressed(pos + 1, chosen, state, lower);
        state[v] = None;
    }
}

fn solve(
    n: usize,
    k: usize,
    rule: Forbidden,
    seeds: Vec<SetFamily>,
    budget: Budget,
    mode: SearchMode,
) -> Result<OracleResult> {
    let start = Instant::now();
    let verts = ksets(n, k)?;
    let incumbent: Vec<usize> = seeds
        .into_iter()
        .filter(|f| rule.family_ok(f))
        .filter(|f| mode == SearchMode::Exhaustive || is_left_compressed(f))
        .max_by(|a, b| a.len().cmp(&b.len()).then(b.members().cmp(a.members())))
        .map(|f| {
            f.iter()
                .map(|m| verts.binary_search(&m).expect("seed inside C([n],k)"))
                .collect()
        })
        .unwrap_or_default();

    let mut search = Search::new(&verts, rule, incumbent, budget);
    let mut chosen = Vec::new();
    match mode {
        SearchMode::Exhaustive => {
            let all: Vec<usize> = (0..verts.len()).collect();
            search.expand(&mut chosen, &all);
        }
        SearchMode::Compressed => {
            let lower: Vec<Vec<usize>> = verts
                .iter()
                .map(|&a| {
                    a.elements()
                        .filter(|&e| e > 1 && !a.contains(e - 1))
                        .map(|e| verts.binary_search(&a.swap(e, e - 1)).expect("shift stays in C([n],k)"))
                        .collect()
                })
                .collect();
            let mut state = vec![None; verts.len()];
            search.expand_compressed(0, &mut chosen, &mut state, &lower);
        }
    }

    let mut members: Vec<KSet> = search.best.iter().map(|&i| verts[i]).collect();
    members.sort_unstable();
    let witness = SetFamily::new(n, k, members)?;
    if !rule.family_ok(&witness) {
        return Err(Error::Construction {
            reason: "oracle witness failed re-verification".into(),
            tuple: witness.members().to_vec(),
        });
    }
    Ok(OracleResult {
        max_size: witness.len(),
        witness,
        nodes_explored: search.nodes,
        optimal: !search.exhausted,
        elapsed: start.elapsed(),
    })
}

fn check_envelope(n: usize, k: usize, limit: usize) -> Result<()> {
    let count = crate::exactmath::binom(n as i64, k as i64);
    if count > BigCount::from(limit) {
        return Err(Error::Capacity(format!(
            "C({n},{k}) = {count} vertices exceeds the exact-search envelope of {limit}"
        )));
    }
    Ok(())
}

/// Largest family of k-subsets of `[n]` without `ell` pairwise-disjoint members.
pub fn max_no_matching(n: usize, k: usize, ell: usize, budget: Budget) -> Result<OracleResult> {
    max_no_matching_with(n, k, ell, budget, SearchMode::Exhaustive)
}

pub fn max_no_matching_with(
    n: usize,
    k: usize,
    ell: usize,
    budget: Budget,
    mode: SearchMode,
) -> Result<OracleResult> {
    let p = MatchingParams::new(ell, n, k)?;
    check_envelope(n, k, PAIRWISE_ENVELOPE)?;
    let seeds = (1..=k)
        .filter(|&i| p.index_feasible(i))
        .map(|i| build_matching_extremal(&p, i))
        .collect::<Result<Vec<_>>>()?;
    solve(n, k, Forbidden::Matching { ell }, seeds, budget, mode)
}

/// Largest s-wise t-intersecting family of k-subsets of `[n]`.
pub fn max_swise_t_intersecting(
    n: usize,
    k: usize,
    s: usize,
    t: usize,
    budget: Budget,
) -> Result<OracleResult> {
    max_swise_t_intersecting_with(n, k, s, t, budget, SearchMode::Exhaustive)
}

pub fn max_swise_t_intersecting_with(
    n: usize,
    k: usize,
    s: usize,
    t: usize,
    budget: Budget,
    mode: SearchMode,
) -> Result<OracleResult> {
    let q = IntersectParams::new(s, n, k, t)?;
    check_envelope(n, k, if s == 2 { PAIRWISE_ENVELOPE } else { HYPER_ENVELOPE })?;
    let seeds = (0..=k)
        .filter(|&r| q.radius_feasible(r))
        .map(|r| build_intersect_extremal(&q, r))
        .collect::<Result<Vec<_>>>()?;
    solve(n, k, Forbidden::SWise { s, t }, seeds, budget, mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditParams {
    Matching(MatchingParams),
    Intersect(IntersectParams),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub problem: &'static str,
    pub oracle: usize,
    pub optimal: bool,
    pub formula: BigCount,
    pub argmax: i64,
    pub formula_agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erdos: Option<BigCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erdos_agrees: Option<bool>,
    pub witness_left_compressed: bool,
    pub nodes_explored: u64,
    pub witness: String,
}

/// Runs the oracle and sets its value beside the closed forms.
pub fn audit(params: AuditParams, budget: Budget) -> Result<AuditReport> {
    match params {
        AuditParams::Matching(p) => {
            let res = max_no_matching(p.n(), p.k(), p.ell(), budget)?;
            let (formula, i) = matching_formula_value(&p)?;
            let erdos = erdos_value(&p);
            let oracle = BigCount::from(res.max_size);
            Ok(AuditReport {
                problem: "matching",
                oracle: res.max_size,
                optimal: res.optimal,
                formula_agrees: formula == oracle,
                formula,
                argmax: i as i64,
                erdos_agrees: Some(erdos == oracle),
                erdos: Some(erdos),
                witness_left_compressed: is_left_compressed(&res.witness),
                nodes_explored: res.nodes_explored,
                witness: res.witness.to_string(),
            })
        }
        AuditParams::Intersect(q) => {
            let res = max_swise_t_intersecting(q.n(), q.k(), q.s(), q.t(), budget)?;
            debug_assert!(is_swise_t_intersecting(&res.witness, q.s(), q.t())
                .map(|v| v.is_none())
                .unwrap_or(true));
            let (formula, r) = intersect_value(&q);
            let oracle = BigCount::from(res.max_size);
            Ok(AuditReport {
                problem: "intersect",
                oracle: res.max_size,
                optimal: res.optimal,
                formula_agrees: formula == oracle,
                formula,
                argmax: r,
                erdos: None,
                erdos_agrees: None,
                witness_left_compressed: is_left_compressed(&res.witness),
                nodes_explored: res.nodes_explored,
                witness: res.witness.to_string(),
            })
        }
    }
}
