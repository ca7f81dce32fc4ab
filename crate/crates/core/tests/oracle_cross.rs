use extremal_core::families::{has_l_matching, is_left_compressed, is_swise_t_intersecting, ksets};
use extremal_core::oracle::{
    max_no_matching, max_no_matching_with, max_swise_t_intersecting,
    max_swise_t_intersecting_with, Budget, SearchMode,
};
use extremal_core::{binom, KSet};

/// Plain maximum independent set: branch on a highest-degree vertex.
fn reference_mis(adj: &[Vec<bool>], alive: Vec<usize>) -> usize {
    let deg = |v: usize| alive.iter().filter(|&&u| adj[v][u]).count();
    match alive.iter().copied().max_by_key(|&v| (deg(v), std::cmp::Reverse(v))) {
        None => 0,
        Some(v) if deg(v) == 0 => alive.len(),
        Some(v) => {
            let without: Vec<usize> = alive.iter().copied().filter(|&u| u != v).collect();
            let with: Vec<usize> = without.iter().copied().filter(|&u| !adj[v][u]).collect();
            reference_mis(adj, without).max(1 + reference_mis(adj, with))
        }
    }
}

fn kneser_mis(n: usize, k: usize) -> usize {
    let verts: Vec<KSet> = ksets(n, k).unwrap();
    let adj: Vec<Vec<bool>> = verts
        .iter()
        .map(|a| verts.iter().map(|b| a.is_disjoint(*b)).collect())
        .collect();
    reference_mis(&adj, (0..verts.len()).collect())
}

fn small_instances() -> impl Iterator<Item = (usize, usize)> {
    (1..=7)
        .flat_map(|n| (1..=n).map(move |k| (n, k)))
        .filter(|&(n, k)| binom(n as i64, k as i64).to_u64().unwrap() <= 60)
}

#[test]
fn pairwise_matching_matches_reference_mis() {
    for (n, k) in small_instances() {
        let got = max_no_matching(n, k, 2, Budget::default()).unwrap();
        assert!(got.optimal);
        assert_eq!(got.max_size, kneser_mis(n, k), "n={n} k={k}");
    }
}

#[test]
fn intersecting_matches_reference_mis() {
    for (n, k) in small_instances() {
        let got = max_swise_t_intersecting(n, k, 2, 1, Budget::default()).unwrap();
        assert_eq!(got.max_size, kneser_mis(n, k), "n={n} k={k}");
        assert_eq!(is_swise_t_intersecting(&got.witness, 2, 1).unwrap(), None);
    }
}

#[test]
fn compressed_mode_agrees_for_higher_s() {
    let b = Budget::default();
    for (n, k, s, t) in [(5, 3, 3, 1), (6, 3, 3, 1), (7, 3, 3, 1), (6, 4, 3, 2), (6, 4, 4, 1)] {
        let full = max_swise_t_intersecting(n, k, s, t, b).unwrap();
        let comp = max_swise_t_intersecting_with(n, k, s, t, b, SearchMode::Compressed).unwrap();
        assert_eq!(full.max_size, comp.max_size, "n={n} k={k} s={s} t={t}");
        assert!(is_left_compressed(&comp.witness));
    }
}

#[test]
fn witnesses_reverify() {
    let b = Budget::default();
    for (n, k, ell) in [(7, 2, 3), (9, 2, 3), (8, 3, 2)] {
        for mode in [SearchMode::Exhaustive, SearchMode::Compressed] {
            let r = max_no_matching_with(n, k, ell, b, mode).unwrap();
            assert_eq!(has_l_matching(&r.witness, ell), None);
        }
    }
}
