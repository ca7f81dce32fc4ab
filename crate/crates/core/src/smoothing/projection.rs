//! Euclidean projection onto the monotone simplex
//! `{β : β_1 ≥ β_2 ≥ … ≥ β_L ≥ 0, Σ β = 1}`.
//!
//! Isotonic regression commutes with adding a constant vector and preserves
//! the sum, so projecting onto the nonincreasing nonnegative cone intersected
//! with the hyperplane reduces to the standard simplex projection of the
//! pool-adjacent-violators fit. Clipping keeps the fit nonincreasing.

/// Nonincreasing least-squares fit (pool adjacent violators).
pub fn isotonic_nonincreasing(y: &[f64]) -> Vec<f64> {
    // Blocks of (sum, count); each block mean is at most its predecessor's.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 >= s1 / c1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, c)| std::iter::repeat_n(s / c as f64, c))
        .collect()
}

/// Projection onto the probability simplex by sorting (inputs here arrive
/// already nonincreasing, so the sort is a no-op in practice).
pub fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cum += u;
        let cand = (cum - 1.0) / (i + 1) as f64;
        if u - cand > 0.0 {
            tau = cand;
        }
    }
    v.iter().map(|&u| (u - tau).max(0.0)).collect()
}

/// Nearest point of the monotone simplex; the result sums to one up to rounding
/// and is exactly nonincreasing and nonnegative.
pub fn project_monotone_simplex(y: &[f64]) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    let mut out = simplex_projection(&isotonic_nonincreasing(y));
    // Restore exact monotonicity lost to rounding in the shift.
    for j in 1..out.len() {
        if out[j] > out[j - 1] {
            out[j] = out[j - 1];
        }
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|b| *b /= total);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Solves the small dense system `m x = r` by Gaussian elimination.
    #[allow(clippy::needless_range_loop)]
    fn solve(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
        let d = r.len();
        for c in 0..d {
            let p = (c..d).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
            if m[p][c].abs() < 1e-12 {
                return None;
            }
            m.swap(c, p);
            r.swap(c, p);
            for i in 0..d {
                if i != c {
                    let f = m[i][c] / m[c][c];
                    for j in c..d {
                        m[i][j] -= f * m[c][j];
                    }
                    r[i] -= f * r[c];
                }
            }
        }
        Some((0..d).map(|i| r[i] / m[i][i]).collect())
    }

    /// The monotone simplex is the convex hull of the step vectors; project onto
    /// every face and keep the nearest feasible foot.
    fn brute_force(y: &[f64]) -> Vec<f64> {
        let l = y.len();
        let verts: Vec<Vec<f64>> = (1..=l)
            .map(|a| (0..l).map(|j| if j < a { 1.0 / a as f64 } else { 0.0 }).collect())
            .collect();
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for face in 1u32..(1 << l) {
            let idx: Vec<usize> = (0..l).filter(|&i| face >> i & 1 == 1).collect();
            let base = &verts[idx[0]];
            let dirs: Vec<Vec<f64>> = idx[1..]
                .iter()
                .map(|&i| verts[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            let rhs: Vec<f64> = y.iter().zip(base).map(|(a, b)| a - b).collect();
            let coef = if dirs.is_empty() {
                Vec::new()
            } else {
                let gram = dirs.iter().map(|u| dirs.iter().map(|v| dot(u, v)).collect()).collect();
                match solve(gram, dirs.iter().map(|u| dot(u, &rhs)).collect()) {
                    Some(c) => c,
                    None => continue,
                }
            };
            let lead = 1.0 - coef.iter().sum::<f64>();
            if lead < -1e-12 || coef.iter().any(|&c| c < -1e-12) {
                continue;
            }
            let mut p = base.clone();
            for (c, u) in coef.iter().zip(&dirs) {
                p.iter_mut().zip(u).for_each(|(x, d)| *x += c * d);
            }
            let dist: f64 = p.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                best = Some((dist, p));
            }
        }
        best.unwrap().1
    }

    #[test]
    fn output_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let l = rng.gen_range(1..=12);
            let y: Vec<f64> = (0..l).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = project_monotone_simplex(&y);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&b| b >= 0.0));
            assert!(p.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn matches_brute_force_qp() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let l = rng.gen_range(1..=6);
            let y: Vec<f64> = (0..l).map(|_| rng.gen_range(-1.0..1.5)).collect();
            let p = project_monotone_simplex(&y);
            let q = brute_force(&y);
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() < 1e-9, "y={y:?} fast={p:?} brute={q:?}");
            }
        }
    }

    #[test]
    fn feasible_points_are_fixed() {
        let b = vec![0.4, 0.3, 0.3, 0.0];
        let p = project_monotone_simplex(&b);
        for (x, y) in p.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn isotonic_pools_violators() {
        assert_eq!(isotonic_nonincreasing(&[1.0, 3.0, 2.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(isotonic_nonincreasing(&[3.0, 1.0, 2.0]), vec![3.0, 1.5, 1.5]);
    }
}
