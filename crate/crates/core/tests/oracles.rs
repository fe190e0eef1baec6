//! Checks against independent brute-force and numerical oracles.

use melodic_measure::distribution::is_low_skewed;
use melodic_measure::{
    arrangements, cluster_1d, enumerate_patterns, r_ratio, spacing_lab, wigner_surmise_pdf, Beta, SearchConfig,
    SpacingLabConfig, TransitionPattern,
};
use proptest::prelude::*;

fn sq_dev(group: &[f64]) -> f64 {
    let mean = group.iter().sum::<f64>() / group.len() as f64;
    group.iter().map(|v| (v - mean).powi(2)).sum()
}

/// Every way to place k-1 cut points among n sorted values, lexicographic,
/// keeping the first strictly better cost.
fn brute_force_partition(values: &[f64], k: usize) -> (Vec<usize>, f64, Vec<Vec<f64>>) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut cuts: Vec<usize> = (1..k).collect();
    loop {
        let mut bounds = vec![0];
        bounds.extend(&cuts);
        bounds.push(n);
        let cost: f64 = bounds.windows(2).map(|b| sq_dev(&sorted[b[0]..b[1]])).sum();
        let better = match &best {
            None => true,
            Some((c, _)) => cost < c - 1e-9 * (1.0 + c.abs()),
        };
        if better {
            best = Some((cost, bounds.clone()));
        }
        // next combination of cut positions in 1..n
        let m = cuts.len();
        let Some(i) = (0..m).rev().find(|&i| cuts[i] < n - (m - i)) else { break };
        cuts[i] += 1;
        for j in i + 1..m {
            cuts[j] = cuts[j - 1] + 1;
        }
    }
    let (cost, bounds) = best.unwrap();
    let clusters: Vec<Vec<f64>> = bounds.windows(2).map(|b| sorted[b[0]..b[1]].to_vec()).collect();
    (clusters.iter().map(Vec::len).collect(), cost, clusters)
}

#[test]
fn cluster_examples_match_brute_force() {
    for (values, k, signature) in [
        (vec![-25., -25., 10., 30., 40., 75.], 3, vec![2, 3, 1]),
        (vec![-30., -25., -25., 10., 40., 75.], 3, vec![3, 2, 1]),
        (vec![-20., -5., 15., 35., 35., 60.], 3, vec![2, 3, 1]),
        (vec![1., 2., 3.], 3, vec![1, 1, 1]),
    ] {
        let (sig, _, _) = brute_force_partition(&values, k);
        assert_eq!(sig, signature);
        assert_eq!(cluster_1d(&values, k).unwrap().signature, signature);
    }
}

proptest! {
    #[test]
    fn cluster_matches_brute_force_on_grid_values(
        values in prop::collection::vec((-10i32..=16).prop_map(|u| u as f64 * 5.0), 1..=10),
        k in 1usize..=5,
    ) {
        prop_assume!(k <= values.len());
        let (sig, cost, clusters) = brute_force_partition(&values, k);
        let got = cluster_1d(&values, k).unwrap();
        prop_assert_eq!(got.signature, sig);
        prop_assert_eq!(got.clusters, clusters);
        prop_assert!((got.wcss - cost).abs() <= 1e-9 * (1.0 + cost));
    }

    #[test]
    fn cluster_matches_brute_force_on_reals(
        values in prop::collection::vec(-100.0f64..100.0, 1..=10),
        k in 1usize..=6,
    ) {
        prop_assume!(k <= values.len());
        let (sig, cost, _) = brute_force_partition(&values, k);
        let got = cluster_1d(&values, k).unwrap();
        prop_assert_eq!(got.signature, sig);
        prop_assert!((got.wcss - cost).abs() <= 1e-9 * (1.0 + cost));
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn multinomial(values: &[f64]) -> u64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut denom = 1;
    let mut run = 1;
    for i in 1..=sorted.len() {
        if i < sorted.len() && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    factorial(sorted.len()) / denom
}

proptest! {
    #[test]
    fn arrangement_count_is_multinomial(values in prop::collection::vec((-3i32..=3).prop_map(|u| u as f64 * 5.0), 0..=6)) {
        let all = arrangements(&TransitionPattern(values.clone()));
        prop_assert_eq!(all.len() as u64, multinomial(&values));
        let mut dedup = all.clone();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), all.len());
    }
}

/// All signed grid patterns of the given length, filtered by Σ|d|.
fn grid_brute_force(length: usize, step: f64, max: f64, level: f64) -> Vec<Vec<f64>> {
    let magnitudes: Vec<f64> = (1..=(max / step) as i64).map(|u| u as f64 * step).collect();
    let grid: Vec<f64> = magnitudes.iter().flat_map(|&m| [m, -m]).collect();
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..length {
        out = out.into_iter().flat_map(|p| grid.iter().map(move |&g| [p.clone(), vec![g]].concat())).collect();
    }
    out.retain(|p| (p.iter().map(|d| d.abs()).sum::<f64>() - level).abs() < 1e-9);
    out.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    out
}

#[test]
fn pattern_enumeration_matches_grid_brute_force() {
    // compositions of 5 into 3 positive parts, C(4,2) = 6, times 2^3 signs
    assert_eq!(6 * 8, 48);
    for length in 1..=3 {
        for level in (5..=120).step_by(5) {
            let cfg = SearchConfig { length, ..SearchConfig::at_level(level as f64) };
            let got: Vec<Vec<f64>> = enumerate_patterns(&cfg).unwrap().into_iter().map(|p| p.0).collect();
            assert_eq!(got, grid_brute_force(length, 5.0, 40.0, level as f64), "length {length} level {level}");
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let x = a + i as f64 * h;
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    sum * h / 3.0
}

#[test]
fn surmise_normalization_and_mean_by_quadrature() {
    for beta in [Beta::ORTHOGONAL, Beta::UNITARY, Beta::SYMPLECTIC] {
        let pdf = |s: f64| wigner_surmise_pdf(s, beta).unwrap();
        let mass = simpson(pdf, 0.0, 10.0, 20_000);
        let mean = simpson(|s| s * pdf(s), 0.0, 10.0, 20_000);
        assert!((mass - 1.0).abs() < 1e-6, "beta {beta:?}: mass {mass}");
        assert!((mean - 1.0).abs() < 1e-3, "beta {beta:?}: mean {mean}");
    }
    // (32/π²)·e^(−4/π)
    let expected = 32.0 / std::f64::consts::PI.powi(2) * (-4.0 / std::f64::consts::PI).exp();
    assert!((wigner_surmise_pdf(1.0, Beta::UNITARY).unwrap() - expected).abs() < 1e-15);
}

/// Multisets by brute force over all ordered tuples.
fn multisets_brute_force(n: usize, sum: i64, step: i64, max: i64) -> Vec<Vec<f64>> {
    let grid: Vec<i64> = (1..=max / step).map(|u| u * step).collect();
    let mut tuples: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        tuples = tuples.into_iter().flat_map(|t| grid.iter().map(move |&g| [t.clone(), vec![g]].concat())).collect();
    }
    let mut out: Vec<Vec<i64>> = tuples
        .into_iter()
        .filter(|t| t.iter().sum::<i64>() == sum && t.windows(2).all(|w| w[0] <= w[1]))
        .collect();
    out.sort();
    out.into_iter().map(|t| t.into_iter().map(|v| v as f64).collect()).collect()
}

#[test]
fn spacing_lab_matches_brute_force_grid() {
    for n in 1..=4 {
        for sum in (5..=60).step_by(5) {
            let lab = spacing_lab(&SpacingLabConfig::new(n, sum as f64)).unwrap();
            let mut got: Vec<Vec<f64>> = lab.ranked.iter().map(|m| m.values.clone()).collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(got, multisets_brute_force(n, sum, 5, 40), "n {n} sum {sum}");
            let best = lab.ranked.iter().map(|m| r_ratio(&m.values)).fold(f64::NEG_INFINITY, f64::max);
            if let Some(top) = lab.argmax() {
                assert_eq!(top.r, best);
            }
        }
    }
}

#[test]
fn spacing_lab_argmax_is_never_all_equal() {
    for n in 1..=5 {
        for sum in (5..=60).step_by(5) {
            let lab = spacing_lab(&SpacingLabConfig::new(n, sum as f64)).unwrap();
            if lab.ranked.len() >= 2 {
                let top = &lab.argmax().unwrap().values;
                assert!(top.iter().any(|v| *v != top[0]), "n {n} sum {sum}: {top:?}");
                assert!(is_low_skewed(top), "n {n} sum {sum}: {top:?}");
            }
        }
    }
}

#[test]
fn r_hand_oracle() {
    // (2·25·ln25 + 225·ln225)/275 and (25·ln25 + 2·100·ln100)/225
    let a = (2.0 * 25.0 * 25f64.ln() + 225.0 * 225f64.ln()) / 275.0;
    let b = (25.0 * 25f64.ln() + 2.0 * 100.0 * 100f64.ln()) / 225.0;
    assert!((r_ratio(&[5., 5., 15.]) - a).abs() < 1e-12);
    assert!((r_ratio(&[5., 10., 10.]) - b).abs() < 1e-12);
    assert!((a - 5.017).abs() < 0.001 && (b - 4.451).abs() < 0.001);
}
