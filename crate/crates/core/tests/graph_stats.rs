//! Distributional checks of the graph sampler against enumeration and
//! closed-form moments, plus the concentration statistics at reference scale.

use hubnet::graph::{
    build_example1, concentration_check, degree_stats, sample_graph, y_statistic, DegreeSequence,
    HeterogeneityParams,
};
use proptest::prelude::*;

fn example1_params() -> HeterogeneityParams {
    HeterogeneityParams {
        n: 20_000,
        gamma: 1.0,
        theta: 0.5,
        sigma_delta: 0.45,
        ell: 2,
        kappas: vec![1.0, 0.99],
        low_degree_base: Some(7.0),
    }
}

/// Every ordered pair of the n = 3 uniform sequence is an independent
/// Bernoulli(1/3) edge, so the 64 possible digraphs have probability
/// (1/3)^e (2/3)^(6-e). Sampled frequencies over 1e5 seeds must match each
/// enumerated probability within 3 standard errors (plus a hair of slack).
#[test]
fn three_node_distribution_matches_enumeration() {
    let seq = DegreeSequence::from_weights(vec![1.0, 1.0, 1.0], 1).unwrap();
    let p = 1.0f64 / 3.0;
    // Ordered pairs in a fixed order: (i, j) means edge j -> i.
    let pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

    let samples = 100_000u64;
    let mut counts = [0u64; 64];
    for seed in 0..samples {
        let g = sample_graph(&seq, seed).unwrap();
        let mut code = 0usize;
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if g.in_neighbors(i).contains(&(j as u32)) {
                code |= 1 << bit;
            }
        }
        counts[code] += 1;
    }
    for (code, &count) in counts.iter().enumerate() {
        let edges = (code as u32).count_ones();
        let prob = p.powi(edges as i32) * (1.0 - p).powi(6 - edges as i32);
        let freq = count as f64 / samples as f64;
        let se = (prob * (1.0 - prob) / samples as f64).sqrt();
        assert!(
            (freq - prob).abs() <= 3.0 * se + 1e-4,
            "digraph {code:06b}: freq {freq:.5} vs prob {prob:.5} (se {se:.5})"
        );
    }
}

/// Main hub of the reference-scale network: in-degree within 3 sqrt(w_1) of w_1
/// in at least 99 of 100 seeds (deterministic count over fixed seeds).
#[test]
fn hub_degree_concentrates() {
    let seq = build_example1(&example1_params(), Some(260.0)).unwrap();
    let band = 3.0 * 260.0f64.sqrt();
    let hits = (0..100u64)
        .filter(|&seed| {
            let g = sample_graph(&seq, seed).unwrap();
            (g.in_degree(0) as f64 - 260.0).abs() < band
        })
        .count();
    assert!(hits >= 99, "only {hits}/100 within the 3-sigma band");
}

/// Law of large numbers at 4 sigma: over S graphs the per-node mean degree
/// matches w_i (1 - w_i rho) within 4 sqrt(Var/S).
#[test]
fn mean_degree_matches_self_excluded_expectation() {
    let mut w = vec![6.0, 5.0, 4.0];
    w.extend(vec![2.0; 12]);
    w.extend(vec![1.0; 15]);
    let seq = DegreeSequence::from_weights(w, 3).unwrap();
    let samples = 4000u64;
    let mut sums = vec![0.0f64; seq.n()];
    for seed in 0..samples {
        let g = sample_graph(&seq, 10_000 + seed).unwrap();
        for (i, s) in sums.iter_mut().enumerate() {
            *s += g.in_degree(i) as f64;
        }
    }
    let g0 = sample_graph(&seq, 0).unwrap();
    let stats = degree_stats(&g0, &seq).unwrap();
    for i in 0..seq.n() {
        let mean = sums[i] / samples as f64;
        let tol = 4.0 * (stats[i].var_expected / samples as f64).sqrt();
        assert!(
            (mean - stats[i].mean_expected).abs() <= tol,
            "node {i}: mean {mean:.4} vs {:.4} (tol {tol:.4})",
            stats[i].mean_expected
        );
    }
}

/// Empirical variance of every degree over 1e4 graphs matches the
/// self-pair-excluded closed form within 5%.
#[test]
fn variance_matches_closed_form() {
    let w = vec![3.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5, 0.5];
    let seq = DegreeSequence::from_weights(w, 1).unwrap();
    let samples = 10_000u64;
    let mut sums = vec![0.0f64; seq.n()];
    let mut sq_sums = vec![0.0f64; seq.n()];
    for seed in 0..samples {
        let g = sample_graph(&seq, seed).unwrap();
        for i in 0..seq.n() {
            let k = g.in_degree(i) as f64;
            sums[i] += k;
            sq_sums[i] += k * k;
        }
    }
    let g0 = sample_graph(&seq, 0).unwrap();
    let stats = degree_stats(&g0, &seq).unwrap();
    for i in 0..seq.n() {
        let mean = sums[i] / samples as f64;
        let var = sq_sums[i] / samples as f64 - mean * mean;
        let rel = (var - stats[i].var_expected).abs() / stats[i].var_expected;
        assert!(
            rel < 0.05,
            "node {i}: empirical var {var:.4} vs closed form {:.4}",
            stats[i].var_expected
        );
    }
}

/// Y_i concentrates at kappa_i^2: |Y_1 - 1| < 0.3 in at least 95 of 100
/// seeds (the band is ~2.6 sigma for Delta = 260; measured 99/100).
#[test]
fn y_statistic_concentrates() {
    let seq = build_example1(&example1_params(), Some(260.0)).unwrap();
    let mut hits = 0;
    for seed in 0..100u64 {
        let g = sample_graph(&seq, seed).unwrap();
        let y = y_statistic(&g, &seq, 0).unwrap();
        if y.deviation < 0.3 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "only {hits}/100 within 0.3");
}

/// The factorized Y matches the brute-force double sum
/// sum_{j,k > ell} A_ij A_ik computed from the raw adjacency indicator.
#[test]
fn y_statistic_factorizes() {
    let mut params = example1_params();
    params.n = 500;
    let seq = build_example1(&params, Some(16.0)).unwrap();
    for seed in 0..5u64 {
        let g = sample_graph(&seq, seed).unwrap();
        for hub in 0..seq.ell() {
            let mut a = vec![0.0f64; seq.n()];
            for &j in g.in_neighbors(hub) {
                a[j as usize] = 1.0;
            }
            let mut double = 0.0;
            for j in seq.ell()..seq.n() {
                for k in seq.ell()..seq.n() {
                    double += a[j] * a[k];
                }
            }
            let y = y_statistic(&g, &seq, hub).unwrap();
            assert!((y.y - double / (seq.delta() * seq.delta())).abs() < 1e-12);
        }
    }
}

/// 3-sigma degree concentration on the reference-scale network over a few seeds
/// (the 20-seed version is acceptance criterion 1).
#[test]
fn concentration_three_sigma_small_ensemble() {
    let seq = build_example1(&example1_params(), Some(260.0)).unwrap();
    for seed in [11u64, 12, 13] {
        let g = sample_graph(&seq, seed).unwrap();
        let rep = concentration_check(&g, &seq, 0.0, 3.0).unwrap();
        assert!(
            rep.violating_fraction < 0.01,
            "seed {seed}: fraction {}",
            rep.violating_fraction
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Sampler invariants on arbitrary small sequences: reproducibility,
    /// sortedness, no self-loops, and matching in/out edge totals.
    #[test]
    fn sampler_invariants(
        raw in proptest::collection::vec(0.5f64..2.0, 8..40),
        seed in any::<u64>(),
    ) {
        let mut w = raw;
        w.sort_by(|a, b| b.total_cmp(a));
        let ell = 1 + w.len() / 4;
        let seq = DegreeSequence::from_weights(w, ell).unwrap();
        let g1 = sample_graph(&seq, seed).unwrap();
        let g2 = sample_graph(&seq, seed).unwrap();
        prop_assert_eq!(&g1, &g2);
        for i in 0..seq.n() {
            let nb = g1.in_neighbors(i);
            prop_assert!(nb.windows(2).all(|p| p[0] < p[1]));
            prop_assert!(!nb.contains(&(i as u32)));
        }
        let k_in: usize = g1.in_degrees().iter().sum();
        let k_out: usize = g1.out_degrees().iter().sum();
        prop_assert_eq!(k_in, k_out);
    }

    /// Edge probabilities stay in [0, 1] for graphical sequences, and the
    /// isolation probability never exceeds its exponential bound.
    #[test]
    fn probability_bounds(raw in proptest::collection::vec(0.0f64..2.0, 6..30)) {
        let mut w = raw;
        w.sort_by(|a, b| b.total_cmp(a));
        let seq = DegreeSequence::from_weights_unchecked(w, 1);
        prop_assume!(seq.delta() * seq.delta() * seq.rho() <= 1.0);
        for i in 0..seq.n() {
            for j in 0..seq.n() {
                let p = seq.edge_probability(i, j);
                prop_assert!((0.0..=1.0).contains(&p));
            }
            let iso = hubnet::graph::isolated_hub_probability(&seq, i).unwrap();
            prop_assert!(iso.exact <= iso.bound + 1e-15);
        }
    }
}
