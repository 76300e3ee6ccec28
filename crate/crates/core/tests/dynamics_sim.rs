//! Simulation-level checks: smoke runs on heterogeneous networks, the
//! coupling-norm probe bound and its scaling in Delta, and bitwise
//! reproducibility of whole trajectories.

use hubnet::circle::mod1;
use hubnet::dynamics::{
    coupling_norm_probe, simulate, step, CouplingSpec, MapSpec, SimConfig, SystemState,
};
use hubnet::graph::{build_example1, sample_graph, DegreeSequence, HeterogeneityParams};
use hubnet::rng::{stream_rng, STREAM_NOISE};
use proptest::prelude::*;

fn small_example1(n: usize, delta: f64) -> DegreeSequence {
    let params = HeterogeneityParams {
        n,
        gamma: 1.0,
        theta: 0.5,
        sigma_delta: 0.45,
        ell: 2,
        kappas: vec![1.0, 0.99],
        low_degree_base: Some(7.0),
    };
    build_example1(&params, Some(delta)).unwrap()
}

#[test]
fn heterogeneous_network_smoke_run() {
    let seq = small_example1(2000, 64.0);
    let graph = sample_graph(&seq, 5).unwrap();
    let map = MapSpec::doubling(1e-5);
    let coupling = CouplingSpec::diffusive_sine();
    let config = SimConfig::new(0.1, 100, 200, 3);
    let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();
    let hub = traj.node_series(0).unwrap();
    assert_eq!(hub.len(), 200);
    assert!(hub.iter().all(|&x| (0.0..1.0).contains(&x)));
    assert!(hub.windows(2).any(|p| p[0] != p[1]));
}

/// For the diffusive coupling |r_i| <= k_i / Delta pointwise, so the spec
/// bound 2 sup|u| sup|v| k * w_i / Delta holds whenever k_i <= 2 w_i.
#[test]
fn probe_bounded_by_degree_scale() {
    let seq = small_example1(2000, 64.0);
    let graph = sample_graph(&seq, 5).unwrap();
    let probe_nodes: Vec<usize> = vec![10, 100, 500, 1000, 1999];
    for &i in &probe_nodes {
        assert!(
            (graph.in_degree(i) as f64) <= 2.0 * seq.weight(i),
            "fixture assumption broken at node {i}"
        );
    }
    let map = MapSpec::doubling(1e-5);
    let coupling = CouplingSpec::diffusive_sine();
    let config = SimConfig::new(0.1, 100, 300, 3).with_record_nodes(probe_nodes);
    let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();
    let probe = coupling_norm_probe(&traj, &coupling, &seq);
    assert_eq!(probe.len(), 5);
    let c = 2.0 * coupling.sup_bound(); // 2 * (sup|u| sup|v| summed over terms)
    for (node, max_r) in probe {
        let bound = c * seq.weight(node) / seq.delta();
        assert!(
            max_r <= bound,
            "node {node}: max |r| = {max_r:.4} above {bound:.4}"
        );
    }
}

/// Doubling Delta at fixed low degrees halves the probe envelope within a
/// factor of two (the low-degree coupling term scales like Delta^-gamma).
#[test]
fn probe_envelope_scales_with_delta() {
    let mut envelopes = Vec::new();
    for &delta in &[64.0, 128.0] {
        let seq = small_example1(4000, delta);
        let graph = sample_graph(&seq, 9).unwrap();
        let map = MapSpec::doubling(1e-5);
        let coupling = CouplingSpec::diffusive_sine();
        let nodes: Vec<usize> = (0..20).map(|k| 200 + 150 * k).collect();
        let config = SimConfig::new(0.1, 100, 300, 3).with_record_nodes(nodes);
        let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();
        let probe = coupling_norm_probe(&traj, &coupling, &seq);
        let env = probe.iter().map(|&(_, r)| r).fold(0.0f64, f64::max);
        envelopes.push(env);
    }
    let ratio = envelopes[0] / envelopes[1];
    assert!(
        (1.0..=4.0).contains(&ratio),
        "envelope ratio {ratio:.3} outside [1, 4] (envelopes {envelopes:?})"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// mod-1 closure and per-call determinism of the step on random states,
    /// couplings and strengths.
    #[test]
    fn step_closure_and_determinism(
        xs in proptest::collection::vec(0.0f64..1.0, 4..24),
        alpha in 0.0f64..1.0,
        seed in any::<u64>(),
        sine_minus in any::<bool>(),
    ) {
        let n = xs.len();
        let w = vec![2.0f64; n]; // Delta^2 rho = 4/(2n) <= 1 for n >= 2
        let seq = DegreeSequence::from_weights(w, 1).unwrap();
        let graph = sample_graph(&seq, seed).unwrap();
        let map = MapSpec::doubling(1e-5);
        let coupling = if sine_minus {
            CouplingSpec::sine_minus_sine()
        } else {
            CouplingSpec::diffusive_sine()
        };
        let state = SystemState::new(xs);
        let mut rng1 = stream_rng(seed, STREAM_NOISE);
        let mut rng2 = stream_rng(seed, STREAM_NOISE);
        let a = step(&state, &graph, &map, &coupling, alpha, seq.delta(), &mut rng1).unwrap();
        let b = step(&state, &graph, &map, &coupling, alpha, seq.delta(), &mut rng2).unwrap();
        prop_assert_eq!(&a.x, &b.x);
        for &v in &a.x {
            prop_assert!((0.0..1.0).contains(&v));
        }
    }
}

/// Whole noiseless decoupled trajectories reproduce iterated map application
/// bit for bit.
#[test]
fn decoupled_trajectory_is_iterated_map() {
    let seq = small_example1(600, 16.0);
    let graph = sample_graph(&seq, 1).unwrap();
    let map = MapSpec::doubling(0.0);
    let coupling = CouplingSpec::sine_minus_sine();
    let config = SimConfig::new(0.0, 0, 50, 21).with_record_nodes(vec![0, 7, 300]);
    let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();
    // Reconstruct each recorded series from its own first value.
    for (m, &node) in traj.record_nodes.iter().enumerate() {
        let series = &traj.series[m];
        let mut x = series[0];
        for (t, &v) in series.iter().enumerate() {
            assert_eq!(v, x, "node {node} diverged at recorded step {t}");
            x = mod1(2.0 * x);
        }
    }
}
