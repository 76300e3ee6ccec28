//! Fluctuation extraction from full network simulations against the
//! theoretical bounds, at reference scale.

use hubnet::dynamics::{simulate, CouplingSpec, MapSpec, SimConfig};
use hubnet::experiments::NetworkSpec;
use hubnet::graph::sample_graph;
use hubnet::measure::{invariant_density, mean_field_g, ulam_matrix};
use hubnet::reduction::{extract_zeta, ReducedHubModel};

/// On the Example-1 network with the diffusive coupling (g = 0), the main
/// hub's fluctuation stays within 10 Delta^{-1/2} in sup norm over the
/// recorded window (measured ~0.17 vs the 0.62 budget).
#[test]
fn zeta_sup_norm_within_theorem_budget() {
    let spec = NetworkSpec::two_hub_reference();
    let seq = spec.degree_sequence().unwrap();
    let graph = sample_graph(&seq, 7).unwrap();
    let map = MapSpec::doubling(1e-5);
    let coupling = CouplingSpec::diffusive_sine();
    let config = SimConfig::new(0.1, 1000, 1000, 11);
    let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();

    let op = ulam_matrix(&MapSpec::doubling(0.0), 1024, 64).unwrap();
    let phi0 = invariant_density(&op, 1e-12, 10_000).unwrap();
    let g = mean_field_g(&coupling, &phi0);
    let model = ReducedHubModel::new(map, g, 0.1, 1.0).unwrap();
    let zeta = extract_zeta(&traj, &model, 0).unwrap();
    assert_eq!(zeta.zeta.len(), 999);
    let budget = 10.0 / seq.delta().sqrt();
    assert!(
        zeta.sup_norm() <= budget,
        "||zeta||_0 = {} above 10 Delta^-1/2 = {budget}",
        zeta.sup_norm()
    );
}

/// Theorem-style bound with one constant across the (Delta, kappa) grid:
/// ||zeta_i||_0 <= C kappa_i^(1/2) Delta^(-1/2 + 0.1) with C = 3 calibrated
/// once at Delta = 260 (measured 0.17 vs budget 0.32) and held elsewhere.
#[test]
fn zeta_bound_constant_holds_across_grid() {
    const C: f64 = 3.0;
    const DELTA_EXP: f64 = -0.4; // -1/2 + slack 0.1
    let op = ulam_matrix(&MapSpec::doubling(0.0), 1024, 64).unwrap();
    let phi0 = invariant_density(&op, 1e-12, 10_000).unwrap();
    let coupling = CouplingSpec::diffusive_sine();
    let g = mean_field_g(&coupling, &phi0);
    let map = MapSpec::doubling(1e-5);
    for &(delta, kappa2, hub) in &[(64.0, 0.99, 0usize), (260.0, 0.99, 0), (347.0, 0.2, 1)] {
        let spec = NetworkSpec::two_hub_reference()
            .with_delta(delta)
            .with_kappa2(kappa2);
        let seq = spec.degree_sequence().unwrap();
        let graph = sample_graph(&seq, 7).unwrap();
        let config = SimConfig::new(0.1, 1000, 1000, 11).with_record_nodes(vec![0, 1]);
        let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();
        let model = ReducedHubModel::new(map.clone(), g.clone(), 0.1, seq.kappa(hub)).unwrap();
        let zeta = extract_zeta(&traj, &model, hub).unwrap();
        let budget = C * seq.kappa(hub).sqrt() * delta.powf(DELTA_EXP);
        assert!(
            zeta.sup_norm() <= budget,
            "(Delta={delta}, kappa={}) ||zeta||_0 = {:.4} above {budget:.4}",
            seq.kappa(hub),
            zeta.sup_norm()
        );
    }
}

/// When kappa_2 = kappa_1 = 1 the two hubs obey the same law, so their mean
/// fluctuation magnitudes agree within a factor of 2.
#[test]
fn equal_kappas_give_statistically_equal_fluctuations() {
    let spec = NetworkSpec::two_hub_reference()
        .with_delta(347.0)
        .with_kappa2(1.0);
    let seq = spec.degree_sequence().unwrap();
    let graph = sample_graph(&seq, 3).unwrap();
    let map = MapSpec::doubling(1e-5);
    let coupling = CouplingSpec::diffusive_sine();
    let config = SimConfig::new(0.1, 1000, 1000, 9).with_record_nodes(vec![0, 1]);
    let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();
    let op = ulam_matrix(&MapSpec::doubling(0.0), 1024, 64).unwrap();
    let phi0 = invariant_density(&op, 1e-12, 10_000).unwrap();
    let g = mean_field_g(&coupling, &phi0);
    let model = ReducedHubModel::new(map, g, 0.1, 1.0).unwrap();
    let m1 = hubnet::reduction::zeta_mean_abs(&extract_zeta(&traj, &model, 0).unwrap().zeta).unwrap();
    let m2 = hubnet::reduction::zeta_mean_abs(&extract_zeta(&traj, &model, 1).unwrap().zeta).unwrap();
    let ratio = m2 / m1;
    assert!(
        (0.5..=2.0).contains(&ratio),
        "<|zeta_2|>/<|zeta_1|> = {ratio:.3}"
    );
}

/// Extraction round-trips through the Trajectory type: a 1-node "network"
/// with no edges evolves by the isolated map, and extracting against the
/// g = 0 model returns zeta = 0 when alpha-coupling contributes nothing.
#[test]
fn trajectory_extraction_round_trip() {
    use hubnet::graph::{DegreeSequence, DirectedGraph};
    let seq = DegreeSequence::from_weights(vec![1.0, 1.0], 1).unwrap();
    let graph = DirectedGraph::from_in_neighbors(vec![vec![], vec![]], 0).unwrap();
    let map = MapSpec::doubling(0.0);
    let coupling = CouplingSpec::diffusive_sine();
    let config = SimConfig::new(0.2, 0, 100, 5).with_record_nodes(vec![0]);
    let traj = simulate(&graph, &seq, &map, &coupling, &config).unwrap();

    let op = ulam_matrix(&map, 256, 64).unwrap();
    let phi0 = invariant_density(&op, 1e-12, 10_000).unwrap();
    let g = mean_field_g(&coupling, &phi0);
    // g of the diffusive coupling vanishes, so the model drift is the bare
    // map and the extracted residual must vanish too.
    let model = ReducedHubModel::new(map, g, 0.2, 1.0).unwrap();
    let zeta = extract_zeta(&traj, &model, 0).unwrap();
    assert!(zeta.sup_norm() < 1e-9, "residual {}", zeta.sup_norm());
    // Unrecorded nodes are refused rather than guessed.
    assert!(extract_zeta(&traj, &model, 1).is_err());
}
