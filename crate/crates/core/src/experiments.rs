//! End-to-end numerical studies: coherence versus coupling strength, scaling
//! of the hub fluctuations in Delta and kappa, homogeneity of the mean field,
//! and low-degree ensemble statistics. Every experiment is deterministic
//! given its settings and master seed; parameter points get seeds derived
//! from (master seed, point index).

use rayon::prelude::*;

use crate::circle::CircleFn;
use crate::dynamics::{
    simulate, simulate_with_observables, CouplingKind, CouplingSpec, MapSpec, SimConfig,
};
use crate::error::{Error, Result};
use crate::graph::{build_example1, sample_graph, DegreeSequence, HeterogeneityParams};
use crate::measure::{invariant_density, mean_field_g, observable_mean, ulam_matrix};
use crate::reduction::{coherence, extract_zeta, zeta_mean_abs, ReducedHubModel};
use crate::rng::derive_seed;

/// Seed-stream offset reserved for graph construction (simulation points use
/// the bare point index).
const GRAPH_SEED_OFFSET: u64 = 1_000_000;

/// Default bin count for the transfer-operator stage of an experiment.
const ULAM_BINS: usize = 1024;
const ULAM_SAMPLES: usize = 64;

/// Network family used by the experiments: ell hubs with weights kappa_i
/// Delta over a constant low-degree block.
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    pub n: usize,
    pub ell: usize,
    pub kappas: Vec<f64>,
    pub low_degree: f64,
    pub delta: f64,
    pub gamma: f64,
    pub theta: f64,
}

impl NetworkSpec {
    /// The workhorse network of the numerical studies: n = 2e4, two hubs
    /// with kappa_2 = 0.99, constant low degrees 7, Delta = 260. theta = 0.4
    /// keeps the hub count inside the regime-i condition theta < 1 - gamma/2.
    pub fn two_hub_reference() -> Self {
        Self {
            n: 20_000,
            ell: 2,
            kappas: vec![1.0, 0.99],
            low_degree: 7.0,
            delta: 260.0,
            gamma: 1.0,
            theta: 0.4,
        }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self {
            delta,
            ..self.clone()
        }
    }

    pub fn with_kappa2(&self, kappa2: f64) -> Self {
        let mut kappas = self.kappas.clone();
        if kappas.len() < 2 {
            kappas.push(kappa2);
        } else {
            kappas[1] = kappa2;
        }
        Self {
            kappas,
            ..self.clone()
        }
    }

    pub fn heterogeneity_params(&self) -> HeterogeneityParams {
        HeterogeneityParams {
            n: self.n,
            gamma: self.gamma,
            theta: self.theta,
            sigma_delta: (self.delta.ln() / (self.n as f64).ln()).min(0.99),
            ell: self.ell,
            kappas: self.kappas.clone(),
            low_degree_base: Some(self.low_degree),
        }
    }

    pub fn degree_sequence(&self) -> Result<DegreeSequence> {
        build_example1(&self.heterogeneity_params(), Some(self.delta))
    }
}

/// Burn-in, window and noise settings shared by the experiments.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub t_burn: usize,
    pub t_record: usize,
    pub noise_amp: f64,
    pub master_seed: u64,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            t_burn: 1000,
            t_record: 1000,
            noise_amp: 1e-5,
            master_seed: 1,
        }
    }
}

/// Least-squares fit of log(value) against log(axis).
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% confidence interval for the slope.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Set when the axis spans fewer than 3 octaves.
    pub narrow: bool,
}

/// Two-sided 97.5% Student-t quantiles for df = 1..=30; 1.96 beyond.
fn t_quantile_975(df: usize) -> f64 {
    const TABLE: [f64; 30] = [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179,
        2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
        2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ];
    if df == 0 {
        f64::INFINITY
    } else if df <= 30 {
        TABLE[df - 1]
    } else {
        1.96
    }
}

/// Fit value ~ C * axis^slope by least squares in log-log coordinates.
/// Refuses fewer than 3 points or non-positive data.
pub fn fit_power_law(axis: &[f64], values: &[f64]) -> Result<PowerLawFit> {
    if axis.len() != values.len() {
        return Err(Error::DimensionMismatch(
            "axis/value length mismatch".into(),
        ));
    }
    if axis.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs at least 3 points, got {}",
            axis.len()
        )));
    }
    if axis.iter().chain(values).any(|&v| v <= 0.0) {
        return Err(Error::InvalidParameter(
            "power-law fit needs positive axis and values".into(),
        ));
    }
    let n = axis.len() as f64;
    let xs: Vec<f64> = axis.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "axis values are all equal; no fit possible".into(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let df = axis.len() - 2;
    let se = if df > 0 {
        (ssr / df as f64 / sxx).sqrt()
    } else {
        0.0
    };
    let half = t_quantile_975(df) * se;
    let span = axis.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        / axis.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PowerLawFit {
        slope,
        intercept,
        ci_low: slope - half,
        ci_high: slope + half,
        narrow: span.log2() < 3.0,
    })
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub axis: f64,
    pub value: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// Output of a parameter sweep, with an optional power-law fit.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis_name: &'static str,
    pub stat_name: &'static str,
    pub points: Vec<SweepPoint>,
    pub fit: Option<PowerLawFit>,
    pub master_seed: u64,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn axis(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.axis).collect()
    }

    pub fn max_value(&self) -> f64 {
        self.points.iter().map(|p| p.value).fold(f64::NAN, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.points.iter().map(|p| p.value).fold(f64::NAN, f64::min)
    }

    /// CSV body `axis,value,stat,stderr`; a fitted sweep appends a
    /// `slope,intercept,ci_low,ci_high` block.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "axis,value,stat,stderr")?;
        for p in &self.points {
            writeln!(out, "{},{},{},{}", p.axis, p.value, self.stat_name, p.stderr)?;
        }
        if let Some(fit) = &self.fit {
            writeln!(out, "slope,intercept,ci_low,ci_high")?;
            writeln!(
                out,
                "{},{},{},{}",
                fit.slope, fit.intercept, fit.ci_low, fit.ci_high
            )?;
        }
        Ok(())
    }
}

/// Plain key=value run manifest, re-parseable as a config file.
pub fn write_manifest<W: std::io::Write>(out: &mut W, entries: &[(String, String)]) -> Result<()> {
    writeln!(out, "# hubnet run manifest (version {})", env!("CARGO_PKG_VERSION"))?;
    for (k, v) in entries {
        writeln!(out, "{k} = {v}")?;
    }
    Ok(())
}

/// Build the reduced model ingredients ONCE for a sweep: the Ulam invariant
/// density of the noiseless map and the effective field of the coupling.
fn reduced_model_for(
    map: &MapSpec,
    coupling: &CouplingSpec,
    alpha: f64,
    kappa: f64,
) -> Result<ReducedHubModel> {
    let op = ulam_matrix(&map.with_noise(0.0), ULAM_BINS, ULAM_SAMPLES)?;
    let phi0 = invariant_density(&op, 1e-12, 20_000)?;
    let g = mean_field_g(coupling, &phi0);
    ReducedHubModel::new(map.clone(), g, alpha, kappa)
}

/// Coherence of the two leading hubs as a function of the coupling strength.
/// One network realization is shared by all alpha points.
pub fn sweep_alpha(
    network: &NetworkSpec,
    kind: CouplingKind,
    alphas: &[f64],
    settings: &RunSettings,
) -> Result<SweepResult> {
    if network.ell < 2 {
        return Err(Error::InvalidParameter(
            "coherence sweep needs at least 2 hubs".into(),
        ));
    }
    let seq = network.degree_sequence()?;
    let graph = sample_graph(&seq, derive_seed(settings.master_seed, GRAPH_SEED_OFFSET))?;
    let map = MapSpec::doubling(settings.noise_amp);
    let coupling = CouplingSpec::from_kind(kind);
    let points: Result<Vec<SweepPoint>> = alphas
        .par_iter()
        .enumerate()
        .map(|(idx, &alpha)| {
            let seed = derive_seed(settings.master_seed, idx as u64);
            let config = SimConfig {
                alpha,
                t_burn: settings.t_burn,
                t_record: settings.t_record,
                seed,
                record_nodes: vec![0, 1],
            };
            let traj = simulate(&graph, &seq, &map, &coupling, &config)?;
            let c = coherence(
                traj.node_series(0).unwrap(),
                traj.node_series(1).unwrap(),
            )?;
            Ok(SweepPoint {
                axis: alpha,
                value: c.r,
                stderr: 0.0,
                seed,
            })
        })
        .collect();
    Ok(SweepResult {
        axis_name: "alpha",
        stat_name: "r",
        points: points?,
        fit: None,
        master_seed: settings.master_seed,
    })
}

/// Mean |zeta_1| of the main hub as Delta varies (one fresh graph per Delta),
/// with the fitted log-log slope. The theory predicts -1/2 at gamma = nu = 1.
pub fn scaling_delta(
    network: &NetworkSpec,
    kind: CouplingKind,
    alpha: f64,
    deltas: &[f64],
    settings: &RunSettings,
) -> Result<SweepResult> {
    let map = MapSpec::doubling(settings.noise_amp);
    let coupling = CouplingSpec::from_kind(kind);
    let model = reduced_model_for(&map, &coupling, alpha, network.kappas[0])?;
    let points: Result<Vec<SweepPoint>> = deltas
        .par_iter()
        .enumerate()
        .map(|(idx, &delta)| {
            let seq = network.with_delta(delta).degree_sequence()?;
            let graph = sample_graph(
                &seq,
                derive_seed(settings.master_seed, GRAPH_SEED_OFFSET + idx as u64),
            )?;
            let seed = derive_seed(settings.master_seed, idx as u64);
            let config = SimConfig {
                alpha,
                t_burn: settings.t_burn,
                t_record: settings.t_record,
                seed,
                record_nodes: vec![0],
            };
            let traj = simulate(&graph, &seq, &map, &coupling, &config)?;
            let zeta = extract_zeta(&traj, &model, 0)?;
            Ok(SweepPoint {
                axis: delta,
                value: zeta_mean_abs(&zeta.zeta)?,
                stderr: 0.0,
                seed,
            })
        })
        .collect();
    let points = points?;
    let fit = fit_power_law(
        &points.iter().map(|p| p.axis).collect::<Vec<_>>(),
        &points.iter().map(|p| p.value).collect::<Vec<_>>(),
    )?;
    Ok(SweepResult {
        axis_name: "delta",
        stat_name: "zeta_mean_abs",
        points,
        fit: Some(fit),
        master_seed: settings.master_seed,
    })
}

/// Mean |zeta_2| of the second hub as kappa_2 varies at fixed Delta, with the
/// fitted slope. The theory predicts +1/2.
pub fn scaling_kappa(
    network: &NetworkSpec,
    kind: CouplingKind,
    alpha: f64,
    kappa2_grid: &[f64],
    settings: &RunSettings,
) -> Result<SweepResult> {
    let map = MapSpec::doubling(settings.noise_amp);
    let coupling = CouplingSpec::from_kind(kind);
    // kappa enters the reduced model per point; the field g is shared.
    let base_model = reduced_model_for(&map, &coupling, alpha, 1.0)?;
    let points: Result<Vec<SweepPoint>> = kappa2_grid
        .par_iter()
        .enumerate()
        .map(|(idx, &kappa2)| {
            let seq = network.with_kappa2(kappa2).degree_sequence()?;
            let graph = sample_graph(
                &seq,
                derive_seed(settings.master_seed, GRAPH_SEED_OFFSET + idx as u64),
            )?;
            let seed = derive_seed(settings.master_seed, idx as u64);
            let config = SimConfig {
                alpha,
                t_burn: settings.t_burn,
                t_record: settings.t_record,
                seed,
                record_nodes: vec![1],
            };
            let traj = simulate(&graph, &seq, &map, &coupling, &config)?;
            let model = ReducedHubModel::new(
                map.clone(),
                base_model.g.clone(),
                alpha,
                kappa2,
            )?;
            let zeta = extract_zeta(&traj, &model, 1)?;
            Ok(SweepPoint {
                axis: kappa2,
                value: zeta_mean_abs(&zeta.zeta)?,
                stderr: 0.0,
                seed,
            })
        })
        .collect();
    let points = points?;
    let fit = fit_power_law(
        &points.iter().map(|p| p.axis).collect::<Vec<_>>(),
        &points.iter().map(|p| p.value).collect::<Vec<_>>(),
    )?;
    Ok(SweepResult {
        axis_name: "kappa",
        stat_name: "zeta_mean_abs",
        points,
        fit: Some(fit),
        master_seed: settings.master_seed,
    })
}

/// Per-hub worst-case mean-field error against kappa_i v, with the rate
/// Delta^-eta predicted by the applicable parameter regime.
#[derive(Debug, Clone)]
pub struct HomogeneityResult {
    /// E_i = max_t |Delta^-1 sum_j A_ij psi(x_j(t)) - kappa_i v| per hub.
    pub per_hub_error: Vec<f64>,
    /// v = integral of psi against the invariant density.
    pub v: f64,
    /// Predicted exponent eta per hub.
    pub eta: Vec<f64>,
    /// Delta^-eta per hub.
    pub predicted_rate: Vec<f64>,
    pub regime: &'static str,
}

/// Regime selection for the homogeneity rate. nu is the map's Hoelder
/// exponent; kappa enters only in the theta > 1/2 regime.
fn homogeneity_eta(
    gamma: f64,
    nu: f64,
    theta: f64,
    kappa: f64,
    delta: f64,
) -> (f64, &'static str) {
    let half_gn = 1.0 - gamma * nu / 2.0;
    if theta < half_gn {
        (gamma * nu / 2.0, "i")
    } else if theta < 0.5 {
        (0.5, "ii-a")
    } else {
        (1.0 - theta + 0.5 * kappa.ln() / delta.ln(), "ii-b")
    }
}

/// Run the dynamics and measure how close each hub's neighborhood average of
/// `psi` stays to kappa_i v.
pub fn mean_field_homogeneity(
    network: &NetworkSpec,
    kind: CouplingKind,
    alpha: f64,
    psi: &CircleFn,
    settings: &RunSettings,
) -> Result<HomogeneityResult> {
    let seq = network.degree_sequence()?;
    let graph = sample_graph(&seq, derive_seed(settings.master_seed, GRAPH_SEED_OFFSET))?;
    let map = MapSpec::doubling(settings.noise_amp);
    let coupling = CouplingSpec::from_kind(kind);
    let op = ulam_matrix(&map.with_noise(0.0), ULAM_BINS, ULAM_SAMPLES)?;
    let phi0 = invariant_density(&op, 1e-12, 20_000)?;
    let v = observable_mean(psi, &phi0);
    let config = SimConfig {
        alpha,
        t_burn: settings.t_burn,
        t_record: settings.t_record,
        seed: derive_seed(settings.master_seed, 0),
        record_nodes: vec![],
    };
    let traj = simulate_with_observables(
        &graph,
        &seq,
        &map,
        &coupling,
        &config,
        std::slice::from_ref(psi),
    )?;
    let mut per_hub_error = Vec::with_capacity(seq.ell());
    let mut eta = Vec::with_capacity(seq.ell());
    let mut predicted_rate = Vec::with_capacity(seq.ell());
    let mut regime = "i";
    for h in 0..seq.ell() {
        let target = seq.kappa(h) * v;
        let err = traj.obs[0][h]
            .iter()
            .map(|y| (y - target).abs())
            .fold(0.0, f64::max);
        per_hub_error.push(err);
        let (e, reg) = homogeneity_eta(
            network.gamma,
            map.holder_nu(),
            network.theta,
            seq.kappa(h),
            seq.delta(),
        );
        regime = reg;
        eta.push(e);
        predicted_rate.push(seq.delta().powf(-e));
    }
    Ok(HomogeneityResult {
        per_hub_error,
        v,
        eta,
        predicted_rate,
        regime,
    })
}

/// Empirical moments of observables of low-degree nodes across an ensemble of
/// initial conditions.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleStats {
    /// Empirical mean of psi(x_i(t)).
    pub mean: f64,
    pub mean_stderr: f64,
    /// |mean - v| where v is the invariant-density integral of psi.
    pub mean_error: f64,
    pub v: f64,
    /// Sample covariance of psi(x_i(t)) and sigma(x_j(t)).
    pub covariance: f64,
    pub cov_stderr: f64,
    pub ensemble: usize,
}

/// S independent simulations from i.i.d. uniform initial conditions on one
/// fixed graph; observables are read at time `t_snapshot`.
#[allow(clippy::too_many_arguments)]
pub fn ensemble_stats(
    network: &NetworkSpec,
    kind: CouplingKind,
    alpha: f64,
    psi: &CircleFn,
    sigma_obs: &CircleFn,
    node_i: usize,
    node_j: usize,
    ensemble_size: usize,
    t_snapshot: usize,
    settings: &RunSettings,
) -> Result<EnsembleStats> {
    if ensemble_size < 30 {
        return Err(Error::InvalidParameter(format!(
            "ensemble size {ensemble_size} too small for standard errors (need >= 30)"
        )));
    }
    let seq = network.degree_sequence()?;
    if node_i < seq.ell() || node_j < seq.ell() || node_i >= seq.n() || node_j >= seq.n() {
        return Err(Error::InvalidParameter(
            "ensemble nodes must be low-degree (index >= ell)".into(),
        ));
    }
    let graph = sample_graph(&seq, derive_seed(settings.master_seed, GRAPH_SEED_OFFSET))?;
    let map = MapSpec::doubling(settings.noise_amp);
    let coupling = CouplingSpec::from_kind(kind);
    let op = ulam_matrix(&map.with_noise(0.0), ULAM_BINS, ULAM_SAMPLES)?;
    let phi0 = invariant_density(&op, 1e-12, 20_000)?;
    let v = observable_mean(psi, &phi0);
    let samples: Result<Vec<(f64, f64)>> = (0..ensemble_size)
        .into_par_iter()
        .map(|s| {
            let config = SimConfig {
                alpha,
                t_burn: t_snapshot,
                t_record: 0,
                seed: derive_seed(settings.master_seed, s as u64),
                record_nodes: vec![],
            };
            let traj = simulate(&graph, &seq, &map, &coupling, &config)?;
            Ok((
                psi.eval(traj.final_state[node_i]),
                sigma_obs.eval(traj.final_state[node_j]),
            ))
        })
        .collect();
    let samples = samples?;
    let s = ensemble_size as f64;
    let mean_a = samples.iter().map(|p| p.0).sum::<f64>() / s;
    let mean_b = samples.iter().map(|p| p.1).sum::<f64>() / s;
    let var_a = samples.iter().map(|p| (p.0 - mean_a).powi(2)).sum::<f64>() / (s - 1.0);
    let products: Vec<f64> = samples
        .iter()
        .map(|p| (p.0 - mean_a) * (p.1 - mean_b))
        .collect();
    let covariance = products.iter().sum::<f64>() / (s - 1.0);
    let var_prod =
        products.iter().map(|p| (p - covariance).powi(2)).sum::<f64>() / (s - 1.0);
    Ok(EnsembleStats {
        mean: mean_a,
        mean_stderr: (var_a / s).sqrt(),
        mean_error: (mean_a - v).abs(),
        v,
        covariance,
        cov_stderr: (var_prod / s).sqrt(),
        ensemble: ensemble_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_power_laws() {
        let axis = [64.0f64, 96.0, 128.0, 192.0, 256.0, 384.0, 512.0];
        let values: Vec<f64> = axis.iter().map(|d| d.powf(-0.5)).collect();
        let fit = fit_power_law(&axis, &values).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(!fit.narrow);
        assert!(fit.ci_low <= fit.slope && fit.slope <= fit.ci_high);

        let kappas = [0.1f64, 0.2, 0.35, 0.5, 0.7, 1.0];
        let values: Vec<f64> = kappas.iter().map(|k| 3.0 * k.powf(0.5)).collect();
        let fit = fit_power_law(&kappas, &values).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);

        let flat = [1.0, 1.0, 1.0];
        let fit = fit_power_law(&[1.0, 2.0, 4.0], &flat).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!(fit.narrow); // only 2 octaves
    }

    #[test]
    fn fit_refuses_degenerate_input() {
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, -3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_power_law(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn homogeneity_regime_table() {
        // gamma = nu = 1: theta < 1/2 is regime i with eta = 1/2.
        let (eta, reg) = homogeneity_eta(1.0, 1.0, 0.4, 1.0, 260.0);
        assert_eq!(reg, "i");
        assert!((eta - 0.5).abs() < 1e-15);
        // Smaller gamma nu: 1 - gamma nu / 2 = 0.75; theta = 0.6 < 0.75 -> i.
        let (eta, reg) = homogeneity_eta(0.5, 1.0, 0.6, 1.0, 260.0);
        assert_eq!(reg, "i");
        assert!((eta - 0.25).abs() < 1e-15);
        // theta between 1 - gamma nu/2 and 1/2: gamma nu = 1.8 -> bound 0.1.
        let (eta, reg) = homogeneity_eta(0.9, 1.0, 0.3, 1.0, 260.0);
        // 1 - 0.45 = 0.55 > 0.3 -> still regime i here; use gamma nu large:
        assert_eq!(reg, "i");
        assert!((eta - 0.45).abs() < 1e-15);
        let (eta, reg) = homogeneity_eta(1.0, 1.0, 0.52, 0.5, 100.0);
        assert_eq!(reg, "ii-b");
        let expected = 1.0 - 0.52 + 0.5 * 0.5f64.ln() / 100.0f64.ln();
        assert!((eta - expected).abs() < 1e-15);
    }

    #[test]
    fn network_spec_sequences() {
        let spec = NetworkSpec::two_hub_reference();
        let seq = spec.degree_sequence().unwrap();
        assert_eq!(seq.n(), 20_000);
        assert_eq!(seq.delta(), 260.0);
        assert!((seq.weight(1) - 257.4).abs() < 1e-12);
        let seq2 = spec.with_delta(128.0).degree_sequence().unwrap();
        assert_eq!(seq2.delta(), 128.0);
        let seq3 = spec.with_kappa2(0.5).degree_sequence().unwrap();
        assert!((seq3.weight(1) - 130.0).abs() < 1e-12);
    }

    #[test]
    fn manifest_is_key_value() {
        let mut buf = Vec::new();
        write_manifest(
            &mut buf,
            &[("n".into(), "100".into()), ("alpha".into(), "0.3".into())],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("n = 100\n"));
        assert!(text.contains("alpha = 0.3\n"));
    }
}
