//! `hubnet` command line: binds a plain key=value config to the graph /
//! dynamics / measure / reduction / experiments pipeline with reproducible
//! outputs. Every run writes a manifest that re-parses as a config file, so
//! `hubnet <cmd> --config <out>/manifest.txt --out other_dir` reproduces the
//! artifacts byte for byte.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use hubnet::circle::CircleFn;
use hubnet::dynamics::{
    simulate, write_aggregates_csv, write_trajectory_csv, CouplingSpec, MapSpec, SimConfig,
};
use hubnet::experiments::{
    ensemble_stats, mean_field_homogeneity, scaling_delta, scaling_kappa, sweep_alpha,
    write_manifest, SweepResult,
};
use hubnet::graph::{
    degree_stats, sample_graph, validate_heterogeneity, write_degree_csv, write_graph_text,
    ValidationConstants,
};
use hubnet::measure::{
    invariant_density, mean_field_g, ulam_matrix, write_density_csv, write_operator_csv,
};
use hubnet::reduction::{
    coherence, extract_zeta, fixed_points_stability, write_stability_csv, write_zeta_csv,
    ReducedHubModel,
};
use hubnet::rng::derive_seed;

const CONFIG_HELP: &str = "Config file format: one `key = value` per line, `#` comments.\n\
Keys (defaults in parentheses): n (20000), gamma (1), theta (0.4), ell (2),\n\
kappa2 (0.99), low_degree (7), delta (260), coupling (diffusive_sine |\n\
sine_minus_sine), alpha (0.1), t_burn (1000), t_record (1000),\n\
noise_amp (1e-5), record_nodes (0,1), seed (1), threads (0),\n\
alpha_grid (20 points on [0,0.8]), delta_grid (64..370),\n\
kappa_grid (0.1..1.0), ensemble_size (200), snapshot_time (50),\n\
node_i (100), node_j (200), ulam_bins (1024), samples_per_bin (64).\n\
Seed precedence: --seed flag > HUBNET_SEED env > config file > default.";

#[derive(Parser)]
#[command(name = "hubnet", version, about = "Coupled circle maps on heterogeneous random networks", after_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file with key = value lines (see --help for the schema).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for manifest and CSV artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Cap the worker-thread count (results never depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Master seed; overrides HUBNET_SEED and the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Coupling strength override.
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Node count override.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Largest expected degree override.
    #[arg(long, global = true)]
    delta: Option<f64>,

    /// Coupling kind override (diffusive_sine | sine_minus_sine).
    #[arg(long, global = true)]
    coupling: Option<String>,

    /// Generic override, repeatable: --set key=value.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a directed heterogeneous graph; writes graph.txt, degrees.csv,
    /// validation.txt (keys: n, gamma, theta, ell, kappa2, low_degree,
    /// delta, seed).
    GenerateGraph,
    /// Run the coupled dynamics; writes trajectory.csv and aggregates.csv
    /// (keys: network keys + coupling, alpha, t_burn, t_record, noise_amp,
    /// record_nodes, seed).
    Simulate,
    /// Hub coherence r over alpha_grid; writes sweep_alpha.csv (keys:
    /// network keys + coupling, alpha_grid, t_burn, t_record, seed).
    SweepAlpha,
    /// Mean |zeta_1| over delta_grid with a log-log fit; writes
    /// scaling_delta.csv (keys: network keys + alpha, delta_grid, seed).
    ScalingDelta,
    /// Mean |zeta_2| over kappa_grid at fixed delta with a fit; writes
    /// scaling_kappa.csv (keys: network keys + alpha, kappa_grid, seed).
    ScalingKappa,
    /// Per-hub mean-field error and predicted rate for psi = sin 2 pi x;
    /// writes homogeneity.csv (keys: network keys + coupling, alpha,
    /// t_burn, t_record, seed).
    Homogeneity,
    /// Ensemble mean/covariance of sin 2 pi x at a snapshot time; writes
    /// ensemble.csv (keys: network keys + alpha, ensemble_size,
    /// snapshot_time, node_i, node_j, seed).
    Ensemble,
    /// Ulam matrix and invariant density of the doubling map; writes
    /// density.csv and operator.csv (keys: ulam_bins, samples_per_bin).
    Ulam,
    /// Full run + hub reduction: per-hub zeta series, stability table and
    /// hub coherence (keys: network keys + coupling, alpha, t_burn,
    /// t_record, ulam_bins, samples_per_bin, seed).
    Reduce,
}

/// Files written so far; on failure they are renamed with a `.failed`
/// suffix so partial runs are never mistaken for complete ones.
struct OutputTracker {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputTracker {
    fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    fn mark_failed(&self) {
        for path in &self.written {
            let mut failed = path.clone().into_os_string();
            failed.push(".failed");
            let _ = std::fs::rename(path, failed);
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, config::ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Ok(env_seed) = std::env::var("HUBNET_SEED") {
        cfg.seed = env_seed.trim().parse().map_err(|_| config::ConfigError {
            line: None,
            message: format!("HUBNET_SEED must be an integer, got `{env_seed}`"),
        })?;
    }
    let mut overrides: Vec<(String, String)> = Vec::new();
    if let Some(v) = cli.seed {
        overrides.push(("seed".into(), v.to_string()));
    }
    if let Some(v) = cli.alpha {
        overrides.push(("alpha".into(), v.to_string()));
    }
    if let Some(v) = cli.n {
        overrides.push(("n".into(), v.to_string()));
    }
    if let Some(v) = cli.delta {
        overrides.push(("delta".into(), v.to_string()));
    }
    if let Some(v) = &cli.coupling {
        overrides.push(("coupling".into(), v.clone()));
    }
    if let Some(v) = cli.threads {
        overrides.push(("threads".into(), v.to_string()));
    }
    for pair in &cli.set {
        let Some((k, v)) = pair.split_once('=') else {
            return Err(config::ConfigError {
                line: None,
                message: format!("--set expects key=value, got `{pair}`"),
            });
        };
        overrides.push((k.trim().into(), v.trim().into()));
    }
    cfg.apply_overrides(&overrides)?;
    Ok(cfg)
}

fn sweep_csv(sweep: &SweepResult) -> hubnet::Result<Vec<u8>> {
    let mut buf = Vec::new();
    sweep.write_csv(&mut buf)?;
    Ok(buf)
}

/// Seed offset reserved for graph construction, matching the experiments
/// module's policy.
const GRAPH_SEED_OFFSET: u64 = 1_000_000;

fn run_command(cmd: &Command, cfg: &RunConfig, out: &mut OutputTracker) -> hubnet::Result<String> {
    match cmd {
        Command::GenerateGraph => {
            let spec = cfg.network_spec();
            let seq = spec.degree_sequence()?;
            let graph = sample_graph(&seq, derive_seed(cfg.seed, GRAPH_SEED_OFFSET))?;
            let mut buf = Vec::new();
            write_graph_text(&mut buf, &graph, &seq)?;
            out.write("graph.txt", &buf)?;
            let stats = degree_stats(&graph, &seq)?;
            let mut buf = Vec::new();
            write_degree_csv(&mut buf, &stats)?;
            out.write("degrees.csv", &buf)?;
            let report = validate_heterogeneity(
                &seq,
                &spec.heterogeneity_params(),
                &ValidationConstants::uniform(2.0),
            );
            let mut text = String::new();
            for c in &report.checks {
                text.push_str(&format!(
                    "{}: {} ({})\n",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    c.detail
                ));
            }
            out.write("validation.txt", text.as_bytes())?;
            Ok(format!(
                "edges={} hub_in_degree={} checks_passed={}",
                graph.edge_count(),
                graph.in_degree(0),
                report.all_passed()
            ))
        }
        Command::Simulate => {
            let spec = cfg.network_spec();
            let seq = spec.degree_sequence()?;
            let graph = sample_graph(&seq, derive_seed(cfg.seed, GRAPH_SEED_OFFSET))?;
            let map = MapSpec::doubling(cfg.noise_amp);
            let coupling = CouplingSpec::from_kind(cfg.coupling);
            let sim = SimConfig {
                alpha: cfg.alpha,
                t_burn: cfg.t_burn,
                t_record: cfg.t_record,
                seed: derive_seed(cfg.seed, 0),
                record_nodes: cfg.record_nodes.clone(),
            };
            let traj = simulate(&graph, &seq, &map, &coupling, &sim)?;
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &traj)?;
            out.write("trajectory.csv", &buf)?;
            let mut buf = Vec::new();
            write_aggregates_csv(&mut buf, &traj)?;
            out.write("aggregates.csv", &buf)?;
            Ok(format!(
                "recorded_steps={} recorded_nodes={} edges={}",
                traj.t_record,
                traj.record_nodes.len(),
                graph.edge_count()
            ))
        }
        Command::SweepAlpha => {
            let sweep = sweep_alpha(
                &cfg.network_spec(),
                cfg.coupling,
                &cfg.alpha_grid,
                &cfg.run_settings(),
            )?;
            out.write("sweep_alpha.csv", &sweep_csv(&sweep)?)?;
            Ok(format!("max_r={}", sweep.max_value()))
        }
        Command::ScalingDelta => {
            let sweep = scaling_delta(
                &cfg.network_spec(),
                cfg.coupling,
                cfg.alpha,
                &cfg.delta_grid,
                &cfg.run_settings(),
            )?;
            out.write("scaling_delta.csv", &sweep_csv(&sweep)?)?;
            let fit = sweep.fit.unwrap();
            Ok(format!(
                "slope={} ci=[{},{}]",
                fit.slope, fit.ci_low, fit.ci_high
            ))
        }
        Command::ScalingKappa => {
            let sweep = scaling_kappa(
                &cfg.network_spec(),
                cfg.coupling,
                cfg.alpha,
                &cfg.kappa_grid,
                &cfg.run_settings(),
            )?;
            out.write("scaling_kappa.csv", &sweep_csv(&sweep)?)?;
            let fit = sweep.fit.unwrap();
            Ok(format!(
                "slope={} ci=[{},{}]",
                fit.slope, fit.ci_low, fit.ci_high
            ))
        }
        Command::Homogeneity => {
            let res = mean_field_homogeneity(
                &cfg.network_spec(),
                cfg.coupling,
                cfg.alpha,
                &CircleFn::Sin(1.0),
                &cfg.run_settings(),
            )?;
            let mut text = String::from("hub,error,eta,predicted_rate\n");
            for h in 0..res.per_hub_error.len() {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    h, res.per_hub_error[h], res.eta[h], res.predicted_rate[h]
                ));
            }
            out.write("homogeneity.csv", text.as_bytes())?;
            Ok(format!(
                "E1={} regime={} rate={}",
                res.per_hub_error[0], res.regime, res.predicted_rate[0]
            ))
        }
        Command::Ensemble => {
            let psi = CircleFn::Sin(1.0);
            let stats = ensemble_stats(
                &cfg.network_spec(),
                cfg.coupling,
                cfg.alpha,
                &psi,
                &psi,
                cfg.node_i,
                cfg.node_j,
                cfg.ensemble_size,
                cfg.snapshot_time,
                &cfg.run_settings(),
            )?;
            let text = format!(
                "mean,mean_stderr,v,covariance,cov_stderr,ensemble\n{},{},{},{},{},{}\n",
                stats.mean,
                stats.mean_stderr,
                stats.v,
                stats.covariance,
                stats.cov_stderr,
                stats.ensemble
            );
            out.write("ensemble.csv", text.as_bytes())?;
            Ok(format!("mean={} cov={}", stats.mean, stats.covariance))
        }
        Command::Ulam => {
            let op = ulam_matrix(&MapSpec::doubling(0.0), cfg.ulam_bins, cfg.samples_per_bin)?;
            let phi0 = invariant_density(&op, 1e-12, 20_000)?;
            let mut buf = Vec::new();
            write_density_csv(&mut buf, &phi0)?;
            out.write("density.csv", &buf)?;
            let mut buf = Vec::new();
            write_operator_csv(&mut buf, &op)?;
            out.write("operator.csv", &buf)?;
            let dev = phi0
                .values()
                .iter()
                .map(|v| (v - 1.0).abs())
                .fold(0.0, f64::max);
            Ok(format!("sup_dev_from_uniform={dev:e}"))
        }
        Command::Reduce => {
            let spec = cfg.network_spec();
            let seq = spec.degree_sequence()?;
            let graph = sample_graph(&seq, derive_seed(cfg.seed, GRAPH_SEED_OFFSET))?;
            let map = MapSpec::doubling(cfg.noise_amp);
            let coupling = CouplingSpec::from_kind(cfg.coupling);
            let mut record: Vec<usize> = (0..seq.ell()).collect();
            record.extend(cfg.record_nodes.iter().copied());
            record.sort_unstable();
            record.dedup();
            let sim = SimConfig {
                alpha: cfg.alpha,
                t_burn: cfg.t_burn,
                t_record: cfg.t_record,
                seed: derive_seed(cfg.seed, 0),
                record_nodes: record,
            };
            let traj = simulate(&graph, &seq, &map, &coupling, &sim)?;

            let op = ulam_matrix(&MapSpec::doubling(0.0), cfg.ulam_bins, cfg.samples_per_bin)?;
            let phi0 = invariant_density(&op, 1e-12, 20_000)?;
            let g = mean_field_g(&coupling, &phi0);

            let mut zeta1_mean = f64::NAN;
            for hub in 0..seq.ell() {
                let model =
                    ReducedHubModel::new(map.clone(), g.clone(), cfg.alpha, seq.kappa(hub))?;
                let series = extract_zeta(&traj, &model, hub)?;
                if hub == 0 {
                    zeta1_mean = hubnet::reduction::zeta_mean_abs(&series.zeta)?;
                }
                let mut buf = Vec::new();
                write_zeta_csv(&mut buf, &series)?;
                out.write(&format!("zeta_hub{hub}.csv"), &buf)?;
            }

            let model = ReducedHubModel::new(map.clone(), g.clone(), cfg.alpha, 1.0)?;
            let fps = fixed_points_stability(&model);
            let mut buf = Vec::new();
            write_stability_csv(&mut buf, &fps)?;
            out.write("stability.csv", &buf)?;

            let mut summary = format!("zeta1_mean_abs={zeta1_mean}");
            if seq.ell() >= 2 {
                let c = coherence(
                    traj.node_series(0).unwrap(),
                    traj.node_series(1).unwrap(),
                )?;
                let text = format!("alpha,r,psi\n{},{},{}\n", cfg.alpha, c.r, c.psi);
                out.write("coherence.csv", text.as_bytes())?;
                summary.push_str(&format!(" r={}", c.r));
            }
            Ok(summary)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("hubnet: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.threads > 0 {
        // Worker cap only; all algorithms are deterministic per seed.
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
        {
            eprintln!("hubnet: cannot configure {} threads: {e}", cfg.threads);
            return ExitCode::from(2);
        }
    }
    let mut out = match OutputTracker::new(&cli.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("hubnet: cannot create {}: {e}", cli.out.display());
            return ExitCode::from(1);
        }
    };
    match run_command(&cli.command, &cfg, &mut out) {
        Ok(summary) => {
            let mut buf = Vec::new();
            if let Err(e) = write_manifest(&mut buf, &cfg.manifest_entries())
                .and_then(|()| out.write("manifest.txt", &buf).map_err(Into::into))
            {
                eprintln!("hubnet: failed to write manifest: {e}");
                out.mark_failed();
                return ExitCode::from(1);
            }
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hubnet: {e}");
            out.mark_failed();
            ExitCode::from(1)
        }
    }
}
