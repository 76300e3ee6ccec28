//! Run configuration: documented defaults, a plain `key = value` config-file
//! format (`#` comments), and flag overrides. The resolved config is echoed
//! verbatim into every run manifest, and a manifest re-parses as a config
//! file, so a run can be reproduced from its manifest alone.

use std::fmt;
use std::path::Path;

use hubnet::dynamics::CouplingKind;

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error at line {line}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Every knob of every subcommand, with the section-4 defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // Network.
    pub n: usize,
    pub gamma: f64,
    pub theta: f64,
    pub ell: usize,
    pub kappa2: f64,
    pub low_degree: f64,
    pub delta: f64,
    // Dynamics.
    pub coupling: CouplingKind,
    pub alpha: f64,
    pub t_burn: usize,
    pub t_record: usize,
    pub noise_amp: f64,
    pub record_nodes: Vec<usize>,
    // Seeding and execution.
    pub seed: u64,
    pub threads: usize,
    // Sweep grids.
    pub alpha_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    // Ensemble statistics.
    pub ensemble_size: usize,
    pub snapshot_time: usize,
    pub node_i: usize,
    pub node_j: usize,
    // Transfer operator.
    pub ulam_bins: usize,
    pub samples_per_bin: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 20_000,
            gamma: 1.0,
            theta: 0.4,
            ell: 2,
            kappa2: 0.99,
            low_degree: 7.0,
            delta: 260.0,
            coupling: CouplingKind::DiffusiveSine,
            alpha: 0.1,
            t_burn: 1000,
            t_record: 1000,
            noise_amp: 1e-5,
            record_nodes: vec![0, 1],
            seed: 1,
            threads: 0,
            alpha_grid: (0..20).map(|i| 0.8 * i as f64 / 19.0).collect(),
            // Delta^2 rho <= 1 caps Delta near sqrt(7 n) ~ 374 at the
            // default n; the default grid stays inside that.
            delta_grid: vec![64.0, 96.0, 128.0, 192.0, 256.0, 370.0],
            kappa_grid: vec![0.1, 0.2, 0.35, 0.5, 0.7, 1.0],
            ensemble_size: 200,
            snapshot_time: 50,
            node_i: 100,
            node_j: 200,
            ulam_bins: 1024,
            samples_per_bin: 64,
        }
    }
}

fn parse_scalar<T: std::str::FromStr>(
    value: &str,
    key: &str,
    kind: &str,
    line: usize,
) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError {
        line: Some(line),
        message: format!("key `{key}` expects {kind}, got `{}`", value.trim()),
    })
}

fn parse_list<T: std::str::FromStr>(
    value: &str,
    key: &str,
    kind: &str,
    line: usize,
) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(|item| parse_scalar(item, key, kind, line))
        .collect()
}

fn parse_coupling(value: &str, line: usize) -> Result<CouplingKind, ConfigError> {
    match value.trim() {
        "diffusive_sine" => Ok(CouplingKind::DiffusiveSine),
        "sine_minus_sine" => Ok(CouplingKind::SineMinusSine),
        other => Err(ConfigError {
            line: Some(line),
            message: format!(
                "key `coupling` expects diffusive_sine or sine_minus_sine, got `{other}`"
            ),
        }),
    }
}

impl RunConfig {
    /// Apply one `key = value` assignment (used for both file lines and
    /// flag overrides; overrides report line 0).
    fn assign(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        match key {
            "n" => self.n = parse_scalar(value, key, "an integer", line)?,
            "gamma" => self.gamma = parse_scalar(value, key, "a float", line)?,
            "theta" => self.theta = parse_scalar(value, key, "a float", line)?,
            "ell" => self.ell = parse_scalar(value, key, "an integer", line)?,
            "kappa2" => self.kappa2 = parse_scalar(value, key, "a float", line)?,
            "low_degree" => self.low_degree = parse_scalar(value, key, "a float", line)?,
            "delta" => self.delta = parse_scalar(value, key, "a float", line)?,
            "coupling" => self.coupling = parse_coupling(value, line)?,
            "alpha" => self.alpha = parse_scalar(value, key, "a float", line)?,
            "t_burn" => self.t_burn = parse_scalar(value, key, "an integer", line)?,
            "t_record" => self.t_record = parse_scalar(value, key, "an integer", line)?,
            "noise_amp" => self.noise_amp = parse_scalar(value, key, "a float", line)?,
            "record_nodes" => {
                self.record_nodes = parse_list(value, key, "an integer", line)?
            }
            "seed" => self.seed = parse_scalar(value, key, "an integer", line)?,
            "threads" => self.threads = parse_scalar(value, key, "an integer", line)?,
            "alpha_grid" => self.alpha_grid = parse_list(value, key, "a float", line)?,
            "delta_grid" => self.delta_grid = parse_list(value, key, "a float", line)?,
            "kappa_grid" => self.kappa_grid = parse_list(value, key, "a float", line)?,
            "ensemble_size" => {
                self.ensemble_size = parse_scalar(value, key, "an integer", line)?
            }
            "snapshot_time" => {
                self.snapshot_time = parse_scalar(value, key, "an integer", line)?
            }
            "node_i" => self.node_i = parse_scalar(value, key, "an integer", line)?,
            "node_j" => self.node_j = parse_scalar(value, key, "an integer", line)?,
            "ulam_bins" => self.ulam_bins = parse_scalar(value, key, "an integer", line)?,
            "samples_per_bin" => {
                self.samples_per_bin = parse_scalar(value, key, "an integer", line)?
            }
            other => {
                return Err(ConfigError {
                    line: Some(line),
                    message: format!("unknown key `{other}`"),
                })
            }
        }
        Ok(())
    }

    /// Parse a config file (one `key = value` per line, `#` comments) on top
    /// of the defaults.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let mut config = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            config.assign(key.trim(), value, line)?;
        }
        Ok(config)
    }

    /// Apply flag-style overrides (`key=value` pairs already split).
    pub fn apply_overrides(&mut self, overrides: &[(String, String)]) -> Result<(), ConfigError> {
        for (key, value) in overrides {
            self.assign(key, value, 0)?;
        }
        Ok(())
    }

    /// The resolved config as manifest entries; re-parseable by `from_file`.
    pub fn manifest_entries(&self) -> Vec<(String, String)> {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let join_usize = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("n".into(), self.n.to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("theta".into(), self.theta.to_string()),
            ("ell".into(), self.ell.to_string()),
            ("kappa2".into(), self.kappa2.to_string()),
            ("low_degree".into(), self.low_degree.to_string()),
            ("delta".into(), self.delta.to_string()),
            (
                "coupling".into(),
                match self.coupling {
                    CouplingKind::DiffusiveSine => "diffusive_sine".into(),
                    CouplingKind::SineMinusSine => "sine_minus_sine".into(),
                },
            ),
            ("alpha".into(), self.alpha.to_string()),
            ("t_burn".into(), self.t_burn.to_string()),
            ("t_record".into(), self.t_record.to_string()),
            ("noise_amp".into(), self.noise_amp.to_string()),
            ("record_nodes".into(), join_usize(&self.record_nodes)),
            ("seed".into(), self.seed.to_string()),
            ("threads".into(), self.threads.to_string()),
            ("alpha_grid".into(), join(&self.alpha_grid)),
            ("delta_grid".into(), join(&self.delta_grid)),
            ("kappa_grid".into(), join(&self.kappa_grid)),
            ("ensemble_size".into(), self.ensemble_size.to_string()),
            ("snapshot_time".into(), self.snapshot_time.to_string()),
            ("node_i".into(), self.node_i.to_string()),
            ("node_j".into(), self.node_j.to_string()),
            ("ulam_bins".into(), self.ulam_bins.to_string()),
            ("samples_per_bin".into(), self.samples_per_bin.to_string()),
        ]
    }

    pub fn network_spec(&self) -> hubnet::experiments::NetworkSpec {
        let mut kappas = vec![1.0];
        if self.ell >= 2 {
            kappas.resize(self.ell, self.kappa2);
        }
        hubnet::experiments::NetworkSpec {
            n: self.n,
            ell: self.ell,
            kappas,
            low_degree: self.low_degree,
            delta: self.delta,
            gamma: self.gamma,
            theta: self.theta,
        }
    }

    pub fn run_settings(&self) -> hubnet::experiments::RunSettings {
        hubnet::experiments::RunSettings {
            t_burn: self.t_burn,
            t_record: self.t_record,
            noise_amp: self.noise_amp,
            master_seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn file_values_and_flag_overrides() {
        let f = write_temp("n = 20000\nalpha = 0.25   # inline comment\n");
        let mut config = RunConfig::from_file(f.path()).unwrap();
        assert_eq!(config.n, 20_000);
        assert_eq!(config.alpha, 0.25);
        config
            .apply_overrides(&[("alpha".into(), "0.3".into())])
            .unwrap();
        assert_eq!(config.alpha, 0.3);
    }

    #[test]
    fn type_mismatch_names_the_line() {
        let f = write_temp("# header\nn = banana\n");
        let err = RunConfig::from_file(f.path()).unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("banana"));
    }

    #[test]
    fn unknown_key_rejected() {
        let f = write_temp("bananas = 12\n");
        let err = RunConfig::from_file(f.path()).unwrap_err();
        assert_eq!(err.line, Some(1));
        assert!(err.message.contains("unknown key"));
    }

    #[test]
    fn empty_file_gives_reference_defaults() {
        let f = write_temp("");
        let config = RunConfig::from_file(f.path()).unwrap();
        assert_eq!(config.n, 20_000);
        assert_eq!(config.t_burn, 1000);
        assert_eq!(config.t_record, 1000);
        assert_eq!(config.alpha_grid.len(), 20);
        assert_eq!(config, RunConfig::default());
    }

    #[test]
    fn manifest_round_trips() {
        let config = RunConfig {
            alpha: 0.37,
            coupling: CouplingKind::SineMinusSine,
            delta_grid: vec![32.0, 64.0],
            ..RunConfig::default()
        };
        let mut text = String::new();
        for (k, v) in config.manifest_entries() {
            text.push_str(&format!("{k} = {v}\n"));
        }
        let f = write_temp(&text);
        let reparsed = RunConfig::from_file(f.path()).unwrap();
        assert_eq!(reparsed, config);
    }

    #[test]
    fn grid_lists_parse() {
        let f = write_temp("alpha_grid = 0.1, 0.2, 0.3\nrecord_nodes = 0,1,5\n");
        let config = RunConfig::from_file(f.path()).unwrap();
        assert_eq!(config.alpha_grid, vec![0.1, 0.2, 0.3]);
        assert_eq!(config.record_nodes, vec![0, 1, 5]);
    }
}
