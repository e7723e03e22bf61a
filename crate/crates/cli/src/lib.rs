//! Subcommands behind the `hetcov` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use hetcov::config::{ConfigError, ControllerKind, ScenarioConfig};
use hetcov::metrics::{
    emit_outputs, final_cost_sweep, fmt_float, CostNormalization, CostSeries, MetricsError,
};
use hetcov::parallel::Execution;
use hetcov::sim::{run, run_ensemble, SimError};

/// Config path that selects the bundled three-team scenario.
pub const BUILTIN_DEFAULT: &str = "builtin:default";

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    UnrealizableRatio { ratio: String, n_ground: usize },
    BadRatio(String),
    Io { path: PathBuf, message: String },
    Sim(SimError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::UnrealizableRatio { ratio, n_ground } => write!(
                f,
                "ratio {ratio} does not give a whole number of aerial robots with n_ground = {n_ground}"
            ),
            CliError::BadRatio(r) => write!(f, "cannot parse ratio `{r}`; expected a/b"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Sim(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Sim(SimError::Metrics(MetricsError::Io { .. })) => {
                EXIT_IO
            }
            _ => EXIT_CONFIG,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(c) => CliError::Config(c),
            other => CliError::Sim(other),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Io { path, message } => CliError::Io { path, message },
            other => CliError::Sim(SimError::Metrics(other)),
        }
    }
}

/// What a finished command reports back to `main`.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub converged: bool,
    pub lines: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        if self.converged {
            EXIT_OK
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads and validates a config, applying the seed override.
pub fn load_config(path: &str, seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let config = if path == BUILTIN_DEFAULT {
        ScenarioConfig::bundled_default()
    } else {
        let text = fs::read_to_string(path).map_err(|e| io_error(Path::new(path), e))?;
        ScenarioConfig::from_toml_str(&text).map_err(CliError::Config)?
    };
    Ok(match seed {
        Some(s) => config.with_seed(s),
        None => config,
    })
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    fs::write(path, body).map_err(|e| io_error(path, e))
}

pub fn cmd_run(config_path: &str, out_dir: &Path, seed: Option<u64>) -> Result<Report, CliError> {
    let config = load_config(config_path, seed)?;
    let trace = run(&config)?;
    let cost = CostSeries::from_trace(&trace, CostNormalization::Raw);
    emit_outputs(&trace, &cost, out_dir, Some(&config))?;
    let s = &trace.summary;
    Ok(Report {
        converged: s.converged,
        lines: vec![format!(
            "{}: final cost {} after {} iterations{}",
            config.controller.as_str(),
            fmt_float(s.final_cost),
            s.iterations,
            if s.converged { "" } else { " (not converged)" }
        )],
    })
}

/// Runs the three controllers from the same start.
pub fn cmd_compare(
    config_path: &str,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<Report, CliError> {
    let config = load_config(config_path, seed)?;
    let configs: Vec<ScenarioConfig> = ControllerKind::ALL
        .iter()
        .map(|&k| config.with_controller(k))
        .collect();
    let traces = run_ensemble(&configs, Execution::Parallel);
    let mut table = String::from("scenario,final_cost,iterations,converged\n");
    let mut lines = Vec::new();
    let mut converged = true;
    for (c, trace) in configs.iter().zip(traces) {
        let trace = trace?;
        let cost = CostSeries::from_trace(&trace, CostNormalization::Raw);
        emit_outputs(&trace, &cost, &out_dir.join(c.controller.as_str()), Some(c))?;
        let s = &trace.summary;
        converged &= s.converged;
        let _ = writeln!(
            table,
            "{},{},{},{}",
            c.controller.as_str(),
            fmt_float(s.final_cost),
            s.iterations,
            s.converged
        );
        lines.push(format!(
            "{:<16} {} ({} iterations)",
            c.controller.as_str(),
            fmt_float(s.final_cost),
            s.iterations
        ));
    }
    write_file(&out_dir.join("comparison.csv"), &table)?;
    Ok(Report { converged, lines })
}

/// Number of aerial robots for `ratio` (written `a/b`) with `n_ground` ground robots.
pub fn aerial_count(ratio: &str, n_ground: usize) -> Result<usize, CliError> {
    let bad = || CliError::BadRatio(ratio.to_string());
    let (a, b) = ratio.split_once('/').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if b == 0 {
        return Err(bad());
    }
    let scaled = a * n_ground;
    if !scaled.is_multiple_of(b) || scaled == 0 {
        return Err(CliError::UnrealizableRatio {
            ratio: ratio.to_string(),
            n_ground,
        });
    }
    Ok(scaled / b)
}

/// Final cost across aerial/ground ratios, one heterogeneous run per ratio.
pub fn cmd_sweep(
    config_path: &str,
    ratios: &[String],
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<Report, CliError> {
    let base = load_config(config_path, seed)?.with_controller(ControllerKind::Heterogeneous);
    let configs = ratios
        .iter()
        .map(|r| {
            let k = aerial_count(r, base.n_ground)?;
            let mut c = base.clone();
            c.k_aerial = k;
            if c.initial.aerial.as_ref().is_some_and(|a| a.len() != k) {
                c.initial.aerial = None;
            }
            c.validate().map_err(CliError::Config)?;
            Ok(c)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = final_cost_sweep(&configs, Execution::Parallel)?;
    let mut table = String::from(
        "ratio,k_aerial,n_ground,final_cost,normalized_cost,iterations,converged,error\n",
    );
    let mut lines = Vec::new();
    let mut converged = true;
    for (r, row) in ratios.iter().zip(&rows) {
        converged &= row.converged;
        let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
        let error = row.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            r.trim(),
            row.k_aerial,
            row.n_ground,
            opt(row.final_cost),
            opt(row.normalized_cost),
            row.iterations,
            row.converged,
            error
        );
        lines.push(format!(
            "K/N = {}/{}: normalized cost {}",
            row.k_aerial,
            row.n_ground,
            row.normalized_cost
                .map(fmt_float)
                .unwrap_or_else(|| format!("failed: {error}"))
        ));
    }
    write_file(&out_dir.join("config.toml"), &base.to_toml_string())?;
    write_file(&out_dir.join("sweep.csv"), &table)?;
    Ok(Report { converged, lines })
}
