//! Coverage cost, sweeps over team composition, and output files.

mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::density::{second_moment_over_polygon, DensityError, DensityField, QuadratureGrid};
use crate::geometry::{Point2, VoronoiDiagram};
use crate::parallel::Execution;
use crate::sim::{run_ensemble, SimTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("positions do not match the diagram sites")]
    DiagramPositionMismatch,
    #[error("sweep configs must share domain and density (row {0} differs)")]
    MismatchedSweep(usize),
    #[error("cannot write {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Density(#[from] DensityError),
}

fn io_error(path: &Path, err: std::io::Error) -> MetricsError {
    MetricsError::Io {
        path: path.to_path_buf(),
        message: err.to_string(),
    }
}

/// Per-cell terms of `H(p) = Σ_i ∫_{V_i} ‖q − p_i‖² φ(q) dq`.
pub fn per_cell_cost(
    diagram: &VoronoiDiagram,
    positions: &[Point2],
    field: &DensityField,
    grid: &QuadratureGrid,
) -> Result<Vec<f64>, MetricsError> {
    if positions.len() != diagram.len()
        || positions
            .iter()
            .zip(diagram.sites())
            .any(|(p, s)| p.distance(*s) > 1e-12)
    {
        return Err(MetricsError::DiagramPositionMismatch);
    }
    diagram
        .cells()
        .iter()
        .zip(positions)
        .map(|(cell, &p)| Ok(second_moment_over_polygon(field, cell, p, grid)?))
        .collect()
}

/// Coverage cost `H` of a configuration.
pub fn coverage_cost(
    diagram: &VoronoiDiagram,
    positions: &[Point2],
    field: &DensityField,
    grid: &QuadratureGrid,
) -> Result<f64, MetricsError> {
    Ok(per_cell_cost(diagram, positions, field, grid)?.iter().sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostNormalization {
    Raw,
    DividedByInitial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostSeries {
    pub values: Vec<f64>,
    pub mode: CostNormalization,
}

impl CostSeries {
    pub fn from_trace(trace: &SimTrace, mode: CostNormalization) -> Self {
        let raw = trace.costs();
        let values = match mode {
            CostNormalization::Raw => raw,
            CostNormalization::DividedByInitial => {
                let first = raw.first().copied().unwrap_or(1.0);
                raw.iter().map(|c| c / first).collect()
            }
        };
        Self { values, mode }
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k_aerial: usize,
    pub n_ground: usize,
    pub ratio: f64,
    pub final_cost: Option<f64>,
    /// Final cost divided by the run's initial cost.
    pub normalized_cost: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub error: Option<String>,
}

/// Runs every config and reports its steady-state cost. A failed run yields
/// a row with `error` set instead of aborting the sweep.
pub fn final_cost_sweep(
    configs: &[ScenarioConfig],
    execution: Execution,
) -> Result<Vec<SweepRow>, MetricsError> {
    if let Some(first) = configs.first() {
        for (i, c) in configs.iter().enumerate() {
            if c.domain != first.domain || c.density != first.density {
                return Err(MetricsError::MismatchedSweep(i));
            }
        }
    }
    let traces = run_ensemble(configs, execution);
    Ok(configs
        .iter()
        .zip(traces)
        .map(|(c, result)| {
            let ratio = c.k_aerial as f64 / c.n_ground as f64;
            match result {
                Ok(trace) => {
                    let series =
                        CostSeries::from_trace(&trace, CostNormalization::DividedByInitial);
                    SweepRow {
                        k_aerial: c.k_aerial,
                        n_ground: c.n_ground,
                        ratio,
                        final_cost: Some(trace.summary.final_cost),
                        normalized_cost: series.last(),
                        iterations: trace.summary.iterations,
                        converged: trace.summary.converged,
                        error: None,
                    }
                }
                Err(e) => SweepRow {
                    k_aerial: c.k_aerial,
                    n_ground: c.n_ground,
                    ratio,
                    final_cost: None,
                    normalized_cost: None,
                    iterations: 0,
                    converged: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

/// Nine significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.8e}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
}

pub fn cost_csv(trace: &SimTrace) -> String {
    let mut out = String::from("iteration,cost,sigma_min,min_cell_index\n");
    for r in &trace.records {
        let sigma = r.sigma_min.map(fmt_float).unwrap_or_default();
        let cell = r.min_cell.map(|j| j.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iteration,
            fmt_float(r.cost),
            sigma,
            cell
        );
    }
    out
}

pub fn positions_csv(trace: &SimTrace) -> String {
    let mut out = String::from("iteration,robot_id,x,y\n");
    for r in &trace.records {
        for (i, p) in r.positions.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.iteration,
                i,
                fmt_float(p.x),
                fmt_float(p.y)
            );
        }
    }
    out
}

pub fn weights_csv(trace: &SimTrace) -> String {
    let mut out = String::from("iteration,cell_index,n_j,phi_j,sigma_j,sigma_hat_j\n");
    for r in &trace.records {
        for (j, c) in r.cells.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.iteration,
                j,
                c.robot_count,
                fmt_float(c.mass_fraction),
                fmt_float(c.weight),
                fmt_float(c.clamped_weight)
            );
        }
    }
    out
}

pub fn summary_txt(trace: &SimTrace, config_hash: Option<&str>) -> String {
    let s = &trace.summary;
    let mut out = String::new();
    let _ = writeln!(out, "controller={}", trace.controller.as_str());
    let _ = writeln!(out, "final_cost={}", fmt_float(s.final_cost));
    let _ = writeln!(out, "iterations={}", s.iterations);
    let _ = writeln!(out, "converged={}", s.converged);
    let _ = writeln!(out, "final_residual={}", fmt_float(s.final_residual));
    let _ = writeln!(out, "aerial_iterations={}", s.aerial_iterations);
    let _ = writeln!(out, "aerial_converged={}", s.aerial_converged);
    let _ = writeln!(out, "seed={}", trace.seed);
    let _ = writeln!(out, "rng={}", trace.rng_algorithm);
    let _ = writeln!(out, "config_hash={}", config_hash.unwrap_or("none"));
    out
}

/// Writes the full output set for one run into `out_dir`.
///
/// When `config` is given it is echoed as `config.toml` and its hash goes
/// into `summary.txt`. The returned manifest is also written to `manifest.txt`.
pub fn emit_outputs(
    trace: &SimTrace,
    cost: &CostSeries,
    out_dir: &Path,
    config: Option<&ScenarioConfig>,
) -> Result<Vec<ManifestEntry>, MetricsError> {
    fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    let hash = config.map(ScenarioConfig::config_hash);
    let mut files: Vec<(&str, String)> = Vec::new();
    if let Some(c) = config {
        files.push(("config.toml", c.to_toml_string()));
    }
    files.push(("cost.csv", cost_csv(trace)));
    files.push(("positions.csv", positions_csv(trace)));
    files.push(("weights.csv", weights_csv(trace)));
    files.push(("summary.txt", summary_txt(trace, hash.as_deref())));
    files.push(("trajectories.svg", svg::trajectories(trace)));
    files.push(("cost.svg", svg::cost_plot(cost)));

    let mut manifest = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body.as_bytes()).map_err(|e| io_error(&path, e))?;
        manifest.push(ManifestEntry {
            file: name.to_string(),
            bytes: body.len() as u64,
        });
    }
    let listing: String = manifest
        .iter()
        .map(|m| format!("{} {}\n", m.file, m.bytes))
        .collect();
    let path = out_dir.join("manifest.txt");
    fs::write(&path, listing).map_err(|e| io_error(&path, e))?;
    Ok(manifest)
}
