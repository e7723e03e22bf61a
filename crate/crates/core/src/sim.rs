//! Deterministic discrete-time simulation.
//!
//! A run first settles the aerial team into a uniform-density centroidal
//! Voronoi configuration, freezes that partition, then advances the ground
//! team with forward-Euler steps of the configured control law until the
//! commanded motion dies out or the iteration budget runs out.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, ControllerKind, GroundInit, ScenarioConfig};
use crate::controllers::{
    compute_cell_reports, hetero_control, local_control, AerialCellReport, CMinMode, ControlError,
    ControlGains, RobotState, SensingRange,
};
use crate::density::{normalize, weighted_centroid, DensityError, DensityField, QuadratureGrid};
use crate::geometry::{voronoi_tessellate, ConvexPolygon, GeometryError, Point2, VoronoiDiagram};
use crate::metrics::{coverage_cost, MetricsError};
use crate::parallel::Execution;

/// Consecutive calm iterations required to declare convergence.
pub const CALM_ITERATIONS: usize = 10;
/// Resolution of the density preview stored for plotting.
const PREVIEW_CELLS: (usize, usize) = (96, 60);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Seeded random stream; the generator is fixed so traces replay exactly.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub const ALGORITHM: &'static str = "ChaCha8Rng";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn point_in_box(&mut self, min: Point2, max: Point2) -> Point2 {
        Point2::new(self.uniform(min.x, max.x), self.uniform(min.y, max.y))
    }
}

/// A validated config with its normalized density and quadrature grid.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub domain: ConvexPolygon,
    pub field: DensityField,
    pub grid: QuadratureGrid,
    pub gains: ControlGains,
    pub deadband: f64,
    pub sensing: SensingRange,
    pub c_min_mode: CMinMode,
    pub execution: Execution,
}

impl Scenario {
    pub fn new(config: &ScenarioConfig) -> Result<Self, SimError> {
        config.validate()?;
        let domain = config.domain_polygon();
        let raw = config.density_field()?;
        let grid = QuadratureGrid::new(&raw, config.grid.nx, config.grid.ny)?;
        let field = normalize(&raw, &grid)?;
        Ok(Self {
            config: config.clone(),
            domain,
            field,
            grid,
            gains: config.gains(),
            deadband: config.deadband_value(),
            sensing: config.ground_sensing(),
            c_min_mode: config.c_min_mode(),
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Settled aerial partition.
#[derive(Clone, Debug, PartialEq)]
pub struct AerialPhase {
    pub positions: Vec<Point2>,
    pub diagram: VoronoiDiagram,
    pub iterations: usize,
    pub converged: bool,
    /// Largest site-to-center distance at the end.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub iteration: usize,
    pub ground: Vec<RobotState>,
    pub aerial: Vec<RobotState>,
    pub aerial_diagram: Option<VoronoiDiagram>,
    pub ground_diagram: VoronoiDiagram,
    pub reports: Vec<AerialCellReport>,
    /// Largest `‖u_i‖ / κ` of the controls that produced this state.
    pub last_residual: f64,
}

impl SimState {
    pub fn positions(&self) -> Vec<Point2> {
        self.ground.iter().map(|r| r.position).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSnapshot {
    pub robot_count: usize,
    pub mass_fraction: f64,
    pub weight: f64,
    pub clamped_weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub positions: Vec<Point2>,
    pub cost: f64,
    pub cells: Vec<CellSnapshot>,
    pub sigma_min: Option<f64>,
    pub min_cell: Option<usize>,
}

impl TraceRecord {
    pub fn all_clamped_zero(&self) -> bool {
        self.cells.iter().all(|c| c.clamped_weight == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSummary {
    pub iterations: usize,
    pub final_cost: f64,
    pub converged: bool,
    pub final_residual: f64,
    pub aerial_iterations: usize,
    pub aerial_converged: bool,
}

/// Density samples on a coarse grid, for plotting.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityPreview {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub controller: ControllerKind,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub domain: ConvexPolygon,
    pub aerial_sites: Vec<Point2>,
    pub aerial_diagram: Option<VoronoiDiagram>,
    pub records: Vec<TraceRecord>,
    pub summary: TraceSummary,
    pub preview: DensityPreview,
}

impl SimTrace {
    pub fn costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cost).collect()
    }

    pub fn final_positions(&self) -> &[Point2] {
        &self
            .records
            .last()
            .expect("trace has an initial record")
            .positions
    }
}

/// Initial ground positions. Draws from `rng` only for random modes.
pub fn initial_ground_positions(
    config: &ScenarioConfig,
    domain: &ConvexPolygon,
    rng: &mut RngStream,
) -> Vec<Point2> {
    let bb = domain.bounding_box();
    match &config.initial.ground {
        GroundInit::Explicit { positions } => {
            positions.iter().map(|p| Point2::new(p[0], p[1])).collect()
        }
        GroundInit::Uniform => (0..config.n_ground)
            .map(|_| loop {
                let p = rng.point_in_box(bb.min, bb.max);
                if domain.contains(p, 0.0) {
                    break p;
                }
            })
            .collect(),
        GroundInit::Disc { center, radius } => {
            let c = Point2::new(center[0], center[1]);
            let r = Point2::new(*radius, *radius);
            (0..config.n_ground)
                .map(|_| loop {
                    let p = rng.point_in_box(c - r, c + r);
                    if p.distance(c) <= *radius && domain.contains(p, 0.0) {
                        break p;
                    }
                })
                .collect()
        }
    }
}

fn initial_aerial_positions(
    config: &ScenarioConfig,
    domain: &ConvexPolygon,
    rng: &mut RngStream,
) -> Vec<Point2> {
    match &config.initial.aerial {
        Some(ps) => ps.iter().map(|p| Point2::new(p[0], p[1])).collect(),
        None => {
            let bb = domain.bounding_box();
            (0..config.k_aerial)
                .map(|_| rng.point_in_box(bb.min, bb.max))
                .collect()
        }
    }
}

/// Discrete Lloyd iteration of the aerial sites under a uniform density.
///
/// Every iteration moves each site onto the geometric center of its cell;
/// the phase ends once no site moves by `convergence_eps` or more.
pub fn run_aerial_phase(
    config: &ScenarioConfig,
    rng: &mut RngStream,
) -> Result<AerialPhase, SimError> {
    let domain = config.domain_polygon();
    if config.k_aerial < 1 {
        return Err(SimError::Config(ConfigError::Invalid {
            field: "k_aerial".into(),
            reason: "aerial phase needs at least one aerial robot".into(),
        }));
    }
    let mut positions = initial_aerial_positions(config, &domain, rng);
    let mut diagram = voronoi_tessellate(&positions, &domain)?;
    for iteration in 1..=config.max_iterations {
        let centers: Vec<Point2> = diagram
            .cells()
            .iter()
            .map(|c| c.geometric_center())
            .collect();
        let moved = positions
            .iter()
            .zip(&centers)
            .map(|(p, c)| p.distance(*c))
            .fold(0.0, f64::max);
        positions = centers;
        diagram = voronoi_tessellate(&positions, &domain)?;
        if moved < config.convergence_eps {
            let residual = cvt_residual(&diagram);
            return Ok(AerialPhase {
                positions,
                diagram,
                iterations: iteration,
                converged: true,
                residual,
            });
        }
    }
    let residual = cvt_residual(&diagram);
    Ok(AerialPhase {
        positions,
        diagram,
        iterations: config.max_iterations,
        converged: false,
        residual,
    })
}

/// Largest distance from a site to its cell's geometric center.
pub fn cvt_residual(diagram: &VoronoiDiagram) -> f64 {
    diagram
        .sites()
        .iter()
        .zip(diagram.cells())
        .map(|(s, c)| s.distance(c.geometric_center()))
        .fold(0.0, f64::max)
}

/// Distance from each ground robot to the mass center of its cell.
pub fn lloyd_residuals(scenario: &Scenario, positions: &[Point2]) -> Result<Vec<f64>, SimError> {
    let diagram = voronoi_tessellate(positions, &scenario.domain)?;
    diagram
        .cells()
        .iter()
        .zip(positions)
        .map(|(cell, p)| {
            let target = weighted_centroid(&scenario.field, cell, &scenario.grid)?
                .unwrap_or_else(|| cell.geometric_center());
            Ok(target.distance(*p))
        })
        .collect()
}

fn reports_for(
    scenario: &Scenario,
    aerial_diagram: Option<&VoronoiDiagram>,
    ground: &[RobotState],
) -> Result<Vec<AerialCellReport>, SimError> {
    match aerial_diagram {
        Some(d) => Ok(compute_cell_reports(
            d,
            ground,
            &scenario.field,
            &scenario.grid,
            scenario.deadband,
        )?),
        None => Ok(Vec::new()),
    }
}

/// Builds the starting state from explicit positions.
pub fn initial_state(
    scenario: &Scenario,
    ground_positions: &[Point2],
    aerial: Option<&AerialPhase>,
) -> Result<SimState, SimError> {
    let ground: Vec<RobotState> = ground_positions
        .iter()
        .enumerate()
        .map(|(i, &p)| RobotState::ground(i, p, scenario.sensing))
        .collect();
    let aerial_robots = aerial
        .map(|a| {
            a.positions
                .iter()
                .enumerate()
                .map(|(j, &p)| RobotState::aerial(j, p))
                .collect()
        })
        .unwrap_or_default();
    let aerial_diagram = aerial.map(|a| a.diagram.clone());
    let ground_diagram = voronoi_tessellate(ground_positions, &scenario.domain)?;
    let reports = reports_for(scenario, aerial_diagram.as_ref(), &ground)?;
    Ok(SimState {
        iteration: 0,
        ground,
        aerial: aerial_robots,
        aerial_diagram,
        ground_diagram,
        reports,
        last_residual: f64::INFINITY,
    })
}

/// Velocity commands for every ground robot from one consistent snapshot.
pub fn controls(scenario: &Scenario, state: &SimState) -> Result<Vec<Point2>, SimError> {
    let hetero = scenario.config.controller == ControllerKind::Heterogeneous;
    let per_robot = scenario.execution.map_range(state.ground.len(), |i| {
        let robot = &state.ground[i];
        let cell = state.ground_diagram.cell(i);
        if hetero {
            hetero_control(
                robot,
                &state.reports,
                cell,
                &scenario.field,
                &scenario.grid,
                &scenario.gains,
                scenario.c_min_mode,
            )
        } else {
            local_control(
                robot,
                cell,
                &scenario.field,
                &scenario.grid,
                &scenario.gains,
            )
        }
    });
    per_robot
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(SimError::from)
}

/// One forward-Euler step: speed-limited motion, projected back into the domain.
pub fn step(state: &SimState, scenario: &Scenario) -> Result<SimState, SimError> {
    let config = &scenario.config;
    let commands = controls(scenario, state)?;
    let residual = commands
        .iter()
        .map(|u| u.norm() / scenario.gains.kappa)
        .fold(0.0, f64::max);
    let ground: Vec<RobotState> = state
        .ground
        .iter()
        .zip(&commands)
        .map(|(robot, u)| {
            let moved = robot.position + u.clamp_norm(config.max_speed) * config.dt;
            RobotState {
                position: scenario.domain.project(moved),
                ..robot.clone()
            }
        })
        .collect();
    let positions: Vec<Point2> = ground.iter().map(|r| r.position).collect();
    let ground_diagram = voronoi_tessellate(&positions, &scenario.domain)?;
    let reports = reports_for(scenario, state.aerial_diagram.as_ref(), &ground)?;
    Ok(SimState {
        iteration: state.iteration + 1,
        ground,
        aerial: state.aerial.clone(),
        aerial_diagram: state.aerial_diagram.clone(),
        ground_diagram,
        reports,
        last_residual: residual,
    })
}

fn record(scenario: &Scenario, state: &SimState) -> Result<TraceRecord, SimError> {
    let positions = state.positions();
    let cost = coverage_cost(
        &state.ground_diagram,
        &positions,
        &scenario.field,
        &scenario.grid,
    )?;
    let cells: Vec<CellSnapshot> = state
        .reports
        .iter()
        .map(|r| CellSnapshot {
            robot_count: r.robot_count,
            mass_fraction: r.mass_fraction,
            weight: r.weight,
            clamped_weight: r.clamped_weight,
        })
        .collect();
    let (min_cell, sigma_min) =
        match cells
            .iter()
            .enumerate()
            .reduce(|best, c| if c.1.weight < best.1.weight { c } else { best })
        {
            Some((j, c)) => (Some(j), Some(c.weight)),
            None => (None, None),
        };
    Ok(TraceRecord {
        iteration: state.iteration,
        positions,
        cost,
        cells,
        sigma_min,
        min_cell,
    })
}

fn density_preview(scenario: &Scenario) -> DensityPreview {
    let (nx, ny) = PREVIEW_CELLS;
    let bb = scenario.domain.bounding_box();
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let q = Point2::new(
                bb.min.x + (i as f64 + 0.5) * bb.width() / nx as f64,
                bb.min.y + (j as f64 + 0.5) * bb.height() / ny as f64,
            );
            values.push(scenario.field.evaluate(q).unwrap_or(0.0));
        }
    }
    DensityPreview { nx, ny, values }
}

/// Runs from explicit starting positions and an optional settled aerial team.
pub fn run_from(
    scenario: &Scenario,
    ground_positions: &[Point2],
    aerial: Option<&AerialPhase>,
) -> Result<SimTrace, SimError> {
    let config = &scenario.config;
    let mut state = initial_state(scenario, ground_positions, aerial)?;
    let mut records = vec![record(scenario, &state)?];
    let mut calm = 0;
    let mut converged = false;
    while state.iteration < config.max_iterations {
        state = step(&state, scenario)?;
        records.push(record(scenario, &state)?);
        if state.last_residual < config.convergence_eps {
            calm += 1;
        } else {
            calm = 0;
        }
        if calm >= CALM_ITERATIONS {
            converged = true;
            break;
        }
    }
    let summary = TraceSummary {
        iterations: state.iteration,
        final_cost: records.last().map(|r| r.cost).unwrap_or(f64::NAN),
        converged,
        final_residual: state.last_residual,
        aerial_iterations: aerial.map(|a| a.iterations).unwrap_or(0),
        aerial_converged: aerial.map(|a| a.converged).unwrap_or(true),
    };
    Ok(SimTrace {
        controller: config.controller,
        seed: config.seed,
        rng_algorithm: RngStream::ALGORITHM,
        domain: scenario.domain.clone(),
        aerial_sites: aerial.map(|a| a.positions.clone()).unwrap_or_default(),
        aerial_diagram: aerial.map(|a| a.diagram.clone()),
        records,
        summary,
        preview: density_preview(scenario),
    })
}

/// Full run: seeded initial positions, aerial phase when `k_aerial ≥ 1`, ground phase.
///
/// Ground positions are drawn before aerial ones, so configs that differ
/// only in controller or aerial team size start from the same ground layout.
pub fn run_scenario(scenario: &Scenario) -> Result<SimTrace, SimError> {
    let config = &scenario.config;
    let mut rng = RngStream::new(config.seed);
    let ground = initial_ground_positions(config, &scenario.domain, &mut rng);
    let aerial = if config.k_aerial >= 1 {
        Some(run_aerial_phase(config, &mut rng)?)
    } else {
        None
    };
    run_from(scenario, &ground, aerial.as_ref())
}

pub fn run(config: &ScenarioConfig) -> Result<SimTrace, SimError> {
    run_scenario(&Scenario::new(config)?)
}

/// Runs independent configs, one per work item. Inner steps run sequentially.
pub fn run_ensemble(
    configs: &[ScenarioConfig],
    execution: Execution,
) -> Vec<Result<SimTrace, SimError>> {
    execution.map(configs, |c| {
        let scenario = Scenario::new(c)?.with_execution(Execution::Sequential);
        run_scenario(&scenario)
    })
}

/// Per-robot count of aerial-cell membership changes over the last quarter of the trace.
pub fn detect_boundary_oscillation(
    trace: &SimTrace,
    aerial_diagram: &VoronoiDiagram,
) -> Vec<usize> {
    let records = &trace.records;
    let Some(first) = records.first() else {
        return Vec::new();
    };
    let n = first.positions.len();
    let start = (records.len() * 3) / 4;
    let membership = |p: Point2| {
        aerial_diagram
            .locate(p)
            .unwrap_or_else(|| aerial_diagram.nearest_site(p))
    };
    let mut crossings = vec![0; n];
    for pair in records[start..].windows(2) {
        for (i, count) in crossings.iter_mut().enumerate() {
            if membership(pair[0].positions[i]) != membership(pair[1].positions[i]) {
                *count += 1;
            }
        }
    }
    crossings
}

/// Means of σ_min over consecutive complete windows of `window` records,
/// stopping at the first record where every clamped weight is zero.
pub fn windowed_sigma_min(trace: &SimTrace, window: usize) -> Vec<f64> {
    let end = trace
        .records
        .iter()
        .position(TraceRecord::all_clamped_zero)
        .unwrap_or(trace.records.len());
    trace.records[..end]
        .chunks_exact(window.max(1))
        .filter_map(|chunk| {
            let values: Option<Vec<f64>> = chunk.iter().map(|r| r.sigma_min).collect();
            values.map(|v| v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{DensitySpec, RadiusSetting};

    fn uniform_config(n: usize) -> ScenarioConfig {
        let mut c = ScenarioConfig::bundled_default();
        c.controller = ControllerKind::UnlimitedLloyd;
        c.density = DensitySpec::Uniform;
        c.n_ground = n;
        c.k_aerial = 0;
        c.initial.aerial = None;
        c.initial.ground = GroundInit::Uniform;
        c
    }

    #[test]
    fn rng_stream_replays() {
        let mut a = RngStream::new(9);
        let mut b = RngStream::new(9);
        let xs: Vec<f64> = (0..5).map(|_| a.uniform(0.0, 1.0)).collect();
        let ys: Vec<f64> = (0..5).map(|_| b.uniform(0.0, 1.0)).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs[0], RngStream::new(10).uniform(0.0, 1.0));
    }

    #[test]
    fn single_aerial_robot_goes_to_center() {
        let mut c = ScenarioConfig::bundled_default();
        c.k_aerial = 1;
        c.initial.aerial = Some(vec![[1.2, -0.7]]);
        let phase = run_aerial_phase(&c, &mut RngStream::new(0)).unwrap();
        assert!(phase.converged);
        assert!(phase.positions[0].norm() < 1e-12);
    }

    #[test]
    fn two_aerial_robots_split_long_axis() {
        let mut c = ScenarioConfig::bundled_default();
        c.k_aerial = 2;
        c.initial.aerial = Some(vec![[-0.3, 0.2], [0.5, -0.1]]);
        let phase = run_aerial_phase(&c, &mut RngStream::new(0)).unwrap();
        assert!(phase.converged);
        assert!(phase.residual < c.convergence_eps);
        let (a, b) = (phase.positions[0], phase.positions[1]);
        assert!((a - Point2::new(-0.8, 0.0)).norm() < 1e-2, "{a}");
        assert!((b - Point2::new(0.8, 0.0)).norm() < 1e-2, "{b}");
        assert!((a.x + b.x).abs() < 1e-2 && (a.y + b.y).abs() < 1e-2);
    }

    #[test]
    fn four_aerial_robots_form_grid() {
        let c = ScenarioConfig::bundled_default();
        let phase = run_aerial_phase(&c, &mut RngStream::new(0)).unwrap();
        assert!(phase.converged);
        assert!(phase.residual < c.convergence_eps);
        let mut expected = vec![
            Point2::new(-0.8, -0.5),
            Point2::new(0.8, -0.5),
            Point2::new(-0.8, 0.5),
            Point2::new(0.8, 0.5),
        ];
        for p in &phase.positions {
            let k = expected
                .iter()
                .position(|e| e.distance(*p) < 0.05)
                .unwrap_or_else(|| panic!("unexpected site {p}"));
            expected.remove(k);
        }
    }

    #[test]
    fn single_robot_lands_on_center_with_unit_step() {
        let mut c = uniform_config(1);
        c.dt = 1.0;
        c.max_speed = 10.0;
        c.initial.ground = GroundInit::Explicit {
            positions: vec![[1.0, 0.6]],
        };
        let scenario = Scenario::new(&c).unwrap();
        let state = initial_state(&scenario, &[Point2::new(1.0, 0.6)], None).unwrap();
        let next = step(&state, &scenario).unwrap();
        assert!(next.ground[0].position.norm() < 1e-12);
        assert_eq!(next.iteration, 1);
    }

    #[test]
    fn fixed_point_is_preserved() {
        let c = uniform_config(4);
        let scenario = Scenario::new(&c).unwrap();
        let centers = [
            Point2::new(-0.8, -0.5),
            Point2::new(0.8, -0.5),
            Point2::new(-0.8, 0.5),
            Point2::new(0.8, 0.5),
        ];
        let state = initial_state(&scenario, &centers, None).unwrap();
        let next = step(&state, &scenario).unwrap();
        for (a, b) in next.positions().iter().zip(&centers) {
            assert!(a.distance(*b) < 1e-12);
        }
    }

    #[test]
    fn single_robot_run_reaches_polar_moment() {
        let mut c = uniform_config(1);
        c.max_iterations = 2000;
        let trace = run(&c).unwrap();
        assert!(trace.summary.converged);
        assert!(trace.final_positions()[0].norm() < 2e-3);
        let expected = (3.2f64.powi(2) + 2.0f64.powi(2)) / 12.0;
        assert!((trace.summary.final_cost - expected).abs() / expected < 0.01);
        assert_eq!(trace.records.len(), trace.summary.iterations + 1);
    }

    #[test]
    fn unlimited_lloyd_cost_never_increases() {
        let mut c = uniform_config(6);
        c.density = ScenarioConfig::bundled_default().density;
        c.max_iterations = 300;
        c.seed = 4;
        let trace = run(&c).unwrap();
        for w in trace.records.windows(2) {
            assert!(
                w[1].cost <= w[0].cost + 1e-9,
                "{} -> {}",
                w[0].cost,
                w[1].cost
            );
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let mut c = ScenarioConfig::bundled_default();
        c.max_iterations = 60;
        let a = run(&c).unwrap();
        let b = run_scenario(
            &Scenario::new(&c)
                .unwrap()
                .with_execution(Execution::Sequential),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heterogeneous_reduces_to_limited_when_balanced() {
        // deadband of one keeps every clamped weight at zero
        let mut c = ScenarioConfig::bundled_default();
        c.max_iterations = 80;
        c.deadband = crate::config::DeadbandSetting::Value(1.0);
        let hetero = run(&c).unwrap();
        let limited = run(&c.with_controller(ControllerKind::LimitedLloyd)).unwrap();
        assert_eq!(hetero.records, limited.records);
    }

    #[test]
    fn positions_stay_inside_domain() {
        let mut c = ScenarioConfig::bundled_default();
        c.max_iterations = 200;
        let trace = run(&c).unwrap();
        for r in &trace.records {
            for p in &r.positions {
                assert!(trace.domain.contains(*p, 1e-12));
            }
        }
    }

    #[test]
    fn conservation_holds_along_a_run() {
        let mut c = ScenarioConfig::bundled_default();
        c.max_iterations = 150;
        let trace = run(&c).unwrap();
        for r in &trace.records {
            let total: f64 = r.cells.iter().map(|c| c.weight).sum();
            assert!(total.abs() < 1e-6);
            assert!(r.sigma_min.unwrap() <= 1e-12);
        }
    }

    #[test]
    fn oscillation_counts_on_single_robot() {
        let mut c = uniform_config(1);
        c.max_iterations = 40;
        c.sensing_radius = RadiusSetting::Meters(0.3);
        let trace = run(&c).unwrap();
        let split = voronoi_tessellate(
            &[Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0)],
            &c.domain_polygon(),
        )
        .unwrap();
        let crossings = detect_boundary_oscillation(&trace, &split);
        // direct membership diff over the last quarter
        let start = trace.records.len() * 3 / 4;
        let side = |p: Point2| split.locate(p).unwrap();
        let direct = trace.records[start..]
            .windows(2)
            .filter(|w| side(w[0].positions[0]) != side(w[1].positions[0]))
            .count();
        assert_eq!(crossings, vec![direct]);
    }

    #[test]
    fn windowed_sigma_min_stops_at_balance() {
        let mut c = ScenarioConfig::bundled_default();
        c.max_iterations = 400;
        let trace = run(&c).unwrap();
        let windows = windowed_sigma_min(&trace, 50);
        let end = trace
            .records
            .iter()
            .position(TraceRecord::all_clamped_zero)
            .unwrap_or(trace.records.len());
        assert_eq!(windows.len(), end / 50);
    }
}
