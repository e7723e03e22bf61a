//! Ground-robot control laws.
//!
//! * Lloyd: `u = κ (c(p) − p)` toward the mass center of the robot's cell.
//! * Range-limited Lloyd: the same, with the cell cut down to the sensing disc.
//! * Global: `u = γ (C_min − p)` toward the center of the aerial cell with the
//!   lowest weight.
//! * Air-ground blend: `u = (1 − σ̂_j) u_local + σ̂_j u_global`, where `σ̂_j` is
//!   the clamped weight of the aerial cell that currently contains the robot.
//!
//! Aerial cell weights compare the fraction of ground robots in a cell with
//! the fraction of density mass it holds, `σ_j = n_j / N − Φ_j`.

use thiserror::Error;

use crate::density::{
    mass_over_polygon, total_mass, weighted_centroid, Covariance2, DensityError, DensityField,
    QuadratureGrid, SampleGrid, NORMALIZATION_TOL,
};
use crate::geometry::{
    clip_polygon_to_disc, Aabb, ConvexPolygon, GeometryError, Point2, VoronoiDiagram,
    DEFAULT_ARC_SEGMENTS, GEOMETRY_TOL,
};

/// Weights within this of the deadband count as inside it.
const DEADBAND_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("no ground robots")]
    EmptyGroundTeam,
    #[error("density is not normalized (total mass {0})")]
    UnnormalizedField(f64),
    #[error("no aerial cell reports")]
    EmptyReports,
    #[error("cell carries no density mass")]
    NoMass,
    #[error("robot {0} has unlimited sensing; use the unlimited Lloyd law")]
    UnboundedRadius(usize),
    #[error("robot {0} is not inside any aerial cell")]
    RobotOutsideAllCells(usize),
    #[error("gains must be positive and finite (kappa {kappa}, gamma {gamma})")]
    InvalidGains { kappa: f64, gamma: f64 },
    #[error("deadband must be finite and nonnegative, got {0}")]
    InvalidDeadband(f64),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Aerial,
    Ground,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SensingRange {
    Unlimited,
    Limited(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobotState {
    pub id: usize,
    pub position: Point2,
    pub role: Role,
    pub sensing: SensingRange,
}

impl RobotState {
    pub fn ground(id: usize, position: Point2, sensing: SensingRange) -> Self {
        Self {
            id,
            position,
            role: Role::Ground,
            sensing,
        }
    }

    pub fn aerial(id: usize, position: Point2) -> Self {
        Self {
            id,
            position,
            role: Role::Aerial,
            sensing: SensingRange::Unlimited,
        }
    }
}

/// What an aerial robot knows about its cell projected onto the ground.
#[derive(Clone, Debug, PartialEq)]
pub struct AerialCellReport {
    pub cell_index: usize,
    pub polygon: ConvexPolygon,
    /// `n_j`
    pub robot_count: usize,
    /// `Φ_j`
    pub mass_fraction: f64,
    /// `σ_j`
    pub weight: f64,
    /// `σ̂_j`
    pub clamped_weight: f64,
    pub geometric_center: Point2,
    /// Density-weighted center, `None` when the cell carries no mass.
    pub mass_center: Option<Point2>,
}

impl AerialCellReport {
    /// `n_j,ideal = Φ_j N`
    pub fn ideal_count(&self, n_ground: usize) -> f64 {
        self.mass_fraction * n_ground as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlGains {
    pub kappa: f64,
    pub gamma: f64,
}

impl ControlGains {
    pub fn new(kappa: f64, gamma: f64) -> Result<Self, ControlError> {
        if kappa > 0.0 && gamma > 0.0 && kappa.is_finite() && gamma.is_finite() {
            Ok(Self { kappa, gamma })
        } else {
            Err(ControlError::InvalidGains { kappa, gamma })
        }
    }
}

impl Default for ControlGains {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            gamma: 1.0,
        }
    }
}

/// Which point of the minimum-weight aerial cell the global law steers to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CMinMode {
    #[default]
    GeometricCenter,
    MassCenter,
}

/// Gaussian robot footprints for the continuum weight approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuumParams {
    pub footprint_covariance: Covariance2,
    /// Cells per axis of the local grid laid over each footprint.
    pub cells_per_axis: usize,
    /// Half-width of that grid in standard deviations.
    pub truncation_sigmas: f64,
}

impl ContinuumParams {
    pub fn new(footprint_covariance: Covariance2) -> Result<Self, ControlError> {
        let c = footprint_covariance;
        Covariance2::new(c.xx, c.xy, c.yy)?;
        Ok(Self {
            footprint_covariance,
            cells_per_axis: 64,
            truncation_sigmas: 6.0,
        })
    }
}

fn ensure_normalized(field: &DensityField, grid: &QuadratureGrid) -> Result<f64, ControlError> {
    let total = total_mass(field, grid)?;
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(ControlError::UnnormalizedField(total));
    }
    Ok(total)
}

/// Cell weights for every aerial cell from the current ground positions.
///
/// Robots on a shared edge count toward the lower-indexed cell.
pub fn compute_cell_reports(
    aerial_diagram: &VoronoiDiagram,
    ground_robots: &[RobotState],
    field: &DensityField,
    grid: &QuadratureGrid,
    deadband: f64,
) -> Result<Vec<AerialCellReport>, ControlError> {
    if ground_robots.is_empty() {
        return Err(ControlError::EmptyGroundTeam);
    }
    if !(deadband >= 0.0) || !deadband.is_finite() {
        return Err(ControlError::InvalidDeadband(deadband));
    }
    let total = ensure_normalized(field, grid)?;
    let mut counts = vec![0usize; aerial_diagram.len()];
    for robot in ground_robots {
        let j = aerial_diagram
            .locate(robot.position)
            .ok_or(ControlError::RobotOutsideAllCells(robot.id))?;
        counts[j] += 1;
    }
    let n = ground_robots.len() as f64;
    aerial_diagram
        .cells()
        .iter()
        .zip(counts)
        .enumerate()
        .map(|(j, (cell, robot_count))| {
            let mass_fraction = mass_over_polygon(field, cell, grid)? / total;
            let weight = robot_count as f64 / n - mass_fraction;
            let clamped_weight = if weight > deadband + DEADBAND_SLACK {
                weight
            } else {
                0.0
            };
            Ok(AerialCellReport {
                cell_index: j,
                polygon: cell.clone(),
                robot_count,
                mass_fraction,
                weight,
                clamped_weight,
                geometric_center: cell.geometric_center(),
                mass_center: weighted_centroid(field, cell, grid)?,
            })
        })
        .collect()
}

/// Index of the minimum-weight cell (first on ties) and its geometric center.
pub fn select_min_weight_cell(
    reports: &[AerialCellReport],
) -> Result<(usize, Point2), ControlError> {
    select_min_weight_cell_with(reports, CMinMode::GeometricCenter)
}

/// As [`select_min_weight_cell`], choosing the attractor point by `mode`.
pub fn select_min_weight_cell_with(
    reports: &[AerialCellReport],
    mode: CMinMode,
) -> Result<(usize, Point2), ControlError> {
    let first = reports.first().ok_or(ControlError::EmptyReports)?;
    let mut best = 0;
    let mut best_weight = first.weight;
    for (j, r) in reports.iter().enumerate().skip(1) {
        if r.weight < best_weight {
            best = j;
            best_weight = r.weight;
        }
    }
    let r = &reports[best];
    let target = match mode {
        CMinMode::GeometricCenter => r.geometric_center,
        CMinMode::MassCenter => r.mass_center.unwrap_or(r.geometric_center),
    };
    Ok((best, target))
}

/// Unlimited-range Lloyd law. Fails with [`ControlError::NoMass`] on a massless cell.
pub fn lloyd_local_control(
    robot: &RobotState,
    own_cell: &ConvexPolygon,
    field: &DensityField,
    grid: &QuadratureGrid,
    gains: &ControlGains,
) -> Result<Point2, ControlError> {
    let centroid = weighted_centroid(field, own_cell, grid)?.ok_or(ControlError::NoMass)?;
    Ok((centroid - robot.position) * gains.kappa)
}

/// The robot's sensed region: its cell cut to the inscribed sensing polygon.
pub fn sensed_region(
    robot: &RobotState,
    own_cell: &ConvexPolygon,
) -> Result<Option<ConvexPolygon>, ControlError> {
    let SensingRange::Limited(radius) = robot.sensing else {
        return Err(ControlError::UnboundedRadius(robot.id));
    };
    Ok(clip_polygon_to_disc(
        own_cell,
        robot.position,
        radius,
        DEFAULT_ARC_SEGMENTS,
    )?)
}

/// Lloyd law over `own_cell ∩ disc(p, r)`.
///
/// With no sensed mass the robot heads for the geometric center of the
/// sensed region instead.
pub fn range_limited_local_control(
    robot: &RobotState,
    own_cell: &ConvexPolygon,
    field: &DensityField,
    grid: &QuadratureGrid,
    gains: &ControlGains,
) -> Result<Point2, ControlError> {
    let Some(region) = sensed_region(robot, own_cell)? else {
        return Ok(Point2::ORIGIN);
    };
    let target = match weighted_centroid(field, &region, grid)? {
        Some(c) => c,
        None => region.geometric_center(),
    };
    Ok((target - robot.position) * gains.kappa)
}

/// Local law matching the robot's sensing: range-limited when bounded,
/// plain Lloyd otherwise. A massless cell falls back to its geometric center.
pub fn local_control(
    robot: &RobotState,
    own_cell: &ConvexPolygon,
    field: &DensityField,
    grid: &QuadratureGrid,
    gains: &ControlGains,
) -> Result<Point2, ControlError> {
    match robot.sensing {
        SensingRange::Limited(_) => {
            range_limited_local_control(robot, own_cell, field, grid, gains)
        }
        SensingRange::Unlimited => match lloyd_local_control(robot, own_cell, field, grid, gains) {
            Err(ControlError::NoMass) => {
                Ok((own_cell.geometric_center() - robot.position) * gains.kappa)
            }
            other => other,
        },
    }
}

pub fn global_control(robot: &RobotState, c_min: Point2, gains: &ControlGains) -> Point2 {
    (c_min - robot.position) * gains.gamma
}

/// Aerial cell containing `p`, lowest index on shared edges.
pub fn containing_report(reports: &[AerialCellReport], p: Point2) -> Option<usize> {
    reports
        .iter()
        .position(|r| r.polygon.contains(p, GEOMETRY_TOL))
}

/// Air-ground blended law.
pub fn hetero_control(
    robot: &RobotState,
    reports: &[AerialCellReport],
    own_ground_cell: &ConvexPolygon,
    field: &DensityField,
    grid: &QuadratureGrid,
    gains: &ControlGains,
    c_min_mode: CMinMode,
) -> Result<Point2, ControlError> {
    if reports.is_empty() {
        return Err(ControlError::EmptyReports);
    }
    let j = containing_report(reports, robot.position)
        .ok_or(ControlError::RobotOutsideAllCells(robot.id))?;
    let blend = reports[j].clamped_weight;
    if blend == 0.0 {
        return local_control(robot, own_ground_cell, field, grid, gains);
    }
    let (_, c_min) = select_min_weight_cell_with(reports, c_min_mode)?;
    let global = global_control(robot, c_min, gains);
    if blend == 1.0 {
        return Ok(global);
    }
    let local = local_control(robot, own_ground_cell, field, grid, gains)?;
    Ok(local * (1.0 - blend) + global * blend)
}

/// Continuum estimate of `n_j / N`: each robot spread as a Gaussian footprint,
/// renormalized to unit mass over the domain.
pub fn continuum_counts(
    polygons: &[ConvexPolygon],
    ground_robots: &[RobotState],
    field: &DensityField,
    params: &ContinuumParams,
) -> Result<Vec<f64>, ControlError> {
    if ground_robots.is_empty() {
        return Err(ControlError::EmptyGroundTeam);
    }
    let cov = params.footprint_covariance;
    let cov = Covariance2::new(cov.xx, cov.xy, cov.yy)?;
    let half = params.truncation_sigmas * cov.max_std();
    let mut counts = vec![0.0; polygons.len()];
    for robot in ground_robots {
        let p = robot.position;
        let bounds = Aabb {
            min: p - Point2::new(half, half),
            max: p + Point2::new(half, half),
        };
        let footprint =
            SampleGrid::from_fn(bounds, params.cells_per_axis, params.cells_per_axis, |q| {
                cov.pdf(p, q)
            });
        let inside = footprint.mass(field.domain());
        if !(inside > 0.0) {
            return Err(ControlError::NoMass);
        }
        for (count, poly) in counts.iter_mut().zip(polygons) {
            *count += footprint.mass(poly) / inside;
        }
    }
    let n = ground_robots.len() as f64;
    Ok(counts.into_iter().map(|c| c / n).collect())
}

/// Continuum cell weights: footprint-smoothed `n_j/N` minus `Φ_j`.
pub fn continuum_sigma(
    polygons: &[ConvexPolygon],
    ground_robots: &[RobotState],
    field: &DensityField,
    grid: &QuadratureGrid,
    params: &ContinuumParams,
) -> Result<Vec<f64>, ControlError> {
    let total = ensure_normalized(field, grid)?;
    let counts = continuum_counts(polygons, ground_robots, field, params)?;
    polygons
        .iter()
        .zip(counts)
        .map(|(poly, count)| Ok(count - mass_over_polygon(field, poly, grid)? / total))
        .collect()
}
