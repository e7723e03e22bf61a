//! Importance densities over the ground domain and their quadrature.
//!
//! Integrals use a fixed rectangular grid attached to the domain. The density
//! is sampled once at every grid-cell center and treated as constant on that
//! cell; a polygon integral is then the exact integral of this piecewise
//! constant field, with boundary cells clipped to the polygon. Because each
//! grid cell's area is split exactly among the polygons of a partition, mass
//! additivity over a Voronoi tessellation holds to rounding error.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{clip_halfplane, Aabb, ConvexPolygon, GeometryError, Point2, GEOMETRY_TOL};

/// Centroids are undefined below this mass.
pub const NO_MASS: f64 = 1e-12;
/// Fewest grid cells per axis.
pub const MIN_GRID_RESOLUTION: usize = 32;
/// Slack allowed on the total mass of a normalized field.
pub const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("covariance is not symmetric positive-definite")]
    NonSpdCovariance,
    #[error("invalid mixture component {index}: {reason}")]
    InvalidComponent { index: usize, reason: &'static str },
    #[error("point {0} lies outside the density domain")]
    PointOutsideDomain(Point2),
    #[error("polygon extends outside the density domain")]
    PolygonOutsideDomain,
    #[error("density integrates to {0:e}; cannot normalize")]
    ZeroMassField(f64),
    #[error("quadrature grid resolution {nx}x{ny} is below the minimum {MIN_GRID_RESOLUTION}")]
    GridTooCoarse { nx: usize, ny: usize },
    #[error("quadrature grid was sampled from a different density")]
    FieldGridMismatch,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Symmetric 2×2 covariance matrix, m².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covariance2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Covariance2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Result<Self, DensityError> {
        let cov = Self { xx, xy, yy };
        if [xx, xy, yy].iter().all(|v| v.is_finite()) && xx > 0.0 && cov.det() > 0.0 {
            Ok(cov)
        } else {
            Err(DensityError::NonSpdCovariance)
        }
    }

    pub fn isotropic(variance: f64) -> Result<Self, DensityError> {
        Self::new(variance, 0.0, variance)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Largest standard deviation along any direction.
    pub fn max_std(&self) -> f64 {
        let mean = 0.5 * (self.xx + self.yy);
        let spread = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        (mean + spread).sqrt()
    }

    /// Bivariate normal pdf with this covariance, centered at `mean`.
    pub fn pdf(&self, mean: Point2, q: Point2) -> f64 {
        let det = self.det();
        let d = q - mean;
        let mahalanobis =
            (self.yy * d.x * d.x - 2.0 * self.xy * d.x * d.y + self.xx * d.y * d.y) / det;
        (-0.5 * mahalanobis).exp() / (2.0 * PI * det.sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Point2,
    pub covariance: Covariance2,
}

impl GaussianComponent {
    pub fn value(&self, q: Point2) -> f64 {
        self.weight * self.covariance.pdf(self.mean, q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityKind {
    Uniform,
    GaussianMixture(Vec<GaussianComponent>),
}

/// Nonnegative importance function φ on a convex domain, times a scale factor.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityField {
    kind: DensityKind,
    domain: ConvexPolygon,
    normalization: f64,
}

impl DensityField {
    pub fn uniform(domain: ConvexPolygon) -> Self {
        Self {
            kind: DensityKind::Uniform,
            domain,
            normalization: 1.0,
        }
    }

    /// Mixture of Gaussians truncated to `domain`. Call [`normalize`] before use.
    pub fn gaussian_mixture(
        domain: ConvexPolygon,
        components: Vec<GaussianComponent>,
    ) -> Result<Self, DensityError> {
        if components.is_empty() {
            return Err(DensityError::InvalidComponent {
                index: 0,
                reason: "mixture has no components",
            });
        }
        for (index, c) in components.iter().enumerate() {
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(DensityError::InvalidComponent {
                    index,
                    reason: "weight must be finite and nonnegative",
                });
            }
            if !c.mean.is_finite() {
                return Err(DensityError::InvalidComponent {
                    index,
                    reason: "mean must be finite",
                });
            }
            Covariance2::new(c.covariance.xx, c.covariance.xy, c.covariance.yy)?;
        }
        Ok(Self {
            kind: DensityKind::GaussianMixture(components),
            domain,
            normalization: 1.0,
        })
    }

    /// Same shape, scale multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            normalization: self.normalization * factor,
            ..self.clone()
        }
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn components(&self) -> &[GaussianComponent] {
        match &self.kind {
            DensityKind::Uniform => &[],
            DensityKind::GaussianMixture(c) => c,
        }
    }

    pub fn domain(&self) -> &ConvexPolygon {
        &self.domain
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Unscaled density; defined everywhere in the plane.
    fn shape(&self, q: Point2) -> f64 {
        match &self.kind {
            DensityKind::Uniform => 1.0,
            DensityKind::GaussianMixture(cs) => cs.iter().map(|c| c.value(q)).sum(),
        }
    }

    pub fn evaluate(&self, q: Point2) -> Result<f64, DensityError> {
        if !q.is_finite() || !self.domain.contains(q, GEOMETRY_TOL) {
            return Err(DensityError::PointOutsideDomain(q));
        }
        Ok(self.normalization * self.shape(q))
    }
}

/// Cell means of a scalar field on a regular grid.
///
/// Inside each cell the field is reconstructed as `v + g·(q − c)` with a
/// central-difference slope `g`, limited so the reconstruction stays
/// nonnegative at the cell corners. Integrals of that reconstruction are
/// exact, so polygon integrals are additive under any partition.
#[derive(Clone, Debug)]
pub(crate) struct SampleGrid {
    origin: Point2,
    dx: f64,
    dy: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    slopes: Vec<Point2>,
}

/// Linear reconstruction on one cell.
#[derive(Clone, Copy)]
struct Linear {
    value: f64,
    slope: Point2,
    center: Point2,
}

impl Linear {
    fn at(&self, q: Point2) -> f64 {
        self.value + self.slope.dot(q - self.center)
    }
}

/// One grid cell's share of a polygon.
enum Piece {
    Full,
    Partial(ConvexPolygon),
}

/// Barycentric points and weights of a four-point rule exact for cubics.
const CUBIC_RULE: [([f64; 3], f64); 4] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], -27.0 / 48.0),
    ([0.6, 0.2, 0.2], 25.0 / 48.0),
    ([0.2, 0.6, 0.2], 25.0 / 48.0),
    ([0.2, 0.2, 0.6], 25.0 / 48.0),
];

/// `∫_poly f` for `f` of degree at most three.
fn integrate_cubic(poly: &ConvexPolygon, f: impl Fn(Point2) -> f64) -> f64 {
    let v = poly.vertices();
    let a = v[0];
    let mut acc = 0.0;
    for w in v[1..].windows(2) {
        let (b, c) = (w[0], w[1]);
        let area = 0.5 * (b - a).cross(c - a);
        let sum: f64 = CUBIC_RULE
            .iter()
            .map(|(l, weight)| weight * f(a * l[0] + b * l[1] + c * l[2]))
            .sum();
        acc += area * sum;
    }
    acc
}

impl SampleGrid {
    pub(crate) fn from_fn(bounds: Aabb, nx: usize, ny: usize, f: impl Fn(Point2) -> f64) -> Self {
        let dx = bounds.width() / nx as f64;
        let dy = bounds.height() / ny as f64;
        let origin = bounds.min;
        // Cell means by 2×2 Gauss–Legendre.
        let gx = dx / (2.0 * 3f64.sqrt());
        let gy = dy / (2.0 * 3f64.sqrt());
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let c = cell_center(origin, dx, dy, i, j);
                let sum = f(c + Point2::new(-gx, -gy))
                    + f(c + Point2::new(gx, -gy))
                    + f(c + Point2::new(-gx, gy))
                    + f(c + Point2::new(gx, gy));
                values.push(0.25 * sum);
            }
        }
        let at = |i: usize, j: usize| values[j * nx + i];
        let diff = |lo: f64, hi: f64, steps: usize, h: f64| {
            if steps == 0 {
                0.0
            } else {
                (hi - lo) / (steps as f64 * h)
            }
        };
        let mut slopes = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (il, ir) = (i.saturating_sub(1), (i + 1).min(nx - 1));
                let (jl, jr) = (j.saturating_sub(1), (j + 1).min(ny - 1));
                let mut g = Point2::new(
                    diff(at(il, j), at(ir, j), ir - il, dx),
                    diff(at(i, jl), at(i, jr), jr - jl, dy),
                );
                let v = at(i, j);
                let swing = 0.5 * (g.x.abs() * dx + g.y.abs() * dy);
                if swing > v {
                    g = if swing > 0.0 {
                        g * (v.max(0.0) / swing)
                    } else {
                        g
                    };
                }
                slopes.push(g);
            }
        }
        Self {
            origin,
            dx,
            dy,
            nx,
            ny,
            values,
            slopes,
        }
    }

    fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Calls `visit(cell, piece)` for every grid cell overlapping `poly`.
    fn for_each_piece(&self, poly: &ConvexPolygon, mut visit: impl FnMut(Linear, Piece)) {
        let bb = poly.bounding_box();
        let row_lo = index_floor((bb.min.y - self.origin.y) / self.dy, self.ny);
        let row_hi = index_ceil((bb.max.y - self.origin.y) / self.dy, self.ny);
        for j in row_lo..row_hi {
            let y0 = self.origin.y + j as f64 * self.dy;
            let y1 = y0 + self.dy;
            let Some(strip) = clip_strip(poly, y0, y1) else {
                continue;
            };
            // Cells whose x-range sits inside both slices of a convex polygon are fully covered.
            let inner = if bb.min.y <= y0 && bb.max.y >= y1 {
                match (slice_x(poly, y0), slice_x(poly, y1)) {
                    (Some((l0, r0)), Some((l1, r1))) => (l0.max(l1), r0.min(r1)),
                    _ => (f64::INFINITY, f64::NEG_INFINITY),
                }
            } else {
                (f64::INFINITY, f64::NEG_INFINITY)
            };
            let sb = strip.bounding_box();
            let col_lo = index_floor((sb.min.x - self.origin.x) / self.dx, self.nx);
            let col_hi = index_ceil((sb.max.x - self.origin.x) / self.dx, self.nx);
            for i in col_lo..col_hi {
                let x0 = self.origin.x + i as f64 * self.dx;
                let x1 = x0 + self.dx;
                let cell = Linear {
                    value: self.values[j * self.nx + i],
                    slope: self.slopes[j * self.nx + i],
                    center: cell_center(self.origin, self.dx, self.dy, i, j),
                };
                if x0 >= inner.0 && x1 <= inner.1 {
                    visit(cell, Piece::Full);
                } else if let Some(piece) = clip_slab(&strip, x0, x1) {
                    visit(cell, Piece::Partial(piece));
                }
            }
        }
    }

    /// `∫_poly f` of the reconstructed field.
    pub(crate) fn mass(&self, poly: &ConvexPolygon) -> f64 {
        let full = self.cell_area();
        let mut mass = 0.0;
        self.for_each_piece(poly, |cell, piece| {
            mass += match piece {
                Piece::Full => full * cell.value,
                Piece::Partial(p) => p.area() * cell.at(p.geometric_center()),
            };
        });
        mass
    }

    /// Returns `(∫ f, ∫ f·q)` over `poly`.
    pub(crate) fn moments(&self, poly: &ConvexPolygon) -> (f64, Point2) {
        let full = self.cell_area();
        let (kx, ky) = (self.dx * self.dx / 12.0, self.dy * self.dy / 12.0);
        let mut mass = 0.0;
        let mut first = Point2::ORIGIN;
        self.for_each_piece(poly, |cell, piece| match piece {
            Piece::Full => {
                mass += full * cell.value;
                first += cell.center * (full * cell.value)
                    + Point2::new(cell.slope.x * kx, cell.slope.y * ky) * full;
            }
            Piece::Partial(p) => {
                // Moments about the cell center keep the products small.
                let c = cell.center;
                let m = p.area() * cell.at(p.geometric_center());
                let fx = integrate_cubic(&p, |q| (q.x - c.x) * cell.at(q));
                let fy = integrate_cubic(&p, |q| (q.y - c.y) * cell.at(q));
                mass += m;
                first += c * m + Point2::new(fx, fy);
            }
        });
        (mass, first)
    }

    /// `∫_poly ‖q − p‖² f(q) dq`.
    pub(crate) fn second_moment(&self, poly: &ConvexPolygon, p: Point2) -> f64 {
        let full = self.cell_area();
        let (kx, ky) = (self.dx * self.dx / 12.0, self.dy * self.dy / 12.0);
        let mut acc = 0.0;
        self.for_each_piece(poly, |cell, piece| {
            acc += match piece {
                Piece::Full => {
                    let d = cell.center - p;
                    cell.value * full * (d.norm_sq() + kx + ky)
                        + 2.0 * full * (d.x * cell.slope.x * kx + d.y * cell.slope.y * ky)
                }
                Piece::Partial(piece) => {
                    integrate_cubic(&piece, |q| (q - p).norm_sq() * cell.at(q))
                }
            };
        });
        acc
    }
}

fn cell_center(origin: Point2, dx: f64, dy: f64, i: usize, j: usize) -> Point2 {
    Point2::new(
        origin.x + (i as f64 + 0.5) * dx,
        origin.y + (j as f64 + 0.5) * dy,
    )
}

fn index_floor(t: f64, n: usize) -> usize {
    (t.floor().max(0.0) as usize).min(n)
}

fn index_ceil(t: f64, n: usize) -> usize {
    (t.ceil().max(0.0) as usize).min(n)
}

fn clip_strip(poly: &ConvexPolygon, y0: f64, y1: f64) -> Option<ConvexPolygon> {
    let lower = clip_halfplane(poly, Point2::new(0.0, y0), Point2::new(0.0, 1.0)).ok()??;
    clip_halfplane(&lower, Point2::new(0.0, y1), Point2::new(0.0, -1.0)).ok()?
}

fn clip_slab(poly: &ConvexPolygon, x0: f64, x1: f64) -> Option<ConvexPolygon> {
    let left = clip_halfplane(poly, Point2::new(x0, 0.0), Point2::new(1.0, 0.0)).ok()??;
    clip_halfplane(&left, Point2::new(x1, 0.0), Point2::new(-1.0, 0.0)).ok()?
}

/// x-extent of the horizontal chord of `poly` at height `y`.
fn slice_x(poly: &ConvexPolygon, y: f64) -> Option<(f64, f64)> {
    let v = poly.vertices();
    let n = v.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if a.y == y {
            lo = lo.min(a.x);
            hi = hi.max(a.x);
        }
        if (a.y - y) * (b.y - y) < 0.0 {
            let x = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Domain-attached quadrature grid holding unscaled density samples.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    samples: SampleGrid,
    kind: DensityKind,
    domain: ConvexPolygon,
}

impl QuadratureGrid {
    /// Samples `field` at the centers of an `nx × ny` grid over its domain's bounding box.
    pub fn new(field: &DensityField, nx: usize, ny: usize) -> Result<Self, DensityError> {
        if nx < MIN_GRID_RESOLUTION || ny < MIN_GRID_RESOLUTION {
            return Err(DensityError::GridTooCoarse { nx, ny });
        }
        let samples = SampleGrid::from_fn(field.domain.bounding_box(), nx, ny, |q| field.shape(q));
        Ok(Self {
            samples,
            kind: field.kind.clone(),
            domain: field.domain.clone(),
        })
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.samples.nx, self.samples.ny)
    }

    pub fn domain(&self) -> &ConvexPolygon {
        &self.domain
    }

    fn check(&self, field: &DensityField, poly: &ConvexPolygon) -> Result<(), DensityError> {
        if field.kind != self.kind || field.domain != self.domain {
            return Err(DensityError::FieldGridMismatch);
        }
        if poly
            .vertices()
            .iter()
            .any(|&v| !self.domain.contains(v, GEOMETRY_TOL))
        {
            return Err(DensityError::PolygonOutsideDomain);
        }
        Ok(())
    }

    pub(crate) fn raw_mass(&self, poly: &ConvexPolygon) -> f64 {
        self.samples.mass(poly)
    }

    pub(crate) fn raw_moments(&self, poly: &ConvexPolygon) -> (f64, Point2) {
        self.samples.moments(poly)
    }

    pub(crate) fn raw_second_moment(&self, poly: &ConvexPolygon, p: Point2) -> f64 {
        self.samples.second_moment(poly, p)
    }
}

/// `∫_poly φ`.
pub fn mass_over_polygon(
    field: &DensityField,
    poly: &ConvexPolygon,
    grid: &QuadratureGrid,
) -> Result<f64, DensityError> {
    grid.check(field, poly)?;
    Ok(field.normalization * grid.raw_mass(poly))
}

/// Total mass of `field` over its domain.
pub fn total_mass(field: &DensityField, grid: &QuadratureGrid) -> Result<f64, DensityError> {
    mass_over_polygon(field, field.domain(), grid)
}

/// Mass center of `poly` under `field`; `Ok(None)` when its mass is below [`NO_MASS`].
pub fn weighted_centroid(
    field: &DensityField,
    poly: &ConvexPolygon,
    grid: &QuadratureGrid,
) -> Result<Option<Point2>, DensityError> {
    grid.check(field, poly)?;
    let (raw_mass, raw_first) = grid.raw_moments(poly);
    if field.normalization * raw_mass < NO_MASS {
        return Ok(None);
    }
    Ok(Some(raw_first / raw_mass))
}

/// `∫_poly ‖q − p‖² φ(q) dq`.
pub fn second_moment_over_polygon(
    field: &DensityField,
    poly: &ConvexPolygon,
    p: Point2,
    grid: &QuadratureGrid,
) -> Result<f64, DensityError> {
    grid.check(field, poly)?;
    Ok(field.normalization * grid.raw_second_moment(poly, p))
}

/// Rescales `field` to unit total mass over its domain.
pub fn normalize(
    field: &DensityField,
    grid: &QuadratureGrid,
) -> Result<DensityField, DensityError> {
    let total = total_mass(field, grid)?;
    if !(total > 0.0) || !total.is_finite() {
        return Err(DensityError::ZeroMassField(total));
    }
    Ok(field.scaled(1.0 / total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)).unwrap()
    }

    fn paper_domain() -> ConvexPolygon {
        ConvexPolygon::rectangle(Point2::new(-1.6, -1.0), Point2::new(1.6, 1.0)).unwrap()
    }

    fn bump(domain: ConvexPolygon) -> DensityField {
        DensityField::gaussian_mixture(
            domain,
            vec![GaussianComponent {
                weight: 1.0,
                mean: Point2::new(0.5, 0.5),
                covariance: Covariance2::new(0.004, 0.001, 0.003).unwrap(),
            }],
        )
        .unwrap()
    }

    #[test]
    fn covariance_validation() {
        assert!(Covariance2::new(1.0, 0.0, 1.0).is_ok());
        assert_eq!(
            Covariance2::new(1.0, 1.0, 1.0),
            Err(DensityError::NonSpdCovariance)
        );
        assert_eq!(
            Covariance2::new(-1.0, 0.0, -1.0),
            Err(DensityError::NonSpdCovariance)
        );
        assert_eq!(
            Covariance2::new(f64::NAN, 0.0, 1.0),
            Err(DensityError::NonSpdCovariance)
        );
        let c = Covariance2::new(4.0, 0.0, 1.0).unwrap();
        assert!((c.max_std() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_normalizes_to_inverse_area() {
        let field = DensityField::uniform(paper_domain());
        let grid = QuadratureGrid::new(&field, 160, 100).unwrap();
        let field = normalize(&field, &grid).unwrap();
        let v = field.evaluate(Point2::new(0.3, -0.2)).unwrap();
        assert!((v - 1.0 / 6.4).abs() < 1e-12);
    }

    #[test]
    fn scaled_uniform_renormalizes() {
        let field = DensityField::uniform(unit_square()).scaled(7.0);
        let grid = QuadratureGrid::new(&field, 32, 32).unwrap();
        assert!((total_mass(&field, &grid).unwrap() - 7.0).abs() < 1e-12);
        let field = normalize(&field, &grid).unwrap();
        assert!((total_mass(&field, &grid).unwrap() - 1.0).abs() < 1e-12);
        assert!((field.normalization() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent() {
        let field = bump(unit_square());
        let grid = QuadratureGrid::new(&field, 64, 64).unwrap();
        let once = normalize(&field, &grid).unwrap();
        let twice = normalize(&once, &grid).unwrap();
        assert!(
            (once.normalization() - twice.normalization()).abs() <= 1e-9 * once.normalization()
        );
    }

    #[test]
    fn zero_mass_field_is_rejected() {
        let field = DensityField::uniform(unit_square()).scaled(0.0);
        let grid = QuadratureGrid::new(&field, 32, 32).unwrap();
        assert_eq!(
            normalize(&field, &grid),
            Err(DensityError::ZeroMassField(0.0))
        );
    }

    #[test]
    fn gaussian_peaks_at_its_mean() {
        let field = bump(unit_square());
        let at_mean = field.evaluate(Point2::new(0.5, 0.5)).unwrap();
        let far = field
            .evaluate(Point2::new(0.5 + 3.0 * 0.004f64.sqrt(), 0.5))
            .unwrap();
        assert!(at_mean > far);
    }

    #[test]
    fn evaluate_rejects_outside_points() {
        let field = DensityField::uniform(unit_square());
        assert!(matches!(
            field.evaluate(Point2::new(1.5, 0.5)),
            Err(DensityError::PointOutsideDomain(_))
        ));
    }

    #[test]
    fn half_domain_of_uniform_has_half_mass() {
        let field = DensityField::uniform(paper_domain());
        let grid = QuadratureGrid::new(&field, 160, 100).unwrap();
        let field = normalize(&field, &grid).unwrap();
        let left =
            ConvexPolygon::rectangle(Point2::new(-1.6, -1.0), Point2::new(0.0, 1.0)).unwrap();
        assert!((mass_over_polygon(&field, &left, &grid).unwrap() - 0.5).abs() < 1e-12);
        // a cut that does not align with grid lines
        let tilted = ConvexPolygon::new(vec![
            Point2::new(-1.6, -1.0),
            Point2::new(0.37, -1.0),
            Point2::new(-0.21, 1.0),
            Point2::new(-1.6, 1.0),
        ])
        .unwrap();
        let expected = tilted.area() / 6.4;
        assert!((mass_over_polygon(&field, &tilted, &grid).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn uniform_centroid_is_geometric_center() {
        let field = DensityField::uniform(unit_square());
        let grid = QuadratureGrid::new(&field, 32, 32).unwrap();
        let field = normalize(&field, &grid).unwrap();
        let c = weighted_centroid(&field, &unit_square(), &grid)
            .unwrap()
            .unwrap();
        assert!((c - Point2::new(0.5, 0.5)).norm() < 1e-12);
        let tri = ConvexPolygon::new(vec![
            Point2::new(0.05, 0.1),
            Point2::new(0.93, 0.2),
            Point2::new(0.4, 0.87),
        ])
        .unwrap();
        let c = weighted_centroid(&field, &tri, &grid).unwrap().unwrap();
        assert!((c - tri.geometric_center()).norm() < 1e-12);
    }

    #[test]
    fn compact_gaussian_centroid_is_its_mean() {
        let field = bump(unit_square());
        let grid = QuadratureGrid::new(&field, 200, 200).unwrap();
        let field = normalize(&field, &grid).unwrap();
        let c = weighted_centroid(&field, &unit_square(), &grid)
            .unwrap()
            .unwrap();
        assert!((c - Point2::new(0.5, 0.5)).norm() < 1e-3);
    }

    #[test]
    fn centroid_reports_no_mass() {
        let field = DensityField::gaussian_mixture(
            unit_square(),
            vec![GaussianComponent {
                weight: 1.0,
                mean: Point2::new(0.05, 0.05),
                covariance: Covariance2::isotropic(1e-4).unwrap(),
            }],
        )
        .unwrap();
        let grid = QuadratureGrid::new(&field, 64, 64).unwrap();
        let field = normalize(&field, &grid).unwrap();
        let corner =
            ConvexPolygon::rectangle(Point2::new(0.8, 0.8), Point2::new(1.0, 1.0)).unwrap();
        assert_eq!(weighted_centroid(&field, &corner, &grid), Ok(None));
    }

    #[test]
    fn grid_guards() {
        let field = DensityField::uniform(unit_square());
        assert!(matches!(
            QuadratureGrid::new(&field, 16, 64),
            Err(DensityError::GridTooCoarse { .. })
        ));
        let grid = QuadratureGrid::new(&field, 32, 32).unwrap();
        let other = bump(unit_square());
        assert_eq!(
            mass_over_polygon(&other, &unit_square(), &grid),
            Err(DensityError::FieldGridMismatch)
        );
        let outside =
            ConvexPolygon::rectangle(Point2::new(0.5, 0.5), Point2::new(1.5, 1.5)).unwrap();
        assert_eq!(
            mass_over_polygon(&field, &outside, &grid),
            Err(DensityError::PolygonOutsideDomain)
        );
    }

    #[test]
    fn second_moment_of_uniform_square() {
        let field = DensityField::uniform(unit_square());
        let grid = QuadratureGrid::new(&field, 40, 40).unwrap();
        let field = normalize(&field, &grid).unwrap();
        let tri = ConvexPolygon::new(vec![
            Point2::new(0.1, 0.1),
            Point2::new(0.9, 0.3),
            Point2::new(0.3, 0.8),
        ])
        .unwrap();
        let p = Point2::new(0.2, 0.6);
        let got = second_moment_over_polygon(&field, &tri, p, &grid).unwrap();
        assert!((got - tri.second_moment_about(p)).abs() < 1e-12);
    }

    #[test]
    fn mixture_validation() {
        let bad = GaussianComponent {
            weight: -1.0,
            mean: Point2::ORIGIN,
            covariance: Covariance2::isotropic(1.0).unwrap(),
        };
        assert!(matches!(
            DensityField::gaussian_mixture(unit_square(), vec![bad]),
            Err(DensityError::InvalidComponent { index: 0, .. })
        ));
        assert!(DensityField::gaussian_mixture(unit_square(), vec![]).is_err());
    }
}
