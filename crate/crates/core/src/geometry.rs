//! Planar primitives: points, convex polygons, half-plane and disc clipping,
//! and bounded Voronoi tessellation of a convex domain.
//!
//! Cells are built by clipping the domain with the perpendicular-bisector
//! half-plane of every competing site, which is O(M²) per tessellation and
//! exact up to floating point for the small site counts used here.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use thiserror::Error;

/// Polygons whose area falls below this are treated as empty.
pub const DEGENERATE_AREA: f64 = 1e-12;
/// Collinearity / containment slack for vertex tests, in meters.
pub const GEOMETRY_TOL: f64 = 1e-9;
/// Sites closer than this are considered duplicates.
pub const DUPLICATE_SITE_TOL: f64 = 1e-9;
/// Default number of sides of the inscribed polygon that stands in for a disc.
pub const DEFAULT_ARC_SEGMENTS: usize = 64;
/// Fewest sides accepted for a disc approximation.
pub const MIN_ARC_SEGMENTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
    #[error("polygon is degenerate (area {0:e})")]
    DegeneratePolygon(f64),
    #[error("polygon is not convex at vertex {0}")]
    NotConvex(usize),
    #[error("half-plane normal is zero")]
    ZeroNormal,
    #[error("disc radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("disc approximation needs at least {MIN_ARC_SEGMENTS} segments, got {0}")]
    TooFewArcSegments(usize),
    #[error("no sites to tessellate")]
    EmptySites,
    #[error("site {index} at {site} lies outside the domain")]
    SiteOutsideDomain { index: usize, site: Point2 },
    #[error("sites {first} and {second} coincide")]
    DuplicateSites { first: usize, second: usize },
    #[error("Voronoi cell {0} collapsed to zero area")]
    DegenerateCell(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Rescales the vector so its length does not exceed `max_len`.
    pub fn clamp_norm(self, max_len: f64) -> Point2 {
        let n = self.norm();
        if n > max_len && n > 0.0 {
            self * (max_len / n)
        } else {
            self
        }
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, rhs: Point2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point2 {
    type Output = Point2;
    fn div(self, s: f64) -> Point2 {
        Point2::new(self.x / s, self.y / s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }
}

/// A convex polygon with counter-clockwise vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Validates and stores a vertex loop. Clockwise input is reversed.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("polygon vertex"));
        }
        let signed = signed_area(&vertices);
        if signed.abs() <= DEGENERATE_AREA {
            return Err(GeometryError::DegeneratePolygon(signed.abs()));
        }
        if signed < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let edge = b - a;
            let len = edge.norm();
            if len == 0.0 {
                continue;
            }
            // signed distance of c from the supporting line of a->b
            if edge.cross(c - a) / len < -GEOMETRY_TOL {
                return Err(GeometryError::NotConvex((i + 1) % n));
            }
        }
        Ok(Self { vertices })
    }

    /// Rectangle spanning `min`..`max`.
    pub fn rectangle(min: Point2, max: Point2) -> Result<Self, GeometryError> {
        Self::new(vec![
            min,
            Point2::new(max.x, min.y),
            max,
            Point2::new(min.x, max.y),
        ])
    }

    /// Skips validation; used for clip results whose convexity follows from construction.
    fn from_clipped(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Uniform-density centroid.
    pub fn geometric_center(&self) -> Point2 {
        // Shift to the first vertex to limit cancellation on far-from-origin polygons.
        let origin = self.vertices[0];
        let mut twice_area = 0.0;
        let mut acc = Point2::ORIGIN;
        for (a, b) in self.edges() {
            let (a, b) = (a - origin, b - origin);
            let c = a.cross(b);
            twice_area += c;
            acc += (a + b) * c;
        }
        origin + acc / (3.0 * twice_area)
    }

    /// `∫_P ‖q − p‖² dq`, the polar second moment about `p`.
    pub fn second_moment_about(&self, p: Point2) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.edges() {
            let (a, b) = (a - p, b - p);
            let c = a.cross(b);
            acc += c * (a.x * a.x + a.x * b.x + b.x * b.x + a.y * a.y + a.y * b.y + b.y * b.y);
        }
        acc / 12.0
    }

    /// Boundary-inclusive containment with slack `tol` (meters).
    pub fn contains(&self, q: Point2, tol: f64) -> bool {
        self.edges().all(|(a, b)| {
            let edge = b - a;
            let len = edge.norm();
            len == 0.0 || edge.cross(q - a) / len >= -tol
        })
    }

    pub fn bounding_box(&self) -> Aabb {
        let mut min = self.vertices[0];
        let mut max = self.vertices[0];
        for v in &self.vertices[1..] {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        Aabb { min, max }
    }

    pub fn translated(&self, offset: Point2) -> ConvexPolygon {
        Self::from_clipped(self.vertices.iter().map(|&v| v + offset).collect())
    }

    /// Closest point of the polygon to `q` (q itself when inside).
    pub fn project(&self, q: Point2) -> Point2 {
        if self.contains(q, 0.0) {
            return q;
        }
        let mut best = self.vertices[0];
        let mut best_d = f64::INFINITY;
        for (a, b) in self.edges() {
            let ab = b - a;
            let t = ((q - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
            let c = a + ab * t;
            let d = (q - c).norm_sq();
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        best
    }
}

fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let origin = vertices[0];
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i] - origin;
        let b = vertices[(i + 1) % n] - origin;
        acc += a.cross(b);
    }
    0.5 * acc
}

/// Intersects `poly` with `{q : ⟨q − boundary_point, inward_normal⟩ ≥ 0}`.
///
/// Returns `Ok(None)` when the remainder has area below [`DEGENERATE_AREA`].
pub fn clip_halfplane(
    poly: &ConvexPolygon,
    boundary_point: Point2,
    inward_normal: Point2,
) -> Result<Option<ConvexPolygon>, GeometryError> {
    if !inward_normal.is_finite() || !boundary_point.is_finite() {
        return Err(GeometryError::NonFinite("half-plane"));
    }
    if inward_normal.norm_sq() == 0.0 {
        return Err(GeometryError::ZeroNormal);
    }
    Ok(clip_unchecked(poly, boundary_point, inward_normal))
}

fn clip_unchecked(poly: &ConvexPolygon, at: Point2, normal: Point2) -> Option<ConvexPolygon> {
    let verts = poly.vertices();
    let dist: Vec<f64> = verts.iter().map(|&v| (v - at).dot(normal)).collect();
    if dist.iter().all(|&d| d >= 0.0) {
        return Some(poly.clone());
    }
    if dist.iter().all(|&d| d <= 0.0) {
        return None;
    }
    let n = verts.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (verts[i], verts[j]);
        let (da, db) = (dist[i], dist[j]);
        if da >= 0.0 {
            out.push(a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            let t = da / (da - db);
            out.push(a + (b - a) * t);
        }
    }
    dedup_ring(&mut out);
    if out.len() < 3 {
        return None;
    }
    let clipped = ConvexPolygon::from_clipped(out);
    (clipped.area() >= DEGENERATE_AREA).then_some(clipped)
}

fn dedup_ring(points: &mut Vec<Point2>) {
    const EPS_SQ: f64 = 1e-24;
    points.dedup_by(|b, a| (*a - *b).norm_sq() <= EPS_SQ);
    while points.len() > 1 && (points[0] - points[points.len() - 1]).norm_sq() <= EPS_SQ {
        points.pop();
    }
}

/// Intersects `poly` with the regular `arc_segments`-gon inscribed in the disc.
pub fn clip_polygon_to_disc(
    poly: &ConvexPolygon,
    center: Point2,
    radius: f64,
    arc_segments: usize,
) -> Result<Option<ConvexPolygon>, GeometryError> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GeometryError::NonPositiveRadius(radius));
    }
    if arc_segments < MIN_ARC_SEGMENTS {
        return Err(GeometryError::TooFewArcSegments(arc_segments));
    }
    if !center.is_finite() {
        return Err(GeometryError::NonFinite("disc center"));
    }
    let vertex = |k: usize| {
        let theta = 2.0 * PI * (k % arc_segments) as f64 / arc_segments as f64;
        center + Point2::new(theta.cos(), theta.sin()) * radius
    };
    let mut current = poly.clone();
    for k in 0..arc_segments {
        let a = vertex(k);
        let b = vertex(k + 1);
        let inward = center - a.midpoint(b);
        match clip_unchecked(&current, a, inward) {
            Some(next) => current = next,
            None => return Ok(None),
        }
    }
    Ok(Some(current))
}

/// Bounded Voronoi partition of a convex domain.
#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiDiagram {
    sites: Vec<Point2>,
    cells: Vec<ConvexPolygon>,
    domain: ConvexPolygon,
}

impl VoronoiDiagram {
    pub fn sites(&self) -> &[Point2] {
        &self.sites
    }

    pub fn cells(&self) -> &[ConvexPolygon] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &ConvexPolygon {
        &self.cells[index]
    }

    pub fn domain(&self) -> &ConvexPolygon {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Lowest-indexed cell containing `q` within [`GEOMETRY_TOL`].
    pub fn locate(&self, q: Point2) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(q, GEOMETRY_TOL))
    }

    /// Index of the nearest site; ties go to the lower index.
    pub fn nearest_site(&self, q: Point2) -> usize {
        nearest_site(&self.sites, q)
    }
}

pub(crate) fn nearest_site(sites: &[Point2], q: Point2) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in sites.iter().enumerate() {
        let d = (q - *s).norm_sq();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Voronoi tessellation of `domain` by `sites`.
pub fn voronoi_tessellate(
    sites: &[Point2],
    domain: &ConvexPolygon,
) -> Result<VoronoiDiagram, GeometryError> {
    if sites.is_empty() {
        return Err(GeometryError::EmptySites);
    }
    for (index, &site) in sites.iter().enumerate() {
        if !site.is_finite() || !domain.contains(site, GEOMETRY_TOL) {
            return Err(GeometryError::SiteOutsideDomain { index, site });
        }
    }
    for i in 0..sites.len() {
        for j in (i + 1)..sites.len() {
            if sites[i].distance(sites[j]) <= DUPLICATE_SITE_TOL {
                return Err(GeometryError::DuplicateSites {
                    first: i,
                    second: j,
                });
            }
        }
    }
    let cells = (0..sites.len())
        .map(|i| voronoi_cell(sites, i, domain).ok_or(GeometryError::DegenerateCell(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VoronoiDiagram {
        sites: sites.to_vec(),
        cells,
        domain: domain.clone(),
    })
}

fn voronoi_cell(sites: &[Point2], i: usize, domain: &ConvexPolygon) -> Option<ConvexPolygon> {
    let site = sites[i];
    // Nearest competitors first: they cut the most and shrink later clips.
    let mut others: Vec<usize> = (0..sites.len()).filter(|&j| j != i).collect();
    others.sort_by(|&a, &b| {
        (sites[a] - site)
            .norm_sq()
            .total_cmp(&(sites[b] - site).norm_sq())
            .then(a.cmp(&b))
    });
    let mut cell = domain.clone();
    for j in others {
        let other = sites[j];
        cell = clip_unchecked(&cell, site.midpoint(other), site - other)?;
    }
    Some(cell)
}
