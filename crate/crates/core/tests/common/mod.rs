//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's quadrature or clipping code: every
//! oracle works from point samples and brute-force distance comparisons.

#![allow(dead_code)]

use hetcov::density::{normalize, Covariance2, DensityField, GaussianComponent, QuadratureGrid};
use hetcov::geometry::{ConvexPolygon, Point2};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn paper_domain() -> ConvexPolygon {
    ConvexPolygon::rectangle(Point2::new(-1.6, -1.0), Point2::new(1.6, 1.0)).unwrap()
}

pub fn unit_square() -> ConvexPolygon {
    ConvexPolygon::rectangle(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)).unwrap()
}

pub fn point_in(rng: &mut impl Rng, poly: &ConvexPolygon) -> Point2 {
    let bb = poly.bounding_box();
    loop {
        let p = Point2::new(
            rng.random_range(bb.min.x..bb.max.x),
            rng.random_range(bb.min.y..bb.max.y),
        );
        if poly.contains(p, 0.0) {
            return p;
        }
    }
}

/// Distinct random sites, at least `min_gap` apart.
pub fn sites(rng: &mut impl Rng, poly: &ConvexPolygon, n: usize, min_gap: f64) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(n);
    while out.len() < n {
        let p = point_in(rng, poly);
        if out.iter().all(|q| q.distance(p) > min_gap) {
            out.push(p);
        }
    }
    out
}

/// Two-component mixture with random weights, means and (possibly
/// correlated) covariances, normalized on a grid of the given size.
pub fn random_bimodal(
    rng: &mut impl Rng,
    domain: &ConvexPolygon,
    nx: usize,
    ny: usize,
) -> (DensityField, QuadratureGrid) {
    let components = (0..2)
        .map(|_| {
            let sx = rng.random_range(0.15..0.45f64);
            let sy = rng.random_range(0.15..0.45f64);
            let rho = rng.random_range(-0.6..0.6);
            GaussianComponent {
                weight: rng.random_range(0.2..1.0),
                mean: point_in(rng, domain),
                covariance: Covariance2::new(sx * sx, rho * sx * sy, sy * sy).unwrap(),
            }
        })
        .collect();
    let raw = DensityField::gaussian_mixture(domain.clone(), components).unwrap();
    let grid = QuadratureGrid::new(&raw, nx, ny).unwrap();
    (normalize(&raw, &grid).unwrap(), grid)
}

/// Brute-force nearest site; returns the index and the gap to the runner-up.
pub fn nearest_with_gap(sites: &[Point2], q: Point2) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (i, s) in sites.iter().enumerate() {
        let d = s.distance(q);
        if d < best.1 {
            second = best.1;
            best = (i, d);
        } else if d < second {
            second = d;
        }
    }
    (best.0, second - best.1)
}

/// Midpoints of an `n × n` grid over the bounding box of `poly`.
pub fn midpoints(poly: &ConvexPolygon, n: usize) -> impl Iterator<Item = (Point2, f64)> + '_ {
    let bb = poly.bounding_box();
    let (hx, hy) = (bb.width() / n as f64, bb.height() / n as f64);
    (0..n * n).map(move |k| {
        let (i, j) = (k % n, k / n);
        (
            Point2::new(
                bb.min.x + (i as f64 + 0.5) * hx,
                bb.min.y + (j as f64 + 0.5) * hy,
            ),
            hx * hy,
        )
    })
}

/// Area by point-membership fraction of the bounding box.
pub fn membership_area(poly: &ConvexPolygon, n: usize) -> f64 {
    midpoints(poly, n)
        .filter(|(q, _)| poly.contains(*q, 0.0))
        .map(|(_, w)| w)
        .sum()
}

/// Whether `q` lies in the regular `sides`-gon inscribed in disc `(c, r)`
/// with a vertex at angle zero.
pub fn in_inscribed_polygon(q: Point2, c: Point2, r: f64, sides: usize) -> bool {
    let d = q - c;
    let step = std::f64::consts::TAU / sides as f64;
    let theta = d.y.atan2(d.x).rem_euclid(std::f64::consts::TAU);
    let mid = ((theta / step).floor() + 0.5) * step;
    d.x * mid.cos() + d.y * mid.sin() <= r * (0.5 * step).cos()
}

/// Area of `poly ∩ inscribed sides-gon` by point membership over the
/// overlap of the two bounding boxes.
pub fn disc_membership_area(
    poly: &ConvexPolygon,
    c: Point2,
    r: f64,
    sides: usize,
    n: usize,
) -> f64 {
    let bb = poly.bounding_box();
    let lo = Point2::new(bb.min.x.max(c.x - r), bb.min.y.max(c.y - r));
    let hi = Point2::new(bb.max.x.min(c.x + r), bb.max.y.min(c.y + r));
    let window = ConvexPolygon::rectangle(lo, hi).unwrap();
    midpoints(&window, n)
        .filter(|(q, _)| in_inscribed_polygon(*q, c, r, sides) && poly.contains(*q, 0.0))
        .map(|(_, w)| w)
        .sum()
}

/// Mass and mass center of `field` over `poly` by the masked midpoint rule.
pub fn midpoint_moments(field: &DensityField, poly: &ConvexPolygon, n: usize) -> (f64, Point2) {
    let mut mass = 0.0;
    let mut first = Point2::ORIGIN;
    for (q, w) in midpoints(poly, n) {
        if poly.contains(q, 0.0) {
            let v = field.evaluate(q).unwrap() * w;
            mass += v;
            first += q * v;
        }
    }
    (mass, first / mass)
}

/// `∫_poly ‖q − p‖² φ` by the masked midpoint rule.
pub fn midpoint_second_moment(
    field: &DensityField,
    poly: &ConvexPolygon,
    p: Point2,
    n: usize,
) -> f64 {
    midpoints(poly, n)
        .filter(|(q, _)| poly.contains(*q, 0.0))
        .map(|(q, w)| (q - p).norm_sq() * field.evaluate(q).unwrap() * w)
        .sum()
}

/// Cost of a configuration with each sample assigned to its nearest robot.
pub fn brute_force_cost(field: &DensityField, positions: &[Point2], n: usize) -> f64 {
    midpoints(field.domain(), n)
        .map(|(q, w)| {
            let (i, _) = nearest_with_gap(positions, q);
            (q - positions[i]).norm_sq() * field.evaluate(q).unwrap() * w
        })
        .sum()
}
