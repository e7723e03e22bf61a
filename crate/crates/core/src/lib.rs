//! Coverage control for heterogeneous air-ground robot teams.
//!
//! Aerial robots partition the ground domain into coarse Voronoi cells and
//! compare how many ground robots each cell holds against how much density
//! mass it contains. Ground robots blend a range-limited Lloyd step with a
//! pull toward the most under-served aerial cell.
//!
//! Modules, bottom-up:
//! - [`geometry`]: convex polygons, clipping and bounded Voronoi tessellation
//! - [`density`]: importance fields and grid quadrature
//! - [`controllers`]: Lloyd, range-limited Lloyd and the blended air-ground law
//! - [`sim`]: deterministic discrete-time engine and diagnostics
//! - [`metrics`]: coverage cost, sweeps and output files
//! - [`config`]: scenario files

pub mod config;
pub mod controllers;
pub mod density;
pub mod geometry;
pub mod metrics;
pub mod parallel;
pub mod sim;

pub use geometry::{ConvexPolygon, Point2, VoronoiDiagram};
pub use parallel::Execution;
