//! Simulation and verification laboratory for planar directed last-passage
//! percolation (the corner growth model).
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: sites, boxes, up-right paths and southeast orders;
//! - [`weights`]: seeded i.i.d. weight fields with per-site keyed randomness;
//! - [`lpp`]: passage times, rightmost/leftmost geodesics, geodesic trees and
//!   a brute-force enumeration oracle;
//! - [`cocycle`]: recovering cocycles on boxes, their checks, order, tilt and
//!   cocycle geodesics;
//! - [`stationary`]: the exactly solvable exponential case used as a
//!   quantitative oracle;
//! - [`quantile`]: quantile paths of explicit measures on geodesic trees;
//! - [`experiments`]: seeded campaigns producing CSV reports.

pub mod cocycle;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod lattice;
pub mod lpp;
pub mod quantile;
pub mod rng;
pub mod stationary;
pub mod stats;
pub mod tolerances;
pub mod weights;

pub use error::{Error, Result};
pub use lattice::{BoxRegion, FinitePath, Order, Site, Step};
pub use weights::{WeightDistribution, WeightField};
