//! Exact-arithmetic engine for symplectic billiards in convex polygons.
//!
//! - [`geometry`]: rational points, polygon validation, phase area and the
//!   difference body.
//! - [`billiard`]: the map, its inverse, orbits, float mode, stability.
//! - [`tiling`]: tile decomposition of phase space and periodicity
//!   certificates with an independent checker.
//! - [`families`]: constructors for the tables studied here.
//! - [`portrait`]: period-colored phase portraits.
//! - [`scan`]: parameter sweeps and the kite search.
//! - [`reproduce`]: the full set of reproduction checks.

pub mod affine;
pub mod billiard;
pub mod error;
pub mod families;
pub mod geometry;
pub mod portrait;
pub mod rational;
pub mod reproduce;
pub mod scan;
pub mod tiling;

pub use billiard::{BilliardMap, HaltReason, OrbitOptions, OrbitReport, OrbitStatus, PhasePoint, StepResult};
pub use geometry::{cross, difference_body, phase_area, Point, Polygon, PolygonSpec};
pub use rational::Rat;
pub use tiling::{certify, Budget, PeriodicityCertificate, TileOrbit, TileRect};
