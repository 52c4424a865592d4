//! Deterministic 2D micro-simulator for vehicle / e-scooter interactions.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod escooter;
pub mod experiment;
pub mod geom2d;
pub mod presets;
pub mod render;
pub mod scenario_io;
pub mod simulation;
pub mod trajectory_log;
pub mod vehicle;

pub use error::{Error, Result};
