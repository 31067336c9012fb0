//! Information-driven path planning for a hybrid aerial-underwater vehicle.
//!
//! The crate models a 3D air-sea workspace (a Gaussian-mixture information
//! map, a layered Lamb-vortex wind/current field and obstacles), the vehicle
//! (sensor, speed synthesis under ambient flow, energy and time budgets) and
//! six planners that search for a smooth, budget-feasible path maximizing the
//! weighted information collected along it:
//!
//! * `RAST*-I/E`, `RAST*-I`, `RAST` and `RRST*`: tournament-sampled trees
//!   with information-heuristic parent selection ([`planners::rast`]).
//! * `RIGT`: an information gathering tree with dominance pruning
//!   ([`planners::rigt`]).
//! * `PSO`: particle swarm over spline control points ([`planners::pso`]).
//!
//! The [`bench`] module holds the scenario definitions, the repeated-trial
//! harness, metrics and result emission used by the `hauv-ipp` binary.

pub mod bench;
pub mod config;
pub mod env;
pub mod error;
pub mod ingest;
pub mod path;
pub mod planners;
pub mod vehicle;

pub use error::{Error, Result};

/// A position or vector in workspace coordinates (meters).
pub type Point3 = nalgebra::Vector3<f64>;
