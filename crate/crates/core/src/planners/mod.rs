//! The six planners: the RAST family (RAST*-I/E, RAST*-I, RAST, RRST*), RIGT
//! and PSO.

pub mod pso;
pub mod rast;
pub mod rigt;
pub mod sampling;
pub mod tree;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::path::{FitnessResult, Task};
use crate::vehicle::VehicleModel;
use crate::{Error, Point3, Result};

pub use pso::{plan_pso, PsoConfig};
pub use rast::plan_rast_family;
pub use rigt::{plan_rigt, prune_dominated};
pub use sampling::{near, nearest, steer, tournament_sample, SpatialHash};
pub use tree::{NodeStats, Tree, TreeEvaluator, TreeNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "rast-ie")]
    RastIe,
    #[serde(rename = "rast-i")]
    RastI,
    #[serde(rename = "rast")]
    Rast,
    #[serde(rename = "rrst")]
    Rrst,
    #[serde(rename = "rigt")]
    Rigt,
    #[serde(rename = "pso")]
    Pso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::RastIe,
        Algorithm::RastI,
        Algorithm::Rast,
        Algorithm::Rrst,
        Algorithm::Rigt,
        Algorithm::Pso,
    ];

    /// Command-line / file name form.
    pub fn slug(self) -> &'static str {
        match self {
            Algorithm::RastIe => "rast-ie",
            Algorithm::RastI => "rast-i",
            Algorithm::Rast => "rast",
            Algorithm::Rrst => "rrst",
            Algorithm::Rigt => "rigt",
            Algorithm::Pso => "pso",
        }
    }

    /// Display name.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RastIe => "RAST*-I/E",
            Algorithm::RastI => "RAST*-I",
            Algorithm::Rast => "RAST",
            Algorithm::Rrst => "RRST*",
            Algorithm::Rigt => "RIGT",
            Algorithm::Pso => "PSO",
        }
    }

    pub fn index(self) -> usize {
        Algorithm::ALL.iter().position(|a| *a == self).expect("listed")
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.slug().eq_ignore_ascii_case(s) || a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// How `delta` and `r` are measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepUnits {
    /// Multiples of the workspace cell size.
    #[default]
    Cells,
    Meters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Tournament size.
    pub m: usize,
    pub delta: f64,
    pub r: f64,
    pub units: StepUnits,
    pub max_it: usize,
    pub it_stop: usize,
    /// Largest neighborhood evaluated per iteration; `null` for no limit.
    pub neighbor_cap: Option<usize>,
    /// Most branches RIGT grows per iteration, closest neighbors first.
    /// `null` removes the limit, which lets the tree double every iteration
    /// in dense regions.
    pub rigt_branches: Option<usize>,
    pub pso: PsoConfig,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            m: 10,
            delta: 5.0,
            r: 10.0,
            units: StepUnits::Cells,
            max_it: 5000,
            it_stop: 200,
            neighbor_cap: None,
            rigt_branches: Some(10),
            pso: PsoConfig::default(),
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("tournament size must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) || !(self.r >= self.delta && self.r.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < delta <= r, got delta {} and r {}",
                self.delta, self.r
            )));
        }
        if self.max_it == 0 || self.it_stop >= self.max_it {
            return Err(Error::Config(format!(
                "need 0 < it_stop < max_it, got {} and {}",
                self.it_stop, self.max_it
            )));
        }
        if self.neighbor_cap == Some(0) || self.rigt_branches == Some(0) {
            return Err(Error::Config("neighbor caps must be positive".into()));
        }
        self.pso.validate()
    }

    fn to_meters(&self, v: f64, cell: f64) -> f64 {
        match self.units {
            StepUnits::Cells => v * cell,
            StepUnits::Meters => v,
        }
    }

    pub fn delta_m(&self, cell: f64) -> f64 {
        self.to_meters(self.delta, cell)
    }

    pub fn r_m(&self, cell: f64) -> f64 {
        self.to_meters(self.r, cell)
    }
}

/// Outcome of one planner run.
#[derive(Clone, Debug)]
pub struct PlannerResult {
    pub algorithm: Algorithm,
    /// Best feasible path re-evaluated from scratch, if one was found.
    pub best: Option<FitnessResult>,
    /// Control polyline of the best path (empty when none was found).
    pub best_control: Vec<Point3>,
    pub best_ig: f64,
    /// Best-so-far objective after each iteration.
    pub bestsol: Vec<f64>,
    pub iterations: usize,
    pub wall_time: f64,
    /// Tree nodes or swarm evaluations, for diagnostics.
    pub size: usize,
}

/// Termination test after iteration `it` (1-based), with `bestsol` holding
/// one entry per finished iteration.
pub fn should_stop(bestsol: &[f64], max_it: usize, it_stop: usize) -> bool {
    let it = bestsol.len();
    it >= max_it || (it > it_stop && bestsol[it - 1] == bestsol[it - 1 - it_stop])
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn finish_result(
    algorithm: Algorithm,
    best: Option<(f64, Vec<Point3>)>,
    bestsol: Vec<f64>,
    started: Instant,
    size: usize,
    task: &Task,
    env: &Environment,
    model: &VehicleModel,
) -> Result<PlannerResult> {
    let iterations = bestsol.len();
    let (best_ig, best, best_control) = match best {
        Some((ig, control)) => {
            let full = crate::path::evaluate_fitness(&control, task, env, model)?;
            (ig, Some(full), control)
        }
        None => (0.0, None, Vec::new()),
    };
    Ok(PlannerResult {
        algorithm,
        best,
        best_control,
        best_ig,
        bestsol,
        iterations,
        wall_time: started.elapsed().as_secs_f64(),
        size,
    })
}

/// Runs `algorithm` with the given seed.
pub fn plan(
    algorithm: Algorithm,
    env: &Environment,
    model: &VehicleModel,
    task: &Task,
    config: &PlannerConfig,
    seed: u64,
) -> Result<PlannerResult> {
    config.validate()?;
    model.validate()?;
    task.validate(env)?;
    match algorithm {
        Algorithm::Rigt => plan_rigt(env, model, task, config, seed),
        Algorithm::Pso => plan_pso(env, model, task, config, seed),
        _ => plan_rast_family(algorithm, env, model, task, config, seed),
    }
}
