//! Repeated planner trials over one scenario.

use rayon::prelude::*;

use super::check::{check_path, CheckReport};
use crate::env::{Environment, Medium};
use crate::path::{path_profile, Task};
use crate::planners::{plan, Algorithm, PlannerConfig, PlannerResult};
use crate::vehicle::VehicleModel;
use crate::{Point3, Result};

/// SplitMix64 finalizer, a bijection on `u64`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of repetition `rep` of `algorithm`. Distinct (algorithm, rep) pairs
/// with `rep < 2^32` get distinct seeds.
pub fn child_seed(base: u64, algorithm: Algorithm, rep: usize) -> u64 {
    let key = ((algorithm.index() as u64) << 32) | (rep as u64 & 0xFFFF_FFFF);
    splitmix64(base.wrapping_add(splitmix64(key)))
}

/// One row of an exported path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathRow {
    pub position: Point3,
    pub medium: Medium,
    pub cum_time: f64,
    pub cum_energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub scenario: u32,
    pub algorithm: Algorithm,
    pub repetition: usize,
    pub seed: u64,
    pub best_ig: f64,
    pub iterations: usize,
    /// Energy (in units of the budget) and mission time of the best path.
    pub energy: Option<f64>,
    pub time: Option<f64>,
    pub wall_time: f64,
    pub bestsol: Vec<f64>,
    pub control: Vec<Point3>,
    pub path: Vec<PathRow>,
    pub check: Option<CheckReport>,
    /// Planner failure (PSO initialization), recorded instead of aborting.
    pub error: Option<String>,
}

impl RunRecord {
    pub fn has_path(&self) -> bool {
        !self.path.is_empty()
    }

    pub fn path_file(&self) -> Option<String> {
        self.has_path()
            .then(|| format!("path_{}_{}.csv", self.algorithm.slug(), self.seed))
    }

    pub fn bestsol_file(&self) -> String {
        format!("bestsol_{}_{}.csv", self.algorithm.slug(), self.seed)
    }
}

/// Turns a planner result into a record, re-checking the best path.
pub fn record_from_result(
    scenario: u32,
    repetition: usize,
    seed: u64,
    result: &PlannerResult,
    task: &Task,
    env: &Environment,
    model: &VehicleModel,
) -> Result<RunRecord> {
    let (energy, time, path, check) = match &result.best {
        Some(best) => {
            let energy = best.e / model.vehicle.e_max;
            let profile = path_profile(&best.path, env, &model.vehicle);
            let rows = best
                .path
                .samples()
                .iter()
                .zip(&profile)
                .map(|(s, p)| {
                    let (t, e) = p.unwrap_or((f64::NAN, f64::NAN));
                    PathRow {
                        position: s.position,
                        medium: s.medium,
                        cum_time: t,
                        cum_energy: e / model.vehicle.e_max,
                    }
                })
                .collect();
            let points: Vec<Point3> = best.path.positions().collect();
            let check = check_path(&points, task, env, &model.vehicle)?;
            (Some(energy), Some(best.t), rows, Some(check))
        }
        None => (None, None, Vec::new(), None),
    };
    Ok(RunRecord {
        scenario,
        algorithm: result.algorithm,
        repetition,
        seed,
        best_ig: result.best_ig,
        iterations: result.iterations,
        energy,
        time,
        wall_time: result.wall_time,
        bestsol: result.bestsol.clone(),
        control: result.best_control.clone(),
        path,
        check,
        error: None,
    })
}

fn failed_record(scenario: u32, algorithm: Algorithm, repetition: usize, seed: u64, error: String) -> RunRecord {
    RunRecord {
        scenario,
        algorithm,
        repetition,
        seed,
        best_ig: 0.0,
        iterations: 0,
        energy: None,
        time: None,
        wall_time: 0.0,
        bestsol: Vec::new(),
        control: Vec::new(),
        path: Vec::new(),
        check: None,
        error: Some(error),
    }
}

/// One trial; planner errors become failed records.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    scenario: u32,
    algorithm: Algorithm,
    repetition: usize,
    seed: u64,
    env: &Environment,
    model: &VehicleModel,
    task: &Task,
    config: &PlannerConfig,
) -> Result<RunRecord> {
    match plan(algorithm, env, model, task, config, seed) {
        Ok(result) => record_from_result(scenario, repetition, seed, &result, task, env, model),
        Err(e) => Ok(failed_record(scenario, algorithm, repetition, seed, e.to_string())),
    }
}

/// Runs every algorithm `repetitions` times, concurrently. Records come back
/// ordered by algorithm, then repetition.
#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    scenario: u32,
    algorithms: &[Algorithm],
    repetitions: usize,
    base_seed: u64,
    env: &Environment,
    model: &VehicleModel,
    task: &Task,
    config: &PlannerConfig,
) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let jobs: Vec<(Algorithm, usize)> = algorithms
        .iter()
        .flat_map(|&a| (0..repetitions).map(move |r| (a, r)))
        .collect();
    jobs.par_iter()
        .map(|&(a, r)| run_trial(scenario, a, r, child_seed(base_seed, a, r), env, model, task, config))
        .collect()
}

/// Runs a scenario spec end to end.
pub fn run_scenario(
    spec: &super::ScenarioSpec,
    model: &VehicleModel,
    config: &PlannerConfig,
) -> Result<(Environment, Vec<RunRecord>)> {
    let env = spec.build_environment()?;
    let records = run_trials(
        spec.id,
        &spec.algorithms,
        spec.repetitions,
        spec.base_seed,
        &env,
        model,
        &spec.task,
        config,
    )?;
    Ok((env, records))
}
