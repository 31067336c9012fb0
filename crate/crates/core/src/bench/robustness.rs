//! Win counts over randomly generated maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::runner::{child_seed, splitmix64};
use crate::env::{generate_random_environment, Environment, EnvironmentConfig};
use crate::path::Task;
use crate::planners::{plan, Algorithm, PlannerConfig};
use crate::vehicle::VehicleModel;
use crate::{Error, Point3, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustnessFamily {
    /// Energy budget only.
    Unbounded,
    /// Mission time uniform in [1 h, 3 h].
    TimeWindow,
    /// Three hours, with integer information weights drawn from 1 to 5.
    Weighted,
}

impl RobustnessFamily {
    pub const ALL: [RobustnessFamily; 3] = [
        RobustnessFamily::Unbounded,
        RobustnessFamily::TimeWindow,
        RobustnessFamily::Weighted,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for RobustnessFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "unbounded" => Ok(RobustnessFamily::Unbounded),
            "2" | "time-window" => Ok(RobustnessFamily::TimeWindow),
            "3" | "weighted" => Ok(RobustnessFamily::Weighted),
            _ => Err(Error::Config(format!(
                "unknown robustness family {s:?}; use 1/unbounded, 2/time-window or 3/weighted"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustnessConfig {
    pub family: RobustnessFamily,
    pub maps: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Template for the random maps; kappa weights are overridden in the
    /// weighted family.
    pub environment: EnvironmentConfig,
    /// Smallest start-goal separation (m).
    pub min_separation: f64,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            family: RobustnessFamily::Unbounded,
            maps: 100,
            base_seed: 5000,
            algorithms: Algorithm::ALL.to_vec(),
            environment: EnvironmentConfig::default(),
            min_separation: 1000.0,
        }
    }
}

/// The randomized setting of one map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSetting {
    pub map: usize,
    pub seed: u64,
    pub task: Task,
    pub kappa_air: f64,
    pub kappa_sea: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapOutcome {
    pub setting: MapSetting,
    pub environment_fingerprint: u64,
    /// Best information per algorithm, in config order; 0 for no path or a
    /// failed run.
    pub best_ig: Vec<(Algorithm, f64)>,
    /// Algorithms sharing the top score; empty when excluded.
    pub winners: Vec<Algorithm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub family: RobustnessFamily,
    pub wins: Vec<(Algorithm, f64)>,
    /// Maps where no algorithm found a feasible path.
    pub excluded: Vec<usize>,
    pub maps: Vec<MapOutcome>,
}

impl RobustnessReport {
    /// Algorithms with the strictly largest win count (several on a tie).
    pub fn leaders(&self) -> Vec<Algorithm> {
        let top = self.wins.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
        self.wins.iter().filter(|w| w.1 == top).map(|w| w.0).collect()
    }
}

/// Draws the task and weights of map `map`.
pub fn map_setting(config: &RobustnessConfig, map: usize) -> Result<MapSetting> {
    let seed = splitmix64(config.base_seed ^ splitmix64(map as u64 ^ ((config.family.index() as u64) << 40)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let ws = crate::env::Workspace::try_from(config.environment.workspace.clone())?;
    let (lo, hi) = ws.bounds();
    let margin = 5.0 * ws.cell();
    let endpoint = |rng: &mut ChaCha8Rng| {
        Point3::new(rng.gen_range(lo.x + margin..hi.x - margin), rng.gen_range(lo.y + margin..hi.y - margin), 0.0)
    };
    let q_init = endpoint(&mut rng);
    let mut q_final = endpoint(&mut rng);
    let mut tries = 0;
    while (q_final - q_init).norm() < config.min_separation {
        q_final = endpoint(&mut rng);
        tries += 1;
        if tries > 10_000 {
            return Err(Error::Config("workspace too small for the start-goal separation".into()));
        }
    }
    let (t_max, kappa_air, kappa_sea) = match config.family {
        RobustnessFamily::Unbounded => (f64::INFINITY, config.environment.kappa_air, config.environment.kappa_sea),
        RobustnessFamily::TimeWindow => (
            rng.gen_range(3600.0..=10_800.0),
            config.environment.kappa_air,
            config.environment.kappa_sea,
        ),
        RobustnessFamily::Weighted => (
            10_800.0,
            rng.gen_range(1..=5) as f64,
            rng.gen_range(1..=5) as f64,
        ),
    };
    Ok(MapSetting {
        map,
        seed,
        task: Task::new(q_init, q_final, t_max),
        kappa_air,
        kappa_sea,
    })
}

/// The environment of a map; identical for every algorithm.
pub fn map_environment(config: &RobustnessConfig, setting: &MapSetting) -> Result<Environment> {
    let env = generate_random_environment(setting.seed, &config.environment)?;
    env.with_kappa(setting.kappa_air, setting.kappa_sea)
}

/// Splits each map's point among the top scorers; maps where every score is
/// zero are excluded.
pub fn tally(family: RobustnessFamily, algorithms: &[Algorithm], maps: Vec<MapOutcome>) -> RobustnessReport {
    let mut wins: Vec<(Algorithm, f64)> = algorithms.iter().map(|&a| (a, 0.0)).collect();
    let mut excluded = Vec::new();
    for m in &maps {
        if m.winners.is_empty() {
            excluded.push(m.setting.map);
            continue;
        }
        let share = 1.0 / m.winners.len() as f64;
        for w in &m.winners {
            if let Some(slot) = wins.iter_mut().find(|x| x.0 == *w) {
                slot.1 += share;
            }
        }
    }
    RobustnessReport {
        family,
        wins,
        excluded,
        maps,
    }
}

fn winners(scores: &[(Algorithm, f64)]) -> Vec<Algorithm> {
    let top = scores.iter().map(|s| s.1).fold(0.0, f64::max);
    if top <= 0.0 {
        return Vec::new();
    }
    scores.iter().filter(|s| s.1 == top).map(|s| s.0).collect()
}

/// Runs every algorithm once per map. Map-algorithm pairs run concurrently.
pub fn robustness_experiment(
    config: &RobustnessConfig,
    model: &VehicleModel,
    planner: &PlannerConfig,
) -> Result<RobustnessReport> {
    planner.validate()?;
    let settings: Vec<MapSetting> = (0..config.maps).map(|m| map_setting(config, m)).collect::<Result<_>>()?;
    let envs: Vec<Environment> = settings
        .par_iter()
        .map(|s| map_environment(config, s))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, Algorithm)> = (0..config.maps)
        .flat_map(|m| config.algorithms.iter().map(move |&a| (m, a)))
        .collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(m, a)| {
            let s = &settings[m];
            plan(a, &envs[m], model, &s.task, planner, child_seed(s.seed, a, 0))
                .map(|r| r.best_ig)
                .unwrap_or(0.0)
        })
        .collect();
    let na = config.algorithms.len();
    let maps = settings
        .into_iter()
        .enumerate()
        .map(|(m, setting)| {
            let best_ig: Vec<(Algorithm, f64)> = config
                .algorithms
                .iter()
                .enumerate()
                .map(|(i, &a)| (a, scores[m * na + i]))
                .collect();
            MapOutcome {
                environment_fingerprint: envs[m].fingerprint(),
                winners: winners(&best_ig),
                best_ig,
                setting,
            }
        })
        .collect();
    Ok(tally(config.family, &config.algorithms, maps))
}
