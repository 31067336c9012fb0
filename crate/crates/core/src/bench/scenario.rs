//! Built-in mission scenarios.

use std::path::{Path, PathBuf};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::env::{
    generate_random_environment, Environment, EnvironmentConfig, FeatureSource,
    GaussianFeature, ObstacleConfig, SlopeSpec, Workspace, WorkspaceSpec,
};
use crate::ingest::{environment_from_grid, load_forecast_grid, parse_grid, write_grid, RawGrid};
use crate::path::Task;
use crate::planners::Algorithm;
use crate::{Error, Point3, Result};

/// The bundled Scenario 2 forecast grid.
pub const SCENARIO2_GRID: &str = include_str!("../../data/scenario2.ipgrid");

/// Seed of the analytic environment behind Scenarios 1, 4 and 5.
pub const SCENARIO1_ENV_SEED: u64 = 1;
/// Seed of the analytic environment written to the Scenario 2 grid.
pub const SCENARIO2_ENV_SEED: u64 = 2;
/// Seed of the vortices in Scenario 3.
pub const SCENARIO3_ENV_SEED: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnvironmentSource {
    /// Generated from a seed and a config.
    Analytic { seed: u64, config: EnvironmentConfig },
    /// Read from an IPGRID file; `file: null` uses the bundled Scenario 2 grid.
    Grid {
        file: Option<PathBuf>,
        workspace: WorkspaceSpec,
        #[serde(default)]
        obstacles: ObstacleConfig,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub id: u32,
    pub name: String,
    pub environment: EnvironmentSource,
    pub task: Task,
    pub kappa_air: f64,
    pub kappa_sea: f64,
    pub algorithms: Vec<Algorithm>,
    pub repetitions: usize,
    pub base_seed: u64,
}

impl ScenarioSpec {
    /// Builds the environment and checks the endpoints against it.
    pub fn build_environment(&self) -> Result<Environment> {
        let env = match &self.environment {
            EnvironmentSource::Analytic { seed, config } => generate_random_environment(*seed, config)?,
            EnvironmentSource::Grid {
                file,
                workspace,
                obstacles,
            } => {
                let raw = match file {
                    Some(path) => load_forecast_grid(path)?,
                    None => parse_grid(SCENARIO2_GRID)?,
                };
                let ws = Workspace::try_from(workspace.clone())?;
                let obstacles = obstacles.build(&ws)?;
                environment_from_grid(&raw, &ws, 1.0, 1.0, obstacles)?
            }
        };
        let env = env.with_kappa(self.kappa_air, self.kappa_sea)?;
        self.task.validate(&env)?;
        Ok(env)
    }

    /// Points a grid-backed scenario at another IPGRID file.
    pub fn with_grid_file(mut self, path: &Path) -> Result<Self> {
        match &mut self.environment {
            EnvironmentSource::Grid { file, .. } => {
                *file = Some(path.to_path_buf());
                Ok(self)
            }
            EnvironmentSource::Analytic { .. } => Err(Error::Config(format!(
                "scenario {} is analytic and takes no environment file",
                self.id
            ))),
        }
    }
}

/// Seabed staircase in the eastern half, well below the surface.
fn slope() -> ObstacleConfig {
    ObstacleConfig {
        slope: Some(SlopeSpec {
            x_start: 2500.0,
            x_end: 5000.0,
            step: 250.0,
            top_z: -100.0,
        }),
        ..ObstacleConfig::default()
    }
}

fn feature(mu: [f64; 3], sd: [f64; 3]) -> GaussianFeature {
    let sigma = Matrix3::from_diagonal(&Point3::new(sd[0] * sd[0], sd[1] * sd[1], sd[2] * sd[2]));
    GaussianFeature::new(Point3::from(mu), sigma, 1.0).expect("diagonal covariance is valid")
}

/// Atmospheric features in x in [3, 5] km, oceanic ones in x in [1, 3] km.
fn banded_features() -> Vec<GaussianFeature> {
    vec![
        feature([3600.0, 1400.0, 150.0], [450.0, 600.0, 120.0]),
        feature([4400.0, 3300.0, 200.0], [400.0, 700.0, 100.0]),
        feature([3900.0, 4500.0, 100.0], [350.0, 400.0, 150.0]),
        feature([1500.0, 2000.0, -150.0], [400.0, 600.0, 120.0]),
        feature([2400.0, 3600.0, -200.0], [450.0, 500.0, 100.0]),
        feature([1800.0, 4600.0, -100.0], [300.0, 350.0, 150.0]),
    ]
}

fn s1_task() -> Task {
    Task::new(Point3::new(1000.0, 3750.0, 0.0), Point3::new(4000.0, 3750.0, 0.0), f64::INFINITY)
}

fn s1_environment() -> EnvironmentSource {
    EnvironmentSource::Analytic {
        seed: SCENARIO1_ENV_SEED,
        config: EnvironmentConfig {
            obstacles: slope(),
            ..EnvironmentConfig::default()
        },
    }
}

/// Built-in scenario `id` (1 to 5) with 10 repetitions of all planners.
pub fn scenario(id: u32) -> Result<ScenarioSpec> {
    let base = ScenarioSpec {
        id,
        name: String::new(),
        environment: s1_environment(),
        task: s1_task(),
        kappa_air: 1.0,
        kappa_sea: 1.0,
        algorithms: Algorithm::ALL.to_vec(),
        repetitions: 10,
        base_seed: 1000 + id as u64,
    };
    let spec = match id {
        1 => ScenarioSpec {
            name: "limited energy".into(),
            ..base
        },
        2 => ScenarioSpec {
            name: "limited energy and mission time".into(),
            environment: EnvironmentSource::Grid {
                file: None,
                workspace: WorkspaceSpec::default(),
                obstacles: ObstacleConfig::default(),
            },
            task: Task::new(Point3::new(500.0, 2500.0, 0.0), Point3::new(4500.0, 2500.0, 0.0), 10_800.0),
            ..base
        },
        3 => ScenarioSpec {
            name: "limited energy and tight mission time".into(),
            environment: EnvironmentSource::Analytic {
                seed: SCENARIO3_ENV_SEED,
                config: EnvironmentConfig {
                    features: FeatureSource::List(banded_features()),
                    obstacles: slope(),
                    ..EnvironmentConfig::default()
                },
            },
            task: Task::new(s1_task().start(), s1_task().goal(), 3600.0),
            ..base
        },
        4 => ScenarioSpec {
            name: "ocean information weighted".into(),
            kappa_air: 1.0,
            kappa_sea: 3.0,
            ..base
        },
        5 => ScenarioSpec {
            name: "atmosphere information weighted".into(),
            kappa_air: 3.0,
            kappa_sea: 1.0,
            ..base
        },
        other => return Err(Error::Config(format!("no built-in scenario {other}; expected 1 to 5"))),
    };
    Ok(spec)
}

/// Samples an analytic environment onto a coarse forecast-style grid: 100 m
/// horizontal and 50 m vertical spacing, information normalized per medium,
/// every value rounded to 6 decimals. Expects unit kappa weights.
pub fn sample_to_grid(env: &Environment) -> Result<RawGrid> {
    let ws = env.workspace();
    let (lo, hi) = ws.bounds();
    let (h, v) = (100.0, ws.cell());
    let dims = [
        ((hi.x - lo.x) / h).round() as usize + 1,
        ((hi.y - lo.y) / h).round() as usize + 1,
        ws.dims().2,
    ];
    let origin = [lo.x, lo.y, lo.z];
    let round = |x: f64| (x * 1e6).round() / 1e6;
    // Information is taken from the nearest workspace grid point.
    let (nx, ny, nz) = ws.dims();
    let mut info = Vec::new();
    let (mut u, mut w) = (Vec::new(), Vec::new());
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let p = Point3::new(origin[0] + i as f64 * h, origin[1] + j as f64 * h, origin[2] + k as f64 * v);
                let fi = ((p.x / ws.cell() - 0.5).round().max(0.0) as usize).min(nx - 1);
                let fj = ((p.y / ws.cell() - 0.5).round().max(0.0) as usize).min(ny - 1);
                info.push(env.info().value(ws.index(fi, fj, k.min(nz - 1))));
                let vel = env.velocity().velocity_at(&p)?;
                u.push(round(vel.x));
                w.push(round(vel.y));
            }
        }
    }
    let info: Vec<f64> = info.iter().map(|x| round(*x)).collect();
    Ok(RawGrid::new(dims, [h, h, v], origin, info, u, w)?)
}

/// Regenerates the text of the bundled Scenario 2 grid.
pub fn scenario2_grid_text() -> Result<String> {
    let env = generate_random_environment(SCENARIO2_ENV_SEED, &EnvironmentConfig::default())?;
    Ok(write_grid(&sample_to_grid(&env)?))
}
