//! Run configuration files (JSON). Every section is optional and falls back
//! to the defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::{RobustnessConfig, ScenarioSpec};
use crate::env::EnvironmentConfig;
use crate::planners::PlannerConfig;
use crate::vehicle::VehicleModel;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// A custom scenario; when absent the built-in one chosen on the command
    /// line is used.
    pub scenario: Option<ScenarioSpec>,
    /// Environment template for `gen-env` without a scenario.
    pub environment: EnvironmentConfig,
    pub vehicle: VehicleModel,
    pub planner: PlannerConfig,
    pub robustness: RobustnessConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        self.planner.validate()
    }
}
