//! Environment assembly from a JSON config, including seeded random maps.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::path::Path;

use nalgebra::Vector2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::info::{build_info_map, random_covariance, GaussianFeature, InfoMap};
use super::obstacles::{continental_slope, Aabb, ObstacleSet, VoxelMask};
use super::velocity::{LambVortex, VelocityField, VortexParams};
use super::workspace::{Medium, Workspace, WorkspaceSpec};
use crate::{Error, Point3, Result};

/// Peak of `(1 - exp(-s^2)) / s`, reached at `s ~ 1.1209`. A Lamb vortex's
/// maximum speed is this factor times `eta / (2 pi zeta)`.
const LAMB_PEAK: f64 = 0.638_190_2;

/// Top-level environment config. Every section has a default, so `{}` is a
/// valid config describing a random map on the standard workspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub workspace: WorkspaceSpec,
    pub kappa_air: f64,
    pub kappa_sea: f64,
    pub features: FeatureSource,
    pub vortices: VortexSource,
    pub obstacles: ObstacleConfig,
    /// Grid-point speed limits; `null` disables rescaling.
    pub speed_caps: Option<SpeedCaps>,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        EnvironmentConfig {
            workspace: WorkspaceSpec::default(),
            kappa_air: 1.0,
            kappa_sea: 1.0,
            features: FeatureSource::default(),
            vortices: VortexSource::default(),
            obstacles: ObstacleConfig::default(),
            speed_caps: Some(SpeedCaps::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FeatureSource {
    List(Vec<GaussianFeature>),
    Random(RandomFeatures),
}

impl Default for FeatureSource {
    fn default() -> Self {
        FeatureSource::Random(RandomFeatures::default())
    }
}

/// Random mixture: component centers alternate between the air and sea
/// halves of the workspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomFeatures {
    /// Inclusive range of the component count.
    pub count: [usize; 2],
    /// Range of the principal standard deviations (m).
    pub std_dev: [f64; 2],
    pub g: [f64; 2],
}

impl Default for RandomFeatures {
    fn default() -> Self {
        RandomFeatures {
            count: [3, 6],
            std_dev: [150.0, 700.0],
            g: [0.5, 1.5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VortexSource {
    List(Vec<LambVortex>),
    Random(RandomVortices),
}

impl Default for VortexSource {
    fn default() -> Self {
        VortexSource::Random(RandomVortices::default())
    }
}

/// Random vortices, drawn separately for each medium. Each spans every layer
/// of its medium with parameters drifting between the bottom and top layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomVortices {
    /// Inclusive range of vortices per medium.
    pub count: [usize; 2],
    /// Range of core radii (m).
    pub zeta: [f64; 2],
    /// Peak speed of a single vortex as a fraction of the medium's cap.
    pub peak_fraction: [f64; 2],
    /// Largest horizontal drift of the center from bottom to top layer (m).
    pub drift: f64,
}

impl Default for RandomVortices {
    fn default() -> Self {
        RandomVortices {
            count: [2, 5],
            zeta: [200.0, 1000.0],
            peak_fraction: [0.4, 1.0],
            drift: 300.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedCaps {
    pub air: f64,
    pub sea: f64,
}

impl Default for SpeedCaps {
    fn default() -> Self {
        SpeedCaps { air: 5.0, sea: 0.4 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObstacleConfig {
    pub boxes: Vec<Aabb>,
    /// Flat grid indices of blocked cells.
    pub voxels: Vec<usize>,
    pub slope: Option<SlopeSpec>,
}

/// Staircase seabed, see [`continental_slope`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeSpec {
    pub x_start: f64,
    pub x_end: f64,
    pub step: f64,
    pub top_z: f64,
}

impl ObstacleConfig {
    pub fn build(&self, ws: &Workspace) -> Result<ObstacleSet> {
        let mut boxes = self.boxes.clone();
        if let Some(s) = &self.slope {
            boxes.extend(continental_slope(ws, s.x_start, s.x_end, s.step, s.top_z)?);
        }
        let voxels = if self.voxels.is_empty() {
            None
        } else {
            Some(VoxelMask::from_indices(ws, &self.voxels)?)
        };
        ObstacleSet::new(boxes, voxels)
    }
}

impl EnvironmentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// The planning environment. Immutable once built.
#[derive(Clone, Debug)]
pub struct Environment {
    workspace: Workspace,
    info: InfoMap,
    velocity: VelocityField,
    obstacles: ObstacleSet,
}

impl Environment {
    pub fn new(info: InfoMap, velocity: VelocityField, obstacles: ObstacleSet) -> Result<Self> {
        if info.workspace() != velocity.workspace() {
            return Err(Error::Config(
                "information map and velocity field use different grids".into(),
            ));
        }
        Ok(Environment {
            workspace: info.workspace().clone(),
            info,
            velocity,
            obstacles,
        })
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn info(&self) -> &InfoMap {
        &self.info
    }

    pub fn velocity(&self) -> &VelocityField {
        &self.velocity
    }

    pub fn obstacles(&self) -> &ObstacleSet {
        &self.obstacles
    }

    /// Same environment under different air/sea weights.
    pub fn with_kappa(&self, kappa_air: f64, kappa_sea: f64) -> Result<Self> {
        Ok(Environment {
            info: self.info.clone().with_kappa(kappa_air, kappa_sea)?,
            ..self.clone()
        })
    }

    pub fn with_obstacles(&self, obstacles: ObstacleSet) -> Self {
        Environment {
            obstacles,
            ..self.clone()
        }
    }

    /// Hash over the information values, weights, the velocity at every grid
    /// point and the obstacle geometry. Equal environments hash equally.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        let ws = &self.workspace;
        let spec: WorkspaceSpec = ws.clone().into();
        (spec.nx, spec.ny, spec.nz, spec.cell.to_bits(), spec.sea_level_index).hash(&mut h);
        self.info.kappa_air().to_bits().hash(&mut h);
        self.info.kappa_sea().to_bits().hash(&mut h);
        for v in self.info.values() {
            v.to_bits().hash(&mut h);
        }
        let (nx, ny, nz) = ws.dims();
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let uv = self.velocity.layer_velocity(k, &Vector2::new(ws.x_of(i), ws.y_of(j)));
                    (uv.x.to_bits(), uv.y.to_bits()).hash(&mut h);
                }
            }
        }
        for b in self.obstacles.boxes() {
            for c in b.min.iter().chain(&b.max) {
                c.to_bits().hash(&mut h);
            }
        }
        if let Some(mask) = self.obstacles.voxels() {
            mask.indices().hash(&mut h);
        }
        h.finish()
    }
}

/// Builds the environment described by `config`. Random sections draw from a
/// ChaCha stream seeded with `seed`: features first, then air vortices, then
/// sea vortices.
pub fn generate_random_environment(seed: u64, config: &EnvironmentConfig) -> Result<Environment> {
    let ws = Workspace::try_from(config.workspace.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = match &config.features {
        FeatureSource::List(list) => list.clone(),
        FeatureSource::Random(spec) => random_features(&mut rng, &ws, spec)?,
    };
    let info = build_info_map(&features, &ws, config.kappa_air, config.kappa_sea)?;
    let caps = config.speed_caps.unwrap_or_default();
    let vortices = match &config.vortices {
        VortexSource::List(list) => list.clone(),
        VortexSource::Random(spec) => {
            let mut v = random_vortices(&mut rng, &ws, Medium::Air, caps.air, spec)?;
            v.extend(random_vortices(&mut rng, &ws, Medium::Sea, caps.sea, spec)?);
            v
        }
    };
    let mut velocity = VelocityField::analytic(&ws, vortices)?;
    if let Some(caps) = config.speed_caps {
        apply_caps(&mut velocity, caps)?;
    }
    Environment::new(info, velocity, config.obstacles.build(&ws)?)
}

pub(crate) fn apply_caps(velocity: &mut VelocityField, caps: SpeedCaps) -> Result<()> {
    velocity.enforce_cap(Medium::Air, caps.air)?;
    velocity.enforce_cap(Medium::Sea, caps.sea)
}

fn check_range<T: PartialOrd + std::fmt::Debug>(name: &str, r: &[T; 2]) -> Result<()> {
    if r[0] <= r[1] {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} range {r:?} is reversed")))
    }
}

fn draw(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[1] > r[0] {
        rng.gen_range(r[0]..r[1])
    } else {
        r[0]
    }
}

fn random_features(
    rng: &mut ChaCha8Rng,
    ws: &Workspace,
    spec: &RandomFeatures,
) -> Result<Vec<GaussianFeature>> {
    check_range("feature count", &spec.count)?;
    check_range("feature std_dev", &spec.std_dev)?;
    check_range("feature g", &spec.g)?;
    if spec.count[1] == 0 || spec.std_dev[0] <= 0.0 || spec.g[0] <= 0.0 {
        return Err(Error::Config("random features need positive count, spread and weight".into()));
    }
    let (lo, hi) = ws.bounds();
    let n = rng.gen_range(spec.count[0].max(1)..=spec.count[1]);
    (0..n)
        .map(|b| {
            let z = if b % 2 == 0 {
                draw(rng, [0.0, hi.z])
            } else {
                draw(rng, [lo.z, 0.0])
            };
            let mu = Point3::new(draw(rng, [lo.x, hi.x]), draw(rng, [lo.y, hi.y]), z);
            let variance = [spec.std_dev[0].powi(2), spec.std_dev[1].powi(2)];
            let sigma = random_covariance(rng, variance);
            let g = draw(rng, spec.g);
            GaussianFeature::new(mu, sigma, g)
        })
        .collect()
}

fn random_vortices(
    rng: &mut ChaCha8Rng,
    ws: &Workspace,
    medium: Medium,
    cap: f64,
    spec: &RandomVortices,
) -> Result<Vec<LambVortex>> {
    check_range("vortex count", &spec.count)?;
    check_range("vortex zeta", &spec.zeta)?;
    check_range("vortex peak_fraction", &spec.peak_fraction)?;
    if spec.zeta[0] <= 0.0 {
        return Err(Error::Config("vortex radii must be positive".into()));
    }
    let layers = ws.layers_of(medium);
    let (lo, hi) = ws.bounds();
    let n = rng.gen_range(spec.count[0]..=spec.count[1]);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let center = [draw(rng, [lo.x, hi.x]), draw(rng, [lo.y, hi.y])];
        let zeta = draw(rng, spec.zeta);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let peak = cap * draw(rng, spec.peak_fraction);
        let eta = sign * peak * 2.0 * PI * zeta / LAMB_PEAK;
        let strong = VortexParams { center, eta, zeta };
        let drift = Vector2::new(draw(rng, [-1.0, 1.0]), draw(rng, [-1.0, 1.0])) * spec.drift;
        let weak = VortexParams {
            center: [
                (center[0] + drift.x).clamp(lo.x, hi.x),
                (center[1] + drift.y).clamp(lo.y, hi.y),
            ],
            eta: eta * draw(rng, [0.6, 1.0]),
            zeta: zeta * draw(rng, [0.8, 1.2]),
        };
        // Currents fade with depth and winds build with height, so both media
        // peak at their top layer.
        out.push(LambVortex {
            bottom: weak,
            top: strong,
            first_layer: *layers.start(),
            last_layer: *layers.end(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_environment() {
        let cfg = EnvironmentConfig::default();
        let a = generate_random_environment(7, &cfg).unwrap();
        let b = generate_random_environment(7, &cfg).unwrap();
        assert_eq!(a.info(), b.info());
        assert_eq!(a.velocity(), b.velocity());
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = generate_random_environment(8, &cfg).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn caps_hold_on_every_grid_point() {
        let cfg = EnvironmentConfig::default();
        for seed in 0..3 {
            let env = generate_random_environment(seed, &cfg).unwrap();
            assert!(env.velocity().max_grid_speed(Medium::Air) <= 5.0);
            assert!(env.velocity().max_grid_speed(Medium::Sea) <= 0.4);
            assert!(env.velocity().max_grid_speed(Medium::Sea) > 0.0);
        }
    }

    #[test]
    fn empty_json_is_the_default_config() {
        let cfg: EnvironmentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, EnvironmentConfig::default());
        let text = serde_json::to_string(&cfg).unwrap();
        let back: EnvironmentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn explicit_lists_are_used_verbatim() {
        let json = r#"{
            "workspace": {"nx": 10, "ny": 10, "nz": 5, "cell": 50.0, "sea_level_index": 2},
            "features": {"list": [{"mu": [250, 250, 0], "sigma": [[1e4,0,0],[0,1e4,0],[0,0,1e4]], "g": 1}]},
            "vortices": {"list": []},
            "obstacles": {"boxes": [{"min": [0,0,-100], "max": [100,100,-50]}]}
        }"#;
        let cfg: EnvironmentConfig = serde_json::from_str(json).unwrap();
        let env = generate_random_environment(0, &cfg).unwrap();
        assert_eq!(env.velocity().max_grid_speed(Medium::Air), 0.0);
        assert!(env.obstacles().is_obstructed(&Point3::new(50.0, 50.0, -75.0)));
        assert!(env.info().values().iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(serde_json::from_str::<EnvironmentConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
