//! The air-sea environment: workspace grid, information map, velocity field
//! and obstacles.

pub mod generate;
pub mod info;
pub mod obstacles;
pub mod velocity;
pub mod workspace;

pub use generate::{
    generate_random_environment, Environment, EnvironmentConfig, FeatureSource, ObstacleConfig,
    RandomFeatures, RandomVortices, SlopeSpec, SpeedCaps, VortexSource,
};
pub use info::{
    build_info_map, gaussian_info_value, normalize_by_side, random_covariance, DegenerateSides,
    GaussianFeature, InfoMap,
};
pub use obstacles::{continental_slope, Aabb, ObstacleSet, VoxelMask};
pub use velocity::{lamb_vortex_velocity, LambVortex, VelocityField, VortexParams};
pub use workspace::{Medium, Workspace, WorkspaceSpec};
