use std::path::PathBuf;

use thiserror::Error;

use crate::ingest::IngestError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}, {z}) lies outside the workspace")]
    OutOfBounds { x: f64, y: f64, z: f64 },

    #[error("covariance matrix is not usable: {0}")]
    InvalidCovariance(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },

    #[error("a path needs at least two control points, got {0}")]
    TooFewNodes(usize),

    #[error("nearest-node query on an empty vertex set")]
    EmptyVertexSet,

    #[error(
        "PSO could not initialize a feasible particle after {attempts} attempts; \
         increase the energy/time budget or move the start and end closer together"
    )]
    PsoInitialization { attempts: usize },

    #[error(transparent)]
    Ingest(#[from] IngestError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn out_of_bounds(p: &crate::Point3) -> Self {
        Error::OutOfBounds {
            x: p.x,
            y: p.y,
            z: p.z,
        }
    }
}
