//! Offline forecast grids: the IPGRID text format and resampling onto a
//! workspace.
//!
//! ```text
//! IPGRID v1 nx ny nz sx sy sz ox oy oz
//! INFO
//! <nx*ny*nz values, x fastest>
//! U
//! <nx*ny*nz values>
//! V
//! <nx*ny*nz values>
//! ```
//!
//! Values are whitespace separated. The canonical writer puts one x-row per
//! line and prints each number in its shortest round-trip form.

mod grid;
mod resample;

pub use grid::{load_forecast_grid, parse_grid, write_grid, GridUnits, RawGrid};
pub use resample::{environment_from_grid, interpolate_to_workspace, normalize_field};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("bad IPGRID header: {0}")]
    BadHeader(String),

    #[error("missing {0} block")]
    MissingBlock(&'static str),

    #[error("{block} block truncated: expected {expected} values, found {found}")]
    Truncated {
        block: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{block} block has {found} values, header declares {expected}")]
    DimensionMismatch {
        block: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{block} block: non-finite value at offset {offset}")]
    NonFinite { block: &'static str, offset: usize },

    #[error("{block} block: cannot parse {token:?} at offset {offset}")]
    ParseValue {
        block: &'static str,
        offset: usize,
        token: String,
    },

    #[error("grid spacing must be positive, got {0:?}")]
    BadSpacing([f64; 3]),

    #[error("grid does not cover the workspace along {axis}")]
    Coverage { axis: char },
}
