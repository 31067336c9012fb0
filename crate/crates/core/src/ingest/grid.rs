use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::{Error, Result};

const BLOCKS: [&str; 3] = ["INFO", "U", "V"];

/// Unit labels carried with a grid. The format has no field for them; every
/// loaded grid gets the defaults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridUnits {
    pub length: String,
    pub velocity: String,
    pub info: String,
}

impl Default for GridUnits {
    fn default() -> Self {
        GridUnits {
            length: "m".into(),
            velocity: "m/s".into(),
            info: "1".into(),
        }
    }
}

/// A regular grid with one scalar and one horizontal vector field, stored
/// x-fastest. Node `(i, j, k)` sits at `origin + (i, j, k) * spacing`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawGrid {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub info: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub units: GridUnits,
}

impl RawGrid {
    pub fn new(
        dims: [usize; 3],
        spacing: [f64; 3],
        origin: [f64; 3],
        info: Vec<f64>,
        u: Vec<f64>,
        v: Vec<f64>,
    ) -> Result<Self, IngestError> {
        let grid = RawGrid {
            dims,
            spacing,
            origin,
            info,
            u,
            v,
            units: GridUnits::default(),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn node(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    fn validate(&self) -> Result<(), IngestError> {
        if self.dims.contains(&0) {
            return Err(IngestError::BadHeader(format!("zero dimension in {:?}", self.dims)));
        }
        if !self.spacing.iter().all(|s| *s > 0.0 && s.is_finite()) {
            return Err(IngestError::BadSpacing(self.spacing));
        }
        if !self.origin.iter().all(|o| o.is_finite()) {
            return Err(IngestError::BadHeader(format!("non-finite origin {:?}", self.origin)));
        }
        let n = self.len();
        for (block, values) in BLOCKS.iter().zip([&self.info, &self.u, &self.v]) {
            if values.len() != n {
                return Err(IngestError::DimensionMismatch {
                    block,
                    expected: n,
                    found: values.len(),
                });
            }
            if let Some(offset) = values.iter().position(|x| !x.is_finite()) {
                return Err(IngestError::NonFinite { block, offset });
            }
        }
        Ok(())
    }
}

/// Parses IPGRID text. Nothing is returned unless the whole input is valid.
pub fn parse_grid(text: &str) -> Result<RawGrid, IngestError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| IngestError::BadHeader("empty input".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 11 || fields[0] != "IPGRID" || fields[1] != "v1" {
        return Err(IngestError::BadHeader(header.to_string()));
    }
    let bad = |what: &str| IngestError::BadHeader(format!("{what} in {header:?}"));
    let mut dims = [0usize; 3];
    for a in 0..3 {
        dims[a] = fields[2 + a].parse().map_err(|_| bad("dimension"))?;
    }
    let mut spacing = [0.0; 3];
    let mut origin = [0.0; 3];
    for a in 0..3 {
        spacing[a] = fields[5 + a].parse().map_err(|_| bad("spacing"))?;
        origin[a] = fields[8 + a].parse().map_err(|_| bad("origin"))?;
    }
    if dims.contains(&0) {
        return Err(bad("zero dimension"));
    }
    if !spacing.iter().all(|s: &f64| *s > 0.0 && s.is_finite()) {
        return Err(IngestError::BadSpacing(spacing));
    }
    let n = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| bad("grid size overflow"))?;

    let mut tokens = lines.flat_map(str::split_whitespace).peekable();
    let mut blocks: Vec<Vec<f64>> = Vec::with_capacity(3);
    for block in BLOCKS {
        if tokens.next() != Some(block) {
            return Err(IngestError::MissingBlock(block));
        }
        let mut values = Vec::with_capacity(n);
        while let Some(&t) = tokens.peek() {
            if BLOCKS.contains(&t) {
                break;
            }
            tokens.next();
            let offset = values.len();
            let x: f64 = t.parse().map_err(|_| IngestError::ParseValue {
                block,
                offset,
                token: t.to_string(),
            })?;
            if !x.is_finite() {
                return Err(IngestError::NonFinite { block, offset });
            }
            values.push(x);
        }
        if values.len() < n {
            return Err(IngestError::Truncated {
                block,
                expected: n,
                found: values.len(),
            });
        }
        if values.len() > n {
            return Err(IngestError::DimensionMismatch {
                block,
                expected: n,
                found: values.len(),
            });
        }
        blocks.push(values);
    }
    if let Some(t) = tokens.next() {
        return Err(IngestError::BadHeader(format!("unexpected trailing token {t:?}")));
    }
    let v = blocks.pop().expect("three blocks");
    let u = blocks.pop().expect("three blocks");
    let info = blocks.pop().expect("three blocks");
    RawGrid::new(dims, spacing, origin, info, u, v)
}

/// Canonical IPGRID text for `grid`.
pub fn write_grid(grid: &RawGrid) -> String {
    let [nx, ny, nz] = grid.dims;
    let [sx, sy, sz] = grid.spacing;
    let [ox, oy, oz] = grid.origin;
    let mut out = format!("IPGRID v1 {nx} {ny} {nz} {sx} {sy} {sz} {ox} {oy} {oz}\n");
    for (block, values) in BLOCKS.iter().zip([&grid.info, &grid.u, &grid.v]) {
        out.push_str(block);
        out.push('\n');
        for row in values.chunks(nx) {
            for (c, x) in row.iter().enumerate() {
                if c > 0 {
                    out.push(' ');
                }
                write!(out, "{x}").expect("writing to a String");
            }
            out.push('\n');
        }
    }
    out
}

pub fn load_forecast_grid(path: &Path) -> Result<RawGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_grid(&text)?)
}
