use serde::{Deserialize, Serialize};

use crate::{Error, Point3, Result};

/// Tolerance (meters) used when deciding whether a point lies inside the
/// workspace. Spline samples are convex combinations of in-bounds control
/// points and can land a few ulps outside the box.
const BOUNDS_SLACK: f64 = 1e-6;

/// Propulsion medium of the vehicle at a given height.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Medium {
    Air,
    Sea,
}

impl Medium {
    /// Points strictly above sea level are airborne; the surface itself counts
    /// as sea.
    #[inline]
    pub fn at_height(z: f64) -> Medium {
        if z > 0.0 {
            Medium::Air
        } else {
            Medium::Sea
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Medium::Air => "air",
            Medium::Sea => "sea",
        }
    }
}

/// Regular 3D raster discretizing the mission volume.
///
/// Horizontal grid points are cell centers of an `nx * cell` by `ny * cell`
/// extent, so index `i` sits at `(i + 0.5) * cell`. Vertical grid points are
/// layer heights `z_origin + k * cell`, with layer `sea_level_index` at
/// exactly `z = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WorkspaceSpec", into = "WorkspaceSpec")]
pub struct Workspace {
    nx: usize,
    ny: usize,
    nz: usize,
    cell: f64,
    z_origin: f64,
    sea_level_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub cell: f64,
    pub sea_level_index: usize,
}

impl Default for WorkspaceSpec {
    fn default() -> Self {
        Workspace::standard().into()
    }
}

impl TryFrom<WorkspaceSpec> for Workspace {
    type Error = Error;

    fn try_from(s: WorkspaceSpec) -> Result<Self> {
        Workspace::new(s.nx, s.ny, s.nz, s.cell, s.sea_level_index)
    }
}

impl From<Workspace> for WorkspaceSpec {
    fn from(w: Workspace) -> Self {
        WorkspaceSpec {
            nx: w.nx,
            ny: w.ny,
            nz: w.nz,
            cell: w.cell,
            sea_level_index: w.sea_level_index,
        }
    }
}

impl Workspace {
    pub fn new(nx: usize, ny: usize, nz: usize, cell: f64, sea_level_index: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::Config(format!(
                "workspace dimensions must be positive, got {nx}x{ny}x{nz}"
            )));
        }
        if !(cell > 0.0 && cell.is_finite()) {
            return Err(Error::Config(format!("cell size must be positive, got {cell}")));
        }
        if sea_level_index >= nz {
            return Err(Error::Config(format!(
                "sea level index {sea_level_index} outside 0..{nz}"
            )));
        }
        Ok(Workspace {
            nx,
            ny,
            nz,
            cell,
            z_origin: -(sea_level_index as f64 * cell),
            sea_level_index,
        })
    }

    /// The 100 x 100 x 13 raster with 50 m cells spanning 5 km x 5 km x 600 m,
    /// split evenly between air and sea.
    pub fn standard() -> Self {
        Workspace::new(100, 100, 13, 50.0, 6).expect("standard workspace is valid")
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    #[inline]
    pub fn cell(&self) -> f64 {
        self.cell
    }

    #[inline]
    pub fn z_origin(&self) -> f64 {
        self.z_origin
    }

    #[inline]
    pub fn sea_level_index(&self) -> usize {
        self.sea_level_index
    }

    /// Number of grid points.
    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat x-fastest index of grid point `(i, j, k)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn ijk(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / (self.nx * self.ny);
        (i, j, k)
    }

    #[inline]
    pub fn x_of(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.cell
    }

    #[inline]
    pub fn y_of(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.cell
    }

    #[inline]
    pub fn z_of(&self, k: usize) -> f64 {
        self.z_origin + k as f64 * self.cell
    }

    #[inline]
    pub fn grid_point(&self, i: usize, j: usize, k: usize) -> Point3 {
        Point3::new(self.x_of(i), self.y_of(j), self.z_of(k))
    }

    /// Grid point nearest to `p`, or `None` when `p` is outside the workspace.
    pub fn nearest_index(&self, p: &Point3) -> Option<(usize, usize, usize)> {
        if !self.contains(p) {
            return None;
        }
        let (fi, fj, fk) = self.fractional_index(p);
        let clamp = |f: f64, n: usize| (f.round().max(0.0) as usize).min(n - 1);
        Some((clamp(fi, self.nx), clamp(fj, self.ny), clamp(fk, self.nz)))
    }

    /// Continuous grid coordinates of `p` (grid point `(i, j, k)` maps to
    /// `(i, j, k)` exactly).
    #[inline]
    pub fn fractional_index(&self, p: &Point3) -> (f64, f64, f64) {
        (
            p.x / self.cell - 0.5,
            p.y / self.cell - 0.5,
            (p.z - self.z_origin) / self.cell,
        )
    }

    /// Lower and upper corners of the continuous workspace box.
    pub fn bounds(&self) -> (Point3, Point3) {
        (
            Point3::new(0.0, 0.0, self.z_origin),
            Point3::new(
                self.nx as f64 * self.cell,
                self.ny as f64 * self.cell,
                self.z_of(self.nz - 1),
            ),
        )
    }

    pub fn contains(&self, p: &Point3) -> bool {
        let (lo, hi) = self.bounds();
        (0..3).all(|a| p[a] >= lo[a] - BOUNDS_SLACK && p[a] <= hi[a] + BOUNDS_SLACK)
    }

    pub fn clamp(&self, p: &Point3) -> Point3 {
        let (lo, hi) = self.bounds();
        Point3::new(
            p.x.clamp(lo.x, hi.x),
            p.y.clamp(lo.y, hi.y),
            p.z.clamp(lo.z, hi.z),
        )
    }

    pub fn check_contains(&self, p: &Point3) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::out_of_bounds(p))
        }
    }

    #[inline]
    pub fn is_air_layer(&self, k: usize) -> bool {
        k > self.sea_level_index
    }

    /// Range of layer indices belonging to `medium`.
    pub fn layers_of(&self, medium: Medium) -> std::ops::RangeInclusive<usize> {
        match medium {
            Medium::Sea => 0..=self.sea_level_index,
            // A workspace with no air layer degenerates to the sea range.
            Medium::Air if self.sea_level_index + 1 < self.nz => {
                self.sea_level_index + 1..=self.nz - 1
            }
            Medium::Air => 0..=self.sea_level_index,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sea_level_is_exactly_zero() {
        for s in 0..13 {
            let ws = Workspace::new(4, 4, 13, 50.0, s).unwrap();
            assert_eq!(ws.z_origin() + s as f64 * ws.cell(), 0.0);
            assert_eq!(ws.z_of(s), 0.0);
        }
        let odd = Workspace::new(3, 3, 9, 33.3, 5).unwrap();
        assert_eq!(odd.z_of(5), 0.0);
    }

    #[test]
    fn grid_round_trip_is_exact() {
        let ws = Workspace::standard();
        for idx in 0..ws.len() {
            let (i, j, k) = ws.ijk(idx);
            assert_eq!(ws.index(i, j, k), idx);
            let p = ws.grid_point(i, j, k);
            assert_eq!(ws.nearest_index(&p), Some((i, j, k)));
            let (fi, fj, fk) = ws.fractional_index(&p);
            assert_eq!((fi, fj, fk), (i as f64, j as f64, k as f64));
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(Workspace::new(0, 1, 1, 1.0, 0).is_err());
        assert!(Workspace::new(1, 1, 1, 0.0, 0).is_err());
        assert!(Workspace::new(1, 1, 3, 1.0, 3).is_err());
    }

    #[test]
    fn bounds_and_media() {
        let ws = Workspace::standard();
        let (lo, hi) = ws.bounds();
        assert_eq!(lo, Point3::new(0.0, 0.0, -300.0));
        assert_eq!(hi, Point3::new(5000.0, 5000.0, 300.0));
        assert_eq!(ws.layers_of(Medium::Sea), 0..=6);
        assert_eq!(ws.layers_of(Medium::Air), 7..=12);
        assert_eq!(Medium::at_height(0.0), Medium::Sea);
        assert_eq!(Medium::at_height(1e-9), Medium::Air);
        assert!(!ws.contains(&Point3::new(-1.0, 0.0, 0.0)));
        assert!(ws.nearest_index(&Point3::new(0.0, 5000.0, 300.0)).is_some());
    }
}
