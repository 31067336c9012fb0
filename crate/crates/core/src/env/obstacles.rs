//! Obstacle geometry: closed axis-aligned boxes plus an optional voxel mask.

use serde::{Deserialize, Serialize};

use super::workspace::Workspace;
use crate::{Error, Point3, Result};

/// Closed axis-aligned box; points on a face are inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Result<Self> {
        let b = Aabb { min, max };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        let ok = (0..3).all(|a| {
            self.min[a].is_finite() && self.max[a].is_finite() && self.min[a] <= self.max[a]
        });
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("degenerate obstacle box {self:?}")))
        }
    }

    #[inline]
    pub fn contains(&self, p: &Point3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    pub fn centroid(&self) -> Point3 {
        Point3::new(
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
            0.5 * (self.min[2] + self.max[2]),
        )
    }

    /// Slab test of the closed segment `a..b` against the closed box.
    pub fn intersects_segment(&self, a: &Point3, b: &Point3) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for axis in 0..3 {
            let d = b[axis] - a[axis];
            if d == 0.0 {
                if a[axis] < self.min[axis] || a[axis] > self.max[axis] {
                    return false;
                }
                continue;
            }
            let mut lo = (self.min[axis] - a[axis]) / d;
            let mut hi = (self.max[axis] - a[axis]) / d;
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            t0 = t0.max(lo);
            t1 = t1.min(hi);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

/// Marks whole grid cells as blocked. A point is tested against the cell of
/// its nearest grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelMask {
    workspace: Workspace,
    blocked: Vec<bool>,
}

impl VoxelMask {
    pub fn new(workspace: &Workspace, blocked: Vec<bool>) -> Result<Self> {
        if blocked.len() != workspace.len() {
            return Err(Error::Config(format!(
                "voxel mask has {} cells, workspace has {}",
                blocked.len(),
                workspace.len()
            )));
        }
        Ok(VoxelMask {
            workspace: workspace.clone(),
            blocked,
        })
    }

    pub fn from_indices(workspace: &Workspace, indices: &[usize]) -> Result<Self> {
        let mut blocked = vec![false; workspace.len()];
        for &idx in indices {
            *blocked.get_mut(idx).ok_or_else(|| {
                Error::Config(format!("voxel index {idx} outside the workspace"))
            })? = true;
        }
        Self::new(workspace, blocked)
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.blocked.len()).filter(|&i| self.blocked[i]).collect()
    }

    #[inline]
    pub fn contains(&self, p: &Point3) -> bool {
        match self.workspace.nearest_index(p) {
            Some((i, j, k)) => self.blocked[self.workspace.index(i, j, k)],
            None => false,
        }
    }
}

/// The set `C_obs` of forbidden space.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObstacleSet {
    boxes: Vec<Aabb>,
    voxels: Option<VoxelMask>,
}

impl ObstacleSet {
    pub fn new(boxes: Vec<Aabb>, voxels: Option<VoxelMask>) -> Result<Self> {
        for b in &boxes {
            b.validate()?;
        }
        Ok(ObstacleSet { boxes, voxels })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn boxes(&self) -> &[Aabb] {
        &self.boxes
    }

    pub fn voxels(&self) -> Option<&VoxelMask> {
        self.voxels.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty() && self.voxels.as_ref().is_none_or(|v| !v.blocked.contains(&true))
    }

    #[inline]
    pub fn is_obstructed(&self, p: &Point3) -> bool {
        self.boxes.iter().any(|b| b.contains(p))
            || self.voxels.as_ref().is_some_and(|v| v.contains(p))
    }

    /// Whether the straight segment `a..b` touches any obstacle. Boxes are
    /// tested exactly; the voxel mask is probed at quarter-cell spacing.
    pub fn segment_obstructed(&self, a: &Point3, b: &Point3) -> bool {
        if self.boxes.iter().any(|bx| bx.intersects_segment(a, b)) {
            return true;
        }
        let Some(mask) = &self.voxels else {
            return false;
        };
        let len = (b - a).norm();
        let steps = (len / (0.25 * mask.workspace.cell())).ceil().max(1.0) as usize;
        (0..=steps).any(|s| mask.contains(&(a + (b - a) * (s as f64 / steps as f64))))
    }
}

/// Seabed rising toward the east: a staircase of full-width boxes over
/// `x in [x_start, x_end]`, each `step` wide, whose tops climb linearly from
/// just above the floor to `top_z`.
pub fn continental_slope(ws: &Workspace, x_start: f64, x_end: f64, step: f64, top_z: f64) -> Result<Vec<Aabb>> {
    let (lo, hi) = ws.bounds();
    if !(step > 0.0 && x_end > x_start && top_z > lo.z) {
        return Err(Error::Config("invalid slope geometry".into()));
    }
    let n = ((x_end - x_start) / step).round().max(1.0) as usize;
    let rise = (top_z - lo.z) / n as f64;
    (0..n)
        .map(|s| {
            let x0 = x_start + s as f64 * step;
            Aabb::new(
                [x0, lo.y, lo.z],
                [(x0 + step).min(x_end), hi.y, lo.z + rise * (s + 1) as f64],
            )
        })
        .collect()
}
