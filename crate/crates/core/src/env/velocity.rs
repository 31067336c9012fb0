//! Wind and current fields built from superposed Lamb vortices, or sampled on
//! the workspace grid when ingested from a forecast file.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::workspace::{Medium, Workspace};
use crate::{Error, Point3, Result};

/// Center, strength (m^2/s) and radius (m) of a 2D Lamb vortex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexParams {
    pub center: [f64; 2],
    pub eta: f64,
    pub zeta: f64,
}

impl VortexParams {
    fn lerp(&self, other: &VortexParams, t: f64) -> VortexParams {
        let mix = |a: f64, b: f64| a + (b - a) * t;
        VortexParams {
            center: [
                mix(self.center[0], other.center[0]),
                mix(self.center[1], other.center[1]),
            ],
            eta: mix(self.eta, other.eta),
            zeta: mix(self.zeta, other.zeta),
        }
    }
}

/// A vortex acting on the contiguous layers `first_layer..=last_layer`.
///
/// Parameters vary linearly in layer index from `bottom` (at `first_layer`)
/// to `top` (at `last_layer`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambVortex {
    pub bottom: VortexParams,
    pub top: VortexParams,
    pub first_layer: usize,
    pub last_layer: usize,
}

impl LambVortex {
    /// A vortex with the same parameters on every covered layer.
    pub fn uniform(params: VortexParams, first_layer: usize, last_layer: usize) -> Self {
        LambVortex {
            bottom: params,
            top: params,
            first_layer,
            last_layer,
        }
    }

    pub fn covers(&self, layer: usize) -> bool {
        (self.first_layer..=self.last_layer).contains(&layer)
    }

    pub fn params_at(&self, layer: usize) -> Option<VortexParams> {
        if !self.covers(layer) {
            return None;
        }
        if self.last_layer == self.first_layer {
            return Some(self.bottom);
        }
        let t = (layer - self.first_layer) as f64 / (self.last_layer - self.first_layer) as f64;
        Some(self.bottom.lerp(&self.top, t))
    }

    fn validate(&self) -> Result<()> {
        let ok = |p: &VortexParams| {
            p.zeta > 0.0 && p.zeta.is_finite() && p.eta.is_finite() && p.center.iter().all(|c| c.is_finite())
        };
        if !ok(&self.bottom) || !ok(&self.top) || self.first_layer > self.last_layer {
            return Err(Error::Config(format!("invalid vortex {self:?}")));
        }
        Ok(())
    }

    fn scale_strength(&mut self, factor: f64) {
        self.bottom.eta *= factor;
        self.top.eta *= factor;
    }
}

/// Velocity `(u, v)` induced at `point` by one vortex. The field is purely
/// tangential; at the center it takes its limiting value of zero.
#[inline]
pub fn lamb_vortex_velocity(point: &Vector2<f64>, vortex: &VortexParams) -> Vector2<f64> {
    let dx = point.x - vortex.center[0];
    let dy = point.y - vortex.center[1];
    let r2 = dx * dx + dy * dy;
    if r2 == 0.0 {
        return Vector2::zeros();
    }
    let k = vortex.eta / (2.0 * PI * r2) * -(-r2 / (vortex.zeta * vortex.zeta)).exp_m1();
    Vector2::new(-k * dy, k * dx)
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Vortex parameters resolved per layer.
    Analytic {
        vortices: Vec<LambVortex>,
        per_layer: Vec<Vec<VortexParams>>,
    },
    /// `u`, `v` sampled at every grid point, x-fastest.
    Gridded { u: Vec<f64>, v: Vec<f64> },
}

/// Horizontal wind/current field over a workspace. The vertical component is
/// always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    workspace: Workspace,
    storage: Storage,
}

impl VelocityField {
    pub fn analytic(workspace: &Workspace, vortices: Vec<LambVortex>) -> Result<Self> {
        let nz = workspace.dims().2;
        for v in &vortices {
            v.validate()?;
            if v.last_layer >= nz {
                return Err(Error::Config(format!(
                    "vortex covers layer {} but the workspace has {nz} layers",
                    v.last_layer
                )));
            }
        }
        let per_layer = (0..nz)
            .map(|k| vortices.iter().filter_map(|v| v.params_at(k)).collect())
            .collect();
        Ok(VelocityField {
            workspace: workspace.clone(),
            storage: Storage::Analytic { vortices, per_layer },
        })
    }

    pub fn gridded(workspace: &Workspace, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != workspace.len() || v.len() != workspace.len() {
            return Err(Error::Config(format!(
                "velocity grid has {}/{} values, workspace has {}",
                u.len(),
                v.len(),
                workspace.len()
            )));
        }
        if let Some(index) = u.iter().chain(&v).position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index: index % workspace.len() });
        }
        Ok(VelocityField {
            workspace: workspace.clone(),
            storage: Storage::Gridded { u, v },
        })
    }

    /// Still air and water.
    pub fn calm(workspace: &Workspace) -> Self {
        Self::analytic(workspace, Vec::new()).expect("empty vortex set is valid")
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn vortices(&self) -> Option<&[LambVortex]> {
        match &self.storage {
            Storage::Analytic { vortices, .. } => Some(vortices),
            Storage::Gridded { .. } => None,
        }
    }

    /// Velocity on grid layer `k` at horizontal position `xy`.
    pub fn layer_velocity(&self, k: usize, xy: &Vector2<f64>) -> Vector2<f64> {
        match &self.storage {
            Storage::Analytic { per_layer, .. } => per_layer[k]
                .iter()
                .fold(Vector2::zeros(), |acc, p| acc + lamb_vortex_velocity(xy, p)),
            Storage::Gridded { u, v } => {
                let ws = &self.workspace;
                let (nx, ny, _) = ws.dims();
                let fi = (xy.x / ws.cell() - 0.5).clamp(0.0, (nx - 1) as f64);
                let fj = (xy.y / ws.cell() - 0.5).clamp(0.0, (ny - 1) as f64);
                let (i0, ti) = split(fi, nx);
                let (j0, tj) = split(fj, ny);
                let i1 = (i0 + 1).min(nx - 1);
                let j1 = (j0 + 1).min(ny - 1);
                let at = |f: &[f64]| {
                    let a = f[ws.index(i0, j0, k)] * (1.0 - ti) + f[ws.index(i1, j0, k)] * ti;
                    let b = f[ws.index(i0, j1, k)] * (1.0 - ti) + f[ws.index(i1, j1, k)] * ti;
                    a * (1.0 - tj) + b * tj
                };
                Vector2::new(at(u), at(v))
            }
        }
    }

    /// `(u, v, 0)` at `point`. Between layers the field is interpolated
    /// linearly, using only layers of the point's own medium.
    pub fn velocity_at(&self, point: &Point3) -> Result<Point3> {
        let ws = &self.workspace;
        ws.check_contains(point)?;
        let layers = ws.layers_of(Medium::at_height(point.z));
        let (lo, hi) = (*layers.start(), *layers.end());
        let fk = ((point.z - ws.z_origin()) / ws.cell()).clamp(lo as f64, hi as f64);
        let k0 = (fk.floor() as usize).min(hi);
        let t = fk - k0 as f64;
        let xy = Vector2::new(point.x, point.y);
        let mut uv = self.layer_velocity(k0, &xy);
        if t > 0.0 && k0 < hi {
            uv = uv * (1.0 - t) + self.layer_velocity(k0 + 1, &xy) * t;
        }
        Ok(Point3::new(uv.x, uv.y, 0.0))
    }

    /// Largest speed over the grid points of `medium`.
    pub fn max_grid_speed(&self, medium: Medium) -> f64 {
        let ws = &self.workspace;
        let (nx, ny, _) = ws.dims();
        let mut best = 0.0f64;
        for k in ws.layers_of(medium) {
            for j in 0..ny {
                for i in 0..nx {
                    let xy = Vector2::new(ws.x_of(i), ws.y_of(j));
                    best = best.max(self.layer_velocity(k, &xy).norm());
                }
            }
        }
        best
    }

    /// Scales the strength of every vortex lying in `medium` so that the grid
    /// maximum there does not exceed `cap`. Gridded fields are scaled directly.
    pub(crate) fn enforce_cap(&mut self, medium: Medium, cap: f64) -> Result<()> {
        let layers = self.workspace.layers_of(medium);
        for _ in 0..8 {
            let max = self.max_grid_speed(medium);
            if max <= cap {
                return Ok(());
            }
            let factor = cap / max * (1.0 - 1e-12);
            match &mut self.storage {
                Storage::Analytic { vortices, .. } => {
                    for v in vortices.iter_mut() {
                        if layers.contains(&v.first_layer) && layers.contains(&v.last_layer) {
                            v.scale_strength(factor);
                        } else if v.first_layer <= *layers.end() && v.last_layer >= *layers.start() {
                            return Err(Error::Config(
                                "cannot cap a vortex spanning both media".into(),
                            ));
                        }
                    }
                    let vortices = std::mem::take(vortices);
                    *self = VelocityField::analytic(&self.workspace, vortices)?;
                }
                Storage::Gridded { u, v } => {
                    let plane = self.workspace.dims().0 * self.workspace.dims().1;
                    let span = layers.start() * plane..(layers.end() + 1) * plane;
                    u[span.clone()].iter_mut().for_each(|x| *x *= factor);
                    v[span].iter_mut().for_each(|x| *x *= factor);
                }
            }
        }
        Err(Error::Config(format!("could not bring {medium:?} speeds under {cap} m/s")))
    }
}

fn split(f: f64, n: usize) -> (usize, f64) {
    let i0 = (f.floor() as usize).min(n.saturating_sub(1));
    (i0, f - i0 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vortex(cx: f64, cy: f64, eta: f64, zeta: f64) -> VortexParams {
        VortexParams {
            center: [cx, cy],
            eta,
            zeta,
        }
    }

    #[test]
    fn center_is_still() {
        let v = vortex(10.0, -3.0, 5.0, 2.0);
        assert_eq!(lamb_vortex_velocity(&Vector2::new(10.0, -3.0), &v), Vector2::zeros());
    }

    #[test]
    fn unit_radius_point() {
        let v = vortex(2.0, 3.0, 2.0 * PI, 1.0);
        let uv = lamb_vortex_velocity(&Vector2::new(3.0, 3.0), &v);
        assert_relative_eq!(uv.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(uv.y, 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(uv.y, 0.632121, epsilon = 1e-6);
    }

    #[test]
    fn field_is_tangential() {
        let v = vortex(100.0, 200.0, 3000.0, 150.0);
        for (x, y) in [(0.0, 0.0), (130.0, 170.0), (101.0, 200.5), (5000.0, -40.0)] {
            let uv = lamb_vortex_velocity(&Vector2::new(x, y), &v);
            let radial = uv.x * (x - 100.0) + uv.y * (y - 200.0);
            assert!(radial.abs() <= 1e-12, "{radial}");
        }
    }

    #[test]
    fn empty_field_is_calm_and_vertical_component_is_zero() {
        let ws = Workspace::standard();
        let f = VelocityField::calm(&ws);
        assert_eq!(f.velocity_at(&Point3::new(100.0, 100.0, 50.0)).unwrap(), Point3::zeros());
        assert!(f.velocity_at(&Point3::new(100.0, 100.0, 500.0)).is_err());
    }

    #[test]
    fn superposition_of_opposite_vortices() {
        let ws = Workspace::standard();
        let a = vortex(2000.0, 2500.0, 4000.0, 300.0);
        let b = vortex(3000.0, 2500.0, -4000.0, 300.0);
        let f = VelocityField::analytic(
            &ws,
            vec![LambVortex::uniform(a, 0, 6), LambVortex::uniform(b, 0, 6)],
        )
        .unwrap();
        let p = Point3::new(2500.0, 2500.0, -100.0);
        let got = f.velocity_at(&p).unwrap();
        let xy = Vector2::new(p.x, p.y);
        let expect = lamb_vortex_velocity(&xy, &a) + lamb_vortex_velocity(&xy, &b);
        assert_eq!(got.x, expect.x);
        assert_eq!(got.y, expect.y);
        assert_eq!(got.z, 0.0);
        // on the line between the centers the x components cancel
        assert_relative_eq!(got.x, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn layers_outside_the_range_are_unaffected() {
        let ws = Workspace::standard();
        let f = VelocityField::analytic(
            &ws,
            vec![LambVortex::uniform(vortex(2500.0, 2500.0, 1e4, 500.0), 7, 12)],
        )
        .unwrap();
        assert_eq!(f.velocity_at(&Point3::new(2000.0, 2500.0, -50.0)).unwrap(), Point3::zeros());
        assert!(f.velocity_at(&Point3::new(2000.0, 2500.0, 100.0)).unwrap().norm() > 0.0);
    }

    #[test]
    fn parameters_interpolate_across_layers() {
        let v = LambVortex {
            bottom: vortex(0.0, 0.0, 10.0, 100.0),
            top: vortex(100.0, 0.0, 30.0, 300.0),
            first_layer: 2,
            last_layer: 4,
        };
        let mid = v.params_at(3).unwrap();
        assert_eq!(mid, vortex(50.0, 0.0, 20.0, 200.0));
        assert!(v.params_at(5).is_none());
    }

    #[test]
    fn cap_is_enforced() {
        let ws = Workspace::new(20, 20, 5, 50.0, 2).unwrap();
        let mut f = VelocityField::analytic(
            &ws,
            vec![LambVortex::uniform(vortex(500.0, 500.0, 5e4, 100.0), 0, 2)],
        )
        .unwrap();
        assert!(f.max_grid_speed(Medium::Sea) > 0.4);
        f.enforce_cap(Medium::Sea, 0.4).unwrap();
        let m = f.max_grid_speed(Medium::Sea);
        assert!(m <= 0.4 && m > 0.399);
    }

    #[test]
    fn gridded_interpolation_reproduces_affine_fields() {
        let ws = Workspace::new(6, 5, 3, 10.0, 1).unwrap();
        let mut u = vec![0.0; ws.len()];
        let mut v = vec![0.0; ws.len()];
        for idx in 0..ws.len() {
            let (i, j, k) = ws.ijk(idx);
            let p = ws.grid_point(i, j, k);
            u[idx] = 0.5 + 0.01 * p.x;
            v[idx] = -0.02 * p.y + 0.1;
        }
        let f = VelocityField::gridded(&ws, u, v).unwrap();
        let p = Point3::new(23.7, 31.1, -4.0);
        let w = f.velocity_at(&p).unwrap();
        assert_relative_eq!(w.x, 0.5 + 0.01 * p.x, epsilon = 1e-12);
        assert_relative_eq!(w.y, -0.02 * p.y + 0.1, epsilon = 1e-12);
    }
}
