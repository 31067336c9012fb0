//! Gaussian-mixture information maps.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::workspace::Workspace;
use crate::{Error, Point3, Result};

/// One component of the information mixture: a weighted 3D Gaussian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FeatureSpec", into = "FeatureSpec")]
pub struct GaussianFeature {
    mu: Point3,
    sigma: Matrix3<f64>,
    g: f64,
    // Lower Cholesky factor of sigma and the normalized peak weight
    // g / sqrt((2 pi)^3 |sigma|).
    chol: Matrix3<f64>,
    scale: f64,
}

/// Serialized form of a [`GaussianFeature`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSpec {
    pub mu: [f64; 3],
    pub sigma: [[f64; 3]; 3],
    pub g: f64,
}

impl TryFrom<FeatureSpec> for GaussianFeature {
    type Error = Error;

    fn try_from(s: FeatureSpec) -> Result<Self> {
        let sigma = Matrix3::from_fn(|r, c| s.sigma[r][c]);
        GaussianFeature::new(Point3::from(s.mu), sigma, s.g)
    }
}

impl From<GaussianFeature> for FeatureSpec {
    fn from(f: GaussianFeature) -> Self {
        let m = f.sigma;
        FeatureSpec {
            mu: [f.mu.x, f.mu.y, f.mu.z],
            sigma: [
                [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
            ],
            g: f.g,
        }
    }
}

impl GaussianFeature {
    /// Validates the covariance (symmetric, positive definite) and the weight.
    pub fn new(mu: Point3, sigma: Matrix3<f64>, g: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Config(format!("feature weight must be positive, got {g}")));
        }
        if mu.iter().chain(sigma.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entry".into()));
        }
        let scale_ref = sigma.amax().max(f64::MIN_POSITIVE);
        for r in 0..3 {
            for c in 0..r {
                if (sigma[(r, c)] - sigma[(c, r)]).abs() > 1e-9 * scale_ref {
                    return Err(Error::InvalidCovariance(format!(
                        "not symmetric at ({r}, {c})"
                    )));
                }
            }
        }
        let chol = nalgebra::Cholesky::new(sigma)
            .ok_or_else(|| Error::InvalidCovariance("singular or indefinite".into()))?
            .l();
        let sqrt_det = chol[(0, 0)] * chol[(1, 1)] * chol[(2, 2)];
        if !(sqrt_det > 0.0) {
            return Err(Error::InvalidCovariance(format!("determinant {}", sqrt_det * sqrt_det)));
        }
        let scale = g / ((2.0 * PI).powi(3).sqrt() * sqrt_det);
        Ok(GaussianFeature {
            mu,
            sigma,
            g,
            chol,
            scale,
        })
    }

    pub fn mu(&self) -> &Point3 {
        &self.mu
    }

    pub fn sigma(&self) -> &Matrix3<f64> {
        &self.sigma
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Weighted density of this component at `p`.
    #[inline]
    pub fn value_at(&self, p: &Point3) -> f64 {
        let d = p - self.mu;
        let l = &self.chol;
        let y0 = d.x / l[(0, 0)];
        let y1 = (d.y - l[(1, 0)] * y0) / l[(1, 1)];
        let y2 = (d.z - l[(2, 0)] * y0 - l[(2, 1)] * y1) / l[(2, 2)];
        self.scale * (-0.5 * (y0 * y0 + y1 * y1 + y2 * y2)).exp()
    }
}

/// Information value of the mixture at `point`.
pub fn gaussian_info_value(point: &Point3, features: &[GaussianFeature]) -> f64 {
    features.iter().map(|f| f.value_at(point)).sum()
}

/// `C = B^T A B` for `A = diag(a)`. Each entry is accumulated in the same
/// order as its transpose, so the result is exactly symmetric.
pub fn covariance_from_parts(a: &Vector3<f64>, b: &Matrix3<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| {
        (0..3)
            .map(|k| {
                let (lo, hi) = if r <= c { (r, c) } else { (c, r) };
                a[k] * b[(k, lo)] * b[(k, hi)]
            })
            .sum()
    })
}

/// Random covariance: a positive diagonal `A` with entries drawn from
/// `variance_range` (m^2), rotated by the orthonormal basis of a random 3x3
/// matrix. Near-singular random matrices are redrawn.
pub fn random_covariance<R: Rng + ?Sized>(rng: &mut R, variance_range: [f64; 2]) -> Matrix3<f64> {
    let [lo, hi] = variance_range;
    let a = Vector3::from_fn(|_, _| if hi > lo { rng.gen_range(lo..hi) } else { lo });
    loop {
        let m = Matrix3::from_fn(|_, _| rng.gen::<f64>());
        if m.determinant().abs() < 1e-6 {
            continue;
        }
        let q = m.qr().q();
        return covariance_from_parts(&a, &q);
    }
}

/// Per-side flags set when a side's raw values had zero range and were left
/// as zeros instead of being rescaled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateSides {
    pub air: bool,
    pub sea: bool,
}

/// Min-max rescales air-layer values and sea-layer values independently into
/// `[0, 1]`. A side with constant values becomes all zeros and is flagged.
pub fn normalize_by_side(values: &[f64], ws: &Workspace) -> Result<(Vec<f64>, DegenerateSides)> {
    if values.len() != ws.len() {
        return Err(Error::Config(format!(
            "field has {} values, workspace has {} grid points",
            values.len(),
            ws.len()
        )));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let plane = ws.dims().0 * ws.dims().1;
    let split = (ws.sea_level_index() + 1) * plane;
    let mut out = values.to_vec();
    let (sea, air) = out.split_at_mut(split);
    let flags = DegenerateSides {
        sea: rescale(sea),
        air: rescale(air),
    };
    Ok((out, flags))
}

fn rescale(side: &mut [f64]) -> bool {
    if side.is_empty() {
        return false;
    }
    let (lo, hi) = side
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) {
        side.iter_mut().for_each(|v| *v = 0.0);
        return true;
    }
    side.iter_mut().for_each(|v| *v = (*v - lo) / range);
    false
}

/// Normalized information values on the workspace grid plus the air/sea
/// weights used by the information objective.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoMap {
    workspace: Workspace,
    values: Vec<f64>,
    kappa_air: f64,
    kappa_sea: f64,
    degenerate: DegenerateSides,
}

impl InfoMap {
    /// Wraps already-normalized values.
    pub fn from_normalized(
        workspace: Workspace,
        values: Vec<f64>,
        kappa_air: f64,
        kappa_sea: f64,
        degenerate: DegenerateSides,
    ) -> Result<Self> {
        if values.len() != workspace.len() {
            return Err(Error::Config(format!(
                "information map has {} values, workspace has {}",
                values.len(),
                workspace.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Config(format!(
                "information value {} at index {index} outside [0, 1]",
                values[index]
            )));
        }
        check_kappa(kappa_air, kappa_sea)?;
        Ok(InfoMap {
            workspace,
            values,
            kappa_air,
            kappa_sea,
            degenerate,
        })
    }

    /// Normalizes raw values side by side, then wraps them.
    pub fn from_raw(workspace: Workspace, raw: &[f64], kappa_air: f64, kappa_sea: f64) -> Result<Self> {
        let (values, degenerate) = normalize_by_side(raw, &workspace)?;
        Self::from_normalized(workspace, values, kappa_air, kappa_sea, degenerate)
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn kappa_air(&self) -> f64 {
        self.kappa_air
    }

    pub fn kappa_sea(&self) -> f64 {
        self.kappa_sea
    }

    pub fn degenerate(&self) -> DegenerateSides {
        self.degenerate
    }

    /// Weight of grid layer `k`.
    #[inline]
    pub fn kappa_of_layer(&self, k: usize) -> f64 {
        if self.workspace.is_air_layer(k) {
            self.kappa_air
        } else {
            self.kappa_sea
        }
    }

    /// Same values under different air/sea weights.
    pub fn with_kappa(mut self, kappa_air: f64, kappa_sea: f64) -> Result<Self> {
        check_kappa(kappa_air, kappa_sea)?;
        self.kappa_air = kappa_air;
        self.kappa_sea = kappa_sea;
        Ok(self)
    }

    /// `sum_j kappa_j * IM(rho_j)`, the most any path could collect with a
    /// unit peak perception factor.
    pub fn weighted_total(&self) -> f64 {
        let plane = self.workspace.dims().0 * self.workspace.dims().1;
        self.values
            .chunks(plane)
            .enumerate()
            .map(|(k, layer)| self.kappa_of_layer(k) * layer.iter().sum::<f64>())
            .sum()
    }
}

fn check_kappa(kappa_air: f64, kappa_sea: f64) -> Result<()> {
    if !(kappa_air >= 0.0 && kappa_sea >= 0.0 && kappa_air.is_finite() && kappa_sea.is_finite()) {
        return Err(Error::Config(format!(
            "weights must be non-negative, got air {kappa_air}, sea {kappa_sea}"
        )));
    }
    Ok(())
}

/// Evaluates the mixture at every grid point and normalizes each side.
pub fn build_info_map(
    features: &[GaussianFeature],
    workspace: &Workspace,
    kappa_air: f64,
    kappa_sea: f64,
) -> Result<InfoMap> {
    if !features.iter().any(|f| f.g() > 0.0) {
        return Err(Error::Config("information map needs at least one feature".into()));
    }
    let raw: Vec<f64> = (0..workspace.len())
        .map(|idx| {
            let (i, j, k) = workspace.ijk(idx);
            gaussian_info_value(&workspace.grid_point(i, j, k), features)
        })
        .collect();
    InfoMap::from_raw(workspace.clone(), &raw, kappa_air, kappa_sea)
}
