use super::{IngestError, RawGrid};
use crate::env::{
    normalize_by_side, DegenerateSides, Environment, InfoMap, ObstacleSet, VelocityField, Workspace,
};
use crate::{Error, Result};

/// Relative slack when checking that the raw grid covers the workspace.
const COVER_TOL: f64 = 1e-9;

/// Per-axis interpolation weights: lower node and fraction toward the next.
struct Axis {
    i0: usize,
    i1: usize,
    t: f64,
}

fn axis_weights(raw: &RawGrid, axis: usize, x: f64) -> Axis {
    let n = raw.dims[axis];
    if n == 1 {
        return Axis { i0: 0, i1: 0, t: 0.0 };
    }
    let f = ((x - raw.origin[axis]) / raw.spacing[axis]).clamp(0.0, (n - 1) as f64);
    let i0 = (f.floor() as usize).min(n - 2);
    Axis {
        i0,
        i1: i0 + 1,
        t: f - i0 as f64,
    }
}

fn check_cover(raw: &RawGrid, axis: usize, lo: f64, hi: f64) -> Result<(), IngestError> {
    let name = ['x', 'y', 'z'][axis];
    let start = raw.origin[axis];
    let end = raw.node(axis, raw.dims[axis] - 1);
    let tol = COVER_TOL * (1.0 + start.abs().max(end.abs()));
    if lo < start - tol || hi > end + tol {
        return Err(IngestError::Coverage { axis: name });
    }
    Ok(())
}

/// Trilinearly resamples the raw fields onto the workspace grid points.
/// Returns the (unnormalized) information values and the gridded velocity
/// field.
pub fn interpolate_to_workspace(raw: &RawGrid, ws: &Workspace) -> Result<(Vec<f64>, VelocityField)> {
    let (nx, ny, nz) = ws.dims();
    check_cover(raw, 0, ws.x_of(0), ws.x_of(nx - 1))?;
    check_cover(raw, 1, ws.y_of(0), ws.y_of(ny - 1))?;
    check_cover(raw, 2, ws.z_of(0), ws.z_of(nz - 1))?;

    let xs: Vec<Axis> = (0..nx).map(|i| axis_weights(raw, 0, ws.x_of(i))).collect();
    let ys: Vec<Axis> = (0..ny).map(|j| axis_weights(raw, 1, ws.y_of(j))).collect();
    let zs: Vec<Axis> = (0..nz).map(|k| axis_weights(raw, 2, ws.z_of(k))).collect();

    let mut info = Vec::with_capacity(ws.len());
    let mut u = Vec::with_capacity(ws.len());
    let mut v = Vec::with_capacity(ws.len());
    for z in &zs {
        for y in &ys {
            for x in &xs {
                let sample = |f: &[f64]| {
                    let line = |j: usize, k: usize| {
                        let a = f[raw.index(x.i0, j, k)];
                        let b = f[raw.index(x.i1, j, k)];
                        lerp(a, b, x.t)
                    };
                    let plane = |k: usize| lerp(line(y.i0, k), line(y.i1, k), y.t);
                    lerp(plane(z.i0), plane(z.i1), z.t)
                };
                info.push(sample(&raw.info));
                u.push(sample(&raw.u));
                v.push(sample(&raw.v));
            }
        }
    }
    Ok((info, VelocityField::gridded(ws, u, v)?))
}

// Exact at both ends, so node-coincident queries return stored values.
#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else if t == 1.0 {
        b
    } else {
        a + (b - a) * t
    }
}

/// Min-max rescales air and sea layers independently, see
/// [`normalize_by_side`].
pub fn normalize_field(values: &[f64], ws: &Workspace) -> Result<(Vec<f64>, DegenerateSides)> {
    if values.is_empty() {
        return Err(Error::Config("cannot normalize an empty field".into()));
    }
    normalize_by_side(values, ws)
}

/// An environment whose information and velocity come from `raw`.
pub fn environment_from_grid(
    raw: &RawGrid,
    ws: &Workspace,
    kappa_air: f64,
    kappa_sea: f64,
    obstacles: ObstacleSet,
) -> Result<Environment> {
    let (info, velocity) = interpolate_to_workspace(raw, ws)?;
    let (values, degenerate) = normalize_field(&info, ws)?;
    let info = InfoMap::from_normalized(ws.clone(), values, kappa_air, kappa_sea, degenerate)?;
    Environment::new(info, velocity, obstacles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn raw_from(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3], mut f: impl FnMut(f64, f64, f64) -> f64) -> RawGrid {
        let mut vals = Vec::new();
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    vals.push(f(
                        origin[0] + i as f64 * spacing[0],
                        origin[1] + j as f64 * spacing[1],
                        origin[2] + k as f64 * spacing[2],
                    ));
                }
            }
        }
        let n = vals.len();
        RawGrid::new(dims, spacing, origin, vals.clone(), vals, vec![0.0; n]).unwrap()
    }

    #[test]
    fn constants_and_affine_fields_are_reproduced() {
        let ws = Workspace::new(10, 8, 5, 50.0, 2).unwrap();
        let c = raw_from([4, 4, 3], [200.0, 200.0, 100.0], [0.0, 0.0, -100.0], |_, _, _| 3.25);
        let (info, _) = interpolate_to_workspace(&c, &ws).unwrap();
        assert!(info.iter().all(|&x| x == 3.25));

        let f = |x: f64, y: f64, z: f64| 0.3 * x - 0.002 * y + 0.01 * z + 1.5;
        let a = raw_from([4, 4, 3], [200.0, 200.0, 100.0], [0.0, 0.0, -100.0], f);
        let (info, vel) = interpolate_to_workspace(&a, &ws).unwrap();
        for idx in 0..ws.len() {
            let (i, j, k) = ws.ijk(idx);
            let p = ws.grid_point(i, j, k);
            assert!((info[idx] - f(p.x, p.y, p.z)).abs() <= 1e-12 * f(p.x, p.y, p.z).abs().max(1.0));
            let w = vel.velocity_at(&p).unwrap();
            assert!((w.x - f(p.x, p.y, p.z)).abs() <= 1e-12 * f(p.x, p.y, p.z).abs().max(1.0));
        }
    }

    #[test]
    fn node_coincident_outputs_equal_raw_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // raw nodes every 100 m starting at the first cell center
        let raw = raw_from([7, 6, 3], [100.0, 100.0, 100.0], [25.0, 25.0, -100.0], |_, _, _| {
            rng.gen::<f64>()
        });
        let ws = Workspace::new(12, 10, 5, 50.0, 2).unwrap();
        let (info, _) = interpolate_to_workspace(&raw, &ws).unwrap();
        for k in (0..5).step_by(2) {
            for j in (0..10).step_by(2) {
                for i in (0..12).step_by(2) {
                    let expect = raw.info[raw.index(i / 2, j / 2, k / 2)];
                    assert_eq!(info[ws.index(i, j, k)], expect);
                }
            }
        }
    }

    #[test]
    fn uncovered_axis_is_named() {
        let ws = Workspace::new(10, 10, 5, 50.0, 2).unwrap();
        let raw = raw_from([3, 6, 3], [100.0, 100.0, 100.0], [0.0, 0.0, -100.0], |_, _, _| 0.0);
        let err = interpolate_to_workspace(&raw, &ws).unwrap_err();
        assert!(matches!(err, Error::Ingest(IngestError::Coverage { axis: 'x' })), "{err}");
    }

    #[test]
    fn normalization_cases() {
        let ws = Workspace::new(2, 1, 1, 1.0, 0).unwrap();
        assert_eq!(normalize_field(&[2.0, 4.0], &ws).unwrap().0, vec![0.0, 1.0]);
        let ws3 = Workspace::new(3, 1, 1, 1.0, 0).unwrap();
        let (z, flags) = normalize_field(&[5.0, 5.0, 5.0], &ws3).unwrap();
        assert_eq!(z, vec![0.0; 3]);
        assert!(flags.sea);
        assert!(normalize_field(&[1.0, f64::NAN], &ws).is_err());
    }

    #[test]
    fn environment_from_grid_normalizes() {
        let ws = Workspace::new(10, 10, 5, 50.0, 2).unwrap();
        let raw = raw_from([6, 6, 3], [100.0, 100.0, 100.0], [0.0, 0.0, -100.0], |x, _, z| x + z);
        let env = environment_from_grid(&raw, &ws, 1.0, 2.0, ObstacleSet::empty()).unwrap();
        assert!(env.info().values().iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(env.velocity().velocity_at(&Point3::new(100.0, 100.0, 0.0)).unwrap().z, 0.0);
    }
}
