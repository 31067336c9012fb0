//! Information collection: the per-path `measured` array and the sensing
//! kernel that fills it.

use crate::env::InfoMap;
use crate::vehicle::SensorParams;
use crate::Point3;

use super::SmoothPath;

/// Best reading obtained so far at every grid point, for one path.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredArray {
    values: Vec<f64>,
}

impl MeasuredArray {
    pub fn zeros(len: usize) -> Self {
        MeasuredArray { values: vec![0.0; len] }
    }

    pub fn for_map(im: &InfoMap) -> Self {
        Self::zeros(im.values().len())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Max-update of one grid point.
    #[inline]
    pub fn raise(&mut self, idx: usize, reading: f64) {
        if reading > self.values[idx] {
            self.values[idx] = reading;
        }
    }
}

/// Applies every sample of `path` to `measured` with the max-update rule.
pub fn accumulate_information(path: &SmoothPath, im: &InfoMap, sensor: &SensorParams, measured: &mut MeasuredArray) {
    assert_eq!(measured.values.len(), im.values().len(), "measured array does not match the map");
    let mut kernel = SensorKernel::new(im, sensor);
    for s in path.samples() {
        kernel.readings(&s.position, |idx, r, _| measured.raise(idx, r));
    }
}

/// `sum_j kappa_j * measured_j`.
pub fn total_information(measured: &MeasuredArray, im: &InfoMap) -> f64 {
    let (nx, ny, _) = im.workspace().dims();
    measured
        .values
        .chunks(nx * ny)
        .enumerate()
        .map(|(k, layer)| im.kappa_of_layer(k) * layer.iter().sum::<f64>())
        .sum()
}

/// Enumerates the grid points within sensing range of a sample together with
/// their readings. The attenuation factors per axis: `exp(-sigma d^2 /
/// d_max^2)` splits into a product over x, y and z.
pub(crate) struct SensorKernel<'a> {
    im: &'a InfoMap,
    a_dmax: f64,
    d_max2: f64,
    inv_d_max2: f64,
    sigma: f64,
    reach: f64,
    cell: f64,
    origin: [f64; 3],
    dims: [usize; 3],
    kappa: Vec<f64>,
    axes: [Vec<(usize, f64, f64)>; 3],
}

impl<'a> SensorKernel<'a> {
    pub(crate) fn new(im: &'a InfoMap, sensor: &SensorParams) -> Self {
        let ws = im.workspace();
        let (nx, ny, nz) = ws.dims();
        SensorKernel {
            im,
            a_dmax: sensor.a_dmax,
            d_max2: sensor.d_max * sensor.d_max,
            inv_d_max2: 1.0 / (sensor.d_max * sensor.d_max),
            sigma: sensor.sigma,
            reach: sensor.d_max,
            cell: ws.cell(),
            origin: [0.5 * ws.cell(), 0.5 * ws.cell(), ws.z_origin()],
            dims: [nx, ny, nz],
            kappa: (0..nz).map(|k| im.kappa_of_layer(k)).collect(),
            axes: Default::default(),
        }
    }

    /// Calls `f(index, reading, kappa)` for every grid point in range of `p`
    /// holding nonzero information.
    #[inline]
    pub(crate) fn readings(&mut self, p: &Point3, mut f: impl FnMut(usize, f64, f64)) {
        for a in 0..3 {
            let axis = &mut self.axes[a];
            axis.clear();
            let lo = ((p[a] - self.reach - self.origin[a]) / self.cell).ceil().max(0.0);
            let hi = ((p[a] + self.reach - self.origin[a]) / self.cell).floor();
            if hi < 0.0 || lo > hi {
                return;
            }
            let hi = (hi as usize).min(self.dims[a] - 1);
            for i in lo as usize..=hi {
                let d = p[a] - (self.origin[a] + i as f64 * self.cell);
                let d2 = d * d;
                axis.push((i, d2, (-self.sigma * d2 * self.inv_d_max2).exp()));
            }
            if axis.is_empty() {
                return;
            }
        }
        let [xs, ys, zs] = &self.axes;
        let (nx, ny) = (self.dims[0], self.dims[1]);
        let values = self.im.values();
        for &(k, dz2, ez) in zs {
            let kappa = self.kappa[k];
            for &(j, dy2, ey) in ys {
                let dyz2 = dy2 + dz2;
                if dyz2 > self.d_max2 {
                    continue;
                }
                let eyz = self.a_dmax * ey * ez;
                let row = nx * (j + ny * k);
                for &(i, dx2, ex) in xs {
                    if dx2 + dyz2 > self.d_max2 {
                        continue;
                    }
                    let idx = row + i;
                    let v = values[idx];
                    if v > 0.0 {
                        f(idx, v * eyz * ex, kappa);
                    }
                }
            }
        }
    }
}

/// Sparse `measured` array reused across evaluations. Entries written in the
/// current epoch are live; everything else reads as zero. The weighted total
/// is maintained as values are raised.
#[derive(Clone, Debug)]
pub(crate) struct SparseMeasured {
    values: Vec<f64>,
    stamp: Vec<u32>,
    epoch: u32,
    touched: Vec<u32>,
    total: f64,
}

impl SparseMeasured {
    pub(crate) fn new(len: usize) -> Self {
        SparseMeasured {
            values: vec![0.0; len],
            stamp: vec![0; len],
            epoch: 1,
            touched: Vec::new(),
            total: 0.0,
        }
    }

    pub(crate) fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.touched.clear();
        self.total = 0.0;
    }

    #[inline]
    pub(crate) fn get(&self, idx: usize) -> f64 {
        if self.stamp[idx] == self.epoch {
            self.values[idx]
        } else {
            0.0
        }
    }

    /// Max-update that leaves the running total alone, used to restore a
    /// known prefix state.
    #[inline]
    pub(crate) fn set_base(&mut self, idx: usize, value: f64) {
        if self.stamp[idx] != self.epoch {
            self.stamp[idx] = self.epoch;
            self.values[idx] = value;
        } else if value > self.values[idx] {
            self.values[idx] = value;
        }
    }

    /// Max-update; returns whether the entry grew.
    #[inline]
    pub(crate) fn raise(&mut self, idx: usize, reading: f64, kappa: f64) -> bool {
        let cur = self.get(idx);
        if reading <= cur {
            return false;
        }
        if self.stamp[idx] != self.epoch {
            self.stamp[idx] = self.epoch;
        }
        self.touched.push(idx as u32);
        self.total += kappa * (reading - cur);
        self.values[idx] = reading;
        true
    }

    pub(crate) fn total(&self) -> f64 {
        self.total
    }

    /// Indices raised since the last reset, in order, with repeats.
    pub(crate) fn raised(&self) -> &[u32] {
        &self.touched
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{DegenerateSides, Workspace};
    use crate::path::smooth_path;
    use crate::vehicle::sensor_reading;
    use approx::assert_relative_eq;

    fn map_with(ws: &Workspace, f: impl Fn(usize) -> f64, ka: f64, ks: f64) -> InfoMap {
        let values = (0..ws.len()).map(f).collect();
        InfoMap::from_normalized(ws.clone(), values, ka, ks, DegenerateSides::default()).unwrap()
    }

    #[test]
    fn single_sample_on_a_grid_point() {
        let ws = Workspace::standard();
        let im = map_with(&ws, |_| 1.0, 1.0, 1.0);
        let p = ws.grid_point(50, 50, 6);
        let path = smooth_path(&[p, p], 25.0).unwrap();
        let mut m = MeasuredArray::for_map(&im);
        accumulate_information(&path, &im, &SensorParams::default(), &mut m);
        assert_eq!(m.values()[ws.index(50, 50, 6)], 1.0);
        assert_relative_eq!(m.values()[ws.index(51, 50, 6)], (-0.25f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(m.values()[ws.index(50, 50, 5)], 0.778801, epsilon = 1e-6);
        assert_eq!(m.values()[ws.index(53, 50, 6)], 0.0);
        let before = m.clone();
        accumulate_information(&path, &im, &SensorParams::default(), &mut m);
        assert_eq!(m, before);
    }

    #[test]
    fn weighted_total() {
        let ws = Workspace::standard();
        let im = map_with(&ws, |_| 0.5, 1.0, 3.0);
        let mut m = MeasuredArray::for_map(&im);
        assert_eq!(total_information(&m, &im), 0.0);
        m.raise(ws.index(3, 4, 2), 0.4);
        assert_relative_eq!(total_information(&m, &im), 1.2, epsilon = 1e-15);
        m.raise(ws.index(3, 4, 9), 0.25);
        assert_relative_eq!(total_information(&m, &im), 1.45, epsilon = 1e-15);
    }

    #[test]
    fn kernel_matches_brute_force() {
        let ws = Workspace::new(20, 20, 9, 50.0, 4).unwrap();
        let im = map_with(&ws, |i| ((i * 37) % 101) as f64 / 100.0, 1.0, 2.0);
        let sensor = SensorParams {
            a_dmax: 0.8,
            sigma: 1.3,
            d_max: 120.0,
        };
        let mut kernel = SensorKernel::new(&im, &sensor);
        for p in [
            Point3::new(12.0, 7.0, -200.0),
            Point3::new(503.3, 610.1, 13.7),
            Point3::new(999.0, 999.0, 200.0),
        ] {
            let mut got = vec![0.0; ws.len()];
            kernel.readings(&p, |idx, r, _| got[idx] = r);
            for idx in 0..ws.len() {
                let (i, j, k) = ws.ijk(idx);
                let expect = sensor_reading(&p, &ws.grid_point(i, j, k), im.value(idx), &sensor);
                assert!((got[idx] - expect).abs() <= 1e-14, "{idx}: {} vs {expect}", got[idx]);
            }
        }
    }

    #[test]
    fn sparse_array_tracks_total() {
        let mut s = SparseMeasured::new(10);
        assert!(s.raise(3, 0.5, 2.0));
        assert!(!s.raise(3, 0.4, 2.0));
        assert!(s.raise(3, 0.7, 2.0));
        assert!(s.raise(9, 0.1, 1.0));
        assert_relative_eq!(s.total(), 1.5, epsilon = 1e-15);
        assert_eq!(s.raised(), &[3, 3, 9]);
        s.set_base(5, 0.3);
        assert_eq!(s.get(5), 0.3);
        assert_relative_eq!(s.total(), 1.5, epsilon = 1e-15);
        s.reset();
        assert_eq!(s.get(3), 0.0);
        assert_eq!(s.total(), 0.0);
        assert!(s.raised().is_empty());
    }
}
