//! Vehicle model: sensing, speed synthesis under ambient flow, and per-segment
//! time/energy accounting.

use serde::{Deserialize, Serialize};

use crate::env::{Environment, Medium};
use crate::{Error, Point3, Result};

/// Propulsion and budget parameters. Powers are in budget units per second.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    pub v_air: f64,
    pub v_sea: f64,
    pub p_air: f64,
    pub p_sea: f64,
    pub e_switch: f64,
    pub t_switch: f64,
    pub e_max: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        let e_max = 1.0;
        VehicleParams {
            v_air: 10.0,
            v_sea: 0.5,
            p_air: e_max / 900.0,
            p_sea: e_max / 28_800.0,
            e_switch: e_max / 30.0,
            t_switch: 20.0,
            e_max,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.v_air,
            self.v_sea,
            self.p_air,
            self.p_sea,
            self.e_switch,
            self.t_switch,
            self.e_max,
        ];
        if !all.iter().all(|x| *x > 0.0 && x.is_finite()) {
            return Err(Error::Config(format!("vehicle parameters must be positive: {self:?}")));
        }
        if self.p_air >= self.e_max || self.e_switch >= self.e_max {
            return Err(Error::Config("per-second or switching cost exceeds the energy budget".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn speed(&self, medium: Medium) -> f64 {
        match medium {
            Medium::Air => self.v_air,
            Medium::Sea => self.v_sea,
        }
    }

    #[inline]
    pub fn power(&self, medium: Medium) -> f64 {
        match medium {
            Medium::Air => self.p_air,
            Medium::Sea => self.p_sea,
        }
    }

    /// Energy of a path from its time split and transition count.
    #[inline]
    pub fn energy(&self, t_air: f64, t_sea: f64, transitions: usize) -> f64 {
        self.p_air * t_air + self.p_sea * t_sea + transitions as f64 * self.e_switch
    }

    /// Mission time from the same quantities.
    #[inline]
    pub fn mission_time(&self, t_air: f64, t_sea: f64, transitions: usize) -> f64 {
        t_air + t_sea + transitions as f64 * self.t_switch
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorParams {
    pub a_dmax: f64,
    pub sigma: f64,
    pub d_max: f64,
}

impl Default for SensorParams {
    fn default() -> Self {
        SensorParams {
            a_dmax: 1.0,
            sigma: 1.0,
            d_max: 100.0,
        }
    }
}

impl SensorParams {
    pub fn validate(&self) -> Result<()> {
        if !((0.0..=1.0).contains(&self.a_dmax) && self.d_max > 0.0 && self.d_max.is_finite())
            || !(self.sigma >= 0.0 && self.sigma.is_finite())
        {
            return Err(Error::Config(format!("invalid sensor parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleModel {
    pub vehicle: VehicleParams,
    pub sensor: SensorParams,
}

impl VehicleModel {
    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        self.sensor.validate()
    }
}

/// Fraction of a grid point's information perceived at distance `d`.
#[inline]
pub fn sensor_attenuation(d: f64, sensor: &SensorParams) -> f64 {
    if d > sensor.d_max {
        return 0.0;
    }
    let s = d / sensor.d_max;
    sensor.a_dmax * (-sensor.sigma * s * s).exp()
}

#[inline]
pub fn sensor_reading(path_point: &Point3, grid_point: &Point3, im_value: f64, sensor: &SensorParams) -> f64 {
    im_value * sensor_attenuation((path_point - grid_point).norm(), sensor)
}

/// Ground speed along unit `direction` for a vehicle moving at `v_hauv`
/// through a medium flowing at `v_c`, or `None` when the segment cannot be
/// traversed in that direction.
#[inline]
pub fn synthesize_speed(direction: &Point3, v_c: &Point3, v_hauv: f64) -> Option<f64> {
    let p = v_c.dot(direction);
    let quarter_disc = p * p + v_hauv * v_hauv - v_c.norm_squared();
    if quarter_disc < 0.0 {
        return None;
    }
    let v_abs = p + quarter_disc.sqrt();
    (v_abs > 0.0).then_some(v_abs)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentKinematics {
    pub time: f64,
    pub energy: f64,
    pub medium: Medium,
    pub v_abs: f64,
}

/// Time and energy to fly the straight segment `a..b`, which must lie in a
/// single medium. `Ok(None)` means the flow makes the segment unreachable.
pub fn segment_time_energy(
    a: &Point3,
    b: &Point3,
    env: &Environment,
    params: &VehicleParams,
) -> Result<Option<SegmentKinematics>> {
    let mid = (a + b) * 0.5;
    let medium = Medium::at_height(mid.z);
    let v_c = env.velocity().velocity_at(&mid)?;
    Ok(kinematics(a, b, &v_c, medium, params))
}

/// Segment kinematics for a known ambient velocity.
#[inline]
pub fn kinematics(a: &Point3, b: &Point3, v_c: &Point3, medium: Medium, params: &VehicleParams) -> Option<SegmentKinematics> {
    let d = b - a;
    let len = d.norm();
    let v_hauv = params.speed(medium);
    if len == 0.0 {
        return Some(SegmentKinematics {
            time: 0.0,
            energy: 0.0,
            medium,
            v_abs: v_hauv,
        });
    }
    let v_abs = synthesize_speed(&(d / len), v_c, v_hauv)?;
    let time = len / v_abs;
    Some(SegmentKinematics {
        time,
        energy: params.power(medium) * time,
        medium,
        v_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{build_info_map, GaussianFeature, ObstacleSet, VelocityField, Workspace};
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;

    fn still_env() -> Environment {
        let ws = Workspace::standard();
        let f = GaussianFeature::new(Point3::new(2500.0, 2500.0, 0.0), Matrix3::identity() * 1e5, 1.0).unwrap();
        let info = build_info_map(&[f], &ws, 1.0, 1.0).unwrap();
        Environment::new(info, VelocityField::calm(&ws), ObstacleSet::empty()).unwrap()
    }

    #[test]
    fn attenuation_points() {
        let s = SensorParams::default();
        assert_eq!(sensor_attenuation(0.0, &s), 1.0);
        assert_relative_eq!(sensor_attenuation(100.0, &s), (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(sensor_attenuation(100.0, &s), 0.367879, epsilon = 1e-6);
        assert_eq!(sensor_attenuation(150.0, &s), 0.0);
        assert_eq!(sensor_attenuation(100.0 + 1e-9, &s), 0.0);
    }

    #[test]
    fn readings() {
        let s = SensorParams::default();
        let a = Point3::new(0.0, 0.0, 0.0);
        assert_eq!(sensor_reading(&a, &Point3::new(30.0, 0.0, 0.0), 0.0, &s), 0.0);
        assert_eq!(sensor_reading(&a, &a, 1.0, &s), 1.0);
        let r = sensor_reading(&a, &Point3::new(0.0, 100.0, 0.0), 0.5, &s);
        assert_relative_eq!(r, 0.5 * (-1.0f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(r, 0.183940, epsilon = 1e-6);
    }

    #[test]
    fn synthesis_examples() {
        let x = Point3::new(1.0, 0.0, 0.0);
        assert_eq!(synthesize_speed(&x, &Point3::zeros(), 0.5), Some(0.5));
        assert_relative_eq!(synthesize_speed(&x, &Point3::new(0.4, 0.0, 0.0), 0.5).unwrap(), 0.9, epsilon = 1e-15);
        assert_eq!(synthesize_speed(&x, &Point3::new(-0.6, 0.0, 0.0), 0.5), None);
    }

    #[test]
    fn segment_examples() {
        let env = still_env();
        let p = VehicleParams::default();
        let k = segment_time_energy(&Point3::new(100.0, 100.0, 100.0), &Point3::new(200.0, 100.0, 100.0), &env, &p)
            .unwrap()
            .unwrap();
        assert_eq!(k.medium, Medium::Air);
        assert_relative_eq!(k.time, 10.0, epsilon = 1e-12);
        assert_relative_eq!(k.energy, 1.0 / 90.0, epsilon = 1e-15);
        let k = segment_time_energy(&Point3::new(100.0, 100.0, -10.0), &Point3::new(100.0, 101.0, -10.0), &env, &p)
            .unwrap()
            .unwrap();
        assert_eq!(k.medium, Medium::Sea);
        assert_relative_eq!(k.time, 2.0, epsilon = 1e-12);
        assert!(kinematics(&Point3::zeros(), &x_axis(1.0), &Point3::new(-0.6, 0.0, 0.0), Medium::Sea, &p).is_none());
        assert!(segment_time_energy(&Point3::new(0.0, 0.0, 400.0), &Point3::new(0.0, 0.0, 800.0), &env, &p).is_err());
    }

    fn x_axis(l: f64) -> Point3 {
        Point3::new(l, 0.0, 0.0)
    }

    #[test]
    fn defaults_validate() {
        VehicleModel::default().validate().unwrap();
        let bad = VehicleParams {
            v_sea: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
