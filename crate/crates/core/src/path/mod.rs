//! Smoothed trajectories and the full-path fitness function.

mod measure;
mod spline;

pub use measure::{accumulate_information, total_information, MeasuredArray};
pub(crate) use measure::{SensorKernel, SparseMeasured};
pub use spline::{bernstein_basis, bezier_point, bezier_spans, sample_span, span_bezier, span_count};

use serde::{Deserialize, Serialize};

use crate::env::{Environment, Medium, ObstacleSet};
use crate::vehicle::{kinematics, VehicleModel, VehicleParams};
use crate::{Error, Point3, Result};

/// Default sample spacing along smoothed paths (m).
pub const DEFAULT_DS_MAX: f64 = 25.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSample {
    pub position: Point3,
    pub medium: Medium,
    /// Cumulative arc length along the sampled polyline (m).
    pub arc_length: f64,
}

/// Discretized smoothed trajectory. Consecutive samples are at most `ds_max`
/// apart and no segment between samples crosses the sea surface.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SmoothPath {
    samples: Vec<PathSample>,
    transitions: usize,
}

impl SmoothPath {
    /// Builds a path from already split sample positions.
    pub fn from_points(points: &[Point3]) -> Self {
        let mut samples = Vec::with_capacity(points.len());
        let mut arc = 0.0;
        let mut last_medium = None;
        let mut transitions = 0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                let a = points[i - 1];
                let len = (p - a).norm();
                arc += len;
                if len > 0.0 {
                    let m = Medium::at_height(0.5 * (a.z + p.z));
                    if last_medium.is_some_and(|l| l != m) {
                        transitions += 1;
                    }
                    last_medium = Some(m);
                }
            }
            samples.push(PathSample {
                position: *p,
                medium: Medium::at_height(p.z),
                arc_length: arc,
            });
        }
        SmoothPath { samples, transitions }
    }

    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    pub fn positions(&self) -> impl Iterator<Item = Point3> + '_ {
        self.samples.iter().map(|s| s.position)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of air/sea mode changes along the path.
    pub fn transitions(&self) -> usize {
        self.transitions
    }

    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.arc_length)
    }
}

/// The point where segment `a..b` meets `z = 0`, when it passes strictly
/// from one side to the other.
#[inline]
pub fn surface_crossing(a: &Point3, b: &Point3) -> Option<Point3> {
    if (a.z > 0.0 && b.z < 0.0) || (a.z < 0.0 && b.z > 0.0) {
        let t = a.z / (a.z - b.z);
        let mut c = a + (b - a) * t;
        c.z = 0.0;
        Some(c)
    } else {
        None
    }
}

/// Appends the samples of span `b` to `out`, inserting surface crossings.
/// `out` must already hold the point the span continues from.
pub(crate) fn push_span_samples(b: &[Point3; 4], ds_max: f64, buf: &mut Vec<Point3>, out: &mut Vec<Point3>) {
    buf.clear();
    sample_span(b, ds_max, buf);
    let mut last = *out.last().expect("span continues an existing point");
    for &p in buf.iter() {
        if let Some(c) = surface_crossing(&last, &p) {
            out.push(c);
        }
        out.push(p);
        last = p;
    }
}

/// Smooths the control polyline `nodes` with a clamped cubic B-spline and
/// samples it at spacing at most `ds_max`.
pub fn smooth_path(nodes: &[Point3], ds_max: f64) -> Result<SmoothPath> {
    if nodes.len() < 2 {
        return Err(Error::TooFewNodes(nodes.len()));
    }
    if !(ds_max > 0.0 && ds_max.is_finite()) {
        return Err(Error::Config(format!("sample spacing must be positive, got {ds_max}")));
    }
    if let Some(index) = nodes.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::NonFinite { index });
    }
    let mut points = vec![nodes[0]];
    let mut buf = Vec::new();
    for b in bezier_spans(nodes) {
        push_span_samples(&b, ds_max, &mut buf, &mut points);
    }
    Ok(SmoothPath::from_points(&points))
}

/// True iff no sample of `path`, and no straight piece between samples, is
/// obstructed.
pub fn collision_free(path: &SmoothPath, obstacles: &ObstacleSet) -> bool {
    path.samples.iter().all(|s| !obstacles.is_obstructed(&s.position))
        && path
            .samples
            .windows(2)
            .all(|w| !obstacles.segment_obstructed(&w[0].position, &w[1].position))
}

/// A planning task: endpoints and the mission time limit. The energy budget
/// belongs to the vehicle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub q_init: [f64; 3],
    pub q_final: [f64; 3],
    /// Seconds; `null` in JSON means unbounded.
    #[serde(with = "unbounded")]
    pub t_max: f64,
    #[serde(default = "default_ds_max")]
    pub ds_max: f64,
}

fn default_ds_max() -> f64 {
    DEFAULT_DS_MAX
}

impl Task {
    pub fn new(q_init: Point3, q_final: Point3, t_max: f64) -> Self {
        Task {
            q_init: q_init.into(),
            q_final: q_final.into(),
            t_max,
            ds_max: DEFAULT_DS_MAX,
        }
    }

    pub fn start(&self) -> Point3 {
        Point3::from(self.q_init)
    }

    pub fn goal(&self) -> Point3 {
        Point3::from(self.q_final)
    }

    pub fn validate(&self, env: &Environment) -> Result<()> {
        for p in [self.start(), self.goal()] {
            env.workspace().check_contains(&p)?;
            if env.obstacles().is_obstructed(&p) {
                return Err(Error::Config(format!("task endpoint {p:?} is inside an obstacle")));
            }
        }
        if self.t_max.is_nan() || self.t_max < 0.0 {
            return Err(Error::Config(format!("invalid time limit {}", self.t_max)));
        }
        if !(self.ds_max > 0.0 && self.ds_max.is_finite()) {
            return Err(Error::Config(format!("invalid sample spacing {}", self.ds_max)));
        }
        Ok(())
    }
}

/// Serde adapter mapping an infinite limit to `null`.
pub mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Kinematic and collision state after walking part of a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct PathState {
    pub last: Point3,
    pub last_medium: Option<Medium>,
    pub t_air: f64,
    pub t_sea: f64,
    pub transitions: usize,
    pub reachable: bool,
    pub collides: bool,
}

impl PathState {
    pub(crate) fn start(p: Point3, env: &Environment) -> Self {
        PathState {
            last: p,
            last_medium: None,
            t_air: 0.0,
            t_sea: 0.0,
            transitions: 0,
            reachable: true,
            collides: env.obstacles().is_obstructed(&p),
        }
    }

    /// Moves along the straight segment to `q`, which must not cross the
    /// surface. Time stops accumulating once a segment is unreachable.
    #[inline]
    pub(crate) fn advance(&mut self, q: &Point3, env: &Environment, params: &VehicleParams) {
        let a = self.last;
        self.last = *q;
        if a == *q {
            return;
        }
        self.collides |= env.obstacles().segment_obstructed(&a, q);
        let mid = (a + q) * 0.5;
        let medium = Medium::at_height(mid.z);
        if self.last_medium.is_some_and(|m| m != medium) {
            self.transitions += 1;
        }
        self.last_medium = Some(medium);
        if !self.reachable {
            return;
        }
        let Ok(v_c) = env.velocity().velocity_at(&mid) else {
            self.reachable = false;
            return;
        };
        match kinematics(&a, q, &v_c, medium, params) {
            Some(k) => match medium {
                Medium::Air => self.t_air += k.time,
                Medium::Sea => self.t_sea += k.time,
            },
            None => self.reachable = false,
        }
    }

    #[inline]
    pub(crate) fn energy(&self, params: &VehicleParams) -> f64 {
        params.energy(self.t_air, self.t_sea, self.transitions)
    }

    #[inline]
    pub(crate) fn time(&self, params: &VehicleParams) -> f64 {
        params.mission_time(self.t_air, self.t_sea, self.transitions)
    }
}

/// Information, energy, time and feasibility of one full path.
#[derive(Clone, Debug, PartialEq)]
pub struct FitnessResult {
    pub ig: f64,
    pub e: f64,
    pub t: f64,
    pub t_air: f64,
    pub t_sea: f64,
    pub transitions: usize,
    pub reachable: bool,
    pub collision_free: bool,
    pub feasible: bool,
    pub path: SmoothPath,
}

/// Scores the path through `control` (first point is the start, last the
/// goal): smooths it, collects information into a fresh measured array and
/// accounts for energy and time. Energy and time cover only the reachable
/// prefix when some segment cannot be flown.
pub fn evaluate_fitness(control: &[Point3], task: &Task, env: &Environment, model: &VehicleModel) -> Result<FitnessResult> {
    for p in control {
        env.workspace().check_contains(p)?;
    }
    let path = smooth_path(control, task.ds_max)?;
    let mut state = PathState::start(path.samples[0].position, env);
    for s in &path.samples[1..] {
        state.advance(&s.position, env, &model.vehicle);
    }
    let mut measured = MeasuredArray::for_map(env.info());
    accumulate_information(&path, env.info(), &model.sensor, &mut measured);
    let ig = total_information(&measured, env.info());
    Ok(finish(ig, &state, task, model, path))
}

pub(crate) fn finish(ig: f64, state: &PathState, task: &Task, model: &VehicleModel, path: SmoothPath) -> FitnessResult {
    let e = state.energy(&model.vehicle);
    let t = state.time(&model.vehicle);
    FitnessResult {
        ig,
        e,
        t,
        t_air: state.t_air,
        t_sea: state.t_sea,
        transitions: state.transitions,
        reachable: state.reachable,
        collision_free: !state.collides,
        feasible: state.reachable && !state.collides && e <= model.vehicle.e_max && t <= task.t_max,
        path,
    }
}

/// Cumulative time and energy at every sample, charging each mode change at
/// the sample where the new mode's first segment ends. `None` once the path
/// becomes unreachable.
pub fn path_profile(path: &SmoothPath, env: &Environment, params: &VehicleParams) -> Vec<Option<(f64, f64)>> {
    let Some(first) = path.samples.first() else {
        return Vec::new();
    };
    let mut state = PathState::start(first.position, env);
    let mut out = vec![Some((0.0, 0.0))];
    for s in &path.samples[1..] {
        state.advance(&s.position, env, params);
        out.push(state.reachable.then(|| (state.time(params), state.energy(params))));
    }
    out
}

#[cfg(test)]
mod tests;
