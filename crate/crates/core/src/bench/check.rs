//! Constraint checker that re-derives energy and time from the sampled path
//! alone, solving the speed triangle by bisection rather than in closed form.

use serde::{Deserialize, Serialize};

use crate::env::{Environment, Medium};
use crate::path::Task;
use crate::vehicle::VehicleParams;
use crate::{Point3, Result};

/// Relative slack on the budget comparisons, absorbing summation order.
pub const BUDGET_SLACK: f64 = 1e-9;

/// Ground speed along unit `dir` found by bisection on
/// `|v_c|^2 + V^2 - 2 V (v_c . dir) = v_hauv^2`, taking the larger root.
/// `None` when no positive root exists.
pub fn bisect_speed(dir: &Point3, v_c: &Point3, v_hauv: f64) -> Option<f64> {
    let p = v_c.dot(dir);
    let c = v_c.norm_squared() - v_hauv * v_hauv;
    let f = |v: f64| v * v - 2.0 * p * v + c;
    // f is a parabola with its minimum at p; the larger root lies above p.
    let mut lo = p.max(0.0);
    if f(lo) > 0.0 {
        return None;
    }
    let mut hi = lo + 1.0;
    while f(hi) <= 0.0 {
        hi = lo + 2.0 * (hi - lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo > 0.0).then_some(lo)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub energy: f64,
    pub time: f64,
    pub transitions: usize,
    pub in_bounds: bool,
    pub reachable: bool,
    pub collision_free: bool,
    pub within_energy: bool,
    pub within_time: bool,
}

impl CheckReport {
    pub fn passes(&self) -> bool {
        self.in_bounds && self.reachable && self.collision_free && self.within_energy && self.within_time
    }

    /// Names of the failed constraints.
    pub fn violations(&self) -> Vec<&'static str> {
        [
            (self.in_bounds, "out of bounds"),
            (self.reachable, "unreachable segment"),
            (self.collision_free, "collision"),
            (self.within_energy, "energy budget"),
            (self.within_time, "time budget"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

/// Checks the polyline `points` (a smoothed path's samples) against the
/// task and vehicle budgets.
pub fn check_path(points: &[Point3], task: &Task, env: &Environment, params: &VehicleParams) -> Result<CheckReport> {
    let ws = env.workspace();
    let obstacles = env.obstacles();
    let in_bounds = points.iter().all(|p| ws.contains(p));
    let mut collision_free = points.iter().all(|p| !obstacles.is_obstructed(p));
    let (mut t_air, mut t_sea) = (0.0, 0.0);
    let mut transitions = 0;
    let mut reachable = in_bounds;
    let mut last: Option<Medium> = None;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        collision_free &= !obstacles.segment_obstructed(&a, &b);
        let mid = (a + b) * 0.5;
        let medium = if mid.z > 0.0 { Medium::Air } else { Medium::Sea };
        if last.is_some_and(|m| m != medium) {
            transitions += 1;
        }
        last = Some(medium);
        if !reachable {
            continue;
        }
        let v_c = env.velocity().velocity_at(&mid)?;
        let v_hauv = match medium {
            Medium::Air => params.v_air,
            Medium::Sea => params.v_sea,
        };
        match bisect_speed(&(d / len), &v_c, v_hauv) {
            Some(v) if medium == Medium::Air => t_air += len / v,
            Some(v) => t_sea += len / v,
            None => reachable = false,
        }
    }
    let n = transitions as f64;
    let energy = params.p_air * t_air + params.p_sea * t_sea + n * params.e_switch;
    let time = t_air + t_sea + n * params.t_switch;
    Ok(CheckReport {
        energy,
        time,
        transitions,
        in_bounds,
        reachable,
        collision_free,
        within_energy: energy <= params.e_max * (1.0 + BUDGET_SLACK),
        within_time: time <= task.t_max * (1.0 + BUDGET_SLACK),
    })
}
