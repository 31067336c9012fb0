//! Particle swarm over spline control points.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::TreeEvaluator;
use super::{finish_result, should_stop, Algorithm, PlannerConfig, PlannerResult};
use crate::env::{Environment, Workspace};
use crate::path::Task;
use crate::vehicle::VehicleModel;
use crate::{Error, Point3, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    /// Swarm size.
    pub particles: usize,
    /// Control points per particle, between the fixed start and goal.
    pub n_pso: usize,
    pub c1: f64,
    pub c2: f64,
    pub w0: f64,
    pub w_damp: f64,
    /// Per-component velocity limit, in the planner's step units.
    pub v_max: f64,
    /// Initialization attempts per particle before giving up.
    pub init_attempts: usize,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            particles: 50,
            n_pso: 5,
            c1: 1.0,
            c2: 1.0,
            w0: 1.0,
            w_damp: 0.99,
            v_max: 5.0,
            init_attempts: 1000,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 || self.n_pso == 0 || self.init_attempts == 0 {
            return Err(Error::Config(
                "PSO needs at least one particle, one control point and one init attempt".into(),
            ));
        }
        let finite = [self.c1, self.c2, self.w0, self.w_damp, self.v_max];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) || self.v_max == 0.0 {
            return Err(Error::Config(
                "PSO coefficients must be finite and non-negative, v_max positive".into(),
            ));
        }
        Ok(())
    }
}

/// Inertia weight used in iteration `i` (0-based).
pub fn inertia(w0: f64, w_damp: f64, i: usize) -> f64 {
    (0..i).fold(w0, |w, _| w * w_damp)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub position: Vec<Point3>,
    pub velocity: Vec<Point3>,
    pub pbest: Vec<Point3>,
    pub pbest_ig: f64,
}

impl Particle {
    /// One velocity and position update. `r1` and `r2` are the random
    /// coefficients of the cognitive and social terms.
    #[allow(clippy::too_many_arguments)]
    pub fn step(&mut self, gbest: &[Point3], w: f64, c1: f64, c2: f64, r1: f64, r2: f64, v_max: f64, ws: &Workspace) {
        for j in 0..self.position.len() {
            let p = self.position[j];
            let v = self.velocity[j] * w + (self.pbest[j] - p) * (c1 * r1) + (gbest[j] - p) * (c2 * r2);
            let v = v.map(|c| c.clamp(-v_max, v_max));
            self.velocity[j] = v;
            self.position[j] = ws.clamp(&(p + v));
        }
    }
}

fn polyline(task: &Task, ctrl: &[Point3], out: &mut Vec<Point3>) {
    out.clear();
    out.push(task.start());
    out.extend_from_slice(ctrl);
    out.push(task.goal());
}

pub fn plan_pso(
    env: &Environment,
    model: &VehicleModel,
    task: &Task,
    config: &PlannerConfig,
    seed: u64,
) -> Result<PlannerResult> {
    let pso = &config.pso;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ws = env.workspace();
    let (lo, hi) = ws.bounds();
    let v_max = match config.units {
        super::StepUnits::Cells => pso.v_max * ws.cell(),
        super::StepUnits::Meters => pso.v_max,
    };
    let (start, goal) = (task.start(), task.goal());
    let mut ev = TreeEvaluator::new(env, model, task);
    let mut control = Vec::with_capacity(pso.n_pso + 2);
    let mut evaluations = 0usize;

    // Each attempt shrinks a random perturbation toward a straight line at a
    // random height, so later attempts approach simple direct paths.
    let mut swarm = Vec::with_capacity(pso.particles);
    for _ in 0..pso.particles {
        let mut found = None;
        let mut lambda = 1.0;
        for _ in 0..pso.init_attempts {
            let h = rng.gen_range(lo.z..=hi.z);
            let pos: Vec<Point3> = (1..=pso.n_pso)
                .map(|i| {
                    let f = i as f64 / (pso.n_pso + 1) as f64;
                    let mut base = start + (goal - start) * f;
                    base.z = h;
                    let rand = Point3::new(
                        rng.gen_range(lo.x..=hi.x),
                        rng.gen_range(lo.y..=hi.y),
                        rng.gen_range(lo.z..=hi.z),
                    );
                    ws.clamp(&(base + (rand - base) * lambda))
                })
                .collect();
            lambda *= 0.95;
            polyline(task, &pos, &mut control);
            let s = ev.score_polyline(&control, true);
            evaluations += 1;
            if s.feasible {
                found = Some((pos, s.ig));
                break;
            }
        }
        let (pos, ig) = found.ok_or(Error::PsoInitialization {
            attempts: pso.init_attempts,
        })?;
        swarm.push(Particle {
            velocity: vec![Point3::zeros(); pos.len()],
            pbest: pos.clone(),
            position: pos,
            pbest_ig: ig,
        });
    }

    let g = (0..swarm.len())
        .fold(0, |b, k| if swarm[k].pbest_ig > swarm[b].pbest_ig { k } else { b });
    let mut gbest = swarm[g].pbest.clone();
    let mut gbest_ig = swarm[g].pbest_ig;

    let mut w = pso.w0;
    let mut bestsol = Vec::new();
    loop {
        for particle in swarm.iter_mut() {
            let (r1, r2) = (rng.gen::<f64>(), rng.gen::<f64>());
            particle.step(&gbest, w, pso.c1, pso.c2, r1, r2, v_max, ws);
            polyline(task, &particle.position, &mut control);
            let s = ev.score_polyline(&control, true);
            evaluations += 1;
            if s.feasible && s.ig > particle.pbest_ig {
                particle.pbest.clone_from(&particle.position);
                particle.pbest_ig = s.ig;
                if s.ig > gbest_ig {
                    gbest.clone_from(&particle.position);
                    gbest_ig = s.ig;
                }
            }
        }
        w *= pso.w_damp;
        bestsol.push(gbest_ig);
        if should_stop(&bestsol, config.max_it, config.it_stop) {
            break;
        }
    }

    polyline(task, &gbest, &mut control);
    finish_result(
        Algorithm::Pso,
        Some((gbest_ig, control)),
        bestsol,
        started,
        evaluations,
        task,
        env,
        model,
    )
}
