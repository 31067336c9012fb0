//! RAST*-I/E, RAST*-I, RAST and RRST*.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sampling::{steer, tournament_sample, SpatialHash};
use super::tree::{NodeStats, TreeEvaluator};
use super::{finish_result, should_stop, Algorithm, PlannerConfig, PlannerResult};
use crate::env::Environment;
use crate::path::Task;
use crate::vehicle::VehicleModel;
use crate::{Error, Result};

/// Heuristic factor used to pick a parent among the neighbors.
fn heuristic(algorithm: Algorithm, s: &NodeStats) -> f64 {
    match algorithm {
        Algorithm::RastI => s.ig,
        _ if s.e > 0.0 => s.ig / s.e,
        _ => f64::INFINITY,
    }
}

/// Runs one of the tournament-sampled tree planners. Only feasible nodes are
/// added to the tree.
pub fn plan_rast_family(
    algorithm: Algorithm,
    env: &Environment,
    model: &VehicleModel,
    task: &Task,
    config: &PlannerConfig,
    seed: u64,
) -> Result<PlannerResult> {
    let m = match algorithm {
        Algorithm::RastIe | Algorithm::RastI | Algorithm::Rast => config.m,
        Algorithm::Rrst => 1,
        other => return Err(Error::Config(format!("{other} is not a RAST-family planner"))),
    };
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ws = env.workspace();
    let delta = config.delta_m(ws.cell());
    let r = config.r_m(ws.cell());
    let (lo, hi) = ws.bounds();

    let mut ev = TreeEvaluator::new(env, model, task);
    let mut tree = ev.new_tree();
    let mut hash = SpatialHash::new(lo, hi, r);
    hash.insert(0, task.start());

    let mut best_ig = 0.0;
    let mut best_node: Option<usize> = None;
    let mut bestsol = Vec::new();
    let mut nbrs = Vec::new();

    loop {
        let (_, q_ts) = tournament_sample(env.info(), m, &mut rng);
        let q_nearest = hash.nearest(&q_ts).expect("tree has a root");
        let p_nearest = tree.node(q_nearest).position;
        let q_new = steer(&p_nearest, &q_ts, delta);

        if q_new != p_nearest && !env.obstacles().segment_obstructed(&p_nearest, &q_new) {
            let chosen = if algorithm == Algorithm::Rast {
                let s = ev.evaluate(&tree, q_nearest, q_new, true);
                s.feasible.then_some((q_nearest, s))
            } else {
                hash.near(&q_new, r, config.neighbor_cap, &mut nbrs);
                let mut c_max = 0.0;
                let mut chosen = None;
                for &q_m in &nbrs {
                    let s = ev.evaluate(&tree, q_m, q_new, true);
                    if !s.feasible {
                        continue;
                    }
                    let c1 = heuristic(algorithm, &s);
                    if c1 >= c_max {
                        c_max = c1;
                        chosen = Some((q_m, s));
                    }
                }
                chosen
            };
            if let Some((parent, stats)) = chosen {
                let id = ev.insert(&mut tree, parent, q_new, stats, true);
                hash.insert(id, q_new);
                if stats.ig > best_ig {
                    best_ig = stats.ig;
                    best_node = Some(id);
                }
            }
        }

        bestsol.push(best_ig);
        if should_stop(&bestsol, config.max_it, config.it_stop) {
            break;
        }
    }

    let best = best_node.map(|i| (best_ig, tree.control_polyline(i, task.goal())));
    finish_result(algorithm, best, bestsol, started, tree.len(), task, env, model)
}
