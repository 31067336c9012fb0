//! Rapidly-exploring information gathering tree with dominance pruning.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sampling::{steer, tournament_sample, SpatialHash};
use super::tree::{NodeStats, TreeEvaluator};
use super::{finish_result, should_stop, Algorithm, PlannerConfig, PlannerResult};
use crate::env::Environment;
use crate::path::Task;
use crate::vehicle::VehicleModel;
use crate::Result;

/// True when `q_new` is strictly worse than `q_m` on information, energy and
/// time at once.
pub fn prune_dominated(q_new: &NodeStats, q_m: &NodeStats) -> bool {
    q_new.ig < q_m.ig && q_new.e > q_m.e && q_new.t > q_m.t
}

/// Each new node is parented to the neighbor it was steered from. Nodes over
/// budget are kept but closed: they are never extended and never counted as
/// solutions.
pub fn plan_rigt(
    env: &Environment,
    model: &VehicleModel,
    task: &Task,
    config: &PlannerConfig,
    seed: u64,
) -> Result<PlannerResult> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ws = env.workspace();
    let delta = config.delta_m(ws.cell());
    let r = config.r_m(ws.cell());
    let (lo, hi) = ws.bounds();

    let mut ev = TreeEvaluator::new(env, model, task);
    let mut tree = ev.new_tree();
    let mut open = SpatialHash::new(lo, hi, r);
    open.insert(0, task.start());

    let mut best_ig = 0.0;
    let mut best_node: Option<usize> = None;
    let mut bestsol = Vec::new();
    let mut nbrs = Vec::new();
    let cap = match (config.neighbor_cap, config.rigt_branches) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };

    loop {
        let (_, q_rand) = tournament_sample(env.info(), 1, &mut rng);
        // With every branch closed there is nothing left to grow.
        if let Some(q_nearest) = open.nearest(&q_rand) {
            let q_feasible = steer(&tree.node(q_nearest).position, &q_rand, delta);
            open.near(&q_feasible, r, cap, &mut nbrs);
            for &q_m in &nbrs {
                let p_m = tree.node(q_m).position;
                let q_new = steer(&p_m, &q_feasible, delta);
                if q_new == p_m || env.obstacles().segment_obstructed(&p_m, &q_new) {
                    continue;
                }
                let stats = ev.evaluate(&tree, q_m, q_new, false);
                if prune_dominated(&stats, &tree.node(q_m).stats) {
                    continue;
                }
                let id = ev.insert(&mut tree, q_m, q_new, stats, stats.feasible);
                if stats.feasible {
                    open.insert(id, q_new);
                    if stats.ig > best_ig {
                        best_ig = stats.ig;
                        best_node = Some(id);
                    }
                }
            }
        }
        bestsol.push(best_ig);
        if should_stop(&bestsol, config.max_it, config.it_stop) {
            break;
        }
    }

    let best = best_node.map(|i| (best_ig, tree.control_polyline(i, task.goal())));
    finish_result(Algorithm::Rigt, best, bestsol, started, tree.len(), task, env, model)
}
