//! Sampling tree with incremental path evaluation.
//!
//! The smoothed path through a node's ancestry followed by any two further
//! control points shares its first `depth - 2` spline spans with every other
//! such path. Each node caches the state after those spans, plus the
//! `measured` entries its own newest span raised, so scoring a candidate only
//! walks the last two spans of the chain and the span into the goal.

use crate::env::Environment;
use crate::path::{
    push_span_samples, span_bezier, FitnessResult, PathState, SensorKernel, SparseMeasured, Task,
};
use crate::vehicle::VehicleModel;
use crate::{Point3, Result};

/// Full-path statistics of a node (or candidate) through its parent chain
/// and on to the goal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeStats {
    pub ig: f64,
    pub e: f64,
    pub t: f64,
    pub feasible: bool,
    /// False when information was not computed because the path was already
    /// known to be infeasible.
    pub scored: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub position: Point3,
    pub parent: Option<usize>,
    pub depth: usize,
    pub stats: NodeStats,
}

/// Index-space box `[lo; hi]` of grid cells touched by a set of samples.
type CellBox = [[i64; 3]; 2];

fn boxes_meet(a: &CellBox, b: &CellBox) -> bool {
    (0..3).all(|i| a[0][i] <= b[1][i] && b[0][i] <= a[1][i])
}

#[derive(Clone, Debug)]
struct Prefix {
    state: PathState,
    ig: f64,
    cells: Vec<u32>,
    values: Vec<f64>,
    bbox: CellBox,
}

/// Nodes plus their cached path prefixes. Closed nodes carry no prefix.
#[derive(Clone, Debug)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    prefix: Vec<Option<Prefix>>,
}

impl Tree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    /// Control points from the root to node `i`.
    pub fn chain(&self, i: usize) -> Vec<Point3> {
        let mut out = Vec::with_capacity(self.nodes[i].depth + 1);
        let mut cur = Some(i);
        while let Some(c) = cur {
            out.push(self.nodes[c].position);
            cur = self.nodes[c].parent;
        }
        out.reverse();
        out
    }

    /// Control polyline of the path through node `i` into the goal.
    pub fn control_polyline(&self, i: usize, goal: Point3) -> Vec<Point3> {
        let mut c = self.chain(i);
        c.push(goal);
        c
    }
}

/// Scores candidate paths against a tree.
pub struct TreeEvaluator<'a> {
    env: &'a Environment,
    model: &'a VehicleModel,
    task: &'a Task,
    goal: Point3,
    kernel: SensorKernel<'a>,
    scratch: SparseMeasured,
    buf: Vec<Point3>,
    pts: Vec<Point3>,
    chain: Vec<usize>,
    reach: f64,
    cell: f64,
    origin: [f64; 3],
}

impl<'a> TreeEvaluator<'a> {
    pub fn new(env: &'a Environment, model: &'a VehicleModel, task: &'a Task) -> Self {
        let ws = env.workspace();
        TreeEvaluator {
            env,
            model,
            task,
            goal: task.goal(),
            kernel: SensorKernel::new(env.info(), &model.sensor),
            scratch: SparseMeasured::new(ws.len()),
            buf: Vec::new(),
            pts: Vec::new(),
            chain: Vec::new(),
            reach: model.sensor.d_max,
            cell: ws.cell(),
            origin: [0.5 * ws.cell(), 0.5 * ws.cell(), ws.z_origin()],
        }
    }

    pub fn task(&self) -> &Task {
        self.task
    }

    /// A tree holding only the start node. Its statistics are those of the
    /// smoothed direct path to the goal.
    pub fn new_tree(&mut self) -> Tree {
        let start = self.task.start();
        let state = PathState::start(start, self.env);
        self.scratch.reset();
        let (kernel, scratch) = (&mut self.kernel, &mut self.scratch);
        kernel.readings(&start, |idx, r, k| {
            scratch.raise(idx, r, k);
        });
        let (cells, values) = self.collect_delta();
        let bbox = self.cell_box(&[start]);
        let prefix = Prefix {
            state,
            ig: self.scratch.total(),
            cells,
            values,
            bbox,
        };
        let stats = self.score_polyline(&[start, self.goal], false);
        Tree {
            nodes: vec![TreeNode {
                position: start,
                parent: None,
                depth: 0,
                stats,
            }],
            prefix: vec![Some(prefix)],
        }
    }

    fn cell_box(&self, pts: &[Point3]) -> CellBox {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in pts {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let mut b = [[0i64; 3]; 2];
        for a in 0..3 {
            b[0][a] = ((lo[a] - self.reach - self.origin[a]) / self.cell).ceil() as i64;
            b[1][a] = ((hi[a] + self.reach - self.origin[a]) / self.cell).floor() as i64;
        }
        b
    }

    fn collect_delta(&mut self) -> (Vec<u32>, Vec<f64>) {
        let mut cells = self.scratch.raised().to_vec();
        cells.sort_unstable();
        cells.dedup();
        let values = cells.iter().map(|&c| self.scratch.get(c as usize)).collect();
        (cells, values)
    }

    fn load_chain(&mut self, tree: &Tree, node: usize) {
        self.chain.clear();
        let mut cur = Some(node);
        while let Some(c) = cur {
            self.chain.push(c);
            cur = tree.nodes[c].parent;
        }
        self.chain.reverse();
    }

    /// Restores the `measured` entries of the chain's prefixes that can
    /// matter for samples inside `bbox`.
    fn restore_prefix(&mut self, tree: &Tree, bbox: &CellBox) {
        self.scratch.reset();
        for &c in &self.chain {
            let Some(p) = &tree.prefix[c] else { continue };
            if p.cells.is_empty() || !boxes_meet(&p.bbox, bbox) {
                continue;
            }
            for (&cell, &v) in p.cells.iter().zip(&p.values) {
                self.scratch.set_base(cell as usize, v);
            }
        }
    }

    fn over_budget(&self, state: &PathState) -> bool {
        let v = &self.model.vehicle;
        state.collides
            || !state.reachable
            || state.energy(v) > v.e_max
            || state.time(v) > self.task.t_max
    }

    /// Statistics of the path root -> ... -> `parent` -> `q_new` -> goal.
    /// With `gate`, information is skipped once the path is known to be
    /// infeasible.
    pub fn evaluate(&mut self, tree: &Tree, parent: usize, q_new: Point3, gate: bool) -> NodeStats {
        let prefix = tree.prefix[parent]
            .as_ref()
            .expect("candidates only extend open nodes");
        self.load_chain(tree, parent);
        let m = tree.nodes[parent].depth;
        let w0 = m.saturating_sub(2);
        let mut window: Vec<Point3> = self.chain[w0..].iter().map(|&c| tree.nodes[c].position).collect();
        window.push(q_new);
        window.push(self.goal);

        self.pts.clear();
        self.pts.push(prefix.state.last);
        if m == 0 {
            let b = span_bezier(&window, 0, 3);
            push_span_samples(&b, self.task.ds_max, &mut self.buf, &mut self.pts);
        } else {
            let n = m + 3;
            for s in w0..=m - 1 {
                let b = span_bezier(&window[s - w0..], s, n);
                push_span_samples(&b, self.task.ds_max, &mut self.buf, &mut self.pts);
            }
        }

        let v = &self.model.vehicle;
        let mut state = prefix.state;
        for p in &self.pts[1..] {
            state.advance(p, self.env, v);
            if gate && self.over_budget(&state) {
                return NodeStats {
                    ig: 0.0,
                    e: state.energy(v),
                    t: state.time(v),
                    feasible: false,
                    scored: false,
                };
            }
        }
        let e = state.energy(v);
        let t = state.time(v);
        let feasible = !self.over_budget(&state);

        let bbox = self.cell_box(&self.pts[1..]);
        self.restore_prefix(tree, &bbox);
        let (kernel, scratch) = (&mut self.kernel, &mut self.scratch);
        for p in &self.pts[1..] {
            kernel.readings(p, |idx, r, k| {
                scratch.raise(idx, r, k);
            });
        }
        NodeStats {
            ig: prefix.ig + self.scratch.total(),
            e,
            t,
            feasible,
            scored: true,
        }
    }

    /// Scores an arbitrary control polyline from scratch.
    pub fn score_polyline(&mut self, control: &[Point3], gate: bool) -> NodeStats {
        let n = control.len();
        let v = &self.model.vehicle;
        self.pts.clear();
        self.pts.push(control[0]);
        if n <= 3 {
            let b = span_bezier(control, 0, n);
            push_span_samples(&b, self.task.ds_max, &mut self.buf, &mut self.pts);
        } else {
            for s in 0..n - 3 {
                let b = span_bezier(&control[s..], s, n);
                push_span_samples(&b, self.task.ds_max, &mut self.buf, &mut self.pts);
            }
        }
        let mut state = PathState::start(control[0], self.env);
        for p in &self.pts[1..] {
            state.advance(p, self.env, v);
            if gate && self.over_budget(&state) {
                return NodeStats {
                    ig: 0.0,
                    e: state.energy(v),
                    t: state.time(v),
                    feasible: false,
                    scored: false,
                };
            }
        }
        let feasible = !self.over_budget(&state);
        self.scratch.reset();
        let (kernel, scratch) = (&mut self.kernel, &mut self.scratch);
        for p in &self.pts {
            kernel.readings(p, |idx, r, k| {
                scratch.raise(idx, r, k);
            });
        }
        NodeStats {
            ig: self.scratch.total(),
            e: state.energy(v),
            t: state.time(v),
            feasible,
            scored: true,
        }
    }

    /// Appends `q_new` under `parent` with already computed statistics.
    /// Closed nodes get no prefix cache and must never become parents.
    pub fn insert(&mut self, tree: &mut Tree, parent: usize, q_new: Point3, stats: NodeStats, open: bool) -> usize {
        let depth = tree.nodes[parent].depth + 1;
        let id = tree.nodes.len();
        tree.nodes.push(TreeNode {
            position: q_new,
            parent: Some(parent),
            depth,
            stats,
        });
        if !open {
            tree.prefix.push(None);
            return id;
        }
        let parent_prefix = tree.prefix[parent].as_ref().expect("parent is open");
        if depth < 3 {
            let p = Prefix {
                state: parent_prefix.state,
                ig: parent_prefix.ig,
                cells: Vec::new(),
                values: Vec::new(),
                bbox: parent_prefix.bbox,
            };
            tree.prefix.push(Some(p));
            return id;
        }
        let (state0, ig0) = (parent_prefix.state, parent_prefix.ig);
        self.load_chain(tree, parent);
        let s = depth - 3;
        let window = [
            tree.nodes[self.chain[s]].position,
            tree.nodes[self.chain[s + 1]].position,
            tree.nodes[self.chain[s + 2]].position,
            q_new,
        ];
        let b = span_bezier(&window, s, usize::MAX);
        self.pts.clear();
        self.pts.push(state0.last);
        push_span_samples(&b, self.task.ds_max, &mut self.buf, &mut self.pts);
        let mut state = state0;
        for p in &self.pts[1..] {
            state.advance(p, self.env, &self.model.vehicle);
        }
        let bbox = self.cell_box(&self.pts[1..]);
        self.restore_prefix(tree, &bbox);
        let (kernel, scratch) = (&mut self.kernel, &mut self.scratch);
        for p in &self.pts[1..] {
            kernel.readings(p, |idx, r, k| {
                scratch.raise(idx, r, k);
            });
        }
        let (cells, values) = self.collect_delta();
        tree.prefix.push(Some(Prefix {
            state,
            ig: ig0 + self.scratch.total(),
            cells,
            values,
            bbox,
        }));
        id
    }

    /// Full re-evaluation of the path through node `i`.
    pub fn full_result(&self, tree: &Tree, i: usize) -> Result<FitnessResult> {
        crate::path::evaluate_fitness(&tree.control_polyline(i, self.goal), self.task, self.env, self.model)
    }
}
