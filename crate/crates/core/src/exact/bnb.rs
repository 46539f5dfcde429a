use super::{Budget, Meter, SolveResult};
use crate::error::Result;
use crate::model::{
    ccw_offset, evaluate_unchecked, time_sequence, EdgeId, Instance, Objective, SequenceTimer,
    VertexId, ANGLE_TOLERANCE,
};

/// Shortest rotation that starts at `start` (or anywhere, if `None`) and faces
/// every direction in `dirs` at least once.
pub fn covering_walk(start: Option<f64>, dirs: &[f64]) -> f64 {
    if dirs.is_empty() {
        return 0.0;
    }
    let mut pts: Vec<f64> = dirs.to_vec();
    if let Some(s) = start {
        pts.push(s);
    }
    pts.sort_by(f64::total_cmp);
    let k = pts.len();
    let mut best = f64::INFINITY;
    for i in 0..k {
        // leave the gap from pts[i] to pts[i+1] unvisited
        let arc_start = pts[(i + 1) % k];
        let gap = if i + 1 < k { pts[i + 1] - pts[i] } else { 360.0 - (pts[k - 1] - pts[0]) };
        let len = (360.0 - gap).max(0.0);
        let cost = match start {
            None => len,
            Some(s) => {
                let a = ccw_offset(arc_start, s).min(len);
                len + a.min(len - a)
            }
        };
        best = best.min(cost);
    }
    best
}

struct Undo {
    edge: EdgeId,
    last: [Option<EdgeId>; 2],
    rot: [f64; 2],
    bound: [f64; 2],
    makespan: f64,
    total: f64,
}

struct Search<'a> {
    inst: &'a Instance,
    objective: Objective,
    times: Vec<f64>,
    last: Vec<Option<EdgeId>>,
    rot: Vec<f64>,
    bound: Vec<f64>,
    bound_sum: f64,
    makespan: f64,
    total: f64,
    placed: Vec<bool>,
    seq: Vec<EdgeId>,
    incumbent: f64,
    best: Vec<EdgeId>,
    meter: Meter,
    scratch: Vec<f64>,
}

impl<'a> Search<'a> {
    fn vertex_bound(&mut self, v: VertexId) -> f64 {
        self.scratch.clear();
        for &e in self.inst.incident(v) {
            if !self.placed[e] {
                self.scratch.push(self.inst.direction(v, e).unwrap());
            }
        }
        let start = self.last[v].map(|l| self.inst.direction(v, l).unwrap());
        let walk = covering_walk(start, &self.scratch);
        match self.objective {
            Objective::Makespan => self.last[v].map_or(0.0, |l| self.times[l]) + walk,
            _ => self.rot[v] + walk,
        }
    }

    fn lower_bound(&self) -> f64 {
        let peak = || self.bound.iter().copied().fold(0.0, f64::max);
        match self.objective {
            Objective::TotalEnergy => self.bound_sum.max(self.total),
            Objective::BottleneckEnergy => peak(),
            Objective::Makespan => self.makespan.max(peak()),
        }
    }

    fn push(&mut self, e: EdgeId) -> Undo {
        let edge = self.inst.edge(e);
        let ends = [edge.u, edge.v];
        let undo = Undo {
            edge: e,
            last: ends.map(|w| self.last[w]),
            rot: ends.map(|w| self.rot[w]),
            bound: ends.map(|w| self.bound[w]),
            makespan: self.makespan,
            total: self.total,
        };
        let mut t = 0.0f64;
        let mut add = [0.0; 2];
        for (k, &w) in ends.iter().enumerate() {
            if let Some(l) = self.last[w] {
                let a = self.inst.alpha_at(w, l, e);
                t = t.max(self.times[l] + a);
                add[k] = a;
            }
        }
        self.times[e] = t;
        self.makespan = self.makespan.max(t);
        self.placed[e] = true;
        self.seq.push(e);
        for (k, &w) in ends.iter().enumerate() {
            self.last[w] = Some(e);
            self.rot[w] += add[k];
            self.total += add[k];
        }
        for &w in &ends {
            let b = self.vertex_bound(w);
            self.bound_sum += b - self.bound[w];
            self.bound[w] = b;
        }
        undo
    }

    fn pop(&mut self, u: Undo) {
        let edge = self.inst.edge(u.edge);
        for (k, w) in [edge.u, edge.v].into_iter().enumerate() {
            self.last[w] = u.last[k];
            self.rot[w] = u.rot[k];
            self.bound_sum += u.bound[k] - self.bound[w];
            self.bound[w] = u.bound[k];
        }
        self.makespan = u.makespan;
        self.total = u.total;
        self.placed[u.edge] = false;
        self.seq.pop();
    }

    fn current_value(&self) -> f64 {
        match self.objective {
            Objective::Makespan => self.makespan,
            Objective::TotalEnergy => self.total,
            Objective::BottleneckEnergy => self.rot.iter().copied().fold(0.0, f64::max),
        }
    }

    fn dfs(&mut self) {
        if !self.meter.tick() {
            return;
        }
        let m = self.inst.num_edges();
        if self.seq.len() == m {
            let v = self.current_value();
            if v < self.incumbent - ANGLE_TOLERANCE {
                self.incumbent = v;
                self.best = self.seq.clone();
            }
            return;
        }
        let prev = self.seq.last().map(|&f| self.inst.edge(f));
        let prev_id = self.seq.last().copied();
        let mut children: Vec<(f64, EdgeId)> = Vec::new();
        for e in 0..m {
            if self.placed[e] {
                continue;
            }
            // consecutive independent edges commute; keep only increasing ids
            if let (Some(f), Some(fid)) = (prev, prev_id) {
                let ee = self.inst.edge(e);
                if !ee.touches(f.u) && !ee.touches(f.v) && e < fid {
                    continue;
                }
            }
            let u = self.push(e);
            let lb = self.lower_bound();
            self.pop(u);
            if lb < self.incumbent - ANGLE_TOLERANCE {
                children.push((lb, e));
            }
        }
        children.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (lb, e) in children {
            if lb >= self.incumbent - ANGLE_TOLERANCE {
                break;
            }
            let u = self.push(e);
            self.dfs();
            self.pop(u);
            if self.meter.exhausted {
                return;
            }
        }
    }
}

/// Greedy sequence used as the initial incumbent.
fn greedy_sequence(inst: &Instance, objective: Objective) -> Vec<EdgeId> {
    let m = inst.num_edges();
    let mut timer = SequenceTimer::new(inst);
    let mut used = vec![false; m];
    let mut seq = Vec::with_capacity(m);
    for _ in 0..m {
        let e = (0..m)
            .filter(|&e| !used[e])
            .min_by(|&a, &b| {
                timer
                    .value_after(a, objective)
                    .total_cmp(&timer.value_after(b, objective))
                    .then(a.cmp(&b))
            })
            .unwrap();
        used[e] = true;
        timer.push(e);
        seq.push(e);
    }
    seq
}

/// Depth-first search over global edge sequences with admissible bounds.
pub fn branch_and_bound(inst: &Instance, objective: Objective, budget: Budget) -> Result<SolveResult> {
    let n = inst.num_vertices();
    let m = inst.num_edges();
    let start = greedy_sequence(inst, objective);
    let start_value = evaluate_unchecked(inst, &time_sequence(inst, &start)?).value(objective);
    let mut s = Search {
        inst,
        objective,
        times: vec![0.0; m],
        last: vec![None; n],
        rot: vec![0.0; n],
        bound: vec![0.0; n],
        bound_sum: 0.0,
        makespan: 0.0,
        total: 0.0,
        placed: vec![false; m],
        seq: Vec::with_capacity(m),
        incumbent: start_value,
        best: start,
        meter: Meter::new(budget),
        scratch: Vec::new(),
    };
    for v in 0..n {
        s.bound[v] = s.vertex_bound(v);
        s.bound_sum += s.bound[v];
    }
    if m == 0 {
        s.meter.tick();
    } else if s.lower_bound() < s.incumbent - ANGLE_TOLERANCE {
        s.dfs();
    } else {
        s.meter.tick();
    }
    let schedule = time_sequence(inst, &s.best)?;
    let value = evaluate_unchecked(inst, &schedule).value(objective);
    Ok(SolveResult {
        schedule,
        value,
        objective,
        proven_optimal: !s.meter.exhausted,
        nodes_explored: s.meter.nodes,
        elapsed: s.meter.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force;
    use crate::instances::{gen_random, RandomParams};
    use crate::model::{lambda_of, validate};

    #[test]
    fn walk_examples() {
        assert_eq!(covering_walk(None, &[]), 0.0);
        assert_eq!(covering_walk(Some(10.0), &[10.0]), 0.0);
        assert!((covering_walk(None, &[0.0, 100.0, 220.0]) - 220.0).abs() < 1e-12);
        // start in the middle of a 180 degree fan: go to one end, then across
        assert!((covering_walk(Some(90.0), &[0.0, 180.0]) - 270.0).abs() < 1e-12);
        // start outside the cone: sweeping from the near end is cheapest
        assert!((covering_walk(Some(350.0), &[0.0, 90.0]) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn empty_instance_uses_one_node() {
        let inst = Instance::plane(&[(0.0, 0.0)], vec![]).unwrap();
        let r = branch_and_bound(&inst, Objective::TotalEnergy, Budget::default()).unwrap();
        assert_eq!((r.value, r.nodes_explored, r.proven_optimal), (0.0, 1, true));
    }

    #[test]
    fn separable_k22_total_energy_is_lambda_sum() {
        let inst = Instance::plane(
            &[(0.0, 0.0), (0.3, 1.0), (2.0, 0.2), (2.5, 1.4)],
            vec![(0, 2), (0, 3), (1, 2), (1, 3)],
        )
        .unwrap();
        let r = branch_and_bound(&inst, Objective::TotalEnergy, Budget::default()).unwrap();
        let sum: f64 = (0..4).map(|v| lambda_of(&inst, v).lambda).sum();
        assert!((r.value - sum).abs() < 1e-9);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        for seed in 0..12 {
            let inst = gen_random(RandomParams { n: 5, p: 0.6, seed }).unwrap();
            if inst.num_edges() > 7 {
                continue;
            }
            for obj in Objective::ALL {
                let b = branch_and_bound(&inst, obj, Budget::default()).unwrap();
                let f = brute_force(&inst, obj, Budget::default()).unwrap();
                assert!(b.proven_optimal);
                assert!((b.value - f.value).abs() <= 1e-9, "seed {seed} {obj}: {} vs {}", b.value, f.value);
                assert!(validate(&inst, &b.schedule).unwrap().is_ok());
            }
        }
    }
}
