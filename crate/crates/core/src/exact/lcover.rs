//! Decider for schedules in which every vertex sweeps its Λ-cone once.
//!
//! Each vertex of degree at least two picks one monotone sweep of a Λ-cone
//! (clockwise or counterclockwise; several cones when the largest gap is not
//! unique). A sweep orders the vertex's edge directions, and consecutive
//! directions become precedence arcs between edges. A choice of sweeps is
//! realisable iff the arcs are acyclic; times then follow from longest paths.
//!
//! Edges towards degree-one vertices never constrain anything but their other
//! endpoint, so they are left out of the precedence graph and placed along the
//! sweep afterwards. Choices are searched with a SAT solver; precedence
//! cycles found in its models are added back as clauses until the model is
//! acyclic or the clauses become unsatisfiable.

use std::collections::{HashMap, HashSet, VecDeque};

use varisat::{ExtendFormula, Lit};

use serde::Serialize;

use super::{Budget, Meter};
use crate::error::{Error, Result};
use crate::model::{EdgeId, Fan, Instance, Rotation, ScanCover, VertexId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaCoverResult {
    pub exists: bool,
    /// Sweep direction per vertex; `None` for vertices of degree below two.
    pub assignment: Option<Vec<Option<Rotation>>>,
    pub schedule: Option<ScanCover>,
    pub nodes: u64,
}

pub fn lambda_cover_exists(inst: &Instance, budget: Budget) -> Result<LambdaCoverResult> {
    lambda_cover_with(inst, budget, &[])
}

/// Like [`lambda_cover_exists`], restricted to sweeps honouring `constraints`.
/// Constraints on vertices of degree below two are ignored.
pub fn lambda_cover_with(
    inst: &Instance,
    budget: Budget,
    constraints: &[(VertexId, Rotation)],
) -> Result<LambdaCoverResult> {
    let mut found = None;
    // deep recursion on large gadget graphs
    std::thread::scope(|scope| {
        let handle = std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(scope, || decide(inst, budget, constraints))
            .expect("spawn decider thread");
        found = Some(handle.join().expect("decider thread panicked"));
    });
    found.unwrap()
}

#[derive(Debug, Clone)]
struct Sweep {
    rotation: Rotation,
    /// Fan group indices in visiting order, with cumulative swept angle.
    groups: Vec<usize>,
    cum: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Choice {
    reps: Vec<Sweep>,
    arcs: Vec<(EdgeId, EdgeId)>,
}

fn sweeps_of(fan: &Fan) -> Vec<Sweep> {
    let k = fan.groups.len();
    if k == 1 {
        return vec![Sweep {
            rotation: Rotation::Ccw,
            groups: vec![0],
            cum: vec![0.0],
        }];
    }
    let mut out = Vec::new();
    for gap in fan.max_gap_indices() {
        let start = (gap + 1) % k;
        let ccw: Vec<usize> = (0..k).map(|j| (start + j) % k).collect();
        let mut cum = vec![0.0];
        for j in 1..k {
            cum.push(cum[j - 1] + fan.gaps[ccw[j - 1]]);
        }
        let cw: Vec<usize> = ccw.iter().rev().copied().collect();
        let mut cum_cw = vec![0.0];
        for j in 1..k {
            cum_cw.push(cum_cw[j - 1] + fan.gaps[cw[j]]);
        }
        out.push(Sweep {
            rotation: Rotation::Ccw,
            groups: ccw,
            cum,
        });
        out.push(Sweep {
            rotation: Rotation::Cw,
            groups: cw,
            cum: cum_cw,
        });
    }
    out
}

struct Var {
    vertex: VertexId,
    choices: Vec<Choice>,
}

/// Lazy SAT search: one literal per (var, choice); every precedence cycle met
/// in a candidate assignment becomes a clause forbidding the choices that
/// produce it.
struct Search {
    sat: varisat::Solver<'static>,
    lits: Vec<Vec<Option<Lit>>>,
    arc_sets: Vec<Vec<HashSet<(EdgeId, EdgeId)>>>,
    owner_of: HashMap<(EdgeId, EdgeId), usize>,
    m: usize,
}

enum Outcome {
    Sat(Vec<usize>),
    Unsat,
    OutOfBudget,
}

impl Search {
    fn new(vars: &[Var], live: &[Vec<bool>], m: usize) -> Self {
        let mut sat = varisat::Solver::new();
        let mut lits = Vec::with_capacity(vars.len());
        let mut owner_of = HashMap::new();
        for (x, var) in vars.iter().enumerate() {
            let ls: Vec<Option<Lit>> = (0..var.choices.len()).map(|c| live[x][c].then(|| sat.new_lit())).collect();
            let present: Vec<Lit> = ls.iter().flatten().copied().collect();
            sat.add_clause(&present);
            for i in 0..present.len() {
                for j in i + 1..present.len() {
                    sat.add_clause(&[!present[i], !present[j]]);
                }
            }
            for ch in &var.choices {
                for &arc in &ch.arcs {
                    owner_of.insert(arc, x);
                }
            }
            lits.push(ls);
        }
        let arc_sets = vars
            .iter()
            .map(|v| v.choices.iter().map(|c| c.arcs.iter().copied().collect()).collect())
            .collect();
        Search { sat, lits, arc_sets, owner_of, m }
    }

    fn run(&mut self, vars: &[Var], meter: &mut Meter) -> Outcome {
        loop {
            if !meter.tick_coarse() {
                return Outcome::OutOfBudget;
            }
            match self.sat.solve() {
                Ok(true) => {}
                Ok(false) => return Outcome::Unsat,
                Err(e) => panic!("SAT backend failed: {e}"),
            }
            let model: HashSet<Lit> = self.sat.model().expect("model after SAT").into_iter().collect();
            let picked: Vec<usize> = self
                .lits
                .iter()
                .map(|ls| ls.iter().position(|l| l.is_some_and(|l| model.contains(&l))).expect("one choice per var"))
                .collect();
            let cycles = self.cycles(vars, &picked);
            if cycles.is_empty() {
                return Outcome::Sat(picked);
            }
            for cycle in cycles {
                let clause = self.block(&cycle);
                self.sat.add_clause(&clause);
            }
        }
    }

    /// Clause satisfied exactly by assignments lacking at least one arc of `cycle`.
    fn block(&self, cycle: &[(EdgeId, EdgeId)]) -> Vec<Lit> {
        let mut by_owner: HashMap<usize, Vec<(EdgeId, EdgeId)>> = HashMap::new();
        for &arc in cycle {
            by_owner.entry(self.owner_of[&arc]).or_default().push(arc);
        }
        let mut clause = Vec::new();
        for (x, arcs) in by_owner {
            for (c, set) in self.arc_sets[x].iter().enumerate() {
                if let Some(l) = self.lits[x][c] {
                    if !arcs.iter().all(|a| set.contains(a)) {
                        clause.push(l);
                    }
                }
            }
        }
        clause
    }

    /// Shortest cycles through a few nodes of every cyclic strongly connected component.
    fn cycles(&self, vars: &[Var], picked: &[usize]) -> Vec<Vec<(EdgeId, EdgeId)>> {
        let mut out: Vec<Vec<EdgeId>> = vec![Vec::new(); self.m];
        for (x, var) in vars.iter().enumerate() {
            for &(a, b) in &var.choices[picked[x]].arcs {
                out[a].push(b);
            }
        }
        let comp = scc(&out);
        let mut size = vec![0usize; self.m];
        for &c in &comp {
            size[c] += 1;
        }
        let mut found = Vec::new();
        let mut seen: HashSet<Vec<(EdgeId, EdgeId)>> = HashSet::new();
        let mut tried = vec![0usize; self.m];
        for start in 0..self.m {
            let c = comp[start];
            if size[c] < 2 || tried[c] >= CYCLES_PER_COMPONENT {
                continue;
            }
            tried[c] += 1;
            if let Some(cyc) = shortest_cycle(&out, &comp, start) {
                let mut key = cyc.clone();
                key.sort_unstable();
                if seen.insert(key) {
                    found.push(cyc);
                }
            }
        }
        found
    }
}

const CYCLES_PER_COMPONENT: usize = 16;

/// BFS from `start` back to itself inside its component.
fn shortest_cycle(out: &[Vec<EdgeId>], comp: &[usize], start: EdgeId) -> Option<Vec<(EdgeId, EdgeId)>> {
    let mut parent: HashMap<EdgeId, EdgeId> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for &b in &out[a] {
            if comp[b] != comp[start] {
                continue;
            }
            if b == start {
                let mut arcs = vec![(a, start)];
                let mut cur = a;
                while cur != start {
                    let p = parent[&cur];
                    arcs.push((p, cur));
                    cur = p;
                }
                return Some(arcs);
            }
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(b) {
                e.insert(a);
                queue.push_back(b);
            }
        }
    }
    None
}

/// Tarjan's strongly connected components, iteratively.
fn scc(out: &[Vec<EdgeId>]) -> Vec<usize> {
    let n = out.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < out[v].len() {
                let w = out[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

fn bfs_rank(inst: &Instance) -> Vec<usize> {
    let n = inst.num_vertices();
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if rank[s] != usize::MAX {
            continue;
        }
        rank[s] = next;
        next += 1;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for w in inst.neighbors(v) {
                if rank[w] == usize::MAX {
                    rank[w] = next;
                    next += 1;
                    queue.push_back(w);
                }
            }
        }
    }
    rank
}

fn decide(inst: &Instance, budget: Budget, constraints: &[(VertexId, Rotation)]) -> Result<LambdaCoverResult> {
    let n = inst.num_vertices();
    let m = inst.num_edges();
    let deg: Vec<usize> = (0..n).map(|v| inst.degree(v)).collect();
    let real: Vec<bool> = inst.edges().iter().map(|e| deg[e.u] >= 2 && deg[e.v] >= 2).collect();
    let mut demand: HashMap<VertexId, Rotation> = HashMap::new();
    for &(v, r) in constraints {
        if v >= n {
            return Err(Error::InvalidParams(format!("constraint on unknown vertex {v}")));
        }
        if deg[v] >= 2 {
            if let Some(prev) = demand.insert(v, r) {
                if prev != r {
                    return Ok(LambdaCoverResult {
                        exists: false,
                        assignment: None,
                        schedule: None,
                        nodes: 0,
                    });
                }
            }
        }
    }

    let rank = bfs_rank(inst);
    let mut fans: Vec<Option<Fan>> = vec![None; n];
    // per vertex: choices (deduplicated by the order of real groups)
    let mut choices_of: Vec<Vec<Choice>> = vec![Vec::new(); n];
    let mut var_of = vec![usize::MAX; n];
    let mut vars: Vec<Var> = Vec::new();
    for v in 0..n {
        if deg[v] < 2 {
            continue;
        }
        let fan = Fan::of(inst, v);
        let mut keyed: Vec<(Vec<usize>, Choice)> = Vec::new();
        for sw in sweeps_of(&fan) {
            if demand.get(&v).is_some_and(|&r| r != sw.rotation) {
                continue;
            }
            let key: Vec<usize> = sw
                .groups
                .iter()
                .copied()
                .filter(|&g| fan.groups[g].1.iter().any(|&e| real[e]))
                .collect();
            match keyed.iter_mut().find(|(k, _)| *k == key) {
                Some((_, ch)) => ch.reps.push(sw),
                None => {
                    let mut arcs = Vec::new();
                    for w in key.windows(2) {
                        for &a in fan.groups[w[0]].1.iter().filter(|&&e| real[e]) {
                            for &b in fan.groups[w[1]].1.iter().filter(|&&e| real[e]) {
                                arcs.push((a, b));
                            }
                        }
                    }
                    keyed.push((key, Choice { reps: vec![sw], arcs }));
                }
            }
        }
        let has_arcs = keyed.iter().any(|(k, _)| k.len() >= 2);
        if has_arcs {
            var_of[v] = vars.len();
            vars.push(Var {
                vertex: v,
                choices: keyed.iter().map(|(_, c)| c.clone()).collect(),
            });
        }
        choices_of[v] = keyed.into_iter().map(|(_, c)| c).collect();
        fans[v] = Some(fan);
    }
    let nv = vars.len();
    let mut live: Vec<Vec<bool>> = vars.iter().map(|x| vec![true; x.choices.len()]).collect();
    // a global reversal maps covers to covers: fix one var to half its choices
    if demand.is_empty() {
        if let Some(x) = (0..nv).filter(|&x| vars[x].choices.len() >= 2).min_by_key(|&x| rank[vars[x].vertex]) {
            let v = vars[x].vertex;
            let fan = fans[v].as_ref().unwrap();
            for (c, ch) in vars[x].choices.iter().enumerate() {
                let key: Vec<usize> = ch.reps[0]
                    .groups
                    .iter()
                    .copied()
                    .filter(|&g| fan.groups[g].1.iter().any(|&e| real[e]))
                    .collect();
                let rev: Vec<usize> = key.iter().rev().copied().collect();
                if key > rev {
                    live[x][c] = false;
                }
            }
        }
    }
    let mut meter = Meter::new(budget);
    let outcome = if vars.iter().any(|v| v.choices.is_empty()) {
        Outcome::Unsat
    } else {
        Search::new(&vars, &live, m).run(&vars, &mut meter)
    };
    let nodes = meter.nodes;
    match outcome {
        Outcome::OutOfBudget => Err(Error::BudgetExhausted { nodes }),
        Outcome::Unsat => Ok(LambdaCoverResult {
            exists: false,
            assignment: None,
            schedule: None,
            nodes,
        }),
        Outcome::Sat(assigned) => {
            let mut picked: Vec<Option<Sweep>> = vec![None; n];
            for v in 0..n {
                if deg[v] < 2 {
                    continue;
                }
                let ch = match var_of[v] {
                    usize::MAX => &choices_of[v][0],
                    x => &vars[x].choices[assigned[x]],
                };
                picked[v] = Some(ch.reps[0].clone());
            }
            let schedule = schedule_from(inst, &fans, &picked, &real, m);
            let assignment = picked.iter().map(|s| s.as_ref().map(|s| s.rotation)).collect();
            Ok(LambdaCoverResult {
                exists: true,
                assignment: Some(assignment),
                schedule: Some(schedule),
                nodes,
            })
        }
    }
}

/// Longest-path times for the real edges, then sweep placement of the rest.
fn schedule_from(
    inst: &Instance,
    fans: &[Option<Fan>],
    picked: &[Option<Sweep>],
    real: &[bool],
    m: usize,
) -> ScanCover {
    let n = inst.num_vertices();
    let mut out: Vec<Vec<(EdgeId, f64)>> = vec![Vec::new(); m];
    let mut indeg = vec![0usize; m];
    let real_groups = |v: VertexId| -> Vec<(usize, f64)> {
        let fan = fans[v].as_ref().unwrap();
        let sw = picked[v].as_ref().unwrap();
        sw.groups
            .iter()
            .zip(&sw.cum)
            .filter(|(&g, _)| fan.groups[g].1.iter().any(|&e| real[e]))
            .map(|(&g, &c)| (g, c))
            .collect()
    };
    for v in 0..n {
        if picked[v].is_none() {
            continue;
        }
        let fan = fans[v].as_ref().unwrap();
        let rg = real_groups(v);
        for w in rg.windows(2) {
            let weight = w[1].1 - w[0].1;
            for &a in fan.groups[w[0].0].1.iter().filter(|&&e| real[e]) {
                for &b in fan.groups[w[1].0].1.iter().filter(|&&e| real[e]) {
                    out[a].push((b, weight));
                    indeg[b] += 1;
                }
            }
        }
    }
    let mut times = vec![0.0f64; m];
    let mut queue: VecDeque<EdgeId> = (0..m).filter(|&e| real[e] && indeg[e] == 0).collect();
    while let Some(a) = queue.pop_front() {
        for &(b, w) in &out[a] {
            times[b] = times[b].max(times[a] + w);
            indeg[b] -= 1;
            if indeg[b] == 0 {
                queue.push_back(b);
            }
        }
    }
    let mut placed = Vec::new();
    for v in 0..n {
        let Some(sw) = picked[v].as_ref() else { continue };
        let fan = fans[v].as_ref().unwrap();
        let groups = &sw.groups;
        let real_pos: Vec<usize> = (0..groups.len())
            .filter(|&j| fan.groups[groups[j]].1.iter().any(|&e| real[e]))
            .collect();
        let real_times = |j: usize| fan.groups[groups[j]].1.iter().filter(|&&e| real[e]).map(|&e| times[e]);
        for j in 0..groups.len() {
            let leaf_edges: Vec<EdgeId> = fan.groups[groups[j]].1.iter().copied().filter(|&e| !real[e]).collect();
            if leaf_edges.is_empty() {
                continue;
            }
            let t = if real_pos.is_empty() {
                sw.cum[j]
            } else if let Some(&a) = real_pos.iter().rev().find(|&&a| a <= j) {
                real_times(a).fold(f64::NEG_INFINITY, f64::max) + (sw.cum[j] - sw.cum[a])
            } else {
                let a = real_pos[0];
                real_times(a).fold(f64::INFINITY, f64::min) - (sw.cum[a] - sw.cum[j])
            };
            placed.extend(leaf_edges.into_iter().map(|e| (e, t)));
        }
    }
    for (e, t) in placed {
        times[e] = t;
    }
    let lowest = times.iter().copied().fold(0.0, f64::min);
    if lowest < 0.0 {
        times.iter_mut().for_each(|t| *t -= lowest);
    }
    ScanCover::from_times_unchecked(times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate, lambda_of, validate, Point};

    fn check_cover(inst: &Instance, r: &LambdaCoverResult) {
        let sc = r.schedule.as_ref().unwrap();
        assert!(validate(inst, sc).unwrap().is_ok());
        let ev = evaluate(inst, sc).unwrap();
        for v in 0..inst.num_vertices() {
            let lam = lambda_of(inst, v).lambda;
            assert!((ev.per_vertex_rotation[v] - lam).abs() < 1e-9, "vertex {v}");
        }
    }

    #[test]
    fn single_edge() {
        let inst = Instance::plane(&[(0.0, 0.0), (1.0, 0.0)], vec![(0, 1)]).unwrap();
        let r = lambda_cover_exists(&inst, Budget::default()).unwrap();
        assert!(r.exists);
        check_cover(&inst, &r);
    }

    #[test]
    fn separable_bipartite_has_cover() {
        let inst = Instance::plane(
            &[(0.0, 0.0), (0.2, 1.0), (-0.1, 2.0), (3.0, 0.5), (3.2, 1.7)],
            vec![(0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4)],
        )
        .unwrap();
        let r = lambda_cover_exists(&inst, Budget::default()).unwrap();
        assert!(r.exists);
        check_cover(&inst, &r);
    }

    #[test]
    fn star_with_leaves_is_swept_monotonically() {
        let mut pts = vec![(0.0, 0.0)];
        let mut edges = vec![];
        for (i, d) in [10.0, 80.0, 200.0, 300.0].iter().enumerate() {
            let p = Point::polar(*d);
            pts.push((p.x, p.y));
            edges.push((0, i + 1));
        }
        let inst = Instance::plane(&pts, edges).unwrap();
        let r = lambda_cover_exists(&inst, Budget::default()).unwrap();
        check_cover(&inst, &r);
    }

    #[test]
    fn triangle_cover_exists() {
        // any triangle: each vertex sweeps its two edges, a consistent cyclic orientation exists
        let inst = Instance::plane(&[(0.0, 0.0), (4.0, 0.0), (1.0, 3.0)], vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = lambda_cover_exists(&inst, Budget::default()).unwrap();
        assert!(r.exists);
        check_cover(&inst, &r);
    }

    #[test]
    fn four_cycle_of_crossing_fans_needs_search() {
        let inst = crate::instances::gen_random(crate::instances::RandomParams { n: 7, p: 0.6, seed: 3 }).unwrap();
        match lambda_cover_exists(&inst, Budget::default()).unwrap() {
            r if r.exists => check_cover(&inst, &r),
            _ => {}
        }
    }

    #[test]
    fn constraints_are_honoured() {
        let inst = Instance::plane(&[(0.0, 0.0), (4.0, 0.0), (1.0, 3.0)], vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        for r in [Rotation::Cw, Rotation::Ccw] {
            let res = lambda_cover_with(&inst, Budget::default(), &[(0, r)]).unwrap();
            assert!(res.exists);
            assert_eq!(res.assignment.as_ref().unwrap()[0], Some(r));
            check_cover(&inst, &res);
        }
        let clash = lambda_cover_with(&inst, Budget::default(), &[(0, Rotation::Cw), (0, Rotation::Ccw)]).unwrap();
        assert!(!clash.exists);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let inst = crate::instances::gen_random(crate::instances::RandomParams { n: 8, p: 0.9, seed: 1 }).unwrap();
        assert!(matches!(
            lambda_cover_exists(&inst, Budget::nodes(0)),
            Err(Error::BudgetExhausted { .. })
        ));
    }
}
