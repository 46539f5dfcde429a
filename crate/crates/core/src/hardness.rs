//! Gadgets reducing monotone not-all-equal 3-SAT to Λ-cover existence.
//!
//! Every gadget vertex gets one or two outer intervals of width `theta_max`;
//! the rest of its circle is filled with degree-one leaves, so all gadget
//! vertices share Λ = 360 − `theta_max`. A vertex glued from two opposite
//! clusters has two such intervals and hence two Λ-cones.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{lambda_cover_exists, lambda_cover_with, Budget, LambdaCoverResult};
use crate::model::{
    ccw_offset, direction_of, lambda_of, normalize_deg, time_sequence, EdgeId, Instance, Point, Rotation,
    ScanCover, VertexId,
};

/// Default outer-interval width, arctan(1/2) in degrees.
pub fn default_theta_max() -> f64 {
    0.5f64.atan().to_degrees()
}

/// Ratio between the cheapest non-Λ-cover and a Λ-cover on a uniform gadget graph.
pub fn gap_constant(theta_max: f64, theta_min: f64) -> Result<f64> {
    if !(theta_min.is_finite() && theta_max.is_finite() && 0.0 <= theta_min && theta_min <= theta_max && theta_max < 360.0) {
        return Err(Error::Domain(format!(
            "need 0 <= theta_min <= theta_max < 360, got theta_max={theta_max}, theta_min={theta_min}"
        )));
    }
    Ok((360.0 - theta_max + theta_min) / (360.0 - theta_max))
}

// ---------------------------------------------------------------- formulas

/// Clauses hold 0-based variable ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mnae3SatInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<usize>>,
}

impl Mnae3SatInstance {
    pub fn new(num_vars: usize, clauses: Vec<Vec<usize>>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            if c.is_empty() || c.len() > 3 {
                return Err(Error::Domain(format!("clause {j} has {} literals, expected 1 to 3", c.len())));
            }
            if let Some(&x) = c.iter().find(|&&x| x >= num_vars) {
                return Err(Error::Domain(format!("clause {j} uses variable {} of {num_vars}", x + 1)));
            }
        }
        Ok(Mnae3SatInstance { num_vars, clauses })
    }

    /// Header `p mnae3sat <vars> <clauses>`, then one clause per line of
    /// 1-based ids; `c` lines are comments and a trailing `0` is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let perr = |line: usize, column: usize, message: String| Error::Parse { line, column, message };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('#') {
                continue;
            }
            let col = raw.len() - raw.trim_start().len() + 1;
            if header.is_none() {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[0] != "p" || parts[1] != "mnae3sat" {
                    return Err(perr(i + 1, col, "expected `p mnae3sat <vars> <clauses>`".into()));
                }
                let n = parts[2].parse().map_err(|_| perr(i + 1, col, format!("bad variable count `{}`", parts[2])))?;
                let m = parts[3].parse().map_err(|_| perr(i + 1, col, format!("bad clause count `{}`", parts[3])))?;
                header = Some((n, m));
                continue;
            }
            let mut clause = Vec::new();
            for tok in line.split_whitespace() {
                let id: usize = tok.parse().map_err(|_| perr(i + 1, col, format!("bad literal `{tok}`")))?;
                if id == 0 {
                    break;
                }
                clause.push(id - 1);
            }
            clauses.push(clause);
        }
        let (n, m) = header.ok_or_else(|| perr(1, 1, "missing header".into()))?;
        if clauses.len() != m {
            return Err(perr(text.lines().count().max(1), 1, format!("header declares {m} clauses, found {}", clauses.len())));
        }
        Mnae3SatInstance::new(n, clauses)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p mnae3sat {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            let ids: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            s.push_str(&ids.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn is_nae_satisfied(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            let first = assignment[c[0]];
            c.iter().any(|&x| assignment[x] != first)
        })
    }

    /// Brute force over all assignments; first satisfying one in binary counting order.
    pub fn nae_satisfiable(&self) -> Option<Vec<bool>> {
        assert!(self.num_vars < 26, "brute force limited to small formulas");
        (0u32..1 << self.num_vars)
            .map(|mask| (0..self.num_vars).map(|i| mask >> i & 1 == 1).collect::<Vec<bool>>())
            .find(|a| self.is_nae_satisfied(a))
    }
}

// ---------------------------------------------------------------- geometry

/// Local fragment coordinates, relative to v1.
const FRAG_NAMES: [&str; 8] = ["v1", "s", "t", "u", "v2", "v3", "v4", "v5"];
const FRAG_COORDS: [(f64, f64); 8] = [
    (0.0, 0.0),
    (-58.0, 13.0),
    (-17.0, 29.0),
    (13.0, -58.0),
    (2.0, -26.0),
    (-3.0, -23.0),
    (-1.0, -1.0),
    (23.0, 9.0),
];
const V1: usize = 0;
const S: usize = 1;
const T: usize = 2;
const U: usize = 3;
const V2: usize = 4;
const V3: usize = 5;
const V4: usize = 6;
const V5: usize = 7;

/// Fragment edges in the order of a Λ-cover in which `s` turns counterclockwise.
const FRAG_WITNESS: [(usize, usize); 14] = [
    (S, U),
    (U, V3),
    (V2, V3),
    (V1, V2),
    (U, V1),
    (V1, V5),
    (S, V4),
    (S, V5),
    (T, V5),
    (V3, V5),
    (V3, V4),
    (V1, V4),
    (T, V4),
    (T, V2),
];

fn frag_point(i: usize) -> Point {
    Point::new(FRAG_COORDS[i].0, FRAG_COORDS[i].1)
}

/// Bisector of the gap a sweep over `dirs` (in visiting order) leaves uncovered.
fn sweep_outer_bisector(dirs: &[f64]) -> f64 {
    let first = dirs[0];
    let last = dirs[dirs.len() - 1];
    let ccw = dirs.windows(2).all(|w| ccw_offset(first, w[0]) <= ccw_offset(first, w[1]));
    if ccw {
        normalize_deg(last + ccw_offset(last, first) / 2.0)
    } else {
        normalize_deg(first + ccw_offset(first, last) / 2.0)
    }
}

/// Outer-interval bisector of every fragment vertex in the local frame,
/// taken from the witness sweeps.
fn fragment_outer_local() -> [f64; 8] {
    let mut out = [0.0; 8];
    for (v, slot) in out.iter_mut().enumerate() {
        let dirs: Vec<f64> = FRAG_WITNESS
            .iter()
            .filter_map(|&(a, b)| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .map(|w| direction_of(frag_point(w).sub(frag_point(v))))
            .collect();
        *slot = sweep_outer_bisector(&dirs);
    }
    out
}

/// Similarity placing local coordinates: `origin + scale * R(rotation) * p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Placement {
    pub origin: Point,
    pub rotation: f64,
    pub scale: f64,
}

impl Default for Placement {
    fn default() -> Self {
        Placement { origin: Point::new(0.0, 0.0), rotation: 0.0, scale: 1.0 }
    }
}

impl Placement {
    fn apply(&self, p: Point) -> Point {
        self.origin.add(p.rotate(self.rotation).scale(self.scale))
    }

    /// Placement mapping local point `local` onto `target`.
    fn anchored(local: Point, target: Point, rotation: f64, scale: f64) -> Placement {
        let origin = target.sub(local.rotate(rotation).scale(scale));
        Placement { origin, rotation, scale }
    }

    fn check(&self) -> Result<()> {
        if self.origin.x.is_finite() && self.origin.y.is_finite() && self.rotation.is_finite() && self.scale > 0.0 && self.scale.is_finite() {
            Ok(())
        } else {
            Err(Error::PlacementError(format!("invalid placement {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Outer {
    /// Outer intervals centred at these directions.
    Centers(Vec<f64>),
    /// One interval in one of the two gaps between two clusters.
    Angled { larger: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Glue {
    /// The new cluster sits opposite the existing one: two Λ-cones.
    Matched,
    Angled { larger: bool },
}

struct Builder {
    theta_max: f64,
    points: Vec<Point>,
    edges: Vec<(VertexId, VertexId)>,
    outer: Vec<Outer>,
}

impl Builder {
    fn new(theta_max: f64) -> Self {
        Builder { theta_max, points: Vec::new(), edges: Vec::new(), outer: Vec::new() }
    }

    fn vertex(&mut self, p: Point, outer: f64) -> VertexId {
        self.points.push(p);
        self.outer.push(Outer::Centers(vec![normalize_deg(outer)]));
        self.points.len() - 1
    }

    fn glue(&mut self, v: VertexId, new_outer: f64, kind: Glue) {
        self.outer[v] = match kind {
            Glue::Matched => Outer::Centers(vec![normalize_deg(new_outer + 90.0), normalize_deg(new_outer - 90.0)]),
            Glue::Angled { larger } => Outer::Angled { larger },
        };
    }

    /// Adds one fragment; `glued` maps local ids onto existing vertices.
    fn fragment(&mut self, pl: Placement, glued: &[(usize, VertexId, Glue)]) -> Result<[VertexId; 8]> {
        pl.check()?;
        let outer = fragment_outer_local();
        let mut ids = [0; 8];
        for i in 0..8 {
            let world = pl.apply(frag_point(i));
            let o = outer[i] + pl.rotation;
            match glued.iter().find(|g| g.0 == i) {
                Some(&(_, v, kind)) => {
                    let gap = self.points[v].sub(world).norm();
                    if gap > 1e-6 * (1.0 + world.norm()) {
                        return Err(Error::PlacementError(format!("glued {} misses its partner by {gap}", FRAG_NAMES[i])));
                    }
                    self.glue(v, o, kind);
                    ids[i] = v;
                }
                None => ids[i] = self.vertex(world, o),
            }
        }
        for &(a, b) in &FRAG_WITNESS {
            self.edges.push((ids[a], ids[b]));
        }
        Ok(ids)
    }

    fn real_dirs(&self, v: VertexId) -> Vec<(f64, f64)> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .map(|w| {
                let d = self.points[w].sub(self.points[v]);
                (direction_of(d), d.norm())
            })
            .collect()
    }

    /// Outer-interval centres of a core vertex.
    fn centers(&self, v: VertexId) -> Result<Vec<f64>> {
        match &self.outer[v] {
            Outer::Centers(c) => Ok(c.clone()),
            Outer::Angled { larger } => {
                let mut dirs: Vec<f64> = self.real_dirs(v).into_iter().map(|d| d.0).collect();
                dirs.sort_by(f64::total_cmp);
                let k = dirs.len();
                let mut gaps: Vec<(f64, f64)> = (0..k)
                    .map(|i| {
                        let g = if k == 1 { 360.0 } else { ccw_offset(dirs[i], dirs[(i + 1) % k]) };
                        (g, normalize_deg(dirs[i] + g / 2.0))
                    })
                    .collect();
                gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
                if gaps.len() < 2 {
                    return Err(Error::PlacementError(format!("vertex {v} has a single direction")));
                }
                Ok(vec![if *larger { gaps[0].1 } else { gaps[1].1 }])
            }
        }
    }

    /// Two largest gaps at an angled joint; the smaller one is the inner angle.
    fn inner_angle(&self, v: VertexId) -> f64 {
        let mut dirs: Vec<f64> = self.real_dirs(v).into_iter().map(|d| d.0).collect();
        dirs.sort_by(f64::total_cmp);
        let k = dirs.len();
        let mut gaps: Vec<f64> = (0..k).map(|i| ccw_offset(dirs[i], dirs[(i + 1) % k])).collect();
        gaps.sort_by(|a, b| b.total_cmp(a));
        gaps[1]
    }

    /// Pads every core vertex with leaves and returns the instance.
    fn finish(&self) -> Result<(Instance, Vec<bool>, f64)> {
        let th = self.theta_max;
        let spacing = th / 2.0;
        let mut points: Vec<(f64, f64)> = self.points.iter().map(|p| (p.x, p.y)).collect();
        let mut edges = self.edges.clone();
        let core = self.points.len();
        for v in 0..core {
            let real = self.real_dirs(v);
            if real.is_empty() {
                continue;
            }
            // long leaves keep recomputed directions accurate far from the origin
            let reach = real.iter().map(|d| d.1).fold(0.0, f64::max);
            let centers = self.centers(v)?;
            for &c in &centers {
                if let Some(d) = real.iter().find(|d| crate::model::angular_distance(d.0, c) < th / 2.0 - 1e-9) {
                    return Err(Error::PlacementError(format!(
                        "vertex {v}: edge direction {:.6} falls inside the outer interval at {c:.6}",
                        d.0
                    )));
                }
            }
            // (direction, is_real, is_interval_start)
            let mut marks: Vec<(f64, bool, bool)> = real.iter().map(|d| (d.0, true, false)).collect();
            for &c in &centers {
                marks.push((normalize_deg(c - th / 2.0), false, true));
                marks.push((normalize_deg(c + th / 2.0), false, false));
            }
            marks.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut leaves: Vec<f64> = marks.iter().filter(|m| !m.1).map(|m| m.0).collect();
            let k = marks.len();
            for i in 0..k {
                let (a, _, starts_interval) = marks[i];
                let b = marks[(i + 1) % k].0;
                if starts_interval {
                    continue;
                }
                let gap = ccw_offset(a, b);
                let n = (gap / spacing).ceil() as usize;
                for j in 1..n {
                    leaves.push(normalize_deg(a + gap * j as f64 / n as f64));
                }
            }
            for d in leaves {
                if real.iter().any(|r| crate::model::angular_distance(r.0, d) < 1e-9) {
                    continue;
                }
                let p = self.points[v].add(Point::polar(d).scale(reach));
                points.push((p.x, p.y));
                edges.push((v, points.len() - 1));
            }
        }
        let mut aux = vec![false; points.len()];
        for flag in aux.iter_mut().skip(core) {
            *flag = true;
        }
        let inst = Instance::plane(&points, edges)?;
        let lam = 360.0 - th;
        for v in 0..core {
            if inst.degree(v) >= 2 && (lambda_of(&inst, v).lambda - lam).abs() > 1e-9 {
                return Err(Error::PlacementError(format!("vertex {v} ended with Λ = {}", lambda_of(&inst, v).lambda)));
            }
        }
        let theta_min = measured_theta_min(&inst);
        Ok((inst, aux, theta_min))
    }
}

/// Smallest angle between consecutive edges at a vertex, over edges whose
/// endpoints both have degree above one.
fn measured_theta_min(inst: &Instance) -> f64 {
    let mut best = f64::INFINITY;
    for v in 0..inst.num_vertices() {
        let mut dirs: Vec<f64> = inst
            .incident(v)
            .iter()
            .filter(|&&e| {
                let ed = inst.edge(e);
                inst.degree(ed.u) > 1 && inst.degree(ed.v) > 1
            })
            .map(|&e| inst.direction(v, e).unwrap())
            .collect();
        if dirs.len() < 2 {
            continue;
        }
        dirs.sort_by(f64::total_cmp);
        for i in 0..dirs.len() {
            let g = ccw_offset(dirs[i], dirs[(i + 1) % dirs.len()]);
            best = best.min(g);
        }
    }
    best
}

// ---------------------------------------------------------------- gadgets

#[derive(Debug, Clone, PartialEq)]
pub struct GadgetGraph {
    pub instance: Instance,
    /// Role name to vertex, e.g. `s`, `x1.t2`, `C1.c3`, `w4.u1`.
    pub connectors: BTreeMap<String, VertexId>,
    /// Connector vertices per variable (empty for unused variables).
    pub variable_connectors: Vec<Vec<VertexId>>,
    /// `true` for the degree-one padding vertices.
    pub auxiliary: Vec<bool>,
    pub theta_max: f64,
    /// Measured on this embedding.
    pub theta_min: f64,
}

impl GadgetGraph {
    fn assemble(b: &Builder, connectors: BTreeMap<String, VertexId>, variable_connectors: Vec<Vec<VertexId>>) -> Result<Self> {
        let (instance, auxiliary, theta_min) = b.finish()?;
        Ok(GadgetGraph { instance, connectors, variable_connectors, auxiliary, theta_max: b.theta_max, theta_min })
    }

    pub fn connector(&self, role: &str) -> Option<VertexId> {
        self.connectors.get(role).copied()
    }

    /// Two-colouring by BFS, or `None` on an odd cycle.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let inst = &self.instance;
        let mut color = vec![u8::MAX; inst.num_vertices()];
        for s in 0..inst.num_vertices() {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in inst.neighbors(v) {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        queue.push_back(w);
                    } else if color[w] == color[v] {
                        return None;
                    }
                }
            }
        }
        Some(color)
    }

    /// Largest deviation of Λ(v) from 360 − `theta_max` over gadget vertices.
    pub fn lambda_spread(&self) -> f64 {
        (0..self.instance.num_vertices())
            .filter(|&v| !self.auxiliary[v])
            .map(|v| (lambda_of(&self.instance, v).lambda - (360.0 - self.theta_max)).abs())
            .fold(0.0, f64::max)
    }

    /// Reads a truth assignment off a Λ-cover: a variable is true when its
    /// connectors turn clockwise.
    pub fn decode_assignment(&self, cover: &LambdaCoverResult) -> Option<Vec<bool>> {
        let rot = cover.assignment.as_ref()?;
        Some(
            self.variable_connectors
                .iter()
                .map(|cs| cs.first().is_some_and(|&c| rot[c] == Some(Rotation::Cw)))
                .collect(),
        )
    }
}

fn certification_budget() -> Budget {
    Budget { nodes: Some(50_000_000), time: None }
}

fn feasible(inst: &Instance, constraints: &[(VertexId, Rotation)]) -> Result<bool> {
    Ok(lambda_cover_with(inst, certification_budget(), constraints)?.exists)
}

fn rotations(bits: u32, n: usize) -> Vec<Rotation> {
    (0..n).map(|i| if bits >> i & 1 == 1 { Rotation::Cw } else { Rotation::Ccw }).collect()
}

fn certify_fragment(g: &GadgetGraph) -> Result<()> {
    let (s, t, u) = (g.connectors["s"], g.connectors["t"], g.connectors["u"]);
    for bits in 0..8 {
        let r = rotations(bits, 3);
        let expect = r[2] == r[1] && r[0] != r[2];
        if feasible(&g.instance, &[(s, r[0]), (t, r[1]), (u, r[2])])? != expect {
            return Err(Error::CertificationFailed(format!(
                "wire fragment: pattern s={:?} t={:?} u={:?} should be {}",
                r[0],
                r[1],
                r[2],
                if expect { "feasible" } else { "infeasible" }
            )));
        }
    }
    Ok(())
}

/// One wire fragment with connectors `s`, `t`, `u`, certified.
pub fn build_wire_fragment(placement: Placement) -> Result<GadgetGraph> {
    build_wire_fragment_with(placement, default_theta_max())
}

pub fn build_wire_fragment_with(placement: Placement, theta_max: f64) -> Result<GadgetGraph> {
    let mut b = Builder::new(theta_max);
    let ids = b.fragment(placement, &[])?;
    let mut connectors = BTreeMap::new();
    for (i, name) in FRAG_NAMES.iter().enumerate() {
        connectors.insert(name.to_string(), ids[i]);
    }
    let g = GadgetGraph::assemble(&b, connectors, vec![])?;
    certify_fragment(&g)?;
    Ok(g)
}

/// Unpadded fragment edges in witness order, for inspection.
pub fn fragment_witness_edges() -> Vec<(&'static str, &'static str)> {
    FRAG_WITNESS.iter().map(|&(a, b)| (FRAG_NAMES[a], FRAG_NAMES[b])).collect()
}

/// The fragment witness order extended to the padding leaves, timed greedily.
/// Every vertex then sweeps exactly its Λ-cone.
pub fn fragment_witness_cover(g: &GadgetGraph) -> Result<ScanCover> {
    let inst = &g.instance;
    let id = |name: &str| g.connectors[name];
    let real: Vec<EdgeId> = FRAG_WITNESS
        .iter()
        .map(|&(a, b)| inst.edge_id(id(FRAG_NAMES[a]), id(FRAG_NAMES[b])).expect("fragment edge"))
        .collect();
    let rank: BTreeMap<EdgeId, usize> = real.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // leaves queued before the real edge at which they are due (usize::MAX: after all)
    let mut due: BTreeMap<usize, Vec<(VertexId, f64, EdgeId)>> = BTreeMap::new();
    for v in 0..inst.num_vertices() {
        if g.auxiliary[v] {
            continue;
        }
        let mut mine: Vec<EdgeId> = inst.incident(v).iter().copied().filter(|e| rank.contains_key(e)).collect();
        mine.sort_by_key(|e| rank[e]);
        let dirs: Vec<f64> = mine.iter().map(|&e| inst.direction(v, e).unwrap()).collect();
        let outer = sweep_outer_bisector(&dirs);
        let ccw = dirs.windows(2).all(|w| ccw_offset(dirs[0], w[0]) <= ccw_offset(dirs[0], w[1]));
        let pos = |d: f64| if ccw { ccw_offset(outer, d) } else { ccw_offset(d, outer) };
        for &e in inst.incident(v) {
            if rank.contains_key(&e) {
                continue;
            }
            let p = pos(inst.direction(v, e).unwrap());
            let slot = mine.iter().find(|&&r| pos(inst.direction(v, r).unwrap()) > p).map_or(usize::MAX, |r| rank[r]);
            due.entry(slot).or_default().push((v, p, e));
        }
    }
    for ls in due.values_mut() {
        ls.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    let mut seq = Vec::with_capacity(inst.num_edges());
    for (i, &e) in real.iter().enumerate() {
        if let Some(ls) = due.get(&i) {
            seq.extend(ls.iter().map(|l| l.2));
        }
        seq.push(e);
    }
    if let Some(ls) = due.get(&usize::MAX) {
        seq.extend(ls.iter().map(|l| l.2));
    }
    Ok(time_sequence(inst, &seq)?)
}

/// Adds a variable chain of `2k` fragments; returns `(all fragment ids, connectors t_2, t_4, ...)`.
fn add_variable(b: &mut Builder, k: usize, pl: Placement) -> Result<(Vec<[VertexId; 8]>, Vec<VertexId>)> {
    let mut frags: Vec<[VertexId; 8]> = Vec::with_capacity(2 * k);
    for i in 1..=2 * k {
        let rotation = pl.rotation + if i % 2 == 0 { 180.0 } else { 0.0 };
        let ids = if i == 1 {
            b.fragment(pl, &[])?
        } else {
            let prev = frags[i - 2];
            let joint = if i % 2 == 0 { S } else { U };
            let target = b.points[prev[joint]];
            let place = Placement::anchored(frag_point(joint), target, rotation, pl.scale);
            b.fragment(place, &[(joint, prev[joint], Glue::Matched)])?
        };
        frags.push(ids);
    }
    let connectors = frags.iter().skip(1).step_by(2).map(|f| f[T]).collect();
    Ok((frags, connectors))
}

/// Variable gadget of `2k` fragments, certified: a Λ-cover exists and all
/// connectors turn the same way in every Λ-cover.
pub fn build_variable_gadget(k: usize, placement: Placement) -> Result<GadgetGraph> {
    build_variable_gadget_with(k, placement, default_theta_max())
}

pub fn build_variable_gadget_with(k: usize, placement: Placement, theta_max: f64) -> Result<GadgetGraph> {
    if k == 0 {
        return Err(Error::Domain("a variable gadget needs at least one occurrence".into()));
    }
    let mut b = Builder::new(theta_max);
    let (_, cs) = add_variable(&mut b, k, placement)?;
    let mut connectors = BTreeMap::new();
    for (i, &c) in cs.iter().enumerate() {
        connectors.insert(format!("t{}", 2 * (i + 1)), c);
    }
    let g = GadgetGraph::assemble(&b, connectors, vec![cs])?;
    certify_variable(&g.instance, &g.variable_connectors[0])?;
    Ok(g)
}

fn certify_variable(inst: &Instance, cs: &[VertexId]) -> Result<()> {
    if !lambda_cover_exists(inst, certification_budget())?.exists {
        return Err(Error::CertificationFailed("variable gadget has no Λ-cover".into()));
    }
    for &c in &cs[1..] {
        if feasible(inst, &[(cs[0], Rotation::Cw), (c, Rotation::Ccw)])? {
            return Err(Error::CertificationFailed("variable connectors can disagree".into()));
        }
    }
    Ok(())
}

/// Local clause coordinates; `s_i` is the midpoint of side `c_i c_(i+1)`.
fn clause_points() -> ([Point; 3], [Point; 3]) {
    let c = [Point::new(0.0, 173.0), Point::new(-100.0, 0.0), Point::new(100.0, 0.0)];
    let s = [0, 1, 2].map(|i| c[i].add(c[(i + 1) % 3]).scale(0.5));
    (c, s)
}

/// Adds a clause gadget; returns `[c1, c2, c3]`.
fn add_clause(b: &mut Builder, pl: Placement) -> Result<[VertexId; 3]> {
    pl.check()?;
    let (c, s) = clause_points();
    let cw = c.map(|p| pl.apply(p));
    let sw = s.map(|p| pl.apply(p));
    let centroid = cw[0].add(cw[1]).add(cw[2]).scale(1.0 / 3.0);
    let cid = [0, 1, 2].map(|i| b.vertex(cw[i], direction_of(cw[i].sub(centroid)) ));
    let sid = [0, 1, 2].map(|i| {
        // outer interval between c_i and c_(i+2), away from c_(i+1)
        let a = direction_of(cw[i].sub(sw[i]));
        let far = direction_of(cw[(i + 2) % 3].sub(sw[i]));
        let mid = direction_of(cw[(i + 1) % 3].sub(sw[i]));
        let outer = if ccw_offset(a, mid) > ccw_offset(a, far) {
            a + ccw_offset(a, far) / 2.0
        } else {
            far + ccw_offset(far, a) / 2.0
        };
        b.vertex(sw[i], outer)
    });
    for &ci in &cid {
        for &sj in &sid {
            b.edges.push((ci, sj));
        }
    }
    Ok(cid)
}

/// Direction of the Λ-cone bisector of clause corner `i` (towards the centroid).
fn clause_corner_inward(pl: &Placement, i: usize) -> f64 {
    let (c, _) = clause_points();
    let cw = c.map(|p| pl.apply(p));
    let centroid = cw[0].add(cw[1]).add(cw[2]).scale(1.0 / 3.0);
    direction_of(centroid.sub(cw[i]))
}

fn certify_clause(inst: &Instance, cs: [VertexId; 3]) -> Result<()> {
    for bits in 0..8 {
        let r = rotations(bits, 3);
        let expect = !(r[0] == r[1] && r[1] == r[2]);
        if feasible(inst, &[(cs[0], r[0]), (cs[1], r[1]), (cs[2], r[2])])? != expect {
            return Err(Error::CertificationFailed(format!(
                "clause gadget: pattern {r:?} should be {}",
                if expect { "feasible" } else { "infeasible" }
            )));
        }
    }
    Ok(())
}

/// Clause gadget (triangle corners `c1..c3`, side midpoints `s1..s3`), certified:
/// exactly the not-all-equal corner patterns admit a Λ-cover.
pub fn build_clause_gadget(placement: Placement) -> Result<GadgetGraph> {
    build_clause_gadget_with(placement, default_theta_max())
}

pub fn build_clause_gadget_with(placement: Placement, theta_max: f64) -> Result<GadgetGraph> {
    let mut b = Builder::new(theta_max);
    let cs = add_clause(&mut b, placement)?;
    let mut connectors = BTreeMap::new();
    for (i, &c) in cs.iter().enumerate() {
        connectors.insert(format!("c{}", i + 1), c);
    }
    for i in 0..3 {
        connectors.insert(format!("s{}", i + 1), 3 + i);
    }
    let g = GadgetGraph::assemble(&b, connectors, vec![])?;
    certify_clause(&g.instance, cs)?;
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WireOptions {
    /// Smallest inner angle allowed at the five angled joints, degrees.
    pub min_inner_angle: f64,
    pub theta_max: f64,
}

impl Default for WireOptions {
    fn default() -> Self {
        WireOptions { min_inner_angle: 10.0, theta_max: default_theta_max() }
    }
}

pub const WIRE_FRAGMENTS: usize = 18;

/// Entry and exit connector of fragment `j` (0-based) along the wire.
fn wire_ports(j: usize) -> (usize, usize) {
    if j >= 16 || j % 4 < 2 {
        (U, S)
    } else {
        (S, U)
    }
}

fn wire_angled(j: usize) -> bool {
    j > 0 && (j % 4 == 1 || j == 17)
}

/// Fragment rotations for bisector turn `theta`, starting at `rho0`.
#[derive(Debug, Clone, PartialEq)]
struct WirePlan {
    rotations: [f64; WIRE_FRAGMENTS],
    phi: f64,
}

fn wire_plan(theta: f64, rho0: f64) -> WirePlan {
    let beta = fragment_outer_local();
    let (bs, bu) = (beta[S], beta[U]);
    let base = normalize_deg(theta - 2.0 * (bs - bu) + 180.0);
    // among the five solutions of 5φ ≡ base, keep the one that opens the first two
    // fragments' displacement vectors closest to a right angle
    let phi = (0..5)
        .map(|k| (base + 360.0 * k as f64) / 5.0)
        .map(|p| if p > 180.0 { p - 360.0 } else { p })
        .min_by(|a, b| {
            let da = (normalize_deg(bs - bu - 180.0 + a) - 90.0).abs();
            let db = (normalize_deg(bs - bu - 180.0 + b) - 90.0).abs();
            da.total_cmp(&db)
        })
        .unwrap();
    let mut rotations = [0.0; WIRE_FRAGMENTS];
    rotations[0] = rho0;
    for j in 1..WIRE_FRAGMENTS {
        let exit = wire_ports(j - 1).1;
        let entry = wire_ports(j).0;
        let turn = beta[exit] - beta[entry] - 180.0 + if wire_angled(j) { phi } else { 0.0 };
        rotations[j] = normalize_deg(rotations[j - 1] + turn);
    }
    WirePlan { rotations, phi }
}

/// Lays out a wire from `start`; scales of the first two fragments are
/// `lambda`. Returns fragment ids.
fn add_wire_at(
    b: &mut Builder,
    plan: &WirePlan,
    start: (Point, Option<VertexId>),
    end: Option<VertexId>,
    lambda: [f64; 2],
    larger: bool,
) -> Result<Vec<[VertexId; 8]>> {
    let mut frags: Vec<[VertexId; 8]> = Vec::with_capacity(WIRE_FRAGMENTS);
    let mut at = start.0;
    for j in 0..WIRE_FRAGMENTS {
        let (entry, exit) = wire_ports(j);
        let scale = if j < 2 { lambda[j] } else { 1.0 };
        let pl = Placement::anchored(frag_point(entry), at, plan.rotations[j], scale);
        let mut glued = Vec::new();
        if j == 0 {
            if let Some(v) = start.1 {
                glued.push((entry, v, Glue::Matched));
            }
        } else {
            let prev = frags[j - 1][wire_ports(j - 1).1];
            let kind = if wire_angled(j) { Glue::Angled { larger } } else { Glue::Matched };
            glued.push((entry, prev, kind));
        }
        if j == WIRE_FRAGMENTS - 1 {
            if let Some(v) = end {
                glued.push((exit, v, Glue::Matched));
            }
        }
        let ids = b.fragment(pl, &glued)?;
        at = b.points[ids[exit]];
        frags.push(ids);
    }
    Ok(frags)
}

fn wire_end_unscaled(plan: &WirePlan, start: Point) -> (Point, Point, Point) {
    let mut at = start;
    let mut w = [Point::new(0.0, 0.0); 2];
    for j in 0..WIRE_FRAGMENTS {
        let (entry, exit) = wire_ports(j);
        let step = frag_point(exit).sub(frag_point(entry)).rotate(plan.rotations[j]);
        if j < 2 {
            w[j] = step;
        }
        at = at.add(step);
    }
    (at, w[0], w[1])
}

fn check_inner_angles(b: &Builder, frags: &[[VertexId; 8]], theta: f64, min_inner: f64) -> Result<()> {
    for j in (1..WIRE_FRAGMENTS).filter(|&j| wire_angled(j)) {
        let v = frags[j][wire_ports(j).0];
        if b.inner_angle(v) < min_inner {
            return Err(Error::ThetaOutOfRange { theta, min_inner });
        }
    }
    Ok(())
}

fn certify_wire(inst: &Instance, u1: VertexId, s18: VertexId) -> Result<()> {
    if !lambda_cover_exists(inst, certification_budget())?.exists {
        return Err(Error::CertificationFailed("wire gadget has no Λ-cover".into()));
    }
    if feasible(inst, &[(u1, Rotation::Cw), (s18, Rotation::Ccw)])? {
        return Err(Error::CertificationFailed("wire endpoints can disagree".into()));
    }
    Ok(())
}

/// Standalone wire whose end bisectors differ by `theta`, certified.
fn standalone_wire(theta: f64, rho0: f64, opts: &WireOptions) -> Result<(GadgetGraph, bool)> {
    if !theta.is_finite() {
        return Err(Error::Domain("wire angle must be finite".into()));
    }
    let plan = wire_plan(theta, rho0);
    let mut last_err = None;
    for larger in [true, false] {
        let mut b = Builder::new(opts.theta_max);
        let frags = add_wire_at(&mut b, &plan, (Point::new(0.0, 0.0), None), None, [1.0, 1.0], larger)?;
        check_inner_angles(&b, &frags, theta, opts.min_inner_angle)?;
        let (u1, s18) = (frags[0][U], frags[WIRE_FRAGMENTS - 1][S]);
        let mut connectors = BTreeMap::new();
        connectors.insert("u1".to_string(), u1);
        connectors.insert("s18".to_string(), s18);
        let g = GadgetGraph::assemble(&b, connectors, vec![])?;
        match certify_wire(&g.instance, u1, s18) {
            Ok(()) => return Ok((g, larger)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap())
}

/// Wire of 18 fragments from `u1` to `s18` whose outer-cone bisectors differ
/// by `theta` (counterclockwise), certified.
pub fn build_wire(theta: f64, opts: &WireOptions) -> Result<GadgetGraph> {
    standalone_wire(theta, 0.0, opts).map(|(g, _)| g)
}

/// Outer-cone bisector of a connector, taken as the bisector of the gap
/// between its extreme real edges (single-cluster connectors only).
pub fn outer_bisector(g: &GadgetGraph, v: VertexId) -> f64 {
    let inst = &g.instance;
    let dirs: Vec<f64> = inst
        .incident(v)
        .iter()
        .filter(|&&e| !g.auxiliary[inst.edge(e).other(v).unwrap()])
        .map(|&e| inst.direction(v, e).unwrap())
        .collect();
    let mut sorted = dirs.clone();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let (gap, i) = (0..k)
        .map(|i| (if k == 1 { 360.0 } else { ccw_offset(sorted[i], sorted[(i + 1) % k]) }, i))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    normalize_deg(sorted[i] + gap / 2.0)
}

// ---------------------------------------------------------------- reduction

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReduceOptions {
    pub wire: WireOptions,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions { wire: WireOptions::default() }
    }
}

/// Clauses padded to three literals by repeating the last one.
pub fn padded_clauses(sat: &Mnae3SatInstance) -> Vec<[usize; 3]> {
    sat.clauses
        .iter()
        .map(|c| {
            let last = *c.last().unwrap();
            [c[0], *c.get(1).unwrap_or(&last), *c.get(2).unwrap_or(&last)]
        })
        .collect()
}

/// Builds the gadget graph of `sat`; it has a Λ-cover iff `sat` is NAE-satisfiable.
pub fn reduce(sat: &Mnae3SatInstance) -> Result<GadgetGraph> {
    reduce_with(sat, &ReduceOptions::default())
}

pub fn reduce_with(sat: &Mnae3SatInstance, opts: &ReduceOptions) -> Result<GadgetGraph> {
    let th = opts.wire.theta_max;
    let clauses = padded_clauses(sat);
    let mut occurrences = vec![0usize; sat.num_vars];
    for c in &clauses {
        for &x in c {
            occurrences[x] += 1;
        }
    }
    let beta = fragment_outer_local();
    let frag_step = direction_of(frag_point(S).sub(frag_point(U)));
    // turn variables so every wire's first displacement points 30° below the x-axis
    let psi = normalize_deg(-30.0 - frag_step - beta[T] + beta[U]);
    let frag_len = frag_point(S).sub(frag_point(U)).norm();
    let max_k = occurrences.iter().copied().max().unwrap_or(0);
    let row = frag_len * 2.0 * max_k as f64 + 400.0;
    let height = row * (sat.num_vars.max(clauses.len()) as f64 + 1.0);
    let far = 20.0 * (height + WIRE_FRAGMENTS as f64 * frag_len * 2.0);

    // certification of the reusable pieces
    certify_fragment(&build_wire_fragment_with(Placement::default(), th)?)?;
    let mut certified_k = Vec::new();

    let mut b = Builder::new(th);
    let mut connectors = BTreeMap::new();
    let mut var_connectors = vec![Vec::new(); sat.num_vars];
    for x in 0..sat.num_vars {
        let k = occurrences[x];
        if k == 0 {
            continue;
        }
        if !certified_k.contains(&k) {
            build_variable_gadget_with(k, Placement { rotation: psi, ..Placement::default() }, th)?;
            certified_k.push(k);
        }
        let pl = Placement { origin: Point::new(0.0, -(x as f64) * row), rotation: psi, scale: 1.0 };
        let (_, cs) = add_variable(&mut b, k, pl)?;
        for (i, &c) in cs.iter().enumerate() {
            connectors.insert(format!("x{}.t{}", x + 1, 2 * (i + 1)), c);
        }
        var_connectors[x] = cs;
    }
    let mut clause_certified = false;
    let mut next_use = vec![0usize; sat.num_vars];
    for (j, clause) in clauses.iter().enumerate() {
        let pl = Placement { origin: Point::new(far, -(j as f64) * row), rotation: 0.0, scale: 1.0 };
        if !clause_certified {
            build_clause_gadget_with(pl, th)?;
            clause_certified = true;
        }
        let corners = add_clause(&mut b, pl)?;
        for (i, &c) in corners.iter().enumerate() {
            connectors.insert(format!("C{}.c{}", j + 1, i + 1), c);
        }
        for (p, &x) in clause.iter().enumerate() {
            let t = var_connectors[x][next_use[x]];
            next_use[x] += 1;
            let b1 = normalize_deg(beta[T] + psi);
            let b2 = clause_corner_inward(&pl, p);
            let theta = normalize_deg(b2 - b1);
            let rho0 = normalize_deg(b1 - beta[U]);
            let (_, larger) = standalone_wire(theta, rho0, &opts.wire)?;
            let plan = wire_plan(theta, rho0);
            let start = b.points[t];
            let target = b.points[corners[p]];
            let (end, w1, w2) = wire_end_unscaled(&plan, start);
            let d = target.sub(end);
            let det = w1.x * w2.y - w1.y * w2.x;
            if det.abs() < 1e-9 {
                return Err(Error::PlacementError("wire scaling vectors are parallel".into()));
            }
            let a = (d.x * w2.y - d.y * w2.x) / det;
            let c = (w1.x * d.y - w1.y * d.x) / det;
            if a < 0.0 || c < 0.0 {
                return Err(Error::PlacementError(format!(
                    "clause {} lies outside the wire's reach (coefficients {a:.3}, {c:.3})",
                    j + 1
                )));
            }
            let frags = add_wire_at(&mut b, &plan, (start, Some(t)), Some(corners[p]), [1.0 + a, 1.0 + c], larger)?;
            check_inner_angles(&b, &frags, theta, opts.wire.min_inner_angle)?;
        }
    }
    GadgetGraph::assemble(&b, connectors, var_connectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate;

    #[test]
    fn gap_constant_examples() {
        let g = gap_constant(default_theta_max(), 0.25f64.atan().to_degrees()).unwrap();
        assert!((g - 1.0421).abs() < 5e-4 && g >= 1.04, "{g}");
        assert_eq!(gap_constant(30.0, 0.0).unwrap(), 1.0);
        assert!((gap_constant(90.0, 90.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!(gap_constant(10.0, 20.0).is_err());
        assert!(gap_constant(360.0, 0.0).is_err());
        assert!(gap_constant(30.0, -1.0).is_err());
    }

    #[test]
    fn formula_text_round_trip() {
        let sat = Mnae3SatInstance::parse("c demo\np mnae3sat 4 3\n1 2 4\n1 2 3 0\n1 3 4\n").unwrap();
        assert_eq!(sat.clauses, vec![vec![0, 1, 3], vec![0, 1, 2], vec![0, 2, 3]]);
        assert_eq!(Mnae3SatInstance::parse(&sat.to_text()).unwrap(), sat);
        assert!(sat.is_nae_satisfied(&[true, false, true, false]));
        assert!(Mnae3SatInstance::parse("p mnae3sat 2 1\n1 2 3\n").is_err());
        assert!(Mnae3SatInstance::parse("p mnae3sat 3 1\n1 2 3 1\n").is_err());
        assert!(Mnae3SatInstance::parse("p mnae3sat 3 2\n1 2 3\n").is_err());
        let unsat = Mnae3SatInstance::new(1, vec![vec![0, 0, 0]]).unwrap();
        assert!(unsat.nae_satisfiable().is_none());
    }

    #[test]
    fn fragment_outer_bisectors_follow_witness() {
        let outer = fragment_outer_local();
        // every designated gap leaves room for the outer interval
        for (v, &o) in outer.iter().enumerate() {
            for &(a, b) in &FRAG_WITNESS {
                let w = if a == v { b } else if b == v { a } else { continue };
                let d = direction_of(frag_point(w).sub(frag_point(v)));
                assert!(crate::model::angular_distance(d, o) > default_theta_max() / 2.0 + 1.0, "{}", FRAG_NAMES[v]);
            }
        }
    }

    #[test]
    fn fragment_is_certified_and_witness_sweeps_lambda() {
        let g = build_wire_fragment(Placement::default()).unwrap();
        assert_eq!(g.instance.edges().iter().filter(|e| !g.auxiliary[e.u] && !g.auxiliary[e.v]).count(), 14);
        assert!(g.bipartition().is_some());
        assert!(g.lambda_spread() < 1e-9);
        let sc = fragment_witness_cover(&g).unwrap();
        let ev = evaluate(&g.instance, &sc).unwrap();
        for v in 0..8 {
            assert!((ev.per_vertex_rotation[v] - lambda_of(&g.instance, v).lambda).abs() < 1e-9, "{} {} {}", FRAG_NAMES[v], ev.per_vertex_rotation[v], lambda_of(&g.instance, v).lambda);
        }
        // rotation, translation and scale do not change the combinatorics
        let moved = Placement { origin: Point::new(5.0, -3.0), rotation: 77.0, scale: 2.5 };
        assert!(build_wire_fragment(moved).is_ok());
    }

    #[test]
    fn variable_gadget_counts() {
        for k in 1..=3 {
            let g = build_variable_gadget(k, Placement::default()).unwrap();
            assert_eq!(g.variable_connectors[0].len(), k);
            let real = g.instance.edges().iter().filter(|e| !g.auxiliary[e.u] && !g.auxiliary[e.v]).count();
            assert_eq!(real, 14 * 2 * k);
            assert!(g.bipartition().is_some());
            assert!(g.lambda_spread() < 1e-9);
        }
        assert!(build_variable_gadget(0, Placement::default()).is_err());
    }

    #[test]
    fn clause_gadget_patterns() {
        let g = build_clause_gadget(Placement::default()).unwrap();
        let real = g.instance.edges().iter().filter(|e| !g.auxiliary[e.u] && !g.auxiliary[e.v]).count();
        assert_eq!(real, 9);
        let c = [g.connectors["c1"], g.connectors["c2"], g.connectors["c3"]];
        let all_cw = [(c[0], Rotation::Cw), (c[1], Rotation::Cw), (c[2], Rotation::Cw)];
        assert!(!feasible(&g.instance, &all_cw).unwrap());
        let mixed = [(c[0], Rotation::Cw), (c[1], Rotation::Ccw), (c[2], Rotation::Ccw)];
        assert!(feasible(&g.instance, &mixed).unwrap());
    }

    #[test]
    fn wire_turns_by_theta() {
        for theta in [0.0, 37.5, 120.0, 250.0, 359.0] {
            let g = build_wire(theta, &WireOptions::default()).unwrap();
            let b1 = outer_bisector(&g, g.connectors["u1"]);
            let b2 = outer_bisector(&g, g.connectors["s18"]);
            let turn = normalize_deg(b2 - b1);
            assert!(crate::model::angular_distance(turn, theta) < 1e-6, "θ={theta}: {turn}");
            assert!(g.bipartition().is_some());
            assert!(g.lambda_spread() < 1e-9);
        }
        let strict = WireOptions { min_inner_angle: 179.0, ..WireOptions::default() };
        assert!(matches!(build_wire(30.0, &strict), Err(Error::ThetaOutOfRange { .. })));
    }

    #[test]
    fn reduce_small_formulas() {
        let unsat = Mnae3SatInstance::new(1, vec![vec![0, 0, 0]]).unwrap();
        let g = reduce(&unsat).unwrap();
        assert!(g.bipartition().is_some());
        assert!(g.lambda_spread() < 1e-9);
        assert!(!lambda_cover_exists(&g.instance, Budget::unlimited()).unwrap().exists);

        let sat = Mnae3SatInstance::new(2, vec![vec![0, 1, 1]]).unwrap();
        let g = reduce(&sat).unwrap();
        let r = lambda_cover_exists(&g.instance, Budget::unlimited()).unwrap();
        assert!(r.exists);
        let a = g.decode_assignment(&r).unwrap();
        assert!(sat.is_nae_satisfied(&a));
    }

    #[test]
    fn reduce_three_clause_formula() {
        let sat = Mnae3SatInstance::new(4, vec![vec![0, 1, 3], vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        assert!(sat.is_nae_satisfied(&[true, false, true, false]));
        let g = reduce(&sat).unwrap();
        assert!(g.bipartition().is_some());
        assert!(g.lambda_spread() < 1e-9);
        assert!(g.theta_min > 0.0 && g.theta_min <= g.theta_max);
        let r = lambda_cover_exists(&g.instance, Budget::unlimited()).unwrap();
        assert!(r.exists);
        assert!(sat.is_nae_satisfied(&g.decode_assignment(&r).unwrap()));
        let sc = r.schedule.unwrap();
        let ev = evaluate(&g.instance, &sc).unwrap();
        for v in (0..g.instance.num_vertices()).filter(|&v| !g.auxiliary[v]) {
            assert!((ev.per_vertex_rotation[v] - (360.0 - g.theta_max)).abs() < 1e-6);
        }
    }
}
