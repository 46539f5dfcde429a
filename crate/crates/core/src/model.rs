//! Geometric model shared by every solver.
//!
//! Angles are in degrees. Directions are measured counterclockwise from the
//! positive x-axis and normalised to `[0, 360)`. Clockwise means decreasing
//! direction. Scan times use the same unit as angles.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Absolute tolerance (degrees) for time separation and angle comparisons.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("edge {edge} references vertex {vertex}, but the instance has {n} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge} duplicates edge {first} ({u}, {v})")]
    DuplicateEdge { edge: usize, first: usize, u: usize, v: usize },
    #[error("edge {edge} joins coincident points {u} and {v}; its direction is undefined")]
    DegenerateEdge { edge: usize, u: usize, v: usize },
    #[error("coordinate of vertex {vertex} is not finite")]
    NonFiniteCoordinate { vertex: usize },
    #[error("1D instance has a non-zero y coordinate at vertex {vertex}")]
    NotOnLine { vertex: usize },
    #[error("edges {e} and {f} do not share exactly one vertex")]
    NotAdjacent { e: EdgeId, f: EdgeId },
    #[error("edge {edge} is not incident to vertex {vertex}")]
    NotIncident { vertex: VertexId, edge: EdgeId },
    #[error("schedule has {got} times for an instance with {expected} edges")]
    MissingEdgeTime { expected: usize, got: usize },
    #[error("scan time of edge {edge} is negative or not finite: {time}")]
    InvalidTime { edge: EdgeId, time: f64 },
    #[error("sequence is not a permutation of the edge set")]
    NotPermutation,
    #[error("schedule violates {} separation constraint(s)", .0.len())]
    Infeasible(Vec<Violation>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn as_u8(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotates counterclockwise about the origin by `deg` degrees.
    pub fn rotate(self, deg: f64) -> Point {
        let (s, c) = deg.to_radians().sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Unit vector pointing in direction `deg`.
    pub fn polar(deg: f64) -> Point {
        let (s, c) = deg.to_radians().sin_cos();
        Point::new(c, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn other(&self, w: VertexId) -> Option<VertexId> {
        if w == self.u {
            Some(self.v)
        } else if w == self.v {
            Some(self.u)
        } else {
            None
        }
    }

    pub fn touches(&self, w: VertexId) -> bool {
        self.u == w || self.v == w
    }

    /// The vertex shared with `other`, if the two edges share exactly one.
    pub fn shared_vertex(&self, other: &Edge) -> Option<VertexId> {
        let common = [self.u, self.v]
            .into_iter()
            .filter(|&w| other.touches(w))
            .collect::<Vec<_>>();
        match common.as_slice() {
            [w] => Some(*w),
            _ => None,
        }
    }

    fn key(&self) -> (VertexId, VertexId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

/// Sense of rotation. Clockwise is decreasing mathematical angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rotation {
    Cw,
    Ccw,
}

impl Rotation {
    pub fn reversed(self) -> Rotation {
        match self {
            Rotation::Cw => Rotation::Ccw,
            Rotation::Ccw => Rotation::Cw,
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rotation::Cw => "cw",
            Rotation::Ccw => "ccw",
        })
    }
}

/// An embedded graph: the universal input.
#[derive(Debug, Clone)]
pub struct Instance {
    dim: Dimension,
    points: Vec<Point>,
    edges: Vec<Edge>,
    name: Option<String>,
    incident: Vec<Vec<EdgeId>>,
    // direction of edge e seen from e.u and from e.v
    dir_from_u: Vec<f64>,
    dir_from_v: Vec<f64>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && self.edges == other.edges
            && self.name == other.name
    }
}

impl Instance {
    pub fn new(
        dim: Dimension,
        points: Vec<Point>,
        edges: Vec<(VertexId, VertexId)>,
    ) -> Result<Self, ModelError> {
        let n = points.len();
        for (i, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(ModelError::NonFiniteCoordinate { vertex: i });
            }
            if dim == Dimension::One && p.y != 0.0 {
                return Err(ModelError::NotOnLine { vertex: i });
            }
        }
        let mut index = HashMap::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        let mut dir_from_u = Vec::with_capacity(edges.len());
        let mut dir_from_v = Vec::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(ModelError::VertexOutOfRange { edge: id, vertex: w, n });
                }
            }
            if u == v {
                return Err(ModelError::SelfLoop { edge: id, vertex: u });
            }
            let e = Edge { u, v };
            if let Some(&first) = index.get(&e.key()) {
                return Err(ModelError::DuplicateEdge { edge: id, first, u, v });
            }
            let d = points[v].sub(points[u]);
            if d.x == 0.0 && d.y == 0.0 {
                return Err(ModelError::DegenerateEdge { edge: id, u, v });
            }
            index.insert(e.key(), id);
            incident[u].push(id);
            incident[v].push(id);
            let fwd = direction_of(d);
            dir_from_u.push(fwd);
            dir_from_v.push(normalize_deg(fwd + 180.0));
            out.push(e);
        }
        Ok(Instance {
            dim,
            points,
            edges: out,
            name: None,
            incident,
            dir_from_u,
            dir_from_v,
            index,
        })
    }

    /// A 1D instance from coordinates on the x-axis.
    pub fn line(coords: &[f64], edges: Vec<(VertexId, VertexId)>) -> Result<Self, ModelError> {
        let pts = coords.iter().map(|&x| Point::new(x, 0.0)).collect();
        Instance::new(Dimension::One, pts, edges)
    }

    pub fn plane(points: &[(f64, f64)], edges: Vec<(VertexId, VertexId)>) -> Result<Self, ModelError> {
        let pts = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
        Instance::new(Dimension::Two, pts, edges)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn set_name(&mut self, name: Option<String>) {
        self.name = name;
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, v: VertexId) -> Point {
        self.points[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn edge_pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v].len()
    }

    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.incident[v].iter().map(move |&e| self.edges[e].other(v).unwrap())
    }

    /// Direction in which `v` must head to face along edge `e`.
    pub fn direction(&self, v: VertexId, e: EdgeId) -> Option<f64> {
        let edge = self.edges[e];
        if edge.u == v {
            Some(self.dir_from_u[e])
        } else if edge.v == v {
            Some(self.dir_from_v[e])
        } else {
            None
        }
    }

    fn dir_unchecked(&self, v: VertexId, e: EdgeId) -> f64 {
        if self.edges[e].u == v {
            self.dir_from_u[e]
        } else {
            self.dir_from_v[e]
        }
    }

    /// α(e, f): the rotation angle between two adjacent edges at their shared vertex.
    pub fn angle_between(&self, e: EdgeId, f: EdgeId) -> Result<f64, ModelError> {
        let v = self.edges[e]
            .shared_vertex(&self.edges[f])
            .ok_or(ModelError::NotAdjacent { e, f })?;
        Ok(self.alpha_at(v, e, f))
    }

    /// α between two edges incident to `v`. Caller guarantees incidence.
    pub fn alpha_at(&self, v: VertexId, e: EdgeId, f: EdgeId) -> f64 {
        angular_distance(self.dir_unchecked(v, e), self.dir_unchecked(v, f))
    }

    /// Every unordered pair of adjacent edges as `(vertex, e, f)` with `e < f`.
    pub fn adjacent_pairs(&self) -> Vec<(VertexId, EdgeId, EdgeId)> {
        let mut out = Vec::new();
        for v in 0..self.num_vertices() {
            let inc = &self.incident[v];
            for i in 0..inc.len() {
                for j in i + 1..inc.len() {
                    let (a, b) = (inc[i].min(inc[j]), inc[i].max(inc[j]));
                    out.push((v, a, b));
                }
            }
        }
        out
    }
}

pub fn normalize_deg(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Direction of a vector in degrees, `[0, 360)`.
pub fn direction_of(d: Point) -> f64 {
    normalize_deg(d.y.atan2(d.x).to_degrees())
}

/// Smaller angle between two directions, in `[0, 180]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Counterclockwise sweep from direction `a` to direction `b`, in `[0, 360)`.
pub fn ccw_offset(a: f64, b: f64) -> f64 {
    normalize_deg(b - a)
}

/// A scan time for every edge, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCover {
    times: Vec<f64>,
}

impl ScanCover {
    pub fn new(times: Vec<f64>) -> Result<Self, ModelError> {
        for (e, &t) in times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(ModelError::InvalidTime { edge: e, time: t });
            }
        }
        Ok(ScanCover { times })
    }

    pub(crate) fn from_times_unchecked(times: Vec<f64>) -> Self {
        ScanCover { times }
    }

    pub fn empty() -> Self {
        ScanCover { times: Vec::new() }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, e: EdgeId) -> f64 {
        self.times[e]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Edge ids sorted by scan time, ties by id.
    pub fn sequence(&self) -> Vec<EdgeId> {
        let mut seq: Vec<EdgeId> = (0..self.times.len()).collect();
        seq.sort_by(|&a, &b| self.times[a].total_cmp(&self.times[b]).then(a.cmp(&b)));
        seq
    }
}

/// One violated separation constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub vertex: VertexId,
    pub e: EdgeId,
    pub f: EdgeId,
    pub required: f64,
    pub actual: f64,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_coverage(inst: &Instance, sc: &ScanCover) -> Result<(), ModelError> {
    if sc.len() != inst.num_edges() {
        return Err(ModelError::MissingEdgeTime {
            expected: inst.num_edges(),
            got: sc.len(),
        });
    }
    Ok(())
}

/// Reports every adjacent pair scanned closer together than its rotation angle.
pub fn validate(inst: &Instance, sc: &ScanCover) -> Result<ValidationReport, ModelError> {
    check_coverage(inst, sc)?;
    let mut violations = Vec::new();
    for (v, e, f) in inst.adjacent_pairs() {
        let required = inst.alpha_at(v, e, f);
        let actual = (sc.time(e) - sc.time(f)).abs();
        if actual < required - ANGLE_TOLERANCE {
            violations.push(Violation {
                vertex: v,
                e,
                f,
                required,
                actual,
                deficit: required - actual,
            });
        }
    }
    Ok(ValidationReport { violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TiePolicy {
    AscendingEdgeId,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedOrder {
    pub sequences: Vec<Vec<EdgeId>>,
    pub tie_policy: TiePolicy,
}

fn induce_unchecked(inst: &Instance, sc: &ScanCover) -> InducedOrder {
    let sequences = (0..inst.num_vertices())
        .map(|v| {
            let mut seq = inst.incident(v).to_vec();
            seq.sort_by(|&a, &b| sc.time(a).total_cmp(&sc.time(b)).then(a.cmp(&b)));
            seq
        })
        .collect();
    InducedOrder {
        sequences,
        tie_policy: TiePolicy::AscendingEdgeId,
    }
}

fn require_valid(inst: &Instance, sc: &ScanCover) -> Result<(), ModelError> {
    let report = validate(inst, sc)?;
    if report.is_ok() {
        Ok(())
    } else {
        Err(ModelError::Infeasible(report.violations))
    }
}

/// Per-vertex scan sequences of a valid schedule.
pub fn induce_order(inst: &Instance, sc: &ScanCover) -> Result<InducedOrder, ModelError> {
    require_valid(inst, sc)?;
    Ok(induce_unchecked(inst, sc))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub makespan: f64,
    pub total_energy: f64,
    pub bottleneck_energy: f64,
    pub per_vertex_rotation: Vec<f64>,
}

impl Evaluation {
    pub fn value(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Makespan => self.makespan,
            Objective::TotalEnergy => self.total_energy,
            Objective::BottleneckEnergy => self.bottleneck_energy,
        }
    }
}

/// Objective values of a valid schedule. Energy comes from the induced order,
/// not from elapsed time.
pub fn evaluate(inst: &Instance, sc: &ScanCover) -> Result<Evaluation, ModelError> {
    require_valid(inst, sc)?;
    Ok(evaluate_unchecked(inst, sc))
}

pub(crate) fn evaluate_unchecked(inst: &Instance, sc: &ScanCover) -> Evaluation {
    let order = induce_unchecked(inst, sc);
    let per_vertex_rotation: Vec<f64> = order
        .sequences
        .iter()
        .enumerate()
        .map(|(v, seq)| seq.windows(2).map(|w| inst.alpha_at(v, w[0], w[1])).sum())
        .collect();
    let makespan = sc.times().iter().copied().fold(0.0, f64::max);
    let total_energy = per_vertex_rotation.iter().sum();
    let bottleneck_energy = per_vertex_rotation.iter().copied().fold(0.0, f64::max);
    Evaluation {
        makespan,
        total_energy,
        bottleneck_energy,
        per_vertex_rotation,
    }
}

/// Total rotation of `v` visiting its edges in the given order.
pub fn rotation_of_sweep(inst: &Instance, v: VertexId, order: &[EdgeId]) -> Result<f64, ModelError> {
    for &e in order {
        if e >= inst.num_edges() || !inst.edge(e).touches(v) {
            return Err(ModelError::NotIncident { vertex: v, edge: e });
        }
    }
    Ok(order.windows(2).map(|w| inst.alpha_at(v, w[0], w[1])).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    #[serde(alias = "ms")]
    Makespan,
    #[serde(alias = "te")]
    TotalEnergy,
    #[serde(alias = "be")]
    BottleneckEnergy,
}

impl Objective {
    pub const ALL: [Objective; 3] = [
        Objective::Makespan,
        Objective::TotalEnergy,
        Objective::BottleneckEnergy,
    ];

    pub fn short(self) -> &'static str {
        match self {
            Objective::Makespan => "ms",
            Objective::TotalEnergy => "te",
            Objective::BottleneckEnergy => "be",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ms" | "makespan" => Ok(Objective::Makespan),
            "te" | "total" | "total-energy" => Ok(Objective::TotalEnergy),
            "be" | "bottleneck" | "bottleneck-energy" => Ok(Objective::BottleneckEnergy),
            other => Err(format!("unknown objective `{other}` (expected ms, te or be)")),
        }
    }
}

/// Directions at a vertex grouped by equal heading and sorted counterclockwise.
#[derive(Debug, Clone)]
pub(crate) struct Fan {
    /// (direction, edges sharing it), sorted by direction.
    pub groups: Vec<(f64, Vec<EdgeId>)>,
    /// `gaps[i]`: counterclockwise angle from group `i` to group `i + 1` (cyclic).
    pub gaps: Vec<f64>,
}

impl Fan {
    pub fn of(inst: &Instance, v: VertexId) -> Fan {
        let mut dirs: Vec<(f64, EdgeId)> = inst
            .incident(v)
            .iter()
            .map(|&e| (inst.dir_unchecked(v, e), e))
            .collect();
        dirs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut groups: Vec<(f64, Vec<EdgeId>)> = Vec::new();
        for (d, e) in dirs {
            match groups.last_mut() {
                Some((gd, es)) if d - *gd <= ANGLE_TOLERANCE => es.push(e),
                _ => groups.push((d, vec![e])),
            }
        }
        // merge across the 0/360 seam
        if groups.len() > 1 {
            let first = groups[0].0;
            let last = groups[groups.len() - 1].0;
            if first + 360.0 - last <= ANGLE_TOLERANCE {
                let (_, tail) = groups.pop().unwrap();
                groups[0].1.extend(tail);
            }
        }
        let k = groups.len();
        let gaps = (0..k)
            .map(|i| {
                if k == 1 {
                    360.0
                } else {
                    ccw_offset(groups[i].0, groups[(i + 1) % k].0)
                }
            })
            .collect();
        Fan { groups, gaps }
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    /// Indices `i` of gaps of maximal size; each starts a Λ-cone at group `i + 1`.
    pub fn max_gap_indices(&self) -> Vec<usize> {
        let m = self.max_gap();
        (0..self.gaps.len())
            .filter(|&i| self.gaps[i] >= m - ANGLE_TOLERANCE)
            .collect()
    }
}

/// Λ-cone data of a vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeInfo {
    pub lambda: f64,
    /// Edges bounding the cone, counterclockwise start first; `None` below degree 2.
    pub bounding_pair: Option<(EdgeId, EdgeId)>,
    pub bisector: f64,
    pub outer_gap: f64,
}

/// Minimum cone at `v` containing every incident edge direction.
///
/// Panics if `v` is not a vertex of `inst`.
pub fn lambda_of(inst: &Instance, v: VertexId) -> ConeInfo {
    match inst.degree(v) {
        0 => ConeInfo {
            lambda: 0.0,
            bounding_pair: None,
            bisector: 0.0,
            outer_gap: 360.0,
        },
        1 => ConeInfo {
            lambda: 0.0,
            bounding_pair: None,
            bisector: inst.dir_unchecked(v, inst.incident(v)[0]),
            outer_gap: 360.0,
        },
        _ => {
            let fan = Fan::of(inst, v);
            let k = fan.groups.len();
            let gap = fan.max_gap_indices()[0];
            let start = (gap + 1) % k;
            let lambda = (360.0 - fan.gaps[gap]).max(0.0);
            let start_dir = fan.groups[start].0;
            ConeInfo {
                lambda,
                bounding_pair: Some((fan.groups[start].1[0], fan.groups[gap].1[0])),
                bisector: normalize_deg(start_dir + lambda / 2.0),
                outer_gap: 360.0 - lambda,
            }
        }
    }
}

/// Greedy earliest-feasible times along a global edge sequence.
///
/// Each edge is scanned as early as the already placed edges at both endpoints
/// allow; per-vertex scan order therefore follows the sequence.
pub fn time_sequence(inst: &Instance, seq: &[EdgeId]) -> Result<ScanCover, ModelError> {
    let m = inst.num_edges();
    if seq.len() != m {
        return Err(ModelError::NotPermutation);
    }
    let mut seen = vec![false; m];
    for &e in seq {
        if e >= m || std::mem::replace(&mut seen[e], true) {
            return Err(ModelError::NotPermutation);
        }
    }
    let mut timer = SequenceTimer::new(inst);
    for &e in seq {
        timer.push(e);
    }
    Ok(ScanCover::from_times_unchecked(timer.times))
}

/// Incremental greedy timing with per-vertex energy bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct SequenceTimer<'a> {
    inst: &'a Instance,
    pub times: Vec<f64>,
    pub last: Vec<Option<EdgeId>>,
    pub rotation: Vec<f64>,
    pub makespan: f64,
    pub total: f64,
    pub bottleneck: f64,
}

impl<'a> SequenceTimer<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        SequenceTimer {
            inst,
            times: vec![0.0; inst.num_edges()],
            last: vec![None; inst.num_vertices()],
            rotation: vec![0.0; inst.num_vertices()],
            makespan: 0.0,
            total: 0.0,
            bottleneck: 0.0,
        }
    }

    /// Time `e` would receive, and the energy it would add at each endpoint.
    pub fn probe(&self, e: EdgeId) -> (f64, f64, f64) {
        let edge = self.inst.edge(e);
        let mut t = 0.0f64;
        let mut add = [0.0; 2];
        for (k, w) in [edge.u, edge.v].into_iter().enumerate() {
            if let Some(l) = self.last[w] {
                let a = self.inst.alpha_at(w, l, e);
                t = t.max(self.times[l] + a);
                add[k] = a;
            }
        }
        (t, add[0], add[1])
    }

    pub fn push(&mut self, e: EdgeId) {
        let (t, au, av) = self.probe(e);
        let edge = self.inst.edge(e);
        self.times[e] = t;
        self.makespan = self.makespan.max(t);
        for (w, a) in [(edge.u, au), (edge.v, av)] {
            self.last[w] = Some(e);
            self.rotation[w] += a;
            self.total += a;
            self.bottleneck = self.bottleneck.max(self.rotation[w]);
        }
    }

    pub fn value(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Makespan => self.makespan,
            Objective::TotalEnergy => self.total,
            Objective::BottleneckEnergy => self.bottleneck,
        }
    }

    /// Objective after hypothetically appending `e`.
    pub fn value_after(&self, e: EdgeId, objective: Objective) -> f64 {
        let (t, au, av) = self.probe(e);
        let edge = self.inst.edge(e);
        match objective {
            Objective::Makespan => self.makespan.max(t),
            Objective::TotalEnergy => self.total + au + av,
            Objective::BottleneckEnergy => self
                .bottleneck
                .max(self.rotation[edge.u] + au)
                .max(self.rotation[edge.v] + av),
        }
    }
}

/// Objective of the greedy timing of a sequence, without building a schedule.
pub(crate) fn sequence_value(inst: &Instance, seq: &[EdgeId], objective: Objective) -> f64 {
    let mut timer = SequenceTimer::new(inst);
    for &e in seq {
        timer.push(e);
    }
    timer.value(objective)
}
