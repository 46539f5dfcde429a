//! Rotation-scheme approximations for the energy objectives.
//!
//! On a bipartite graph both sides start with opposite headings and rotate in
//! the same sense at unit speed; the two endpoints of an edge face each other
//! at the same moment, which becomes its scan time. General graphs are split
//! into bipartite layers via a colouring and the layers are scheduled one after
//! another.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    direction_of, evaluate_unchecked, normalize_deg, EdgeId, Instance, Objective, Rotation,
    ScanCover, VertexId,
};

/// Side (1 or 2) of every vertex. Isolated vertices sit on side 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BipartitePartition {
    pub side: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub color: Vec<usize>,
    pub k: usize,
}

/// Components (lists of vertices) of the graph restricted to `edges`.
fn components(n: usize, inst: &Instance, edges: &[EdgeId]) -> (Vec<Vec<(VertexId, EdgeId)>>, Vec<usize>) {
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
    for &e in edges {
        let ed = inst.edge(e);
        adj[ed.u].push((ed.v, e));
        adj[ed.v].push((ed.u, e));
    }
    (adj, vec![usize::MAX; n])
}

/// BFS two-colouring; side 1 holds the smallest vertex id of each component.
pub fn bipartition(inst: &Instance) -> Result<BipartitePartition> {
    let all: Vec<EdgeId> = (0..inst.num_edges()).collect();
    two_color(inst, &all)
}

fn two_color(inst: &Instance, edges: &[EdgeId]) -> Result<BipartitePartition> {
    let n = inst.num_vertices();
    let (adj, mut side) = components(n, inst, edges);
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for s in 0..n {
        if side[s] != usize::MAX {
            continue;
        }
        side[s] = 1;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if side[w] == usize::MAX {
                    side[w] = 3 - side[v];
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                } else if side[w] == side[v] {
                    return Err(Error::NotBipartite {
                        cycle: odd_cycle(v, w, &parent, &depth),
                    });
                }
            }
        }
    }
    Ok(BipartitePartition {
        side: side.into_iter().map(|s| s as u8).collect(),
    })
}

fn odd_cycle(a: VertexId, b: VertexId, parent: &[usize], depth: &[usize]) -> Vec<VertexId> {
    let (mut x, mut y) = (a, b);
    let mut left = vec![x];
    let mut right = vec![y];
    while depth[x] > depth[y] {
        x = parent[x];
        left.push(x);
    }
    while depth[y] > depth[x] {
        y = parent[y];
        right.push(y);
    }
    while x != y {
        x = parent[x];
        y = parent[y];
        left.push(x);
        right.push(y);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

fn check_partition(inst: &Instance, part: &BipartitePartition) -> Result<()> {
    if part.side.len() != inst.num_vertices() {
        return Err(Error::InvalidPartition(format!(
            "{} sides for {} vertices",
            part.side.len(),
            inst.num_vertices()
        )));
    }
    for (i, e) in inst.edges().iter().enumerate() {
        let (a, b) = (part.side[e.u], part.side[e.v]);
        if !matches!((a, b), (1, 2) | (2, 1)) {
            return Err(Error::InvalidPartition(format!("edge {i} ({}, {}) has sides {a} and {b}", e.u, e.v)));
        }
    }
    Ok(())
}

/// Scan times of the rotation scheme: side 1 starts at `heading`, side 2 at
/// `heading + 180`, everyone turning in `rotation`.
pub fn rotation_scheme(
    inst: &Instance,
    part: &BipartitePartition,
    heading: f64,
    rotation: Rotation,
) -> Result<ScanCover> {
    check_partition(inst, part)?;
    let times = inst
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = if part.side[e.u] == 1 { (e.u, e.v) } else { (e.v, e.u) };
            let d = direction_of(inst.point(b).sub(inst.point(a)));
            match rotation {
                Rotation::Cw => normalize_deg(heading - d),
                Rotation::Ccw => normalize_deg(d - heading),
            }
        })
        .collect();
    Ok(ScanCover::from_times_unchecked(times))
}

/// Clockwise scheme with side 1 starting at 0° and side 2 at 180°.
pub fn two_approx(inst: &Instance, part: &BipartitePartition) -> Result<ScanCover> {
    rotation_scheme(inst, part, 0.0, Rotation::Cw)
}

/// Direction from side 1 towards side 2 of a separating line, if one exists.
pub fn separating_direction(inst: &Instance, part: &BipartitePartition) -> Option<f64> {
    let active: Vec<VertexId> = (0..inst.num_vertices()).filter(|&v| inst.degree(v) > 0).collect();
    let mut crit: Vec<f64> = Vec::new();
    for (i, &a) in active.iter().enumerate() {
        for &b in &active[i + 1..] {
            let d = inst.point(b).sub(inst.point(a));
            if d.x != 0.0 || d.y != 0.0 {
                let t = direction_of(d);
                crit.push(normalize_deg(t + 90.0));
                crit.push(normalize_deg(t + 270.0));
            }
        }
    }
    if crit.is_empty() {
        crit.push(0.0);
    }
    crit.sort_by(f64::total_cmp);
    let k = crit.len();
    let margin = |n: f64| -> f64 {
        let (s, c) = n.to_radians().sin_cos();
        let proj = |v: VertexId| inst.point(v).x * c + inst.point(v).y * s;
        let hi1 = active.iter().filter(|&&v| part.side[v] == 1).map(|&v| proj(v)).fold(f64::NEG_INFINITY, f64::max);
        let lo2 = active.iter().filter(|&&v| part.side[v] == 2).map(|&v| proj(v)).fold(f64::INFINITY, f64::min);
        lo2 - hi1
    };
    (0..k)
        .map(|i| {
            let next = if i + 1 < k { crit[i + 1] } else { crit[0] + 360.0 };
            normalize_deg((crit[i] + next) / 2.0)
        })
        .map(|n| (margin(n), n))
        .filter(|(m, _)| *m > 0.0)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, n)| n)
}

/// Optimal energy schedule for a line-separable bipartite graph: both sides
/// start facing away from the separating line, so each vertex sweeps its cone once.
pub fn line_separable_cover(inst: &Instance, part: &BipartitePartition) -> Result<ScanCover> {
    check_partition(inst, part)?;
    let n = separating_direction(inst, part)
        .ok_or_else(|| Error::InvalidPartition("sides are not separable by a line".into()))?;
    rotation_scheme(inst, part, normalize_deg(n + 180.0), Rotation::Cw)
}

/// DSATUR colouring; ties by saturation, then degree, then smallest id.
pub fn dsatur(inst: &Instance) -> Coloring {
    let n = inst.num_vertices();
    let nbrs: Vec<Vec<VertexId>> = (0..n).map(|v| inst.neighbors(v).collect()).collect();
    let mut color = vec![usize::MAX; n];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut sat = vec![0usize; n];
    let mut k = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == usize::MAX)
            .max_by(|&a, &b| {
                sat[a]
                    .cmp(&sat[b])
                    .then(nbrs[a].len().cmp(&nbrs[b].len()))
                    .then(b.cmp(&a))
            })
            .unwrap();
        let c = (0..).find(|&c| !seen[v].get(c).copied().unwrap_or(false)).unwrap();
        color[v] = c;
        k = k.max(c + 1);
        for &w in &nbrs[v] {
            if seen[w].len() <= c {
                seen[w].resize(c + 1, false);
            }
            if !seen[w][c] {
                seen[w][c] = true;
                sat[w] += 1;
            }
        }
    }
    Coloring { color, k }
}

/// One bipartite layer of an edge cover.
#[derive(Debug, Clone)]
pub struct Layer {
    /// Original edge ids, ascending.
    pub edges: Vec<EdgeId>,
    pub instance: Instance,
    pub partition: BipartitePartition,
}

fn bits_for(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Splits the edges by the lowest bit in which the endpoint colours differ.
pub fn bipartite_cover(inst: &Instance, coloring: &Coloring) -> Result<Vec<Layer>> {
    if coloring.color.len() != inst.num_vertices() {
        return Err(Error::ImproperColoring("wrong number of vertices".into()));
    }
    for (i, e) in inst.edges().iter().enumerate() {
        if coloring.color[e.u] == coloring.color[e.v] {
            return Err(Error::ImproperColoring(format!("edge {i} is monochromatic")));
        }
        if coloring.color[e.u] >= coloring.k.max(1) || coloring.color[e.v] >= coloring.k.max(1) {
            return Err(Error::ImproperColoring(format!("edge {i} uses a colour outside [0, k)")));
        }
    }
    let layers = bits_for(coloring.k);
    let mut buckets: Vec<Vec<EdgeId>> = vec![Vec::new(); layers];
    for (i, e) in inst.edges().iter().enumerate() {
        let diff = coloring.color[e.u] ^ coloring.color[e.v];
        buckets[diff.trailing_zeros() as usize].push(i);
    }
    buckets
        .into_iter()
        .map(|edges| {
            let partition = two_color(inst, &edges).expect("a colour bit always splits a layer");
            let sub = Instance::new(
                inst.dimension(),
                inst.points().to_vec(),
                edges.iter().map(|&e| (inst.edge(e).u, inst.edge(e).v)).collect(),
            )?;
            Ok(Layer {
                edges,
                instance: sub,
                partition,
            })
        })
        .collect()
}

const PHASE_HEADINGS: [f64; 8] = [0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0];

/// Colour, split into bipartite layers, and schedule the layers one after
/// another. Later layers greedily pick the heading, sense and side order that
/// minimise the objective of the partial schedule.
pub fn log_k_approx(inst: &Instance, objective: Objective) -> Result<ScanCover> {
    let coloring = dsatur(inst);
    let layers = bipartite_cover(inst, &coloring)?;
    let m = inst.num_edges();
    let mut times = vec![0.0; m];
    let mut done = vec![false; m];
    for (i, layer) in layers.iter().enumerate() {
        if i == 0 {
            let sc = two_approx(&layer.instance, &layer.partition)?;
            for (j, &e) in layer.edges.iter().enumerate() {
                times[e] = sc.time(j);
                done[e] = true;
            }
            continue;
        }
        let swapped = BipartitePartition {
            side: layer.partition.side.iter().map(|&s| 3 - s).collect(),
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for part in [&layer.partition, &swapped] {
            for rotation in [Rotation::Cw, Rotation::Ccw] {
                for &h in &PHASE_HEADINGS {
                    let local = rotation_scheme(&layer.instance, part, h, rotation)?;
                    let offset = phase_offset(inst, &layer.edges, &local, &times, &done);
                    let mut trial = times.clone();
                    for (j, &e) in layer.edges.iter().enumerate() {
                        trial[e] = local.time(j) + offset;
                    }
                    let value = partial_value(inst, &trial, &done, &layer.edges, objective);
                    if best.as_ref().map_or(true, |(b, _)| value < *b) {
                        best = Some((value, trial));
                    }
                }
            }
        }
        times = best.unwrap().1;
        for &e in &layer.edges {
            done[e] = true;
        }
    }
    Ok(ScanCover::from_times_unchecked(times))
}

/// Alias of [`log_k_approx`].
pub fn apx_general(inst: &Instance, objective: Objective) -> Result<ScanCover> {
    log_k_approx(inst, objective)
}

/// Smallest shift placing every new edge at least α after each adjacent scheduled edge.
fn phase_offset(inst: &Instance, edges: &[EdgeId], local: &ScanCover, times: &[f64], done: &[bool]) -> f64 {
    let mut offset = 0.0f64;
    for (j, &e) in edges.iter().enumerate() {
        let ed = inst.edge(e);
        for v in [ed.u, ed.v] {
            for &f in inst.incident(v) {
                if done[f] {
                    offset = offset.max(times[f] + inst.alpha_at(v, f, e) - local.time(j));
                }
            }
        }
    }
    offset
}

fn partial_value(inst: &Instance, times: &[f64], done: &[bool], extra: &[EdgeId], objective: Objective) -> f64 {
    let mut keep: Vec<EdgeId> = (0..inst.num_edges()).filter(|&e| done[e]).collect();
    keep.extend_from_slice(extra);
    keep.sort_unstable();
    let sub = Instance::new(
        inst.dimension(),
        inst.points().to_vec(),
        keep.iter().map(|&e| (inst.edge(e).u, inst.edge(e).v)).collect(),
    )
    .expect("subgraph of a valid instance");
    let sc = ScanCover::from_times_unchecked(keep.iter().map(|&e| times[e]).collect());
    evaluate_unchecked(&sub, &sc).value(objective)
}
