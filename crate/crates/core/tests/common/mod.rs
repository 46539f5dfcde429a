//! Seeded instance suites shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scancover::instances::{gen_celestial, gen_line, gen_random, CelestialParams, RandomParams};
use scancover::Instance;

pub const MAX_ORACLE_EDGES: usize = 8;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe)
}

/// 50 instances with 1 to 8 edges, cycling random, celestial and line generators.
pub fn oracle_suite() -> Vec<Instance> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < 50 {
        seed += 1;
        let kind = out.len() % 3;
        let inst = match kind {
            0 => gen_random(RandomParams { n: 3 + (seed % 4) as usize, p: 0.5, seed }),
            1 => gen_celestial(CelestialParams::new(3 + (seed % 4) as usize, seed)),
            _ => gen_line(RandomParams { n: 3 + (seed % 5) as usize, p: 0.5, seed }),
        }
        .unwrap();
        if (1..=MAX_ORACLE_EDGES).contains(&inst.num_edges()) {
            out.push(inst);
        }
    }
    out
}

/// Random 1D instances with `2 <= n <= 10`.
pub fn line_suite(count: usize) -> Vec<Instance> {
    (0..count as u64)
        .map(|seed| {
            let n = 2 + (seed % 9) as usize;
            let p = [0.2, 0.35, 0.5, 0.7][(seed % 4) as usize];
            gen_line(RandomParams { n, p, seed: 1000 + seed }).unwrap()
        })
        .collect()
}

/// Random points with a random two-colouring and cross edges only.
pub fn bipartite_instance(seed: u64, n: usize, p: f64) -> Instance {
    let mut r = rng(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (r.gen(), r.gen())).collect();
    let side: Vec<bool> = (0..n).map(|_| r.gen()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if side[i] != side[j] && r.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Instance::plane(&pts, edges).unwrap()
}

/// Left half-plane versus right half-plane, cross edges only.
pub fn line_separable_instance(seed: u64, n: usize, p: f64, max_edges: usize) -> Instance {
    let mut r = rng(seed.wrapping_add(77));
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x: f64 = r.gen_range(0.1..1.0);
            (if i % 2 == 0 { -x } else { x }, r.gen_range(-1.0..1.0))
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if i % 2 != j % 2 && edges.len() < max_edges && r.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1));
    }
    Instance::plane(&pts, edges).unwrap()
}

/// Count of vertices with neighbours strictly on both sides, computed directly.
pub fn two_sided_count(inst: &Instance) -> usize {
    (0..inst.num_vertices())
        .filter(|&v| {
            let x = inst.point(v).x;
            let mut left = false;
            let mut right = false;
            for e in inst.edges() {
                let w = if e.u == v { e.v } else if e.v == v { e.u } else { continue };
                let xw = inst.point(w).x;
                left |= xw < x;
                right |= xw > x;
            }
            left && right
        })
        .count()
}
