use super::{Budget, Meter, SolveResult};
use crate::error::{Error, Result};
use crate::model::{evaluate_unchecked, time_sequence, Instance, Objective, ScanCover};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 9;

/// Enumerates every global edge sequence with greedy timing.
pub fn brute_force(inst: &Instance, objective: Objective, budget: Budget) -> Result<SolveResult> {
    brute_force_with_cap(inst, objective, budget, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_with_cap(
    inst: &Instance,
    objective: Objective,
    budget: Budget,
    cap: usize,
) -> Result<SolveResult> {
    let m = inst.num_edges();
    if m > cap {
        return Err(Error::TooLarge { edges: m, cap });
    }
    let mut meter = Meter::new(budget);
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best: Option<(f64, ScanCover)> = None;
    loop {
        if !meter.tick() {
            break;
        }
        let sc = time_sequence(inst, &perm)?;
        let value = evaluate_unchecked(inst, &sc).value(objective);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, sc));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (value, schedule) = best.unwrap_or_else(|| {
        // budget of zero nodes: fall back to the identity order
        let sc = time_sequence(inst, &perm).expect("identity is a permutation");
        (evaluate_unchecked(inst, &sc).value(objective), sc)
    });
    Ok(SolveResult {
        schedule,
        value,
        objective,
        proven_optimal: !meter.exhausted,
        nodes_explored: meter.nodes,
        elapsed: meter.elapsed(),
    })
}

/// Advances to the next lexicographic permutation; false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
