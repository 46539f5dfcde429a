//! Sequence-based heuristics. Every candidate is a global edge order timed
//! greedily, so all outputs are feasible by construction.

mod ga;
mod sa;

pub use ga::{ga, GaOutcome, GaParams};
pub use sa::{boltzmann_acceptance, sa, SaParams};

use crate::error::Result;
use crate::model::{sequence_value, time_sequence, EdgeId, Instance, Objective, ScanCover, SequenceTimer};

/// Greedy earliest-feasible timing of a full edge sequence.
pub fn decode_and_time(inst: &Instance, sequence: &[EdgeId]) -> Result<ScanCover> {
    Ok(time_sequence(inst, sequence)?)
}

/// Starts with the first edge of `initial_order`, then repeatedly appends the
/// edge whose addition raises the partial objective least (earliest in
/// `initial_order` on ties).
pub fn greedy_sequence(inst: &Instance, objective: Objective, initial_order: &[EdgeId]) -> Vec<EdgeId> {
    let m = initial_order.len();
    let mut timer = SequenceTimer::new(inst);
    let mut used = vec![false; m];
    let mut seq = Vec::with_capacity(m);
    if m == 0 {
        return seq;
    }
    used[0] = true;
    timer.push(initial_order[0]);
    seq.push(initial_order[0]);
    for _ in 1..m {
        let mut best: Option<(f64, usize)> = None;
        for (pos, &e) in initial_order.iter().enumerate() {
            if used[pos] {
                continue;
            }
            let v = timer.value_after(e, objective);
            if best.map_or(true, |(b, _)| v < b) {
                best = Some((v, pos));
            }
        }
        let (_, pos) = best.unwrap();
        used[pos] = true;
        timer.push(initial_order[pos]);
        seq.push(initial_order[pos]);
    }
    seq
}

pub fn greedy(inst: &Instance, objective: Objective, initial_order: &[EdgeId]) -> Result<ScanCover> {
    check_perm(inst, initial_order)?;
    decode_and_time(inst, &greedy_sequence(inst, objective, initial_order))
}

fn check_perm(inst: &Instance, seq: &[EdgeId]) -> Result<()> {
    // timing validates the permutation
    time_sequence(inst, seq).map(|_| ()).map_err(Into::into)
}

/// Best-improvement swap search. Returns the final schedule and the objective
/// after each applied swap (starting with the start value).
pub fn ils_with_trace(inst: &Instance, objective: Objective, start: &ScanCover) -> Result<(ScanCover, Vec<f64>)> {
    let mut seq = start.sequence();
    check_perm(inst, &seq)?;
    let mut current = sequence_value(inst, &seq, objective);
    let mut trace = vec![current];
    let m = seq.len();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..m {
            for j in i + 1..m {
                seq.swap(i, j);
                let v = sequence_value(inst, &seq, objective);
                seq.swap(i, j);
                if v < current && best.map_or(true, |(b, _, _)| v < b) {
                    best = Some((v, i, j));
                }
            }
        }
        match best {
            Some((v, i, j)) => {
                seq.swap(i, j);
                current = v;
                trace.push(v);
            }
            None => break,
        }
    }
    Ok((decode_and_time(inst, &seq)?, trace))
}

pub fn ils(inst: &Instance, objective: Objective, start: &ScanCover) -> Result<ScanCover> {
    ils_with_trace(inst, objective, start).map(|(sc, _)| sc)
}
