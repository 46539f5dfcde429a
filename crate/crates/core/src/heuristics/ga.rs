use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{decode_and_time, greedy_sequence};
use crate::error::{Error, Result};
use crate::model::{sequence_value, EdgeId, Instance, Objective, ScanCover};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaParams {
    pub population: usize,
    pub elite_fraction: f64,
    pub mutation_fraction: f64,
    pub greedy_mutation_prob: f64,
    pub per_edge_mutation_prob: f64,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population: 200,
            elite_fraction: 0.10,
            mutation_fraction: 0.03,
            greedy_mutation_prob: 0.60,
            per_edge_mutation_prob: 0.03,
            max_generations: 300,
            stall_generations: 60,
            time_limit: None,
            seed: 0,
        }
    }
}

impl GaParams {
    fn check(&self) -> Result<()> {
        let fractions = [
            self.elite_fraction,
            self.mutation_fraction,
            self.greedy_mutation_prob,
            self.per_edge_mutation_prob,
        ];
        if self.population == 0 || fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::InvalidParams(
                "population must be positive and fractions must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaOutcome {
    pub schedule: ScanCover,
    pub value: f64,
    /// Best-ever value after the initial population and after each generation.
    pub trace: Vec<f64>,
    pub generations: usize,
}

#[derive(Clone)]
struct Individual {
    keys: Vec<f64>,
    value: f64,
}

fn decode(keys: &[f64]) -> Vec<EdgeId> {
    let mut seq: Vec<EdgeId> = (0..keys.len()).collect();
    seq.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    seq
}

/// Keys in [0, 1) whose ascending order is `seq`.
fn encode(seq: &[EdgeId], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..seq.len()).map(|_| rng.gen::<f64>()).collect();
    vals.sort_by(f64::total_cmp);
    let mut keys = vec![0.0; seq.len()];
    for (i, &e) in seq.iter().enumerate() {
        keys[e] = vals[i];
    }
    repair(&mut keys, rng);
    keys
}

/// Redraws duplicate keys inside the gap to the next larger key, keeping the
/// decoded order (ties were broken by edge id).
fn repair(keys: &mut [f64], rng: &mut ChaCha8Rng) {
    let order = decode(keys);
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && keys[order[j]] == keys[order[i]] {
            j += 1;
        }
        if j - i > 1 {
            let lo = keys[order[i]];
            let hi = if j < order.len() { keys[order[j]] } else { 1.0 };
            let mut fresh: Vec<f64> = (i + 1..j).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
            fresh.sort_by(f64::total_cmp);
            for (k, &e) in order[i + 1..j].iter().enumerate() {
                keys[e] = fresh[k];
            }
            // a draw can collide at the floating-point level; fall back to the gap midpoints
            let ok = (i..j).all(|a| a + 1 >= j || keys[order[a]] < keys[order[a + 1]]) && (j >= order.len() || keys[order[j - 1]] < hi);
            if !ok {
                let step = (hi - lo) / (j - i) as f64;
                for (k, &e) in order[i..j].iter().enumerate() {
                    keys[e] = lo + step * k as f64;
                }
            }
        }
        i = j;
    }
}

/// Uniform per-edge crossover.
fn crossover(a: &[f64], b: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| if rng.gen::<bool>() { x } else { y }).collect()
}

fn roulette(weights: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let mut r = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if r < w {
            return i;
        }
        r -= w;
    }
    weights.len() - 1
}

/// Random-key genetic algorithm.
pub fn ga(inst: &Instance, objective: Objective, params: &GaParams) -> Result<GaOutcome> {
    params.check()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let m = inst.num_edges();
    let eval = |keys: &[f64]| sequence_value(inst, &decode(keys), objective);

    let mut pop: Vec<Individual> = (0..params.population)
        .map(|_| {
            let mut order: Vec<EdgeId> = (0..m).collect();
            order.shuffle(&mut rng);
            let seq = greedy_sequence(inst, objective, &order);
            let keys = encode(&seq, &mut rng);
            let value = eval(&keys);
            Individual { keys, value }
        })
        .collect();
    pop.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut best = pop[0].clone();
    let mut trace = vec![best.value];
    let mut stall = 0;
    let mut generations = 0;
    let elites = ((params.elite_fraction * params.population as f64).ceil() as usize).clamp(1, params.population);
    let mutants = (params.mutation_fraction * params.population as f64).round() as usize;

    while generations < params.max_generations && stall < params.stall_generations {
        if params.time_limit.is_some_and(|l| start.elapsed() > l) {
            break;
        }
        let weights: Vec<f64> = pop.iter().map(|ind| 1.0 / (1.0 + ind.value)).collect();
        let total: f64 = weights.iter().sum();
        let mut next: Vec<Individual> = pop[..elites].to_vec();
        while next.len() < params.population {
            let a = roulette(&weights, total, &mut rng);
            let b = roulette(&weights, total, &mut rng);
            let mut keys = crossover(&pop[a].keys, &pop[b].keys, &mut rng);
            repair(&mut keys, &mut rng);
            let value = eval(&keys);
            next.push(Individual { keys, value });
        }
        let candidates: Vec<usize> = (elites..next.len()).collect();
        for &i in candidates.choose_multiple(&mut rng, mutants.min(candidates.len())) {
            let ind = &mut next[i];
            if rng.gen::<f64>() < params.greedy_mutation_prob {
                let seq = greedy_sequence(inst, objective, &decode(&ind.keys));
                // reuse the individual's own key values in the new order
                let mut vals = ind.keys.clone();
                vals.sort_by(f64::total_cmp);
                for (k, &e) in seq.iter().enumerate() {
                    ind.keys[e] = vals[k];
                }
            } else {
                for key in ind.keys.iter_mut() {
                    if rng.gen::<f64>() < params.per_edge_mutation_prob {
                        *key = rng.gen::<f64>();
                    }
                }
            }
            repair(&mut ind.keys, &mut rng);
            ind.value = eval(&ind.keys);
        }
        next.sort_by(|a, b| a.value.total_cmp(&b.value));
        pop = next;
        generations += 1;
        if pop[0].value < best.value {
            best = pop[0].clone();
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(best.value);
    }
    let schedule = decode_and_time(inst, &decode(&best.keys))?;
    Ok(GaOutcome {
        schedule,
        value: best.value,
        trace,
        generations,
    })
}
