use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{decode_and_time, greedy_sequence};
use crate::error::{Error, Result};
use crate::model::{sequence_value, Instance, Objective, ScanCover};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaParams {
    /// `None` uses the mean positive rotation angle over adjacent pairs.
    pub initial_temperature: Option<f64>,
    pub cooling: f64,
    /// Steps without a new best before the temperature is raised.
    pub reheat_after: u64,
    pub reheat_factor: f64,
    pub max_steps: u64,
    /// Steps without a new best before a chain stops.
    pub stop_after: u64,
    pub chains: usize,
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            initial_temperature: None,
            cooling: 0.999,
            reheat_after: 5000,
            reheat_factor: 2.0,
            max_steps: 50_000,
            stop_after: 20_000,
            chains: 1,
            time_limit: None,
            seed: 0,
        }
    }
}

/// Probability of moving from value `current` to `candidate` at temperature `t`.
pub fn boltzmann_acceptance(current: f64, candidate: f64, t: f64) -> f64 {
    let delta = candidate - current;
    if delta <= 0.0 {
        1.0
    } else if t <= 0.0 {
        0.0
    } else {
        (-delta / t).exp()
    }
}

fn mean_positive_angle(inst: &Instance) -> f64 {
    let (sum, count) = inst
        .adjacent_pairs()
        .into_iter()
        .map(|(v, e, f)| inst.alpha_at(v, e, f))
        .filter(|&a| a > 0.0)
        .fold((0.0, 0usize), |(s, c), a| (s + a, c + 1));
    if count == 0 {
        1.0
    } else {
        sum / count as f64
    }
}

fn chain(inst: &Instance, objective: Objective, p: &SaParams, seed: u64, t0: f64) -> (f64, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = inst.num_edges();
    let identity: Vec<usize> = (0..m).collect();
    let mut seq = greedy_sequence(inst, objective, &identity);
    let mut cur = sequence_value(inst, &seq, objective);
    let mut best = (cur, seq.clone());
    if m < 2 {
        return best;
    }
    let start = Instant::now();
    let mut t = t0;
    let mut since_best = 0u64;
    let mut since_reheat = 0u64;
    for step in 0..p.max_steps {
        if since_best >= p.stop_after {
            break;
        }
        if step % 256 == 0 && p.time_limit.is_some_and(|l| start.elapsed() > l) {
            break;
        }
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        seq.swap(i, j);
        let cand = sequence_value(inst, &seq, objective);
        let accept = rng.gen::<f64>() < boltzmann_acceptance(cur, cand, t);
        if accept {
            cur = cand;
        } else {
            seq.swap(i, j);
        }
        if cur < best.0 {
            best = (cur, seq.clone());
            since_best = 0;
            since_reheat = 0;
        } else {
            since_best += 1;
            since_reheat += 1;
        }
        t *= p.cooling;
        if since_reheat >= p.reheat_after {
            t *= p.reheat_factor;
            since_reheat = 0;
        }
    }
    best
}

/// Simulated annealing over swap moves, best of `chains` independent chains.
pub fn sa(inst: &Instance, objective: Objective, params: &SaParams) -> Result<ScanCover> {
    if !(params.cooling > 0.0 && params.cooling < 1.0) || params.chains == 0 || params.reheat_factor < 1.0 {
        return Err(Error::InvalidParams(
            "need 0 < cooling < 1, reheat_factor >= 1 and at least one chain".into(),
        ));
    }
    let t0 = params.initial_temperature.unwrap_or_else(|| mean_positive_angle(inst));
    if t0 < 0.0 {
        return Err(Error::InvalidParams("initial temperature must be non-negative".into()));
    }
    let results: Vec<(f64, Vec<usize>)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..params.chains)
            .map(|c| {
                let seed = params.seed.wrapping_add(c as u64);
                s.spawn(move || chain(inst, objective, params, seed, t0))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("annealing chain panicked")).collect()
    });
    let best = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one chain");
    decode_and_time(inst, &best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_random, RandomParams};
    use crate::model::{evaluate, validate};

    #[test]
    fn acceptance_rule() {
        assert_eq!(boltzmann_acceptance(10.0, 10.0, 5.0), 1.0);
        assert_eq!(boltzmann_acceptance(10.0, 9.0, 0.0), 1.0);
        assert_eq!(boltzmann_acceptance(10.0, 11.0, 0.0), 0.0);
        assert!(boltzmann_acceptance(10.0, 11.0, 1e-300) < 1e-100);
        assert!((boltzmann_acceptance(10.0, 12.0, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn seeded_runs_reproduce() {
        let inst = gen_random(RandomParams { n: 7, p: 0.5, seed: 4 }).unwrap();
        let p = SaParams { max_steps: 3000, chains: 2, seed: 9, ..SaParams::default() };
        let a = sa(&inst, Objective::TotalEnergy, &p).unwrap();
        let b = sa(&inst, Objective::TotalEnergy, &p).unwrap();
        assert_eq!(a, b);
        assert!(validate(&inst, &a).unwrap().is_ok());
        let greedy_value = sequence_value(&inst, &greedy_sequence(&inst, Objective::TotalEnergy, &(0..inst.num_edges()).collect::<Vec<_>>()), Objective::TotalEnergy);
        assert!(evaluate(&inst, &a).unwrap().total_energy <= greedy_value + 1e-9);
    }

    #[test]
    fn zero_temperature_never_worsens() {
        let inst = gen_random(RandomParams { n: 6, p: 0.7, seed: 2 }).unwrap();
        let p = SaParams { initial_temperature: Some(0.0), max_steps: 500, ..SaParams::default() };
        let sc = sa(&inst, Objective::Makespan, &p).unwrap();
        assert!(validate(&inst, &sc).unwrap().is_ok());
    }
}
