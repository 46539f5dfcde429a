//! Exact solvers for small instances.
//!
//! Every feasible schedule, sorted by time, yields a global edge sequence
//! whose greedy earliest timing is no worse in any objective. Searching over
//! sequences is therefore complete for all three objectives.

mod bnb;
mod brute;
mod lcover;

use std::time::{Duration, Instant};

use serde::Serialize;

pub use bnb::{branch_and_bound, covering_walk};
pub use brute::{brute_force, brute_force_with_cap, DEFAULT_BRUTE_FORCE_CAP};
pub use lcover::{lambda_cover_exists, lambda_cover_with, LambdaCoverResult};

use crate::model::{Objective, ScanCover};

/// Search limits. `None` disables a limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub nodes: Option<u64>,
    pub time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: Some(100_000_000),
            time: Some(Duration::from_secs(60)),
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { nodes: None, time: None }
    }

    pub fn nodes(n: u64) -> Self {
        Budget { nodes: Some(n), time: None }
    }

    pub fn seconds(s: f64) -> Self {
        Budget {
            nodes: None,
            time: Some(Duration::from_secs_f64(s)),
        }
    }
}

/// Node and clock accounting shared by the searches.
#[derive(Debug)]
pub(crate) struct Meter {
    budget: Budget,
    start: Instant,
    pub nodes: u64,
    pub exhausted: bool,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        Meter {
            budget,
            start: Instant::now(),
            nodes: 0,
            exhausted: false,
        }
    }

    /// Counts one node; returns false once the budget is spent.
    pub fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.budget.nodes.is_some_and(|n| self.nodes > n) {
            self.exhausted = true;
        } else if self.nodes % 1024 == 0 {
            if let Some(t) = self.budget.time {
                if self.start.elapsed() > t {
                    self.exhausted = true;
                }
            }
        }
        !self.exhausted
    }

    /// Like [`Meter::tick`], but always consults the clock; for coarse steps.
    pub fn tick_coarse(&mut self) -> bool {
        if self.tick() && self.budget.time.is_some_and(|t| self.start.elapsed() > t) {
            self.exhausted = true;
        }
        !self.exhausted
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub schedule: ScanCover,
    pub value: f64,
    pub objective: Objective,
    pub proven_optimal: bool,
    pub nodes_explored: u64,
    pub elapsed: f64,
}
