//! Solver dispatch, run records and the CSV benchmark harness.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::approx::{bipartition, line_separable_cover, log_k_approx, separating_direction, two_approx};
use crate::error::{Error, Result};
use crate::exact::{branch_and_bound, brute_force, Budget};
use crate::heuristics::{ga, greedy, ils, sa, GaParams, SaParams};
use crate::instances::{gen_celestial, gen_line, gen_random, read_instance, CelestialParams, RandomParams};
use crate::model::{evaluate, Instance, Objective, ScanCover};
use crate::onedim;

pub const CSV_SCHEMA: &str = "scancover-bench v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Oned,
    BruteForce,
    Bnb,
    TwoApprox,
    LogK,
    Greedy,
    Ils,
    Sa,
    Ga,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Oned,
        Algorithm::BruteForce,
        Algorithm::Bnb,
        Algorithm::TwoApprox,
        Algorithm::LogK,
        Algorithm::Greedy,
        Algorithm::Ils,
        Algorithm::Sa,
        Algorithm::Ga,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Oned => "oned",
            Algorithm::BruteForce => "bf",
            Algorithm::Bnb => "bnb",
            Algorithm::TwoApprox => "two-approx",
            Algorithm::LogK => "log-k",
            Algorithm::Greedy => "greedy",
            Algorithm::Ils => "ils",
            Algorithm::Sa => "sa",
            Algorithm::Ga => "ga",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let alias = match s.to_ascii_lowercase().as_str() {
            "brute-force" | "brute" => "bf",
            "apx" | "logk" => "log-k",
            "2approx" | "two_approx" => "two-approx",
            other => return Algorithm::ALL.into_iter().find(|a| a.name() == other).ok_or_else(|| {
                let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
            }),
        };
        alias.parse()
    }
}

/// Budget as given on the command line: `30s` (wall clock), `5000` or
/// `5000n` (search nodes), or `none`.
pub fn parse_budget(s: &str) -> std::result::Result<Budget, String> {
    let s = s.trim();
    if s == "none" {
        return Ok(Budget::unlimited());
    }
    if let Some(secs) = s.strip_suffix('s') {
        let v: f64 = secs.parse().map_err(|_| format!("bad time budget `{s}`"))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(format!("bad time budget `{s}`"));
        }
        return Ok(Budget::seconds(v));
    }
    let digits = s.strip_suffix('n').unwrap_or(s);
    digits.parse().map(Budget::nodes).map_err(|_| format!("bad budget `{s}` (use e.g. 30s, 5000n or none)"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub budget: Budget,
    pub seed: u64,
    /// Named overrides for heuristic parameters, e.g. `population=50`.
    pub params: BTreeMap<String, String>,
    /// Node-counted budgets only; heuristics ignore wall-clock limits.
    pub deterministic: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: Budget::default(), seed: 0, params: BTreeMap::new(), deterministic: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub schedule: ScanCover,
    pub value: f64,
    pub proven_optimal: bool,
    pub nodes: Option<u64>,
}

fn param<T: FromStr>(params: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    params
        .get(key)
        .map(|v| v.parse::<T>().map_err(|_| Error::InvalidParams(format!("bad value `{v}` for `{key}`"))))
        .transpose()
}

fn check_known(params: &BTreeMap<String, String>, known: &[&str], algo: Algorithm) -> Result<()> {
    match params.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidParams(format!("`{k}` is not a parameter of {algo}"))),
        None => Ok(()),
    }
}

const GA_KEYS: [&str; 7] = [
    "population",
    "elite_fraction",
    "mutation_fraction",
    "greedy_mutation_prob",
    "per_edge_mutation_prob",
    "max_generations",
    "stall_generations",
];
const SA_KEYS: [&str; 7] = [
    "initial_temperature",
    "cooling",
    "reheat_after",
    "reheat_factor",
    "max_steps",
    "stop_after",
    "chains",
];

pub fn ga_params(opts: &SolveOptions) -> Result<GaParams> {
    check_known(&opts.params, &GA_KEYS, Algorithm::Ga)?;
    let p = &opts.params;
    let d = GaParams::default();
    Ok(GaParams {
        population: param(p, "population")?.unwrap_or(d.population),
        elite_fraction: param(p, "elite_fraction")?.unwrap_or(d.elite_fraction),
        mutation_fraction: param(p, "mutation_fraction")?.unwrap_or(d.mutation_fraction),
        greedy_mutation_prob: param(p, "greedy_mutation_prob")?.unwrap_or(d.greedy_mutation_prob),
        per_edge_mutation_prob: param(p, "per_edge_mutation_prob")?.unwrap_or(d.per_edge_mutation_prob),
        max_generations: param(p, "max_generations")?.unwrap_or(d.max_generations),
        stall_generations: param(p, "stall_generations")?.unwrap_or(d.stall_generations),
        time_limit: wall_clock(opts),
        seed: opts.seed,
    })
}

pub fn sa_params(opts: &SolveOptions) -> Result<SaParams> {
    check_known(&opts.params, &SA_KEYS, Algorithm::Sa)?;
    let p = &opts.params;
    let d = SaParams::default();
    Ok(SaParams {
        initial_temperature: param(p, "initial_temperature")?.or(d.initial_temperature),
        cooling: param(p, "cooling")?.unwrap_or(d.cooling),
        reheat_after: param(p, "reheat_after")?.unwrap_or(d.reheat_after),
        reheat_factor: param(p, "reheat_factor")?.unwrap_or(d.reheat_factor),
        max_steps: param(p, "max_steps")?.unwrap_or(d.max_steps),
        stop_after: param(p, "stop_after")?.unwrap_or(d.stop_after),
        chains: param(p, "chains")?.unwrap_or(d.chains),
        time_limit: wall_clock(opts),
        seed: opts.seed,
    })
}

fn wall_clock(opts: &SolveOptions) -> Option<Duration> {
    if opts.deterministic {
        None
    } else {
        opts.budget.time
    }
}

fn exact_budget(opts: &SolveOptions) -> Budget {
    if opts.deterministic {
        Budget { nodes: opts.budget.nodes, time: None }
    } else {
        opts.budget
    }
}

/// Runs one algorithm and re-evaluates the schedule it returns.
pub fn run_algorithm(inst: &Instance, algo: Algorithm, objective: Objective, opts: &SolveOptions) -> Result<RunOutput> {
    if !matches!(algo, Algorithm::Ga | Algorithm::Sa) {
        check_known(&opts.params, &[], algo)?;
    }
    let identity: Vec<usize> = (0..inst.num_edges()).collect();
    let (schedule, proven_optimal, nodes) = match algo {
        Algorithm::Oned => {
            let (sc, _) = onedim::solve(inst)?;
            (sc, objective != Objective::Makespan, None)
        }
        Algorithm::BruteForce => {
            let r = brute_force(inst, objective, exact_budget(opts))?;
            (r.schedule, r.proven_optimal, Some(r.nodes_explored))
        }
        Algorithm::Bnb => {
            let r = branch_and_bound(inst, objective, exact_budget(opts))?;
            (r.schedule, r.proven_optimal, Some(r.nodes_explored))
        }
        Algorithm::TwoApprox => {
            let part = bipartition(inst)?;
            // a separating line makes the cover optimal for both energies
            if separating_direction(inst, &part).is_some() {
                (line_separable_cover(inst, &part)?, objective != Objective::Makespan, None)
            } else {
                (two_approx(inst, &part)?, false, None)
            }
        }
        Algorithm::LogK => (log_k_approx(inst, objective)?, false, None),
        Algorithm::Greedy => (greedy(inst, objective, &identity)?, false, None),
        Algorithm::Ils => (ils(inst, objective, &greedy(inst, objective, &identity)?)?, false, None),
        Algorithm::Sa => (sa(inst, objective, &sa_params(opts)?)?, false, None),
        Algorithm::Ga => (ga(inst, objective, &ga_params(opts)?)?.schedule, false, None),
    };
    let value = evaluate(inst, &schedule)?.value(objective);
    Ok(RunOutput { schedule, value, proven_optimal, nodes })
}

/// One cell of a benchmark: an algorithm run on an instance for one objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    pub objective: String,
    pub value: Option<f64>,
    pub proven_optimal: bool,
    /// Seconds; `None` in deterministic mode.
    pub runtime: Option<f64>,
    pub seed: u64,
    pub parameters: String,
    /// `ok` or the error message.
    pub status: String,
    #[serde(skip)]
    pub schedule: Option<ScanCover>,
}

impl RunRecord {
    pub fn run(name: &str, inst: &Instance, algo: Algorithm, objective: Objective, opts: &SolveOptions) -> RunRecord {
        let start = Instant::now();
        let out = run_algorithm(inst, algo, objective, opts);
        let runtime = (!opts.deterministic).then(|| start.elapsed().as_secs_f64());
        let parameters = opts.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        let (value, proven_optimal, status, schedule) = match out {
            Ok(o) => (Some(o.value), o.proven_optimal, "ok".to_string(), Some(o.schedule)),
            Err(e) => (None, false, e.to_string(), None),
        };
        RunRecord {
            instance: name.to_string(),
            algorithm: algo.to_string(),
            objective: objective.to_string(),
            value,
            proven_optimal,
            runtime,
            seed: opts.seed,
            parameters,
            status,
            schedule,
        }
    }
}

/// Where a suite instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceSpec {
    File { path: String },
    Random { n: usize, p: f64, seed: u64 },
    Line { n: usize, p: f64, seed: u64 },
    Celestial { n: usize, seed: u64, orbit_radius: Option<f64>, obstacle_radius: Option<f64> },
}

impl InstanceSpec {
    pub fn label(&self) -> String {
        match self {
            InstanceSpec::File { path } => path.clone(),
            InstanceSpec::Random { n, p, seed } => format!("random-n{n}-p{p}-s{seed}"),
            InstanceSpec::Line { n, p, seed } => format!("line-n{n}-p{p}-s{seed}"),
            InstanceSpec::Celestial { n, seed, .. } => format!("celestial-n{n}-s{seed}"),
        }
    }

    pub fn load(&self) -> Result<Instance> {
        match self {
            InstanceSpec::File { path } => read_instance(&std::fs::read_to_string(path)?),
            &InstanceSpec::Random { n, p, seed } => gen_random(RandomParams { n, p, seed }),
            &InstanceSpec::Line { n, p, seed } => gen_line(RandomParams { n, p, seed }),
            &InstanceSpec::Celestial { n, seed, orbit_radius, obstacle_radius } => {
                let d = CelestialParams::new(n, seed);
                gen_celestial(CelestialParams {
                    orbit_radius: orbit_radius.unwrap_or(d.orbit_radius),
                    obstacle_radius: obstacle_radius.unwrap_or(d.obstacle_radius),
                    ..d
                })
            }
        }
    }
}

fn default_workers() -> usize {
    1
}

/// JSON suite description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub instances: Vec<InstanceSpec>,
    pub algorithms: Vec<Algorithm>,
    pub objectives: Vec<Objective>,
    /// Same syntax as `--budget`.
    pub budget: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Parameter overrides per algorithm name.
    #[serde(default)]
    pub params: BTreeMap<String, BTreeMap<String, String>>,
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<SuiteConfig> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// Runs every (instance, algorithm, objective) cell. Failed cells are kept
/// with their error as status. Records come back in configuration order.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<RunRecord>> {
    let budget = parse_budget(&config.budget).map_err(Error::InvalidParams)?;
    if config.deterministic && budget.time.is_some() {
        return Err(Error::InvalidParams("deterministic mode needs a node budget".into()));
    }
    let loaded: Vec<(String, Result<Instance>)> = config.instances.iter().map(|s| (s.label(), s.load())).collect();
    let mut cells = Vec::new();
    for (i, _) in loaded.iter().enumerate() {
        for &algo in &config.algorithms {
            for &obj in &config.objectives {
                cells.push((i, algo, obj));
            }
        }
    }
    let slots: Vec<Mutex<Option<RunRecord>>> = cells.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = config.workers.clamp(1, cells.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, algo, obj)) = cells.get(k) else { break };
                let (name, inst) = &loaded[i];
                let opts = SolveOptions {
                    budget,
                    seed: config.seed,
                    params: config.params.get(algo.name()).cloned().unwrap_or_default(),
                    deterministic: config.deterministic,
                };
                let record = match inst {
                    Ok(inst) => RunRecord::run(name, inst, algo, obj, &opts),
                    Err(e) => RunRecord {
                        instance: name.clone(),
                        algorithm: algo.to_string(),
                        objective: obj.to_string(),
                        value: None,
                        proven_optimal: false,
                        runtime: None,
                        seed: config.seed,
                        parameters: String::new(),
                        status: format!("instance error: {e}"),
                        schedule: None,
                    },
                };
                *slots[k].lock().unwrap() = Some(record);
            });
        }
    });
    Ok(slots.into_iter().map(|m| m.into_inner().unwrap().expect("every cell ran")).collect())
}

/// A record with its quality ratio against the best value seen for the same
/// instance and objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub instance: String,
    pub algorithm: String,
    pub objective: String,
    pub value: Option<f64>,
    pub best_known: Option<f64>,
    pub ratio: Option<f64>,
    pub proven_optimal: bool,
    pub status: String,
}

pub fn quality_ratio(value: f64, best: f64) -> f64 {
    if best > 0.0 {
        value / best
    } else if value <= best {
        1.0
    } else {
        f64::INFINITY
    }
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut best: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for r in records {
        if let Some(v) = r.value {
            let slot = best.entry((&r.instance, &r.objective)).or_insert(v);
            *slot = slot.min(v);
        }
    }
    records
        .iter()
        .map(|r| {
            let b = best.get(&(r.instance.as_str(), r.objective.as_str())).copied();
            SummaryRow {
                instance: r.instance.clone(),
                algorithm: r.algorithm.clone(),
                objective: r.objective.clone(),
                value: r.value,
                best_known: b,
                ratio: r.value.zip(b).map(|(v, b)| quality_ratio(v, b)),
                proven_optimal: r.proven_optimal,
                status: r.status.clone(),
            }
        })
        .collect()
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).expect("csv is utf-8");
    Ok(format!("# {CSV_SCHEMA}\n{body}"))
}

pub fn records_csv(records: &[RunRecord]) -> Result<String> {
    to_csv(
        records,
        &["instance", "algorithm", "objective", "value", "proven_optimal", "runtime", "seed", "parameters", "status"],
    )
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    to_csv(
        rows,
        &["instance", "algorithm", "objective", "value", "best_known", "ratio", "proven_optimal", "status"],
    )
}
