use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use scancover::bench::{
    parse_budget, records_csv, run_suite, summarize, summary_csv, Algorithm, RunRecord, SolveOptions, SuiteConfig,
};
use scancover::exact::{lambda_cover_exists, Budget};
use scancover::hardness::{reduce, Mnae3SatInstance};
use scancover::instances::{
    gen_celestial, gen_line, gen_random, read_instance, read_schedule, write_instance, write_schedule, CelestialParams,
    RandomParams,
};
use scancover::model::{evaluate, validate};
use scancover::models::{build, emit, Format, Formulation};
use scancover::{Error, Objective};

#[derive(Parser)]
#[command(name = "scancover", version, about = "Minimum scan cover with angular costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Solve an instance with one algorithm.
    Solve(SolveArgs),
    /// Validate and evaluate a schedule.
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value = "te", value_parser = parse_objective)]
        objective: Objective,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Run a benchmark suite described by a JSON file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Per-run CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV with best-known values and quality ratios.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Overrides the config's `deterministic` flag.
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Build the gadget graph of a monotone NAE-3SAT formula.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also decide Λ-cover existence and compare with brute-force satisfiability.
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Write a MIP or CP formulation as an LP-style file.
    EmitModel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = parse_formulation)]
        formulation: Formulation,
        #[arg(long, default_value = "ms", value_parser = parse_objective)]
        objective: Objective,
        /// `lp` or `sidecar` (LP plus lazy and conditional sections).
        #[arg(long, default_value = "sidecar", value_parser = parse_format)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Uniform points in the unit square.
    Random(GenArgs),
    /// Uniform points on [0, 1].
    Line(GenArgs),
    /// Points on a circle; edges are chords avoiding a central disk.
    Celestial {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        orbit_radius: f64,
        #[arg(long, default_value_t = 0.5)]
        obstacle_radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long, default_value = "te", value_parser = parse_objective)]
    objective: Objective,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `30s`, `5000n` or `none`.
    #[arg(long, value_parser = parse_budget)]
    budget: Option<Budget>,
    /// Heuristic parameter override, repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
    /// Count budgets in nodes and omit timings from the output.
    #[arg(long)]
    deterministic: bool,
    /// Schedule output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append JSON-lines statistics here instead of stdout.
    #[arg(long)]
    stats: Option<PathBuf>,
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse()
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_formulation(s: &str) -> Result<Formulation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "lp" => Ok(Format::Lp),
        "sidecar" => Ok(Format::LpWithSidecar),
        _ => Err(format!("unknown format `{s}` (expected lp or sidecar)")),
    }
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    if k.is_empty() {
        return Err(format!("empty parameter name in `{s}`"));
    }
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// Failure that maps to exit code 1.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_stats(path: Option<&PathBuf>, v: &Value) -> Result<(), Failure> {
    let line = format!("{v}\n");
    match path {
        Some(p) => {
            let mut f = fs::OpenOptions::new().create(true).append(true).open(p)?;
            f.write_all(line.as_bytes())?;
        }
        None => print!("{line}"),
    }
    Ok(())
}

fn gen(kind: GenKind) -> Result<(), Failure> {
    let (inst, out) = match kind {
        GenKind::Random(a) => (gen_random(RandomParams { n: a.n, p: a.p, seed: a.seed })?, a.out),
        GenKind::Line(a) => (gen_line(RandomParams { n: a.n, p: a.p, seed: a.seed })?, a.out),
        GenKind::Celestial { n, seed, orbit_radius, obstacle_radius, out } => {
            (gen_celestial(CelestialParams { n, orbit_radius, obstacle_radius, seed })?, out)
        }
    };
    write_out(out.as_ref(), &write_instance(&inst))
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let inst = read_instance(&read(&a.input)?)?;
    let budget = match a.budget {
        Some(b) if a.deterministic && b.time.is_some() => {
            return Err(Failure("--deterministic needs a node budget such as 100000n".into()))
        }
        Some(b) => b,
        None if a.deterministic => Budget { time: None, ..Budget::default() },
        None => Budget::default(),
    };
    let opts = SolveOptions {
        budget,
        seed: a.seed,
        params: a.params.into_iter().collect::<BTreeMap<_, _>>(),
        deterministic: a.deterministic,
    };
    let name = inst.name().map(str::to_string).unwrap_or_else(|| a.input.display().to_string());
    let rec = RunRecord::run(&name, &inst, a.algo, a.objective, &opts);
    let Some(sc) = rec.schedule.as_ref() else {
        return Err(Failure(rec.status));
    };
    if let Some(out) = &a.out {
        fs::write(out, write_schedule(&inst, sc))?;
    }
    let mut stats = json!({
        "command": "solve",
        "instance": rec.instance,
        "algorithm": rec.algorithm,
        "objective": rec.objective,
        "value": rec.value,
        "proven_optimal": rec.proven_optimal,
        "seed": rec.seed,
        "parameters": rec.parameters,
        "edges": inst.num_edges(),
    });
    if let Some(t) = rec.runtime {
        stats["runtime"] = json!(t);
    }
    emit_stats(a.stats.as_ref(), &stats)
}

fn eval(input: PathBuf, schedule: PathBuf, objective: Objective, stats: Option<PathBuf>) -> Result<(), Failure> {
    let inst = read_instance(&read(&input)?)?;
    let sc = read_schedule(&read(&schedule)?, &inst)?;
    let report = validate(&inst, &sc).map_err(Error::from)?;
    if !report.is_ok() {
        emit_stats(stats.as_ref(), &json!({ "command": "eval", "valid": false, "violations": report.violations }))?;
        return Err(Failure(format!("schedule violates {} separation constraint(s)", report.violations.len())));
    }
    let ev = evaluate(&inst, &sc).map_err(Error::from)?;
    emit_stats(
        stats.as_ref(),
        &json!({
            "command": "eval",
            "valid": true,
            "objective": objective.to_string(),
            "value": ev.value(objective),
            "makespan": ev.makespan,
            "total_energy": ev.total_energy,
            "bottleneck_energy": ev.bottleneck_energy,
        }),
    )
}

fn bench(
    config: PathBuf,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
    deterministic: bool,
    workers: Option<usize>,
) -> Result<(), Failure> {
    let mut cfg = SuiteConfig::parse(&read(&config)?)?;
    cfg.deterministic |= deterministic;
    if let Some(w) = workers {
        cfg.workers = w;
    }
    let records = run_suite(&cfg)?;
    write_out(out.as_ref(), &records_csv(&records)?)?;
    if let Some(p) = summary {
        fs::write(p, summary_csv(&summarize(&records))?)?;
    }
    Ok(())
}

fn reduce_cmd(input: PathBuf, out: Option<PathBuf>, certify: bool, stats: Option<PathBuf>) -> Result<(), Failure> {
    let sat = Mnae3SatInstance::parse(&read(&input)?)?;
    let g = reduce(&sat)?;
    let inst = g.instance.clone().with_name(format!("reduction of {}", input.display()));
    if let Some(p) = &out {
        fs::write(p, write_instance(&inst))?;
    }
    let mut s = json!({
        "command": "reduce",
        "variables": sat.num_vars,
        "clauses": sat.clauses.len(),
        "vertices": inst.num_vertices(),
        "edges": inst.num_edges(),
        "auxiliary_vertices": g.auxiliary.iter().filter(|&&a| a).count(),
        "theta_max": g.theta_max,
        "theta_min": g.theta_min,
        "bipartite": g.bipartition().is_some(),
        "lambda_spread": g.lambda_spread(),
    });
    if certify {
        let nae = sat.nae_satisfiable();
        let cover = lambda_cover_exists(&g.instance, Budget::unlimited())?;
        s["nae_satisfiable"] = json!(nae.is_some());
        s["lambda_cover_exists"] = json!(cover.exists);
        if let Some(a) = g.decode_assignment(&cover) {
            s["assignment"] = json!(a);
        }
        if cover.exists != nae.is_some() {
            emit_stats(stats.as_ref(), &s)?;
            return Err(Failure("reduction disagrees with brute-force satisfiability".into()));
        }
    }
    if out.is_none() && stats.is_none() {
        // instance on stdout, stats on stderr
        print!("{}", write_instance(&inst));
        eprintln!("{s}");
        return Ok(());
    }
    emit_stats(stats.as_ref(), &s)
}

fn emit_model(
    input: PathBuf,
    formulation: Formulation,
    objective: Objective,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let inst = read_instance(&read(&input)?)?;
    let model = build(&inst, formulation, objective)?;
    write_out(out.as_ref(), &emit(&model, format)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { kind } => gen(kind),
        Command::Solve(a) => solve(a),
        Command::Eval { input, schedule, objective, stats } => eval(input, schedule, objective, stats),
        Command::Bench { config, out, summary, deterministic, workers } => {
            bench(config, out, summary, deterministic, workers)
        }
        Command::Reduce { input, out, certify, stats } => reduce_cmd(input, out, certify, stats),
        Command::EmitModel { input, formulation, objective, format, out } => {
            emit_model(input, formulation, objective, format, out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
