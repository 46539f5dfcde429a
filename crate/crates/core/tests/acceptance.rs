//! One PASS/FAIL line per acceptance criterion. Exits nonzero on a hard failure.

mod common;

use std::time::Instant;

use common::*;
use scancover::approx::{bipartition, BipartitePartition, line_separable_cover, separating_direction, two_approx};
use scancover::bench::{records_csv, run_suite, summarize, summary_csv, Algorithm, InstanceSpec, SuiteConfig};
use scancover::exact::{branch_and_bound, brute_force, lambda_cover_exists, Budget};
use scancover::hardness::{
    build_clause_gadget, build_variable_gadget, build_wire, build_wire_fragment, gap_constant, reduce,
    Mnae3SatInstance, Placement, WireOptions,
};
use scancover::heuristics::{ga, greedy, ils_with_trace, sa, GaParams, SaParams};
use scancover::model::{evaluate, lambda_of, validate};
use scancover::models::{big_m1, big_m2, build_cp2, build_mip1, build_mip2, build_mip3};
use scancover::instances::{gen_random, RandomParams};
use scancover::{onedim, Instance, Objective};

const TOL: f64 = 1e-9;

struct Report {
    hard_failures: usize,
}

impl Report {
    fn line(&mut self, id: u8, ok: bool, hard: bool, detail: String) {
        let tag = match (ok, hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "SOFT-FAIL",
        };
        if !ok && hard {
            self.hard_failures += 1;
        }
        println!("criterion {id}: {tag} {detail}");
    }
}

fn optimum(inst: &Instance, obj: Objective) -> f64 {
    let r = branch_and_bound(inst, obj, Budget::unlimited()).unwrap();
    assert!(r.proven_optimal);
    r.value
}

fn lambdas(inst: &Instance) -> Vec<f64> {
    (0..inst.num_vertices()).map(|v| lambda_of(inst, v).lambda).collect()
}

fn criterion1(rep: &mut Report) {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut checked_bf = 0;
    for inst in line_suite(100) {
        let k = two_sided_count(&inst) as f64;
        let (_, ev) = onedim::solve(&inst).unwrap();
        let be = if k > 0.0 { 180.0 } else { 0.0 };
        if (ev.total_energy - 180.0 * k).abs() > TOL || (ev.bottleneck_energy - be).abs() > TOL {
            bad.push(format!("{}: TE {} BE {}", inst.name().unwrap_or("?"), ev.total_energy, ev.bottleneck_energy));
        }
        if inst.num_edges() <= MAX_ORACLE_EDGES {
            checked_bf += 1;
            for obj in [Objective::TotalEnergy, Objective::BottleneckEnergy] {
                let bf = brute_force(&inst, obj, Budget::unlimited()).unwrap().value;
                if (bf - ev.value(obj)).abs() > TOL {
                    bad.push(format!("{}: {obj:?} bf {bf} vs {}", inst.name().unwrap_or("?"), ev.value(obj)));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = bad.is_empty() && secs < 5.0;
    rep.line(1, ok, true, format!("100 line instances, {checked_bf} checked against brute force, {secs:.2}s {bad:?}"));
}

fn criterion2(rep: &mut Report) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for inst in oracle_suite() {
        for obj in Objective::ALL {
            let a = branch_and_bound(&inst, obj, Budget::unlimited()).unwrap().value;
            let b = brute_force(&inst, obj, Budget::unlimited()).unwrap().value;
            if (a - b).abs() > TOL {
                bad.push(format!("{} {obj:?}: bnb {a} bf {b}", inst.name().unwrap_or("?")));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    rep.line(2, bad.is_empty() && secs < 60.0, true, format!("50 instances x 3 objectives, {secs:.2}s {bad:?}"));
}

fn criterion3(rep: &mut Report) {
    let mut bad = Vec::new();
    for seed in 0..100 {
        let inst = bipartite_instance(seed, 4 + (seed % 7) as usize, 0.6);
        let part = bipartition(&inst).unwrap();
        let ev = evaluate(&inst, &two_approx(&inst, &part).unwrap()).unwrap();
        for (v, lam) in lambdas(&inst).into_iter().enumerate() {
            if ev.per_vertex_rotation[v] > 2.0 * lam + TOL {
                bad.push(format!("seed {seed} v{v}: {} > 2*{lam}", ev.per_vertex_rotation[v]));
            }
        }
    }
    for seed in 0..20 {
        let inst = line_separable_instance(seed, 3 + (seed % 4) as usize, 0.7, MAX_ORACLE_EDGES);
        // BFS colouring may flip components, so the sides come from the geometry
        let part = BipartitePartition { side: inst.points().iter().map(|p| if p.x < 0.0 { 1 } else { 2 }).collect() };
        if separating_direction(&inst, &part).is_none() {
            bad.push(format!("separable seed {seed}: no separating direction found"));
            continue;
        }
        let sc = line_separable_cover(&inst, &part).unwrap();
        let ev = evaluate(&inst, &sc).unwrap();
        for (v, lam) in lambdas(&inst).into_iter().enumerate() {
            if (ev.per_vertex_rotation[v] - lam).abs() > TOL {
                bad.push(format!("separable seed {seed} v{v}: {} vs {lam}", ev.per_vertex_rotation[v]));
            }
        }
        for obj in [Objective::TotalEnergy, Objective::BottleneckEnergy] {
            let opt = optimum(&inst, obj);
            if (ev.value(obj) - opt).abs() > TOL {
                bad.push(format!("separable seed {seed} {obj:?}: {} vs optimum {opt}", ev.value(obj)));
            }
        }
    }
    rep.line(3, bad.is_empty(), true, format!("100 bipartite + 20 line-separable {bad:?}"));
}

fn criterion4(rep: &mut Report) {
    let mut pool = oracle_suite();
    pool.extend((0..30).map(|s| line_separable_instance(500 + s, 3 + (s % 4) as usize, 0.7, MAX_ORACLE_EDGES)));
    pool.extend((0..30).map(|s| bipartite_instance(900 + s, 3 + (s % 4) as usize, 0.6)).filter(|i| i.num_edges() <= MAX_ORACLE_EDGES));
    pool.extend(
        (0..40)
            .map(|s| gen_random(RandomParams { n: 4 + (s % 2) as usize, p: 0.8, seed: 700 + s }).unwrap())
            .filter(|i| i.num_edges() <= MAX_ORACLE_EDGES),
    );
    let mut bad = Vec::new();
    let mut positives = 0;
    for inst in &pool {
        let lam = lambdas(inst);
        let sum: f64 = lam.iter().sum();
        let max = lam.iter().copied().fold(0.0, f64::max);
        let te = optimum(inst, Objective::TotalEnergy);
        if !lambda_cover_exists(inst, Budget::unlimited()).unwrap().exists {
            // rotation is at least Λ everywhere, so TE = ΣΛ would exhibit a Λ-cover
            if te <= sum + TOL {
                bad.push(format!("{}: decider says no Λ-cover but TE {te} = sum {sum}", inst.name().unwrap_or("?")));
            }
            continue;
        }
        positives += 1;
        let be = optimum(inst, Objective::BottleneckEnergy);
        if (te - sum).abs() > TOL {
            bad.push(format!("{}: TE {te} vs sum {sum}", inst.name().unwrap_or("?")));
        }
        // every vertex rotates at least Λ, so a Λ-cover meets max Λ even without equal cones
        if (be - max).abs() > TOL {
            bad.push(format!("{}: BE {be} vs max {max}", inst.name().unwrap_or("?")));
        }
    }
    let ok = bad.is_empty() && positives > 0;
    rep.line(4, ok, true, format!("{positives} of {} instances admit a Λ-cover {bad:?}", pool.len()));
}

/// Every formula over `n <= 3` variables with at most two clauses, clauses
/// being sorted tuples of 1 to 3 literals and pairs taken unordered.
fn small_formulas() -> Vec<Mnae3SatInstance> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let mut clauses: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            clauses.push(vec![a]);
            for b in a..n {
                clauses.push(vec![a, b]);
                for c in b..n {
                    clauses.push(vec![a, b, c]);
                }
            }
        }
        out.push(Mnae3SatInstance::new(n, vec![]).unwrap());
        for i in 0..clauses.len() {
            out.push(Mnae3SatInstance::new(n, vec![clauses[i].clone()]).unwrap());
            for j in i..clauses.len() {
                out.push(Mnae3SatInstance::new(n, vec![clauses[i].clone(), clauses[j].clone()]).unwrap());
            }
        }
    }
    out
}

fn brute_nae(sat: &Mnae3SatInstance) -> bool {
    (0..1u32 << sat.num_vars).any(|bits| {
        let a: Vec<bool> = (0..sat.num_vars).map(|i| bits >> i & 1 == 1).collect();
        sat.clauses.iter().all(|c| c.iter().any(|&x| a[x]) && c.iter().any(|&x| !a[x]))
    })
}

fn criterion5(rep: &mut Report) {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut gadgets = Vec::new();
    gadgets.push(("fragment", build_wire_fragment(Placement::default()).map(|_| ())));
    for k in 1..=3 {
        gadgets.push(("variable", build_variable_gadget(k, Placement::default()).map(|_| ())));
    }
    gadgets.push(("clause", build_clause_gadget(Placement::default()).map(|_| ())));
    for theta in [0.0, 90.0, 200.0] {
        gadgets.push(("wire", build_wire(theta, &WireOptions::default()).map(|_| ())));
    }
    for (name, r) in &gadgets {
        if let Err(e) = r {
            bad.push(format!("{name}: {e}"));
        }
    }
    let formulas = small_formulas();
    let (mut sat_count, mut unsat_count) = (0, 0);
    for sat in &formulas {
        let expect = brute_nae(sat);
        let g = reduce(sat).unwrap();
        let r = lambda_cover_exists(&g.instance, Budget::unlimited()).unwrap();
        if r.exists != expect {
            bad.push(format!("{:?}: Λ-cover {} but NAE {expect}", sat.clauses, r.exists));
        }
        if r.exists && !sat.is_nae_satisfied(&g.decode_assignment(&r).unwrap()) {
            bad.push(format!("{:?}: decoded assignment is not NAE", sat.clauses));
        }
        if expect {
            sat_count += 1;
        } else {
            unsat_count += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = bad.is_empty() && secs < 600.0;
    rep.line(
        5,
        ok,
        true,
        format!(
            "{} formulas ({sat_count} satisfiable, {unsat_count} not), {} gadgets certified, {secs:.1}s {bad:?}",
            formulas.len(),
            gadgets.len()
        ),
    );
}

fn criterion6(rep: &mut Report) {
    let g = gap_constant(0.5f64.atan().to_degrees(), 0.25f64.atan().to_degrees()).unwrap();
    rep.line(6, (g - 1.0421).abs() <= 5e-4 && g >= 1.04, true, format!("gap constant {g:.6}"));
}

fn criterion7(rep: &mut Report) {
    let mut bad = Vec::new();
    for n in 1..=64usize {
        let expect = (n as f64).log2().ceil() * 360.0;
        if big_m1(n) != expect {
            bad.push(format!("M1({n}) = {}", big_m1(n)));
        }
    }
    for m in 0..=64usize {
        if big_m2(m) != m as f64 * 180.0 {
            bad.push(format!("M2({m}) = {}", big_m2(m)));
        }
    }
    let tol = 1e-6;
    for inst in oracle_suite() {
        let name = inst.name().unwrap_or("?").to_string();
        let ms = branch_and_bound(&inst, Objective::Makespan, Budget::unlimited()).unwrap().schedule;
        for model in [build_mip1(&inst, Objective::Makespan), build_mip2(&inst, Objective::Makespan).unwrap()] {
            let values = model.assignment_from_schedule(&inst, &ms).unwrap();
            let v = model.violations(&values, tol);
            if !v.is_empty() {
                bad.push(format!("{name} {:?} MS: {v:?}", model.formulation));
            }
        }
        for obj in [Objective::TotalEnergy, Objective::BottleneckEnergy] {
            let r = branch_and_bound(&inst, obj, Budget::unlimited()).unwrap();
            let mip1 = build_mip1(&inst, obj);
            let v = mip1.violations(&mip1.assignment_from_schedule(&inst, &r.schedule).unwrap(), tol);
            if !v.is_empty() {
                bad.push(format!("{name} Mip1 {obj:?}: {v:?}"));
            }
            for model in [build_mip3(&inst, obj).unwrap(), build_cp2(&inst, obj).unwrap()] {
                let values = model.assignment_from_schedule(&inst, &r.schedule).unwrap();
                let got = model.objective_value(&values);
                if (got - r.value).abs() > tol {
                    bad.push(format!("{name} {:?} {obj:?}: objective {got} vs {}", model.formulation, r.value));
                }
                let v = model.violations(&values, tol);
                if !v.is_empty() {
                    bad.push(format!("{name} {:?} {obj:?}: {v:?}", model.formulation));
                }
            }
        }
    }
    rep.line(7, bad.is_empty(), true, format!("big-M formulas and 50 mapped optima {bad:?}"));
}

fn criterion8(rep: &mut Report) {
    let mut invalid = Vec::new();
    let mut trace_bad = Vec::new();
    let mut worst: f64 = 1.0;
    for (i, inst) in oracle_suite().into_iter().enumerate() {
        let ident: Vec<usize> = (0..inst.num_edges()).collect();
        for obj in Objective::ALL {
            let g = greedy(&inst, obj, &ident).unwrap();
            let (l, trace) = ils_with_trace(&inst, obj, &g).unwrap();
            if trace.windows(2).any(|w| w[1] > w[0] + TOL) {
                trace_bad.push(format!("ils #{i} {obj:?}"));
            }
            let s = sa(&inst, obj, &SaParams { seed: i as u64, ..SaParams::default() }).unwrap();
            let out = ga(&inst, obj, &GaParams { seed: i as u64, ..GaParams::default() }).unwrap();
            if out.trace.windows(2).any(|w| w[1] > w[0]) {
                trace_bad.push(format!("ga #{i} {obj:?}"));
            }
            for (algo, sc) in [("greedy", &g), ("ils", &l), ("sa", &s), ("ga", &out.schedule)] {
                if !validate(&inst, sc).unwrap().is_ok() {
                    invalid.push(format!("{algo} #{i} {obj:?}"));
                }
            }
            if obj == Objective::TotalEnergy {
                let opt = optimum(&inst, obj);
                let ratio = if opt > 0.0 { out.value / opt } else if out.value <= TOL { 1.0 } else { f64::INFINITY };
                worst = worst.max(ratio);
            }
        }
    }
    rep.line(8, invalid.is_empty() && trace_bad.is_empty(), true, format!("all heuristic outputs valid, traces monotone {invalid:?} {trace_bad:?}"));
    rep.line(8, worst <= 1.5, false, format!("GA worst TE ratio {worst:.4} (threshold 1.5, population 200, elite 10%, mutation 3%)"));
}

fn criterion9(rep: &mut Report) {
    let config = SuiteConfig {
        instances: vec![
            InstanceSpec::Random { n: 6, p: 0.4, seed: 3 },
            InstanceSpec::Celestial { n: 6, seed: 4, orbit_radius: None, obstacle_radius: None },
        ],
        algorithms: vec![Algorithm::Bnb, Algorithm::Greedy, Algorithm::Ga],
        objectives: Objective::ALL.to_vec(),
        budget: "200000n".into(),
        seed: 1,
        deterministic: true,
        workers: 1,
        params: [("ga".to_string(), [("population".to_string(), "40".to_string())].into())].into(),
    };
    let records = run_suite(&config).unwrap();
    let summary = summarize(&records);
    let ok = records_csv(&records).is_ok()
        && summary_csv(&summary).is_ok()
        && summary.iter().all(|r| r.ratio.is_some_and(|x| x >= 1.0 - TOL));
    println!(
        "criterion 9: NOTE large-scale solver runs (about 300 edges, 900 s, commercial and CP solvers) are not reproduced; \
         criteria 1-8 and the bench harness stand in for them"
    );
    rep.line(9, ok, true, format!("bench harness wrote {} records with quality ratios", records.len()));
}

fn main() {
    let mut rep = Report { hard_failures: 0 };
    let start = Instant::now();
    // ACCEPTANCE_ONLY=3,5 runs a subset
    let only: Option<Vec<u8>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [fn(&mut Report); 9] =
        [criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8, criterion9];
    for (i, run) in criteria.iter().enumerate() {
        if only.as_ref().map_or(true, |o| o.contains(&(i as u8 + 1))) {
            run(&mut rep);
        }
    }
    println!("acceptance: {} hard failure(s), {:.1}s", rep.hard_failures, start.elapsed().as_secs_f64());
    if rep.hard_failures > 0 {
        std::process::exit(1);
    }
}
