mod common;

use proptest::prelude::*;
use scancover::approx::{bipartite_cover, bipartition, dsatur, line_separable_cover, two_approx, BipartitePartition};
use scancover::bench::{records_csv, run_suite, Algorithm, InstanceSpec, SuiteConfig};
use scancover::exact::{branch_and_bound, brute_force, lambda_cover_exists, Budget};
use scancover::heuristics::{ga, greedy, ils_with_trace, sa, GaParams, SaParams};
use scancover::instances::{
    gen_celestial, gen_line, gen_random, origin_segment_distance, read_instance, read_schedule, write_instance,
    write_schedule, CelestialParams, RandomParams,
};
use scancover::model::{angular_distance, evaluate, lambda_of, normalize_deg, validate, Point};
use scancover::models::{build, emit, parse_counts, Format, Formulation};
use scancover::{onedim, Instance, Objective};

const TOL: f64 = 1e-9;

fn small_plane() -> impl Strategy<Value = Instance> {
    (3usize..=6, 0.3f64..0.8, any::<u64>())
        .prop_map(|(n, p, seed)| gen_random(RandomParams { n, p, seed }).unwrap())
        .prop_filter("at most 7 edges", |i| i.num_edges() <= 7)
}

fn lambdas(inst: &Instance) -> Vec<f64> {
    (0..inst.num_vertices()).map(|v| lambda_of(inst, v).lambda).collect()
}

fn opt(inst: &Instance, obj: Objective) -> f64 {
    branch_and_bound(inst, obj, Budget::unlimited()).unwrap().value
}

fn transformed(inst: &Instance, angle: f64, shift: (f64, f64), scale: f64) -> Instance {
    let pts: Vec<(f64, f64)> = inst
        .points()
        .iter()
        .map(|p| {
            let q = p.rotate(angle).scale(scale).add(Point::new(shift.0, shift.1));
            (q.x, q.y)
        })
        .collect();
    Instance::plane(&pts, inst.edge_pairs()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn angles_are_symmetric_and_satisfy_the_triangle_inequality(a in -720.0f64..720.0, b in -720.0f64..720.0, c in -720.0f64..720.0) {
        let (ab, ba) = (angular_distance(a, b), angular_distance(b, a));
        prop_assert!((ab - ba).abs() < TOL);
        prop_assert!((0.0..=180.0).contains(&ab));
        prop_assert!(ab <= angular_distance(a, c) + angular_distance(c, b) + TOL);
        let n = normalize_deg(a);
        prop_assert!((0.0..360.0).contains(&n));
    }

    #[test]
    fn lambda_cone_contains_every_edge_and_is_minimal(inst in small_plane()) {
        for v in 0..inst.num_vertices() {
            let info = lambda_of(&inst, v);
            if inst.degree(v) < 2 {
                prop_assert_eq!(info.lambda, 0.0);
                continue;
            }
            let dirs: Vec<f64> = inst.incident(v).iter().map(|&e| inst.direction(v, e).unwrap()).collect();
            let half = info.lambda / 2.0;
            for &d in &dirs {
                prop_assert!(angular_distance(d, info.bisector) <= half + 1e-7);
            }
            // no cone starting at an edge direction and narrower by 0.5° holds them all
            for &start in &dirs {
                let width = info.lambda - 0.5;
                let fits = dirs.iter().all(|&d| normalize_deg(d - start) <= width);
                prop_assert!(!fits);
            }
        }
    }

    #[test]
    fn evaluation_sums_and_rotation_lower_bound(inst in small_plane(), seed in any::<u64>()) {
        let order: Vec<usize> = {
            let mut o: Vec<usize> = (0..inst.num_edges()).collect();
            let k = o.len().max(1);
            o.rotate_left((seed as usize) % k);
            o
        };
        let sc = greedy(&inst, Objective::TotalEnergy, &order).unwrap();
        prop_assert!(validate(&inst, &sc).unwrap().is_ok());
        let ev = evaluate(&inst, &sc).unwrap();
        let sum: f64 = ev.per_vertex_rotation.iter().sum();
        let max = ev.per_vertex_rotation.iter().copied().fold(0.0, f64::max);
        prop_assert!((ev.total_energy - sum).abs() < 1e-7);
        prop_assert!((ev.bottleneck_energy - max).abs() < 1e-7);
        for (v, lam) in lambdas(&inst).into_iter().enumerate() {
            prop_assert!(ev.per_vertex_rotation[v] >= lam - TOL);
        }
    }

    #[test]
    fn rigid_motions_keep_cones_and_optima(inst in small_plane(), angle in 0.0f64..360.0, dx in -5.0f64..5.0, dy in -5.0f64..5.0, s in 0.5f64..3.0) {
        let moved = transformed(&inst, angle, (dx, dy), s);
        for (a, b) in lambdas(&inst).into_iter().zip(lambdas(&moved)) {
            prop_assert!((a - b).abs() < 1e-7);
        }
        for obj in Objective::ALL {
            prop_assert!((opt(&inst, obj) - opt(&moved, obj)).abs() < 1e-6);
        }
    }

    #[test]
    fn generators_are_deterministic(n in 1usize..12, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let a = gen_random(RandomParams { n, p, seed }).unwrap();
        prop_assert_eq!(write_instance(&a), write_instance(&gen_random(RandomParams { n, p, seed }).unwrap()));
        let l = gen_line(RandomParams { n, p, seed }).unwrap();
        prop_assert_eq!(write_instance(&l), write_instance(&gen_line(RandomParams { n, p, seed }).unwrap()));
        let c = gen_celestial(CelestialParams::new(n, seed)).unwrap();
        prop_assert_eq!(write_instance(&c), write_instance(&gen_celestial(CelestialParams::new(n, seed)).unwrap()));
    }

    #[test]
    fn celestial_edges_are_exactly_the_visible_chords(n in 2usize..12, seed in any::<u64>(), r in 0.1f64..0.9) {
        let params = CelestialParams { obstacle_radius: r, ..CelestialParams::new(n, seed) };
        let inst = gen_celestial(params).unwrap();
        for i in 0..n {
            prop_assert!((inst.point(i).norm() - params.orbit_radius).abs() < 1e-9);
            for j in i + 1..n {
                let visible = origin_segment_distance(inst.point(i), inst.point(j)) >= r;
                prop_assert_eq!(inst.edge_id(i, j).is_some(), visible);
            }
        }
    }

    #[test]
    fn instance_and_schedule_text_round_trip(inst in small_plane()) {
        let back = read_instance(&write_instance(&inst)).unwrap();
        prop_assert_eq!(back.points(), inst.points());
        prop_assert_eq!(back.edge_pairs(), inst.edge_pairs());
        let sc = branch_and_bound(&inst, Objective::Makespan, Budget::unlimited()).unwrap().schedule;
        let again = read_schedule(&write_schedule(&inst, &sc), &inst).unwrap();
        prop_assert_eq!(again.times(), sc.times());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn onedim_solution_is_valid_and_optimal(n in 2usize..=7, p in 0.2f64..0.9, seed in any::<u64>()) {
        let inst = gen_line(RandomParams { n, p, seed }).unwrap();
        prop_assume!(inst.num_edges() <= 8);
        let (sc, ev) = onedim::solve(&inst).unwrap();
        prop_assert!(validate(&inst, &sc).unwrap().is_ok());
        prop_assert!((ev.total_energy - 180.0 * common::two_sided_count(&inst) as f64).abs() < TOL);
        for obj in [Objective::TotalEnergy, Objective::BottleneckEnergy] {
            prop_assert!((opt(&inst, obj) - ev.value(obj)).abs() < TOL);
        }
    }

    #[test]
    fn branch_and_bound_matches_brute_force(inst in small_plane()) {
        for obj in Objective::ALL {
            let a = branch_and_bound(&inst, obj, Budget::unlimited()).unwrap();
            let b = brute_force(&inst, obj, Budget::unlimited()).unwrap();
            prop_assert!(a.proven_optimal && b.proven_optimal);
            prop_assert!((a.value - b.value).abs() < TOL);
            prop_assert!(validate(&inst, &a.schedule).unwrap().is_ok());
        }
    }

    #[test]
    fn adding_an_edge_never_lowers_total_energy(inst in small_plane(), pick in any::<usize>()) {
        let n = inst.num_vertices();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| inst.edge_id(i, j).is_none())
            .collect();
        prop_assume!(!missing.is_empty());
        let mut edges = inst.edge_pairs();
        edges.push(missing[pick % missing.len()]);
        let pts: Vec<(f64, f64)> = inst.points().iter().map(|p| (p.x, p.y)).collect();
        let bigger = Instance::plane(&pts, edges).unwrap();
        prop_assert!(opt(&bigger, Objective::TotalEnergy) >= opt(&inst, Objective::TotalEnergy) - TOL);
    }

    #[test]
    fn decider_agrees_with_total_energy_optimum(inst in small_plane()) {
        let sum: f64 = lambdas(&inst).iter().sum();
        let r = lambda_cover_exists(&inst, Budget::unlimited()).unwrap();
        let te = opt(&inst, Objective::TotalEnergy);
        prop_assert_eq!(r.exists, te <= sum + 1e-7);
        if let Some(sc) = &r.schedule {
            let ev = evaluate(&inst, sc).unwrap();
            for (v, lam) in lambdas(&inst).into_iter().enumerate() {
                prop_assert!((ev.per_vertex_rotation[v] - lam).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn two_approx_stays_within_twice_lambda(n in 3usize..10, p in 0.2f64..0.9, seed in any::<u64>()) {
        let inst = common::bipartite_instance(seed, n, p);
        let part = bipartition(&inst).unwrap();
        let sc = two_approx(&inst, &part).unwrap();
        prop_assert!(validate(&inst, &sc).unwrap().is_ok());
        let ev = evaluate(&inst, &sc).unwrap();
        for (v, lam) in lambdas(&inst).into_iter().enumerate() {
            prop_assert!(ev.per_vertex_rotation[v] <= 2.0 * lam + TOL);
        }
    }

    #[test]
    fn line_separable_cover_is_a_lambda_cover(n in 2usize..9, p in 0.3f64..1.0, seed in any::<u64>()) {
        let inst = common::line_separable_instance(seed, n, p, 12);
        let part = BipartitePartition { side: inst.points().iter().map(|q| if q.x < 0.0 { 1 } else { 2 }).collect() };
        let sc = line_separable_cover(&inst, &part).unwrap();
        prop_assert!(validate(&inst, &sc).unwrap().is_ok());
        let ev = evaluate(&inst, &sc).unwrap();
        for (v, lam) in lambdas(&inst).into_iter().enumerate() {
            prop_assert!((ev.per_vertex_rotation[v] - lam).abs() < TOL);
        }
        // mirroring the sides changes nothing
        let flipped = BipartitePartition { side: part.side.iter().map(|&s| 3 - s).collect() };
        let ev2 = evaluate(&inst, &line_separable_cover(&inst, &flipped).unwrap()).unwrap();
        prop_assert!((ev2.total_energy - ev.total_energy).abs() < TOL);
    }

    #[test]
    fn bipartite_layers_partition_the_edges(n in 2usize..12, p in 0.1f64..1.0, seed in any::<u64>()) {
        let inst = gen_random(RandomParams { n, p, seed }).unwrap();
        let coloring = dsatur(&inst);
        for e in inst.edges() {
            prop_assert_ne!(coloring.color[e.u], coloring.color[e.v]);
        }
        let layers = bipartite_cover(&inst, &coloring).unwrap();
        let mut seen = vec![0usize; inst.num_edges()];
        for layer in &layers {
            prop_assert_eq!(layer.instance.num_edges(), layer.edges.len());
            for (local, &e) in layer.edges.iter().enumerate() {
                seen[e] += 1;
                let le = layer.instance.edge(local);
                prop_assert_ne!(layer.partition.side[le.u], layer.partition.side[le.v]);
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let bound = if coloring.k <= 1 { 0 } else { (coloring.k as f64).log2().ceil() as usize };
        prop_assert!(layers.len() <= bound);
    }

    #[test]
    fn heuristics_return_valid_schedules(inst in small_plane(), seed in 0u64..1000) {
        let ident: Vec<usize> = (0..inst.num_edges()).collect();
        for obj in Objective::ALL {
            let g = greedy(&inst, obj, &ident).unwrap();
            let (l, trace) = ils_with_trace(&inst, obj, &g).unwrap();
            prop_assert!(trace.windows(2).all(|w| w[1] <= w[0] + TOL));
            let sp = SaParams { seed, max_steps: 2000, ..SaParams::default() };
            let s = sa(&inst, obj, &sp).unwrap();
            prop_assert_eq!(&s, &sa(&inst, obj, &sp).unwrap());
            let gp = GaParams { seed, population: 30, max_generations: 40, ..GaParams::default() };
            let out = ga(&inst, obj, &gp).unwrap();
            prop_assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
            prop_assert_eq!(&out.schedule, &ga(&inst, obj, &gp).unwrap().schedule);
            for sc in [&g, &l, &s, &out.schedule] {
                prop_assert!(validate(&inst, sc).unwrap().is_ok());
                prop_assert!(evaluate(&inst, sc).unwrap().value(obj) >= opt(&inst, obj) - TOL);
            }
        }
    }

    #[test]
    fn emitted_models_report_their_counts(inst in small_plane()) {
        let cases = [
            (Formulation::Mip1, Objective::Makespan),
            (Formulation::Mip1, Objective::TotalEnergy),
            (Formulation::Mip2, Objective::Makespan),
            (Formulation::Mip3, Objective::BottleneckEnergy),
            (Formulation::Cp1, Objective::Makespan),
            (Formulation::Cp2, Objective::TotalEnergy),
        ];
        for (f, obj) in cases {
            let model = build(&inst, f, obj).unwrap();
            let text = emit(&model, Format::LpWithSidecar).unwrap();
            let parsed = parse_counts(&text).unwrap();
            let counts = model.counts();
            prop_assert_eq!(parsed.variables, counts.variables);
            prop_assert_eq!(parsed.constraints, counts.constraints);
            prop_assert_eq!(text, emit(&build(&inst, f, obj).unwrap(), Format::LpWithSidecar).unwrap());
        }
    }
}

#[test]
fn deterministic_bench_output_repeats() {
    let config = SuiteConfig {
        instances: vec![
            InstanceSpec::Random { n: 5, p: 0.5, seed: 9 },
            InstanceSpec::Line { n: 6, p: 0.5, seed: 2 },
        ],
        algorithms: vec![Algorithm::Bnb, Algorithm::Greedy, Algorithm::Ils, Algorithm::Sa, Algorithm::Ga],
        objectives: Objective::ALL.to_vec(),
        budget: "20000n".into(),
        seed: 5,
        deterministic: true,
        workers: 2,
        params: Default::default(),
    };
    let a = records_csv(&run_suite(&config).unwrap()).unwrap();
    let b = records_csv(&run_suite(&SuiteConfig { workers: 1, ..config }).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("# scancover-bench v1"));
}
