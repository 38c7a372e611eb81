mod common;

use std::sync::Arc;

use aco_algebra::aco::ops::{self, Ctx};
use aco_algebra::aco::vars::Vars;
use aco_algebra::aco::{build_system, build_system_with_copies, AcoParams, BuiltSystem, LeafRole, SharingFunction, Variant};
use aco_algebra::algebra::{DataValue, State};
use aco_algebra::oracle::IterationObserver;
use aco_algebra::semantics::{explore_lts, run_observed, Limits, RandomSource, Scheduler, Termination, Verbosity};
use aco_algebra::tsp::{generate_euclidean, TspInstance};
use common::{run_checked, transform_name};

fn instance(n: usize, seed: u64) -> Arc<TspInstance<f64>> {
    Arc::new(generate_euclidean(n, seed).unwrap())
}

fn params(v: Variant, m: usize, max_it: usize) -> AcoParams<f64> {
    let mut p = AcoParams::new(v);
    p.m = m;
    p.max_it = max_it;
    p
}

fn build(v: Variant, n: usize, m: usize, max_it: usize) -> BuiltSystem<f64> {
    build_system(instance(n, 3), params(v, m, max_it)).unwrap()
}

fn ctx(n: usize, m: usize, p: AcoParams<f64>) -> Arc<Ctx<f64>> {
    Arc::new(Ctx {
        inst: instance(n, 1),
        params: p,
        vars: Vars::new(n, m, ""),
    })
}

#[test]
fn every_build_is_well_formed_and_binds_what_it_reads() {
    for v in Variant::ALL {
        let sys = build(v, 3, 2, 1);
        assert!(sys.violations().is_empty(), "{v}: {:?}", sys.violations());
        assert_eq!(sys.config.component_count(), sys.roles.len());
    }
    // Readers fail loudly on unbound variables, so a run to termination
    // under several schedulers exercises every condition and transformation.
    for v in Variant::ALL {
        let sys = build(v, 5, 3, 3);
        for mut s in [Scheduler::fixed(), Scheduler::round_robin(), Scheduler::random(4)] {
            let (t, log) = run_checked(&sys, &mut s, 8);
            assert!(log.violations.is_empty(), "{v} {:?}: {:?}", s.policy(), log.violations);
            assert_eq!(t.termination, Termination::Terminated);
        }
    }
}

#[test]
fn builds_are_deterministic() {
    for v in Variant::ALL {
        let a = build(v, 4, 2, 2);
        let b = build(v, 4, 2, 2);
        assert_eq!(a.config.canonical_hash(), b.config.canonical_hash(), "{v}");
    }
}

#[test]
fn initial_states_follow_the_tables() {
    let sys = build(Variant::FineAs, 4, 2, 3);
    assert_eq!(sys.roles, vec![LeafRole::Ant(1), LeafRole::Ant(2), LeafRole::Graph]);
    let a1 = sys.config.state_of(0).unwrap();
    assert_eq!(a1.list("path[1]").unwrap(), &[1.0]);
    assert_eq!(a1.list("edges[1]").unwrap(), &[] as &[f64]);
    assert_eq!(a1.scalar("L[1]").unwrap(), 0.0);
    assert_eq!(sys.config.state_of(1).unwrap().list("path[2]").unwrap(), &[2.0]);
    let g = sys.config.state_of(2).unwrap();
    assert_eq!(g.scalar("numIt").unwrap(), 0.0);
    assert_eq!(g.scalar("final").unwrap(), 0.0);
    assert!(g.list("waiting").unwrap().is_empty());
    assert!(g.list("notified").unwrap().is_empty());
    for i in 1..=4 {
        for j in 1..=4 {
            assert_eq!(g.contains(&format!("tau[{i}][{j}]")), i != j);
        }
    }
}

#[test]
fn end_condition_clauses() {
    let mut p = params(Variant::FineAs, 2, 5);
    p.max_it = 5;
    let c = ctx(4, 2, p);
    let end = ops::end_ants(&c);
    let base = State::from_bindings([
        ("numIt", DataValue::from(2.0)),
        ("waiting", DataValue::list(vec![1.0])),
        ("path[1]", DataValue::list(vec![1.0, 2.0, 3.0, 4.0])),
        ("path[2]", DataValue::list(vec![1.0, 2.0, 3.0, 4.0])),
    ]);
    assert!(!end.holds(&base).unwrap());
    assert!(end.holds(&base.apply_single("numIt", 5.0)).unwrap());
    let all_waiting = base.apply_single("waiting", vec![1.0, 2.0]);
    assert!(end.holds(&all_waiting).unwrap());
    assert!(!end
        .holds(&all_waiting.apply_single("path[2]", vec![2.0, 1.0, 3.0, 4.0]))
        .unwrap());
}

#[test]
fn free_hand_outs_stop_after_m() {
    let c = ctx(4, 3, params(Variant::FineAsFree, 3, 2));
    let max_info = ops::max_info(&c);
    let s = State::from_bindings([("infoSent", 2.0)]);
    assert!(!max_info.holds(&s).unwrap());
    assert!(max_info.holds(&s.apply_single("infoSent", 3.0)).unwrap());

    let add = ops::add_path(&c, 2);
    let s = State::from_bindings([
        ("paths", DataValue::lists(vec![])),
        ("edges", DataValue::lists(vec![])),
        ("costs", DataValue::empty_list()),
        ("path[2]", DataValue::list(vec![2.0, 1.0])),
        ("edges[2]", DataValue::list(vec![4.0])),
        ("L[2]", DataValue::from(0.5)),
    ]);
    let t = add.apply(&s).unwrap();
    assert_eq!(t.lists("paths").unwrap(), &[vec![2.0, 1.0]]);
    assert_eq!(t.lists("edges").unwrap(), &[vec![4.0]]);
    assert_eq!(t.list("costs").unwrap(), &[0.5]);
}

#[test]
fn free_acs_hand_out_branches() {
    let sys = build(Variant::FineAcsFree, 4, 2, 1);
    let g = sys.roles.iter().position(|&r| r == LeafRole::Graph).unwrap();
    // Empty search list and m paths collected: only the completion branch
    // is live, and it is a transformation of the graph.
    let mut c = sys.config.clone();
    {
        let s = c.state_of_mut(g).unwrap();
        s.set("infoSent", 2.0);
        s.set(
            "paths",
            DataValue::lists(vec![vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 1.0, 3.0, 4.0]]),
        );
        s.set("edges", DataValue::lists(vec![vec![1.0, 6.0, 11.0], vec![4.0, 2.0, 11.0]]));
        s.set("costs", vec![1.0, 1.0]);
    }
    let offer = aco_algebra::semantics::enabled_transitions(&c).unwrap();
    assert_eq!(offer.len(), 1);
    assert_eq!(offer[0].winner, Some(g));
}

#[test]
fn one_free_ant_matches_one_ant() {
    // With a single ant "all paths equal" holds vacuously, so the free
    // systems stop after one iteration; the iterations both sides run must
    // agree exactly.
    for (fine, free) in [(Variant::FineAs, Variant::FineAsFree), (Variant::FineAcs, Variant::FineAcsFree)] {
        let inst = instance(5, 9);
        let mut runs = Vec::new();
        for v in [fine, free] {
            let sys = build_system(inst.clone(), params(v, 1, 4)).unwrap();
            let mut obs = IterationObserver::new(&sys);
            let t = run_observed(
                sys.config.clone(),
                &mut Scheduler::fixed(),
                &mut RandomSource::new(21),
                Limits::default(),
                Verbosity::SummaryOnly,
                |e, _, a| obs.observe(e, a),
            )
            .unwrap();
            assert_eq!(t.termination, Termination::Terminated);
            runs.push(obs.iterations);
        }
        assert!(!runs[1].is_empty());
        for (a, b) in runs[0].iter().zip(&runs[1]) {
            assert_eq!(a.trails, b.trails, "{fine} vs {free}, iteration {}", a.iteration);
        }
    }
}

#[test]
fn mmas_differs_from_as_only_in_the_update() {
    let a = build(Variant::FineAs, 4, 2, 2);
    let b = build(Variant::FineMmas, 4, 2, 2);
    let (ra, rb) = (a.registry(), b.registry());
    assert_eq!(ra.transformations, rb.transformations);
    assert_eq!(ra.conditions, rb.conditions);
    assert_eq!(ra.channels, rb.channels);
    let s = a.config.state_of(2).unwrap().clone();
    let mut s = s;
    s.set("path[1]", vec![1.0, 2.0, 3.0, 4.0]);
    s.set("edges[1]", vec![1.0, 6.0, 11.0]);
    s.set("L[1]", 3.0);
    s.set("path[2]", vec![2.0, 1.0, 3.0, 4.0]);
    s.set("edges[2]", vec![4.0, 2.0, 11.0]);
    s.set("L[2]", 2.0);
    let upd = |v| {
        let c = ctx(4, 2, params(v, 2, 2));
        let t = ops::trail_update(&c, "trailUpd", AcoParams::<f64>::new(v).effective_algorithm(), ops::TourSource::Ants);
        t.apply(&s).unwrap()
    };
    let (ta, tb) = (upd(Variant::FineAs), upd(Variant::FineMmas));
    assert_ne!(ta.scalar("tau[1][2]").unwrap(), tb.scalar("tau[1][2]").unwrap());
    for (k, v) in tb.iter() {
        if k.starts_with("tau[") {
            let t = tb.scalar(k).unwrap();
            assert!((0.01..=10.0).contains(&t), "{k} = {v}");
        }
    }
}

#[test]
fn acs_first_report_changes_one_trail() {
    let mut p = params(Variant::FineAcs, 2, 1);
    // Trails start at τ0, a fixed point of the local update, unless τ0 is
    // moved away from the value the decay pulls towards.
    p.tau0 = 0.5;
    let mut sys = build_system(instance(5, 3), p).unwrap();
    let g0 = sys.roles.iter().position(|&r| r == LeafRole::Graph).unwrap();
    sys.config.state_of_mut(g0).unwrap().set("tau[1][2]", 2.0);
    for j in 3..=5 {
        sys.config.state_of_mut(g0).unwrap().set(&format!("tau[1][{j}]"), 2.0);
    }
    let g = sys.roles.iter().position(|&r| r == LeafRole::Graph).unwrap();
    let mut changed = None;
    let mut seen_local = false;
    run_observed(
        sys.config.clone(),
        &mut Scheduler::fixed(),
        &mut RandomSource::new(2),
        Limits::default(),
        Verbosity::SummaryOnly,
        |e, b, a| {
            if !seen_local && transform_name(e).is_some_and(|n| n.starts_with("localUpd")) {
                seen_local = true;
                let (b, a) = (b.state_of(g).unwrap(), a.state_of(g).unwrap());
                changed = Some(b.delta_from(a).len());
            }
        },
    )
    .unwrap();
    assert_eq!(changed, Some(1));
}

#[test]
fn smallest_acs_system_always_terminates() {
    let inst = Arc::new(
        TspInstance::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 3.0], vec![2.0, 3.0, 0.0]]).unwrap(),
    );
    let sys = build_system(inst, params(Variant::FineAcs, 1, 1)).unwrap();
    let g = explore_lts(&sys.config, 1_000_000).unwrap();
    assert!(g.deadlocks.is_empty());
    assert!(!g.terminals.is_empty());
    assert!(g.committed_dead_ends().is_empty());
    println!("states {}, transitions {}", g.state_count(), g.transition_count());
}

#[test]
fn collector_keeps_the_cheapest_solution() {
    let c = ctx(4, 2, params(Variant::CoarseAs, 2, 1));
    let best = ops::calculate_best(&c);
    let s = State::from_bindings([
        ("solutions", DataValue::lists(vec![vec![7.0, 1.0, 2.0, 3.0, 4.0], vec![5.0, 2.0, 1.0, 3.0, 4.0]])),
        ("result", DataValue::empty_list()),
    ]);
    assert_eq!(best.apply(&s).unwrap().list("result").unwrap(), &[5.0, 2.0, 1.0, 3.0, 4.0]);
}

#[test]
fn one_copy_result_is_its_own_selection() {
    let mut p = params(Variant::CoarseMmas, 3, 4);
    p.p = 1;
    let sys = build_system(instance(6, 5), p).unwrap();
    let (t, log) = run_checked(&sys, &mut Scheduler::fixed(), 3);
    assert!(log.violations.is_empty(), "{:?}", log.violations);
    let copy = t.final_config.state_of(0).unwrap();
    let solution = copy.list("solution@1").unwrap();
    let result = sys.collected(&t.final_config).unwrap();
    assert_eq!(result.length, solution[0]);
    let path: Vec<f64> = result.path.iter().map(|&v| v as f64).collect();
    assert_eq!(&path[..], &solution[1..]);
}

#[test]
fn copy_completion_looks_at_the_first_ant_only() {
    let c = Arc::new(Ctx {
        inst: instance(3, 1),
        params: params(Variant::CoarseAs, 2, 1),
        vars: Vars::new(3, 2, "@1"),
    });
    let complete = ops::complete(&c);
    let s = State::from_bindings([
        ("path[1]@1", DataValue::list(vec![1.0, 2.0, 3.0])),
        ("path[2]@1", DataValue::list(vec![2.0])),
    ]);
    assert!(complete.holds(&s).unwrap());
    assert!(!complete.holds(&s.apply_single("path[1]@1", vec![1.0])).unwrap());
}

fn sharing_runs(f: SharingFunction) -> Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut p = params(Variant::CoarseOccasional, 3, 6);
    p.p = 3;
    p.u = 2;
    p.sharing = f;
    let sys = build_system(instance(6, 2), p).unwrap();
    let coord = sys.roles.iter().position(|&r| r == LeafRole::Coordinator).unwrap();
    let mut out = Vec::new();
    run_observed(
        sys.config.clone(),
        &mut Scheduler::fixed(),
        &mut RandomSource::new(6),
        Limits::default(),
        Verbosity::SummaryOnly,
        |e, b, a| {
            if transform_name(e) == Some("trailUpd*") {
                let read = |c: &aco_algebra::semantics::Configuration<f64>| {
                    let s = c.state_of(coord).unwrap();
                    sys.vars
                        .iter()
                        .map(|v| ops::read_trails(s, v).unwrap())
                        .collect::<Vec<_>>()
                };
                out.push((read(b), read(a)));
            }
        },
    )
    .unwrap();
    out
}

#[test]
fn average_sharing_equalizes_and_weighted_one_is_identity() {
    let avg = sharing_runs(SharingFunction::Average);
    assert_eq!(avg.len(), 2);
    for (before, after) in &avg {
        assert_ne!(before[0], before[1]);
        for m in &after[1..] {
            for (x, y) in m.iter().zip(&after[0]) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }
    for (before, after) in sharing_runs(SharingFunction::Weighted(1.0)) {
        assert_eq!(before, after);
    }
}

#[test]
fn per_copy_parameters() {
    let base = params(Variant::CoarseAs, 2, 3);
    let mut slow = base.clone();
    slow.rho = 0.1;
    let sys = build_system_with_copies(instance(5, 1), base.clone(), vec![base.clone(), slow.clone()]).unwrap();
    assert_eq!(sys.copies[1].rho, 0.1);
    let (t, log) = run_checked(&sys, &mut Scheduler::fixed(), 1);
    assert!(log.violations.is_empty());
    assert_eq!(t.termination, Termination::Terminated);
    let mut bad = base.clone();
    bad.m = 3;
    assert!(build_system_with_copies(instance(5, 1), base, vec![bad]).is_err());
}

#[test]
fn invalid_parameters_are_rejected() {
    let inst = instance(4, 1);
    let mut p = params(Variant::FineMmas, 2, 1);
    p.tau0 = 20.0;
    assert!(build_system(inst.clone(), p).is_err());
    let mut p = params(Variant::FineAs, 2, 0);
    p.max_it = 0;
    assert!(build_system(inst.clone(), p).is_err());
    let mut p = params(Variant::FineAs, 2, 1);
    p.starts = vec![1, 9];
    assert!(build_system(inst, p).is_err());
}

#[test]
fn move_cost_matches_path_cost() {
    for v in [Variant::FineAs, Variant::CoarseAcs] {
        let sys = build(v, 7, 3, 1);
        let (t, _) = run_checked(&sys, &mut Scheduler::fixed(), 13);
        let leaf = sys.trail_leaves()[0];
        let s = t.final_config.state_of(leaf).unwrap();
        let v = &sys.vars[0];
        for k in 1..=3 {
            let path = s.index_list(v.path(k)).unwrap();
            if path.len() == 7 {
                let cost = sys.instance.path_cost(&path, false).unwrap();
                assert!((cost - s.scalar(v.length(k)).unwrap()).abs() < 1e-12);
            }
        }
    }
}
