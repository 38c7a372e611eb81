use std::sync::Arc;

use aco_algebra::aco::{build_system, build_system_with_copies, AcoParams, Algorithm, Variant};
use aco_algebra::oracle::{brute_force_optimum, run_oracle, trails_csv, verify, Divergence, OracleError, OracleSetup};
use aco_algebra::semantics::Limits;
use aco_algebra::tsp::{generate_euclidean, TspInstance};

fn params(v: Variant, m: usize, max_it: usize) -> AcoParams<f64> {
    let mut p = AcoParams::new(v);
    p.m = m;
    p.max_it = max_it;
    p
}

fn three_cities() -> TspInstance<f64> {
    TspInstance::from_rows(&[vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 3.0], vec![2.0, 3.0, 0.0]]).unwrap()
}

#[test]
fn iteration_cap_bounds_the_snapshots() {
    let inst = generate_euclidean::<f64>(5, 1).unwrap();
    let setup = OracleSetup::fine(Variant::FineAcs).unwrap();
    assert!(matches!(
        run_oracle(&inst, &params(Variant::FineAcs, 2, 0), setup, 1),
        Err(OracleError::Params(_))
    ));
    let t = run_oracle(&inst, &params(Variant::FineAcs, 2, 1), setup, 1).unwrap();
    assert_eq!(t.iterations.len(), 1);
}

#[test]
fn no_evaporation_no_deposit_keeps_trails() {
    let inst = generate_euclidean::<f64>(6, 2).unwrap();
    let mut p = params(Variant::FineAs, 3, 5);
    p.rho = 0.0;
    p.q = 0.0;
    p.tau0 = 0.7;
    // Distinct starts keep paths apart so the convergence stop cannot hide
    // iterations.
    let t = run_oracle(&inst, &p, OracleSetup::fine(Variant::FineAs).unwrap(), 4).unwrap();
    for r in &t.iterations {
        for (e, &x) in r.trails.iter().enumerate() {
            assert_eq!(x, if e / 6 == e % 6 { 0.0 } else { 0.7 });
        }
    }
}

#[test]
fn mmas_trails_stay_in_bounds_and_acs_is_deterministic() {
    let inst = generate_euclidean::<f64>(8, 3).unwrap();
    let mut p = params(Variant::FineMmas, 5, 30);
    p.tau_min = 0.05;
    p.tau_max = 2.0;
    let t = run_oracle(&inst, &p, OracleSetup::fine(Variant::FineMmas).unwrap(), 9).unwrap();
    for r in &t.iterations {
        for (e, &x) in r.trails.iter().enumerate() {
            if e / 8 != e % 8 {
                assert!((0.05..=2.0).contains(&x));
            }
        }
    }
    let setup = OracleSetup::fine(Variant::FineAcs).unwrap();
    let a = run_oracle(&inst, &params(Variant::FineAcs, 4, 10), setup, 5).unwrap();
    let b = run_oracle(&inst, &params(Variant::FineAcs, 4, 10), setup, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn fine_systems_match_the_oracle_exactly() {
    let inst = Arc::new(generate_euclidean::<f64>(6, 17).unwrap());
    for v in [Variant::FineAs, Variant::FineMmas, Variant::FineAcs] {
        for seed in [1, 2, 3] {
            let sys = build_system(inst.clone(), params(v, 4, 10)).unwrap();
            let r = verify(&sys, seed, None, Limits::default()).unwrap();
            assert!(r.matched(), "{v} seed {seed}: {}", r.first_divergence.unwrap());
            assert!(r.deviations.iter().all(|d| d.2 == 0.0));
        }
    }
}

#[test]
fn global_best_and_closed_tours_match_too() {
    let inst = Arc::new(generate_euclidean::<f64>(6, 4).unwrap());
    let mut p = params(Variant::FineAcs, 3, 6);
    p.acs_global_best = true;
    p.closed_tour = true;
    let sys = build_system(inst.clone(), p).unwrap();
    assert!(verify(&sys, 7, None, Limits::default()).unwrap().matched());
    let mut p = params(Variant::CoarseMmas, 3, 6);
    p.closed_tour = true;
    let sys = build_system(inst, p).unwrap();
    assert!(verify(&sys, 7, None, Limits::default()).unwrap().matched());
}

#[test]
fn independent_copies_match_their_oracles() {
    let inst = Arc::new(generate_euclidean::<f64>(6, 8).unwrap());
    for v in [Variant::CoarseAs, Variant::CoarseMmas, Variant::CoarseAcs] {
        let mut p = params(v, 4, 10);
        p.p = 2;
        let sys = build_system(inst.clone(), p.clone()).unwrap();
        let r = verify(&sys, 11, None, Limits::default()).unwrap();
        assert!(r.matched(), "{v}: {}", r.first_divergence.unwrap());
        assert_eq!(r.deviations.len(), 20);
        // Copies with their own parameters each follow their own oracle.
        let mut other = p.clone();
        other.rho = 0.2;
        other.alpha = 2.0;
        let sys = build_system_with_copies(inst.clone(), p.clone(), vec![p.clone(), other]).unwrap();
        assert!(verify(&sys, 11, None, Limits::default()).unwrap().matched());
    }
}

#[test]
fn perturbed_oracle_diverges_at_the_first_iteration() {
    let inst = Arc::new(generate_euclidean::<f64>(6, 17).unwrap());
    let sys = build_system(inst, params(Variant::FineAs, 4, 10)).unwrap();
    let r = verify(&sys, 1, Some(0.4), Limits::default()).unwrap();
    let d = r.first_divergence.expect("ρ differs");
    assert!(matches!(d, Divergence::Trail { iteration: 1, .. }), "{d}");
}

#[test]
fn variants_without_a_counterpart_are_refused() {
    let inst = Arc::new(generate_euclidean::<f64>(5, 1).unwrap());
    for v in [Variant::FineAsFree, Variant::CoarseOccasional] {
        let sys = build_system(inst.clone(), params(v, 2, 2)).unwrap();
        assert!(verify(&sys, 1, None, Limits::default()).is_err());
    }
}

#[test]
fn brute_force_examples() {
    let (path, cost) = brute_force_optimum(&three_cities(), false).unwrap();
    assert_eq!((path, cost), (vec![1, 2, 3], 4.0));
    // Hand enumeration of the open paths from vertex 1: [1,2,3] = 1 + 3,
    // [1,3,2] = 2 + 3.
    assert_eq!(three_cities().path_cost(&[1, 3, 2], false).unwrap(), 5.0);

    let inst = generate_euclidean::<f64>(7, 12).unwrap();
    let (path, cost) = brute_force_optimum(&inst, true).unwrap();
    let mut rev = path.clone();
    rev[1..].reverse();
    assert!((inst.path_cost(&rev, true).unwrap() - cost).abs() < 1e-12);
    assert!(path < rev || (inst.path_cost(&rev, true).unwrap() > cost));
}

#[test]
fn trail_csv_round_trips() {
    let inst = generate_euclidean::<f64>(5, 1).unwrap();
    let t = run_oracle(&inst, &params(Variant::FineAs, 2, 3), OracleSetup::copy(Algorithm::As, 1), 3).unwrap();
    let csv = t.trail_csv(1).unwrap();
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(csv.as_bytes());
    let back: Vec<f64> = rd
        .records()
        .flat_map(|r| r.unwrap().iter().map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect();
    assert_eq!(back, t.iterations[0].trails);
    assert_eq!(trails_csv(&back, 5), csv);
}
