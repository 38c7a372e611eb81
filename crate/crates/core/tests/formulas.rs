use aco_algebra::aco::formulas::{
    acs_choice, as_update, best_index, clamp, greedy_vertex, local_update, mmas_update, share, transition_probabilities,
    Tour,
};
use aco_algebra::aco::SharingFunction;
use aco_algebra::algebra::EvalError;
use aco_algebra::tsp::{generate_euclidean, TspInstance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Trails listed in `tau`, 1 elsewhere.
fn trails(tau: &[(usize, usize, f64)]) -> impl Fn(usize, usize) -> Result<f64, EvalError> + '_ {
    move |i, j| {
        Ok(tau
            .iter()
            .find(|&&(a, b, _)| a == i && b == j)
            .map_or(1.0, |&(_, _, t)| t))
    }
}

/// Independent evaluation of the random proportional rule.
fn hand_eq1(nums: &[f64]) -> Vec<f64> {
    let total: f64 = nums.iter().sum();
    nums.iter().map(|v| v / total).collect()
}

#[test]
fn single_remaining_vertex_gets_everything() {
    let inst = generate_euclidean::<f64>(4, 1).unwrap();
    let p = transition_probabilities(&inst, 1.0, 2.0, &[1, 2, 4], |_, _| Ok(1.0), 1).unwrap();
    assert_eq!(p, vec![(3, 1.0)]);
}

#[test]
fn symmetric_choice_is_uniform() {
    let inst = TspInstance::<f64>::from_matrix(4, vec![0., 1., 1., 1., 1., 0., 1., 1., 1., 1., 0., 1., 1., 1., 1., 0.]).unwrap();
    let p = transition_probabilities(&inst, 1.0, 2.0, &[1], |_, _| Ok(1.0), 1).unwrap();
    for (_, x) in p {
        assert!((x - 1.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn hand_evaluated_two_vertex_case() {
    // From vertex 1: τ = (2, 1), d = (1, 2) towards vertices 2 and 3.
    let inst = TspInstance::<f64>::from_rows(&[vec![0., 1., 2.], vec![1., 0., 1.], vec![2., 1., 0.]]).unwrap();
    let tau = [(1, 2, 2.0), (1, 3, 1.0)];
    let p = transition_probabilities(&inst, 1.0, 2.0, &[1], trails(&tau), 1).unwrap();
    let expect = hand_eq1(&[2.0 * 1.0, 1.0 * 0.25]);
    assert_eq!(p.len(), 2);
    assert!((p[0].1 - expect[0]).abs() < 1e-12 && (p[0].1 - 0.8889).abs() < 1e-4);
    assert!((p[1].1 - expect[1]).abs() < 1e-12 && (p[1].1 - 0.1111).abs() < 1e-4);
}

#[test]
fn exhausted_or_dead_choices_are_errors() {
    let inst = generate_euclidean::<f64>(3, 1).unwrap();
    assert_eq!(
        transition_probabilities(&inst, 1.0, 2.0, &[1, 2, 3], |_, _| Ok(1.0), 4),
        Err(EvalError::NoAllowedVertex { ant: 4 })
    );
    assert_eq!(
        transition_probabilities(&inst, 1.0, 2.0, &[1], |_, _| Ok(0.0), 2),
        Err(EvalError::ZeroDenominator { ant: 2 })
    );
}

#[test]
fn pseudo_random_rule_cases() {
    // τ·η^β = (3, 5) for vertices 2 and 3.
    let inst = TspInstance::<f64>::from_rows(&[vec![0., 1., 1.], vec![1., 0., 1.], vec![1., 1., 0.]]).unwrap();
    let tau = [(1, 2, 3.0), (1, 3, 5.0)];
    let g = greedy_vertex(&inst, 2.0, &[1], trails(&tau), 1).unwrap();
    assert_eq!(g, 3);
    let probs = transition_probabilities(&inst, 1.0, 2.0, &[1], trails(&tau), 1).unwrap();
    assert_eq!(acs_choice(&probs, g, 0.9, 0.2, 0.0), 3);
    // q0 = 1: always greedy, whatever the draws.
    for k in 0..10 {
        let u = k as f64 / 10.0;
        assert_eq!(acs_choice(&probs, g, 1.0, u, u), 3);
    }
    // q0 = 0: plain proportional sampling.
    assert_eq!(acs_choice(&probs, g, 0.0, 0.5, 0.1), 2);
    assert_eq!(acs_choice(&probs, g, 0.0, 0.5, 0.9), 3);
}

#[test]
fn greedy_ties_take_the_smallest_vertex() {
    let inst = generate_euclidean::<f64>(5, 2).unwrap();
    let uniform = TspInstance::<f64>::from_matrix(5, (0..25).map(|k| if k / 5 == k % 5 { 0.0 } else { 1.0 }).collect()).unwrap();
    assert_eq!(greedy_vertex(&uniform, 2.0, &[3, 1], |_, _| Ok(1.0), 1).unwrap(), 2);
    assert!(greedy_vertex(&inst, 2.0, &[1, 2, 3, 4, 5], |_, _| Ok(1.0), 1).is_err());
}

#[test]
fn as_update_cases() {
    let n = 3;
    let e12 = 1; // (1 - 1) * 3 + (2 - 1)
    let mut tau = vec![1.0_f64; n * n];
    as_update(&mut tau, 0.5, 1.0, &[]).unwrap();
    assert!(tau.iter().all(|&t| t == 0.5));

    let mut tau = vec![1.0_f64; n * n];
    as_update(&mut tau, 0.0, 1.0, &[]).unwrap();
    assert!(tau.iter().all(|&t| t == 1.0));

    let mut tau = vec![1.0_f64; n * n];
    as_update(&mut tau, 0.5, 1.0, &[Tour { edges: &[e12], length: 10.0 }]).unwrap();
    assert!((tau[e12] - 0.6).abs() < 1e-15);
    assert_eq!(tau[2], 0.5);

    let mut tau = vec![1.0_f64; n * n];
    assert_eq!(
        as_update(&mut tau, 0.5, 1.0, &[Tour { edges: &[e12], length: 0.0 }]),
        Err(EvalError::ZeroLength { path: 1 })
    );
}

#[test]
fn mmas_update_cases() {
    assert_eq!(clamp(5.0, 1.0, 3.0), 3.0);
    assert_eq!(clamp(0.2, 1.0, 3.0), 1.0);
    let mut tau = vec![1.0_f64; 4];
    mmas_update(&mut tau, 0.1, Some(Tour { edges: &[1], length: 4.0 }), 0.0, 10.0).unwrap();
    assert!((tau[1] - 1.15).abs() < 1e-15);
    assert!((tau[0] - 0.9).abs() < 1e-15);
    let mut tau = vec![9.9, 0.011];
    mmas_update(&mut tau, 0.5, Some(Tour { edges: &[0], length: 0.01 }), 0.01, 10.0).unwrap();
    assert_eq!(tau, vec![10.0, 0.01]);
}

#[test]
fn mmas_without_bounds_matches_as_for_a_single_tour() {
    let mut a = vec![0.3, 1.7, 2.2, 0.9];
    let mut b = a.clone();
    let t = Tour { edges: &[1, 3], length: 2.5 };
    as_update(&mut a, 0.2, 1.0, &[t]).unwrap();
    mmas_update(&mut b, 0.2, Some(t), 0.0, f64::INFINITY).unwrap();
    assert_eq!(a, b);
}

#[test]
fn local_update_cases() {
    assert_eq!(local_update(2.0, 1.0, 0.5), 0.5);
    assert_eq!(local_update(2.0, 0.0, 0.5), 2.0);
    assert!((local_update(2.0_f64, 0.1, 0.5) - 1.85).abs() < 1e-12);
}

#[test]
fn sharing_functions() {
    let v = [2.0, 4.0];
    assert_eq!(share(SharingFunction::Average, 0, &v, 0), 3.0);
    assert_eq!(share(SharingFunction::Average, 1, &v, 0), 3.0);
    assert_eq!(share(SharingFunction::Weighted(1.0), 1, &v, 0), 4.0);
    assert_eq!(share(SharingFunction::BestCopy, 0, &v, 1), 4.0);
}

#[test]
fn normalization_over_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..1000 {
        let n = rng.gen_range(3..12);
        let inst = generate_euclidean::<f64>(n, trial).unwrap();
        let mut path: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            path.swap(i, rng.gen_range(0..=i));
        }
        path.truncate(rng.gen_range(1..n));
        let tau: Vec<f64> = (0..n * n).map(|_| rng.gen_range(0.01..10.0)).collect();
        let alpha = rng.gen_range(0.0..3.0);
        let beta = rng.gen_range(0.0..5.0);
        let p = transition_probabilities(&inst, alpha, beta, &path, |i, j| Ok(tau[(i - 1) * n + j - 1]), 1).unwrap();
        let sum: f64 = p.iter().map(|x| x.1).sum();
        assert!((sum - 1.0).abs() <= 1e-12, "trial {trial}: {sum}");
        assert_eq!(p.len(), n - path.len());
    }
}

proptest! {
    #[test]
    fn argmin_is_scale_invariant(costs in prop::collection::vec(0.001f64..1e6, 1..20), c in 0.001f64..1e3) {
        let a = best_index(costs.iter().copied());
        let b = best_index(costs.iter().map(|x| x * c));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mmas_stays_within_bounds(
        tau in prop::collection::vec(0.0f64..50.0, 9),
        rho in 0.0f64..=1.0,
        length in 0.01f64..100.0,
        edges in prop::collection::vec(0usize..9, 0..5),
    ) {
        let mut tau = tau;
        mmas_update(&mut tau, rho, Some(Tour { edges: &edges, length }), 0.01, 10.0).unwrap();
        prop_assert!(tau.iter().all(|&t| (0.01..=10.0).contains(&t)));
    }

    #[test]
    fn weighted_one_is_identity(values in prop::collection::vec(0.0f64..100.0, 1..6), s in 0usize..6) {
        let s = s % values.len();
        prop_assert_eq!(share(SharingFunction::Weighted(1.0), s, &values, 0), values[s]);
    }

    #[test]
    fn sharing_keeps_trails_nonnegative(values in prop::collection::vec(0.0f64..100.0, 1..6), l in 0.0f64..=1.0) {
        for s in 0..values.len() {
            for f in [SharingFunction::Average, SharingFunction::BestCopy, SharingFunction::Weighted(l)] {
                prop_assert!(share(f, s, &values, 0) >= 0.0);
            }
        }
    }
}
