mod common;

use rand::Rng;

use cyclestab::dynamics::*;
use cyclestab::gains::{eps_to_a, optimal_gains};
use cyclestab::polyroots::{find_roots, DEFAULT_MAX_ITER, DEFAULT_TOL};
use cyclestab::stability::{char_poly, mu_star_by_hodograph};

#[test]
fn multiplier_matches_closed_form() {
    for k in 0..=80 {
        let h = 3.0 + 1e-3 + k as f64 * (1.0 - 1e-3) / 80.0;
        let map = MapModel::logistic(h).unwrap();
        let cycle = map.analytic_cycle().unwrap();
        let m = multiplier(&map, cycle);
        assert!(
            (m - common::logistic_multiplier_closed_form(h)).abs() < 1e-10,
            "h = {h}"
        );
    }
}

#[test]
fn no_cycle_below_period_doubling() {
    assert!(MapModel::logistic(2.9).unwrap().analytic_cycle().is_none());
    assert!(MapModel::logistic(4.1).is_err());
}

#[test]
fn open_loop_settles_at_h_3_2() {
    let map = MapModel::logistic(3.2).unwrap();
    let traj = simulate_open(&map, 0.3, 5000).unwrap();
    let est = detect_cycle2(&map, &traj, 100, 1e-9).unwrap();
    assert!(est.converged);
    let (e1, e2) = map.analytic_cycle().unwrap();
    assert!((est.eta1 - e1).abs() < 1e-9 && (est.eta2 - e2).abs() < 1e-9);
}

#[test]
fn open_loop_at_h_4_does_not_repeat() {
    let map = MapModel::logistic(4.0).unwrap();
    let traj = simulate_open(&map, 0.3, 20_000).unwrap();
    let est = detect_cycle2(&map, &traj, 1000, 1e-6).unwrap();
    assert!(!est.converged);
    assert!(est.spread > 0.1);
}

#[test]
fn domain_is_closed_under_control() {
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let h = rng.gen_range(3.5..3.99);
        let map = MapModel::logistic(h).unwrap();
        let n = rng.gen_range(1..=3);
        let gains = optimal_gains(n).unwrap();
        let seed = open_loop_seed(&map, rng.gen_range(0.05..0.95), 2 * n - 1).unwrap();
        let traj = simulate_closed(&map, &gains, &seed, 5000).unwrap();
        assert!(!traj.escaped());
        assert!(traj.states.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}

#[test]
fn cycle_is_invariant_under_control() {
    let mut rng = common::rng(5);
    let map = MapModel::logistic(3.8).unwrap();
    let (e1, e2) = map.analytic_cycle().unwrap();
    for _ in 0..40 {
        let n = rng.gen_range(1..=5);
        let gains = common::random_gains(&mut rng, n);
        let seed: Vec<f64> = (0..2 * n - 1).map(|i| if i % 2 == 0 { e1 } else { e2 }).collect();
        let traj = simulate_closed(&map, &gains, &seed, 500).unwrap();
        assert!(traj.controls.iter().all(|&u| u == 0.0));
        for (i, &x) in traj.states.iter().enumerate() {
            let want = if i % 2 == 0 { e1 } else { e2 };
            assert!((x - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn rejects_wrong_seed_length() {
    let map = MapModel::logistic(3.9).unwrap();
    let gains = optimal_gains(3).unwrap();
    assert!(simulate_closed(&map, &gains, &[0.3, 0.4], 10).is_err());
}

#[test]
fn growth_matches_spectrum() {
    let mut rng = common::rng(9);
    for _ in 0..12 {
        let n = rng.gen_range(1..=4);
        let gains = common::random_gains(&mut rng, n);
        let mu = -rng.gen_range(0.5..20.0);
        let roots = find_roots(&char_poly(&gains, mu).unwrap(), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let growth = linearized_growth(&gains, mu, 4000).unwrap();
        let expected = roots.max_modulus.powi(2);
        assert!((growth - expected).abs() < 2e-2, "growth {growth} vs {expected}");
    }
}

#[test]
fn stabilization_follows_spectrum() {
    // h = 3.95 has multiplier about -4.6, inside (-4, ...) only for N >= 2.
    let map = MapModel::logistic(3.95).unwrap();
    let (e1, _) = map.analytic_cycle().unwrap();
    let mu = multiplier(&map, map.analytic_cycle().unwrap());
    for (eps, expect_stable) in [(vec![], false), (vec![0.25], true)] {
        let gains = eps_to_a(&eps);
        let mu_star = mu_star_by_hodograph(&gains, 20_000).unwrap().mu_star_abs;
        assert_eq!(mu.abs() < mu_star, expect_stable);
        let seed = open_loop_seed(&map, e1 + 1e-4, 2 * gains.horizon() - 1).unwrap();
        let traj = simulate_closed(&map, &gains, &seed, 20_000).unwrap();
        let est = detect_cycle2(&map, &traj, 100, 1e-6).unwrap();
        assert_eq!(est.converged, expect_stable);
    }
}
