mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use rand::Rng;

use cyclestab::gains::{eps_to_a, optimal_gains};
use cyclestab::polyroots::{find_roots, DEFAULT_MAX_ITER, DEFAULT_TOL};
use cyclestab::stability::*;

#[test]
fn optimal_j_values() {
    for n in 1..=10 {
        let j = j_value(&optimal_gains(n).unwrap(), 100_000).unwrap();
        assert!((j - 1.0 / n as f64).abs() < 1e-8, "N = {n}: J = {j}");
    }
}

#[test]
fn min_omega_is_minus_j_squared_at_optimum() {
    for n in 1..=10 {
        let g = optimal_gains(n).unwrap();
        let j = j_value(&g, 100_000).unwrap();
        let (_, omega) = min_omega(&g, 100_000).unwrap();
        assert!((-omega - j * j).abs() < 1e-8, "N = {n}: {omega} vs {j}");
    }
}

#[test]
fn optimal_mu_star_is_n_squared() {
    for n in 1..=6 {
        let g = optimal_gains(n).unwrap();
        let target = (n * n) as f64;
        let sweep = mu_star_by_sweep(&g, default_mu_max(&g), 1e-10).unwrap();
        let hodo = mu_star_by_hodograph(&g, 100_000).unwrap();
        assert!(!sweep.censored);
        assert!(
            ((sweep.mu_star_abs - target) / target).abs() < 1e-4,
            "N = {n}: sweep {}",
            sweep.mu_star_abs
        );
        assert!(
            ((hodo.mu_star_abs - target) / target).abs() < 1e-4,
            "N = {n}: hodograph {}",
            hodo.mu_star_abs
        );
    }
}

#[test]
fn sweep_examples_to_1e6() {
    let r = mu_star_by_sweep(&optimal_gains(3).unwrap(), 36.0, 1e-10).unwrap();
    assert!((r.mu_star_abs - 9.0).abs() < 1e-6, "{}", r.mu_star_abs);
    match r.witness {
        Witness::Roots { roots, .. } => assert!(!roots.is_empty()),
        _ => panic!("sweep witness must be roots"),
    }
}

#[test]
fn hodograph_n2_optimal() {
    let r = mu_star_by_hodograph(&optimal_gains(2).unwrap(), 10_000).unwrap();
    assert!((r.mu_star_abs - 4.0).abs() < 1e-5);
    let Witness::Crossing { t, omega } = r.witness else {
        panic!()
    };
    assert!((omega + 0.25).abs() < 1e-10);
    assert!((t - FRAC_PI_2).abs() < 1e-6);
}

#[test]
fn methods_agree_on_random_gains() {
    let mut rng = common::rng(7);
    for _ in 0..15 {
        let n = rng.gen_range(1..=5);
        let g = common::random_gains(&mut rng, n);
        let sweep = mu_star_by_sweep(&g, default_mu_max(&g), 1e-10).unwrap();
        let hodo = mu_star_by_hodograph(&g, 20_000).unwrap();
        let rel = (sweep.mu_star_abs - hodo.mu_star_abs).abs() / hodo.mu_star_abs;
        assert!(
            rel < 1e-4,
            "{:?}: sweep {} vs hodograph {}",
            g.weights(),
            sweep.mu_star_abs,
            hodo.mu_star_abs
        );
    }
}

#[test]
fn negative_crossing_exists() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let g = common::random_gains(&mut rng, n);
        let crossings = axis_crossings(&g, 2000).unwrap();
        assert!(crossings.iter().any(|&(_, re)| re < 0.0), "{:?}", g.weights());
    }
}

#[test]
fn brute_force_n2_finds_optimum() {
    let r = brute_force_j_min(2, 100).unwrap();
    assert!(r.best_j >= 0.5 - 1e-3 && r.best_j <= 0.5 + 1e-2, "{}", r.best_j);
    assert!(
        (r.best_a[0] - 0.75).abs() < 0.01 && (r.best_a[1] - 0.25).abs() < 0.01,
        "{:?}",
        r.best_a
    );
}

#[test]
fn brute_force_is_deterministic() {
    let a = brute_force_j_min(2, 30).unwrap();
    let b = brute_force_j_min(2, 30).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fejer_identity_holds_on_grid() {
    for n in 1..=12 {
        for k in 1..50 {
            let t = PI * k as f64 / 50.0;
            assert!(fejer_identity_residual(n, t).unwrap().abs() <= 1e-10);
        }
    }
}

#[test]
fn hodograph_samples_are_consistent() {
    let g = eps_to_a(&[0.3, -0.4, 0.2]);
    let pair = TrigPair::new(&g);
    let curve = hodograph_curve(&g, 1001).unwrap();
    assert_eq!(curve.samples.len(), 1001);
    let dt = curve.samples[1].t - curve.samples[0].t;
    for w in curve.samples.windows(2) {
        assert!((w[1].t - w[0].t - dt).abs() < 1e-12);
    }
    for s in &curve.samples {
        let p = pair.symbol(s.t).norm();
        assert!((s.x * s.x + s.y * s.y - p.powi(4)).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn branches_have_equal_moduli(eps in prop::collection::vec(-0.99..0.99f64, 0..5), m in 0.1..30.0f64) {
        let g = eps_to_a(&eps);
        let plus = find_roots(&char_poly_branch(&g, -m, Branch::Plus).unwrap(), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let minus = find_roots(&char_poly_branch(&g, -m, Branch::Minus).unwrap(), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!((plus.max_modulus - minus.max_modulus).abs() < 1e-10);
    }

    #[test]
    fn char_poly_structure(eps in prop::collection::vec(-0.99..0.99f64, 0..6), m in 0.1..30.0f64) {
        let g = eps_to_a(&eps);
        let p = char_poly(&g, -m).unwrap();
        let n = g.horizon();
        prop_assert_eq!(p.degree(), 2 * n - 1);
        prop_assert_eq!(p.leading(), num_complex::Complex64::new(1.0, 0.0));
        let k = num_complex::Complex64::new(0.0, m.sqrt());
        for (d, c) in p.coeffs()[..2 * n - 1].iter().enumerate() {
            let from_top = 2 * n - 2 - d;
            let expected = if from_top.is_multiple_of(2) { k * g.weights()[from_top / 2] } else { num_complex::Complex64::new(0.0, 0.0) };
            prop_assert!((c - expected).norm() == 0.0);
        }
    }

    #[test]
    fn j_squared_inverse_matches_hodograph(eps in prop::collection::vec(-0.95..0.95f64, 1..4)) {
        let g = eps_to_a(&eps);
        let j = j_value(&g, 20_000).unwrap();
        let hodo = mu_star_by_hodograph(&g, 20_000).unwrap();
        prop_assert!((1.0 / (j * j) - hodo.mu_star_abs).abs() <= 1e-6 * hodo.mu_star_abs);
    }
}
