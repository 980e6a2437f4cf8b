mod common;

use proptest::prelude::*;

use sigmadamp::params::decay_rate;
use sigmadamp::profiles::Profile;
use sigmadamp::propagator::{evolve_linear, fit_power_law, kernels, linear_decay_curve, log_times, RadialProfile};
use sigmadamp::{Complex64, Grid, PropagatorSymbols, SpectralField, StateVector};

use common::{ode_kernels, rel_dist};

#[test]
fn symbols_solve_the_mode_equation() {
    // second differences of each kernel against v'' + a v' + a^2 v = 0
    let sym = PropagatorSymbols::new(1.5);
    for &r in &[0.2, 0.9, 1.7, 3.0] {
        let a = sym.rate(r);
        let h = 1e-3 / a.max(1.0);
        for &t in &[0.05, 0.7, 2.5, 9.0] {
            for f in [PropagatorSymbols::k0, PropagatorSymbols::k1] {
                let v = |s: f64| f(&sym, s, r);
                let d2 = (v(t + h) - 2.0 * v(t) + v(t - h)) / (h * h);
                let d1 = (v(t + h) - v(t - h)) / (2.0 * h);
                let residual = d2 + a * d1 + a * a * v(t);
                let scale = a * a * (-a * t / 2.0).exp();
                assert!(
                    residual.abs() <= 1e-6 * scale.max(1e-3),
                    "r = {r}, t = {t}: {residual:e}"
                );
            }
        }
    }
}

#[test]
fn initial_values_and_envelope() {
    let sym = PropagatorSymbols::new(2.0);
    for i in 0..40 {
        let r = 0.1 * i as f64;
        let k = sym.eval(0.0, r);
        assert_eq!((k.k0, k.k1, k.dk0, k.dk1), (1.0, 0.0, 0.0, 1.0));
        for j in 0..40 {
            let t = 0.25 * j as f64;
            let a = sym.rate(r);
            let env = 2.0 * (-a * t / 2.0).exp();
            let k = sym.eval(t, r);
            assert!(k.k0.abs() <= env);
            assert!((k.k1 * a).abs() <= env);
        }
    }
}

#[test]
fn first_zero_of_k1() {
    let t = 2.0 * std::f64::consts::PI / 3f64.sqrt();
    let k = kernels(1.0, t);
    assert!(k.k1.abs() < 1e-15);
    assert!(ode_kernels(1.0, t)[1].abs() < 1e-10);
}

#[test]
fn single_mode_matches_ode() {
    let grid = Grid::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
    let wave =
        |k: [f64; 2]| SpectralField::from_fn(&grid, move |x| Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]));
    for (k, sigma, t) in [([1.0, 0.0], 1.0, 3.0), ([2.0, 3.0], 1.5, 0.4), ([0.0, 5.0], 2.0, 0.02)] {
        let f = wave(k);
        let state = StateVector::from_data(f.scale(0.7), f.clone()).unwrap();
        let out = evolve_linear(&state, sigma, t);
        let a = (k[0] * k[0] + k[1] * k[1]).sqrt().powf(sigma);
        let o = ode_kernels(a, t);
        let expect_u = f.scale(0.7 * o[0] + o[1]);
        let expect_ut = f.scale(0.7 * o[2] + o[3]);
        assert!(rel_dist(out.u.frequency(), expect_u.frequency()) < 1e-8);
        assert!(rel_dist(out.ut.frequency(), expect_ut.frequency()) < 1e-8);
    }
}

#[test]
fn decay_bounds_hold_for_every_data_index() {
    // one constant per m over t in [1e-3, 1e4]; the ratio must not keep growing
    let times = log_times(1e-3, 1e4, 71);
    let profile = RadialProfile::Gaussian { width: 1.0 };
    for n in 1..=3 {
        for m in [1.0, 1.25, 1.5, 1.75] {
            let rec = linear_decay_curve(&profile, n, 1.0, m, &times).unwrap();
            let norm = profile.lm_cap_l2_norm(n, m);
            let exponent = 1.0 - decay_rate(n as f64, 1.0, m);
            let ratios: Vec<f64> = rec
                .times
                .iter()
                .zip(&rec.l2)
                .map(|(t, u)| u / ((1.0 + t).powf(exponent) * norm))
                .collect();
            assert!(ratios.iter().all(|r| r.is_finite()));
            let fit = fit_power_law(&rec.times, &ratios, (1e2, 1e4)).unwrap();
            assert!(fit.slope <= 0.05, "n = {n}, m = {m}: ratio grows like t^{}", fit.slope);
        }
    }
}

fn band_limited_state(grid: &Grid, seed: u64) -> StateVector {
    let u0 = Profile::BandLimited { cutoff: 2.0, seed }.sample(grid);
    let u1 = Profile::BandLimited {
        cutoff: 2.5,
        seed: seed + 1,
    }
    .sample(grid);
    StateVector::from_data(u0, u1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn semigroup(seed in 0u64..1000, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0, sigma in 1.0f64..2.0) {
        let grid = Grid::new(2, 16, 8.0).unwrap();
        let s = band_limited_state(&grid, seed);
        let once = evolve_linear(&s, sigma, t1 + t2);
        let twice = evolve_linear(&evolve_linear(&s, sigma, t1), sigma, t2);
        prop_assert!(rel_dist(twice.u.frequency(), once.u.frequency()) < 1e-11);
        prop_assert!(rel_dist(twice.ut.frequency(), once.ut.frequency()) < 1e-11);
    }

    #[test]
    fn symbols_match_ode(r in 0.01f64..3.0, x in 0.0f64..30.0, sigma in 1.0f64..2.0) {
        let a = r.powf(sigma);
        let t = x / a;
        let k = kernels(a, t);
        let o = ode_kernels(a, t);
        let env = (-x / 2.0).exp();
        for (c, e) in [(k.k0, o[0]), (k.dk0 / a, o[2] / a), (a * k.k1, a * o[1]), (k.dk1, o[3])] {
            prop_assert!((c - e).abs() <= 1e-8 * e.abs().max(env));
        }
    }

    #[test]
    fn zero_time_is_identity(seed in 0u64..1000) {
        let grid = Grid::new(1, 32, 10.0).unwrap();
        let s = band_limited_state(&grid, seed);
        let out = evolve_linear(&s, 1.3, 0.0);
        prop_assert_eq!(out.u.frequency(), s.u.frequency());
    }
}
