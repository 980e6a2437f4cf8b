use proptest::prelude::*;

use sigmadamp::nonlinear::{
    compare_nonlinearities, lebesgue_indices, lipschitz_probe, simulate, Nonlinearity, NonlinearityKind,
    NonlinearitySpec, RieszZeroMode, SimulationConfig, Stepper, Verdict,
};
use sigmadamp::params::region_for;
use sigmadamp::profiles::Profile;
use sigmadamp::propagator::evolve_linear;
use sigmadamp::{Grid, SpectralField, StateVector};

fn config(kind: NonlinearityKind) -> SimulationConfig {
    SimulationConfig {
        dim: 2,
        points: 64,
        extent: 32.0,
        sigma: 1.0,
        m: 1.5,
        nonlinearity: NonlinearitySpec::new(kind, 0.5, 2.0, 2.0),
        profile: Profile::Gaussian { width: 1.0 },
        epsilon: 0.3,
        horizon: 5.0,
        dt: 0.05,
        sample_every: 5,
        checkpoint_every: 20,
    }
}

#[test]
fn runs_stay_real_and_radial() {
    for kind in [NonlinearityKind::Modified, NonlinearityKind::Hartree] {
        let out = simulate(&config(kind)).unwrap();
        assert_eq!(out.verdict, Verdict::Bounded);
        assert!(out.imaginary_residue <= 1e-9, "{kind:?}: {}", out.imaginary_residue);
        let u = &out.final_state().u;
        let g = u.grid();
        let n = g.points();
        let max = u.max_abs();
        for idx in 0..g.len() {
            let [i, j, _] = g.multi_index(idx);
            let mirrored = g.flat_index(&[(n - i) % n, j]);
            let swapped = g.flat_index(&[j, i]);
            assert!((u.physical()[idx] - u.physical()[mirrored]).norm() <= 1e-9 * max);
            assert!((u.physical()[idx] - u.physical()[swapped]).norm() <= 1e-9 * max);
        }
    }
}

#[test]
fn zeroed_forcing_step_is_linear_flow() {
    let grid = Grid::new(2, 32, 16.0).unwrap();
    let u0 = Profile::Gaussian { width: 2.0 }.sample(&grid);
    let u1 = Profile::BandLimited { cutoff: 2.0, seed: 4 }.sample(&grid);
    let state = StateVector::from_data(u0, u1).unwrap();
    let spec = NonlinearitySpec::new(NonlinearityKind::Modified, 0.5, 1.0, 1.0);
    let stepper = Stepper::new(&grid, 1.3, 0.1, spec).unwrap();
    let stepped = stepper
        .advance_with(&state, |u| SpectralField::zeros(u.grid()))
        .unwrap();
    let linear = evolve_linear(&state, 1.3, 0.1);
    assert!(stepped.u.sub(&linear.u).unwrap().max_abs() <= 1e-15 * linear.u.max_abs());
    assert!(stepped.ut.sub(&linear.ut).unwrap().max_abs() <= 1e-15 * linear.ut.max_abs());
}

#[test]
fn power_control_matches_small_alpha_limit() {
    let mut c = config(NonlinearityKind::Modified);
    c.nonlinearity.alpha = 1e-8;
    c.nonlinearity.zero_mode = RieszZeroMode::Unit;
    c.profile = Profile::PolyharmonicGaussian { width: 1.0, order: 1 };
    c.epsilon = 1.0;
    let report = compare_nonlinearities(&c, true).unwrap();
    let (gm, gh) = report.power_gaps().unwrap();
    assert!(gm <= 1e-10 && gh <= 1e-10, "gaps {gm:e} {gh:e}");
    assert!(report.summary().contains("power control"));
}

#[test]
fn lipschitz_quotient_stable_under_refinement() {
    let spec = NonlinearitySpec::new(NonlinearityKind::Hartree, 0.5, 1.5, 1.5);
    let sweep = |points: usize| -> f64 {
        let grid = Grid::new(2, points, 16.0).unwrap();
        (0..12u64)
            .map(|seed| {
                let u = Profile::BandLimited { cutoff: 2.0, seed }.sample(&grid);
                let v = Profile::BandLimited {
                    cutoff: 2.0,
                    seed: seed + 100,
                }
                .sample(&grid)
                .scale(0.5);
                lipschitz_probe(&u, &v, &spec).unwrap()
            })
            .fold(0.0, f64::max)
    };
    let coarse = sweep(32);
    let fine = sweep(64);
    assert!(coarse.is_finite() && fine.is_finite());
    assert!((coarse - fine).abs() <= 0.02 * fine, "{coarse} vs {fine}");
}

#[test]
fn zero_data_run_reports_zero_trace() {
    let mut c = config(NonlinearityKind::Hartree);
    c.epsilon = 0.0;
    let out = simulate(&c).unwrap();
    assert!(out.trace.samples().iter().all(|s| s.l2 == 0.0 && s.energy == 0.0));
    assert_eq!(out.final_state().u.max_abs(), 0.0);
    assert_eq!(out.final_state().ut.max_abs(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // theta of both indices lies in [0, 1] exactly when the integrability
    // lower bound and the Sobolev upper bound hold
    #[test]
    fn index_bookkeeping_matches_region(
        n in 1usize..=6,
        sigma in 1.0f64..2.5,
        m in 1.0f64..1.99,
        alpha_frac in 0.05f64..0.95,
        order in 1.0f64..12.0,
    ) {
        let nf = n as f64;
        let alpha = alpha_frac * nf;
        let idx = lebesgue_indices(nf, m, alpha, order);
        let interp = idx.interpolation_admissible(nf, sigma);
        let region = region_for(nf, sigma, m, alpha);
        let lower_ok = order >= region.integrability_lower;
        let upper_ok = 2.0 * sigma >= nf || order <= (nf + 2.0 * alpha) / (nf - 2.0 * sigma);
        let margin = (order - region.integrability_lower).abs().min(if 2.0 * sigma < nf {
            (order - (nf + 2.0 * alpha) / (nf - 2.0 * sigma)).abs()
        } else {
            f64::INFINITY
        });
        prop_assume!(margin > 1e-9);
        prop_assert_eq!(interp, lower_ok && upper_ok);
    }

    #[test]
    fn zero_state_is_stationary(kind in prop_oneof![
        Just(NonlinearityKind::Modified),
        Just(NonlinearityKind::Hartree),
        Just(NonlinearityKind::Power),
    ], dt in 0.01f64..0.5) {
        let grid = Grid::new(2, 16, 8.0).unwrap();
        let spec = NonlinearitySpec::new(kind, 0.7, 1.3, 2.1);
        let stepper = Stepper::new(&grid, 1.0, dt, spec).unwrap();
        let s = stepper.advance(&StateVector::zeros(&grid)).unwrap();
        prop_assert_eq!(s.u.max_abs(), 0.0);
        prop_assert_eq!(s.ut.max_abs(), 0.0);
    }

    #[test]
    fn hartree_with_p_zero_is_modified(seed in 0u64..500) {
        let grid = Grid::new(2, 32, 12.0).unwrap();
        let u = Profile::BandLimited { cutoff: 2.0, seed }.sample(&grid);
        let u = u.map_physical(|z| sigmadamp::Complex64::new(z.re.abs() + 0.1, 0.0));
        let h = Nonlinearity::new(&grid, NonlinearitySpec::new(NonlinearityKind::Hartree, 0.6, 0.0, 2.5)).unwrap();
        let m = Nonlinearity::new(&grid, NonlinearitySpec::new(NonlinearityKind::Modified, 0.6, 0.0, 2.5)).unwrap();
        let a = h.eval(&u);
        let b = m.eval(&u);
        let diff = a.sub(&b).unwrap().max_abs();
        prop_assert!(diff <= 1e-12 * b.max_abs().max(1e-300));
    }
}
