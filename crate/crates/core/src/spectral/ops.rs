//! Fourier multipliers, fractional operators and grid norms.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use statrs::function::gamma::gamma;

use super::{SpectralError, SpectralField};

/// What to do with the `xi = 0` sample when applying a multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroMode {
    /// Evaluate the symbol at zero like any other frequency.
    Evaluate,
    /// Set the zero mode of the output to 0 (mean projection).
    Zero,
    /// Leave the zero mode untouched.
    Keep,
}

/// Multiply the frequency data by `symbol(|xi|, xi)`.
pub fn apply_multiplier<S>(f: &SpectralField, symbol: S) -> Result<SpectralField, SpectralError>
where
    S: Fn(f64, &[f64]) -> Complex64 + Sync,
{
    apply_multiplier_with(f, symbol, ZeroMode::Evaluate)
}

/// [`apply_multiplier`] with an explicit zero-mode policy. The symbol is not
/// evaluated at `xi = 0` unless the policy is [`ZeroMode::Evaluate`].
pub fn apply_multiplier_with<S>(
    f: &SpectralField,
    symbol: S,
    zero_mode: ZeroMode,
) -> Result<SpectralField, SpectralError>
where
    S: Fn(f64, &[f64]) -> Complex64 + Sync,
{
    let grid = f.grid();
    let dim = grid.dim();
    let mags = grid.magnitudes();
    let out: Result<Vec<Complex64>, SpectralError> = f
        .frequency()
        .par_iter()
        .enumerate()
        .map(|(idx, &z)| {
            if idx == 0 {
                match zero_mode {
                    ZeroMode::Zero => return Ok(Complex64::default()),
                    ZeroMode::Keep => return Ok(z),
                    ZeroMode::Evaluate => {}
                }
            }
            let xi = grid.wavevector(idx);
            let s = symbol(mags[idx], &xi[..dim]);
            if !(s.re.is_finite() && s.im.is_finite()) {
                return Err(SpectralError::NonFiniteSymbol {
                    index: idx,
                    magnitude: mags[idx],
                });
            }
            Ok(z * s)
        })
        .collect();
    SpectralField::from_frequency(grid, out?)
}

/// Multiply the frequency data by a precomputed real symbol table.
pub fn multiply_table(f: &SpectralField, table: &[f64]) -> SpectralField {
    assert_eq!(table.len(), f.grid().len(), "symbol table does not match grid");
    let out = f
        .frequency()
        .par_iter()
        .zip(table.par_iter())
        .map(|(&z, &s)| z * s)
        .collect();
    SpectralField::from_frequency(f.grid(), out).expect("length checked")
}

/// `(-Delta)^s f`, the multiplier `|xi|^{2s}`. The zero mode maps to 0.
pub fn fractional_laplacian(f: &SpectralField, s: f64) -> Result<SpectralField, SpectralError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(SpectralError::Order(s));
    }
    apply_multiplier_with(f, |r, _| Complex64::new(r.powf(2.0 * s), 0.0), ZeroMode::Zero)
}

/// Normalized Riesz potential `I_alpha f`, the multiplier `|xi|^{-alpha}`.
///
/// The symbol is singular at the origin; the output mean is set to zero.
pub fn riesz_potential(f: &SpectralField, alpha: f64) -> Result<SpectralField, SpectralError> {
    let n = f.grid().dim() as f64;
    if !(alpha > 0.0 && alpha < n) {
        return Err(SpectralError::RieszOrder { alpha, n });
    }
    apply_multiplier_with(f, |r, _| Complex64::new(r.powf(-alpha), 0.0), ZeroMode::Zero)
}

/// Symbol table of [`riesz_potential`] for reuse across many applications.
pub fn riesz_table(grid: &super::Grid, alpha: f64) -> Vec<f64> {
    grid.magnitudes()
        .iter()
        .enumerate()
        .map(|(i, &r)| if i == 0 { 0.0 } else { r.powf(-alpha) })
        .collect()
}

/// Constant `Gamma((n - alpha)/2) / (pi^{n/2} 2^alpha Gamma(alpha/2))` of the
/// physical-space kernel `c |x|^{alpha - n}` whose Fourier symbol is `|xi|^{-alpha}`.
pub fn normalization_constant(n: f64, alpha: f64) -> Result<f64, SpectralError> {
    if !(n > 0.0 && alpha > 0.0 && alpha < n) {
        return Err(SpectralError::RieszOrder { alpha, n });
    }
    Ok(gamma((n - alpha) / 2.0) / (PI.powf(n / 2.0) * 2f64.powf(alpha) * gamma(alpha / 2.0)))
}

/// Riemann-sum `L^p` norm `(sum |f|^p h^n)^{1/p}`; `p = inf` gives the max norm.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64, SpectralError> {
    if !(p >= 1.0) {
        return Err(SpectralError::Exponent(p));
    }
    let values = f.physical();
    if p == f64::INFINITY {
        return Ok(values.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let dv = f.grid().cell_volume();
    // scale by the max to keep |f|^p representable
    let max = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = if p == 2.0 {
        values.iter().map(|z| (z / max).norm_sqr()).sum()
    } else {
        values.iter().map(|z| (z.norm() / max).powf(p)).sum()
    };
    Ok(max * (sum * dv).powf(1.0 / p))
}

/// Homogeneous Sobolev seminorm `||(-Delta)^{s/2} f||_2` via Plancherel.
///
/// For `s != 0` the zero mode does not contribute.
pub fn sobolev_seminorm(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    let mags = grid.magnitudes();
    let sum: f64 = f
        .frequency()
        .iter()
        .zip(mags)
        .enumerate()
        .map(|(i, (z, &r))| {
            if s == 0.0 {
                z.norm_sqr()
            } else if i == 0 {
                0.0
            } else {
                r.powf(2.0 * s) * z.norm_sqr()
            }
        })
        .sum();
    (sum * grid.cell_volume() / grid.len() as f64).sqrt()
}

/// Frequency-side `L^2` norm; equals the physical Riemann-sum norm by Parseval.
pub fn frequency_l2_norm(f: &SpectralField) -> f64 {
    sobolev_seminorm(f, 0.0)
}

/// Whether a frequency sample survives the spherical 2/3 truncation.
pub fn dealias_mask(grid: &super::Grid) -> Vec<bool> {
    let cutoff = 2.0 / 3.0 * grid.nyquist();
    grid.magnitudes().iter().map(|&r| r <= cutoff).collect()
}

/// Spherical 2/3-rule truncation: modes with `|xi| > (2/3) pi N / L` are zeroed.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mask = dealias_mask(f.grid());
    let out = f
        .frequency()
        .par_iter()
        .zip(mask.par_iter())
        .map(|(&z, &keep)| if keep { z } else { Complex64::default() })
        .collect();
    SpectralField::from_frequency(f.grid(), out).expect("length checked")
}

/// Mean of the field over the periodic box.
pub fn mean(f: &SpectralField) -> Complex64 {
    f.frequency()[0] / f.grid().len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plane_wave(grid: &Grid, k: [f64; 3]) -> SpectralField {
        let dim = grid.dim();
        SpectralField::from_fn(grid, move |x| {
            let phase: f64 = (0..dim).map(|a| k[a] * x[a]).sum();
            Complex64::from_polar(1.0, phase)
        })
    }

    fn rel_l2(a: &SpectralField, b: &SpectralField) -> f64 {
        let diff = a.sub(b).unwrap();
        lp_norm(&diff, 2.0).unwrap() / lp_norm(b, 2.0).unwrap().max(1e-300)
    }

    fn random_field(grid: &Grid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        SpectralField::from_physical(grid, values).unwrap()
    }

    /// Random mean-zero field with modes restricted to |k| <= kmax.
    fn band_limited(grid: &Grid, seed: u64, kmax: f64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = grid
            .magnitudes()
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                if i == 0 || r > kmax {
                    Complex64::default()
                } else {
                    z
                }
            })
            .collect();
        SpectralField::from_frequency(grid, spec).unwrap()
    }

    #[test]
    fn identity_symbol() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let f = random_field(&g, 1);
        let out = apply_multiplier(&f, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(rel_l2(&out, &f) < 1e-14);
    }

    #[test]
    fn plane_wave_is_eigenfunction() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let f = plane_wave(&g, [2.0, -3.0, 0.0]);
        let sym = |r: f64, xi: &[f64]| Complex64::new(r * r + xi[0], 0.5);
        let out = apply_multiplier(&f, sym).unwrap();
        let expected = f.map_physical(|z| z * Complex64::new(13.0 + 2.0, 0.5));
        assert!(rel_l2(&out, &expected) < 1e-13);
    }

    #[test]
    fn inverse_symbols_leave_mean_zero_part() {
        let g = Grid::new(2, 16, 5.0).unwrap();
        let f = random_field(&g, 2);
        let sigma = 1.3;
        let up = apply_multiplier_with(&f, |r, _| Complex64::new(r.powf(2.0 * sigma), 0.0), ZeroMode::Zero).unwrap();
        let down =
            apply_multiplier_with(&up, |r, _| Complex64::new(r.powf(-2.0 * sigma), 0.0), ZeroMode::Zero).unwrap();
        let m = mean(&f);
        let expected = f.map_physical(|z| z - m);
        assert!(rel_l2(&down, &expected) < 1e-13);
    }

    #[test]
    fn non_finite_symbol_is_an_error() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let f = random_field(&g, 3);
        let err = apply_multiplier(&f, |r, _| Complex64::new(1.0 / r, 0.0)).unwrap_err();
        assert!(matches!(err, SpectralError::NonFiniteSymbol { index: 0, .. }));
    }

    #[test]
    fn laplacian_examples() {
        let g = Grid::new(1, 32, 3.0).unwrap();
        let c = SpectralField::from_real_fn(&g, |_| 2.5);
        assert!(fractional_laplacian(&c, 0.7).unwrap().max_abs() < 1e-13);

        let unit = Grid::new(2, 16, 2.0 * PI).unwrap();
        let w = plane_wave(&unit, [1.0, 0.0, 0.0]);
        for s in [0.3, 1.0, 2.2] {
            // round-off in empty modes is amplified by up to nyquist^{2s}
            let tol = 1e-15 * unit.nyquist().powf(2.0 * s).max(100.0);
            let e = rel_l2(&fractional_laplacian(&w, s).unwrap(), &w);
            assert!(e < tol, "s = {s}: {e}");
        }

        let l = 3.0;
        let sine = SpectralField::from_real_fn(&g, |x| (2.0 * PI * x[0] / l).sin());
        let expected = sine.scale((2.0 * PI / l).powi(2));
        assert!(rel_l2(&fractional_laplacian(&sine, 1.0).unwrap(), &expected) < 1e-13);
        assert!(matches!(fractional_laplacian(&sine, 0.0), Err(SpectralError::Order(_))));
    }

    #[test]
    fn riesz_examples() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let w = plane_wave(&g, [3.0, 4.0, 0.0]);
        let out = riesz_potential(&w, 0.5).unwrap();
        assert!(rel_l2(&out, &w.scale(5f64.powf(-0.5))) < 1e-13);

        let f = random_field(&g, 4);
        let alpha = 1.2;
        let back = riesz_potential(&fractional_laplacian(&f, alpha / 2.0).unwrap(), alpha).unwrap();
        let m = mean(&f);
        assert!(rel_l2(&back, &f.map_physical(|z| z - m)) < 1e-12);

        assert!(matches!(
            riesz_potential(&f, 2.0),
            Err(SpectralError::RieszOrder { .. })
        ));
        assert!(matches!(
            riesz_potential(&f, 0.0),
            Err(SpectralError::RieszOrder { .. })
        ));
    }

    #[test]
    fn riesz_table_matches_operator() {
        let g = Grid::new(2, 16, 7.0).unwrap();
        let f = random_field(&g, 5);
        let a = riesz_potential(&f, 0.8).unwrap();
        let b = multiply_table(&f, &riesz_table(&g, 0.8));
        assert!(rel_l2(&a, &b) < 1e-15);
    }

    #[test]
    fn normalization_constants() {
        let c = normalization_constant(3.0, 2.0).unwrap();
        assert!((c - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!((c - 0.0795775).abs() < 1e-7);
        let c = normalization_constant(1.0, 0.5).unwrap();
        assert!((c - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-14);
        let c = normalization_constant(2.0, 1.0).unwrap();
        assert!((c - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(normalization_constant(2.0, 2.0).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let c = SpectralField::from_real_fn(&g, |_| -2.0);
        for p in [1.0, 1.5, 2.0, 3.7] {
            let expected = 2.0 * 3f64.powf(2.0 / p);
            assert!((lp_norm(&c, p).unwrap() - expected).abs() < 1e-12 * expected);
        }
        assert_eq!(lp_norm(&c, f64::INFINITY).unwrap(), 2.0);

        let g1 = Grid::new(1, 64, 8.0).unwrap();
        let mut spike = vec![Complex64::default(); 64];
        spike[17] = Complex64::new(1.0, 0.0);
        let spike = SpectralField::from_physical(&g1, spike).unwrap();
        for p in [1.0, 2.0, 3.0] {
            assert!((lp_norm(&spike, p).unwrap() - g1.spacing().powf(1.0 / p)).abs() < 1e-15);
        }
        assert!(matches!(lp_norm(&spike, 0.5), Err(SpectralError::Exponent(_))));

        let g = Grid::new(1, 512, 40.0).unwrap();
        let gauss = SpectralField::from_real_fn(&g, |x| (-x[0] * x[0]).exp());
        // int exp(-2x^2) dx = sqrt(pi/2)
        let expected = (PI / 2.0).powf(0.25);
        assert!((lp_norm(&gauss, 2.0).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn lp_norm_converges_spectrally() {
        let profile = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp() * (1.0 + 0.5 * x[0]);
        let coarse = SpectralField::from_real_fn(&Grid::new(2, 64, 16.0).unwrap(), profile);
        let fine = SpectralField::from_real_fn(&Grid::new(2, 128, 16.0).unwrap(), profile);
        for p in [2.0, 4.0] {
            let a = lp_norm(&coarse, p).unwrap();
            let b = lp_norm(&fine, p).unwrap();
            assert!((a - b).abs() < 1e-10 * b, "p = {p}: {a} vs {b}");
        }
    }

    #[test]
    fn sobolev_examples() {
        let g = Grid::new(2, 16, 2.0 * PI).unwrap();
        let c = SpectralField::from_real_fn(&g, |_| 1.0);
        assert!(sobolev_seminorm(&c, 1.5) < 1e-13);
        let w = plane_wave(&g, [1.0, 2.0, 0.0]);
        let s = 1.3;
        let expected = 5f64.powf(s / 2.0) * (2.0 * PI);
        assert!((sobolev_seminorm(&w, s) - expected).abs() < 1e-12 * expected);

        let f = random_field(&g, 6);
        let direct = lp_norm(&fractional_laplacian(&f, s / 2.0).unwrap(), 2.0).unwrap();
        assert!((sobolev_seminorm(&f, s) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn dealias_truncates_high_modes() {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let low = plane_wave(&g, [5.0, 0.0, 0.0]);
        let high = plane_wave(&g, [12.0, 0.0, 0.0]);
        assert!(rel_l2(&dealias(&low), &low) < 1e-14);
        assert!(dealias(&high).max_abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn transform_round_trip(seed in any::<u64>(), dim in 1usize..=3) {
            let g = Grid::new(dim, 16, 4.0).unwrap();
            let f = random_field(&g, seed);
            let back = SpectralField::from_frequency(&g, f.frequency().to_vec()).unwrap();
            prop_assert!(rel_l2(&back, &f) < 1e-12);
        }

        #[test]
        fn plancherel(seed in any::<u64>(), dim in 1usize..=3) {
            let g = Grid::new(dim, 16, 2.5).unwrap();
            let f = random_field(&g, seed);
            let a = lp_norm(&f, 2.0).unwrap();
            let b = frequency_l2_norm(&f);
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }

        #[test]
        fn multiplier_composition(seed in any::<u64>(), s1 in 0.1f64..2.0, s2 in -1.0f64..1.0) {
            let g = Grid::new(2, 16, 3.0).unwrap();
            let f = random_field(&g, seed);
            let a = move |r: f64, _: &[f64]| Complex64::new(1.0 + r.powf(s1), 0.0);
            let b = move |r: f64, xi: &[f64]| Complex64::new(s2, xi[0] * 0.1 + r);
            let twice = apply_multiplier(&apply_multiplier(&f, a).unwrap(), b).unwrap();
            let once = apply_multiplier(&f, move |r, xi| a(r, xi) * b(r, xi)).unwrap();
            let err = twice.frequency().iter().zip(once.frequency())
                .map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            let scale = once.frequency().iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-13 * scale);
        }

        #[test]
        fn riesz_inverts_laplacian(seed in any::<u64>(), alpha in 0.1f64..1.9) {
            let g = Grid::new(2, 16, 6.0).unwrap();
            let f = band_limited(&g, seed, 4.0);
            let back = riesz_potential(&fractional_laplacian(&f, alpha / 2.0).unwrap(), alpha).unwrap();
            prop_assert!(rel_l2(&back, &f) < 1e-10);
            let fwd = fractional_laplacian(&riesz_potential(&f, alpha).unwrap(), alpha / 2.0).unwrap();
            prop_assert!(rel_l2(&fwd, &f) < 1e-10);
        }
    }
}
