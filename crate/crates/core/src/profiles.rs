//! Initial-data and test-function profiles sampled on grids.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectral::{lp_norm, Grid, SpectralField};
use crate::Complex64;

/// A test function or initial velocity profile. Peak amplitudes are of order
/// one; simulations scale them by `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    /// `exp(-|x|^2 / w^2)`.
    Gaussian { width: f64 },
    /// `exp(1 - 1/(1 - |x|^2/R^2))` inside the ball of radius `R`, zero outside.
    Bump { radius: f64 },
    /// `exp(-|x|^2 / w^2) sin(k x_1)`; odd, hence mean zero.
    OscillatoryGaussian { width: f64, wavenumber: f64 },
    /// `(-Delta)^order` of a Gaussian of width `w`, normalised to unit
    /// Fourier peak. Its first `2 order - 1` moments vanish.
    PolyharmonicGaussian { width: f64, order: u32 },
    /// Real part of a random trigonometric polynomial with wavenumbers
    /// `0 < |xi| <= cutoff`, normalised to unit `L^2` norm. Coefficients are
    /// drawn per integer wave vector, so the function does not depend on `N`.
    BandLimited { cutoff: f64, seed: u64 },
}

impl Profile {
    pub fn name(&self) -> String {
        match *self {
            Profile::Gaussian { width } => format!("gaussian(w={width})"),
            Profile::Bump { radius } => format!("bump(R={radius})"),
            Profile::OscillatoryGaussian { width, wavenumber } => {
                format!("oscillatory-gaussian(w={width},k={wavenumber})")
            }
            Profile::PolyharmonicGaussian { width, order } => format!("polyharmonic-gaussian(w={width},k={order})"),
            Profile::BandLimited { cutoff, seed } => format!("band-limited(cutoff={cutoff},seed={seed})"),
        }
    }

    /// `f(lambda x)` up to a constant factor, when representable.
    pub fn dilated(&self, lambda: f64) -> Option<Profile> {
        match *self {
            Profile::Gaussian { width } => Some(Profile::Gaussian { width: width / lambda }),
            Profile::Bump { radius } => Some(Profile::Bump {
                radius: radius / lambda,
            }),
            Profile::OscillatoryGaussian { width, wavenumber } => Some(Profile::OscillatoryGaussian {
                width: width / lambda,
                wavenumber: wavenumber * lambda,
            }),
            Profile::PolyharmonicGaussian { width, order } => Some(Profile::PolyharmonicGaussian {
                width: width / lambda,
                order,
            }),
            Profile::BandLimited { .. } => None,
        }
    }

    /// Whether the profile is radially symmetric.
    pub fn is_radial(&self) -> bool {
        matches!(
            self,
            Profile::Gaussian { .. } | Profile::Bump { .. } | Profile::PolyharmonicGaussian { .. }
        )
    }

    /// Whether the profile integrates to zero on `R^n`.
    pub fn has_zero_mean(&self) -> bool {
        match self {
            Profile::Gaussian { .. } | Profile::Bump { .. } => false,
            Profile::OscillatoryGaussian { .. } | Profile::BandLimited { .. } => true,
            Profile::PolyharmonicGaussian { order, .. } => *order > 0,
        }
    }

    pub fn sample(&self, grid: &Grid) -> SpectralField {
        match *self {
            Profile::Gaussian { width } => {
                SpectralField::from_real_fn(grid, move |x| (-norm_sq(x) / (width * width)).exp())
            }
            Profile::Bump { radius } => SpectralField::from_real_fn(grid, move |x| {
                let rho = norm_sq(x) / (radius * radius);
                if rho < 1.0 {
                    (1.0 - 1.0 / (1.0 - rho)).exp()
                } else {
                    0.0
                }
            }),
            Profile::OscillatoryGaussian { width, wavenumber } => SpectralField::from_real_fn(grid, move |x| {
                (-norm_sq(x) / (width * width)).exp() * (wavenumber * x[0]).sin()
            }),
            Profile::PolyharmonicGaussian { width, order } => {
                // peak of s^k e^{-s}, s = |xi|^2 w^2 / 4, is (k/e)^k
                let k = order as f64;
                let peak = if order == 0 {
                    1.0
                } else {
                    (k / std::f64::consts::E).powf(k)
                };
                from_centered_transform(grid, move |r| {
                    let s = r * r * width * width / 4.0;
                    s.powf(k) * (-s).exp() / peak
                })
                .real_part()
            }
            Profile::BandLimited { cutoff, seed } => band_limited(grid, cutoff, seed),
        }
    }
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Field whose continuous Fourier transform (for a function centred at the
/// origin) is `fhat(|xi|)`, sampled on the grid.
pub fn from_centered_transform<F>(grid: &Grid, fhat: F) -> SpectralField
where
    F: Fn(f64) -> f64 + Sync,
{
    // F_k = h^{-n} fhat(xi_k) (-1)^{k_1 + ... + k_n}: the sample at index 0 sits at -L/2
    let scale = 1.0 / grid.cell_volume();
    let dim = grid.dim();
    let values = grid
        .magnitudes()
        .par_iter()
        .enumerate()
        .map(|(idx, &r)| {
            let parity: usize = grid.multi_index(idx)[..dim].iter().sum();
            let sign = if parity & 1 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * scale * fhat(r), 0.0)
        })
        .collect();
    SpectralField::from_frequency(grid, values).expect("grid sized")
}

fn band_limited(grid: &Grid, cutoff: f64, seed: u64) -> SpectralField {
    let n = grid.points();
    let dim = grid.dim();
    let extent = grid.extent();
    let kmax = (cutoff * extent / (2.0 * PI)).floor() as i64;
    assert!(
        (kmax as usize) < n / 2,
        "band-limited cutoff {cutoff} is not resolved on {n} points"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::default(); grid.len()];
    let side = (2 * kmax + 1) as usize;
    let count = side.pow(dim as u32);
    for flat in 0..count {
        let mut rest = flat;
        let mut k = [0i64; 3];
        for axis in (0..dim).rev() {
            k[axis] = (rest % side) as i64 - kmax;
            rest /= side;
        }
        // always draw, so the sequence does not depend on which modes are kept
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let xi = (k[..dim].iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt() * 2.0 * PI / extent;
        if xi == 0.0 || xi > cutoff {
            continue;
        }
        let multi: Vec<usize> = k[..dim].iter().map(|&v| v.rem_euclid(n as i64) as usize).collect();
        spectrum[grid.flat_index(&multi)] = z;
    }
    let field = SpectralField::from_frequency(grid, spectrum)
        .expect("grid sized")
        .real_part();
    let norm = lp_norm(&field, 2.0).expect("valid exponent");
    field.scale(1.0 / norm)
}

/// The seeded family used by the inequality checks.
pub fn standard_family(seed: u64) -> Vec<Profile> {
    vec![
        Profile::Gaussian { width: 1.0 },
        Profile::Bump { radius: 2.0 },
        Profile::OscillatoryGaussian {
            width: 1.0,
            wavenumber: 3.0,
        },
        Profile::PolyharmonicGaussian { width: 1.0, order: 2 },
        Profile::BandLimited { cutoff: 3.0, seed },
    ]
}
