//! Exact solution operator of the linear damped sigma-evolution equation.
//!
//! Each Fourier mode `v(t) = u_hat(t, xi)` solves
//!
//! ```text
//! v'' + a v' + a^2 v = 0,   a = |xi|^sigma,
//! ```
//!
//! whose characteristic roots `a (-1 +- i sqrt 3) / 2` are complex for every
//! `a > 0`: the modes are uniformly damped oscillators and no branch switch
//! is needed. In the scaled time `x = a t` all kernels are functions of `x`
//! alone; for small `x` they are summed from their Taylor series, which also
//! covers the degenerate mode `a = 0` (where `v = v0 + t v1`).

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::format::float17;
use crate::nonlinear::StateVector;
use crate::params::decay_rate;
use crate::quadrature::{geometric_breakpoints, Composite, QuadratureError};
use crate::spectral::{Grid, SpectralField};

/// Scaled times below this use the Taylor series.
const SERIES_LIMIT: f64 = 0.5;
const SERIES_TERMS: usize = 32;
const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// Values of the solution multipliers at one `(t, |xi|)`.
///
/// `u_hat(t) = k0 u0_hat + k1 u1_hat` and `u_t_hat(t) = dk0 u0_hat + dk1 u1_hat`;
/// `phi1 = int_0^t k1` is the Duhamel weight of a forcing frozen over `[0, t]`.
/// The kernels are real because the characteristic roots are conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernels {
    pub k0: f64,
    pub k1: f64,
    pub dk0: f64,
    pub dk1: f64,
    pub phi1: f64,
}

/// Solution multipliers of the linear equation for a fixed `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSymbols {
    sigma: f64,
}

pub fn propagator_symbols(sigma: f64) -> PropagatorSymbols {
    PropagatorSymbols::new(sigma)
}

impl PropagatorSymbols {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
        PropagatorSymbols { sigma }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Damping rate `|xi|^sigma` of a mode.
    pub fn rate(&self, r: f64) -> f64 {
        r.powf(self.sigma)
    }

    pub fn eval(&self, t: f64, r: f64) -> Kernels {
        kernels(self.rate(r), t)
    }

    pub fn k0(&self, t: f64, r: f64) -> f64 {
        self.eval(t, r).k0
    }
    pub fn k1(&self, t: f64, r: f64) -> f64 {
        self.eval(t, r).k1
    }
    pub fn dk0(&self, t: f64, r: f64) -> f64 {
        self.eval(t, r).dk0
    }
    pub fn dk1(&self, t: f64, r: f64) -> f64 {
        self.eval(t, r).dk1
    }
}

/// Kernels for damping rate `a = |xi|^sigma` at time `t`.
pub fn kernels(a: f64, t: f64) -> Kernels {
    let x = a * t;
    if x < SERIES_LIMIT {
        let s = scaled_series(x);
        // k1 = t W(x)/x, phi1 = t^2 Omega(x)/x^2, dk0 = -a^2 k1
        let k1 = t * s.w_over_x;
        Kernels {
            k0: s.z,
            k1,
            dk0: -a * a * k1,
            dk1: s.dw,
            phi1: t * t * s.omega_over_x2,
        }
    } else {
        let decay = (-0.5 * x).exp();
        let (sin, cos) = (HALF_SQRT3 * x).sin_cos();
        let w = decay * sin / HALF_SQRT3;
        let z = decay * (cos + sin / 3f64.sqrt());
        let dw = decay * (cos - sin / 3f64.sqrt());
        Kernels {
            k0: z,
            k1: w / a,
            dk0: -a * w,
            dk1: dw,
            phi1: (1.0 - z) / (a * a),
        }
    }
}

struct Series {
    z: f64,
    dw: f64,
    w_over_x: f64,
    omega_over_x2: f64,
}

/// Taylor sums of the scaled kernels of `V'' + V' + V = 0`.
fn scaled_series(x: f64) -> Series {
    // w: W(0) = 0, W'(0) = 1;  z: Z(0) = 1, Z'(0) = 0
    let mut w = [0.0f64; SERIES_TERMS + 2];
    let mut z = [0.0f64; SERIES_TERMS + 2];
    w[1] = 1.0;
    z[0] = 1.0;
    for k in 0..SERIES_TERMS {
        let kf = k as f64;
        let denom = (kf + 2.0) * (kf + 1.0);
        w[k + 2] = -((kf + 1.0) * w[k + 1] + w[k]) / denom;
        z[k + 2] = -((kf + 1.0) * z[k + 1] + z[k]) / denom;
    }
    let mut out = Series {
        z: 0.0,
        dw: 0.0,
        w_over_x: 0.0,
        omega_over_x2: 0.0,
    };
    // Horner from the top
    for k in (0..SERIES_TERMS + 2).rev() {
        out.z = out.z * x + z[k];
    }
    for k in (1..SERIES_TERMS + 2).rev() {
        out.dw = out.dw * x + k as f64 * w[k];
        out.w_over_x = out.w_over_x * x + w[k];
        out.omega_over_x2 = out.omega_over_x2 * x + w[k] / (k as f64 + 1.0);
    }
    out
}

/// Per-mode kernel tables for one grid and one time increment.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub t: f64,
    pub k0: Vec<f64>,
    pub k1: Vec<f64>,
    pub dk0: Vec<f64>,
    pub dk1: Vec<f64>,
    pub phi1: Vec<f64>,
}

impl KernelTable {
    pub fn new(grid: &Grid, sigma: f64, t: f64) -> Self {
        let symbols = PropagatorSymbols::new(sigma);
        let values: Vec<Kernels> = grid.magnitudes().par_iter().map(|&r| symbols.eval(t, r)).collect();
        KernelTable {
            t,
            k0: values.iter().map(|k| k.k0).collect(),
            k1: values.iter().map(|k| k.k1).collect(),
            dk0: values.iter().map(|k| k.dk0).collect(),
            dk1: values.iter().map(|k| k.dk1).collect(),
            phi1: values.iter().map(|k| k.phi1).collect(),
        }
    }

    /// Propagate `(u, u_t)` spectra by `t`.
    pub fn propagate(
        &self,
        u: &[crate::Complex64],
        ut: &[crate::Complex64],
    ) -> (Vec<crate::Complex64>, Vec<crate::Complex64>) {
        let u_new = (0..u.len())
            .into_par_iter()
            .map(|i| u[i] * self.k0[i] + ut[i] * self.k1[i])
            .collect();
        let ut_new = (0..u.len())
            .into_par_iter()
            .map(|i| u[i] * self.dk0[i] + ut[i] * self.dk1[i])
            .collect();
        (u_new, ut_new)
    }
}

/// Advance a state by `t` under the linear equation, exactly in time.
pub fn evolve_linear(state: &StateVector, sigma: f64, t: f64) -> StateVector {
    let grid = state.grid().clone();
    if t == 0.0 {
        return state.clone();
    }
    let table = KernelTable::new(&grid, sigma, t);
    let (u, ut) = table.propagate(state.u.frequency(), state.ut.frequency());
    StateVector {
        u: SpectralField::from_frequency(&grid, u).expect("grid sized"),
        ut: SpectralField::from_frequency(&grid, ut).expect("grid sized"),
        time: state.time + t,
    }
}

/// Radial data with an analytic Fourier transform on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `exp(-|x|^2 / width^2)`.
    Gaussian { width: f64 },
}

impl RadialProfile {
    pub fn gaussian() -> Self {
        RadialProfile::Gaussian { width: 1.0 }
    }

    pub fn name(&self) -> String {
        match self {
            RadialProfile::Gaussian { width } => format!("gaussian(width={width})"),
        }
    }

    /// Fourier transform `int f(x) exp(-i x.xi) dx` at `|xi| = r`.
    pub fn fourier(&self, n: usize, r: f64) -> f64 {
        match *self {
            RadialProfile::Gaussian { width } => {
                (PI * width * width).powf(n as f64 / 2.0) * (-width * width * r * r / 4.0).exp()
            }
        }
    }

    /// Exact `L^m(R^n)` norm.
    pub fn lm_norm(&self, n: usize, m: f64) -> f64 {
        match *self {
            RadialProfile::Gaussian { width } => (PI * width * width / m).powf(n as f64 / (2.0 * m)),
        }
    }

    /// `||f||_{L^m} + ||f||_{L^2}`.
    pub fn lm_cap_l2_norm(&self, n: usize, m: f64) -> f64 {
        self.lm_norm(n, m) + self.lm_norm(n, 2.0)
    }

    /// Radius beyond which `|f_hat|^2` is below `1e-14` of its peak (with margin).
    fn frequency_cutoff(&self) -> f64 {
        match *self {
            RadialProfile::Gaussian { width } => 10.0 / width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayMeta {
    pub n: usize,
    pub sigma: f64,
    pub m: f64,
    pub profile: String,
}

/// Time series of `||u||_2` and `||((-Delta)^{sigma/2} u, u_t)||_2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub energy: Vec<f64>,
    pub predicted_l2_exponent: f64,
    pub predicted_energy_exponent: f64,
    pub meta: DecayMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    L2,
    Energy,
}

impl DecayRecord {
    pub fn values(&self, quantity: Quantity) -> &[f64] {
        match quantity {
            Quantity::L2 => &self.l2,
            Quantity::Energy => &self.energy,
        }
    }

    pub const CSV_HEADER: &'static str = "time,l2_norm,energy_norm,predicted_l2_exp,predicted_energy_exp";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for i in 0..self.times.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                float17(self.times[i]),
                float17(self.l2[i]),
                float17(self.energy[i]),
                float17(self.predicted_l2_exponent),
                float17(self.predicted_energy_exponent)
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecayError {
    #[error("radial quadrature failed at t = {time}: {source}")]
    Quadrature {
        time: f64,
        #[source]
        source: QuadratureError,
    },
    #[error("times must be positive, finite and strictly increasing")]
    Times,
    #[error("dimension must be positive")]
    Dimension,
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Predicted exponent of `(1+t)` for `||u||_2`: `1 - (n/sigma)(1/m - 1/2)`.
pub fn predicted_l2_exponent(n: f64, sigma: f64, m: f64) -> f64 {
    1.0 - decay_rate(n, sigma, m)
}

/// Predicted exponent of `(1+t)` for the energy norm: `-(n/sigma)(1/m - 1/2)`.
pub fn predicted_energy_exponent(n: f64, sigma: f64, m: f64) -> f64 {
    -decay_rate(n, sigma, m)
}

/// Radial quadrature of both norms at one time, on `R^n` (no grid).
pub fn radial_norms(
    profile: &RadialProfile,
    n: usize,
    sigma: f64,
    t: f64,
    quad: &Composite,
) -> Result<(f64, f64), QuadratureError> {
    let symbols = PropagatorSymbols::new(sigma);
    let nf = n as f64;
    // (2 pi)^{-n} |S^{n-1}|
    let sphere = 2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0);
    let prefactor = sphere / (2.0 * PI).powf(nf);

    let r_gauss = profile.frequency_cutoff();
    let r_max = if t > 0.0 {
        r_gauss.min((80.0 / t).powf(1.0 / sigma))
    } else {
        r_gauss
    };
    let scale = if t > 0.0 {
        t.powf(-1.0 / sigma).min(r_max)
    } else {
        r_max
    };
    let breakpoints = geometric_breakpoints(scale / 64.0, r_max);

    let l2 = quad.integrate(
        |r| {
            let k = symbols.eval(t, r);
            let f = profile.fourier(n, r);
            (k.k1 * f).powi(2) * r.powi(n as i32 - 1)
        },
        &breakpoints,
    )?;
    let energy = quad.integrate(
        |r| {
            let k = symbols.eval(t, r);
            let f = profile.fourier(n, r);
            let rs = symbols.rate(r);
            ((rs * k.k1).powi(2) + k.dk1.powi(2)) * f * f * r.powi(n as i32 - 1)
        },
        &breakpoints,
    )?;
    Ok(((prefactor * l2.value).sqrt(), (prefactor * energy.value).sqrt()))
}

/// Decay curve of the linear solution with `u0 = 0` and radial `u1`, by
/// radial quadrature in continuous frequency.
pub fn linear_decay_curve(
    profile: &RadialProfile,
    n: usize,
    sigma: f64,
    m: f64,
    times: &[f64],
) -> Result<DecayRecord, DecayError> {
    if n == 0 {
        return Err(DecayError::Dimension);
    }
    if times.is_empty() || times.iter().any(|t| !(t.is_finite() && *t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(DecayError::Times);
    }
    let quad = Composite::default();
    let norms: Result<Vec<(f64, f64)>, DecayError> = times
        .par_iter()
        .map(|&t| {
            radial_norms(profile, n, sigma, t, &quad).map_err(|source| DecayError::Quadrature { time: t, source })
        })
        .collect();
    let norms = norms?;
    let nf = n as f64;
    Ok(DecayRecord {
        times: times.to_vec(),
        l2: norms.iter().map(|v| v.0).collect(),
        energy: norms.iter().map(|v| v.1).collect(),
        predicted_l2_exponent: predicted_l2_exponent(nf, sigma, m),
        predicted_energy_exponent: predicted_energy_exponent(nf, sigma, m),
        meta: DecayMeta {
            n,
            sigma,
            m,
            profile: profile.name(),
        },
    })
}

/// `count` logarithmically spaced times in `[start, end]`.
pub fn log_times(start: f64, end: f64, count: usize) -> Vec<f64> {
    assert!(start > 0.0 && end > start && count >= 2);
    let (a, b) = (start.ln(), end.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("fit window [{start}, {end}] holds {count} samples, at least 8 are needed")]
    TooFewSamples { start: f64, end: f64, count: usize },
    #[error("fit window contains a non-positive or non-finite value")]
    NonPositive,
    #[error("fit window has no spread in log(1+t)")]
    Degenerate,
}

/// Least-squares fit `log v = slope * log(1+t) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub samples: usize,
}

/// Fit the power-law exponent of `values` against `1 + t` over `window`.
pub fn fit_power_law(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<DecayFit, FitError> {
    let (start, end) = window;
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= start && **t <= end)
        .map(|(&t, &v)| (t, v))
        .collect();
    if pts.len() < 8 {
        return Err(FitError::TooFewSamples {
            start,
            end,
            count: pts.len(),
        });
    }
    if pts.iter().any(|(_, v)| !(v.is_finite() && *v > 0.0)) {
        return Err(FitError::NonPositive);
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(FitError::Degenerate);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(DecayFit {
        slope,
        intercept,
        residual,
        samples: pts.len(),
    })
}

/// Fitted decay exponent of one norm of a record.
pub fn fit_decay_exponent(record: &DecayRecord, quantity: Quantity, window: (f64, f64)) -> Result<DecayFit, FitError> {
    fit_power_law(&record.times, record.values(quantity), window)
}
