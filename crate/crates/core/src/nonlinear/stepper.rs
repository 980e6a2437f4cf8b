use rayon::prelude::*;

use super::{NonlinearError, Nonlinearity, NonlinearitySpec, StateVector};
use crate::propagator::KernelTable;
use crate::spectral::{Grid, SpectralField};
use crate::Complex64;

/// Exponential midpoint integrator: the linear part is propagated exactly,
/// the Duhamel integral is approximated with the nonlinearity frozen at the
/// predicted half step. Second order in `dt`.
#[derive(Debug, Clone)]
pub struct Stepper {
    sigma: f64,
    dt: f64,
    full: KernelTable,
    half: KernelTable,
    nonlinearity: Nonlinearity,
}

impl Stepper {
    pub fn new(grid: &Grid, sigma: f64, dt: f64, spec: NonlinearitySpec) -> Result<Self, NonlinearError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NonlinearError::TimeStep(dt));
        }
        Ok(Stepper {
            sigma,
            dt,
            full: KernelTable::new(grid, sigma, dt),
            half: KernelTable::new(grid, sigma, dt / 2.0),
            nonlinearity: Nonlinearity::new(grid, spec)?,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn grid(&self) -> &Grid {
        self.nonlinearity.grid()
    }

    /// Advance by one step of size `dt`.
    pub fn advance(&self, state: &StateVector) -> Result<StateVector, NonlinearError> {
        self.advance_with(state, |u| self.nonlinearity.eval(u))
    }

    /// Advance by one step with `forcing` in place of the configured
    /// nonlinearity.
    pub fn advance_with<F>(&self, state: &StateVector, forcing: F) -> Result<StateVector, NonlinearError>
    where
        F: Fn(&SpectralField) -> SpectralField,
    {
        let grid = self.grid();
        let u = state.u.frequency();
        let ut = state.ut.frequency();

        let n0 = forcing(&state.u);
        let n0 = n0.frequency();
        let h = &self.half;
        let u_half: Vec<Complex64> = (0..u.len())
            .into_par_iter()
            .map(|i| u[i] * h.k0[i] + ut[i] * h.k1[i] + n0[i] * h.phi1[i])
            .collect();
        let u_half = SpectralField::from_frequency(grid, u_half)?;
        let nh = forcing(&u_half);
        let nh = nh.frequency();

        let f = &self.full;
        let u_new: Vec<Complex64> = (0..u.len())
            .into_par_iter()
            .map(|i| u[i] * f.k0[i] + ut[i] * f.k1[i] + nh[i] * f.phi1[i])
            .collect();
        let ut_new: Vec<Complex64> = (0..u.len())
            .into_par_iter()
            .map(|i| u[i] * f.dk0[i] + ut[i] * f.dk1[i] + nh[i] * f.k1[i])
            .collect();
        let next = StateVector {
            u: SpectralField::from_frequency(grid, u_new)?,
            ut: SpectralField::from_frequency(grid, ut_new)?,
            time: state.time + self.dt,
        };
        if next.is_finite() {
            Ok(next)
        } else {
            Err(NonlinearError::NonFinite { time: next.time })
        }
    }
}

/// One step of size `dt`; builds the kernel tables on every call, so use a
/// [`Stepper`] for repeated stepping.
pub fn step(state: &StateVector, sigma: f64, dt: f64, spec: &NonlinearitySpec) -> Result<StateVector, NonlinearError> {
    Stepper::new(state.grid(), sigma, dt, *spec)?.advance(state)
}
