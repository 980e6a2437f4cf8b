//! Spectral simulation and verification kernels for semi-linear
//! sigma-evolution equations with critical structural damping,
//!
//! ```text
//! u_tt + (-Delta)^sigma u + (-Delta)^{sigma/2} u_t = N(u),   u(0) = u0, u_t(0) = u1,
//! ```
//!
//! with the Hartree nonlinearity `|u|^p I_alpha(|u|^q)` or its modified form
//! `I_alpha(|u|^{p+q})`.
//!
//! * [`params`]: exponent thresholds and the admissible region for `p + q`.
//! * [`spectral`]: periodic grids, transforms, fractional operators, norms.
//! * [`propagator`]: exact linear solution operator and decay curves.
//! * [`nonlinear`]: nonlinearities, exponential stepper, weighted-norm traces.
//! * [`inequality`]: numerical checks of the functional inequalities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod format;
pub mod inequality;
pub mod nonlinear;
pub mod params;
pub mod profiles;
pub mod propagator;
pub mod quadrature;
pub mod spectral;

pub use rustfft::num_complex::Complex64;

pub use nonlinear::{NonlinearityKind, NonlinearitySpec, StateVector, WeightedNormTrace};
pub use params::{admissible_range, validate_params, Context, Params, RawParams, RegionReport};
pub use propagator::{DecayRecord, PropagatorSymbols};
pub use spectral::{Grid, SpectralError, SpectralField};
