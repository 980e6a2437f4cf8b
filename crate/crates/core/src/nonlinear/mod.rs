//! Hartree-type nonlinearities and the semi-linear integrator.

mod compare;
mod eval;
mod indices;
mod lipschitz;
mod simulate;
mod state;
mod stepper;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::Params;
use crate::spectral::SpectralError;

pub use compare::{compare_nonlinearities, Coincidence, ComparisonReport};
pub use eval::{eval_hartree, eval_modified, eval_power, Nonlinearity};
pub use indices::{gn_theta, lebesgue_indices, LebesgueIndices};
pub use lipschitz::lipschitz_probe;
pub use simulate::{
    simulate, Checkpoint, ResolutionWarning, SimulationConfig, SimulationOutcome, TraceSample, Verdict,
    WeightedNormTrace, TRAJECTORY_CSV_HEADER,
};
pub use state::StateVector;
pub use stepper::{step, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    /// `I_alpha(|u|^{p+q})`.
    Modified,
    /// `|u|^p I_alpha(|u|^q)`.
    Hartree,
    /// `|u|^{p+q}`, the `alpha -> 0` limit of both.
    Power,
}

impl NonlinearityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NonlinearityKind::Modified => "modified",
            NonlinearityKind::Hartree => "hartree",
            NonlinearityKind::Power => "power",
        }
    }
}

impl std::str::FromStr for NonlinearityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "modified" => Ok(NonlinearityKind::Modified),
            "hartree" => Ok(NonlinearityKind::Hartree),
            "power" => Ok(NonlinearityKind::Power),
            other => Err(format!(
                "unknown nonlinearity `{other}` (expected modified, hartree or power)"
            )),
        }
    }
}

/// How the Riesz symbol `|xi|^{-alpha}` treats the zero mode on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RieszZeroMode {
    /// Output mean set to zero.
    #[default]
    Project,
    /// Zero mode passed through unchanged, so the symbol tends to the
    /// identity as `alpha -> 0`.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub zero_mode: RieszZeroMode,
    /// Spherical 2/3 truncation of `u` before, and of `N(u)` after, the
    /// pointwise powers.
    #[serde(default = "default_true")]
    pub dealias: bool,
}

fn default_true() -> bool {
    true
}

impl NonlinearitySpec {
    pub fn new(kind: NonlinearityKind, alpha: f64, p: f64, q: f64) -> Self {
        NonlinearitySpec {
            kind,
            alpha,
            p,
            q,
            zero_mode: RieszZeroMode::Project,
            dealias: true,
        }
    }

    pub fn from_params(params: &Params, kind: NonlinearityKind) -> Self {
        Self::new(kind, params.alpha(), params.p(), params.q())
    }

    pub fn order(&self) -> f64 {
        self.p + self.q
    }

    pub fn with_kind(mut self, kind: NonlinearityKind) -> Self {
        self.kind = kind;
        self
    }

    /// Check kind-consistent ranges for a grid of dimension `dim`.
    ///
    /// Exponents only need to be non-negative with a positive total here so
    /// that exploratory runs below `p, q >= 1` are possible;
    /// [`crate::params::validate_params`] enforces the admissible ranges.
    pub fn validate(&self, dim: usize) -> Result<(), NonlinearError> {
        let n = dim as f64;
        if !(self.p >= 0.0 && self.q >= 0.0 && self.p.is_finite() && self.q.is_finite() && self.order() > 0.0) {
            return Err(NonlinearError::Exponents { p: self.p, q: self.q });
        }
        match self.kind {
            NonlinearityKind::Power => Ok(()),
            NonlinearityKind::Modified | NonlinearityKind::Hartree => {
                if self.alpha > 0.0 && self.alpha < n {
                    Ok(())
                } else {
                    Err(NonlinearError::Spectral(SpectralError::RieszOrder {
                        alpha: self.alpha,
                        n,
                    }))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinearError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("exponents must be non-negative with positive sum, got p = {p}, q = {q}")]
    Exponents { p: f64, q: f64 },
    #[error("time step must be positive and finite, got {0}")]
    TimeStep(f64),
    #[error("horizon must be non-negative and finite, got {0}")]
    Horizon(f64),
    #[error("nonlinearity expects kind {expected:?}, spec has {found:?}")]
    Kind {
        expected: NonlinearityKind,
        found: NonlinearityKind,
    },
    #[error("lipschitz quotient undefined: u and v coincide")]
    Coincident,
    #[error("non-finite values after step at t = {time}")]
    NonFinite { time: f64 },
}
