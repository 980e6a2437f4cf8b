//! Model parameters, exponent thresholds and the admissible region for `p + q`.
//!
//! Every function here is a pure function of its arguments. Dimensions are
//! accepted as reals so threshold curves can be traced in continuous `n`;
//! grid-backed code asks [`Params::spatial_dim`] for an integer dimension.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used when comparing the dimension against its cap.
const DIMENSION_CAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ExponentError {
    #[error("subcritical dimension: n/m = {ratio} does not exceed sigma = {sigma}")]
    SubcriticalDimension { ratio: f64, sigma: f64 },
    #[error("alpha must lie in (0, n), got alpha = {alpha} with n = {n}")]
    AlphaOutOfRange { alpha: f64, n: f64 },
    #[error("invalid argument {name} = {value}")]
    InvalidArgument { name: &'static str, value: f64 },
}

/// Which estimate a parameter tuple is meant for.
///
/// Linear decay estimates accept `m` in `[1, 2)`. The small-data existence
/// result for the modified nonlinearity needs `m` in `(1, 2)`: the Riesz
/// potential is not bounded on `L^1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Context {
    LinearEstimate,
    GlobalExistence,
}

/// Unvalidated parameter values, e.g. straight from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub n: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub m: f64,
}

/// A single violated parameter constraint.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamViolation {
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },
    #[error("n must be positive, got {n}")]
    Dimension { n: f64 },
    #[error("sigma must be at least 1, got {sigma}")]
    Sigma { sigma: f64 },
    #[error("alpha must lie in (0, n), got alpha = {alpha} with n = {n}")]
    Alpha { alpha: f64, n: f64 },
    #[error("p must be at least 1, got {p}")]
    P { p: f64 },
    #[error("q must be at least 1, got {q}")]
    Q { q: f64 },
    #[error("m = 1 is excluded: the Riesz potential is unbounded from L^1, the data index must lie in (1, 2)")]
    L1DataExcluded,
    #[error("m must lie in {interval}, got {m}")]
    DataIndex { m: f64, interval: &'static str },
}

impl ParamViolation {
    /// Name of the offending field.
    pub fn field(&self) -> &'static str {
        match self {
            ParamViolation::NonFinite { field, .. } => field,
            ParamViolation::Dimension { .. } => "n",
            ParamViolation::Sigma { .. } => "sigma",
            ParamViolation::Alpha { .. } => "alpha",
            ParamViolation::P { .. } => "p",
            ParamViolation::Q { .. } => "q",
            ParamViolation::L1DataExcluded | ParamViolation::DataIndex { .. } => "m",
        }
    }
}

/// A validated parameter tuple `(n, sigma, alpha, p, q, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    n: f64,
    sigma: f64,
    alpha: f64,
    p: f64,
    q: f64,
    m: f64,
    context: Context,
}

impl Params {
    pub fn new(raw: RawParams, context: Context) -> Result<Self, Vec<ParamViolation>> {
        validate_params(raw, context)
    }

    pub fn n(&self) -> f64 {
        self.n
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn context(&self) -> Context {
        self.context
    }
    /// Total nonlinearity order `p + q`.
    pub fn order(&self) -> f64 {
        self.p + self.q
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            n: self.n,
            sigma: self.sigma,
            alpha: self.alpha,
            p: self.p,
            q: self.q,
            m: self.m,
        }
    }

    /// Integer dimension in `1..=3`, as required by grid simulations.
    pub fn spatial_dim(&self) -> Option<usize> {
        if self.n.fract() == 0.0 && (1.0..=3.0).contains(&self.n) {
            Some(self.n as usize)
        } else {
            None
        }
    }

    /// Exponent `(n/sigma)(1/m - 1/2)` shared by every decay rate.
    pub fn decay_rate(&self) -> f64 {
        decay_rate(self.n, self.sigma, self.m)
    }
}

/// `(n/sigma)(1/m - 1/2)`.
pub fn decay_rate(n: f64, sigma: f64, m: f64) -> f64 {
    n / sigma * (1.0 / m - 0.5)
}

/// Check every invariant of [`Params`] and report all violations at once.
pub fn validate_params(raw: RawParams, context: Context) -> Result<Params, Vec<ParamViolation>> {
    let mut errors = Vec::new();
    let fields = [
        ("n", raw.n),
        ("sigma", raw.sigma),
        ("alpha", raw.alpha),
        ("p", raw.p),
        ("q", raw.q),
        ("m", raw.m),
    ];
    for (field, value) in fields {
        if !value.is_finite() {
            errors.push(ParamViolation::NonFinite { field, value });
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    if raw.n <= 0.0 {
        errors.push(ParamViolation::Dimension { n: raw.n });
    }
    if raw.sigma < 1.0 {
        errors.push(ParamViolation::Sigma { sigma: raw.sigma });
    }
    if !(raw.alpha > 0.0 && raw.alpha < raw.n) {
        errors.push(ParamViolation::Alpha {
            alpha: raw.alpha,
            n: raw.n,
        });
    }
    if raw.p < 1.0 {
        errors.push(ParamViolation::P { p: raw.p });
    }
    if raw.q < 1.0 {
        errors.push(ParamViolation::Q { q: raw.q });
    }
    match context {
        Context::GlobalExistence if raw.m == 1.0 => errors.push(ParamViolation::L1DataExcluded),
        Context::GlobalExistence if !(raw.m > 1.0 && raw.m < 2.0) => errors.push(ParamViolation::DataIndex {
            m: raw.m,
            interval: "(1, 2)",
        }),
        Context::LinearEstimate if !(raw.m >= 1.0 && raw.m < 2.0) => errors.push(ParamViolation::DataIndex {
            m: raw.m,
            interval: "[1, 2)",
        }),
        _ => {}
    }

    if errors.is_empty() {
        Ok(Params {
            n: raw.n,
            sigma: raw.sigma,
            alpha: raw.alpha,
            p: raw.p,
            q: raw.q,
            m: raw.m,
            context,
        })
    } else {
        Err(errors)
    }
}

fn effective_gap(n: f64, m: f64, sigma: f64) -> Result<f64, ExponentError> {
    if !(n > 0.0) {
        return Err(ExponentError::InvalidArgument { name: "n", value: n });
    }
    if !(m >= 1.0) {
        return Err(ExponentError::InvalidArgument { name: "m", value: m });
    }
    if !(sigma > 0.0) {
        return Err(ExponentError::InvalidArgument {
            name: "sigma",
            value: sigma,
        });
    }
    let ratio = n / m;
    let gap = ratio - sigma;
    if gap <= 0.0 {
        return Err(ExponentError::SubcriticalDimension { ratio, sigma });
    }
    Ok(gap)
}

/// Critical exponent `1 + 2 sigma / (n/m - sigma)` for the power nonlinearity.
pub fn p_crit(n: f64, m: f64, sigma: f64) -> Result<f64, ExponentError> {
    let gap = effective_gap(n, m, sigma)?;
    Ok(1.0 + 2.0 * sigma / gap)
}

/// Semi-critical threshold `1 + (2 sigma + alpha) / (n/m - sigma)` on `p + q`.
pub fn hartree_threshold(n: f64, m: f64, sigma: f64, alpha: f64) -> Result<f64, ExponentError> {
    let gap = effective_gap(n, m, sigma)?;
    if !(alpha > 0.0 && alpha < n) {
        return Err(ExponentError::AlphaOutOfRange { alpha, n });
    }
    Ok(1.0 + (2.0 * sigma + alpha) / gap)
}

/// Which published result a threshold statement belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdSource {
    /// Small-data existence for `I_alpha(|u|^{p+q})`, data in `L^m`, `m` in `(1, 2)`.
    ModifiedHartree,
    /// Small-data existence for `|u|^p I_alpha(|u|^q)`, data in `L^m`, `m` in `[1, 2)`.
    GeneralizedHartree,
}

/// A lower threshold on `p + q` together with its strictness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub strict: bool,
    pub source: ThresholdSource,
}

/// The semi-critical threshold as stated for each nonlinearity.
///
/// Both nonlinearities share the value. For the generalized Hartree form the
/// bound is non-strict when `m > 1`; at `m = 1` the denominator becomes
/// `n - sigma` and the bound is strict. For the modified form only
/// `m` in `(1, 2)` is meaningful and the bound is strict.
pub fn threshold_statement(
    source: ThresholdSource,
    n: f64,
    m: f64,
    sigma: f64,
    alpha: f64,
) -> Result<Threshold, ExponentError> {
    match source {
        ThresholdSource::ModifiedHartree => {
            if !(m > 1.0 && m < 2.0) {
                return Err(ExponentError::InvalidArgument { name: "m", value: m });
            }
            Ok(Threshold {
                value: hartree_threshold(n, m, sigma, alpha)?,
                strict: true,
                source,
            })
        }
        ThresholdSource::GeneralizedHartree => {
            if !(1.0..2.0).contains(&m) {
                return Err(ExponentError::InvalidArgument { name: "m", value: m });
            }
            Ok(Threshold {
                value: hartree_threshold(n, m, sigma, alpha)?,
                strict: m == 1.0,
                source,
            })
        }
    }
}

/// Largest dimension for which the integrability lower bound does not exceed
/// the Sobolev upper bound: `(2 sigma + 2 sqrt(sigma (sigma + m (2 - m) alpha))) / (2 - m)`.
pub fn dimension_cap(sigma: f64, m: f64, alpha: f64) -> f64 {
    (2.0 * sigma + 2.0 * (sigma * (sigma + m * (2.0 - m) * alpha)).sqrt()) / (2.0 - m)
}

/// The constraint a region endpoint comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// `p + q >= 2/m + 2 alpha/n`, keeps the Gagliardo-Nirenberg exponent non-negative.
    IntegrabilityLower,
    /// `p + q <= (n + 2 alpha)/(n - 2 sigma)` when `2 sigma < n`.
    SobolevUpper,
    /// Strict semi-critical threshold `p + q > 1 + (2 sigma + alpha)/(n/m - sigma)`.
    DecayThreshold,
    /// `n` at most [`dimension_cap`] when `2 sigma < n`.
    DimensionCap,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Constraint::IntegrabilityLower => "integrability-lower",
            Constraint::SobolevUpper => "sobolev-upper",
            Constraint::DecayThreshold => "decay-threshold",
            Constraint::DimensionCap => "dimension-cap",
        };
        f.write_str(name)
    }
}

/// One endpoint of the admissible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub strict: bool,
    pub source: Constraint,
}

/// The admissible interval for `p + q` and the reasons each end binds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub lower: Bound,
    /// `None` when the interval is unbounded above (`n <= 2 sigma`).
    pub upper: Option<Bound>,
    pub dimension_ok: bool,
    /// `None` on the `n <= 2 sigma` branch where no cap applies.
    pub dimension_cap: Option<f64>,
    pub integrability_lower: f64,
    /// `None` when `n/m <= sigma` and the threshold is undefined.
    pub decay_threshold: Option<f64>,
    pub binding_constraints: Vec<Constraint>,
}

impl RegionReport {
    /// True when no value of `p + q` satisfies every constraint.
    pub fn is_empty(&self) -> bool {
        if !self.dimension_ok || self.decay_threshold.is_none() {
            return true;
        }
        match self.upper {
            None => false,
            Some(upper) => {
                if self.lower.value < upper.value {
                    false
                } else {
                    !(self.lower.value == upper.value && !self.lower.strict && !upper.strict)
                }
            }
        }
    }

    /// Whether `order = p + q` lies in the admissible region.
    pub fn contains(&self, order: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        let above = if self.lower.strict {
            order > self.lower.value
        } else {
            order >= self.lower.value
        };
        let below = match self.upper {
            None => true,
            Some(u) if u.strict => order < u.value,
            Some(u) => order <= u.value,
        };
        above && below
    }
}

impl fmt::Display for RegionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "p+q ∈ ∅");
        }
        let open = if self.lower.strict { '(' } else { '[' };
        match self.upper {
            None => write!(f, "p+q ∈ {open}{}, ∞)", self.lower.value),
            Some(u) => {
                let close = if u.strict { ')' } else { ']' };
                write!(f, "p+q ∈ {open}{}, {}{close}", self.lower.value, u.value)
            }
        }
    }
}

/// Admissible interval for `p + q` for the modified nonlinearity.
///
/// Intersects the integrability/Sobolev window with the strict decay
/// threshold. An empty interval is reported, not treated as an error.
pub fn admissible_range(params: &Params) -> RegionReport {
    region_for(params.n, params.sigma, params.m, params.alpha)
}

/// [`admissible_range`] on bare values; `n` may be any positive real.
pub fn region_for(n: f64, sigma: f64, m: f64, alpha: f64) -> RegionReport {
    let integrability_lower = 2.0 / m + 2.0 * alpha / n;
    let decay_threshold = hartree_threshold(n, m, sigma, alpha).ok();

    let mut binding = Vec::new();
    let lower = match decay_threshold {
        Some(t) if t >= integrability_lower => Bound {
            value: t,
            strict: true,
            source: Constraint::DecayThreshold,
        },
        _ => Bound {
            value: integrability_lower,
            strict: false,
            source: Constraint::IntegrabilityLower,
        },
    };
    binding.push(lower.source);
    if decay_threshold.is_none() {
        // threshold undefined: report it as the reason the region is void
        binding.push(Constraint::DecayThreshold);
    }

    let (upper, dimension_ok, cap) = if 2.0 * sigma < n {
        let cap = dimension_cap(sigma, m, alpha);
        let ok = n <= cap * (1.0 + DIMENSION_CAP_TOL);
        let upper = Bound {
            value: (n + 2.0 * alpha) / (n - 2.0 * sigma),
            strict: false,
            source: Constraint::SobolevUpper,
        };
        binding.push(Constraint::SobolevUpper);
        if !ok {
            binding.push(Constraint::DimensionCap);
        }
        (Some(upper), ok, Some(cap))
    } else {
        (None, true, None)
    };

    RegionReport {
        lower,
        upper,
        dimension_ok,
        dimension_cap: cap,
        integrability_lower,
        decay_threshold,
        binding_constraints: binding,
    }
}
