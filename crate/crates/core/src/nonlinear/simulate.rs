use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{NonlinearError, NonlinearitySpec, StateVector, Stepper};
use crate::format::float17;
use crate::params::decay_rate;
use crate::profiles::Profile;
use crate::spectral::{Grid, SpectralField};

pub const TRAJECTORY_CSV_HEADER: &str = "t,l2,energy,weighted_l2,weighted_energy";

/// Relative level above which boundary density and dealiasing margin warn.
const RESOLUTION_TOLERANCE: f64 = 1e-8;
/// Growth is declared once `||u||_2` exceeds this multiple of the reference.
const GROWTH_FACTOR: f64 = 1e6;
/// Fraction of the dealiasing cutoff where the margin shell starts.
const MARGIN_SHELL: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub l2: f64,
    pub energy: f64,
    pub weighted_l2: f64,
    pub weighted_energy: f64,
}

impl TraceSample {
    /// The sample's contribution to the `X(T)` norm.
    pub fn x_norm(&self) -> f64 {
        self.weighted_l2.max(self.weighted_energy)
    }
}

/// Time-weighted norms `(1+t)^{rate-1} ||u||_2` and `(1+t)^{rate} ||(|D|^sigma u, u_t)||_2`
/// with `rate = (n/sigma)(1/m - 1/2)`; their running supremum is the `X(T)` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNormTrace {
    rate: f64,
    samples: Vec<TraceSample>,
    running_sup: Vec<f64>,
}

impl WeightedNormTrace {
    pub fn new(n: f64, sigma: f64, m: f64) -> Self {
        Self::with_rate(decay_rate(n, sigma, m))
    }

    pub fn with_rate(rate: f64) -> Self {
        WeightedNormTrace {
            rate,
            samples: Vec::new(),
            running_sup: Vec::new(),
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn push(&mut self, t: f64, l2: f64, energy: f64) {
        let base = 1.0 + t;
        let sample = TraceSample {
            t,
            l2,
            energy,
            weighted_l2: base.powf(self.rate - 1.0) * l2,
            weighted_energy: base.powf(self.rate) * energy,
        };
        let prev = self.running_sup.last().copied().unwrap_or(0.0);
        self.running_sup.push(prev.max(sample.x_norm()));
        self.samples.push(sample);
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `||u||_{X(t_k)}` for each recorded `t_k`.
    pub fn running_sup(&self) -> &[f64] {
        &self.running_sup
    }

    /// `||u||_{X(T)}` at the last recorded time.
    pub fn sup(&self) -> f64 {
        self.running_sup.last().copied().unwrap_or(0.0)
    }

    /// Supremum of the sample norms over `t in [start, end]`, or `None` if no
    /// sample falls in the window.
    pub fn sup_over(&self, start: f64, end: f64) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| s.t >= start && s.t <= end)
            .map(TraceSample::x_norm)
            .reduce(f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(100 * (self.samples.len() + 1));
        out.push_str(TRAJECTORY_CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                float17(s.t),
                float17(s.l2),
                float17(s.energy),
                float17(s.weighted_l2),
                float17(s.weighted_energy)
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Reached the horizon without tripping the growth criterion.
    Bounded,
    /// `||u||_2` exceeded the growth factor times the reference, or became non-finite.
    Growth,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Growth => "growth",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolutionWarning {
    /// Solution mass on the outermost cells, relative to the maximum.
    BoundaryDensity { first_time: f64, worst: f64 },
    /// Spectral amplitude just below the dealiasing cutoff, relative to the peak.
    DealiasMargin { first_time: f64, worst: f64 },
}

impl ResolutionWarning {
    pub fn name(&self) -> &'static str {
        match self {
            ResolutionWarning::BoundaryDensity { .. } => "boundary-density",
            ResolutionWarning::DealiasMargin { .. } => "dealias-margin",
        }
    }

    fn update(&mut self, value: f64) {
        match self {
            ResolutionWarning::BoundaryDensity { worst, .. } | ResolutionWarning::DealiasMargin { worst, .. } => {
                *worst = worst.max(value)
            }
        }
    }
}

impl std::fmt::Display for ResolutionWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            ResolutionWarning::BoundaryDensity { first_time, worst } => write!(
                f,
                "boundary-density: edge/max reached {} (first above {RESOLUTION_TOLERANCE:e} at t = {})",
                float17(worst),
                float17(first_time)
            ),
            ResolutionWarning::DealiasMargin { first_time, worst } => write!(
                f,
                "dealias-margin: shell/peak spectral amplitude reached {} (first above {RESOLUTION_TOLERANCE:e} at t = {})",
                float17(worst),
                float17(first_time)
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub step: usize,
    pub state: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub dim: usize,
    pub points: usize,
    pub extent: f64,
    pub sigma: f64,
    /// Data index `m` entering the trace weights.
    pub m: f64,
    pub nonlinearity: NonlinearitySpec,
    /// Profile of `u_1`; `u_0 = 0`.
    pub profile: Profile,
    pub epsilon: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Record a trace sample every this many steps.
    pub sample_every: usize,
    /// Keep a checkpoint every this many steps; 0 disables intermediate
    /// checkpoints (the final state is always kept).
    pub checkpoint_every: usize,
}

impl SimulationConfig {
    pub fn grid(&self) -> Result<Grid, NonlinearError> {
        Ok(Grid::new(self.dim, self.points, self.extent)?)
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub verdict: Verdict,
    pub trace: WeightedNormTrace,
    pub checkpoints: Vec<Checkpoint>,
    pub warnings: Vec<ResolutionWarning>,
    /// Time of the last completed step.
    pub final_time: f64,
    pub steps: usize,
    /// `max(||u(0)||_2, ||(|D|^sigma u0, u1)||_2)`, the scale for the growth test.
    pub growth_reference: f64,
    /// Largest physical-space imaginary residue relative to `max |u|`.
    pub imaginary_residue: f64,
}

impl SimulationOutcome {
    pub fn final_state(&self) -> &StateVector {
        &self.checkpoints.last().expect("final state kept").state
    }
}

/// Integrate from `u_0 = 0`, `u_1 = epsilon * profile` up to the horizon or
/// to a growth verdict.
pub fn simulate(config: &SimulationConfig) -> Result<SimulationOutcome, NonlinearError> {
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(NonlinearError::TimeStep(config.dt));
    }
    if !(config.horizon >= 0.0 && config.horizon.is_finite()) {
        return Err(NonlinearError::Horizon(config.horizon));
    }
    let grid = config.grid()?;
    let stepper = Stepper::new(&grid, config.sigma, config.dt, config.nonlinearity)?;
    let u1 = config.profile.sample(&grid).scale(config.epsilon);
    let mut state = StateVector::from_data(SpectralField::zeros(&grid), u1)?;

    let sigma = config.sigma;
    let mut trace = WeightedNormTrace::new(config.dim as f64, sigma, config.m);
    let reference = state.l2_norm().max(state.energy_norm(sigma));
    let limit = GROWTH_FACTOR * reference;
    let sample_every = config.sample_every.max(1);
    let shell = margin_shell(&grid);

    let mut monitor = Monitor::default();
    let mut checkpoints = Vec::new();
    monitor.observe(&state, &shell);
    trace.push(state.time, state.l2_norm(), state.energy_norm(sigma));

    let total = config.steps();
    let mut verdict = Verdict::Bounded;
    let mut done = 0;
    for k in 1..=total {
        let next = match stepper.advance(&state) {
            Ok(next) => next,
            Err(NonlinearError::NonFinite { .. }) => {
                verdict = Verdict::Growth;
                break;
            }
            Err(e) => return Err(e),
        };
        // pin the time to the step count so rounding does not accumulate
        state = StateVector {
            time: k as f64 * config.dt,
            ..next
        };
        done = k;
        let l2 = state.l2_norm();
        let grew = !l2.is_finite() || (l2 > limit && reference > 0.0);
        if k % sample_every == 0 || k == total || grew {
            monitor.observe(&state, &shell);
            trace.push(state.time, l2, state.energy_norm(sigma));
        }
        if grew {
            verdict = Verdict::Growth;
            break;
        }
        if config.checkpoint_every > 0 && k % config.checkpoint_every == 0 && k != total {
            checkpoints.push(Checkpoint {
                step: k,
                state: state.clone(),
            });
        }
    }
    let final_time = state.time;
    checkpoints.push(Checkpoint { step: done, state });

    Ok(SimulationOutcome {
        verdict,
        trace,
        checkpoints,
        warnings: monitor.warnings(),
        final_time,
        steps: done,
        growth_reference: reference,
        imaginary_residue: monitor.imaginary,
    })
}

fn margin_shell(grid: &Grid) -> Vec<usize> {
    let cutoff = 2.0 / 3.0 * grid.nyquist();
    grid.magnitudes()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > MARGIN_SHELL * cutoff && r <= cutoff)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Default)]
struct Monitor {
    boundary: Option<ResolutionWarning>,
    margin: Option<ResolutionWarning>,
    imaginary: f64,
}

impl Monitor {
    fn observe(&mut self, state: &StateVector, shell: &[usize]) {
        let t = state.time;
        let edge = state.u.boundary_density();
        if edge > RESOLUTION_TOLERANCE {
            self.boundary
                .get_or_insert(ResolutionWarning::BoundaryDensity {
                    first_time: t,
                    worst: edge,
                })
                .update(edge);
        }
        let spec = state.u.frequency();
        let peak = spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak > 0.0 {
            let ratio = shell.iter().map(|&i| spec[i].norm()).fold(0.0, f64::max) / peak;
            if ratio > RESOLUTION_TOLERANCE {
                self.margin
                    .get_or_insert(ResolutionWarning::DealiasMargin {
                        first_time: t,
                        worst: ratio,
                    })
                    .update(ratio);
            }
        }
        self.imaginary = self.imaginary.max(state.u.imaginary_residue());
    }

    fn warnings(&self) -> Vec<ResolutionWarning> {
        self.boundary.iter().chain(self.margin.iter()).copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinear::NonlinearityKind;

    fn config(epsilon: f64) -> SimulationConfig {
        SimulationConfig {
            dim: 2,
            points: 32,
            extent: 32.0,
            sigma: 1.0,
            m: 1.5,
            nonlinearity: NonlinearitySpec::new(NonlinearityKind::Modified, 0.5, 2.0, 2.0),
            profile: Profile::Gaussian { width: 1.0 },
            epsilon,
            horizon: 2.0,
            dt: 0.05,
            sample_every: 1,
            checkpoint_every: 10,
        }
    }

    #[test]
    fn zero_data_is_stationary() {
        let out = simulate(&config(0.0)).unwrap();
        assert_eq!(out.verdict, Verdict::Bounded);
        assert_eq!(out.trace.len(), 41);
        assert!(out.trace.samples().iter().all(|s| s.l2 == 0.0 && s.energy == 0.0));
        assert_eq!(out.final_state().u.max_abs(), 0.0);
        assert!(out.warnings.is_empty());
        assert_eq!(out.checkpoints.len(), 4);
    }

    #[test]
    fn small_data_stays_real_and_bounded() {
        let out = simulate(&config(1e-3)).unwrap();
        assert_eq!(out.verdict, Verdict::Bounded);
        assert!(out.imaginary_residue < 1e-9);
        assert!((out.final_time - 2.0).abs() < 1e-14);
        let sup = out.trace.running_sup();
        assert!(sup.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn large_data_grows() {
        let mut c = config(50.0);
        c.nonlinearity = NonlinearitySpec::new(NonlinearityKind::Power, 0.0, 1.5, 1.5);
        c.horizon = 20.0;
        let out = simulate(&c).unwrap();
        assert_eq!(out.verdict, Verdict::Growth);
        assert!(out.final_time < 20.0);
    }

    #[test]
    fn trace_weights_and_csv() {
        let mut t = WeightedNormTrace::with_rate(0.5);
        t.push(0.0, 1.0, 2.0);
        t.push(3.0, 4.0, 0.5);
        let s = t.samples()[1];
        assert!((s.weighted_l2 - 2.0).abs() < 1e-15);
        assert!((s.weighted_energy - 1.0).abs() < 1e-15);
        assert_eq!(t.sup(), 2.0);
        assert_eq!(t.sup_over(1.0, 5.0), Some(2.0));
        assert_eq!(t.sup_over(5.0, 6.0), None);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TRAJECTORY_CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0")
        );
    }
}
