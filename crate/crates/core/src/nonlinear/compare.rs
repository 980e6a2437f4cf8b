use std::fmt::Write as _;

use rayon::join;
use serde::{Deserialize, Serialize};

use super::{simulate, NonlinearError, NonlinearityKind, SimulationConfig, SimulationOutcome, Verdict};
use crate::format::float17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coincidence {
    BothBounded,
    BothGrowth,
    Split,
}

impl Coincidence {
    pub fn from_verdicts(a: Verdict, b: Verdict) -> Self {
        match (a, b) {
            (Verdict::Bounded, Verdict::Bounded) => Coincidence::BothBounded,
            (Verdict::Growth, Verdict::Growth) => Coincidence::BothGrowth,
            _ => Coincidence::Split,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Coincidence::BothBounded => "both bounded",
            Coincidence::BothGrowth => "both growth",
            Coincidence::Split => "split",
        }
    }

    /// Whether the two verdicts agree.
    pub fn matching(&self) -> bool {
        !matches!(self, Coincidence::Split)
    }
}

impl std::fmt::Display for Coincidence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Modified and Hartree runs that differ only in the nonlinearity kind,
/// plus an optional power-kind control.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub modified: SimulationOutcome,
    pub hartree: SimulationOutcome,
    pub power: Option<SimulationOutcome>,
    pub coincidence: Coincidence,
}

impl ComparisonReport {
    /// `sup X_hartree / sup X_modified`.
    pub fn sup_ratio(&self) -> f64 {
        self.hartree.trace.sup() / self.modified.trace.sup()
    }

    /// Largest relative gap between the two `X(T)` running suprema over the
    /// common part of the traces.
    pub fn trace_gap(a: &SimulationOutcome, b: &SimulationOutcome) -> f64 {
        a.trace
            .running_sup()
            .iter()
            .zip(b.trace.running_sup())
            .map(|(&x, &y)| {
                let scale = x.abs().max(y.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (x - y).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    /// Gaps of the modified and Hartree traces against the power control.
    pub fn power_gaps(&self) -> Option<(f64, f64)> {
        self.power
            .as_ref()
            .map(|p| (Self::trace_gap(&self.modified, p), Self::trace_gap(&self.hartree, p)))
    }

    /// Side-by-side trace: time, the two weighted norms for each kind.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t,modified_weighted_l2,modified_weighted_energy,hartree_weighted_l2,hartree_weighted_energy\n",
        );
        for (a, b) in self.modified.trace.samples().iter().zip(self.hartree.trace.samples()) {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                float17(a.t),
                float17(a.weighted_l2),
                float17(a.weighted_energy),
                float17(b.weighted_l2),
                float17(b.weighted_energy)
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "coincidence: {}", self.coincidence);
        for (name, run) in [("modified", &self.modified), ("hartree", &self.hartree)] {
            let _ = writeln!(
                out,
                "{name}: verdict = {}, final t = {}, X(T) sup = {}",
                run.verdict,
                float17(run.final_time),
                float17(run.trace.sup())
            );
        }
        let _ = writeln!(out, "sup ratio hartree/modified: {}", float17(self.sup_ratio()));
        if let (Some(p), Some((gm, gh))) = (&self.power, self.power_gaps()) {
            let _ = writeln!(
                out,
                "power control: verdict = {}, X(T) sup = {}, relative gap modified = {}, hartree = {}",
                p.verdict,
                float17(p.trace.sup()),
                float17(gm),
                float17(gh)
            );
        }
        out
    }
}

/// Run the configuration once with each nonlinearity kind and classify the
/// pair of verdicts. No interpretation beyond the classification is made.
pub fn compare_nonlinearities(config: &SimulationConfig, with_power: bool) -> Result<ComparisonReport, NonlinearError> {
    let with_kind = |kind: NonlinearityKind| {
        let mut c = config.clone();
        c.nonlinearity = c.nonlinearity.with_kind(kind);
        c
    };
    let (modified, (hartree, power)) = join(
        || simulate(&with_kind(NonlinearityKind::Modified)),
        || {
            join(
                || simulate(&with_kind(NonlinearityKind::Hartree)),
                || with_power.then(|| simulate(&with_kind(NonlinearityKind::Power))),
            )
        },
    );
    let (modified, hartree) = (modified?, hartree?);
    let power = power.transpose()?;
    let coincidence = Coincidence::from_verdicts(modified.verdict, hartree.verdict);
    Ok(ComparisonReport {
        modified,
        hartree,
        power,
        coincidence,
    })
}
