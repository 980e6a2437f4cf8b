//! Library side of the `sigmadamp` binary: configuration loading and the
//! subcommands. Every command writes into an output directory and returns an
//! [`Outcome`] carrying the exit code, so the binary only prints.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use sigmadamp::format::float17;
use sigmadamp::inequality::{
    duhamel_integral_check, gn_check, hls_check, InequalityError, InequalityVerdict, DILATION_ORBIT,
};
use sigmadamp::nonlinear::{compare_nonlinearities, simulate, NonlinearError, SimulationOutcome, Verdict};
use sigmadamp::params::region_for;
use sigmadamp::profiles::{standard_family, Profile};
use sigmadamp::propagator::{fit_power_law, linear_decay_curve, log_times, DecayFit, RadialProfile};
use sigmadamp::spectral::snapshot::{write_snapshot, Precision};
use sigmadamp::Grid;
use thiserror::Error;
use toml::Table;

pub use config::{apply_override, from_table, parse_config, ConfigErrors, ConfigIssue, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_GROWTH: u8 = 2;
pub const EXIT_RESOLUTION: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

/// Imaginary residue above which a run no longer counts as real-valued.
pub const IMAGINARY_LIMIT: f64 = 1e-6;

/// Times at which the Duhamel ratio is sampled.
const DUHAMEL_TIMES: (f64, f64, usize) = (1.0, 1e4, 41);

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Input(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<NonlinearError> for CliError {
    fn from(e: NonlinearError) -> Self {
        match e {
            NonlinearError::NonFinite { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<InequalityError> for CliError {
    fn from(e: InequalityError) -> Self {
        match e {
            InequalityError::Quadrature { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Result of a completed command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    /// Summary for standard output.
    pub summary: String,
    /// Resolution warnings for standard error.
    pub warnings: Vec<String>,
}

/// Global options shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// `(section.key, value)` overrides, applied in order after the file.
    pub overrides: Vec<(String, String)>,
    pub strict_resolution: bool,
}

/// Read the configuration file (if any), apply overrides and parse.
pub fn load_config(opts: &Options) -> Result<RunConfig, CliError> {
    let mut table = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            text.parse::<Table>()
                .map_err(|e| ConfigErrors(vec![ConfigIssue::Syntax(e.message().to_string())]))?
        }
        None => Table::new(),
    };
    let mut issues = Vec::new();
    for (key, value) in &opts.overrides {
        if let Err(issue) = apply_override(&mut table, key, value) {
            issues.push(issue);
        }
    }
    if !issues.is_empty() {
        return Err(ConfigErrors(issues).into());
    }
    Ok(from_table(&table)?)
}

fn output_dir(opts: &Options, config: &RunConfig) -> PathBuf {
    opts.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output_dir))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn params_line(config: &RunConfig) -> String {
    let p = &config.params;
    format!(
        "n = {}, sigma = {}, alpha = {}, p = {}, q = {}, m = {}",
        p.n, p.sigma, p.alpha, p.p, p.q, p.m
    )
}

/// Admissible interval for `p + q` and the constraints behind it.
pub fn region(config: &RunConfig) -> Outcome {
    let p = &config.params;
    let report = region_for(p.n, p.sigma, p.m, p.alpha);
    let mut out = String::new();
    let _ = writeln!(out, "{report}");
    let _ = writeln!(out, "parameters: {}", params_line(config));
    let _ = writeln!(out, "integrability lower bound: {}", report.integrability_lower);
    match report.decay_threshold {
        Some(t) => {
            let _ = writeln!(out, "decay threshold: {t}");
        }
        None => {
            let _ = writeln!(out, "decay threshold: undefined (n/m <= sigma)");
        }
    }
    match report.upper {
        Some(u) => {
            let _ = writeln!(out, "sobolev upper bound: {}", u.value);
        }
        None => {
            let _ = writeln!(out, "sobolev upper bound: none (n <= 2 sigma)");
        }
    }
    if let Some(cap) = report.dimension_cap {
        let status = if report.dimension_ok { "satisfied" } else { "exceeded" };
        let _ = writeln!(out, "dimension cap: {cap} ({status})");
    }
    let binding: Vec<String> = report.binding_constraints.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "binding: {}", binding.join(", "));
    let order = p.p + p.q;
    let inside = if report.contains(order) { "inside" } else { "outside" };
    let _ = writeln!(out, "p+q = {order}: {inside}");
    Outcome {
        code: EXIT_OK,
        summary: out,
        warnings: Vec::new(),
    }
}

fn fit_row(out: &mut String, quantity: &str, fit: &DecayFit, predicted: f64) {
    let _ = writeln!(
        out,
        "{quantity},{},{},{},{},{},{}",
        float17(fit.slope),
        float17(predicted),
        float17(fit.slope - predicted),
        float17(fit.intercept),
        float17(fit.residual),
        fit.samples
    );
}

const FIT_HEADER: &str = "quantity,fitted_slope,predicted_slope,difference,intercept,residual,samples\n";

/// Linear decay curves by radial quadrature and their fitted exponents.
pub fn linear_decay(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let n = config.spatial_dim(usize::MAX)?;
    let Profile::Gaussian { width } = config.data.profile else {
        return Err(CliError::Input("linear-decay needs the gaussian profile".into()));
    };
    let d = &config.decay;
    let times = log_times(d.t_min, d.t_max, d.count);
    let record = linear_decay_curve(
        &RadialProfile::Gaussian { width },
        n,
        config.params.sigma,
        config.params.m,
        &times,
    )
    .map_err(|e| CliError::Numeric(e.to_string()))?;
    let window = (d.fit_start, d.fit_end);
    let fit = |v: &[f64]| fit_power_law(&record.times, v, window).map_err(|e| CliError::Input(e.to_string()));
    let l2 = fit(&record.l2)?;
    let energy = fit(&record.energy)?;

    let dir = output_dir(opts, config);
    create_dir(&dir)?;
    write_file(&dir.join("decay.csv"), &record.to_csv())?;
    let mut csv = String::from(FIT_HEADER);
    fit_row(&mut csv, "l2", &l2, record.predicted_l2_exponent);
    fit_row(&mut csv, "energy", &energy, record.predicted_energy_exponent);
    write_file(&dir.join("fit.csv"), &csv)?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "linear decay, n = {n}, sigma = {}, m = {}",
        config.params.sigma, config.params.m
    );
    let _ = writeln!(
        out,
        "l2 slope {} (predicted {})",
        float17(l2.slope),
        float17(record.predicted_l2_exponent)
    );
    let _ = writeln!(
        out,
        "energy slope {} (predicted {})",
        float17(energy.slope),
        float17(record.predicted_energy_exponent)
    );
    let _ = writeln!(out, "wrote {}", dir.display());
    Ok(Outcome {
        code: EXIT_OK,
        summary: out,
        warnings: Vec::new(),
    })
}

fn write_checkpoints(dir: &Path, run: &SimulationOutcome) -> Result<(), CliError> {
    create_dir(dir)?;
    for cp in &run.checkpoints {
        for (name, field) in [("u", &cp.state.u), ("ut", &cp.state.ut)] {
            let path = dir.join(format!("{name}_{:08}.snap", cp.step));
            let file = fs::File::create(&path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            write_snapshot(&mut w, field, cp.state.time, Precision::Complex128)
                .and_then(|_| w.flush())
                .map_err(|source| CliError::Io { path, source })?;
        }
    }
    Ok(())
}

fn run_report(config: &RunConfig, run: &SimulationOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nonlinearity: {}", config.run.nonlinearity.as_str());
    let _ = writeln!(out, "parameters: {}", params_line(config));
    let _ = writeln!(
        out,
        "profile: {}, epsilon = {}",
        config.data.profile.name(),
        config.data.epsilon
    );
    let _ = writeln!(
        out,
        "grid: {} points per axis, extent {}, dt = {}",
        config.grid.points, config.grid.extent, config.run.dt
    );
    let _ = writeln!(out, "verdict: {}", run.verdict);
    let _ = writeln!(out, "steps: {}", run.steps);
    let _ = writeln!(out, "final time: {}", float17(run.final_time));
    let _ = writeln!(out, "growth reference: {}", float17(run.growth_reference));
    let _ = writeln!(out, "X(T) sup: {}", float17(run.trace.sup()));
    let _ = writeln!(out, "imaginary residue: {}", float17(run.imaginary_residue));
    if run.warnings.is_empty() {
        let _ = writeln!(out, "warnings: none");
    }
    for w in &run.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

/// `text` without its warning lines, which go to standard error instead.
fn without_warnings(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("warning"))
        .flat_map(|l| [l, "\n"])
        .collect()
}

fn resolution_code(strict: bool, warnings: &[String]) -> u8 {
    if strict && !warnings.is_empty() {
        EXIT_RESOLUTION
    } else {
        EXIT_OK
    }
}

/// One nonlinear run: report, trajectory and checkpoints.
pub fn run_simulation(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let sim = config.simulation()?;
    sim.grid()?;
    let run = simulate(&sim)?;
    let dir = output_dir(opts, config);
    create_dir(&dir)?;
    let report = run_report(config, &run);
    write_file(&dir.join("report.txt"), &report)?;
    write_file(&dir.join("trajectory.csv"), &run.trace.to_csv())?;
    write_checkpoints(&dir.join("checkpoints"), &run)?;

    let warnings: Vec<String> = run.warnings.iter().map(|w| w.to_string()).collect();
    if !(run.imaginary_residue <= IMAGINARY_LIMIT) {
        return Err(CliError::Numeric(format!(
            "imaginary residue {} exceeds {IMAGINARY_LIMIT:e}; report written to {}",
            float17(run.imaginary_residue),
            dir.display()
        )));
    }
    let code = match run.verdict {
        Verdict::Growth => EXIT_GROWTH,
        Verdict::Bounded => resolution_code(opts.strict_resolution, &warnings),
    };
    Ok(Outcome {
        code,
        summary: without_warnings(&report),
        warnings,
    })
}

/// Modified and Hartree runs side by side, with the optional power control.
pub fn compare(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let sim = config.simulation()?;
    sim.grid()?;
    let report = compare_nonlinearities(&sim, config.run.power_control)?;
    let dir = output_dir(opts, config);
    create_dir(&dir)?;

    let mut text = format!("parameters: {}\n", params_line(config));
    text.push_str(&report.summary());
    let mut warnings = Vec::new();
    let mut runs = vec![("modified", &report.modified), ("hartree", &report.hartree)];
    if let Some(p) = &report.power {
        runs.push(("power", p));
    }
    for (name, run) in &runs {
        for w in &run.warnings {
            let _ = writeln!(text, "warning ({name}): {w}");
            warnings.push(format!("{name}: {w}"));
        }
        write_file(&dir.join(format!("trajectory_{name}.csv")), &run.trace.to_csv())?;
    }
    write_file(&dir.join("compare.txt"), &text)?;
    write_file(&dir.join("compare.csv"), &report.to_csv())?;
    Ok(Outcome {
        code: resolution_code(opts.strict_resolution, &warnings),
        summary: without_warnings(&text),
        warnings,
    })
}

/// HLS, Gagliardo-Nirenberg and Duhamel checks for the configured exponents.
pub fn check_inequalities(config: &RunConfig, opts: &Options) -> Result<Outcome, CliError> {
    let dim = config.spatial_dim(3)?;
    let grid = Grid::new(dim, config.grid.points, config.grid.extent).map_err(|e| CliError::Input(e.to_string()))?;
    let family = standard_family(config.data.seed);
    let ineq = &config.inequalities;
    let hls = hls_check(
        &grid,
        ineq.hls_q,
        config.params.alpha,
        ineq.hls_r,
        &family,
        &DILATION_ORBIT,
    )?;
    let gn = gn_check(&grid, ineq.gn_q, config.params.sigma, &family, &DILATION_ORBIT)?;
    let (t0, t1, count) = DUHAMEL_TIMES;
    let duhamel = duhamel_integral_check(ineq.duhamel_a, ineq.duhamel_b, &log_times(t0, t1, count))?;

    let mut text = String::new();
    let mut csv = String::from("check,label,scale,ratio\n");
    for report in [&hls, &gn, &duhamel] {
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&report.to_text());
        for s in &report.samples {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                report.name,
                s.label,
                float17(s.scale),
                float17(s.ratio)
            );
        }
    }
    let dir = output_dir(opts, config);
    create_dir(&dir)?;
    write_file(&dir.join("inequalities.txt"), &text)?;
    write_file(&dir.join("inequalities.csv"), &csv)?;

    let mut summary = String::new();
    for report in [&hls, &gn, &duhamel] {
        let _ = writeln!(summary, "{}: {}", report.name, report.verdict);
        if let (InequalityVerdict::Violated, Some(r)) = (report.verdict, report.invariance_residual) {
            let _ = writeln!(
                summary,
                "  invariance residual {}; if it shrinks on a finer grid the dilation orbit is under-resolved",
                float17(r)
            );
        }
    }
    Ok(Outcome {
        code: EXIT_OK,
        summary,
        warnings: Vec::new(),
    })
}

/// Column lookup by any of several header names.
fn column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers.iter().position(|h| names.contains(&h.trim()))
}

/// Refit the exponents of a decay table (`decay.csv` or `trajectory.csv`).
/// Writes `fit.csv` to `out_dir` when given; the table is also returned as
/// the summary.
pub fn fit_file(input: &Path, window: (f64, f64), out_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let io_err = |source: io::Error| CliError::Io {
        path: input.to_path_buf(),
        source,
    };
    let csv_err = |e: csv::Error| CliError::Input(format!("{}: {e}", input.display()));
    let mut reader = csv::Reader::from_path(input).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(source),
        other => CliError::Input(format!("{}: {other:?}", input.display())),
    })?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    let time = column(&headers, &["time", "t"]).ok_or_else(|| CliError::Input("no `time` or `t` column".into()))?;
    let quantities = [
        (
            "l2",
            column(&headers, &["l2_norm", "l2"]),
            column(&headers, &["predicted_l2_exp"]),
        ),
        (
            "energy",
            column(&headers, &["energy_norm", "energy"]),
            column(&headers, &["predicted_energy_exp"]),
        ),
    ];
    if quantities.iter().all(|(_, c, _)| c.is_none()) {
        return Err(CliError::Input("no l2 or energy column".into()));
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let values: Result<Vec<f64>, _> = record.iter().map(|v| v.trim().parse::<f64>()).collect();
        let values = values.map_err(|e| CliError::Input(format!("row {}: {e}", line + 2)))?;
        rows.push(values);
    }
    let times: Vec<f64> = rows.iter().map(|r| r[time]).collect();

    let mut csv = String::from(FIT_HEADER);
    for (name, col, predicted) in quantities {
        let Some(col) = col else { continue };
        let values: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        let fit = fit_power_law(&times, &values, window).map_err(|e| CliError::Input(format!("{name}: {e}")))?;
        let predicted = predicted.and_then(|c| rows.first().map(|r| r[c])).unwrap_or(f64::NAN);
        fit_row(&mut csv, name, &fit, predicted);
    }
    if let Some(dir) = out_dir {
        create_dir(dir)?;
        write_file(&dir.join("fit.csv"), &csv)?;
    }
    Ok(Outcome {
        code: EXIT_OK,
        summary: csv,
        warnings: Vec::new(),
    })
}
