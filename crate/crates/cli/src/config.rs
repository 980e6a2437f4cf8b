//! Run configuration: TOML sections of `key = value` lines.
//!
//! Parsing is strict. Unknown sections and keys, type mismatches, missing
//! keys and parameter violations are collected and reported together.
//!
//! Defaults filled in when a key is absent:
//!
//! | key | default |
//! |-----|---------|
//! | `params.context` | `"global-existence"` |
//! | `params.exploratory` | `false` |
//! | `grid.points` / `grid.extent` | `128` / `64.0` |
//! | `data.profile` | `"gaussian"` |
//! | `data.width`, `radius`, `wavenumber`, `order`, `cutoff` | `1.0`, `2.0`, `3.0`, `2`, `3.0` |
//! | `data.epsilon` / `data.seed` | `0.001` / `0` |
//! | `run.nonlinearity` | `"modified"` |
//! | `run.horizon` / `run.dt` | `50.0` / `0.05` |
//! | `run.sample_every` / `run.checkpoint_every` | `1` / `0` |
//! | `run.dealias` / `run.zero_mode` / `run.power_control` | `true` / `"project"` / `false` |
//! | `decay.t_min`, `t_max`, `count` | `0.01`, `10000.0`, `81` |
//! | `decay.fit_start`, `fit_end` | `100.0`, `10000.0` |
//! | `inequalities.hls_q`, `gn_q` | `2.0`, `4.0` (`hls_r` unset) |
//! | `inequalities.duhamel_a`, `duhamel_b` | `2.0`, `2.0` |
//! | `output.dir` | `"sigmadamp-out"` |
//!
//! All six `params` values `n, sigma, alpha, p, q, m` are required.

use std::fmt::{self, Write as _};

use sigmadamp::nonlinear::{NonlinearityKind, NonlinearitySpec, RieszZeroMode, SimulationConfig};
use sigmadamp::params::ParamViolation;
use sigmadamp::profiles::Profile;
use sigmadamp::{validate_params, Context, Grid, Params, RawParams};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: RawParams,
    pub context: Context,
    /// Skip the admissible ranges of `validate_params`; only structural checks apply.
    pub exploratory: bool,
    pub grid: GridSection,
    pub data: DataSection,
    pub run: RunSection,
    pub decay: DecaySection,
    pub inequalities: InequalitySection,
    pub output_dir: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSection {
    pub points: usize,
    pub extent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSection {
    pub profile: Profile,
    pub epsilon: f64,
    /// Seed of the band-limited profile and of the inequality test family.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSection {
    pub nonlinearity: NonlinearityKind,
    pub horizon: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub checkpoint_every: usize,
    pub dealias: bool,
    pub zero_mode: RieszZeroMode,
    pub power_control: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySection {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
    pub fit_start: f64,
    pub fit_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalitySection {
    pub hls_q: f64,
    pub hls_r: Option<f64>,
    pub gn_q: f64,
    pub duhamel_a: f64,
    pub duhamel_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigIssue {
    Syntax(String),
    UnknownSection(String),
    UnknownKey { section: String, key: String },
    NotASection(String),
    Type { key: String, expected: &'static str },
    Missing(String),
    Invalid { key: String, reason: String },
    Param(ParamViolation),
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigIssue::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ConfigIssue::UnknownSection(s) => write!(f, "unknown section [{s}]"),
            ConfigIssue::UnknownKey { section, key } => write!(f, "unknown key `{key}` in [{section}]"),
            ConfigIssue::NotASection(s) => write!(f, "`{s}` must be a section"),
            ConfigIssue::Type { key, expected } => write!(f, "`{key}` must be {expected}"),
            ConfigIssue::Missing(key) => write!(f, "missing required key `{key}`"),
            ConfigIssue::Invalid { key, reason } => write!(f, "`{key}`: {reason}"),
            ConfigIssue::Param(v) => write!(f, "`params.{}`: {v}", v.field()),
        }
    }
}

/// Every problem found in one configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.0.len();
        write!(f, "{n} configuration error{}", if n == 1 { "" } else { "s" })?;
        for issue in &self.0 {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "params",
        &["n", "sigma", "alpha", "p", "q", "m", "context", "exploratory"],
    ),
    ("grid", &["points", "extent"]),
    (
        "data",
        &[
            "profile",
            "width",
            "radius",
            "wavenumber",
            "order",
            "cutoff",
            "epsilon",
            "seed",
        ],
    ),
    (
        "run",
        &[
            "nonlinearity",
            "horizon",
            "dt",
            "sample_every",
            "checkpoint_every",
            "dealias",
            "zero_mode",
            "power_control",
        ],
    ),
    ("decay", &["t_min", "t_max", "count", "fit_start", "fit_end"]),
    ("inequalities", &["hls_q", "hls_r", "gn_q", "duhamel_a", "duhamel_b"]),
    ("output", &["dir"]),
];

/// Parse configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigErrors(vec![ConfigIssue::Syntax(e.message().to_string())]))?;
    from_table(&table)
}

/// Build a configuration from an already parsed table.
pub fn from_table(table: &Table) -> Result<RunConfig, ConfigErrors> {
    let mut r = Reader {
        table,
        issues: Vec::new(),
    };
    r.check_schema();

    let params = RawParams {
        n: r.float("params", "n", None),
        sigma: r.float("params", "sigma", None),
        alpha: r.float("params", "alpha", None),
        p: r.float("params", "p", None),
        q: r.float("params", "q", None),
        m: r.float("params", "m", None),
    };
    let context = match r.string("params", "context", "global-existence").as_str() {
        "global-existence" => Context::GlobalExistence,
        "linear-estimate" => Context::LinearEstimate,
        other => {
            r.invalid(
                "params.context",
                format!("expected global-existence or linear-estimate, got `{other}`"),
            );
            Context::GlobalExistence
        }
    };
    let exploratory = r.boolean("params", "exploratory", false);

    let grid = GridSection {
        points: r.uint("grid", "points", 128),
        extent: r.float("grid", "extent", Some(64.0)),
    };

    let kind = r.string("data", "profile", "gaussian");
    let width = r.float("data", "width", Some(1.0));
    let radius = r.float("data", "radius", Some(2.0));
    let wavenumber = r.float("data", "wavenumber", Some(3.0));
    let order = r.uint("data", "order", 2) as u32;
    let cutoff = r.float("data", "cutoff", Some(3.0));
    let seed = r.uint("data", "seed", 0) as u64;
    let profile = match kind.as_str() {
        "gaussian" => Profile::Gaussian { width },
        "bump" => Profile::Bump { radius },
        "oscillatory-gaussian" => Profile::OscillatoryGaussian { width, wavenumber },
        "polyharmonic-gaussian" => Profile::PolyharmonicGaussian { width, order },
        "band-limited" => Profile::BandLimited { cutoff, seed },
        other => {
            r.invalid(
                "data.profile",
                format!("unknown profile `{other}` (expected gaussian, bump, oscillatory-gaussian, polyharmonic-gaussian or band-limited)"),
            );
            Profile::Gaussian { width }
        }
    };
    let data = DataSection {
        profile,
        epsilon: r.float("data", "epsilon", Some(1e-3)),
        seed,
    };

    let nonlinearity = match r.string("run", "nonlinearity", "modified").parse() {
        Ok(k) => k,
        Err(msg) => {
            r.invalid("run.nonlinearity", msg);
            NonlinearityKind::Modified
        }
    };
    let zero_mode = match r.string("run", "zero_mode", "project").as_str() {
        "project" => RieszZeroMode::Project,
        "unit" => RieszZeroMode::Unit,
        other => {
            r.invalid("run.zero_mode", format!("expected project or unit, got `{other}`"));
            RieszZeroMode::Project
        }
    };
    let run = RunSection {
        nonlinearity,
        horizon: r.float("run", "horizon", Some(50.0)),
        dt: r.float("run", "dt", Some(0.05)),
        sample_every: r.uint("run", "sample_every", 1),
        checkpoint_every: r.uint("run", "checkpoint_every", 0),
        dealias: r.boolean("run", "dealias", true),
        zero_mode,
        power_control: r.boolean("run", "power_control", false),
    };

    let decay = DecaySection {
        t_min: r.float("decay", "t_min", Some(1e-2)),
        t_max: r.float("decay", "t_max", Some(1e4)),
        count: r.uint("decay", "count", 81),
        fit_start: r.float("decay", "fit_start", Some(1e2)),
        fit_end: r.float("decay", "fit_end", Some(1e4)),
    };

    let inequalities = InequalitySection {
        hls_q: r.float("inequalities", "hls_q", Some(2.0)),
        hls_r: r.optional_float("inequalities", "hls_r"),
        gn_q: r.float("inequalities", "gn_q", Some(4.0)),
        duhamel_a: r.float("inequalities", "duhamel_a", Some(2.0)),
        duhamel_b: r.float("inequalities", "duhamel_b", Some(2.0)),
    };
    let output_dir = r.string("output", "dir", "sigmadamp-out");

    let config = RunConfig {
        params,
        context,
        exploratory,
        grid,
        data,
        run,
        decay,
        inequalities,
        output_dir,
    };
    // missing or mistyped values hold placeholders; checking them would add noise
    let placeholders = r.issues.iter().any(|i| {
        matches!(
            i,
            ConfigIssue::Syntax(_) | ConfigIssue::Type { .. } | ConfigIssue::Missing(_)
        )
    });
    if !placeholders {
        r.issues.extend(config.check());
    }
    if r.issues.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(r.issues))
    }
}

struct Reader<'a> {
    table: &'a Table,
    issues: Vec<ConfigIssue>,
}

impl Reader<'_> {
    fn check_schema(&mut self) {
        for (name, value) in self.table {
            let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| s == name) else {
                self.issues.push(ConfigIssue::UnknownSection(name.clone()));
                continue;
            };
            let Value::Table(section) = value else {
                self.issues.push(ConfigIssue::NotASection(name.clone()));
                continue;
            };
            for key in section.keys() {
                if !keys.contains(&key.as_str()) {
                    self.issues.push(ConfigIssue::UnknownKey {
                        section: name.clone(),
                        key: key.clone(),
                    });
                }
            }
        }
    }

    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.table.get(section)?.as_table()?.get(key)
    }

    fn invalid(&mut self, key: &str, reason: String) {
        self.issues.push(ConfigIssue::Invalid {
            key: key.into(),
            reason,
        });
    }

    fn optional_float(&mut self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key) {
            None => None,
            Some(Value::Float(x)) => Some(*x),
            Some(Value::Integer(i)) => Some(*i as f64),
            Some(_) => {
                self.issues.push(ConfigIssue::Type {
                    key: format!("{section}.{key}"),
                    expected: "a number",
                });
                None
            }
        }
    }

    fn float(&mut self, section: &str, key: &str, default: Option<f64>) -> f64 {
        let present = self.get(section, key).is_some();
        match (self.optional_float(section, key), default) {
            (Some(x), _) => x,
            (None, Some(d)) if !present => d,
            (None, None) if !present => {
                self.issues.push(ConfigIssue::Missing(format!("{section}.{key}")));
                f64::NAN
            }
            _ => f64::NAN,
        }
    }

    fn uint(&mut self, section: &str, key: &str, default: usize) -> usize {
        match self.get(section, key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 0 => *i as usize,
            Some(_) => {
                self.issues.push(ConfigIssue::Type {
                    key: format!("{section}.{key}"),
                    expected: "a non-negative integer",
                });
                default
            }
        }
    }

    fn boolean(&mut self, section: &str, key: &str, default: bool) -> bool {
        match self.get(section, key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.issues.push(ConfigIssue::Type {
                    key: format!("{section}.{key}"),
                    expected: "true or false",
                });
                default
            }
        }
    }

    fn string(&mut self, section: &str, key: &str, default: &str) -> String {
        match self.get(section, key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => {
                self.issues.push(ConfigIssue::Type {
                    key: format!("{section}.{key}"),
                    expected: "a string",
                });
                default.to_string()
            }
        }
    }
}

impl RunConfig {
    /// Structural and parameter checks on an assembled configuration.
    fn check(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        if self.exploratory {
            let p = &self.params;
            for (field, v) in [
                ("n", p.n),
                ("sigma", p.sigma),
                ("alpha", p.alpha),
                ("p", p.p),
                ("q", p.q),
                ("m", p.m),
            ] {
                if !v.is_finite() {
                    issues.push(ConfigIssue::Param(ParamViolation::NonFinite { field, value: v }));
                }
            }
            if issues.is_empty() {
                let spec = self.nonlinearity_spec();
                let n = self.params.n;
                let dim_ok = n >= 1.0 && n.fract() == 0.0;
                if let Err(e) = spec.validate(if dim_ok { n as usize } else { 1 }) {
                    issues.push(ConfigIssue::Invalid {
                        key: "params".into(),
                        reason: e.to_string(),
                    });
                }
            }
        } else if let Err(violations) = validate_params(self.params, self.context) {
            issues.extend(violations.into_iter().map(ConfigIssue::Param));
        }
        if let Err(e) = Grid::new(1, self.grid.points, self.grid.extent) {
            issues.push(ConfigIssue::Invalid {
                key: "grid".into(),
                reason: e.to_string(),
            });
        }
        let mut positive = |key: &str, v: f64, allow_zero: bool| {
            let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
            if !ok {
                issues.push(ConfigIssue::Invalid {
                    key: key.into(),
                    reason: format!(
                        "must be {} and finite, got {v}",
                        if allow_zero { "non-negative" } else { "positive" }
                    ),
                });
            }
        };
        positive("data.epsilon", self.data.epsilon, true);
        positive("run.horizon", self.run.horizon, true);
        positive("run.dt", self.run.dt, false);
        positive("decay.t_min", self.decay.t_min, false);
        positive("inequalities.hls_q", self.inequalities.hls_q, false);
        positive("inequalities.gn_q", self.inequalities.gn_q, false);
        match self.data.profile {
            Profile::Gaussian { width }
            | Profile::OscillatoryGaussian { width, .. }
            | Profile::PolyharmonicGaussian { width, .. } => positive("data.width", width, false),
            Profile::Bump { radius } => positive("data.radius", radius, false),
            Profile::BandLimited { cutoff, .. } => positive("data.cutoff", cutoff, false),
        }
        if !(self.decay.t_max > self.decay.t_min) {
            issues.push(ConfigIssue::Invalid {
                key: "decay.t_max".into(),
                reason: "must exceed decay.t_min".into(),
            });
        }
        if self.decay.count < 2 {
            issues.push(ConfigIssue::Invalid {
                key: "decay.count".into(),
                reason: "at least 2 sample times are needed".into(),
            });
        }
        if !(self.decay.fit_end > self.decay.fit_start) {
            issues.push(ConfigIssue::Invalid {
                key: "decay.fit_end".into(),
                reason: "must exceed decay.fit_start".into(),
            });
        }
        if self.output_dir.is_empty() {
            issues.push(ConfigIssue::Invalid {
                key: "output.dir".into(),
                reason: "must not be empty".into(),
            });
        }
        issues
    }

    /// Validated parameters, when they lie in the admissible ranges.
    pub fn validated(&self) -> Option<Params> {
        validate_params(self.params, self.context).ok()
    }

    /// Integer spatial dimension for grid-backed commands.
    pub fn spatial_dim(&self, max: usize) -> Result<usize, ConfigErrors> {
        let n = self.params.n;
        if n >= 1.0 && n.fract() == 0.0 && n as usize <= max {
            Ok(n as usize)
        } else {
            Err(ConfigErrors(vec![ConfigIssue::Invalid {
                key: "params.n".into(),
                reason: format!("this command needs an integer dimension in 1..={max}, got {n}"),
            }]))
        }
    }

    pub fn nonlinearity_spec(&self) -> NonlinearitySpec {
        NonlinearitySpec {
            kind: self.run.nonlinearity,
            alpha: self.params.alpha,
            p: self.params.p,
            q: self.params.q,
            zero_mode: self.run.zero_mode,
            dealias: self.run.dealias,
        }
    }

    pub fn simulation(&self) -> Result<SimulationConfig, ConfigErrors> {
        let dim = self.spatial_dim(3)?;
        Ok(SimulationConfig {
            dim,
            points: self.grid.points,
            extent: self.grid.extent,
            sigma: self.params.sigma,
            m: self.params.m,
            nonlinearity: self.nonlinearity_spec(),
            profile: self.data.profile,
            epsilon: self.data.epsilon,
            horizon: self.run.horizon,
            dt: self.run.dt,
            sample_every: self.run.sample_every,
            checkpoint_every: self.run.checkpoint_every,
        })
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let context = match self.context {
            Context::GlobalExistence => "global-existence",
            Context::LinearEstimate => "linear-estimate",
        };
        let _ = writeln!(out, "[params]");
        for (k, v) in [
            ("n", p.n),
            ("sigma", p.sigma),
            ("alpha", p.alpha),
            ("p", p.p),
            ("q", p.q),
            ("m", p.m),
        ] {
            let _ = writeln!(out, "{k} = {}", num(v));
        }
        let _ = writeln!(out, "context = \"{context}\"");
        let _ = writeln!(out, "exploratory = {}", self.exploratory);

        let _ = writeln!(
            out,
            "\n[grid]\npoints = {}\nextent = {}",
            self.grid.points,
            num(self.grid.extent)
        );

        let _ = writeln!(out, "\n[data]");
        match self.data.profile {
            Profile::Gaussian { width } => {
                let _ = writeln!(out, "profile = \"gaussian\"\nwidth = {}", num(width));
            }
            Profile::Bump { radius } => {
                let _ = writeln!(out, "profile = \"bump\"\nradius = {}", num(radius));
            }
            Profile::OscillatoryGaussian { width, wavenumber } => {
                let _ = writeln!(
                    out,
                    "profile = \"oscillatory-gaussian\"\nwidth = {}\nwavenumber = {}",
                    num(width),
                    num(wavenumber)
                );
            }
            Profile::PolyharmonicGaussian { width, order } => {
                let _ = writeln!(
                    out,
                    "profile = \"polyharmonic-gaussian\"\nwidth = {}\norder = {order}",
                    num(width)
                );
            }
            Profile::BandLimited { cutoff, .. } => {
                let _ = writeln!(out, "profile = \"band-limited\"\ncutoff = {}", num(cutoff));
            }
        }
        let _ = writeln!(out, "epsilon = {}\nseed = {}", num(self.data.epsilon), self.data.seed);

        let r = &self.run;
        let zero_mode = match r.zero_mode {
            RieszZeroMode::Project => "project",
            RieszZeroMode::Unit => "unit",
        };
        let _ = writeln!(
            out,
            "\n[run]\nnonlinearity = \"{}\"\nhorizon = {}\ndt = {}\nsample_every = {}\ncheckpoint_every = {}\ndealias = {}\nzero_mode = \"{zero_mode}\"\npower_control = {}",
            r.nonlinearity.as_str(),
            num(r.horizon),
            num(r.dt),
            r.sample_every,
            r.checkpoint_every,
            r.dealias,
            r.power_control
        );

        let d = &self.decay;
        let _ = writeln!(
            out,
            "\n[decay]\nt_min = {}\nt_max = {}\ncount = {}\nfit_start = {}\nfit_end = {}",
            num(d.t_min),
            num(d.t_max),
            d.count,
            num(d.fit_start),
            num(d.fit_end)
        );

        let i = &self.inequalities;
        let _ = writeln!(out, "\n[inequalities]\nhls_q = {}", num(i.hls_q));
        if let Some(r) = i.hls_r {
            let _ = writeln!(out, "hls_r = {}", num(r));
        }
        let _ = writeln!(
            out,
            "gn_q = {}\nduhamel_a = {}\nduhamel_b = {}",
            num(i.gn_q),
            num(i.duhamel_a),
            num(i.duhamel_b)
        );

        let _ = writeln!(out, "\n[output]\ndir = {}", Value::String(self.output_dir.clone()));
        out
    }
}

/// Shortest float text that reads back to the same value and is a TOML float.
fn num(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

/// Set `section.key` in `table` from command-line text. The value is read as
/// a TOML value when possible and as a bare string otherwise.
pub fn apply_override(table: &mut Table, path: &str, raw: &str) -> Result<(), ConfigIssue> {
    let Some((section, key)) = path.split_once('.') else {
        return Err(ConfigIssue::Invalid {
            key: path.into(),
            reason: "overrides are written section.key=value".into(),
        });
    };
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    match entry {
        Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(ConfigIssue::NotASection(section.into())),
    }
}
