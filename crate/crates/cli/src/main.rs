#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sigmadamp_cli::{
    check_inequalities, compare, fit_file, linear_decay, load_config, region, run_simulation, CliError, Options,
    Outcome, EXIT_CONFIG,
};

/// Experiments with the damped sigma-evolution equation with Hartree-type
/// nonlinearities.
#[derive(Debug, Parser)]
#[command(name = "sigmadamp", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Seed for band-limited data and the inequality family (`data.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    /// Exit with status 3 when resolution warnings are raised.
    #[arg(long, global = true)]
    strict_resolution: bool,
    /// Override any key: `--set run.dt=0.01`. Repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    #[arg(long, global = true)]
    n: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    horizon: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    extent: Option<f64>,
    /// modified, hartree or power.
    #[arg(long, global = true)]
    nonlinearity: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the admissible interval for p + q.
    Region,
    /// Linear decay curves and fitted exponents.
    LinearDecay,
    /// Run the nonlinear equation to the horizon or to growth.
    Simulate,
    /// Run the modified and Hartree nonlinearities side by side.
    Compare,
    /// HLS, Gagliardo-Nirenberg and Duhamel integral checks.
    CheckInequalities,
    /// Refit decay exponents from a CSV table.
    Fit {
        /// decay.csv or trajectory.csv.
        input: PathBuf,
        #[arg(long, default_value_t = 1e2)]
        start: f64,
        #[arg(long, default_value_t = 1e4)]
        end: f64,
    },
}

impl Cli {
    fn options(&self) -> Result<Options, CliError> {
        let o = &self.overrides;
        let mut overrides: Vec<(String, String)> = Vec::new();
        let numeric = [
            ("params.n", o.n),
            ("params.sigma", o.sigma),
            ("params.alpha", o.alpha),
            ("params.p", o.p),
            ("params.q", o.q),
            ("params.m", o.m),
            ("data.epsilon", o.epsilon),
            ("run.horizon", o.horizon),
            ("run.dt", o.dt),
            ("grid.extent", o.extent),
        ];
        for (key, value) in numeric {
            if let Some(v) = value {
                overrides.push((key.into(), format!("{v:?}")));
            }
        }
        if let Some(points) = o.points {
            overrides.push(("grid.points".into(), points.to_string()));
        }
        if let Some(seed) = self.seed {
            overrides.push(("data.seed".into(), seed.to_string()));
        }
        if let Some(kind) = &o.nonlinearity {
            overrides.push(("run.nonlinearity".into(), format!("{:?}", kind)));
        }
        for item in &self.set {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("--set expects SECTION.KEY=VALUE, got `{item}`")))?;
            overrides.push((key.trim().into(), value.trim().into()));
        }
        Ok(Options {
            config: self.config.clone(),
            output_dir: self.output_dir.clone(),
            overrides,
            strict_resolution: self.strict_resolution,
        })
    }

    fn run(&self) -> Result<Outcome, CliError> {
        if let Command::Fit { input, start, end } = &self.command {
            return fit_file(input, (*start, *end), self.output_dir.as_deref());
        }
        let opts = self.options()?;
        let config = load_config(&opts)?;
        match self.command {
            Command::Region => Ok(region(&config)),
            Command::LinearDecay => linear_decay(&config, &opts),
            Command::Simulate => run_simulation(&config, &opts),
            Command::Compare => compare(&config, &opts),
            Command::CheckInequalities => check_inequalities(&config, &opts),
            Command::Fit { .. } => unreachable!("handled above"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap would use 2, which is reserved for a growth verdict
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match cli.run() {
        Ok(outcome) => {
            if !cli.quiet {
                print!("{}", outcome.summary);
                for w in &outcome.warnings {
                    eprintln!("warning: {w}");
                }
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
