//! `orbit-angles`: lattice-point and angular-distribution experiments on
//! the upper half-plane.
//!
//! Every subcommand reads an optional JSON config; flags override its fields.
//! Exit codes: 2 for invalid input, 3 when the element budget is exhausted,
//! 1 for anything else.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{ConfigError, ExperimentConfig, Format, GroupConfig, GroupName};

#[derive(Parser)]
#[command(name = "orbit-angles", version, about = "Orbit counting and angle statistics for SL(2,Z) and Gamma(N)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orbit CSV of {γ : d(z0, γz1) ≤ R} at the largest threshold
    Enumerate(Overrides),
    /// Sector errors N_I/N − |I| across thresholds, with a decay fit
    Equidist(Overrides),
    /// Samples of ρ, η and k on a grid of `bins` angles
    Density(Overrides),
    /// Line-angle histogram against the η density
    Theorem2(Overrides),
    /// Sector histogram against the ρ density
    Theorem3(Overrides),
    /// |S_n| and |S_n|/N for n = 0..=n_max
    Expsum(Overrides),
    /// Truncated, tail-corrected G_n(s) and (s − 1)·G_n(s)
    Gseries(Overrides),
    /// Sector-boundary distance Q, exact and asymptotic, on `bins` ray angles
    Qdist(Overrides),
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([num(x)?, num(y)?])
}

#[derive(Args, Clone, Debug, Default)]
struct Overrides {
    /// JSON experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    /// SL2Z or GammaN
    #[arg(long)]
    group: Option<String>,
    /// Level N of Gamma(N); implies --group GammaN
    #[arg(long)]
    level: Option<u64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    z0: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    z1: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    w: Option<[f64; 2]>,
    /// Cosh-valued radii X, comma separated
    #[arg(long = "threshold", value_delimiter = ',')]
    thresholds: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    n_max: Option<u32>,
    /// Erdős–Turán cutoff frequency
    #[arg(long = "m")]
    m: Option<u32>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Values of s for gseries, comma separated
    #[arg(long = "s", value_delimiter = ',')]
    s_values: Vec<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (standard output when omitted)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(g) = &self.group {
            let kind = match g.to_ascii_lowercase().as_str() {
                "sl2z" => GroupName::Sl2z,
                "gamman" | "gamma" => GroupName::GammaN,
                _ => return Err(ConfigError(format!("unknown group {g:?}")).into()),
            };
            let level = if kind == GroupName::Sl2z { None } else { c.group.level };
            c.group = GroupConfig { kind, level };
        }
        if let Some(n) = self.level {
            c.group = GroupConfig { kind: GroupName::GammaN, level: Some(n) };
        }
        if let Some(p) = self.z0 {
            c.points.z0 = p;
        }
        if let Some(p) = self.z1 {
            c.points.z1 = p;
        }
        if let Some(p) = self.w {
            c.points.w = p;
        }
        if !self.thresholds.is_empty() {
            c.thresholds = self.thresholds.clone();
        }
        if let Some(s) = self.start {
            c.interval.start = s;
        }
        if let Some(l) = self.length {
            c.interval.length = l;
        }
        if let Some(b) = self.bins {
            c.bins = b;
        }
        if let Some(n) = self.n_max {
            c.n_max = n;
        }
        if let Some(m) = self.m {
            c.m = m;
        }
        if let Some(b) = self.budget {
            c.budget = b;
        }
        if let Some(t) = self.threads {
            c.threads = t;
        }
        if !self.s_values.is_empty() {
            c.s_values = self.s_values.clone();
        }
        if let Some(f) = self.format {
            c.output.format = Some(f);
        }
        if let Some(p) = &self.output {
            c.output.path = Some(p.clone());
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<()> {
    let (opts, cmd): (&Overrides, fn(&config::Experiment) -> Result<()>) = match &cli.command {
        Command::Enumerate(o) => (o, commands::enumerate),
        Command::Equidist(o) => (o, commands::equidist),
        Command::Density(o) => (o, commands::density),
        Command::Theorem2(o) => (o, commands::theorem2),
        Command::Theorem3(o) => (o, commands::theorem3),
        Command::Expsum(o) => (o, commands::expsum),
        Command::Gseries(o) => (o, commands::gseries),
        Command::Qdist(o) => (o, commands::qdist),
    };
    let experiment = opts.resolve()?.validate()?;
    orbit_angles::parallel::with_threads(experiment.threads, || cmd(&experiment))?
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<orbit_angles::Error>() {
            return match e {
                orbit_angles::Error::BudgetExceeded { .. } => 3,
                e if e.is_validation() => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
