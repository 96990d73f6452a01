//! `guidetrap`: trapped-mode eigenvalues of a waveguide with a small rigid obstacle.
//!
//! Exit status: 0 on success, 1 on errors or failed validation, 2 when `--require-mode` is set and
//! the run ends in a nonexistence verdict.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use guidetrap::ModeFamily;

use config::{CommonArgs, Format, RunConfig, SweepParam};

#[derive(Parser)]
#[command(name = "guidetrap", version, about = "Trapped modes of a waveguide with a small rigid obstacle")]
struct Cli {
    /// Re-run the computation recorded in the provenance block of a JSON output.
    #[arg(long, value_name = "FILE", global = true)]
    replay: Option<PathBuf>,
    /// Exit with status 2 when no trapped mode exists.
    #[arg(long, global = true)]
    require_mode: bool,
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "FILE", global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum FamilyArg {
    Discrete,
    Embedded,
}

impl From<FamilyArg> for ModeFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Discrete => ModeFamily::Discrete,
            FamilyArg::Embedded => ModeFamily::Embedded,
        }
    }
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi, n] => Ok((
            lo.parse().map_err(|e| format!("{lo}: {e}"))?,
            hi.parse().map_err(|e| format!("{hi}: {e}"))?,
            n.parse().map_err(|e| format!("{n}: {e}"))?,
        )),
        _ => Err("expected lo,hi,n".into()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Area, dipole strengths and the leading-order threshold offset.
    Dipole {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Discrete eigenvalue below the first cutoff.
    Discrete {
        #[command(flatten)]
        common: CommonArgs,
        /// Include boundary traces in the JSON output.
        #[arg(long)]
        traces: bool,
    },
    /// Embedded eigenvalue between the first and second cutoffs; the offset a is solved for.
    Embedded {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        traces: bool,
    },
    /// σ over a range of a or ε (CSV by default).
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        param: Option<SweepParam>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Mode field sampled on a rectangular grid (CSV by default).
    Field {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Horizontal samples as lo,hi,n.
        #[arg(long, value_parser = parse_range)]
        xi: Option<(f64, f64, usize)>,
        /// Vertical samples as lo,hi,n.
        #[arg(long, value_parser = parse_range)]
        eta: Option<(f64, f64, usize)>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Oracle and fixture suite.
    Validate {
        /// Compare against a stored fixture file.
        #[arg(long, value_name = "FILE")]
        fixtures: Option<PathBuf>,
        /// Write freshly computed fixtures here.
        #[arg(long, value_name = "FILE")]
        write_fixtures: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dipole { .. } => "dipole",
            Command::Discrete { .. } => "discrete",
            Command::Embedded { .. } => "embedded",
            Command::Sweep { .. } => "sweep",
            Command::Field { .. } => "field",
            Command::Validate { .. } => "validate",
        }
    }

    fn common(&self) -> Option<&CommonArgs> {
        match self {
            Command::Dipole { common }
            | Command::Discrete { common, .. }
            | Command::Embedded { common, .. }
            | Command::Sweep { common, .. }
            | Command::Field { common, .. } => Some(common),
            Command::Validate { .. } => None,
        }
    }

    /// Folds the subcommand-specific flags into the configuration.
    fn apply(&self, cfg: &mut RunConfig) {
        match self {
            Command::Discrete { traces, .. } | Command::Embedded { traces, .. } => {
                cfg.output.traces |= *traces;
            }
            Command::Sweep { param, from, to, steps, values, family, format, .. } => {
                let s = &mut cfg.sweep;
                s.param = param.or(s.param);
                s.from = from.or(s.from);
                s.to = to.or(s.to);
                s.steps = steps.or(s.steps);
                if values.is_some() {
                    s.values = values.clone();
                }
                cfg.family = family.map(Into::into).or(cfg.family);
                cfg.output.format = format.or(cfg.output.format);
            }
            Command::Field { family, xi, eta, format, .. } => {
                cfg.field.xi = xi.or(cfg.field.xi);
                cfg.field.eta = eta.or(cfg.field.eta);
                cfg.family = family.map(Into::into).or(cfg.family);
                cfg.output.format = format.or(cfg.output.format);
            }
            Command::Dipole { .. } | Command::Validate { .. } => {}
        }
    }
}

fn run(cli: &Cli) -> Result<commands::Outcome> {
    let recorded = cli.replay.as_deref().map(output::read_provenance).transpose()?;
    let name = match (&cli.command, &recorded) {
        (Some(c), Some(r)) if c.name() != r.command => {
            bail!("replay file records `{}`, not `{}`", r.command, c.name())
        }
        (Some(c), _) => c.name().to_string(),
        (None, Some(r)) => r.command.clone(),
        (None, None) => bail!("a subcommand or --replay is required (see --help)"),
    };
    if let Some(Command::Validate { fixtures, write_fixtures }) = &cli.command {
        return commands::validate(fixtures.as_deref(), write_fixtures.as_deref());
    }
    let mut cfg = match (&recorded, cli.command.as_ref().and_then(|c| c.common())) {
        (Some(r), _) => r.config.clone(),
        (None, Some(common)) => match &common.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        },
        (None, None) => RunConfig::default(),
    };
    if let Some(cmd) = &cli.command {
        if let Some(common) = cmd.common() {
            if recorded.is_some() && common.config.is_some() {
                bail!("--replay and --config are mutually exclusive");
            }
            cfg.apply(common);
        }
        cmd.apply(&mut cfg);
    }
    cfg.resolve_defaults();
    match name.as_str() {
        "dipole" => commands::dipole(&cfg),
        "discrete" => commands::spectral(&cfg, ModeFamily::Discrete),
        "embedded" => commands::spectral(&cfg, ModeFamily::Embedded),
        "sweep" => commands::sweep(&cfg),
        "field" => commands::field(&cfg),
        other => bail!("cannot replay `{other}`"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = output::emit(cli.out.as_deref(), &outcome.body) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if let Some(note) = &outcome.note {
        eprintln!("{note}");
    }
    if cli.require_mode && outcome.mode_found == Some(false) {
        return ExitCode::from(2);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
