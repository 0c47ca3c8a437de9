//! `kasner`: mode solves, closed-form comparisons, asymptotic fits, momentum
//! sweeps and light-ray redshifts in Kasner spacetimes.
//!
//! Exit codes: 0 success, 1 a reported check failed or output could not be
//! written, 2 invalid exponents or no closed form for the class, 3 numerical
//! failure, 64 usage error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_counts, parse_floats, Coords, FitKind, Format, RunConfig, Spacing, Task, UsageError};
use kasner_modes::asymptotics::AsymptoticsError;
use kasner_modes::closedform::ClosedFormError;
use kasner_modes::geodesics::GeodesicError;
use kasner_modes::kasner::KasnerError;
use kasner_modes::modes::ModeError;

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "kasner", version, about = "Scalar-wave modes and light rays in Kasner spacetimes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate exponents and report their class.
    Classify(Common),
    /// Solve one mode and write its trajectory.
    Solve(Common),
    /// Compare the closed-form solution with the numerical one.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Largest acceptable relative deviation.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Fit small-time or large-time asymptotic constants.
    Asymptotics {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Run solves or fits over a momentum grid into a directory.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, value_enum)]
        task: Option<Task>,
        #[arg(long, value_parser = parse_floats::<3>, allow_hyphen_values = true)]
        sweep_min: Option<[f64; 3]>,
        #[arg(long, value_parser = parse_floats::<3>, allow_hyphen_values = true)]
        sweep_max: Option<[f64; 3]>,
        #[arg(long, value_parser = parse_counts)]
        sweep_count: Option<[usize; 3]>,
        #[arg(long, value_enum)]
        sweep_spacing: Option<Spacing>,
    },
    /// Integrate a lightlike geodesic and check its conservation laws.
    Geodesic {
        #[command(flatten)]
        common: Common,
        /// Initial spatial direction.
        #[arg(long, value_parser = parse_floats::<3>, allow_hyphen_values = true)]
        v: Option<[f64; 3]>,
        /// Initial comoving position.
        #[arg(long, value_parser = parse_floats::<3>, allow_hyphen_values = true)]
        x0: Option<[f64; 3]>,
    },
    /// Redshift between two times along a light ray with momenta `-w`.
    Redshift {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tp: Option<f64>,
        #[arg(long)]
        tq: Option<f64>,
        /// Planck constant scale for the energy wavelength.
        #[arg(long)]
        planck: Option<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Flat JSON configuration; flags override its values.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Kasner exponents.
    #[arg(short, value_parser = parse_floats::<3>, allow_hyphen_values = true)]
    p: Option<[f64; 3]>,
    /// Momentum.
    #[arg(short, value_parser = parse_floats::<3>, allow_hyphen_values = true)]
    w: Option<[f64; 3]>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, value_parser = parse_floats::<2>, allow_hyphen_values = true)]
    alpha0: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_floats::<2>, allow_hyphen_values = true)]
    alphadot0: Option<[f64; 2]>,
    /// End of the span, in the coordinate chosen by `--coords`.
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long, value_enum)]
    coords: Option<Coords>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, value_enum)]
    fit: Option<FitKind>,
    #[arg(long, allow_hyphen_values = true)]
    s_floor: Option<f64>,
    /// Large-time fit window `T1,T2`.
    #[arg(long, value_parser = parse_floats::<2>)]
    window: Option<[f64; 2]>,
}

impl Common {
    /// File values overlaid by flag values.
    fn resolve(&self, extra: RunConfig) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            p: self.p,
            w: self.w,
            t0: self.t0,
            alpha0: self.alpha0,
            alphadot0: self.alphadot0,
            to: self.to,
            coords: self.coords,
            tol: self.tol,
            format: self.format,
            out: self.out.clone(),
            ..extra
        };
        cfg.overlay(&flags);
        Ok(cfg)
    }
}

impl FitArgs {
    fn into_config(self) -> RunConfig {
        RunConfig { fit: self.fit, s_floor: self.s_floor, window: self.window, ..Default::default() }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Classify(c) => commands::classify(c.resolve(RunConfig::default())?),
        Command::Solve(c) => commands::solve(c.resolve(RunConfig::default())?),
        Command::Compare { common, threshold } => commands::compare(common.resolve(RunConfig { threshold, ..Default::default() })?),
        Command::Asymptotics { common, fit } => commands::asymptotics(common.resolve(fit.into_config())?),
        Command::Sweep { common, fit, task, sweep_min, sweep_max, sweep_count, sweep_spacing } => {
            let extra = RunConfig { task, sweep_min, sweep_max, sweep_count, sweep_spacing, ..fit.into_config() };
            commands::sweep(common.resolve(extra)?)
        }
        Command::Geodesic { common, v, x0 } => commands::geodesic(common.resolve(RunConfig { v, x0, ..Default::default() })?),
        Command::Redshift { common, tp, tq, planck } => {
            commands::redshift(common.resolve(RunConfig { tp, tq, planck, ..Default::default() })?)
        }
    }
}

/// Exit code for an error, from the first recognised cause in its chain.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<KasnerError>() {
            return match e {
                KasnerError::ConstraintViolation { .. } => EXIT_DOMAIN,
                _ => EXIT_USAGE,
            };
        }
        if let Some(e) = cause.downcast_ref::<ClosedFormError>() {
            return match e {
                ClosedFormError::WrongClass { .. } => EXIT_DOMAIN,
                ClosedFormError::BadAnchor(_) => EXIT_USAGE,
                _ => EXIT_NUMERIC,
            };
        }
        if let Some(e) = cause.downcast_ref::<ModeError>() {
            return match e {
                ModeError::BadAnchor(_) | ModeError::BadTolerance(_) | ModeError::NonPositiveTime(_) => EXIT_USAGE,
                _ => EXIT_NUMERIC,
            };
        }
        if let Some(e) = cause.downcast_ref::<AsymptoticsError>() {
            return match e {
                AsymptoticsError::FloorTooShallow { .. } | AsymptoticsError::BadWindow { .. } | AsymptoticsError::ZeroMomentum => {
                    EXIT_USAGE
                }
                _ => EXIT_NUMERIC,
            };
        }
        if let Some(e) = cause.downcast_ref::<GeodesicError>() {
            return match e {
                GeodesicError::StepUnderflow { .. } | GeodesicError::Integrate(_) => EXIT_NUMERIC,
                _ => EXIT_USAGE,
            };
        }
    }
    EXIT_CHECK
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
