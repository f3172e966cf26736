//! `qcarpet` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcarpet::io::TimeSpec;

mod commands;
mod figures;
mod validate;

#[derive(Debug, Parser)]
#[command(name = "qcarpet", version, about = "Quantum carpets of slit-collapsed states in an infinite well")]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` run configuration.
    config: PathBuf,

    /// Write outputs here instead of the config's `out_dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density over the whole well for one revival period (PGM and/or CSV).
    Carpet(Common),
    /// Density slices at the given times, one CSV each.
    Slice {
        #[command(flatten)]
        common: Common,
        /// Time as `2e-5`, `0.25T` or `1/4T`; repeatable. Defaults to the config's `t_list`.
        #[arg(long = "t", value_name = "TIME")]
        times: Vec<TimeSpec>,
    },
    /// Screen patterns at the given distances from the slit.
    Screen {
        #[command(flatten)]
        common: Common,
        /// Screen distance; repeatable. Defaults to the config's `d_list`.
        #[arg(long = "d", value_name = "DISTANCE")]
        distances: Vec<f64>,
    },
    /// Scan for full, mirror and (optionally) fractional revivals.
    Revivals {
        #[command(flatten)]
        common: Common,
        /// End of the scan, after the measurement.
        #[arg(long, value_name = "TIME", default_value = "T")]
        t_max: TimeSpec,
        /// Scan step.
        #[arg(long, value_name = "TIME", default_value = "0.005T")]
        step: TimeSpec,
        /// L2 distance below which a time counts as a revival.
        #[arg(long, default_value_t = qcarpet::analysis::REVIVAL_THRESHOLD)]
        threshold: f64,
        /// Also match fractional revivals `p/q T` with `q` up to this.
        #[arg(long, value_name = "QMAX")]
        fractional: Option<u64>,
    },
    /// Check the spectral engine against the independent oracles.
    Validate(Common),
    /// Write the parameter sets of the reference figures as named outputs.
    Figures(Common),
}

/// Failure reported on one line as `error[kind]: message`.
#[derive(Debug)]
pub struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure {
            kind: "validation",
            message: message.into(),
            code: 1,
        }
    }

    pub fn runtime(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
            code: 2,
        }
    }
}

impl From<qcarpet::Error> for Failure {
    fn from(err: qcarpet::Error) -> Self {
        use qcarpet::Error;
        let kind = match &err {
            Error::Validation { .. } => "validation",
            Error::Domain(_) => "domain",
            Error::UndefinedCorrelation(_) => "correlation",
            Error::Io { .. } => "io",
        };
        let message = match &err {
            Error::Validation { field, message } => format!("{field}: {message}"),
            Error::Domain(m) | Error::UndefinedCorrelation(m) => m.clone(),
            Error::Io { path, source } => format!("{}: {source}", path.display()),
        };
        Failure {
            kind,
            code: if err.is_validation() { 1 } else { 2 },
            message,
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let message = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    return ExitCode::SUCCESS;
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    "missing subcommand or argument (see --help)".to_string()
                }
                _ => {
                    let text = err.render().to_string();
                    let first = text.lines().next().unwrap_or("bad arguments");
                    first.trim_start_matches("error: ").to_string()
                }
            };
            eprintln!("error[usage]: {}", one_line(&message));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, one_line(&f.message));
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::validation("workers: need at least one worker"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::runtime("threads", e.to_string()))?;
    }
    let workers = cli.workers.unwrap_or_else(rayon::current_num_threads);
    match cli.command {
        Command::Carpet(c) => commands::carpet(&c.load()?, workers),
        Command::Slice { common, times } => commands::slice(&common.load()?, &times),
        Command::Screen { common, distances } => commands::screen(&common.load()?, &distances),
        Command::Revivals {
            common,
            t_max,
            step,
            threshold,
            fractional,
        } => commands::revivals(&common.load()?, t_max, step, threshold, fractional),
        Command::Validate(c) => validate::run(&c.load()?),
        Command::Figures(c) => figures::run(&c.load()?, workers),
    }
}

impl Common {
    fn load(&self) -> Result<qcarpet::io::RunConfig, Failure> {
        let text = std::fs::read_to_string(&self.config)
            .map_err(|e| Failure::runtime("io", format!("{}: {e}", self.config.display())))?;
        let mut config = qcarpet::io::parse_config(&text)?;
        if let Some(out) = &self.out {
            config.out_dir = out.clone();
        }
        Ok(config)
    }
}
