//! `jmcert`: certify incompatibility breaking of Gaussian channels from the
//! command line.

mod commands;
mod config;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{CliError, FileConfig};

#[derive(Debug, Parser)]
#[command(name = "jmcert", version)]
#[command(about = "Incompatibility-breaking certificates for bosonic Gaussian channels")]
struct Cli {
    /// JSON file supplying option defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// More log output on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Format as ValueEnum>::from_str(s, false).map_err(|_| format!("unknown format `{s}` (expected json, csv or text)"))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify whether a channel breaks the incompatibility of a measurement set.
    Certify {
        /// Channel JSON file.
        #[arg(long)]
        channel: Option<PathBuf>,
        /// JSON file with the list of measurements.
        #[arg(long)]
        measurements: Option<PathBuf>,
        /// Exit with status 3 when the set is not certified broken.
        #[arg(long)]
        fail_if_not_broken: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the table of breaking thresholds for the single-mode channel classes.
    Table1 {
        /// Restrict to one class (A1, A2, B1, B2, B2_Id, C_loss, C_amp, D).
        #[arg(long)]
        class: Option<String>,
        /// Also write the rows as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Smallest isotropic ordering broken by a channel.
    Smin {
        /// Channel JSON file.
        #[arg(long)]
        channel: Option<PathBuf>,
    },
    /// Sample the closed-form s-ordered quasiprobability of a measurement on a grid.
    #[command(allow_negative_numbers = true)]
    PqdGrid {
        /// Measurement JSON file.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Ordering parameter.
        #[arg(long)]
        s: Option<f64>,
        /// The grid covers [-W, W]².
        #[arg(long)]
        half_width: Option<f64>,
        /// Points per axis.
        #[arg(long)]
        points: Option<usize>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Fock-space oracle battery.
    OracleValidate {
        /// Fock cutoff D.
        #[arg(long)]
        cutoff: Option<usize>,
        /// Run only this item (repeatable).
        #[arg(long)]
        item: Vec<String>,
    },
    /// Entanglement-breaking check of a lossy channel with excess noise.
    #[command(allow_negative_numbers = true)]
    EbCheck {
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Upper end of the two-mode squeezing scan.
        #[arg(long)]
        nu_max: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let format = match cli.format {
        Some(f) => Some(f),
        None => file.string("format")?.map(|s| s.parse::<Format>().map_err(CliError::input)).transpose()?,
    };
    let mut stdout = std::io::stdout().lock();
    let code = match cli.command {
        Command::Certify { channel, measurements, fail_if_not_broken, out } => {
            let args = commands::CertifyArgs { channel, measurements, fail_if_not_broken, out };
            commands::certify(args, &file, format, &mut stdout)?
        }
        Command::Table1 { class, csv } => commands::table1(class, csv, &file, format, &mut stdout)?,
        Command::Smin { channel } => commands::smin(channel, &file, format, &mut stdout)?,
        Command::PqdGrid { model, s, half_width, points, out } => {
            let args = commands::PqdGridArgs { model, s, half_width, points, out };
            commands::pqd_grid(args, &file, format, &mut stdout)?
        }
        Command::OracleValidate { cutoff, item } => commands::oracle_validate(cutoff, item, &file, format, &mut stdout)?,
        Command::EbCheck { tau, epsilon, nu_max } => commands::eb_check(tau, epsilon, nu_max, &file, format, &mut stdout)?,
    };
    stdout.flush().map_err(|e| CliError::failure(format!("stdout: {e}")))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { config::EXIT_INPUT } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
