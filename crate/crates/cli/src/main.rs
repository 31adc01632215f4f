mod commands;
mod config;
mod report;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use verify::Suite;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(holofield::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => f.write_str(s),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<holofield::Error> for CliError {
    fn from(e: holofield::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(holofield::Error::CapExceeded { .. })
            | CliError::Core(holofield::Error::AcceptanceTooLow { .. }) => 3,
            _ => 2,
        }
    }
}

/// Exact holonomy fields over finite groups.
#[derive(Parser, Debug)]
#[command(name = "holofield", version)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conjugacy classes, characters, and the η and κ measures
    GroupInfo,
    /// Faces and topological type of a map file
    Faces,
    /// Partition function of a surface
    Partition,
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Multiply the right-hand kernel by 1 + EPS on the last class
        #[arg(long, value_name = "EPS")]
        perturb: Option<f64>,
    },
    /// Random ramified coverings
    Cover {
        #[command(subcommand)]
        command: CoverCommand,
    },
}

#[derive(Subcommand, Debug)]
pub enum CoverCommand {
    /// All monodromy tuples with K ramification points
    Enumerate {
        #[arg(long)]
        k: usize,
    },
    /// Bundle mass, with K points or integrated over the Poisson count
    Mass {
        #[arg(long)]
        k: Option<usize>,
    },
    /// Draw coverings by rejection
    Sample {
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = commands::Mode::Annealed)]
        mode: commands::Mode,
    },
    /// Compare holonomy and monodromy laws of the tame generators
    VerifyHoloMono,
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    let cfg = &cli.config;
    cfg.validate()?;
    match &cli.command {
        Command::GroupInfo => commands::group_info(cfg, out),
        Command::Faces => commands::faces(cfg, out),
        Command::Partition => commands::partition(cfg, out),
        Command::Verify { suite, perturb } => {
            let v = verify::run(cfg, *suite, *perturb)?;
            v.write(cfg.format, out)?;
            Ok(v.pass())
        }
        Command::Cover { command } => commands::cover(cfg, command, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
