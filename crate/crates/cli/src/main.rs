use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cartan_forge::commands::{
    cmd_corpus, cmd_euler, cmd_internal, cmd_presymplectic, cmd_reduce, cmd_roundtrip,
};
use cartan_forge::problem::Problem;
use cartan_forge::report::Report;
use cartan_forge::Error;
use clap::{Parser, Subcommand};

/// Exact variational calculus on jet spaces.
#[derive(Parser, Debug)]
#[command(name = "cartan-forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Largest derivative order reached during reduction.
    #[arg(long, global = true, value_name = "N", env = "CARTAN_FORGE_MAX_ORDER")]
    max_order: Option<u32>,

    /// Append wall-clock time to the report (output is then not reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler-Lagrange expressions of the [lagrangian] section.
    Euler { file: PathBuf },
    /// Internal Lagrangian of an Euler-Lagrange pair with its checks.
    Internal { file: PathBuf },
    /// Reconstruct an action from an internal Lagrangian with certificates.
    Roundtrip { file: PathBuf },
    /// Run the full pipeline on a built-in entry, or `all`.
    Corpus { name: String },
    /// Restrict the Lagrangian and every [form] to the equation.
    Reduce { file: PathBuf },
    /// Presymplectic form of an internal Lagrangian and the cocycle check.
    Presymplectic { file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Euler { .. } => "euler",
            Command::Internal { .. } => "internal",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Corpus { .. } => "corpus",
            Command::Reduce { .. } => "reduce",
            Command::Presymplectic { .. } => "presymplectic",
        }
    }
}

enum Failure {
    Input(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EulerNonvanishing(_) | Error::NotInternal(_) | Error::NotClosed(_) => {
                Failure::Math(e)
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

fn load(path: &PathBuf) -> Result<Problem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Problem::parse(&text).map_err(|e| {
        Failure::Input(match e {
            Error::Parse(p) => format!("{}:{p}", path.display()),
            other => format!("{}: {other}", path.display()),
        })
    })
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let order = cli.max_order;
    let report = match &cli.command {
        Command::Euler { file } => cmd_euler(&load(file)?, order)?,
        Command::Internal { file } => cmd_internal(&load(file)?, order)?,
        Command::Roundtrip { file } => cmd_roundtrip(&load(file)?, order)?,
        Command::Corpus { name } => cmd_corpus(name, order)?,
        Command::Reduce { file } => cmd_reduce(&load(file)?, order)?,
        Command::Presymplectic { file } => cmd_presymplectic(&load(file)?, order)?,
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (message, code) = match run(&cli) {
        Ok(mut report) => {
            if cli.timing {
                report.timing_ms = Some(start.elapsed().as_millis());
            }
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            return if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
        Err(Failure::Math(e)) => (e.to_string(), 1),
        Err(Failure::Input(msg)) => (msg, 2),
    };
    if cli.json {
        let value = serde_json::json!({
            "command": cli.command.name(),
            "error": message,
            "verdict": "FAIL",
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("error serializes"));
    }
    eprintln!("error: {message}");
    ExitCode::from(code)
}
