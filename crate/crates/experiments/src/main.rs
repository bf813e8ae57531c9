use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inexact_core::fixedpoint::IterationOptions;
use inexact_core::krylov::TerminationCriterion;
use inexact_core::problems::transmission::{dn_iterate, transmission_assemble, DnOptions};
use inexact_experiments::acceptance::{run_acceptance, AcceptanceOptions};
use inexact_experiments::config::{parse_config, ConfigError, Settings};
use inexact_experiments::report::write_report;
use inexact_experiments::runner::run_experiment;

const EXIT_USAGE: u8 = 1;
const EXIT_ACCEPTANCE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "inexact-fp",
    version,
    about = "Inexact fixed-point iteration experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its table.
    Run(Box<RunArgs>),
    /// Run every acceptance criterion and print one line per criterion.
    Acceptance,
    /// Write a transmission-problem field as an (x, y, value) CSV grid.
    ExportGrid(ExportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    dx: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// rel, relb or abs.
    #[arg(long)]
    criterion: Option<String>,
    /// previous or zero.
    #[arg(long)]
    inner_guess: Option<String>,
    /// lagged or sequential.
    #[arg(long)]
    ordering: Option<String>,
    /// csv or md.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// Add a wall-clock column (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, ConfigError> {
        let mut s = Settings::default();
        let pairs = [
            ("experiment", &self.experiment),
            ("tol", &self.tol),
            ("tau", &self.tau),
            ("dx", &self.dx),
            ("gamma", &self.gamma),
            ("eps", &self.eps),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("criterion", &self.criterion),
            ("inner-guess", &self.inner_guess),
            ("ordering", &self.ordering),
            ("format", &self.format),
            ("out", &self.out),
            ("max-iter", &self.max_iter),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        if self.timing {
            s.timing = Some(true);
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GridSource {
    /// The exact solution sampled on the grid.
    Exact,
    /// The monolithic discrete solution.
    Monolithic,
    /// The converged Dirichlet–Neumann solution.
    Dn,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, default_value = "0.05")]
    dx: String,
    #[arg(long, value_enum, default_value = "monolithic")]
    source: GridSource,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &RunArgs) -> Result<(), String> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Settings::default(),
    };
    let cfg = file
        .overridden_by(args.settings().map_err(|e| e.to_string())?)
        .resolve()
        .map_err(|e| e.to_string())?;
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    write_report(&report, cfg.format, cfg.out.as_deref()).map_err(|e| e.to_string())
}

fn export_grid(args: &ExportArgs) -> Result<(), String> {
    let dx = inexact_experiments::config::parse_number(&args.dx).map_err(|e| e.to_string())?;
    let sys = transmission_assemble(dx).map_err(|e| e.to_string())?;
    let values = match args.source {
        GridSource::Exact => sys.exact_on_grid(),
        GridSource::Monolithic => sys.monolithic_solve().map_err(|e| e.to_string())?,
        GridSource::Dn => {
            let run = dn_iterate(
                &sys,
                TerminationCriterion::relative(1e-2),
                &IterationOptions::default(),
                &DnOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            run.full_solution(&sys)
        }
    };
    match &args.out {
        Some(path) => fs::File::create(path)
            .and_then(|f| sys.write_grid_csv(&values, io::BufWriter::new(f)))
            .map_err(|e| format!("{}: {e}", path.display())),
        None => sys
            .write_grid_csv(&values, io::stdout().lock())
            .map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::ExportGrid(args) => export_grid(args),
        Command::Acceptance => {
            let summary = run_acceptance(&AcceptanceOptions::default());
            print!("{summary}");
            return if summary.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ACCEPTANCE)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
