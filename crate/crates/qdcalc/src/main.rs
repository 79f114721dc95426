use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::error;
use qdcalc::commands::{cmd_check, cmd_minimize, cmd_qd, load, Outcome, Overrides, Settings};
use qdcalc::{json, text, Failure};

#[derive(Parser, Debug)]
#[command(name = "qdcalc", version, about = "Quasidifferentials and optimality checks for nonsmooth programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// LP membership slack.
    #[arg(long, global = true)]
    tol_geom: Option<f64>,

    /// Tie threshold for active max/min terms and constraints.
    #[arg(long, global = true)]
    tol_active: Option<f64>,

    #[arg(long, global = true)]
    max_iters: Option<usize>,

    #[arg(long, global = true)]
    step_init: Option<f64>,

    /// Seed for the random directions of the finite-difference diagnostic.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quasidifferentials of the objective and constraints at the point.
    Qd {
        file: PathBuf,
        /// Comma-separated point overriding the problem's `point`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
    },
    /// Necessary optimality condition at the point.
    Check { file: PathBuf },
    /// Descent from the point, then the unconstrained check at the result.
    Minimize { file: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let overrides = Overrides {
        tol_geom: cli.tol_geom,
        tol_active: cli.tol_active,
        max_iters: cli.max_iters,
        step_init: cli.step_init,
        seed: cli.seed,
    };
    let file = match &cli.command {
        Command::Qd { file, .. } | Command::Check { file } | Command::Minimize { file } => file,
    };
    let (problem, compiled) = load(file)?;
    let settings = Settings::resolve(&problem.options, &overrides)?;
    let name = file.display().to_string();
    match &cli.command {
        Command::Qd { point, .. } => cmd_qd(&compiled, &name, point.as_deref(), &settings),
        Command::Check { .. } => cmd_check(&compiled, &name, &settings),
        Command::Minimize { .. } => cmd_minimize(&compiled, &name, &settings),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QDCALC_LOG", "error")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            match cli.format {
                Format::Json => println!("{}", json::to_string(&outcome.report)),
                Format::Text => print!("{}", text::render(&outcome.report)),
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(f) => {
            error!("{}", f);
            eprintln!("qdcalc: {}", f);
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
