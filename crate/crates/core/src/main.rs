use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eagle_eye::commands::{cmd_saliency, cmd_selftest, cmd_simulate, Exit};
use eagle_eye::config::{RunConfig, CONFIG_ENV};
use eagle_eye::Error;

#[derive(Parser)]
#[command(
    name = "eagle-eye",
    version,
    about = "Saliency-driven small-target search with a steerable narrow camera"
)]
struct Cli {
    /// Configuration file (TOML). Falls back to the environment variable.
    #[arg(long, global = true, value_name = "PATH", env = CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Overrides the scene seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads for the parallel stages; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Saliency map, salient point and region of one PPM/PGM image.
    Saliency { input: PathBuf },
    /// Closed-loop simulation of a scene file.
    Simulate { scene: PathBuf },
    /// Built-in consistency checks.
    Selftest,
}

fn run(cli: Cli) -> Result<Exit, Error> {
    // clap already folded the environment variable into `config`.
    let run = RunConfig::resolve(cli.config.as_deref(), cli.out, cli.seed)?;
    match cli.command {
        Command::Saliency { input } => {
            let det = cmd_saliency(&input, &run)?;
            println!("{}", det.point.report_line());
            Ok(Exit::Success)
        }
        Command::Simulate { scene } => {
            let outcome = cmd_simulate(&scene, &run)?;
            for (label, report) in &outcome.reports {
                println!("{label}: {}", report.verdict());
            }
            if outcome.detection_failed() {
                eprintln!("error: no salient target above the detection floor");
                Ok(Exit::DetectionFailed)
            } else {
                Ok(Exit::Success)
            }
        }
        Command::Selftest => {
            let results = cmd_selftest(&run, &mut std::io::stdout().lock())?;
            if results.iter().all(|r| r.passed) {
                Ok(Exit::Success)
            } else {
                Ok(Exit::SelftestFailed)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Exit::Usage.code()
            } else {
                0
            });
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(Exit::Usage.code());
        }
    };
    match pool.install(|| run(cli)) {
        Ok(exit) => ExitCode::from(exit.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Exit::for_error(&e).code())
        }
    }
}
