use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scem_cli::commands::{self, DenoiserKind};
use scem_cli::{CliError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "scem",
    version,
    about = "Structured prior extraction and diffusion sampling for low-light images"
)]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the sampler seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for batch extraction.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract illumination, reflectance, shadow and color-invariant maps.
    Extract {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sample an image from a stored condition stack.
    Sample {
        stack: PathBuf,
        /// oracle:<target>, zero or blur.
        #[arg(long)]
        denoiser: DenoiserKind,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
    /// Print quality metrics between two images.
    Metrics { a: PathBuf, b: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match cli.command {
        Command::Extract { inputs, output } => commands::extract(&inputs, &output, &cfg, cli.jobs as usize),
        Command::Sample {
            stack,
            denoiser,
            output,
        } => commands::sample(&stack, &denoiser, &output, &cfg).map(|_| ()),
        Command::Metrics { a, b } => {
            println!("{}", commands::metrics_line(&a, &b)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scem: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
