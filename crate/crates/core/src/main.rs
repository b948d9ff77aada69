use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use descentlab::harness::{run, Experiment, ExperimentConfig};
use descentlab::Error;

#[derive(Parser, Debug)]
#[command(name = "descentlab", version, about = "Double-descent experiments with reproducible CSV output")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output path; without either, CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a config file and print its effective values.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    #[command(name = "sparse-risk")]
    SparseRisk(RunArgs),
    #[command(name = "rff-sweep")]
    RffSweep(RunArgs),
    #[command(name = "kernel-approx")]
    KernelApprox(RunArgs),
    #[command(name = "implicit-bias")]
    ImplicitBias(RunArgs),
    Polyfit(RunArgs),
    #[command(name = "bias-variance")]
    BiasVariance(RunArgs),
    Emc(RunArgs),
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_file(&args.config, Some(experiment))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.out.is_some() {
        cfg.output = args.out;
    }
    let (out, bytes) = run(&cfg)?;
    for line in &out.summary {
        eprintln!("{line}");
    }
    match &cfg.output {
        Some(path) => eprintln!("wrote {}", path.display()),
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Validate { config } => ExperimentConfig::from_file(&config, None).map(|cfg| {
            for line in cfg.echo() {
                println!("{line}");
            }
        }),
        Command::SparseRisk(a) => execute(Experiment::SparseRisk, a),
        Command::RffSweep(a) => execute(Experiment::RffSweep, a),
        Command::KernelApprox(a) => execute(Experiment::KernelApprox, a),
        Command::ImplicitBias(a) => execute(Experiment::ImplicitBias, a),
        Command::Polyfit(a) => execute(Experiment::Polyfit, a),
        Command::BiasVariance(a) => execute(Experiment::BiasVariance, a),
        Command::Emc(a) => execute(Experiment::Emc, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
