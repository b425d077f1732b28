use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fediot_cli::{cmd_compare, cmd_run, cmd_synth, CliError, ExperimentFile};

/// Federated autoencoder anomaly detection on IoT traffic: deterministic
/// batch experiments over synthetic or CSV device data.
#[derive(Parser)]
#[command(name = "fediot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic per-device traffic CSVs
    Synth(CommonArgs),
    /// Run the full federated experiment and write the report bundle
    Run(CommonArgs),
    /// Run the experiment with FedAvg and FedAvgM and emit a comparison table
    Compare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides out_dir from the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides seed from the config
    #[arg(long)]
    seed: Option<u64>,
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let (args, run): (&CommonArgs, fn(&fediot_cli::ResolvedExperiment) -> Result<(), CliError>) =
        match &command {
            Command::Synth(args) => (args, |exp| {
                let paths = cmd_synth(exp)?;
                println!("wrote {} device files to {}", paths.len(), exp.out_dir.display());
                Ok(())
            }),
            Command::Run(args) => (args, |exp| cmd_run(exp).map(|_| ())),
            Command::Compare(args) => (args, |exp| cmd_compare(exp).map(|_| ())),
        };
    let exp = ExperimentFile::load(&args.config)?.resolve(args.seed, args.out.clone())?;
    run(&exp)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fediot: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
