use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pipeline::{
    cmd_evaluate, cmd_featurize, cmd_pipeline, cmd_simulate, cmd_train, ConfigOverrides,
    ExperimentConfig, PipelineError,
};

/// Simulates QKD sessions under parameterized noise channels and learns to
/// identify the noise type from QBER statistics.
#[derive(Parser)]
#[command(name = "noiselab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for stage artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Master seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the two QBER corpora.
    Simulate(StageArgs),
    /// Turn the corpora into a labeled feature dataset plus histogram curves.
    Featurize(StageArgs),
    /// Fit PCA on the training rows and train the configured classifiers.
    Train(StageArgs),
    /// Score the stored models on held-out rows and write decision grids.
    Evaluate(StageArgs),
    /// Run every stage and write the consolidated report.
    Pipeline(StageArgs),
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Applies the `NOISELAB_THREADS` cap before any parallel work starts.
fn configure_threads() {
    let Ok(raw) = std::env::var("NOISELAB_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("warning: could not apply NOISELAB_THREADS={raw}: {e}");
            }
        }
        _ => {
            eprintln!("warning: ignoring NOISELAB_THREADS={raw:?} (want a positive integer)");
        }
    }
}

fn load_config(args: &StageArgs) -> Result<(ExperimentConfig, Vec<String>), PipelineError> {
    let overrides = ConfigOverrides::load(&args.config)?;
    let (config, warnings) = overrides.resolve(args.seed)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    Ok((config, warnings))
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Simulate(args) => {
            let (config, _) = load_config(&args)?;
            cmd_simulate(&config, &args.out)?;
            println!(
                "wrote {} sessions per corpus to {}",
                config.sessions_per_noise,
                args.out.display()
            );
        }
        Command::Featurize(args) => {
            let (config, _) = load_config(&args)?;
            cmd_featurize(&config, &args.out)?;
            println!("wrote feature dataset to {}", args.out.display());
        }
        Command::Train(args) => {
            let (config, _) = load_config(&args)?;
            let outcome = cmd_train(&config, &args.out)?;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            for trained in &outcome.classifiers {
                println!(
                    "{}: train accuracy {:.4}",
                    trained.kind.label(),
                    trained.train_metrics.accuracy
                );
            }
        }
        Command::Evaluate(args) => {
            let (config, _) = load_config(&args)?;
            let outcome = cmd_evaluate(&config, &args.out)?;
            for (kind, metrics) in &outcome.metrics {
                println!("{}: test accuracy {:.4}", kind.label(), metrics.accuracy);
            }
        }
        Command::Pipeline(args) => {
            let (config, warnings) = load_config(&args)?;
            let report = cmd_pipeline(&config, &args.out, warnings.clone())?;
            for warning in report.warnings.iter().skip(warnings.len()) {
                eprintln!("warning: {warning}");
            }
            for entry in &report.classifiers {
                println!(
                    "{}: train accuracy {:.4}, test accuracy {:.4}",
                    entry.classifier, entry.train.accuracy, entry.test.accuracy
                );
            }
            println!("report written to {}", args.out.join("report.json").display());
        }
    }
    Ok(())
}
