use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use ris_chest::harness::{run_experiment, write_csv, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ris-chest", version, about = "Channel estimation campaigns for RIS with a few active elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV files.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        experiment: Experiment,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `workers` (0 = one per core).
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides `out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration file without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> ris_chest::Result<()> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            for e in [Experiment::NmseVsActive, Experiment::NmseVsPower, Experiment::RankCdf] {
                cfg.validate_for(e)?;
            }
            println!("{}: ok", config.display());
        }
        Command::Run {
            config,
            experiment,
            seed,
            workers,
            out,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            let start = Instant::now();
            let result = run_experiment(&cfg, experiment)?;
            let files = write_csv(&result, &cfg.out_dir)?;
            let failed = result.trials.iter().filter(|r| r.value.is_none()).count();
            eprintln!(
                "{experiment}: {} trial rows ({failed} failed) in {:.1} s",
                result.trials.len(),
                start.elapsed().as_secs_f64()
            );
            for a in &result.aggregates {
                if experiment != Experiment::RankCdf {
                    eprintln!(
                        "  {:<14} {:>8} mean {:.4e} ± {:.2e} (n = {})",
                        a.estimator, a.sweep_value, a.mean, a.std_err, a.n_trials
                    );
                }
            }
            println!("{}", files.trials.display());
            println!("{}", files.aggregates.display());
            println!("{}", files.meta.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
