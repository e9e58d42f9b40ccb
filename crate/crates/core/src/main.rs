use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use escalation_core::harness::{self, RunConfig};
use escalation_core::output;
use escalation_core::scenario::generate_batch;
use escalation_core::{AgentVariant, Result};

#[derive(Debug, Parser)]
#[command(name = "escalation", version, about = "Escalation-pressure dynamics over synthetic ward trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded batch of perturbed trajectories with ground-truth windows.
    Generate(CommonArgs),
    /// Run agent variants over a batch and write traces, metrics and a summary.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated agent variants (stateless, first_order, second_order).
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<AgentVariant>>,
        /// Use a batch previously written by `generate`.
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Re-check a run directory, recompute the summary and emit plot data.
    Report {
        /// Run directory written by `run`.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => {
            let cfg = args.resolve()?;
            cfg.batch.validate()?;
            let batch = generate_batch(&cfg.batch, cfg.seed)?;
            output::write_batch(&batch, &cfg.output_dir)?;
            println!(
                "wrote {} trajectories to {} (batch hash {})",
                batch.entries.len(),
                cfg.output_dir.display(),
                batch.batch_hash()
            );
        }
        Command::Run { common, variants, batch } => {
            let mut cfg = common.resolve()?;
            if let Some(v) = variants {
                cfg.variants = v;
            }
            if batch.is_some() {
                cfg.batch_dir = batch;
            }
            let out = harness::run_batch(&cfg)?;
            print!("{}", output::summary_to_text(&out.summary));
            println!("wrote {} traces to {}", out.traces.len(), cfg.output_dir.display());
        }
        Command::Report { out } => {
            let rep = output::report(&out)?;
            print!("{}", output::summary_to_text(&rep.summary));
            println!(
                "lint ok: {} traces, {} rows; {} plot files in {}",
                rep.traces_checked,
                rep.rows_checked,
                rep.plot_files.len(),
                out.join("plot").display()
            );
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
