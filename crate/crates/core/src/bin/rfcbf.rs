use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rfcbf::harness::{self, report::render_tables, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "rfcbf",
    version,
    about = "FCBF / RFCBF feature selection and KNN benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run each configured method once on every full dataset.
    Select(Common),
    /// Cross-validate every sweep cell and write accuracy tables.
    Compare(Common),
    /// Time feature selection alone for every sweep cell.
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Relevance threshold.
    #[arg(long)]
    delta: Option<f64>,
    /// Number of resampling rounds.
    #[arg(long)]
    times: Option<usize>,
    /// Row sampling probability.
    #[arg(long)]
    prob: Option<f64>,
    /// Equal-width bins per feature.
    #[arg(long)]
    bins: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta: self.delta,
            times: self.times,
            prob: self.prob,
            bins: self.bins,
            seed: self.seed,
            folds: self.folds,
            repeats: self.repeats,
            workers: self.workers,
            out: self.out.clone(),
        }
    }
}

fn run(cli: Cli) -> rfcbf::Result<usize> {
    let (Command::Select(common) | Command::Compare(common) | Command::Bench(common)) = &cli.command;
    let config = ExperimentConfig::load(&common.config, &common.overrides())?;
    let out = &config.out;
    fs::create_dir_all(out)?;

    match cli.command {
        Command::Select(_) => {
            let records = harness::run_select(&config);
            harness::write_json(&out.join("selection.json"), &records)?;
            for r in &records {
                match &r.error {
                    Some(e) => eprintln!("{} / {}: {e}", r.dataset, r.method),
                    None => println!(
                        "{} / {}: {} features in {:.4}s: {}",
                        r.dataset,
                        r.method,
                        r.selected.len(),
                        r.elapsed_seconds,
                        r.selected
                            .iter()
                            .map(|f| f.name.as_str())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                }
            }
            Ok(records.iter().filter(|r| r.error.is_some()).count())
        }
        Command::Compare(_) => {
            let (report, runtime) = harness::run_compare(&config);
            harness::write_json(&out.join("report.json"), &report)?;
            harness::write_json(&out.join("timing.json"), &runtime)?;
            let tables = render_tables(&report, Some(&runtime));
            fs::write(out.join("tables.txt"), &tables)?;
            print!("{tables}");
            Ok(report.failed_cells())
        }
        Command::Bench(_) => {
            let report = harness::run_bench(&config);
            harness::write_json(&out.join("bench.json"), &report)?;
            let table = report.render_table();
            fs::write(out.join("bench.txt"), &table)?;
            print!("{table}");
            Ok(report.failed_cells())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("{failed} cell(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
