use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sentfolio::pipeline::{self, PipelineConfig};
use sentfolio::Error;

#[derive(Parser)]
#[command(name = "sentfolio", version, about = "News sentiment long-short backtests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Pipeline configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `paths.output_dir` from the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage: ingest, score, backtest, report.
    Run(Common),
    /// Match articles to tickers and write the relevant ones.
    Ingest(Common),
    /// Score matched articles, or import an external score file.
    Score(Common),
    /// Build the daily signal panel and run the long-short backtest.
    Backtest(Common),
    /// Compute metrics and write the report files.
    Report(Common),
    /// Check the configuration and list every problem found.
    Validate(Common),
}

fn load(common: &Common) -> Result<PipelineConfig, Error> {
    let mut cfg = PipelineConfig::load(&common.config)?;
    if let Some(dir) = &common.output_dir {
        cfg.set_output_dir(dir.clone());
    }
    Ok(cfg)
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(c) => {
            let report = pipeline::run_pipeline(&load(&c)?)?;
            println!("{}", report.to_json().trim_end());
        }
        Command::Ingest(c) => {
            let s = pipeline::ingest(&load(&c)?)?;
            println!("{} articles loaded, {} matched, {} dropped", s.loaded, s.retained, s.dropped);
        }
        Command::Score(c) => {
            let n = pipeline::score(&load(&c)?)?;
            println!("{n} score rows written");
        }
        Command::Backtest(c) => {
            let series = pipeline::backtest(&load(&c)?)?;
            println!("{} trading days backtested", series.len());
        }
        Command::Report(c) => {
            let report = pipeline::report(&load(&c)?)?;
            println!("{}", report.to_json().trim_end());
        }
        Command::Validate(c) => {
            let violations = pipeline::validate_config(&load(&c)?);
            if !violations.is_empty() {
                return Err(Error::Config(violations));
            }
            println!("ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Error::Config(violations) => {
                    for v in violations {
                        eprintln!("config error: {v}");
                    }
                }
                e => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
