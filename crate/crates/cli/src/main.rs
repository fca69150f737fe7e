use std::path::PathBuf;
use std::process::ExitCode;

use bondwh_cli::config::{Format, Overrides, RunConfig};
use bondwh_cli::{run, Command};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bondwh",
    version,
    about = "Optimal bond portfolios from maturity-difference correlations"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Write a synthetic curve panel to <out>/curves.csv
    Generate,
    /// Estimate the correlation function
    Estimate,
    /// Estimate and fit a Padé approximant
    Fit,
    /// Fit, build the symbol and factorize it
    Factorize,
    /// Compute the optimal and benchmark allocations
    Optimize,
    /// Invertibility, kernel and near-arbitrage diagnostics
    CheckArbitrage,
    /// Walk-forward (or fit-once) backtest
    Backtest,
    /// Every stage, including the backtest
    Pipeline,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Flags {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Yield-curve CSV file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthetic generation
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Maturity grid in months, e.g. 1..120
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Padé order M,N,K
    #[arg(long, global = true)]
    pade: Option<String>,
    /// Risk aversion
    #[arg(long, global = true, conflicts_with = "sum_to_one")]
    gamma: Option<f64>,
    /// Rescale holdings to sum to one
    #[arg(long, global = true)]
    sum_to_one: bool,
    /// Near-arbitrage threshold
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// Series truncation T
    #[arg(long, global = true)]
    trunc: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Largest correlation lag estimated
    #[arg(long, global = true)]
    max_lag: Option<usize>,
    /// Walk-forward window in months
    #[arg(long, global = true)]
    window: Option<usize>,
    /// Fit once on the whole panel instead of walking forward
    #[arg(long, global = true)]
    fit_once: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let f = cli.flags;
    let ov = Overrides {
        config: f.config,
        input: f.input,
        out: f.out,
        seed: f.seed,
        grid: f.grid,
        pade: f.pade,
        gamma: f.gamma,
        sum_to_one: f.sum_to_one,
        threshold: f.threshold,
        trunc: f.trunc,
        format: f.format.map(|x| match x {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        max_lag: f.max_lag,
        window: f.window,
        fit_once: f.fit_once,
    };
    let cmd = match cli.command {
        Cmd::Generate => Command::Generate,
        Cmd::Estimate => Command::Estimate,
        Cmd::Fit => Command::Fit,
        Cmd::Factorize => Command::Factorize,
        Cmd::Optimize => Command::Optimize,
        Cmd::CheckArbitrage => Command::CheckArbitrage,
        Cmd::Backtest => Command::Backtest,
        Cmd::Pipeline => Command::Pipeline,
    };
    let result = RunConfig::load(&ov).and_then(|cfg| run(cmd, &cfg));
    match result {
        Ok(summary) => {
            if let Some(path) = &summary.curves_written {
                println!("wrote {path}");
            }
            for file in &summary.files {
                println!("wrote {file}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
