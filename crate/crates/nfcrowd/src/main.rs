use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use nfcrowd::output::{log_csv, receipts_csv, render_compare, render_matrix, render_run};
use nfcrowd::{load_config, state_dump, vectors, Format};
use nfcrowd_core::harness::{compare, run_adversary_matrix, run_scenario_full};

#[derive(Parser)]
#[command(name = "nfcrowd", version, about = "Simulate strawman and NF-Crowd crowdsourcing contests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    out: Format,
    /// Overrides the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Write the gas receipt log as CSV.
        #[arg(long)]
        receipts: Option<PathBuf>,
        /// Write the final contest state.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Write the agent decision log as CSV.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run the adversary matrix around a base scenario.
    Matrix {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare both modes against a centralized fee over crowd sizes.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "10,50,100,500,1000")]
        scales: Vec<usize>,
        #[arg(long, default_value_t = 500.0)]
        reward: f64,
    },
    /// Print the hash and Merkle regression vectors, or check them against a file.
    Vectors {
        #[arg(long)]
        check: Option<PathBuf>,
    },
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, receipts, dump, log } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let run = run_scenario_full(&cfg)?;
            print!("{}", render_run(&run.report, cli.out)?);
            if let Some(p) = receipts {
                write(&p, &receipts_csv(run.world.ledger.receipts())?)?;
            }
            if let Some(p) = log {
                write(&p, &log_csv(run.log())?)?;
            }
            if let Some(p) = dump {
                let Some(c) = &run.contest else { bail!("no contest was opened") };
                write(&p, &state_dump(&run.world, &run.crowd, &c.id))?;
            }
            Ok(run.report.passed())
        }
        Command::Matrix { config } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let rows = run_adversary_matrix(&cfg)?;
            print!("{}", render_matrix(&rows, cli.out)?);
            Ok(rows.iter().all(|r| r.passed()))
        }
        Command::Compare { scales, reward } => {
            let report = compare(&scales, reward, cli.seed.unwrap_or(0))?;
            print!("{}", render_compare(&report, cli.out)?);
            let first = report.rows[0].nfcrowd_usd;
            Ok(report.rows.iter().all(|r| (r.nfcrowd_usd - first).abs() < 0.01 && r.nfcrowd_usd < r.strawman_usd))
        }
        Command::Vectors { check } => {
            let v = vectors::vectors();
            match check {
                None => {
                    print!("{}", vectors::render(&v));
                    Ok(true)
                }
                Some(p) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    let Some(pinned) = vectors::parse(&text) else { bail!("malformed vector file") };
                    let ok = pinned == v;
                    println!("{}", if ok { "vectors match" } else { "vectors differ" });
                    Ok(ok)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
