//! `dexarb`: fixture replay through the detect-and-take loop, scenario
//! generation, and the two-transaction native round trip.
//!
//! Exit codes: 0 success, 1 usage error, 2 fixture or data error.

use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use dexarb_core::replay::{parse_fixtures, replay, ReplayConfig};
use dexarb_core::scenario::{generate, GenParams, Plant};
use dexarb_core::strategy::run_round_trip;
use dexarb_core::types::LedgerIndex;
use dexarb_core::{Allowlist, Amount, CurrencyId};

#[derive(Parser)]
#[command(
    name = "dexarb",
    version,
    about = "Arbitrage engine for an XRPL-style DEX: replay fixtures, generate scenarios, run the native round trip"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay JSONL fixtures through the per-ledger detect-and-take loop.
    Replay {
        /// Fixture path, or - for standard input.
        #[arg(long)]
        fixtures: String,
        /// Per-transaction fee in drops.
        #[arg(long, default_value_t = 10)]
        fee_drops: u64,
        /// File of issued currencies the bot may trade, CODE ISSUER per
        /// line; absent means everything is fair game.
        #[arg(long)]
        allowlist: Option<String>,
        /// Report path, or - for standard output.
        #[arg(long, default_value = "-")]
        report: String,
        /// Abort when a fixture transaction fails to apply.
        #[arg(long)]
        strict: bool,
        /// Print detection wall time to the error stream.
        #[arg(long)]
        timed: bool,
    },
    /// Generate a fixture: an arbitrage-free background market, optionally
    /// with one planted loop.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Issued currencies in the background pool.
        #[arg(long)]
        currencies: usize,
        /// Background offers to place.
        #[arg(long)]
        offers: usize,
        /// Ledgers of offer activity after the bootstrap.
        #[arg(long)]
        ledgers: LedgerIndex,
        /// Loop to plant: a product (1.1 or 11/10) and an edge count.
        #[arg(long, num_args = 2, value_names = ["PI", "LENGTH"])]
        plant: Option<Vec<String>>,
        /// Output path, or - for standard output. With a file, what was
        /// planted lands in PATH.truth.json; on standard output it goes to
        /// the error stream.
        #[arg(long)]
        out: String,
    },
    /// Run the two-transaction native round trip in a self-contained
    /// market and print the aggregate gain across both accounts.
    Roundtrip {
        /// Native amount spent, in whole currency units.
        #[arg(long)]
        x: String,
        /// Native amount received back.
        #[arg(long)]
        x_prime: String,
        #[arg(long, default_value_t = 10)]
        fee_drops: u64,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Data(format!("standard input: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| Failure::Data(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn write_output(path: &str, body: &str) -> Result<(), Failure> {
    if path == "-" {
        io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Data(format!("standard output: {e}")))
    } else {
        fs::write(path, body).map_err(|e| Failure::Data(format!("{path}: {e}")))
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Replay { fixtures, fee_drops, allowlist, report, strict, timed } => {
            let text = read_input(&fixtures)?;
            let events = parse_fixtures(BufReader::new(text.as_bytes()))
                .map_err(|e| Failure::Data(format!("{fixtures}: {e}")))?;
            let allowlist = match allowlist {
                None => Allowlist::All,
                Some(path) => {
                    let body = fs::read_to_string(&path)
                        .map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
                    Allowlist::parse(&body).map_err(|e| Failure::Usage(format!("{path}: {e}")))?
                }
            };
            let config = ReplayConfig { fee_drops, allowlist, strict, ..ReplayConfig::default() };
            let run = replay(events, &config).map_err(|e| Failure::Data(e.to_string()))?;
            if timed {
                eprintln!("detect time: {} us", run.detect_nanos / 1_000);
            }
            write_output(&report, &run.render())
        }
        Command::Gen { seed, currencies, offers, ledgers, plant, out } => {
            let plant = match plant.as_deref() {
                None => None,
                Some([product, length]) => {
                    Some(Plant::parse(product, length).map_err(Failure::Usage)?)
                }
                Some(_) => return Err(Failure::Usage("--plant takes PI LENGTH".into())),
            };
            let params = GenParams { seed, currencies, offers, ledgers, plant };
            let scenario = generate(&params).map_err(Failure::Usage)?;
            let mut truth =
                serde_json::to_string_pretty(&scenario.truth).expect("truth serializes");
            truth.push('\n');
            write_output(&out, &scenario.render_events())?;
            if out == "-" {
                eprint!("{truth}");
            } else {
                write_output(&format!("{out}.truth.json"), &truth)?;
            }
            Ok(())
        }
        Command::Roundtrip { x, x_prime, fee_drops } => {
            let x = Amount::parse(&x, CurrencyId::Native)
                .map_err(|e| Failure::Usage(format!("--x: {e}")))?;
            let x_prime = Amount::parse(&x_prime, CurrencyId::Native)
                .map_err(|e| Failure::Usage(format!("--x-prime: {e}")))?;
            let run = run_round_trip(&x, &x_prime, fee_drops).map_err(Failure::Usage)?;
            println!("gain {}", run.gain);
            Ok(())
        }
    }
}
