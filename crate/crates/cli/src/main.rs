use clap::{Parser, Subcommand, ValueEnum};
use findim_core::dsl::{parse_script, run_script, RunOptions};
use findim_core::suite;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "findim",
    about = "Exact-arithmetic projective resolutions, Tor/Ext, and finitistic dimension certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a script of definitions and queries and print a report
    Run {
        script: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Resolution length cap (also settable via FINDIM_CAP)
        #[arg(long)]
        cap: Option<usize>,
        /// Seed for randomized constructions
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of worker threads for independent queries
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the built-in acceptance suite
    CheckAll,
}

fn resolve_cap(flag: Option<usize>) -> Result<usize, String> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var("FINDIM_CAP") {
        Ok(v) => v.parse().map_err(|_| format!("FINDIM_CAP is not a number: '{v}'")),
        Err(_) => Ok(findim_core::resolution::DEFAULT_CAP),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { script, format, cap, seed, jobs } => {
            let cap = match resolve_cap(cap) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("{msg}");
                    return ExitCode::from(2);
                }
            };
            if jobs == 0 {
                eprintln!("--jobs must be at least 1");
                return ExitCode::from(2);
            }
            let text = match std::fs::read_to_string(&script) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", script.display());
                    return ExitCode::from(2);
                }
            };
            let parsed = match parse_script(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let report = run_script(&parsed, &RunOptions { cap, jobs, seed });
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::CheckAll => {
            let results = suite::run_all();
            let mut ok = true;
            for r in &results {
                let status = if r.pass { "PASS" } else { "FAIL" };
                println!("criterion {:2} [{status}] {}: {}", r.index, r.name, r.details);
                ok &= r.pass;
            }
            if ok {
                println!("all {} criteria passed", results.len());
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
