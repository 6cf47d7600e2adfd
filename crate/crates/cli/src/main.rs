use std::path::PathBuf;
use std::process::ExitCode;

use bfslab_cli::{refine, run, write_outputs, CliError, SuiteConfig, SuiteName};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bfslab", version, about = "Run Banach function space inequality suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured suite once.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run at the configured sizes and at doubled N and time cells.
    Refine {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the available suite names.
    ListSuites,
}

fn execute(command: Command) -> Result<bool, CliError> {
    let (config, refining) = match command {
        Command::ListSuites => {
            for s in SuiteName::ALL {
                println!("{:<16}{}", s.as_str(), s.description());
            }
            return Ok(true);
        }
        Command::Run { config } => (config, false),
        Command::Refine { config } => (config, true),
    };
    let cfg = SuiteConfig::load(&config)?;
    let report = if refining { refine(&cfg)? } else { run(&cfg)? };
    let (json, csv) = write_outputs(&report, &cfg.output)?;
    let agg = &report.aggregate;
    println!(
        "{} {}: {} cases, {} violations, empirical sup {:.6e}{}",
        if report.passed { "PASS" } else { "FAIL" },
        report.suite,
        agg.count,
        agg.violations,
        agg.empirical_sup,
        agg.refinement_delta
            .map(|d| format!(", refinement delta {d:.3e}"))
            .unwrap_or_default()
    );
    for n in &report.notes {
        println!("  {n}");
    }
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
