use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dirac_fluid_cli::check::run_checks;
use dirac_fluid_cli::config::Recipe;
use dirac_fluid_cli::{parse_config, run, CliError};

#[derive(Parser)]
#[command(name = "dirac-fluid", version, about = "Lattice Dirac solver with reduced pipeline and fluid diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write manifest, snapshots and diagnostics
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "runs")]
        outdir: PathBuf,
        /// Dotted-path override, e.g. `grid.points.0=128`; repeatable
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run the invariant suite; exit status 0 iff every check passes
    Check {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Built-in initial-data recipes
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    List,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, outdir, overrides } => {
            let scenario = parse_config(&config, &overrides)?;
            let summary = run(&scenario, &outdir)?;
            println!("wrote {} ({} steps, {} csv files)", summary.dir.display(), summary.steps, summary.files.len());
            if let Some(d) = summary.max_equivalence_sup {
                println!("max full/reduced sup discrepancy {d:.3e}");
            }
            if let Some(d) = summary.max_charge_drift {
                println!("max relative charge drift {d:.3e}");
            }
            println!("content hash {}", summary.content_hash);
            Ok(())
        }
        Command::Check { seed } => {
            let outcomes = run_checks(seed);
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            for o in &outcomes {
                println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            println!("check: {} passed, {failed} failed", outcomes.len() - failed);
            if failed > 0 {
                return Err(CliError::Validation(format!("{failed} invariant check(s) failed")));
            }
            Ok(())
        }
        Command::Scenario { action: ScenarioAction::List } => {
            for (name, about) in Recipe::NAMES {
                println!("{name:<16} {about}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
