use std::path::PathBuf;
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Parser, Subcommand};

use exdist_cli::{catalog, load, output, run_experiment, EXIT_CONFIG, EXIT_INVARIANT};

#[derive(Parser)]
#[command(name = "exdist", version, about = "Discrete extremal-distance experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a catalog entry.
    Run {
        /// Path to a JSON config, or the name of a catalog entry.
        config: String,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: the config's `output`, else runs/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the solver tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List the catalog.
    List,
    /// Print a catalog entry as a config file.
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for c in catalog::catalog() {
                println!("{:<22} {:<16} {}", c.name, c.kind().name(), c.description);
            }
            ExitCode::SUCCESS
        }
        Command::Show { name } => match catalog::find(&name) {
            Some(c) => {
                println!("{}", c.to_json());
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: no catalog entry named {name}");
                ExitCode::from(EXIT_CONFIG as u8)
            }
        },
        Command::Run { config, seed, out, tol } => {
            let (mut cfg, base) = match load(&config) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
            };
            if let Some(s) = seed {
                cfg.seed = Some(s);
            }
            if let Some(t) = tol {
                cfg.tolerance = t;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("config error: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
            let dir = out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("runs").join(&cfg.name));
            let started = SystemTime::now();
            let outcome = match run_experiment(&cfg, &base) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::FAILURE;
                }
            };
            for c in &outcome.checks {
                let tag = if c.pass { "pass" } else { "FAIL" };
                let what = if c.invariant { "invariant" } else { "check" };
                match (c.observed, c.limit) {
                    (Some(o), Some(l)) => println!("{tag} {what:<9} {}: {} (observed {o:.6}, limit {l:.6})", c.name, c.detail),
                    _ => println!("{tag} {what:<9} {}: {}", c.name, c.detail),
                }
            }
            match output::write_outputs(&dir, &cfg, &outcome, started) {
                Ok(files) => {
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::FAILURE;
                }
            }
            println!("status: {}", outcome.status());
            if outcome.invariant_breach() {
                ExitCode::from(EXIT_INVARIANT as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
