use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::error;

use krylov_query::scenario::{load_config, run_all, write_outputs, OutputFormat};

#[derive(Parser)]
#[command(name = "kq", version, about = "State-aware Krylov query complexity scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario in a config file and write one report per scenario.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "kq-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Replace every seed in the config with this value.
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Parse a config file and check its static invariants.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("KQ_LOG", "error")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let problems = cfg.problems();
            if problems.is_empty() {
                println!("{}: {} scenario(s) ok", config.display(), cfg.scenarios.len());
                ExitCode::SUCCESS
            } else {
                for p in problems {
                    eprintln!("{p}");
                }
                ExitCode::from(2)
            }
        }
        Command::Run {
            config,
            out,
            format,
            seed_override,
        } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let summary = run_all(&cfg, seed_override);
            let format = match format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
                Format::Both => OutputFormat::Both,
            };
            let label = config
                .file_stem()
                .map_or_else(|| "run".to_string(), |s| s.to_string_lossy().into_owned());
            if let Err(e) = write_outputs(&summary, &out, format, &label) {
                error!("writing reports to {}: {e}", out.display());
                eprintln!("cannot write reports to {}: {e}", out.display());
                return ExitCode::from(2);
            }
            for r in &summary.reports {
                match &r.error {
                    Some(e) => println!("{:<28} error  {}: {}", r.scenario, e.kind, e.message),
                    None if !r.invariant_violations.is_empty() => println!(
                        "{:<28} error  {}",
                        r.scenario,
                        r.invariant_violations.join("; ")
                    ),
                    None => println!("{:<28} ok", r.scenario),
                }
            }
            if summary.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
