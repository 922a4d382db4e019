use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qpd::cli::{self, CliError, ConfigError, Mode, RunOutcome, ScenarioConfig};
use qpd::{central, oracles};

#[derive(Parser)]
#[command(
    name = "qpd",
    version,
    about = "Quantum potential dynamics scenario runner"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Scenario config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Ensemble seed; overrides `ensemble.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress the report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the mode selected by `run.mode`.
    Run,
    /// Run the invariant checks on the configured scenario.
    Check,
    /// Classify the radial motion for the constants (E~, C).
    #[command(allow_negative_numbers = true)]
    Classify { etilde: f64, c: f64 },
    /// Evaluate a closed-form oracle by id.
    #[command(allow_negative_numbers = true)]
    Oracle {
        formula_id: String,
        inputs: Vec<f64>,
    },
    /// Write the regime map over the configured (E~, C) grid.
    Sweep,
}

fn load(global: &Global) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &global.config {
        Some(path) => cli::load_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(dir) = &global.out {
        cfg.output.dir = dir.to_string_lossy().into_owned();
    }
    if let Some(seed) = global.seed {
        cfg.ensemble.seed = seed;
    }
    Ok(cfg)
}

fn finish(global: &Global, result: Result<RunOutcome, CliError>) -> ExitCode {
    match result {
        Ok(outcome) => {
            if !global.quiet {
                print!("{}", outcome.report.render());
            }
            if outcome.report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed checks: {}", outcome.report.failures().join(", "));
                ExitCode::FAILURE
            }
        }
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        CliError::Config(ConfigError::Parse(_) | ConfigError::Validation(_)) => ExitCode::from(2),
        _ => ExitCode::FAILURE,
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let g = &args.global;
    match args.command {
        Command::Classify { etilde, c } => {
            let cls = central::classify(etilde, c);
            if !g.quiet {
                println!("regime: {}", cls.regime.name());
                println!("bounded: {}", cls.regime.is_bounded());
                println!(
                    "turning_radius: {}",
                    cls.turning_radius.map_or("none".into(), |r| r.to_string())
                );
            }
            ExitCode::SUCCESS
        }
        Command::Oracle { formula_id, inputs } => match oracles::evaluate(&formula_id, &inputs) {
            Ok(r) => {
                if !g.quiet {
                    println!("formula_id: {}", r.formula_id);
                    for (name, v) in &r.inputs {
                        println!("{name}: {v}");
                    }
                    println!("value: {}", r.value);
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Run => match load(g) {
            Ok(cfg) => finish(g, cli::run(&cfg)),
            Err(e) => fail(e),
        },
        Command::Check => match load(g) {
            Ok(cfg) => finish(g, cli::check(&cfg)),
            Err(e) => fail(e),
        },
        Command::Sweep => match load(g) {
            Ok(mut cfg) => {
                cfg.run.mode = Mode::Sweep;
                finish(g, cli::run(&cfg))
            }
            Err(e) => fail(e),
        },
    }
}
