use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use macrospin_cli::{parse_config, run, ExperimentKind};

const AFTER_HELP: &str = macrospin_cli::config::CONFIG_HELP;

/// Runs one coarse-graining experiment from a JSON config and writes CSV
/// artifacts plus summary.json.
///
/// Exit codes: 0 success, 1 invalid config, 2 invariant violation, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "macrospin", version, after_long_help = AFTER_HELP)]
struct Args {
    /// Experiment to run; must match the config's "experiment" key.
    experiment: ExperimentKind,
    /// Path to the JSON config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's "output").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "MACROSPIN_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(3);
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    if config.experiment != args.experiment {
        eprintln!(
            "error: {}: config is for '{}' but '{}' was requested",
            args.config.display(),
            config.experiment.name(),
            args.experiment.name()
        );
        return ExitCode::from(1);
    }
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from(&config.output));
    match run(&config, &out) {
        Ok(summary) => {
            let failed = summary.checks.iter().filter(|c| !c.passed).count();
            eprintln!(
                "wrote {} ({} checks, {failed} regime checks off)",
                out.join("summary.json").display(),
                summary.checks.len()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
