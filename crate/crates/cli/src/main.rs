mod commands;
mod config;
mod verify;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{read_config_file, Opts, RunConfig};

#[derive(Parser)]
#[command(
    name = "zaremba",
    version,
    about = "Experiments around Zaremba's conjecture"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Count denominators with a continued fraction over the alphabet.
    Census,
    /// Bracket the Hausdorff dimension and test the admissibility thresholds.
    Dimension,
    /// Build the norm-window ensemble and report its three-factor split.
    Ensemble,
    /// Multiplicity histogram, L2 growth, quadrature and region checks.
    Spectrum,
    /// Label a (q, K) grid by region and integrate the region masses.
    Regions,
    /// Threshold constants and admissible exponents per region.
    Thresholds,
    /// Seeded self-check of the library invariants.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Census => "census",
            Command::Dimension => "dimension",
            Command::Ensemble => "ensemble",
            Command::Spectrum => "spectrum",
            Command::Regions => "regions",
            Command::Thresholds => "thresholds",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Validation(String),
    /// Anything that went wrong while computing: exit code 1.
    Runtime(String),
}

impl From<zaremba_core::Error> for CliError {
    fn from(e: zaremba_core::Error) -> Self {
        use zaremba_core::Error::*;
        match e {
            InvalidAlphabet(_)
            | TrivialAlphabet(_)
            | ZeroQuotient
            | EmptyWord
            | LetterNotInAlphabet(_)
            | NotProperFraction { .. }
            | NotCoprime { .. }
            | Param { .. }
            | Budget { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub fn progress(msg: impl AsRef<str>) {
    eprintln!("zaremba: {}", msg.as_ref());
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, body)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    progress(format!("wrote {}", path.display()));
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut opts = cli.opts;
    if let Some(path) = opts.config.clone() {
        opts.merge_file(&read_config_file(&path)?)?;
    }
    let name = cli.command.name();
    let cfg = RunConfig::resolve(name, &opts)?;
    if let Some(w) = opts.workers {
        if w == 0 {
            return Err(CliError::Validation("workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }

    let (output, ok) = match cli.command {
        Command::Census => (commands::census(&cfg)?, true),
        Command::Dimension => (commands::dimension(&cfg)?, true),
        Command::Ensemble => (commands::ensemble(&cfg)?, true),
        Command::Spectrum => (commands::spectrum_cmd(&cfg)?, true),
        Command::Regions => (commands::regions(&cfg)?, true),
        Command::Thresholds => (commands::thresholds(&cfg)?, true),
        Command::Verify => {
            let checks = verify::run(cfg.seed);
            for c in &checks {
                progress(format!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            let result = json!({ "checks": checks, "failed": failed });
            (
                commands::Output {
                    result,
                    csv: None,
                    files: Vec::new(),
                },
                failed == 0,
            )
        }
    };

    let report = json!({
        "command": name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(&cfg).expect("config serialises"),
        "result": output.result,
    });
    let text = zaremba_core::json::to_string(&report) + "\n";

    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
        write_file(dir, &format!("{name}.json"), &text)?;
        for (file, body) in &output.files {
            write_file(dir, file, body)?;
        }
    }
    match (&output.csv, opts.csv && !opts.json) {
        (Some(csv), true) => print!("{csv}"),
        (None, true) => return Err(CliError::Validation(format!("{name} has no CSV output"))),
        _ => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(CliError::Validation(msg)) => {
            eprintln!("zaremba: error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("zaremba: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
