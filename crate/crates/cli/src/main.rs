use std::path::PathBuf;
use std::process::ExitCode;

use causal_mzi_cli::{load_config, run, validate, ExperimentConfig, Finding, Scenario};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "causal-mzi", version, about = "Causal single-photon interferometer experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario in CONFIG and write its outputs and report.json.
    Run { config: PathBuf },
    /// Check CONFIG and list every problem with its field path.
    Validate { config: PathBuf },
    /// Interference scan over phi in [0, pi] with N steps, overriding the config scenario.
    Scan {
        #[arg(long = "phi-steps", value_name = "N")]
        phi_steps: usize,
        config: PathBuf,
    },
}

fn report_findings(findings: &[Finding]) -> ExitCode {
    for f in findings {
        eprintln!("invalid: {f}");
    }
    ExitCode::from(2)
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    let cfg = load_config(path).map_err(|f| report_findings(&f))?;
    let findings = validate(&cfg);
    if findings.is_empty() { Ok(cfg) } else { Err(report_findings(&findings)) }
}

fn execute(cfg: &ExperimentConfig) -> ExitCode {
    match run(cfg) {
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Ok(report) => {
            for c in &report.checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!("{verdict} {:<40} {:.3e} (tolerance {:.1e})", c.name, c.measured, c.tolerance);
            }
            println!("wrote {} files to {}", report.outputs.len(), cfg.output.directory.display());
            if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE }
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Validate { config } => match load(&config) {
            Ok(_) => {
                println!("{}: ok", config.display());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { config } => match load(&config) {
            Ok(cfg) => execute(&cfg),
            Err(code) => code,
        },
        Command::Scan { phi_steps, config } => {
            let mut cfg = match load_config(&config) {
                Ok(c) => c,
                Err(f) => return report_findings(&f),
            };
            cfg.scenario = Scenario::InterferenceScan;
            cfg.run.phi_steps = phi_steps;
            let findings = validate(&cfg);
            if !findings.is_empty() {
                return report_findings(&findings);
            }
            execute(&cfg)
        }
    }
}
