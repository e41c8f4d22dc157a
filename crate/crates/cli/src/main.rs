//! `verify`: run a named verification scenario and write a JSON report.
//!
//! Exit codes: 0 when every gated check passes, 1 on a verification failure, 2 on a
//! configuration or I/O error.

use bootstrap_cli::config::{Scenario, ScenarioConfig};
use bootstrap_cli::report::Report;
use bootstrap_cli::{scenarios, Failure};
use clap::Parser;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "verify", version, about = "Run entanglement-bootstrap verification scenarios")]
struct Cli {
    /// Scenario to run; without one the scenarios are listed.
    scenario: Option<Scenario>,
    /// JSON scenario config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for random instances; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; overrides the config. Without one the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CMI zero-test threshold in bits; overrides the config.
    #[arg(long = "tol-cmi")]
    tol_cmi: Option<f64>,
    /// Print the scenario list as JSON.
    #[arg(long)]
    json: bool,
}

fn list(as_json: bool) -> String {
    if as_json {
        let entries: Vec<_> = Scenario::ALL
            .iter()
            .map(|s| json!({ "name": s.name(), "description": s.description(), "required_keys": s.required_keys() }))
            .collect();
        return serde_json::to_string_pretty(&entries).expect("list serialises") + "\n";
    }
    let mut out = String::new();
    for s in Scenario::ALL {
        let keys = if s.required_keys().is_empty() { "none".to_string() } else { s.required_keys().join(", ") };
        out += &format!("{:<14} {}\n{:<14} required: {keys}\n", s.name(), s.description(), "");
    }
    out
}

fn execute(scenario: Scenario, cli: &Cli) -> Result<bool, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::new("--config is required"))?;
    let cfg = ScenarioConfig::load(path)?;
    if let Some(s) = cfg.scenario {
        if s != scenario {
            return Err(Failure::new(format!("config is for scenario {}, not {}", s.name(), scenario.name())));
        }
    }
    let mut tol = cfg.tolerances.apply(bootstrap_core::Tolerances::default());
    if let Some(x) = cli.tol_cmi {
        tol.cmi = x;
    }
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !(positive(tol.rank) && positive(tol.cmi) && positive(tol.psd)) || tol.dense_cap == 0 || tol.eigen_cap == 0 {
        return Err(Failure::new("tolerances must be positive and finite"));
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let out = cli.out.clone().or_else(|| cfg.out.clone());
    let outcome = scenarios::run(scenario, &cfg, tol, seed)?;
    let report = Report::new(scenario, seed, tol, outcome.backend, outcome.cover, outcome.checks);
    let text = report.to_json();
    match &out {
        Some(p) => std::fs::write(p, &text).map_err(|e| Failure::new(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    eprintln!(
        "{}: {} ({} gated checks, {} failed)",
        scenario.name(),
        if report.pass { "PASS" } else { "FAIL" },
        report.summary.gated,
        report.summary.failed
    );
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(scenario) = cli.scenario else {
        print!("{}", list(cli.json));
        return ExitCode::SUCCESS;
    };
    match execute(scenario, &cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::from(2)
        }
    }
}
