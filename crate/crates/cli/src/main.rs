//! `verify` — run named finite-group checks over (p, level) grids and emit
//! a machine-readable report.
//!
//! Exit codes: 0 when every requested check passes, 1 when any check fails
//! or is skipped for budget, 2 on usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use congver::checks::CheckSpec;
use congver::suite::{run_suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "verify")]
#[command(about = "Exhaustively verify finite congruence-subgroup and character-theory lemmas")]
#[command(version)]
struct Cli {
    /// Primes for the residue rings (repeatable); parameterizes the
    /// requested checks
    #[arg(long = "p")]
    p: Vec<u64>,

    /// Truncation exponent k for ℤ/pᵏ (checks pick sensible levels when
    /// omitted)
    #[arg(long)]
    truncation: Option<u32>,

    /// Named check to run (repeatable); omit for the full default suite
    #[arg(long = "check")]
    check: Vec<String>,

    /// Enumeration budget: exceeding it skips a check, never samples
    #[arg(long, default_value_t = congver::group::DEFAULT_BUDGET)]
    budget: u64,

    /// Worker threads (0 = automatic)
    #[arg(long, default_value_t = 0)]
    workers: u64,

    /// Record wall-clock durations in the report (off by default so that
    /// identical configs produce byte-identical reports)
    #[arg(long, default_value_t = false)]
    timings: bool,

    /// Config file in flat key=value format, or the literal `default`
    #[arg(long)]
    config: Option<String>,

    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// List the registered check names and exit
    #[arg(long, default_value_t = false)]
    list: bool,
}

fn build_config(cli: &Cli) -> Result<SuiteConfig, String> {
    let mut cfg = if let Some(path) = &cli.config {
        if path == "default" {
            SuiteConfig::default()
        } else {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config `{path}`: {e}"))?;
            SuiteConfig::parse(&text).map_err(|e| format!("config `{path}`: {e}"))?
        }
    } else if cli.check.is_empty() {
        SuiteConfig::default()
    } else {
        let p_list = if cli.p.is_empty() { vec![3] } else { cli.p.clone() };
        let mut checks = Vec::new();
        for name in &cli.check {
            for &p in &p_list {
                let mut spec = CheckSpec::new(name).with("p", p);
                if let Some(k) = cli.truncation {
                    spec = spec.with("truncation", k as u64);
                }
                checks.push(spec);
            }
        }
        SuiteConfig {
            p: p_list,
            truncation: cli.truncation.unwrap_or(2),
            budget: cli.budget,
            workers: cli.workers,
            timings: cli.timings,
            checks,
        }
    };
    // command-line overrides for runtime knobs
    if cli.budget != congver::group::DEFAULT_BUDGET {
        cfg.budget = cli.budget;
    }
    if cli.workers != 0 {
        cfg.workers = cli.workers;
    }
    if cli.timings {
        cfg.timings = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for name in congver::checks::CHECK_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    congver::configure_workers(cfg.workers);
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for check in &report.checks {
        let verdict = match check.verdict {
            congver::report::Verdict::Pass => "pass",
            congver::report::Verdict::Fail => "FAIL",
            congver::report::Verdict::SkippedBudget => "skipped-budget",
        };
        eprintln!("{:<24} {:>14}  {}", check.name, verdict, check.params);
    }
    let json = report.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{json}");
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
