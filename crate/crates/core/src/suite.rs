//! Suite configuration and execution.
//!
//! The config format is flat key=value lines; `#` starts a comment. Global
//! keys: `p` (repeatable; default prime list), `truncation`, `budget`,
//! `workers`, `timings`. Each `check = <name> [key=value …]` line requests
//! one check with inline parameters. The literal config name `default`
//! expands to the built-in acceptance grid.

use thiserror::Error;

use crate::checks::{default_suite, run_check, CheckError, CheckSpec};
use crate::group::DEFAULT_BUDGET;
use crate::report::{CheckReport, Environment, RunReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub p: Vec<u64>,
    pub truncation: u32,
    pub budget: u64,
    pub workers: u64,
    pub timings: bool,
    pub checks: Vec<CheckSpec>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            p: vec![3, 5],
            truncation: 2,
            budget: DEFAULT_BUDGET,
            workers: 0,
            timings: false,
            checks: default_suite(),
        }
    }
}

impl SuiteConfig {
    /// Parse the flat key=value format. Errors carry line and column.
    pub fn parse(text: &str) -> Result<SuiteConfig, ConfigError> {
        let mut cfg = SuiteConfig {
            p: Vec::new(),
            truncation: 2,
            budget: DEFAULT_BUDGET,
            workers: 0,
            timings: false,
            checks: Vec::new(),
        };
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = match raw.find('#') {
                Some(ix) => &raw[..ix],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let eq = line.find('=').ok_or(ConfigError::Parse {
                line: line_no,
                column: line.len(),
                message: "expected key = value".into(),
            })?;
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            let column = eq + 2;
            let parse_u64 = |v: &str| -> Result<u64, ConfigError> {
                v.parse().map_err(|_| ConfigError::Parse {
                    line: line_no,
                    column,
                    message: format!("`{v}` is not an integer"),
                })
            };
            match key {
                "p" => cfg.p.push(parse_u64(value)?),
                "truncation" => cfg.truncation = parse_u64(value)? as u32,
                "budget" => cfg.budget = parse_u64(value)?,
                "workers" => cfg.workers = parse_u64(value)?,
                "timings" => {
                    cfg.timings = match value {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        other => {
                            return Err(ConfigError::Parse {
                                line: line_no,
                                column,
                                message: format!("`{other}` is not a boolean"),
                            })
                        }
                    }
                }
                "check" => {
                    let mut parts = value.split_whitespace();
                    let name = parts.next().ok_or(ConfigError::Parse {
                        line: line_no,
                        column,
                        message: "check needs a name".into(),
                    })?;
                    let mut spec = CheckSpec::new(name);
                    for (ix, kv) in parts.enumerate() {
                        let eq2 = kv.find('=').ok_or(ConfigError::Parse {
                            line: line_no,
                            column: column + ix,
                            message: format!("check parameter `{kv}` must be key=value"),
                        })?;
                        let pk = &kv[..eq2];
                        let pv: u64 = kv[eq2 + 1..].parse().map_err(|_| ConfigError::Parse {
                            line: line_no,
                            column: column + ix,
                            message: format!("`{}` is not an integer", &kv[eq2 + 1..]),
                        })?;
                        spec = spec.with(pk, pv);
                    }
                    cfg.checks.push(spec);
                }
                other => {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        column: 1,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        if cfg.p.is_empty() {
            cfg.p = vec![3, 5];
        }
        Ok(cfg)
    }

    pub fn environment(&self) -> Environment {
        Environment {
            p: self.p.clone(),
            truncation: self.truncation,
            budget: self.budget,
            workers: self.workers,
            timings: self.timings,
        }
    }
}

/// Run every check, reporting in config order. Checks execute in parallel
/// on the worker pool (each check is internally deterministic, so the
/// schedule cannot affect the report); without the `parallel` feature they
/// run sequentially.
pub fn run_suite(config: &SuiteConfig) -> Result<RunReport, CheckError> {
    #[cfg(feature = "parallel")]
    let outcomes: Result<Vec<CheckReport>, CheckError> = {
        use rayon::prelude::*;
        config
            .checks
            .par_iter()
            .map(|spec| run_check(spec, config.budget))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Result<Vec<CheckReport>, CheckError> = config
        .checks
        .iter()
        .map(|spec| run_check(spec, config.budget))
        .collect();
    let mut reports = outcomes?;
    if !config.timings {
        for r in &mut reports {
            r.duration_ms = 0;
        }
    }
    Ok(RunReport::new(config.environment(), reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_empty_bundle() {
        let cfg = SuiteConfig::parse("").unwrap();
        assert!(cfg.checks.is_empty());
        let report = run_suite(&cfg).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.totals.pass, 0);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = SuiteConfig::parse("p = 3\nbudget : 5\n").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 2),
        }
        let err = SuiteConfig::parse("p = x\n").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 1),
        }
        let err = SuiteConfig::parse("mystery = 1\n").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 1),
        }
    }

    #[test]
    fn parse_checks_with_params() {
        let cfg = SuiteConfig::parse(
            "p = 3\np = 5\nbudget = 1000\ncheck = lemma-char p=3 m=1\ncheck = k-of-s # comment\n",
        )
        .unwrap();
        assert_eq!(cfg.p, vec![3, 5]);
        assert_eq!(cfg.budget, 1000);
        assert_eq!(cfg.checks.len(), 2);
        assert_eq!(cfg.checks[0].name, "lemma-char");
        assert_eq!(cfg.checks[0].params.get("m"), Some(&1));
    }

    #[test]
    fn unknown_check_is_an_error() {
        let cfg = SuiteConfig::parse("check = no-such-check\n").unwrap();
        assert!(matches!(
            run_suite(&cfg),
            Err(CheckError::UnknownCheck(_))
        ));
    }

    #[test]
    fn budget_skip_is_reported_not_passed() {
        // the registered example: oldcrap at i = 3 refuses on the predicted
        // order of P(3)
        let cfg = SuiteConfig::parse("check = oldcrap-endomorphism p=3 i=3\n").unwrap();
        let report = run_suite(&cfg).unwrap();
        assert_eq!(report.totals.skipped, 1);
        assert!(!report.all_pass());
    }
}
