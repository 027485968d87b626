//! The named lemma checks and their registry.
//!
//! Every check is a pure function from parameters to a pass/fail verdict
//! with machine-readable observations; budget overruns surface as a
//! `skipped-budget` verdict, never as a silent pass. Check bodies live in
//! the submodules, grouped by the part of the theory they exercise.

mod gl2_checks;
mod parabolic;
mod principal;
mod strata_checks;

use std::collections::BTreeMap;
use std::time::Instant;

use thiserror::Error;

use crate::group::GroupError;
use crate::report::{CheckReport, Verdict};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("budget exceeded: {predicted} > {budget}")]
    Budget { predicted: u64, budget: u64 },
    #[error("{0}")]
    Invalid(String),
}

impl From<GroupError> for CheckError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::BudgetExceeded { predicted, budget } => CheckError::Budget { predicted, budget },
            other => CheckError::Invalid(other.to_string()),
        }
    }
}

impl From<crate::congruence::CongruenceError> for CheckError {
    fn from(e: crate::congruence::CongruenceError) -> Self {
        match e {
            crate::congruence::CongruenceError::Group(g) => g.into(),
            other => CheckError::Invalid(other.to_string()),
        }
    }
}

impl From<crate::character::CharacterError> for CheckError {
    fn from(e: crate::character::CharacterError) -> Self {
        match e {
            crate::character::CharacterError::Group(g) => g.into(),
            other => CheckError::Invalid(other.to_string()),
        }
    }
}

impl From<crate::strata::StrataError> for CheckError {
    fn from(e: crate::strata::StrataError) -> Self {
        match e {
            crate::strata::StrataError::Group(g) => g.into(),
            other => CheckError::Invalid(other.to_string()),
        }
    }
}

/// A requested check: registered name plus flat numeric parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSpec {
    pub name: String,
    pub params: BTreeMap<String, u64>,
}

impl CheckSpec {
    pub fn new(name: &str) -> Self {
        CheckSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: u64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// Parameters seen by a check body: the requested values with suite-level
/// defaults already folded in.
#[derive(Debug, Clone)]
pub struct Params {
    pub budget: u64,
    map: BTreeMap<String, u64>,
}

impl Params {
    pub fn get(&self, key: &str, default: u64) -> u64 {
        self.map.get(key).copied().unwrap_or(default)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (k, v) in &self.map {
            m.insert(k.clone(), (*v).into());
        }
        m.insert("budget".into(), self.budget.into());
        serde_json::Value::Object(m)
    }
}

/// Outcome of a check body.
pub struct Outcome {
    pub pass: bool,
    pub observed: serde_json::Value,
    pub witness: Option<String>,
}

impl Outcome {
    pub fn pass(observed: serde_json::Value) -> Self {
        Outcome {
            pass: true,
            observed,
            witness: None,
        }
    }

    pub fn fail(observed: serde_json::Value, witness: String) -> Self {
        Outcome {
            pass: false,
            observed,
            witness: Some(witness),
        }
    }
}

type Handler = fn(&Params) -> Result<Outcome, CheckError>;

/// The registered checks, in the canonical reporting order.
pub const CHECK_NAMES: &[&str] = &[
    "lemma-char",
    "lemma-upper",
    "lemma-same",
    "lemma-mir",
    "suma-decomposition",
    "cosetm-bijection",
    "dont-bijection",
    "secred-twist",
    "lemma-upper1",
    "lemma-now",
    "lemma-reducedf",
    "fourd-decomposition",
    "oldcrap-endomorphism",
    "orbit-sets-Aj",
    "cuspidal-count",
    "mirabolic-constancy",
    "coprime-twist",
    "stratum-validity",
    "psi-alpha",
    "dual-lattice",
    "k-of-s",
    "iwahori-check-41",
];

fn handler(name: &str) -> Option<Handler> {
    Some(match name {
        "lemma-char" => parabolic::lemma_char,
        "lemma-upper" => parabolic::lemma_upper,
        "lemma-same" => parabolic::lemma_same,
        "lemma-mir" => parabolic::lemma_mir,
        "suma-decomposition" => parabolic::suma_decomposition,
        "cosetm-bijection" => parabolic::cosetm_bijection,
        "dont-bijection" => principal::dont_bijection,
        "secred-twist" => principal::secred_twist,
        "lemma-upper1" => principal::lemma_upper1,
        "lemma-now" => principal::lemma_now,
        "lemma-reducedf" => principal::lemma_reducedf,
        "fourd-decomposition" => principal::fourd_decomposition,
        "oldcrap-endomorphism" => parabolic::oldcrap_endomorphism,
        "orbit-sets-Aj" => parabolic::orbit_sets_aj,
        "cuspidal-count" => gl2_checks::cuspidal_count,
        "mirabolic-constancy" => gl2_checks::mirabolic_constancy,
        "coprime-twist" => gl2_checks::coprime_twist,
        "stratum-validity" => strata_checks::stratum_validity,
        "psi-alpha" => strata_checks::psi_alpha,
        "dual-lattice" => strata_checks::dual_lattice,
        "k-of-s" => principal::k_of_s,
        "iwahori-check-41" => principal::iwahori_check_41,
        _ => return None,
    })
}

/// Run one check; budget refusals become `skipped-budget`.
pub fn run_check(spec: &CheckSpec, budget: u64) -> Result<CheckReport, CheckError> {
    let h = handler(&spec.name).ok_or_else(|| CheckError::UnknownCheck(spec.name.clone()))?;
    let params = Params {
        budget,
        map: spec.params.clone(),
    };
    let start = Instant::now();
    let (verdict, observed, witness) = match h(&params) {
        Ok(out) => (
            if out.pass { Verdict::Pass } else { Verdict::Fail },
            out.observed,
            out.witness,
        ),
        Err(CheckError::Budget { predicted, budget }) => (
            Verdict::SkippedBudget,
            crate::report::observed(&[
                ("predicted", predicted.into()),
                ("budget", budget.into()),
            ]),
            None,
        ),
        Err(e) => return Err(e),
    };
    Ok(CheckReport {
        name: spec.name.clone(),
        params: params.to_json(),
        verdict,
        observed,
        witness,
        duration_ms: start.elapsed().as_millis() as u64,
    })
}

/// The default suite: the full acceptance grid at p = 3 (plus the p = 5 and
/// q = 4 cases the criteria name).
pub fn default_suite() -> Vec<CheckSpec> {
    vec![
        CheckSpec::new("lemma-char").with("p", 3),
        CheckSpec::new("lemma-char").with("p", 5),
        CheckSpec::new("lemma-upper").with("p", 3),
        CheckSpec::new("lemma-same").with("q", 3),
        CheckSpec::new("lemma-mir").with("q", 3),
        CheckSpec::new("lemma-mir").with("q", 5),
        CheckSpec::new("suma-decomposition").with("p", 3),
        CheckSpec::new("cosetm-bijection").with("p", 3),
        CheckSpec::new("dont-bijection").with("p", 3).with("i", 1),
        CheckSpec::new("dont-bijection").with("p", 3).with("i", 2),
        CheckSpec::new("secred-twist").with("q", 3),
        CheckSpec::new("secred-twist").with("q", 5),
        CheckSpec::new("lemma-upper1").with("p", 3),
        CheckSpec::new("lemma-now").with("p", 3),
        CheckSpec::new("lemma-now").with("p", 5),
        CheckSpec::new("lemma-reducedf").with("q", 3),
        CheckSpec::new("lemma-reducedf").with("q", 5),
        CheckSpec::new("fourd-decomposition").with("p", 3),
        CheckSpec::new("oldcrap-endomorphism").with("p", 3),
        CheckSpec::new("oldcrap-endomorphism").with("p", 5),
        CheckSpec::new("orbit-sets-Aj").with("p", 3),
        CheckSpec::new("cuspidal-count").with("q", 3),
        CheckSpec::new("cuspidal-count").with("q", 4),
        CheckSpec::new("cuspidal-count").with("q", 5),
        CheckSpec::new("mirabolic-constancy").with("q", 3),
        CheckSpec::new("mirabolic-constancy").with("q", 4),
        CheckSpec::new("mirabolic-constancy").with("q", 5),
        CheckSpec::new("coprime-twist").with("q", 3),
        CheckSpec::new("coprime-twist").with("q", 5),
        CheckSpec::new("stratum-validity").with("p", 3),
        CheckSpec::new("psi-alpha").with("p", 3),
        CheckSpec::new("dual-lattice").with("p", 3),
        CheckSpec::new("k-of-s"),
        CheckSpec::new("iwahori-check-41").with("p", 3),
    ]
}

/// Prime-power to (p, f) for the GL₂ tables.
pub(crate) fn factor_prime_power(q: u64) -> Result<(u64, u32), CheckError> {
    for p in 2..=q {
        if q % p == 0 {
            let mut f = 0;
            let mut x = q;
            while x % p == 0 {
                x /= p;
                f += 1;
            }
            if x != 1 {
                return Err(CheckError::Invalid(format!("{q} is not a prime power")));
            }
            return Ok((p, f));
        }
    }
    Err(CheckError::Invalid(format!("{q} is not a prime power")))
}
