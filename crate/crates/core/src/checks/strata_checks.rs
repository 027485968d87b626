//! Strata-side checks: the duality (𝔓ⁿ)★ = 𝔓^{1−n}, the stratum validity
//! matrix, and the ψ_α character properties.

use serde_json::json;

use super::{CheckError, Outcome, Params};
use crate::report::observed;
use crate::residue::{ResidueMatrix, ResidueRing};
use crate::strata::{HereditaryOrder, StratumDescriptor};

fn ring(p: u64, k: u32) -> Result<ResidueRing, CheckError> {
    ResidueRing::new(p, k).map_err(|e| CheckError::Invalid(e.to_string()))
}

/// (𝔓ⁿ)★ = 𝔓^{1−n} for n ∈ {−1,0,1,2} and both hereditary orders, with the
/// double-dual involution; the dual is computed from ψ-pairings at finite
/// level, never assumed.
pub fn dual_lattice(params: &Params) -> Result<Outcome, CheckError> {
    let p = params.get("p", 3);
    let r = ring(p, 3)?;
    let mut pass = true;
    let mut cases = 0u64;
    for period in [1u32, 2] {
        let ord = HereditaryOrder::new(r, period).map_err(|e| CheckError::Invalid(e.to_string()))?;
        for n in -1..=2i32 {
            let dual = ord.dual_val_pattern(n);
            for i in 0..2 {
                for j in 0..2 {
                    pass &= dual[i][j] == ord.radical_val(1 - n, i, j);
                }
            }
            // involution
            let dd = ord.dual_val_pattern(1 - n);
            for i in 0..2 {
                for j in 0..2 {
                    pass &= dd[i][j] == ord.radical_val(n, i, j);
                }
            }
            cases += 1;
        }
    }
    let obs = observed(&[
        ("cases", cases.into()),
        ("orders", json!([1, 2])),
        ("levels", json!([-1, 0, 1, 2])),
    ]);
    Ok(if pass {
        Outcome::pass(obs)
    } else {
        Outcome::fail(obs, "duality pattern mismatch".into())
    })
}

/// The validity matrix: standard strata accepted (with the ramification
/// datum matching the order), even-level ramified and nilpotent-coset data
/// rejected, split residual polynomials rejected.
pub fn stratum_validity(params: &Params) -> Result<Outcome, CheckError> {
    let p = params.get("p", 3);
    let r = ring(p, 3)?;
    let mut rows = Vec::new();
    let mut pass = true;

    let s = StratumDescriptor::standard_unramified(r, 1);
    let rep = s.validate();
    pass &= rep.valid && rep.computed_ramification == Some(1);
    rows.push(json!({"case": "e=1,n=1", "valid": rep.valid, "e": rep.computed_ramification}));

    let s = StratumDescriptor::standard_unramified(r, 2);
    let rep = s.validate();
    pass &= rep.valid && rep.computed_ramification == Some(1);
    rows.push(json!({"case": "e=1,n=2", "valid": rep.valid, "e": rep.computed_ramification}));

    let s = StratumDescriptor::standard_ramified(r, 1);
    let rep = s.validate();
    pass &= rep.valid && rep.computed_ramification == Some(2);
    rows.push(json!({"case": "e=2,n=1", "valid": rep.valid, "e": rep.computed_ramification}));

    // e=2 with even n is rejected by the parity condition
    let num = ResidueMatrix::from_rows(r, &[&[p, 0], &[0, p]]);
    let s = StratumDescriptor::new(
        HereditaryOrder::new(r, 2).map_err(|e| CheckError::Invalid(e.to_string()))?,
        2,
        num,
        2,
    );
    let rep = s.validate();
    pass &= !rep.valid && !rep.algebra_condition;
    rows.push(json!({"case": "e=2,n=2", "valid": rep.valid}));

    // α = 0: the coset contains a nilpotent
    let zero = ResidueMatrix::from_fn(r, 2, |_, _| 0);
    let s = StratumDescriptor::new(
        HereditaryOrder::new(r, 1).map_err(|e| CheckError::Invalid(e.to_string()))?,
        1,
        zero,
        1,
    );
    let rep = s.validate();
    pass &= !rep.valid && !rep.no_nilpotent_in_coset;
    rows.push(json!({"case": "alpha=0", "valid": rep.valid}));

    // split residual characteristic polynomial
    let split = ResidueMatrix::from_rows(r, &[&[1, 0], &[0, 2]]);
    let s = StratumDescriptor::new(
        HereditaryOrder::new(r, 1).map_err(|e| CheckError::Invalid(e.to_string()))?,
        1,
        split,
        1,
    );
    let rep = s.validate();
    pass &= !rep.valid && !rep.algebra_condition;
    rows.push(json!({"case": "split-residue", "valid": rep.valid}));

    let obs = observed(&[("matrix", serde_json::Value::Array(rows))]);
    Ok(if pass {
        Outcome::pass(obs)
    } else {
        Outcome::fail(obs, "validity matrix mismatch".into())
    })
}

/// ψ_α: exhaustive multiplicativity on U_{⌊n/2⌋+1}(𝔄), trivial on
/// U_{n+1}(𝔄), non-trivial on U_n(𝔄), injective on 𝔓⁻ⁿ/𝔄 classes, and not
/// multiplicative one level down (the verified domain is reported).
pub fn psi_alpha(params: &Params) -> Result<Outcome, CheckError> {
    let p = params.get("p", 3);
    let k = params.get("truncation", 2) as u32;
    let r = ring(p, k)?;
    let s = StratumDescriptor::standard_ramified(r, 1);
    let psi = s.psi_alpha().map_err(|e| CheckError::Invalid(e.to_string()))?;
    let domain = psi.domain();
    let elems = domain.elements(params.budget)?.clone();
    let mut multiplicative = true;
    for a in elems.iter() {
        for b in elems.iter() {
            if psi.eval(&a.mul(b)) != psi.eval(a).mul(&psi.eval(b)) {
                multiplicative = false;
            }
        }
    }
    let pairs = (elems.len() * elems.len()) as u64;
    // trivial on U_{n+1}, non-trivial on U_n
    let u_next = s.order.u_group(s.level + 1);
    let trivial_above = u_next
        .elements(params.budget)?
        .iter()
        .all(|x| psi.eval(x).is_one());
    let nontrivial_at_n = s
        .order
        .u_group(s.level)
        .elements(params.budget)?
        .iter()
        .any(|x| !psi.eval(x).is_one());
    // injectivity on the q² classes of 𝔓⁻¹/𝔄
    let mut tables = std::collections::HashSet::new();
    for b in 0..p {
        for c in 0..p {
            let num = ResidueMatrix::from_rows(r, &[&[0, b], &[p * c, 0]]);
            let cand = StratumDescriptor::new(s.order, 1, num, 1);
            let cand_psi = crate::strata::PsiAlphaCharacter {
                stratum: cand,
                domain_level: 1,
            };
            let t: Vec<_> = elems.iter().map(|x| cand_psi.eval(x)).collect();
            tables.insert(t);
        }
    }
    let injective = tables.len() as u64 == p * p;
    // one level down the formula stops being a character
    let u0 = s.order.u_group(0);
    let u0_elems = u0.elements(params.budget)?;
    let witness_below = u0_elems.iter().enumerate().any(|(i, a)| {
        u0_elems
            .iter()
            .skip(i)
            .any(|b| psi.eval(&a.mul(b)) != psi.eval(a).mul(&psi.eval(b)))
    });
    let pass = multiplicative && trivial_above && nontrivial_at_n && injective && witness_below;
    let obs = observed(&[
        ("pairs", pairs.into()),
        ("verified-domain", format!("U_{}", psi.domain_level).into()),
        ("trivial-on-next", trivial_above.into()),
        ("nontrivial-at-level", nontrivial_at_n.into()),
        ("separates-classes", (tables.len() as u64).into()),
        ("fails-one-level-down", witness_below.into()),
    ]);
    Ok(if pass {
        Outcome::pass(obs)
    } else {
        Outcome::fail(obs, "ψ_α property mismatch".into())
    })
}
