//! Checks on the GL₂(F_q) side: the cuspidal census, constancy of the
//! mirabolic restriction, and the coprimality argument for the unramified
//! twist.

use serde_json::json;

use super::{factor_prime_power, CheckError, Outcome, Params};
use crate::gl2::Gl2CharTable;
use crate::report::observed;
use crate::unity::Unity;

/// Exactly (q²−q)/2 cuspidal characters, each of degree q−1 and norm 1,
/// pairwise distinct; the full table satisfies Σ deg² = |GL₂(F_q)| and row
/// orthogonality.
pub fn cuspidal_count(params: &Params) -> Result<Outcome, CheckError> {
    let q = params.get("q", params.get("p", 3));
    let (p, f) = factor_prime_power(q)?;
    let table = Gl2CharTable::new(p, f);
    let cusp = table.cuspidals();
    let expected = (q * q - q) / 2;
    let count_ok = cusp.len() as u64 == expected;
    let degree_ok = cusp.iter().all(|c| c.degree == q - 1);
    let mut norm_ok = true;
    for c in &cusp {
        let n = table.inner(&c.values, &c.values);
        norm_ok &= (n - num_complex::Complex64::new(1.0, 0.0)).norm() < 1e-9;
    }
    // pairwise distinct value vectors
    let mut distinct = true;
    for (i, a) in cusp.iter().enumerate() {
        for b in cusp.iter().skip(i + 1) {
            if a.values
                .iter()
                .zip(&b.values)
                .all(|(x, y)| (x - y).norm() < 1e-9)
            {
                distinct = false;
            }
        }
    }
    // table-level invariants
    let degsq: u64 = table.irreps.iter().map(|i| i.degree * i.degree).sum();
    let degsq_ok = degsq == table.group_order();
    let mut ortho_ok = true;
    for (i, a) in table.irreps.iter().enumerate() {
        for (j, b) in table.irreps.iter().enumerate() {
            let ip = table.inner(&a.values, &b.values);
            let expect = if i == j { 1.0 } else { 0.0 };
            ortho_ok &= (ip - num_complex::Complex64::new(expect, 0.0)).norm() < 1e-9;
        }
    }
    let at_least_3 = cusp.len() >= 3;
    let pass = count_ok && degree_ok && norm_ok && distinct && degsq_ok && ortho_ok && at_least_3;
    let obs = observed(&[
        ("count", (cusp.len() as u64).into()),
        ("expected", expected.into()),
        ("degree", (q - 1).into()),
        ("sum-of-degree-squares", degsq.into()),
        ("orthogonal", ortho_ok.into()),
    ]);
    Ok(if pass {
        Outcome::pass(obs)
    } else {
        Outcome::fail(obs, "cuspidal census mismatch".into())
    })
}

/// All cuspidal restrictions to Mir₂ coincide and are irreducible; for
/// prime q the central-character twist τ₁⊠χ₁ agrees with τ⊠χ on the
/// stabilizer-shape subgroup (the level-zero core of the main comparison).
pub fn mirabolic_constancy(params: &Params) -> Result<Outcome, CheckError> {
    let q = params.get("q", params.get("p", 3));
    let (p, f) = factor_prime_power(q)?;
    let table = Gl2CharTable::new(p, f);
    let cusp = table.cuspidals();
    let first = table.mirabolic_restriction(cusp[0]);
    let mut constant = true;
    for c in cusp.iter().skip(1) {
        let r = table.mirabolic_restriction(c);
        for (x, y) in first.iter().zip(&r) {
            if (x - y).norm() > 1e-9 {
                constant = false;
            }
        }
    }
    let norm = table.mirabolic_norm(&first);
    let irreducible = (norm - 1.0).abs() < 1e-9;
    let degree_ok = (first[0].re - (q - 1) as f64).abs() < 1e-9;
    // stabilizer agreement for prime q (needs residue-ring characters)
    let (comparisons, agree) = if f == 1 {
        super::parabolic::mainb_agreement(q, params.budget)?
    } else {
        (0, true)
    };
    let pass = constant && irreducible && degree_ok && agree;
    let obs = observed(&[
        ("cuspidals", (cusp.len() as u64).into()),
        ("restrictions-identical", constant.into()),
        ("restriction-norm", json!(norm.round() as i64)),
        ("stabilizer-comparisons", comparisons.into()),
        ("stabilizer-agreement", agree.into()),
    ]);
    Ok(if pass {
        Outcome::pass(obs)
    } else {
        Outcome::fail(obs, "mirabolic restriction varies".into())
    })
}

/// The unramified-twist coprimality: the q+1 characters of F_{q²}ˣ trivial
/// on F_qˣ have order dividing q²−1 and coprime to p, so a p-power
/// dimensional representation never equals its twist by a non-trivial one.
pub fn coprime_twist(params: &Params) -> Result<Outcome, CheckError> {
    let q = params.get("q", params.get("p", 3));
    let (p, f) = factor_prime_power(q)?;
    let table = Gl2CharTable::new(p, f);
    let qq = q * q;
    let trivial_on_base: Vec<u64> = (0..qq - 1)
        .filter(|j| {
            table.ext.base.units().all(|a| {
                Unity::new(
                    (j * table.ext.ext.log(table.ext.embed(a))) as i64,
                    qq - 1,
                )
                .is_one()
            })
        })
        .collect();
    let count_ok = trivial_on_base.len() as u64 == q + 1;
    let mut coprime_ok = true;
    let mut twist_separates = true;
    for &j in &trivial_on_base {
        if j == 0 {
            continue;
        }
        let ord = (qq - 1) / gcd(j, qq - 1);
        coprime_ok &= gcd(ord, p) == 1 && ord > 1;
        // θ^{p^a} ≠ 1 for all a ≥ 1: gcd(p^a, q²−1) = 1
        for a in 1..=4u32 {
            coprime_ok &= gcd(p.pow(a), qq - 1) == 1;
            twist_separates &= p.pow(a) % ord != 0;
        }
    }
    let pass = count_ok && coprime_ok && twist_separates;
    let obs = observed(&[
        ("characters-trivial-on-base", (trivial_on_base.len() as u64).into()),
        ("expected", (q + 1).into()),
        ("orders-coprime-to-p", coprime_ok.into()),
    ]);
    Ok(if pass {
        Outcome::pass(obs)
    } else {
        Outcome::fail(obs, "coprimality argument failed".into())
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
