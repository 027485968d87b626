//! Class functions, one-dimensional characters, Frobenius induction,
//! restriction, inner products, and Mackey intertwining numbers.
//!
//! Class functions are stored as value vectors aligned with a group's sorted
//! element list, so they exist only for groups within the enumeration
//! budget. Everything involving groups beyond the budget — the induced
//! characters ind_{P(i)}^{GL₃}(…) and their Hom spaces — runs through the
//! Mackey formula on double cosets instead: for one-dimensional inputs each
//! double coset contributes 1 exactly when the two characters agree on the
//! intersection H ∩ gKg⁻¹, and agreement on the Schreier generators of the
//! stabilizer decides agreement on the whole intersection (the agreement
//! locus of two homomorphisms is a subgroup). Character values are exact
//! roots of unity, so these decisions carry no floating-point error.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::group::{
    double_cosets_on, CosetPoints, CosetSpace, FiniteMatrixGroup, GroupError,
};
use crate::residue::{ResidueMatrix, UnitChar};
use crate::unity::Unity;

pub const SNAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error("inner product {0} of characters is not a non-negative integer within 1e-6")]
    NonIntegral(f64),
    #[error("character is not multiplicative: χ(ab) ≠ χ(a)χ(b) for a witness pair")]
    NotMultiplicative,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// How a class function should be treated by integrality checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharKind {
    /// A genuine character (inner products must snap to non-negative integers)
    Character,
    /// A difference of characters (inner products snap to integers)
    Virtual,
    /// No integrality promises
    Generic,
}

/// A complex-valued function on an enumerable group, constant on conjugacy
/// classes (spot-checked by tests, not enforced).
#[derive(Clone)]
pub struct ClassFunction {
    group: Arc<FiniteMatrixGroup>,
    values: Vec<Complex64>,
    kind: CharKind,
}

impl ClassFunction {
    pub fn from_fn(
        group: Arc<FiniteMatrixGroup>,
        kind: CharKind,
        budget: u64,
        f: impl Fn(&ResidueMatrix) -> Complex64 + Sync + Send,
    ) -> Result<Self, GroupError> {
        let elems = Arc::clone(group.elements(budget)?);
        let values = crate::par::map_indexed(elems.len() as u64, |i| f(&elems[i as usize]));
        Ok(ClassFunction { group, values, kind })
    }

    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        &self.group
    }

    pub fn kind(&self) -> CharKind {
        self.kind
    }

    pub fn degree(&self) -> Complex64 {
        self.value(&ResidueMatrix::identity(self.group.ring(), self.group.n()))
    }

    pub fn value(&self, m: &ResidueMatrix) -> Complex64 {
        let elems = self.group.elements(u64::MAX).expect("class function group is enumerated");
        let ix = elems.binary_search(m).expect("element lies in the group");
        self.values[ix]
    }

    /// Pointwise restriction to a subgroup.
    pub fn restrict(&self, h: Arc<FiniteMatrixGroup>, budget: u64) -> Result<ClassFunction, GroupError> {
        let kind = self.kind;
        let elems = h.elements(budget)?;
        let values = crate::par::map_indexed(elems.len() as u64, |i| self.value(&elems[i as usize]));
        Ok(ClassFunction { group: h, values, kind })
    }

    pub fn add(&self, other: &ClassFunction) -> ClassFunction {
        assert!(Arc::ptr_eq(&self.group, &other.group));
        ClassFunction {
            group: Arc::clone(&self.group),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            kind: CharKind::Character,
        }
    }

    pub fn sub(&self, other: &ClassFunction) -> ClassFunction {
        assert!(Arc::ptr_eq(&self.group, &other.group));
        ClassFunction {
            group: Arc::clone(&self.group),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            kind: CharKind::Virtual,
        }
    }

    pub fn mul_pointwise(&self, other: &ClassFunction) -> ClassFunction {
        assert!(Arc::ptr_eq(&self.group, &other.group));
        ClassFunction {
            group: Arc::clone(&self.group),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
            kind: CharKind::Character,
        }
    }

    /// (1/|G|) Σ f(x)·conj(g(x)), raw.
    pub fn inner_product_raw(&self, other: &ClassFunction) -> Complex64 {
        assert!(Arc::ptr_eq(&self.group, &other.group), "inner product needs a common group");
        let n = self.values.len() as u64;
        let s: Complex64 = crate::par::sum_indexed(n, |i| {
            self.values[i as usize] * other.values[i as usize].conj()
        });
        s / n as f64
    }

    /// Inner product snapped to an integer; errors when a character-tagged
    /// pair fails to land within 1e-6 of a (non-negative) integer.
    pub fn inner_product(&self, other: &ClassFunction) -> Result<i64, CharacterError> {
        let raw = self.inner_product_raw(other);
        let snapped = raw.re.round();
        let err = (raw - Complex64::new(snapped, 0.0)).norm();
        let character_pair = self.kind != CharKind::Generic && other.kind != CharKind::Generic;
        if character_pair && err > SNAP_TOLERANCE {
            return Err(CharacterError::NonIntegral(raw.re));
        }
        if self.kind == CharKind::Character && other.kind == CharKind::Character && snapped < 0.0 {
            return Err(CharacterError::NonIntegral(raw.re));
        }
        Ok(snapped as i64)
    }

    pub fn norm_squared(&self) -> Result<i64, CharacterError> {
        self.inner_product(self)
    }
}

type EvalFn = Arc<dyn Fn(&ResidueMatrix) -> Unity + Send + Sync>;

/// A one-dimensional character given by an exact evaluation rule.
#[derive(Clone)]
pub struct LinearChar {
    name: String,
    eval: EvalFn,
}

impl LinearChar {
    pub fn new(name: impl Into<String>, eval: impl Fn(&ResidueMatrix) -> Unity + Send + Sync + 'static) -> Self {
        LinearChar {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn trivial() -> Self {
        LinearChar::new("1", |_| Unity::one())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, m: &ResidueMatrix) -> Unity {
        (self.eval)(m)
    }

    pub fn mul(&self, other: &LinearChar) -> LinearChar {
        let a = Arc::clone(&self.eval);
        let b = Arc::clone(&other.eval);
        LinearChar::new(format!("{}·{}", self.name, other.name), move |m| {
            a(m).mul(&b(m))
        })
    }

    /// χ^g: x ↦ χ(g⁻¹ x g), a character of gHg⁻¹.
    pub fn conjugate_by(&self, g: &ResidueMatrix) -> LinearChar {
        let gi = g.invert().expect("conjugating element is a unit");
        let g = *g;
        let e = Arc::clone(&self.eval);
        LinearChar::new(format!("{}^g", self.name), move |m| e(&gi.mul(m).mul(&g)))
    }

    /// Exact agreement on a list of elements.
    pub fn agrees_on(&self, other: &LinearChar, elems: &[ResidueMatrix]) -> bool {
        elems.iter().all(|m| self.eval(m) == other.eval(m))
    }

    /// χ(g33 mod pʲ)-style block character of a (2,1)-type group: trivial on
    /// the GL₂ block and both unipotent parts, η on the corner. Multiplicative
    /// on groups whose lower row vanishes mod pʲ with level(η) ≤ j.
    pub fn corner_char_21(eta: UnitChar) -> LinearChar {
        LinearChar::new(format!("id2⊠η[{}]", eta.index()), move |m| {
            eta.eval(m.entry(m.n() - 1, m.n() - 1))
        })
    }

    /// χ₁⊠χ₂(⊠χ₃) on a triangular-mod-p group via the diagonal of the block
    /// factorization. For GL₂ inputs supply two characters, for GL₃ three.
    pub fn diagonal_char(chis: Vec<UnitChar>) -> LinearChar {
        LinearChar::new("⊠χ", move |m| {
            let n = m.n();
            assert_eq!(chis.len(), n);
            let sizes: Vec<usize> = vec![1; n];
            let (_, mid, _) = crate::group::factor_blocks(m, &sizes)
                .expect("element of a triangular-mod-p group factors");
            let mut v = Unity::one();
            for (i, chi) in chis.iter().enumerate() {
                v = v.mul(&chi.eval(mid.entry(i, i)));
            }
            v
        })
    }

    /// Multiplicativity validation: exhaustive over generator pairs plus a
    /// deterministic pseudo-random sweep of general products. The sweep
    /// draws from the enumerated elements when the group is small and from
    /// random generator words otherwise, so no enumeration is forced.
    pub fn validate_on(&self, group: &FiniteMatrixGroup, budget: u64, random_pairs: u64) -> Result<(), CharacterError> {
        let gens = group.generators()?;
        for a in gens {
            for b in gens {
                if self.eval(&a.mul(b)) != self.eval(a).mul(&self.eval(b)) {
                    return Err(CharacterError::NotMultiplicative);
                }
            }
        }
        if random_pairs == 0 {
            return Ok(());
        }
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 16) as usize
        };
        let small = group
            .predicted_order()
            .map(|o| o <= 200_000.min(budget))
            .unwrap_or(false);
        if small {
            let elems = group.elements(budget)?;
            for _ in 0..random_pairs {
                let a = &elems[next() % elems.len()];
                let b = &elems[next() % elems.len()];
                if self.eval(&a.mul(b)) != self.eval(a).mul(&self.eval(b)) {
                    return Err(CharacterError::NotMultiplicative);
                }
            }
        } else {
            // random words of length 6 in the generators
            let id = ResidueMatrix::identity(group.ring(), group.n());
            let word = move |next: &mut dyn FnMut() -> usize| {
                let mut w = id;
                for _ in 0..6 {
                    w = w.mul(&gens[next() % gens.len()]);
                }
                w
            };
            for _ in 0..random_pairs {
                let a = word(&mut next);
                let b = word(&mut next);
                if self.eval(&a.mul(&b)) != self.eval(&a).mul(&self.eval(&b)) {
                    return Err(CharacterError::NotMultiplicative);
                }
            }
        }
        Ok(())
    }
}

/// A pair (subgroup H, one-dimensional character λ of H): the symbolic form
/// of ind_H^G(λ) used by the Mackey machinery.
#[derive(Clone)]
pub struct MonomialDatum {
    pub subgroup: Arc<FiniteMatrixGroup>,
    pub character: LinearChar,
}

impl MonomialDatum {
    pub fn new(subgroup: Arc<FiniteMatrixGroup>, character: LinearChar) -> Self {
        MonomialDatum { subgroup, character }
    }

    /// Validate λ is multiplicative on H (generators exhaustively, plus a
    /// pseudo-random product sweep when H is enumerable).
    pub fn validate(&self, budget: u64, random_pairs: u64) -> Result<(), CharacterError> {
        self.character.validate_on(&self.subgroup, budget, random_pairs)
    }

    /// deg ind_H^G(λ) = [G : H].
    pub fn induced_degree(&self, ambient_order: u64) -> u64 {
        ambient_order / self.subgroup.predicted_order().expect("subgroup order known")
    }

    /// Value of the induced character at g, summed over an explicit
    /// transversal of G/H: Σ_t [t⁻¹gt ∈ H]·λ(t⁻¹gt).
    pub fn induced_value_at(&self, transversal: &[ResidueMatrix], g: &ResidueMatrix) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in transversal {
            let c = t.invert().unwrap().mul(g).mul(t);
            if self.subgroup.contains(&c) {
                acc += self.character.eval(&c).to_complex();
            }
        }
        acc
    }
}

/// Frobenius induction as a materialized class function on an enumerable
/// ambient group.
pub fn induce(
    datum: &MonomialDatum,
    ambient: Arc<FiniteMatrixGroup>,
    budget: u64,
) -> Result<ClassFunction, GroupError> {
    let index = ambient.order(budget)? / datum.subgroup.order(budget)?;
    let cosets = CosetSpace::by_bfs(&ambient, &datum.subgroup, index)?;
    assert_eq!(cosets.len() as u64, index);
    let transversal = cosets.transversal.clone();
    let inverses: Vec<ResidueMatrix> = transversal.iter().map(|t| t.invert().unwrap()).collect();
    let datum = datum.clone();
    ClassFunction::from_fn(ambient, CharKind::Character, budget, move |g| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, ti) in transversal.iter().zip(&inverses) {
            let c = ti.mul(g).mul(t);
            if datum.subgroup.contains(&c) {
                acc += datum.character.eval(&c).to_complex();
            }
        }
        acc
    })
}

/// One Mackey term: the double coset representative, whether the two
/// characters agree on H_a ∩ g·H_b·g⁻¹, and how that was decided.
pub struct MackeyTerm {
    pub rep: ResidueMatrix,
    pub orbit_size: u64,
    pub agrees: bool,
    pub generators_checked: u64,
}

pub struct MackeyOutcome {
    pub dim: u64,
    pub terms: Vec<MackeyTerm>,
    pub coset_count: u64,
}

/// dim Hom(ind_{H_a}^G(χ_a), ind_{H_b}^G(χ_b)) by the Mackey formula for
/// one-dimensional characters: Σ over H_a\G/H_b of the agreement indicator
/// of χ_a and χ_b^g on H_a ∩ gH_bg⁻¹. The coset space G/H_b is supplied as
/// a point realization; H_a acts through its generators and each
/// intersection is decided on Schreier generators (exact).
pub fn mackey_intertwining<C: CosetPoints>(
    h_a: &Arc<FiniteMatrixGroup>,
    chi_a: &LinearChar,
    h_b: &FiniteMatrixGroup,
    chi_b: &LinearChar,
    cosets: &C,
) -> MackeyOutcome {
    let orbits = double_cosets_on(h_a, cosets);
    let mut terms = Vec::with_capacity(orbits.len());
    let mut dim = 0;
    let mut total = 0;
    for orbit in orbits {
        let g = orbit.rep;
        debug_assert!(h_b.n() == g.n());
        let chi_b_g = chi_b.conjugate_by(&g);
        let agrees = orbit
            .stabilizer_generators
            .iter()
            .all(|x| chi_a.eval(x) == chi_b_g.eval(x));
        if agrees {
            dim += 1;
        }
        total += orbit.orbit_size;
        terms.push(MackeyTerm {
            rep: g,
            orbit_size: orbit.orbit_size,
            agrees,
            generators_checked: orbit.stabilizer_generators.len() as u64,
        });
    }
    MackeyOutcome {
        dim,
        terms,
        coset_count: total,
    }
}

/// Exhaustive cross-check of one Mackey term: stream all of H_a, filter the
/// intersection with g·H_b·g⁻¹ by membership, and compare characters on
/// every element. Returns None when H_a exceeds the budget.
pub fn mackey_term_exhaustive(
    h_a: &FiniteMatrixGroup,
    chi_a: &LinearChar,
    h_b: &FiniteMatrixGroup,
    chi_b: &LinearChar,
    g: &ResidueMatrix,
    budget: u64,
) -> Option<bool> {
    let gi = g.invert().unwrap();
    let g = *g;
    let h_b_members = h_b.membership_fn();
    let chi_a = chi_a.clone();
    let chi_b = chi_b.clone();
    let witness = h_a
        .stream_find(budget, move |x| {
            let conj = gi.mul(x).mul(&g);
            if h_b_members(&conj) && chi_a.eval(x) != chi_b.eval(&conj) {
                Some(())
            } else {
                None
            }
        })
        .ok()?;
    Some(witness.is_none())
}

/// Double coset representatives H\G/K with G/K given as points.
pub fn double_coset_representatives<C: CosetPoints>(
    h: &Arc<FiniteMatrixGroup>,
    cosets: &C,
) -> Vec<ResidueMatrix> {
    double_cosets_on(h, cosets).into_iter().map(|d| d.rep).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::{build_b, build_p_gl2, CongruenceExponents};
    use crate::group::{BlockShape, LeviBlock, DEFAULT_BUDGET};
    use crate::residue::ResidueRing;

    fn z(p: u64, k: u32) -> ResidueRing {
        ResidueRing::new(p, k).unwrap()
    }

    #[test]
    fn induce_trivial_from_whole_group() {
        let r = z(3, 1);
        let g = Arc::new(FiniteMatrixGroup::gl(r, 2));
        let datum = MonomialDatum::new(Arc::clone(&g), LinearChar::trivial());
        let ind = induce(&datum, Arc::clone(&g), DEFAULT_BUDGET).unwrap();
        assert_eq!(ind.degree(), Complex64::new(1.0, 0.0));
        assert_eq!(ind.norm_squared().unwrap(), 1);
    }

    #[test]
    fn induce_from_borel_to_gl2_f3() {
        // permutation character on P¹(F₃): degree 4, ⟨χ,χ⟩ = 2 (Bruhat)
        let r = z(3, 1);
        let g = Arc::new(FiniteMatrixGroup::gl(r, 2));
        let borel = Arc::new(build_p_gl2(r, 1).unwrap());
        let datum = MonomialDatum::new(borel, LinearChar::trivial());
        let ind = induce(&datum, Arc::clone(&g), DEFAULT_BUDGET).unwrap();
        assert_eq!(ind.degree().re.round() as i64, 4);
        assert_eq!(ind.norm_squared().unwrap(), 2);
        // ⟨ind, ind⟩ equals the double coset count (Mackey, trivial chars)
        let cosets = CosetSpace::by_bfs(&g, &datum.subgroup, 10).unwrap();
        let out = mackey_intertwining(
            &datum.subgroup,
            &LinearChar::trivial(),
            &datum.subgroup,
            &LinearChar::trivial(),
            &cosets,
        );
        assert_eq!(out.dim, 2);
        assert_eq!(out.coset_count, 4);
    }

    #[test]
    fn regular_character_of_elementary_abelian() {
        // (ℤ/3)² as the upper unipotent block of GL₃(F₃); the regular
        // character pairs to 1 with every linear character
        let r = z(3, 1);
        let nu = Arc::new(crate::congruence::upper_unipotent_21(r));
        assert_eq!(nu.order(DEFAULT_BUDGET).unwrap(), 9);
        let reg = ClassFunction::from_fn(Arc::clone(&nu), CharKind::Character, DEFAULT_BUDGET, |m| {
            if m.is_identity() {
                Complex64::new(9.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        // a nontrivial linear character ψ(u₁)
        let lin = ClassFunction::from_fn(Arc::clone(&nu), CharKind::Character, DEFAULT_BUDGET, |m| {
            Unity::new(m.entry(0, 2) as i64, 3).to_complex()
        })
        .unwrap();
        assert_eq!(reg.inner_product(&lin).unwrap(), 1);
        let triv = ClassFunction::from_fn(nu, CharKind::Character, DEFAULT_BUDGET, |_| {
            Complex64::new(1.0, 0.0)
        })
        .unwrap();
        assert_eq!(triv.norm_squared().unwrap(), 1);
        assert_eq!(reg.inner_product(&triv).unwrap(), 1);
    }

    #[test]
    fn frobenius_reciprocity_spot() {
        // ⟨ind_H^G χ, ψ⟩_G = ⟨χ, res_H ψ⟩_H for linear characters of GL₂(F₃)
        // restricted from det-characters
        let r = z(3, 1);
        let g = Arc::new(FiniteMatrixGroup::gl(r, 2));
        let borel = Arc::new(build_p_gl2(r, 1).unwrap());
        let units = UnitChar::all(r);
        for chi_h in &units {
            for psi_g in &units {
                let chi = LinearChar::diagonal_char(vec![*chi_h, UnitChar::trivial(r)]);
                let datum = MonomialDatum::new(Arc::clone(&borel), chi.clone());
                datum.validate(DEFAULT_BUDGET, 500).unwrap();
                let ind = induce(&datum, Arc::clone(&g), DEFAULT_BUDGET).unwrap();
                let psi_char = *psi_g;
                let psi = ClassFunction::from_fn(
                    Arc::clone(&g),
                    CharKind::Character,
                    DEFAULT_BUDGET,
                    move |m| psi_char.eval(m.det()).to_complex(),
                )
                .unwrap();
                let lhs = ind.inner_product(&psi).unwrap();
                // res_H ψ pointwise against χ on H
                let chi_cf = ClassFunction::from_fn(
                    Arc::clone(&borel),
                    CharKind::Character,
                    DEFAULT_BUDGET,
                    {
                        let chi = chi.clone();
                        move |m| chi.eval(m).to_complex()
                    },
                )
                .unwrap();
                let res = psi.restrict(Arc::clone(&borel), DEFAULT_BUDGET).unwrap();
                let rhs = chi_cf.inner_product(&res).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn class_function_conjugation_invariance_spot() {
        let r = z(3, 1);
        let g = Arc::new(FiniteMatrixGroup::gl(r, 2));
        let borel = Arc::new(build_p_gl2(r, 1).unwrap());
        let ind = induce(
            &MonomialDatum::new(borel, LinearChar::trivial()),
            Arc::clone(&g),
            DEFAULT_BUDGET,
        )
        .unwrap();
        let elems = g.elements(DEFAULT_BUDGET).unwrap();
        for a in elems.iter().step_by(7) {
            let ai = a.invert().unwrap();
            for x in elems.iter().step_by(5) {
                let c = a.mul(x).mul(&ai);
                assert!((ind.value(x) - ind.value(&c)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn diagonal_char_on_borel3() {
        // tame characters (level ≤ 1) are multiplicative on B with exponents
        // (1,1,1); a level-2 character is not (the factorization diagonal is
        // only multiplicative mod p^exponent)
        let r = z(3, 2);
        let exps = CongruenceExponents::new([1, 1, 1], 0).unwrap();
        let b = build_b(r, exps).unwrap();
        let tame = UnitChar::tame(r);
        let chi = LinearChar::diagonal_char(vec![tame[0], tame[1], tame[1]]);
        chi.validate_on(&b, DEFAULT_BUDGET, 2000).unwrap();
        let deep = UnitChar::all(r).into_iter().find(|c| c.level() == 2).unwrap();
        let bad = LinearChar::diagonal_char(vec![deep, tame[0], tame[0]]);
        assert!(bad.validate_on(&b, DEFAULT_BUDGET, 2000).is_err());
    }

    #[test]
    fn corner_char_validates_on_p_groups() {
        let r = z(3, 2);
        let p1 = crate::congruence::build_p(r, 1).unwrap();
        let eta = UnitChar::tame(r)
            .into_iter()
            .find(|c| c.level() == 1)
            .unwrap();
        let chi = LinearChar::corner_char_21(eta);
        // level(η) = 1 ≤ m = 1: multiplicative on P(1)
        chi.validate_on(&p1, DEFAULT_BUDGET, 0).unwrap();
        // a level-2 character fails on P(1) (the corner is only
        // multiplicative mod p^m)
        let deep = UnitChar::all(r).into_iter().find(|c| c.level() == 2).unwrap();
        let bad = LinearChar::corner_char_21(deep);
        assert!(bad.validate_on(&p1, DEFAULT_BUDGET, 0).is_err());
    }

    #[test]
    fn induced_degree_without_enumeration() {
        // deg ind_{P(2)}^{P(1)}(id) = [P(1):P(2)] = q² at p = 3, truncation 2,
        // computed from structural orders only (P(1) is never enumerated)
        let r = z(3, 2);
        let p1 = crate::congruence::build_p(r, 1).unwrap();
        let p2 = Arc::new(crate::congruence::build_p(r, 2).unwrap());
        let datum = MonomialDatum::new(p2, LinearChar::trivial());
        assert_eq!(datum.induced_degree(p1.predicted_order().unwrap()), 9);
    }

    #[test]
    fn mackey_on_projective_cosets_matches_explicit() {
        // H = K = Borel of GL₂(F₃), trivial characters: dim = #double cosets
        // via both coset realizations
        let r = z(3, 1);
        let g = Arc::new(FiniteMatrixGroup::gl(r, 2));
        let borel = Arc::new(build_p_gl2(r, 1).unwrap());
        let explicit = CosetSpace::by_bfs(&g, &borel, 10).unwrap();
        let proj = crate::projective::ProjCosets::new(r, 2, 1);
        let triv = LinearChar::trivial();
        let a = mackey_intertwining(&borel, &triv, &borel, &triv, &explicit);
        let b = mackey_intertwining(&borel, &triv, &borel, &triv, &proj);
        assert_eq!(a.dim, b.dim);
        assert_eq!(a.coset_count, b.coset_count);
        assert_eq!(a.dim, 2);
    }

    #[test]
    fn nonintegral_rejected() {
        let r = z(3, 1);
        let nu = Arc::new(crate::congruence::upper_unipotent_21(r));
        let f = ClassFunction::from_fn(Arc::clone(&nu), CharKind::Character, DEFAULT_BUDGET, |m| {
            Complex64::new(0.5 + m.entry(0, 2) as f64, 0.0)
        })
        .unwrap();
        assert!(matches!(
            f.norm_squared(),
            Err(CharacterError::NonIntegral(_))
        ));
    }

    #[test]
    fn levi_block_explicit_shape_membership() {
        // exercise LeviBlock::Explicit inside a shape used by the cover
        // machinery: J⁰ = Iwahori of GL₂ embedded in a (2,1) cover
        let r = z(3, 1);
        let iw2 = build_p_gl2(r, 1).unwrap();
        let elems = Arc::clone(iw2.elements(DEFAULT_BUDGET).unwrap());
        let gens = iw2.generators().unwrap().to_vec();
        let cover = crate::congruence::assemble_levi_cover(
            r,
            1,
            LeviBlock::Explicit {
                size: 2,
                elements: elems,
                generators: gens,
            },
            "J_s-test",
        );
        // order: |Iw₂(F₃)|·|units|·|N_u| (lower part trivial at k = 1)
        assert_eq!(cover.order(DEFAULT_BUDGET).unwrap(), 12 * 2 * 9);
        for g in cover.elements(DEFAULT_BUDGET).unwrap().iter().step_by(3) {
            assert!(cover.contains(g));
        }
        let _ = BlockShape {
            ring: r,
            levi: vec![LeviBlock::Gl { size: 2 }, LeviBlock::Gl { size: 1 }],
            lower_val: vec![],
            upper_val: vec![],
        };
    }
}
