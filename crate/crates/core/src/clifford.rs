//! The Clifford-theory layer: characters of the elementary abelian quotients
//! (N_l∩G(m))/(N_l∩G(m+1)) ≅ k_F², the Levi action on them, stabilizer
//! shapes, and the decompositions of res_S ind_{G(m+1)}^{G(m)}(id) into the
//! identity plus one induced block per non-trivial orbit.
//!
//! The decompositions are verified as character identities: the permutation
//! character π of S on G(m)/G(m+1) is computed directly, the blocks are cut
//! out by the orbit-isotypic projections over the abelian normal subgroup
//! U(m), and the claims become exact inner-product statements (π has
//! ⟨π,1⟩ = 1, each block has norm 1, degrees are the orbit sizes, and the
//! block restrictions to U(m) recover their orbit characters once each).

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::character::{CharKind, ClassFunction, LinearChar};
use crate::group::{closure, FiniteMatrixGroup, GroupAction, GroupError};
use crate::residue::{ResidueMatrix, ResidueRing};
use crate::unity::Unity;

/// The pair N_l∩G(m) ⊇ N_l∩G(m+1) with quotient identified with k_F² via
/// the bottom-row entries (2,0) and (2,1) divided by their valuations.
pub struct UnipotentQuotient {
    pub big: Arc<FiniteMatrixGroup>,
    pub small: Arc<FiniteMatrixGroup>,
    pub exp20: u32,
    pub exp21: u32,
}

impl UnipotentQuotient {
    pub fn new(
        big: Arc<FiniteMatrixGroup>,
        small: Arc<FiniteMatrixGroup>,
        exp20: u32,
        exp21: u32,
    ) -> Self {
        UnipotentQuotient {
            big,
            small,
            exp20,
            exp21,
        }
    }

    fn p(&self) -> u64 {
        self.big.ring().p()
    }

    /// The class of an element of the big group in k_F².
    pub fn class_of(&self, n: &ResidueMatrix) -> (u64, u64) {
        let p = self.p();
        let v1 = n.entry(2, 0) / p.pow(self.exp20) % p;
        let v2 = n.entry(2, 1) / p.pow(self.exp21) % p;
        (v1, v2)
    }

    /// A coset representative for a class.
    pub fn rep(&self, w: (u64, u64)) -> ResidueMatrix {
        let p = self.p();
        let ring = self.big.ring();
        ResidueMatrix::from_fn(ring, 3, |i, j| {
            if i == j {
                1
            } else if (i, j) == (2, 0) {
                w.0 * p.pow(self.exp20)
            } else if (i, j) == (2, 1) {
                w.1 * p.pow(self.exp21)
            } else {
                0
            }
        })
    }

    /// All q² classes in sorted order.
    pub fn classes(&self) -> Vec<(u64, u64)> {
        let p = self.p();
        (0..p).flat_map(|a| (0..p).map(move |b| (a, b))).collect()
    }

    /// η_w(n) = ψ((v·w)/p) under the trace pairing of the quotient with
    /// itself through the transpose embedding into M₃.
    pub fn eta(&self, w: (u64, u64)) -> LinearChar {
        let p = self.p();
        let exp20 = self.exp20;
        let exp21 = self.exp21;
        LinearChar::new(format!("η({},{})", w.0, w.1), move |n| {
            let v1 = n.entry(2, 0) / p.pow(exp20) % p;
            let v2 = n.entry(2, 1) / p.pow(exp21) % p;
            Unity::new((v1 * w.0 + v2 * w.1) as i64, p)
        })
    }

    /// Verify the identification is a group isomorphism onto k_F² with
    /// kernel the small group, exhaustively.
    pub fn validate(&self, budget: u64) -> Result<bool, GroupError> {
        let elems = self.big.elements(budget)?;
        let p = self.p();
        // homomorphism
        for a in elems.iter() {
            for b in elems.iter() {
                let (x1, y1) = self.class_of(a);
                let (x2, y2) = self.class_of(b);
                if self.class_of(&a.mul(b)) != ((x1 + x2) % p, (y1 + y2) % p) {
                    return Ok(false);
                }
            }
        }
        // kernel = small
        for a in elems.iter() {
            let trivial = self.class_of(a) == (0, 0);
            if trivial != self.small.contains(a) {
                return Ok(false);
            }
        }
        // surjective: q² distinct classes hit
        let mut seen = std::collections::HashSet::new();
        for a in elems.iter() {
            seen.insert(self.class_of(a));
        }
        Ok(seen.len() as u64 == p * p)
    }

    /// The conjugation action of a Levi element on classes: m·v =
    /// class(m·rep(v)·m⁻¹).
    pub fn class_action(&self, m: &ResidueMatrix, v: (u64, u64)) -> (u64, u64) {
        let mi = m.invert().expect("levi element is a unit");
        self.class_of(&m.mul(&self.rep(v)).mul(&mi))
    }

    /// The contragredient action on character parameters:
    /// (m·η_w)(u) = η_w(m⁻¹um) = η_{w'}(u).
    pub fn char_action(&self, m: &ResidueMatrix, w: (u64, u64)) -> (u64, u64) {
        let p = self.p();
        let mi = m.invert().expect("levi element is a unit");
        // read off w' from values on the basis classes (1,0) and (0,1)
        let eta_w = self.eta(w);
        let read = |basis: (u64, u64)| -> u64 {
            let val = eta_w.eval(&mi.mul(&self.rep(basis)).mul(m));
            // val = e^{2πi·w'/p}
            for cand in 0..p {
                if val == Unity::new(cand as i64, p) {
                    return cand;
                }
            }
            unreachable!("value is a p-th root of unity")
        };
        (read((1, 0)), read((0, 1)))
    }
}

/// The 3×3 trace-pairing identity behind the equivariant self-duality:
/// ψ(tr(m n⁺ m⁻¹ n⁻)) = ψ(tr(n⁺ m⁻¹ n⁻ m)) for all Levi m and nilpotent
/// n⁺ (upper column), n⁻ (lower row) over k_F. Exhaustive; returns a witness
/// on failure.
pub fn trace_pairing_equivariance(q: u64) -> Result<Option<(ResidueMatrix, ResidueMatrix, ResidueMatrix)>, GroupError> {
    let r = ResidueRing::new(q, 1).unwrap();
    let m_group = crate::congruence::levi_21(r);
    let elems = m_group.elements(crate::group::DEFAULT_BUDGET)?;
    let psi = |x: u64| Unity::new(x as i64, q);
    for m in elems.iter() {
        let mi = m.invert().unwrap();
        for u1 in 0..q {
            for u2 in 0..q {
                let nu = ResidueMatrix::from_fn(r, 3, |i, j| {
                    if (i, j) == (0, 2) {
                        u1
                    } else if (i, j) == (1, 2) {
                        u2
                    } else {
                        0
                    }
                });
                for v1 in 0..q {
                    for v2 in 0..q {
                        let nl = ResidueMatrix::from_fn(r, 3, |i, j| {
                            if (i, j) == (2, 0) {
                                v1
                            } else if (i, j) == (2, 1) {
                                v2
                            } else {
                                0
                            }
                        });
                        let lhs = psi(m.mul(&nu).mul(&mi).mul(&nl).trace());
                        let rhs = psi(nu.mul(&mi).mul(&nl).mul(m).trace());
                        if lhs != rhs {
                            return Ok(Some((*m, nu, nl)));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Orbit decomposition of the q² character parameters under a Levi group.
pub struct LeviOrbits {
    /// each orbit as a sorted list of parameters; the trivial orbit first
    pub orbits: Vec<Vec<(u64, u64)>>,
}

pub fn levi_orbits(
    quotient: &UnipotentQuotient,
    levi: &Arc<FiniteMatrixGroup>,
) -> LeviOrbits {
    let q = Arc::new(QuotientRef {
        big: Arc::clone(&quotient.big),
        small: Arc::clone(&quotient.small),
        exp20: quotient.exp20,
        exp21: quotient.exp21,
    });
    let action = GroupAction::new(Arc::clone(levi), move |m, w: &(u64, u64)| {
        q.as_quotient().char_action(m, *w)
    });
    let mut orbits: Vec<Vec<(u64, u64)>> = action
        .orbits(&quotient.classes())
        .into_iter()
        .map(|mut o| {
            o.sort_unstable();
            o
        })
        .collect();
    orbits.sort();
    LeviOrbits { orbits }
}

// A cheap cloneable view so the action closure can own quotient data.
struct QuotientRef {
    big: Arc<FiniteMatrixGroup>,
    small: Arc<FiniteMatrixGroup>,
    exp20: u32,
    exp21: u32,
}

impl QuotientRef {
    fn as_quotient(&self) -> UnipotentQuotient {
        UnipotentQuotient {
            big: Arc::clone(&self.big),
            small: Arc::clone(&self.small),
            exp20: self.exp20,
            exp21: self.exp21,
        }
    }
}

/// One induced block of the decomposition.
#[derive(Debug, Clone)]
pub struct CliffordSummand {
    pub orbit_rep: (u64, u64),
    pub orbit_size: u64,
    pub degree: i64,
    pub norm: i64,
    /// multiplicities ⟨res_U block, η_w⟩ for w in the orbit (all must be 1)
    pub eta_multiplicities: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct CliffordDecomposition {
    pub identity_multiplicity: i64,
    pub perm_norm: i64,
    pub summands: Vec<CliffordSummand>,
    /// ‖π − 1 − Σ blocks‖ after projection (must vanish)
    pub residual: f64,
}

/// Verify res_S ind_{G(m+1)}^{G(m)}(id) = 1 ⊕ ⊕_j ind-blocks as character
/// identities. `transversal` must be coset representatives of G(m+1) in
/// G(m) (the N_l-quotient representatives), `s` the group (M∩G(m))⋉(N_l∩G(m)),
/// and `small_membership` the membership test of G(m+1).
pub fn clifford_decompose(
    s: &Arc<FiniteMatrixGroup>,
    small: &FiniteMatrixGroup,
    quotient: &UnipotentQuotient,
    levi: &Arc<FiniteMatrixGroup>,
    budget: u64,
) -> Result<CliffordDecomposition, crate::character::CharacterError> {
    let transversal: Vec<ResidueMatrix> = quotient
        .classes()
        .into_iter()
        .map(|w| quotient.rep(w))
        .collect();
    let t_invs: Vec<ResidueMatrix> = transversal.iter().map(|t| t.invert().unwrap()).collect();
    let small_membership = small.membership_fn();
    // π = permutation character of S on G(m)/G(m+1)
    let pi = ClassFunction::from_fn(Arc::clone(s), CharKind::Character, budget, {
        let transversal = transversal.clone();
        move |g| {
            let mut fixed = 0u32;
            for (t, ti) in transversal.iter().zip(&t_invs) {
                if small_membership(&ti.mul(g).mul(t)) {
                    fixed += 1;
                }
            }
            Complex64::new(fixed as f64, 0.0)
        }
    })?;
    let one = ClassFunction::from_fn(Arc::clone(s), CharKind::Character, budget, |_| {
        Complex64::new(1.0, 0.0)
    })?;
    let identity_multiplicity = pi.inner_product(&one)?;
    let perm_norm = pi.norm_squared()?;

    let orbits = levi_orbits(quotient, levi);
    let u_elems = quotient.big.elements(budget)?.clone();
    let s_elems = s.elements(budget)?.clone();
    let mut summands = Vec::new();
    let mut sum_blocks: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); s_elems.len()];
    for orbit in &orbits.orbits {
        if orbit == &vec![(0, 0)] {
            continue;
        }
        // isotypic projection: block(s) = (1/|U|)·Σ_u conj(χ_O(u))·π(s·u)
        let etas: Vec<LinearChar> = orbit.iter().map(|&w| quotient.eta(w)).collect();
        let u_list = u_elems.as_ref().clone();
        let orbit_char: Vec<Complex64> = u_list
            .iter()
            .map(|u| {
                etas.iter()
                    .map(|e| e.eval(u).to_complex())
                    .sum::<Complex64>()
                    .conj()
            })
            .collect();
        let pi_ref = &pi;
        let values: Vec<Complex64> = crate::par::map_indexed(s_elems.len() as u64, |ix| {
            let g = &s_elems[ix as usize];
            let mut acc = Complex64::new(0.0, 0.0);
            for (u, cw) in u_list.iter().zip(&orbit_char) {
                acc += cw * pi_ref.value(&g.mul(u));
            }
            acc / u_list.len() as f64
        });
        for (acc, v) in sum_blocks.iter_mut().zip(&values) {
            *acc += v;
        }
        let block = ClassFunction::from_fn(Arc::clone(s), CharKind::Character, budget, {
            let s_elems = s_elems.clone();
            let values = values.clone();
            move |g| {
                let ix = s_elems.binary_search(g).unwrap();
                values[ix]
            }
        })?;
        let degree = block.degree().re.round() as i64;
        let norm = block.norm_squared()?;
        // restriction census over U(m)
        let res = block.restrict(Arc::clone(&quotient.big), budget)?;
        let mut eta_multiplicities = Vec::new();
        for &w in orbit {
            let eta = quotient.eta(w);
            let eta_cf = ClassFunction::from_fn(
                Arc::clone(&quotient.big),
                CharKind::Character,
                budget,
                move |u| eta.eval(u).to_complex(),
            )?;
            eta_multiplicities.push(res.inner_product(&eta_cf)?);
        }
        summands.push(CliffordSummand {
            orbit_rep: orbit[0],
            orbit_size: orbit.len() as u64,
            degree,
            norm,
            eta_multiplicities,
        });
    }
    // π − 1 − Σ blocks must vanish pointwise
    let mut residual = 0.0f64;
    for (i, g) in s_elems.iter().enumerate() {
        let delta = pi.value(g) - Complex64::new(1.0, 0.0) - sum_blocks[i];
        residual = residual.max(delta.norm());
    }
    Ok(CliffordDecomposition {
        identity_multiplicity,
        perm_norm,
        summands,
        residual,
    })
}

/// Shapes the stabilizer of a non-trivial character can land in, up to Levi
/// conjugacy, at the residue-field level. "Upper"/"Lower" is the position of
/// the free off-diagonal entry in the 2×2 block; the tie records which
/// corner the GL₁ part must equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizerShape {
    /// [[a,b,0],[0,d,0],[0,0,d]] — upper off-diagonal, GL₁ tied to d (e = d)
    UpperTieD,
    /// [[a,b,0],[0,d,0],[0,0,a]] — e = a
    UpperTieA,
    /// [[a,0,0],[c,d,0],[0,0,d]] — the transpose of UpperTieD
    LowerTieD,
    /// [[a,0,0],[c,d,0],[0,0,a]]
    LowerTieA,
}

impl StabilizerShape {
    pub fn contains(&self, g: &ResidueMatrix) -> bool {
        let zero_upper = g.entry(0, 1) == 0;
        let zero_lower = g.entry(1, 0) == 0;
        let off_ok = match self {
            StabilizerShape::UpperTieD | StabilizerShape::UpperTieA => zero_lower,
            StabilizerShape::LowerTieD | StabilizerShape::LowerTieA => zero_upper,
        };
        let tie_ok = match self {
            StabilizerShape::UpperTieD | StabilizerShape::LowerTieD => {
                g.entry(2, 2) == g.entry(1, 1)
            }
            StabilizerShape::UpperTieA | StabilizerShape::LowerTieA => {
                g.entry(2, 2) == g.entry(0, 0)
            }
        };
        let block_zero = g.entry(0, 2) == 0
            && g.entry(1, 2) == 0
            && g.entry(2, 0) == 0
            && g.entry(2, 1) == 0;
        off_ok && tie_ok && block_zero
    }

    pub fn all() -> [StabilizerShape; 4] {
        [
            StabilizerShape::UpperTieD,
            StabilizerShape::UpperTieA,
            StabilizerShape::LowerTieD,
            StabilizerShape::LowerTieA,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct StabilizerReport {
    pub w: (u64, u64),
    pub stabilizer_order: u64,
    /// shapes matched after conjugation, with a conjugating element each
    pub matched: Vec<(StabilizerShape, ResidueMatrix)>,
    /// true when UpperTieD matched without any conjugation
    pub upper_tie_d_unconjugated: bool,
}

/// Compute Stab(η_w) inside a reduced (mod p) Levi group and search for
/// Levi conjugations carrying it into each candidate shape.
pub fn stabilizer_shape(
    quotient: &UnipotentQuotient,
    levi_reduced: &Arc<FiniteMatrixGroup>,
    w: (u64, u64),
    budget: u64,
) -> Result<StabilizerReport, GroupError> {
    let q = Arc::new(QuotientRef {
        big: Arc::clone(&quotient.big),
        small: Arc::clone(&quotient.small),
        exp20: quotient.exp20,
        exp21: quotient.exp21,
    });
    let action = GroupAction::new(Arc::clone(levi_reduced), move |m, x: &(u64, u64)| {
        q.as_quotient().char_action(m, *x)
    });
    let (_orbit, stab) = action.orbit_stabilizer(&w);
    let ring = levi_reduced.ring();
    let stab_elems = closure(stab.generators()?, ring, 3, budget)?;
    let mut matched = Vec::new();
    let mut upper_tie_d_unconjugated = false;
    for shape in StabilizerShape::all() {
        let mut found = None;
        for c in levi_reduced.elements(budget)?.iter() {
            let ci = c.invert().unwrap();
            if stab_elems.iter().all(|s| shape.contains(&c.mul(s).mul(&ci))) {
                found = Some(*c);
                break;
            }
        }
        if let Some(c) = found {
            if shape == StabilizerShape::UpperTieD && c.is_identity() {
                upper_tie_d_unconjugated = true;
            }
            matched.push((shape, c));
        }
    }
    Ok(StabilizerReport {
        w,
        stabilizer_order: stab_elems.len() as u64,
        matched,
        upper_tie_d_unconjugated,
    })
}

/// Level-zero core of the main comparison: for distinct cuspidals τ, τ₁ of
/// GL₂(F_q) and the matching twist χ₁ = ω_τ·ω_{τ₁}⁻¹·χ, the characters of
/// τ⊠χ and τ₁⊠χ₁ agree on the stabilizer-shape subgroup (exhaustively).
/// Returns the number of (pair, element) comparisons made.
pub fn mainb_level_zero_agreement(
    q: u64,
    budget: u64,
) -> Result<(u64, bool), GroupError> {
    use crate::gl2::{Gl2CharTable, IrrepFamily};
    let table = Gl2CharTable::new(q, 1);
    let r = ResidueRing::new(q, 1).unwrap();
    let levi = Arc::new(crate::congruence::levi_21(r));
    // stabilizer of η_{(0,1)} under the Levi action
    let nl_big = Arc::new(crate::congruence::lower_unipotent_21(r, 0));
    let nl_small = Arc::new(FiniteMatrixGroup::trivial(r, 3));
    let quotient = UnipotentQuotient::new(nl_big, nl_small, 0, 0);
    let qref = Arc::new(QuotientRef {
        big: Arc::clone(&quotient.big),
        small: Arc::clone(&quotient.small),
        exp20: 0,
        exp21: 0,
    });
    let action = GroupAction::new(Arc::clone(&levi), move |m, x: &(u64, u64)| {
        qref.as_quotient().char_action(m, *x)
    });
    let (_, stab) = action.orbit_stabilizer(&(0, 1));
    let stab_elems = closure(stab.generators()?, r, 3, budget)?;
    let cuspidals: Vec<u64> = table
        .cuspidals()
        .iter()
        .map(|c| match c.family {
            IrrepFamily::Cuspidal { theta } => theta,
            _ => unreachable!(),
        })
        .collect();
    let chis = crate::residue::UnitChar::tame(r);
    let mut comparisons = 0;
    let mut all_agree = true;
    for &th in &cuspidals {
        for &th1 in &cuspidals {
            if th == th1 {
                continue;
            }
            let tau = table
                .irreps
                .iter()
                .find(|i| i.family == IrrepFamily::Cuspidal { theta: th })
                .unwrap();
            let tau1 = table
                .irreps
                .iter()
                .find(|i| i.family == IrrepFamily::Cuspidal { theta: th1 })
                .unwrap();
            for chi in &chis {
                let chi1 = table.twist_matching_character(th, th1, chi);
                for s in &stab_elems {
                    let a_block = ResidueMatrix::from_fn(r, 2, |i, j| s.entry(i, j));
                    let f = s.entry(2, 2);
                    let lhs = tau.values[table.class_index(table.class_of_matrix(&a_block))]
                        * chi.eval(f).to_complex();
                    let rhs = tau1.values[table.class_index(table.class_of_matrix(&a_block))]
                        * chi1.eval(f).to_complex();
                    comparisons += 1;
                    if (lhs - rhs).norm() > 1e-9 {
                        all_agree = false;
                    }
                }
            }
        }
    }
    Ok((comparisons, all_agree))
}

/// Lemma-upper style exhaustive commutator containment: for every
/// n⁺ ∈ N_u∩G(m) and every coset representative n⁻, the conjugate
/// n⁻·n⁺·(n⁻)⁻¹ lies in G(m+1). Returns a witness on failure.
pub fn upper_action_trivial(
    upper: &FiniteMatrixGroup,
    coset_reps: &[ResidueMatrix],
    target_membership: impl Fn(&ResidueMatrix) -> bool,
    budget: u64,
) -> Result<Option<(ResidueMatrix, ResidueMatrix)>, GroupError> {
    let uppers = upper.elements(budget)?;
    for nu in uppers.iter() {
        for nl in coset_reps {
            let c = nl.mul(nu).mul(&nl.invert().unwrap());
            if !target_membership(&c) {
                return Ok(Some((*nu, *nl)));
            }
        }
    }
    Ok(None)
}

/// η-decomposition of the restriction to N_l∩G(m): the induced character of
/// the trivial character of G(m+1), restricted to the lower unipotent part,
/// must equal Σ over all q² characters η_w exactly once each.
pub struct RestrictionCensus {
    pub eta_count: u64,
    pub multiplicities: Vec<i64>,
    pub distinct: bool,
    pub trivial_on_small: bool,
}

pub fn lower_restriction_census(
    quotient: &UnipotentQuotient,
    small_membership: impl Fn(&ResidueMatrix) -> bool + Sync + Send,
    budget: u64,
) -> Result<RestrictionCensus, crate::character::CharacterError> {
    let transversal: Vec<ResidueMatrix> = quotient
        .classes()
        .into_iter()
        .map(|w| quotient.rep(w))
        .collect();
    // res_{N_l∩G(m)} ind(id) evaluated directly on the big group
    let big = Arc::clone(&quotient.big);
    let res = ClassFunction::from_fn(Arc::clone(&big), CharKind::Character, budget, move |g| {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &transversal {
            let c = t.invert().unwrap().mul(g).mul(t);
            if small_membership(&c) {
                acc += Complex64::new(1.0, 0.0);
            }
        }
        acc
    })?;
    let mut multiplicities = Vec::new();
    let mut value_tables: HashMap<Vec<Unity>, u64> = HashMap::new();
    let elems = big.elements(budget)?.clone();
    let mut trivial_on_small = true;
    for w in quotient.classes() {
        let eta = quotient.eta(w);
        // distinctness via exact value tables
        let table: Vec<Unity> = elems.iter().map(|g| eta.eval(g)).collect();
        *value_tables.entry(table).or_insert(0) += 1;
        // triviality on the small group
        for g in elems.iter() {
            if quotient.small.contains(g) && !eta.eval(g).is_one() {
                trivial_on_small = false;
            }
        }
        let eta_cf = ClassFunction::from_fn(Arc::clone(&big), CharKind::Character, budget, {
            let eta = eta.clone();
            move |g| eta.eval(g).to_complex()
        })?;
        multiplicities.push(res.inner_product(&eta_cf)?);
    }
    Ok(RestrictionCensus {
        eta_count: quotient.classes().len() as u64,
        multiplicities,
        distinct: value_tables.values().all(|&c| c == 1),
        trivial_on_small,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence;
    use crate::group::DEFAULT_BUDGET;

    fn z(p: u64, k: u32) -> ResidueRing {
        ResidueRing::new(p, k).unwrap()
    }

    fn quotient_21(p: u64, k: u32, m: u32) -> UnipotentQuotient {
        let r = z(p, k);
        let big = Arc::new(congruence::lower_unipotent_21(r, m));
        let small = Arc::new(congruence::lower_unipotent_21(r, m + 1));
        UnipotentQuotient::new(big, small, m, m)
    }

    #[test]
    fn quotient_identification_is_iso() {
        let q = quotient_21(3, 2, 1);
        assert!(q.validate(DEFAULT_BUDGET).unwrap());
        // zero element ↔ trivial character
        let eta0 = q.eta((0, 0));
        for g in q.big.elements(DEFAULT_BUDGET).unwrap().iter() {
            assert!(eta0.eval(g).is_one());
        }
        // 9 characters pairwise distinct
        let elems = q.big.elements(DEFAULT_BUDGET).unwrap().clone();
        let mut tables = std::collections::HashSet::new();
        for w in q.classes() {
            let eta = q.eta(w);
            let t: Vec<Unity> = elems.iter().map(|g| eta.eval(g)).collect();
            tables.insert(t);
        }
        assert_eq!(tables.len(), 9);
    }

    #[test]
    fn equivariance_identity_q3() {
        assert_eq!(trace_pairing_equivariance(3).unwrap(), None);
    }

    #[test]
    fn char_action_is_transpose_conjugate() {
        // the matrix of the action on parameters is the inverse transpose of
        // the matrix of the action on classes (with the same f-scaling)
        let q = quotient_21(3, 1, 0);
        let r = z(3, 1);
        let levi = congruence::levi_21(r);
        let fp = r;
        for m in levi.elements(DEFAULT_BUDGET).unwrap().iter().step_by(7) {
            // class action matrix V: columns are images of basis classes
            let v10 = q.class_action(m, (1, 0));
            let v01 = q.class_action(m, (0, 1));
            // char action matrix W
            let w10 = q.char_action(m, (1, 0));
            let w01 = q.char_action(m, (0, 1));
            // V^t·W must be the identity on k²: pairing preserved
            let vmat = ResidueMatrix::from_rows(fp, &[&[v10.0, v01.0], &[v10.1, v01.1]]);
            let wmat = ResidueMatrix::from_rows(fp, &[&[w10.0, w01.0], &[w10.1, w01.1]]);
            let prod = vmat.transpose().mul(&wmat);
            assert!(prod.is_identity(), "V={vmat:?} W={wmat:?}");
        }
    }

    #[test]
    fn levi_orbit_census_two_one() {
        // (2,1) shape: orbits {1, q²−1}
        for p in [3u64, 5] {
            let q = quotient_21(p, 1, 0);
            let r = z(p, 1);
            let levi = Arc::new(congruence::levi_21(r));
            let orbits = levi_orbits(&q, &levi);
            let mut sizes: Vec<usize> = orbits.orbits.iter().map(|o| o.len()).collect();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![1, (p * p - 1) as usize]);
        }
    }

    #[test]
    fn levi_orbit_census_b21() {
        // torus-side shape at q=3: the reduced Levi is Borel₂ × GL₁, giving
        // orbits {1, 2, 6} on the parameters
        let r = z(3, 1);
        let exps = congruence::CongruenceExponents::new([1, 1, 1], 0).unwrap();
        let big = Arc::new(congruence::lower_unipotent_b21(r, exps));
        // at truncation 1 the small group is trivial
        let small = Arc::new(FiniteMatrixGroup::trivial(r, 3));
        let q = UnipotentQuotient::new(big, small, 1, 1);
        // exponents exceed the truncation so entries are stored at val 0:
        // the quotient classes still read entries (2,0), (2,1) directly
        let q = UnipotentQuotient {
            exp20: 0,
            exp21: 0,
            ..q
        };
        let levi = Arc::new(congruence::levi_b21(r, 1, DEFAULT_BUDGET).unwrap());
        let orbits = levi_orbits(&q, &levi);
        let mut sizes: Vec<usize> = orbits.orbits.iter().map(|o| o.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 6]);
    }

    #[test]
    fn stabilizer_shapes_two_one() {
        // stabilizer of a non-trivial character is conjugate to the
        // transpose of the upper e=d shape; that literal upper shape
        // stabilizes only the trivial character (so UpperTieD can only be
        // reached for the orbit where the tie degenerates)
        let r = z(3, 1);
        let q = quotient_21(3, 1, 0);
        let levi = Arc::new(congruence::levi_21(r));
        let rep = stabilizer_shape(&q, &levi, (0, 1), DEFAULT_BUDGET).unwrap();
        assert_eq!(rep.stabilizer_order, 12); // 96 = 8·12
        let shapes: Vec<StabilizerShape> = rep.matched.iter().map(|(s, _)| *s).collect();
        assert!(shapes.contains(&StabilizerShape::LowerTieD));
        assert!(!shapes.contains(&StabilizerShape::UpperTieD));
        // trivial character: full Levi, no conjugation needed, no shape fits
        let rep0 = stabilizer_shape(&q, &levi, (0, 0), DEFAULT_BUDGET).unwrap();
        assert_eq!(rep0.stabilizer_order, 96);
        assert!(rep0.matched.is_empty());
    }

    #[test]
    fn mainb_level_zero() {
        let (comparisons, agree) = mainb_level_zero_agreement(3, DEFAULT_BUDGET).unwrap();
        assert!(agree);
        // 3 cuspidals, 6 ordered distinct pairs, 2 tame χ, 12 stab elements
        assert_eq!(comparisons, 6 * 2 * 12);
    }

    #[test]
    fn suma_decomposition_p3() {
        // (2,1) shape, p=3, m=1, truncation 2: exactly two summands
        let r = z(3, 2);
        let s = Arc::new(congruence::s_group_21(r, 1));
        let p2 = congruence::build_p(r, 2).unwrap();
        let q = quotient_21(3, 2, 1);
        let levi = Arc::new(congruence::levi_21(r));
        let dec = clifford_decompose(&s, &p2, &q, &levi, DEFAULT_BUDGET).unwrap();
        assert_eq!(dec.identity_multiplicity, 1);
        assert_eq!(dec.perm_norm, 2);
        assert_eq!(dec.summands.len(), 1);
        let block = &dec.summands[0];
        assert_eq!(block.degree, 8);
        assert_eq!(block.norm, 1);
        assert!(block.eta_multiplicities.iter().all(|&m| m == 1));
        assert!(dec.residual < 1e-9);
    }

    #[test]
    fn lower_restriction_census_lemma_char() {
        // restriction of ind_{P(2)}^{P(1)}(id) to N_l∩P(1): 9 distinct
        // linear characters, multiplicity one, trivial on N_l∩P(2)
        let r = z(3, 2);
        let q = quotient_21(3, 2, 1);
        let p2 = congruence::build_p(r, 2).unwrap();
        let membership = p2.membership_fn();
        let census =
            lower_restriction_census(&q, move |g| membership(g), DEFAULT_BUDGET).unwrap();
        assert_eq!(census.eta_count, 9);
        assert!(census.multiplicities.iter().all(|&m| m == 1));
        assert!(census.distinct);
        assert!(census.trivial_on_small);
    }
}
