//! Property tests for the arithmetic substrate and the group engine.

use proptest::prelude::*;

use congver::congruence::build_p;
use congver::group::{FiniteMatrixGroup, DEFAULT_BUDGET};
use congver::projective::ProjSpace;
use congver::residue::{ResidueMatrix, ResidueRing};
use congver::unity::Unity;

fn ring27() -> ResidueRing {
    ResidueRing::new(3, 3).unwrap()
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = ResidueMatrix> {
    proptest::collection::vec(0u64..27, n * n).prop_map(move |v| {
        ResidueMatrix::from_fn(ring27(), n, |i, j| v[i * n + j])
    })
}

proptest! {
    // reduce commutes with products: the mod-pʲ reduction is a ring
    // homomorphism (checked against the direct-multiplication oracle)
    #[test]
    fn reduce_is_a_ring_homomorphism(a in matrix_strategy(3), b in matrix_strategy(3), j in 1u32..=3) {
        let direct = a.mul(&b).reduce(j).unwrap();
        let reduced = a.reduce(j).unwrap().mul(&b.reduce(j).unwrap());
        prop_assert_eq!(direct, reduced);
    }

    // det is multiplicative and detects units through the residue field
    #[test]
    fn det_multiplicative_and_unit_test(a in matrix_strategy(3), b in matrix_strategy(3)) {
        let r = ring27();
        prop_assert_eq!(a.mul(&b).det(), r.mul(a.det(), b.det()));
        prop_assert_eq!(a.is_unit(), a.det() % 3 != 0);
    }

    // every unit has a two-sided inverse
    #[test]
    fn inverse_is_two_sided(a in matrix_strategy(3)) {
        prop_assume!(a.is_unit());
        let ai = a.invert().unwrap();
        let id = ResidueMatrix::identity(ring27(), 3);
        prop_assert_eq!(a.mul(&ai), id);
        prop_assert_eq!(ai.mul(&a), id);
    }

    // the projective translation is a left action: identity trivial,
    // (gh)·x = g·(h·x) for words in the generators of P(1)
    #[test]
    fn projective_translation_action_axioms(
        word_a in proptest::collection::vec(0usize..12, 1..5),
        word_b in proptest::collection::vec(0usize..12, 1..5),
        coords in proptest::collection::vec(0u64..27, 3),
    ) {
        prop_assume!(coords.iter().any(|&c| c % 3 != 0));
        let r = ring27();
        let sp = ProjSpace::new(r, 3);
        let x = sp.normalize(&coords);
        let p1 = build_p(r, 1).unwrap();
        let gens = p1.generators().unwrap();
        let id = ResidueMatrix::identity(r, 3);
        let g = word_a.iter().fold(id, |acc, &i| acc.mul(&gens[i % gens.len()]));
        let h = word_b.iter().fold(id, |acc, &i| acc.mul(&gens[i % gens.len()]));
        prop_assert_eq!(sp.translate(&id, &x), x);
        prop_assert_eq!(
            sp.translate(&g.mul(&h), &x),
            sp.translate(&g, &sp.translate(&h, &x))
        );
    }

    // exact roots of unity embed homomorphically into ℂ
    #[test]
    fn unity_embedding_is_multiplicative(a in 0i64..60, b in 0i64..60, d in 1u64..=60) {
        let x = Unity::new(a, d);
        let y = Unity::new(b, d);
        let lhs = x.mul(&y).to_complex();
        let rhs = x.to_complex() * y.to_complex();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }
}

#[test]
fn transversal_covers_group_exhaustively() {
    // every element of GL₂(F₃) maps to exactly one Borel-coset representative
    let r = ResidueRing::new(3, 1).unwrap();
    let g = FiniteMatrixGroup::gl(r, 2);
    let b = congver::congruence::build_p_gl2(r, 1).unwrap();
    let cosets = congver::group::CosetSpace::by_bfs(&g, &b, 10).unwrap();
    let elems = g.elements(DEFAULT_BUDGET).unwrap();
    for m in elems.iter() {
        let hits = cosets
            .transversal
            .iter()
            .filter(|t| b.contains(&t.invert().unwrap().mul(m)))
            .count();
        assert_eq!(hits, 1);
    }
}

#[test]
fn double_coset_index_sum() {
    // Σ over double-coset representatives of [H : H ∩ gKg⁻¹] = [G : K] for
    // H = K = P(2) inside GL₃(ℤ/9): the orbit sizes are exactly the local
    // indices, and they partition the 117 points
    let r = ResidueRing::new(3, 2).unwrap();
    let h = std::sync::Arc::new(build_p(r, 2).unwrap());
    let cosets = congver::projective::ProjCosets::new(r, 3, 2);
    let dcs = congver::group::double_cosets_on(&h, &cosets);
    assert_eq!(dcs.len(), 3);
    assert_eq!(dcs.iter().map(|d| d.orbit_size).sum::<u64>(), 117);
}

#[test]
fn w_term_disagrees_exhaustively() {
    // the intertwining term supported on the long Weyl element vanishes:
    // the corner characters disagree somewhere on P(2) ∩ w·P(2)·w⁻¹,
    // verified by streaming all of P(2) ⊂ GL₃(ℤ/9)
    let r = ResidueRing::new(3, 2).unwrap();
    let h = build_p(r, 2).unwrap();
    let eta = congver::residue::UnitChar::tame(r)
        .into_iter()
        .find(|c| c.level() == 1)
        .unwrap();
    let chi = congver::character::LinearChar::corner_char_21(eta);
    let w = congver::congruence::weyl_w(r);
    assert_eq!(
        congver::character::mackey_term_exhaustive(&h, &chi, &h, &chi, &w, DEFAULT_BUDGET),
        Some(false)
    );
    // while the identity term always agrees
    let id = ResidueMatrix::identity(r, 3);
    assert_eq!(
        congver::character::mackey_term_exhaustive(&h, &chi, &h, &chi, &id, DEFAULT_BUDGET),
        Some(true)
    );
}

#[test]
fn mackey_matches_materialized_inner_products() {
    // dim Hom(ind χ, ind ψ) from the double-coset machinery must agree with
    // ⟨ind χ, ind ψ⟩ computed from fully materialized class functions on
    // GL₂(F₃), for every pair of diagonal characters of the Borel
    use congver::character::{induce, mackey_intertwining, LinearChar, MonomialDatum};
    use congver::residue::UnitChar;
    let r = ResidueRing::new(3, 1).unwrap();
    let g = std::sync::Arc::new(FiniteMatrixGroup::gl(r, 2));
    let borel = std::sync::Arc::new(congver::congruence::build_p_gl2(r, 1).unwrap());
    let cosets = congver::group::CosetSpace::by_bfs(&g, &borel, 10).unwrap();
    let units = UnitChar::all(r);
    for a1 in &units {
        for a2 in &units {
            for b1 in &units {
                for b2 in &units {
                    let chi = LinearChar::diagonal_char(vec![*a1, *a2]);
                    let psi = LinearChar::diagonal_char(vec![*b1, *b2]);
                    let by_mackey =
                        mackey_intertwining(&borel, &chi, &borel, &psi, &cosets).dim as i64;
                    let ind_chi = induce(
                        &MonomialDatum::new(std::sync::Arc::clone(&borel), chi),
                        std::sync::Arc::clone(&g),
                        DEFAULT_BUDGET,
                    )
                    .unwrap();
                    let ind_psi = induce(
                        &MonomialDatum::new(std::sync::Arc::clone(&borel), psi),
                        std::sync::Arc::clone(&g),
                        DEFAULT_BUDGET,
                    )
                    .unwrap();
                    let by_inner = ind_chi.inner_product(&ind_psi).unwrap();
                    assert_eq!(by_mackey, by_inner, "χ=({},{}), ψ=({},{})",
                        a1.index(), a2.index(), b1.index(), b2.index());
                }
            }
        }
    }
}

#[test]
fn twist_identity_formula_matches_direct_norm() {
    // the exact Mackey/Frobenius combination used for the twist identity,
    //   ‖U−U′‖² = (M_aa−1) + (M_bb−1) − 2(M_ab − 2·A_ab + A₀),
    // must equal the norm computed from fully materialized virtual
    // characters U = ind α − α̂ on B₂(0) ⊂ GL₂(ℤ/9)
    use congver::character::{induce, mackey_intertwining, ClassFunction, CharKind, LinearChar, MonomialDatum};
    use congver::residue::UnitChar;
    let r = ResidueRing::new(3, 2).unwrap();
    let b2_0 = std::sync::Arc::new(congver::congruence::build_p_gl2(r, 1).unwrap());
    let b2_1 = std::sync::Arc::new(congver::congruence::build_p_gl2(r, 2).unwrap());
    let cosets = congver::group::CosetSpace::by_bfs(&b2_0, &b2_1, 4).unwrap();
    let tame = UnitChar::tame(r);
    let kappa = tame.iter().find(|c| c.level() == 1).copied().unwrap();
    for chi1 in &tame {
        for chi2 in &tame {
            let alpha = LinearChar::diagonal_char(vec![*chi1, *chi2]);
            let beta =
                LinearChar::diagonal_char(vec![chi1.mul(&kappa), chi2.mul(&kappa.inv())]);
            // exact combination
            let m_aa = mackey_intertwining(&b2_0, &alpha, &b2_1, &alpha, &cosets).dim as i64;
            let m_bb = mackey_intertwining(&b2_0, &beta, &b2_1, &beta, &cosets).dim as i64;
            let m_ab = mackey_intertwining(&b2_0, &alpha, &b2_1, &beta, &cosets).dim as i64;
            let a_ab = i64::from(alpha.agrees_on(&beta, b2_1.generators().unwrap()));
            let a0 = i64::from(alpha.agrees_on(&beta, b2_0.generators().unwrap()));
            let combination = (m_aa - 1) + (m_bb - 1) - 2 * (m_ab - 2 * a_ab + a0);
            // direct route: materialize everything on B₂(0) (order 972)
            let materialize = |lin: &LinearChar| -> ClassFunction {
                let lin = lin.clone();
                ClassFunction::from_fn(
                    std::sync::Arc::clone(&b2_0),
                    CharKind::Character,
                    DEFAULT_BUDGET,
                    move |m| lin.eval(m).to_complex(),
                )
                .unwrap()
            };
            let u = induce(
                &MonomialDatum::new(std::sync::Arc::clone(&b2_1), alpha.clone()),
                std::sync::Arc::clone(&b2_0),
                DEFAULT_BUDGET,
            )
            .unwrap()
            .sub(&materialize(&alpha));
            let u_prime = induce(
                &MonomialDatum::new(std::sync::Arc::clone(&b2_1), beta.clone()),
                std::sync::Arc::clone(&b2_0),
                DEFAULT_BUDGET,
            )
            .unwrap()
            .sub(&materialize(&beta));
            let diff = u.sub(&u_prime);
            let direct = diff.norm_squared().unwrap();
            assert_eq!(combination, direct);
            // and the identity itself holds
            assert_eq!(direct, 0);
        }
    }
}

#[test]
fn trivial_character_mackey_matches_burnside() {
    // ⟨ind_{P(2)}^{P(1)} id, ind_{P(2)}^{P(1)} id⟩ equals the number of
    // P(2)\P(1)/P(2) classes; the independent oracle counts P(1)-orbits on
    // pairs of cosets (Burnside without Burnside: direct orbit partition)
    let r = ResidueRing::new(3, 2).unwrap();
    let p1 = std::sync::Arc::new(build_p(r, 1).unwrap());
    let p2 = build_p(r, 2).unwrap();
    let cosets =
        std::sync::Arc::new(congver::group::CosetSpace::by_bfs(&p1, &p2, 9).unwrap());
    assert_eq!(cosets.len(), 9);
    let triv = congver::character::LinearChar::trivial();
    let p2_arc = std::sync::Arc::new(build_p(r, 2).unwrap());
    let mackey =
        congver::character::mackey_intertwining(&p2_arc, &triv, &p2, &triv, cosets.as_ref());
    // oracle: orbits of P(1) on coset pairs under the diagonal action
    let pairs: Vec<(usize, usize)> = (0..9).flat_map(|a| (0..9).map(move |b| (a, b))).collect();
    let cosets_for_action = std::sync::Arc::clone(&cosets);
    let action = congver::group::GroupAction::new(
        std::sync::Arc::clone(&p1),
        move |g, p: &(usize, usize)| {
            let translate = |i: usize| {
                cosets_for_action
                    .index_of(&g.mul(&cosets_for_action.transversal[i]))
                    .expect("translation stays in the coset space")
            };
            (translate(p.0), translate(p.1))
        },
    );
    let orbit_count = action.orbits(&pairs).len() as u64;
    assert_eq!(mackey.dim, orbit_count);
}
