mod common;

use std::sync::Arc;

use common::sphere_cat;
use plumbtw::cover::{decompose, fibre_rank, specialize, truncation_feasibility, BettiVector, CoverIndex, CoverSpec};
use plumbtw::hom::{euler_characteristic, hf_ranks, total_rank, HomComplex};
use plumbtw::{
    apply_braid, equivalent, twist, BraidLetter, BraidWord, Category, CategoryParams, Field, FieldSpec, Morphism,
    PrimeField, Summand, TwistedComplex, Verdict,
};
use proptest::prelude::*;

fn word(letters: &[usize]) -> BraidWord {
    BraidWord(letters.iter().map(|&i| BraidLetter::ALL[i]).collect())
}

fn orbit(n: i64, start: u8, letters: &[usize]) -> TwistedComplex<PrimeField> {
    let cat = sphere_cat(n);
    apply_braid(&word(letters), &TwistedComplex::core(&cat, start, 0)).unwrap()
}

fn letters() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..4usize, 1..=5)
}

/// Adds a contractible pair of Q1 copies joined by an identity arrow.
fn pad(c: &TwistedComplex<PrimeField>) -> TwistedComplex<PrimeField> {
    let cat = c.category();
    let pair = TwistedComplex::from_parts(
        cat,
        vec![Summand::new(1, 3), Summand::new(1, 4)],
        vec![(0, 1, Morphism::basis(cat.field(), cat.unit(1), 5))],
    );
    pair.direct_sum(c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn minimize_preserves_hf(n in 3i64..=5, start in 0u8..2, w in letters()) {
        let c = pad(&orbit(n, start, &w));
        let m = c.minimize();
        prop_assert!(m.is_valid());
        for v in 0..2 {
            let q = TwistedComplex::core(c.category(), v, 0);
            prop_assert_eq!(hf_ranks(&q, &c).unwrap(), hf_ranks(&q, &m).unwrap());
            prop_assert_eq!(hf_ranks(&c, &q).unwrap(), hf_ranks(&m, &q).unwrap());
        }
        prop_assert_eq!(equivalent(&c, &m).unwrap(), Verdict::Yes);
    }

    #[test]
    fn twists_preserve_hom_ranks(n in 3i64..=4, a in letters(), b in letters(), i in 0u8..2, eps in prop::bool::ANY) {
        let c = orbit(n, 0, &a);
        let d = orbit(n, 1, &b);
        let power = if eps { 1 } else { -1 };
        let (tc, td) = (twist(&c, i, power).unwrap(), twist(&d, i, power).unwrap());
        prop_assert_eq!(hf_ranks(&tc, &td).unwrap(), hf_ranks(&c, &d).unwrap());
    }

    #[test]
    fn cone_euler_characteristic(n in 3i64..=4, a in letters(), b in letters(), pick in 0usize..64) {
        let c = orbit(n, 0, &a);
        let d = orbit(n, 1, &b).direct_sum(&orbit(n, 0, &a)).unwrap();
        let hom = HomComplex::new(&c, &d).unwrap();
        let cocycles = hom.cocycles(0);
        prop_assume!(!cocycles.is_empty());
        let f = hom.to_map(0, &cocycles[pick % cocycles.len()]);
        let cone = c.cone(&d, &f).unwrap();
        prop_assert!(cone.is_valid());
        for v in 0..2 {
            let q = TwistedComplex::core(c.category(), v, 0);
            let chi = |x: &TwistedComplex<PrimeField>| euler_characteristic(&hf_ranks(&q, x).unwrap());
            prop_assert_eq!(chi(&cone), chi(&d) - chi(&c));
        }
    }

    #[test]
    fn specialize_is_idempotent_and_fibre_rank_additive(n in 3i64..=5, start in 0u8..2, w in letters(), v in 0u8..2) {
        let c = orbit(n, start, &w);
        let cover = CoverSpec { covered_vertex: v, index: CoverIndex::Finite(32003) };
        let s = specialize(&c, &cover).unwrap();
        prop_assert_eq!(specialize(&s, &cover).unwrap(), s.clone());
        for i in 0..2 {
            let whole = total_rank(&fibre_rank(&s, i).unwrap());
            let parts: usize = decompose(&s).unwrap().iter().map(|p| total_rank(&fibre_rank(p, i).unwrap())).sum();
            prop_assert_eq!(whole, parts);
        }
    }

    #[test]
    fn fibre_rank_is_a_quasi_isomorphism_invariant(n in 3i64..=5, start in 0u8..2, w in letters(), i in 0u8..2) {
        let c = orbit(n, start, &w);
        let there = twist(&c, i, 1).unwrap();
        let back = twist(&there, i, -1).unwrap();
        prop_assert_eq!(equivalent(&back, &c).unwrap(), Verdict::Yes);
        for v in 0..2 {
            let r = total_rank(&fibre_rank(&c, v).unwrap());
            prop_assert_eq!(r, total_rank(&fibre_rank(&back, v).unwrap()));
            prop_assert_eq!(r, total_rank(&fibre_rank(&pad(&c), v).unwrap()));
        }
    }

    #[test]
    fn feasibility_follows_the_inequality(mid in prop::collection::vec(0u32..4, 1..6)) {
        let mut b = vec![1];
        b.extend(&mid);
        b.push(1);
        let beta: u32 = mid.iter().sum();
        let r = truncation_feasibility(&BettiVector::new(b).unwrap());
        prop_assert_eq!(r.beta, beta as u64);
        prop_assert_eq!(r.feasible, beta < 2);
        prop_assert_eq!(r.min_dim_v == Some(2), beta == 1);
    }
}

#[test]
fn single_twist_iterates_grow_in_rank() {
    for n in [3, 4] {
        let cat = sphere_cat(n);
        let q1 = TwistedComplex::core(&cat, 1, 0);
        let mut cur = q1.clone();
        let mut totals = Vec::new();
        for _ in 0..8 {
            cur = twist(&cur, 0, 1).unwrap();
            totals.push(total_rank(&hf_ranks(&q1, &cur).unwrap()));
        }
        assert_eq!(totals, (1..=8).collect::<Vec<_>>(), "n={n}");
    }
}

#[test]
fn specialized_pieces_are_distinct_up_to_shift() {
    let field = PrimeField::new(2).unwrap();
    let cat = Arc::new(Category::new(field, CategoryParams::sphere(3, FieldSpec::new(2))).unwrap());
    let f = cat.field();
    let (p, f1) = (cat.lookup("p").unwrap(), cat.lookup("f1").unwrap());
    let c = TwistedComplex::validated(
        &cat,
        vec![Summand::new(0, 0), Summand::new(1, 0), Summand::new(1, -2)],
        vec![(0, 1, Morphism::basis(f, p, f.one())), (1, 2, Morphism::basis(f, f1, f.one()))],
    )
    .unwrap();
    let s = specialize(&c, &CoverSpec { covered_vertex: 1, index: CoverIndex::Finite(2) }).unwrap();
    let pieces = decompose(&s).unwrap();
    assert_eq!(pieces.len(), 2);
    let (with_s, without_s): (Vec<_>, Vec<_>) = pieces.into_iter().partition(|p| p.summands().iter().any(|x| x.vertex == 0));
    let (a, b) = (&with_s[0], &without_s[0]);
    for k in -8..=8 {
        assert_ne!(equivalent(&b.shift(k), a).unwrap(), Verdict::Yes, "shift {k}");
    }
    assert_eq!(total_rank(&fibre_rank(a, 0).unwrap()), 1);
    assert_eq!(total_rank(&fibre_rank(b, 0).unwrap()), 0);
}

#[test]
fn connected_orbit_complexes_are_one_piece() {
    for n in 3..=5 {
        let c = orbit(n, 0, &[2, 1, 2]);
        assert!(c.len() > 1);
        let pieces = decompose(&c).unwrap();
        assert_eq!(pieces.len(), 1, "{}", c.render());
        assert_eq!(hf_ranks(&c, &c).unwrap().get(&0), Some(&1));
    }
}
