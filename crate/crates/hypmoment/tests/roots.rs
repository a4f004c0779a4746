//! Polynomial arithmetic, Sturm-sequence root counting, isolation,
//! refinement, and rational-root recognition.

use hypmoment::dyadic::Dyadic;
use hypmoment::poly::{
    isolate_roots, pow2, recognize_rational_root, refine_interval, resolve_roots,
    simplest_rational_in, IsolatedRoot, Poly, ResolvedRoot, SturmChain,
};
use hypmoment::scalar::{rat, ratio, Rat};
use num_traits::Zero;
use proptest::prelude::*;

fn poly(coeffs: Vec<Rat>) -> Poly<Rat> {
    Poly::new(coeffs)
}

/// Monic polynomial with exactly the given roots.
fn from_roots(roots: &[Rat]) -> Poly<Rat> {
    let mut p = poly(vec![rat(1)]);
    for r in roots {
        p = p.mul(&Poly::linear_root(r));
    }
    p
}

#[test]
fn divmod_roundtrip() {
    let a = poly(vec![rat(2), rat(-3), rat(0), rat(1), rat(5)]);
    let b = poly(vec![rat(1), rat(4), rat(2)]);
    let (q, r) = a.divmod(&b);
    assert_eq!(q.mul(&b).add(&r), a);
    assert!(r.deg().unwrap_or(0) < b.deg().unwrap());
}

#[test]
fn gcd_of_shared_factor() {
    let s = Poly::linear_root(&ratio(5, 3));
    let a = s.mul(&poly(vec![rat(1), rat(1)]));
    let b = s.mul(&poly(vec![rat(-2), rat(0), rat(1)]));
    assert_eq!(a.gcd(&b), s.monic());
}

#[test]
fn square_free_strips_multiplicity() {
    let p = from_roots(&[rat(1), rat(1), rat(1), rat(-2), rat(-2)]);
    let sf = p.square_free();
    assert_eq!(sf.monic(), from_roots(&[rat(1), rat(-2)]));
}

#[test]
fn sturm_counts_distinct_roots() {
    let p = from_roots(&(1..=8).map(rat).collect::<Vec<_>>());
    let chain = SturmChain::new(&p);
    assert_eq!(chain.count_all(), 8);
    assert_eq!(chain.count_half_open(&ratio(5, 2), &ratio(13, 2)), 4);
    // Half-open convention: the right endpoint counts, the left does not.
    assert_eq!(chain.count_half_open(&rat(1), &rat(3)), 2);
}

#[test]
fn isolation_separates_all_roots() {
    let roots = vec![rat(-3), ratio(-1, 2), rat(0), ratio(7, 3), rat(5)];
    let p = from_roots(&roots);
    let isolated = isolate_roots(&p);
    assert_eq!(isolated.len(), roots.len());
}

#[test]
fn resolve_recovers_rational_roots_exactly() {
    let mut roots = vec![rat(-3), ratio(-1, 2), rat(0), ratio(7, 3), rat(5)];
    roots.sort();
    let p = from_roots(&roots);
    let resolved = resolve_roots(&p, 128);
    assert_eq!(resolved.len(), roots.len());
    for (r, want) in resolved.iter().zip(&roots) {
        match r {
            ResolvedRoot::Exact(v) => assert_eq!(v, want),
            other => panic!("expected exact root, got {other:?}"),
        }
    }
}

#[test]
fn resolve_handles_multiplicities() {
    // (x-1)^2 (x+2)^3 x
    let p = from_roots(&[rat(1), rat(1), rat(-2), rat(-2), rat(-2), rat(0)]);
    let resolved = resolve_roots(&p, 64);
    let got: Vec<Rat> = resolved
        .iter()
        .map(|r| match r {
            ResolvedRoot::Exact(v) => v.clone(),
            other => panic!("expected exact root, got {other:?}"),
        })
        .collect();
    assert_eq!(got, vec![rat(-2), rat(0), rat(1)]);
}

#[test]
fn resolve_boxes_irrational_roots() {
    // x^2 - 2: two irrational roots at +-sqrt(2).
    let p = poly(vec![rat(-2), rat(0), rat(1)]);
    let resolved = resolve_roots(&p, 128);
    assert_eq!(resolved.len(), 2);
    let two = Dyadic::from_int(2);
    let eps = Dyadic::new(1.into(), -100);
    for r in &resolved {
        match r {
            ResolvedRoot::Approx { lo, hi, value } => {
                assert!(hi - lo < pow2(-128));
                let err = value.mul(value).sub(&two).abs();
                assert!(err.cmp(&eps).is_lt());
            }
            other => panic!("expected boxed root, got {other:?}"),
        }
    }
}

#[test]
fn resolve_mixed_rational_and_irrational() {
    // (x - 22/7)(x^2 - 3): the rational root is recognized even though the
    // others are irrational.
    let p = Poly::linear_root(&ratio(22, 7)).mul(&poly(vec![rat(-3), rat(0), rat(1)]));
    let resolved = resolve_roots(&p, 96);
    assert_eq!(resolved.len(), 3);
    let exact: Vec<&Rat> = resolved
        .iter()
        .filter_map(|r| match r {
            ResolvedRoot::Exact(v) => Some(v),
            _ => None,
        })
        .collect();
    assert_eq!(exact, vec![&ratio(22, 7)]);
}

#[test]
fn rational_root_at_interval_endpoint_of_peeled_factor() {
    // x (x^2 - 2): isolation peels the exact root 0 by midpoint hit, and 0
    // then sits at an endpoint of the isolating intervals of +-sqrt(2).
    let p = poly(vec![rat(0), rat(-2), rat(0), rat(1)]);
    let resolved = resolve_roots(&p, 64);
    assert_eq!(resolved.len(), 3);
    assert!(matches!(&resolved[1], ResolvedRoot::Exact(v) if v.is_zero()));
    assert!(matches!(&resolved[0], ResolvedRoot::Approx { .. }));
    assert!(matches!(&resolved[2], ResolvedRoot::Approx { .. }));
}

#[test]
fn refine_shrinks_below_target() {
    let p = poly(vec![rat(-2), rat(0), rat(1)]);
    match refine_interval(&p, &rat(1), &rat(2), -200) {
        IsolatedRoot::Interval { lo, hi } => {
            assert!(&hi - &lo < pow2(-200));
            assert!(lo < hi);
        }
        IsolatedRoot::Exact(_) => panic!("sqrt(2) is not rational"),
    }
}

#[test]
fn recognition_certifies_by_evaluation() {
    let p = from_roots(&[ratio(355, 113)]).mul(&poly(vec![rat(1), rat(1)]));
    let r = recognize_rational_root(&p, &rat(3), &rat(4), -80).unwrap();
    assert_eq!(r, ratio(355, 113));
    // An interval holding no rational root of small height yields nothing.
    let q = poly(vec![rat(-7), rat(0), rat(1)]); // sqrt(7) in (2, 3)
    assert!(recognize_rational_root(&q, &rat(2), &rat(3), -80).is_none());
}

#[test]
fn simplest_rational_examples() {
    assert_eq!(simplest_rational_in(&ratio(1, 3), &ratio(1, 2)), ratio(1, 2));
    assert_eq!(simplest_rational_in(&ratio(2, 7), &ratio(3, 7)), ratio(1, 3));
    assert_eq!(simplest_rational_in(&ratio(-1, 2), &ratio(1, 3)), rat(0));
    assert_eq!(
        simplest_rational_in(&ratio(-5, 2), &ratio(-7, 3)),
        ratio(-5, 2)
    );
    assert_eq!(simplest_rational_in(&rat(4), &rat(4)), rat(4));
    assert_eq!(simplest_rational_in(&ratio(3, 2), &rat(17)), rat(2));
}

#[test]
fn root_bound_contains_roots() {
    let roots = vec![rat(-47), ratio(1, 9), rat(31)];
    let p = from_roots(&roots).scale(&ratio(3, 5));
    let m = p.root_bound();
    for r in &roots {
        assert!(r.clone() < m && -m.clone() < r.clone());
    }
}

// ---------------------------------------------------------------------------
// Property tests
// ---------------------------------------------------------------------------

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-30i64..=30, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
}

proptest! {
    #[test]
    fn resolve_inverts_root_products(mut roots in proptest::collection::vec(arb_rat(), 1..=5)) {
        roots.sort();
        roots.dedup();
        let p = from_roots(&roots);
        let resolved = resolve_roots(&p, 64);
        prop_assert_eq!(resolved.len(), roots.len());
        for (r, want) in resolved.iter().zip(&roots) {
            match r {
                ResolvedRoot::Exact(v) => prop_assert_eq!(v, want),
                other => prop_assert!(false, "expected exact root, got {:?}", other),
            }
        }
    }

    #[test]
    fn sturm_total_count_matches_distinct_roots(
        mut roots in proptest::collection::vec(arb_rat(), 1..=6),
    ) {
        roots.sort();
        roots.dedup();
        let p = from_roots(&roots);
        prop_assert_eq!(SturmChain::new(&p).count_all(), roots.len());
    }

    #[test]
    fn simplest_rational_is_in_interval_and_minimal(
        a in arb_rat(),
        w in (1i64..=40, 1i64..=40).prop_map(|(n, d)| ratio(n, d)),
    ) {
        let b = &a + &w;
        let s = simplest_rational_in(&a, &b);
        prop_assert!(a <= s && s <= b);
        // No rational with a smaller denominator fits in [a, b]: scan all
        // candidates p/q with q < denom(s) near the interval.
        let qs: i64 = s.denom().try_into().unwrap();
        for q in 1..qs {
            let lo_num = (&a * rat(q)).ceil();
            let hi_num = (&b * rat(q)).floor();
            prop_assert!(lo_num > hi_num, "denominator {} fits inside", q);
        }
    }

    #[test]
    fn divmod_identity(
        av in proptest::collection::vec(arb_rat(), 1..=6),
        bv in proptest::collection::vec(arb_rat(), 1..=4),
    ) {
        let a = poly(av);
        let b = poly(bv);
        prop_assume!(!b.is_zero());
        let (q, r) = a.divmod(&b);
        prop_assert_eq!(q.mul(&b).add(&r), a);
        if let Some(rd) = r.deg() {
            prop_assert!(rd < b.deg().unwrap());
        }
    }
}
