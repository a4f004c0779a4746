//! Conic-component solvers: the hyperbola `xy = 1` and the two transformed
//! conics, existence plus measure extraction.

use hypmoment::dyadic::Dyadic;
use hypmoment::hyperbola::{
    conic_relation_violations, conic_v_sequence, extract_conic, solve_conic, solve_conic_native,
    ConicBranch,
};
use hypmoment::measure::{plane_residual, RealValue};
use hypmoment::oracle::{conic_point, forward_moments, random_curve_atoms, RatAtom};
use hypmoment::scalar::{rat, ratio, Rat};
use hypmoment::seq::{BivSeq, Curve};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn conic_measure(curve: &Curve, params: &[(Rat, Rat)], k: usize) -> (Vec<RatAtom>, BivSeq<Rat>) {
    let atoms: Vec<RatAtom> = params
        .iter()
        .map(|(r, w)| {
            let (x, y) = conic_point(curve, r);
            RatAtom { x, y, weight: w.clone() }
        })
        .collect();
    let seq = forward_moments(&atoms, k);
    (atoms, seq)
}

fn assert_exact_recovery(mu: &hypmoment::measure::PlaneMeasure, atoms: &[RatAtom]) {
    assert_eq!(mu.len(), atoms.len());
    for atom in atoms {
        let hit = mu.atoms.iter().find(|a| {
            a.x == RealValue::Rational(atom.x.clone()) && a.y == RealValue::Rational(atom.y.clone())
        });
        let hit = hit.unwrap_or_else(|| panic!("atom ({}, {}) not recovered", atom.x, atom.y));
        assert_eq!(hit.weight, RealValue::Rational(atom.weight.clone()));
    }
}

fn small(d: &Dyadic, log2_tol: i64) -> bool {
    d.abs().cmp(&Dyadic::new(BigInt::from(1), log2_tol)) != std::cmp::Ordering::Greater
}

#[test]
fn hyperbola_flat_two_atoms() {
    let (atoms, seq) = conic_measure(
        &Curve::Hyp1,
        &[(rat(2), rat(1)), (rat(-1), rat(3))],
        3,
    );
    let rep = solve_conic(&seq, &Curve::Hyp1);
    assert!(rep.representable);
    assert_eq!(rep.rank, 2);
    assert_eq!(rep.branch, ConicBranch::TripleFlat);
    let mu = extract_conic(&seq, &Curve::Hyp1, 128).unwrap();
    assert_exact_recovery(&mu, &atoms);
}

#[test]
fn hyperbola_flat_recovers_four_rational_atoms() {
    let (atoms, seq) = conic_measure(
        &Curve::Hyp1,
        &[
            (ratio(-5, 2), ratio(1, 3)),
            (ratio(-1, 3), rat(2)),
            (ratio(1, 2), rat(1)),
            (rat(3), ratio(7, 4)),
        ],
        3,
    );
    let rep = solve_conic(&seq, &Curve::Hyp1);
    assert!(rep.representable);
    assert_eq!(rep.rank, 4);
    assert_eq!(rep.branch, ConicBranch::TripleFlat);
    let mu = extract_conic(&seq, &Curve::Hyp1, 128).unwrap();
    assert_exact_recovery(&mu, &atoms);
}

#[test]
fn hyperbola_full_rank_goes_through_extension() {
    // 2k+1 = 7 atoms make the power-moment Hankel matrix positive definite.
    let params: Vec<(Rat, Rat)> = [
        ratio(-3, 1),
        ratio(-3, 2),
        ratio(-2, 3),
        ratio(1, 3),
        ratio(1, 1),
        ratio(2, 1),
        ratio(7, 2),
    ]
    .into_iter()
    .map(|r| (r, rat(1)))
    .collect();
    let (_, seq) = conic_measure(&Curve::Hyp1, &params, 3);
    let rep = solve_conic(&seq, &Curve::Hyp1);
    assert!(rep.representable);
    assert_eq!(rep.rank, 7);
    assert_eq!(rep.branch, ConicBranch::BasisPd);
    let mu = extract_conic(&seq, &Curve::Hyp1, 192).unwrap();
    assert_eq!(mu.len(), 7);
    assert!(small(&plane_residual(&mu, &seq, 192), -90));
    // Every constructed atom satisfies xy = 1 to working precision, with
    // positive weight.
    for atom in &mu.atoms {
        let prod = atom.x.to_dyadic(220).mul(&atom.y.to_dyadic(220));
        assert!(small(&prod.sub(&Dyadic::new(BigInt::from(1), 0)), -90));
        assert!(atom.weight.sgn() > 0);
    }
}

#[test]
fn transformed_conic_recovers_atoms() {
    // x + y + axy = 0 with a = 3/2, then ay + x² − y² = 0 with a = 2.
    let hyp2 = Curve::Hyp2 { a: ratio(3, 2) };
    let (atoms, seq) =
        conic_measure(&hyp2, &[(rat(2), rat(1)), (ratio(-1, 2), rat(2)), (rat(3), ratio(1, 2))], 3);
    let rep = solve_conic(&seq, &hyp2);
    assert!(rep.representable);
    assert_eq!(rep.rank, 3);
    let mu = extract_conic(&seq, &hyp2, 128).unwrap();
    assert_exact_recovery(&mu, &atoms);

    let hyp3 = Curve::Hyp3 { a: rat(2) };
    let (atoms, seq) = conic_measure(
        &hyp3,
        &[(rat(2), rat(1)), (ratio(-1, 2), rat(2)), (rat(3), ratio(1, 2)), (ratio(-4, 3), rat(1))],
        3,
    );
    let rep = solve_conic(&seq, &hyp3);
    assert!(rep.representable);
    assert_eq!(rep.rank, 4);
    let mu = extract_conic(&seq, &hyp3, 128).unwrap();
    assert_exact_recovery(&mu, &atoms);
}

#[test]
fn canonical_perturbed_hyperbola_parametrization() {
    // On x + y − xy = 0 the second coordinate is x/(x−1); checking the
    // published parametrization against the transform-based oracle points.
    let curve = Curve::Hyp2 { a: rat(-1) };
    for r in [rat(2), ratio(-1, 2), ratio(5, 3)] {
        let (x, y) = conic_point(&curve, &r);
        assert_eq!(y, x.clone() / (x.clone() - rat(1)));
    }
    let (atoms, seq) = conic_measure(&curve, &[(rat(2), rat(1)), (ratio(-3, 2), rat(1))], 3);
    let mu = extract_conic(&seq, &curve, 128).unwrap();
    assert_exact_recovery(&mu, &atoms);
}

#[test]
fn relation_violated_entry_is_reported() {
    let (_, mut seq) = conic_measure(&Curve::Hyp1, &[(rat(2), rat(1))], 3);
    // Bump β_{1,1}, breaking β_{1,1} = β_{0,0}.
    let bumped = BivSeq::from_fn(3, |i, j| {
        let v = seq.get(i, j).clone();
        if (i, j) == (1, 1) {
            v + rat(1)
        } else {
            v
        }
    });
    seq = bumped;
    let rep = solve_conic(&seq, &Curve::Hyp1);
    assert!(!rep.representable);
    assert_eq!(rep.branch, ConicBranch::RelationsFail);
    assert!(rep.violations.contains(&(0, 0)));
    assert!(!conic_relation_violations(&seq, &Curve::Hyp1).is_empty());
}

#[test]
fn negative_mass_is_not_psd() {
    let seq = BivSeq::from_fn(3, |_, _| rat(-2));
    let rep = solve_conic(&seq, &Curve::Hyp1);
    assert!(!rep.representable);
    assert_eq!(rep.branch, ConicBranch::NotPsd);
}

#[test]
fn zero_sequence_is_trivially_representable() {
    let seq = BivSeq::from_fn(3, |_, _| rat(0));
    let rep = solve_conic(&seq, &Curve::Hyp1);
    assert!(rep.representable);
    assert_eq!(rep.rank, 0);
    let mu = extract_conic(&seq, &Curve::Hyp1, 128).unwrap();
    assert!(mu.is_empty());
}

#[test]
fn power_moment_sequence_layout() {
    // Mass 4 at (2, 1/2) with k = 1: the Hankel sequence must read off the
    // antidiagonal moments from β_{0,2} down to β_{2,0}.
    let atom = RatAtom { x: rat(2), y: ratio(1, 2), weight: rat(4) };
    let seq = forward_moments(&[atom], 1);
    let v = conic_v_sequence(&seq);
    let expected = [rat(1), rat(2), rat(4), rat(8), rat(16)];
    assert_eq!(v.entries(), &expected[..]);
}

#[test]
fn rank_deficient_but_not_flat_is_rejected() {
    // A measure with an atom at the origin of the v-chain: power moments of
    // the mass at (0, y) do not exist on xy = 1, so emulate the failing shape
    // directly by a rank jump in the Hankel sequence: γ = moments of the
    // line measure δ_0 embedded oddly. Simplest concrete case: take the
    // two-atom flat sequence and zero out a tail entry to break flatness.
    let (_, seq) = conic_measure(&Curve::Hyp1, &[(rat(2), rat(1)), (rat(-1), rat(1))], 3);
    let broken = BivSeq::from_fn(3, |i, j| {
        if (i, j) == (6, 0) {
            rat(0)
        } else {
            seq.get(i, j).clone()
        }
    });
    let rep = solve_conic(&broken, &Curve::Hyp1);
    assert!(!rep.representable);
    // Either psd fails outright or a rank condition does; both reject.
    assert!(matches!(rep.branch, ConicBranch::NotPsd | ConicBranch::RankMismatch));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    // The matrix-restriction test and the Hankel-sequence reduction are two
    // phrasings of one theorem; they must agree verdict for verdict.
    #[test]
    fn native_conditions_agree_with_reduction(seed in 0u64..1u64 << 48, tag in 0u8..3, n in 1usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = hypmoment::oracle::random_curve(&mut rng, tag);
        let atoms = random_curve_atoms(&mut rng, &curve, 0, n, 30);
        let seq = forward_moments(&atoms, 3);
        let red = solve_conic(&seq, &curve);
        let nat = solve_conic_native(&seq, &curve);
        prop_assert_eq!(red.representable, nat.representable);
        prop_assert_eq!(red.branch, nat.branch);
        prop_assert_eq!(red.rank, nat.rank);
        prop_assert!(red.representable);
        prop_assert_eq!(red.rank, n.min(7));
    }

    // Round trip: conic measures come back with matching atoms (flat case)
    // or at least matching moments (full-rank case).
    #[test]
    fn conic_round_trip(seed in 0u64..1u64 << 48, tag in 0u8..3, n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = hypmoment::oracle::random_curve(&mut rng, tag);
        let atoms = random_curve_atoms(&mut rng, &curve, 0, n, 30);
        let seq = forward_moments(&atoms, 3);
        let mu = extract_conic(&seq, &curve, 160).unwrap();
        prop_assert_eq!(mu.len(), n);
        if n < 7 {
            assert_exact_recovery(&mu, &atoms);
        }
        prop_assert!(small(&plane_residual(&mu, &seq, 160), -75));
    }

    // Forward moments of conic atoms always satisfy the entry recurrences.
    #[test]
    fn oracle_measures_pass_relations(seed in 0u64..1u64 << 48, tag in 0u8..3, n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = hypmoment::oracle::random_curve(&mut rng, tag);
        let atoms = random_curve_atoms(&mut rng, &curve, 0, n, 30);
        let seq = forward_moments(&atoms, 3);
        prop_assert!(conic_relation_violations(&seq, &curve).is_empty());
    }
}
