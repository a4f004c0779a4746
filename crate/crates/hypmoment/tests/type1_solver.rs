//! Solver for measures on `y(1 - xy) = 0`: workspace scalars, existence,
//! minimal atom counts, and constructed measures.

mod common;

use common::worked_hyp1_sequence;
use hypmoment::hamburger::UniSeq;
use hypmoment::hyp1::{
    build_workspace1, construct_measure_type1, decide_type1, minimal_atoms_type1, Type1Branch,
    Type1Failure,
};
use hypmoment::linalg::{is_psd, rank};
use hypmoment::measure::{plane_residual, residual_ok, RealValue};
use hypmoment::oracle::{forward_moments, random_curve_atoms, RatAtom};
use hypmoment::scalar::{parse_rat, rat, ratio, Rat};
use hypmoment::seq::{BivSeq, Curve};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dirac(x: i64, y: i64, w: (i64, i64)) -> RatAtom {
    RatAtom { x: rat(x), y: rat(y), weight: ratio(w.0, w.1) }
}

#[test]
fn point_mass_at_origin() {
    let seq = forward_moments(&[dirac(0, 0, (1, 1))], 3);
    let ws = build_workspace1(&seq).unwrap();
    assert!(ws.t_prime.is_zero());
    assert!(ws.u_prime.is_zero());
    assert!(ws.u_dprime.is_zero());
    let report = decide_type1(&seq);
    assert!(report.exists);
    assert_eq!(report.minimal_atoms, Some(1));
    let mu = construct_measure_type1(&seq, 128).unwrap();
    assert_eq!(mu.len(), 1);
    assert_eq!(mu.atoms[0].x, RealValue::Rational(rat(0)));
    assert_eq!(mu.atoms[0].y, RealValue::Rational(rat(0)));
    assert_eq!(mu.atoms[0].weight, RealValue::Rational(rat(1)));
}

#[test]
fn worked_sequence_corner_scalars() {
    let (seq, _) = worked_hyp1_sequence();
    let ws = build_workspace1(&seq).unwrap();
    assert!(ws.t_prime.is_zero());
    assert_eq!(ws.u_prime, parse_rat("659/40").unwrap());
    assert_eq!(ws.u_dprime, parse_rat("65/4").unwrap());
}

#[test]
fn worked_sequence_is_not_representable() {
    let (seq, _) = worked_hyp1_sequence();
    let report = decide_type1(&seq);
    assert!(!report.exists);
    assert_eq!(report.failure, Some(Type1Failure::NoWitness));
    assert!(minimal_atoms_type1(&seq).is_err());
    assert!(construct_measure_type1(&seq, 128).is_err());
}

#[test]
fn worked_sequence_conic_parts_fail_strongly() {
    // Both corner candidates leave the conic sequence with a rank profile
    // that no measure away from zero can match.
    let (seq, _) = worked_hyp1_sequence();
    let ws = build_workspace1(&seq).unwrap();
    let g_low: UniSeq<Rat> = ws.gamma2(&ws.t_prime, &ws.u_dprime);
    let g_high: UniSeq<Rat> = ws.gamma2(&ws.t_prime, &ws.u_prime);
    assert_eq!(rank(&g_low.hankel()), 5);
    assert_eq!(rank(&g_high.hankel()), 6);
    assert!(!hypmoment::hamburger::solve_strong(&g_low).representable);
    assert!(!hypmoment::hamburger::solve_strong(&g_high).representable);
    // while both line sequences are fine on their own
    let l_low: UniSeq<Rat> = ws.gamma1(&ws.t_prime, &ws.u_dprime);
    let l_high: UniSeq<Rat> = ws.gamma1(&ws.t_prime, &ws.u_prime);
    assert!(hypmoment::hamburger::solve_hamburger(&l_low).representable);
    assert!(hypmoment::hamburger::solve_hamburger(&l_high).representable);
}

#[test]
fn two_conic_atoms() {
    let atoms = vec![dirac(1, 1, (1, 1)), RatAtom { x: rat(2), y: ratio(1, 2), weight: rat(1) }];
    let seq = forward_moments(&atoms, 3);
    let report = decide_type1(&seq);
    assert!(report.exists);
    assert_eq!(report.minimal_atoms, Some(2));
    assert_eq!(report.rank_m, 2);
    let mu = construct_measure_type1(&seq, 128).unwrap();
    assert_eq!(mu.len(), 2);
    for atom in &atoms {
        assert!(mu.atoms.iter().any(|a| {
            a.x == RealValue::Rational(atom.x.clone())
                && a.y == RealValue::Rational(atom.y.clone())
                && a.weight == RealValue::Rational(atom.weight.clone())
        }));
    }
}

#[test]
fn mixed_line_and_conic_pair() {
    let atoms = vec![dirac(1, 1, (1, 1)), dirac(3, 0, (2, 1))];
    let seq = forward_moments(&atoms, 3);
    let report = decide_type1(&seq);
    assert!(report.exists);
    let mu = construct_measure_type1(&seq, 128).unwrap();
    assert_eq!(mu.len(), 2);
    for atom in &atoms {
        assert!(mu.atoms.iter().any(|a| {
            a.x == RealValue::Rational(atom.x.clone())
                && a.y == RealValue::Rational(atom.y.clone())
                && a.weight == RealValue::Rational(atom.weight.clone())
        }));
    }
}

#[test]
fn generic_full_rank_instance() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let atoms = random_curve_atoms(&mut rng, &Curve::Hyp1, 3, 6, 20);
    let seq = forward_moments(&atoms, 3);
    let report = decide_type1(&seq);
    assert!(report.exists);
    assert_eq!(report.branch, Some(Type1Branch::BothPd));
    assert_eq!(report.rank_m, 9);
    assert_eq!(report.rank_n, 9);
    assert_eq!(report.minimal_atoms, Some(9));
    let mu = construct_measure_type1(&seq, 256).unwrap();
    assert_eq!(mu.len(), 9);
    let residual = plane_residual(&mu, &seq, 256);
    assert!(residual_ok(&residual, 256));
}

#[test]
fn relation_failure_is_certified() {
    let seq = BivSeq::from_fn(3, |i, j| if (i, j) == (1, 1) { rat(1) } else { rat(0) });
    let report = decide_type1(&seq);
    assert!(!report.exists);
    assert!(matches!(report.failure, Some(Type1Failure::RelationsViolated(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn corner_bounds_are_ordered(seed in any::<u64>(), n_line in 0usize..4, n_conic in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = random_curve_atoms(&mut rng, &Curve::Hyp1, n_line, n_conic, 20);
        let seq = forward_moments(&atoms, 3);
        let ws = build_workspace1(&seq).unwrap();
        prop_assert!(ws.u_dprime <= ws.u_prime);
    }

    #[test]
    fn bordered_rank_splits(seed in any::<u64>(), n_line in 0usize..4, n_conic in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = random_curve_atoms(&mut rng, &Curve::Hyp1, n_line, n_conic, 20);
        let seq = forward_moments(&atoms, 3);
        let ws = build_workspace1(&seq).unwrap();
        if is_psd(&ws.n) {
            prop_assert_eq!(rank(&ws.n), rank(&ws.f1) + rank(&ws.f2));
        }
    }

    #[test]
    fn round_trip_is_minimal(seed in any::<u64>(), n_line in 0usize..4, n_conic in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = random_curve_atoms(&mut rng, &Curve::Hyp1, n_line, n_conic, 20);
        let seq = forward_moments(&atoms, 3);
        let report = decide_type1(&seq);
        prop_assert!(report.exists);
        let minimal = report.minimal_atoms.unwrap();
        prop_assert!(minimal >= report.rank_m);
        prop_assert!(minimal <= report.rank_m + 1);
        let mu = construct_measure_type1(&seq, 192).unwrap();
        prop_assert_eq!(mu.len(), minimal);
        let residual = plane_residual(&mu, &seq, 192);
        prop_assert!(residual_ok(&residual, 192));
    }
}
