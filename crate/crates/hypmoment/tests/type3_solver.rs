mod common;

use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hypmoment::hyp2::HypStatus;
use hypmoment::hyp3::{
    boundary_roots, build_workspace3, construct_measure_type3, decide_type3, hyp_tilde_status,
    minimal_atoms_type3, Type3Branch, Type3Failure,
};
use hypmoment::linalg::{is_psd, pinv, rank, Mat};
use hypmoment::measure::{plane_residual, residual_ok, RealValue};
use hypmoment::oracle::{forward_moments, random_curve_atoms, RatAtom};
use hypmoment::scalar::{rat, ratio, QuadExt, Rat, Scalar};
use hypmoment::seq::{BivSeq, Curve};

fn q(r: Rat) -> QuadExt {
    QuadExt::from_rat(r)
}

#[test]
fn point_mass_at_origin() {
    let a = rat(1);
    let s = forward_moments(&[RatAtom { x: rat(0), y: rat(0), weight: rat(1) }], 3);
    let ws = build_workspace3(&s, &a).unwrap();
    assert!(ws.eta.is_zero());
    assert_eq!(ws.t0, rat(1));
    assert!(ws.u0.is_zero());
    assert!(ws.c_ratio.is_zero());

    let rep = decide_type3(&s, &a);
    assert!(rep.exists);
    assert_eq!(rep.branch, Some(Type3Branch::ZeroDefect));
    let (t, u) = rep.witness.clone().unwrap();
    assert_eq!(t.sgn(), 0);
    assert_eq!(u.sgn(), 0);
    assert_eq!(rep.minimal_atoms, Some(1));

    let mu = construct_measure_type3(&s, &a, 128).unwrap();
    assert_eq!(mu.atoms.len(), 1);
    assert_eq!(mu.atoms[0].x, RealValue::Rational(rat(0)));
    assert_eq!(mu.atoms[0].y, RealValue::Rational(rat(0)));
    assert_eq!(mu.atoms[0].weight, RealValue::Rational(rat(1)));
}

#[test]
fn single_conic_atom() {
    // r = 1 on the parametrization of y(2y + x² − y²) = 0 is the point
    // (0, 2).
    let a = rat(2);
    let s = forward_moments(&[RatAtom { x: rat(0), y: rat(2), weight: rat(3) }], 3);
    let rep = decide_type3(&s, &a);
    assert!(rep.exists);
    assert_eq!(rep.minimal_atoms, Some(1));

    let mu = construct_measure_type3(&s, &a, 128).unwrap();
    assert_eq!(mu.atoms.len(), 1);
    assert_eq!(mu.atoms[0].x, RealValue::Rational(rat(0)));
    assert_eq!(mu.atoms[0].y, RealValue::Rational(rat(2)));
    assert_eq!(mu.atoms[0].weight, RealValue::Rational(rat(3)));
}

#[test]
fn boundary_meeting_points() {
    // Two meeting points (1/2, ∓1/√2), the smaller second coordinate
    // first.
    let bp = boundary_roots(&rat(1), &rat(1), &rat(0), &rat(1));
    assert!(!bp.degenerate_line);
    assert_eq!(bp.points.len(), 2);
    let half = q(ratio(1, 2));
    for (t, u) in &bp.points {
        assert_eq!(*t, half);
        assert_eq!(u.clone() * u.clone(), half);
    }
    assert!(bp.points[0].1.is_neg());
    assert!(bp.points[1].1.is_pos());

    // A width-zero line region meets the parabola along u = u₀ only, here
    // at (1, 1).
    let bp = boundary_roots(&rat(1), &rat(2), &rat(1), &rat(0));
    assert!(bp.degenerate_line);
    assert_eq!(bp.points, vec![(q(rat(1)), q(rat(1)))]);

    // A line region too far from the parabola meets it nowhere.
    let bp = boundary_roots(&rat(1), &rat(1), &rat(10), &rat(1));
    assert!(!bp.degenerate_line);
    assert!(bp.points.is_empty());
}

#[test]
fn worked_sequence_solver() {
    let (s, curve) = common::worked_hyp3_sequence();
    let Curve::Hyp3 { a } = &curve else { panic!("wrong curve") };
    let ws = build_workspace3(&s, a).unwrap();
    assert!(ws.eta.is_zero());
    assert_eq!(ws.rank_f_min, 5);
    assert_eq!(ws.rank_h_min, 4);
    let f_min = ws.decomp.f_of(&ws.decomp.a_min);
    assert_eq!(hyp_tilde_status(&f_min, &ws.decomp.order, ws.k), Some(HypStatus::Flat));

    let rep = decide_type3(&s, a);
    assert!(rep.exists);
    assert_eq!(rep.branch, Some(Type3Branch::ZeroDefect));
    assert_eq!(rep.rank_m, 9);
    assert_eq!(rep.minimal_atoms, Some(9));
    let (t, u) = rep.witness.clone().unwrap();
    assert_eq!(t.sgn(), 0);
    assert_eq!(u.sgn(), 0);
    assert_eq!(minimal_atoms_type3(&s, a).unwrap(), 9);
}

#[test]
fn worked_sequence_measure() {
    let (s, curve) = common::worked_hyp3_sequence();
    let Curve::Hyp3 { a } = &curve else { panic!("wrong curve") };
    let mu = construct_measure_type3(&s, a, 256).unwrap();
    assert_eq!(mu.atoms.len(), 9);
    let on_line = mu
        .atoms
        .iter()
        .filter(|at| at.y == RealValue::Rational(rat(0)))
        .count();
    assert_eq!(on_line, 4);
    let residual = plane_residual(&mu, &s, 256);
    assert!(residual_ok(&residual, 256), "residual too large: {:?}", residual);
}

#[test]
fn relation_violation_is_reported() {
    let (s, curve) = common::worked_hyp3_sequence();
    let Curve::Hyp3 { a } = &curve else { panic!("wrong curve") };
    let bad = BivSeq::from_fn(3, |i, j| {
        let v = s.get(i, j).clone();
        if (i, j) == (1, 2) {
            v + rat(1)
        } else {
            v
        }
    });
    let rep = decide_type3(&bad, a);
    assert!(!rep.exists);
    assert!(matches!(rep.failure, Some(Type3Failure::RelationsViolated(_))));
}

#[test]
fn off_curve_mass_is_rejected() {
    // (1, 1) misses y(2y + x² − y²) = 0, so its moments break the curve
    // identities.
    let a = rat(2);
    let mut atoms =
        random_curve_atoms(&mut StdRng::seed_from_u64(7), &Curve::Hyp3 { a: a.clone() }, 1, 1, 50);
    atoms.push(RatAtom { x: rat(1), y: rat(1), weight: rat(1) });
    let s = forward_moments(&atoms, 3);
    let rep = decide_type3(&s, &a);
    assert!(!rep.exists);
}

/// With more conic atoms than the mixed-degree monomials can separate, the
/// minimal completion develops a positive defect and the solver must pass
/// through the boundary meeting points.  Both contact branches are frozen
/// here from seeded searches.
#[test]
fn positive_defect_two_contacts() {
    let mut rng = StdRng::seed_from_u64(9);
    let pool = [-2i64, -1, 1, 2, 3];
    let a = ratio(pool[rng.gen_range(0..pool.len())], rng.gen_range(1..=2));
    let curve = Curve::Hyp3 { a: a.clone() };
    let n_line = rng.gen_range(0..=3usize);
    let n_conic = rng.gen_range(6..=7usize);
    assert_eq!((a.clone(), n_line, n_conic), (rat(2), 3, 7));
    let atoms = random_curve_atoms(&mut rng, &curve, n_line, n_conic, 30);
    let s = forward_moments(&atoms, 3);

    let ws = build_workspace3(&s, &a).unwrap();
    assert!(ws.eta.is_pos());
    assert!(ws.c_ratio.is_pos());
    assert!(ws.h2_pd);

    let rep = decide_type3(&s, &a);
    assert!(rep.exists);
    assert_eq!(rep.branch, Some(Type3Branch::TwoContacts));
    assert_eq!(rep.boundary.as_ref().unwrap().points.len(), 2);
    assert_eq!(rep.rank_m, 9);
    assert_eq!(rep.minimal_atoms, Some(9));

    let mu = construct_measure_type3(&s, &a, 256).unwrap();
    assert_eq!(mu.atoms.len(), 9);
    let residual = plane_residual(&mu, &s, 256);
    assert!(residual_ok(&residual, 256), "residual too large: {:?}", residual);
}

/// A degenerate line region whose single contact sits exactly on the
/// vertex: the line rank collapses there and the minimal count equals the
/// moment matrix rank even though the off-vertex rank test fails.
#[test]
fn positive_defect_contact_on_vertex() {
    let mut rng = StdRng::seed_from_u64(82);
    let pool = [-2i64, -1, 1, 2, 3];
    let a = ratio(pool[rng.gen_range(0..pool.len())], rng.gen_range(1..=2));
    let curve = Curve::Hyp3 { a: a.clone() };
    let n_line = rng.gen_range(0..=3usize);
    let n_conic = rng.gen_range(6..=7usize);
    assert_eq!((a.clone(), n_line, n_conic), (rat(-2), 0, 6));
    let atoms = random_curve_atoms(&mut rng, &curve, n_line, n_conic, 30);
    let s = forward_moments(&atoms, 3);

    let ws = build_workspace3(&s, &a).unwrap();
    assert!(ws.eta.is_pos());
    assert!(ws.c_ratio.is_zero());
    assert_eq!(ws.rank_h_min, ws.rank_h2 + 1);

    let rep = decide_type3(&s, &a);
    assert!(rep.exists);
    assert_eq!(rep.branch, Some(Type3Branch::SingleContact));
    let bp = rep.boundary.as_ref().unwrap();
    assert!(bp.degenerate_line);
    assert_eq!(bp.points.len(), 1);
    // The contact coincides with the vertex (t₀, u₀).
    assert_eq!(bp.points[0].0, q(ws.t0.clone()));
    assert_eq!(bp.points[0].1, q(ws.u0.clone()));
    assert_eq!(rep.rank_m, 6);
    assert_eq!(rep.minimal_atoms, Some(6));

    let mu = construct_measure_type3(&s, &a, 256).unwrap();
    assert_eq!(mu.atoms.len(), 6);
    let residual = plane_residual(&mu, &s, 256);
    assert!(residual_ok(&residual, 256), "residual too large: {:?}", residual);
}

/// Scalar Schur complement of the tail inside a matrix with the tail
/// occupying all but the leading row and column.
fn corner_schur(m: &Mat<Rat>) -> Rat {
    let n = m.rows();
    let tail: Vec<usize> = (1..n).collect();
    let inner = m.principal(&tail);
    let col: Vec<Rat> = (1..n).map(|i| m[(i, 0)].clone()).collect();
    let prod = pinv(&inner).matmul(&Mat::col_vec(&col));
    let mut acc = rat(0);
    for i in 0..col.len() {
        acc += col[i].clone() * prod[(i, 0)].clone();
    }
    m[(0, 0)].clone() - acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn round_trip_recovers_minimal_measures(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let pool = [-2i64, -1, 1, 2];
        let a = ratio(pool[rng.gen_range(0..pool.len())], rng.gen_range(1..=2));
        let curve = Curve::Hyp3 { a: a.clone() };
        let n_line = rng.gen_range(0..=2usize);
        // Small counts stay in the zero-defect branch; seven conic atoms
        // overload the mixed-degree span and force a positive defect.
        let n_conic = if rng.gen_bool(0.3) {
            7
        } else {
            rng.gen_range(if n_line == 0 { 1 } else { 0 }..=2usize)
        };
        let height = if n_conic > 2 { 12 } else { 6 };
        let atoms = random_curve_atoms(&mut rng, &curve, n_line, n_conic, height);
        let s = forward_moments(&atoms, 3);

        let rep = decide_type3(&s, &a);
        prop_assert!(rep.exists, "round trip lost representability: {:?}", rep.failure);
        let minimal = rep.minimal_atoms.unwrap();
        prop_assert!(minimal >= rep.rank_m);
        prop_assert!(minimal <= rep.rank_m + 2);
        prop_assert!(minimal <= atoms.len());

        let mu = construct_measure_type3(&s, &a, 192).unwrap();
        prop_assert_eq!(mu.atoms.len(), minimal);
        let residual = plane_residual(&mu, &s, 192);
        prop_assert!(residual_ok(&residual, 192), "residual too large: {:?}", residual);
    }

    #[test]
    fn feasibility_matches_positivity(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let pool = [-2i64, -1, 1, 2];
        let a = ratio(pool[rng.gen_range(0..pool.len())], 1);
        let curve = Curve::Hyp3 { a: a.clone() };
        let n_line = rng.gen_range(1..=2usize);
        let n_conic = rng.gen_range(1..=2usize);
        let atoms = random_curve_atoms(&mut rng, &curve, n_line, n_conic, 6);
        let s = forward_moments(&atoms, 3);
        let ws = build_workspace3(&s, &a).unwrap();

        let half_t0 = ws.t0.clone() / rat(2);
        let t_grid = [rat(0), half_t0, ws.t0.clone(), ws.t0.clone() + rat(1)];
        let u_grid = [
            rat(0),
            ws.u0.clone(),
            ws.u0.clone() + ratio(1, 2),
            ws.u0.clone() - ratio(1, 2),
            rat(1),
            rat(-1),
        ];
        for t_r in &t_grid {
            for u_r in &u_grid {
                let t = q(t_r.clone());
                let u = q(u_r.clone());
                let feasible = ws.in_regions(&t, &u);
                let f = ws.f_of_g(&t, &u);
                let h = ws.gamma(&t, &u).hankel();
                prop_assert_eq!(
                    feasible,
                    is_psd(&f) && is_psd(&h),
                    "region test disagrees with positivity at t={:?} u={:?}",
                    t_r,
                    u_r
                );
                if feasible {
                    prop_assert_eq!(ws.predicted_count(&t, &u), rank(&f) + rank(&h));
                }
            }
        }
    }

    #[test]
    fn corner_scalars_match_schur_complements(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = ratio([-2i64, -1, 1, 2][rng.gen_range(0..4)], rng.gen_range(1..=2));
        let curve = Curve::Hyp3 { a: a.clone() };
        let n_line = rng.gen_range(0..=2usize);
        let n_conic = rng.gen_range(1..=2usize);
        let atoms = random_curve_atoms(&mut rng, &curve, n_line, n_conic, 6);
        let s = forward_moments(&atoms, 3);
        let ws = build_workspace3(&s, &a).unwrap();

        // t₀ is also the corner Schur complement of the tail inside h1,
        // and c the one inside h2.
        prop_assert_eq!(ws.t0.clone(), corner_schur(&ws.h1));
        prop_assert_eq!(ws.c_ratio.clone(), corner_schur(&ws.h2));

        // The defect never goes negative on sequences with a measure, and
        // the corrected completion differs from the minimal one exactly at
        // the (1, 1) slot.
        prop_assert!(!ws.eta.is_neg());
        let diff = ws.a_hat_min().sub(ws.a_min());
        for i in 0..=ws.k {
            for j in 0..=ws.k {
                let expect = if (i, j) == (1, 1) { ws.eta.clone() } else { rat(0) };
                prop_assert_eq!(diff[(i, j)].clone(), expect);
            }
        }
    }

    #[test]
    fn boundary_points_solve_both_equations(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let eta = ratio(rng.gen_range(1..=6), rng.gen_range(1..=3));
        let t0 = ratio(rng.gen_range(-2..=6), rng.gen_range(1..=3));
        let u0 = ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        let c = ratio(rng.gen_range(0..=4), rng.gen_range(1..=3));
        let bp = boundary_roots(&eta, &t0, &u0, &c);
        prop_assert!(bp.points.len() <= 2);
        prop_assert_eq!(bp.degenerate_line, c.is_zero());
        if bp.points.len() == 2 {
            prop_assert!((bp.points[1].1.clone() - bp.points[0].1.clone()).is_pos());
        }
        for (t, u) in &bp.points {
            // On the conic boundary u² = ηt and on the line boundary
            // (u − u₀)² = (t₀ − t)c, with t ≤ t₀.
            prop_assert_eq!(u.clone() * u.clone(), q(eta.clone()) * t.clone());
            let du = u.clone() - q(u0.clone());
            let dt = q(t0.clone()) - t.clone();
            prop_assert!(!dt.is_neg());
            prop_assert_eq!(du.clone() * du, dt * q(c.clone()));
        }
        // Rational grid probe: any exactly feasible grid pair forces the
        // boundaries to meet.
        if bp.points.is_empty() && !t0.is_neg() {
            let steps = 8i64;
            for i in 0..=steps {
                let t = t0.clone() * ratio(i, steps);
                for j in -steps..=steps {
                    let u = u0.clone() + ratio(j, 2) * ratio(1, steps)
                        * (rat(1) + c.clone() * t0.clone());
                    let in_conic = u.clone() * u.clone() <= eta.clone() * t.clone();
                    let du = u.clone() - u0.clone();
                    let in_line = du.clone() * du <= (t0.clone() - t.clone()) * c.clone();
                    prop_assert!(
                        !(in_conic && in_line),
                        "feasible pair ({}, {}) but no boundary meeting point",
                        t,
                        u
                    );
                }
            }
        }
    }
}
