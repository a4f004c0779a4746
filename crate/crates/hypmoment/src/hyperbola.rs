//! Moment problems on the conic components of the three curves: the
//! hyperbola `xy = 1` solved directly through its Hankel structure, and the
//! conics `x + y + axy = 0` and `ay + x² − y² = 0` by exact affine changes
//! of variables onto `xy = 1`.

use crate::hamburger::{extract_line_measure, solve_strong, ExtractError, StrongBranch, UniSeq};
use crate::measure::{plane_residual, residual_ok, PlaneAtom, PlaneMeasure, RealValue};
use crate::scalar::{rat, ratio, Rat, Scalar};
use crate::seq::{BivSeq, Curve};

/// Which clause of the conic representability test settled the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConicBranch {
    /// The restriction of the moment matrix to the doubly-infinite power
    /// basis `{Y^k, …, Y, 1, X, …, X^k}` is positive definite.
    BasisPd,
    /// That restriction is singular but flat against both its truncations.
    TripleFlat,
    /// The moment data is not positive semidefinite.
    NotPsd,
    /// Psd, but a rank gap separates the basis restriction from a truncation.
    RankMismatch,
    /// The entry recurrences forced by the conic fail.
    RelationsFail,
}

/// Existence verdict for a representing measure on a conic.
#[derive(Clone, Debug)]
pub struct ConicReport {
    pub representable: bool,
    /// Atom count of a minimal representing measure when one exists.
    pub rank: usize,
    pub branch: ConicBranch,
    /// Indices `(i, j)` where the conic's entry recurrence fails.
    pub violations: Vec<(usize, usize)>,
}

/// Entry recurrences a moment sequence of a measure on the conic must
/// satisfy, checked over all indices of degree at most `2k`.
pub fn conic_relation_violations<T: Scalar>(s: &BivSeq<T>, curve: &Curve) -> Vec<(usize, usize)> {
    let k = s.k();
    let mut bad = Vec::new();
    for i in 0..=2 * k {
        for j in 0..=2 * k {
            if i + j + 2 > 2 * k {
                continue;
            }
            let residue = match curve {
                // xy = 1: β_{i+1,j+1} = β_{i,j}
                Curve::Hyp1 => s.get(i + 1, j + 1).clone() - s.get(i, j).clone(),
                // x + y + axy = 0: β_{i+1,j} + β_{i,j+1} + a β_{i+1,j+1} = 0
                Curve::Hyp2 { a } => {
                    s.get(i + 1, j).clone()
                        + s.get(i, j + 1).clone()
                        + T::from_rat(a.clone()) * s.get(i + 1, j + 1).clone()
                }
                // ay + x² − y² = 0: β_{i,j+2} = β_{i+2,j} + a β_{i,j+1}
                Curve::Hyp3 { a } => {
                    s.get(i, j + 2).clone()
                        - s.get(i + 2, j).clone()
                        - T::from_rat(a.clone()) * s.get(i, j + 1).clone()
                }
            };
            if !residue.is_zero() {
                bad.push((i, j));
            }
        }
    }
    bad
}

/// The Hankel sequence `v = (β_{0,2k}, …, β_{0,1}, β_{0,0}, β_{1,0}, …,
/// β_{2k,0})` carrying the doubly-infinite power moments of a measure on
/// `xy = 1`.
pub fn conic_v_sequence<T: Scalar>(s: &BivSeq<T>) -> UniSeq<T> {
    let k = s.k();
    let mut entries = Vec::with_capacity(4 * k + 1);
    for j in (1..=2 * k).rev() {
        entries.push(s.get(0, j).clone());
    }
    for i in 0..=2 * k {
        entries.push(s.get(i, 0).clone());
    }
    UniSeq::new(entries)
}

/// The affine substitution whose pushforward carries moments on the given
/// conic to moments on `xy = 1`, as the coefficient rows of
/// `(u, v) = (a₁ + b₁x + c₁y, a₂ + b₂x + c₂y)`.
fn to_xy1_map(curve: &Curve) -> Option<[Rat; 6]> {
    match curve {
        Curve::Hyp1 => None,
        // x + y + axy = 0 → (X, Y) = (−ax, −ay) lands on X + Y − XY = 0,
        // then (U, V) = (X − 1, Y − 1) lands on UV = 1.
        Curve::Hyp2 { a } => {
            Some([rat(-1), -a.clone(), rat(0), rat(-1), rat(0), -a.clone()])
        }
        // ay + x² − y² = 0 ⟺ UV = 1 for U = (2/a)(y − x − a/2),
        // V = (2/a)(y + x − a/2).
        Curve::Hyp3 { a } => {
            let two_a = ratio(2, 1) / a.clone();
            Some([rat(-1), -two_a.clone(), two_a.clone(), rat(-1), two_a.clone(), two_a])
        }
    }
}

/// Maps an atom `(u, v)` of the transformed `xy = 1` problem back onto the
/// original conic.
fn pull_back_atom(curve: &Curve, u: &RealValue, v: &RealValue, prec: u64) -> (RealValue, RealValue) {
    match curve {
        Curve::Hyp1 => (u.clone(), v.clone()),
        // x = −(u+1)/a, y = −(v+1)/a.
        Curve::Hyp2 { a } => {
            let neg_inv_a = -(rat(1) / a.clone());
            (
                u.affine(&neg_inv_a, &neg_inv_a, prec),
                v.affine(&neg_inv_a, &neg_inv_a, prec),
            )
        }
        // x = a(v−u)/4, y = a(u+v+2)/4.
        Curve::Hyp3 { a } => {
            let q = a.clone() / rat(4);
            let x = v.sub(u, prec).affine(&q, &rat(0), prec);
            let y = u.add(v, prec).affine(&q, &(q.clone() + q.clone()), prec);
            (x, y)
        }
    }
}

/// Pushes the moment sequence onto `xy = 1` coordinates when the curve is
/// not already the hyperbola.
fn normalized_sequence<T: Scalar>(s: &BivSeq<T>, curve: &Curve) -> BivSeq<T> {
    match to_xy1_map(curve) {
        None => s.clone(),
        Some(m) => {
            let [a1, b1, c1, a2, b2, c2] = m.map(T::from_rat);
            s.affine_apply(&a1, &b1, &c1, &a2, &b2, &c2)
                .expect("conic normalizations are invertible")
        }
    }
}

/// Decides whether the sequence has a representing measure on the conic
/// component of the curve: the entry recurrences must hold and the Hankel
/// sequence of doubly-infinite power moments must admit a measure supported
/// away from the origin.
pub fn solve_conic<T: Scalar>(s: &BivSeq<T>, curve: &Curve) -> ConicReport {
    let violations = conic_relation_violations(s, curve);
    if !violations.is_empty() {
        return ConicReport {
            representable: false,
            rank: 0,
            branch: ConicBranch::RelationsFail,
            violations,
        };
    }
    let t = normalized_sequence(s, curve);
    let v = conic_v_sequence(&t);
    let rep = solve_strong(&v);
    let branch = match rep.branch {
        StrongBranch::FullPd => ConicBranch::BasisPd,
        StrongBranch::TripleFlat => ConicBranch::TripleFlat,
        StrongBranch::NotPsd => ConicBranch::NotPsd,
        StrongBranch::RankMismatch => ConicBranch::RankMismatch,
    };
    ConicReport { representable: rep.representable, rank: rep.rank, branch, violations: vec![] }
}

/// Builds the representing measure on `xy = 1` for a Hankel sequence of
/// doubly-infinite power moments `v` of degree `4k`: atoms `(r, 1/r)` with
/// weights `ρ r^{2k}`, where `(r, ρ)` is the auxiliary line measure of `v`.
pub fn extract_xy1_from_v<T: Scalar>(v: &UniSeq<T>, prec: u64) -> Result<PlaneMeasure, ExtractError> {
    let half = v.half_degree();
    assert!(half % 2 == 0, "power moments of degree 4k have half-degree 2k");
    let two_k = half;
    let aux = extract_line_measure(v, true, prec)?;
    let atoms = aux
        .atoms
        .iter()
        .map(|a| PlaneAtom {
            x: a.position.clone(),
            y: a.position.inv(prec),
            weight: a.weight.mul(&a.position.pow(two_k, prec), prec),
        })
        .collect();
    Ok(PlaneMeasure { atoms })
}

/// Builds a representing measure on the conic component, with atoms and
/// weights kept exact whenever the auxiliary line atoms are rational.
pub fn extract_conic<T: Scalar>(
    s: &BivSeq<T>,
    curve: &Curve,
    prec: u64,
) -> Result<PlaneMeasure, ExtractError> {
    let t = normalized_sequence(s, curve);
    let v = conic_v_sequence(&t);
    let on_hyperbola = extract_xy1_from_v(&v, prec)?;
    let atoms = on_hyperbola
        .atoms
        .into_iter()
        .map(|a| {
            let (x, y) = pull_back_atom(curve, &a.x, &a.y, prec);
            PlaneAtom { x, y, weight: a.weight }
        })
        .collect();
    let mu = PlaneMeasure { atoms };
    let residual = plane_residual(&mu, s, prec);
    if !residual_ok(&residual, prec) {
        return Err(ExtractError::ResidualExceeded);
    }
    Ok(mu)
}

/// The same existence test phrased directly on restrictions of the bivariate
/// moment matrix, without passing through the Hankel sequence: the basis
/// `{Y^k, …, Y, 1, X, …, X^k}` (with `YX^m` replacing `Y^m` for the conic
/// `ay + x² − y²`) must be positive definite, or the full moment matrix rank
/// must match both one-column truncations of that basis.
pub fn solve_conic_native<T: Scalar>(s: &BivSeq<T>, curve: &Curve) -> ConicReport {
    let violations = conic_relation_violations(s, curve);
    if !violations.is_empty() {
        return ConicReport {
            representable: false,
            rank: 0,
            branch: ConicBranch::RelationsFail,
            violations,
        };
    }
    let k = s.k();
    let m = s.moment_matrix();
    let psd = crate::linalg::is_psd(&m);
    let full_rank = crate::linalg::rank(&m);
    if !psd {
        return ConicReport {
            representable: false,
            rank: full_rank,
            branch: ConicBranch::NotPsd,
            violations: vec![],
        };
    }
    let mut basis: Vec<(usize, usize)> = Vec::new();
    match curve {
        Curve::Hyp1 | Curve::Hyp2 { .. } => {
            for j in (1..=k).rev() {
                basis.push((0, j));
            }
        }
        Curve::Hyp3 { .. } => {
            for i in (1..=k - 1).rev() {
                basis.push((i, 1));
            }
            basis.push((0, 1));
        }
    }
    for i in 0..=k {
        basis.push((i, 0));
    }
    let first = basis[0];
    let last = *basis.last().unwrap();
    let restricted = s.restricted(&basis, &basis);
    if crate::linalg::is_pd(&restricted) {
        return ConicReport {
            representable: true,
            rank: 2 * k + 1,
            branch: ConicBranch::BasisPd,
            violations: vec![],
        };
    }
    let drop = |omit: (usize, usize)| {
        let sub: Vec<_> = basis.iter().copied().filter(|&b| b != omit).collect();
        crate::linalg::rank(&s.restricted(&sub, &sub))
    };
    if drop(first) == full_rank && drop(last) == full_rank {
        return ConicReport {
            representable: true,
            rank: full_rank,
            branch: ConicBranch::TripleFlat,
            violations: vec![],
        };
    }
    ConicReport {
        representable: false,
        rank: full_rank,
        branch: ConicBranch::RankMismatch,
        violations: vec![],
    }
}
