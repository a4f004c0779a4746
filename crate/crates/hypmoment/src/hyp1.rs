//! Existence, minimal cardinality, and construction of representing
//! measures on the curve `y(1 - xy) = 0`.
//!
//! The column span of the moment matrix is carried by the monomials
//! `Y^k, …, Y, YX, …, YX^{k-1}, 1, X, …, X^k`.  Bordering their restriction
//! with the relations-reduced column `YX^k` produces a second matrix whose
//! positivity, together with two one-dimensional sequences built from a
//! completion parameter pair `(t, u)`, decides representability outright.

use crate::decompose::DecomposeError;
use crate::hamburger::{
    extract_line_measure, solve_hamburger, solve_strong, ExtractError, UniSeq,
};
use crate::hyperbola::extract_xy1_from_v;
use crate::linalg::{dot, is_pd, is_psd, pinv, rank, Mat};
use crate::measure::{plane_residual, residual_ok, PlaneMeasure};
use crate::scalar::{QuadExt, Rat, Scalar};
use crate::seq::{BivSeq, Curve};

/// All exact intermediates of the `y(1 - xy)` solver.
#[derive(Clone, Debug)]
pub struct Type1Workspace<T: Scalar> {
    /// Half-degree of the input sequence.
    pub k: usize,
    /// Restriction of the moment matrix to the spanning monomials, size `3k`.
    pub mhat_t: Mat<T>,
    /// The spanning restriction with its last column replaced by the
    /// relations-reduced column `YX^k`, size `3k`.
    pub n: Mat<T>,
    /// Shared leading block of both matrices, size `3k - 1`.
    pub r: Mat<T>,
    /// Final column of the spanning restriction over the leading block.
    pub m12: Vec<T>,
    /// The reduced `YX^k` column over the leading block.
    pub n12: Vec<T>,
    /// Pieces of `n12`: over the `Y`-rows, the `YX`-rows, the `X`-rows.
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
    /// Hankel block of the differenced line sequence, size `k`.
    pub f1: Mat<T>,
    /// Conic block over `(Y^k, …, Y, YX, …, YX^k)`, size `2k`.
    pub f2: Mat<T>,
    /// Tail of the reduced mixed moments `(β_{k+1,1}, …, β_{2k-1,1})`.
    pub b_prime: Vec<T>,
    /// Right-hand sides of the two corner quadratic forms.
    pub w1: Vec<T>,
    pub w2: Vec<T>,
    /// The forced off-corner completion entry.
    pub t_prime: T,
    /// Largest feasible line corner.
    pub u_prime: T,
    /// Smallest feasible conic corner.
    pub u_dprime: T,
    seq: BivSeq<T>,
}

/// Which clause of the existence theorem settled the decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Type1Branch {
    /// Both the spanning restriction and its bordered companion are
    /// positive definite.
    BothPd,
    /// Some corner candidate makes the line sequence representable and the
    /// conic sequence representable away from zero.
    Witness,
}

/// Which requirement failed on a NO decision.
#[derive(Clone, Debug, PartialEq)]
pub enum Type1Failure {
    RelationsViolated(Vec<(usize, usize)>),
    MomentMatrixNotPsd,
    BorderedMatrixNotPsd,
    NoWitness,
}

/// Outcome of the existence decision for `y(1 - xy) = 0`.
#[derive(Clone, Debug)]
pub struct Type1Report<T: Scalar> {
    pub exists: bool,
    pub branch: Option<Type1Branch>,
    /// The completion pair `(t', u*)` when a witness clause applies.
    pub witness: Option<(T, T)>,
    pub minimal_atoms: Option<usize>,
    pub failure: Option<Type1Failure>,
    pub rank_m: usize,
    pub rank_n: usize,
}

/// Spanning monomials: `Y^k, …, Y`, then `YX, …, YX^{k-1}`, then `1, …, X^k`.
fn spanning_monos(k: usize) -> Vec<(usize, usize)> {
    let mut t: Vec<(usize, usize)> = (1..=k).rev().map(|j| (0, j)).collect();
    t.extend((1..k).map(|i| (i, 1)));
    t.extend((0..=k).map(|i| (i, 0)));
    t
}

/// Quadratic form `v † M v` through an explicit pseudoinverse.
fn pinv_form<T: Scalar>(m: &Mat<T>, v: &[T]) -> T {
    let col = Mat::col_vec(v);
    let prod = pinv(m).matmul(&col);
    dot(&prod, &col)
}

/// Builds every intermediate of the solver.  Requires the curve moment
/// identities and a positive semidefinite moment matrix.
pub fn build_workspace1<T: Scalar>(s: &BivSeq<T>) -> Result<Type1Workspace<T>, DecomposeError> {
    let report = s.check_relations(&Curve::Hyp1);
    if !report.ok {
        return Err(DecomposeError::RelationsViolated(report.violations));
    }
    if !is_psd(&s.moment_matrix()) {
        return Err(DecomposeError::NotPsd);
    }
    let k = s.k();
    let two_k = 2 * k;
    let t_monos = spanning_monos(k);
    let mhat_t = s.restricted(&t_monos, &t_monos);
    let dim = 3 * k;
    let lead: Vec<usize> = (0..dim - 1).collect();
    let r = mhat_t.principal(&lead);
    let m12: Vec<T> = (0..dim - 1).map(|i| mhat_t[(i, dim - 1)].clone()).collect();

    // The relations-reduced column YX^k: β_{i,j} y x^k ↦ one y-step down.
    let a: Vec<T> = (1..=k).rev().map(|m| s.get(k - m, 1).clone()).collect();
    let b: Vec<T> = (1..k).map(|i| s.get(k + i - 1, 1).clone()).collect();
    let c: Vec<T> = (0..k).map(|i| s.get(k + i, 1).clone()).collect();
    let mut n12 = a.clone();
    n12.extend(b.iter().cloned());
    n12.extend(c.iter().cloned());
    let n = Mat::from_fn(dim, dim, |i, j| {
        if i < dim - 1 && j < dim - 1 {
            r[(i, j)].clone()
        } else if i == dim - 1 && j == dim - 1 {
            s.get(two_k - 1, 1).clone()
        } else if j == dim - 1 {
            n12[i].clone()
        } else {
            n12[j].clone()
        }
    });

    let f1 = Mat::from_fn(k, k, |i, j| {
        s.get(i + j, 0).clone() - s.get(i + j + 1, 1).clone()
    });
    // rows/cols: p < k is Y^{k-p}; p >= k is YX^{p-k+1}
    let f2 = Mat::from_fn(2 * k, 2 * k, |p, q| {
        let (p, q) = (p.min(q), p.max(q));
        if q < k {
            s.get(0, (k - p) + (k - q)).clone()
        } else if p < k {
            s.get(q - k, k - p).clone()
        } else {
            s.get(p + q - 2 * k + 1, 1).clone()
        }
    });

    let t_prime = dot(&pinv(&r).matmul(&Mat::col_vec(&m12)), &Mat::col_vec(&n12));
    let b_prime: Vec<T> = (k + 1..=two_k - 1).map(|i| s.get(i, 1).clone()).collect();
    let mut w1: Vec<T> = (k..=two_k - 2)
        .map(|i| s.get(i, 0).clone() - s.get(i + 1, 1).clone())
        .collect();
    w1.push(s.get(two_k - 1, 0).clone() - t_prime.clone());
    let mut w2: Vec<T> = (1..=two_k - 1).map(|i| s.get(i, 1).clone()).collect();
    w2.push(t_prime.clone());
    let u_prime = s.get(two_k, 0).clone() - pinv_form(&f1, &w1);
    let u_dprime = pinv_form(&f2, &w2);

    Ok(Type1Workspace {
        k,
        mhat_t,
        n,
        r,
        m12,
        n12,
        a,
        b,
        c,
        f1,
        f2,
        b_prime,
        w1,
        w2,
        t_prime,
        u_prime,
        u_dprime,
        seq: s.clone(),
    })
}

impl<T: Scalar> Type1Workspace<T> {
    /// The line sequence at corner pair `(t, u)`: differenced pure powers.
    pub fn gamma1<S: Scalar>(&self, t: &S, u: &S) -> UniSeq<S> {
        let two_k = 2 * self.k;
        let mut e: Vec<S> = (0..=two_k - 2)
            .map(|i| {
                S::from_rat(
                    (self.seq.get(i, 0).clone() - self.seq.get(i + 1, 1).clone())
                        .as_rat()
                        .expect("rational moments"),
                )
            })
            .collect();
        e.push(
            S::from_rat(self.seq.get(two_k - 1, 0).as_rat().expect("rational moments"))
                - t.clone(),
        );
        e.push(S::from_rat(self.seq.get(two_k, 0).as_rat().expect("rational moments")) - u.clone());
        UniSeq::new(e)
    }

    /// The conic sequence at corner pair `(t, u)`, indexed from `x^{-2k}`
    /// up to `x^{2k}` on the hyperbola `xy = 1`.
    pub fn gamma2<S: Scalar>(&self, t: &S, u: &S) -> UniSeq<S> {
        let two_k = 2 * self.k;
        let grab = |i: usize, j: usize| {
            S::from_rat(self.seq.get(i, j).as_rat().expect("rational moments"))
        };
        let mut e: Vec<S> = (1..=two_k).rev().map(|j| grab(0, j)).collect();
        e.extend((1..=two_k - 1).map(|i| grab(i, 1)));
        e.push(t.clone());
        e.push(u.clone());
        UniSeq::new(e)
    }
}

/// Decides whether the sequence has a representing measure on
/// `y(1 - xy) = 0` and reports the minimal atom count when it does.
pub fn decide_type1<T: Scalar>(s: &BivSeq<T>) -> Type1Report<T> {
    let rank_m = rank(&s.moment_matrix());
    let fail = |failure: Type1Failure, rank_n: usize| Type1Report {
        exists: false,
        branch: None,
        witness: None,
        minimal_atoms: None,
        failure: Some(failure),
        rank_m,
        rank_n,
    };
    let ws = match build_workspace1(s) {
        Ok(ws) => ws,
        Err(DecomposeError::RelationsViolated(v)) => {
            return fail(Type1Failure::RelationsViolated(v), 0)
        }
        Err(DecomposeError::NotPsd) => return fail(Type1Failure::MomentMatrixNotPsd, 0),
    };
    let rank_n = rank(&ws.n);
    if !is_psd(&ws.n) {
        return fail(Type1Failure::BorderedMatrixNotPsd, rank_n);
    }
    let minimal = if rank_n <= rank_m { rank_m } else { rank_m + 1 };
    if is_pd(&ws.mhat_t) && is_pd(&ws.n) {
        return Type1Report {
            exists: true,
            branch: Some(Type1Branch::BothPd),
            witness: None,
            minimal_atoms: Some(minimal),
            failure: None,
            rank_m,
            rank_n,
        };
    }
    let mut candidates = vec![ws.u_dprime.clone()];
    if ws.u_prime != ws.u_dprime {
        candidates.push(ws.u_prime.clone());
    }
    for u in candidates {
        let line_ok = solve_hamburger(&ws.gamma1(&ws.t_prime, &u)).representable;
        let conic_ok = solve_strong(&ws.gamma2(&ws.t_prime, &u)).representable;
        if line_ok && conic_ok {
            return Type1Report {
                exists: true,
                branch: Some(Type1Branch::Witness),
                witness: Some((ws.t_prime.clone(), u)),
                minimal_atoms: Some(minimal),
                failure: None,
                rank_m,
                rank_n,
            };
        }
    }
    fail(Type1Failure::NoWitness, rank_n)
}

/// Minimal number of atoms of any representing measure; the input must be
/// representable.
pub fn minimal_atoms_type1<T: Scalar>(s: &BivSeq<T>) -> Result<usize, ExtractError> {
    decide_type1(s).minimal_atoms.ok_or(ExtractError::NotRepresentable)
}

fn assemble_type1(
    line: &UniSeq<QuadExt>,
    conic: &UniSeq<QuadExt>,
    s: &BivSeq<Rat>,
    prec: u64,
) -> Result<PlaneMeasure, ExtractError> {
    let line_measure = extract_line_measure(line, false, prec)?;
    let conic_measure = extract_xy1_from_v(conic, prec)?;
    let total = line_measure.embed_at_y0().merge(conic_measure, prec);
    let residual = plane_residual(&total, s, prec);
    if !residual_ok(&residual, prec) {
        return Err(ExtractError::ResidualExceeded);
    }
    Ok(total)
}

/// Constructs a minimal representing measure on `y(1 - xy) = 0` with line
/// atoms embedded at `y = 0` and conic atoms `(r, 1/r)`.
pub fn construct_measure_type1(s: &BivSeq<Rat>, prec: u64) -> Result<PlaneMeasure, ExtractError> {
    let report = decide_type1(s);
    if !report.exists {
        return Err(ExtractError::NotRepresentable);
    }
    let ws = build_workspace1(s).expect("decide validated preconditions");
    match report.branch.expect("existing measure has a branch") {
        Type1Branch::BothPd => {
            // The missing corner pair: complete the bordered block to the
            // psd interval endpoints, then pick the endpoint whose conic
            // sequence stays away from zero.
            let delta2 = s.get(2 * ws.k, 0).clone() - pinv_form(&ws.r, &ws.m12);
            let delta3 = s.get(2 * ws.k - 1, 1).clone() - pinv_form(&ws.r, &ws.n12);
            let root = QuadExt::sqrt_rat(&(delta2 * delta3));
            let f2_pinv: Mat<QuadExt> = pinv(&ws.f2).map_scalar();
            let mut last_err = ExtractError::NotRepresentable;
            for sign in [-1i64, 1] {
                let t = QuadExt::from_rat(ws.t_prime.clone())
                    + root.clone() * QuadExt::from_int(sign);
                let w2: Vec<QuadExt> = ws
                    .w2
                    .iter()
                    .take(2 * ws.k - 1)
                    .map(|v| QuadExt::from_rat(v.clone()))
                    .chain(std::iter::once(t.clone()))
                    .collect();
                let col = Mat::col_vec(&w2);
                let u = dot(&f2_pinv.matmul(&col), &col);
                let gamma2 = ws.gamma2(&t, &u);
                if !solve_strong(&gamma2).representable {
                    continue;
                }
                match assemble_type1(&ws.gamma1(&t, &u), &gamma2, s, prec) {
                    Ok(m) => return Ok(m),
                    Err(e) => last_err = e,
                }
            }
            Err(last_err)
        }
        Type1Branch::Witness => {
            let (t, u) = report.witness.expect("witness branch carries the pair");
            let t = QuadExt::from_rat(t.as_rat().expect("rational witness"));
            let u = QuadExt::from_rat(u.as_rat().expect("rational witness"));
            assemble_type1(&ws.gamma1(&t, &u), &ws.gamma2(&t, &u), s, prec)
        }
    }
}
