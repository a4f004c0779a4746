//! Existence, minimal cardinality, and construction of representing
//! measures on the curve `y(x + y - xy) = 0`.
//!
//! The reordered moment matrix splits into a conic block function `F` and a
//! line block function `H` once the minimal completion of the monomials
//! `1, X, …, X^k` is corrected at its off-corner entries.  Two free corners
//! `(t, u)` remain; each admissible pair yields a one-dimensional sequence
//! for the line factor and a bivariate sequence supported on the conic
//! `x + y = xy`.  A finite list of extreme corner pairs decides
//! representability outright, and the same pairs drive the construction of
//! a minimal atomic measure.

use num_traits::{Signed, Zero};

use crate::decompose::{build_decomposition, DecomposeError, Decomposition};
use crate::hamburger::{extract_line_measure, solve_hamburger, ExtractError, UniSeq};
use crate::hyperbola::extract_conic;
use crate::linalg::{is_pd, pinv, rank, Mat};
use crate::measure::{plane_residual, residual_ok, PlaneAtom, PlaneMeasure};
use crate::scalar::{rat, QuadExt, Rat, Scalar};
use crate::seq::{BivSeq, Curve};

/// The canonical conic parameter handled by this solver; other parameters
/// are reduced to it by [`normalize_type2`].
fn canonical_curve() -> Curve {
    Curve::Hyp2 { a: rat(-1) }
}

/// Spanning monomials of the conic block: `Y^k, …, Y, 1, X, …, X^k`.
fn spanning_monos(k: usize) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (1..=k).rev().map(|j| (0, j)).collect();
    b.extend((0..=k).map(|i| (i, 0)));
    b
}

/// The spanning monomials with the two extreme columns removed:
/// `Y^k, …, Y, X, …, X^{k-1}`.
fn inner_monos(k: usize) -> Vec<(usize, usize)> {
    let mut t: Vec<(usize, usize)> = (1..=k).rev().map(|j| (0, j)).collect();
    t.extend((1..k).map(|i| (i, 0)));
    t
}

/// Moments of the image of a measure on `y(x + y + a·xy) = 0` under
/// `(x, y) ↦ (−ax, −ay)`, which lives on the canonical curve
/// `y(x + y − xy) = 0`.
pub fn normalize_type2<T: Scalar>(s: &BivSeq<T>, a: &Rat) -> BivSeq<T> {
    assert!(!a.is_zero(), "conic parameter must be nonzero");
    let na = T::from_rat(-a.clone());
    let z = T::zero();
    s.affine_apply(&z, &na, &z, &z, &z, &na)
        .expect("nonzero parameter gives an invertible map")
}

/// Maps an atomic measure on the canonical curve back to the curve with
/// conic factor `x + y + a·xy`, through `(X, Y) ↦ (−X/a, −Y/a)`.
pub fn pull_back_type2(mu: &PlaneMeasure, a: &Rat, prec: u64) -> PlaneMeasure {
    assert!(!a.is_zero(), "conic parameter must be nonzero");
    let scale = -a.recip();
    let shift = rat(0);
    let atoms = mu
        .atoms
        .iter()
        .map(|at| PlaneAtom {
            x: at.x.affine(&scale, &shift, prec),
            y: at.y.affine(&scale, &shift, prec),
            weight: at.weight.clone(),
        })
        .collect();
    PlaneMeasure { atoms }
}

/// All exact intermediates of the canonical `y(x + y − xy)` solver.
#[derive(Clone, Debug)]
pub struct Type2Workspace {
    /// Half-degree of the input sequence.
    pub k: usize,
    /// Block decomposition of the reordered moment matrix, carrying the
    /// minimal completion, its corrected form, and the completion defect.
    pub decomp: Decomposition<Rat>,
    /// Completion defect between the two determined corner neighbours.
    pub eta: Rat,
    /// Middle block of the line matrix at the corrected completion, over
    /// the monomials `X, …, X^{k-1}`.
    pub h22: Mat<Rat>,
    /// Column of the corrected line matrix over the middle block at the
    /// constant monomial.
    pub h12: Vec<Rat>,
    /// The same column at `X^k`.
    pub h23: Vec<Rat>,
    /// Schur complement of the middle block inside the corrected line
    /// matrix, over the two corner slots `{1, X^k}`.
    pub k_corner: Mat<Rat>,
    /// Largest feasible line corner at the constant monomial.
    pub t_max: Rat,
    /// Off-diagonal entry of the corner Schur complement.
    pub k12: Rat,
    /// Largest feasible line corner at `X^k`.
    pub u_max: Rat,
    /// Principal block of the conic matrix at the minimal completion over
    /// `Y^k, …, Y, X, …, X^{k-1}`.
    pub f22: Mat<Rat>,
    /// Middle coefficient `k12² − t_max·u_max − η²` of the corner quadratic.
    pub b_const: Rat,
    /// Rank of the middle line block.
    pub rank_h22: usize,
    /// Rank of the conic matrix at the minimal completion.
    pub rank_f_min: usize,
    /// Rank of the line matrix at the minimal completion.
    pub rank_h_min: usize,
    seq: BivSeq<Rat>,
}

/// Builds every intermediate of the solver.  Requires the curve moment
/// identities of the canonical parameter and a positive semidefinite
/// moment matrix.
pub fn build_workspace2(s: &BivSeq<Rat>) -> Result<Type2Workspace, DecomposeError> {
    let decomp = build_decomposition(s, &canonical_curve())?;
    let k = s.k();
    let eta = decomp.eta.clone();
    let h_hat = decomp.h_of(&decomp.a_hat_min);
    let mid: Vec<usize> = (1..k).collect();
    let ends = [0usize, k];
    let h22 = h_hat.principal(&mid);
    let h12: Vec<Rat> = (1..k).map(|i| h_hat[(i, 0)].clone()).collect();
    let h23: Vec<Rat> = (1..k).map(|i| h_hat[(i, k)].clone()).collect();
    let corner = h_hat.submatrix(&ends, &ends);
    let rect = h_hat.submatrix(&mid, &ends);
    let k_corner = corner.sub(&rect.transpose().matmul(&pinv(&h22)).matmul(&rect));
    let t_max = k_corner[(0, 0)].clone();
    let k12 = k_corner[(0, 1)].clone();
    let u_max = k_corner[(1, 1)].clone();
    let f_min = decomp.f_of(&decomp.a_min);
    let f22 = decomp.restrict(&f_min, &inner_monos(k));
    let h_min = decomp.h_of(&decomp.a_min);
    let rank_h22 = rank(&h22);
    let rank_f_min = rank(&f_min);
    let rank_h_min = rank(&h_min);
    let b_const =
        k12.clone() * k12.clone() - t_max.clone() * u_max.clone() - eta.clone() * eta.clone();
    Ok(Type2Workspace {
        k,
        decomp,
        eta,
        h22,
        h12,
        h23,
        k_corner,
        t_max,
        k12,
        u_max,
        f22,
        b_const,
        rank_h22,
        rank_f_min,
        rank_h_min,
        seq: s.clone(),
    })
}

/// How a completed conic block certifies a measure on the conic: its rank
/// survives both one-column truncations of the spanning basis, or it is
/// positive definite on the spanning basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypStatus {
    /// Rank is unchanged when either extreme column is dropped.
    Flat,
    /// Full rank `2k + 1` on the spanning monomials.
    FullRank,
}

/// Evaluates the conic certificate on a conic block image `f`; the matrix
/// must already be positive semidefinite.  Returns `None` when neither
/// clause holds.
pub fn hyp_status<T: Scalar>(
    f: &Mat<T>,
    order: &[(usize, usize)],
    k: usize,
) -> Option<HypStatus> {
    let b = spanning_monos(k);
    let all: Vec<usize> = b
        .iter()
        .map(|&m| order.iter().position(|&x| x == m).expect("monomial missing"))
        .collect();
    let full = rank(f);
    let r_no_xk = rank(&f.principal(&all[..all.len() - 1]));
    let r_no_yk = rank(&f.principal(&all[1..]));
    if full == r_no_xk && full == r_no_yk {
        return Some(HypStatus::Flat);
    }
    if full == 2 * k + 1 {
        return Some(HypStatus::FullRank);
    }
    None
}

impl Type2Workspace {
    /// The minimal completion of the conic block.
    pub fn a_min(&self) -> &Mat<Rat> {
        &self.decomp.a_min
    }

    /// The corrected minimal completion.
    pub fn a_hat_min(&self) -> &Mat<Rat> {
        &self.decomp.a_hat_min
    }

    /// The line sequence at a corner pair: moments of the part of the
    /// measure supported on `y = 0`.
    pub fn gamma1(&self, t: &QuadExt, u: &QuadExt) -> UniSeq<QuadExt> {
        let k = self.k;
        let s = &self.seq;
        let q = QuadExt::from_rat;
        let mut e = Vec::with_capacity(2 * k + 1);
        e.push(q(s.get(0, 0).clone() - self.a_min()[(0, 0)].clone()) - t.clone());
        for d in 1..2 * k {
            e.push(q(s.get(d, 0).clone() - s.get(d, 1).clone() + s.get(d - 1, 1).clone()));
        }
        e.push(q(s.get(2 * k, 0).clone() - self.a_min()[(k, k)].clone()) - u.clone());
        UniSeq::new(e)
    }

    /// The conic diagonal sequence at a corner pair: the `y`-free moments
    /// of the part of the measure supported on `x + y = xy`.
    pub fn gamma2(&self, t: &QuadExt, u: &QuadExt) -> UniSeq<QuadExt> {
        let k = self.k;
        let s = &self.seq;
        let q = QuadExt::from_rat;
        let mut e = Vec::with_capacity(2 * k + 1);
        e.push(q(self.a_min()[(0, 0)].clone()) + t.clone());
        for d in 1..2 * k {
            e.push(q(s.get(d, 1).clone() - s.get(d - 1, 1).clone()));
        }
        e.push(q(self.a_min()[(k, k)].clone()) + u.clone());
        UniSeq::new(e)
    }

    /// The completed conic block at a corner pair.
    pub fn g_matrix(&self, t: &QuadExt, u: &QuadExt) -> Mat<QuadExt> {
        let k = self.k;
        let mut g: Mat<QuadExt> = self.decomp.a_hat_min.map_scalar();
        g[(0, 0)] = g[(0, 0)].clone() + t.clone();
        g[(k, k)] = g[(k, k)].clone() + u.clone();
        g
    }

    /// The conic image of the whole moment matrix at a corner pair.
    pub fn f_of_g(&self, t: &QuadExt, u: &QuadExt) -> Mat<QuadExt> {
        let g = self.g_matrix(t, u);
        let mut f: Mat<QuadExt> = self.decomp.m_tilde.map_scalar();
        let n = self.k + 1;
        for i in 0..n {
            for j in 0..n {
                f[(i, j)] = g[(i, j)].clone();
            }
        }
        f
    }

    /// The bivariate moments of the conic part at a corner pair: the
    /// original moments of positive `y`-degree with the diagonal sequence
    /// along `y = 0`.
    pub fn conic_sequence(&self, t: &QuadExt, u: &QuadExt) -> BivSeq<QuadExt> {
        let g2 = self.gamma2(t, u);
        BivSeq::from_fn(self.k, |i, j| {
            if j == 0 {
                g2.get(i).clone()
            } else {
                QuadExt::from_rat(self.seq.get(i, j).clone())
            }
        })
    }

    /// Whether a corner pair lies in both feasibility regions, which is
    /// equivalent to simultaneous positive semidefiniteness of the conic
    /// and line images at the pair.
    pub fn in_regions(&self, t: &QuadExt, u: &QuadExt) -> bool {
        if t.is_neg() || u.is_neg() {
            return false;
        }
        let q = QuadExt::from_rat;
        let eta2 = q(self.eta.clone() * self.eta.clone());
        if (t.clone() * u.clone() - eta2).is_neg() {
            return false;
        }
        let dt = q(self.t_max.clone()) - t.clone();
        let du = q(self.u_max.clone()) - u.clone();
        if dt.is_neg() || du.is_neg() {
            return false;
        }
        !(dt * du - q(self.k12.clone() * self.k12.clone())).is_neg()
    }

    /// Atom count of the measure assembled at a feasible corner pair: the
    /// conic rank increases with the distance from the region's vertex, the
    /// line rank with the distance from its boundary.
    pub fn predicted_count(&self, t: &QuadExt, u: &QuadExt) -> usize {
        let q = QuadExt::from_rat;
        let eta2 = q(self.eta.clone() * self.eta.clone());
        let product_gap = (t.clone() * u.clone() - eta2).sgn();
        let inc_f = if product_gap > 0 {
            2
        } else if !self.eta.is_zero() {
            1
        } else if t.sgn() == 0 && u.sgn() == 0 {
            0
        } else {
            1
        };
        let dt = q(self.t_max.clone()) - t.clone();
        let du = q(self.u_max.clone()) - u.clone();
        let corner_flat = self.k12.is_zero() && dt.sgn() == 0 && du.sgn() == 0;
        let on_boundary =
            (dt * du - q(self.k12.clone() * self.k12.clone())).sgn() == 0;
        let inc_h = if corner_flat {
            0
        } else if on_boundary {
            1
        } else {
            2
        };
        self.rank_f_min + inc_f + self.rank_h22 + inc_h
    }
}

/// The finite corner-pair candidate list: the vertex, the axis and corner
/// extremes, the two intersection points of the region boundaries, and the
/// tangency point of the product bound, filtered to the feasible region
/// and deduplicated, in trial order.
pub fn candidate_pairs2(ws: &Type2Workspace) -> Vec<(QuadExt, QuadExt)> {
    let q = QuadExt::from_rat;
    let eta2 = ws.eta.clone() * ws.eta.clone();
    let k12sq = ws.k12.clone() * ws.k12.clone();
    let mut raw: Vec<(QuadExt, QuadExt)> = Vec::new();
    raw.push((QuadExt::zero(), QuadExt::zero()));
    if ws.u_max.is_pos() {
        raw.push((q(eta2.clone() / ws.u_max.clone()), q(ws.u_max.clone())));
    }
    raw.push((q(ws.t_max.clone()), q(ws.u_max.clone())));
    if ws.eta.is_zero() && !ws.k12.is_zero() {
        if ws.u_max.is_pos() {
            raw.push((q(ws.t_max.clone() - k12sq.clone() / ws.u_max.clone()), QuadExt::zero()));
        }
        if ws.t_max.is_pos() {
            raw.push((QuadExt::zero(), q(ws.u_max.clone() - k12sq.clone() / ws.t_max.clone())));
        }
    }
    if !ws.eta.is_zero() && ws.t_max.is_pos() {
        let disc = ws.b_const.clone() * ws.b_const.clone()
            - rat(4) * ws.t_max.clone() * ws.u_max.clone() * eta2.clone();
        if !disc.is_neg() {
            let root = QuadExt::sqrt_rat(&disc);
            let neg_b = q(-ws.b_const.clone());
            let inv_2t = q((rat(2) * ws.t_max.clone()).recip());
            for root_sign in [-1i64, 1] {
                let u = (neg_b.clone() + q(rat(root_sign)) * root.clone()) * inv_2t.clone();
                if u.sgn() != 0 {
                    let t = q(eta2.clone()) * u.inv();
                    raw.push((t, u));
                }
            }
        }
    }
    if ws.t_max.is_pos() && ws.u_max.is_pos() {
        let root = QuadExt::sqrt_rat(&(ws.t_max.clone() * ws.u_max.clone()));
        let abs_k = ws.k12.abs();
        let t_tan = q(ws.t_max.clone()) - q(abs_k.clone() / ws.u_max.clone()) * root.clone();
        let u_tan = q(ws.u_max.clone()) - q(abs_k / ws.t_max.clone()) * root;
        raw.push((t_tan, u_tan));
    }
    let mut out: Vec<(QuadExt, QuadExt)> = Vec::new();
    for p in raw {
        if ws.in_regions(&p.0, &p.1) && !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Which requirement failed on a NO decision.
#[derive(Clone, Debug, PartialEq)]
pub enum Type2Failure {
    RelationsViolated(Vec<(usize, usize)>),
    MomentMatrixNotPsd,
    /// No feasible corner pair passes both the line and the conic test.
    NoWitness,
}

/// Outcome of the existence decision for `y(x + y − xy) = 0`.
#[derive(Clone, Debug)]
pub struct Type2Report {
    pub exists: bool,
    /// The corner pair certifying existence.
    pub witness: Option<(QuadExt, QuadExt)>,
    /// Which conic certificate the witness satisfied.
    pub witness_status: Option<HypStatus>,
    pub minimal_atoms: Option<usize>,
    pub failure: Option<Type2Failure>,
    /// Rank of the moment matrix.
    pub rank_m: usize,
    /// Conic rank of the minimal completion split.
    pub rank_f_min: usize,
    /// Line rank of the minimal completion split.
    pub rank_h_min: usize,
}

/// Decides whether the sequence has a representing measure on the
/// canonical curve `y(x + y − xy) = 0` and reports the minimal atom count
/// when it does.
pub fn decide_type2(s: &BivSeq<Rat>) -> Type2Report {
    let fail = |failure: Type2Failure, rank_m: usize| Type2Report {
        exists: false,
        witness: None,
        witness_status: None,
        minimal_atoms: None,
        failure: Some(failure),
        rank_m,
        rank_f_min: 0,
        rank_h_min: 0,
    };
    let ws = match build_workspace2(s) {
        Ok(ws) => ws,
        Err(DecomposeError::RelationsViolated(v)) => {
            return fail(Type2Failure::RelationsViolated(v), 0)
        }
        Err(DecomposeError::NotPsd) => {
            return fail(Type2Failure::MomentMatrixNotPsd, rank(&s.moment_matrix()))
        }
    };
    let rank_m = ws.decomp.full_rank();
    for (t, u) in candidate_pairs2(&ws) {
        if !solve_hamburger(&ws.gamma1(&t, &u)).representable {
            continue;
        }
        let Some(status) = hyp_status(&ws.f_of_g(&t, &u), &ws.decomp.order, ws.k) else {
            continue;
        };
        return Type2Report {
            exists: true,
            witness: Some((t, u)),
            witness_status: Some(status),
            minimal_atoms: Some(minimal_value(&ws)),
            failure: None,
            rank_m,
            rank_f_min: ws.rank_f_min,
            rank_h_min: ws.rank_h_min,
        };
    }
    let mut report = fail(Type2Failure::NoWitness, rank_m);
    report.rank_f_min = ws.rank_f_min;
    report.rank_h_min = ws.rank_h_min;
    report
}

/// Decides for an arbitrary conic parameter by normalizing to the
/// canonical curve.
pub fn decide_type2_general(s: &BivSeq<Rat>, a: &Rat) -> Type2Report {
    decide_type2(&normalize_type2(s, a))
}

/// The minimal atom count over all representing measures, from the rank
/// split of the minimal completion and the corner geometry.
fn minimal_value(ws: &Type2Workspace) -> usize {
    let base = ws.rank_f_min + ws.rank_h_min;
    let k = ws.k;
    let f_min = ws.decomp.f_of(&ws.decomp.a_min);
    let status_min = hyp_status(&f_min, &ws.decomp.order, k);
    let flat_min = status_min == Some(HypStatus::Flat);
    let eta0 = ws.eta.is_zero();
    let k12_0 = ws.k12.is_zero();
    if !eta0 && !k12_0 && ws.rank_h_min == k && status_min.is_none() {
        return base + 2;
    }
    let eta2 = ws.eta.clone() * ws.eta.clone();
    let product = ws.t_max.clone() * ws.u_max.clone();
    let no_flat_at_base = if is_pd(&ws.f22) && !is_pd(&ws.h22) {
        ws.rank_h_min == ws.rank_h22 + 1 && product > eta2 && !eta0
    } else if is_pd(&ws.f22) && is_pd(&ws.h22) {
        (eta0 && !k12_0 && ws.rank_h_min == k + 1 && !flat_min)
            || (!eta0 && !k12_0 && flat_min && ws.rank_h_min == k)
            || (!eta0 && !k12_0 && !flat_min)
    } else {
        false
    };
    if no_flat_at_base {
        base + 1
    } else {
        base
    }
}

/// Minimal number of atoms of any representing measure on the canonical
/// curve; the input must be representable.
pub fn minimal_atoms_type2(s: &BivSeq<Rat>) -> Result<usize, ExtractError> {
    decide_type2(s).minimal_atoms.ok_or(ExtractError::NotRepresentable)
}

fn assemble_type2(
    ws: &Type2Workspace,
    t: &QuadExt,
    u: &QuadExt,
    s: &BivSeq<Rat>,
    prec: u64,
) -> Result<PlaneMeasure, ExtractError> {
    let line = extract_line_measure(&ws.gamma1(t, u), false, prec)?;
    let conic = extract_conic(&ws.conic_sequence(t, u), &canonical_curve(), prec)?;
    let total = line.embed_at_y0().merge(conic, prec);
    let residual = plane_residual(&total, s, prec);
    if !residual_ok(&residual, prec) {
        return Err(ExtractError::ResidualExceeded);
    }
    Ok(total)
}

/// Builds a minimal representing measure on the canonical curve, trying the
/// passing corner pairs in order of their predicted atom count.
pub fn construct_measure_type2(s: &BivSeq<Rat>, prec: u64) -> Result<PlaneMeasure, ExtractError> {
    let ws = build_workspace2(s).map_err(|_| ExtractError::NotRepresentable)?;
    let mut passing: Vec<(usize, usize, (QuadExt, QuadExt))> = Vec::new();
    for (idx, (t, u)) in candidate_pairs2(&ws).into_iter().enumerate() {
        if !solve_hamburger(&ws.gamma1(&t, &u)).representable {
            continue;
        }
        if hyp_status(&ws.f_of_g(&t, &u), &ws.decomp.order, ws.k).is_none() {
            continue;
        }
        passing.push((ws.predicted_count(&t, &u), idx, (t, u)));
    }
    if passing.is_empty() {
        return Err(ExtractError::NotRepresentable);
    }
    passing.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut last = ExtractError::NotRepresentable;
    for (_, _, (t, u)) in passing {
        match assemble_type2(&ws, &t, &u, s, prec) {
            Ok(mu) => return Ok(mu),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Builds a minimal representing measure for an arbitrary conic parameter,
/// mapping the canonical atoms back and re-checking the residual against
/// the original moments.
pub fn construct_measure_type2_general(
    s: &BivSeq<Rat>,
    a: &Rat,
    prec: u64,
) -> Result<PlaneMeasure, ExtractError> {
    let mu = construct_measure_type2(&normalize_type2(s, a), prec)?;
    let back = pull_back_type2(&mu, a, prec);
    let residual = plane_residual(&back, s, prec);
    if !residual_ok(&residual, prec) {
        return Err(ExtractError::ResidualExceeded);
    }
    Ok(back)
}
