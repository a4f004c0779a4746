//! Existence, minimal cardinality, and construction of representing
//! measures on the curves `y(ay + x² − y²) = 0` with `a ≠ 0`.
//!
//! The completed conic block here has two free entries `(t, u)` sitting at
//! the constant monomial and at the `(1, X)` slot.  The conic image stays
//! positive on a parabolic region `u² ≤ ηt` determined by the completion
//! defect `η`, the line image on a second parabolic region around the
//! corner `(t₀, u₀)`.  Representability reduces to the two regions meeting,
//! and the meeting points of their boundaries — at most two, roots of a
//! single quadratic — are the only completion pairs that ever need testing.

use num_traits::Zero;

use crate::decompose::{build_decomposition, DecomposeError, Decomposition};
use crate::hamburger::{extract_line_measure, solve_hamburger, ExtractError, UniSeq};
use crate::hyp2::HypStatus;
use crate::hyperbola::extract_conic;
use crate::linalg::{dot, is_pd, is_psd, pinv, rank, Mat};
use crate::measure::{plane_residual, residual_ok, PlaneMeasure};
use crate::scalar::{rat, QuadExt, Rat, Scalar};
use crate::seq::{BivSeq, Curve};

/// Spanning monomials of the conic block: `1, X, …, X^k, Y, YX, …, YX^{k-1}`.
fn spanning_monos(k: usize) -> Vec<(usize, usize)> {
    let mut b: Vec<(usize, usize)> = (0..=k).map(|i| (i, 0)).collect();
    b.extend((0..k).map(|i| (i, 1)));
    b
}

/// Evaluates the conic certificate on a conic block image `f` for this
/// curve family: the rank must survive dropping either `X^k` or `YX^{k-1}`
/// from the spanning basis, or the matrix must have full rank `2k + 1` on
/// the basis.  The matrix must already be positive semidefinite.
pub fn hyp_tilde_status<T: Scalar>(
    f: &Mat<T>,
    order: &[(usize, usize)],
    k: usize,
) -> Option<HypStatus> {
    let b = spanning_monos(k);
    let all: Vec<usize> = b
        .iter()
        .map(|&m| order.iter().position(|&x| x == m).expect("monomial missing"))
        .collect();
    let no_xk: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &p)| p)
        .collect();
    let no_yxk: Vec<usize> = all[..all.len() - 1].to_vec();
    let full = rank(f);
    let r_no_xk = rank(&f.principal(&no_xk));
    let r_no_yxk = rank(&f.principal(&no_yxk));
    if full == r_no_xk && full == r_no_yxk {
        return Some(HypStatus::Flat);
    }
    if full == 2 * k + 1 {
        return Some(HypStatus::FullRank);
    }
    None
}

/// Bilinear form `v † M w` through an explicit pseudoinverse.
fn pinv_bilinear<T: Scalar>(m: &Mat<T>, v: &[T], w: &[T]) -> T {
    let prod = pinv(m).matmul(&Mat::col_vec(w));
    dot(&Mat::col_vec(v), &prod)
}

/// All exact intermediates of the `y(ay + x² − y²)` solver.
#[derive(Clone, Debug)]
pub struct Type3Workspace {
    /// Half-degree of the input sequence.
    pub k: usize,
    /// The conic coefficient, nonzero.
    pub a: Rat,
    /// Block decomposition of the reordered moment matrix.
    pub decomp: Decomposition<Rat>,
    /// Completion defect between the two determined entries of degree two.
    pub eta: Rat,
    /// Tail block of the corrected line matrix, over `X², …, X^k`.
    pub h22: Mat<Rat>,
    /// Column of the corrected line matrix over the tail at the constant
    /// monomial.
    pub h12_1: Vec<Rat>,
    /// The same column at `X`.
    pub h12_2: Vec<Rat>,
    /// Corrected line matrix without the `X` row and column.
    pub h1: Mat<Rat>,
    /// Corrected line matrix without the constant row and column.
    pub h2: Mat<Rat>,
    /// Largest feasible line corner at the constant monomial.
    pub t0: Rat,
    /// Center of the feasible line interval at the `(1, X)` slot.
    pub u0: Rat,
    /// Scalar Schur complement of the tail inside `h2`, controlling the
    /// width of the feasible line interval.
    pub c_ratio: Rat,
    /// Rank of the tail block.
    pub rank_h22: usize,
    /// Rank of `h2`.
    pub rank_h2: usize,
    /// Positivity of `h2`.
    pub h2_psd: bool,
    pub h2_pd: bool,
    /// Rank of the conic matrix at the minimal completion.
    pub rank_f_min: usize,
    /// Rank of the line matrix at the minimal completion.
    pub rank_h_min: usize,
    seq: BivSeq<Rat>,
}

/// Builds every intermediate of the solver.  Requires the curve moment
/// identities, a positive semidefinite moment matrix, and `a ≠ 0`.
pub fn build_workspace3(s: &BivSeq<Rat>, a: &Rat) -> Result<Type3Workspace, DecomposeError> {
    assert!(!a.is_zero(), "conic coefficient must be nonzero");
    let curve = Curve::Hyp3 { a: a.clone() };
    let decomp = build_decomposition(s, &curve)?;
    let k = s.k();
    let eta = decomp.eta.clone();
    let h_hat = decomp.h_of(&decomp.a_hat_min);
    let tail: Vec<usize> = (2..=k).collect();
    let h22 = h_hat.principal(&tail);
    let h12_1: Vec<Rat> = (2..=k).map(|i| h_hat[(i, 0)].clone()).collect();
    let h12_2: Vec<Rat> = (2..=k).map(|i| h_hat[(i, 1)].clone()).collect();
    let mut keep1 = vec![0usize];
    keep1.extend(tail.iter().copied());
    let h1 = h_hat.principal(&keep1);
    let keep2: Vec<usize> = (1..=k).collect();
    let h2 = h_hat.principal(&keep2);
    let t0 = h_hat[(0, 0)].clone() - pinv_bilinear(&h22, &h12_1, &h12_1);
    let u0 = h_hat[(0, 1)].clone() - pinv_bilinear(&h22, &h12_1, &h12_2);
    let c_ratio = h_hat[(1, 1)].clone() - pinv_bilinear(&h22, &h12_2, &h12_2);
    let rank_h22 = rank(&h22);
    let rank_h2 = rank(&h2);
    let h2_psd = is_psd(&h2);
    let h2_pd = is_pd(&h2);
    let rank_f_min = rank(&decomp.f_of(&decomp.a_min));
    let rank_h_min = rank(&decomp.h_of(&decomp.a_min));
    Ok(Type3Workspace {
        k,
        a: a.clone(),
        decomp,
        eta,
        h22,
        h12_1,
        h12_2,
        h1,
        h2,
        t0,
        u0,
        c_ratio,
        rank_h22,
        rank_h2,
        h2_psd,
        h2_pd,
        rank_f_min,
        rank_h_min,
        seq: s.clone(),
    })
}

impl Type3Workspace {
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
    pub fn gamma(&self, t: &QuadExt, u: &QuadExt) -> UniSeq<QuadExt> {
        let k = self.k;
        let s = &self.seq;
        let q = QuadExt::from_rat;
        let mut e = Vec::with_capacity(2 * k + 1);
        e.push(q(s.get(0, 0).clone() - self.a_min()[(0, 0)].clone()) - t.clone());
        e.push(q(s.get(1, 0).clone() - self.a_min()[(0, 1)].clone()) - u.clone());
        for d in 2..=2 * k {
            e.push(q(s.get(d, 0).clone() - s.get(d - 2, 2).clone()
                + self.a.clone() * s.get(d - 2, 1).clone()));
        }
        UniSeq::new(e)
    }

    /// The completed conic block at a corner pair.
    pub fn g_matrix(&self, t: &QuadExt, u: &QuadExt) -> Mat<QuadExt> {
        let mut g: Mat<QuadExt> = self.decomp.a_hat_min.map_scalar();
        g[(0, 0)] = g[(0, 0)].clone() + t.clone();
        g[(0, 1)] = g[(0, 1)].clone() + u.clone();
        g[(1, 0)] = g[(1, 0)].clone() + u.clone();
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

    /// The bivariate moments of the conic part at a corner pair.
    pub fn conic_sequence(&self, t: &QuadExt, u: &QuadExt) -> BivSeq<QuadExt> {
        let q = QuadExt::from_rat;
        BivSeq::from_fn(self.k, |i, j| {
            if j > 0 {
                q(self.seq.get(i, j).clone())
            } else if i == 0 {
                q(self.a_min()[(0, 0)].clone()) + t.clone()
            } else if i == 1 {
                q(self.a_min()[(0, 1)].clone()) + u.clone()
            } else {
                q(self.seq.get(i - 2, 2).clone() - self.a.clone() * self.seq.get(i - 2, 1).clone())
            }
        })
    }

    /// Membership in the conic feasibility region `{t ≥ 0, u² ≤ ηt}`,
    /// empty when the defect is negative.
    pub fn in_conic_region(&self, t: &QuadExt, u: &QuadExt) -> bool {
        if self.eta.is_neg() || t.is_neg() {
            return false;
        }
        !(QuadExt::from_rat(self.eta.clone()) * t.clone() - u.clone() * u.clone()).is_neg()
    }

    /// Membership in the line feasibility region
    /// `{t ≤ t₀, (u − u₀)² ≤ (t₀ − t)·c}`, empty when `h2` is not
    /// positive semidefinite.
    pub fn in_line_region(&self, t: &QuadExt, u: &QuadExt) -> bool {
        if !self.h2_psd {
            return false;
        }
        let q = QuadExt::from_rat;
        let dt = q(self.t0.clone()) - t.clone();
        if dt.is_neg() {
            return false;
        }
        let du = u.clone() - q(self.u0.clone());
        !(dt * q(self.c_ratio.clone()) - du.clone() * du).is_neg()
    }

    /// Membership in both regions, which is equivalent to simultaneous
    /// positive semidefiniteness of the conic and line images at the pair.
    pub fn in_regions(&self, t: &QuadExt, u: &QuadExt) -> bool {
        self.in_conic_region(t, u) && self.in_line_region(t, u)
    }

    /// Atom count of the measure assembled at a feasible corner pair.
    pub fn predicted_count(&self, t: &QuadExt, u: &QuadExt) -> usize {
        let q = QuadExt::from_rat;
        let det = q(self.eta.clone()) * t.clone() - u.clone() * u.clone();
        let inc_f = if det.sgn() > 0 {
            2
        } else if t.sgn() == 0 && u.sgn() == 0 && self.eta.is_zero() {
            0
        } else {
            1
        };
        let dt = q(self.t0.clone()) - t.clone();
        let du = u.clone() - q(self.u0.clone());
        let at_vertex = dt.sgn() == 0 && du.sgn() == 0;
        let on_boundary = (dt * q(self.c_ratio.clone()) - du.clone() * du).sgn() == 0;
        let inc_h = if at_vertex {
            self.rank_h2
        } else if on_boundary {
            self.rank_h22 + 1
        } else {
            self.rank_h22 + 2
        };
        self.rank_f_min + inc_f + inc_h
    }
}

/// Meeting points of the two region boundaries for a positive defect.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoints {
    /// At most two `(t, u)` pairs, ordered by increasing `u`.
    pub points: Vec<(QuadExt, QuadExt)>,
    /// Whether the line region degenerates to a horizontal half-line.
    pub degenerate_line: bool,
}

/// Roots of the boundary meeting condition: substituting `t = u²/η` into
/// `(u − u₀)² = (t₀ − t)·c` gives the quadratic
/// `(1 + c/η)u² − 2u₀u + (u₀² − c·t₀) = 0`; the real roots with `t ≤ t₀`
/// are the meeting points.  Requires `η > 0`.
pub fn boundary_roots(eta: &Rat, t0: &Rat, u0: &Rat, c_ratio: &Rat) -> BoundaryPoints {
    assert!(eta.is_pos(), "boundary meeting points need a positive defect");
    let q = QuadExt::from_rat;
    if c_ratio.is_zero() {
        let t_tilde = u0.clone() * u0.clone() / eta.clone();
        let points = if t_tilde <= *t0 {
            vec![(q(t_tilde), q(u0.clone()))]
        } else {
            vec![]
        };
        return BoundaryPoints { points, degenerate_line: true };
    }
    let lead = rat(1) + c_ratio.clone() / eta.clone();
    let quarter_disc = u0.clone() * u0.clone()
        - lead.clone() * (u0.clone() * u0.clone() - c_ratio.clone() * t0.clone());
    if quarter_disc.is_neg() {
        return BoundaryPoints { points: vec![], degenerate_line: false };
    }
    let root = QuadExt::sqrt_rat(&quarter_disc);
    let inv_lead = q(lead.recip());
    let inv_eta = q(eta.recip());
    let mut points = Vec::new();
    let signs: &[i64] = if quarter_disc.is_zero() { &[1] } else { &[-1, 1] };
    for sign in signs {
        let u = (q(u0.clone()) + q(rat(*sign)) * root.clone()) * inv_lead.clone();
        let t = inv_eta.clone() * u.clone() * u.clone();
        if !(q(t0.clone()) - t.clone()).is_neg() {
            points.push((t, u));
        }
    }
    BoundaryPoints { points, degenerate_line: false }
}

/// Meeting points of the workspace's region boundaries.
pub fn boundary_intersection(ws: &Type3Workspace) -> BoundaryPoints {
    boundary_roots(&ws.eta, &ws.t0, &ws.u0, &ws.c_ratio)
}

/// Which clause of the existence theorem settled a YES decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Type3Branch {
    /// Zero defect: the pair `(0, 0)` works outright.
    ZeroDefect,
    /// Two boundary meeting points with a positive definite inner line
    /// block.
    TwoContacts,
    /// A single boundary meeting point, tested together with its
    /// horizontal translate.
    SingleContact,
}

/// Which requirement failed on a NO decision.
#[derive(Clone, Debug, PartialEq)]
pub enum Type3Failure {
    RelationsViolated(Vec<(usize, usize)>),
    MomentMatrixNotPsd,
    /// The minimal completion spans neither a flat nor a hyperbasis conic
    /// block.
    SpanDeficient,
    /// The completion defect is negative, emptying the conic region.
    NegativeDefect,
    /// No feasible corner pair passes both the line and the conic test.
    NoWitness,
}

/// Outcome of the existence decision for `y(ay + x² − y²) = 0`.
#[derive(Clone, Debug)]
pub struct Type3Report {
    pub exists: bool,
    pub branch: Option<Type3Branch>,
    /// The corner pair certifying existence.
    pub witness: Option<(QuadExt, QuadExt)>,
    pub minimal_atoms: Option<usize>,
    pub failure: Option<Type3Failure>,
    /// Rank of the moment matrix.
    pub rank_m: usize,
    /// Conic rank of the minimal completion split.
    pub rank_f_min: usize,
    /// Line rank of the minimal completion split.
    pub rank_h_min: usize,
    /// The boundary meeting points, when the defect is positive.
    pub boundary: Option<BoundaryPoints>,
}

fn decide_with(ws: &Type3Workspace) -> Type3Report {
    let rank_m = ws.decomp.full_rank();
    let fail = |failure: Type3Failure, boundary: Option<BoundaryPoints>| Type3Report {
        exists: false,
        branch: None,
        witness: None,
        minimal_atoms: None,
        failure: Some(failure),
        rank_m,
        rank_f_min: ws.rank_f_min,
        rank_h_min: ws.rank_h_min,
        boundary,
    };
    let k = ws.k;
    let f_min = ws.decomp.f_of(&ws.decomp.a_min);
    let status_min = hyp_tilde_status(&f_min, &ws.decomp.order, k);
    let flat_min = status_min == Some(HypStatus::Flat);
    if !flat_min && ws.rank_f_min != 2 * k - 1 {
        return fail(Type3Failure::SpanDeficient, None);
    }
    let yes = |branch, witness, boundary: Option<BoundaryPoints>| Type3Report {
        exists: true,
        branch: Some(branch),
        witness: Some(witness),
        minimal_atoms: Some(minimal_value(ws, flat_min, boundary.as_ref())),
        failure: None,
        rank_m,
        rank_f_min: ws.rank_f_min,
        rank_h_min: ws.rank_h_min,
        boundary,
    };
    match ws.eta.sgn() {
        -1 => fail(Type3Failure::NegativeDefect, None),
        0 => {
            let origin = (QuadExt::zero(), QuadExt::zero());
            if flat_min && solve_hamburger(&ws.gamma(&origin.0, &origin.1)).representable {
                yes(Type3Branch::ZeroDefect, origin, None)
            } else {
                fail(Type3Failure::NoWitness, None)
            }
        }
        _ => {
            let bp = boundary_intersection(ws);
            match bp.points.len() {
                2 => {
                    if !ws.h2_pd {
                        return fail(Type3Failure::NoWitness, Some(bp));
                    }
                    let witness = bp
                        .points
                        .iter()
                        .find(|(t, u)| solve_hamburger(&ws.gamma(t, u)).representable)
                        .unwrap_or(&bp.points[0])
                        .clone();
                    yes(Type3Branch::TwoContacts, witness, Some(bp))
                }
                1 => {
                    let (tt, ut) = bp.points[0].clone();
                    let candidates =
                        [(tt, ut.clone()), (QuadExt::from_rat(ws.t0.clone()), ut)];
                    for (t, u) in candidates {
                        if solve_hamburger(&ws.gamma(&t, &u)).representable
                            && hyp_tilde_status(&ws.f_of_g(&t, &u), &ws.decomp.order, k)
                                .is_some()
                        {
                            return yes(Type3Branch::SingleContact, (t, u), Some(bp));
                        }
                    }
                    fail(Type3Failure::NoWitness, Some(bp))
                }
                _ => fail(Type3Failure::NoWitness, Some(bp)),
            }
        }
    }
}

/// Decides whether the sequence has a representing measure on
/// `y(ay + x² − y²) = 0` and reports the minimal atom count when it does.
pub fn decide_type3(s: &BivSeq<Rat>, a: &Rat) -> Type3Report {
    let rank_m = rank(&s.moment_matrix());
    match build_workspace3(s, a) {
        Ok(ws) => decide_with(&ws),
        Err(DecomposeError::RelationsViolated(v)) => Type3Report {
            exists: false,
            branch: None,
            witness: None,
            minimal_atoms: None,
            failure: Some(Type3Failure::RelationsViolated(v)),
            rank_m,
            rank_f_min: 0,
            rank_h_min: 0,
            boundary: None,
        },
        Err(DecomposeError::NotPsd) => Type3Report {
            exists: false,
            branch: None,
            witness: None,
            minimal_atoms: None,
            failure: Some(Type3Failure::MomentMatrixNotPsd),
            rank_m,
            rank_f_min: 0,
            rank_h_min: 0,
            boundary: None,
        },
    }
}

/// The minimal atom count over all representing measures, from the rank
/// split of the minimal completion and the boundary geometry.
fn minimal_value(ws: &Type3Workspace, flat_min: bool, bp: Option<&BoundaryPoints>) -> usize {
    let base = ws.rank_f_min + ws.rank_h_min;
    let k = ws.k;
    if let Some(bp) = bp {
        if !flat_min
            && ws.rank_f_min == 2 * k - 1
            && bp.points.len() == 2
            && ws.h2_pd
            && ws.rank_h_min == k
        {
            return base + 2;
        }
    }
    let at_base = if ws.eta.is_zero() {
        true
    } else if let Some(bp) = bp {
        let q = QuadExt::from_rat;
        let segment = bp.degenerate_line
            && bp.points.len() == 1
            && (q(ws.t0.clone()) - bp.points[0].0.clone()).sgn() > 0;
        let singleton = bp.points.len() == 1 && !segment;
        let two_flat_pd = bp.points.len() == 2
            && hyp_tilde_status(
                &ws.decomp.f_of(&ws.decomp.a_hat_min),
                &ws.decomp.order,
                k,
            ) == Some(HypStatus::Flat)
            && is_pd(&ws.decomp.h_of(&ws.decomp.a_min));
        two_flat_pd
            || (singleton && {
                // The contact can sit exactly on the line-region vertex
                // (t₀, u₀), where the line rank drops to that of `h2`
                // rather than `h22` plus the boundary increment.
                let (t, u) = &bp.points[0];
                let at_vertex = (q(ws.t0.clone()) - t.clone()).sgn() == 0
                    && (u.clone() - q(ws.u0.clone())).sgn() == 0;
                if at_vertex {
                    ws.rank_h_min == ws.rank_h2 + 1
                } else {
                    ws.rank_h_min == ws.rank_h22 + 2
                }
            })
            || (segment && ws.rank_h_min == ws.rank_h22 + 2 && {
                let (t, u) = &bp.points[0];
                hyp_tilde_status(&ws.f_of_g(t, u), &ws.decomp.order, k).is_some()
            })
    } else {
        false
    };
    if at_base {
        base
    } else {
        base + 1
    }
}

/// Minimal number of atoms of any representing measure; the input must be
/// representable.
pub fn minimal_atoms_type3(s: &BivSeq<Rat>, a: &Rat) -> Result<usize, ExtractError> {
    decide_type3(s, a).minimal_atoms.ok_or(ExtractError::NotRepresentable)
}

fn assemble_type3(
    ws: &Type3Workspace,
    t: &QuadExt,
    u: &QuadExt,
    s: &BivSeq<Rat>,
    prec: u64,
) -> Result<PlaneMeasure, ExtractError> {
    let line = extract_line_measure(&ws.gamma(t, u), false, prec)?;
    let curve = Curve::Hyp3 { a: ws.a.clone() };
    let conic = extract_conic(&ws.conic_sequence(t, u), &curve, prec)?;
    let total = line.embed_at_y0().merge(conic, prec);
    let residual = plane_residual(&total, s, prec);
    if !residual_ok(&residual, prec) {
        return Err(ExtractError::ResidualExceeded);
    }
    Ok(total)
}

/// Builds a minimal representing measure, trying the witness pair first
/// and falling back to the remaining boundary candidates.
pub fn construct_measure_type3(
    s: &BivSeq<Rat>,
    a: &Rat,
    prec: u64,
) -> Result<PlaneMeasure, ExtractError> {
    let ws = build_workspace3(s, a).map_err(|_| ExtractError::NotRepresentable)?;
    let rep = decide_with(&ws);
    if !rep.exists {
        return Err(ExtractError::NotRepresentable);
    }
    let witness = rep.witness.clone().expect("YES decision carries a witness");
    let mut attempts = vec![witness.clone()];
    match rep.branch {
        Some(Type3Branch::TwoContacts) => {
            for p in &rep.boundary.as_ref().unwrap().points {
                if *p != witness {
                    attempts.push(p.clone());
                }
            }
        }
        Some(Type3Branch::SingleContact) => {
            let (tt, ut) = rep.boundary.as_ref().unwrap().points[0].clone();
            let other = if witness.0 == tt {
                (QuadExt::from_rat(ws.t0.clone()), ut)
            } else {
                (tt, ut)
            };
            if other != witness {
                attempts.push(other);
            }
        }
        _ => {}
    }
    let mut last = ExtractError::NotRepresentable;
    for (t, u) in attempts {
        match assemble_type3(&ws, &t, &u, s, prec) {
            Ok(mu) => return Ok(mu),
            Err(e) => last = e,
        }
    }
    Err(last)
}
