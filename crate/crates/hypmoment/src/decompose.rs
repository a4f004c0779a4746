//! Block decomposition of the reordered moment matrix shared by the three
//! curve solvers.
//!
//! The moment matrix is conjugated by a permutation so that the pure powers
//! `1, X, …, X^k` come first, followed by the curve's spanning columns and
//! then the remaining monomials.  Splitting off the leading block gives the
//! smallest admissible completion `A_min`, the corrected `Â_min`, and the
//! matrix functions `F` and `H` that separate the line and conic parts of a
//! candidate measure.

use thiserror::Error;

use crate::linalg::{is_psd, pinv, rank, Mat};
use crate::scalar::Scalar;
use crate::seq::{monos_up_to, BivSeq, Curve};

/// Why a decomposition could not be built.
#[derive(Debug, Error)]
pub enum DecomposeError {
    /// A moment identity imposed by the curve fails at the listed shifts.
    #[error("curve moment identities violated at shifts {0:?}")]
    RelationsViolated(Vec<(usize, usize)>),
    /// The moment matrix has a negative eigenvalue.
    #[error("moment matrix is not positive semidefinite")]
    NotPsd,
}

/// The reordered moment matrix of a sequence together with the blocks and
/// derived matrices every curve solver starts from.
#[derive(Clone, Debug)]
pub struct Decomposition<T: Scalar> {
    /// Column order: `1, X, …, X^k` first, then the curve's spanning
    /// columns, then the remaining monomials.
    pub order: Vec<(usize, usize)>,
    /// Length of the leading pure-power block, `k + 1`.
    pub x_len: usize,
    /// Number of spanning columns following the pure powers.
    pub span_len: usize,
    /// The full moment matrix in the order above.
    pub m_tilde: Mat<T>,
    /// Leading block on the pure powers.
    pub a11: Mat<T>,
    /// Pure powers against spanning columns.
    pub a12: Mat<T>,
    /// Pure powers against the remaining columns.
    pub a13: Mat<T>,
    /// Block on the spanning columns.
    pub a22: Mat<T>,
    /// Spanning columns against the remaining columns.
    pub a23: Mat<T>,
    /// Block on the remaining columns.
    pub a33: Mat<T>,
    /// Smallest leading block admitting a positive semidefinite
    /// completion of the trailing columns.
    pub a_min: Mat<T>,
    /// `a_min` with the single entry dictated by the curve corrected.
    pub a_hat_min: Mat<T>,
    /// Size of that correction.
    pub eta: T,
}

/// A matched pair `F(A)`, `H(A)`: the full-size matrix with its leading
/// block replaced by `A`, and the complementary leading-block difference.
#[derive(Clone, Debug)]
pub struct FHPair<T: Scalar> {
    pub f: Mat<T>,
    pub h: Mat<T>,
}

/// Column order for the curve: pure powers, spanning columns, rest.
fn column_order(k: usize, curve: &Curve) -> (Vec<(usize, usize)>, usize) {
    let mut order: Vec<(usize, usize)> = (0..=k).map(|i| (i, 0)).collect();
    let span_len;
    match curve {
        Curve::Hyp1 | Curve::Hyp2 { .. } => {
            order.extend((1..=k).rev().map(|j| (0, j)));
            order.extend((1..k).map(|i| (i, 1)));
            span_len = 2 * k - 1;
        }
        Curve::Hyp3 { .. } => {
            order.extend((0..k).map(|i| (i, 1)));
            span_len = k;
            for j in 2..=k {
                order.extend((0..=k - j).map(|i| (i, j)));
            }
        }
    }
    for mono in monos_up_to(k) {
        if !order.contains(&mono) {
            order.push(mono);
        }
    }
    (order, span_len)
}

/// Builds the reordered matrix, its blocks, and the minimal completion of
/// the leading block for the given curve.
///
/// Requires the curve's moment identities to hold and the moment matrix to
/// be positive semidefinite.
pub fn build_decomposition<T: Scalar>(
    s: &BivSeq<T>,
    curve: &Curve,
) -> Result<Decomposition<T>, DecomposeError> {
    let report = s.check_relations(curve);
    if !report.ok {
        return Err(DecomposeError::RelationsViolated(report.violations));
    }
    let k = s.k();
    let (order, span_len) = column_order(k, curve);
    let m_tilde = s.restricted(&order, &order);
    if !is_psd(&m_tilde) {
        return Err(DecomposeError::NotPsd);
    }
    let n = m_tilde.rows();
    let x_len = k + 1;
    let xs: Vec<usize> = (0..x_len).collect();
    let span: Vec<usize> = (x_len..x_len + span_len).collect();
    let rest: Vec<usize> = (x_len + span_len..n).collect();
    let tail: Vec<usize> = (x_len..n).collect();

    let a11 = m_tilde.submatrix(&xs, &xs);
    let a12 = m_tilde.submatrix(&xs, &span);
    let a13 = m_tilde.submatrix(&xs, &rest);
    let a22 = m_tilde.submatrix(&span, &span);
    let a23 = m_tilde.submatrix(&span, &rest);
    let a33 = m_tilde.submatrix(&rest, &rest);

    let b12 = m_tilde.submatrix(&xs, &tail);
    let b22 = m_tilde.submatrix(&tail, &tail);
    let a_min = b12.matmul(&pinv(&b22)).matmul(&b12.transpose());

    let mut a_hat_min = a_min.clone();
    let eta;
    match curve {
        Curve::Hyp1 => {
            eta = a_min[(k - 2, k)].clone() - a_min[(k - 1, k - 1)].clone();
            a_hat_min[(k - 1, k - 1)] = a_min[(k - 2, k)].clone();
        }
        Curve::Hyp2 { .. } => {
            eta = a_min[(1, k - 1)].clone() - a_min[(0, k)].clone();
            a_hat_min[(0, k)] = a_min[(1, k - 1)].clone();
            a_hat_min[(k, 0)] = a_min[(1, k - 1)].clone();
        }
        Curve::Hyp3 { .. } => {
            eta = a_min[(0, 2)].clone() - a_min[(1, 1)].clone();
            a_hat_min[(1, 1)] = a_min[(0, 2)].clone();
        }
    }

    Ok(Decomposition {
        order,
        x_len,
        span_len,
        m_tilde,
        a11,
        a12,
        a13,
        a22,
        a23,
        a33,
        a_min,
        a_hat_min,
        eta,
    })
}

impl<T: Scalar> Decomposition<T> {
    /// Index of a monomial in the reordered matrix.
    pub fn position(&self, mono: (usize, usize)) -> usize {
        self.order.iter().position(|&m| m == mono).expect("monomial not in order")
    }

    /// The reordered matrix with its leading block replaced by `a`.
    pub fn f_of(&self, a: &Mat<T>) -> Mat<T> {
        assert_eq!(a.rows(), self.x_len, "leading block size mismatch");
        assert_eq!(a.cols(), self.x_len, "leading block size mismatch");
        let mut f = self.m_tilde.clone();
        for i in 0..self.x_len {
            for j in 0..self.x_len {
                f[(i, j)] = a[(i, j)].clone();
            }
        }
        f
    }

    /// The complementary leading block `A_11 − a`.
    pub fn h_of(&self, a: &Mat<T>) -> Mat<T> {
        assert_eq!(a.rows(), self.x_len, "leading block size mismatch");
        assert_eq!(a.cols(), self.x_len, "leading block size mismatch");
        self.a11.sub(a)
    }

    /// Both matrix functions at once.
    pub fn fh_pair(&self, a: &Mat<T>) -> FHPair<T> {
        FHPair { f: self.f_of(a), h: self.h_of(a) }
    }

    /// Restriction of an `f_of` image to a monomial list.
    pub fn restrict(&self, f: &Mat<T>, monos: &[(usize, usize)]) -> Mat<T> {
        let idx: Vec<usize> = monos.iter().map(|&m| self.position(m)).collect();
        f.principal(&idx)
    }

    /// Rank of the reordered moment matrix.
    pub fn full_rank(&self) -> usize {
        rank(&self.m_tilde)
    }
}

/// The moments `β^{(c)}_{i,0}` of the conic part of any representing
/// measure that are already determined by the mixed moments, as pairs
/// `(i, value)`.
///
/// Writing the conic factor as `c = a00 + a10 x + a01 y + a20 x² + a11 xy +
/// a02 y²`, exactly one of `a00, a10, a20` is nonzero for the three curves,
/// and multiplying `c` by the matching power of `x` expresses `x^i` on the
/// conic through moments of positive `y`-degree, which the line part cannot
/// see.
pub fn determined_conic_moments<T: Scalar>(s: &BivSeq<T>, curve: &Curve) -> Vec<(usize, T)> {
    let two_k = s.degree();
    match curve {
        // c = 1 - xy: x^i = x^{i+1} y on the conic.
        Curve::Hyp1 => (0..=two_k - 2).map(|i| (i, s.get(i + 1, 1).clone())).collect(),
        // c = x + y + a xy: x^i = -(x^{i-1} y + a x^i y) on the conic.
        Curve::Hyp2 { a } => {
            let a = T::from_rat(a.clone());
            (1..=two_k - 1)
                .map(|i| {
                    let v = T::zero()
                        - (s.get(i - 1, 1).clone() + a.clone() * s.get(i, 1).clone());
                    (i, v)
                })
                .collect()
        }
        // c = a y + x^2 - y^2: x^i = x^{i-2} y^2 - a x^{i-2} y on the conic.
        Curve::Hyp3 { a } => {
            let a = T::from_rat(a.clone());
            (2..=two_k)
                .map(|i| {
                    let v = s.get(i - 2, 2).clone() - a.clone() * s.get(i - 2, 1).clone();
                    (i, v)
                })
                .collect()
        }
    }
}
