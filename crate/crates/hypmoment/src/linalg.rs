//! Exact dense linear algebra over an ordered field: fraction-free rank,
//! Moore–Penrose pseudoinverse, generalized Schur complements, an exact
//! `L D L^T` positive-semidefiniteness test, and the one-missing-entry
//! partial-matrix completion used by the curve solvers.
//!
//! Everything is generic over [`Scalar`], so the same routines run over the
//! rationals and over a quadratic extension. No pivot strategy here is
//! numerical: pivots are chosen by exact sign tests only.

use crate::scalar::{QuadExt, Rat, Scalar};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("linear system is inconsistent: B is not in the column space of A")]
    Inconsistent,
    #[error("partially specified matrix is not partially positive semidefinite")]
    NotPartialPsd,
    #[error("missing entry must be off-diagonal: ({0}, {1})")]
    BadMissingEntry(usize, usize),
}

/// Dense row-major matrix over an exact scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[T]) -> Self {
        Mat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + rhs[(i, j)].clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - rhs[(i, j)].clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * c.clone())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        Mat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::zero();
            for t in 0..self.cols {
                acc = acc + self[(i, t)].clone() * rhs[(t, j)].clone();
            }
            acc
        })
    }

    /// Submatrix at the given row and column index lists (duplicates and
    /// reordering allowed).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Principal submatrix at one index list.
    pub fn principal(&self, idx: &[usize]) -> Self {
        self.submatrix(idx, idx)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Entry-wise conversion into another scalar type via the rationals.
    /// Panics if an entry is not rational.
    pub fn map_scalar<S: Scalar>(&self) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| {
            S::from_rat(self[(i, j)].as_rat().expect("entry is not rational"))
        })
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Scalar product of two equal-length column vectors.
pub fn dot<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> T {
    assert_eq!(a.cols(), 1);
    assert_eq!(b.cols(), 1);
    assert_eq!(a.rows(), b.rows());
    let mut acc = T::zero();
    for i in 0..a.rows() {
        acc = acc + a[(i, 0)].clone() * b[(i, 0)].clone();
    }
    acc
}

/// Exact rank by fraction-free (Bareiss) elimination with full pivoting.
pub fn rank<T: Scalar>(m: &Mat<T>) -> usize {
    let mut w = m.clone();
    let (r, c) = (w.rows(), w.cols());
    let mut prev = T::one();
    let mut rank = 0;
    for step in 0..r.min(c) {
        // Find any nonzero entry in the remaining block.
        let mut pivot = None;
        'search: for i in step..r {
            for j in step..c {
                if !w[(i, j)].is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != step {
            for j in 0..c {
                let tmp = w[(pi, j)].clone();
                w[(pi, j)] = w[(step, j)].clone();
                w[(step, j)] = tmp;
            }
        }
        if pj != step {
            for i in 0..r {
                let tmp = w[(i, pj)].clone();
                w[(i, pj)] = w[(i, step)].clone();
                w[(i, step)] = tmp;
            }
        }
        let p = w[(step, step)].clone();
        for i in step + 1..r {
            for j in step + 1..c {
                let num = p.clone() * w[(i, j)].clone() - w[(i, step)].clone() * w[(step, j)].clone();
                w[(i, j)] = num / prev.clone();
            }
            w[(i, step)] = T::zero();
        }
        prev = p;
        rank += 1;
    }
    rank
}

/// Reduced row echelon form; returns the reduced matrix and the pivot
/// column indices.
pub fn rref<T: Scalar>(m: &Mat<T>) -> (Mat<T>, Vec<usize>) {
    let mut w = m.clone();
    let (r, c) = (w.rows(), w.cols());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..c {
        if row == r {
            break;
        }
        let Some(p) = (row..r).find(|&i| !w[(i, col)].is_zero()) else { continue };
        if p != row {
            for j in 0..c {
                let tmp = w[(p, j)].clone();
                w[(p, j)] = w[(row, j)].clone();
                w[(row, j)] = tmp;
            }
        }
        let inv = w[(row, col)].inv();
        for j in col..c {
            w[(row, j)] = w[(row, j)].clone() * inv.clone();
        }
        for i in 0..r {
            if i != row && !w[(i, col)].is_zero() {
                let f = w[(i, col)].clone();
                for j in col..c {
                    w[(i, j)] = w[(i, j)].clone() - f.clone() * w[(row, j)].clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (w, pivots)
}

/// Basis of the right kernel, from the reduced row echelon form.
pub fn kernel_basis<T: Scalar>(m: &Mat<T>) -> Vec<Mat<T>> {
    let (re, pivots) = rref(m);
    let c = m.cols();
    let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&fj| {
            let mut v = Mat::zeros(c, 1);
            v[(fj, 0)] = T::one();
            for (row, &pj) in pivots.iter().enumerate() {
                v[(pj, 0)] = -re[(row, fj)].clone();
            }
            v
        })
        .collect()
}

/// Exact solve of `A X = B` for square nonsingular `A`; `None` when `A` is
/// singular.
pub fn solve<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Option<Mat<T>> {
    assert!(a.is_square(), "solve needs a square matrix");
    assert_eq!(a.rows(), b.rows(), "solve shape mismatch");
    let n = a.rows();
    let k = b.cols();
    // Gauss-Jordan on the augmented matrix.
    let mut w = Mat::from_fn(n, n + k, |i, j| {
        if j < n { a[(i, j)].clone() } else { b[(i, j - n)].clone() }
    });
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !w[(i, col)].is_zero()) else { return None };
        if p != col {
            for j in 0..n + k {
                let tmp = w[(p, j)].clone();
                w[(p, j)] = w[(col, j)].clone();
                w[(col, j)] = tmp;
            }
        }
        let inv = w[(col, col)].inv();
        for j in col..n + k {
            w[(col, j)] = w[(col, j)].clone() * inv.clone();
        }
        for i in 0..n {
            if i != col && !w[(i, col)].is_zero() {
                let f = w[(i, col)].clone();
                for j in col..n + k {
                    w[(i, j)] = w[(i, j)].clone() - f.clone() * w[(col, j)].clone();
                }
            }
        }
    }
    Some(w.submatrix(&(0..n).collect::<Vec<_>>(), &(n..n + k).collect::<Vec<_>>()))
}

/// Inverse of a square nonsingular matrix.
pub fn inverse<T: Scalar>(a: &Mat<T>) -> Option<Mat<T>> {
    solve(a, &Mat::identity(a.rows()))
}

/// Moore–Penrose pseudoinverse via a full-rank factorization `M = F G`:
/// `M^+ = G^T (G G^T)^{-1} (F^T F)^{-1} F^T`.
pub fn pinv<T: Scalar>(m: &Mat<T>) -> Mat<T> {
    let (re, pivots) = rref(m);
    let r = pivots.len();
    if r == 0 {
        return Mat::zeros(m.cols(), m.rows());
    }
    let all_rows: Vec<usize> = (0..m.rows()).collect();
    let f = m.submatrix(&all_rows, &pivots);
    let g = re.submatrix(&(0..r).collect::<Vec<_>>(), &(0..m.cols()).collect::<Vec<_>>());
    let gt = g.transpose();
    let ft = f.transpose();
    let ggt_inv = inverse(&g.matmul(&gt)).expect("G G^T is invertible for a full-rank factorization");
    let ftf_inv = inverse(&ft.matmul(&f)).expect("F^T F is invertible for a full-rank factorization");
    gt.matmul(&ggt_inv).matmul(&ftf_inv).matmul(&ft)
}

/// Which corner block a Schur complement is taken onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchurSide {
    /// `M / A`: eliminate the leading `head` indices.
    Head,
    /// `M / D`: eliminate the trailing block.
    Tail,
}

/// Generalized Schur complement of the symmetric block matrix
/// `M = [[A, B], [B^T, D]]` with `A` of size `head`, using pseudoinverses:
/// `M / A = D - B^T A^+ B` or `M / D = A - B D^+ B^T`.
pub fn schur_complement<T: Scalar>(m: &Mat<T>, head: usize, side: SchurSide) -> Mat<T> {
    assert!(m.is_square() && head <= m.rows(), "bad Schur split");
    let n = m.rows();
    let hi: Vec<usize> = (0..head).collect();
    let ti: Vec<usize> = (head..n).collect();
    let a = m.principal(&hi);
    let b = m.submatrix(&hi, &ti);
    let d = m.principal(&ti);
    match side {
        SchurSide::Head => d.sub(&b.transpose().matmul(&pinv(&a)).matmul(&b)),
        SchurSide::Tail => a.sub(&b.matmul(&pinv(&d)).matmul(&b.transpose())),
    }
}

/// Outcome of the exact `L D L^T` positive-semidefiniteness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsdReport {
    pub psd: bool,
    /// Number of positive pivots; equals the rank when `psd` holds.
    pub rank: usize,
}

/// Exact positive-semidefiniteness of a symmetric matrix by `L D L^T` with
/// symmetric pivoting: pivot on a positive diagonal entry, stop with a
/// verdict when a diagonal entry is negative, and demand an all-zero residual
/// block when the remaining diagonal vanishes.
pub fn ldlt_psd<T: Scalar>(m: &Mat<T>) -> Result<PsdReport, LinalgError> {
    if !m.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = m.rows();
    let mut w = m.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    loop {
        if active.iter().any(|&i| w[(i, i)].is_neg()) {
            return Ok(PsdReport { psd: false, rank });
        }
        let Some(pos) = active.iter().position(|&i| w[(i, i)].is_pos()) else {
            // All remaining diagonal entries are zero: positive
            // semidefiniteness forces the whole residual block to vanish.
            let all_zero = active
                .iter()
                .all(|&i| active.iter().all(|&j| w[(i, j)].is_zero()));
            return Ok(PsdReport { psd: all_zero, rank });
        };
        let p = active.remove(pos);
        let d = w[(p, p)].clone();
        for &i in &active {
            for &j in &active {
                let upd = w[(i, j)].clone() - w[(i, p)].clone() * w[(p, j)].clone() / d.clone();
                w[(i, j)] = upd;
            }
        }
        rank += 1;
    }
}

pub fn is_psd<T: Scalar>(m: &Mat<T>) -> bool {
    ldlt_psd(m).map(|r| r.psd).unwrap_or(false)
}

pub fn is_pd<T: Scalar>(m: &Mat<T>) -> bool {
    ldlt_psd(m).map(|r| r.psd && r.rank == m.rows()).unwrap_or(false)
}

/// Block-wise positive-semidefiniteness certificate for
/// `M = [[A, B], [B^T, D]]`: `M` is psd iff `A` is psd, the columns of `B`
/// lie in the column space of `A`, and the Schur complement `M / A` is psd;
/// and then `rank M = rank A + rank(M / A)`.
#[derive(Clone, Debug)]
pub struct BlockPsdReport {
    pub corner_psd: bool,
    pub colspace_ok: bool,
    pub schur_psd: bool,
    pub rank_m: usize,
    pub rank_corner: usize,
    pub rank_schur: usize,
}

impl BlockPsdReport {
    pub fn psd(&self) -> bool {
        self.corner_psd && self.colspace_ok && self.schur_psd
    }
    pub fn total_rank(&self) -> usize {
        self.rank_corner + self.rank_schur
    }
}

pub fn block_psd<T: Scalar>(m: &Mat<T>, head: usize) -> Result<BlockPsdReport, LinalgError> {
    if !m.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = m.rows();
    let hi: Vec<usize> = (0..head).collect();
    let ti: Vec<usize> = (head..n).collect();
    let a = m.principal(&hi);
    let b = m.submatrix(&hi, &ti);
    let corner = ldlt_psd(&a)?;
    let ap = pinv(&a);
    let colspace_ok = a.matmul(&ap).matmul(&b) == b;
    let schur = m.principal(&ti).sub(&b.transpose().matmul(&ap).matmul(&b));
    let schur_rep = ldlt_psd(&schur)?;
    let report = BlockPsdReport {
        corner_psd: corner.psd,
        colspace_ok,
        schur_psd: schur_rep.psd,
        rank_m: rank(m),
        rank_corner: corner.rank,
        rank_schur: schur_rep.rank,
    };
    // Rank additivity across the block split holds for every psd matrix.
    assert!(
        !report.psd() || report.rank_m == report.total_rank(),
        "rank additivity violated on a psd matrix"
    );
    Ok(report)
}

/// Exact solve of `A W = B` in the least-squares-consistent sense: returns
/// `W = A^+ B` after verifying `A A^+ B = B`, i.e. that the system is
/// solvable at all.
pub fn colspace_solve<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>, LinalgError> {
    if a.rows() != b.rows() {
        return Err(LinalgError::ShapeMismatch(format!(
            "A has {} rows, B has {}",
            a.rows(),
            b.rows()
        )));
    }
    let ap = pinv(a);
    let w = ap.matmul(b);
    if a.matmul(&w) == *b {
        Ok(w)
    } else {
        Err(LinalgError::Inconsistent)
    }
}

/// [`colspace_solve`] for a bordered symmetric matrix `[[A, B], [B^T, C]]`
/// whose rank equals the rank of `A`: under that hypothesis `W = A^+ B`
/// additionally reproduces the tail block as `B^T W = C`, and this verifies
/// both identities, reporting inconsistency otherwise.
pub fn colspace_solve_bordered<T: Scalar>(
    a: &Mat<T>,
    b: &Mat<T>,
    c: &Mat<T>,
) -> Result<Mat<T>, LinalgError> {
    let w = colspace_solve(a, b)?;
    if b.transpose().matmul(&w) == *c {
        Ok(w)
    } else {
        Err(LinalgError::Inconsistent)
    }
}

/// Checks that every kernel vector of a principal submatrix (at `embed`
/// positions) extends by zeros to a kernel vector of the full matrix.
pub fn kernel_extends<T: Scalar>(small: &Mat<T>, big: &Mat<T>, embed: &[usize]) -> bool {
    assert_eq!(small.cols(), embed.len(), "embedding length mismatch");
    for v in kernel_basis(small) {
        let mut vhat = Mat::zeros(big.cols(), 1);
        for (t, &pos) in embed.iter().enumerate() {
            vhat[(pos, 0)] = v[(t, 0)].clone();
        }
        if !big.matmul(&vhat).is_zero() {
            return false;
        }
    }
    true
}

/// A real symmetric matrix with every entry known except one symmetric
/// off-diagonal pair.
#[derive(Clone, Debug)]
pub struct PartialSymMat {
    /// Known entries; the missing pair's slots are ignored.
    pub entries: Mat<Rat>,
    /// Missing position `(i, j)` with `i != j` (the symmetric slot
    /// `(j, i)` is missing too).
    pub missing: (usize, usize),
}

/// Result of completing a partially specified psd matrix in its single
/// missing entry: the feasible closed interval `[x_minus, x_plus]`, with the
/// rank at the endpoints and in the interior.
#[derive(Clone, Debug)]
pub struct Completion {
    pub x_minus: QuadExt,
    pub x_plus: QuadExt,
    /// Rank of the completed matrix at either endpoint.
    pub rank_endpoint: usize,
    /// Rank of the completed matrix for interior choices.
    pub rank_interior: usize,
    /// True when the interval degenerates to a single point.
    pub degenerate: bool,
}

/// Completes `A(x)`, symmetric with one unknown off-diagonal pair, to a psd
/// matrix: after permuting the unknown into the bottom-right `2x2` corner,
/// `A(x) = [[A1, a, b], [a^T, alpha, x], [b^T, x, gamma]]` is psd exactly for
/// `x` in `[x0 - s, x0 + s]` where `x0 = b^T A1^+ a` and
/// `s = sqrt((alpha - a^T A1^+ a)(gamma - b^T A1^+ b))`.
///
/// Errors when the two fully specified maximal principal submatrices are not
/// both psd (equivalently, when the partial matrix is not partially psd).
pub fn psd_completion(p: &PartialSymMat) -> Result<Completion, LinalgError> {
    let n = p.entries.rows();
    let (mi, mj) = p.missing;
    if mi == mj || mi >= n || mj >= n {
        return Err(LinalgError::BadMissingEntry(mi, mj));
    }
    let m = &p.entries;
    // Symmetry of the known part (ignoring the missing pair).
    for i in 0..n {
        for j in 0..i {
            if (i, j) == (mi, mj) || (i, j) == (mj, mi) {
                continue;
            }
            if m[(i, j)] != m[(j, i)] {
                return Err(LinalgError::NotSymmetric);
            }
        }
    }
    let others: Vec<usize> = (0..n).filter(|&t| t != mi && t != mj).collect();
    let a1 = m.principal(&others);
    let a = m.submatrix(&others, &[mi]);
    let b = m.submatrix(&others, &[mj]);
    let alpha = m[(mi, mi)].clone();
    let gamma = m[(mj, mj)].clone();

    let mut with_i = others.clone();
    with_i.push(mi);
    let mut with_j = others.clone();
    with_j.push(mj);
    let a2 = m.principal(&with_i);
    let a3 = m.principal(&with_j);
    let rep2 = ldlt_psd(&a2)?;
    let rep3 = ldlt_psd(&a3)?;
    if !rep2.psd || !rep3.psd {
        return Err(LinalgError::NotPartialPsd);
    }

    let a1p = pinv(&a1);
    let x0 = dot(&b, &a1p.matmul(&a));
    let s2 = alpha - dot(&a, &a1p.matmul(&a));
    let s3 = gamma - dot(&b, &a1p.matmul(&b));
    let prod = &s2 * &s3;
    let root = QuadExt::sqrt_rat(&prod);
    let x0q = QuadExt::from_rat(x0);
    let degenerate = prod.is_zero();
    let rank_endpoint = rep2.rank.max(rep3.rank);
    Ok(Completion {
        x_minus: x0q.clone() - root.clone(),
        x_plus: x0q + root,
        rank_endpoint,
        rank_interior: rank_endpoint + 1,
        degenerate,
    })
}
