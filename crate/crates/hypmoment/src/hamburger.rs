//! Truncated moment problems on the real line: existence tests, rank
//! reporting, and construction of atomic representing measures, including the
//! variant whose support must avoid the origin.

use num_traits::One;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::linalg::{is_pd, ldlt_psd, rank, solve, Mat};
use crate::measure::{line_residual, residual_ok, LineAtom, LineMeasure, RealValue};
use crate::poly::{resolve_roots, Poly, ResolvedRoot};
use crate::scalar::{Rat, Scalar};

/// Moments `(γ_0, …, γ_{2m})` of a measure on the real line, in even degree.
#[derive(Clone, Debug, PartialEq)]
pub struct UniSeq<T: Scalar> {
    entries: Vec<T>,
}

impl<T: Scalar> UniSeq<T> {
    /// Wraps an odd-length list of moments `(γ_0, …, γ_{2m})`.
    pub fn new(entries: Vec<T>) -> Self {
        assert!(entries.len() % 2 == 1, "moment list must have odd length 2m+1");
        UniSeq { entries }
    }

    /// The parameter `m` for a sequence of degree `2m`.
    pub fn half_degree(&self) -> usize {
        (self.entries.len() - 1) / 2
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, j: usize) -> &T {
        &self.entries[j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|g| g.is_zero())
    }

    /// The full Hankel matrix `H[i][j] = γ_{i+j}` of size `(m+1) × (m+1)`.
    pub fn hankel(&self) -> Mat<T> {
        let n = self.half_degree() + 1;
        Mat::from_fn(n, n, |i, j| self.entries[i + j].clone())
    }

    /// The leading principal `size × size` corner of the Hankel matrix.
    pub fn corner(&self, size: usize) -> Mat<T> {
        assert!(size <= self.half_degree() + 1);
        Mat::from_fn(size, size, |i, j| self.entries[i + j].clone())
    }

    /// The trailing principal `size × size` block of the Hankel matrix.
    pub fn tail(&self, size: usize) -> Mat<T> {
        let n = self.half_degree() + 1;
        assert!(size <= n);
        let off = n - size;
        Mat::from_fn(size, size, |i, j| self.entries[off + i + off + j].clone())
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> UniSeq<U> {
        UniSeq { entries: self.entries.iter().map(f).collect() }
    }
}

/// Which clause of the line-representability test settled the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamburgerBranch {
    /// The corner `A_γ(m−1)` is positive definite.
    CornerPd,
    /// Singular corner, but its rank matches the full Hankel rank.
    FlatRank,
    /// The Hankel matrix is not positive semidefinite.
    NotPsd,
    /// Psd, but the rank jumps from the corner to the full matrix.
    RankJump,
}

/// Existence verdict for a representing measure on the real line.
#[derive(Clone, Debug)]
pub struct HamburgerReport {
    pub representable: bool,
    /// The Hankel rank; equals the atom count of a minimal measure when one
    /// exists.
    pub rank: usize,
    pub branch: HamburgerBranch,
}

/// Decides whether `(γ_0, …, γ_{2m})` has a representing measure on the real
/// line: the Hankel matrix must be psd and either its corner `A_γ(m−1)` is
/// positive definite or the corner already attains the full rank.
pub fn solve_hamburger<T: Scalar>(g: &UniSeq<T>) -> HamburgerReport {
    let a = g.hankel();
    let full_rank = rank(&a);
    let psd = ldlt_psd(&a).map(|r| r.psd).unwrap_or(false);
    if !psd {
        return HamburgerReport { representable: false, rank: full_rank, branch: HamburgerBranch::NotPsd };
    }
    let m = g.half_degree();
    let corner = g.corner(m);
    if is_pd(&corner) {
        return HamburgerReport { representable: true, rank: full_rank, branch: HamburgerBranch::CornerPd };
    }
    if rank(&corner) == full_rank {
        return HamburgerReport { representable: true, rank: full_rank, branch: HamburgerBranch::FlatRank };
    }
    HamburgerReport { representable: false, rank: full_rank, branch: HamburgerBranch::RankJump }
}

/// Which clause of the origin-avoiding representability test settled the
/// verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrongBranch {
    /// The full Hankel matrix is positive definite.
    FullPd,
    /// Rank of the full matrix, its leading corner, and its trailing block
    /// all agree.
    TripleFlat,
    /// The Hankel matrix is not positive semidefinite.
    NotPsd,
    /// Psd, but the corner or trailing rank falls short of the full rank.
    RankMismatch,
}

/// Existence verdict for a representing measure on `ℝ ∖ {0}`.
#[derive(Clone, Debug)]
pub struct StrongReport {
    pub representable: bool,
    pub rank: usize,
    pub branch: StrongBranch,
}

/// Decides whether `(γ_0, …, γ_{2K})` has a representing measure supported
/// away from the origin: the Hankel matrix must be psd and either positive
/// definite or of one common rank with both its leading corner and trailing
/// block of size `K`.
pub fn solve_strong<T: Scalar>(g: &UniSeq<T>) -> StrongReport {
    let a = g.hankel();
    let n = g.half_degree() + 1;
    let full_rank = rank(&a);
    let psd = ldlt_psd(&a).map(|r| r.psd).unwrap_or(false);
    if !psd {
        return StrongReport { representable: false, rank: full_rank, branch: StrongBranch::NotPsd };
    }
    if full_rank == n {
        return StrongReport { representable: true, rank: full_rank, branch: StrongBranch::FullPd };
    }
    let k = n - 1;
    if rank(&g.corner(k)) == full_rank && rank(&g.tail(k)) == full_rank {
        return StrongReport { representable: true, rank: full_rank, branch: StrongBranch::TripleFlat };
    }
    StrongReport { representable: false, rank: full_rank, branch: StrongBranch::RankMismatch }
}

/// Failure modes of line-measure extraction.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("the sequence has no representing measure of the requested kind")]
    NotRepresentable,
    #[error("generating polynomial produced {found} real roots, expected {expected}")]
    RootCount { expected: usize, found: usize },
    #[error("computed atom weight is not positive")]
    NonPositiveWeight,
    #[error("no flat extension avoids an atom at the origin")]
    CannotAvoidZero,
    #[error("reconstructed moments exceed the promised tolerance")]
    ResidualExceeded,
}

/// Builds an atomic representing measure with exactly `Rank A_γ` atoms.
///
/// With `avoid_zero` set, existence is judged by the origin-avoiding test and
/// the returned atoms are all nonzero. In the flat case the generating
/// polynomial is solved from the leading `Rank A_γ`-sized corner; in the
/// positive-definite case the sequence is first extended one degree by a flat
/// extension (trying the two canonical choices of the odd moment when the
/// origin must be avoided).
pub fn extract_line_measure<T: Scalar>(
    g: &UniSeq<T>,
    avoid_zero: bool,
    prec: u64,
) -> Result<LineMeasure, ExtractError> {
    let (representable, r) = if avoid_zero {
        let rep = solve_strong(g);
        (rep.representable, rep.rank)
    } else {
        let rep = solve_hamburger(g);
        (rep.representable, rep.rank)
    };
    if !representable {
        return Err(ExtractError::NotRepresentable);
    }
    if r == 0 {
        return Ok(LineMeasure::default());
    }

    let n = g.half_degree() + 1;
    let mu = if r == n {
        // Positive definite: extend by one degree to reach a flat sequence of
        // rank r, choosing the free odd moment so no atom lands at 0.
        let mut result = Err(ExtractError::CannotAvoidZero);
        for s in [0i64, 1] {
            let ext = flat_extension(g, T::from_int(s));
            match extract_flat(&ext, r, prec) {
                Ok(m) => {
                    if avoid_zero && has_zero_atom(&m) {
                        continue;
                    }
                    result = Ok(m);
                    break;
                }
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        result?
    } else {
        let m = extract_flat(g, r, prec)?;
        if avoid_zero && has_zero_atom(&m) {
            // A flat origin-avoiding sequence cannot place mass at 0; hitting
            // this means the existence test was wrong upstream.
            return Err(ExtractError::CannotAvoidZero);
        }
        m
    };

    let residual = line_residual(&mu, g.entries(), prec);
    if !residual_ok(&residual, prec) {
        return Err(ExtractError::ResidualExceeded);
    }
    Ok(mu)
}

/// Extends `(γ_0, …, γ_{2m})` with `γ_{2m+1} = s` and the unique `γ_{2m+2}`
/// keeping the Hankel rank flat (the Schur complement of the new corner
/// vanishes). Requires the full Hankel matrix to be positive definite.
fn flat_extension<T: Scalar>(g: &UniSeq<T>, s: T) -> UniSeq<T> {
    let a = g.hankel();
    let m = g.half_degree();
    let mut entries = g.entries().to_vec();
    entries.push(s);
    let b = Mat::col_vec(&entries[m + 1..]);
    let w = solve(&a, &b).expect("flat extension needs a positive definite Hankel matrix");
    let last = crate::linalg::dot(&b, &w);
    entries.push(last);
    UniSeq::new(entries)
}

/// Extracts the unique `r`-atomic measure of a flat psd sequence whose
/// leading `r × r` corner is positive definite.
fn extract_flat<T: Scalar>(g: &UniSeq<T>, r: usize, prec: u64) -> Result<LineMeasure, ExtractError> {
    // Generating polynomial x^r − c_{r−1} x^{r−1} − … − c_0 from the Hankel
    // system A_γ(r−1) c = (γ_r, …, γ_{2r−1}).
    let corner = g.corner(r);
    let rhs = Mat::col_vec(&g.entries()[r..2 * r]);
    let c = solve(&corner, &rhs).ok_or(ExtractError::NotRepresentable)?;
    let mut coeffs: Vec<T> = (0..r).map(|i| -c[(i, 0)].clone()).collect();
    coeffs.push(T::one());
    let p = Poly::new(coeffs);

    let roots = resolve_roots(&p, 2 * prec);
    if roots.len() != r {
        return Err(ExtractError::RootCount { expected: r, found: roots.len() });
    }

    if roots.iter().all(|x| matches!(x, ResolvedRoot::Exact(_))) {
        let nodes: Vec<Rat> = roots
            .iter()
            .map(|x| match x {
                ResolvedRoot::Exact(v) => v.clone(),
                ResolvedRoot::Approx { .. } => unreachable!(),
            })
            .collect();
        weights_exact(g, &nodes, prec)
    } else {
        weights_dyadic(g, &roots, prec)
    }
}

/// Solves the Vandermonde system for the weights in the coefficient field
/// when every atom is rational.
fn weights_exact<T: Scalar>(
    g: &UniSeq<T>,
    nodes: &[Rat],
    prec: u64,
) -> Result<LineMeasure, ExtractError> {
    let r = nodes.len();
    let v = Mat::from_fn(r, r, |i, j| {
        let mut p = Rat::one();
        for _ in 0..i {
            p *= nodes[j].clone();
        }
        T::from_rat(p)
    });
    let rhs = Mat::col_vec(&g.entries()[..r]);
    let w = solve(&v, &rhs).ok_or(ExtractError::NonPositiveWeight)?;
    let mut atoms = Vec::with_capacity(r);
    for (j, x) in nodes.iter().enumerate() {
        let weight = w[(j, 0)].clone();
        if weight.sgn() <= 0 {
            return Err(ExtractError::NonPositiveWeight);
        }
        atoms.push(LineAtom {
            position: RealValue::Rational(x.clone()),
            weight: RealValue::from_scalar(&weight, prec),
        });
    }
    Ok(LineMeasure { atoms })
}

/// Solves the Vandermonde system for the weights in dyadic arithmetic when
/// some atom is irrational.
fn weights_dyadic<T: Scalar>(
    g: &UniSeq<T>,
    roots: &[ResolvedRoot],
    prec: u64,
) -> Result<LineMeasure, ExtractError> {
    let wp = 2 * prec + 32;
    let r = roots.len();
    let nodes: Vec<Dyadic> = roots
        .iter()
        .map(|x| match x {
            ResolvedRoot::Exact(v) => Dyadic::from_rat(v, wp),
            ResolvedRoot::Approx { value, .. } => value.clone(),
        })
        .collect();
    let mut v = vec![vec![Dyadic::zero(); r]; r];
    for (j, x) in nodes.iter().enumerate() {
        let mut p = Dyadic::new(num_bigint::BigInt::one(), 0);
        for row in v.iter_mut() {
            row[j] = p.clone();
            p = p.mul(x).round_to(wp);
        }
    }
    let rhs: Vec<Dyadic> = g.entries()[..r].iter().map(|t| t.to_dyadic(wp)).collect();
    let w = solve_dense_dyadic(v, rhs, wp).ok_or(ExtractError::NonPositiveWeight)?;
    let mut atoms = Vec::with_capacity(r);
    for (j, x) in roots.iter().enumerate() {
        let weight = w[j].clone();
        if weight.is_zero() || weight.is_negative() {
            return Err(ExtractError::NonPositiveWeight);
        }
        let position = match x {
            ResolvedRoot::Exact(v) => RealValue::Rational(v.clone()),
            ResolvedRoot::Approx { value, .. } => RealValue::Approx(value.round_to(prec)),
        };
        atoms.push(LineAtom { position, weight: RealValue::Approx(weight.round_to(prec)) });
    }
    Ok(LineMeasure { atoms })
}

/// Gaussian elimination with partial pivoting over dyadic values, rounding
/// intermediates to `wp` bits.
fn solve_dense_dyadic(mut a: Vec<Vec<Dyadic>>, mut b: Vec<Dyadic>, wp: u64) -> Option<Vec<Dyadic>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().cmp(&a[j][col].abs()))?;
        if a[pivot][col].is_zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].div_prec(&a[col][col], wp);
            for j in col..n {
                let t = f.mul(&a[col][j]).round_to(wp);
                a[i][j] = a[i][j].sub(&t).round_to(wp);
            }
            let t = f.mul(&b[col]).round_to(wp);
            b[i] = b[i].sub(&t).round_to(wp);
        }
    }
    let mut x = vec![Dyadic::zero(); n];
    for col in (0..n).rev() {
        let mut acc = b[col].clone();
        for j in col + 1..n {
            acc = acc.sub(&a[col][j].mul(&x[j]).round_to(wp)).round_to(wp);
        }
        x[col] = acc.div_prec(&a[col][col], wp);
    }
    Some(x)
}

fn has_zero_atom(m: &LineMeasure) -> bool {
    m.atoms.iter().any(|a| a.position.is_zero())
}
