//! Bivariate truncated moment sequences and their moment matrices.
//!
//! Monomials of the plane are ordered degree-lexicographically as
//! `1, X, Y, X^2, XY, Y^2, ...`; within degree `d` the power of `Y` rises
//! from `0` to `d`. Every module in this crate addresses rows and columns of
//! moment matrices through this single bijection.

use std::collections::BTreeMap;

use crate::linalg::Mat;
use crate::scalar::{Rat, Scalar};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("polynomial degree {0} exceeds the sequence degree {1}")]
    DegreeOverflow(usize, usize),
    #[error("affine transformation is singular")]
    SingularTransform,
    #[error("sequence data incomplete: missing index ({0},{1})")]
    MissingIndex(usize, usize),
    #[error("half-degree k={0} is below the cubic solvers' minimum of 3")]
    DegreeTooSmall(usize),
}

/// Number of monomials of degree at most `deg`.
pub fn mono_count(deg: usize) -> usize {
    (deg + 1) * (deg + 2) / 2
}

/// Position of `X^i Y^j` in the degree-lexicographic order.
pub fn mono_pos(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Inverse of [`mono_pos`].
pub fn mono_at(pos: usize) -> (usize, usize) {
    let mut d = 0usize;
    while (d + 1) * (d + 2) / 2 <= pos {
        d += 1;
    }
    let j = pos - d * (d + 1) / 2;
    (d - j, j)
}

/// All exponent pairs of degree at most `deg`, in order.
pub fn monos_up_to(deg: usize) -> Vec<(usize, usize)> {
    (0..mono_count(deg)).map(mono_at).collect()
}

/// Sparse bivariate polynomial with exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BivPoly<T: Scalar> {
    terms: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> BivPoly<T> {
    pub fn zero() -> Self {
        BivPoly { terms: BTreeMap::new() }
    }

    pub fn term(i: usize, j: usize, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BivPoly { terms }
    }

    pub fn constant(c: T) -> Self {
        Self::term(0, 0, c)
    }

    pub fn from_terms(list: Vec<((usize, usize), T)>) -> Self {
        let mut p = BivPoly::zero();
        for ((i, j), c) in list {
            p.add_term(i, j, c);
        }
        p
    }

    fn add_term(&mut self, i: usize, j: usize, c: T) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &T)> {
        self.terms.iter()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return BivPoly::zero();
        }
        BivPoly {
            terms: self
                .terms
                .iter()
                .map(|(&k, v)| (k, v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = BivPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = BivPoly::constant(T::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let mut acc = T::zero();
        for (&(i, j), c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..i {
                t = t * x.clone();
            }
            for _ in 0..j {
                t = t * y.clone();
            }
            acc = acc + t;
        }
        acc
    }
}

/// The three reducible cubics `y * q(x, y) = 0` handled by the solvers, with
/// `q` a hyperbola through suitable coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Curve {
    /// `y (1 - xy) = 0`
    Hyp1,
    /// `y (x + y + a xy) = 0`, `a != 0`; `a = -1` is the canonical form.
    Hyp2 { a: Rat },
    /// `y (a y + x^2 - y^2) = 0`, `a != 0`.
    Hyp3 { a: Rat },
}

impl Curve {
    /// Nonzero curve parameter where one applies.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Curve::Hyp1 => Ok(()),
            Curve::Hyp2 { a } | Curve::Hyp3 { a } => {
                if a.is_zero() {
                    Err("curve coefficient a must be nonzero".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The defining cubic as an exact polynomial.
    pub fn cubic(&self) -> BivPoly<Rat> {
        match self {
            // y - x y^2
            Curve::Hyp1 => BivPoly::from_terms(vec![
                ((0, 1), Rat::from_integer(1.into())),
                ((1, 2), Rat::from_integer((-1).into())),
            ]),
            // x y + y^2 + a x y^2
            Curve::Hyp2 { a } => BivPoly::from_terms(vec![
                ((1, 1), Rat::from_integer(1.into())),
                ((0, 2), Rat::from_integer(1.into())),
                ((1, 2), a.clone()),
            ]),
            // a y^2 + x^2 y - y^3
            Curve::Hyp3 { a } => BivPoly::from_terms(vec![
                ((0, 2), a.clone()),
                ((2, 1), Rat::from_integer(1.into())),
                ((0, 3), Rat::from_integer((-1).into())),
            ]),
        }
    }

    /// Exact membership test.
    pub fn contains(&self, x: &Rat, y: &Rat) -> bool {
        self.cubic().eval(x, y).is_zero()
    }
}

/// Report from [`BivSeq::check_relations`]: each violation names the shift
/// `(i, j)` whose cubic moment identity failed.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub ok: bool,
    pub violations: Vec<(usize, usize)>,
}

/// A real bivariate sequence truncated at degree `2k`, stored densely in the
/// degree-lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct BivSeq<T: Scalar> {
    k: usize,
    beta: Vec<T>,
}

impl<T: Scalar> BivSeq<T> {
    /// Builds a sequence of half-degree `k` from an entry function.
    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let beta = monos_up_to(2 * k).into_iter().map(|(i, j)| f(i, j)).collect();
        BivSeq { k, beta }
    }

    /// Builds from a sparse map, requiring every index of degree ≤ 2k.
    pub fn from_map(k: usize, map: &BTreeMap<(usize, usize), T>) -> Result<Self, SeqError> {
        let mut beta = Vec::with_capacity(mono_count(2 * k));
        for (i, j) in monos_up_to(2 * k) {
            match map.get(&(i, j)) {
                Some(v) => beta.push(v.clone()),
                None => return Err(SeqError::MissingIndex(i, j)),
            }
        }
        Ok(BivSeq { k, beta })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Truncation degree `2k`.
    pub fn degree(&self) -> usize {
        2 * self.k
    }

    /// `β_{i,j}`; panics when `i + j > 2k`.
    pub fn get(&self, i: usize, j: usize) -> &T {
        assert!(i + j <= 2 * self.k, "moment index ({i},{j}) exceeds degree {}", 2 * self.k);
        &self.beta[mono_pos(i, j)]
    }

    /// The total mass `β_{0,0}`.
    pub fn mass(&self) -> &T {
        &self.beta[0]
    }

    /// Restricts to a lower half-degree `k' ≤ k`.
    pub fn truncate(&self, k_new: usize) -> Self {
        assert!(k_new <= self.k);
        BivSeq::from_fn(k_new, |i, j| self.get(i, j).clone())
    }

    /// The full moment matrix `M(k)` in degree-lexicographic order: the
    /// entry at row `X^a Y^b`, column `X^c Y^d` is `β_{a+c, b+d}`.
    pub fn moment_matrix(&self) -> Mat<T> {
        let monos = monos_up_to(self.k);
        Mat::from_fn(monos.len(), monos.len(), |p, q| {
            let (a, b) = monos[p];
            let (c, d) = monos[q];
            self.get(a + c, b + d).clone()
        })
    }

    /// Submatrix of `M(k)` with the given row and column monomials, in the
    /// given order. Every monomial must have degree ≤ k.
    pub fn restricted(&self, rows: &[(usize, usize)], cols: &[(usize, usize)]) -> Mat<T> {
        for &(i, j) in rows.iter().chain(cols) {
            assert!(i + j <= self.k, "monomial X^{i}Y^{j} exceeds degree {}", self.k);
        }
        Mat::from_fn(rows.len(), cols.len(), |p, q| {
            let (a, b) = rows[p];
            let (c, d) = cols[q];
            self.get(a + c, b + d).clone()
        })
    }

    /// The Riesz functional `L_β(p) = Σ c_{ij} β_{ij}` for `deg p ≤ 2k`.
    pub fn riesz(&self, p: &BivPoly<T>) -> Result<T, SeqError> {
        if let Some(d) = p.deg() {
            if d > 2 * self.k {
                return Err(SeqError::DegreeOverflow(d, 2 * self.k));
            }
        }
        let mut acc = T::zero();
        for (&(i, j), c) in p.terms() {
            acc = acc + c.clone() * self.get(i, j).clone();
        }
        Ok(acc)
    }

    /// Evaluates `p(X, Y)` on the columns of `M(k)`: the result is the zero
    /// vector exactly when `p` is a column relation. Requires `deg p ≤ k`.
    pub fn column_relation(&self, p: &BivPoly<T>) -> Result<Mat<T>, SeqError> {
        if let Some(d) = p.deg() {
            if d > self.k {
                return Err(SeqError::DegreeOverflow(d, self.k));
            }
        }
        let monos = monos_up_to(self.k);
        let mut out = Mat::zeros(monos.len(), 1);
        for (row, &(a, b)) in monos.iter().enumerate() {
            let mut acc = T::zero();
            for (&(i, j), c) in p.terms() {
                acc = acc + c.clone() * self.get(a + i, b + j).clone();
            }
            out[(row, 0)] = acc;
        }
        Ok(out)
    }

    /// Pushes the sequence through the affine map
    /// `φ(x, y) = (a + b x + c y, d + e x + f y)`:
    /// the result has `β̃_{i,j} = L_β(φ_1^i φ_2^j)`. The map must be
    /// invertible (`b f − c e ≠ 0`).
    #[allow(clippy::many_single_char_names)]
    pub fn affine_apply(
        &self,
        a: &T,
        b: &T,
        c: &T,
        d: &T,
        e: &T,
        f: &T,
    ) -> Result<Self, SeqError> {
        if (b.clone() * f.clone() - c.clone() * e.clone()).is_zero() {
            return Err(SeqError::SingularTransform);
        }
        let phi1 = BivPoly::from_terms(vec![
            ((0, 0), a.clone()),
            ((1, 0), b.clone()),
            ((0, 1), c.clone()),
        ]);
        let phi2 = BivPoly::from_terms(vec![
            ((0, 0), d.clone()),
            ((1, 0), e.clone()),
            ((0, 1), f.clone()),
        ]);
        let deg = 2 * self.k;
        let mut p1_pows = Vec::with_capacity(deg + 1);
        let mut p2_pows = Vec::with_capacity(deg + 1);
        p1_pows.push(BivPoly::constant(T::one()));
        p2_pows.push(BivPoly::constant(T::one()));
        for t in 1..=deg {
            p1_pows.push(p1_pows[t - 1].mul(&phi1));
            p2_pows.push(p2_pows[t - 1].mul(&phi2));
        }
        let mut out = Vec::with_capacity(mono_count(deg));
        for (i, j) in monos_up_to(deg) {
            out.push(self.riesz(&p1_pows[i].mul(&p2_pows[j]))?);
        }
        Ok(BivSeq { k: self.k, beta: out })
    }

    /// Checks every moment identity the curve's cubic imposes: for all
    /// shifts with `i + j ≤ 2k − 3`, `L_β(x^i y^j · cubic) = 0`.
    pub fn check_relations(&self, curve: &Curve) -> RelationReport {
        let cubic: BivPoly<T> = BivPoly::from_terms(
            curve
                .cubic()
                .terms()
                .map(|(&(i, j), c)| ((i, j), T::from_rat(c.clone())))
                .collect(),
        );
        let mut violations = Vec::new();
        if self.degree() >= 3 {
            for (i, j) in monos_up_to(self.degree() - 3) {
                let shifted = BivPoly::term(i, j, T::one()).mul(&cubic);
                if !self.riesz(&shifted).expect("degree bounded by 2k").is_zero() {
                    violations.push((i, j));
                }
            }
        }
        RelationReport { ok: violations.is_empty(), violations }
    }

    /// Componentwise map into another scalar type.
    pub fn map_scalar<S: Scalar>(&self) -> BivSeq<S>
    where
        T: Clone,
    {
        BivSeq {
            k: self.k,
            beta: self.beta.iter().map(|v| S::from_rat(v.as_rat().expect(
                "map_scalar requires rational entries",
            ))).collect(),
        }
    }
}
