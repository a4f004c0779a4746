//! Atomic measures on the line and in the plane, with values kept exact
//! whenever the computation stays inside the rationals or a single real
//! quadratic extension, and high-precision dyadic approximations otherwise.

use num_traits::{One, Zero};

use crate::dyadic::Dyadic;
use crate::scalar::{rat, rat_string, QuadExt, Rat, Scalar};
use crate::seq::BivSeq;
use std::fmt;

/// A real number carried either exactly or as a dyadic approximation.
///
/// Exact variants survive arithmetic verification without tolerance; the
/// approximate variant records a value rounded to a stated precision.
#[derive(Clone, Debug)]
pub enum RealValue {
    Rational(Rat),
    Quadratic(QuadExt),
    Approx(Dyadic),
}

impl RealValue {
    /// Classifies a scalar: rational when possible, else quadratic when the
    /// element lives in a real quadratic extension, else a `prec`-bit
    /// approximation.
    pub fn from_scalar<T: Scalar>(v: &T, prec: u64) -> RealValue {
        if let Some(r) = v.as_rat() {
            return RealValue::Rational(r);
        }
        if let Some(q) = v.as_quad() {
            return RealValue::Quadratic(q);
        }
        RealValue::Approx(v.to_dyadic(prec))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, RealValue::Approx(_))
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            RealValue::Rational(r) => Some(r.clone()),
            RealValue::Quadratic(q) => Scalar::as_rat(q),
            RealValue::Approx(_) => None,
        }
    }

    /// The value as an element of a quadratic extension, when exact.
    pub fn as_quad(&self) -> Option<QuadExt> {
        match self {
            RealValue::Rational(r) => Some(QuadExt::from_rat(r.clone())),
            RealValue::Quadratic(q) => Some(q.clone()),
            RealValue::Approx(_) => None,
        }
    }

    pub fn to_dyadic(&self, prec: u64) -> Dyadic {
        match self {
            RealValue::Rational(r) => Dyadic::from_rat(r, prec),
            RealValue::Quadratic(q) => q.to_dyadic(prec),
            RealValue::Approx(d) => d.clone(),
        }
    }

    /// Sign of the value: `-1`, `0`, or `1` (exact for exact variants).
    pub fn sgn(&self) -> i8 {
        match self {
            RealValue::Rational(r) => Scalar::sgn(r),
            RealValue::Quadratic(q) => Scalar::sgn(q),
            RealValue::Approx(d) => {
                if d.is_zero() {
                    0
                } else if d.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sgn() == 0
    }

    /// `self + other`, exact when both operands are exact over a shared
    /// radicand, else dyadic at `prec` bits.
    pub fn add(&self, other: &RealValue, prec: u64) -> RealValue {
        binop(self, other, prec, |a, b| a + b, |a, b, _| a.add(b))
    }

    /// `self − other` under the same exactness rules as [`RealValue::add`].
    pub fn sub(&self, other: &RealValue, prec: u64) -> RealValue {
        binop(self, other, prec, |a, b| a - b, |a, b, _| a.sub(b))
    }

    /// `self · other` under the same exactness rules as [`RealValue::add`].
    pub fn mul(&self, other: &RealValue, prec: u64) -> RealValue {
        binop(self, other, prec, |a, b| a * b, |a, b, wp| a.mul(b).round_to(wp))
    }

    /// The reciprocal; panics on zero.
    pub fn inv(&self, prec: u64) -> RealValue {
        match self {
            RealValue::Rational(r) => {
                assert!(!r.is_zero(), "reciprocal of zero");
                RealValue::Rational(Rat::one() / r.clone())
            }
            RealValue::Quadratic(q) => {
                assert!(Scalar::sgn(q) != 0, "reciprocal of zero");
                RealValue::from_scalar(&Scalar::inv(q), prec)
            }
            RealValue::Approx(d) => {
                let one = Dyadic::new(num_bigint::BigInt::one(), 0);
                RealValue::Approx(one.div_prec(d, prec + 32))
            }
        }
    }

    /// `self^n` under the exactness rules of [`RealValue::mul`].
    pub fn pow(&self, n: usize, prec: u64) -> RealValue {
        let mut acc = RealValue::Rational(Rat::one());
        for _ in 0..n {
            acc = acc.mul(self, prec);
        }
        acc
    }

    /// `scale · self + shift` for rational coefficients.
    pub fn affine(&self, scale: &Rat, shift: &Rat, prec: u64) -> RealValue {
        self.mul(&RealValue::Rational(scale.clone()), prec)
            .add(&RealValue::Rational(shift.clone()), prec)
    }
}

/// Applies `fq` when both operands are exact over at most one radicand,
/// else `fd` on dyadic approximations at `prec + 32` working bits.
fn binop(
    a: &RealValue,
    b: &RealValue,
    prec: u64,
    fq: impl Fn(QuadExt, QuadExt) -> QuadExt,
    fd: impl Fn(&Dyadic, &Dyadic, u64) -> Dyadic,
) -> RealValue {
    if let (Some(qa), Some(qb)) = (a.as_quad(), b.as_quad()) {
        if qa.radical_coeff().is_zero()
            || qb.radical_coeff().is_zero()
            || qa.radicand() == qb.radicand()
        {
            return RealValue::from_scalar(&fq(qa, qb), prec);
        }
    }
    let wp = prec + 32;
    RealValue::Approx(fd(&a.to_dyadic(wp), &b.to_dyadic(wp), wp))
}

impl PartialEq for RealValue {
    /// Provable equality: exact variants compare in the field, approximations
    /// compare bit-for-bit, and an exact value never equals an approximation.
    fn eq(&self, other: &Self) -> bool {
        match (self.as_quad(), other.as_quad()) {
            (Some(a), Some(b)) => {
                // Cross-radicand comparison: distinct normalized radicands
                // with irrational parts are never equal.
                if !a.radical_coeff().is_zero()
                    && !b.radical_coeff().is_zero()
                    && a.radicand() != b.radicand()
                {
                    return false;
                }
                a == b
            }
            (None, None) => match (self, other) {
                (RealValue::Approx(a), RealValue::Approx(b)) => a.cmp(b) == std::cmp::Ordering::Equal,
                _ => unreachable!(),
            },
            _ => false,
        }
    }
}

impl fmt::Display for RealValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealValue::Rational(r) => write!(f, "{}", rat_string(r)),
            RealValue::Quadratic(q) => write!(f, "{q}"),
            RealValue::Approx(d) => write!(f, "~{}", d.to_decimal(40)),
        }
    }
}

/// One weighted point mass on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct LineAtom {
    pub position: RealValue,
    pub weight: RealValue,
}

/// A finite positive combination of point masses on the real line, sorted by
/// position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LineMeasure {
    pub atoms: Vec<LineAtom>,
}

impl LineMeasure {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The `j`-th power moment, exactly, when every atom is exact and all
    /// irrational parts share one radicand.
    pub fn moment_exact(&self, j: usize) -> Option<QuadExt> {
        exact_sum(self.atoms.iter().map(|a| {
            let x = a.position.as_quad()?;
            let w = a.weight.as_quad()?;
            let mut p = QuadExt::from_rat(rat(1));
            for _ in 0..j {
                p = p * x.clone();
            }
            Some(w * p)
        }))
    }

    /// The `j`-th power moment as a dyadic value at `prec` bits (plus guard).
    pub fn moment_dyadic(&self, j: usize, prec: u64) -> Dyadic {
        let wp = prec + 32;
        let mut acc = Dyadic::zero();
        for a in &self.atoms {
            let x = a.position.to_dyadic(wp);
            let mut p = Dyadic::new(num_bigint::BigInt::one(), 0);
            for _ in 0..j {
                p = p.mul(&x).round_to(wp);
            }
            acc = acc.add(&a.weight.to_dyadic(wp).mul(&p).round_to(wp));
        }
        acc
    }

    /// Embeds the measure in the plane along the axis `y = 0`.
    pub fn embed_at_y0(&self) -> PlaneMeasure {
        PlaneMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| PlaneAtom {
                    x: a.position.clone(),
                    y: RealValue::Rational(rat(0)),
                    weight: a.weight.clone(),
                })
                .collect(),
        }
    }
}

/// One weighted point mass in the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneAtom {
    pub x: RealValue,
    pub y: RealValue,
    pub weight: RealValue,
}

/// A finite positive combination of point masses in the plane.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlaneMeasure {
    pub atoms: Vec<PlaneAtom>,
}

impl PlaneMeasure {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Concatenates two measures, merging atoms at provably equal locations
    /// by adding their weights.
    pub fn merge(mut self, other: PlaneMeasure, prec: u64) -> PlaneMeasure {
        for atom in other.atoms {
            match self.atoms.iter_mut().find(|a| a.x == atom.x && a.y == atom.y) {
                Some(existing) => {
                    existing.weight = existing.weight.add(&atom.weight, prec);
                }
                None => self.atoms.push(atom),
            }
        }
        self
    }

    /// The moment `∫ x^i y^j dμ` as a dyadic value at `prec` bits.
    pub fn moment_dyadic(&self, i: usize, j: usize, prec: u64) -> Dyadic {
        let wp = prec + 32;
        let mut acc = Dyadic::zero();
        for a in &self.atoms {
            let x = a.x.to_dyadic(wp);
            let y = a.y.to_dyadic(wp);
            let mut p = a.weight.to_dyadic(wp);
            for _ in 0..i {
                p = p.mul(&x).round_to(wp);
            }
            for _ in 0..j {
                p = p.mul(&y).round_to(wp);
            }
            acc = acc.add(&p);
        }
        acc
    }

    /// The moment `∫ x^i y^j dμ`, exactly, when all atoms are exact over at
    /// most one radicand.
    pub fn moment_exact(&self, i: usize, j: usize) -> Option<QuadExt> {
        exact_sum(self.atoms.iter().map(|a| {
            let x = a.x.as_quad()?;
            let y = a.y.as_quad()?;
            let w = a.weight.as_quad()?;
            let mut p = w;
            for _ in 0..i {
                p = p * x.clone();
            }
            for _ in 0..j {
                p = p * y.clone();
            }
            Some(p)
        }))
    }
}

/// Sums exact terms, refusing (with `None`) when any term is missing or two
/// irrational terms live over different radicands.
fn exact_sum(terms: impl Iterator<Item = Option<QuadExt>>) -> Option<QuadExt> {
    let mut acc = QuadExt::from_rat(rat(0));
    for t in terms {
        let t = t?;
        if !acc.radical_coeff().is_zero()
            && !t.radical_coeff().is_zero()
            && acc.radicand() != t.radicand()
        {
            return None;
        }
        acc = acc + t;
    }
    Some(acc)
}

/// Relative reconstruction error of a line measure against target moments:
/// `max_j |m_j(μ) − γ_j| / max(1, |γ_j|)` at `prec` bits.
pub fn line_residual<T: Scalar>(mu: &LineMeasure, moments: &[T], prec: u64) -> Dyadic {
    let wp = prec + 32;
    let mut worst = Dyadic::zero();
    for (j, target) in moments.iter().enumerate() {
        let rec = mu.moment_dyadic(j, prec);
        let t = target.to_dyadic(wp);
        let err = relative_error(&rec, &t, wp);
        if worst.cmp(&err) == std::cmp::Ordering::Less {
            worst = err;
        }
    }
    worst
}

/// Relative reconstruction error of a plane measure against a bivariate
/// moment sequence: `max_{i+j≤2k} |β^rec_{i,j} − β_{i,j}| / max(1, |β_{i,j}|)`.
pub fn plane_residual<T: Scalar>(mu: &PlaneMeasure, s: &BivSeq<T>, prec: u64) -> Dyadic {
    let wp = prec + 32;
    let mut worst = Dyadic::zero();
    for d in 0..=s.degree() {
        for j in 0..=d {
            let i = d - j;
            let rec = mu.moment_dyadic(i, j, prec);
            let t = s.get(i, j).to_dyadic(wp);
            let err = relative_error(&rec, &t, wp);
            if worst.cmp(&err) == std::cmp::Ordering::Less {
                worst = err;
            }
        }
    }
    worst
}

fn relative_error(rec: &Dyadic, target: &Dyadic, wp: u64) -> Dyadic {
    let diff = rec.sub(target).abs();
    let scale = target.abs();
    let one = Dyadic::new(num_bigint::BigInt::one(), 0);
    let denom = if scale.cmp(&one) == std::cmp::Ordering::Greater { scale } else { one };
    diff.div_prec(&denom, wp)
}

/// True when the residual is at most `2^(−prec/2)`, the promised
/// reconstruction accuracy at `prec` working bits.
pub fn residual_ok(residual: &Dyadic, prec: u64) -> bool {
    let bound = Dyadic::new(num_bigint::BigInt::one(), -((prec / 2) as i64));
    residual.cmp(&bound) != std::cmp::Ordering::Greater
}
