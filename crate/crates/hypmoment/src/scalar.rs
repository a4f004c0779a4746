//! Exact scalar types: arbitrary-precision rationals and single quadratic
//! extensions `Q(sqrt(d))`, unified behind the [`Scalar`] trait so the linear
//! algebra and the moment-sequence machinery can run over either field.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::dyadic::Dyadic;

/// Arbitrary-precision rational number.
pub type Rat = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses decimal notation (`"3"`, `"-2.5"`, `"1e-25"`, `"4.25e+3"`) or a
/// ratio (`"3/7"`) into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
        let d: BigInt = d.trim().parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rat::new(n, d));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|err| format!("bad exponent {e:?}: {err}"))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let digits_ok = !digits.is_empty()
        && digits
            .chars()
            .enumerate()
            .all(|(i, c)| c.is_ascii_digit() || (i == 0 && (c == '+' || c == '-')));
    if !digits_ok || digits.trim_start_matches(['+', '-']).is_empty() {
        return Err(format!("cannot parse number {s:?}"));
    }
    let num: BigInt = digits.parse().map_err(|e| format!("cannot parse number {s:?}: {e}"))?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rat::from_integer(num * ten.pow(shift as u32))
    } else {
        Rat::new(num, ten.pow((-shift) as u32))
    })
}

/// Renders a rational as `"p"` or `"p/q"`.
pub fn rat_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact ordered-field operations shared by [`Rat`] and [`QuadExt`].
///
/// Implementations must make `sgn`, equality, and all arithmetic exact;
/// nothing in the crate tolerates rounding inside a decision.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Sub<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rat(r: Rat) -> Self;
    /// Exact sign relative to zero: `-1`, `0`, or `1`.
    fn sgn(&self) -> i8;
    /// Approximation with `prec` significant bits.
    fn to_dyadic(&self, prec: u64) -> Dyadic;
    /// The exact rational value, if the element happens to be rational.
    fn as_rat(&self) -> Option<Rat>;
    /// The exact value as a quadratic-extension element, when available.
    fn as_quad(&self) -> Option<QuadExt> {
        self.as_rat().map(QuadExt::from_rat)
    }
    /// A rational upper bound for `|self|` (used for root bounds).
    fn abs_upper(&self) -> Rat;
    /// A rational lower bound for `|self|`, positive whenever `self != 0`.
    fn abs_lower(&self) -> Rat;

    fn from_int(n: i64) -> Self {
        Self::from_rat(rat(n))
    }
    fn is_pos(&self) -> bool {
        self.sgn() > 0
    }
    fn is_neg(&self) -> bool {
        self.sgn() < 0
    }
    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

impl Scalar for Rat {
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn sgn(&self) -> i8 {
        match self.numer().sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }
    fn to_dyadic(&self, prec: u64) -> Dyadic {
        Dyadic::from_rat(self, prec)
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
    fn abs_upper(&self) -> Rat {
        Signed::abs(self)
    }
    fn abs_lower(&self) -> Rat {
        Signed::abs(self)
    }
}

/// An element `a + b * sqrt(d)` of a real quadratic extension of the
/// rationals.
///
/// The radicand `d` is a non-negative integer with small square factors
/// removed; perfect squares collapse to the rational case (`b = 0`, `d = 0`).
/// Arithmetic is closed within a single extension. Combining elements of
/// *different* extensions (both with irrational parts) panics: every decision
/// path in the solvers stays inside one radical, and a mixed operation is a
/// logic error, not a numeric edge case.
#[derive(Clone, Debug)]
pub struct QuadExt {
    a: Rat,
    b: Rat,
    d: BigInt,
}

impl QuadExt {
    /// Builds `a + b * sqrt(d)` for a rational radicand `d >= 0`,
    /// normalizing the radicand to a square-reduced non-negative integer.
    pub fn new(a: Rat, b: Rat, d: Rat) -> Self {
        assert!(!d.is_negative(), "negative radicand {d}: not a real quadratic extension");
        if b.is_zero() || d.is_zero() {
            return QuadExt { a, b: rat(0), d: BigInt::zero() };
        }
        // b * sqrt(p/q) = (b/q) * sqrt(p*q): make the radicand an integer.
        let p = d.numer().clone();
        let q = d.denom().clone();
        let mut n = &p * &q;
        let mut b = b / Rat::from_integer(q);
        // Remove small square factors, then collapse if what remains is a
        // perfect square.
        let mut f = BigInt::from(2);
        let limit = BigInt::from(1000);
        while f <= limit {
            let sq = &f * &f;
            while (&n % &sq).is_zero() {
                n /= &sq;
                b *= Rat::from_integer(f.clone());
            }
            f += 1;
        }
        let r = n.sqrt();
        if &r * &r == n {
            return QuadExt { a: a + b * Rat::from_integer(r), b: rat(0), d: BigInt::zero() };
        }
        QuadExt { a, b, d: n }
    }

    /// The square root of a non-negative rational, as a quadratic element.
    pub fn sqrt_rat(r: &Rat) -> Self {
        QuadExt::new(rat(0), rat(1), r.clone())
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }
    pub fn radical_coeff(&self) -> &Rat {
        &self.b
    }
    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    /// True when the element lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Aligns the radicands of two elements, panicking when both carry
    /// irrational parts over different radicands.
    fn aligned_d(&self, rhs: &QuadExt) -> BigInt {
        if self.b.is_zero() {
            rhs.d.clone()
        } else if rhs.b.is_zero() || self.d == rhs.d {
            self.d.clone()
        } else {
            panic!(
                "mixed quadratic radicands sqrt({}) and sqrt({}): single-extension arithmetic only",
                self.d, rhs.d
            );
        }
    }

    /// The conjugate `a - b * sqrt(d)`.
    pub fn conj(&self) -> Self {
        QuadExt { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// The field norm `a^2 - b^2 d`, always rational.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * Rat::from_integer(self.d.clone())
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        // Normalized forms: a rational element stores d = 0, so radicands
        // only matter when both irrational parts are present.
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        let d = self.aligned_d(&rhs);
        let b = self.b + rhs.b;
        let d = if b.is_zero() { BigInt::zero() } else { d };
        QuadExt { a: self.a + rhs.a, b, d }
    }
}

impl Sub for QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: QuadExt) -> QuadExt {
        self + (-rhs)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: QuadExt) -> QuadExt {
        let d = self.aligned_d(&rhs);
        let dr = Rat::from_integer(d.clone());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dr;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        let d = if b.is_zero() { BigInt::zero() } else { d };
        QuadExt { a, b, d }
    }
}

impl Div for QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: QuadExt) -> QuadExt {
        assert!(!Zero::is_zero(&rhs), "division by zero quadratic element");
        let n = rhs.norm();
        let inv = QuadExt { a: &rhs.a / &n, b: -(&rhs.b / &n), d: rhs.d.clone() };
        self * inv
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt { a: rat(0), b: rat(0), d: BigInt::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt { a: rat(1), b: rat(0), d: BigInt::zero() }
    }
}

impl Scalar for QuadExt {
    fn from_rat(r: Rat) -> Self {
        QuadExt { a: r, b: rat(0), d: BigInt::zero() }
    }
    fn sgn(&self) -> i8 {
        let sa = Scalar::sgn(&self.a);
        let sb = Scalar::sgn(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb; // sqrt(d) > 0 whenever b != 0
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: |a| against |b| sqrt(d), decided by the norm.
        // a^2 - b^2 d > 0 means the rational part dominates.
        let sn = Scalar::sgn(&self.norm());
        if sn == 0 {
            0
        } else {
            sa * sn
        }
    }
    fn to_dyadic(&self, prec: u64) -> Dyadic {
        let guard = prec + 16;
        let a = self.a.to_dyadic(guard);
        if self.b.is_zero() {
            return a.round_to(prec);
        }
        let d = Dyadic::new(self.d.clone(), 0).sqrt_prec(guard);
        a.add(&self.b.to_dyadic(guard).mul(&d)).round_to(prec)
    }
    fn as_rat(&self) -> Option<Rat> {
        self.b.is_zero().then(|| self.a.clone())
    }
    fn as_quad(&self) -> Option<QuadExt> {
        Some(self.clone())
    }
    fn abs_upper(&self) -> Rat {
        // |a| + |b| * ceil(sqrt(d)) dominates |a + b sqrt(d)|.
        let ceil_sqrt = Rat::from_integer(self.d.sqrt() + 1);
        Signed::abs(&self.a) + Signed::abs(&self.b) * ceil_sqrt
    }
    fn abs_lower(&self) -> Rat {
        // |x| * |conj(x)| = |norm(x)| and |conj(x)| <= abs_upper(x), so
        // |x| >= |norm(x)| / abs_upper(x); the norm of a nonzero element of
        // a genuine (non-square radicand) extension is nonzero.
        if self.b.is_zero() {
            return Signed::abs(&self.a);
        }
        Signed::abs(&self.norm()) / self.abs_upper()
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", rat_string(&self.a));
        }
        write!(
            f,
            "{}{}{}*sqrt({})",
            rat_string(&self.a),
            if Signed::is_negative(&self.b) { "-" } else { "+" },
            rat_string(&Signed::abs(&self.b)),
            self.d
        )
    }
}
