//! Arbitrary-precision dyadic floating point: numbers of the form
//! `mant * 2^exp` with a `BigInt` mantissa.
//!
//! Addition, subtraction, multiplication and comparison are exact; division
//! and square root take an explicit target precision. This is the crate's
//! only approximate number type, and it is used solely at the edges: turning
//! exact atoms into printable decimals, refining isolated polynomial roots,
//! and measuring residuals of reconstructed moment sequences.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::scalar::Rat;

/// A dyadic rational `mant * 2^exp`, normalized so that `mant` is odd or zero.
#[derive(Clone, Debug)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    /// The exact value zero.
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    /// Builds `mant * 2^exp` and normalizes.
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    /// Exact integer value.
    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    /// Number of significant bits in the mantissa.
    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Exact sum.
    pub fn add(&self, rhs: &Dyadic) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &rhs.mant << (rhs.exp - exp) as u64;
        Dyadic::new(a + b, exp)
    }

    /// Exact difference.
    pub fn sub(&self, rhs: &Dyadic) -> Self {
        self.add(&rhs.neg())
    }

    /// Exact product.
    pub fn mul(&self, rhs: &Dyadic) -> Self {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }

    /// Rounds to `prec` significant bits (round to nearest, ties away from
    /// zero). Values already within the budget are returned unchanged.
    pub fn round_to(&self, prec: u64) -> Self {
        let bits = self.mant.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let half = BigInt::from(1) << (shift - 1);
        let (q, r) = self.mant.abs().div_rem(&(BigInt::from(1) << shift));
        let q = if r >= half { q + 1 } else { q };
        let signed = if self.is_negative() { -q } else { q };
        Dyadic::new(signed, self.exp + shift as i64)
    }

    /// Quotient accurate to `prec` significant bits. Panics on division by
    /// zero.
    pub fn div_prec(&self, rhs: &Dyadic, prec: u64) -> Self {
        assert!(!rhs.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let extra = (prec + rhs.mant.bits() + 2).saturating_sub(self.mant.bits());
        let num = &self.mant << extra;
        let q = num / &rhs.mant;
        Dyadic::new(q, self.exp - rhs.exp - extra as i64).round_to(prec)
    }

    /// Square root accurate to `prec` significant bits. Panics on negative
    /// input.
    pub fn sqrt_prec(&self, prec: u64) -> Self {
        assert!(!self.is_negative(), "dyadic sqrt of negative value");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut shift = (2 * prec + 4).saturating_sub(self.mant.bits()) as i64;
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled: BigInt = if shift >= 0 {
            &self.mant << shift as u64
        } else {
            &self.mant >> (-shift) as u64
        };
        let root = scaled.sqrt();
        Dyadic::new(root, (self.exp - shift) / 2).round_to(prec)
    }

    /// Exact comparison.
    pub fn cmp(&self, rhs: &Dyadic) -> Ordering {
        let diff = self.sub(rhs);
        if diff.is_zero() {
            Ordering::Equal
        } else if diff.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// Exact conversion to a rational.
    pub fn to_rat(&self) -> Rat {
        let two = BigInt::from(2);
        if self.exp >= 0 {
            Rat::new(&self.mant * two.pow(self.exp as u32), BigInt::from(1))
        } else {
            Rat::new(self.mant.clone(), two.pow((-self.exp) as u32))
        }
    }

    /// Rounds a rational to `prec` significant bits.
    pub fn from_rat(r: &Rat, prec: u64) -> Self {
        if r.is_zero() {
            return Dyadic::zero();
        }
        let num = r.numer();
        let den = r.denom();
        let extra = (prec + den.bits() + 2).saturating_sub(num.bits());
        let scaled = num << extra;
        let (q, rem) = scaled.div_rem(den);
        // Round to nearest on the truncated quotient.
        let q = if (&rem * 2u32).abs() >= den.abs() {
            if q.is_negative() || (q.is_zero() && rem.is_negative()) {
                q - 1
            } else {
                q + 1
            }
        } else {
            q
        };
        Dyadic::new(q, -(extra as i64)).round_to(prec)
    }

    /// Scientific-notation decimal rendering with `digits` significant
    /// digits, e.g. `-1.2345678e-3`.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.is_negative();
        let mant = self.mant.abs();
        // First guess of the decimal exponent from the binary size, then
        // correct it exactly.
        let bits = mant.bits() as i64 + self.exp;
        let mut e10 = ((bits as f64 - 0.5) * std::f64::consts::LOG10_2).floor() as i64;
        while self.abs_cmp_pow10(e10 + 1) != Ordering::Less {
            e10 += 1;
        }
        while self.abs_cmp_pow10(e10) == Ordering::Less {
            e10 -= 1;
        }
        // digits significant digits: D = round(|v| * 10^(digits-1-e10)).
        let scale = digits as i64 - 1 - e10;
        let ten = BigInt::from(10);
        let mut num = mant;
        let mut den = BigInt::from(1);
        if scale >= 0 {
            num *= ten.pow(scale as u32);
        } else {
            den *= ten.pow((-scale) as u32);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        let (q, r) = num.div_rem(&den);
        let mut d = if &r * 2u32 >= den { q + 1 } else { q };
        let cap = ten.pow(digits as u32);
        if d >= cap {
            // Rounding overflowed into an extra digit (e.g. 9.99 -> 10.0).
            d /= &ten;
            e10 += 1;
        }
        let s = d.to_string();
        let (head, tail) = s.split_at(1);
        let body = if tail.is_empty() {
            head.to_string()
        } else {
            format!("{head}.{tail}")
        };
        let sign = if neg { "-" } else { "" };
        format!("{sign}{body}e{e10}")
    }

    /// Compares `|self|` with `10^t` exactly.
    fn abs_cmp_pow10(&self, t: i64) -> Ordering {
        let ten = BigInt::from(10);
        let mut lhs = self.mant.abs();
        let mut rhs = if t >= 0 { ten.pow(t as u32) } else { BigInt::from(1) };
        if t < 0 {
            lhs *= ten.pow((-t) as u32);
        }
        if self.exp >= 0 {
            lhs <<= self.exp as u64;
        } else {
            rhs <<= (-self.exp) as u64;
        }
        lhs.cmp(&rhs)
    }

    /// Lossy conversion for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let r = self.round_to(64);
        r.mant.to_f64().unwrap_or(f64::NAN) * 2f64.powi(r.exp.clamp(-1070, 1070) as i32)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}
