//! Exact univariate polynomials over a [`Scalar`] field, Sturm-sequence real
//! root isolation, bisection refinement, and recognition of rational roots
//! from isolating intervals.
//!
//! Root finding here serves measure extraction: the generating polynomials
//! of flat Hankel systems have simple real roots, and the pipeline is
//! (1) isolate every real root exactly, (2) recognize rational roots and
//! certify them by exact evaluation, (3) refine the rest to a requested
//! dyadic precision.

use crate::dyadic::Dyadic;
use crate::scalar::{Rat, Scalar};
use num_traits::{One, Zero};

/// Dense univariate polynomial, coefficients from constant term upward,
/// normalized to have a nonzero leading coefficient (or be empty for zero).
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Monic `x - r`.
    pub fn linear_root(r: &T) -> Self {
        Poly::new(vec![-r.clone(), T::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> T {
        self.eval(&T::from_rat(x.clone()))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_int(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Euclidean division: `(q, r)` with `self = q * rhs + r`,
    /// `deg r < deg rhs`. Panics when `rhs` is zero.
    pub fn divmod(&self, rhs: &Self) -> (Self, Self) {
        assert!(!rhs.is_zero(), "polynomial division by zero");
        let d = rhs.deg().unwrap();
        let lead_inv = rhs.leading().unwrap().inv();
        let mut rem = self.clone();
        let mut q = vec![T::zero(); self.coeffs.len().saturating_sub(d)];
        while let Some(rd) = rem.deg() {
            if rd < d {
                break;
            }
            let f = rem.leading().unwrap().clone() * lead_inv.clone();
            let shift = rd - d;
            q[shift] = f.clone();
            // rem -= f * x^shift * rhs
            let mut coeffs = rem.coeffs;
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[shift + j] = coeffs[shift + j].clone() - f.clone() * b.clone();
            }
            coeffs.truncate(rd); // the leading term cancels exactly
            rem = Poly::new(coeffs);
        }
        (Poly::new(q), rem)
    }

    /// Makes the leading coefficient one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.inv()),
        }
    }

    /// Greatest common divisor (monic).
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The square-free part `self / gcd(self, self')`.
    pub fn square_free(&self) -> Self {
        if self.deg().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.deg() == Some(0) {
            return self.clone();
        }
        self.divmod(&g).0
    }

    /// Exact synthetic division by `x - r`; the caller asserts `r` is a root.
    pub fn deflate(&self, r: &T) -> Self {
        let (q, rem) = self.divmod(&Poly::linear_root(r));
        assert!(rem.is_zero(), "deflation point is not a root");
        q
    }

    /// A rational `M` with every real root of `self` strictly inside
    /// `(-M, M)` (Cauchy bound `1 + max |a_i| / |a_n|`, relaxed with
    /// rational over/under-estimates of the absolute values).
    pub fn root_bound(&self) -> Rat {
        let Some(d) = self.deg() else { return Rat::one() };
        if d == 0 {
            return Rat::one();
        }
        let lead_lower = self.leading().unwrap().abs_lower();
        let mut max = Rat::zero();
        for c in &self.coeffs[..d] {
            let u = c.abs_upper();
            if u > max {
                max = u;
            }
        }
        Rat::one() + max / lead_lower
    }
}

/// Sturm chain of a square-free polynomial, with exact sign-variation
/// counting at rational points and at infinity.
pub struct SturmChain<T: Scalar> {
    chain: Vec<Poly<T>>,
}

impl<T: Scalar> SturmChain<T> {
    pub fn new(p: &Poly<T>) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            if chain[n - 1].deg().is_none() || chain[n - 1].deg() == Some(0) {
                break;
            }
            let (_, r) = chain[n - 2].divmod(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&(-T::one())));
        }
        SturmChain { chain }
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    pub fn variations_at(&self, x: &Rat) -> usize {
        Self::variations(self.chain.iter().map(|p| p.eval_rat(x).sgn()))
    }

    pub fn variations_at_neg_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| match p.deg() {
            None => 0,
            Some(d) => {
                let s = p.leading().unwrap().sgn();
                if d % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
        }))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| match p.deg() {
            None => 0,
            Some(_) => p.leading().unwrap().sgn(),
        }))
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_half_open(&self, a: &Rat, b: &Rat) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    /// Total number of distinct real roots.
    pub fn count_all(&self) -> usize {
        self.variations_at_neg_inf() - self.variations_at_pos_inf()
    }
}

/// One isolated real root: either recognized exactly, or boxed in a strict
/// interval (endpoints are never roots).
#[derive(Clone, Debug)]
pub enum IsolatedRoot {
    Exact(Rat),
    Interval { lo: Rat, hi: Rat },
}

/// Isolates all distinct real roots of `p` (any nonzero polynomial): exact
/// rational roots are recognized and split off by deflation; the remaining
/// roots come back as disjoint intervals with non-root rational endpoints,
/// one root each.
pub fn isolate_roots<T: Scalar>(p: &Poly<T>) -> Vec<IsolatedRoot> {
    assert!(!p.is_zero(), "cannot isolate roots of the zero polynomial");
    let mut work = p.square_free();
    let mut out: Vec<IsolatedRoot> = Vec::new();

    // Peel off rational roots discovered at bisection midpoints, restarting
    // on the deflated polynomial so interval bookkeeping stays simple.
    'restart: loop {
        if work.deg().unwrap_or(0) == 0 {
            break;
        }
        let chain = SturmChain::new(&work);
        let bound = work.root_bound();
        let lo = -bound.clone();
        let hi = bound;
        debug_assert!(!work.eval_rat(&lo).is_zero() && !work.eval_rat(&hi).is_zero());
        let mut stack = vec![(lo, hi)];
        let mut found: Vec<IsolatedRoot> = Vec::new();
        while let Some((a, b)) = stack.pop() {
            let n = chain.count_half_open(&a, &b);
            if n == 0 {
                continue;
            }
            if n == 1 {
                found.push(IsolatedRoot::Interval { lo: a, hi: b });
                continue;
            }
            let mid = (&a + &b) / Rat::from_integer(2.into());
            if work.eval_rat(&mid).is_zero() {
                out.push(IsolatedRoot::Exact(mid.clone()));
                work = work.deflate(&T::from_rat(mid));
                continue 'restart;
            }
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
        out.extend(found);
        break;
    }
    out
}

/// Shrinks an isolating interval below `2^target_exp` width by sign-change
/// bisection; recognizes the root as exact if a midpoint hits it.
pub fn refine_interval<T: Scalar>(
    p: &Poly<T>,
    lo: &Rat,
    hi: &Rat,
    target_exp: i64,
) -> IsolatedRoot {
    let mut a = lo.clone();
    let mut b = hi.clone();
    let mut sa = p.eval_rat(&a).sgn();
    let sb = p.eval_rat(&b).sgn();
    assert!(sa != 0 && sb != 0 && sa != sb, "interval endpoints must bracket a sign change");
    let two = Rat::from_integer(2.into());
    let width_cap = pow2(target_exp);
    while &b - &a >= width_cap {
        let mid = (&a + &b) / &two;
        let sm = p.eval_rat(&mid).sgn();
        if sm == 0 {
            return IsolatedRoot::Exact(mid);
        }
        if sm == sa {
            a = mid;
            sa = sm;
        } else {
            b = mid;
        }
    }
    IsolatedRoot::Interval { lo: a, hi: b }
}

/// `2^e` as a rational.
pub fn pow2(e: i64) -> Rat {
    let two = num_bigint::BigInt::from(2);
    if e >= 0 {
        Rat::from_integer(two.pow(e as u32))
    } else {
        Rat::new(num_bigint::BigInt::one(), two.pow((-e) as u32))
    }
}

/// The unique rational with the smallest denominator in the closed interval
/// `[a, b]` (Stern–Brocot descent).
pub fn simplest_rational_in(a: &Rat, b: &Rat) -> Rat {
    assert!(a <= b);
    if a.sgn() <= 0 && b.sgn() >= 0 {
        return Rat::zero();
    }
    if b.sgn() < 0 {
        return -simplest_rational_in(&-b.clone(), &-a.clone());
    }
    // 0 < a <= b: walk the continued fraction of the interval.
    simplest_pos(a, b)
}

fn simplest_pos(a: &Rat, b: &Rat) -> Rat {
    let fa = a.floor();
    if &fa == a {
        return a.clone();
    }
    if b.floor() > fa {
        // An integer lies in (a, b]; the smallest such integer is simplest.
        return fa + Rat::one();
    }
    // Same integer part: recurse on the reciprocal fractional parts.
    let frac_a = a - &fa;
    let frac_b = b - &fa;
    fa + (simplest_pos(&(Rat::one() / frac_b), &(Rat::one() / frac_a))).recip()
}

/// Attempts to recognize the root inside an isolating interval as a rational
/// number: refines to `2^probe_exp`, takes the simplest rational in the
/// interval, and certifies by exact evaluation.
pub fn recognize_rational_root<T: Scalar>(
    p: &Poly<T>,
    lo: &Rat,
    hi: &Rat,
    probe_exp: i64,
) -> Option<Rat> {
    match refine_interval(p, lo, hi, probe_exp) {
        IsolatedRoot::Exact(r) => Some(r),
        IsolatedRoot::Interval { lo, hi } => {
            let cand = simplest_rational_in(&lo, &hi);
            p.eval_rat(&cand).is_zero().then_some(cand)
        }
    }
}

/// A fully resolved real root.
#[derive(Clone, Debug)]
pub enum ResolvedRoot {
    Exact(Rat),
    /// Irrational root boxed to `2^-prec` and rounded to a dyadic value.
    Approx { lo: Rat, hi: Rat, value: Dyadic },
}

/// Isolates, recognizes, and refines every real root of `p`:
/// rational roots come back exact, the rest at `prec` bits.
pub fn resolve_roots<T: Scalar>(p: &Poly<T>, prec: u64) -> Vec<ResolvedRoot> {
    let roots = isolate_roots(p);
    // The intervals isolate roots of the square-free part *after* the exact
    // roots are divided out, so refinement must run against that quotient:
    // an exact root may sit at an interval endpoint of the full polynomial.
    let mut rest = p.square_free();
    for root in &roots {
        if let IsolatedRoot::Exact(r) = root {
            rest = rest.deflate(&T::from_rat(r.clone()));
        }
    }
    let mut out = Vec::new();
    for root in roots {
        match root {
            IsolatedRoot::Exact(r) => out.push(ResolvedRoot::Exact(r)),
            IsolatedRoot::Interval { lo, hi } => {
                if let Some(r) = recognize_rational_root(&rest, &lo, &hi, -128) {
                    out.push(ResolvedRoot::Exact(r));
                    continue;
                }
                match refine_interval(&rest, &lo, &hi, -(prec as i64 + 2)) {
                    IsolatedRoot::Exact(r) => out.push(ResolvedRoot::Exact(r)),
                    IsolatedRoot::Interval { lo, hi } => {
                        let mid = (&lo + &hi) / Rat::from_integer(2.into());
                        let value = Dyadic::from_rat(&mid, prec);
                        out.push(ResolvedRoot::Approx { lo, hi, value });
                    }
                }
            }
        }
    }
    // Sort ascending for deterministic output.
    out.sort_by(|x, y| root_key(x).cmp(&root_key(y)));
    out
}

fn root_key(r: &ResolvedRoot) -> Rat {
    match r {
        ResolvedRoot::Exact(v) => v.clone(),
        ResolvedRoot::Approx { lo, hi, .. } => (lo + hi) / Rat::from_integer(2.into()),
    }
}
