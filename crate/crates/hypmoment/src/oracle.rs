//! Forward-moment oracle: builds truncated moment sequences from explicit
//! rational atomic measures supported on the three cubics, independently of
//! the solvers. Tests generate measures here, push them to moments, and
//! compare solver reconstructions against the known ground truth.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::scalar::{ratio, Rat};
use crate::seq::{BivSeq, Curve};

/// One weighted rational point of the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct RatAtom {
    pub x: Rat,
    pub y: Rat,
    pub weight: Rat,
}

/// Exact moments `β_{i,j} = Σ w x^i y^j`, `i + j ≤ 2k`, of an atomic measure.
pub fn forward_moments(atoms: &[RatAtom], k: usize) -> BivSeq<Rat> {
    let deg = 2 * k;
    // Power tables per atom avoid recomputing x^i y^j for every index.
    let tables: Vec<(Vec<Rat>, Vec<Rat>)> = atoms
        .iter()
        .map(|a| (powers(&a.x, deg), powers(&a.y, deg)))
        .collect();
    BivSeq::from_fn(k, |i, j| {
        let mut acc = Rat::zero();
        for (a, (xp, yp)) in atoms.iter().zip(&tables) {
            acc += &a.weight * &xp[i] * &yp[j];
        }
        acc
    })
}

fn powers(x: &Rat, deg: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(deg + 1);
    out.push(Rat::one());
    for t in 1..=deg {
        out.push(&out[t - 1] * x);
    }
    out
}

/// The point `(s, 0)` of the line component `y = 0` (any curve).
pub fn line_point(s: &Rat) -> (Rat, Rat) {
    (s.clone(), Rat::zero())
}

/// The point of the curve's non-line component with parameter `r ≠ 0`:
/// each hyperbola is rationally parametrized through a coordinate change
/// from `uv = 1`.
pub fn conic_point(curve: &Curve, r: &Rat) -> (Rat, Rat) {
    assert!(!r.is_zero(), "conic parameter must be nonzero");
    let inv = Rat::one() / r;
    match curve {
        // xy = 1: points (r, 1/r).
        Curve::Hyp1 => (r.clone(), inv),
        // x + y + a xy = 0: the a = -1 curve is (x-1)(y-1) = 1, giving
        // (r + 1, 1/r + 1); scaling by -1/a transports it to general a.
        Curve::Hyp2 { a } => {
            let x = -(r + Rat::one()) / a;
            let y = -(&inv + Rat::one()) / a;
            (x, y)
        }
        // a y + x^2 - y^2 = 0: pulled back from uv = 1 by an affine map,
        // giving x = a (1/r - r) / 4, y = a (r + 1/r + 2) / 4.
        Curve::Hyp3 { a } => {
            let quarter = ratio(1, 4);
            let x = a * &quarter * (&inv - r);
            let y = a * &quarter * (&inv + r + Rat::from_integer(2.into()));
            (x, y)
        }
    }
}

/// Largest absolute value among a rational's numerator and denominator.
pub fn height(r: &Rat) -> BigInt {
    r.numer().abs().max(r.denom().abs())
}

/// Random atomic measure on `curve` with `n_line` atoms on `y = 0` and
/// `n_conic` atoms on the other component, all pairwise distinct, positive
/// rational weights, and every atom coordinate of height ≤ `max_height`.
pub fn random_curve_atoms<R: Rng>(
    rng: &mut R,
    curve: &Curve,
    n_line: usize,
    n_conic: usize,
    max_height: i64,
) -> Vec<RatAtom> {
    let bound = BigInt::from(max_height);
    let mut atoms: Vec<RatAtom> = Vec::new();
    let mut line_params: Vec<Rat> = Vec::new();
    let mut conic_params: Vec<Rat> = Vec::new();

    let mut tries = 0usize;
    while line_params.len() < n_line {
        assert!(tries < 10_000, "could not sample distinct line atoms");
        tries += 1;
        let s = small_rat(rng, 8, 3);
        if height(&s) <= bound && !line_params.contains(&s) {
            line_params.push(s);
        }
    }
    tries = 0;
    while conic_params.len() < n_conic {
        assert!(tries < 10_000, "could not sample distinct conic atoms");
        tries += 1;
        let r = small_rat(rng, 6, 3);
        if r.is_zero() || conic_params.contains(&r) {
            continue;
        }
        // r = -1 lands on the origin for the type-2/3 curves, colliding
        // with the line component; keep the components disjoint.
        if !matches!(curve, Curve::Hyp1) && r == -Rat::one() {
            continue;
        }
        let (x, y) = conic_point(curve, &r);
        if height(&x) <= bound && height(&y) <= bound {
            conic_params.push(r);
        }
    }

    for s in &line_params {
        let (x, y) = line_point(s);
        atoms.push(RatAtom { x, y, weight: positive_weight(rng) });
    }
    for r in &conic_params {
        let (x, y) = conic_point(curve, r);
        atoms.push(RatAtom { x, y, weight: positive_weight(rng) });
    }
    debug_assert!(atoms
        .iter()
        .all(|a| curve.contains(&a.x, &a.y)));
    atoms
}

/// Random nonzero rational with numerator in `[-num_range, num_range]` and
/// denominator in `[1, den_range]`.
fn small_rat<R: Rng>(rng: &mut R, num_range: i64, den_range: i64) -> Rat {
    let n = rng.gen_range(-num_range..=num_range);
    let d = rng.gen_range(1..=den_range);
    ratio(n, d)
}

fn positive_weight<R: Rng>(rng: &mut R) -> Rat {
    ratio(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

/// Random curve with exact rational data: type 1 has no parameter; types 2
/// and 3 draw a small nonzero coefficient.
pub fn random_curve<R: Rng>(rng: &mut R, tag: u8) -> Curve {
    let pool = [-3i64, -2, -1, 1, 2, 3];
    let mut a = ratio(pool[rng.gen_range(0..pool.len())], rng.gen_range(1..=2));
    if a.is_zero() {
        a = Rat::one();
    }
    match tag {
        0 => Curve::Hyp1,
        1 => Curve::Hyp2 { a },
        _ => Curve::Hyp3 { a },
    }
}
