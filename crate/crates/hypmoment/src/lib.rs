//! Exact decision procedures and measure construction for bivariate truncated
//! moment sequences supported on reducible cubics of hyperbolic type: curves
//! of the form `y * c(x, y) = 0` where the conic `c = 0` is a hyperbola.
//!
//! The crate decides whether a degree-`2k` moment sequence admits a
//! representing measure on one of the three curve families
//!
//! * `y (1 - x y) = 0`        — line and hyperbola, disjoint,
//! * `y (x + y - x y) = 0`    — line meeting the hyperbola in one point,
//! * `y (a y + x^2 - y^2) = 0` — line through the hyperbola's vertex,
//!
//! reports the minimal number of atoms, and constructs a minimal atomic
//! measure with exact rational / quadratic-irrational data wherever the
//! geometry permits and verified high-precision approximations elsewhere.
//!
//! All linear algebra is exact: rationals (`scalar::Rat`), single quadratic
//! extensions (`scalar::QuadExt`), fraction-free elimination, and exact
//! `L D L^T` positive-semidefiniteness tests. Floating point never decides
//! anything; dyadic big-floats (`dyadic::Dyadic`) appear only when printing
//! atoms and when verifying residuals at a requested precision.

pub mod dyadic;
pub mod scalar;

pub mod linalg;
pub mod poly;

pub mod seq;

pub mod hamburger;
pub mod hyperbola;

pub mod decompose;
pub mod hyp1;
pub mod hyp2;
pub mod hyp3;

pub mod measure;
pub mod oracle;

pub use scalar::{Rat, Scalar};
