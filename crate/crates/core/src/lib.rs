//! Exact arithmetic for Frobenius characteristic-polynomial datasets.
//!
//! A dataset attaches to each closed point of a curve over a finite field the
//! reverse characteristic polynomial of Frobenius, `P(T) = det(1 - F T)`, with
//! coefficients in a number field of degree at most two.  Everything downstream
//! is computed from those polynomials:
//!
//! * [`newton`] — normalized Newton polygons at a finite place and the
//!   lies-on-or-above partial order;
//! * [`weights`] — certified archimedean root moduli, purity and valuation
//!   bound checks;
//! * [`lfunction`] — truncated Euler products, rational reconstruction with
//!   re-expansion certificates, Euler characteristics, slope L-functions;
//! * [`padic`] — capped-relative p-adic numbers, polynomial lifts, slope
//!   factorization and unit roots;
//! * [`ingest`] — brute-force point counting for the Legendre pencil and the
//!   trivial local system, producing complete datasets up to a degree bound;
//! * [`analysis`] — companion comparison, generic polygons, jumping loci,
//!   semicontinuity and related global reports.
//!
//! Polynomials and power series are generic over their coefficient ring (any
//! type satisfying [`poly::Coeff`], e.g. `f64`, `Complex64`, [`Rational`], or
//! [`NumberFieldElement`]); the concrete instantiations used throughout the
//! crate are aliased at the root.  Exact scalars are built on `num-bigint` /
//! `num-rational`.  The p-adic types carry their prime and precision per value
//! and therefore live outside the generic layer.

pub mod analysis;
pub mod error;
pub mod exactnum;
pub mod frobdata;
pub mod ingest;
pub mod lfunction;
pub mod newton;
pub mod nf;
pub mod padic;
pub mod poly;
pub mod report;
pub mod series;
pub mod weights;

pub use error::Error;
pub use exactnum::{is_roots_of_unity, power_sums, valuation, Rational};
pub use nf::{FieldSpec, NumberFieldElement, Place};

/// Dense univariate polynomial over the rationals.
pub type QPoly = poly::Poly<Rational>;
/// Dense univariate polynomial with coefficients in a number field of degree
/// at most two; the coefficient type embeds plain rationals, so this is the
/// common currency for Frobenius data.
pub type RatPoly = poly::Poly<NumberFieldElement>;
/// Truncated power series over the same coefficient field as [`RatPoly`].
pub type RatSeries = series::TruncatedPowerSeries<NumberFieldElement>;

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
