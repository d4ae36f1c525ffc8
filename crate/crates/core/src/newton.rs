//! Normalized Newton polygons of characteristic polynomials at a finite place.
//!
//! The polygon of `P = 1 + a_1 T + ... + a_d T^d` at a place is the lower
//! convex hull of the points `(i, v(a_i) / n)` over the nonzero coefficients,
//! where `n` is the degree of the point the polynomial comes from (so heights
//! are per-unit of the residue field extension).  Zero coefficients contribute
//! no point.  The polygon starts at `(0, 0)` — constant term one — and its
//! vertex list is canonical: strictly increasing abscissas, strictly
//! increasing slopes, no interior collinear vertices.  Slopes read off the
//! segments, each repeated for its horizontal length, form the slope multiset;
//! its entries are the valuations of the reciprocal roots.
//!
//! Polygons of equal width are compared by `lies_on_or_above`; polygons of
//! different widths are incomparable (an error, distinct from `false`).

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exactnum::Rational;
use crate::nf::{nf_valuation, FieldSpec, Place};
use crate::RatPoly;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(usize, Rational)>,
}

/// Lower convex hull of a set of points with distinct integer abscissas,
/// given in ascending abscissa order.  Collinear interior points are dropped.
pub(crate) fn lower_hull(points: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
    let mut hull: Vec<(usize, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // Keep b only if it lies strictly below the chord from a to p:
            // cross = (bx - ax)(py - ay) - (by - ay)(px - ax) > 0.
            let cross = Rational::from(BigInt::from((b.0 - a.0) as i64)) * (&p.1 - &a.1)
                - (&b.1 - &a.1) * Rational::from(BigInt::from((p.0 - a.0) as i64));
            if cross.is_positive() {
                break;
            }
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull
}

impl NewtonPolygon {
    /// Builds the polygon as the lower hull of `(abscissa, height)` points;
    /// the points must be in ascending abscissa order, must start at `(0, 0)`,
    /// and there must be a final point (the polynomial's leading coefficient).
    pub fn from_points(points: &[(usize, Rational)]) -> Result<Self> {
        if points.is_empty() || points[0] != (0, Rational::zero()) {
            return Err(Error::InvalidArgument(
                "polygon points must start at (0, 0)".into(),
            ));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument(
                "polygon points need strictly ascending abscissas".into(),
            ));
        }
        Ok(NewtonPolygon {
            vertices: lower_hull(points),
        })
    }

    /// Vertices of the hull, `(abscissa, height)`, canonical.
    pub fn vertices(&self) -> &[(usize, Rational)] {
        &self.vertices
    }

    /// Horizontal width — the degree of the underlying polynomial.
    pub fn width(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }

    /// Height of the right endpoint.
    pub fn right_height(&self) -> Rational {
        self.vertices.last().map_or_else(Rational::zero, |v| v.1.clone())
    }

    /// Piecewise-linear height at an integer abscissa within the width.
    pub fn height_at(&self, x: usize) -> Rational {
        assert!(x <= self.width(), "abscissa beyond the polygon");
        for w in self.vertices.windows(2) {
            let (x0, y0) = (&w[0].0, &w[0].1);
            let (x1, y1) = (&w[1].0, &w[1].1);
            if x >= *x0 && x <= *x1 {
                let t = Rational::new(BigInt::from((x - x0) as u64), BigInt::from((x1 - x0) as u64));
                return y0 + (y1 - y0) * t;
            }
        }
        // Width zero, or x at the single vertex.
        self.vertices[0].1.clone()
    }

    /// The slope multiset: each segment's slope repeated for its horizontal
    /// length, ascending.
    pub fn slope_multiset(&self) -> Vec<Rational> {
        let mut slopes = Vec::with_capacity(self.width());
        for w in self.vertices.windows(2) {
            let run = w[1].0 - w[0].0;
            let slope = (&w[1].1 - &w[0].1) / Rational::from(BigInt::from(run as u64));
            for _ in 0..run {
                slopes.push(slope.clone());
            }
        }
        slopes
    }

    /// Largest jump between consecutive distinct slopes (zero when the
    /// polygon has at most one distinct slope).
    pub fn max_slope_gap(&self) -> Rational {
        let mut gap = Rational::zero();
        let mut prev: Option<Rational> = None;
        for w in self.vertices.windows(2) {
            let run = w[1].0 - w[0].0;
            let slope = (&w[1].1 - &w[0].1) / Rational::from(BigInt::from(run as u64));
            if let Some(p) = prev {
                let d = &slope - &p;
                if d > gap {
                    gap = d;
                }
            }
            prev = Some(slope);
        }
        gap
    }

    /// Least `N >= 1` with the polygon's height at every integer abscissa in
    /// `(1/N) Z`.  Corner vertices alone would miss interior lattice columns —
    /// a slope-1/2 segment of width 2 has integer corner heights but passes
    /// through a half-integer at its midpoint.
    pub fn denominator_bound(&self) -> BigInt {
        (0..=self.width())
            .map(|x| self.height_at(x))
            .fold(BigInt::one(), |acc, y| acc.lcm(y.denom()))
    }

    /// Whether `self` lies on or above `other`: same width (else
    /// incomparable), same right endpoint, and height at least `other`'s at
    /// every integer abscissa.  Convexity with integer vertex abscissas makes
    /// the integer check equivalent to the pointwise one.
    pub fn lies_on_or_above(&self, other: &NewtonPolygon) -> Result<bool> {
        if self.width() != other.width() {
            return Err(Error::IncomparablePolygons(format!(
                "widths {} and {} differ",
                self.width(),
                other.width()
            )));
        }
        if self.right_height() != other.right_height() {
            return Ok(false);
        }
        for x in 0..=self.width() {
            if self.height_at(x) < other.height_at(x) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Normalized Newton polygon of a characteristic polynomial at a place, for a
/// point of the given degree over the base field.
///
/// Requires constant term one and positive degree.  Valuations at split
/// places are computed at an internally escalated precision; only if repeated
/// escalation still cannot separate an image from zero does the underlying
/// `PrecisionInsufficient` surface.
pub fn newton_polygon(
    p: &RatPoly,
    field: &Arc<FieldSpec>,
    place: &Place,
    degree: u32,
) -> Result<NewtonPolygon> {
    if degree == 0 {
        return Err(Error::InvalidArgument("point degree must be positive".into()));
    }
    if !p.coeff(0).is_one() {
        return Err(Error::InvalidArgument(
            "Newton polygon needs constant term one".into(),
        ));
    }
    let d = p
        .degree()
        .ok_or_else(|| Error::InvalidArgument("zero polynomial has no polygon".into()))?;
    let n = Rational::from(BigInt::from(degree));
    let mut points = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let c = p.coeff(i);
        if c.is_zero() {
            continue;
        }
        let v = valuation_with_escalation(&c, field, place)?;
        points.push((i, v / &n));
    }
    NewtonPolygon::from_points(&points)
}

/// Valuation with automatic precision escalation: split-place computations
/// can under-resolve an element whose image vanishes to high order, so retry
/// with doubled precision up to a generous cap.
pub(crate) fn valuation_with_escalation(
    c: &crate::NumberFieldElement,
    field: &Arc<FieldSpec>,
    place: &Place,
) -> Result<Rational> {
    let mut precision = 10;
    loop {
        match nf_valuation(c, field, place, precision) {
            Err(Error::PrecisionInsufficient(_)) if precision < 160 => precision *= 2,
            other => return other,
        }
    }
}
