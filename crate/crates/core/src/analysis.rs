//! Dataset-level structure: companion comparison, the generic Newton polygon,
//! jumping loci with their degree bounds, semicontinuity and slope-gap
//! verdicts, and the roots-of-unity isotriviality probe.
//!
//! Everything here consumes a whole [`FrobeniusDataset`] and produces a
//! report that can be recomputed from the dataset alone.  Point-by-point
//! classification (polygons, valuations) runs in parallel; report assembly is
//! single-threaded and deterministic.
//!
//! Two comparison orders on polygons are in play and deliberately distinct.
//! The *generic* polygon is the minimal attained polygon under the pointwise
//! height order (same width, heights everywhere at most the other's) — the
//! right notion for "lowest polygon in the family", and one under which a
//! lower-endpoint polygon can still be recognized as generic.  The
//! *semicontinuity* verdict then applies the stricter
//! [`NewtonPolygon::lies_on_or_above`], which also pins the right endpoint:
//! a family whose determinant valuation moves is reported there as a
//! "locally constant" violation rather than blowing up the generic-polygon
//! computation.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::Error;
use crate::exactnum::{default_order_bound, is_roots_of_unity, prime_power_decompose};
use crate::frobdata::FrobeniusDataset;
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::nf::Place;
use crate::weights::{check_purity, rational_form};
use crate::RatPoly;
use crate::Rational;
use crate::Result;

// ---------------------------------------------------------------------------
// Companion comparison.

/// One disagreeing point from a companion comparison: both polynomials, the
/// right one already conjugated if the comparison asked for it.
#[derive(Clone, Debug)]
pub struct CompanionMismatch {
    pub id: String,
    pub left: RatPoly,
    pub right: RatPoly,
}

/// Outcome of [`companion_check`].
#[derive(Clone, Debug)]
pub struct CompanionReport {
    /// Whether the right-hand dataset was Galois-conjugated before comparing.
    pub conjugated: bool,
    pub points_compared: usize,
    pub pass: bool,
    /// The first mismatch in (degree, id) order, when `pass` is false.
    pub mismatch: Option<CompanionMismatch>,
}

/// Compares two datasets point by point for exact equality of characteristic
/// polynomials, optionally applying the coefficient-field conjugation to the
/// right-hand side first.
///
/// The datasets must cover the same point ids at the same rank; a mismatched
/// point set is an error carrying the symmetric difference, not a failed
/// comparison.  Equality is algebraic — a rational number stored with or
/// without an ambient quadratic field compares equal.
pub fn companion_check(
    d1: &FrobeniusDataset,
    d2: &FrobeniusDataset,
    conjugate: bool,
) -> Result<CompanionReport> {
    if d1.meta().rank != d2.meta().rank {
        return Err(Error::IncomparableDatasets(format!(
            "ranks {} and {} differ",
            d1.meta().rank,
            d2.meta().rank
        )));
    }
    let f1 = &d1.meta().field;
    let f2 = &d2.meta().field;
    if !f1.is_rationals() && !f2.is_rationals() && f1.min_poly() != f2.min_poly() {
        return Err(Error::IncomparableDatasets(
            "coefficient fields have different minimal polynomials".into(),
        ));
    }
    let only_left: Vec<&str> = d1
        .points()
        .iter()
        .map(|p| p.id())
        .filter(|id| d2.get(id).is_none())
        .collect();
    let only_right: Vec<&str> = d2
        .points()
        .iter()
        .map(|p| p.id())
        .filter(|id| d1.get(id).is_none())
        .collect();
    if !only_left.is_empty() || !only_right.is_empty() {
        return Err(Error::IncomparableDatasets(format!(
            "point sets differ; only in left: [{}], only in right: [{}]",
            only_left.join(", "),
            only_right.join(", ")
        )));
    }
    let mut mismatch = None;
    for p1 in d1.points() {
        let p2 = d2.get(p1.id()).expect("id sets verified equal");
        let right = if conjugate {
            p2.poly().map(|c| c.conj())
        } else {
            p2.poly().clone()
        };
        if !poly_eq(p1.poly(), &right) {
            mismatch = Some(CompanionMismatch {
                id: p1.id().to_string(),
                left: p1.poly().clone(),
                right,
            });
            break;
        }
    }
    Ok(CompanionReport {
        conjugated: conjugate,
        points_compared: d1.len(),
        pass: mismatch.is_none(),
        mismatch,
    })
}

/// Coefficient-wise algebraic equality (differences are exactly zero).
fn poly_eq(a: &RatPoly, b: &RatPoly) -> bool {
    if a.degree() != b.degree() {
        return false;
    }
    let d = a.degree().unwrap_or(0);
    (0..=d).all(|i| (a.coeff(i) - b.coeff(i)).is_zero())
}

// ---------------------------------------------------------------------------
// The generic polygon.

/// Result of a generic-polygon computation: either the unique minimal
/// attained polygon that every point's polygon dominates pointwise, or the
/// antichain of minimal attained polygons when no single one minorizes all
/// others.  Indeterminacy is a legitimate outcome for arbitrary data, not an
/// error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericPolygon {
    Determinate(NewtonPolygon),
    /// One representative point id per minimal polygon, ascending by id.
    Indeterminate {
        antichain: Vec<(String, NewtonPolygon)>,
    },
}

/// A point's id, degree, and normalized polygon at a fixed place.
#[derive(Clone, Debug)]
struct ClassifiedPoint {
    id: String,
    degree: u32,
    polygon: NewtonPolygon,
}

/// Polygons for every point, computed in parallel, dataset order preserved.
fn classify_points(d: &FrobeniusDataset, place: &Place) -> Result<Vec<ClassifiedPoint>> {
    d.points()
        .par_iter()
        .map(|p| {
            let polygon = newton_polygon(p.poly(), &d.meta().field, place, p.degree())?;
            Ok(ClassifiedPoint {
                id: p.id().to_string(),
                degree: p.degree(),
                polygon,
            })
        })
        .collect()
}

/// Pointwise height comparison: `a` at or above `b` at every abscissa.
/// Unlike [`NewtonPolygon::lies_on_or_above`] this does not pin the right
/// endpoint, so polygons with different determinant valuations stay
/// comparable; widths are equal by construction here (the dataset fixes the
/// rank).
fn heights_dominate(a: &NewtonPolygon, b: &NewtonPolygon) -> bool {
    debug_assert_eq!(a.width(), b.width());
    (0..=a.width()).all(|x| a.height_at(x) >= b.height_at(x))
}

/// Distinct polygons with a representative id each, keyed deterministically.
fn distinct_polygons(points: &[ClassifiedPoint]) -> Vec<(String, NewtonPolygon)> {
    let mut classes: BTreeMap<String, (String, NewtonPolygon)> = BTreeMap::new();
    for p in points {
        let key = polygon_key(&p.polygon);
        classes
            .entry(key)
            .or_insert_with(|| (p.id.clone(), p.polygon.clone()));
    }
    classes.into_values().collect()
}

pub(crate) fn polygon_key(p: &NewtonPolygon) -> String {
    p.vertices()
        .iter()
        .map(|(x, y)| format!("{x}:{y}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Computes the generic polygon of the dataset at a place: the minimal
/// attained polygon, in the pointwise height order, that every point's
/// polygon dominates.  When the attained minima form an antichain instead,
/// they are all reported.
pub fn generic_polygon(d: &FrobeniusDataset, place: &Place) -> Result<GenericPolygon> {
    if d.is_empty() {
        return Err(Error::InvalidArgument(
            "an empty dataset has no generic polygon".into(),
        ));
    }
    let points = classify_points(d, place)?;
    let classes = distinct_polygons(&points);
    // A class below all others, if one exists.
    for (_, cand) in &classes {
        if classes.iter().all(|(_, other)| heights_dominate(other, cand)) {
            return Ok(GenericPolygon::Determinate(cand.clone()));
        }
    }
    // No global minimum: report the minimal elements.
    let mut antichain: Vec<(String, NewtonPolygon)> = classes
        .iter()
        .filter(|(_, c)| {
            !classes
                .iter()
                .any(|(_, other)| other != c && heights_dominate(c, other))
        })
        .cloned()
        .collect();
    antichain.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(GenericPolygon::Indeterminate { antichain })
}

// ---------------------------------------------------------------------------
// Jumping loci and degree bounds.

/// A non-generic point: its id, degree, and polygon.
#[derive(Clone, Debug)]
pub struct JumpPoint {
    pub id: String,
    pub degree: u32,
    pub polygon: NewtonPolygon,
}

/// The Newton stratification of a dataset at one place: the generic polygon,
/// the jumping locus `W` with its total degree, and the two degree bounds it
/// is tested against.
///
/// The bounds use the residue-field cardinality of the *place* (so an inert
/// place of a quadratic coefficient field contributes `p^2`), which need not
/// equal the base-field size; both values are carried so reports can print
/// them side by side.
#[derive(Clone, Debug)]
pub struct StrataReport {
    pub place: Place,
    pub generic: NewtonPolygon,
    /// Points attaining the generic polygon.
    pub generic_count: usize,
    /// Non-generic points in dataset (degree, id) order.
    pub jumping: Vec<JumpPoint>,
    /// `deg_k(W)`: the sum of the degrees of the jumping points.
    pub jumping_degree: u64,
    /// Residue cardinality of the place — the `q` in both bounds.
    pub residue_q: u64,
    /// The base-field size, printed alongside to keep the two `q`s apart.
    pub base_q: u64,
    /// `(q - 1) r (2g - 2 + m)`.
    pub linear_bound: i64,
    /// `(q - 1) (2^r - 2) (2g - 2 + m)`.
    pub exterior_bound: i64,
    pub within_linear: bool,
    pub within_exterior: bool,
}

impl StrataReport {
    /// Both degree bounds hold.
    pub fn pass(&self) -> bool {
        self.within_linear && self.within_exterior
    }
}

/// Computes the jumping locus of the dataset at a place and tests its total
/// degree against both bounds.  Requires a determinate generic polygon.
pub fn jumping_locus(d: &FrobeniusDataset, place: &Place) -> Result<StrataReport> {
    let generic = match generic_polygon(d, place)? {
        GenericPolygon::Determinate(g) => g,
        GenericPolygon::Indeterminate { antichain } => {
            return Err(Error::CannotDetermine(format!(
                "no generic polygon: {} incomparable minimal polygons attained",
                antichain.len()
            )));
        }
    };
    let points = classify_points(d, place)?;
    let mut jumping = Vec::new();
    let mut generic_count = 0usize;
    for p in points {
        if p.polygon == generic {
            generic_count += 1;
        } else {
            jumping.push(JumpPoint {
                id: p.id,
                degree: p.degree,
                polygon: p.polygon,
            });
        }
    }
    let jumping_degree: u64 = jumping.iter().map(|p| p.degree as u64).sum();
    let meta = d.meta();
    let residue_q = meta.field.residue_cardinality(place.p)?;
    let euler = 2 * meta.genus as i64 - 2 + meta.boundary_degree as i64;
    let r = meta.rank as i64;
    if meta.rank >= 63 {
        return Err(Error::InvalidArgument(
            "rank too large for the exterior-power bound".into(),
        ));
    }
    let qm1 = residue_q as i64 - 1;
    let linear_bound = qm1 * r * euler;
    let exterior_bound = qm1 * ((1i64 << meta.rank) - 2) * euler;
    Ok(StrataReport {
        place: place.clone(),
        generic,
        generic_count,
        jumping_degree,
        residue_q,
        base_q: meta.q,
        linear_bound,
        exterior_bound,
        within_linear: (jumping_degree as i64) <= linear_bound,
        within_exterior: (jumping_degree as i64) <= exterior_bound,
        jumping,
    })
}

// ---------------------------------------------------------------------------
// Semicontinuity.

/// How a point violates semicontinuity against the generic polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemicontinuityViolationKind {
    /// The polygon dips below the generic one somewhere.
    BelowGeneric,
    /// The right endpoint differs: the determinant valuation is not locally
    /// constant across the family.
    EndpointMismatch,
}

#[derive(Clone, Debug)]
pub struct SemicontinuityViolation {
    pub id: String,
    pub kind: SemicontinuityViolationKind,
    pub polygon: NewtonPolygon,
}

/// Outcome of [`semicontinuity_check`]: every point's polygon must lie on or
/// above the generic one with the same right endpoint, and the non-generic
/// points must all sit at or below a reported maximal degree — the
/// data-level shadow of "only finitely many jumps".
#[derive(Clone, Debug)]
pub struct SemicontinuityReport {
    pub place: Place,
    pub generic: NewtonPolygon,
    pub pass: bool,
    pub nongeneric_count: usize,
    /// Largest degree among non-generic points; `None` when every point is
    /// generic.
    pub max_nongeneric_degree: Option<u32>,
    pub violations: Vec<SemicontinuityViolation>,
}

/// Checks upper semicontinuity of the polygon against the generic one.
///
/// With the generic polygon computed from the dataset itself, a genuine
/// height dip below it cannot survive (the dipping polygon would have become
/// generic, or forced indeterminacy upstream); the failure mode that does
/// occur in practice is a moving right endpoint, reported as a
/// "locally constant" violation.  Both kinds are classified.
pub fn semicontinuity_check(d: &FrobeniusDataset, place: &Place) -> Result<SemicontinuityReport> {
    let generic = match generic_polygon(d, place)? {
        GenericPolygon::Determinate(g) => g,
        GenericPolygon::Indeterminate { antichain } => {
            return Err(Error::CannotDetermine(format!(
                "no generic polygon: {} incomparable minimal polygons attained",
                antichain.len()
            )));
        }
    };
    let points = classify_points(d, place)?;
    let mut violations = Vec::new();
    let mut nongeneric_count = 0usize;
    let mut max_nongeneric_degree = None;
    for p in points {
        if p.polygon == generic {
            continue;
        }
        nongeneric_count += 1;
        max_nongeneric_degree = Some(max_nongeneric_degree.map_or(p.degree, |m: u32| m.max(p.degree)));
        let endpoint_ok = p.polygon.right_height() == generic.right_height();
        let above = p.polygon.lies_on_or_above(&generic)?;
        if !endpoint_ok {
            violations.push(SemicontinuityViolation {
                id: p.id,
                kind: SemicontinuityViolationKind::EndpointMismatch,
                polygon: p.polygon,
            });
        } else if !above {
            violations.push(SemicontinuityViolation {
                id: p.id,
                kind: SemicontinuityViolationKind::BelowGeneric,
                polygon: p.polygon,
            });
        }
    }
    Ok(SemicontinuityReport {
        place: place.clone(),
        generic,
        pass: violations.is_empty(),
        nongeneric_count,
        max_nongeneric_degree,
        violations,
    })
}

// ---------------------------------------------------------------------------
// Slope gaps.

/// Largest jump between consecutive generic slopes, tested against 1.
///
/// The bound is a theorem only for indecomposable objects, which the data
/// cannot certify; the dataset's `irreducible` flag decides whether the
/// verdict is binding (`applicable`) or informational.
#[derive(Clone, Debug)]
pub struct SlopeGapReport {
    pub place: Place,
    pub max_gap: Rational,
    /// `max_gap <= 1`.
    pub bound_met: bool,
    /// Echoes the dataset's irreducibility flag.
    pub applicable: bool,
}

impl SlopeGapReport {
    /// Fails only when the bound is both applicable and broken.
    pub fn pass(&self) -> bool {
        self.bound_met || !self.applicable
    }
}

/// Evaluates the slope-gap bound on the generic polygon at a place.
pub fn slope_gap_report(d: &FrobeniusDataset, place: &Place) -> Result<SlopeGapReport> {
    let generic = match generic_polygon(d, place)? {
        GenericPolygon::Determinate(g) => g,
        GenericPolygon::Indeterminate { antichain } => {
            return Err(Error::CannotDetermine(format!(
                "no generic polygon: {} incomparable minimal polygons attained",
                antichain.len()
            )));
        }
    };
    let max_gap = generic.max_slope_gap();
    let bound_met = max_gap <= Rational::from_integer(1.into());
    Ok(SlopeGapReport {
        place: place.clone(),
        max_gap,
        bound_met,
        applicable: d.meta().irreducible,
    })
}

// ---------------------------------------------------------------------------
// The roots-of-unity probe.

/// Outcome of [`koshikawa_probe`]: three hypotheses — unit-root at every
/// place above the characteristic, plain at the characteristic, and pure of
/// weight zero — and, when all hold, the certificate that every polynomial
/// is a product of cyclotomics, together with the finite set of distinct
/// polynomials appearing in the dataset.
#[derive(Clone, Debug)]
pub struct KoshikawaReport {
    /// The characteristic `p` of the base field.
    pub characteristic: u64,
    pub unit_root: bool,
    /// Units at every finite place not above the characteristic.
    pub p_plain: bool,
    pub pure_weight_zero: bool,
    /// All three hypotheses hold, so the conclusion is expected.
    pub applicable: bool,
    /// Every polynomial has all roots of unity (checked only when
    /// applicable).
    pub all_cyclotomic: bool,
    /// The distinct polynomials, deterministically ordered (only when
    /// applicable).
    pub distinct_polynomials: Vec<RatPoly>,
    /// What broke first, for failing probes.
    pub detail: Option<String>,
}

impl KoshikawaReport {
    /// The full certificate: hypotheses hold and every polynomial is
    /// cyclotomic.
    pub fn pass(&self) -> bool {
        self.applicable && self.all_cyclotomic
    }
}

/// Whether `n` is `±` a power of `p` (so its prime support away from `p` is
/// empty).
fn away_prime_free(n: &num_bigint::BigInt, p: u64) -> bool {
    use num_integer::Integer;
    use num_traits::{One, Signed};
    let p = num_bigint::BigInt::from(p);
    let mut m = n.abs();
    while m.is_multiple_of(&p) {
        m /= &p;
    }
    m.is_one()
}

/// Runs the isotriviality probe: if the dataset is unit-root above the
/// characteristic, plain away from it, and pure of weight zero (within
/// `tol`), then every characteristic polynomial must be a product of
/// cyclotomic polynomials and only finitely many distinct ones can appear.
/// The probe verifies exactly that and reports the distinct set.
pub fn koshikawa_probe(d: &FrobeniusDataset, tol: f64) -> Result<KoshikawaReport> {
    let meta = d.meta();
    let (p, _) = prime_power_decompose(meta.q)?;
    let places: Vec<Place> = (0..meta.field.places_above(p)?)
        .map(|i| Place::new(p, i))
        .collect();
    let mut detail = None;

    // (1) Unit-root: every polygon at every place above p is identically
    // flat.
    let mut unit_root = true;
    'outer: for place in &places {
        let points = classify_points(d, place)?;
        for pt in &points {
            if !pt.polygon.slope_multiset().iter().all(|s| s.is_zero()) {
                unit_root = false;
                detail.get_or_insert(format!(
                    "point {} has nonzero slopes at place {place}",
                    pt.id
                ));
                break 'outer;
            }
        }
    }

    // (2) p-plain: eigenvalues are units at every finite place NOT above p.
    // Equivalently, at every such place the coefficients are integral and
    // the leading coefficient is a unit — and that is decidable exactly:
    // coefficient denominators may carry no prime but p, and the leading
    // coefficient's norm must be a p-power up to sign.  No place needs to be
    // enumerated.
    let mut p_plain = true;
    'plain: for pt in d.points() {
        let poly = pt.poly();
        let deg = poly.degree().unwrap_or(0);
        for i in 0..=deg {
            let c = poly.coeff(i);
            if c.is_zero() {
                continue;
            }
            let mut support_ok = away_prime_free(c.a().denom(), p);
            support_ok = support_ok && away_prime_free(c.b().denom(), p);
            if support_ok && i == deg {
                let norm = c.norm_in(&meta.field);
                support_ok =
                    away_prime_free(norm.numer(), p) && away_prime_free(norm.denom(), p);
            }
            if !support_ok {
                p_plain = false;
                detail.get_or_insert(format!(
                    "coefficient {i} of point {} is not a unit away from {p}",
                    pt.id()
                ));
                break 'plain;
            }
        }
    }

    // (3) Pure of weight zero.
    let purity = check_purity(d, 0.0, tol)?;
    if !purity.pure {
        let who = purity
            .violations
            .first()
            .map(|v| v.id.clone())
            .or_else(|| purity.flagged.first().map(|f| f.id.clone()));
        detail.get_or_insert(match who {
            Some(id) => format!("point {id} is not pure of weight zero"),
            None => "purity check failed".into(),
        });
    }

    let applicable = unit_root && p_plain && purity.pure;
    let mut all_cyclotomic = false;
    let mut distinct_polynomials = Vec::new();
    if applicable {
        all_cyclotomic = true;
        let mut seen: BTreeMap<String, RatPoly> = BTreeMap::new();
        for pt in d.points() {
            let key = pt
                .poly()
                .coeffs()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("|");
            if seen.contains_key(&key) {
                continue;
            }
            let q = rational_form(pt.poly());
            let bound = default_order_bound(q.degree().unwrap_or(0));
            if !is_roots_of_unity(&q, bound)? {
                all_cyclotomic = false;
                detail.get_or_insert(format!(
                    "point {} is not a product of cyclotomics",
                    pt.id()
                ));
            }
            seen.insert(key, pt.poly().clone());
        }
        distinct_polynomials = seen.into_values().collect();
    }

    Ok(KoshikawaReport {
        characteristic: p,
        unit_root,
        p_plain,
        pure_weight_zero: purity.pure,
        applicable,
        all_cyclotomic,
        distinct_polynomials,
        detail,
    })
}
