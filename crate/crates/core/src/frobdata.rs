//! The dataset model: closed points with Frobenius polynomials plus geometry
//! metadata, linear-algebra composed products (dual, tensor, exterior
//! power), constant twists, Galois conjugation, and a versioned JSON format.
//!
//! Every Frobenius polynomial is a *reverse* characteristic polynomial: the
//! product of `1 - alpha T` over the reciprocal roots `alpha`, so the
//! constant term is exactly one.  Composed products are computed over the
//! coefficient field via power sums and Newton's identities — numeric roots
//! never enter, so the results are exact.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::Error;
use crate::exactnum::{charpoly_from_power_sums, format_rational, parse_rational, power_sums};
use crate::nf::{FieldSpec, NumberFieldElement};
use crate::poly::{coeff_from_u64, Poly};
use crate::{RatPoly, Result};

/// Geometry and coefficient-field metadata shared by a whole dataset.
///
/// `swan` carries wild ramification exponents of boundary points, keyed by a
/// boundary-point id; absent ids are tame (exponent zero).
/// `complete_through_degree`, when set, asserts that the dataset lists every
/// closed point of the curve up to that degree — Euler products check this
/// claim before trusting a truncation.  `irreducible` records whether the
/// object is known irreducible (some slope-gap statements only apply then).
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryMeta {
    pub q: u64,
    pub dim: u32,
    pub genus: u32,
    pub boundary_degree: u32,
    pub rank: u32,
    pub field: Arc<FieldSpec>,
    pub swan: BTreeMap<String, u64>,
    pub complete_through_degree: Option<u32>,
    pub irreducible: bool,
}

impl GeometryMeta {
    /// Rational-coefficient metadata with tame boundary and no completeness
    /// claim; adjust fields as needed.
    pub fn new(q: u64, genus: u32, boundary_degree: u32, rank: u32) -> Self {
        GeometryMeta {
            q,
            dim: 1,
            genus,
            boundary_degree,
            rank,
            field: FieldSpec::rationals(),
            swan: BTreeMap::new(),
            complete_through_degree: None,
            irreducible: false,
        }
    }
}

/// One closed point with its Frobenius polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct DataPoint {
    id: String,
    degree: u32,
    poly: RatPoly,
}

impl DataPoint {
    pub fn new(id: impl Into<String>, degree: u32, poly: RatPoly) -> Self {
        DataPoint {
            id: id.into(),
            degree,
            poly,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &RatPoly {
        &self.poly
    }
}

/// An immutable, validated collection of closed points with their Frobenius
/// polynomials.  Points are kept sorted by `(degree, id)`; ids are unique;
/// every polynomial has constant term one, degree equal to the rank, and
/// coefficients in the metadata's field.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusDataset {
    meta: GeometryMeta,
    points: Vec<DataPoint>,
}

impl FrobeniusDataset {
    pub fn new(meta: GeometryMeta, mut points: Vec<DataPoint>) -> Result<Self> {
        points.sort_by(|a, b| (a.degree, a.id.as_str()).cmp(&(b.degree, b.id.as_str())));
        for w in points.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::malformed_at(&w[0].id, "duplicate point id"));
            }
        }
        for pt in &points {
            if pt.degree == 0 {
                return Err(Error::malformed_at(&pt.id, "point degree must be positive"));
            }
            if !pt.poly.coeff(0).is_one() {
                return Err(Error::malformed_at(
                    &pt.id,
                    "Frobenius polynomial must have constant term 1",
                ));
            }
            if pt.poly.degree() != Some(meta.rank as usize) {
                return Err(Error::malformed_at(
                    &pt.id,
                    format!(
                        "Frobenius polynomial degree {:?} does not match rank {}",
                        pt.poly.degree(),
                        meta.rank
                    ),
                ));
            }
            for c in pt.poly.coeffs() {
                if let Some(f) = c.field() {
                    if f.as_ref() != meta.field.as_ref() {
                        return Err(Error::malformed_at(
                            &pt.id,
                            "coefficient lies outside the dataset's field",
                        ));
                    }
                }
            }
        }
        Ok(FrobeniusDataset { meta, points })
    }

    pub fn meta(&self) -> &GeometryMeta {
        &self.meta
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn get(&self, id: &str) -> Option<&DataPoint> {
        self.points.iter().find(|p| p.id == id)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the metadata's completeness claim covers degrees up to `n`.
    pub fn require_complete_through(&self, n: u32) -> Result<()> {
        let claimed = self.meta.complete_through_degree.unwrap_or(0);
        if claimed < n {
            return Err(Error::IncompleteDataset {
                complete_through: claimed,
                first_gap: claimed + 1,
            });
        }
        Ok(())
    }

    /// Maps every point polynomial, keeping metadata except for an optional
    /// rank change.
    fn map_points<F>(&self, new_rank: Option<u32>, f: F) -> Result<FrobeniusDataset>
    where
        F: Fn(&DataPoint) -> Result<RatPoly>,
    {
        let mut meta = self.meta.clone();
        if let Some(r) = new_rank {
            meta.rank = r;
        }
        let points = self
            .points
            .iter()
            .map(|pt| Ok(DataPoint::new(pt.id.clone(), pt.degree, f(pt)?)))
            .collect::<Result<Vec<_>>>()?;
        FrobeniusDataset::new(meta, points)
    }
}

/// The polynomial whose reciprocal-root multiset is inverted: `alpha` maps
/// to `1/alpha`, renormalized to constant term one.  `rank` pins the
/// intended degree; a polynomial of lower degree has a vanishing reciprocal
/// root, i.e. non-invertible Frobenius.
pub fn dual_charpoly(p: &RatPoly, rank: usize) -> Result<RatPoly> {
    if p.degree() != Some(rank) {
        return Err(Error::SingularFrobenius(format!(
            "degree {:?} below rank {rank}: a reciprocal root vanishes",
            p.degree()
        )));
    }
    let lead = p.coeff(rank);
    Ok(p.reversed().scalar_mul(&lead.inv()))
}

/// Pointwise dual of a whole dataset (same rank; every reciprocal-root
/// multiset inverted).
pub fn dual_dataset(d: &FrobeniusDataset) -> Result<FrobeniusDataset> {
    let r = d.meta.rank as usize;
    d.map_points(None, |pt| dual_charpoly(&pt.poly, r))
}

/// Elementary symmetric functions `e_0..=e_s` of a multiset given its power
/// sums `p_1..=p_s`, by Newton's identities (exact, over the field).
fn elementary_from_power_sums(ps: &[NumberFieldElement], s: usize) -> Vec<NumberFieldElement> {
    let mut e = vec![NumberFieldElement::integer(1)];
    for i in 1..=s {
        let mut acc = NumberFieldElement::zero();
        let mut sign = true;
        for j in 1..=i {
            let term = ps[j - 1].clone() * e[i - j].clone();
            acc = if sign { acc + term } else { acc - term };
            sign = !sign;
        }
        e.push(acc / coeff_from_u64::<NumberFieldElement>(i as u64));
    }
    e
}

/// Reverse characteristic polynomial of the tensor product: reciprocal roots
/// are all pairwise products `alpha_i beta_j`, computed from the power-sum
/// identity `s_k(P (x) Q) = s_k(P) s_k(Q)`.
pub fn tensor_charpoly(p: &RatPoly, q: &RatPoly) -> Result<RatPoly> {
    let dp = p.degree().ok_or_else(|| {
        Error::InvalidArgument("tensor factor must be nonzero".into())
    })?;
    let dq = q.degree().ok_or_else(|| {
        Error::InvalidArgument("tensor factor must be nonzero".into())
    })?;
    let d = dp * dq;
    if d == 0 {
        // Constant polynomials with constant term 1 tensor to 1.
        return Ok(Poly::one());
    }
    let sp = power_sums(p, d)?;
    let sq = power_sums(q, d)?;
    let s: Vec<NumberFieldElement> = sp
        .into_iter()
        .zip(sq)
        .map(|(a, b)| a * b)
        .collect();
    charpoly_from_power_sums(&s, d)
}

/// Reverse characteristic polynomial of the s-th exterior power: reciprocal
/// roots are products over size-`s` subsets.  Uses the trace identity
/// `s_k(wedge^s) = e_s(alpha_1^k, ..., alpha_r^k)`, with the elementary
/// symmetric function obtained from power sums of `P` at multiples of `k`.
/// For `s = 2` this specializes to `(s_k^2 - s_2k) / 2`.
pub fn wedge_charpoly(p: &RatPoly, s: usize) -> Result<RatPoly> {
    let r = p
        .degree()
        .ok_or_else(|| Error::InvalidArgument("wedge of the zero polynomial".into()))?;
    if s == 0 || s > r {
        return Err(Error::InvalidArgument(format!(
            "exterior power {s} out of range 1..={r}"
        )));
    }
    if s == 1 {
        return Ok(p.clone());
    }
    let d = binomial(r, s);
    // Power sums of P up to s*d cover p_j(alpha^k) = s_{jk}(P).
    let sp = power_sums(p, s * d)?;
    let mut wedge_sums = Vec::with_capacity(d);
    for k in 1..=d {
        let ps_k: Vec<NumberFieldElement> =
            (1..=s).map(|j| sp[j * k - 1].clone()).collect();
        let e = elementary_from_power_sums(&ps_k, s);
        wedge_sums.push(e[s].clone());
    }
    charpoly_from_power_sums(&wedge_sums, d)
}

/// Binomial coefficient, exact in `usize` at the small ranks used here.
pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Scales every reciprocal root at a degree-`n` point by `c^n`: coefficient
/// `a_i` becomes `a_i c^(i n)`.  The constant term stays one, so this is a
/// twist by a rank-one constant object.
pub fn twist_dataset(d: &FrobeniusDataset, c: &NumberFieldElement) -> Result<FrobeniusDataset> {
    if c.is_zero() {
        return Err(Error::InvalidArgument("twist by zero".into()));
    }
    d.map_points(None, |pt| {
        let cn = num_traits::pow(c.clone(), pt.degree as usize);
        let mut scale = NumberFieldElement::integer(1);
        let coeffs = pt
            .poly
            .coeffs()
            .iter()
            .map(|a| {
                let out = a.clone() * scale.clone();
                scale = scale.clone() * cn.clone();
                out
            })
            .collect();
        Ok(Poly::from_coeffs(coeffs))
    })
}

/// Applies the nontrivial automorphism of a quadratic coefficient field to
/// every polynomial; the identity over the rationals.
pub fn galois_conjugate_dataset(d: &FrobeniusDataset) -> Result<FrobeniusDataset> {
    if d.meta.field.degree() == 1 {
        return Ok(d.clone());
    }
    d.map_points(None, |pt| Ok(pt.poly.map(|c| c.conj())))
}

/// Pointwise top exterior power: the rank-one dataset of determinants.
pub fn det_dataset(d: &FrobeniusDataset) -> Result<FrobeniusDataset> {
    let r = d.meta.rank as usize;
    d.map_points(Some(1), |pt| wedge_charpoly(&pt.poly, r))
}

// ---------------------------------------------------------------------------
// JSON encoding (version 1)
//
// {"version": 1,
//  "meta": {"q", "dim", "genus", "boundary_degree", "rank",
//           "min_poly": [ints], "swan": {id: int},
//           "complete_through_degree"?, "irreducible"?},
//  "points": [{"id", "degree", "charpoly": [["num/den","num/den"], ...]}]}
//
// Coefficients ascend in T; each is an [a, b] pair in the theta-basis.
// serde_json maps are ordered, so serialization is deterministic and
// round-trips are exact.
// ---------------------------------------------------------------------------

fn coeff_to_json(c: &NumberFieldElement) -> Value {
    let (a, b) = (c.a(), c.b());
    json!([format_rational(a), format_rational(b)])
}

fn meta_to_json(meta: &GeometryMeta) -> Result<Value> {
    let min_poly: Vec<i64> = meta
        .field
        .min_poly()
        .iter()
        .map(|c| {
            c.to_i64().ok_or_else(|| {
                Error::InvalidArgument("field minimal polynomial coefficient overflows i64".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = serde_json::Map::new();
    m.insert("q".into(), json!(meta.q));
    m.insert("dim".into(), json!(meta.dim));
    m.insert("genus".into(), json!(meta.genus));
    m.insert("boundary_degree".into(), json!(meta.boundary_degree));
    m.insert("rank".into(), json!(meta.rank));
    m.insert("min_poly".into(), json!(min_poly));
    m.insert("swan".into(), json!(meta.swan));
    if let Some(n) = meta.complete_through_degree {
        m.insert("complete_through_degree".into(), json!(n));
    }
    if meta.irreducible {
        m.insert("irreducible".into(), json!(true));
    }
    Ok(Value::Object(m))
}

pub fn to_json_string(d: &FrobeniusDataset) -> Result<String> {
    let points: Vec<Value> = d
        .points
        .iter()
        .map(|pt| {
            let charpoly: Vec<Value> = pt.poly.coeffs().iter().map(coeff_to_json).collect();
            json!({"id": pt.id, "degree": pt.degree, "charpoly": charpoly})
        })
        .collect();
    let doc = json!({"version": 1, "meta": meta_to_json(&d.meta)?, "points": points});
    let mut out = serde_json::to_string_pretty(&doc)?;
    out.push('\n');
    Ok(out)
}

pub fn save(d: &FrobeniusDataset, path: &Path) -> Result<()> {
    std::fs::write(path, to_json_string(d)?)?;
    Ok(())
}

fn get_u64(obj: &serde_json::Map<String, Value>, key: &str, ctx: &str) -> Result<u64> {
    obj.get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::malformed(format!("{ctx}: missing or non-integer field {key:?}")))
}

fn parse_coeff(v: &Value, field: &Arc<FieldSpec>, id: &str, i: usize) -> Result<NumberFieldElement> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
        Error::malformed_at(id, format!("charpoly[{i}] is not an [a, b] pair"))
    })?;
    let mut parts = Vec::with_capacity(2);
    for (j, entry) in pair.iter().enumerate() {
        let s = entry.as_str().ok_or_else(|| {
            Error::malformed_at(id, format!("charpoly[{i}][{j}] is not a \"num/den\" string"))
        })?;
        parts.push(parse_rational(s).map_err(|e| {
            Error::malformed_at(id, format!("charpoly[{i}][{j}]: {e}"))
        })?);
    }
    let b = parts.pop().unwrap();
    let a = parts.pop().unwrap();
    if b.is_zero() {
        Ok(NumberFieldElement::rational(a))
    } else {
        NumberFieldElement::in_field(a, b, field)
            .map_err(|e| Error::malformed_at(id, format!("charpoly[{i}]: {e}")))
    }
}

pub fn from_json_str(text: &str) -> Result<FrobeniusDataset> {
    let doc: Value = serde_json::from_str(text)?;
    let root = doc
        .as_object()
        .ok_or_else(|| Error::malformed("top level is not an object"))?;
    let version = get_u64(root, "version", "top level")?;
    if version != 1 {
        return Err(Error::malformed(format!("unsupported version {version}")));
    }
    let meta_obj = root
        .get("meta")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::malformed("missing meta object"))?;
    let min_poly: Vec<BigInt> = meta_obj
        .get("min_poly")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::malformed("meta: missing min_poly array"))?
        .iter()
        .map(|v| {
            v.as_i64()
                .map(BigInt::from)
                .ok_or_else(|| Error::malformed("meta: min_poly entry is not an integer"))
        })
        .collect::<Result<Vec<_>>>()?;
    let field = FieldSpec::from_min_poly(&min_poly)
        .map_err(|e| Error::malformed(format!("meta: {e}")))?;
    let mut swan = BTreeMap::new();
    if let Some(sv) = meta_obj.get("swan") {
        let sm = sv
            .as_object()
            .ok_or_else(|| Error::malformed("meta: swan is not an object"))?;
        for (k, v) in sm {
            let n = v
                .as_u64()
                .ok_or_else(|| Error::malformed(format!("meta: swan[{k:?}] is not an integer")))?;
            swan.insert(k.clone(), n);
        }
    }
    let meta = GeometryMeta {
        q: get_u64(meta_obj, "q", "meta")?,
        dim: get_u64(meta_obj, "dim", "meta")? as u32,
        genus: get_u64(meta_obj, "genus", "meta")? as u32,
        boundary_degree: get_u64(meta_obj, "boundary_degree", "meta")? as u32,
        rank: get_u64(meta_obj, "rank", "meta")? as u32,
        field: field.clone(),
        swan,
        complete_through_degree: meta_obj
            .get("complete_through_degree")
            .map(|v| {
                v.as_u64().map(|n| n as u32).ok_or_else(|| {
                    Error::malformed("meta: complete_through_degree is not an integer")
                })
            })
            .transpose()?,
        irreducible: match meta_obj.get("irreducible") {
            None => false,
            Some(v) => v
                .as_bool()
                .ok_or_else(|| Error::malformed("meta: irreducible is not a boolean"))?,
        },
    };
    let points_arr = root
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::malformed("missing points array"))?;
    let mut points = Vec::with_capacity(points_arr.len());
    for entry in points_arr {
        let obj = entry
            .as_object()
            .ok_or_else(|| Error::malformed("points entry is not an object"))?;
        let id = obj
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::malformed("points entry: missing id"))?
            .to_string();
        let degree = get_u64(obj, "degree", &format!("point {id:?}"))? as u32;
        let charpoly = obj
            .get("charpoly")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::malformed_at(&id, "missing charpoly array"))?;
        let coeffs = charpoly
            .iter()
            .enumerate()
            .map(|(i, v)| parse_coeff(v, &field, &id, i))
            .collect::<Result<Vec<_>>>()?;
        points.push(DataPoint::new(id, degree, Poly::from_coeffs(coeffs)));
    }
    FrobeniusDataset::new(meta, points)
}

pub fn load(path: &Path) -> Result<FrobeniusDataset> {
    let text = std::fs::read_to_string(path)?;
    from_json_str(&text)
}

/// A short human-readable description used in CLI headers.
pub fn describe(d: &FrobeniusDataset) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "q={} genus={} boundary={} rank={} points={}",
        d.meta.q,
        d.meta.genus,
        d.meta.boundary_degree,
        d.meta.rank,
        d.points.len()
    );
    if let Some(n) = d.meta.complete_through_degree {
        let _ = write!(s, " complete_through={n}");
    }
    s
}
