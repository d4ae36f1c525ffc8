//! Number fields of degree at most two and their finite places.
//!
//! A [`FieldSpec`] is a monic integer minimal polynomial of degree one or two
//! together with certified enclosures of its archimedean roots.  Degree-one
//! specs all describe the rationals and are normalized to `T`; degree-two
//! specs must be irreducible (non-square discriminant).
//!
//! A [`NumberFieldElement`] is `a + b*theta` with rational `a, b` and `theta`
//! the distinguished root of the spec's minimal polynomial.  Elements with
//! `b = 0` are canonically field-agnostic (they carry no spec), so plain
//! rationals mix freely with elements of any quadratic field; arithmetic
//! between elements of two *different* quadratic fields is a programming error
//! and panics.
//!
//! A finite place is described by [`Place`]: the residue characteristic `p`
//! and, when `p` splits, an index selecting one of the two factors.  The
//! factor indexing is canonical and independent of working precision: factor 0
//! corresponds to the square root `W` of the deflated discriminant whose
//! residue `W mod p` is the smaller of the two lifts (for `p = 2`, the root
//! congruent to 1 mod 4).  [`nf_valuation`] computes valuations normalized so
//! `v(p) = 1`; split places go through Hensel-lifted roots at the requested
//! precision, inert and ramified places go through the exact norm (so ramified
//! valuations land in half-integers).

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::exactnum::{int_valuation, is_prime, valuation, Rational};
use crate::Result;

/// Certified disc enclosure of one archimedean root: the true root lies
/// within `radius` of `re + im*i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enclosure {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

/// A number field of degree at most two, described by a monic integer minimal
/// polynomial (ascending coefficients) with certified archimedean root
/// enclosures, sorted by real part then imaginary part.
#[derive(Debug)]
pub struct FieldSpec {
    min_poly: Vec<BigInt>,
    roots: Vec<Enclosure>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
    }
}
impl Eq for FieldSpec {}

static RATIONALS: OnceLock<Arc<FieldSpec>> = OnceLock::new();

impl FieldSpec {
    /// The rationals, canonically `min_poly = T` with root zero.
    pub fn rationals() -> Arc<FieldSpec> {
        RATIONALS
            .get_or_init(|| {
                Arc::new(FieldSpec {
                    min_poly: vec![BigInt::zero(), BigInt::one()],
                    roots: vec![Enclosure {
                        re: 0.0,
                        im: 0.0,
                        radius: 0.0,
                    }],
                })
            })
            .clone()
    }

    /// Builds a spec from a monic integer minimal polynomial of degree one or
    /// two.  Degree-one input is normalized to the canonical rational spec;
    /// degree-two input must be irreducible over the rationals.
    pub fn from_min_poly(coeffs: &[BigInt]) -> Result<Arc<FieldSpec>> {
        match coeffs.len() {
            2 => {
                if !coeffs[1].is_one() {
                    return Err(Error::InvalidArgument(
                        "minimal polynomial must be monic".into(),
                    ));
                }
                Ok(FieldSpec::rationals())
            }
            3 => {
                if !coeffs[2].is_one() {
                    return Err(Error::InvalidArgument(
                        "minimal polynomial must be monic".into(),
                    ));
                }
                let c0 = coeffs[0].clone();
                let c1 = coeffs[1].clone();
                let disc: BigInt = &c1 * &c1 - 4 * &c0;
                if is_perfect_square(&disc) {
                    return Err(Error::InvalidArgument(format!(
                        "T^2 + {c1} T + {c0} is reducible over the rationals"
                    )));
                }
                let roots = quadratic_roots(&c0, &c1, &disc);
                Ok(Arc::new(FieldSpec {
                    min_poly: coeffs.to_vec(),
                    roots,
                }))
            }
            _ => Err(Error::InvalidArgument(format!(
                "minimal polynomial must have degree 1 or 2, got {} coefficients",
                coeffs.len()
            ))),
        }
    }

    /// Convenience constructor for `T^2 + c1 T + c0`.
    pub fn quadratic(c0: i64, c1: i64) -> Result<Arc<FieldSpec>> {
        FieldSpec::from_min_poly(&[BigInt::from(c0), BigInt::from(c1), BigInt::one()])
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    /// Archimedean root enclosures, sorted by `(re, im)`.
    pub fn roots(&self) -> &[Enclosure] {
        &self.roots
    }

    /// `theta^2` rewritten in the `1, theta` basis: returns `(s, t)` with
    /// `theta^2 = s + t*theta`.
    fn theta_squared(&self) -> (Rational, Rational) {
        assert_eq!(self.degree(), 2);
        (
            -Rational::from(self.min_poly[0].clone()),
            -Rational::from(self.min_poly[1].clone()),
        )
    }

    /// Trace and norm of `theta`: `theta + conj(theta) = -c1`,
    /// `theta * conj(theta) = c0`.
    fn theta_trace_norm(&self) -> (Rational, Rational) {
        assert_eq!(self.degree(), 2);
        (
            -Rational::from(self.min_poly[1].clone()),
            Rational::from(self.min_poly[0].clone()),
        )
    }

    /// How the rational prime `p` decomposes in the field.
    pub fn splitting(&self, p: u64) -> Result<Splitting> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if self.is_rationals() {
            return Ok(Splitting::Split); // single place, full residue field
        }
        let c0 = &self.min_poly[0];
        let c1 = &self.min_poly[1];
        let disc: BigInt = c1 * c1 - 4 * c0;
        let v = int_valuation(&disc, p);
        if v % 2 == 1 {
            return Ok(Splitting::Ramified);
        }
        // Deflate even powers of p; the place structure only sees the
        // square-class of the discriminant.
        let m: BigInt = &disc / BigInt::from(p).pow(v as u32);
        if p == 2 {
            // 2 splits in Q(sqrt(m)) iff m = 1 mod 8, is inert iff m = 5
            // mod 8, and ramifies otherwise (m = 3 mod 4).
            let m8 = m.mod_floor(&BigInt::from(8)).to_u64().unwrap();
            return Ok(match m8 {
                1 => Splitting::Split,
                5 => Splitting::Inert,
                _ => Splitting::Ramified,
            });
        }
        let mp = m.mod_floor(&BigInt::from(p));
        let legendre = mp.modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
        if legendre.is_one() {
            Ok(Splitting::Split)
        } else {
            Ok(Splitting::Inert)
        }
    }

    /// Number of places above `p` (two iff `p` splits in a quadratic field).
    pub fn places_above(&self, p: u64) -> Result<usize> {
        if self.is_rationals() {
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            return Ok(1);
        }
        Ok(match self.splitting(p)? {
            Splitting::Split => 2,
            _ => 1,
        })
    }

    /// Residue field cardinality of the place (p for split/ramified, p^2 for
    /// inert; always p over the rationals).
    pub fn residue_cardinality(&self, p: u64) -> Result<u64> {
        if self.is_rationals() {
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            return Ok(p);
        }
        Ok(match self.splitting(p)? {
            Splitting::Inert => p * p,
            _ => p,
        })
    }

    /// The Hensel-lifted image of `theta` in `Z/p^precision` at the split
    /// place with the given factor index (see the module doc for the
    /// canonical indexing).
    fn split_root(&self, p: u64, factor_index: usize, precision: u32) -> Result<BigInt> {
        assert!(factor_index < 2);
        let c0 = &self.min_poly[0];
        let c1 = &self.min_poly[1];
        let disc: BigInt = c1 * c1 - 4 * c0;
        let v = int_valuation(&disc, p);
        debug_assert!(v % 2 == 0);
        let pk = BigInt::from(p).pow((v / 2) as u32);
        let m: BigInt = &disc / (&pk * &pk);
        // sqrt(disc) = p^(v/2) * W with W the canonical square root of m; work
        // a couple of digits above the target so the final division by 2 (and
        // the p^(v/2) shift) still leaves `precision` correct digits.
        let extra = (v / 2) as u32 + 2;
        let w = sqrt_lift(&m, p, precision + extra)?;
        let modulus = BigInt::from(p).pow(precision + extra);
        let numerator = if factor_index == 0 {
            (-c1 + &pk * &w).mod_floor(&modulus)
        } else {
            (-c1 - &pk * &w).mod_floor(&modulus)
        };
        // theta is integral, so the numerator is an even 2-adic integer and
        // halving is exact; for odd p just multiply by the inverse of 2.
        let target = BigInt::from(p).pow(precision);
        let root = if p == 2 {
            debug_assert!(numerator.is_even());
            (numerator / BigInt::from(2)).mod_floor(&target)
        } else {
            let inv2 = mod_inverse(&BigInt::from(2), &modulus).expect("2 invertible");
            (numerator * inv2).mod_floor(&target)
        };
        Ok(root)
    }
}

/// Decomposition type of a rational prime in a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
        };
        write!(f, "{s}")
    }
}

/// A finite place: residue characteristic plus a factor index (only
/// meaningful, and then either 0 or 1, when the prime splits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Place {
    pub p: u64,
    pub factor_index: usize,
}

impl Place {
    pub fn new(p: u64, factor_index: usize) -> Self {
        Place { p, factor_index }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.p, self.factor_index)
    }
}

/// `a + b*theta` with rational coordinates; `b = 0` elements carry no field
/// tag and act as plain rationals in any ambient field.
#[derive(Clone, Debug)]
pub struct NumberFieldElement {
    a: Rational,
    b: Rational,
    field: Option<Arc<FieldSpec>>,
}

impl NumberFieldElement {
    pub fn rational(a: Rational) -> Self {
        NumberFieldElement {
            a,
            b: Rational::zero(),
            field: None,
        }
    }

    pub fn integer(n: i64) -> Self {
        NumberFieldElement::rational(Rational::from(BigInt::from(n)))
    }

    /// `a + b*theta` in the given field; `b != 0` requires degree two.
    pub fn in_field(a: Rational, b: Rational, field: &Arc<FieldSpec>) -> Result<Self> {
        if b.is_zero() {
            return Ok(NumberFieldElement::rational(a));
        }
        if field.degree() != 2 {
            return Err(Error::InvalidArgument(
                "theta coordinate requires a quadratic field".into(),
            ));
        }
        Ok(NumberFieldElement {
            a,
            b,
            field: Some(field.clone()),
        })
    }

    pub fn theta(field: &Arc<FieldSpec>) -> Result<Self> {
        NumberFieldElement::in_field(Rational::zero(), Rational::one(), field)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> Option<&Arc<FieldSpec>> {
        self.field.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    /// The Galois conjugate `a + b*conj(theta)`; the identity on rationals.
    pub fn conj(&self) -> Self {
        match &self.field {
            None => self.clone(),
            Some(f) => {
                let (tr, _) = f.theta_trace_norm();
                // conj(theta) = tr - theta
                NumberFieldElement {
                    a: &self.a + &(&self.b * &tr),
                    b: -&self.b,
                    field: self.field.clone(),
                }
            }
        }
    }

    /// Field norm down to the rationals, taken in the given ambient field
    /// (rational elements of a quadratic field contribute their square).
    pub fn norm_in(&self, field: &Arc<FieldSpec>) -> Rational {
        if field.is_rationals() {
            debug_assert!(self.is_rational());
            return self.a.clone();
        }
        let (tr, nm) = field.theta_trace_norm();
        // N(a + b theta) = a^2 + a b tr(theta) + b^2 N(theta)
        &self.a * &self.a + &self.a * &self.b * tr + &self.b * &self.b * nm
    }

    /// Complex embedding selected by the archimedean root index, together with
    /// a bound on the absolute error (enclosure radius plus rounding slop).
    pub fn embed(&self, root_index: usize) -> Result<(Complex64, f64)> {
        let a = rational_to_f64(&self.a)?;
        if self.is_rational() {
            return Ok((Complex64::new(a, 0.0), a.abs() * 1e-15 + 1e-300));
        }
        let field = self.field.as_ref().unwrap();
        let root = *field.roots().get(root_index).ok_or_else(|| {
            Error::InvalidArgument(format!("no archimedean root with index {root_index}"))
        })?;
        let b = rational_to_f64(&self.b)?;
        let z = Complex64::new(a + b * root.re, b * root.im);
        let err = b.abs() * root.radius + (a.abs() + b.abs() * (root.re.abs() + root.im.abs())) * 4e-15 + 1e-300;
        Ok((z, err))
    }

    fn merged_field(
        x: &Option<Arc<FieldSpec>>,
        y: &Option<Arc<FieldSpec>>,
    ) -> Option<Arc<FieldSpec>> {
        match (x, y) {
            (None, None) => None,
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (Some(f), Some(g)) => {
                assert!(f == g, "mixed number fields in arithmetic");
                Some(f.clone())
            }
        }
    }

    fn canonical(a: Rational, b: Rational, field: Option<Arc<FieldSpec>>) -> Self {
        if b.is_zero() {
            NumberFieldElement { a, b, field: None }
        } else {
            debug_assert!(field.is_some());
            NumberFieldElement { a, b, field }
        }
    }

    pub fn inv(&self) -> Self {
        match &self.field {
            None => {
                assert!(!self.a.is_zero(), "division by zero");
                NumberFieldElement::rational(self.a.recip())
            }
            Some(f) => {
                // 1/x = conj(x) / N(x); the norm is a nonzero rational because
                // the minimal polynomial is irreducible.
                let n = self.norm_in(f);
                assert!(!n.is_zero(), "division by zero");
                let c = self.conj();
                let ninv = n.recip();
                NumberFieldElement::canonical(&c.a * &ninv, &c.b * &ninv, c.field)
            }
        }
    }
}

impl PartialEq for NumberFieldElement {
    fn eq(&self, other: &Self) -> bool {
        // b = 0 elements are canonically untagged, so coordinate equality
        // plus field-tag equality is structural equality.
        self.a == other.a && self.b == other.b && self.field == other.field
    }
}

impl Zero for NumberFieldElement {
    fn zero() -> Self {
        NumberFieldElement::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for NumberFieldElement {
    fn one() -> Self {
        NumberFieldElement::rational(Rational::one())
    }
}

impl std::ops::Add for NumberFieldElement {
    type Output = NumberFieldElement;
    fn add(self, rhs: Self) -> Self {
        let field = NumberFieldElement::merged_field(&self.field, &rhs.field);
        NumberFieldElement::canonical(self.a + rhs.a, self.b + rhs.b, field)
    }
}

impl std::ops::Sub for NumberFieldElement {
    type Output = NumberFieldElement;
    fn sub(self, rhs: Self) -> Self {
        let field = NumberFieldElement::merged_field(&self.field, &rhs.field);
        NumberFieldElement::canonical(self.a - rhs.a, self.b - rhs.b, field)
    }
}

impl std::ops::Neg for NumberFieldElement {
    type Output = NumberFieldElement;
    fn neg(self) -> Self {
        NumberFieldElement::canonical(-self.a, -self.b, self.field)
    }
}

impl std::ops::Mul for NumberFieldElement {
    type Output = NumberFieldElement;
    fn mul(self, rhs: Self) -> Self {
        let field = NumberFieldElement::merged_field(&self.field, &rhs.field);
        let cross = &self.a * &rhs.b + &self.b * &rhs.a;
        let bb = &self.b * &rhs.b;
        if bb.is_zero() {
            return NumberFieldElement::canonical(&self.a * &rhs.a, cross, field);
        }
        let (s, t) = field
            .as_ref()
            .expect("quadratic product without field")
            .theta_squared();
        NumberFieldElement::canonical(&self.a * &rhs.a + &bb * &s, cross + &bb * &t, field)
    }
}

impl std::ops::Div for NumberFieldElement {
    type Output = NumberFieldElement;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv()
    }
}

impl fmt::Display for NumberFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let bmag = self.b.abs();
        let bterm = if bmag.is_one() {
            "theta".to_string()
        } else {
            format!("{bmag}*theta")
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                return write!(f, "-{bterm}");
            }
            return write!(f, "{bterm}");
        }
        let sign = if self.b.is_negative() { "-" } else { "+" };
        write!(f, "{} {} {}", self.a, sign, bterm)
    }
}

/// Valuation of a nonzero element at a finite place of the field, normalized
/// so `v(p) = 1` (values are integers except at ramified places, where they
/// land in half-integers).
///
/// Split places evaluate `a + b*root` through the Hensel-lifted root modulo
/// `p^precision` and error out with `PrecisionInsufficient` when that image
/// vanishes to the full working precision; inert and ramified places divide
/// the exact norm valuation by two.
pub fn nf_valuation(
    x: &NumberFieldElement,
    field: &Arc<FieldSpec>,
    place: &Place,
    precision: u32,
) -> Result<Rational> {
    if !is_prime(place.p) {
        return Err(Error::InvalidArgument(format!("{} is not prime", place.p)));
    }
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    if x.is_zero() {
        return Err(Error::InvalidArgument(
            "valuation of zero is undefined".into(),
        ));
    }
    if let Some(f) = x.field() {
        if f != field {
            return Err(Error::InvalidArgument(
                "element does not live in the given field".into(),
            ));
        }
    }
    let places = field.places_above(place.p)?;
    if place.factor_index >= places {
        return Err(Error::InvalidArgument(format!(
            "factor index {} out of range: {} place(s) above {}",
            place.factor_index, places, place.p
        )));
    }
    // Rational elements see only the residue characteristic.
    if let Some(a) = x.as_rational() {
        return Ok(Rational::from(BigInt::from(valuation(a, place.p)?)));
    }
    match field.splitting(place.p)? {
        Splitting::Split => {
            let root = field.split_root(place.p, place.factor_index, precision)?;
            // Scale out any p in the denominators of a, b so both reduce
            // modulo p^precision.
            let va = valuation(x.a(), place.p).unwrap_or(0);
            let vb = valuation(x.b(), place.p).unwrap_or(0);
            let shift = 0.min(va).min(vb);
            let scale = Rational::from(BigInt::from(place.p)).pow(-shift as i32);
            let a = x.a() * &scale;
            let b = x.b() * &scale;
            let modulus = BigInt::from(place.p).pow(precision);
            let z = (rational_mod(&a, &modulus)? + rational_mod(&b, &modulus)? * root)
                .mod_floor(&modulus);
            if z.is_zero() {
                return Err(Error::PrecisionInsufficient(format!(
                    "image at split place {} vanishes modulo {}^{}; raise the precision",
                    place, place.p, precision
                )));
            }
            let v = int_valuation(&z, place.p) as i64 + shift;
            Ok(Rational::from(BigInt::from(v)))
        }
        Splitting::Inert | Splitting::Ramified => {
            // v(x) = v_p(N(x)) / 2 exactly: the place is Galois-stable, so x
            // and its conjugate have equal valuation.
            let n = x.norm_in(field);
            Ok(Rational::new(BigInt::from(valuation(&n, place.p)?), BigInt::from(2)))
        }
    }
}

/// Reduces a p-integral rational modulo `modulus = p^N`.
fn rational_mod(r: &Rational, modulus: &BigInt) -> Result<BigInt> {
    let den = r.denom().mod_floor(modulus);
    let inv = mod_inverse(&den, modulus).ok_or_else(|| {
        Error::InvalidArgument("denominator not invertible at this place".into())
    })?;
    Ok((r.numer().mod_floor(modulus) * inv).mod_floor(modulus))
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(modulus);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(modulus))
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Canonical square root of `m` modulo `p^prec` for `m` a unit square in the
/// p-adics: digit-by-digit Hensel lift of the distinguished mod-p root (the
/// smaller lift; for p = 2 the root congruent to 1 mod 4).
fn sqrt_lift(m: &BigInt, p: u64, prec: u32) -> Result<BigInt> {
    let pb = BigInt::from(p);
    if p == 2 {
        // m = 1 mod 8 here; lift bit by bit starting from x = 1 (mod 4).
        let mut x = BigInt::one();
        let mut j = 3u32; // x^2 = m mod 2^3 already
        while j < prec {
            let modulus = &pb.pow(j + 1);
            let r = (&x * &x - m).mod_floor(modulus);
            if !r.is_zero() {
                // flip the bit at position j
                x += pb.pow(j - 1);
            }
            j += 1;
        }
        return Ok(x.mod_floor(&pb.pow(prec)));
    }
    let mp = m.mod_floor(&pb).to_u64().unwrap();
    let w0 = tonelli_shanks(mp, p).ok_or_else(|| {
        Error::InvalidArgument("square root requested of a non-residue".into())
    })?;
    let w0 = w0.min(p - w0); // canonical residue
    let mut x = BigInt::from(w0);
    for j in 1..prec {
        let modulus = pb.pow(j + 1);
        let pj = pb.pow(j);
        let r = (&x * &x - m).mod_floor(&modulus);
        if r.is_zero() {
            continue;
        }
        // Solve 2 x t = -(x^2 - m)/p^j mod p for the next digit t.
        let rhs = (-(r / &pj)).mod_floor(&pb);
        let inv = mod_inverse(&((BigInt::from(2) * &x).mod_floor(&pb)), &pb).expect("2x a unit");
        let t = (rhs * inv).mod_floor(&pb);
        x += t * pj;
    }
    Ok(x.mod_floor(&pb.pow(prec)))
}

/// Square root modulo an odd prime, if one exists.
fn tonelli_shanks(n: u64, p: u64) -> Option<u64> {
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    let nb = BigInt::from(n);
    let pb = BigInt::from(p);
    let legendre = nb.modpow(&BigInt::from((p - 1) / 2), &pb);
    if !legendre.is_one() {
        return None;
    }
    if p % 4 == 3 {
        return nb.modpow(&BigInt::from((p + 1) / 4), &pb).to_u64();
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    // Find a quadratic non-residue z.
    let mut z = 2u64;
    loop {
        let l = BigInt::from(z).modpow(&BigInt::from((p - 1) / 2), &pb);
        if !l.is_one() {
            break;
        }
        z += 1;
    }
    let mut m = s;
    let mut c = BigInt::from(z).modpow(&BigInt::from(q), &pb);
    let mut t = nb.modpow(&BigInt::from(q), &pb);
    let mut r = nb.modpow(&BigInt::from((q + 1) / 2), &pb);
    while !t.is_one() {
        // Least i with t^(2^i) = 1.
        let mut i = 0u32;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2).mod_floor(&pb);
            i += 1;
        }
        let b = c.modpow(&BigInt::from(2u64).pow(m - i - 1), &pb);
        m = i;
        c = (&b * &b).mod_floor(&pb);
        t = (&t * &c).mod_floor(&pb);
        r = (&r * &b).mod_floor(&pb);
    }
    r.to_u64()
}

fn rational_to_f64(r: &Rational) -> Result<f64> {
    r.to_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::NumericFailure(format!("rational {r} overflows f64")))
}

/// Certified enclosures of the roots of `T^2 + c1 T + c0` with discriminant
/// `disc != 0` and not a perfect square.
fn quadratic_roots(_c0: &BigInt, c1: &BigInt, disc: &BigInt) -> Vec<Enclosure> {
    // Rational enclosure of sqrt(|disc|) by Newton from the integer square
    // root: upper bound b, lower bound |disc|/b.
    let d = disc.abs();
    let mut upper = Rational::from(d.sqrt() + 1);
    let dq = Rational::from(d.clone());
    for _ in 0..8 {
        upper = (&upper + &dq / &upper) / Rational::from(BigInt::from(2));
    }
    let lower = &dq / &upper;
    let center = (&lower + &upper) / Rational::from(BigInt::from(2));
    let halfwidth = (&upper - &lower) / Rational::from(BigInt::from(2));
    let c = center.to_f64().unwrap();
    let h = halfwidth.to_f64().unwrap_or(0.0).abs() + c.abs() * 4e-15 + 1e-300;
    let half_c1 = Rational::new(-c1.clone(), BigInt::from(2)).to_f64().unwrap();
    let slop = half_c1.abs() * 4e-15;
    if disc.is_negative() {
        // Conjugate pair -c1/2 +- i sqrt(|disc|)/2, imaginary part ascending.
        let im = c / 2.0;
        let radius = h / 2.0 + slop + 1e-300;
        vec![
            Enclosure { re: half_c1, im: -im, radius },
            Enclosure { re: half_c1, im, radius },
        ]
    } else {
        let r = c / 2.0;
        let radius = h / 2.0 + slop + 1e-300;
        vec![
            Enclosure { re: half_c1 - r, im: 0.0, radius },
            Enclosure { re: half_c1 + r, im: 0.0, radius },
        ]
    }
}
