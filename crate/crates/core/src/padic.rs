//! Capped-precision p-adic numbers, polynomial lifts, and slope factorization.
//!
//! A [`PadicNumber`] represents `unit * p^val + O(p^(val+prec))`: the unit is
//! the canonical representative in `[1, p^prec)` coprime to `p`, `val` is the
//! exact valuation, and `prec` is the *relative* precision.  A value that is
//! indistinguishable from zero is stored with `unit = 0`, `prec = 0`, and
//! `val` equal to its absolute precision (it means `O(p^val)` — "zero to this
//! many digits", not "exactly zero").  Arithmetic tracks precision
//! pessimistically: results are truncated to the worst operand's absolute
//! precision, so cancellation in sums visibly shrinks the stated relative
//! precision.
//!
//! [`PadicPoly`] is a dense polynomial over these scalars with one shared
//! prime.  [`slope_factorization`] splits a polynomial with unit constant
//! term into factors, one per distinct slope of its p-adic Newton polygon,
//! each with constant term one; the factor for a slope of horizontal length
//! `m` has degree `m`, and the slope's denominator need not be one — a
//! fractional-slope segment stays whole as a single factor.  The splitting
//! iterates `F <- F + (P rem F)` from the hull truncation, in exact rational
//! arithmetic reduced modulo a generous power of `p`; the returned precision
//! is certified afterwards by multiplying the factors back together.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::Error;
use crate::exactnum::{int_valuation, is_prime, valuation, Rational};
use crate::newton::lower_hull;
use crate::poly::Poly;
use crate::{QPoly, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    val: i64,
    unit: BigUint,
    prec: u32,
}

impl PadicNumber {
    /// `O(p^abs_prec)`: zero to `abs_prec` digits.
    pub fn zero_at(p: u64, abs_prec: i64) -> Self {
        PadicNumber {
            p,
            val: abs_prec,
            unit: BigUint::zero(),
            prec: 0,
        }
    }

    /// Builds `unit * p^val + O(p^(val+prec))`, reducing `unit` modulo
    /// `p^prec` and re-normalizing if `p` still divides it.
    pub fn new(p: u64, val: i64, unit: BigUint, prec: u32) -> Self {
        let modulus = BigUint::from(p).pow(prec);
        let unit = if prec == 0 { BigUint::zero() } else { unit % &modulus };
        if unit.is_zero() {
            return PadicNumber::zero_at(p, val + prec as i64);
        }
        let shift = int_valuation(&BigInt::from(unit.clone()), p) as u32;
        if shift == 0 {
            return PadicNumber { p, val, unit, prec };
        }
        // The representative was divisible by p: shift it into the valuation
        // and lose that much relative precision.
        let unit = unit / BigUint::from(p).pow(shift);
        PadicNumber {
            p,
            val: val + shift as i64,
            unit,
            prec: prec - shift,
        }
    }

    /// Exact rational input with the given relative precision.
    pub fn from_rational(r: &Rational, p: u64, prec: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        if r.is_zero() {
            return Ok(PadicNumber::zero_at(p, prec as i64));
        }
        let v = valuation(r, p).expect("nonzero");
        let unit_rat = r / Rational::from(BigInt::from(p)).pow(v as i32);
        let modulus = BigInt::from(p).pow(prec);
        let den_inv = BigInt::extended_gcd(&unit_rat.denom().mod_floor(&modulus), &modulus);
        debug_assert!(den_inv.gcd.is_one());
        let unit = (unit_rat.numer().mod_floor(&modulus) * den_inv.x.mod_floor(&modulus))
            .mod_floor(&modulus)
            .to_biguint()
            .unwrap();
        Ok(PadicNumber::new(p, v, unit, prec))
    }

    pub fn from_integer(n: i64, p: u64, prec: u32) -> Result<Self> {
        PadicNumber::from_rational(&Rational::from(BigInt::from(n)), p, prec)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Exact valuation, or `None` when the value is zero to its precision.
    pub fn val(&self) -> Option<i64> {
        (!self.unit.is_zero()).then_some(self.val)
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    /// Relative precision (zero for a zero-at-precision value).
    pub fn rel_prec(&self) -> u32 {
        self.prec
    }

    /// Absolute precision: the value is known modulo `p` to this power.
    pub fn abs_prec(&self) -> i64 {
        self.val + self.prec as i64
    }

    /// The canonical exact representative `unit * p^val` (zero for a
    /// zero-at-precision value).
    pub fn to_rational(&self) -> Rational {
        if self.unit.is_zero() {
            return Rational::zero();
        }
        Rational::from(BigInt::from(self.unit.clone()))
            * Rational::from(BigInt::from(self.p)).pow(self.val as i32)
    }

    /// Canonical residue in `[0, p^k)`; requires a value that is a p-adic
    /// integer to that precision.
    pub fn residue(&self, k: u32) -> Result<BigUint> {
        if self.abs_prec() < k as i64 {
            return Err(Error::PrecisionInsufficient(format!(
                "residue modulo {}^{k} requested of a value known only modulo {}^{}",
                self.p, self.p, self.abs_prec()
            )));
        }
        if self.unit.is_zero() || self.val >= k as i64 {
            return Ok(BigUint::zero());
        }
        if self.val < 0 {
            return Err(Error::InvalidArgument(
                "residue of a value with negative valuation".into(),
            ));
        }
        let modulus = BigUint::from(self.p).pow(k);
        Ok((&self.unit * BigUint::from(self.p).pow(self.val as u32)) % modulus)
    }

    /// Whether two values agree modulo `p^k`; errors if either is not known
    /// to that precision.
    pub fn congruent_mod(&self, other: &PadicNumber, k: u32) -> Result<bool> {
        assert_eq!(self.p, other.p, "mixed primes");
        let d = other.clone() - self.clone();
        if d.is_zero_at_precision() {
            if d.abs_prec() < k as i64 {
                return Err(Error::PrecisionInsufficient(format!(
                    "difference only known to O({}^{})",
                    self.p,
                    d.abs_prec()
                )));
            }
            return Ok(true);
        }
        Ok(d.val >= k as i64)
    }

    /// Truncates to absolute precision `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if self.unit.is_zero() {
            return PadicNumber::zero_at(self.p, self.val.min(abs));
        }
        if self.val >= abs {
            return PadicNumber::zero_at(self.p, abs);
        }
        let prec = ((abs - self.val) as u32).min(self.prec);
        PadicNumber::new(self.p, self.val, self.unit.clone(), prec)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.unit.is_zero() {
            return Err(Error::PrecisionInsufficient(
                "inverting a value that is zero to its precision".into(),
            ));
        }
        let modulus = BigInt::from(self.p).pow(self.prec);
        let e = BigInt::from(self.unit.clone()).extended_gcd(&modulus);
        let unit = e.x.mod_floor(&modulus).to_biguint().unwrap();
        Ok(PadicNumber::new(self.p, -self.val, unit, self.prec))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = PadicNumber::new(self.p, 0, BigUint::one(), self.prec.max(1));
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        write!(
            f,
            "{} * {}^{} + O({}^{})",
            self.unit,
            self.p,
            self.val,
            self.p,
            self.abs_prec()
        )
    }
}

impl std::ops::Add for PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: PadicNumber) -> PadicNumber {
        assert_eq!(self.p, rhs.p, "mixed primes");
        let abs = self.abs_prec().min(rhs.abs_prec());
        if self.unit.is_zero() {
            return rhs.truncate_abs(abs);
        }
        if rhs.unit.is_zero() {
            return self.truncate_abs(abs);
        }
        let v0 = self.val.min(rhs.val);
        if abs <= v0 {
            return PadicNumber::zero_at(self.p, abs);
        }
        let width = (abs - v0) as u32;
        let modulus = BigUint::from(self.p).pow(width);
        let lift = |x: &PadicNumber| -> BigUint {
            (&x.unit * BigUint::from(x.p).pow((x.val - v0) as u32)) % &modulus
        };
        let sum = (lift(&self) + lift(&rhs)) % &modulus;
        PadicNumber::new(self.p, v0, sum, width)
    }
}

impl std::ops::Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        if self.unit.is_zero() {
            return self;
        }
        let modulus = BigUint::from(self.p).pow(self.prec);
        let unit = &modulus - &self.unit;
        PadicNumber::new(self.p, self.val, unit, self.prec)
    }
}

impl std::ops::Sub for PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: PadicNumber) -> PadicNumber {
        self + (-rhs)
    }
}

impl std::ops::Mul for PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: PadicNumber) -> PadicNumber {
        assert_eq!(self.p, rhs.p, "mixed primes");
        if self.unit.is_zero() || rhs.unit.is_zero() {
            // Valuations add in every case: O(p^a) * (u p^v + ...) is
            // O(p^(a+v)), and O(p^a) * O(p^b) is O(p^(a+b)).
            return PadicNumber::zero_at(self.p, self.val + rhs.val);
        }
        let prec = self.prec.min(rhs.prec);
        let modulus = BigUint::from(self.p).pow(prec);
        let unit = (&self.unit * &rhs.unit) % modulus;
        PadicNumber::new(self.p, self.val + rhs.val, unit, prec)
    }
}

impl std::ops::Div for PadicNumber {
    type Output = PadicNumber;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: PadicNumber) -> PadicNumber {
        self * rhs.inv().expect("division by a p-adic zero")
    }
}

/// Dense polynomial over [`PadicNumber`] with one shared prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicPoly {
    p: u64,
    coeffs: Vec<PadicNumber>,
}

impl PadicPoly {
    pub fn from_coeffs(p: u64, coeffs: Vec<PadicNumber>) -> Self {
        assert!(!coeffs.is_empty(), "a p-adic polynomial needs coefficients");
        assert!(coeffs.iter().all(|c| c.p == p), "mixed primes");
        PadicPoly { p, coeffs }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> PadicNumber {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| PadicNumber::zero_at(self.p, i64::MAX / 2))
    }

    /// Minimum relative precision over coefficients that are not zero to
    /// their precision.
    pub fn stated_precision(&self) -> u32 {
        self.coeffs
            .iter()
            .filter(|c| !c.is_zero_at_precision())
            .map(|c| c.prec)
            .min()
            .unwrap_or(0)
    }

    /// Minimum absolute precision over all coefficients.
    pub fn min_abs_precision(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs_prec()).min().unwrap()
    }

    pub fn mul(&self, rhs: &PadicPoly) -> PadicPoly {
        assert_eq!(self.p, rhs.p, "mixed primes");
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        // Seed accumulators with effectively-exact zeros; sums then inherit
        // the operands' precision.
        let mut coeffs = vec![PadicNumber::zero_at(self.p, i64::MAX / 2); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        PadicPoly::from_coeffs(self.p, coeffs)
    }

    /// Coefficientwise congruence modulo `p^k` (degrees may differ if the
    /// extra coefficients are congruent to zero).
    pub fn congruent_mod(&self, rhs: &PadicPoly, k: u32) -> Result<bool> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        for i in 0..n {
            if !self.coeff(i).congruent_mod(&rhs.coeff(i), k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact canonical representatives of the coefficients.
    fn to_exact(&self) -> QPoly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| c.to_rational()).collect())
    }
}

impl fmt::Display for PadicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*T"),
                _ => format!("({c})*T^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Coefficientwise p-adic lift of a rational polynomial at relative precision
/// `prec`.  Every coefficient keeps its exact valuation; a denominator
/// divisible by `p` is an error.
pub fn lift(p_poly: &QPoly, p: u64, prec: u32) -> Result<PadicPoly> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if prec == 0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    if p_poly.is_zero() {
        return Err(Error::InvalidArgument("cannot lift the zero polynomial".into()));
    }
    let d = p_poly.degree().unwrap();
    let mut coeffs = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let c = p_poly.coeff(i);
        if !c.is_zero() && int_valuation(c.denom(), p) > 0 {
            return Err(Error::InvalidArgument(format!(
                "coefficient {c} of T^{i} has a denominator divisible by {p}"
            )));
        }
        coeffs.push(PadicNumber::from_rational(&c, p, prec)?);
    }
    Ok(PadicPoly::from_coeffs(p, coeffs))
}

/// The p-adic Newton polygon data of `P`: distinct slopes ascending with
/// their horizontal lengths.  Unlike the normalized polygons in
/// [`crate::newton`], no division by a point degree happens here — vertices
/// have integer heights.  Zero-at-precision coefficients contribute no point
/// and must have enough absolute precision to provably lie on or above the
/// hull, else the polygon itself is uncertain.
fn padic_slope_blocks(p_poly: &PadicPoly) -> Result<Vec<(Rational, usize)>> {
    let d = p_poly.degree();
    if p_poly.coeffs[d].is_zero_at_precision() {
        return Err(Error::PrecisionInsufficient(
            "leading coefficient is zero to its precision; the degree is not determined".into(),
        ));
    }
    let mut points = Vec::with_capacity(d + 1);
    for (i, c) in p_poly.coeffs.iter().enumerate() {
        if let Some(v) = c.val() {
            points.push((i, Rational::from(BigInt::from(v))));
        }
    }
    let hull = lower_hull(&points);
    let height_at = |x: usize| -> Rational {
        for w in hull.windows(2) {
            if x >= w[0].0 && x <= w[1].0 {
                let t = Rational::new(
                    BigInt::from((x - w[0].0) as u64),
                    BigInt::from((w[1].0 - w[0].0) as u64),
                );
                return &w[0].1 + (&w[1].1 - &w[0].1) * t;
            }
        }
        hull[0].1.clone()
    };
    for (i, c) in p_poly.coeffs.iter().enumerate() {
        if c.is_zero_at_precision() && i < d {
            let needed = height_at(i);
            if Rational::from(BigInt::from(c.abs_prec())) <= needed {
                return Err(Error::PrecisionInsufficient(format!(
                    "coefficient of T^{i} is zero modulo {}^{} but the polygon needs its valuation above {}",
                    p_poly.p,
                    c.abs_prec(),
                    needed
                )));
            }
        }
    }
    let mut blocks = Vec::new();
    for w in hull.windows(2) {
        let run = w[1].0 - w[0].0;
        let slope = (&w[1].1 - &w[0].1) / Rational::from(BigInt::from(run as u64));
        blocks.push((slope, run));
    }
    Ok(blocks)
}

fn exact_val(c: &Rational, p: u64) -> Option<i64> {
    (!c.is_zero()).then(|| valuation(c, p).unwrap())
}

/// Reduces each coefficient modulo `p^m` (canonical representative of its
/// unit part, preserving the exact valuation).
fn reduce_mod(p_poly: &QPoly, p: u64, m: i64) -> QPoly {
    p_poly.map(|c| {
        match exact_val(c, p) {
            None => Rational::zero(),
            Some(v) if v >= m => Rational::zero(),
            Some(v) => {
                let width = (m - v) as u32;
                let modulus = BigInt::from(p).pow(width);
                let unit = c / Rational::from(BigInt::from(p)).pow(v as i32);
                let e = unit.denom().mod_floor(&modulus).extended_gcd(&modulus);
                let u = (unit.numer().mod_floor(&modulus) * e.x.mod_floor(&modulus))
                    .mod_floor(&modulus);
                Rational::from(u) * Rational::from(BigInt::from(p)).pow(v as i32)
            }
        }
    })
}

fn min_val(p_poly: &QPoly, p: u64) -> Option<i64> {
    p_poly
        .coeffs()
        .iter()
        .filter_map(|c| exact_val(c, p))
        .min()
}

/// Splits off the factor carrying the lowest slope block of length `m`,
/// returning `(factor, cofactor)` with both constant terms one.  `target` is
/// the absolute precision the split must reach.  Exact arithmetic, reduced
/// modulo `p^work` to keep representatives small.
fn split_bottom_block(
    p_exact: &QPoly,
    p: u64,
    m: usize,
    target: i64,
    work: i64,
) -> Result<(QPoly, QPoly)> {
    let mut f = Poly::from_coeffs(p_exact.coeffs()[..=m].to_vec());
    let max_iter = 16 * (target.max(4) as usize) + 64;
    let mut converged = false;
    for _ in 0..max_iter {
        let (_, r) = p_exact.divrem(&f);
        let f_next = reduce_mod(&(&f + &r), p, work);
        let diff = &f_next - &f;
        f = f_next;
        if min_val(&diff, p).map_or(true, |v| v >= target + 2) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::PrecisionInsufficient(
            "slope separation did not converge at the working precision".into(),
        ));
    }
    let (g, _) = p_exact.divrem(&f);
    let g = reduce_mod(&g, p, work);
    // Normalize both constant terms to one.
    let f0 = f.coeff(0);
    let g0 = g.coeff(0);
    if exact_val(&f0, p) != Some(0) || exact_val(&g0, p) != Some(0) {
        return Err(Error::PrecisionInsufficient(
            "slope separation lost the unit constant term".into(),
        ));
    }
    let f = reduce_mod(&f.scalar_mul(&f0.recip()), p, work);
    let g = reduce_mod(&g.scalar_mul(&g0.recip()), p, work);
    Ok((f, g))
}

/// Factors `P` (unit constant term, stated precision at least 2) into one
/// factor per distinct slope of its p-adic Newton polygon, ascending, each
/// with constant term one.  The product of the factors is congruent to the
/// constant-normalized `P` modulo `p` to the returned precision, which is
/// certified by re-multiplication; factors are returned at that absolute
/// precision.
pub fn slope_factorization(p_poly: &PadicPoly) -> Result<Vec<(Rational, PadicPoly)>> {
    let p = p_poly.p;
    let c0 = &p_poly.coeffs[0];
    if c0.is_zero_at_precision() || c0.val != 0 {
        return Err(Error::InvalidArgument(
            "slope factorization needs a unit constant term".into(),
        ));
    }
    if p_poly.stated_precision() < 2 {
        return Err(Error::PrecisionInsufficient(
            "slope factorization needs relative precision at least 2".into(),
        ));
    }
    // Normalize the constant term to one.
    let c0_inv = c0.inv()?;
    let normalized = PadicPoly::from_coeffs(
        p,
        p_poly
            .coeffs
            .iter()
            .map(|c| c.clone() * c0_inv.clone())
            .collect(),
    );
    let blocks = padic_slope_blocks(&normalized)?;
    let d = normalized.degree();
    let abs = normalized.min_abs_precision();
    // Largest vertex height magnitude along the hull (slopes may be negative
    // for duals, so track the running height rather than the final one).
    let mut running = Rational::zero();
    let mut h_max: i64 = 0;
    for (s, len) in &blocks {
        running += s.clone() * Rational::from(BigInt::from(*len as u64));
        let mag = running.abs().ceil().to_integer().to_i64().unwrap_or(0);
        h_max = h_max.max(mag);
    }
    // Division by non-unit leading coefficients can transiently dip
    // valuations; the working modulus leaves room for every step.
    let work = abs + (d as i64 + 1) * h_max + 8;

    let mut factors_exact: Vec<(Rational, QPoly)> = Vec::with_capacity(blocks.len());
    let mut rest = reduce_mod(&normalized.to_exact(), p, work);
    for (i, (slope, len)) in blocks.iter().enumerate() {
        if i + 1 == blocks.len() {
            factors_exact.push((slope.clone(), rest.clone()));
        } else {
            let (f, g) = split_bottom_block(&rest, p, *len, abs, work)?;
            factors_exact.push((slope.clone(), f));
            rest = g;
        }
    }

    // Certify: truncate to a candidate absolute precision and check the
    // product; drop the claim until it verifies.
    let mut claim = abs;
    while claim >= 2 {
        let factors: Vec<(Rational, PadicPoly)> = factors_exact
            .iter()
            .map(|(s, f)| {
                let coeffs = f
                    .coeffs()
                    .iter()
                    .map(|c| {
                        PadicNumber::from_rational(c, p, (claim.max(1)) as u32)
                            .expect("valid prime and precision")
                            .truncate_abs(claim)
                    })
                    .collect();
                (s.clone(), PadicPoly::from_coeffs(p, coeffs))
            })
            .collect();
        let mut product = factors[0].1.clone();
        for (_, f) in &factors[1..] {
            product = product.mul(f);
        }
        let ok = (0..=d).all(|i| {
            let lhs = product.coeff(i).to_rational();
            let rhs = normalized.coeff(i).to_rational();
            exact_val(&(&lhs - &rhs), p).map_or(true, |v| v >= claim)
        });
        if ok {
            return Ok(factors);
        }
        claim -= 1;
    }
    Err(Error::PrecisionInsufficient(
        "slope factors could not be certified to any usable precision".into(),
    ))
}

/// The unit root of `P`: the reciprocal root of the slope-zero factor, which
/// must have rank one.  Returns `u` with the slope-zero factor congruent to
/// `1 - u T`.
pub fn unit_root(p_poly: &PadicPoly) -> Result<PadicNumber> {
    let factors = slope_factorization(p_poly)?;
    let zero_factor = factors
        .iter()
        .find(|(s, _)| s.is_zero())
        .ok_or_else(|| Error::NotUnitRootRankOne("no slope-zero part".into()))?;
    if zero_factor.1.degree() != 1 {
        return Err(Error::NotUnitRootRankOne(format!(
            "slope-zero part has rank {}",
            zero_factor.1.degree()
        )));
    }
    Ok(-zero_factor.1.coeff(1))
}

/// Truncated power series over [`PadicNumber`] with one shared prime; the
/// p-adic counterpart of [`crate::series::TruncatedPowerSeries`], used for
/// slope L-functions.
#[derive(Clone, Debug)]
pub struct PadicSeries {
    p: u64,
    coeffs: Vec<PadicNumber>,
}

impl PadicSeries {
    /// The series `1 + O(T^(order+1))` with every coefficient carrying
    /// absolute precision `prec`.
    pub fn one(p: u64, order: usize, prec: u32) -> Self {
        let mut coeffs = vec![PadicNumber::zero_at(p, prec as i64); order + 1];
        coeffs[0] = PadicNumber::new(p, 0, BigUint::one(), prec);
        PadicSeries { p, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &PadicNumber {
        &self.coeffs[i]
    }

    pub fn mul(&self, rhs: &PadicSeries) -> PadicSeries {
        assert_eq!(self.p, rhs.p, "mixed primes");
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![PadicNumber::zero_at(self.p, i64::MAX / 2); order + 1];
        for i in 0..=order {
            for j in 0..=order - i {
                coeffs[i + j] = coeffs[i + j].clone() + self.coeffs[i].clone() * rhs.coeffs[j].clone();
            }
        }
        PadicSeries { p: self.p, coeffs }
    }

    /// Multiplies by the inverse of `poly(T^k)` — one Euler factor of a
    /// degree-`k` point.  The polynomial must have a unit constant term.
    pub fn mul_euler_factor(&self, poly: &PadicPoly, k: usize) -> Result<PadicSeries> {
        assert_eq!(self.p, poly.p, "mixed primes");
        let order = self.order();
        // Inverse of the inflated polynomial as a series.
        let c0 = poly.coeff(0);
        if c0.is_zero_at_precision() || c0.val != 0 {
            return Err(Error::InvalidArgument(
                "Euler factor needs a unit constant term".into(),
            ));
        }
        if !c0.congruent_mod(
            &PadicNumber::new(self.p, 0, BigUint::one(), c0.prec),
            c0.prec.min(2),
        )? {
            return Err(Error::InvalidArgument(
                "Euler factor needs constant term one".into(),
            ));
        }
        let c0_inv = c0.inv()?;
        let a = |i: usize| -> Option<PadicNumber> {
            // coefficient of T^i in poly(T^k), normalized to constant term 1
            if i % k != 0 || i / k > poly.degree() {
                return None;
            }
            Some(poly.coeff(i / k) * c0_inv.clone())
        };
        let mut inv = vec![PadicNumber::zero_at(self.p, i64::MAX / 2); order + 1];
        inv[0] = PadicNumber::new(self.p, 0, BigUint::one(), c0.prec);
        for n in 1..=order {
            let mut acc = PadicNumber::zero_at(self.p, i64::MAX / 2);
            for j in 1..=n {
                if let Some(aj) = a(j) {
                    acc = acc + aj * inv[n - j].clone();
                }
            }
            inv[n] = -acc;
        }
        Ok(self.mul(&PadicSeries {
            p: self.p,
            coeffs: inv,
        }))
    }

    /// Coefficientwise congruence modulo `p^k` up to the shorter order.
    pub fn congruent_mod(&self, rhs: &PadicSeries, k: u32) -> Result<bool> {
        let order = self.order().min(rhs.order());
        for i in 0..=order {
            if !self.coeffs[i].congruent_mod(&rhs.coeffs[i], k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qp(coeffs: &[i64]) -> QPoly {
        Poly::from_coeffs(coeffs.iter().map(|&c| q(c, 1)).collect())
    }

    fn pn(n: i64, p: u64, prec: u32) -> PadicNumber {
        PadicNumber::from_integer(n, p, prec).unwrap()
    }

    #[test]
    fn representation_and_display() {
        let x = pn(14, 7, 3);
        assert_eq!(x.val(), Some(1));
        assert_eq!(x.unit(), &BigUint::from(2u32));
        assert_eq!(x.abs_prec(), 4);
        assert_eq!(x.to_string(), "2 * 7^1 + O(7^4)");

        let x = PadicNumber::from_rational(&q(1, 7), 7, 2).unwrap();
        assert_eq!(x.val(), Some(-1));
        assert_eq!(x.to_string(), "1 * 7^-1 + O(7^1)");

        let z = PadicNumber::zero_at(7, 5);
        assert_eq!(z.to_string(), "O(7^5)");
        assert_eq!(z.val(), None);

        // 1/3 = 5 * 49/... : unit is the inverse of 3 mod 49.
        let t = PadicNumber::from_rational(&q(1, 3), 7, 2).unwrap();
        assert_eq!(t.residue(2).unwrap(), BigUint::from(33u32)); // 3 * 33 = 99 = 1 mod 49
    }

    #[test]
    fn addition_tracks_cancellation() {
        // 50 - 1 = 49: two units at relative precision 5 sum to a value of
        // valuation 2, so only three relative digits survive.
        let x = pn(50, 7, 5);
        let y = pn(-1, 7, 5);
        let s = x + y;
        assert_eq!(s.val(), Some(2));
        assert_eq!(s.rel_prec(), 3);
        assert_eq!(s.abs_prec(), 5);
        // Total cancellation leaves a zero at the joint absolute precision.
        let z = pn(3, 7, 4) + pn(-3, 7, 4);
        assert!(z.is_zero_at_precision());
        assert_eq!(z.abs_prec(), 4);
    }

    #[test]
    fn multiplication_and_inverse() {
        let x = pn(14, 7, 4);
        let y = pn(3, 7, 6);
        let prod = x.clone() * y;
        assert_eq!(prod.val(), Some(1));
        assert_eq!(prod.rel_prec(), 4);
        assert_eq!(prod.residue(3).unwrap(), BigUint::from(42u32 % 343));
        let inv = x.inv().unwrap();
        assert_eq!(inv.val(), Some(-1));
        let one = x * inv;
        assert_eq!(one.residue(3).unwrap(), BigUint::one());
    }

    #[test]
    fn lift_keeps_exact_valuations() {
        let lifted = lift(&qp(&[1, -4, 7]), 7, 3).unwrap();
        let vals: Vec<Option<i64>> = lifted.coeffs().iter().map(|c| c.val()).collect();
        assert_eq!(vals, vec![Some(0), Some(0), Some(1)]);
        assert_eq!(lifted.stated_precision(), 3);
        // A denominator divisible by p is rejected.
        let bad = Poly::from_coeffs(vec![q(1, 1), q(1, 7)]);
        assert!(matches!(lift(&bad, 7, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn ordinary_factorization_finds_unit_root() {
        let lifted = lift(&qp(&[1, -4, 7]), 7, 10).unwrap();
        let factors = slope_factorization(&lifted).unwrap();
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].0, q(0, 1));
        assert_eq!(factors[1].0, q(1, 1));
        assert_eq!(factors[0].1.degree(), 1);
        assert_eq!(factors[1].1.degree(), 1);
        // Product reproduces P to the stated precision.
        let prod = factors[0].1.mul(&factors[1].1);
        assert!(prod.congruent_mod(&lifted, 10).unwrap());
        // The unit root is 39 mod 49 (the root of u^2 - 4u + 7 = 0 mod 49
        // congruent to 4 mod 7).
        let u = unit_root(&lifted).unwrap();
        assert_eq!(u.residue(2).unwrap(), BigUint::from(39u32));
        assert_eq!(u.residue(1).unwrap(), BigUint::from(4u32));
        // u satisfies the characteristic equation to working precision:
        // u^2 - 4u + 7 = 0.
        let lhs = u.clone() * u.clone() + pn(-4, 7, 10) * u.clone() + pn(7, 7, 10);
        assert!(lhs
            .congruent_mod(&PadicNumber::zero_at(7, 10), 10)
            .unwrap());
    }

    #[test]
    fn supersingular_polynomial_stays_whole() {
        let lifted = lift(&qp(&[1, 0, 7]), 7, 10).unwrap();
        let factors = slope_factorization(&lifted).unwrap();
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].0, q(1, 2));
        assert_eq!(factors[0].1.degree(), 2);
        // No unit root exists.
        assert!(matches!(
            unit_root(&lifted),
            Err(Error::NotUnitRootRankOne(_))
        ));
    }

    #[test]
    fn multi_block_factorization() {
        // (1 - 3T)(1 - 7T)^2 (1 - 49T): slopes 0, 1, 1, 2.
        let p_exact = &(&qp(&[1, -3]) * &(&qp(&[1, -7]) * &qp(&[1, -7]))) * &qp(&[1, -49]);
        let lifted = lift(&p_exact, 7, 12).unwrap();
        let factors = slope_factorization(&lifted).unwrap();
        let shape: Vec<(Rational, usize)> =
            factors.iter().map(|(s, f)| (s.clone(), f.degree())).collect();
        assert_eq!(shape, vec![(q(0, 1), 1), (q(1, 1), 2), (q(2, 1), 1)]);
        // The slope-1 factor is (1 - 7T)^2 = 1 - 14T + 49T^2.
        let expected = lift(&(&qp(&[1, -7]) * &qp(&[1, -7])), 7, 8).unwrap();
        assert!(factors[1].1.congruent_mod(&expected, 8).unwrap());
        let mut prod = factors[0].1.clone();
        for (_, f) in &factors[1..] {
            prod = prod.mul(f);
        }
        assert!(prod.congruent_mod(&lifted, 10).unwrap());
    }

    #[test]
    fn fractional_blocks_separate() {
        // (1 + 7T^2)(1 + 343T^2): slopes 1/2, 1/2, 3/2, 3/2.
        let p_exact = &qp(&[1, 0, 7]) * &qp(&[1, 0, 343]);
        let lifted = lift(&p_exact, 7, 12).unwrap();
        let factors = slope_factorization(&lifted).unwrap();
        let shape: Vec<(Rational, usize)> =
            factors.iter().map(|(s, f)| (s.clone(), f.degree())).collect();
        assert_eq!(shape, vec![(q(1, 2), 2), (q(3, 2), 2)]);
        let expected = lift(&qp(&[1, 0, 7]), 7, 8).unwrap();
        assert!(factors[0].1.congruent_mod(&expected, 8).unwrap());

        // Mixed integer and fractional: (1 - 3T)(1 + 7T^2).
        let p_exact = &qp(&[1, -3]) * &qp(&[1, 0, 7]);
        let lifted = lift(&p_exact, 7, 10).unwrap();
        let factors = slope_factorization(&lifted).unwrap();
        let shape: Vec<(Rational, usize)> =
            factors.iter().map(|(s, f)| (s.clone(), f.degree())).collect();
        assert_eq!(shape, vec![(q(0, 1), 1), (q(1, 2), 2)]);
        let u = unit_root(&lifted).unwrap();
        assert_eq!(u.residue(1).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn wide_gaps_and_normalization() {
        // Constant term 3 (a unit, not one): factorization normalizes.
        let p_exact = qp(&[3, -3 * 50, 3 * 49]); // 3 (1 - T)(1 - 49T)
        let lifted = lift(&p_exact, 7, 10).unwrap();
        let factors = slope_factorization(&lifted).unwrap();
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].0, q(0, 1));
        assert_eq!(factors[1].0, q(2, 1));
        let u = unit_root(&lifted).unwrap();
        assert_eq!(u.residue(4).unwrap(), BigUint::one());
    }

    #[test]
    fn degenerate_precision_is_refused() {
        let lifted = lift(&qp(&[1, -4, 7]), 7, 1).unwrap();
        assert!(matches!(
            slope_factorization(&lifted),
            Err(Error::PrecisionInsufficient(_))
        ));
        // A middle coefficient with no usable precision leaves the polygon
        // uncertain.
        let p = PadicPoly::from_coeffs(
            7,
            vec![pn(1, 7, 10), PadicNumber::zero_at(7, 0), pn(7, 7, 10)],
        );
        assert!(matches!(
            slope_factorization(&p),
            Err(Error::PrecisionInsufficient(_))
        ));
        // Slope-zero rank two: unit_root refuses.
        let lifted = lift(&qp(&[1, -8, 15]), 7, 10).unwrap(); // (1-3T)(1-5T)
        assert!(matches!(
            unit_root(&lifted),
            Err(Error::NotUnitRootRankOne(_))
        ));
    }

    #[test]
    fn padic_series_euler_factors() {
        // 1/(1 - 3T) at p = 7: coefficients are powers of 3.
        let s = PadicSeries::one(7, 4, 8)
            .mul_euler_factor(&lift(&qp(&[1, -3]), 7, 8).unwrap(), 1)
            .unwrap();
        let r: Vec<u64> = (0..=4)
            .map(|i| s.coeff(i).residue(4).unwrap().to_u64().unwrap())
            .collect();
        assert_eq!(r, vec![1, 3, 9, 27, 81]);
        // Degree-2 point contributes only at even powers.
        let s2 = PadicSeries::one(7, 4, 8)
            .mul_euler_factor(&lift(&qp(&[1, -3]), 7, 8).unwrap(), 2)
            .unwrap();
        let r: Vec<u64> = (0..=4)
            .map(|i| s2.coeff(i).residue(4).unwrap().to_u64().unwrap())
            .collect();
        assert_eq!(r, vec![1, 0, 3, 0, 9]);
        // Products agree with multiplying the series.
        let both = s.mul(&s2);
        assert_eq!(both.coeff(2).residue(4).unwrap(), BigUint::from(9u32 + 3u32));
    }
}
