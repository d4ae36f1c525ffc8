//! L-functions as truncated Euler products, rational reconstruction with
//! re-expansion certificates, Euler characteristics, pole orders, a
//! counting-formula consistency check, and slope-factor L-functions over the
//! p-adics.
//!
//! The truncation contract is strict: an Euler product is exact through
//! order `T` only when every closed point of degree at most `T` is present,
//! so [`euler_product`] refuses datasets whose completeness claim falls
//! short rather than silently biasing coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::fmt;

use crate::error::Error;
use crate::exactnum::{prime_power_decompose, Rational};
use crate::frobdata::{dual_dataset, FrobeniusDataset};
use crate::nf::NumberFieldElement;
use crate::padic::{lift, slope_factorization, PadicPoly, PadicSeries};
use crate::poly::{FieldCoeff, Poly};
use crate::series::TruncatedPowerSeries;
use crate::{RatPoly, RatSeries, Result};

/// A ratio of polynomials with both constant terms one, reduced to lowest
/// terms on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: RatPoly,
    den: RatPoly,
    coprime: bool,
}

impl RationalFunction {
    /// Validates, reduces by the gcd, and renormalizes both constant terms
    /// to one.
    pub fn new(num: RatPoly, den: RatPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if !num.coeff(0).is_one() || !den.coeff(0).is_one() {
            return Err(Error::InvalidArgument(
                "rational functions here carry constant term 1 in both parts".into(),
            ));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            let n = num.divide_exact(&g).expect("gcd divides");
            let d = den.divide_exact(&g).expect("gcd divides");
            let scale = d.coeff(0).inv();
            (n.scalar_mul(&scale), d.scalar_mul(&scale))
        };
        Ok(RationalFunction {
            num,
            den,
            coprime: true,
        })
    }

    pub fn numerator(&self) -> &RatPoly {
        &self.num
    }

    pub fn denominator(&self) -> &RatPoly {
        &self.den
    }

    pub fn is_coprime(&self) -> bool {
        self.coprime
    }

    /// Series expansion to the given order.
    pub fn expand(&self, order: usize) -> RatSeries {
        let den_series = TruncatedPowerSeries::from_poly(&self.den, order);
        let den_inv = den_series.inverse().expect("constant term one");
        TruncatedPowerSeries::from_poly(&self.num, order).mul(&den_inv)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// The L-function of a dataset as an exact truncated series:
/// `prod_x P(E_x, T^deg(x))^-1` through order `trunc`.  The dataset must
/// claim completeness through `trunc`.
pub fn euler_product(d: &FrobeniusDataset, trunc: usize) -> Result<RatSeries> {
    d.require_complete_through(trunc as u32)?;
    let relevant: Vec<_> = d
        .points()
        .iter()
        .filter(|pt| (pt.degree() as usize) <= trunc)
        .collect();
    // Exact arithmetic makes any grouping of the product identical; chunking
    // just spreads the work.
    let partials: Vec<RatSeries> = relevant
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = TruncatedPowerSeries::one(trunc);
            for pt in chunk {
                acc = acc.mul_euler_factor(pt.poly(), pt.degree() as usize)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut acc = TruncatedPowerSeries::one(trunc);
    for part in partials {
        acc = acc.mul(&part);
    }
    Ok(acc)
}

/// Gaussian elimination over an exact field: solves `A x = b` (rows may be
/// redundant), with free variables pinned to zero; `None` when inconsistent.
fn solve_linear<T: FieldCoeff>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pr);
        b.swap(rank, pr);
        let inv_piv = T::one() / a[rank][col].clone();
        for c in col..cols {
            a[rank][c] = a[rank][c].clone() * inv_piv.clone();
        }
        b[rank] = b[rank].clone() * inv_piv;
        for r in 0..rows {
            if r != rank && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    a[r][c] = a[r][c].clone() - f.clone() * a[rank][c].clone();
                }
                b[r] = b[r].clone() - f * b[rank].clone();
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    // Rows past the rank must have vanished.
    for r in rank..rows {
        if !b[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![T::zero(); cols];
    for (col, pr) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pr {
            x[col] = b[*r].clone();
        }
    }
    Some(x)
}

/// Padé-style reconstruction: finds `num/den`, degrees at most `max_deg`,
/// matching the series through its full truncation order, certified by
/// re-expanding the candidate.  `Ok(None)` means no such rational function
/// exists.  Needs `2*max_deg + 1` coefficients to pin the linear system
/// down.
pub fn rational_reconstruct(
    s: &RatSeries,
    max_deg: usize,
) -> Result<Option<RationalFunction>> {
    if 2 * max_deg > s.order() {
        return Err(Error::InvalidArgument(format!(
            "degree {max_deg} needs series order at least {}, have {}",
            2 * max_deg,
            s.order()
        )));
    }
    if !s.coeff(0).is_one() {
        return Err(Error::InvalidArgument(
            "reconstruction expects constant term 1".into(),
        ));
    }
    let c = |i: usize| s.coeff(i);
    // Unknowns b_1..b_m with den = 1 + sum b_j T^j; the high-order
    // coefficients of S*den must vanish.
    let m = max_deg;
    let mut a = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for k in (max_deg + 1)..=(max_deg + m) {
        let row: Vec<NumberFieldElement> = (1..=m)
            .map(|j| if j <= k { c(k - j) } else { NumberFieldElement::zero() })
            .collect();
        a.push(row);
        rhs.push(-c(k));
    }
    let Some(bs) = solve_linear(a, rhs) else {
        return Ok(None);
    };
    let mut den_coeffs = vec![NumberFieldElement::one()];
    den_coeffs.extend(bs);
    let den = Poly::from_coeffs(den_coeffs);
    // num = (S * den) truncated past degree max_deg.
    let num_coeffs: Vec<NumberFieldElement> = (0..=max_deg)
        .map(|k| {
            let mut acc = NumberFieldElement::zero();
            for j in 0..=k.min(den.degree().unwrap_or(0)) {
                acc = acc + den.coeff(j) * c(k - j);
            }
            acc
        })
        .collect();
    let num = Poly::from_coeffs(num_coeffs);
    if num.is_zero() {
        return Ok(None);
    }
    let candidate = RationalFunction::new(num, den)?;
    // Certificate: the reduced candidate reproduces every known coefficient.
    if candidate.expand(s.order()) != *s {
        return Ok(None);
    }
    Ok(Some(candidate))
}

/// Euler characteristic read off the dual L-function: `chi = deg den - deg
/// num` of the reconstructed `L(E^dual, T)`.  The truncation must leave room
/// for reconstruction at degree `(trunc - 1) / 2`.
pub fn euler_characteristic(d: &FrobeniusDataset, trunc: usize) -> Result<i64> {
    let dual = dual_dataset(d)?;
    let series = euler_product(&dual, trunc)?;
    let max_deg = trunc / 2;
    let rf = rational_reconstruct(&series, max_deg)?.ok_or_else(|| {
        Error::CannotDetermine(format!(
            "dual L-function is not rational of degree <= {max_deg} at truncation {trunc}"
        ))
    })?;
    let dn = rf.den.degree().unwrap_or(0) as i64;
    let nm = rf.num.degree().unwrap_or(0) as i64;
    Ok(dn - nm)
}

/// Multiplicity of `(1 - q^d T)` in the denominator of a reduced rational
/// function.
pub fn pole_order_at_qd(l: &RationalFunction, q: u64, d: u32) -> Result<u64> {
    if !l.coprime {
        return Err(Error::InvalidArgument(
            "pole order needs a reduced rational function".into(),
        ));
    }
    let qd = num_traits::pow(Rational::from(BigInt::from(q)), d as usize);
    let factor = Poly::from_coeffs(vec![
        NumberFieldElement::one(),
        -NumberFieldElement::rational(qd),
    ]);
    let mut den = l.den.clone();
    let mut order = 0;
    while let Some(next) = den.divide_exact(&factor) {
        order += 1;
        den = next;
    }
    Ok(order)
}

/// Both sides of the counting formula for the Euler characteristic: the
/// L-function side via [`euler_characteristic`], and the geometric side
/// `(2 - 2g - m) * rank - sum deg(x) * swan_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct GosReport {
    pub chi_l_function: i64,
    pub chi_formula: i64,
    pub swan_term: i64,
    pub pass: bool,
}

/// Degree of a boundary point inferred from its id: ids written as
/// comma-separated minimal-polynomial coefficients have degree
/// `(#coefficients - 1)`; anything else counts as degree one.
pub fn boundary_degree_of_id(id: &str) -> u32 {
    let parts: Vec<&str> = id.split(',').collect();
    if parts.len() >= 2 && parts.iter().all(|p| p.parse::<i64>().is_ok()) {
        (parts.len() - 1) as u32
    } else {
        1
    }
}

pub fn gos_check(d: &FrobeniusDataset, trunc: usize) -> Result<GosReport> {
    let meta = d.meta();
    if meta.dim != 1 {
        return Err(Error::InvalidArgument(
            "the counting formula here applies to curves only".into(),
        ));
    }
    let chi_l = euler_characteristic(d, trunc)?;
    let swan_term: i64 = meta
        .swan
        .iter()
        .map(|(id, sw)| boundary_degree_of_id(id) as i64 * *sw as i64)
        .sum();
    let chi_formula =
        (2 - 2 * meta.genus as i64 - meta.boundary_degree as i64) * meta.rank as i64 - swan_term;
    Ok(GosReport {
        chi_l_function: chi_l,
        chi_formula,
        swan_term,
        pass: chi_l == chi_formula,
    })
}

/// Per-point slope data: the lifted polynomial and its certified slope
/// factors, with slopes normalized per point (raw p-adic slope divided by
/// `a * deg(x)` where `q = p^a`), so every point speaks the same slope
/// language as the dataset's polygons.
struct PointFactors {
    id: String,
    degree: usize,
    lifted: PadicPoly,
    factors: Vec<(Rational, PadicPoly)>,
}

fn factor_points(
    d: &FrobeniusDataset,
    trunc: usize,
    prec: u32,
) -> Result<(u64, u32, Vec<PointFactors>)> {
    let (p, a) = prime_power_decompose(d.meta().q)?;
    let mut out = Vec::new();
    for pt in d.points() {
        if pt.degree() as usize > trunc {
            continue;
        }
        let rational: QPolyResult = pt
            .poly()
            .coeffs()
            .iter()
            .map(|c| {
                c.as_rational().cloned().ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "point {}: slope analysis needs rational coefficients",
                        pt.id()
                    ))
                })
            })
            .collect();
        let lifted = lift(&Poly::from_coeffs(rational?), p, prec)
            .map_err(|e| Error::PrecisionInsufficient(format!("point {}: {e}", pt.id())))?;
        let scale = Rational::from(BigInt::from(a as i64 * pt.degree() as i64));
        let factors = slope_factorization(&lifted)
            .map_err(|e| Error::PrecisionInsufficient(format!("point {}: {e}", pt.id())))?
            .into_iter()
            .map(|(s, f)| (s / &scale, f))
            .collect();
        out.push(PointFactors {
            id: pt.id().to_string(),
            degree: pt.degree() as usize,
            lifted,
            factors,
        });
    }
    Ok((p, a, out))
}

type QPolyResult = Result<Vec<Rational>>;

/// The slope-`s` L-function: the Euler product over only the slope-`s`
/// factors of each point's lifted polynomial, with coefficients carried
/// modulo powers of `p`.  Points with no slope-`s` segment contribute the
/// trivial factor.
pub fn slope_l_function(
    d: &FrobeniusDataset,
    s: &Rational,
    trunc: usize,
    prec: u32,
) -> Result<PadicSeries> {
    d.require_complete_through(trunc as u32)?;
    let (p, _, pts) = factor_points(d, trunc, prec)?;
    let mut acc = PadicSeries::one(p, trunc, prec);
    for pf in &pts {
        for (slope, factor) in &pf.factors {
            if slope == s {
                acc = acc.mul_euler_factor(factor, pf.degree)?;
            }
        }
    }
    Ok(acc)
}

/// All distinct normalized slopes appearing in a dataset's factorizations.
pub fn slope_support(d: &FrobeniusDataset, trunc: usize, prec: u32) -> Result<Vec<Rational>> {
    let (_, _, pts) = factor_points(d, trunc, prec)?;
    let mut slopes: Vec<Rational> = pts
        .iter()
        .flat_map(|pf| pf.factors.iter().map(|(s, _)| s.clone()))
        .collect();
    slopes.sort();
    slopes.dedup();
    Ok(slopes)
}

#[derive(Clone, Debug)]
pub struct SlopeConsistencyReport {
    /// Ids of points whose slope factors fail to multiply back to the
    /// polynomial.
    pub point_failures: Vec<String>,
    /// Distinct normalized slopes across the dataset.
    pub slopes: Vec<Rational>,
    /// The individual slope L-functions, in slope order — the exact series
    /// whose product was compared against `L`, kept so a caller can read
    /// off a single stratum without redoing the factorization walk.
    pub slope_l_functions: Vec<(Rational, PadicSeries)>,
    /// Whether `prod_s L_s` matches `L` through the truncation.
    pub l_product_consistent: bool,
    /// The modulus exponent actually used for the comparisons.
    pub precision_used: u32,
    pub pass: bool,
}

/// Re-verifies, without trusting upstream certification, that slope factors
/// multiply back to each point's polynomial, and that the slope L-functions
/// multiply to the full L-function modulo `(p^prec, T^(trunc+1))`.
pub fn slope_product_consistency(
    d: &FrobeniusDataset,
    trunc: usize,
    prec: u32,
) -> Result<SlopeConsistencyReport> {
    d.require_complete_through(trunc as u32)?;
    let (p, _, pts) = factor_points(d, trunc, prec)?;
    let point_data: Vec<(String, PadicPoly, Vec<(Rational, PadicPoly)>)> = pts
        .iter()
        .map(|pf| (pf.id.clone(), pf.lifted.clone(), pf.factors.clone()))
        .collect();
    // Factor products can only be checked to the precision the factors
    // carry.
    let factor_prec = point_data
        .iter()
        .flat_map(|(_, _, fs)| fs.iter().map(|(_, f)| f.min_abs_precision()))
        .min()
        .unwrap_or(prec as i64)
        .min(prec as i64)
        .max(1) as u32;
    let point_failures = check_products(&point_data, factor_prec);

    let mut slopes: Vec<Rational> = pts
        .iter()
        .flat_map(|pf| pf.factors.iter().map(|(s, _)| s.clone()))
        .collect();
    slopes.sort();
    slopes.dedup();

    let mut slope_l_functions: Vec<(Rational, PadicSeries)> = Vec::new();
    for s in &slopes {
        let mut ls = PadicSeries::one(p, trunc, prec);
        for pf in &pts {
            for (slope, factor) in &pf.factors {
                if slope == s {
                    ls = ls.mul_euler_factor(factor, pf.degree)?;
                }
            }
        }
        slope_l_functions.push((s.clone(), ls));
    }
    let mut product_of_slope_ls = PadicSeries::one(p, trunc, prec);
    for (_, ls) in &slope_l_functions {
        product_of_slope_ls = product_of_slope_ls.mul(ls);
    }
    let mut full_l = PadicSeries::one(p, trunc, prec);
    for pf in &pts {
        full_l = full_l.mul_euler_factor(&pf.lifted, pf.degree)?;
    }
    let series_prec = product_of_slope_ls
        .coeffs()
        .iter()
        .chain(full_l.coeffs())
        .map(|c| c.abs_prec())
        .min()
        .unwrap_or(prec as i64)
        .min(prec as i64)
        .max(1) as u32;
    let l_product_consistent = product_of_slope_ls.congruent_mod(&full_l, series_prec)?;
    let pass = point_failures.is_empty() && l_product_consistent;
    Ok(SlopeConsistencyReport {
        point_failures,
        slopes,
        slope_l_functions,
        l_product_consistent,
        precision_used: series_prec,
        pass,
    })
}

/// Ids whose factor lists do not multiply back to the stated polynomial
/// modulo `p^prec` (after normalizing its constant term to one).
fn check_products(
    points: &[(String, PadicPoly, Vec<(Rational, PadicPoly)>)],
    prec: u32,
) -> Vec<String> {
    let mut failures = Vec::new();
    for (id, poly, factors) in points {
        let ok = (|| -> Result<bool> {
            let c0 = poly.coeff(0);
            let c0_inv = c0.inv()?;
            let normalized = PadicPoly::from_coeffs(
                poly.p(),
                poly.coeffs().iter().map(|c| c.clone() * c0_inv.clone()).collect(),
            );
            let mut prod = match factors.first() {
                None => return Ok(false),
                Some((_, f)) => f.clone(),
            };
            for (_, f) in &factors[1..] {
                prod = prod.mul(f);
            }
            prod.congruent_mod(&normalized, prec)
        })()
        .unwrap_or(false);
        if !ok {
            failures.push(id.clone());
        }
    }
    failures
}

/// Diagnostic only: p-adic valuations of leading-principal Hankel
/// determinants `det(c_(i+j+1))`, whose growth pattern is the classical
/// meromorphy probe.  `None` marks a determinant indistinguishable from
/// zero at the series' precision.  Never a verdict — finite truncation
/// cannot decide meromorphy.
pub fn hankel_valuation_probe(s: &PadicSeries, max_m: usize) -> Vec<(usize, Option<i64>)> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        if 2 * m > s.order() + 1 {
            break;
        }
        // Exact determinant of the m-by-m matrix of canonical
        // representatives, then its valuation; entries are only known to
        // their precision, so treat a huge valuation as "zero at precision".
        let mut mat: Vec<Vec<Rational>> = (0..m)
            .map(|i| (0..m).map(|j| s.coeff(i + j + 1).to_rational()).collect())
            .collect();
        let mut det = Rational::one();
        let mut sign = false;
        let mut singular = false;
        for col in 0..m {
            let Some(pr) = (col..m).find(|&r| !mat[r][col].is_zero()) else {
                singular = true;
                break;
            };
            if pr != col {
                mat.swap(pr, col);
                sign = !sign;
            }
            det *= mat[col][col].clone();
            let inv = mat[col][col].recip();
            for r in col + 1..m {
                let f = &mat[r][col] * &inv;
                for c in col..m {
                    let sub = &f * &mat[col][c];
                    mat[r][c] -= sub;
                }
            }
        }
        if singular || det.is_zero() {
            out.push((m, None));
            continue;
        }
        if sign {
            det = -det;
        }
        let p = s.coeff(0).p();
        let v = crate::exactnum::valuation(&det, p).expect("nonzero");
        let claimable = s.coeffs().iter().map(|c| c.abs_prec()).min().unwrap_or(0);
        out.push((m, (v < claimable * m as i64).then_some(v)));
    }
    out
}
