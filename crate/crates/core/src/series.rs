//! Truncated power series over a generic coefficient ring.
//!
//! A series of order `T` stores the coefficients of `1, T, ..., T^order` —
//! nothing beyond the truncation exists, and binary operations truncate to the
//! smaller order of their operands.  Unlike [`crate::poly::Poly`], trailing
//! zeros are meaningful here (they assert that a coefficient is known to be
//! zero), so the coefficient vector always has length `order + 1`.


use crate::error::Error;
use crate::poly::{Coeff, Poly};
use crate::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedPowerSeries<T: Coeff> {
    coeffs: Vec<T>,
}

impl<T: Coeff> TruncatedPowerSeries<T> {
    /// Builds a series from ascending coefficients; the truncation order is
    /// `coeffs.len() - 1`.  Panics on an empty vector.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        TruncatedPowerSeries { coeffs }
    }

    /// The series `1 + 0 T + ... + 0 T^order`.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = T::one();
        TruncatedPowerSeries { coeffs }
    }

    /// A polynomial viewed as a series truncated at `order` (coefficients
    /// beyond the degree are zero; beyond the order, dropped).
    pub fn from_poly(p: &Poly<T>, order: usize) -> Self {
        let coeffs = (0..=order).map(|i| p.coeff(i)).collect();
        TruncatedPowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// Truncates to a smaller (or equal) order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        TruncatedPowerSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// The polynomial with the same coefficients (trailing zeros stripped).
    pub fn to_poly(&self) -> Poly<T> {
        Poly::from_coeffs(self.coeffs.clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![T::zero(); order + 1];
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                coeffs[i + j] =
                    coeffs[i + j].clone() + self.coeffs[i].clone() * rhs.coeffs[j].clone();
            }
        }
        TruncatedPowerSeries { coeffs }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone())
            .collect();
        TruncatedPowerSeries { coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone())
            .collect();
        TruncatedPowerSeries { coeffs }
    }

    /// Multiplicative inverse; requires constant term one (all the series this
    /// crate inverts are normalized Euler factors, and unit constant terms in
    /// a general ring would need division).
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0] != T::one() {
            return Err(Error::InvalidArgument(
                "series inverse needs constant term one".into(),
            ));
        }
        let order = self.order();
        let mut inv = vec![T::zero(); order + 1];
        inv[0] = T::one();
        for k in 1..=order {
            // b_k = -(a_1 b_{k-1} + ... + a_k b_0)
            let mut acc = T::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc + self.coeffs[j].clone() * inv[k - j].clone();
            }
            inv[k] = -acc;
        }
        Ok(TruncatedPowerSeries { coeffs: inv })
    }

    /// Multiplies by the inverse of the polynomial `p(T^k)`, i.e. folds one
    /// Euler factor of a point of degree `k` into the product.  Requires
    /// constant term one on `p`.
    pub fn mul_euler_factor(&self, p: &Poly<T>, k: usize) -> Result<Self> {
        let inflated = TruncatedPowerSeries::from_poly(&p.inflate(k), self.order());
        Ok(self.mul(&inflated.inverse()?))
    }

    /// Formal derivative, one order shorter (the derivative's top coefficient
    /// would need an unknown one).
    pub fn derivative(&self) -> Self {
        assert!(self.order() >= 1, "derivative needs order at least one");
        let coeffs = (1..=self.order())
            .map(|i| crate::poly::coeff_from_u64::<T>(i as u64) * self.coeffs[i].clone())
            .collect();
        TruncatedPowerSeries { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_bigint::BigInt;

    type QSeries = TruncatedPowerSeries<Rational>;

    fn qs(coeffs: &[i64]) -> QSeries {
        QSeries::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from(BigInt::from(c)))
                .collect(),
        )
    }

    fn qp(coeffs: &[i64]) -> Poly<Rational> {
        Poly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| Rational::from(BigInt::from(c)))
                .collect(),
        )
    }

    #[test]
    fn inverse_of_geometric_series() {
        // 1/(1 - T) = 1 + T + T^2 + ...
        let inv = qs(&[1, -1, 0, 0, 0]).inverse().unwrap();
        assert_eq!(inv, qs(&[1, 1, 1, 1, 1]));
        assert_eq!(inv.mul(&qs(&[1, -1, 0, 0, 0])), qs(&[1, 0, 0, 0, 0]));
        assert!(qs(&[2, 1]).inverse().is_err());
    }

    #[test]
    fn euler_factor_at_higher_degree() {
        // Folding in 1 - T at a degree-2 point divides by 1 - T^2.
        let s = QSeries::one(6).mul_euler_factor(&qp(&[1, -1]), 2).unwrap();
        assert_eq!(s, qs(&[1, 0, 1, 0, 1, 0, 1]));
    }

    #[test]
    fn truncation_rules() {
        let a = qs(&[1, 2, 3, 4]);
        let b = qs(&[1, 1]);
        // Binary ops truncate to the shorter operand.
        assert_eq!(a.mul(&b).order(), 1);
        assert_eq!(a.add(&b), qs(&[2, 3]));
        assert_eq!(a.truncated(2), qs(&[1, 2, 3]));
        assert_eq!(a.to_poly(), qp(&[1, 2, 3, 4]));
    }

    #[test]
    fn derivative_drops_one_order() {
        let s = qs(&[5, 1, 3, 7]);
        assert_eq!(s.derivative(), qs(&[1, 6, 21]));
    }
}
