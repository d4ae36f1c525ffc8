//! Dense univariate polynomials over a generic coefficient ring.
//!
//! Coefficients are stored in ascending degree order, so `coeffs[i]` is the
//! coefficient of `T^i`.  The representation is canonical: the vector carries
//! no trailing zeros, and the zero polynomial is the empty vector.  All
//! constructors normalize, so two polynomials are equal as values exactly when
//! their coefficient vectors are equal.
//!
//! The coefficient ring is anything satisfying [`Coeff`] (clonable exact or
//! floating scalars with ring operations by value); algorithms that need
//! division — Euclidean division, gcds, squarefree decomposition — require
//! [`FieldCoeff`].  Sizes in this crate are small (degree at most a few dozen),
//! so the arithmetic is the schoolbook one and clones are not a concern.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// Ring scalar usable as a polynomial or power-series coefficient.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Neg<Output = Self>
        + Add<Output = Self>
        + Sub<Output = Self>
        + Mul<Output = Self>
{
}

/// Field scalar: a [`Coeff`] with exact (or floating) division.
pub trait FieldCoeff: Coeff + Div<Output = Self> {}

impl<T> FieldCoeff for T where T: Coeff + Div<Output = Self> {}

/// Builds the scalar `n` as `1 + 1 + ...` by double-and-add; used where an
/// algorithm needs a small integer inside an arbitrary coefficient ring.
pub fn coeff_from_u64<T: Coeff>(n: u64) -> T {
    let mut acc = T::zero();
    let mut base = T::one();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc + base.clone();
        }
        n >>= 1;
        if n > 0 {
            base = base.clone() + base;
        }
    }
    acc
}

#[derive(Clone, PartialEq)]
pub struct Poly<T: Coeff> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Poly<T> {
    /// Builds a polynomial from ascending-degree coefficients, stripping
    /// trailing zeros.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `c * T^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn x() -> Self {
        Poly::monomial(T::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficients in ascending degree order (no trailing zeros).
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// The coefficient of `T^i`, cloning, with zero beyond the degree.
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Horner evaluation at `t`.
    pub fn eval(&self, t: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| coeff_from_u64::<T>(i as u64) * c.clone())
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// The reverse polynomial `T^d * P(1/T)` (coefficients reversed); for a
    /// reverse characteristic polynomial this swaps "coefficient of det" and
    /// constant term, turning reciprocal roots into roots.
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly::from_coeffs(coeffs)
    }

    /// Substitutes `T^k` for `T`.
    pub fn inflate(&self, k: usize) -> Self {
        assert!(k >= 1, "inflation exponent must be positive");
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Poly { coeffs }
    }

    pub fn scalar_mul(&self, c: &T) -> Self {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Applies `f` to every stored coefficient.  `f` must send zero to zero if
    /// the result is to stay canonical; the output is re-normalized anyway.
    pub fn map<U: Coeff>(&self, mut f: impl FnMut(&T) -> U) -> Poly<U> {
        Poly::from_coeffs(self.coeffs.iter().map(|c| f(c)).collect())
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut acc = Poly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl<T: FieldCoeff> Poly<T> {
    /// Euclidean division: returns `(q, r)` with `self = q * div + r` and
    /// `deg r < deg div`.  Panics if `div` is zero.
    pub fn divrem(&self, div: &Self) -> (Self, Self) {
        let d = div.degree().expect("division by the zero polynomial");
        let lead = div.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = rem[i].clone() / lead.clone();
            rem[i] = T::zero();
            for j in 0..d {
                rem[i - d + j] = rem[i - d + j].clone() - q.clone() * div.coeffs[j].clone();
            }
            quot[i - d] = q;
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Exact quotient, or `None` when `div` does not divide `self`.
    pub fn divide_exact(&self, div: &Self) -> Option<Self> {
        let (q, r) = self.divrem(div);
        r.is_zero().then_some(q)
    }

    /// Divides by the leading coefficient; the zero polynomial is returned
    /// unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scalar_mul(&inv)
            }
        }
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's squarefree decomposition over a field of characteristic zero:
    /// returns pairs `(g_i, i)` with `self = lead * prod g_i^i`, each `g_i`
    /// monic, squarefree and pairwise coprime (factors with `g_i = 1` are
    /// omitted).  Panics on the zero polynomial.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        assert!(!self.is_zero(), "squarefree decomposition of zero");
        let f = self.monic();
        if f.degree() == Some(0) {
            return Vec::new();
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.divide_exact(&a0).expect("gcd divides");
        let mut c = fp.divide_exact(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree() != Some(0) {
            let g = b.gcd(&d);
            if g.degree() != Some(0) {
                out.push((g.clone(), i));
            }
            b = b.divide_exact(&g).expect("gcd divides");
            c = d.divide_exact(&g).expect("gcd divides");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }
}

impl<T: Coeff> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // Fold a leading minus sign of the coefficient into the joining
            // operator so `1 + -4*T` prints as `1 - 4*T`.
            let s = c.to_string();
            let (sign, mag) = match s.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", s),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let needs_coeff = mag != "1" || i == 0;
            if needs_coeff {
                write!(f, "{}", mag)?;
            }
            if i >= 1 {
                if needs_coeff {
                    write!(f, "*")?;
                }
                write!(f, "T")?;
                if i > 1 {
                    write!(f, "^{}", i)?;
                }
            }
        }
        Ok(())
    }
}

impl<T: Coeff> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Poly::from_coeffs(coeffs)
    }
}

impl<T: Coeff> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Poly::from_coeffs(coeffs)
    }
}

impl<T: Coeff> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::from_coeffs(coeffs)
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_value_binop {
    ($trait:ident, $method:ident) => {
        impl<T: Coeff> $trait for Poly<T> {
            type Output = Poly<T>;
            fn $method(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_value_binop!(Add, add);
forward_value_binop!(Sub, sub);
forward_value_binop!(Mul, mul);

impl<T: Coeff> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        -&self
    }
}
