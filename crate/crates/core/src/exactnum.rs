//! Exact rational scalars and the symmetric-function toolkit.
//!
//! The scalar of record is [`Rational`] (`num_rational::BigRational`): always
//! in lowest terms with positive denominator, so equality is structural and
//! serialization as `"num/den"` round-trips bit-exactly.
//!
//! The polynomial-facing helpers here all follow the reciprocal-root
//! convention: a polynomial `P(T) = 1 + a_1 T + ... + a_d T^d` with constant
//! term one is read as `prod_i (1 - alpha_i T)`, and its power sums are the
//! sums `s_k = sum_i alpha_i^k` of powers of those reciprocal roots.  Newton's
//! identities convert between the coefficients (elementary symmetric functions
//! of the `alpha_i`, up to sign) and the `s_k`, exactly, in either direction.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::poly::{coeff_from_u64, FieldCoeff, Poly};
use crate::Result;

pub type Rational = num_rational::BigRational;

/// Formats a rational as `num/den` (always with the denominator, which is
/// positive in lowest terms).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` (or a bare integer) into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|_| Error::malformed(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|_| Error::malformed(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::malformed(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Multiplies `a * b mod m` without overflow.
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for `u64` (the fixed witness set below is known
/// to be exact for all 64-bit integers).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Writes `q = p^a` with `p` prime, or errors when `q` is not a prime power.
pub fn prime_power_decompose(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
    }
    if is_prime(q) {
        return Ok((q, 1));
    }
    let mut f = 2u64;
    while f * f <= q {
        if q % f == 0 {
            let mut rest = q;
            let mut a = 0u32;
            while rest % f == 0 {
                rest /= f;
                a += 1;
            }
            if rest == 1 {
                return Ok((f, a));
            }
            return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
        }
        f += 1;
    }
    unreachable!("composite with no factor up to its square root")
}

/// Exact multiplicity of the prime `ell` in a nonzero integer.
pub fn int_valuation(n: &BigInt, ell: u64) -> u64 {
    assert!(!n.is_zero(), "valuation of zero integer");
    let ell = BigInt::from(ell);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &ell);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// The `ell`-adic valuation of a nonzero rational, normalized so
/// `valuation(ell) = 1`.
///
/// Errors on zero input and on non-prime `ell`.
pub fn valuation(r: &Rational, ell: u64) -> Result<i64> {
    if !is_prime(ell) {
        return Err(Error::InvalidArgument(format!(
            "valuation modulus {ell} is not prime"
        )));
    }
    if r.is_zero() {
        return Err(Error::InvalidArgument(
            "valuation of zero is undefined".into(),
        ));
    }
    Ok(int_valuation(r.numer(), ell) as i64 - int_valuation(r.denom(), ell) as i64)
}

/// Power sums `s_1, ..., s_k` of the reciprocal roots of `p`, by Newton's
/// identities.  Requires constant term one (the reciprocal-root convention);
/// works over any coefficient field of characteristic zero.
pub fn power_sums<T: FieldCoeff>(p: &Poly<T>, k: usize) -> Result<Vec<T>> {
    if p.coeff(0) != T::one() {
        return Err(Error::InvalidArgument(
            "power sums need constant term one".into(),
        ));
    }
    let d = p.degree().unwrap_or(0);
    // e_i = (-1)^i a_i for i <= d, zero beyond.
    let e = |i: usize| -> T {
        let c = p.coeff(i);
        if i % 2 == 0 {
            c
        } else {
            -c
        }
    };
    let mut sums: Vec<T> = Vec::with_capacity(k);
    for n in 1..=k {
        // s_n = (-1)^{n-1} n e_n + sum_{i=1}^{n-1} (-1)^{i-1} e_i s_{n-i}
        let mut s = T::zero();
        for i in 1..n.min(d + 1) {
            let term = e(i) * sums[n - i - 1].clone();
            s = if i % 2 == 1 { s + term } else { s - term };
        }
        if n <= d {
            let lead = coeff_from_u64::<T>(n as u64) * e(n);
            s = if n % 2 == 1 { s + lead } else { s - lead };
        }
        sums.push(s);
    }
    Ok(sums)
}

/// Inverse of [`power_sums`]: rebuilds the degree-`d` polynomial with constant
/// term one whose reciprocal-root power sums are `sums[0..d]`.
///
/// Returns `1 + a_1 T + ... + a_d T^d` with `a_i = (-1)^i e_i`; needs at least
/// `d` power sums.
pub fn charpoly_from_power_sums<T: FieldCoeff>(sums: &[T], d: usize) -> Result<Poly<T>> {
    if sums.len() < d {
        return Err(Error::InvalidArgument(format!(
            "need {d} power sums, got {}",
            sums.len()
        )));
    }
    // e_0 = 1; k e_k = sum_{i=1}^{k} (-1)^{i-1} s_i e_{k-i}.
    let mut e: Vec<T> = Vec::with_capacity(d + 1);
    e.push(T::one());
    for k in 1..=d {
        let mut acc = T::zero();
        for i in 1..=k {
            let term = sums[i - 1].clone() * e[k - i].clone();
            acc = if i % 2 == 1 { acc + term } else { acc - term };
        }
        e.push(acc / coeff_from_u64::<T>(k as u64));
    }
    let coeffs = e
        .into_iter()
        .enumerate()
        .map(|(i, ei)| if i % 2 == 0 { ei } else { -ei })
        .collect();
    Ok(Poly::from_coeffs(coeffs))
}

/// Largest order a root of unity can have in a degree-`d` rational polynomial,
/// with the fixed working bound 120 for the degrees this crate meets in
/// practice (`d <= 8` forces the order's totient below 9, hence order at most
/// 30; 120 leaves slack).
pub fn default_order_bound(d: usize) -> u32 {
    let mut bound = 120u32;
    if d > 8 {
        // phi(m) >= sqrt(m/2), so orders with phi(m) <= d satisfy m <= 2 d^2.
        let cap = 2 * (d as u32) * (d as u32) + 1;
        for m in 120..=cap {
            if totient(m) as usize <= d {
                bound = bound.max(m);
            }
        }
    }
    bound
}

fn totient(mut m: u32) -> u32 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Tests whether every root of the nonzero rational polynomial `p` is a root
/// of unity of order at most `order_bound`.
///
/// Equivalent to divisibility of `prod_{m <= B} (1 - T^m)^{deg p}` by `p`:
/// the implementation peels cyclotomic content off `p` by repeated gcds with
/// `1 - T^m`, which keeps coefficients small, and succeeds exactly when
/// nothing else is left.  Constant polynomials are vacuously true; a zero
/// root (vanishing constant term) makes the answer false.
pub fn is_roots_of_unity(p: &Poly<Rational>, order_bound: u32) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::InvalidArgument(
            "roots-of-unity test on the zero polynomial".into(),
        ));
    }
    if order_bound == 0 {
        return Err(Error::InvalidArgument("order bound must be positive".into()));
    }
    let mut r = p.monic();
    for m in 1..=order_bound as usize {
        if r.degree() == Some(0) {
            break;
        }
        // 1 - T^m
        let mut cyc = vec![Rational::zero(); m + 1];
        cyc[0] = Rational::one();
        cyc[m] = -Rational::one();
        let cyc = Poly::from_coeffs(cyc);
        // Peel the full multiplicity of every order-dividing-m root.
        loop {
            let g = r.gcd(&cyc);
            if g.degree() == Some(0) {
                break;
            }
            r = r.divide_exact(&g).expect("gcd divides");
        }
    }
    Ok(r.degree() == Some(0))
}
