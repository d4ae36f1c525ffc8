//! Finite fields and brute-force point counting: everything needed to turn a
//! curve family into a `FrobeniusDataset` on disk.
//!
//! Fields `F_{p^n}` are represented as `F_p[t]/(f)` with `f` the first monic
//! irreducible polynomial of degree `n` in a fixed deterministic order (by
//! the integer encoding of its non-leading coefficients, least-significant
//! digit first), so the same field — element indexing included — is rebuilt
//! identically across runs and processes.  Elements are indexed by the base-p
//! integer encoding of their coefficient vectors; base-field elements are
//! exactly the indices below `p`.  There are no cross-field embeddings:
//! counts over an extension are recomputed in that extension, which is both
//! simpler and a stronger consistency check.
//!
//! Fiber counting for the Legendre pencil `y^2 = x(x-1)(x-lambda)` is a
//! direct sum of quadratic characters — the oracle of record.  For fields too
//! large to afford one full pass per fiber, the per-lambda character sums
//! `sum_x chi(x) chi(x-1) chi(x-lambda)` are all computed at once as an
//! additive correlation over `(Z/p)^n` via a radix-p multidimensional
//! Fourier transform; the transform's output is validated by exact rounding
//! margins, by the Hasse bound at every fiber, and by brute-force recounts on
//! a deterministic sample of fibers.  Everything is capped at desk scale,
//! `p^n <= 10^7`.

use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::exactnum::is_prime;
use crate::frobdata::{DataPoint, FrobeniusDataset, GeometryMeta};
use crate::nf::{FieldSpec, NumberFieldElement};
use crate::poly::Poly;
use crate::RatPoly;
use crate::Result;

/// Largest field this module will materialize; counting is a linear scan per
/// fiber (or one transform over the whole field), so this bounds a desk-size
/// computation.
pub const DESK_SCALE: u64 = 10_000_000;

/// Above this field size, fiber counting switches from one brute-force pass
/// per fiber to the all-fibers transform (still cross-checked by sampled
/// brute force).
const TRANSFORM_THRESHOLD: u64 = 30_000;

/// Digit capacity: `2^24 > 10^7`, so no desk-scale field needs more.
const MAX_DIGITS: usize = 24;

type Digits = [u64; MAX_DIGITS];

/// Arithmetic context for `F_{p^n} = F_p[t]/(modulus)`, with elements indexed
/// by `0..p^n` through the base-p encoding of their coefficient vectors.
#[derive(Debug)]
pub struct FqContext {
    p: u64,
    n: u32,
    q: u64,
    /// Monic irreducible modulus, ascending coefficients, length `n + 1`.
    modulus: Vec<u64>,
    /// Quadratic character by element index (+1 square, -1 non-square,
    /// 0 at zero); built on first use, odd `p` only.
    chi: OnceLock<Vec<i8>>,
}

impl FqContext {
    /// Builds the degree-`n` extension of `F_p` with the deterministic
    /// modulus choice described in the module docs.
    pub fn new(p: u64, n: u32) -> Result<FqContext> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument(
                "extension degree must be positive".into(),
            ));
        }
        let q = checked_power(p, n)?;
        let modulus = smallest_irreducible(p, n as usize);
        Ok(FqContext {
            p,
            n,
            q,
            modulus,
            chi: OnceLock::new(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Field cardinality `p^n`.
    pub fn size(&self) -> u64 {
        self.q
    }

    /// The modulus polynomial's coefficients, ascending, length `n + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn to_digits(&self, mut x: u64) -> Digits {
        debug_assert!(x < self.q);
        let mut d = [0u64; MAX_DIGITS];
        for slot in d.iter_mut().take(self.n as usize) {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn from_digits(&self, d: &Digits) -> u64 {
        let mut x = 0u64;
        for i in (0..self.n as usize).rev() {
            x = x * self.p + d[i];
        }
        x
    }

    fn add_digits(&self, a: &Digits, b: &Digits) -> Digits {
        let mut out = [0u64; MAX_DIGITS];
        for i in 0..self.n as usize {
            let s = a[i] + b[i];
            out[i] = if s >= self.p { s - self.p } else { s };
        }
        out
    }

    fn sub_digits(&self, a: &Digits, b: &Digits) -> Digits {
        let mut out = [0u64; MAX_DIGITS];
        for i in 0..self.n as usize {
            out[i] = if a[i] >= b[i] {
                a[i] - b[i]
            } else {
                a[i] + self.p - b[i]
            };
        }
        out
    }

    fn mul_digits(&self, a: &Digits, b: &Digits) -> Digits {
        let n = self.n as usize;
        let mut buf = [0u64; 2 * MAX_DIGITS];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                buf[i + j] += a[i] * b[j];
            }
        }
        // Reduce t^k for k >= n via t^n = -(sum modulus[j] t^j).
        for k in (n..2 * n).rev() {
            let c = buf[k] % self.p;
            if c == 0 {
                continue;
            }
            for j in 0..n {
                buf[k - n + j] += (self.p - self.modulus[j]) * c;
            }
        }
        let mut out = [0u64; MAX_DIGITS];
        for i in 0..n {
            out[i] = buf[i] % self.p;
        }
        out
    }

    /// Sum of the elements with the given indices.
    pub fn add(&self, x: u64, y: u64) -> u64 {
        self.from_digits(&self.add_digits(&self.to_digits(x), &self.to_digits(y)))
    }

    /// Difference of the elements with the given indices.
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.from_digits(&self.sub_digits(&self.to_digits(x), &self.to_digits(y)))
    }

    /// Product of the elements with the given indices.
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        self.from_digits(&self.mul_digits(&self.to_digits(x), &self.to_digits(y)))
    }

    /// `x^e` by square and multiply.
    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let mut base = self.to_digits(x);
        let mut acc = self.to_digits(1 % self.q);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_digits(&acc, &base);
            }
            base = self.mul_digits(&base, &base);
            e >>= 1;
        }
        self.from_digits(&acc)
    }

    /// The Frobenius `x -> x^p`.
    pub fn frobenius(&self, x: u64) -> u64 {
        self.pow(x, self.p)
    }

    /// Evaluates a base-field polynomial (coefficients below `p`, ascending)
    /// at the element with index `x`.
    pub fn eval_fp_poly(&self, coeffs: &[u64], x: u64) -> Result<u64> {
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument(
                "polynomial coefficients must be reduced below p".into(),
            ));
        }
        let xd = self.to_digits(x);
        let mut acc = [0u64; MAX_DIGITS];
        for &c in coeffs.iter().rev() {
            acc = self.mul_digits(&acc, &xd);
            acc[0] = (acc[0] + c) % self.p;
        }
        Ok(self.from_digits(&acc))
    }

    /// Quadratic character table by element index; odd characteristic only.
    fn chi_table(&self) -> &[i8] {
        assert!(self.p != 2, "quadratic character needs odd characteristic");
        self.chi.get_or_init(|| {
            let q = self.q as usize;
            let mut table = vec![-1i8; q];
            // Walk y through the whole field with an in-place base-p counter
            // and mark the squares.
            let mut yd = [0u64; MAX_DIGITS];
            for _ in 0..self.q {
                let sq = self.mul_digits(&yd, &yd);
                table[self.from_digits(&sq) as usize] = 1;
                increment_digits(&mut yd, self.p);
            }
            table[0] = 0;
            debug_assert_eq!(
                table.iter().filter(|&&c| c == 1).count() as u64,
                (self.q - 1) / 2,
                "a field of odd order has (q-1)/2 nonzero squares"
            );
            table
        })
    }

    /// Images of the basis monomials under Frobenius, as digit vectors:
    /// entry `i` holds `t^{i p} mod modulus`.  Frobenius is linear over the
    /// prime field, so these determine it everywhere.
    fn frobenius_basis(&self) -> Vec<Digits> {
        let n = self.n as usize;
        let t = {
            let mut d = [0u64; MAX_DIGITS];
            if n == 1 {
                // t reduces to a base-field element modulo a linear modulus.
                d[0] = (self.p - self.modulus[0]) % self.p;
            } else {
                d[1] = 1;
            }
            d
        };
        let tp = {
            let mut acc = self.to_digits(1 % self.q);
            let mut base = t;
            let mut e = self.p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = self.mul_digits(&acc, &base);
                }
                base = self.mul_digits(&base, &base);
                e >>= 1;
            }
            acc
        };
        let mut imgs = Vec::with_capacity(n);
        let mut cur = self.to_digits(1 % self.q);
        for _ in 0..n {
            imgs.push(cur);
            cur = self.mul_digits(&cur, &tp);
        }
        imgs
    }

    fn frobenius_digits(&self, x: &Digits, imgs: &[Digits]) -> Digits {
        let n = self.n as usize;
        let mut out = [0u64; MAX_DIGITS];
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                out[j] += x[i] * imgs[i][j];
            }
        }
        for slot in out.iter_mut().take(n) {
            *slot %= self.p;
        }
        out
    }
}

fn increment_digits(d: &mut Digits, p: u64) {
    for slot in d.iter_mut() {
        *slot += 1;
        if *slot < p {
            return;
        }
        *slot = 0;
    }
}

fn checked_power(p: u64, n: u32) -> Result<u64> {
    let mut q = 1u64;
    for _ in 0..n {
        q = q.checked_mul(p).unwrap_or(u64::MAX);
        if q > DESK_SCALE {
            return Err(Error::InvalidArgument(format!(
                "field size {p}^{n} exceeds the desk-scale cap of {DESK_SCALE}"
            )));
        }
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Deterministic modulus choice.

/// First monic irreducible polynomial of degree `n` over `F_p`, ordering
/// candidates `t^n + c_{n-1} t^{n-1} + ... + c_0` by the integer
/// `sum c_i p^i`.
fn smallest_irreducible(p: u64, n: usize) -> Vec<u64> {
    let mut count = 1u64;
    for _ in 0..n {
        count = count.saturating_mul(p);
    }
    for enc in 0..count {
        let mut f = Vec::with_capacity(n + 1);
        let mut e = enc;
        for _ in 0..n {
            f.push(e % p);
            e /= p;
        }
        f.push(1);
        if fp_poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Schoolbook product of base-field polynomials, reduced mod p.
fn fp_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim_poly(&mut out);
    out
}

/// Remainder of `a` modulo monic `f`, over `F_p`.
fn fp_poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*f.last().unwrap(), 1);
    let mut r = a.to_vec();
    let d = f.len() - 1;
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        if lead != 0 {
            for j in 0..d {
                let sub = (f[j] * lead) % p;
                r[shift + j] = (r[shift + j] + p - sub) % p;
            }
        }
        r.pop();
        trim_poly(&mut r);
        if r.len() <= d && r.len() + 1 > d + 1 {
            break;
        }
    }
    r
}

fn trim_poly(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `t^{p^k} mod f` by iterating the p-th power map.
fn fp_poly_frobenius_power(f: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut cur = fp_poly_rem(&[0, 1], f, p);
    for _ in 0..k {
        cur = fp_poly_powmod(&cur, p, f, p);
    }
    cur
}

fn fp_poly_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_poly_rem(&fp_poly_mul(&acc, &b, p), f, p);
        }
        b = fp_poly_rem(&fp_poly_mul(&b, &b, p), f, p);
        e >>= 1;
    }
    acc
}

fn fp_poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        // Make y monic so the remainder routine applies.
        let lead = *y.last().unwrap();
        if lead != 1 {
            let inv = mod_pow(lead, p - 2, p);
            for c in y.iter_mut() {
                *c = (*c * inv) % p;
            }
        }
        let r = fp_poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Irreducibility over `F_p`: `t^{p^n} = t mod f`, and `t^{p^{n/l}} - t` is
/// coprime to `f` for every prime `l` dividing `n`.
fn fp_poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    let t = fp_poly_rem(&[0, 1], f, p);
    let full = fp_poly_frobenius_power(f, p, n);
    if full != t {
        return false;
    }
    let mut m = n;
    let mut ell = 2;
    let mut prime_divisors = Vec::new();
    while ell * ell <= m {
        if m % ell == 0 {
            prime_divisors.push(ell);
            while m % ell == 0 {
                m /= ell;
            }
        }
        ell += 1;
    }
    if m > 1 {
        prime_divisors.push(m);
    }
    for ell in prime_divisors {
        let part = fp_poly_frobenius_power(f, p, n / ell);
        // part - t, over F_p.
        let len = part.len().max(t.len());
        let mut diff = vec![0u64; len];
        for (i, slot) in diff.iter_mut().enumerate() {
            let a = part.get(i).copied().unwrap_or(0);
            let b = t.get(i).copied().unwrap_or(0);
            *slot = (a + p - b) % p;
        }
        trim_poly(&mut diff);
        let g = fp_poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Closed points as Frobenius orbits.

/// One closed point of the line: a Frobenius orbit on `F_{p^n}` of size
/// exactly `degree`, named by its minimal polynomial over `F_p` and
/// represented by the orbit element of least index in the degree-`degree`
/// context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPoint {
    pub degree: u32,
    /// Comma-joined ascending coefficients of the monic minimal polynomial,
    /// e.g. `"4,1"` for `t + 4`.
    pub id: String,
    /// Element index of the representative in `FqContext::new(p, degree)`.
    pub rep: u64,
}

/// Enumerates the closed points of the affine line minus the given base-field
/// values, through degree `max_deg`: one `OrbitPoint` per Frobenius orbit of
/// size at most `max_deg`, ordered by (degree, representative index).
/// Excluded values only ever remove degree-one points, since they are
/// base-field rational.
pub fn enumerate_closed_points(p: u64, max_deg: u32, excluded: &[u64]) -> Result<Vec<OrbitPoint>> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if let Some(&bad) = excluded.iter().find(|&&v| v >= p) {
        return Err(Error::InvalidArgument(format!(
            "excluded value {bad} is not a base-field element (p = {p})"
        )));
    }
    if max_deg > 0 {
        checked_power(p, max_deg)?;
    }
    let mut out = Vec::new();
    for n in 1..=max_deg {
        let ctx = FqContext::new(p, n)?;
        out.extend(orbits_of_exact_degree(&ctx, excluded));
    }
    Ok(out)
}

/// All Frobenius orbits of size exactly `ctx.degree()`, ascending by
/// representative index.  The representative is the least element index in
/// the orbit; the minimal polynomial is the product of `T - c` over the
/// orbit, which lands in the base field and names the point.
fn orbits_of_exact_degree(ctx: &FqContext, excluded: &[u64]) -> Vec<OrbitPoint> {
    let n = ctx.n as usize;
    let imgs = ctx.frobenius_basis();
    let mut visited = vec![false; ctx.q as usize];
    let mut out = Vec::new();
    let mut orbit: Vec<Digits> = Vec::with_capacity(n);
    for start in 0..ctx.q {
        if visited[start as usize] {
            continue;
        }
        orbit.clear();
        let mut cur = ctx.to_digits(start);
        loop {
            let idx = ctx.from_digits(&cur);
            if idx == start && !orbit.is_empty() {
                break;
            }
            visited[idx as usize] = true;
            orbit.push(cur);
            cur = ctx.frobenius_digits(&cur, &imgs);
        }
        if orbit.len() != n {
            continue;
        }
        if n == 1 && excluded.contains(&start) {
            continue;
        }
        out.push(OrbitPoint {
            degree: ctx.n,
            id: minimal_polynomial_id(ctx, &orbit),
            rep: start,
        });
    }
    out
}

/// Expands `prod (T - c)` over the orbit and renders the base-field
/// coefficients as the canonical comma-joined id.
fn minimal_polynomial_id(ctx: &FqContext, orbit: &[Digits]) -> String {
    let mut coeffs: Vec<Digits> = vec![ctx.to_digits(1 % ctx.q)];
    for c in orbit {
        let mut next: Vec<Digits> = vec![[0u64; MAX_DIGITS]; coeffs.len() + 1];
        for (k, a) in coeffs.iter().enumerate() {
            next[k + 1] = ctx.add_digits(&next[k + 1], a);
            let shift = ctx.mul_digits(c, a);
            next[k] = ctx.sub_digits(&next[k], &shift);
        }
        coeffs = next;
    }
    let parts: Vec<String> = coeffs
        .iter()
        .map(|d| {
            let idx = ctx.from_digits(d);
            debug_assert!(
                idx < ctx.p,
                "minimal polynomial coefficients lie in the base field"
            );
            idx.to_string()
        })
        .collect();
    parts.join(",")
}

// ---------------------------------------------------------------------------
// Legendre fiber counting.

/// Number of points of `y^2 = x(x-1)(x-lambda)` over the context's field,
/// point at infinity included, by one pass over `x` summing quadratic
/// characters.  This is the oracle of record for all Legendre data.
///
/// `lambda` is an element index; the boundary values `0` and `1` are
/// singular fibers and are refused.
pub fn count_legendre(ctx: &FqContext, lambda: u64) -> Result<u64> {
    if ctx.p == 2 {
        return Err(Error::InvalidArgument(
            "the Legendre pencil needs odd characteristic".into(),
        ));
    }
    if lambda >= ctx.q {
        return Err(Error::InvalidArgument(format!(
            "element index {lambda} out of range for a field of {} elements",
            ctx.q
        )));
    }
    if lambda == 0 || lambda == 1 {
        return Err(Error::SingularFiber(format!(
            "lambda = {lambda} is a boundary value; the fiber is a nodal cubic"
        )));
    }
    let chi = ctx.chi_table();
    let one = ctx.to_digits(1);
    let lam = ctx.to_digits(lambda);
    let mut sum: i64 = 0;
    let mut xd = [0u64; MAX_DIGITS];
    for x in 0..ctx.q {
        let a = chi[x as usize] as i64;
        if a != 0 {
            let b = chi[ctx.from_digits(&ctx.sub_digits(&xd, &one)) as usize] as i64;
            if b != 0 {
                let c = chi[ctx.from_digits(&ctx.sub_digits(&xd, &lam)) as usize] as i64;
                sum += a * b * c;
            }
        }
        increment_digits(&mut xd, ctx.p);
    }
    // #E = q + 1 + sum chi(x(x-1)(x-lambda)); a smooth fiber obeys the Hasse
    // bound, so a violation would mean the arithmetic itself is broken.
    assert!(
        (sum * sum) as u64 <= 4 * ctx.q,
        "character sum violates the Hasse bound"
    );
    Ok((ctx.q as i64 + 1 + sum) as u64)
}

/// Character sums `S(lambda) = sum_x chi(x) chi(x-1) chi(x-lambda)` for all
/// `lambda` at once, indexed by element: `#E_lambda = q + 1 + S(lambda)` away
/// from the boundary.  `S` is the additive correlation of
/// `h(u) = chi(u) chi(u-1)` with `chi`, computed by a radix-p transform over
/// `(Z/p)^n`; rounding margins are asserted tight, so a numerically doubtful
/// transform aborts rather than mis-counts.
pub(crate) fn legendre_char_sums(ctx: &FqContext) -> Result<Vec<i64>> {
    if ctx.p == 2 {
        return Err(Error::InvalidArgument(
            "the Legendre pencil needs odd characteristic".into(),
        ));
    }
    let q = ctx.q as usize;
    let chi = ctx.chi_table();
    let one = ctx.to_digits(1);
    let mut h: Vec<Complex64> = Vec::with_capacity(q);
    let mut ud = [0u64; MAX_DIGITS];
    for u in 0..ctx.q {
        let value = chi[u as usize] as i64
            * chi[ctx.from_digits(&ctx.sub_digits(&ud, &one)) as usize] as i64;
        h.push(Complex64::new(value as f64, 0.0));
        increment_digits(&mut ud, ctx.p);
    }
    let mut c: Vec<Complex64> = chi.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
    dft(&mut h, ctx.p as usize, ctx.n as usize, false);
    dft(&mut c, ctx.p as usize, ctx.n as usize, false);
    let scale = 1.0 / q as f64;
    for (a, b) in h.iter_mut().zip(&c) {
        *a *= b.conj() * scale;
    }
    drop(c);
    dft(&mut h, ctx.p as usize, ctx.n as usize, true);
    let mut out = Vec::with_capacity(q);
    for z in &h {
        let rounded = z.re.round();
        if (z.re - rounded).abs() > 1e-2 || z.im.abs() > 1e-2 {
            return Err(Error::NumericFailure(format!(
                "character-sum transform lost integrality (residual {:.2e})",
                (z.re - rounded).abs().max(z.im.abs())
            )));
        }
        out.push(rounded as i64);
    }
    Ok(out)
}

/// In-place multidimensional discrete Fourier transform on `(Z/p)^n`,
/// applying a naive size-p transform along each axis.  `inverse` conjugates
/// the twiddles; scaling is the caller's business.
fn dft(data: &mut [Complex64], p: usize, n: usize, inverse: bool) {
    let sign = if inverse { -1.0 } else { 1.0 };
    let twiddles: Vec<Complex64> = (0..p)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * m as f64 / p as f64))
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1usize;
    for _ in 0..n {
        let block = stride * p;
        let mut base = 0;
        while base < data.len() {
            for off in 0..stride {
                for (j, slot) in buf.iter_mut().enumerate() {
                    *slot = data[base + off + j * stride];
                }
                for j in 0..p {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, v) in buf.iter().enumerate() {
                        acc += v * twiddles[(j * k) % p];
                    }
                    data[base + off + j * stride] = acc;
                }
            }
            base += block;
        }
        stride = block;
    }
}

// ---------------------------------------------------------------------------
// Dataset builders.

/// Builds the Legendre pencil dataset over `F_p` through closed points of
/// degree `max_deg`: rank two, genus zero, three boundary points, trivial
/// Swan conductors, and at each point `lambda` of degree `n` the polynomial
/// `1 - a T + p^n T^2` with `a = p^n + 1 - #E_lambda(F_{p^n})`.
///
/// Small extensions are counted fiber by fiber; large ones in one transform
/// sweep whose output is cross-checked by brute-force recounts on the first
/// dozen fibers of each degree.  The dataset is flagged irreducible (the
/// family's middle cohomology is), which downstream slope-gap checks read.
pub fn build_legendre_dataset(p: u64, max_deg: u32) -> Result<FrobeniusDataset> {
    if p % 2 == 0 {
        return Err(Error::InvalidArgument(
            "the Legendre pencil needs odd characteristic".into(),
        ));
    }
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if max_deg > 0 {
        checked_power(p, max_deg)?;
    }
    let mut meta = GeometryMeta::new(p, 0, 3, 2);
    meta.complete_through_degree = Some(max_deg);
    meta.irreducible = true;
    let mut points = Vec::new();
    for n in 1..=max_deg {
        let ctx = FqContext::new(p, n)?;
        let orbits = orbits_of_exact_degree(&ctx, &[0, 1]);
        let qn = ctx.q;
        let counts: Vec<u64> = if qn <= TRANSFORM_THRESHOLD {
            orbits
                .par_iter()
                .map(|o| count_legendre(&ctx, o.rep))
                .collect::<Result<Vec<_>>>()?
        } else {
            let sums = legendre_char_sums(&ctx)?;
            for o in orbits.iter().take(12) {
                let brute = count_legendre(&ctx, o.rep)?;
                let fast = (qn as i64 + 1 + sums[o.rep as usize]) as u64;
                if brute != fast {
                    return Err(Error::NumericFailure(format!(
                        "transform count {fast} disagrees with brute force {brute} at point {}",
                        o.id
                    )));
                }
            }
            orbits
                .iter()
                .map(|o| {
                    let s = sums[o.rep as usize];
                    if (s * s) as u64 > 4 * qn {
                        return Err(Error::NumericFailure(format!(
                            "transform count violates the Hasse bound at point {}",
                            o.id
                        )));
                    }
                    Ok((qn as i64 + 1 + s) as u64)
                })
                .collect::<Result<Vec<_>>>()?
        };
        for (o, &count) in orbits.iter().zip(&counts) {
            let a = qn as i64 + 1 - count as i64;
            let poly = Poly::from_coeffs(vec![
                NumberFieldElement::integer(1),
                NumberFieldElement::integer(-a),
                NumberFieldElement::integer(qn as i64),
            ]);
            points.push(DataPoint::new(o.id.clone(), n, poly));
        }
    }
    FrobeniusDataset::new(meta, points)
}

/// Builds the constant rank-one dataset (`P = 1 - T` at every closed point)
/// on the affine line minus `template.boundary_degree - 1` base-field points,
/// the first that many values `0, 1, ...`.  The template fixes the geometry;
/// rank, field, and the completeness claim are overridden to match what is
/// actually built.  Only genus-zero curve templates are in scope.
pub fn build_trivial_dataset(
    p: u64,
    max_deg: u32,
    template: &GeometryMeta,
) -> Result<FrobeniusDataset> {
    if template.dim != 1 || template.genus != 0 {
        return Err(Error::InvalidArgument(
            "only genus-zero curve templates are supported".into(),
        ));
    }
    if template.q != p {
        return Err(Error::InvalidArgument(format!(
            "template base field {} does not match p = {p}",
            template.q
        )));
    }
    if template.boundary_degree == 0 {
        return Err(Error::InvalidArgument(
            "the template needs at least the boundary point at infinity".into(),
        ));
    }
    let n_excluded = (template.boundary_degree - 1) as u64;
    if n_excluded > p {
        return Err(Error::InvalidArgument(format!(
            "cannot exclude {n_excluded} base-field values from a field of {p}"
        )));
    }
    let excluded: Vec<u64> = (0..n_excluded).collect();
    let orbit_points = enumerate_closed_points(p, max_deg, &excluded)?;
    let mut meta = template.clone();
    meta.rank = 1;
    meta.field = FieldSpec::rationals();
    meta.swan.clear();
    meta.complete_through_degree = Some(max_deg);
    let unit: RatPoly = Poly::from_coeffs(vec![
        NumberFieldElement::integer(1),
        NumberFieldElement::integer(-1),
    ]);
    let points = orbit_points
        .into_iter()
        .map(|o| DataPoint::new(o.id, o.degree, unit.clone()))
        .collect();
    FrobeniusDataset::new(meta, points)
}

// ---------------------------------------------------------------------------
// The Hasse polynomial.

/// The degree-`(p-1)/2` polynomial `sum_i C((p-1)/2, i)^2 lambda^i` over
/// `F_p`, whose roots are exactly the supersingular Legendre parameters.
/// Coefficients are returned ascending, reduced into `[0, p)`.
pub fn hasse_polynomial(p: u64) -> Result<Vec<u64>> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!(
            "{p} is not an odd prime"
        )));
    }
    let m = (p - 1) / 2;
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    let mut binom = 1u64; // C(m, i) mod p, updated multiplicatively
    coeffs.push(1);
    for i in 1..=m {
        // C(m, i) = C(m, i-1) (m - i + 1) / i; the division is by an
        // invertible residue since i < p.
        binom = binom * ((m - i + 1) % p) % p;
        binom = binom * mod_pow(i % p, p - 2, p) % p;
        coeffs.push(binom * binom % p);
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunction::euler_product;
    use num_traits::Zero;

    #[test]
    fn deterministic_moduli_are_the_smallest_irreducible() {
        // Degree one: t itself (the zero constant is first and linears are
        // always irreducible).
        assert_eq!(FqContext::new(7, 1).unwrap().modulus(), &[0, 1]);
        // Over F_3, t^2 is reducible and t^2 + 1 has no root.
        assert_eq!(FqContext::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // Over F_2 the first irreducible quadratic is t^2 + t + 1.
        assert_eq!(FqContext::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // x^2 - 2 splits mod 7 (3^2 = 2), x^2 + 1 does not (-1 is not a QR).
        assert_eq!(FqContext::new(7, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn field_arithmetic_in_f9() {
        let ctx = FqContext::new(3, 2).unwrap();
        assert_eq!(ctx.size(), 9);
        // t has index 3; t^2 = -1 = 2.
        assert_eq!(ctx.mul(3, 3), 2);
        // (1 + t) + (2 + t) = 2t.
        assert_eq!(ctx.add(4, 5), 6);
        // Multiplicative order divides 8 for every nonzero element, exactly.
        for x in 1..9 {
            assert_eq!(ctx.pow(x, 8), 1, "x = {x}");
        }
        // Frobenius fixes the base field and moves t to its conjugate -t.
        for x in 0..3 {
            assert_eq!(ctx.frobenius(x), x);
        }
        assert_eq!(ctx.frobenius(3), 6);
        assert_eq!(ctx.frobenius(ctx.frobenius(3)), 3);
    }

    #[test]
    fn closed_point_enumeration_matches_orbit_counts() {
        let pts = enumerate_closed_points(7, 1, &[0, 1]).unwrap();
        assert_eq!(pts.len(), 5);
        let ids: Vec<&str> = pts.iter().map(|p| p.id.as_str()).collect();
        // lambda = c has minimal polynomial t - c, rendered "(p - c),1".
        assert_eq!(ids, vec!["5,1", "4,1", "3,1", "2,1", "1,1"]);

        let pts = enumerate_closed_points(3, 2, &[0, 1]).unwrap();
        let deg1 = pts.iter().filter(|p| p.degree == 1).count();
        let deg2 = pts.iter().filter(|p| p.degree == 2).count();
        assert_eq!(deg1, 1);
        assert_eq!(deg2, 3);

        assert!(enumerate_closed_points(2, 1, &[0, 1]).unwrap().is_empty());

        // Degree-n orbit counts follow the necklace formula; exclusions only
        // touch degree one.
        let pts = enumerate_closed_points(5, 3, &[0, 1]).unwrap();
        let by_degree = |d: u32| pts.iter().filter(|p| p.degree == d).count();
        assert_eq!(by_degree(1), 3);
        assert_eq!(by_degree(2), (25 - 5) / 2);
        assert_eq!(by_degree(3), (125 - 5) / 3);

        assert!(matches!(
            enumerate_closed_points(5, 2, &[7]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn legendre_counts_match_frozen_values() {
        let ctx = FqContext::new(7, 1).unwrap();
        assert_eq!(count_legendre(&ctx, 3).unwrap(), 4);
        assert_eq!(count_legendre(&ctx, 2).unwrap(), 8);
        assert!(matches!(
            count_legendre(&ctx, 0),
            Err(Error::SingularFiber(_))
        ));
        assert!(matches!(
            count_legendre(&ctx, 1),
            Err(Error::SingularFiber(_))
        ));

        // p = 3: the only nonsingular base-field fiber is supersingular.
        let ctx = FqContext::new(3, 1).unwrap();
        assert_eq!(count_legendre(&ctx, 2).unwrap(), 4);
    }

    #[test]
    fn counts_are_consistent_across_extensions() {
        // lambda = 3 over F_7 has 1 - 4T + 7T^2, power sums s_1 = 4,
        // s_2 = 2, s_3 = -20; extension counts follow exactly, computed in
        // independently built fields.
        let c2 = FqContext::new(7, 2).unwrap();
        assert_eq!(count_legendre(&c2, 3).unwrap(), 49 + 1 - 2);
        let c3 = FqContext::new(7, 3).unwrap();
        assert_eq!(count_legendre(&c3, 3).unwrap(), 343 + 1 + 20);

        // The supersingular fiber lambda = 2 (a = 0) has s_2 = -14.
        assert_eq!(count_legendre(&c2, 2).unwrap(), 49 + 1 + 14);
    }

    #[test]
    fn legendre_dataset_carries_the_frozen_polynomials() {
        let d = build_legendre_dataset(7, 2).unwrap();
        assert_eq!(d.meta().rank, 2);
        assert_eq!(d.meta().boundary_degree, 3);
        assert_eq!(d.meta().complete_through_degree, Some(2));
        assert!(d.meta().irreducible);
        // 5 degree-one fibers plus (49 - 7)/2 degree-two orbits.
        assert_eq!(d.len(), 5 + 21);

        // lambda = 3 has id "4,1" (minimal polynomial t - 3 = t + 4).
        let p3 = d.get("4,1").unwrap();
        let coeffs: Vec<i64> = (0..=2)
            .map(|i| {
                let c = p3.poly().coeff(i);
                let r = c.as_rational().unwrap();
                assert!(r.is_integer());
                i64::try_from(r.to_integer()).unwrap()
            })
            .collect();
        assert_eq!(coeffs, vec![1, -4, 7]);

        let p2 = d.get("5,1").unwrap();
        assert!(p2.poly().coeff(1).is_zero(), "lambda = 2 is supersingular");
    }

    #[test]
    fn transform_counts_agree_with_brute_force_everywhere() {
        // Fields small enough to brute-force every fiber, so the transform
        // can be checked in full — including fibers of every degree.
        for (p, n) in [(3u64, 5u32), (5, 4), (7, 3)] {
            let ctx = FqContext::new(p, n).unwrap();
            let sums = legendre_char_sums(&ctx).unwrap();
            for lambda in 2..ctx.size() {
                let brute = count_legendre(&ctx, lambda).unwrap();
                let fast = (ctx.size() as i64 + 1 + sums[lambda as usize]) as u64;
                assert_eq!(brute, fast, "p = {p}, n = {n}, lambda = {lambda}");
            }
        }
    }

    #[test]
    fn trivial_dataset_expands_to_the_projective_line_zeta() {
        let template = GeometryMeta::new(7, 0, 3, 1);
        let d = build_trivial_dataset(7, 3, &template).unwrap();
        let by_degree = |n: u32| d.points().iter().filter(|p| p.degree() == n).count();
        assert_eq!(by_degree(1), 5);
        assert_eq!(by_degree(2), 21);
        assert_eq!(by_degree(3), 112);
        // L = (1 - T)^2 / (1 - 7T) = 1 + 5T + 36T^2 + 252T^3 + ...
        let l = euler_product(&d, 3).unwrap();
        let got: Vec<String> = (0..=3).map(|i| l.coeff(i).to_string()).collect();
        assert_eq!(got, vec!["1", "5", "36", "252"]);

        let empty = build_trivial_dataset(7, 0, &template).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.meta().complete_through_degree, Some(0));
    }

    #[test]
    fn hasse_polynomials_match_the_binomial_formula() {
        assert_eq!(hasse_polynomial(3).unwrap(), vec![1, 1]);
        assert_eq!(hasse_polynomial(5).unwrap(), vec![1, 4, 1]);
        assert_eq!(hasse_polynomial(7).unwrap(), vec![1, 2, 2, 1]);
        assert!(matches!(hasse_polynomial(4), Err(Error::InvalidArgument(_))));

        // For p = 7 the roots are exactly 2, 4, 6.
        let ctx = FqContext::new(7, 1).unwrap();
        let h = hasse_polynomial(7).unwrap();
        let roots: Vec<u64> = (0..7)
            .filter(|&x| ctx.eval_fp_poly(&h, x).unwrap() == 0)
            .collect();
        assert_eq!(roots, vec![2, 4, 6]);
    }

    #[test]
    fn hasse_zeros_are_exactly_the_supersingular_fibers() {
        for p in [3u64, 5, 7, 11, 13] {
            let ctx = FqContext::new(p, 1).unwrap();
            let h = hasse_polynomial(p).unwrap();
            for lambda in 2..p {
                let ss = ctx.eval_fp_poly(&h, lambda).unwrap() == 0;
                let count = count_legendre(&ctx, lambda).unwrap();
                // a = p + 1 - count; supersingular over the prime field means
                // a = 0, i.e. count = 1 mod p.
                assert_eq!(ss, count % p == 1, "p = {p}, lambda = {lambda}");
            }
        }

        // p = 5: the Hasse polynomial 1 + 4x + x^2 is irreducible over F_5,
        // so the supersingular locus is a single degree-two closed point.
        let ctx = FqContext::new(5, 2).unwrap();
        let h = hasse_polynomial(5).unwrap();
        let mut ss_orbits = 0;
        for o in orbits_of_exact_degree(&ctx, &[0, 1]) {
            if ctx.eval_fp_poly(&h, o.rep).unwrap() == 0 {
                ss_orbits += 1;
                let count = count_legendre(&ctx, o.rep).unwrap();
                assert_eq!(count % 5, 1, "supersingular trace divisible by p");
            }
        }
        assert_eq!(ss_orbits, 1);
    }

    #[test]
    fn large_degree_builds_take_the_transform_path() {
        // Degree 6 at p = 7 is past the per-fiber threshold, so this runs
        // the transform sweep, its sampled brute-force cross-check, and the
        // per-fiber Hasse validation inside the builder.
        let d = build_legendre_dataset(7, 6).unwrap();
        let deg6 = d.points().iter().filter(|p| p.degree() == 6).count();
        // Necklace count: (7^6 - 7^3 - 7^2 + 7) / 6.
        assert_eq!(deg6, (117_649 - 343 - 49 + 7) / 6);
        // Spot-check a degree-one fiber against the frozen value.
        let p3 = d.get("4,1").unwrap();
        assert_eq!(p3.degree(), 1);
    }

    #[test]
    fn builders_reject_out_of_scope_requests() {
        assert!(matches!(
            build_legendre_dataset(2, 3),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_legendre_dataset(9, 2),
            Err(Error::InvalidArgument(_))
        ));
        // 7^9 is past desk scale.
        assert!(matches!(
            build_legendre_dataset(7, 9),
            Err(Error::InvalidArgument(_))
        ));
        let mut bad = GeometryMeta::new(7, 0, 3, 1);
        bad.genus = 1;
        assert!(matches!(
            build_trivial_dataset(7, 2, &bad),
            Err(Error::InvalidArgument(_))
        ));
    }
}
