//! Arithmetic in GF(q), q = p^k with p an odd prime.
//!
//! Elements are stored by their canonical integer encoding `e = Σ aᵢ·pⁱ`,
//! where `aᵢ` is the coefficient of `xⁱ` in the polynomial representative
//! modulo the field's defining polynomial. Multiplication goes through
//! discrete log / antilog tables built once per field, so every operation
//! is a handful of table lookups.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 14;

/// Composite-degree fields up to this order get a dense addition table.
const ADD_TABLE_LIMIT: u32 = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("field order {0} is even; only odd characteristic is supported")]
    EvenOrder(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {q} exceeds the supported ceiling {max}")]
    TooLarge { q: u64, max: u64 },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("encoding {e} is out of range for GF({q})")]
    OutOfRange { e: u64, q: u32 },
    #[error("zero has no fourth-power class")]
    ZeroFourthPower,
}

/// An element of GF(q), identified by its canonical integer encoding.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub(crate) fn from_raw(v: u32) -> Self {
        FieldElem(v)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of the projective line over GF(q): a field element or ∞.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtParam {
    Finite(FieldElem),
    Infinity,
}

impl From<FieldElem> for ExtParam {
    fn from(x: FieldElem) -> Self {
        ExtParam::Finite(x)
    }
}

/// Quadratic character of an element of GF(q) ∪ {∞}.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SquareClass {
    Zero,
    Square,
    Nonsquare,
    /// ∞ is treated as a nonsquare.
    InfinityNonsquare,
}

struct Tables {
    p: u32,
    k: u32,
    q: u32,
    /// Monic defining polynomial, low degree first, length k + 1.
    modulus: Vec<u32>,
    primitive: u32,
    /// `exp[i] = g^i`, stored twice over so `exp[log a + log b]` never wraps.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u16>>,
    square: Vec<bool>,
    fourth: Vec<bool>,
}

/// The arithmetic context for GF(q). Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec {
    t: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.t.q == other.t.q && self.t.modulus == other.t.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.t.q)
            .field("p", &self.t.p)
            .field("k", &self.t.k)
            .field("modulus", &self.t.modulus)
            .finish()
    }
}

/// Serialized form of a [`FieldSpec`]: `{q, p, k, modulus: [c₀,…,c_{k−1},1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpecDoc {
    pub q: u32,
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.doc().serialize(s)
    }
}

/// Splits `q` into `(p, k)` with `q = p^k`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        // q itself is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

pub fn is_odd_prime_power(q: u64) -> bool {
    q % 2 == 1 && prime_power(q).is_some()
}

/// Odd prime powers in `lo..=hi`, ascending.
pub fn odd_prime_powers(lo: u64, hi: u64) -> Vec<u32> {
    (lo.max(3)..=hi.min(MAX_ORDER))
        .filter(|&q| is_odd_prime_power(q))
        .map(|q| q as u32)
        .collect()
}

/// Builds the field of order `q`. Deterministic: the same `q` always yields
/// the same defining polynomial and primitive element.
pub fn make_field(q: u64) -> Result<FieldSpec, FieldError> {
    FieldSpec::new(q)
}

// Polynomial helpers over GF(p), used only while building the tables.
// Polynomials are coefficient vectors, low degree first.

fn decode(mut e: u32, p: u32, k: u32) -> Vec<u32> {
    let mut c = Vec::with_capacity(k as usize);
    for _ in 0..k {
        c.push(e % p);
        e /= p;
    }
    c
}

fn encode(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Remainder of `a` modulo `m` over GF(p); `m` must be nonzero.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let m = trim(m.to_vec());
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p) as u64;
    while r.len() > dm {
        let dr = r.len() - 1;
        let factor = r[dr] as u64 * lead_inv % p as u64;
        for (i, &mc) in m.iter().enumerate() {
            let idx = dr - dm + i;
            let sub = factor * mc as u64 % p as u64;
            r[idx] = ((r[idx] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
    poly_rem(&prod, m, p)
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = (m.len() - 1) as u32;
    // monic divisors of degree 1..=k/2
    for d in 1..=k / 2 {
        for e in 0..p.pow(d) {
            let mut div = decode(e, p, d);
            div.push(1);
            if poly_rem(m, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    (0..p.pow(k))
        .map(|e| {
            let mut m = decode(e, p, k);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("an irreducible polynomial of every degree exists")
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldSpec {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if q > MAX_ORDER {
            return Err(FieldError::TooLarge { q, max: MAX_ORDER });
        }
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if p == 2 {
            return Err(FieldError::EvenOrder(q));
        }
        let (p, q) = (p as u32, q as u32);
        let modulus = smallest_irreducible(p, k);

        let slow_mul = |a: u32, b: u32| -> u32 {
            if k == 1 {
                ((a as u64 * b as u64) % p as u64) as u32
            } else {
                let r = poly_mulmod(&decode(a, p, k), &decode(b, p, k), &modulus, p);
                encode(&r, p)
            }
        };
        let slow_pow = |mut b: u32, mut e: u32| -> u32 {
            let mut r = 1;
            while e > 0 {
                if e & 1 == 1 {
                    r = slow_mul(r, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            r
        };

        let order = q - 1;
        let factors = prime_factors(order);
        let primitive = (1..q)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("the multiplicative group is cyclic");

        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for i in 0..order {
            exp[i as usize] = acc;
            exp[(i + order) as usize] = acc;
            log[acc as usize] = i;
            acc = slow_mul(acc, primitive);
        }

        let neg: Vec<u32> = (0..q)
            .map(|e| {
                let c: Vec<u32> = decode(e, p, k).iter().map(|&d| (p - d) % p).collect();
                encode(&c, p)
            })
            .collect();

        let add = (k > 1 && q <= ADD_TABLE_LIMIT).then(|| {
            let mut table = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = add_digits(a, b, p, k) as u16;
                }
            }
            table
        });

        let mut square = vec![false; q as usize];
        let mut fourth = vec![false; q as usize];
        for u in 1..q {
            let s = slow_mul(u, u);
            square[s as usize] = true;
            fourth[slow_mul(s, s) as usize] = true;
        }

        Ok(FieldSpec {
            t: Arc::new(Tables {
                p,
                k,
                q,
                modulus,
                primitive,
                exp,
                log,
                neg,
                add,
                square,
                fourth,
            }),
        })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.t.q
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.t.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.t.k
    }

    /// Monic defining polynomial `[c₀,…,c_{k−1},1]`.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    pub fn doc(&self) -> FieldSpecDoc {
        FieldSpecDoc {
            q: self.q(),
            p: self.p(),
            k: self.k(),
            modulus: self.t.modulus.clone(),
        }
    }

    pub fn elem(&self, e: u64) -> Result<FieldElem, FieldError> {
        if e < self.q() as u64 {
            Ok(FieldElem(e as u32))
        } else {
            Err(FieldError::OutOfRange { e, q: self.q() })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem, FieldError> {
        let p = self.p();
        if coeffs.len() > self.k() as usize || coeffs.iter().any(|&c| c >= p) {
            return Err(FieldError::OutOfRange {
                e: encode(coeffs, p) as u64,
                q: self.q(),
            });
        }
        Ok(FieldElem(encode(coeffs, p)))
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        decode(x.0, self.p(), self.k())
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q()).map(FieldElem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q()).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let t = &*self.t;
        if t.k == 1 {
            let s = a.0 + b.0;
            FieldElem(if s >= t.p { s - t.p } else { s })
        } else if let Some(table) = &t.add {
            FieldElem(table[(a.0 * t.q + b.0) as usize] as u32)
        } else {
            FieldElem(add_digits(a.0, b.0, t.p, t.k))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.t.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let t = &*self.t;
        FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let t = &*self.t;
        let order = t.q - 1;
        Ok(FieldElem(t.exp[((order - t.log[a.0 as usize]) % order) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, n: u64) -> FieldElem {
        if n == 0 {
            return FieldElem::ONE;
        }
        if a.is_zero() {
            return FieldElem::ZERO;
        }
        let t = &*self.t;
        let order = (t.q - 1) as u64;
        let e = (t.log[a.0 as usize] as u64 * (n % order)) % order;
        FieldElem(t.exp[e as usize])
    }

    pub fn square(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    /// True iff `x ≠ 0` and `x = y²` for some `y`.
    #[inline]
    pub fn is_nonzero_square(&self, x: FieldElem) -> bool {
        self.t.square[x.0 as usize]
    }

    /// Membership in `{y² : y ∈ GF(q)}`, zero included.
    #[inline]
    pub fn is_square_or_zero(&self, x: FieldElem) -> bool {
        x.is_zero() || self.is_nonzero_square(x)
    }

    /// The Euler criterion `x^((q−1)/2) = 1`, computed by exponentiation.
    pub fn euler_criterion(&self, x: FieldElem) -> bool {
        !x.is_zero() && self.pow(x, ((self.q() - 1) / 2) as u64) == FieldElem::ONE
    }

    /// True iff `x = u⁴` for some nonzero `u`.
    pub fn is_fourth_power(&self, x: FieldElem) -> Result<bool, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroFourthPower);
        }
        Ok(self.t.fourth[x.0 as usize])
    }

    /// Smallest-encoded generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElem {
        FieldElem(self.t.primitive)
    }

    /// Smallest-encoded nonsquare.
    pub fn smallest_nonsquare(&self) -> FieldElem {
        self.nonzero()
            .find(|&x| !self.is_nonzero_square(x))
            .expect("odd-order fields have nonsquares")
    }

    pub fn classify(&self, x: ExtParam) -> SquareClass {
        match x {
            ExtParam::Infinity => SquareClass::InfinityNonsquare,
            ExtParam::Finite(v) if v.is_zero() => SquareClass::Zero,
            ExtParam::Finite(v) if self.is_nonzero_square(v) => SquareClass::Square,
            ExtParam::Finite(_) => SquareClass::Nonsquare,
        }
    }

    /// A pair of nonzero squares summing to `x`, if one exists.
    pub fn two_square_decomposition(&self, x: FieldElem) -> Option<(FieldElem, FieldElem)> {
        self.nonzero()
            .filter(|&s| self.is_nonzero_square(s))
            .find_map(|s| {
                let rest = self.sub(x, s);
                self.is_nonzero_square(rest).then_some((s, rest))
            })
    }

    /// The field of order `q^degree` together with the embedding of `self`
    /// into it, given as a lookup table indexed by encoding.
    pub fn extension(&self, degree: u32) -> Result<(FieldSpec, Vec<FieldElem>), FieldError> {
        let big = (self.q() as u64)
            .checked_pow(degree)
            .ok_or(FieldError::TooLarge {
                q: u64::MAX,
                max: MAX_ORDER,
            })?;
        let ext = FieldSpec::new(big)?;
        if self.k() == 1 {
            return Ok((ext, self.elements().collect()));
        }
        // A root of our defining polynomial inside the extension.
        let m = self.modulus();
        let theta = ext
            .elements()
            .find(|&t| {
                let v = m
                    .iter()
                    .rev()
                    .fold(FieldElem::ZERO, |acc, &c| ext.add(ext.mul(acc, t), FieldElem(c)));
                v.is_zero()
            })
            .expect("the defining polynomial splits in every extension of degree divisible by k");
        let map = self
            .elements()
            .map(|x| {
                self.coeffs(x)
                    .iter()
                    .rev()
                    .fold(FieldElem::ZERO, |acc, &c| ext.add(ext.mul(acc, theta), FieldElem(c)))
            })
            .collect();
        Ok((ext, map))
    }
}

fn add_digits(mut a: u32, mut b: u32, p: u32, k: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..k {
        let d = (a % p + b % p) % p;
        out += d * place;
        place *= p;
        a /= p;
        b /= p;
    }
    out
}
