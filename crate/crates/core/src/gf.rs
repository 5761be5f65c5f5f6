//! Arithmetic in GF(2^m) for even m, in polynomial basis.
//!
//! Elements are bit masks (bit i is the coefficient of x^i). All operations go
//! through a [`Gf`] context that carries the modulus and the chosen primitive
//! cube root of unity ζ.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A field element as a coefficient bit mask.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fe(pub u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Largest supported extension degree.
pub const MAX_M: u32 = 32;

/// The field GF(2^m) together with its distinguished cube root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gf {
    m: u32,
    modulus: u64,
    zeta: Fe,
}

/// Serialized form of a field: `{"m": 8, "modulus": [1,1,0,1,1,0,0,0,1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub m: u32,
    pub modulus: Vec<u8>,
}

/// Carry-less product of two 32-bit-or-less masks.
fn clmul(a: u64, b: u64) -> u64 {
    let mut r = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    r
}

fn deg2(a: u64) -> i32 {
    63 - a.leading_zeros() as i32
}

/// Remainder of `a` modulo `m` in GF(2)[x].
fn rem2(mut a: u64, m: u64) -> u64 {
    let dm = deg2(m);
    while a != 0 && deg2(a) >= dm {
        a ^= m << (deg2(a) - dm);
    }
    a
}

fn gcd2(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = rem2(a, b);
        a = b;
        b = r;
    }
    a
}

fn mulmod2(a: u64, b: u64, m: u64) -> u64 {
    rem2(clmul(a, b), m)
}

/// Rabin irreducibility test for a polynomial over GF(2) of degree `n <= 32`.
pub fn is_irreducible_gf2(poly: u64) -> bool {
    if poly == 0 {
        return false;
    }
    let n = deg2(poly);
    if n <= 0 {
        return false;
    }
    if n > MAX_M as i32 {
        return false;
    }
    let n = n as u32;
    // x^(2^k) mod poly
    let frob = |k: u32| -> u64 {
        let mut t = rem2(2, poly);
        for _ in 0..k {
            t = mulmod2(t, t, poly);
        }
        t
    };
    if frob(n) != rem2(2, poly) {
        return false;
    }
    let mut d = 2;
    let mut rest = n;
    let mut primes = Vec::new();
    while d * d <= rest {
        if rest.is_multiple_of(d) {
            primes.push(d);
            while rest.is_multiple_of(d) {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    primes
        .into_iter()
        .all(|p| gcd2(poly, frob(n / p) ^ rem2(2, poly)) == 1)
}

impl Gf {
    /// GF(2^m) with the smallest irreducible modulus of degree m.
    pub fn new(m: u32) -> Result<Gf> {
        if m == 0 || !m.is_multiple_of(2) || m > MAX_M {
            return Err(Error::BadField(format!(
                "extension degree must be even and at most {MAX_M}, got {m}"
            )));
        }
        let start = 1u64 << m;
        let modulus = (start..start << 1)
            .find(|&p| is_irreducible_gf2(p))
            .expect("an irreducible polynomial exists in every degree");
        Gf::with_modulus(m, modulus)
    }

    /// GF(2^m) with an explicit modulus mask (bit m must be set).
    pub fn with_modulus(m: u32, modulus: u64) -> Result<Gf> {
        if m == 0 || !m.is_multiple_of(2) || m > MAX_M {
            return Err(Error::BadField(format!(
                "extension degree must be even and at most {MAX_M}, got {m}"
            )));
        }
        if deg2(modulus) != m as i32 {
            return Err(Error::BadField(format!(
                "modulus {modulus:#x} does not have degree {m}"
            )));
        }
        if !is_irreducible_gf2(modulus) {
            return Err(Error::BadField(format!(
                "modulus {modulus:#x} is reducible over GF(2)"
            )));
        }
        let mut f = Gf {
            m,
            modulus,
            zeta: Fe::ONE,
        };
        let e = (f.order() - 1) / 3;
        let w = (2..f.order())
            .map(|g| f.pow(Fe(g), e))
            .find(|&w| w != Fe::ONE)
            .expect("(q-1)/3-th powers are not all 1");
        f.zeta = w.min(f.mul(w, w));
        Ok(f)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Gf> {
        let mut modulus = 0u64;
        if spec.modulus.len() > 64 {
            return Err(Error::BadField("modulus too long".into()));
        }
        for (i, &b) in spec.modulus.iter().enumerate() {
            match b {
                0 => {}
                1 => modulus |= 1 << i,
                _ => return Err(Error::BadField(format!("modulus bit {b} is not 0 or 1"))),
            }
        }
        Gf::with_modulus(spec.m, modulus)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            m: self.m,
            modulus: (0..=self.m)
                .map(|i| ((self.modulus >> i) & 1) as u8)
                .collect(),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Number of elements, 2^m.
    pub fn order(&self) -> u64 {
        1u64 << self.m
    }

    /// The residue of x, a generator of the polynomial basis.
    pub fn gen(&self) -> Fe {
        Fe(2)
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.0 < self.order()
    }

    pub fn elem(&self, mask: u64) -> Result<Fe> {
        if mask < self.order() {
            Ok(Fe(mask))
        } else {
            Err(Error::BadField(format!(
                "element mask {mask:#x} out of range for GF(2^{})",
                self.m
            )))
        }
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(a.0 ^ b.0)
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(mulmod2(a.0, b.0, self.modulus))
    }

    pub fn sqr(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut r = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// Power with a signed exponent; `a` must be nonzero when `e < 0`.
    pub fn powi(&self, a: Fe, e: i64) -> Fe {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.pow(self.inv(a), e.unsigned_abs())
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero in GF(2^{})", self.m);
        self.pow(a, self.order() - 2)
    }

    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    /// The unique square root, a^(2^(m-1)).
    pub fn sqrt(&self, a: Fe) -> Fe {
        let mut r = a;
        for _ in 0..self.m - 1 {
            r = self.sqr(r);
        }
        r
    }

    /// Absolute trace to GF(2).
    pub fn abs_trace(&self, a: Fe) -> Fe {
        let mut t = a;
        let mut s = a;
        for _ in 1..self.m {
            t = self.sqr(t);
            s = self.add(s, t);
        }
        s
    }

    pub fn zeta(&self) -> Fe {
        self.zeta
    }

    /// ζ^e for any integer e.
    pub fn zeta_pow(&self, e: i64) -> Fe {
        match e.rem_euclid(3) {
            0 => Fe::ONE,
            1 => self.zeta,
            _ => self.sqr(self.zeta),
        }
    }

    /// (1, ζ, ζ²).
    pub fn cube_roots_of_unity(&self) -> (Fe, Fe, Fe) {
        (Fe::ONE, self.zeta, self.zeta_pow(2))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.order()))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.order()))
    }

    /// All elements in canonical order. Intended for small fields.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.order()).map(Fe)
    }

    /// All cube roots of `a` in canonical order.
    pub fn cube_roots(&self, a: Fe) -> Vec<Fe> {
        if a.is_zero() {
            return vec![Fe::ZERO];
        }
        // Cubing is 3-to-1 on the multiplicative group since 3 | q - 1.
        let q1 = self.order() - 1;
        if self.pow(a, q1 / 3) != Fe::ONE {
            return Vec::new();
        }
        let p = crate::poly::Poly::new(vec![a, Fe::ZERO, Fe::ZERO, Fe::ONE]);
        let mut r: Vec<Fe> = crate::poly::distinct_roots(self, &p);
        r.sort();
        r
    }
}

/// A point of the projective line over GF(2^m): a field element or ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proj {
    Fin(Fe),
    Inf,
}

impl Proj {
    pub fn fin(self) -> Option<Fe> {
        match self {
            Proj::Fin(a) => Some(a),
            Proj::Inf => None,
        }
    }

    pub fn is_inf(self) -> bool {
        self == Proj::Inf
    }

    /// Report form: the element mask, or "inf".
    pub fn key(self) -> String {
        match self {
            Proj::Fin(a) => a.0.to_string(),
            Proj::Inf => "inf".into(),
        }
    }
}

impl fmt::Display for Proj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proj::Fin(a) => write!(f, "{a}"),
            Proj::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Proj {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Proj::Fin(a) => s.serialize_u64(a.0),
            Proj::Inf => s.serialize_str("inf"),
        }
    }
}

impl Gf {
    /// x ↦ (a·x + b)/(c·x + d) on the projective line; ad + bc must be nonzero.
    pub fn mobius(&self, [a, b, c, d]: [Fe; 4], x: Proj) -> Proj {
        let (num, den) = match x {
            Proj::Fin(x) => (self.add(self.mul(a, x), b), self.add(self.mul(c, x), d)),
            Proj::Inf => (a, c),
        };
        if den.is_zero() {
            Proj::Inf
        } else {
            Proj::Fin(self.div(num, den))
        }
    }

    /// φ(λ) = (ζ + λ)/(ζ² + λ).
    pub fn phi_of_lambda(&self, l: Proj) -> Proj {
        self.mobius([Fe::ONE, self.zeta, Fe::ONE, self.zeta_pow(2)], l)
    }

    /// λ(φ) = ζ(1 + ζφ)/(1 + φ), the inverse of [`Gf::phi_of_lambda`].
    pub fn lambda_of_phi(&self, p: Proj) -> Proj {
        self.mobius([self.zeta_pow(2), self.zeta, Fe::ONE, Fe::ONE], p)
    }

    /// Cube on the projective line (∞³ = ∞).
    pub fn proj_cube(&self, x: Proj) -> Proj {
        match x {
            Proj::Fin(a) => Proj::Fin(self.pow(a, 3)),
            Proj::Inf => Proj::Inf,
        }
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.m, self.modulus)
    }
}
