//! Rational functions in s over GF(2^m), places of the projective line and
//! truncated Laurent expansions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};
use crate::poly::{self, Poly};

/// A rational point of the projective line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    /// Uniformizer s - c.
    Finite(Fe),
    /// Uniformizer 1/s.
    Infinity,
}

impl Place {
    /// Report key: "inf", "0", or the element mask.
    pub fn key(&self) -> String {
        match self {
            Place::Infinity => "inf".into(),
            Place::Finite(c) => c.0.to_string(),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(c) => write!(f, "s={c}"),
        }
    }
}

/// A canonical quotient num/den: coprime, den monic and nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

/// Leading order and consecutive coefficients of an expansion in the uniformizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentChunk {
    pub place: Place,
    pub ord: i64,
    pub coeffs: Vec<Fe>,
}

impl LaurentChunk {
    /// Coefficient of π^(ord + i), zero past the truncation.
    pub fn at(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    /// Coefficient of π^e.
    pub fn coeff_of(&self, e: i64) -> Fe {
        if e < self.ord {
            Fe::ZERO
        } else {
            self.at((e - self.ord) as usize)
        }
    }
}

/// Power-series quotient n/d to `count` terms; d(0) must be nonzero.
pub fn series_div(f: &Gf, n: &Poly, d: &Poly, count: usize) -> Vec<Fe> {
    let d0inv = f.inv(d.coeff(0));
    let mut rem: Vec<Fe> = (0..count).map(|i| n.coeff(i)).collect();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let c = f.mul(rem[i], d0inv);
        out.push(c);
        if c.is_zero() {
            continue;
        }
        for (j, &dj) in d.coeffs().iter().enumerate().skip(1) {
            if i + j >= count {
                break;
            }
            rem[i + j] = f.add(rem[i + j], f.mul(c, dj));
        }
    }
    out
}

impl RatFunc {
    /// Canonicalize num/den. Panics if den is zero.
    pub fn new(f: &Gf, num: Poly, den: Poly) -> RatFunc {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = num.gcd(f, &den);
        let (num, den) = if g.deg() == Some(0) {
            (num, den)
        } else {
            (num.exact_div(f, &g), den.exact_div(f, &g))
        };
        let l = f.inv(den.lead());
        RatFunc {
            num: num.scale(f, l),
            den: den.scale(f, l),
        }
    }

    pub fn zero() -> RatFunc {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> RatFunc {
        RatFunc::constant(Fe::ONE)
    }

    pub fn constant(a: Fe) -> RatFunc {
        RatFunc {
            num: Poly::constant(a),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// The coordinate function s.
    pub fn s() -> RatFunc {
        RatFunc::from_poly(Poly::x())
    }

    /// a·s^e for any integer e.
    pub fn monomial(a: Fe, e: i64) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero();
        }
        if e >= 0 {
            RatFunc::from_poly(Poly::monomial(a, e as usize))
        } else {
            RatFunc {
                num: Poly::constant(a),
                den: Poly::monomial(Fe::ONE, (-e) as usize),
            }
        }
    }

    /// a/(s - c)^e for e >= 0.
    pub fn pole_term(f: &Gf, a: Fe, c: Fe, e: usize) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: Poly::constant(a),
            den: Poly::linear(c).pow(f, e),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.den.deg() == Some(0) && self.num.deg().unwrap_or(0) == 0
    }

    pub fn add(&self, f: &Gf, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(f, self.num.add(&o.num), self.den.clone());
        }
        RatFunc::new(
            f,
            self.num.mul(f, &o.den).add(&o.num.mul(f, &self.den)),
            self.den.mul(f, &o.den),
        )
    }

    /// Subtraction equals addition in characteristic 2.
    pub fn sub(&self, f: &Gf, o: &RatFunc) -> RatFunc {
        self.add(f, o)
    }

    pub fn mul(&self, f: &Gf, o: &RatFunc) -> RatFunc {
        RatFunc::new(f, self.num.mul(f, &o.num), self.den.mul(f, &o.den))
    }

    pub fn scale(&self, f: &Gf, a: Fe) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(f, a),
            den: self.den.clone(),
        }
    }

    pub fn sqr(&self, f: &Gf) -> RatFunc {
        self.mul(f, self)
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, f: &Gf) -> RatFunc {
        assert!(!self.is_zero(), "inverse of the zero function");
        RatFunc::new(f, self.den.clone(), self.num.clone())
    }

    pub fn div(&self, f: &Gf, o: &RatFunc) -> RatFunc {
        self.mul(f, &o.inv(f))
    }

    pub fn pow(&self, f: &Gf, e: i64) -> RatFunc {
        let base = if e < 0 { self.inv(f) } else { self.clone() };
        RatFunc::new(
            f,
            base.num.pow(f, e.unsigned_abs() as usize),
            base.den.pow(f, e.unsigned_abs() as usize),
        )
    }

    /// h² - h.
    pub fn wp(&self, f: &Gf) -> RatFunc {
        self.sqr(f).add(f, self)
    }

    /// Value at a finite point; `None` at a pole.
    pub fn eval(&self, f: &Gf, x: Fe) -> Option<Fe> {
        let d = self.den.eval(f, x);
        if d.is_zero() {
            None
        } else {
            Some(f.div(self.num.eval(f, x), d))
        }
    }

    /// Valuation at `y`; `None` stands for +∞ (the zero function).
    pub fn ord_at(&self, f: &Gf, y: Place) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(match y {
            Place::Infinity => self.den.degree() - self.num.degree(),
            Place::Finite(c) => {
                let n = self.num.shift(f, c).valuation().unwrap() as i64;
                let d = self.den.shift(f, c).valuation().unwrap() as i64;
                n - d
            }
        })
    }

    /// The first `count` coefficients of the expansion at `y`.
    pub fn laurent_at(&self, f: &Gf, y: Place, count: usize) -> LaurentChunk {
        if self.is_zero() {
            return LaurentChunk {
                place: y,
                ord: 0,
                coeffs: vec![Fe::ZERO; count],
            };
        }
        match y {
            Place::Infinity => {
                let dn = self.num.deg().unwrap();
                let dd = self.den.deg().unwrap();
                let n = self.num.reverse(dn);
                let d = self.den.reverse(dd);
                LaurentChunk {
                    place: y,
                    ord: dd as i64 - dn as i64,
                    coeffs: series_div(f, &n, &d, count),
                }
            }
            Place::Finite(c) => {
                let n = self.num.shift(f, c);
                let d = self.den.shift(f, c);
                let vn = n.valuation().unwrap();
                let vd = d.valuation().unwrap();
                let n = Poly::new(n.coeffs()[vn..].to_vec());
                let d = Poly::new(d.coeffs()[vd..].to_vec());
                LaurentChunk {
                    place: y,
                    ord: vn as i64 - vd as i64,
                    coeffs: series_div(f, &n, &d, count),
                }
            }
        }
    }

    /// f(a·s) for nonzero a.
    pub fn scale_var(&self, f: &Gf, a: Fe) -> RatFunc {
        RatFunc::new(f, self.num.scale_var(f, a), self.den.scale_var(f, a))
    }

    /// f(ζ^power · s).
    pub fn rho_pullback(&self, f: &Gf, power: i64) -> RatFunc {
        self.scale_var(f, f.zeta_pow(power))
    }

    /// f + f(ζs) + f(ζ²s).
    pub fn trace(&self, f: &Gf) -> RatFunc {
        self.add(f, &self.rho_pullback(f, 1))
            .add(f, &self.rho_pullback(f, 2))
    }

    /// f(1/s).
    pub fn invert_s(&self, f: &Gf) -> RatFunc {
        if self.is_zero() {
            return RatFunc::zero();
        }
        let dn = self.num.deg().unwrap();
        let dd = self.den.deg().unwrap();
        let n = self.num.reverse(dn);
        let d = self.den.reverse(dd);
        if dd >= dn {
            RatFunc::new(f, n.shl(dd - dn), d)
        } else {
            RatFunc::new(f, n, d.shl(dn - dd))
        }
    }

    /// True when every exponent of num and den is divisible by 3.
    pub fn is_in_s_cubed(&self) -> bool {
        let ok = |p: &Poly| {
            p.coeffs()
                .iter()
                .enumerate()
                .all(|(i, x)| i % 3 == 0 || x.is_zero())
        };
        ok(&self.num) && ok(&self.den)
    }

    /// Finite poles with their orders; fails if the denominator does not split.
    pub fn finite_poles(&self, f: &Gf) -> Result<Vec<(Fe, usize)>> {
        poly::split(f, &self.den)
    }

    /// All poles with positive orders, finite ones first in canonical order.
    pub fn poles(&self, f: &Gf) -> Result<Vec<(Place, usize)>> {
        let mut out: Vec<(Place, usize)> = self
            .finite_poles(f)?
            .into_iter()
            .map(|(c, e)| (Place::Finite(c), e))
            .collect();
        if self.num.degree() > self.den.degree() {
            out.push((
                Place::Infinity,
                (self.num.degree() - self.den.degree()) as usize,
            ));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> RatFuncJson {
        RatFuncJson {
            num: self.num.coeffs().iter().map(|x| x.0).collect(),
            den: self.den.coeffs().iter().map(|x| x.0).collect(),
        }
    }

    pub fn from_json(f: &Gf, j: &RatFuncJson) -> Result<RatFunc> {
        let conv = |v: &[u64]| -> Result<Poly> {
            v.iter()
                .map(|&x| f.elem(x))
                .collect::<Result<Vec<_>>>()
                .map(Poly::new)
        };
        let num = conv(&j.num)?;
        let den = if j.den.is_empty() {
            Poly::one()
        } else {
            conv(&j.den)?
        };
        if den.is_zero() {
            return Err(Error::Parse("denominator is zero".into()));
        }
        Ok(RatFunc::new(f, num, den))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.deg() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Wire form `{"num": [masks low-to-high], "den": [...]}`; empty `den` means 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFuncJson {
    pub num: Vec<u64>,
    #[serde(default)]
    pub den: Vec<u64>,
}
