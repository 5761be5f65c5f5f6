//! Dense univariate polynomials over GF(2^m) and root finding.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};

/// Coefficients low-to-high with no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    c: Vec<Fe>,
}

impl Poly {
    pub fn new(mut c: Vec<Fe>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Fe::ONE] }
    }

    pub fn constant(a: Fe) -> Poly {
        Poly::new(vec![a])
    }

    pub fn x() -> Poly {
        Poly::new(vec![Fe::ZERO, Fe::ONE])
    }

    pub fn monomial(a: Fe, e: usize) -> Poly {
        let mut c = vec![Fe::ZERO; e + 1];
        c[e] = a;
        Poly::new(c)
    }

    /// x - a (equal to x + a in characteristic 2).
    pub fn linear(a: Fe) -> Poly {
        Poly::new(vec![a, Fe::ONE])
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.c.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial at -1.
    pub fn degree(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lead(&self) -> Fe {
        self.c.last().copied().unwrap_or(Fe::ZERO)
    }

    /// Index of the lowest nonzero coefficient (`None` for zero).
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fe::ONE
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| Fe(self.coeff(i).0 ^ o.coeff(i).0)).collect())
    }

    pub fn scale(&self, f: &Gf, a: Fe) -> Poly {
        Poly::new(self.c.iter().map(|&x| f.mul(x, a)).collect())
    }

    pub fn mul(&self, f: &Gf, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut r = vec![Fe::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(a, b));
            }
        }
        Poly::new(r)
    }

    pub fn pow(&self, f: &Gf, e: usize) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    /// Multiply by x^k.
    pub fn shl(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fe::ZERO; k];
        c.extend_from_slice(&self.c);
        Poly { c }
    }

    /// Quotient and remainder. Panics if `d` is zero.
    pub fn divrem(&self, f: &Gf, d: &Poly) -> (Poly, Poly) {
        let dd = d.deg().expect("division by the zero polynomial");
        let li = f.inv(d.lead());
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Fe::ZERO; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let t = r[i];
            if t.is_zero() {
                continue;
            }
            let c = f.mul(t, li);
            q[i - dd] = c;
            for (j, &dj) in d.c.iter().enumerate() {
                let k = i - dd + j;
                r[k] = f.add(r[k], f.mul(c, dj));
            }
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, f: &Gf, d: &Poly) -> Poly {
        self.divrem(f, d).1
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, f: &Gf, d: &Poly) -> Poly {
        let (q, r) = self.divrem(f, d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, f: &Gf) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f, f.inv(self.lead()))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, f: &Gf, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, f: &Gf, x: Fe) -> Fe {
        self.c
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &a| f.add(f.mul(acc, x), a))
    }

    /// p(x + c), by repeated synthetic division.
    pub fn shift(&self, f: &Gf, c: Fe) -> Poly {
        let mut a = self.c.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                a[j] = f.add(a[j], f.mul(c, a[j + 1]));
            }
        }
        Poly::new(a)
    }

    /// p(a·x).
    pub fn scale_var(&self, f: &Gf, a: Fe) -> Poly {
        let mut pw = Fe::ONE;
        let mut c = Vec::with_capacity(self.c.len());
        for &x in &self.c {
            c.push(f.mul(x, pw));
            pw = f.mul(pw, a);
        }
        Poly::new(c)
    }

    /// x^n p(1/x) for n >= deg p.
    pub fn reverse(&self, n: usize) -> Poly {
        let mut c = vec![Fe::ZERO; n + 1];
        for (i, &x) in self.c.iter().enumerate() {
            c[n - i] = x;
        }
        Poly::new(c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &x)| if i % 2 == 1 { x } else { Fe::ZERO })
                .collect(),
        )
    }

    pub fn mulmod(&self, f: &Gf, o: &Poly, m: &Poly) -> Poly {
        self.mul(f, o).rem(f, m)
    }

    pub fn display(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, a.0) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => {}
                _ => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "s")?,
                _ => write!(f, "s^{i}")?,
            }
        }
        Ok(())
    }
}

/// x^(2^k) mod p.
fn frobenius_x(f: &Gf, p: &Poly, k: u32) -> Poly {
    let mut t = Poly::x().rem(f, p);
    for _ in 0..k {
        t = t.mulmod(f, &t, p);
    }
    t
}

/// Split a monic squarefree product of distinct linear factors into its roots.
fn split_linear(f: &Gf, g: &Poly, out: &mut Vec<Fe>) {
    match g.deg() {
        None | Some(0) => {}
        Some(1) => out.push(g.coeff(0)),
        Some(_) => {
            let mut beta = Fe::ONE;
            for _ in 0..f.m() {
                // Tr(beta x) mod g
                let bx = Poly::monomial(beta, 1).rem(f, g);
                let mut t = bx.clone();
                let mut acc = bx;
                for _ in 1..f.m() {
                    t = t.mulmod(f, &t, g);
                    acc = acc.add(&t);
                }
                let h = g.gcd(f, &acc);
                if let Some(d) = h.deg() {
                    if d > 0 && d < g.deg().unwrap() {
                        split_linear(f, &h, out);
                        split_linear(f, &g.exact_div(f, &h), out);
                        return;
                    }
                }
                beta = f.mul(beta, f.gen());
            }
            unreachable!("trace splitting over the polynomial basis separates distinct roots");
        }
    }
}

/// Distinct roots of `p` in GF(2^m), sorted.
pub fn distinct_roots(f: &Gf, p: &Poly) -> Vec<Fe> {
    if p.deg().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let p = p.monic(f);
    let xq = frobenius_x(f, &p, f.m());
    let g = p.gcd(f, &xq.add(&Poly::x()));
    let mut out = Vec::new();
    split_linear(f, &g, &mut out);
    out.sort();
    out
}

/// Roots with multiplicities, plus the monic cofactor free of roots in the field.
pub fn roots_with_cofactor(f: &Gf, p: &Poly) -> (Vec<(Fe, usize)>, Poly) {
    let mut rest = p.monic(f);
    let mut out = Vec::new();
    for r in distinct_roots(f, p) {
        let lin = Poly::linear(r);
        let mut k = 0;
        loop {
            let (q, rem) = rest.divrem(f, &lin);
            if !rem.is_zero() {
                break;
            }
            rest = q;
            k += 1;
        }
        out.push((r, k));
    }
    (out, rest)
}

/// Roots with multiplicities; fails if `p` does not split into linear factors.
pub fn split(f: &Gf, p: &Poly) -> Result<Vec<(Fe, usize)>> {
    let (roots, rest) = roots_with_cofactor(f, p);
    match rest.deg() {
        Some(d) if d > 0 => Err(Error::PoleNotSplit {
            factor: rest.to_string(),
            degree: d,
        }),
        _ => Ok(roots),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f8() -> Gf {
        Gf::new(8).unwrap()
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(0u64..256, 0..=max_deg + 1)
            .prop_map(|v| Poly::new(v.into_iter().map(Fe).collect()))
    }

    #[test]
    fn roots_match_brute_force() {
        let f = Gf::new(4).unwrap();
        let p = Poly::linear(Fe(3))
            .pow(&f, 2)
            .mul(&f, &Poly::linear(Fe(7)))
            .mul(
                &f,
                &Poly::new(vec![Fe(1), Fe(1), Fe(1)]).scale_var(&f, Fe(2)),
            )
            .mul(&f, &Poly::new(vec![Fe(2), Fe(0), Fe(1), Fe(1)]));
        let brute: Vec<Fe> = f.elements().filter(|&x| p.eval(&f, x).is_zero()).collect();
        assert_eq!(distinct_roots(&f, &p), brute);
        let (roots, rest) = roots_with_cofactor(&f, &p);
        let expected_rest_deg = p.deg().unwrap() - roots.iter().map(|r| r.1).sum::<usize>();
        assert_eq!(rest.deg(), Some(expected_rest_deg));
        let mut rebuilt = rest;
        for &(r, e) in &roots {
            rebuilt = rebuilt.mul(&f, &Poly::linear(r).pow(&f, e));
        }
        assert_eq!(rebuilt, p.monic(&f));
        assert!(roots.iter().any(|&(r, e)| r == Fe(3) && e >= 2));
    }

    #[test]
    fn unsplit_factor_is_reported() {
        let f = Gf::new(2).unwrap();
        // x^3 + x + 1 is irreducible over GF(2) and stays so over GF(4).
        let p = Poly::new(vec![Fe(1), Fe(1), Fe(0), Fe(1)]).mul(&f, &Poly::linear(Fe(1)));
        match split(&f, &p) {
            Err(Error::PoleNotSplit { degree, .. }) => assert_eq!(degree, 3),
            other => panic!("expected PoleNotSplit, got {other:?}"),
        }
    }

    #[test]
    fn shift_binomial() {
        let f = f8();
        // (x+1)^2 = x^2 + 1
        let p = Poly::monomial(Fe::ONE, 2).shift(&f, Fe::ONE);
        assert_eq!(p, Poly::new(vec![Fe(1), Fe(0), Fe(1)]));
    }

    proptest! {
        #[test]
        fn divrem_reconstructs(a in arb_poly(12), b in arb_poly(6)) {
            let f = f8();
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&f, &b);
            prop_assert_eq!(q.mul(&f, &b).add(&r), a);
            prop_assert!(r.degree() < b.degree());
        }

        #[test]
        fn gcd_divides(a in arb_poly(8), b in arb_poly(8), c in arb_poly(4)) {
            let f = f8();
            prop_assume!(!c.is_zero());
            let (ac, bc) = (a.mul(&f, &c), b.mul(&f, &c));
            let g = ac.gcd(&f, &bc);
            if !g.is_zero() {
                prop_assert!(ac.rem(&f, &g).is_zero());
                prop_assert!(bc.rem(&f, &g).is_zero());
                prop_assert!(g.rem(&f, &c.monic(&f)).is_zero());
            }
        }

        #[test]
        fn shift_and_scale_agree_with_eval(a in arb_poly(10), c in 0u64..256, x in 0u64..256, k in 1u64..256) {
            let f = f8();
            let (c, x, k) = (Fe(c), Fe(x), Fe(k));
            prop_assert_eq!(a.shift(&f, c).eval(&f, x), a.eval(&f, f.add(x, c)));
            prop_assert_eq!(a.scale_var(&f, k).eval(&f, x), a.eval(&f, f.mul(k, x)));
        }

        #[test]
        fn split_products_of_linears(rs in prop::collection::vec((0u64..256, 1usize..4), 0..6)) {
            let f = f8();
            let mut p = Poly::one();
            for &(r, e) in &rs {
                p = p.mul(&f, &Poly::linear(Fe(r)).pow(&f, e));
            }
            let got = split(&f, &p).unwrap();
            let mut rebuilt = Poly::one();
            for &(r, e) in &got {
                rebuilt = rebuilt.mul(&f, &Poly::linear(r).pow(&f, e));
            }
            prop_assert_eq!(rebuilt, p);
        }
    }
}
