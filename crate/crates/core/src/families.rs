//! The three worked families of A4 covers, plus their closed-form invariants.

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// α = s^((32n - 2r + 4)x - 3)(s^(16x) + 1) with r = n mod 3.
pub fn example1(f: &Gf, n: i64, x: i64) -> RatFunc {
    let r = n % 3;
    let e = (32 * n - 2 * r + 4) * x - 3;
    RatFunc::monomial(Fe::ONE, e).mul(
        f,
        &RatFunc::monomial(Fe::ONE, 16 * x).add(f, &RatFunc::one()),
    )
}

/// α = ζ s^(12n+2) / ((s-1)^(4n-1) (s-ζ)^(4n-3) (s-ζ²)^(4n-1)).
pub fn example2(f: &Gf, n: i64) -> RatFunc {
    let z = f.zeta();
    let den = Poly::linear(Fe::ONE)
        .pow(f, (4 * n - 1) as usize)
        .mul(f, &Poly::linear(z).pow(f, (4 * n - 3) as usize))
        .mul(f, &Poly::linear(f.zeta_pow(2)).pow(f, (4 * n - 1) as usize));
    RatFunc::new(f, Poly::monomial(z, (12 * n + 2) as usize), den)
}

/// α = ψ^(3(4n+1)) s^(12n+2) (s² + 1) / (s³ - ψ³)^(4n+1).
pub fn example3(f: &Gf, n: i64, psi: Fe) -> RatFunc {
    let mu = f.pow(psi, 3);
    let c = f.pow(mu, (4 * n + 1) as u64);
    let num = Poly::monomial(c, (12 * n + 2) as usize)
        .mul(f, &Poly::new(vec![Fe::ONE, Fe::ZERO, Fe::ONE]));
    let den = Poly::new(vec![mu, Fe::ZERO, Fe::ZERO, Fe::ONE]).pow(f, (4 * n + 1) as usize);
    RatFunc::new(f, num, den)
}

/// ψ is admissible for the third family when ψ ∉ {0, 1, ζ, ζ²}.
pub fn admissible_psi(f: &Gf, psi: Fe) -> bool {
    !psi.is_zero() && f.pow(psi, 3) != Fe::ONE
}

/// Smallest admissible cube root of μ, enlarging the field when μ has none.
///
/// Returns the field, μ transported into it, and ψ. Enlargement goes from
/// GF(2^m) to GF(2^(3m)) by re-embedding μ through a root of the old modulus.
pub fn psi_from_mu(f: &Gf, mu: Fe) -> Result<(Gf, Fe, Fe)> {
    if mu.is_zero() || mu == Fe::ONE {
        return Err(Error::RootNotInField(format!(
            "mu = {mu} must lie in k^x - {{1}}"
        )));
    }
    if let Some(&psi) = f.cube_roots(mu).iter().find(|&&p| admissible_psi(f, p)) {
        return Ok((*f, mu, psi));
    }
    let big = Gf::new(3 * f.m()).map_err(|_| {
        Error::RootNotInField(format!(
            "mu = {mu} has no cube root in GF(2^{}) and GF(2^{}) is too large",
            f.m(),
            3 * f.m()
        ))
    })?;
    let mu_big = embed(f, &big, mu);
    let psi = *big
        .cube_roots(mu_big)
        .iter()
        .find(|&&p| admissible_psi(&big, p))
        .ok_or_else(|| Error::RootNotInField(format!("no admissible cube root of {mu}")))?;
    Ok((big, mu_big, psi))
}

/// Image of `a` under the embedding of `small` into `big` sending x to the
/// smallest root of the small modulus in `big`.
pub fn embed(small: &Gf, big: &Gf, a: Fe) -> Fe {
    let modulus = Poly::new(
        (0..=small.m())
            .map(|i| Fe((small.modulus() >> i) & 1))
            .collect(),
    );
    let g = crate::poly::distinct_roots(big, &modulus)[0];
    let mut acc = Fe::ZERO;
    let mut pw = Fe::ONE;
    for i in 0..small.m() {
        if (a.0 >> i) & 1 == 1 {
            acc = big.add(acc, pw);
        }
        pw = big.mul(pw, g);
    }
    acc
}

/// Closed-form values for the first family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Example1Golden {
    pub p_inf: i64,
    pub delta: i64,
    /// λ = ζ^x.
    pub lambda_zeta_power: i64,
    pub mu: (i64, i64, i64),
    pub l: i64,
    pub a1: i64,
    pub a2: i64,
}

fn ceil_half(a: i64) -> i64 {
    (a + 1).div_euclid(2)
}

pub fn example1_golden(n: i64, x: i64) -> Example1Golden {
    let r = n % 3;
    Example1Golden {
        p_inf: (32 * n - 2 * r + 20) * x - 3,
        delta: 8 * x,
        lambda_zeta_power: x,
        mu: (
            (8 * n + 5) * x - ceil_half(r * x),
            (16 * n + 10 - r) * x - 1,
            (24 * n + 15 - r) * x - 1 - ceil_half(r * x + 1),
        ),
        l: n + 1,
        a1: (5 - r) * x - 1 + ceil_half(r * x),
        a2: (3 + r) * x + 1 - ceil_half(r * x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_alphas_have_trace_zero() {
        let f = Gf::new(8).unwrap();
        for n in 1..=3 {
            for x in 1..=2 {
                assert!(example1(&f, n, x).trace(&f).is_zero());
            }
            assert!(example2(&f, n).trace(&f).is_zero());
            assert!(example3(&f, n, Fe(0x35)).trace(&f).is_zero());
        }
    }

    #[test]
    fn example1_rho_matches_closed_form() {
        let f = Gf::new(8).unwrap();
        for (n, x) in [(1, 1), (2, 2)] {
            let r = n % 3;
            let z2x = f.zeta_pow(2 * x);
            let want = RatFunc::monomial(z2x, (32 * n - 2 * r + 4) * x - 3).mul(
                &f,
                &RatFunc::monomial(Fe::ONE, 16 * x).add(&f, &RatFunc::constant(z2x)),
            );
            assert_eq!(example1(&f, n, x).rho_pullback(&f, 1), want);
        }
    }

    #[test]
    fn example2_alternative_form() {
        let f = Gf::new(8).unwrap();
        let n = 2;
        let z = f.zeta();
        let num = Poly::monomial(z, 12 * n + 2)
            .mul(&f, &Poly::new(vec![f.zeta_pow(2), Fe::ZERO, Fe::ONE]));
        let den = Poly::new(vec![Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ONE]).pow(&f, 4 * n - 1);
        assert_eq!(example2(&f, n as i64), RatFunc::new(&f, num, den));
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = Gf::new(2).unwrap();
        let big = Gf::new(6).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(
                    embed(&small, &big, small.mul(a, b)),
                    big.mul(embed(&small, &big, a), embed(&small, &big, b))
                );
            }
        }
        let z = embed(&small, &big, small.zeta());
        assert!(z != Fe::ONE && big.pow(z, 3) == Fe::ONE);
    }

    #[test]
    fn mu_without_cube_root_enlarges_field() {
        let f = Gf::new(2).unwrap();
        // In GF(4) every nonzero element is a cube root of unity, so ζ has no cube root.
        let (big, mu, psi) = psi_from_mu(&f, f.zeta()).unwrap();
        assert_eq!(big.m(), 6);
        assert_eq!(big.pow(psi, 3), mu);
        assert!(admissible_psi(&big, psi));
    }
}
