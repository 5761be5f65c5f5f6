//! Seeded random data for property tests and the acceptance suite.

use rand::Rng;

use crate::gf::{Fe, Gf};
use crate::poly::Poly;
use crate::ramification::{analyze, RamData};
use crate::ratfunc::RatFunc;

/// A random rational function whose denominator splits.
pub fn random_split_ratfunc<R: Rng + ?Sized>(f: &Gf, rng: &mut R) -> RatFunc {
    let deg = rng.gen_range(0..8);
    let num = Poly::new((0..=deg).map(|_| f.random(rng)).collect());
    let mut den = Poly::one();
    for _ in 0..rng.gen_range(0..4) {
        let c = f.random(rng);
        den = den.mul(f, &Poly::linear(c).pow(f, rng.gen_range(1..5)));
    }
    RatFunc::new(f, num, den)
}

/// Shape limits for [`random_trace_zero_alpha_with`].
#[derive(Clone, Copy, Debug)]
pub struct AlphaShape {
    pub max_special_order: usize,
    pub max_orbit_order: usize,
    pub max_orbits: usize,
    /// Add h² - h for a random trace-zero h.
    pub perturb: bool,
}

impl Default for AlphaShape {
    fn default() -> Self {
        AlphaShape {
            max_special_order: 14,
            max_orbit_order: 7,
            max_orbits: 2,
            perturb: true,
        }
    }
}

/// The part of a trace-zero function supported on one ρ-orbit {ψ, ζψ, ζ²ψ}.
///
/// Coefficients a_i of (s - ζ^i ψ)^(-e) satisfy a_0 + ζ^(-e) a_1 + ζ^(-2e) a_2 = 0.
pub fn orbit_part<R: Rng + ?Sized>(f: &Gf, rng: &mut R, psi: Fe, max_order: usize) -> RatFunc {
    let mut r = RatFunc::zero();
    let top = rng.gen_range(1..=max_order);
    for e in 1..=top {
        if e < top && rng.gen_bool(0.5) {
            continue;
        }
        let a0 = f.random(rng);
        let a1 = f.random(rng);
        let ee = e as i64;
        let a2 = f.mul(f.zeta_pow(2 * ee), f.add(a0, f.mul(f.zeta_pow(-ee), a1)));
        for (i, a) in [a0, a1, a2].into_iter().enumerate() {
            let c = f.mul(psi, f.zeta_pow(i as i64));
            r = r.add(f, &RatFunc::pole_term(f, a, c, e));
        }
    }
    r
}

/// Random Σ c_e s^(±e) with e ≢ 0 mod 3.
fn special_part<R: Rng + ?Sized>(f: &Gf, rng: &mut R, sign: i64, max_order: usize) -> RatFunc {
    let mut r = RatFunc::zero();
    let top = loop {
        let t = rng.gen_range(1..=max_order);
        if t % 3 != 0 {
            break t;
        }
    };
    for e in 1..=top {
        if e % 3 == 0 || (e < top && rng.gen_bool(0.6)) {
            continue;
        }
        r = r.add(
            f,
            &RatFunc::monomial(f.random_nonzero(rng), sign * e as i64),
        );
    }
    r
}

/// A random α with Tr(α) = 0, built from special terms and full orbits.
pub fn random_trace_zero_alpha_with<R: Rng + ?Sized>(
    f: &Gf,
    rng: &mut R,
    shape: AlphaShape,
) -> RatFunc {
    loop {
        let mut a = RatFunc::zero();
        if rng.gen_bool(0.7) {
            a = a.add(f, &special_part(f, rng, 1, shape.max_special_order));
        }
        if rng.gen_bool(0.4) {
            a = a.add(f, &special_part(f, rng, -1, shape.max_special_order));
        }
        let mut used: Vec<Fe> = Vec::new();
        for _ in 0..rng.gen_range(0..=shape.max_orbits) {
            let psi = f.random_nonzero(rng);
            let orbit: Vec<Fe> = (0..3).map(|i| f.mul(psi, f.zeta_pow(i))).collect();
            if orbit.iter().any(|x| used.contains(x)) {
                continue;
            }
            used.extend(orbit);
            a = a.add(f, &orbit_part(f, rng, psi, shape.max_orbit_order));
        }
        if a.is_zero() {
            continue;
        }
        if shape.perturb && rng.gen_bool(0.5) {
            let g = random_trace_zero_alpha_with(
                f,
                rng,
                AlphaShape {
                    max_special_order: 4,
                    max_orbit_order: 2,
                    max_orbits: 1,
                    perturb: false,
                },
            );
            a = a.add(f, &g.wp(f));
        }
        return a;
    }
}

pub fn random_trace_zero_alpha<R: Rng + ?Sized>(f: &Gf, rng: &mut R) -> RatFunc {
    random_trace_zero_alpha_with(f, rng, AlphaShape::default())
}

/// Draw α until the analysis accepts it (degenerate leading terms and
/// collapsed branch loci are rejected and redrawn).
pub fn random_ram_data<R: Rng + ?Sized>(
    f: &Gf,
    rng: &mut R,
    shape: AlphaShape,
) -> (RatFunc, RamData) {
    loop {
        let a = random_trace_zero_alpha_with(f, rng, shape);
        if let Ok(d) = analyze(f, &a) {
            return (a, d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_data_has_trace_zero() {
        let f = Gf::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            assert!(random_trace_zero_alpha(&f, &mut rng).trace(&f).is_zero());
        }
    }
}
