//! Artin–Schreier reduction in k(s) and the A4 presentation conditions.
//!
//! The reduced representative is built from a full partial-fraction
//! decomposition over split poles: every even-order term c·g^(2e) is replaced by
//! sqrt(c)·g^e, and the constant term is set aside.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};
use crate::poly::Poly;
use crate::ratfunc::{Place, RatFunc, RatFuncJson};

/// f = Σ poly[e]·s^e + Σ_c Σ_e poles[c][e]·(s - c)^(-e).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialFractions {
    pub poly: BTreeMap<usize, Fe>,
    pub poles: BTreeMap<Fe, BTreeMap<usize, Fe>>,
}

fn add_term(map: &mut BTreeMap<usize, Fe>, e: usize, c: Fe) {
    let v = map.entry(e).or_insert(Fe::ZERO);
    *v = Fe(v.0 ^ c.0);
    if v.is_zero() {
        map.remove(&e);
    }
}

impl PartialFractions {
    pub fn of(f: &Gf, a: &RatFunc) -> Result<PartialFractions> {
        let (q, _) = a.num().divrem(f, a.den());
        let mut out = PartialFractions::default();
        for (i, &c) in q.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out.poly.insert(i, c);
            }
        }
        for (c, k) in a.finite_poles(f)? {
            let ch = a.laurent_at(f, Place::Finite(c), k);
            let mut terms = BTreeMap::new();
            for e in 1..=k {
                let v = ch.coeff_of(-(e as i64));
                if !v.is_zero() {
                    terms.insert(e, v);
                }
            }
            if !terms.is_empty() {
                out.poles.insert(c, terms);
            }
        }
        Ok(out)
    }

    pub fn to_ratfunc(&self, f: &Gf) -> RatFunc {
        let mut p = Poly::zero();
        for (&e, &c) in &self.poly {
            p = p.add(&Poly::monomial(c, e));
        }
        let mut r = RatFunc::from_poly(p);
        for (&c, terms) in &self.poles {
            let k = *terms.keys().next_back().unwrap();
            // Σ_e a_e (s-c)^(k-e) / (s-c)^k
            let mut num = Poly::zero();
            for (&e, &a) in terms {
                num = num.add(&Poly::linear(c).pow(f, k - e).scale(f, a));
            }
            r = r.add(f, &RatFunc::new(f, num, Poly::linear(c).pow(f, k)));
        }
        r
    }

    fn is_zero(&self) -> bool {
        self.poly.is_empty() && self.poles.is_empty()
    }
}

/// Standard form α̃ = α - (h² - h) - constant with only odd pole orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ASForm {
    pub alpha_reduced: RatFunc,
    pub h: RatFunc,
    /// The constant term removed by the reduction; α̃ + constant = α - (h² - h).
    pub constant: Fe,
    pub pole_table: BTreeMap<Place, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ASFormJson {
    pub alpha_reduced: RatFuncJson,
    pub h: RatFuncJson,
    pub constant: u64,
    pub pole_table: BTreeMap<String, usize>,
}

impl ASForm {
    pub fn to_json(&self) -> ASFormJson {
        ASFormJson {
            alpha_reduced: self.alpha_reduced.to_json(),
            h: self.h.to_json(),
            constant: self.constant.0,
            pole_table: self.pole_table.iter().map(|(p, &e)| (p.key(), e)).collect(),
        }
    }
}

/// Halve every even-order term of one pole's expansion, top order first.
fn halve(f: &Gf, terms: &mut BTreeMap<usize, Fe>, h: &mut BTreeMap<usize, Fe>) {
    let mut e = match terms.keys().next_back() {
        Some(&e) => e,
        None => return,
    };
    while e >= 2 {
        if e % 2 == 0 {
            if let Some(c) = terms.remove(&e) {
                let b = f.sqrt(c);
                add_term(terms, e / 2, b);
                add_term(h, e / 2, b);
            }
        }
        e -= 1;
    }
}

pub fn as_reduce(f: &Gf, alpha: &RatFunc) -> Result<ASForm> {
    let mut pf = PartialFractions::of(f, alpha)?;
    let mut hpf = PartialFractions::default();
    halve(f, &mut pf.poly, &mut hpf.poly);
    let constant = pf.poly.remove(&0).unwrap_or(Fe::ZERO);
    for (&c, terms) in pf.poles.iter_mut() {
        let mut h = BTreeMap::new();
        halve(f, terms, &mut h);
        if !h.is_empty() {
            hpf.poles.insert(c, h);
        }
    }
    pf.poles.retain(|_, t| !t.is_empty());
    let mut pole_table = BTreeMap::new();
    for (&c, terms) in &pf.poles {
        pole_table.insert(Place::Finite(c), *terms.keys().next_back().unwrap());
    }
    if let Some(&e) = pf.poly.keys().next_back() {
        pole_table.insert(Place::Infinity, e);
    }
    let form = ASForm {
        alpha_reduced: if pf.is_zero() {
            RatFunc::zero()
        } else {
            pf.to_ratfunc(f)
        },
        h: hpf.to_ratfunc(f),
        constant,
        pole_table,
    };
    debug_assert_eq!(
        form.alpha_reduced.add(f, &RatFunc::constant(constant)),
        alpha.sub(f, &form.h.wp(f))
    );
    Ok(form)
}

/// Reduction with a reducer of trace zero; requires Tr(α) = 0.
///
/// Every basis term s^e, (s - c)^(-e) is mapped by ρ to a scalar multiple of a
/// basis term of the same order, so the vanishing of the trace holds order by
/// order and survives halving. Hence the canonical reducer already satisfies
/// Tr(h) = Tr(h²) = 0; both are checked.
pub fn symmetrize_h(f: &Gf, alpha: &RatFunc) -> Result<ASForm> {
    if !alpha.trace(f).is_zero() {
        return Err(Error::TraceNonzero);
    }
    let form = as_reduce(f, alpha)?;
    if !form.h.trace(f).is_zero()
        || !form.h.sqr(f).trace(f).is_zero()
        || !form.alpha_reduced.trace(f).is_zero()
    {
        return Err(Error::Inconsistent(
            "reducer of a trace-zero datum has nonzero trace".into(),
        ));
    }
    Ok(form)
}

/// True iff α = ξ² - ξ + constant for some ξ in k(s).
pub fn is_as_trivial(f: &Gf, alpha: &RatFunc) -> Result<bool> {
    Ok(as_reduce(f, alpha)?.alpha_reduced.is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct A4Report {
    pub trace_zero: bool,
    pub nontrivial_alpha: bool,
    pub nontrivial_rho_alpha: bool,
    pub nontrivial_sum: bool,
    pub verdict: bool,
}

pub fn check_a4_conditions(f: &Gf, alpha: &RatFunc) -> Result<A4Report> {
    let trace_zero = alpha.trace(f).is_zero();
    let ra = alpha.rho_pullback(f, 1);
    let nontrivial_alpha = !is_as_trivial(f, alpha)?;
    let nontrivial_rho_alpha = !is_as_trivial(f, &ra)?;
    let nontrivial_sum = !is_as_trivial(f, &alpha.add(f, &ra))?;
    Ok(A4Report {
        trace_zero,
        nontrivial_alpha,
        nontrivial_rho_alpha,
        nontrivial_sum,
        verdict: trace_zero && nontrivial_alpha && nontrivial_rho_alpha && nontrivial_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_trace_zero_alpha;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f8() -> Gf {
        Gf::new(8).unwrap()
    }

    fn mono(e: i64) -> RatFunc {
        RatFunc::monomial(Fe::ONE, e)
    }

    #[test]
    fn reduce_examples() {
        let f = f8();
        let r = as_reduce(&f, &mono(2)).unwrap();
        assert_eq!((r.alpha_reduced, r.h), (mono(1), mono(1)));

        let a = mono(47).add(&f, &mono(31));
        let r = as_reduce(&f, &a).unwrap();
        assert_eq!(r.alpha_reduced, a);
        assert!(r.h.is_zero());

        let g = mono(3).add(&f, &mono(1));
        let r = as_reduce(&f, &g.wp(&f)).unwrap();
        assert!(r.alpha_reduced.is_zero());
        assert_eq!(r.h, g);
    }

    #[test]
    fn triviality() {
        let f = f8();
        assert!(is_as_trivial(&f, &mono(2).add(&f, &mono(1))).unwrap());
        assert!(!is_as_trivial(&f, &mono(47).add(&f, &mono(31))).unwrap());
        assert!(is_as_trivial(&f, &RatFunc::one()).unwrap());
    }

    #[test]
    fn a4_conditions() {
        let f = f8();
        let r = check_a4_conditions(&f, &mono(47).add(&f, &mono(31))).unwrap();
        assert!(r.verdict);
        let r = check_a4_conditions(&f, &mono(3)).unwrap();
        assert!(!r.trace_zero && !r.verdict);
        assert_eq!(mono(3).trace(&f), mono(3));
        let r = check_a4_conditions(&f, &mono(2).add(&f, &mono(1))).unwrap();
        assert!(!r.nontrivial_alpha && !r.verdict);
    }

    #[test]
    fn symmetrize_rejects_nonzero_trace() {
        let f = f8();
        assert_eq!(symmetrize_h(&f, &mono(6)), Err(Error::TraceNonzero));
    }

    #[test]
    fn reduction_canonical_under_trace_zero_shift() {
        let f = f8();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_trace_zero_alpha(&f, &mut rng);
            let g = random_trace_zero_alpha(&f, &mut rng);
            let base = symmetrize_h(&f, &a).unwrap();
            let shifted = symmetrize_h(&f, &a.add(&f, &g.wp(&f))).unwrap();
            assert_eq!(base.alpha_reduced, shifted.alpha_reduced);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn reduction_round_trips(seed in any::<u64>()) {
            let f = f8();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = crate::gen::random_split_ratfunc(&f, &mut rng);
            let r = as_reduce(&f, &a).unwrap();
            prop_assert_eq!(r.alpha_reduced.add(&f, &RatFunc::constant(r.constant)).add(&f, &r.h.wp(&f)), a);
            for &e in r.pole_table.values() {
                prop_assert_eq!(e % 2, 1);
            }
            let again = as_reduce(&f, &r.alpha_reduced).unwrap();
            prop_assert!(again.h.is_zero());
            prop_assert_eq!(again.alpha_reduced, r.alpha_reduced);
        }

        #[test]
        fn symmetrized_forms_are_orbit_unions(seed in any::<u64>()) {
            let f = f8();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_trace_zero_alpha(&f, &mut rng);
            let r = symmetrize_h(&f, &a).unwrap();
            prop_assert!(r.h.trace(&f).is_zero());
            prop_assert!(r.alpha_reduced.trace(&f).is_zero());
            let rho = as_reduce(&f, &r.alpha_reduced.rho_pullback(&f, 1)).unwrap();
            prop_assert!(rho.h.is_zero());
            let locus: Vec<Place> = r.pole_table.keys().chain(rho.pole_table.keys()).copied().collect();
            for (&p, &e) in r.pole_table.iter().chain(rho.pole_table.iter()) {
                match p {
                    Place::Infinity | Place::Finite(Fe(0)) => prop_assert!(e % 3 != 0),
                    Place::Finite(c) => {
                        for k in 1..3 {
                            let q = Place::Finite(f.mul(c, f.zeta_pow(k)));
                            prop_assert!(locus.contains(&q));
                        }
                    }
                }
            }
        }
    }
}
