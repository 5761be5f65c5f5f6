//! Acceptance criteria 1 to 9, one PASS/FAIL line each. All checks are exact
//! over the finite field; the only tolerance is the 10 s budget in criterion 8.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use a4diff::decomp::{
    kg_decomposition, kh_decomposition, kh_params, mu_nu, restrict_decomposition, restrict_label,
    Decomposition, KgDecomposition, KgLabel, KhDecomposition, KhLabel, ModuleLabel, Star,
};
use a4diff::families;
use a4diff::gen::{random_ram_data, AlphaShape};
use a4diff::gf::{Fe, Gf, Proj};
use a4diff::oracle::{decompose_kg, decompose_kh, hom_dim};
use a4diff::ramification::{analyze, RamData};
use a4diff::ratfunc::{Place, RatFunc};
use a4diff::report::verify;
use a4diff::zoo::{
    cd_to_ab, kg_rep, kg_sum, kh_group_matrices, kh_quiver_rep, kh_rep, kh_sum, KhCoords,
};

const END_TO_END_BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f8() -> Gf {
    Gf::new(8).unwrap()
}

fn crit1() -> Outcome {
    let f = f8();
    for n in 1..=3 {
        for x in 1..=2 {
            let d = analyze(&f, &families::example1(&f, n, x)).map_err(|e| e.to_string())?;
            let g = families::example1_golden(n, x);
            let bp = &d.special[0];
            let mn = mu_nu(bp, &d);
            let p = kh_params(bp, &mn).map_err(|e| e.to_string())?;
            let got = (
                bp.p[0],
                bp.delta,
                bp.lambda,
                p.l,
                p.a1,
                p.a2,
                (mn.mu1, mn.mu2, mn.mu3),
            );
            let want = (
                g.p_inf,
                g.delta,
                Proj::Fin(f.zeta_pow(g.lambda_zeta_power)),
                g.l,
                g.a1,
                g.a2,
                g.mu,
            );
            ensure(bp.is_infinity() && got == want, || {
                format!("n={n} x={x}: got {got:?}, want {want:?}")
            })?;
        }
    }
    Ok("n in 1..=3, x in 1..=2".into())
}

fn crit2() -> Outcome {
    let f = f8();
    for n in 1..=3i64 {
        let d = analyze(&f, &families::example2(&f, n)).map_err(|e| e.to_string())?;
        let kg = kg_decomposition(&d).map_err(|e| e.to_string())?;
        let band = KgLabel::Band {
            dim: 6 * n as u64,
            mu: Fe::ONE,
        };
        ensure(kg.mult(&band) == 1, || {
            format!("n={n}: Band(6n, 1) has multiplicity {}", kg.mult(&band))
        })?;
        let y = d.orbits[0]
            .points
            .iter()
            .find(|b| b.place == Place::Finite(Fe::ONE))
            .ok_or("no branch point at s = 1")?;
        let got = (y.m, y.big_m, y.delta);
        ensure(got == (4 * n - 3, 4 * n - 1, -1), || {
            format!("n={n}: (m, M, delta) = {got:?}")
        })?;
    }
    Ok("n in 1..=3".into())
}

fn crit3() -> Outcome {
    let f = f8();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut psis = Vec::new();
    while psis.len() < 3 {
        let p = f.random_nonzero(&mut rng);
        if families::admissible_psi(&f, p) && !psis.contains(&p) {
            psis.push(p);
        }
    }
    let (z, z2) = (f.zeta(), f.zeta_pow(2));
    for &psi in &psis {
        for n in 1..=2i64 {
            let d = analyze(&f, &families::example3(&f, n, psi)).map_err(|e| e.to_string())?;
            let y = d
                .orbits
                .iter()
                .flat_map(|o| o.points.iter())
                .find(|b| b.place == Place::Finite(psi))
                .ok_or("no branch point at s = psi")?;
            let lam = f.div(f.add(z, f.mul(z2, psi)), f.add(Fe::ONE, psi));
            ensure(
                y.lambda == Proj::Fin(lam) && y.phi == Proj::Fin(psi) && y.delta == 1,
                || {
                    format!(
                        "psi={psi} n={n}: lambda {}, phi {}, delta {}",
                        y.lambda, y.phi, y.delta
                    )
                },
            )?;
            let kg = kg_decomposition(&d).map_err(|e| e.to_string())?;
            let band = KgLabel::Band {
                dim: 6 * n as u64,
                mu: f.pow(psi, 3),
            };
            ensure(kg.mult(&band) == 1, || {
                format!("psi={psi} n={n}: band multiplicity {}", kg.mult(&band))
            })?;
        }
    }
    Ok(format!(
        "psi = {:?}",
        psis.iter().map(|p| p.0).collect::<Vec<_>>()
    ))
}

fn random_data() -> Vec<RamData> {
    let f = f8();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..100)
        .map(|_| random_ram_data(&f, &mut rng, AlphaShape::default()).1)
        .collect()
}

/// Riemann-Hurwitz for the degree-4 cover of the s-line, with the different
/// recomputed from the lower ramification breaks.
fn genus_from_breaks(d: &RamData) -> i64 {
    let total: i64 = d
        .points()
        .map(|b| 3 * (b.m + 1) + 2 * (b.big_m - b.m))
        .sum();
    (total - 6) / 2
}

fn crit4(data: &[RamData]) -> Outcome {
    for (i, d) in data.iter().enumerate() {
        let g = genus_from_breaks(d);
        let kh = kh_decomposition(d).map_err(|e| format!("draw {i}: {e}"))?;
        let kg = kg_decomposition(d).map_err(|e| format!("draw {i}: {e}"))?;
        let dims = (kh.total_dim() as i64, kg.total_dim() as i64);
        ensure(dims == (g, g) && d.genus == g, || {
            format!("draw {i}: genus {g} (pipeline {}), dims {dims:?}", d.genus)
        })?;
    }
    let max = data.iter().map(|d| d.genus).max().unwrap_or(0);
    Ok(format!(
        "{} draws over GF(2^8), max genus {max}",
        data.len()
    ))
}

fn crit5(data: &[RamData]) -> Outcome {
    for (i, d) in data.iter().enumerate() {
        let kh = kh_decomposition(d).map_err(|e| format!("draw {i}: {e}"))?;
        let kg = kg_decomposition(d).map_err(|e| format!("draw {i}: {e}"))?;
        let res = restrict_decomposition(&d.field, &kg).map_err(|e| format!("draw {i}: {e}"))?;
        ensure(res == kh, || format!("draw {i}: Res kG = {res}, kH = {kh}"))?;
    }
    Ok(format!("{} draws", data.len()))
}

fn band_params(f: &Gf) -> Vec<Fe> {
    let g = f.gen();
    vec![Fe::ONE, g, f.pow(g, 3), f.pow(g, 7)]
}

fn kg_labels(f: &Gf, max_dim: u64) -> Vec<KgLabel> {
    let mut out: Vec<KgLabel> = (0..3).map(|i| KgLabel::Simple { i }).collect();
    for dim in 2..=max_dim {
        for i in 0..3 {
            if dim % 2 == 1 {
                for x in 1..=2 {
                    out.push(KgLabel::OddString { dim, x, i });
                }
            } else {
                for star in [Star::Zero, Star::Inf] {
                    out.push(KgLabel::EvenString { dim, star, i });
                }
            }
        }
    }
    for n in 1..=max_dim / 6 {
        for mu in band_params(f) {
            out.push(KgLabel::Band { dim: 6 * n, mu });
        }
    }
    out
}

fn kh_labels(f: &Gf, max_dim: u64) -> Vec<KhLabel> {
    let mut out = vec![KhLabel::Triv];
    let mut lambdas = vec![
        Proj::Inf,
        Proj::Fin(Fe::ZERO),
        Proj::Fin(Fe::ONE),
        Proj::Fin(f.zeta()),
    ];
    lambdas.push(Proj::Fin(f.gen()));
    for dim in 2..=max_dim {
        if dim % 2 == 1 {
            for x in 1..=2 {
                out.push(KhLabel::String { dim, x });
            }
        } else {
            for &lambda in &lambdas {
                out.push(KhLabel::EvenDim { dim, lambda });
            }
        }
    }
    out
}

fn crit6() -> Outcome {
    let f = f8();
    let labels = kg_labels(&f, 30);
    let mut skipped = 0;
    for l in &labels {
        let g = kg_rep(&f, l).map_err(|e| format!("{}: {e}", l.key()))?;
        g.validate(&f).map_err(|e| format!("{}: {e}", l.key()))?;
        ensure(g.dim() as u64 == l.dim(), || {
            format!("{}: dim {}", l.key(), g.dim())
        })?;
        if let KgLabel::Band { mu, .. } = *l {
            // Res of a non-cube band splits only over GF(2^24).
            if f.cube_roots(mu).is_empty() {
                skipped += 1;
                continue;
            }
        }
        let sol = decompose_kh(&f, &g, &[]).map_err(|e| format!("Res {}: {e}", l.key()))?;
        let mut want = KhDecomposition::new();
        for h in restrict_label(&f, l).map_err(|e| e.to_string())? {
            want.add(h, 1).unwrap();
        }
        ensure(sol.multiplicities == want && sol.residual_zero, || {
            format!(
                "Res {}: oracle {}, dictionary {want}",
                l.key(),
                sol.multiplicities
            )
        })?;
    }
    let khs = kh_labels(&f, 8);
    let kgs = kg_labels(&f, 24);
    let mut pairs = 0;
    for x in &khs {
        let xr = kh_rep(&f, x).map_err(|e| e.to_string())?;
        let ind = xr.induce(&f);
        for y in &kgs {
            let yr = kg_rep(&f, y).map_err(|e| e.to_string())?;
            let res = yr.restrict();
            let hom = |a, b| hom_dim(&f, a, b).map_err(|e| e.to_string());
            let left = (hom(&ind, &yr)?, hom(&yr, &ind)?);
            let right = (hom(&xr, &res)?, hom(&res, &xr)?);
            ensure(left == right, || {
                format!(
                    "Frobenius fails for ({}, {}): {left:?} vs {right:?}",
                    x.key(),
                    y.key()
                )
            })?;
            pairs += 1;
        }
    }
    Ok(format!(
        "{} labels validated, {} restricted, {pairs} Frobenius pairs",
        labels.len(),
        labels.len() - skipped
    ))
}

fn crit7() -> Outcome {
    let f = f8();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kgs = kg_labels(&f, 24);
    let khs = kh_labels(&f, 12);
    let mut max_dim = 0;
    for t in 0..200 {
        let cap = rng.gen_range(12..=120u64);
        if t % 2 == 0 {
            let d = draw(&mut rng, &kgs, cap);
            max_dim = max_dim.max(d.total_dim());
            let rep = kg_sum(&f, &d).map_err(|e| e.to_string())?;
            let sol = decompose_kg(&f, &rep, &[]).map_err(|e| format!("trial {t} ({d}): {e}"))?;
            ensure(sol.multiplicities == d && sol.residual_zero, || {
                format!("trial {t}: recovered {}, want {d}", sol.multiplicities)
            })?;
        } else {
            let d = draw(&mut rng, &khs, cap);
            max_dim = max_dim.max(d.total_dim());
            let rep = kh_sum(&f, &d).map_err(|e| e.to_string())?;
            let sol = decompose_kh(&f, &rep, &[]).map_err(|e| format!("trial {t} ({d}): {e}"))?;
            ensure(sol.multiplicities == d && sol.residual_zero, || {
                format!("trial {t}: recovered {}, want {d}", sol.multiplicities)
            })?;
        }
    }
    Ok(format!("100 kG and 100 kH multisets, max dim {max_dim}"))
}

fn draw<L: ModuleLabel, R: Rng>(rng: &mut R, labels: &[L], cap: u64) -> Decomposition<L> {
    let mut d = Decomposition::new();
    let mut total = 0;
    loop {
        let l = &labels[rng.gen_range(0..labels.len())];
        if total + l.dim() > cap {
            if total > 0 {
                return d;
            }
            continue;
        }
        total += l.dim();
        d.add(l.clone(), 1).unwrap();
    }
}

fn crit8() -> Outcome {
    let f = f8();
    let cases = [
        ("s^5", RatFunc::monomial(Fe::ONE, 5)),
        ("example 1 (n=1, x=1)", families::example1(&f, 1, 1)),
        ("example 2 (n=1)", families::example2(&f, 1)),
    ];
    let mut times = Vec::new();
    for (name, alpha) in cases {
        let t = Instant::now();
        let d = analyze(&f, &alpha).map_err(|e| format!("{name}: {e}"))?;
        let kh: KhDecomposition = kh_decomposition(&d).map_err(|e| e.to_string())?;
        let kg: KgDecomposition = kg_decomposition(&d).map_err(|e| e.to_string())?;
        let v = verify(&d, &kh, &kg).map_err(|e| format!("{name}: {e}"))?;
        let el = t.elapsed();
        ensure(v.passed(), || format!("{name}: {}", v.json))?;
        ensure(el < END_TO_END_BUDGET, || {
            format!("{name}: {el:?} over budget")
        })?;
        times.push(format!("{name} g={} {:.2}s", d.genus, el.as_secs_f64()));
    }
    Ok(times.join(", "))
}

fn crit9() -> Outcome {
    let f = f8();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut xs: Vec<Proj> = (0..100).map(|_| Proj::Fin(f.random(&mut rng))).collect();
    xs.extend([
        Proj::Fin(Fe::ZERO),
        Proj::Fin(Fe::ONE),
        Proj::Fin(f.zeta()),
        Proj::Fin(f.zeta_pow(2)),
        Proj::Inf,
    ]);
    for &x in &xs {
        let back = f.lambda_of_phi(f.phi_of_lambda(x));
        ensure(back == x, || format!("lambda(phi({x})) = {back}"))?;
    }
    let z = f.zeta();
    let fixed = [
        (Proj::Fin(Fe::ZERO), Proj::Fin(z)),
        (Proj::Inf, Proj::Fin(f.zeta_pow(2))),
        (Proj::Fin(f.zeta_pow(2)), Proj::Fin(Fe::ZERO)),
        (Proj::Fin(Fe::ONE), Proj::Inf),
    ];
    for (phi, lambda) in fixed {
        let got = f.lambda_of_phi(phi);
        ensure(got == lambda, || {
            format!("lambda({phi}) = {got}, want {lambda}")
        })?;
        // The (C, D) module itself decomposes as the predicted (A, B) label.
        for dim in [2u64, 4] {
            let cd = KhLabel::EvenDim { dim, lambda: phi };
            let q = kh_quiver_rep(&cd, KhCoords::CD).map_err(|e| e.to_string())?;
            let g = kh_group_matrices(&f, &q).map_err(|e| e.to_string())?;
            let sol = decompose_kh(&f, &g, &[]).map_err(|e| e.to_string())?;
            let want: KhDecomposition = [(cd_to_ab(&f, &cd), 1)].into_iter().collect();
            ensure(
                sol.multiplicities == want && cd_to_ab(&f, &cd) == KhLabel::EvenDim { dim, lambda },
                || format!("N(C,D)[{dim},{phi}] decomposes as {}", sol.multiplicities),
            )?;
        }
    }
    Ok(format!(
        "{} points round-trip, 4 fixed correspondences",
        xs.len()
    ))
}

type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let data = random_data();
    let checks: Vec<Check> = vec![
        ("example 1 golden family", Box::new(crit1)),
        ("example 2 band and orbit invariants", Box::new(crit2)),
        ("example 3 orbit invariants and band", Box::new(crit3)),
        ("genus equals dimensions", Box::new(|| crit4(&data))),
        ("restriction compatibility", Box::new(|| crit5(&data))),
        ("zoo soundness", Box::new(crit6)),
        ("oracle round trip", Box::new(crit7)),
        ("end-to-end verification", Box::new(crit8)),
        ("moebius dictionary", Box::new(crit9)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in checks.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS {} {name} [{secs:.2}s]: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name} [{secs:.2}s]: {msg}", i + 1)
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
