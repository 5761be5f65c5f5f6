//! Branch locus, per-point ramification invariants and the genus.
//!
//! The input is a trace-zero reduced α̃. Its ρ-translates ρα̃ and ρ²α̃ = α̃ + ρα̃
//! are reduced as well, so all three pole orders can be read off directly.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::artin_schreier::{symmetrize_h, ASForm};
use crate::error::{Error, Result};
use crate::gf::{Fe, Gf, Proj};
use crate::ratfunc::{Place, RatFunc};

/// Which of α̃, ρα̃, ρ²α̃ realizes the smaller pole order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// m = M.
    Equal,
    /// α̃ has order -m; λ = ∞.
    SmallAlpha,
    /// ρα̃ has order -m; λ = 0.
    SmallRho,
    /// ρ²α̃ has order -m; λ = 1.
    SmallRho2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchPoint {
    #[serde(serialize_with = "ser_place")]
    pub place: Place,
    /// Pole orders of α̃, ρα̃, ρ²α̃.
    pub p: [i64; 3],
    pub m: i64,
    #[serde(rename = "M")]
    pub big_m: i64,
    pub case: Case,
    pub lambda: Proj,
    pub delta: i64,
    pub epsilon: Option<i64>,
    /// θ_{y,0..=⌊m/4⌋}.
    #[serde(serialize_with = "ser_fes")]
    pub theta: Vec<Fe>,
    pub phi: Proj,
    pub different: i64,
    pub jumps: (i64, Option<i64>),
}

impl BranchPoint {
    pub fn nu(&self) -> i64 {
        (self.big_m - self.m) / 2
    }

    pub fn is_infinity(&self) -> bool {
        self.place == Place::Infinity
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitClass {
    Zeta,
    ZetaSq,
    Generic,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbit {
    #[serde(serialize_with = "ser_fe")]
    pub psi: Fe,
    /// The points s = ψ, ζψ, ζ²ψ.
    pub points: [BranchPoint; 3],
    pub lambda: Proj,
    pub phi: Proj,
    pub klass: OrbitClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamData {
    pub field: Gf,
    /// Reduced α̃ in the working coordinate.
    pub alpha: RatFunc,
    /// The coordinate was replaced by 1/s so that ∞ is a branch point.
    pub inverted: bool,
    /// Branch points at ∞ then 0.
    pub special: Vec<BranchPoint>,
    pub orbits: Vec<Orbit>,
    pub genus: i64,
}

impl RamData {
    pub fn r(&self) -> usize {
        self.special.len()
    }

    /// All branch points: special first, then orbit points.
    pub fn points(&self) -> impl Iterator<Item = &BranchPoint> {
        self.special
            .iter()
            .chain(self.orbits.iter().flat_map(|o| o.points.iter()))
    }

    pub fn is_hkg(&self) -> bool {
        self.orbits.is_empty() && self.special.len() == 1 && self.special[0].is_infinity()
    }
}

fn ser_place<S: serde::Serializer>(p: &Place, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.key())
}

fn ser_fe<S: serde::Serializer>(a: &Fe, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(a.0)
}

fn ser_fes<S: serde::Serializer>(v: &[Fe], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|a| a.0))
}

/// Solve β_{2i} + Σ_{i1+i2=i} α_{2i1} θ_{i2}² = 0 for θ_0..θ_n.
///
/// `alpha` and `beta` are coefficient lists of α_y·π^m and β_y·π^M.
pub fn theta_recursion(f: &Gf, alpha: &[Fe], beta: &[Fe], n: usize) -> Result<Vec<Fe>> {
    let get = |v: &[Fe], i: usize| v.get(i).copied().unwrap_or(Fe::ZERO);
    let a0 = get(alpha, 0);
    if a0.is_zero() {
        return Err(Error::DegenerateLeading {
            place: String::new(),
            detail: "alpha_{y,0} = 0".into(),
        });
    }
    let mut theta: Vec<Fe> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut rhs = get(beta, 2 * i);
        for i1 in 1..=i {
            rhs = f.add(rhs, f.mul(get(alpha, 2 * i1), f.sqr(theta[i - i1])));
        }
        theta.push(f.sqrt(f.div(rhs, a0)));
    }
    Ok(theta)
}

/// λ and δ from the case and the θ-coefficients.
pub fn lambda_delta(case: Case, m: i64, theta: &[Fe]) -> (Proj, i64) {
    match case {
        Case::Equal => {
            let lim = (m / 4) as usize;
            let delta = (1..=lim.min(theta.len().saturating_sub(1)))
                .find(|&i| !theta[i].is_zero())
                .unwrap_or(0);
            (Proj::Fin(theta[0]), delta as i64)
        }
        Case::SmallAlpha => (Proj::Inf, -1),
        Case::SmallRho => (Proj::Fin(Fe::ZERO), -1),
        Case::SmallRho2 => (Proj::Fin(Fe::ONE), -1),
    }
}

/// d = 3(m+1) + 2(M-m); jumps m and m + 2(M-m).
pub fn different_and_jumps(m: i64, big_m: i64) -> (i64, (i64, Option<i64>)) {
    let d = 3 * (m + 1) + 2 * (big_m - m);
    let second = if big_m > m {
        Some(m + 2 * (big_m - m))
    } else {
        None
    };
    (d, (m, second))
}

/// genus = -3 + Σd/2.
pub fn genus_from_differents(ds: impl IntoIterator<Item = i64>) -> Result<i64> {
    let total: i64 = ds.into_iter().sum();
    if total % 2 != 0 {
        return Err(Error::Inconsistent(format!("odd total different {total}")));
    }
    let g = -3 + total / 2;
    if g < 0 {
        return Err(Error::NegativeGenus(g));
    }
    Ok(g)
}

fn neg_ord(f: &Gf, g: &RatFunc, y: Place) -> i64 {
    g.ord_at(f, y).map(|o| -o).unwrap_or(i64::MIN)
}

fn analyze_point(f: &Gf, fns: &[RatFunc; 3], y: Place) -> Result<BranchPoint> {
    let p = [
        neg_ord(f, &fns[0], y),
        neg_ord(f, &fns[1], y),
        neg_ord(f, &fns[2], y),
    ];
    if p.iter().any(|&x| x <= 0) {
        return Err(Error::NotTotallyRamified {
            place: y.key(),
            orders: p,
        });
    }
    let m = *p.iter().min().unwrap();
    let big_m = *p.iter().max().unwrap();
    let case = if m == big_m {
        Case::Equal
    } else if p[0] == m {
        Case::SmallAlpha
    } else if p[1] == m {
        Case::SmallRho
    } else {
        Case::SmallRho2
    };
    let repeated = p.iter().filter(|&&x| x == big_m).count() >= 2;
    if m % 2 == 0 || big_m % 2 == 0 || !repeated {
        return Err(Error::Inconsistent(format!(
            "pole orders {p:?} at {y} are not of the form (m, M, M) with m, M odd"
        )));
    }
    let (ay, by) = match case {
        Case::Equal | Case::SmallAlpha => (&fns[0], &fns[1]),
        Case::SmallRho => (&fns[1], &fns[0]),
        Case::SmallRho2 => (&fns[2], &fns[1]),
    };
    let n = (m / 4) as usize;
    let ach = ay.laurent_at(f, y, 2 * n + 1);
    let bch = by.laurent_at(f, y, 2 * n + 1);
    debug_assert_eq!((ach.ord, bch.ord), (-m, -big_m));
    let theta = theta_recursion(f, &ach.coeffs, &bch.coeffs, n).map_err(|e| match e {
        Error::DegenerateLeading { detail, .. } => Error::DegenerateLeading {
            place: y.key(),
            detail,
        },
        e => e,
    })?;
    if case == Case::Equal && (theta[0].is_zero() || theta[0] == Fe::ONE) {
        return Err(Error::DegenerateLeading {
            place: y.key(),
            detail: format!("theta_{{y,0}} = {} lies in {{0, 1}}", theta[0]),
        });
    }
    let (lambda, delta) = lambda_delta(case, m, &theta);
    let epsilon = match y {
        Place::Infinity => Some(-1),
        Place::Finite(c) if c.is_zero() => Some(1),
        _ => None,
    };
    if let Some(eps) = epsilon {
        if lambda != Proj::Fin(f.zeta_pow(eps * m)) {
            return Err(Error::Inconsistent(format!(
                "lambda at {y} is {lambda}, expected zeta^(epsilon p)"
            )));
        }
    }
    let (different, jumps) = different_and_jumps(m, big_m);
    Ok(BranchPoint {
        place: y,
        p,
        m,
        big_m,
        case,
        lambda,
        delta,
        epsilon,
        theta,
        phi: f.phi_of_lambda(lambda),
        different,
        jumps,
    })
}

fn classify(f: &Gf, lambda: Proj) -> OrbitClass {
    match lambda {
        Proj::Fin(l) if l == f.zeta() => OrbitClass::Zeta,
        Proj::Fin(l) if l == f.zeta_pow(2) => OrbitClass::ZetaSq,
        Proj::Fin(l) if !l.is_zero() && l != Fe::ONE => OrbitClass::Generic,
        _ => OrbitClass::Degenerate,
    }
}

fn branch_places(f: &Gf, fns: &[RatFunc; 3]) -> Result<BTreeSet<Place>> {
    let mut set = BTreeSet::new();
    for g in fns {
        for (p, _) in g.poles(f)? {
            set.insert(p);
        }
    }
    Ok(set)
}

/// Organize the branch locus of a trace-zero reduced form.
pub fn analyze_branch_data(f: &Gf, form: &ASForm) -> Result<RamData> {
    let mut alpha = form.alpha_reduced.clone();
    if alpha.is_zero() {
        return Err(Error::TrivialAlpha {
            which: "alpha".into(),
        });
    }
    let mut inverted = false;
    let triple = |a: &RatFunc| -> [RatFunc; 3] {
        let r = a.rho_pullback(f, 1);
        [a.clone(), r.clone(), a.add(f, &r)]
    };
    let mut fns = triple(&alpha);
    for (g, name) in fns.iter().zip(["alpha", "rho alpha", "alpha + rho alpha"]) {
        if g.is_zero() {
            return Err(Error::TrivialAlpha { which: name.into() });
        }
    }
    let mut places = branch_places(f, &fns)?;
    if places.is_empty() {
        return Err(Error::EmptyBranchLocus);
    }
    if places.contains(&Place::Finite(Fe::ZERO)) && !places.contains(&Place::Infinity) {
        inverted = true;
        alpha = symmetrize_h(f, &alpha.invert_s(f))?.alpha_reduced;
        fns = triple(&alpha);
        places = branch_places(f, &fns)?;
    }

    let mut special = Vec::new();
    for y in [Place::Infinity, Place::Finite(Fe::ZERO)] {
        if places.contains(&y) {
            special.push(analyze_point(f, &fns, y)?);
        }
    }

    let mut orbits = Vec::new();
    let mut seen = BTreeSet::new();
    for &y in &places {
        let c = match y {
            Place::Finite(c) if !c.is_zero() => c,
            _ => continue,
        };
        if seen.contains(&c) {
            continue;
        }
        let members: Vec<Fe> = (0..3).map(|i| f.mul(c, f.zeta_pow(i))).collect();
        let psi = *members.iter().min().unwrap();
        let pts: Vec<Fe> = (0..3).map(|i| f.mul(psi, f.zeta_pow(i))).collect();
        for &q in &pts {
            seen.insert(q);
            if !places.contains(&Place::Finite(q)) {
                return Err(Error::Inconsistent(format!(
                    "branch locus is not a union of rho-orbits: {q} missing"
                )));
            }
        }
        let points: Vec<BranchPoint> = pts
            .iter()
            .map(|&q| analyze_point(f, &fns, Place::Finite(q)))
            .collect::<Result<_>>()?;
        let points: [BranchPoint; 3] = points.try_into().unwrap();
        if points
            .iter()
            .any(|b| b.m != points[0].m || b.big_m != points[0].big_m)
        {
            return Err(Error::Inconsistent(format!(
                "orbit of {psi} has unequal (m, M)"
            )));
        }
        let lambda = points[0].lambda;
        orbits.push(Orbit {
            psi,
            lambda,
            phi: f.phi_of_lambda(lambda),
            klass: classify(f, lambda),
            points,
        });
    }
    orbits.sort_by_key(|o| (o.klass, o.psi));

    let mut data = RamData {
        field: *f,
        alpha,
        inverted,
        special,
        orbits,
        genus: 0,
    };
    data.genus = genus_from_differents(data.points().map(|b| b.different))?;
    Ok(data)
}

/// Full pipeline from an arbitrary trace-zero α.
pub fn analyze(f: &Gf, alpha: &RatFunc) -> Result<RamData> {
    let form = symmetrize_h(f, alpha)?;
    analyze_branch_data(f, &form)
}
