//! Closed-form kH- and kG-decompositions of the holomorphic differentials.
//!
//! H = ⟨σ, τ⟩ is the Klein four subgroup and G = H ⋊ ⟨ρ⟩ ≅ A4.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf, Proj};
use crate::ramification::{BranchPoint, OrbitClass, RamData};

/// Per-point bookkeeping: μ_{y,1..3}, ν_y, a(y), b(y), k_y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MuNu {
    pub mu1: i64,
    pub mu2: i64,
    pub mu3: i64,
    pub nu: i64,
    pub a_y: i64,
    pub b_y: i64,
    pub k_y: i64,
}

impl MuNu {
    pub fn from_orders(m: i64, big_m: i64, at_infinity: bool, a_y: i64, b_y: i64) -> MuNu {
        MuNu {
            mu1: (m + 3).div_euclid(4),
            mu2: (2 * m + 3).div_euclid(4),
            mu3: (3 * m + 3).div_euclid(4),
            nu: (big_m - m) / 2,
            a_y,
            b_y,
            k_y: if at_infinity { -2 } else { 0 },
        }
    }
}

/// The first orbit point y_1, used when there are no special branch points.
fn y1(data: &RamData) -> Option<&BranchPoint> {
    data.orbits.first().map(|o| &o.points[0])
}

pub fn mu_nu(bp: &BranchPoint, data: &RamData) -> MuNu {
    let r = data.r();
    let is_y1 = y1(data).is_some_and(|p| p.place == bp.place);
    let a_y = if r >= 1 && bp.is_infinity() {
        0
    } else if r == 0 && is_y1 {
        2
    } else {
        1
    };
    let b_y = i64::from(r == 0 && !is_y1);
    MuNu::from_orders(bp.m, bp.big_m, bp.is_infinity(), a_y, b_y)
}

/// True when the basis bookkeeping uses the r = 0 special cases for a(y), b(y).
///
/// Multiplicities depend only on a(y); this flag marks data where b(y) = 1
/// shifts basis indices away from a(y).
pub fn basis_divergence(data: &RamData) -> bool {
    data.r() == 0 && !data.orbits.is_empty()
}

/// (l, a₁, a₂) for one branch point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KhParams {
    pub l: i64,
    pub a1: i64,
    pub a2: i64,
}

pub fn kh_params(bp: &BranchPoint, mn: &MuNu) -> Result<KhParams> {
    let gap = mn.mu2 - mn.mu1;
    let bad = |what: &str| {
        Error::Inconsistent(format!(
            "no (l, a1) for {what} at {} (mu = ({}, {}, {}), delta = {})",
            bp.place, mn.mu1, mn.mu2, mn.mu3, bp.delta
        ))
    };
    match bp.delta {
        0 => Ok(KhParams {
            l: 1,
            a1: gap,
            a2: 0,
        }),
        d if d >= 1 => {
            // gap = (l-1)δ + a₁ with 1 ≤ a₁ ≤ δ.
            if gap < 1 {
                return Err(bad("delta >= 1"));
            }
            let l = (gap - 1).div_euclid(d) + 1;
            let a1 = gap - (l - 1) * d;
            Ok(KhParams { l, a1, a2: d - a1 })
        }
        -1 => {
            let nu = mn.nu;
            let lhs = gap + nu;
            if nu < 1 || lhs < 1 {
                return Err(bad("delta = -1"));
            }
            let l = (lhs - 1).div_euclid(nu) + 1;
            let a1 = lhs - (l - 1) * nu;
            Ok(KhParams { l, a1, a2: nu - a1 })
        }
        _ => Err(bad("delta < -1")),
    }
}

/// ∗ ∈ {0, ∞} for the even-dimensional string modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Star {
    Zero,
    Inf,
}

impl fmt::Display for Star {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Star::Zero => write!(f, "0"),
            Star::Inf => write!(f, "inf"),
        }
    }
}

/// Common interface of kH and kG module labels.
pub trait ModuleLabel: Clone + Ord + fmt::Debug {
    const SIDE: &'static str;
    fn dim(&self) -> u64;
    fn key(&self) -> String;
    fn params(&self) -> Value;
}

/// Indecomposable kH-modules used here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KhLabel {
    Triv,
    /// M_{2n+1,x}; `dim` = 2n+1.
    String {
        dim: u64,
        x: u8,
    },
    /// N_{2n,λ}; `dim` = 2n.
    EvenDim {
        dim: u64,
        lambda: Proj,
    },
}

impl ModuleLabel for KhLabel {
    const SIDE: &'static str = "kH";

    fn dim(&self) -> u64 {
        match *self {
            KhLabel::Triv => 1,
            KhLabel::String { dim, .. } | KhLabel::EvenDim { dim, .. } => dim,
        }
    }

    fn key(&self) -> String {
        match *self {
            KhLabel::Triv => "k".into(),
            KhLabel::String { dim, x } => format!("M[2n+1={dim},x={x}]"),
            KhLabel::EvenDim { dim, lambda } => format!("N[2n={dim},lambda={}]", lambda.key()),
        }
    }

    fn params(&self) -> Value {
        match *self {
            KhLabel::Triv => json!({}),
            KhLabel::String { dim, x } => json!({"dim": dim, "x": x}),
            KhLabel::EvenDim { dim, lambda } => json!({"dim": dim, "lambda": lambda}),
        }
    }
}

/// Indecomposable kG-modules used here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KgLabel {
    /// S_i.
    Simple { i: u8 },
    /// M_{2n+1,x,i}.
    OddString { dim: u64, x: u8, i: u8 },
    /// N_{2n,∗,i}.
    EvenString { dim: u64, star: Star, i: u8 },
    /// B_{6n,μ}.
    Band { dim: u64, mu: Fe },
}

impl ModuleLabel for KgLabel {
    const SIDE: &'static str = "kG";

    fn dim(&self) -> u64 {
        match *self {
            KgLabel::Simple { .. } => 1,
            KgLabel::OddString { dim, .. }
            | KgLabel::EvenString { dim, .. }
            | KgLabel::Band { dim, .. } => dim,
        }
    }

    fn key(&self) -> String {
        match *self {
            KgLabel::Simple { i } => format!("S[i={i}]"),
            KgLabel::OddString { dim, x, i } => format!("M[2n+1={dim},x={x},i={i}]"),
            KgLabel::EvenString { dim, star, i } => format!("N[2n={dim},*={star},i={i}]"),
            KgLabel::Band { dim, mu } => format!("B[6n={dim},mu={}]", mu.0),
        }
    }

    fn params(&self) -> Value {
        match *self {
            KgLabel::Simple { i } => json!({"i": i}),
            KgLabel::OddString { dim, x, i } => json!({"dim": dim, "x": x, "i": i}),
            KgLabel::EvenString { dim, star, i } => {
                json!({"dim": dim, "star": star.to_string(), "i": i})
            }
            KgLabel::Band { dim, mu } => json!({"dim": dim, "mu": mu.0}),
        }
    }
}

/// A multiset of indecomposables with positive multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition<L: ModuleLabel> {
    entries: BTreeMap<L, u64>,
}

impl<L: ModuleLabel> Default for Decomposition<L> {
    fn default() -> Self {
        Decomposition {
            entries: BTreeMap::new(),
        }
    }
}

pub type KhDecomposition = Decomposition<KhLabel>;
pub type KgDecomposition = Decomposition<KgLabel>;

impl<L: ModuleLabel> Decomposition<L> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `mult` copies; zero multiplicities and zero-dimensional labels are dropped.
    pub fn add(&mut self, label: L, mult: i64) -> Result<()> {
        if mult < 0 {
            return Err(Error::Inconsistent(format!(
                "negative multiplicity {mult} for {}",
                label.key()
            )));
        }
        if mult > 0 && label.dim() > 0 {
            *self.entries.entry(label).or_insert(0) += mult as u64;
        }
        Ok(())
    }

    pub fn entries(&self) -> &BTreeMap<L, u64> {
        &self.entries
    }

    pub fn mult(&self, label: &L) -> u64 {
        self.entries.get(label).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> u64 {
        self.entries.iter().map(|(l, m)| l.dim() * m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn merge(&mut self, other: &Self) {
        for (l, m) in &other.entries {
            *self.entries.entry(l.clone()).or_insert(0) += m;
        }
    }

    pub fn to_json(&self) -> Value {
        let list: Vec<Value> = self
            .entries
            .iter()
            .map(|(l, m)| json!({"label": l.key(), "params": l.params(), "mult": m}))
            .collect();
        json!({"side": L::SIDE, "total_dim": self.total_dim(), "entries": list})
    }
}

impl<L: ModuleLabel> fmt::Display for Decomposition<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(l, m)| {
                if *m == 1 {
                    l.key()
                } else {
                    format!("{}^{m}", l.key())
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<L: ModuleLabel> FromIterator<(L, u64)> for Decomposition<L> {
    fn from_iter<T: IntoIterator<Item = (L, u64)>>(iter: T) -> Self {
        let mut d = Decomposition::new();
        for (l, m) in iter {
            if m > 0 && l.dim() > 0 {
                *d.entries.entry(l).or_insert(0) += m;
            }
        }
        d
    }
}

fn m31() -> KhLabel {
    KhLabel::String { dim: 3, x: 1 }
}

fn even_pair_kh(out: &mut KhDecomposition, p: &KhParams, lambda: Proj) -> Result<()> {
    out.add(
        KhLabel::EvenDim {
            dim: 2 * p.l as u64,
            lambda,
        },
        p.a1,
    )?;
    if p.l >= 2 {
        out.add(
            KhLabel::EvenDim {
                dim: 2 * (p.l - 1) as u64,
                lambda,
            },
            p.a2,
        )?;
    }
    Ok(())
}

/// kH-decomposition: N_{2l,λ}^{a₁} ⊕ N_{2(l-1),λ}^{a₂} per point, M_{3,1}^b, k^c.
pub fn kh_decomposition(data: &RamData) -> Result<KhDecomposition> {
    let mut out = KhDecomposition::new();
    let mut b = -1;
    let mut c = 0;
    for bp in data.points() {
        let mn = mu_nu(bp, data);
        let p = kh_params(bp, &mn)?;
        even_pair_kh(&mut out, &p, bp.lambda)?;
        b += mn.mu1;
        c += mn.mu3 - mn.mu2;
    }
    out.add(m31(), b)?;
    out.add(KhLabel::Triv, c)?;
    check_dim(&out, data)?;
    Ok(out)
}

fn check_dim<L: ModuleLabel>(d: &Decomposition<L>, data: &RamData) -> Result<()> {
    if d.total_dim() as i64 != data.genus {
        return Err(Error::Inconsistent(format!(
            "{} decomposition has dimension {} but genus is {}",
            L::SIDE,
            d.total_dim(),
            data.genus
        )));
    }
    Ok(())
}

/// n = 3q + r with 0 ≤ r < 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QR {
    pub q: i64,
    pub r: i64,
}

fn euclid3(n: i64, what: &str) -> Result<QR> {
    if n < 0 {
        return Err(Error::Inconsistent(format!("{what} = {n} is negative")));
    }
    Ok(QR {
        q: n.div_euclid(3),
        r: n.rem_euclid(3),
    })
}

fn congruent(i: i64, c: i64) -> bool {
    (i - c).rem_euclid(3) == 0
}

/// q + 1 if (r ≠ 0 and i ≡ c1) or (r = 2 and i ≡ c2) mod 3; q otherwise.
fn case_mult(qr: QR, i: i64, c1: i64, c2: i64) -> i64 {
    if (qr.r != 0 && congruent(i, c1)) || (qr.r == 2 && congruent(i, c2)) {
        qr.q + 1
    } else {
        qr.q
    }
}

fn by_index(qr: QR, c1: i64, c2: i64) -> [i64; 3] {
    [0, 1, 2].map(|i| case_mult(qr, i, c1, c2))
}

/// δ(r, i) = 1 iff (r, i) = (0, 0).
fn delta_ri(r: i64, i: i64) -> i64 {
    i64::from(r == 0 && i == 0)
}

/// Intermediate quantities for one special point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialTerms {
    pub place: String,
    pub mu_nu: MuNu,
    pub epsilon: i64,
    pub kh: KhParams,
    pub star: Star,
    pub qr1: QR,
    pub qr2: QR,
    pub qr31: QR,
    pub qr32: QR,
    pub b_y: [i64; 3],
    pub c_y: [i64; 3],
    pub a_y1: [i64; 3],
    pub a_y2: [i64; 3],
}

/// Intermediate quantities for one ρ-orbit (read at y_j = ψ_j).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitTerms {
    pub psi: u64,
    pub klass: OrbitClass,
    pub mu_nu: MuNu,
    pub kh: KhParams,
    pub phi: Proj,
}

/// Per-point counts for the kG decomposition, before assembling labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KgTerms {
    pub r: i64,
    pub special: Vec<SpecialTerms>,
    pub orbits: Vec<OrbitTerms>,
    pub b: [i64; 3],
    pub c: [i64; 3],
}

fn star_of(f: &Gf, lambda: Proj) -> Result<Star> {
    if lambda == Proj::Fin(f.zeta()) {
        Ok(Star::Zero)
    } else if lambda == Proj::Fin(f.zeta_pow(2)) {
        Ok(Star::Inf)
    } else {
        Err(Error::Inconsistent(format!(
            "special point has lambda = {lambda}, expected zeta or zeta^2"
        )))
    }
}

pub fn kg_terms(data: &RamData) -> Result<KgTerms> {
    let f = &data.field;
    let r = data.r() as i64;
    let mut special = Vec::new();
    for bp in &data.special {
        let mn = mu_nu(bp, data);
        let kh = kh_params(bp, &mn)?;
        let eps = bp.epsilon.expect("special point carries epsilon");
        let (k, a) = (mn.k_y, mn.a_y);
        // (a)
        let qr1 = euclid3(mn.mu1 + k - a + 1, "mu1 + k - a + 1")?;
        let b_y = by_index(qr1, 1 - eps * a, 1 - eps * (a + 1));
        // (b)
        let qr2 = euclid3(mn.mu3 - mn.mu2, "mu3 - mu2")?;
        let c_y = by_index(qr2, 1 - eps * (mn.mu2 + k + 1), 1 - eps * (mn.mu2 + k + 2));
        // (c)
        let qr31 = euclid3(kh.a1, "a1")?;
        let a_y1 = by_index(qr31, 1 - eps * (mn.mu1 + k + 1), 1 - eps * (mn.mu1 + k + 2));
        let qr32 = euclid3(kh.a2, "a2")?;
        let a_y2 = by_index(
            qr32,
            1 - eps * (mn.mu1 + k + kh.a1 + 1),
            1 - eps * (mn.mu1 + k + kh.a1 + 2),
        );
        special.push(SpecialTerms {
            place: bp.place.key(),
            mu_nu: mn,
            epsilon: eps,
            kh,
            star: star_of(f, bp.lambda)?,
            qr1,
            qr2,
            qr31,
            qr32,
            b_y,
            c_y,
            a_y1,
            a_y2,
        });
    }
    let mut orbits = Vec::new();
    for o in &data.orbits {
        let y = &o.points[0];
        let mn = mu_nu(y, data);
        orbits.push(OrbitTerms {
            psi: o.psi.0,
            klass: o.klass,
            mu_nu: mn,
            kh: kh_params(y, &mn)?,
            phi: o.phi,
        });
    }
    let mut b = [0i64; 3];
    let mut c = [0i64; 3];
    for i in 0..3 {
        b[i] = special.iter().map(|s| s.b_y[i]).sum::<i64>() - delta_ri(r, i as i64)
            + orbits.iter().map(|o| o.mu_nu.mu1).sum::<i64>();
        c[i] = special.iter().map(|s| s.c_y[i]).sum::<i64>()
            + orbits
                .iter()
                .map(|o| o.mu_nu.mu3 - o.mu_nu.mu2)
                .sum::<i64>();
    }
    Ok(KgTerms {
        r,
        special,
        orbits,
        b,
        c,
    })
}

fn even_string(l: i64, star: Star, i: usize) -> KgLabel {
    KgLabel::EvenString {
        dim: 2 * l.max(0) as u64,
        star,
        i: i as u8,
    }
}

fn band(l: i64, mu: Fe) -> KgLabel {
    KgLabel::Band {
        dim: 6 * l.max(0) as u64,
        mu,
    }
}

/// kG-decomposition assembled from [`kg_terms`].
pub fn kg_decomposition(data: &RamData) -> Result<KgDecomposition> {
    let f = &data.field;
    let t = kg_terms(data)?;
    let mut out = KgDecomposition::new();
    for s in &t.special {
        for i in 0..3 {
            out.add(even_string(s.kh.l, s.star, i), s.a_y1[i])?;
            out.add(even_string(s.kh.l - 1, s.star, i), s.a_y2[i])?;
        }
    }
    for o in &t.orbits {
        let KhParams { l, a1, a2 } = o.kh;
        match o.klass {
            OrbitClass::Zeta | OrbitClass::ZetaSq => {
                let star = if o.klass == OrbitClass::Zeta {
                    Star::Zero
                } else {
                    Star::Inf
                };
                for i in 0..3 {
                    out.add(even_string(l, star, i), a1)?;
                    out.add(even_string(l - 1, star, i), a2)?;
                }
            }
            OrbitClass::Generic => {
                let phi = o.phi.fin().expect("generic orbit has finite phi");
                let mu = f.pow(phi, 3);
                out.add(band(l, mu), a1)?;
                out.add(band(l - 1, mu), a2)?;
            }
            OrbitClass::Degenerate => {
                out.add(band(l, Fe::ONE), a1)?;
                out.add(band(l - 1, Fe::ONE), a2)?;
            }
        }
    }
    for i in 0..3 {
        out.add(
            KgLabel::OddString {
                dim: 3,
                x: 1,
                i: i as u8,
            },
            t.b[i],
        )?;
        out.add(KgLabel::Simple { i: i as u8 }, t.c[i])?;
    }
    check_dim(&out, data)?;
    Ok(out)
}

/// kG-decomposition of a cover branched only at ∞, via the simplified congruences.
pub fn hkg_decomposition(data: &RamData) -> Result<KgDecomposition> {
    if !data.is_hkg() {
        return Err(Error::NotHkg);
    }
    let f = &data.field;
    let bp = &data.special[0];
    let mn = mu_nu(bp, data);
    let kh = kh_params(bp, &mn)?;
    let star = star_of(f, bp.lambda)?;
    let b = by_index(euclid3(mn.mu1 - 1, "mu1 - 1")?, 1, 2);
    let c = by_index(euclid3(mn.mu3 - mn.mu2, "mu3 - mu2")?, mn.mu2, mn.mu2 + 1);
    let a1 = by_index(euclid3(kh.a1, "a1")?, mn.mu1, mn.mu1 + 1);
    let a2 = by_index(euclid3(kh.a2, "a2")?, mn.mu1 + kh.a1, mn.mu1 + kh.a1 + 1);
    let mut out = KgDecomposition::new();
    for i in 0..3 {
        out.add(even_string(kh.l, star, i), a1[i])?;
        out.add(even_string(kh.l - 1, star, i), a2[i])?;
        out.add(
            KgLabel::OddString {
                dim: 3,
                x: 1,
                i: i as u8,
            },
            b[i],
        )?;
        out.add(KgLabel::Simple { i: i as u8 }, c[i])?;
    }
    check_dim(&out, data)?;
    Ok(out)
}

/// Restriction of one kG-indecomposable to H.
pub fn restrict_label(f: &Gf, label: &KgLabel) -> Result<Vec<KhLabel>> {
    Ok(match *label {
        KgLabel::Simple { .. } => vec![KhLabel::Triv],
        KgLabel::OddString { dim, x, .. } => vec![KhLabel::String { dim, x }],
        KgLabel::EvenString { dim, star, .. } => {
            let lambda = match star {
                Star::Zero => f.zeta(),
                Star::Inf => f.zeta_pow(2),
            };
            vec![KhLabel::EvenDim {
                dim,
                lambda: Proj::Fin(lambda),
            }]
        }
        KgLabel::Band { dim, mu } => {
            let phi = *f.cube_roots(mu).first().ok_or_else(|| {
                Error::RootNotInField(format!("band parameter {mu} has no cube root"))
            })?;
            (0..3)
                .map(|j| KhLabel::EvenDim {
                    dim: dim / 3,
                    lambda: f.lambda_of_phi(Proj::Fin(f.mul(f.zeta_pow(j), phi))),
                })
                .collect()
        }
    })
}

pub fn restrict_decomposition(f: &Gf, d: &KgDecomposition) -> Result<KhDecomposition> {
    let mut out = KhDecomposition::new();
    for (l, &m) in d.entries() {
        for h in restrict_label(f, l)? {
            out.add(h, m as i64)?;
        }
    }
    Ok(out)
}
