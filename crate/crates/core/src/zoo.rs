//! Explicit matrix models of the indecomposable kH- and kG-modules.
//!
//! Modules over the string algebras are quiver representations stored on the
//! total space: every basis vector carries a vertex and every arrow is a
//! square matrix that is nonzero only from its source block to its target
//! block. Matrices act on column vectors and the basis is the string order.

use std::fmt;

use serde_json::{json, Value};

use crate::decomp::{
    restrict_label, KgDecomposition, KgLabel, KhDecomposition, KhLabel, ModuleLabel, Star,
};
use crate::error::{Error, Result};
use crate::gf::{Fe, Gf, Proj};
use crate::linalg::Mat;

/// The three quivers in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuiverKind {
    /// One vertex with loops A, B.
    KleinAB,
    /// One vertex with loops C, D.
    KleinCD,
    /// Vertices 0, 1, 2 with arrows γ10, γ21, γ02, δ01, δ12, δ20.
    A4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: &'static str,
    pub source: usize,
    pub target: usize,
}

const KLEIN_AB: [Arrow; 2] = [
    Arrow {
        name: "A",
        source: 0,
        target: 0,
    },
    Arrow {
        name: "B",
        source: 0,
        target: 0,
    },
];
const KLEIN_CD: [Arrow; 2] = [
    Arrow {
        name: "C",
        source: 0,
        target: 0,
    },
    Arrow {
        name: "D",
        source: 0,
        target: 0,
    },
];
const A4_ARROWS: [Arrow; 6] = [
    Arrow {
        name: "g10",
        source: 0,
        target: 1,
    },
    Arrow {
        name: "g21",
        source: 1,
        target: 2,
    },
    Arrow {
        name: "g02",
        source: 2,
        target: 0,
    },
    Arrow {
        name: "d01",
        source: 1,
        target: 0,
    },
    Arrow {
        name: "d12",
        source: 2,
        target: 1,
    },
    Arrow {
        name: "d20",
        source: 0,
        target: 2,
    },
];

pub const G10: usize = 0;
pub const G21: usize = 1;
pub const G02: usize = 2;
pub const D01: usize = 3;
pub const D12: usize = 4;
pub const D20: usize = 5;

impl QuiverKind {
    pub fn vertices(self) -> usize {
        match self {
            QuiverKind::A4 => 3,
            _ => 1,
        }
    }

    pub fn arrows(self) -> &'static [Arrow] {
        match self {
            QuiverKind::KleinAB => &KLEIN_AB,
            QuiverKind::KleinCD => &KLEIN_CD,
            QuiverKind::A4 => &A4_ARROWS,
        }
    }

    pub fn arrow_index(self, name: &str) -> Option<usize> {
        self.arrows().iter().position(|a| a.name == name)
    }

    /// On A4, γ-arrows are the components of C and δ-arrows those of D.
    pub fn is_gamma(self, arrow: usize) -> bool {
        match self {
            QuiverKind::A4 => arrow < 3,
            _ => arrow == 0,
        }
    }
}

/// An arrow or its formal inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub arrow: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn direct(arrow: usize) -> Letter {
        Letter {
            arrow,
            inverse: false,
        }
    }

    pub fn inv(arrow: usize) -> Letter {
        Letter {
            arrow,
            inverse: true,
        }
    }

    /// Start vertex s(w).
    pub fn start(self, q: QuiverKind) -> usize {
        let a = q.arrows()[self.arrow];
        if self.inverse {
            a.target
        } else {
            a.source
        }
    }

    /// End vertex e(w).
    pub fn end(self, q: QuiverKind) -> usize {
        let a = q.arrows()[self.arrow];
        if self.inverse {
            a.source
        } else {
            a.target
        }
    }
}

/// A word in arrows and inverse arrows; `vertex` fixes the trivial word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StringWord {
    pub quiver: QuiverKind,
    pub vertex: usize,
    pub letters: Vec<Letter>,
}

impl StringWord {
    pub fn trivial(quiver: QuiverKind, vertex: usize) -> StringWord {
        StringWord {
            quiver,
            vertex,
            letters: Vec::new(),
        }
    }

    pub fn new(quiver: QuiverKind, letters: Vec<Letter>) -> Result<StringWord> {
        let vertex = letters
            .first()
            .map(|l| l.end(quiver))
            .ok_or_else(|| Error::InvalidString("empty word needs a vertex".into()))?;
        let w = StringWord {
            quiver,
            vertex,
            letters,
        };
        w.validate()?;
        Ok(w)
    }

    /// Parses space-separated letters such as `d01^-1 g02` or `B^-1 A`.
    pub fn parse(quiver: QuiverKind, s: &str) -> Result<StringWord> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let arrow = quiver
                .arrow_index(name)
                .ok_or_else(|| Error::Parse(format!("unknown arrow {name}")))?;
            letters.push(Letter { arrow, inverse });
        }
        StringWord::new(quiver, letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Checks composability and that no two consecutive letters multiply to
    /// a path in the relation ideal or cancel.
    pub fn validate(&self) -> Result<()> {
        let q = self.quiver;
        if self.vertex >= q.vertices() {
            return Err(Error::InvalidString(format!("no vertex {}", self.vertex)));
        }
        if let Some(l) = self.letters.first() {
            if l.end(q) != self.vertex {
                return Err(Error::InvalidString(
                    "vertex does not match first letter".into(),
                ));
            }
        }
        for (i, pair) in self.letters.windows(2).enumerate() {
            check_pair(q, pair[0], pair[1]).map_err(|e| {
                Error::InvalidString(format!("letters {} and {}: {e}", i + 1, i + 2))
            })?;
        }
        Ok(())
    }

    /// Vertex of each basis vector b_1 … b_{l+1}.
    pub fn basis_vertices(&self) -> Vec<usize> {
        let q = self.quiver;
        let mut v: Vec<usize> = self.letters.iter().map(|l| l.end(q)).collect();
        v.push(self.letters.last().map_or(self.vertex, |l| l.start(q)));
        v
    }
}

fn check_pair(q: QuiverKind, a: Letter, b: Letter) -> std::result::Result<(), String> {
    if a.start(q) != b.end(q) {
        return Err("not composable".into());
    }
    if a.arrow == b.arrow && a.inverse != b.inverse {
        return Err("a letter is followed by its inverse".into());
    }
    if a.inverse == b.inverse {
        // Every path of length two is zero in the radical-square-zero algebras.
        return Err("consecutive letters form a zero relation".into());
    }
    Ok(())
}

impl fmt::Display for StringWord {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(fm, "e{}", self.vertex);
        }
        let arrows = self.quiver.arrows();
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                let n = arrows[l.arrow].name;
                if l.inverse {
                    format!("{n}^-1")
                } else {
                    n.to_string()
                }
            })
            .collect();
        write!(fm, "{}", parts.join(" "))
    }
}

/// A band: a cyclic word whose first letter is an arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Band {
    pub quiver: QuiverKind,
    pub letters: Vec<Letter>,
}

impl Band {
    pub fn new(quiver: QuiverKind, letters: Vec<Letter>) -> Result<Band> {
        let l = letters.len();
        if l == 0 {
            return Err(Error::InvalidBand("empty band".into()));
        }
        if letters[0].inverse {
            return Err(Error::InvalidBand("first letter must be an arrow".into()));
        }
        for i in 0..l {
            check_pair(quiver, letters[i], letters[(i + 1) % l]).map_err(|e| {
                Error::InvalidBand(format!("letters {} and {}: {e}", i + 1, (i + 1) % l + 1))
            })?;
        }
        if (1..l).any(|p| l.is_multiple_of(p) && (0..l).all(|i| letters[i] == letters[(i + p) % l]))
        {
            return Err(Error::InvalidBand("band is a proper power".into()));
        }
        Ok(Band { quiver, letters })
    }

    /// The Klein-four band B A^{-1} in (A, B) coordinates.
    pub fn klein_ab() -> Band {
        Band::new(QuiverKind::KleinAB, vec![Letter::direct(1), Letter::inv(0)]).unwrap()
    }

    /// The Klein-four band D C^{-1} in (C, D) coordinates.
    pub fn klein_cd() -> Band {
        Band::new(QuiverKind::KleinCD, vec![Letter::direct(1), Letter::inv(0)]).unwrap()
    }

    /// δ01 γ21^{-1} δ20 γ10^{-1} δ12 γ02^{-1}.
    pub fn a4() -> Band {
        Band::new(
            QuiverKind::A4,
            vec![
                Letter::direct(D01),
                Letter::inv(G21),
                Letter::direct(D20),
                Letter::inv(G10),
                Letter::direct(D12),
                Letter::inv(G02),
            ],
        )
        .unwrap()
    }
}

/// A representation on the total space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverRep {
    pub quiver: QuiverKind,
    pub basis_vertex: Vec<usize>,
    pub arrows: Vec<Mat>,
}

impl QuiverRep {
    pub fn zero(quiver: QuiverKind, basis_vertex: Vec<usize>) -> QuiverRep {
        let d = basis_vertex.len();
        QuiverRep {
            quiver,
            basis_vertex,
            arrows: vec![Mat::zeros(d, d); quiver.arrows().len()],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis_vertex.len()
    }

    /// The same module with basis vector i taken from old position `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> QuiverRep {
        let d = self.dim();
        assert_eq!(order.len(), d, "permutation of the wrong length");
        let arrows = self
            .arrows
            .iter()
            .map(|a| {
                let mut b = Mat::zeros(d, d);
                for (i, &oi) in order.iter().enumerate() {
                    for (j, &oj) in order.iter().enumerate() {
                        b.set(i, j, a.get(oi, oj));
                    }
                }
                b
            })
            .collect();
        QuiverRep {
            quiver: self.quiver,
            basis_vertex: order.iter().map(|&o| self.basis_vertex[o]).collect(),
            arrows,
        }
    }

    pub fn vertex_dims(&self) -> Vec<usize> {
        let mut d = vec![0; self.quiver.vertices()];
        for &v in &self.basis_vertex {
            d[v] += 1;
        }
        d
    }

    fn vertex_indices(&self, v: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.basis_vertex[i] == v)
            .collect()
    }

    /// The arrow as a map from its source space to its target space.
    pub fn arrow_block(&self, arrow: usize) -> Mat {
        let a = self.quiver.arrows()[arrow];
        self.arrows[arrow]
            .select_rows(&self.vertex_indices(a.target))
            .select_cols(&self.vertex_indices(a.source))
    }

    /// Sum of the γ-arrows (or the first loop) on the total space.
    pub fn c_total(&self) -> Mat {
        self.sum_arrows(true)
    }

    /// Sum of the δ-arrows (or the second loop) on the total space.
    pub fn d_total(&self) -> Mat {
        self.sum_arrows(false)
    }

    fn sum_arrows(&self, gamma: bool) -> Mat {
        let d = self.dim();
        let mut m = Mat::zeros(d, d);
        for (i, a) in self.arrows.iter().enumerate() {
            if self.quiver.is_gamma(i) == gamma {
                m = m.add(a);
            }
        }
        m
    }

    /// Shapes and the relations of kH or of Λ.
    pub fn validate(&self, f: &Gf) -> Result<()> {
        let d = self.dim();
        let arrows = self.quiver.arrows();
        if self.arrows.len() != arrows.len() {
            return Err(Error::RelationViolation("wrong number of arrows".into()));
        }
        for (a, m) in arrows.iter().zip(&self.arrows) {
            if m.rows() != d || m.cols() != d {
                return Err(Error::RelationViolation(format!(
                    "arrow {} has wrong shape",
                    a.name
                )));
            }
            for i in 0..d {
                for j in 0..d {
                    if !m.get(i, j).is_zero()
                        && (self.basis_vertex[j] != a.source || self.basis_vertex[i] != a.target)
                    {
                        return Err(Error::RelationViolation(format!(
                            "arrow {} leaves its source or target",
                            a.name
                        )));
                    }
                }
            }
        }
        let (c, dd) = (self.c_total(), self.d_total());
        let names = match self.quiver {
            QuiverKind::KleinAB => ("A", "B"),
            QuiverKind::KleinCD => ("C", "D"),
            QuiverKind::A4 => ("gamma", "delta"),
        };
        if !c.mul(f, &c).is_zero() {
            return Err(Error::RelationViolation(format!("{0}{0} != 0", names.0)));
        }
        if !dd.mul(f, &dd).is_zero() {
            return Err(Error::RelationViolation(format!("{0}{0} != 0", names.1)));
        }
        if c.mul(f, &dd) != dd.mul(f, &c) {
            return Err(Error::RelationViolation(format!(
                "{0}{1} != {1}{0}",
                names.0, names.1
            )));
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &QuiverRep) -> QuiverRep {
        assert_eq!(self.quiver, other.quiver);
        let mut bv = self.basis_vertex.clone();
        bv.extend_from_slice(&other.basis_vertex);
        QuiverRep {
            quiver: self.quiver,
            basis_vertex: bv,
            arrows: self
                .arrows
                .iter()
                .zip(&other.arrows)
                .map(|(a, b)| a.direct_sum(b))
                .collect(),
        }
    }
}

/// The string module M(w): b_j ↦ b_{j-1} for direct w_{j-1}, b_j ↦ b_{j+1}
/// for inverse w_j.
pub fn string_module_matrices(w: &StringWord) -> Result<QuiverRep> {
    w.validate()?;
    let mut rep = QuiverRep::zero(w.quiver, w.basis_vertices());
    for (j, l) in w.letters.iter().enumerate() {
        // letter w_{j+1} joins b_{j+1} and b_{j+2} (zero-based j and j+1)
        if l.inverse {
            rep.arrows[l.arrow].set(j + 1, j, Fe::ONE);
        } else {
            rep.arrows[l.arrow].set(j, j + 1, Fe::ONE);
        }
    }
    Ok(rep)
}

/// Upper triangular Jordan block J_n(μ).
pub fn jordan(n: usize, mu: Fe) -> Mat {
    let mut j = Mat::scalar(n, mu);
    for i in 0..n.saturating_sub(1) {
        j.set(i, i + 1, Fe::ONE);
    }
    j
}

/// The band module M(w, n, μ) with n-blocks in the band order.
pub fn band_module_matrices(w: &Band, n: usize, mu: Fe) -> Result<QuiverRep> {
    if n == 0 {
        return Err(Error::InvalidBand("block size must be positive".into()));
    }
    if mu.is_zero() {
        return Err(Error::InvalidBand("parameter must be nonzero".into()));
    }
    let q = w.quiver;
    let l = w.letters.len();
    let bv: Vec<usize> = w
        .letters
        .iter()
        .flat_map(|x| std::iter::repeat_n(x.end(q), n))
        .collect();
    let mut rep = QuiverRep::zero(q, bv);
    let id = Mat::identity(n);
    let jb = jordan(n, mu);
    for (i, letter) in w.letters.iter().enumerate() {
        let next = (i + 1) % l;
        let (row, col) = if letter.inverse { (next, i) } else { (i, next) };
        let block = if i == 0 { &jb } else { &id };
        rep.arrows[letter.arrow].set_block(row * n, col * n, block);
    }
    Ok(rep)
}

/// M(w, n, μ) with the basis ordered block index first, so that the leading
/// k·|w| vectors compress to M(w, k, μ) for every k ≤ n.
pub fn band_module_nested(w: &Band, n: usize, mu: Fe) -> Result<QuiverRep> {
    let l = w.letters.len();
    let order: Vec<usize> = (0..n)
        .flat_map(|j| (0..l).map(move |i| i * n + j))
        .collect();
    Ok(band_module_matrices(w, n, mu)?.permuted(&order))
}

/// Klein-four string words in (A, B) coordinates.
fn kh_word(label: &KhLabel) -> Option<StringWord> {
    let (a, b) = (0, 1);
    let rep = |unit: [Letter; 2], len: usize| {
        StringWord::new(QuiverKind::KleinAB, (0..len).map(|k| unit[k % 2]).collect())
            .expect("periodic Klein-four words are strings")
    };
    match *label {
        KhLabel::Triv => Some(StringWord::trivial(QuiverKind::KleinAB, 0)),
        KhLabel::String { dim, x } => {
            let unit = if x == 1 {
                [Letter::inv(b), Letter::direct(a)]
            } else {
                [Letter::direct(a), Letter::inv(b)]
            };
            Some(rep(unit, dim as usize - 1))
        }
        KhLabel::EvenDim { dim, lambda } => match lambda {
            Proj::Fin(l) if l.is_zero() => {
                Some(rep([Letter::inv(a), Letter::direct(b)], dim as usize - 1))
            }
            Proj::Inf => Some(rep([Letter::inv(b), Letter::direct(a)], dim as usize - 1)),
            _ => None,
        },
    }
}

/// Coordinates in which a kH label is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KhCoords {
    AB,
    CD,
}

/// The quiver model of a kH label; in (C, D) coordinates the parameter of
/// N_{2n,·} is read as φ and the strings use C, D in place of A, B.
pub fn kh_quiver_rep(label: &KhLabel, coords: KhCoords) -> Result<QuiverRep> {
    let mut rep = match kh_word(label) {
        Some(w) => string_module_matrices(&w)?,
        None => {
            let KhLabel::EvenDim { dim, lambda } = *label else {
                unreachable!()
            };
            let mu = lambda.fin().expect("finite parameter");
            band_module_matrices(&Band::klein_ab(), dim as usize / 2, mu)?
        }
    };
    if coords == KhCoords::CD {
        rep.quiver = QuiverKind::KleinCD;
    }
    Ok(rep)
}

/// The periodic words whose prefixes give the kG strings.
pub const P_DELTA: [Letter; 6] = [
    Letter {
        arrow: D01,
        inverse: true,
    },
    Letter {
        arrow: G02,
        inverse: false,
    },
    Letter {
        arrow: D12,
        inverse: true,
    },
    Letter {
        arrow: G10,
        inverse: false,
    },
    Letter {
        arrow: D20,
        inverse: true,
    },
    Letter {
        arrow: G21,
        inverse: false,
    },
];
pub const P_GAMMA: [Letter; 6] = [
    Letter {
        arrow: G02,
        inverse: true,
    },
    Letter {
        arrow: D01,
        inverse: false,
    },
    Letter {
        arrow: G21,
        inverse: true,
    },
    Letter {
        arrow: D20,
        inverse: false,
    },
    Letter {
        arrow: G10,
        inverse: true,
    },
    Letter {
        arrow: D12,
        inverse: false,
    },
];

/// Offset into [`P_GAMMA`] for N_{2n,0,i}.
pub const N_ZERO_OFFSET: [usize; 3] = [0, 4, 2];

/// The prefix of length `len` of a periodic word started at `offset`.
pub fn periodic_word(pattern: &[Letter; 6], offset: usize, len: usize) -> StringWord {
    let letters: Vec<Letter> = (0..len).map(|k| pattern[(offset + k) % 6]).collect();
    if letters.is_empty() {
        let v = pattern[offset % 6].end(QuiverKind::A4);
        return StringWord::trivial(QuiverKind::A4, v);
    }
    StringWord::new(QuiverKind::A4, letters).expect("periodic A4 words are strings")
}

/// The string word of a kG string label, or `None` for bands.
pub fn kg_word(label: &KgLabel) -> Option<StringWord> {
    match *label {
        KgLabel::Simple { i } => Some(StringWord::trivial(QuiverKind::A4, i as usize)),
        KgLabel::OddString { dim, x, i } => {
            let off = 2 * i as usize + usize::from(x == 2);
            Some(periodic_word(&P_DELTA, off, dim as usize - 1))
        }
        KgLabel::EvenString { dim, star, i } => Some(match star {
            Star::Inf => periodic_word(&P_DELTA, 2 * i as usize, dim as usize - 1),
            Star::Zero => periodic_word(&P_GAMMA, N_ZERO_OFFSET[i as usize], dim as usize - 1),
        }),
        KgLabel::Band { .. } => None,
    }
}

pub fn kg_quiver_rep(label: &KgLabel) -> Result<QuiverRep> {
    match (kg_word(label), *label) {
        (Some(w), _) => string_module_matrices(&w),
        (None, KgLabel::Band { dim, mu }) => {
            if dim == 0 || dim % 6 != 0 {
                return Err(Error::InvalidBand(format!(
                    "band dimension {dim} is not 6n"
                )));
            }
            band_module_matrices(&Band::a4(), dim as usize / 6, mu)
        }
        _ => unreachable!(),
    }
}

/// H = ⟨σ, τ⟩ or G = H ⋊ ⟨ρ⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    H,
    G,
}

/// Generator matrices of a representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRep {
    pub group: Group,
    pub sigma: Mat,
    pub tau: Mat,
    pub rho: Option<Mat>,
}

impl GroupRep {
    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    pub fn new_h(sigma: Mat, tau: Mat) -> GroupRep {
        GroupRep {
            group: Group::H,
            sigma,
            tau,
            rho: None,
        }
    }

    pub fn new_g(sigma: Mat, tau: Mat, rho: Mat) -> GroupRep {
        GroupRep {
            group: Group::G,
            sigma,
            tau,
            rho: Some(rho),
        }
    }

    pub fn rho(&self) -> &Mat {
        self.rho.as_ref().expect("representation of G")
    }

    /// A = σ - 1.
    pub fn a(&self) -> Mat {
        self.sigma.add(&Mat::identity(self.dim()))
    }

    /// B = τ - 1.
    pub fn b(&self) -> Mat {
        self.tau.add(&Mat::identity(self.dim()))
    }

    /// C = ζA + ζ²B + AB.
    pub fn c(&self, f: &Gf) -> Mat {
        let (a, b) = (self.a(), self.b());
        a.scale(f, f.zeta())
            .add(&b.scale(f, f.zeta_pow(2)))
            .add(&a.mul(f, &b))
    }

    /// D = A + ζ²B + ζAB.
    pub fn d(&self, f: &Gf) -> Mat {
        let (a, b) = (self.a(), self.b());
        a.add(&b.scale(f, f.zeta_pow(2)))
            .add(&a.mul(f, &b).scale(f, f.zeta()))
    }

    /// e_i = 1 + ζ^{-i}ρ + ζ^{-2i}ρ².
    pub fn idempotent(&self, f: &Gf, i: i64) -> Mat {
        let rho = self.rho();
        Mat::identity(self.dim())
            .add(&rho.scale(f, f.zeta_pow(-i)))
            .add(&rho.mul(f, rho).scale(f, f.zeta_pow(-2 * i)))
    }

    pub fn validate(&self, f: &Gf) -> Result<()> {
        let n = self.dim();
        let fail = |what: &str| Err(Error::RelationViolation(what.into()));
        if !self.sigma.is_square() || self.tau.rows() != n || self.tau.cols() != n {
            return fail("generator shapes differ");
        }
        let id = Mat::identity(n);
        if self.sigma.mul(f, &self.sigma) != id {
            return fail("sigma^2 != 1");
        }
        if self.tau.mul(f, &self.tau) != id {
            return fail("tau^2 != 1");
        }
        if self.sigma.mul(f, &self.tau) != self.tau.mul(f, &self.sigma) {
            return fail("sigma tau != tau sigma");
        }
        match (self.group, &self.rho) {
            (Group::H, None) => Ok(()),
            (Group::H, Some(_)) => fail("rho given for a representation of H"),
            (Group::G, None) => fail("rho missing for a representation of G"),
            (Group::G, Some(rho)) => {
                if rho.rows() != n || rho.cols() != n {
                    return fail("rho has the wrong shape");
                }
                if rho.pow(f, 3) != id {
                    return fail("rho^3 != 1");
                }
                if self.sigma.mul(f, rho).pow(f, 3) != id {
                    return fail("(sigma rho)^3 != 1");
                }
                if rho.mul(f, &self.sigma) != self.tau.mul(f, rho) {
                    return fail("rho sigma rho^-1 != tau");
                }
                Ok(())
            }
        }
    }

    pub fn direct_sum(&self, other: &GroupRep) -> GroupRep {
        assert_eq!(self.group, other.group);
        GroupRep {
            group: self.group,
            sigma: self.sigma.direct_sum(&other.sigma),
            tau: self.tau.direct_sum(&other.tau),
            rho: match (&self.rho, &other.rho) {
                (Some(a), Some(b)) => Some(a.direct_sum(b)),
                _ => None,
            },
        }
    }

    pub fn direct_sum_all(group: Group, parts: &[GroupRep]) -> GroupRep {
        let sig: Vec<Mat> = parts.iter().map(|p| p.sigma.clone()).collect();
        let tau: Vec<Mat> = parts.iter().map(|p| p.tau.clone()).collect();
        let rho = (group == Group::G)
            .then(|| Mat::block_diag(&parts.iter().map(|p| p.rho().clone()).collect::<Vec<_>>()));
        GroupRep {
            group,
            sigma: Mat::block_diag(&sig),
            tau: Mat::block_diag(&tau),
            rho,
        }
    }

    pub fn restrict(&self) -> GroupRep {
        GroupRep::new_h(self.sigma.clone(), self.tau.clone())
    }

    /// Ind_H^G V on the basis ρ^j ⊗ v, j = 0, 1, 2.
    pub fn induce(&self, f: &Gf) -> GroupRep {
        assert_eq!(self.group, Group::H);
        let n = self.dim();
        let st = self.sigma.mul(f, &self.tau);
        // ρ^{-j}σρ^j for j = 0, 1, 2 is σ, στ, τ; ρ^{-j}τρ^j is τ, σ, στ.
        let sigma = Mat::block_diag(&[self.sigma.clone(), st.clone(), self.tau.clone()]);
        let tau = Mat::block_diag(&[self.tau.clone(), self.sigma.clone(), st]);
        let mut rho = Mat::zeros(3 * n, 3 * n);
        let id = Mat::identity(n);
        for j in 0..3 {
            rho.set_block(((j + 1) % 3) * n, j * n, &id);
        }
        GroupRep::new_g(sigma, tau, rho)
    }

    /// JSON with row-major masks.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "group": match self.group { Group::H => "H", Group::G => "G" },
            "dim": self.dim(),
            "sigma": self.sigma.to_masks(),
            "tau": self.tau.to_masks(),
        });
        if let Some(r) = &self.rho {
            v["rho"] = json!(r.to_masks());
        }
        v
    }
}

/// Group matrices of a kH-module given in (A, B) or (C, D) coordinates.
pub fn kh_group_matrices(f: &Gf, rep: &QuiverRep) -> Result<GroupRep> {
    let n = rep.dim();
    let (x, y) = (rep.c_total(), rep.d_total());
    let (a, b) = match rep.quiver {
        QuiverKind::KleinAB => (x, y),
        QuiverKind::KleinCD => ab_from_cd(f, &x, &y),
        QuiverKind::A4 => {
            return Err(Error::Unsupported(
                "A4 quiver rep given as a kH-module".into(),
            ))
        }
    };
    let id = Mat::identity(n);
    let g = GroupRep::new_h(id.add(&a), id.add(&b));
    g.validate(f)?;
    Ok(g)
}

/// A = ζC + ζD + ζ²CD and B = ζ²C + D + ζ²CD.
fn ab_from_cd(f: &Gf, c: &Mat, d: &Mat) -> (Mat, Mat) {
    let cd = c.mul(f, d).scale(f, f.zeta_pow(2));
    let a = c.scale(f, f.zeta()).add(&d.scale(f, f.zeta())).add(&cd);
    let b = c.scale(f, f.zeta_pow(2)).add(d).add(&cd);
    (a, b)
}

/// Group matrices of a Λ-module: C, D are the sums of the γ- and δ-arrows
/// and ρ acts by ζ^v on vertex v.
pub fn kg_group_matrices(f: &Gf, rep: &QuiverRep) -> Result<GroupRep> {
    if rep.quiver != QuiverKind::A4 {
        return Err(Error::Unsupported("kG matrices need the A4 quiver".into()));
    }
    rep.validate(f)?;
    let n = rep.dim();
    let (a, b) = ab_from_cd(f, &rep.c_total(), &rep.d_total());
    let id = Mat::identity(n);
    let rho = Mat::diag(
        &rep.basis_vertex
            .iter()
            .map(|&v| f.zeta_pow(v as i64))
            .collect::<Vec<_>>(),
    );
    let g = GroupRep::new_g(id.add(&a), id.add(&b), rho);
    g.validate(f)?;
    Ok(g)
}

pub fn kh_rep(f: &Gf, label: &KhLabel) -> Result<GroupRep> {
    kh_group_matrices(f, &kh_quiver_rep(label, KhCoords::AB)?)
}

pub fn kg_rep(f: &Gf, label: &KgLabel) -> Result<GroupRep> {
    kg_group_matrices(f, &kg_quiver_rep(label)?)
}

pub fn kh_sum(f: &Gf, d: &KhDecomposition) -> Result<GroupRep> {
    let mut parts = Vec::new();
    for (l, &m) in d.entries() {
        let r = kh_rep(f, l)?;
        parts.extend(std::iter::repeat_n(r, m as usize));
    }
    Ok(GroupRep::direct_sum_all(Group::H, &parts))
}

pub fn kg_sum(f: &Gf, d: &KgDecomposition) -> Result<GroupRep> {
    let mut parts = Vec::new();
    for (l, &m) in d.entries() {
        let r = kg_rep(f, l)?;
        parts.extend(std::iter::repeat_n(r, m as usize));
    }
    Ok(GroupRep::direct_sum_all(Group::G, &parts))
}

/// The (C, D) label N_{2n,φ}^{(C,D)} rewritten in (A, B) coordinates.
pub fn cd_to_ab(f: &Gf, label: &KhLabel) -> KhLabel {
    match *label {
        KhLabel::EvenDim { dim, lambda } => KhLabel::EvenDim {
            dim,
            lambda: f.lambda_of_phi(lambda),
        },
        other => other,
    }
}

/// Ind_H^G of an (A, B) label.
pub fn induce_label(f: &Gf, label: &KhLabel) -> KgDecomposition {
    let mut d = KgDecomposition::new();
    let mut add = |l: KgLabel| d.add(l, 1).expect("positive multiplicity");
    match *label {
        KhLabel::Triv => (0..3).for_each(|i| add(KgLabel::Simple { i })),
        KhLabel::String { dim, x } => (0..3).for_each(|i| add(KgLabel::OddString { dim, x, i })),
        KhLabel::EvenDim { dim, lambda } => match f.phi_of_lambda(lambda) {
            Proj::Fin(p) if p.is_zero() => (0..3).for_each(|i| {
                add(KgLabel::EvenString {
                    dim,
                    star: Star::Zero,
                    i,
                })
            }),
            Proj::Inf => (0..3).for_each(|i| {
                add(KgLabel::EvenString {
                    dim,
                    star: Star::Inf,
                    i,
                })
            }),
            Proj::Fin(p) => add(KgLabel::Band {
                dim: 3 * dim,
                mu: f.pow(p, 3),
            }),
        },
    }
    d
}

/// Direction for [`induce_restrict_label`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Induce,
    Restrict,
}

/// Either side of the dictionary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnyLabel {
    Kh(KhLabel),
    Kg(KgLabel),
}

/// Induction of (A, B) labels and restriction of kG labels, as multisets.
pub fn induce_restrict_label(f: &Gf, label: &AnyLabel, dir: Direction) -> Result<Value> {
    match (label, dir) {
        (AnyLabel::Kh(l), Direction::Induce) => Ok(induce_label(f, l).to_json()),
        (AnyLabel::Kg(l), Direction::Restrict) => {
            let mut d = KhDecomposition::new();
            for h in restrict_label(f, l)? {
                d.add(h, 1)?;
            }
            Ok(d.to_json())
        }
        _ => Err(Error::Unsupported(
            "induction takes a kH label and restriction a kG label".into(),
        )),
    }
}

/// JSON dump of a label's matrices.
pub fn zoo_json_kg(f: &Gf, label: &KgLabel) -> Result<Value> {
    let q = kg_quiver_rep(label)?;
    let g = kg_group_matrices(f, &q)?;
    Ok(json!({
        "label": label.key(),
        "params": label.params(),
        "vertex_dims": q.vertex_dims(),
        "word": kg_word(label).map(|w| w.to_string()),
        "rep": g.to_json(),
    }))
}

pub fn zoo_json_kh(f: &Gf, label: &KhLabel) -> Result<Value> {
    let g = kh_rep(f, label)?;
    Ok(json!({
        "label": label.key(),
        "params": label.params(),
        "word": kh_word(label).map(|w| w.to_string()),
        "rep": g.to_json(),
    }))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn f4() -> Gf {
        Gf::new(4).unwrap()
    }

    #[test]
    fn string_examples() {
        let q = QuiverKind::KleinCD;
        let w = StringWord::parse(q, "C^-1").unwrap();
        let r = string_module_matrices(&w).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.arrows[0].get(1, 0), Fe::ONE);
        assert!(r.arrows[1].is_zero());

        let w = StringWord::parse(q, "D^-1 C").unwrap();
        let r = string_module_matrices(&w).unwrap();
        assert_eq!(r.dim(), 3);
        assert_eq!(r.arrows[1].get(1, 0), Fe::ONE);
        assert_eq!(r.arrows[0].get(1, 2), Fe::ONE);
        r.validate(&f4()).unwrap();

        let r = string_module_matrices(&StringWord::trivial(QuiverKind::A4, 2)).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(r.arrows.iter().all(Mat::is_zero));
    }

    #[test]
    fn invalid_words() {
        let q = QuiverKind::KleinAB;
        assert!(matches!(
            StringWord::parse(q, "A A^-1"),
            Err(Error::InvalidString(_))
        ));
        assert!(matches!(
            StringWord::parse(q, "A B"),
            Err(Error::InvalidString(_))
        ));
        assert!(matches!(
            StringWord::parse(QuiverKind::A4, "g10 d01^-1"),
            Err(Error::InvalidString(_))
        ));
        assert!(matches!(
            Band::new(q, vec![Letter::inv(0), Letter::direct(1)]),
            Err(Error::InvalidBand(_))
        ));
        assert!(matches!(
            Band::new(
                q,
                vec![
                    Letter::direct(1),
                    Letter::inv(0),
                    Letter::direct(1),
                    Letter::inv(0)
                ]
            ),
            Err(Error::InvalidBand(_))
        ));
    }

    #[test]
    fn band_examples() {
        let f = f4();
        let l = Fe(3);
        let r = band_module_matrices(&Band::klein_cd(), 1, l).unwrap();
        assert_eq!(
            r.arrows[0],
            Mat::from_rows(&[vec![Fe(0), Fe(1)], vec![Fe(0), Fe(0)]])
        );
        assert_eq!(
            r.arrows[1],
            Mat::from_rows(&[vec![Fe(0), l], vec![Fe(0), Fe(0)]])
        );
        let r = band_module_matrices(&Band::a4(), 1, Fe(2)).unwrap();
        assert_eq!(r.dim(), 6);
        r.validate(&f).unwrap();
        let r = band_module_matrices(&Band::klein_cd(), 2, Fe::ONE).unwrap();
        assert_eq!(r.arrows[1].block(0, 2, 2, 2), jordan(2, Fe::ONE));
    }

    #[test]
    fn nested_bands_compress_to_smaller_bands() {
        let mu = Fe(3);
        for w in [Band::klein_ab(), Band::a4()] {
            let big = band_module_nested(&w, 4, mu).unwrap();
            let l = w.letters.len();
            for k in 1..=4 {
                let p = k * l;
                let small = band_module_nested(&w, k, mu).unwrap();
                assert_eq!(&big.basis_vertex[..p], &small.basis_vertex[..]);
                for (a, b) in big.arrows.iter().zip(&small.arrows) {
                    assert_eq!(&a.block(0, 0, p, p), b);
                }
            }
        }
    }

    #[test]
    fn simple_group_matrices() {
        let f = f4();
        let s0 = kg_rep(&f, &KgLabel::Simple { i: 0 }).unwrap();
        assert!(s0.sigma.is_identity() && s0.tau.is_identity() && s0.rho().is_identity());
        let s1 = kg_rep(&f, &KgLabel::Simple { i: 1 }).unwrap();
        assert_eq!(s1.rho().get(0, 0), f.zeta());
        assert!(s1.sigma.is_identity());
    }

    #[test]
    fn odd_strings_have_three_rho_eigenvalues() {
        let _f = f4();
        for i in 0..3u8 {
            let q = kg_quiver_rep(&KgLabel::OddString { dim: 3, x: 1, i }).unwrap();
            let mut vd = q.vertex_dims();
            vd.sort();
            assert_eq!(vd, vec![1, 1, 1]);
            // the socle sits at vertex i
            let soc = q.basis_vertex[1];
            assert_eq!(soc, i as usize);
        }
    }

    #[test]
    fn every_small_label_is_a_valid_rep() {
        let f = f4();
        let z = f.zeta();
        for label in small_kg_labels(&f, 18) {
            let g = kg_rep(&f, &label).unwrap();
            assert_eq!(g.dim() as u64, label.dim());
            g.validate(&f).unwrap();
            let es: Vec<Mat> = (0..3).map(|i| g.idempotent(&f, i)).collect();
            let mut sum = Mat::zeros(g.dim(), g.dim());
            for i in 0..3 {
                for j in 0..3 {
                    let p = es[i].mul(&f, &es[j]);
                    if i == j {
                        assert_eq!(p, es[i]);
                    } else {
                        assert!(p.is_zero());
                    }
                }
                sum = sum.add(&es[i]);
            }
            assert!(sum.is_identity());
            let _ = z;
        }
        for label in small_kh_labels(&f, 18) {
            let g = kh_rep(&f, &label).unwrap();
            assert_eq!(g.dim() as u64, label.dim());
            let cd = kh_group_matrices(&f, &kh_quiver_rep(&label, KhCoords::CD).unwrap()).unwrap();
            assert_eq!(cd.dim(), g.dim());
        }
    }

    #[test]
    fn induction_is_a_rep() {
        let f = f4();
        for label in small_kh_labels(&f, 8) {
            let g = kh_rep(&f, &label).unwrap().induce(&f);
            g.validate(&f).unwrap();
            assert_eq!(g.dim() as u64, 3 * label.dim());
        }
    }

    #[test]
    fn dictionary_examples() {
        let f = f4();
        assert_eq!(f.lambda_of_phi(Proj::Fin(Fe::ONE)), Proj::Inf);
        let d = induce_label(&f, &KhLabel::Triv);
        assert_eq!(d.total_dim(), 3);
        let phi = Fe(2);
        let lambda = f.lambda_of_phi(Proj::Fin(phi));
        let d = induce_label(&f, &KhLabel::EvenDim { dim: 4, lambda });
        assert_eq!(
            d.mult(&KgLabel::Band {
                dim: 12,
                mu: f.pow(phi, 3)
            }),
            1
        );
    }

    /// Labels up to `max_dim` with a few sample band parameters.
    pub(crate) fn small_kg_labels(f: &Gf, max_dim: u64) -> Vec<KgLabel> {
        let mut out: Vec<KgLabel> = (0..3).map(|i| KgLabel::Simple { i }).collect();
        for n in 1..=max_dim / 2 {
            for i in 0..3 {
                if 2 * n < max_dim {
                    for x in 1..=2 {
                        out.push(KgLabel::OddString {
                            dim: 2 * n + 1,
                            x,
                            i,
                        });
                    }
                }
                for star in [Star::Zero, Star::Inf] {
                    out.push(KgLabel::EvenString {
                        dim: 2 * n,
                        star,
                        i,
                    });
                }
            }
        }
        for n in 1..=max_dim / 6 {
            for mu in [Fe::ONE, f.gen(), f.pow(f.gen(), 3)] {
                out.push(KgLabel::Band { dim: 6 * n, mu });
            }
        }
        out
    }

    pub(crate) fn small_kh_labels(f: &Gf, max_dim: u64) -> Vec<KhLabel> {
        let mut out = vec![KhLabel::Triv];
        for n in 1..=max_dim / 2 {
            if 2 * n < max_dim {
                for x in 1..=2 {
                    out.push(KhLabel::String { dim: 2 * n + 1, x });
                }
            }
            for lambda in [
                Proj::Fin(Fe::ZERO),
                Proj::Inf,
                Proj::Fin(Fe::ONE),
                Proj::Fin(f.zeta()),
            ] {
                out.push(KhLabel::EvenDim { dim: 2 * n, lambda });
            }
        }
        out
    }
}
