//! Hom dimensions between representations and recovery of indecomposable
//! multiplicities by solving the hom-count system against the zoo.
//!
//! Hom spaces are computed on quiver forms: a G-module is split into the
//! eigenspaces of ρ, which turns σ, τ into the γ/δ arrows of the A4 quiver,
//! and an H-module is the two-loop quiver with A = σ - 1, B = τ - 1. For a
//! first argument whose arrows are banded in its basis order (every zoo
//! module is), the intertwiner system is eliminated block by block so only a
//! few unknown blocks are live at a time.

use std::collections::{BTreeSet, HashMap};

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::decomp::{Decomposition, KgLabel, KhLabel, ModuleLabel, Star};
use crate::error::{Error, Result};
use crate::gf::{Fe, Gf, Proj};
use crate::linalg::Mat;
use crate::poly::{distinct_roots, roots_with_cofactor, Poly};
use crate::zoo::{
    band_module_nested, kg_quiver_rep, kh_quiver_rep, string_module_matrices, Band, Group,
    GroupRep, KhCoords, Letter, QuiverKind, QuiverRep, StringWord, N_ZERO_OFFSET, P_DELTA, P_GAMMA,
};

/// Vertex spaces and arrow maps (target x source blocks).
#[derive(Clone, Debug)]
pub struct Graded {
    pub quiver: QuiverKind,
    pub dims: Vec<usize>,
    pub arrows: Vec<Mat>,
}

impl Graded {
    pub fn from_quiver_rep(q: &QuiverRep) -> Graded {
        Graded {
            quiver: q.quiver,
            dims: q.vertex_dims(),
            arrows: (0..q.arrows.len()).map(|a| q.arrow_block(a)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

/// Quiver form of a group representation.
///
/// For G the basis is a ρ-eigenbasis ordered by the first nonzero coordinate
/// of each eigenvector, which keeps the arrows banded when the input basis is.
pub fn quiver_form(f: &Gf, g: &GroupRep) -> Result<QuiverRep> {
    let n = g.dim();
    match g.group {
        Group::H => Ok(QuiverRep {
            quiver: QuiverKind::KleinAB,
            basis_vertex: vec![0; n],
            arrows: vec![g.a(), g.b()],
        }),
        Group::G => {
            let rho = g.rho();
            let mut vecs: Vec<(usize, usize, Vec<Fe>)> = Vec::with_capacity(n);
            for v in 0..3 {
                let k = rho.add(&Mat::scalar(n, f.zeta_pow(v as i64))).nullspace(f);
                for j in 0..k.cols() {
                    let col = k.col(j);
                    let first = col.iter().position(|x| !x.is_zero()).unwrap_or(0);
                    vecs.push((first, v, col));
                }
            }
            if vecs.len() != n {
                return Err(Error::RelationViolation("rho is not diagonalizable".into()));
            }
            vecs.sort_by_key(|(first, v, _)| (*first, *v));
            let cols: Vec<Vec<Fe>> = vecs.iter().map(|(_, _, c)| c.clone()).collect();
            let p = Mat::from_cols(n, &cols);
            let pinv = p
                .inverse(f)
                .ok_or_else(|| Error::RelationViolation("rho eigenvectors are dependent".into()))?;
            let c = pinv.mul(f, &g.c(f)).mul(f, &p);
            let d = pinv.mul(f, &g.d(f)).mul(f, &p);
            let basis_vertex: Vec<usize> = vecs.iter().map(|(_, v, _)| *v).collect();
            let q = QuiverKind::A4;
            let mut arrows = Vec::with_capacity(6);
            for (ai, a) in q.arrows().iter().enumerate() {
                let src = if q.is_gamma(ai) { &c } else { &d };
                let mut m = Mat::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        if basis_vertex[j] == a.source && basis_vertex[i] == a.target {
                            m.set(i, j, src.get(i, j));
                        }
                    }
                }
                arrows.push(m);
            }
            let rep = QuiverRep {
                quiver: q,
                basis_vertex,
                arrows,
            };
            // C and D must shift the grading; anything else is not a G-module.
            if rep.c_total() != c || rep.d_total() != d {
                return Err(Error::RelationViolation(
                    "C or D does not shift the rho-grading".into(),
                ));
            }
            Ok(rep)
        }
    }
}

struct Constraint {
    owner: usize,
    arrow: usize,
    terms: Vec<(usize, Fe)>,
    time: usize,
}

/// dim Hom(X_{≤p}, Y) for each requested p, where X_{≤p} is the compression
/// of X to its first p basis vectors (a module when X is a string module and
/// the first p vectors form a prefix of the string).
pub fn hom_prefixes(f: &Gf, x: &QuiverRep, y: &Graded, sizes: &[usize]) -> Vec<usize> {
    assert_eq!(x.quiver, y.quiver, "representations of different quivers");
    let d = x.dim();
    let arrows = x.quiver.arrows();
    let e: Vec<usize> = x.basis_vertex.iter().map(|&v| y.dims[v]).collect();
    let mut cons: Vec<Constraint> = Vec::new();
    for b in 0..d {
        for (ai, a) in arrows.iter().enumerate() {
            if a.source != x.basis_vertex[b] || y.dims[a.target] == 0 {
                continue;
            }
            let terms: Vec<(usize, Fe)> = (0..d)
                .filter_map(|c| {
                    let v = x.arrows[ai].get(c, b);
                    (!v.is_zero()).then_some((c, v))
                })
                .collect();
            if terms.is_empty() && (e[b] == 0 || y.arrows[ai].is_zero()) {
                continue;
            }
            let time = terms.iter().map(|t| t.0).max().unwrap_or(b).max(b);
            cons.push(Constraint {
                owner: b,
                arrow: ai,
                terms,
                time,
            });
        }
    }
    let mut last_use: Vec<usize> = (0..d).collect();
    let mut by_time: Vec<Vec<usize>> = vec![Vec::new(); d];
    let mut by_owner: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (k, c) in cons.iter().enumerate() {
        by_time[c.time].push(k);
        by_owner[c.owner].push(k);
        last_use[c.owner] = last_use[c.owner].max(c.time);
        for &(t, _) in &c.terms {
            last_use[t] = last_use[t].max(c.time);
        }
    }
    let mut wanted: Vec<usize> = sizes.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let mut out_map: HashMap<usize, usize> = HashMap::new();

    let mut pos: Vec<Option<usize>> = vec![None; d];
    let mut active: Vec<usize> = Vec::new();
    let mut w = Mat::zeros(0, 0);
    let mut nker = 0usize;
    let mut pending: BTreeSet<usize> = BTreeSet::new();

    let eval = |c: &Constraint, w: &Mat, pos: &[Option<usize>], upto: usize| -> Mat {
        let a = &x.quiver.arrows()[c.arrow];
        let rows = y.dims[a.target];
        let k = w.cols();
        let mut out = Mat::zeros(rows, k);
        if k == 0 {
            return out;
        }
        let ob = c.owner;
        if e[ob] > 0 {
            let wb = w.block(pos[ob].expect("owner active"), 0, e[ob], k);
            out = y.arrows[c.arrow].mul(f, &wb);
        }
        for &(t, coeff) in &c.terms {
            if t > upto {
                continue;
            }
            let wt = w.block(pos[t].expect("term active"), 0, e[t], k);
            out = out.add(&wt.scale(f, coeff));
        }
        out
    };

    for t in 0..d {
        // add block t
        pos[t] = Some(w.rows());
        active.push(t);
        w = w.direct_sum(&Mat::identity(e[t]));
        for &k in &by_owner[t] {
            if cons[k].time > t {
                pending.insert(k);
            }
        }
        for &k in &by_time[t] {
            pending.remove(&k);
            let kw = eval(&cons[k], &w, &pos, usize::MAX);
            if kw.rows() > 0 && w.cols() > 0 {
                let ns = kw.nullspace(f);
                w = w.mul(f, &ns);
            }
        }
        if wanted.binary_search(&(t + 1)).is_ok() {
            let mut stacked = Mat::zeros(0, w.cols());
            for &k in &pending {
                if cons[k].owner <= t {
                    stacked = stacked.vstack(&eval(&cons[k], &w, &pos, t));
                }
            }
            let r = if stacked.rows() == 0 {
                0
            } else {
                stacked.rank(f)
            };
            out_map.insert(t + 1, nker + w.cols() - r);
        }
        // retire blocks that no later constraint touches
        let retire: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&c| last_use[c] <= t)
            .collect();
        if !retire.is_empty() {
            let mut keep_rows = Vec::new();
            let mut new_active = Vec::new();
            let mut off = 0;
            for &c in &active {
                let p = pos[c].unwrap();
                if last_use[c] <= t {
                    pos[c] = None;
                } else {
                    keep_rows.extend(p..p + e[c]);
                    pos[c] = Some(off);
                    off += e[c];
                    new_active.push(c);
                }
            }
            active = new_active;
            let k = w.cols();
            let reduced = w.select_rows(&keep_rows);
            w = if k == 0 {
                reduced
            } else {
                reduced.col_basis(f)
            };
            nker += k - w.cols();
        }
    }
    sizes
        .iter()
        .map(|p| out_map.get(p).copied().unwrap_or(0))
        .collect()
}

/// dim Hom(X, Y) for two representations of the same group.
pub fn hom_dim(f: &Gf, x: &GroupRep, y: &GroupRep) -> Result<usize> {
    if x.group != y.group {
        return Err(Error::Unsupported("hom between different groups".into()));
    }
    if x.dim() == 0 || y.dim() == 0 {
        return Ok(0);
    }
    let xq = quiver_form(f, x)?;
    let yg = Graded::from_quiver_rep(&quiver_form(f, y)?);
    Ok(hom_prefixes(f, &xq, &yg, &[x.dim()])[0])
}

/// dim Hom(X, Y) from the full intertwiner system T g_X = g_Y T on all
/// generators. Quadratic in the number of unknowns; meant for cross-checks.
pub fn hom_dim_intertwiner(f: &Gf, x: &GroupRep, y: &GroupRep) -> usize {
    let (m, n) = (y.dim(), x.dim());
    if m == 0 || n == 0 {
        return 0;
    }
    let mut gens = vec![(&x.sigma, &y.sigma), (&x.tau, &y.tau)];
    if let (Some(a), Some(b)) = (&x.rho, &y.rho) {
        gens.push((a, b));
    }
    // unknown T[i][j] at column i*n + j
    let mut sys = Mat::zeros(gens.len() * m * n, m * n);
    for (g, (gx, gy)) in gens.iter().enumerate() {
        for i in 0..m {
            for j in 0..n {
                let row = g * m * n + i * n + j;
                // (T gx)[i][j] = Σ_k T[i][k] gx[k][j]
                for k in 0..n {
                    let c = gx.get(k, j);
                    if !c.is_zero() {
                        let col = i * n + k;
                        sys.set(row, col, f.add(sys.get(row, col), c));
                    }
                }
                // (gy T)[i][j] = Σ_k gy[i][k] T[k][j]
                for k in 0..m {
                    let c = gy.get(i, k);
                    if !c.is_zero() {
                        let col = k * n + j;
                        sys.set(row, col, f.add(sys.get(row, col), c));
                    }
                }
            }
        }
    }
    m * n - sys.rank(f)
}

/// Eigenvalue data of the pencil Y + λX on M/(ker X ∩ ker Y) → im X + im Y.
#[derive(Clone, Debug, Serialize)]
pub struct PencilSpectrum {
    /// Normal rank.
    pub rank: usize,
    /// Roots in the field of one maximal minor, with multiplicities.
    pub roots: Vec<(Fe, usize)>,
    /// Multiplicity of ∞ in the homogeneous minor.
    pub inf_mult: usize,
    /// Degree of the part of the minor without roots in the field.
    pub cofactor_deg: usize,
    #[serde(skip)]
    pub minor: Poly,
}

impl PencilSpectrum {
    /// Upper bound for the total size of regular blocks at `p`.
    pub fn mult(&self, p: Proj) -> usize {
        match p {
            Proj::Inf => self.inf_mult,
            Proj::Fin(a) => self
                .roots
                .iter()
                .find(|(r, _)| *r == a)
                .map_or(0, |(_, m)| *m),
        }
    }

    /// Nonzero μ with φ³ + μ dividing the minor, including μ that are not
    /// cubes in the field.
    pub fn band_mus(&self, f: &Gf) -> Vec<Fe> {
        let mut g = Poly::zero();
        for r in 0..3 {
            let q: Vec<Fe> = (0..)
                .map(|j| 3 * j + r)
                .take_while(|&k| k < self.minor.coeffs().len())
                .map(|k| self.minor.coeff(k))
                .collect();
            g = g.gcd(f, &Poly::new(q));
        }
        distinct_roots(f, &g)
            .into_iter()
            .filter(|m| !m.is_zero())
            .collect()
    }

    /// Multiplicity of φ³ + μ in the minor.
    pub fn band_mult(&self, f: &Gf, mu: Fe) -> usize {
        let d = Poly::new(vec![mu, Fe::ZERO, Fe::ZERO, Fe::ONE]);
        let mut m = self.minor.clone();
        let mut k = 0;
        while !m.is_zero() {
            let (q, r) = m.divrem(f, &d);
            if !r.is_zero() {
                break;
            }
            m = q;
            k += 1;
        }
        k
    }

    pub fn points(&self) -> Vec<Proj> {
        let mut v: Vec<Proj> = self.roots.iter().map(|(r, _)| Proj::Fin(*r)).collect();
        if self.inf_mult > 0 {
            v.push(Proj::Inf);
        }
        v
    }
}

/// Every maximal minor of a pencil is a multiple of the product of its
/// invariant factors, so root multiplicities of one minor bound the sizes of
/// the regular Kronecker blocks.
pub fn pencil_spectrum(f: &Gf, x: &Mat, y: &Mat) -> PencilSpectrum {
    let empty = PencilSpectrum {
        rank: 0,
        roots: Vec::new(),
        inf_mult: 0,
        cofactor_deg: 0,
        minor: Poly::zero(),
    };
    let r = x.hstack(y).col_basis(f);
    if r.cols() == 0 {
        return empty;
    }
    let piv = r.transpose().rref(f).pivots;
    let rp_inv = r
        .select_rows(&piv)
        .inverse(f)
        .expect("pivot rows are independent");
    let xr = rp_inv.mul(f, &x.select_rows(&piv));
    let yr = rp_inv.mul(f, &y.select_rows(&piv));
    let cols = xr.vstack(&yr).rref(f).pivots;
    let (xr, yr) = (xr.select_cols(&cols), yr.select_cols(&cols));
    let (nr, nc) = (xr.rows(), xr.cols());
    let mut a: Vec<Vec<Poly>> = (0..nr)
        .map(|i| {
            (0..nc)
                .map(|j| Poly::new(vec![yr.get(i, j), xr.get(i, j)]))
                .collect()
        })
        .collect();
    let mut prev = Poly::one();
    let mut rank = 0;
    for k in 0..nr.min(nc) {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, p) in row.iter().enumerate().skip(k) {
                if let Some(dg) = p.deg() {
                    if best.is_none_or(|b| dg < b.2) {
                        best = Some((i, j, dg));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let pivot = a[k][k].clone();
        for i in k + 1..nr {
            let aik = a[i][k].clone();
            for j in k + 1..nc {
                let num = pivot.mul(f, &a[i][j]).add(&aik.mul(f, &a[k][j]));
                a[i][j] = num.exact_div(f, &prev);
            }
            a[i][k] = Poly::zero();
        }
        prev = pivot;
        rank = k + 1;
    }
    if rank == 0 {
        return empty;
    }
    let deg = prev.deg().expect("nonzero minor");
    let (roots, rest) = roots_with_cofactor(f, &prev);
    PencilSpectrum {
        rank,
        roots,
        inf_mult: rank - deg,
        cofactor_deg: rest.deg().unwrap_or(0),
        minor: prev,
    }
}

/// Number of summands (Y^{-1}X)^n, n = 0..=max_n, of a module on which X, Y
/// act with XY = YX = X² = Y² = 0: the increments of dim(U_n ∩ ker Y) along
/// U_0 = ker X, U_{n+1} = X^{-1}(Y U_n). Entry 0 counts simple summands.
pub fn string_counts(f: &Gf, x: &Mat, y: &Mat, max_n: usize) -> Vec<usize> {
    let n = x.rows();
    let rad = x.hstack(y).rank(f);
    let mut u = x.nullspace(f);
    let mut out = Vec::with_capacity(max_n + 1);
    let mut prev = 0usize;
    for j in 0..=max_n {
        let c = u.cols() - y.mul(f, &u).rank(f);
        out.push(if j == 0 { c - rad } else { c - prev });
        prev = c;
        if j == max_n {
            break;
        }
        let yu = y.mul(f, &u);
        let ns = x.hstack(&yu).nullspace(f);
        let next = ns.block(0, 0, n, ns.cols()).col_basis(f);
        if next.cols() == u.cols() {
            out.resize(max_n + 1, 0);
            break;
        }
        u = next;
    }
    out
}

/// Certificate of a multiplicity computation.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// Candidate labels whose hom counts were checked.
    pub rows: Vec<String>,
    /// Candidates admitted as possible summands.
    pub columns: Vec<String>,
    /// gram[i][j] = dim Hom(row i, column j).
    pub gram: Vec<Vec<u64>>,
    /// dim Hom(row i, M).
    pub hom: Vec<u64>,
    pub spectrum: PencilSpectrum,
}

#[derive(Clone, Debug)]
pub struct MultiplicitySolution<L: ModuleLabel> {
    pub multiplicities: Decomposition<L>,
    pub residual_zero: bool,
    pub certificate: Certificate,
}

impl<L: ModuleLabel> MultiplicitySolution<L> {
    pub fn to_json(&self) -> Value {
        json!({
            "multiplicities": self.multiplicities.to_json(),
            "residual_zero": self.residual_zero,
            "certificate": self.certificate,
        })
    }
}

/// Modules read off the prefixes of one nested module: strings from a periodic
/// word, or bands of growing block size.
struct Family {
    x: QuiverRep,
    /// (basis size p, row index)
    rows: Vec<(usize, usize)>,
}

struct Rows<L> {
    labels: Vec<L>,
    index: HashMap<L, usize>,
    families: Vec<Family>,
    /// Rows computed one module at a time.
    singles: Vec<(usize, QuiverRep)>,
}

impl<L: ModuleLabel + std::hash::Hash> Rows<L> {
    fn new() -> Self {
        Rows {
            labels: Vec::new(),
            index: HashMap::new(),
            families: Vec::new(),
            singles: Vec::new(),
        }
    }

    fn push(&mut self, l: L) -> usize {
        if let Some(&i) = self.index.get(&l) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(l.clone());
        self.index.insert(l, i);
        i
    }

    fn add_family(
        &mut self,
        quiver: QuiverKind,
        pattern: &[Letter],
        offset: usize,
        max_p: usize,
        classify: impl Fn(usize) -> Option<L>,
    ) {
        let mut rows = Vec::new();
        for p in 2..=max_p {
            if let Some(l) = classify(p - 1) {
                rows.push((p, self.push(l)));
            }
        }
        let Some(&(top, _)) = rows.last() else {
            return;
        };
        let letters: Vec<Letter> = (0..top - 1)
            .map(|k| pattern[(offset + k) % pattern.len()])
            .collect();
        let w = StringWord::new(quiver, letters).expect("periodic words are strings");
        let x = string_module_matrices(&w).expect("valid string");
        self.families.push(Family { x, rows });
    }

    /// Bands M(w, k, μ) for k = 1..=max_k through one nested module.
    fn add_band_family(
        &mut self,
        w: &Band,
        mu: Fe,
        max_k: usize,
        label: impl Fn(usize) -> L,
    ) -> Result<()> {
        if max_k == 0 {
            return Ok(());
        }
        let l = w.letters.len();
        let rows = (1..=max_k).map(|k| (k * l, self.push(label(k)))).collect();
        let x = band_module_nested(w, max_k, mu)?;
        self.families.push(Family { x, rows });
        Ok(())
    }

    fn add_single(&mut self, l: L, rep: QuiverRep) {
        let i = self.push(l);
        self.singles.push((i, rep));
    }

    /// dim Hom(row, Y) for every row.
    fn hom_vector(&self, f: &Gf, y: &Graded) -> Vec<u64> {
        let mut out = vec![0u64; self.labels.len()];
        for fam in &self.families {
            let sizes: Vec<usize> = fam.rows.iter().map(|r| r.0).collect();
            let h = hom_prefixes(f, &fam.x, y, &sizes);
            for ((_, i), v) in fam.rows.iter().zip(h) {
                out[*i] = v as u64;
            }
        }
        for (i, rep) in &self.singles {
            out[*i] = hom_prefixes(f, rep, y, &[rep.dim()])[0] as u64;
        }
        out
    }
}

/// Exact solve of gram · n = hom over the rationals.
fn solve_counts(gram: &[Vec<u64>], hom: &[u64], ncols: usize) -> Result<Vec<u64>> {
    let nrows = gram.len();
    let mut a: Vec<Vec<BigRational>> = gram
        .iter()
        .zip(hom)
        .map(|(row, &h)| {
            row.iter()
                .chain(std::iter::once(&h))
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect()
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let s = row[c].clone();
                for (x, pv) in row.iter_mut().zip(&prow) {
                    *x = &*x - &s * pv;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[ncols].is_zero()) {
        return Err(Error::NoSolution(
            "hom counts are not a combination of candidate columns (nonzero residual)".into(),
        ));
    }
    if piv_cols.len() < ncols {
        return Err(Error::Ambiguous(format!(
            "Gram system has rank {} on {} candidate columns",
            piv_cols.len(),
            ncols
        )));
    }
    let mut sol = vec![0u64; ncols];
    for (i, &c) in piv_cols.iter().enumerate() {
        let v = &a[i][ncols];
        if !v.is_integer() || v.is_negative() {
            return Err(Error::NoSolution(format!(
                "multiplicity {v} for candidate column {c} is not a nonnegative integer"
            )));
        }
        sol[c] = v.to_integer().to_u64().expect("small multiplicity");
    }
    Ok(sol)
}

fn finish<L: ModuleLabel + std::hash::Hash + Send + Sync>(
    f: &Gf,
    m_dim: usize,
    rows: &Rows<L>,
    hom: Vec<u64>,
    columns: Vec<usize>,
    build: impl Fn(&L) -> Result<QuiverRep> + Sync,
    spectrum: PencilSpectrum,
) -> Result<MultiplicitySolution<L>> {
    let col_reps: Vec<Graded> = columns
        .iter()
        .map(|&j| build(&rows.labels[j]).map(|q| Graded::from_quiver_rep(&q)))
        .collect::<Result<_>>()?;
    let col_vectors: Vec<Vec<u64>> = col_reps.par_iter().map(|y| rows.hom_vector(f, y)).collect();
    let gram: Vec<Vec<u64>> = (0..rows.labels.len())
        .map(|i| col_vectors.iter().map(|c| c[i]).collect())
        .collect();
    let certificate = Certificate {
        rows: rows.labels.iter().map(ModuleLabel::key).collect(),
        columns: columns.iter().map(|&j| rows.labels[j].key()).collect(),
        gram: gram.clone(),
        hom: hom.clone(),
        spectrum,
    };
    let sol = solve_counts(&gram, &hom, columns.len()).map_err(|e| match e {
        Error::NoSolution(s) => Error::NoSolution(format!(
            "{s}; certificate: {}",
            serde_json::to_string(&certificate).unwrap_or_default()
        )),
        other => other,
    })?;
    let mut d = Decomposition::new();
    for (&j, &n) in columns.iter().zip(&sol) {
        d.add(rows.labels[j].clone(), n as i64)?;
    }
    if d.total_dim() as usize != m_dim {
        return Err(Error::NoSolution(format!(
            "recovered summands have total dimension {} but the module has dimension {m_dim}",
            d.total_dim()
        )));
    }
    Ok(MultiplicitySolution {
        multiplicities: d,
        residual_zero: true,
        certificate,
    })
}

/// dim of the space of chains P v_0 = 0, P v_k = Q v_{k-1} of length j, for
/// j = 1..=max_j. For the pencil Y + λX at a point, with Q another member of
/// the pencil, this is Σ max(0, j - ε) over right minimal indices plus
/// Σ min(j, s) over Jordan blocks of size s at that point.
fn chain_dims(f: &Gf, p: &Mat, q: &Mat, max_j: usize) -> Vec<usize> {
    let n = p.cols();
    let ker = p.nullspace(f);
    let rank_p = n - ker.cols();
    let mut last = ker.clone();
    let mut c = ker.cols();
    let mut out = vec![c];
    for _ in 1..max_j {
        let ql = q.mul(f, &last);
        let joint = p.hstack(&ql);
        let lift = last.cols() + rank_p - joint.rank(f);
        c = ker.cols() + c - last.cols() + lift;
        out.push(c);
        let ns = joint.nullspace(f);
        last = ns.block(0, 0, n, ns.cols()).col_basis(f);
    }
    out
}

/// Largest Jordan block of Y + λX at λ = `at`, using `generic`, which is not an
/// eigenvalue, to cancel the singular part.
fn max_jordan(f: &Gf, x: &Mat, y: &Mat, at: Proj, generic: Fe, max_j: usize) -> usize {
    let (p, q) = match at {
        Proj::Inf => (x.clone(), y.clone()),
        Proj::Fin(l) => (y.add(&x.scale(f, l)), x.clone()),
    };
    let pg = y.add(&x.scale(f, generic));
    let a = chain_dims(f, &p, &q, max_j + 1);
    let b = chain_dims(f, &pg, x, max_j + 1);
    // d[j] = Σ min(j, s) over blocks at `at`; it stops growing past the largest s.
    let d: Vec<usize> = std::iter::once(0)
        .chain(a.iter().zip(&b).map(|(u, v)| u.saturating_sub(*v)))
        .collect();
    (1..d.len()).rev().find(|&j| d[j] > d[j - 1]).unwrap_or(0)
}

/// Longest string row worth testing: every candidate string or even-dimensional
/// summand has dimension at most the returned value minus 2.
fn string_row_bound(
    f: &Gf,
    (x, y): (&Mat, &Mat),
    c1: &[usize],
    c2: &[usize],
    spec: &PencilSpectrum,
) -> usize {
    let n = x.rows();
    let odd = c1
        .iter()
        .zip(c2)
        .enumerate()
        .filter(|(_, (a, b))| **a > 0 || **b > 0)
        .map(|(k, _)| 2 * k + 1)
        .max()
        .unwrap_or(1);
    let generic = f
        .elements()
        .find(|&g| !g.is_zero() && spec.mult(Proj::Fin(g)) == 0);
    let even = match generic {
        Some(g) => {
            let cap = n / 2;
            2 * [Proj::Inf, Proj::Fin(Fe::ZERO)]
                .into_iter()
                .map(|at| max_jordan(f, x, y, at, g, cap))
                .max()
                .unwrap_or(0)
        }
        None => n,
    };
    (odd.max(even) + 2).min(n)
}

/// Solve with truncated string rows, falling back to full-length rows when the
/// truncated system does not pin down the multiplicities.
fn retry_full<T>(n: usize, bound: usize, attempt: impl Fn(usize) -> Result<T>) -> Result<T> {
    match attempt(bound) {
        Err(Error::Ambiguous(_) | Error::NoSolution(_)) if bound < n => attempt(n),
        r => r,
    }
}

/// Indecomposable multiplicities of a kH-module, labels in (A, B) coordinates.
/// `context` lists extra N_{2n,λ} parameters to consider.
pub fn decompose_kh(
    f: &Gf,
    m: &GroupRep,
    context: &[Proj],
) -> Result<MultiplicitySolution<KhLabel>> {
    m.validate(f)?;
    let m = if m.group == Group::G {
        m.restrict()
    } else {
        m.clone()
    };
    let n = m.dim();
    let (a, b) = (m.a(), m.b());
    if !a.mul(f, &b).is_zero() {
        return Err(Error::Unsupported(
            "AB != 0: the module has a projective summand".into(),
        ));
    }
    let spec = pencil_spectrum(f, &a, &b);
    let c1 = string_counts(f, &a, &b, n / 2);
    let c2 = string_counts(f, &b.transpose(), &a.transpose(), n / 2);

    let attempt = |max_p: usize| -> Result<MultiplicitySolution<KhLabel>> {
        let mut rows: Rows<KhLabel> = Rows::new();
        let qk = QuiverKind::KleinAB;
        rows.add_single(KhLabel::Triv, kh_quiver_rep(&KhLabel::Triv, KhCoords::AB)?);
        let pat1 = [Letter::inv(1), Letter::direct(0)];
        let pat2 = [Letter::direct(0), Letter::inv(1)];
        rows.add_family(qk, &pat1, 0, max_p, |l| {
            Some(if l % 2 == 0 {
                KhLabel::String {
                    dim: l as u64 + 1,
                    x: 1,
                }
            } else {
                KhLabel::EvenDim {
                    dim: l as u64 + 1,
                    lambda: Proj::Inf,
                }
            })
        });
        rows.add_family(qk, &pat2, 0, max_p, |l| {
            Some(if l % 2 == 0 {
                KhLabel::String {
                    dim: l as u64 + 1,
                    x: 2,
                }
            } else {
                KhLabel::EvenDim {
                    dim: l as u64 + 1,
                    lambda: Proj::Fin(Fe::ZERO),
                }
            })
        });
        let mut lambdas: Vec<Proj> = spec.points();
        lambdas.extend([Proj::Fin(f.zeta()), Proj::Fin(f.zeta_pow(2))]);
        lambdas.extend_from_slice(context);
        let lambdas: BTreeSet<Proj> = lambdas.into_iter().collect();
        for &l in &lambdas {
            let Proj::Fin(mu) = l else { continue };
            if mu.is_zero() {
                continue;
            }
            rows.add_band_family(&Band::klein_ab(), mu, spec.mult(l).min(n / 2), |k| {
                KhLabel::EvenDim {
                    dim: 2 * k as u64,
                    lambda: l,
                }
            })?;
        }
        let y = Graded::from_quiver_rep(&quiver_form(f, &m)?);
        let hom = rows.hom_vector(f, &y);

        let columns: Vec<usize> = (0..rows.labels.len())
            .filter(|&i| {
                hom[i] > 0
                    && match rows.labels[i] {
                        KhLabel::Triv => c1[0] > 0,
                        KhLabel::String { dim, x } => {
                            let k = (dim as usize - 1) / 2;
                            if x == 1 {
                                c1[k] > 0
                            } else {
                                c2[k] > 0
                            }
                        }
                        KhLabel::EvenDim { dim, lambda } => dim as usize / 2 <= spec.mult(lambda),
                    }
            })
            .collect();
        finish(
            f,
            n,
            &rows,
            hom,
            columns,
            |l| kh_quiver_rep(l, KhCoords::AB),
            spec.clone(),
        )
    };
    retry_full(n, string_row_bound(f, (&a, &b), &c1, &c2, &spec), attempt)
}

/// Indecomposable multiplicities of a kG-module. `context` lists extra kH
/// parameters λ whose band counterparts B_{6n,φ(λ)³} are considered.
pub fn decompose_kg(
    f: &Gf,
    m: &GroupRep,
    context: &[Proj],
) -> Result<MultiplicitySolution<KgLabel>> {
    if m.group != Group::G {
        return Err(Error::Unsupported(
            "decompose_kg needs a representation of G".into(),
        ));
    }
    m.validate(f)?;
    let n = m.dim();
    let (c, d) = (m.c(f), m.d(f));
    if !c.mul(f, &d).is_zero() {
        return Err(Error::Unsupported(
            "CD != 0: the module has a projective summand".into(),
        ));
    }
    let spec = pencil_spectrum(f, &c, &d);
    let c1 = string_counts(f, &c, &d, n / 2);
    let c2 = string_counts(f, &d.transpose(), &c.transpose(), n / 2);
    let q = quiver_form(f, m)?;
    let y = Graded::from_quiver_rep(&q);
    let simple_counts = simple_counts_graded(f, &y);

    let attempt = |max_p: usize| -> Result<MultiplicitySolution<KgLabel>> {
        let mut rows: Rows<KgLabel> = Rows::new();
        let qk = QuiverKind::A4;
        for i in 0..3u8 {
            let l = KgLabel::Simple { i };
            rows.add_single(l, kg_quiver_rep(&l)?);
        }
        for i in 0..3u8 {
            rows.add_family(qk, &P_DELTA, 2 * i as usize, max_p, |l| {
                Some(if l % 2 == 0 {
                    KgLabel::OddString {
                        dim: l as u64 + 1,
                        x: 1,
                        i,
                    }
                } else {
                    KgLabel::EvenString {
                        dim: l as u64 + 1,
                        star: Star::Inf,
                        i,
                    }
                })
            });
            rows.add_family(qk, &P_DELTA, 2 * i as usize + 1, max_p, |l| {
                (l % 2 == 0).then_some(KgLabel::OddString {
                    dim: l as u64 + 1,
                    x: 2,
                    i,
                })
            });
            rows.add_family(qk, &P_GAMMA, N_ZERO_OFFSET[i as usize], max_p, |l| {
                (l % 2 == 1).then_some(KgLabel::EvenString {
                    dim: l as u64 + 1,
                    star: Star::Zero,
                    i,
                })
            });
        }
        let mut mus: BTreeSet<Fe> = spec.band_mus(f).into_iter().collect();
        for &l in context {
            if let Proj::Fin(p) = f.phi_of_lambda(l) {
                if !p.is_zero() {
                    mus.insert(f.pow(p, 3));
                }
            }
        }
        let mut band_bound: HashMap<Fe, usize> = HashMap::new();
        for &mu in &mus {
            let bound = spec.band_mult(f, mu).min(n / 6);
            band_bound.insert(mu, bound);
            rows.add_band_family(&Band::a4(), mu, bound, |k| KgLabel::Band {
                dim: 6 * k as u64,
                mu,
            })?;
        }
        let hom = rows.hom_vector(f, &y);
        let columns: Vec<usize> = (0..rows.labels.len())
            .filter(|&i| {
                hom[i] > 0
                    && match rows.labels[i] {
                        KgLabel::Simple { i } => simple_counts[i as usize] > 0,
                        KgLabel::OddString { dim, x, .. } => {
                            let k = (dim as usize - 1) / 2;
                            if x == 1 {
                                c1[k] > 0
                            } else {
                                c2[k] > 0
                            }
                        }
                        KgLabel::EvenString { dim, star, .. } => {
                            let p = match star {
                                Star::Zero => Proj::Fin(Fe::ZERO),
                                Star::Inf => Proj::Inf,
                            };
                            dim as usize / 2 <= spec.mult(p)
                        }
                        KgLabel::Band { dim, mu } => dim as usize / 6 <= band_bound[&mu],
                    }
            })
            .collect();
        finish(f, n, &rows, hom, columns, kg_quiver_rep, spec.clone())
    };
    retry_full(n, string_row_bound(f, (&c, &d), &c1, &c2, &spec), attempt)
}

/// Simple summands at each vertex: socle vectors outside the radical.
fn simple_counts_graded(f: &Gf, y: &Graded) -> Vec<usize> {
    let q = y.quiver;
    (0..q.vertices())
        .map(|v| {
            let dv = y.dims[v];
            if dv == 0 {
                return 0;
            }
            let mut out_maps = Mat::zeros(0, dv);
            let mut in_maps = Mat::zeros(dv, 0);
            for (ai, a) in q.arrows().iter().enumerate() {
                if a.source == v {
                    out_maps = out_maps.vstack(&y.arrows[ai]);
                }
                if a.target == v {
                    in_maps = in_maps.hstack(&y.arrows[ai]);
                }
            }
            let ker = dv - out_maps.rank(f);
            ker - in_maps.rank(f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{KgDecomposition, KhDecomposition};
    use crate::zoo::{kg_rep, kg_sum, kh_rep, kh_sum};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f4() -> Gf {
        Gf::new(4).unwrap()
    }

    #[test]
    fn simple_homs() {
        let f = f4();
        for i in 0..3u8 {
            for j in 0..3u8 {
                let a = kg_rep(&f, &KgLabel::Simple { i }).unwrap();
                let b = kg_rep(&f, &KgLabel::Simple { i: j }).unwrap();
                assert_eq!(hom_dim(&f, &a, &b).unwrap(), usize::from(i == j));
            }
        }
    }

    #[test]
    fn two_dim_homs() {
        let f = f4();
        let n = |l: Fe| {
            kh_rep(
                &f,
                &KhLabel::EvenDim {
                    dim: 2,
                    lambda: Proj::Fin(l),
                },
            )
            .unwrap()
        };
        assert_eq!(hom_dim(&f, &n(Fe(2)), &n(Fe(2))).unwrap(), 2);
        assert_eq!(hom_dim(&f, &n(Fe(2)), &n(Fe(3))).unwrap(), 1);
        let triv = kh_rep(&f, &KhLabel::Triv).unwrap();
        let s0 = kg_rep(&f, &KgLabel::Simple { i: 0 }).unwrap();
        assert_eq!(hom_dim(&f, &triv.induce(&f), &s0).unwrap(), 1);
    }

    #[test]
    fn chain_matches_intertwiner() {
        let f = f4();
        let labels = crate::zoo::tests::small_kg_labels(&f, 7);
        for a in &labels {
            for b in &labels {
                let (x, y) = (kg_rep(&f, a).unwrap(), kg_rep(&f, b).unwrap());
                assert_eq!(
                    hom_dim(&f, &x, &y).unwrap(),
                    hom_dim_intertwiner(&f, &x, &y),
                    "{} -> {}",
                    a.key(),
                    b.key()
                );
            }
        }
        let hl = crate::zoo::tests::small_kh_labels(&f, 6);
        for a in &hl {
            for b in &hl {
                let (x, y) = (kh_rep(&f, a).unwrap(), kh_rep(&f, b).unwrap());
                assert_eq!(
                    hom_dim(&f, &x, &y).unwrap(),
                    hom_dim_intertwiner(&f, &x, &y)
                );
            }
        }
    }

    #[test]
    fn prefixes_match_full_modules() {
        let f = f4();
        let y = kg_sum(
            &f,
            &[
                (KgLabel::OddString { dim: 5, x: 1, i: 0 }, 1),
                (
                    KgLabel::EvenString {
                        dim: 4,
                        star: Star::Inf,
                        i: 2,
                    },
                    2,
                ),
                (KgLabel::Band { dim: 6, mu: Fe(2) }, 1),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let yg = Graded::from_quiver_rep(&quiver_form(&f, &y).unwrap());
        let big = kg_quiver_rep(&KgLabel::OddString {
            dim: 11,
            x: 1,
            i: 1,
        })
        .unwrap();
        let sizes: Vec<usize> = (1..=11).collect();
        let h = hom_prefixes(&f, &big, &yg, &sizes);
        for p in 2..=11usize {
            let w = crate::zoo::periodic_word(&P_DELTA, 2, p - 1);
            let x = kg_rep(&f, &kg_label_of(&w)).unwrap();
            assert_eq!(h[p - 1], hom_dim_intertwiner(&f, &x, &y), "prefix {p}");
        }
    }

    #[test]
    fn band_prefixes_match_single_bands() {
        let f = f4();
        let mu = Fe(2);
        let y = kg_sum(
            &f,
            &[
                (KgLabel::Band { dim: 12, mu }, 1),
                (KgLabel::Band { dim: 6, mu }, 2),
                (
                    KgLabel::EvenString {
                        dim: 4,
                        star: Star::Zero,
                        i: 1,
                    },
                    1,
                ),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let yg = Graded::from_quiver_rep(&quiver_form(&f, &y).unwrap());
        let big = band_module_nested(&Band::a4(), 3, mu).unwrap();
        let h = hom_prefixes(&f, &big, &yg, &[6, 12, 18]);
        for k in 1..=3u64 {
            let x = kg_rep(&f, &KgLabel::Band { dim: 6 * k, mu }).unwrap();
            assert_eq!(
                h[k as usize - 1],
                hom_dim_intertwiner(&f, &x, &y),
                "k = {k}"
            );
        }
    }

    #[test]
    fn jordan_sizes_ignore_singular_part() {
        let f = f4();
        let y = kg_sum(
            &f,
            &[
                (
                    KgLabel::EvenString {
                        dim: 8,
                        star: Star::Inf,
                        i: 0,
                    },
                    1,
                ),
                (
                    KgLabel::EvenString {
                        dim: 4,
                        star: Star::Zero,
                        i: 1,
                    },
                    2,
                ),
                (KgLabel::OddString { dim: 9, x: 1, i: 2 }, 1),
                (KgLabel::OddString { dim: 5, x: 2, i: 0 }, 1),
                (KgLabel::Band { dim: 6, mu: Fe(2) }, 1),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let (c, d) = (y.c(&f), y.d(&f));
        let spec = pencil_spectrum(&f, &c, &d);
        let g = f
            .elements()
            .find(|&g| !g.is_zero() && spec.mult(Proj::Fin(g)) == 0)
            .unwrap();
        let mut sizes: Vec<usize> = [Proj::Inf, Proj::Fin(Fe::ZERO)]
            .into_iter()
            .map(|at| max_jordan(&f, &c, &d, at, g, y.dim() / 2))
            .collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 4]);
    }

    fn kg_label_of(w: &StringWord) -> KgLabel {
        let l = w.len() as u64;
        if l.is_multiple_of(2) {
            KgLabel::OddString {
                dim: l + 1,
                x: 1,
                i: 1,
            }
        } else {
            KgLabel::EvenString {
                dim: l + 1,
                star: Star::Inf,
                i: 1,
            }
        }
    }

    #[test]
    fn spectrum_of_bands() {
        let f = f4();
        let g = kg_rep(&f, &KgLabel::Band { dim: 12, mu: Fe(2) }).unwrap();
        let s = pencil_spectrum(&f, &g.c(&f), &g.d(&f));
        assert_eq!(s.rank, 6);
        for p in f.cube_roots(Fe(2)) {
            assert_eq!(s.mult(Proj::Fin(p)), 2);
        }
    }

    #[test]
    fn decompose_examples() {
        let f = f4();
        let d: KgDecomposition = [
            (KgLabel::Simple { i: 0 }, 1),
            (KgLabel::OddString { dim: 3, x: 1, i: 1 }, 1),
        ]
        .into_iter()
        .collect();
        let sol = decompose_kg(&f, &kg_sum(&f, &d).unwrap(), &[]).unwrap();
        assert_eq!(sol.multiplicities, d);
        assert!(sol.residual_zero);

        let phi = Fe(2);
        let band = kg_rep(
            &f,
            &KgLabel::Band {
                dim: 6,
                mu: f.pow(phi, 3),
            },
        )
        .unwrap();
        let sol = decompose_kh(&f, &band.restrict(), &[]).unwrap();
        let lam = match f.lambda_of_phi(Proj::Fin(phi)) {
            Proj::Fin(l) => l,
            Proj::Inf => unreachable!(),
        };
        // λ, (1+λ)/λ and 1/(1+λ)
        let expect: KhDecomposition = [
            lam,
            f.div(f.add(Fe::ONE, lam), lam),
            f.inv(f.add(Fe::ONE, lam)),
        ]
        .into_iter()
        .map(|l| {
            (
                KhLabel::EvenDim {
                    dim: 2,
                    lambda: Proj::Fin(l),
                },
                1,
            )
        })
        .collect();
        assert_eq!(sol.multiplicities, expect);
    }

    #[test]
    fn random_multisets_round_trip() {
        let f = Gf::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let labels = crate::zoo::tests::small_kg_labels(&f, 14);
        for _ in 0..20 {
            let mut d = KgDecomposition::new();
            let mut total = 0;
            while total < 40 {
                let l = labels[rng.gen_range(0..labels.len())];
                total += l.dim();
                d.add(l, 1).unwrap();
            }
            let sol = decompose_kg(&f, &kg_sum(&f, &d).unwrap(), &[]);
            assert_eq!(sol.unwrap().multiplicities, d);
            let hl = crate::zoo::tests::small_kh_labels(&f, 10);
            let mut e = KhDecomposition::new();
            for _ in 0..4 {
                e.add(hl[rng.gen_range(0..hl.len())], 1).unwrap();
            }
            let sol = decompose_kh(&f, &kh_sum(&f, &e).unwrap(), &[]).unwrap();
            assert_eq!(sol.multiplicities, e);
        }
    }
}
