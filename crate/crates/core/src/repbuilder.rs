//! Explicit σ, τ, ρ on the basis of holomorphic differentials indexed by
//! (branch point, family, index).
//!
//! σ and τ are the literal H-action table on each point block. ρ is exact on
//! the socles (ζ-powers at ∞ and 0, the 2×2 action on the extra socle when
//! there are no special points) and orbit blocks are induced from their
//! representative point. On the remaining top vectors ρ is the unique, up to
//! isomorphism, extension making the C/D-action graded; basis changes the
//! construction does not need are not reconstructed.

use serde::Serialize;
use serde_json::{json, Value};

use crate::decomp::{mu_nu, MuNu};
use crate::error::{Error, Result};
use crate::gf::{Fe, Gf, Proj};
use crate::linalg::Mat;
use crate::ramification::{BranchPoint, Case, RamData};
use crate::zoo::{Group, GroupRep};

/// f_{y,family,index}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BasisLabel {
    /// Position of y in the canonical branch point order.
    pub point_order: usize,
    pub point: String,
    pub family: u8,
    pub index: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockPlan {
    pub kind: &'static str,
    pub points: Vec<String>,
    pub dim: usize,
    /// n_y = μ₂ - μ₁ with Θ, Θ₁, Θ₂ as row masks, for special points.
    pub n_y: Option<i64>,
    pub theta: Option<Vec<Vec<u64>>>,
    pub theta1: Option<Vec<Vec<u64>>>,
    pub theta2: Option<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug)]
pub struct GlobalRep {
    pub rep: GroupRep,
    pub labels: Vec<BasisLabel>,
    pub block_plan: Vec<BlockPlan>,
    /// θ-correction terms that fell outside family 1 and were dropped.
    pub notes: Vec<String>,
}

impl GlobalRep {
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.rep.dim(),
            "labels": self.labels,
            "sigma": self.rep.sigma.to_masks(),
            "tau": self.rep.tau.to_masks(),
            "rho": self.rep.rho().to_masks(),
            "block_plan": self.block_plan,
            "notes": self.notes,
        })
    }
}

/// A block with its labels and σ - 1, τ - 1.
struct HBlock {
    labels: Vec<BasisLabel>,
    a: Mat,
    b: Mat,
}

/// The H-action table at one point, indices a(y)..=top capped at `cap`.
fn point_table(
    f: &Gf,
    bp: &BranchPoint,
    mn: &MuNu,
    order: usize,
    lo: i64,
    cap: Option<i64>,
    notes: &mut Vec<String>,
) -> Result<HBlock> {
    let k = mn.k_y;
    let c = |hi: i64| cap.map_or(hi, |c| hi.min(c));
    let hi = [c(mn.mu3 + mn.nu + k), c(mn.mu1 + mn.nu + k), c(mn.mu2 + k)];
    let key = bp.place.key();
    let mut labels = Vec::new();
    for fam in 0..3u8 {
        for i in lo..=hi[fam as usize] {
            labels.push(BasisLabel {
                point_order: order,
                point: key.clone(),
                family: fam + 1,
                index: i,
            });
        }
    }
    let n = labels.len();
    let pos = |fam: u8, i: i64| -> Option<usize> {
        (lo..=hi[fam as usize - 1]).contains(&i).then(|| {
            (0..fam as usize - 1)
                .map(|g| (hi[g] - lo + 1).max(0) as usize)
                .sum::<usize>()
                + (i - lo) as usize
        })
    };
    // X = σ_y - 1, Y = τ_y - 1
    let mut x = Mat::zeros(n, n);
    let mut y = Mat::zeros(n, n);
    for i in lo..=hi[1] {
        y.set(
            pos(1, i).expect("f1 covers f2 range"),
            pos(2, i).unwrap(),
            Fe::ONE,
        );
    }
    for i in lo..=hi[2] {
        let col = pos(3, i).unwrap();
        x.set(pos(1, i).expect("f1 covers f3 range"), col, Fe::ONE);
        if i > mn.mu1 + k {
            for t in 0..=(i - mn.mu1 - k - 1) {
                let th = *bp.theta.get(t as usize).ok_or_else(|| Error::ThetaRange {
                    place: key.clone(),
                    needed: t,
                    available: bp.theta.len() as i64 - 1,
                })?;
                let target = i + mn.nu - t;
                match pos(1, target) {
                    Some(row) => y.set(row, col, f.add(y.get(row, col), th)),
                    None if !th.is_zero() => notes.push(format!(
                        "{key}: theta_{t} term f_(1,{target}) of f_(3,{i}) lies outside family 1"
                    )),
                    None => {}
                }
            }
        }
    }
    let (a, b) = match bp.case {
        Case::Equal | Case::SmallAlpha => (x, y),
        Case::SmallRho => (y, x),
        // σ = σ_y τ_y with XY = 0
        Case::SmallRho2 => (x.add(&y).add(&x.mul(f, &y)), y),
    };
    Ok(HBlock { labels, a, b })
}

/// ρ on an H-module whose socle is `socle` (columns) with ρ = ζ^{verts[i]} on
/// column i: the grading of the top forced by C raising and D lowering the
/// ρ-eigenvalue.
pub fn graded_rho(f: &Gf, a: &Mat, b: &Mat, socle: &Mat, verts: &[usize]) -> Result<Mat> {
    let n = a.rows();
    let s = socle.cols();
    let z = f.zeta();
    let z2 = f.zeta_pow(2);
    let ab = a.mul(f, b);
    let c = a.scale(f, z).add(&b.scale(f, z2)).add(&ab);
    let d = a.add(&b.scale(f, z2)).add(&ab.scale(f, z));
    let unsupported = |why: &str| Error::Unsupported(format!("rho extension: {why}"));
    let soc_rank = socle.rank(f);
    if soc_rank != s {
        return Err(unsupported("socle columns are dependent"));
    }
    if socle.hstack(a).hstack(b).rank(f) != s {
        return Err(unsupported("radical is not inside the socle"));
    }
    if a.vstack(b).nullspace(f).cols() != s
        || !a.mul(f, socle).is_zero()
        || !b.mul(f, socle).is_zero()
    {
        return Err(unsupported("socle is not the fixed space of H"));
    }
    let p = socle.transpose().rref(f).pivots;
    let top: Vec<usize> = (0..n).filter(|i| !p.contains(i)).collect();
    let q = socle
        .select_rows(&p)
        .inverse(f)
        .expect("pivot rows are independent");
    // socle coordinates of C and D applied to top coordinates
    let cs = q.mul(f, &c.select_rows(&p).select_cols(&top));
    let ds = q.mul(f, &d.select_rows(&p).select_cols(&top));
    let t = top.len();
    let mut cols: Vec<(usize, Vec<Fe>)> = (0..s).map(|i| (verts[i] % 3, socle.col(i))).collect();
    for v in 0..3 {
        let mut k = Mat::zeros(0, t);
        for i in 0..s {
            if verts[i] % 3 != (v + 1) % 3 {
                k = k.vstack(&cs.select_rows(&[i]));
            }
            if verts[i] % 3 != (v + 2) % 3 {
                k = k.vstack(&ds.select_rows(&[i]));
            }
        }
        let w = if k.rows() == 0 {
            Mat::identity(t)
        } else {
            k.nullspace(f)
        };
        for j in 0..w.cols() {
            let mut full = vec![Fe::ZERO; n];
            for (r, &ti) in top.iter().enumerate() {
                full[ti] = w.get(r, j);
            }
            cols.push((v, full));
        }
    }
    if cols.len() != n {
        return Err(unsupported(&format!(
            "graded top has dimension {} but the top has dimension {t}",
            cols.len() - s
        )));
    }
    let basis = Mat::from_cols(n, &cols.iter().map(|c| c.1.clone()).collect::<Vec<_>>());
    let inv = basis
        .inverse(f)
        .ok_or_else(|| unsupported("graded pieces are not independent"))?;
    let diag = Mat::diag(
        &cols
            .iter()
            .map(|c| f.zeta_pow(c.0 as i64))
            .collect::<Vec<_>>(),
    );
    Ok(basis.mul(f, &diag).mul(f, &inv))
}

fn unit_cols(n: usize, idx: &[usize]) -> Mat {
    let mut m = Mat::zeros(n, idx.len());
    for (j, &i) in idx.iter().enumerate() {
        m.set(i, j, Fe::ONE);
    }
    m
}

fn family1_indices(labels: &[BasisLabel]) -> Vec<usize> {
    (0..labels.len())
        .filter(|&i| labels[i].family == 1)
        .collect()
}

/// Θ with entry (r, c) = θ_{c-r} for c - r ≥ δ, zero when δ ∈ {0, n}.
pub fn theta_matrix(bp: &BranchPoint, n: i64) -> Mat {
    let n_us = n.max(0) as usize;
    let mut m = Mat::zeros(n_us, n_us);
    if bp.delta == 0 || bp.delta == n || bp.delta < 0 {
        return m;
    }
    for r in 0..n_us {
        for c in r..n_us {
            let d = (c - r) as i64;
            if d >= bp.delta {
                if let Some(&t) = bp.theta.get(d as usize) {
                    m.set(r, c, t);
                }
            }
        }
    }
    m
}

pub fn build_global_rep(data: &RamData) -> Result<GlobalRep> {
    let f = &data.field;
    let r = data.r();
    let mut notes = Vec::new();
    let mut parts: Vec<GroupRep> = Vec::new();
    let mut labels: Vec<BasisLabel> = Vec::new();
    let mut plan = Vec::new();

    for (order, bp) in data.special.iter().enumerate() {
        let mn = mu_nu(bp, data);
        let eps = bp.epsilon.expect("special point carries epsilon");
        let blk = point_table(f, bp, &mn, order, mn.a_y, None, &mut notes)?;
        let n = blk.labels.len();
        let soc = family1_indices(&blk.labels);
        let verts: Vec<usize> = soc
            .iter()
            .map(|&i| (1 - eps * blk.labels[i].index).rem_euclid(3) as usize)
            .collect();
        let rho = graded_rho(f, &blk.a, &blk.b, &unit_cols(n, &soc), &verts)?;
        parts.push(GroupRep::new_g(
            Mat::identity(n).add(&blk.a),
            Mat::identity(n).add(&blk.b),
            rho,
        ));
        let n_y = mn.mu2 - mn.mu1;
        let theta = theta_matrix(bp, n_y);
        let id = Mat::identity(n_y.max(0) as usize);
        let (t1, t2) = if bp.lambda == Proj::Fin(f.zeta()) {
            (id.add(&theta), theta.clone())
        } else {
            (theta.clone(), id.add(&theta))
        };
        plan.push(BlockPlan {
            kind: "special",
            points: vec![bp.place.key()],
            dim: n,
            n_y: Some(n_y),
            theta: Some(theta.to_masks()),
            theta1: Some(t1.to_masks()),
            theta2: Some(t2.to_masks()),
        });
        labels.extend(blk.labels);
    }

    for (j, orbit) in data.orbits.iter().enumerate() {
        let base = r + 3 * j;
        let y = &orbit.points[0];
        let mn = mu_nu(y, data);
        let blk = point_table(f, y, &mn, base, mn.a_y, None, &mut notes)?;
        let n = blk.labels.len();
        let h = GroupRep::new_h(Mat::identity(n).add(&blk.a), Mat::identity(n).add(&blk.b));
        let ind = h.induce(f);
        // basis: U_y, then ρ^{-1}U_y (block 2) for y', then ρ^{-2}U_y (block 1) for y''
        let mut change = Mat::zeros(3 * n, 3 * n);
        let mut orbit_labels = blk.labels.clone();
        for (slot, (src_block, power)) in [(0usize, 0i64), (2, 1), (1, 2)].into_iter().enumerate() {
            for (i, l) in blk.labels.iter().enumerate() {
                // ρ^{-p} f_{y,·,a} = ζ^{p(a-1)} f_{y^(p),·,a}; ζ^p at a = 1 when r = 0
                let e = if r == 0 && l.index == 1 {
                    1
                } else {
                    l.index - 1
                };
                change.set(src_block * n + i, slot * n + i, f.zeta_pow(-power * e));
                if slot > 0 {
                    orbit_labels.push(BasisLabel {
                        point_order: base + slot,
                        point: orbit.points[slot].place.key(),
                        ..l.clone()
                    });
                }
            }
        }
        let inv = change.inverse(f).expect("monomial change of basis");
        let conj = |m: &Mat| inv.mul(f, m).mul(f, &change);
        parts.push(GroupRep::new_g(
            conj(&ind.sigma),
            conj(&ind.tau),
            conj(ind.rho()),
        ));
        plan.push(BlockPlan {
            kind: "orbit",
            points: orbit.points.iter().map(|p| p.place.key()).collect(),
            dim: 3 * n,
            n_y: None,
            theta: None,
            theta1: None,
            theta2: None,
        });
        labels.extend(orbit_labels);
    }

    if r == 0 {
        let orbit = data
            .orbits
            .first()
            .ok_or_else(|| Error::Unsupported("no branch points".into()))?;
        let mut blocks = Vec::new();
        for slot in 1..3 {
            let bp = &orbit.points[slot];
            let mn = mu_nu(bp, data);
            blocks.push(point_table(f, bp, &mn, slot, 1, Some(1), &mut notes)?);
        }
        let n: usize = blocks.iter().map(|b| b.labels.len()).sum();
        let a = blocks[0].a.direct_sum(&blocks[1].a);
        let b = blocks[0].b.direct_sum(&blocks[1].b);
        let mut dl: Vec<BasisLabel> = blocks.iter().flat_map(|b| b.labels.clone()).collect();
        let soc = family1_indices(&dl);
        let (p1, p2) = (soc[0], soc[1]);
        // ρ f' = f' + ζ f'', ρ f'' = ζ² f': eigenvectors f' + f'' (ζ) and ζ f' + f'' (ζ²)
        let mut socle = Mat::zeros(n, 2);
        socle.set(p1, 0, Fe::ONE);
        socle.set(p2, 0, Fe::ONE);
        socle.set(p1, 1, f.zeta());
        socle.set(p2, 1, Fe::ONE);
        let rho = graded_rho(f, &a, &b, &socle, &[1, 2])?;
        parts.push(GroupRep::new_g(
            Mat::identity(n).add(&a),
            Mat::identity(n).add(&b),
            rho,
        ));
        plan.push(BlockPlan {
            kind: "dagger",
            points: orbit.points[1..].iter().map(|p| p.place.key()).collect(),
            dim: n,
            n_y: None,
            theta: None,
            theta1: None,
            theta2: None,
        });
        labels.append(&mut dl);
    }

    let rep = GroupRep::direct_sum_all(Group::G, &parts);
    // canonical order: points, then family, then index
    let mut perm: Vec<usize> = (0..labels.len()).collect();
    perm.sort_by(|&i, &j| labels[i].cmp(&labels[j]));
    let permute = |m: &Mat| m.select_rows(&perm).select_cols(&perm);
    let rep = GroupRep::new_g(permute(&rep.sigma), permute(&rep.tau), permute(rep.rho()));
    let labels: Vec<BasisLabel> = perm.iter().map(|&i| labels[i].clone()).collect();
    if rep.dim() as i64 != data.genus {
        return Err(Error::Inconsistent(format!(
            "global representation has dimension {} but the genus is {}",
            rep.dim(),
            data.genus
        )));
    }
    rep.validate(f)?;
    Ok(GlobalRep {
        rep,
        labels,
        block_plan: plan,
        notes,
    })
}

/// λ-values of the orbits, as context for the oracle.
pub fn orbit_context(data: &RamData) -> Vec<Proj> {
    data.orbits
        .iter()
        .flat_map(|o| o.points.iter().map(|p| p.lambda))
        .collect()
}
