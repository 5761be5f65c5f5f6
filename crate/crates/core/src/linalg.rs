//! Dense matrices over GF(2^m).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub mat: Mat,
    pub pivots: Vec<usize>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        Mat::scalar(n, Fe::ONE)
    }

    pub fn scalar(n: usize, c: Fe) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn diag(entries: &[Fe]) -> Mat {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, &c) in entries.iter().enumerate() {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Mat {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Mat {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Fe>) -> Mat {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Fe>]) -> Mat {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Fe) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == if i == j { Fe::ONE } else { Fe::ZERO })
            })
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| Fe(a.0 ^ b.0))
                .collect(),
        }
    }

    pub fn scale(&self, f: &Gf, c: Fe) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, f: &Gf, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                if a == Fe::ONE {
                    for (o, &b) in orow.iter_mut().zip(brow) {
                        o.0 ^= b.0;
                    }
                } else {
                    for (o, &b) in orow.iter_mut().zip(brow) {
                        if !b.is_zero() {
                            o.0 ^= f.mul(a, b).0;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &Gf, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = 0u64;
                for (&a, &b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s ^= f.mul(a, b).0;
                    }
                }
                Fe(s)
            })
            .collect()
    }

    pub fn pow(&self, f: &Gf, e: u32) -> Mat {
        assert!(self.is_square());
        let mut r = Mat::identity(self.rows);
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut m = Mat::zeros(self.rows + other.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, self.cols, other);
        m
    }

    pub fn block_diag(blocks: &[Mat]) -> Mat {
        let rows = blocks.iter().map(Mat::rows).sum();
        let cols = blocks.iter().map(Mat::cols).sum();
        let mut m = Mat::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            m.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for i in 0..b.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(r0 + i, c0 + j));
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Mat::from_vec(idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m.set(i, jj, self.get(i, j));
            }
        }
        m
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat::from_vec(self.rows + other.rows, self.cols, data)
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, other);
        m
    }

    /// Reduced row echelon form, pivoting on columns left to right.
    pub fn rref(&self, f: &Gf) -> Rref {
        let mut m = self.clone();
        let pivots = m.rref_in_place(f);
        Rref { mat: m, pivots }
    }

    fn rref_in_place(&mut self, f: &Gf) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = f.inv(self.get(r, c));
            if inv != Fe::ONE {
                for x in &mut self.data[r * cols + c..(r + 1) * cols] {
                    *x = f.mul(*x, inv);
                }
            }
            let (before, rest) = self.data.split_at_mut(r * cols);
            let (prow, after) = rest.split_at_mut(cols);
            let elim = |row: &mut [Fe]| {
                let a = row[c];
                if a.is_zero() {
                    return;
                }
                for (x, &p) in row[c..].iter_mut().zip(&prow[c..]) {
                    if !p.is_zero() {
                        x.0 ^= f.mul(a, p).0;
                    }
                }
            };
            before.chunks_mut(cols).for_each(elim);
            after.chunks_mut(cols).for_each(elim);
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Rank by forward elimination only.
    pub fn rank(&self, f: &Gf) -> usize {
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c));
            let (head, tail) = m.data.split_at_mut((r + 1) * cols);
            let prow = &head[r * cols..];
            for row in tail.chunks_mut(cols) {
                let a = row[c];
                if a.is_zero() {
                    continue;
                }
                let s = f.mul(a, inv);
                for (x, &p) in row[c..].iter_mut().zip(&prow[c..]) {
                    if !p.is_zero() {
                        x.0 ^= f.mul(s, p).0;
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of the right kernel, as the columns of a `cols x nullity` matrix.
    pub fn nullspace(&self, f: &Gf) -> Mat {
        let Rref { mat, pivots } = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Mat::zeros(self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, Fe::ONE);
            for (i, &pc) in pivots.iter().enumerate() {
                k.set(pc, j, mat.get(i, fc));
            }
        }
        k
    }

    /// Basis of the column space, as a matrix with independent columns.
    pub fn col_basis(&self, f: &Gf) -> Mat {
        let t = self.transpose().rref(f);
        t.mat
            .select_rows(&(0..t.pivots.len()).collect::<Vec<_>>())
            .transpose()
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self, f: &Gf) -> Option<Mat> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Some(Mat::zeros(0, 0));
        }
        let aug = self.hstack(&Mat::identity(n)).rref(f);
        if aug.pivots.len() < n || aug.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(aug.mat.block(0, n, n, n))
    }

    /// Some solution x of `self * x = b` (b a matrix of right-hand sides).
    pub fn solve(&self, f: &Gf, b: &Mat) -> Result<Mat> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hstack(b).rref(f);
        if aug.pivots.iter().any(|&p| p >= self.cols) {
            return Err(Error::NoSolution("inconsistent linear system".into()));
        }
        let mut x = Mat::zeros(self.cols, b.cols);
        for (i, &p) in aug.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(p, j, aug.mat.get(i, self.cols + j));
            }
        }
        Ok(x)
    }

    /// Rows as bit-mask integers, for JSON output.
    pub fn to_masks(&self) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.0).collect())
            .collect()
    }

    pub fn from_masks(f: &Gf, rows: &[Vec<u64>]) -> Result<Mat> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Parse("ragged matrix rows".into()));
            }
            for &x in r {
                data.push(f.elem(x)?);
            }
        }
        Ok(Mat::from_vec(rows.len(), cols, data))
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.0.to_string()).collect();
            writeln!(fm, "[{}]", r.join(" "))?;
        }
        Ok(())
    }
}

/// Dimension of the intersection of two column spaces.
pub fn intersection_dim(f: &Gf, a: &Mat, b: &Mat) -> usize {
    a.rank(f) + b.rank(f) - a.hstack(b).rank(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(f: &Gf, rng: &mut ChaCha8Rng, r: usize, c: usize, density: f64) -> Mat {
        let mut m = Mat::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                if rng.gen_bool(density) {
                    m.set(i, j, f.random(rng));
                }
            }
        }
        m
    }

    #[test]
    fn inverse_round_trip() {
        let f = Gf::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut found = 0;
        while found < 10 {
            let a = random_mat(&f, &mut rng, 5, 5, 0.8);
            if let Some(inv) = a.inverse(&f) {
                assert!(a.mul(&f, &inv).is_identity());
                assert!(inv.mul(&f, &a).is_identity());
                found += 1;
            } else {
                assert!(a.rank(&f) < 5);
            }
        }
    }

    #[test]
    fn solve_and_nullspace() {
        let f = Gf::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_mat(&f, &mut rng, 4, 7, 0.7);
        let k = a.nullspace(&f);
        assert_eq!(k.cols(), 7 - a.rank(&f));
        assert!(a.mul(&f, &k).is_zero());
        let x0 = random_mat(&f, &mut rng, 7, 2, 1.0);
        let b = a.mul(&f, &x0);
        let x = a.solve(&f, &b).unwrap();
        assert_eq!(a.mul(&f, &x), b);
    }

    #[test]
    fn masks_round_trip() {
        let f = Gf::new(2).unwrap();
        let m = Mat::from_rows(&[vec![Fe(1), Fe(2)], vec![Fe(3), Fe(0)]]);
        assert_eq!(Mat::from_masks(&f, &m.to_masks()).unwrap(), m);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_of_product_is_bounded(seed in any::<u64>(), r in 1usize..7, k in 1usize..7, c in 1usize..7) {
            let f = Gf::new(4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_mat(&f, &mut rng, r, k, 0.5);
            let b = random_mat(&f, &mut rng, k, c, 0.5);
            let ab = a.mul(&f, &b).rank(&f);
            prop_assert!(ab <= a.rank(&f).min(b.rank(&f)));
        }

        #[test]
        fn elimination_orders_agree(seed in any::<u64>(), r in 1usize..8, c in 1usize..8) {
            let f = Gf::new(6).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_mat(&f, &mut rng, r, c, 0.4);
            let rk = a.rank(&f);
            prop_assert_eq!(rk, a.rref(&f).pivots.len());
            prop_assert_eq!(rk, a.transpose().rank(&f));
            prop_assert_eq!(a.nullspace(&f).cols(), c - rk);
            prop_assert_eq!(a.col_basis(&f).cols(), rk);
        }
    }
}
