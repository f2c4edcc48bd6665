//! Dense matrices over `F_q`.
//!
//! All arithmetic is exact; there is no floating point anywhere in the crate.
//! The `0×0` matrix is a legal value — the block formulas in the suborbit
//! machinery routinely degenerate to empty blocks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, Gf};

#[derive(Clone)]
pub struct Mat {
    gf: Gf,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.gf == other.gf
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
    }
}
impl Eq for Mat {}

impl std::hash::Hash for Mat {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} over F_{} [", self.rows, self.cols, self.gf.q())?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl Serialize for Mat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Mat", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &self.data)?;
        st.end()
    }
}

impl Mat {
    pub fn new(gf: &Gf, rows: usize, cols: usize, data: Vec<Fe>) -> Result<Mat> {
        if data.len() != rows * cols {
            return Err(Error::Dim(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|&x| x >= gf.q()) {
            return Err(Error::InvalidParameter(
                "matrix entry out of field range".into(),
            ));
        }
        Ok(Mat {
            gf: gf.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zero(gf: &Gf, rows: usize, cols: usize) -> Mat {
        Mat {
            gf: gf.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(gf: &Gf, n: usize) -> Mat {
        let mut m = Mat::zero(gf, n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(gf: &Gf, rows: &[&[Fe]]) -> Result<Mat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dim("ragged rows".into()));
        }
        Mat::new(gf, r, c, rows.concat())
    }

    /// Scalar as a 1×1 matrix; occasionally convenient for block building.
    pub fn scalar(gf: &Gf, a: Fe) -> Mat {
        Mat {
            gf: gf.clone(),
            rows: 1,
            cols: 1,
            data: vec![a],
        }
    }

    pub fn diag(gf: &Gf, entries: &[Fe]) -> Mat {
        let n = entries.len();
        let mut m = Mat::zero(gf, n, n);
        for (i, &a) in entries.iter().enumerate() {
            m[(i, i)] = a;
        }
        m
    }

    pub fn gf(&self) -> &Gf {
        &self.gf
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entries(&self) -> &[Fe] {
        &self.data
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dim("add: shape mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.gf.add(a, b))
            .collect();
        Ok(Mat {
            gf: self.gf.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Mat {
        let data = self.data.iter().map(|&a| self.gf.neg(a)).collect();
        Mat {
            gf: self.gf.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: Fe) -> Mat {
        let data = self.data.iter().map(|&a| self.gf.mul(c, a)).collect();
        Mat {
            gf: self.gf.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::Dim(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let gf = &self.gf;
        let mut out = Mat::zero(gf, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.data[k * other.cols + j];
                    if b == 0 {
                        continue;
                    }
                    let slot = &mut out.data[i * other.cols + j];
                    *slot = gf.add(*slot, gf.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(&self.gf, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        let mut out = Mat::zero(&self.gf, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let gf = self.gf.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m[(i, c)] != 0) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m[(r, j)];
                m[(r, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            let inv = gf.inv(m[(r, c)]).unwrap();
            for j in 0..m.cols {
                m[(r, j)] = gf.mul(m[(r, j)], inv);
            }
            for i in 0..m.rows {
                if i != r && m[(i, c)] != 0 {
                    let f = m[(i, c)];
                    for j in 0..m.cols {
                        let sub = gf.mul(f, m[(r, j)]);
                        m[(i, j)] = gf.sub(m[(i, j)], sub);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::Dim("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let aug = hconcat(&[self.clone(), Mat::identity(&self.gf, n)])?;
        let (r, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Singular);
        }
        Ok(r.submatrix(0, n, n, 2 * n))
    }

    /// Whether two matrices of equal width have the same row space.
    pub fn row_space_equal(&self, other: &Mat) -> Result<bool> {
        if self.cols != other.cols {
            return Err(Error::Dim("row_space_equal: width mismatch".into()));
        }
        let (a, pa) = self.rref();
        let (b, pb) = other.rref();
        if pa.len() != pb.len() {
            return Ok(false);
        }
        let k = pa.len();
        Ok(a.submatrix(0, k, 0, a.cols) == b.submatrix(0, k, 0, b.cols))
    }

    /// `X + Xᵗ = 0` with zero diagonal.
    pub fn is_alternate(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            if self[(i, i)] != 0 {
                return false;
            }
            for j in 0..i {
                if self[(i, j)] != self.gf.neg(self[(j, i)]) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Fe;
    fn index(&self, (i, j): (usize, usize)) -> &Fe {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fe {
        &mut self.data[i * self.cols + j]
    }
}

/// Block-diagonal assembly; blocks may be 0×0.
pub fn block_diag(blocks: &[Mat]) -> Result<Mat> {
    let gf = blocks
        .first()
        .map(|b| b.gf.clone())
        .ok_or_else(|| Error::Dim("block_diag of empty list".into()))?;
    let rows: usize = blocks.iter().map(|b| b.rows).sum();
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut out = Mat::zero(&gf, rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.set_block(r, c, b);
        r += b.rows;
        c += b.cols;
    }
    Ok(out)
}

/// Horizontal concatenation (equal row counts).
pub fn hconcat(blocks: &[Mat]) -> Result<Mat> {
    let gf = blocks
        .first()
        .map(|b| b.gf.clone())
        .ok_or_else(|| Error::Dim("hconcat of empty list".into()))?;
    let rows = blocks[0].rows;
    if blocks.iter().any(|b| b.rows != rows) {
        return Err(Error::Dim("hconcat: row count mismatch".into()));
    }
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut out = Mat::zero(&gf, rows, cols);
    let mut c = 0;
    for b in blocks {
        out.set_block(0, c, b);
        c += b.cols;
    }
    Ok(out)
}

/// Vertical concatenation (equal column counts).
pub fn vconcat(blocks: &[Mat]) -> Result<Mat> {
    let gf = blocks
        .first()
        .map(|b| b.gf.clone())
        .ok_or_else(|| Error::Dim("vconcat of empty list".into()))?;
    let cols = blocks[0].cols;
    if blocks.iter().any(|b| b.cols != cols) {
        return Err(Error::Dim("vconcat: column count mismatch".into()));
    }
    let rows: usize = blocks.iter().map(|b| b.rows).sum();
    let mut out = Mat::zero(&gf, rows, cols);
    let mut r = 0;
    for b in blocks {
        out.set_block(r, 0, b);
        r += b.rows;
    }
    Ok(out)
}

/// The ν×1 column with a single 1 in (1-based) position `i`.
pub fn basis_vector(gf: &Gf, nu: usize, i: usize) -> Mat {
    assert!(i >= 1 && i <= nu, "basis vector index out of range");
    let mut m = Mat::zero(gf, nu, 1);
    m[(i - 1, 0)] = 1;
    m
}

/// The elementary alternate 2×2 block `(0 1; -1 0)`.
pub fn alt2(gf: &Gf) -> Mat {
    Mat::new(gf, 2, 2, vec![0, 1, gf.neg(1), 0]).unwrap()
}

/// `𝒜_{2r}`: the 2r×2r block diagonal of `r` copies of `alt2`; rank 2r.
/// `r = 0` yields the 0×0 matrix.
pub fn std_alternate(gf: &Gf, r: usize) -> Mat {
    if r == 0 {
        return Mat::zero(gf, 0, 0);
    }
    block_diag(&vec![alt2(gf); r]).unwrap()
}

/// The nonsingular 4×4 alternate matrix `(0 I; -I 0)` in 2+2 block form.
pub fn alt_k(gf: &Gf) -> Mat {
    let i2 = Mat::identity(gf, 2);
    let z2 = Mat::zero(gf, 2, 2);
    vconcat(&[
        hconcat(&[z2.clone(), i2.clone()]).unwrap(),
        hconcat(&[i2.neg(), z2]).unwrap(),
    ])
    .unwrap()
}

/// The rank-2 3×3 alternate matrix coupling both of the first two
/// coordinates to the third.
pub fn alt_y(gf: &Gf) -> Mat {
    let n1 = gf.neg(1);
    Mat::new(gf, 3, 3, vec![0, 0, 1, 0, 0, 1, n1, n1, 0]).unwrap()
}

/// Normalizes an alternate matrix to `[𝒜_{2r}, 0]`: returns `(T, r)` with
/// `T` invertible and `TᵗXT = block_diag(std_alternate(r), 0)`.
///
/// Pivoting is deterministic: among the Gram pairings of the current basis,
/// take the leftmost nonzero column and within it the entry of smallest row
/// index, then split the pair off in symplectic Gram–Schmidt fashion.
pub fn alt_normalize(x: &Mat) -> Result<(Mat, usize)> {
    if !x.is_alternate() {
        return Err(Error::NotAlternate);
    }
    let gf = x.gf.clone();
    let n = x.rows;
    // Pairing of two column vectors under x.
    let form = |u: &[Fe], v: &[Fe]| -> Fe {
        let mut acc = 0;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..n {
                if x[(i, j)] == 0 || v[j] == 0 {
                    continue;
                }
                acc = gf.add(acc, gf.mul(u[i], gf.mul(x[(i, j)], v[j])));
            }
        }
        acc
    };

    let mut pool: Vec<Vec<Fe>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let mut pairs: Vec<Vec<Fe>> = Vec::new();

    loop {
        let m = pool.len();
        let mut pivot = None;
        'scan: for j in 0..m {
            for i in 0..m {
                if form(&pool[i], &pool[j]) != 0 {
                    pivot = Some((j, i));
                    break 'scan;
                }
            }
        }
        let Some((j, i)) = pivot else { break };
        let u = pool[j].clone();
        let c = form(&u, &pool[i]);
        let cinv = gf.inv(c).unwrap();
        let v: Vec<Fe> = pool[i].iter().map(|&a| gf.mul(cinv, a)).collect();
        // Remove the larger position first so indices stay valid.
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        pool.remove(hi);
        pool.remove(lo);
        for w in pool.iter_mut() {
            let bu = form(w, &v);
            let bv = form(w, &u);
            for k in 0..n {
                // w <- w - B(w,v)·u + B(w,u)·v
                let adj = gf.sub(gf.mul(bv, v[k]), gf.mul(bu, u[k]));
                w[k] = gf.add(w[k], adj);
            }
        }
        pairs.push(u);
        pairs.push(v);
    }

    let r = pairs.len() / 2;
    let mut t = Mat::zero(&gf, n, n);
    for (col, vec) in pairs.iter().chain(pool.iter()).enumerate() {
        for (row, &a) in vec.iter().enumerate() {
            t[(row, col)] = a;
        }
    }
    debug_assert_eq!(
        t.transpose().mul(x).unwrap().mul(&t).unwrap(),
        block_diag(&[std_alternate(&gf, r), Mat::zero(&gf, n - 2 * r, n - 2 * r)]).unwrap()
    );
    Ok((t, r))
}

/// Extends the given independent columns to an invertible matrix whose first
/// columns are exactly `cols`, completing greedily with standard basis
/// vectors.
pub fn extend_to_invertible(gf: &Gf, n: usize, cols: &[Vec<Fe>]) -> Result<Mat> {
    let mut chosen: Vec<Vec<Fe>> = Vec::with_capacity(n);
    for c in cols {
        if c.len() != n {
            return Err(Error::Dim("extend_to_invertible: bad column length".into()));
        }
        chosen.push(c.clone());
    }
    let rank_of = |vs: &[Vec<Fe>]| -> usize {
        if vs.is_empty() {
            return 0;
        }
        let data: Vec<Fe> = vs.concat();
        Mat::new(gf, vs.len(), n, data).unwrap().rank()
    };
    if rank_of(&chosen) != chosen.len() {
        return Err(Error::Singular);
    }
    for i in 0..n {
        if chosen.len() == n {
            break;
        }
        let mut e = vec![0; n];
        e[i] = 1;
        chosen.push(e);
        if rank_of(&chosen) != chosen.len() {
            chosen.pop();
        }
    }
    let mut m = Mat::zero(gf, n, n);
    for (j, v) in chosen.iter().enumerate() {
        for (i, &a) in v.iter().enumerate() {
            m[(i, j)] = a;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f3() -> Gf {
        Gf::new(3).unwrap()
    }

    #[test]
    fn product_example_mod_3() {
        let gf = f3();
        let a = Mat::new(&gf, 2, 2, vec![1, 2, 0, 1]).unwrap();
        let b = Mat::new(&gf, 2, 2, vec![1, 0, 1, 1]).unwrap();
        let c = a.mul(&b).unwrap();
        assert_eq!(c, Mat::new(&gf, 2, 2, vec![0, 2, 1, 1]).unwrap());
    }

    #[test]
    fn identity_and_transpose() {
        let gf = f3();
        let a = Mat::new(&gf, 2, 2, vec![1, 2, 0, 1]).unwrap();
        assert_eq!(Mat::identity(&gf, 2).mul(&a).unwrap(), a);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn inverse_example_mod_3() {
        let gf = f3();
        let a = Mat::new(&gf, 2, 2, vec![1, 1, 0, 1]).unwrap();
        assert_eq!(
            a.inverse().unwrap(),
            Mat::new(&gf, 2, 2, vec![1, 2, 0, 1]).unwrap()
        );
        let sing = Mat::new(&gf, 2, 2, vec![1, 2, 2, 1]).unwrap();
        assert!(sing.inverse().is_err());
    }

    #[test]
    fn ranks() {
        let gf = f3();
        assert_eq!(Mat::zero(&gf, 3, 2).rank(), 0);
        assert_eq!(alt2(&gf).rank(), 2);
        assert_eq!(alt_y(&gf).rank(), 2);
        assert_eq!(alt_k(&gf).rank(), 4);
    }

    #[test]
    fn block_shapes() {
        let gf = f3();
        let b = block_diag(&[alt2(&gf), Mat::zero(&gf, 1, 1)]).unwrap();
        assert_eq!(b.rows(), 3);
        assert_eq!(b[(0, 1)], 1);
        assert_eq!(b[(1, 0)], 2);
        let h = hconcat(&[
            Mat::zero(&gf, 2, 2),
            Mat::identity(&gf, 2),
            Mat::zero(&gf, 2, 2),
        ])
        .unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 6));
        assert_eq!(basis_vector(&gf, 2, 1).entries(), &[1, 0]);
        assert_eq!(std_alternate(&gf, 0).rows(), 0);
        assert_eq!(std_alternate(&gf, 2).rank(), 4);
    }

    #[test]
    fn alt_normalize_examples() {
        let gf = f3();
        let (t, r) = alt_normalize(&Mat::zero(&gf, 3, 3)).unwrap();
        assert_eq!(r, 0);
        assert_eq!(t, Mat::identity(&gf, 3));

        let (_, r) = alt_normalize(&alt2(&gf)).unwrap();
        assert_eq!(r, 1);

        let x = Mat::new(&gf, 2, 2, vec![0, 2, 1, 0]).unwrap();
        let (t, r) = alt_normalize(&x).unwrap();
        assert_eq!(r, 1);
        let res = t.transpose().mul(&x).unwrap().mul(&t).unwrap();
        assert_eq!(res, alt2(&gf));

        assert!(alt_normalize(&Mat::identity(&gf, 2)).is_err());
    }

    fn random_alternate(gf: &Gf, n: usize, rng: &mut ChaCha8Rng) -> Mat {
        let mut x = Mat::zero(gf, n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.random_range(0..gf.q());
                x[(i, j)] = v;
                x[(j, i)] = gf.neg(v);
            }
        }
        x
    }

    #[test]
    fn alt_normalize_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [3u64, 5] {
            let gf = Gf::new(q).unwrap();
            for _ in 0..100 {
                let n = rng.random_range(1..=5);
                let x = random_alternate(&gf, n, &mut rng);
                let (t, r) = alt_normalize(&x).unwrap();
                assert!(t.inverse().is_ok());
                assert_eq!(2 * r, x.rank());
                let res = t.transpose().mul(&x).unwrap().mul(&t).unwrap();
                let want = block_diag(&[
                    std_alternate(&gf, r),
                    Mat::zero(&gf, n - 2 * r, n - 2 * r),
                ])
                .unwrap();
                assert_eq!(res, want);
            }
        }
    }

    #[test]
    fn rank_transpose_and_inverse_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gf = Gf::new(5).unwrap();
        for _ in 0..60 {
            let r = rng.random_range(1..5);
            let c = rng.random_range(1..5);
            let data: Vec<Fe> = (0..r * c).map(|_| rng.random_range(0..5)).collect();
            let m = Mat::new(&gf, r, c, data).unwrap();
            assert_eq!(m.rank(), m.transpose().rank());
        }
        for _ in 0..40 {
            let n = rng.random_range(1..5);
            let data: Vec<Fe> = (0..n * n).map(|_| rng.random_range(0..5)).collect();
            let m = Mat::new(&gf, n, n, data).unwrap();
            if let Ok(inv) = m.inverse() {
                assert_eq!(inv.mul(&m).unwrap(), Mat::identity(&gf, n));
            }
        }
    }

    #[test]
    fn row_space_equivalence() {
        let gf = f3();
        let a = Mat::new(&gf, 2, 3, vec![1, 0, 1, 0, 1, 1]).unwrap();
        let doubled = a.scale(2);
        assert!(a.row_space_equal(&doubled).unwrap());
        assert!(a.row_space_equal(&a).unwrap());
        let b = Mat::new(&gf, 2, 3, vec![1, 0, 0, 0, 1, 0]).unwrap();
        assert!(!a.row_space_equal(&b).unwrap());
        assert!(a.row_space_equal(&Mat::zero(&gf, 2, 2)).is_err());
    }

    #[test]
    fn extend_to_invertible_works() {
        let gf = f3();
        let m = extend_to_invertible(&gf, 3, &[vec![0, 1, 2]]).unwrap();
        assert!(m.inverse().is_ok());
        assert_eq!(m.col(0), vec![0, 1, 2]);
        assert!(extend_to_invertible(&gf, 2, &[vec![0, 0]]).is_err());
    }
}
