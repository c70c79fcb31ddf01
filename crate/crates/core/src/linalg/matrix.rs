//! Dense matrices over an exact [`Field`].
//!
//! Matrices act on column vectors. Subspaces elsewhere in the crate are kept
//! as row bases, so a few helpers here work on rows.

use std::fmt;
use std::ops::{Index, IndexMut};

use super::field::{Field, UnitRoots};
use crate::arith::binomial;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Field> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn scalar(n: usize, s: &S) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row vectors; `cols` is needed when there are no rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has length {}, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
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

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn map<T: Field>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s)
    }

    /// Product; zero entries of `self` are skipped, which keeps block-sparse
    /// operators cheap.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let t = a.clone() * b;
                        let slot = &mut out[(i, j)];
                        *slot = std::mem::replace(slot, S::zero()) + t;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// `M · v` for a column vector given as a slice.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b)
            })
            .collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Matrix::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            let a = &self[(i / r2, j / c2)];
            if a.is_zero() {
                S::zero()
            } else {
                a.clone() * &other[(i % r2, j % c2)]
            }
        })
    }

    pub fn direct_sum(blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vcat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * c);
        head[lo * c..(lo + 1) * c].swap_with_slice(&mut tail[..c]);
    }

    /// `row[target] -= factor · row[source]`, from column `from` on.
    fn eliminate(&mut self, target: usize, source: usize, factor: &S, from: usize) {
        let c = self.cols;
        for j in from..c {
            let s = &self.data[source * c + j];
            if s.is_zero() {
                continue;
            }
            let t = factor.clone() * s;
            let slot = &mut self.data[target * c + j];
            *slot = std::mem::replace(slot, S::zero()) - t;
        }
    }

    fn echelon_in_place(&mut self, reduced: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv();
            for j in c..self.cols {
                let v = std::mem::replace(&mut self[(r, j)], S::zero());
                if !v.is_zero() {
                    self[(r, j)] = v * &inv;
                }
            }
            let start = if reduced { 0 } else { r + 1 };
            for i in start..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                self.eliminate(i, r, &f, c);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form and pivot columns. Pivot order is
    /// deterministic: first nonzero entry at or below the current row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.echelon_in_place(true);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelon_in_place(false).len()
    }

    /// Basis of `{v : M v = 0}`, one vector per row.
    pub fn kernel(&self) -> Self {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out[(k, f)] = S::one();
            for (row, &p) in pivots.iter().enumerate() {
                let v = &r[(row, f)];
                if !v.is_zero() {
                    out[(k, p)] = -v.clone();
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let aug = self.hcat(&Matrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(r.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }

    pub fn det(&self) -> S {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return S::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            let inv = piv.inv();
            det = det * &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() * &inv;
                m.eliminate(i, c, &f, c);
            }
        }
        det
    }

    /// Characteristic polynomial `det(t·Id − M)`, ascending coefficients,
    /// by the Faddeev–LeVerrier recursion.
    pub fn charpoly(&self) -> Vec<S> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[n] = S::one();
        let mut aux = Matrix::zeros(n, n);
        for k in 1..=n {
            aux = self.mul(&aux).add(&Matrix::scalar(n, &coeffs[n - k + 1]));
            let tr = self.mul(&aux).trace();
            coeffs[n - k] = -(tr * &S::from_i64(k as i64).inv());
        }
        coeffs
    }

    /// The matrix of `M` on the `j`-th exterior power. Basis vectors
    /// `e_{i₁} ∧ … ∧ e_{i_j}` with `i₁ < … < i_j` are ordered lexicographically;
    /// entry `(S, T)` is the minor `det M[S, T]`.
    pub fn wedge(&self, j: usize) -> Result<Self> {
        assert!(self.is_square());
        let n = self.rows;
        if j < 1 || j > n {
            return Err(Error::OutOfRange { j, dim: n });
        }
        let subsets = subsets(n, j);
        let dim = subsets.len();
        debug_assert_eq!(dim, binomial(n, j));
        let mut out = Matrix::zeros(dim, dim);
        for (si, s) in subsets.iter().enumerate() {
            let rows = self.select_rows(s);
            if rows.is_zero() {
                continue;
            }
            for (ti, t) in subsets.iter().enumerate() {
                let minor = rows.select_cols(t);
                if minor.is_zero() {
                    continue;
                }
                out[(si, ti)] = minor.det();
            }
        }
        Ok(out)
    }
}

impl<S: UnitRoots> Matrix<S> {
    /// lcm of the entry conductors.
    pub fn conductor(&self) -> u64 {
        self.data
            .iter()
            .fold(1, |acc, x| crate::arith::lcm(acc, x.conductor()))
    }

    /// All entries re-expressed over conductor `n`.
    pub fn lift(&self, n: u64) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.lift(n)).collect(),
        }
    }
}

/// All `j`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(j);
    fn rec(start: usize, n: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == j {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < j - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, j, cur, out);
            cur.pop();
        }
    }
    rec(0, n, j, &mut cur, &mut out);
    out
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| format!("{:?}", self.data[i * self.cols + j]))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cyclo::CycloElem;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    type Q = BigRational;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| Q::from_i64(x)).collect()).collect()).unwrap()
    }

    fn arb_matrix(n: usize, m: usize) -> impl Strategy<Value = Matrix<Q>> {
        prop::collection::vec(-3i64..4, n * m).prop_map(move |v| {
            Matrix::from_fn(n, m, |i, j| Q::from_i64(v[i * m + j]))
        })
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::<Q>::identity(3).rank(), 3);
        assert_eq!(Matrix::<Q>::zeros(2, 2).rank(), 0);
        // Jord₂(−1) − (−1)·Id
        let j = qm(&[&[-1, 0], &[1, -1]]);
        assert_eq!(j.add(&Matrix::identity(2)).rank(), 1);
    }

    #[test]
    fn wedge_examples() {
        let id = Matrix::<Q>::identity(4);
        for j in 1..=4 {
            assert_eq!(id.wedge(j).unwrap(), Matrix::identity(binomial(4, j)));
        }
        let d = qm(&[&[2, 0], &[0, 5]]);
        assert_eq!(d.wedge(2).unwrap(), qm(&[&[10]]));
        assert!(matches!(d.wedge(3), Err(Error::OutOfRange { j: 3, dim: 2 })));
        assert!(matches!(d.wedge(0), Err(Error::OutOfRange { .. })));
        // Jord₂(1) ⊕ Jord₁(1): basis {01, 02, 12}
        let m = qm(&[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        let w = m.wedge(2).unwrap();
        assert_eq!(w, qm(&[&[1, 0, 0], &[0, 1, 0], &[0, 1, 1]]));
    }

    #[test]
    fn det_and_inverse() {
        let m = qm(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.det(), Q::from_i64(1));
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(2));
        assert_eq!(qm(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn charpoly_of_companion() {
        // companion of t³ − 2t + 5
        let m = qm(&[&[0, 0, -5], &[1, 0, 2], &[0, 1, 0]]);
        let cp = m.charpoly();
        let expect: Vec<Q> = [5, -2, 0, 1].iter().map(|&x| Q::from_i64(x)).collect();
        assert_eq!(cp, expect);
    }

    #[test]
    fn cyclotomic_entries() {
        let i = CycloElem::zeta_pow(4, 1);
        let m = Matrix::from_fn(2, 2, |r, c| if r == c { i.clone() } else { CycloElem::zero() });
        // diag(i, i)² = −Id
        assert_eq!(m.mul(&m), Matrix::scalar(2, &CycloElem::from_i64(-1)));
        assert_eq!(m.rank(), 2);
        assert_eq!(m.conductor(), 4);
    }

    #[test]
    fn subsets_lexicographic() {
        assert_eq!(subsets(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(4, 5)) {
            let k = m.kernel();
            prop_assert_eq!(m.rank() + k.rows(), 5);
            prop_assert!(m.mul(&k.transpose()).is_zero());
        }

        #[test]
        fn wedge_is_functorial(a in arb_matrix(4, 4), b in arb_matrix(4, 4), j in 1usize..4) {
            prop_assert_eq!(a.mul(&b).wedge(j).unwrap(), a.wedge(j).unwrap().mul(&b.wedge(j).unwrap()));
        }

        #[test]
        fn charpoly_constant_term_is_signed_det(m in arb_matrix(3, 3)) {
            let cp = m.charpoly();
            prop_assert_eq!(cp[0].clone(), -m.det());
        }
    }
}
