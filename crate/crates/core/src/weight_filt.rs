//! Weight filtrations of nilpotent operators and the induced filtrations on
//! duals, tensor products and exterior powers.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{jordan_chevalley, subsets, Field, Matrix, UnitRoots};
use crate::qz::QZElem;

/// A subspace of `S^dim`, stored as the nonzero rows of its reduced row
/// echelon basis so that equality of spans is equality of values.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<S: Field> {
    basis: Matrix<S>,
}

impl<S: Field> Subspace<S> {
    pub fn zero(dim: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(0, dim),
        }
    }

    pub fn full(dim: usize) -> Self {
        Subspace {
            basis: Matrix::identity(dim),
        }
    }

    /// Span of the rows of `m`.
    pub fn span_rows(m: &Matrix<S>) -> Self {
        let (r, pivots) = m.rref();
        let k = pivots.len();
        Subspace {
            basis: r.select_rows(&(0..k).collect::<Vec<_>>()),
        }
    }

    pub fn span(dim: usize, vectors: &[Vec<S>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(dim);
        }
        Subspace::span_rows(&Matrix::from_rows(dim, vectors.to_vec()).expect("vector length"))
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix<S> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<S>> {
        self.basis.row_vecs()
    }

    pub fn sum(&self, other: &Self) -> Self {
        Subspace::span_rows(&self.basis.vcat(&other.basis))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient());
        }
        // c·[A; B] = 0 gives c_A·A = −c_B·B ∈ A ∩ B.
        let stacked = self.basis.vcat(&other.basis);
        let rel = stacked.transpose().kernel();
        let a = self.dim();
        let coeffs = rel.select_cols(&(0..a).collect::<Vec<_>>());
        Subspace::span_rows(&coeffs.mul(&self.basis))
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.dim() <= self.dim() && self.sum(other).dim() == self.dim()
    }

    pub fn contains_vector(&self, v: &[S]) -> bool {
        self.contains(&Subspace::span(self.ambient(), &[v.to_vec()]))
    }

    /// `{M v : v ∈ self}` for `M` acting on column vectors.
    pub fn image(&self, m: &Matrix<S>) -> Self {
        if self.dim() == 0 {
            return Subspace::zero(m.rows());
        }
        Subspace::span_rows(&self.basis.mul(&m.transpose()))
    }

    /// Functionals vanishing on `self`, in dual-basis coordinates.
    pub fn annihilator(&self) -> Self {
        if self.dim() == 0 {
            return Subspace::full(self.ambient());
        }
        Subspace::span_rows(&self.basis.kernel())
    }

    /// Vectors from `candidates` that, added one at a time, extend `self`
    /// without creating dependencies.
    pub fn extend_by(&self, candidates: &[Vec<S>]) -> Vec<Vec<S>> {
        let mut current = self.clone();
        let mut out = Vec::new();
        for v in candidates {
            let next = current.sum(&Subspace::span(self.ambient(), std::slice::from_ref(v)));
            if next.dim() > current.dim() {
                out.push(v.clone());
                current = next;
            }
        }
        out
    }
}

/// Finite ascending filtration `W_i` of `S^dim`, centered at `w`.
/// `steps[k]` is `W_{start+k}`; below `start` it is zero and from the last
/// step on it is the whole space.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFiltration<S: Field> {
    center: i64,
    dim: usize,
    start: i64,
    steps: Vec<Subspace<S>>,
}

impl<S: Field> WeightFiltration<S> {
    /// `W_i` = span of the basis vectors of weight `≤ i`.
    pub fn from_weighted_basis(center: i64, dim: usize, basis: &[(Vec<S>, i64)]) -> Self {
        let Some(lo) = basis.iter().map(|(_, w)| *w).min() else {
            return WeightFiltration {
                center,
                dim,
                start: center,
                steps: vec![Subspace::full(dim)],
            };
        };
        let hi = basis.iter().map(|(_, w)| *w).max().unwrap();
        let steps = (lo..=hi)
            .map(|i| {
                let vs: Vec<Vec<S>> = basis.iter().filter(|(_, w)| *w <= i).map(|(v, _)| v.clone()).collect();
                Subspace::span(dim, &vs)
            })
            .collect();
        WeightFiltration {
            center,
            dim,
            start: lo,
            steps,
        }
    }

    /// Jordan chains `[v, Nv, …, N^{m−1}v]`; `N^k v` gets weight
    /// `w + m − 1 − 2k`.
    pub fn from_jordan_chains(center: i64, dim: usize, chains: &[Vec<Vec<S>>]) -> Self {
        let mut basis = Vec::with_capacity(dim);
        for chain in chains {
            let m = chain.len() as i64;
            for (k, v) in chain.iter().enumerate() {
                basis.push((v.clone(), center + m - 1 - 2 * k as i64));
            }
        }
        WeightFiltration::from_weighted_basis(center, dim, &basis)
    }

    pub fn center(&self) -> i64 {
        self.center
    }

    pub fn ambient(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: i64) -> Subspace<S> {
        if i < self.start {
            Subspace::zero(self.dim)
        } else {
            let k = ((i - self.start) as usize).min(self.steps.len() - 1);
            self.steps[k].clone()
        }
    }

    /// Indices `i` for which `W_i` differs from `W_{i−1}` lie in this range.
    pub fn range(&self) -> std::ops::RangeInclusive<i64> {
        self.start..=self.start + self.steps.len() as i64 - 1
    }

    pub fn graded_dim(&self, i: i64) -> usize {
        self.get(i).dim() - self.get(i - 1).dim()
    }

    /// Nonzero graded dimensions.
    pub fn graded_dims(&self) -> BTreeMap<i64, usize> {
        self.range()
            .map(|i| (i, self.graded_dim(i)))
            .filter(|&(_, d)| d > 0)
            .collect()
    }

    /// Smallest `n ≥ 0` with `W_{w+n}` the whole space.
    pub fn amplitude(&self) -> u64 {
        (0..)
            .find(|&n| self.get(self.center + n as i64).dim() == self.dim)
            .unwrap()
    }

    /// A basis adapted to the filtration, each vector tagged with the first
    /// index at which it enters.
    pub fn adapted_basis(&self) -> Vec<(Vec<S>, i64)> {
        let mut out = Vec::with_capacity(self.dim);
        let mut prev = Subspace::zero(self.dim);
        for i in self.range() {
            let cur = self.get(i);
            for v in prev.extend_by(&cur.vectors()) {
                out.push((v, i));
            }
            prev = cur;
        }
        out
    }

    /// `(W^∨)_i = (W_{−i−1})^⊥`, centered at `−w`.
    pub fn dual(&self) -> Self {
        let (lo, hi) = (*self.range().start(), *self.range().end());
        // W^∨_i = 0 for i ≤ −hi−1 and W^∨_i = V^∨ for i ≥ −lo.
        let start = -hi;
        let steps = (start..=-lo).map(|i| self.get(-i - 1).annihilator()).collect();
        WeightFiltration {
            center: -self.center,
            dim: self.dim,
            start,
            steps,
        }
    }

    /// `(W ⊗ W')_i = Σ_{i₁+i₂=i} W_{i₁} ⊗ W'_{i₂}` on `V ⊗ V'`, coordinates
    /// ordered as in [`Matrix::kron`].
    pub fn tensor(&self, other: &Self) -> Self {
        let a = self.adapted_basis();
        let b = other.adapted_basis();
        let mut basis = Vec::with_capacity(a.len() * b.len());
        for (u, wu) in &a {
            for (v, wv) in &b {
                let prod: Vec<S> = u.iter().flat_map(|x| v.iter().map(move |y| x.clone() * y)).collect();
                basis.push((prod, wu + wv));
            }
        }
        WeightFiltration::from_weighted_basis(self.center + other.center, self.dim * other.dim, &basis)
    }

    /// `(Λ^j W)_i = Σ_{i₁+…+i_j=i} W_{i₁} ∧ … ∧ W_{i_j}` on `Λ^j V`, in the
    /// lexicographic subset basis of [`Matrix::wedge`].
    pub fn wedge(&self, j: usize) -> Result<Self> {
        if j < 1 || j > self.dim {
            return Err(Error::OutOfRange { j, dim: self.dim });
        }
        let basis = self.adapted_basis();
        let cols = Matrix::from_rows(self.dim, basis.iter().map(|(v, _)| v.clone()).collect())?.transpose();
        let rows = subsets(self.dim, j);
        let mut out = Vec::new();
        for t in subsets(self.dim, j) {
            let vt = cols.select_cols(&t);
            let coords: Vec<S> = rows.iter().map(|s| vt.select_rows(s).det()).collect();
            let weight = t.iter().map(|&k| basis[k].1).sum();
            out.push((coords, weight));
        }
        Ok(WeightFiltration::from_weighted_basis(
            self.center * j as i64,
            rows.len(),
            &out,
        ))
    }

    /// Checks `N W_i ⊆ W_{i−2}` and that `N^α : Gr_{w+α} → Gr_{w−α}` is an
    /// isomorphism for every `α ≥ 1`.
    pub fn satisfies_conditions(&self, n: &Matrix<S>) -> bool {
        let (lo, hi) = (*self.range().start() - 1, *self.range().end() + 1);
        for i in lo..=hi {
            if !self.get(i - 2).contains(&self.get(i).image(n)) {
                return false;
            }
        }
        let mut power = n.clone();
        for alpha in 1..=(hi - lo).max(0) {
            let (top, bottom) = (self.center + alpha, self.center - alpha);
            if self.graded_dim(top) != self.graded_dim(bottom) {
                return false;
            }
            let reach = self.get(top).image(&power).sum(&self.get(bottom - 1));
            if reach != self.get(bottom) {
                return false;
            }
            power = power.mul(n);
        }
        true
    }
}

/// Jordan chains of a nilpotent operator, longest first.
pub fn jordan_chains<S: Field>(n: &Matrix<S>) -> Result<Vec<Vec<Vec<S>>>> {
    if !n.is_square() {
        return Err(Error::Dimension("nilpotent operator must be square".into()));
    }
    let dim = n.rows();
    // kernels[k] = ker N^k, up to the nilpotency index
    let mut kernels = vec![Subspace::zero(dim)];
    let mut power = Matrix::identity(dim);
    while kernels.last().unwrap().dim() < dim {
        if kernels.len() > dim {
            return Err(Error::NotNilpotent);
        }
        power = power.mul(n);
        kernels.push(Subspace::span_rows(&power.kernel()));
    }
    let p = kernels.len() - 1;
    let mut chains = Vec::new();
    for k in (1..=p).rev() {
        // tops of length-k chains complement ker N^{k−1} + N(ker N^{k+1}) in ker N^k
        let above = if k < p { kernels[k + 1].image(n) } else { Subspace::zero(dim) };
        let taken = kernels[k - 1].sum(&above);
        for top in taken.extend_by(&kernels[k].vectors()) {
            let mut chain = vec![top];
            for _ in 1..k {
                let next = n.apply(chain.last().unwrap());
                chain.push(next);
            }
            chains.push(chain);
        }
    }
    Ok(chains)
}

/// The weight filtration of a nilpotent `N` centered at `w`.
pub fn weight_filtration<S: Field>(n: &Matrix<S>, w: i64) -> Result<WeightFiltration<S>> {
    let chains = jordan_chains(n)?;
    let filt = WeightFiltration::from_jordan_chains(w, n.rows(), &chains);
    if !filt.satisfies_conditions(n) {
        return Err(Error::Inconsistent(
            "weight filtration fails its defining conditions".into(),
        ));
    }
    Ok(filt)
}

pub fn amplitude<S: Field>(w: &WeightFiltration<S>) -> u64 {
    w.amplitude()
}

/// Largest Jordan block of a quasi-unipotent `M`, read off as amplitude + 1
/// of the weight filtration of its nilpotent part.
pub fn max_block_from_amplitude<S: UnitRoots>(
    m: &Matrix<S>,
    candidates: &std::collections::BTreeSet<QZElem>,
) -> Result<u64> {
    let (_, mn) = jordan_chevalley(m, candidates)?;
    Ok(weight_filtration(&mn, 0)?.amplitude() + 1)
}

pub fn dual_filtration<S: Field>(w: &WeightFiltration<S>) -> WeightFiltration<S> {
    w.dual()
}

pub fn tensor_filtration<S: Field>(a: &WeightFiltration<S>, b: &WeightFiltration<S>) -> WeightFiltration<S> {
    a.tensor(b)
}

pub fn wedge_filtration<S: Field>(w: &WeightFiltration<S>, j: usize) -> Result<WeightFiltration<S>> {
    w.wedge(j)
}

impl<S: Field> Serialize for WeightFiltration<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut st = s.serialize_struct("WeightFiltration", 2)?;
        st.serialize_field("center", &self.center)?;
        st.serialize_field("graded_dims", &self.graded_dims())?;
        st.end()
    }
}
