//! Jordan structure of quasi-unipotent matrices from rank sequences, and the
//! Jordan–Chevalley decomposition.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::field::UnitRoots;
use super::matrix::Matrix;
use crate::arith::lcm;
use crate::error::{Error, Result};
use crate::qz::QZElem;

/// `exponent ↦ (block size ↦ count)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanProfile {
    pub blocks: BTreeMap<QZElem, BTreeMap<usize, usize>>,
}

impl JordanProfile {
    pub fn dim(&self) -> usize {
        self.blocks
            .values()
            .flat_map(|m| m.iter().map(|(s, c)| s * c))
            .sum()
    }

    /// Largest block at each eigenvalue exponent.
    pub fn max_blocks(&self) -> BTreeMap<QZElem, usize> {
        self.blocks
            .iter()
            .filter_map(|(x, m)| m.keys().next_back().map(|&s| (*x, s)))
            .collect()
    }

    pub fn max_block(&self) -> usize {
        self.max_blocks().values().copied().max().unwrap_or(0)
    }
}

/// A candidate eigenvalue with its rank sequence `r_k = rank((M − λ)^k)`,
/// stopped once it stabilizes.
struct Eigen<S> {
    exponent: QZElem,
    ranks: Vec<usize>,
    /// `(M − λ)^K` with `K` the stabilization index.
    stable_power: Matrix<S>,
}

fn common_conductor<S: UnitRoots>(m: &Matrix<S>, candidates: &BTreeSet<QZElem>) -> u64 {
    candidates
        .iter()
        .fold(m.conductor(), |acc, x| lcm(acc, x.order()))
}

fn analyse<S: UnitRoots>(m: &Matrix<S>, candidates: &BTreeSet<QZElem>) -> Result<(u64, Matrix<S>, Vec<Eigen<S>>)> {
    if !m.is_square() {
        return Err(Error::Dimension("Jordan analysis needs a square matrix".into()));
    }
    let n = m.rows();
    let cond = common_conductor(m, candidates);
    let m = m.lift(cond);
    let mut out = Vec::new();
    let mut covered = 0;
    for x in candidates {
        let lambda = S::root_of_unity(x, cond)?;
        let a = m.sub(&Matrix::scalar(n, &lambda));
        let mut ranks = vec![n];
        let mut power = Matrix::identity(n);
        // The kernel of (M − λ)^k stops growing at the first k where the rank
        // repeats; from then on it equals the kernel of (M − λ)^n.
        loop {
            let next = power.mul(&a);
            let r = next.rank();
            if r == *ranks.last().unwrap() {
                break;
            }
            ranks.push(r);
            power = next;
        }
        covered += n - ranks.last().unwrap();
        out.push(Eigen {
            exponent: *x,
            ranks,
            stable_power: power,
        });
    }
    if covered != n {
        return Err(Error::UncoveredSpectrum { covered, dim: n });
    }
    Ok((cond, m, out))
}

/// Block counts from rank sequences: the number of blocks of size `≥ k` at
/// `λ` is `r_{k−1} − r_k`.
pub fn jordan_profile<S: UnitRoots>(m: &Matrix<S>, candidates: &BTreeSet<QZElem>) -> Result<JordanProfile> {
    let (_, _, eigen) = analyse(m, candidates)?;
    let mut blocks = BTreeMap::new();
    for e in eigen {
        let at_least: Vec<usize> = e.ranks.windows(2).map(|w| w[0] - w[1]).collect();
        let mut sizes = BTreeMap::new();
        for k in 0..at_least.len() {
            let exact = at_least[k] - at_least.get(k + 1).copied().unwrap_or(0);
            if exact > 0 {
                sizes.insert(k + 1, exact);
            }
        }
        if !sizes.is_empty() {
            blocks.insert(e.exponent, sizes);
        }
    }
    Ok(JordanProfile { blocks })
}

/// `M = M_s + M_n` with `M_s` acting as `λ` on each generalized eigenspace.
pub fn jordan_chevalley<S: UnitRoots>(
    m: &Matrix<S>,
    candidates: &BTreeSet<QZElem>,
) -> Result<(Matrix<S>, Matrix<S>)> {
    let (cond, m, eigen) = analyse(m, candidates)?;
    let n = m.rows();
    let mut basis_rows: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for e in &eigen {
        let ker = e.stable_power.kernel();
        if ker.rows() == 0 {
            continue;
        }
        let lambda = S::root_of_unity(&e.exponent, cond)?;
        for i in 0..ker.rows() {
            basis_rows.push(ker.row(i).to_vec());
            diag.push(lambda.clone());
        }
    }
    let single = eigen.iter().filter(|e| e.ranks.len() > 1).count() == 1;
    let semisimple = if single {
        Matrix::scalar(n, &diag[0])
    } else {
        let p = Matrix::from_rows(n, basis_rows)?.transpose();
        let d = Matrix::from_fn(n, n, |i, j| if i == j { diag[i].clone() } else { S::zero() });
        p.mul(&d).mul(&p.inverse()?)
    };
    let nilpotent = m.sub(&semisimple);
    Ok((semisimple, nilpotent))
}
