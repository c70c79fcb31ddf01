//! Symbolic Jordan forms of quasi-unipotent operators.
//!
//! A [`JordanSpec`] lists Jordan blocks by eigenvalue exponent (the eigenvalue
//! is `exp(2πi·x)`), size and multiplicity. Exterior powers are handled
//! symbolically through [`JordanSpec::wedge_max_ranks`]; [`JordanSpec::materialize`]
//! produces the explicit matrix for the brute-force oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, CycloElem, JordanProfile, Matrix};
use crate::qz::{MultFunc, QZElem};
use crate::CycloMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JordanBlock {
    pub exponent: QZElem,
    pub size: usize,
    pub count: usize,
}

/// Canonical multiset of Jordan blocks, sorted by `(exponent, size)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct JordanSpec {
    blocks: Vec<JordanBlock>,
}

impl JordanSpec {
    /// Merges repeated `(exponent, size)` keys and sorts. Zero sizes or counts
    /// are rejected.
    pub fn new<I: IntoIterator<Item = JordanBlock>>(blocks: I) -> Result<JordanSpec> {
        let mut merged: BTreeMap<(QZElem, usize), usize> = BTreeMap::new();
        for b in blocks {
            if b.size == 0 || b.count == 0 {
                return Err(Error::Parse(format!(
                    "block sizes and counts must be positive (got size {}, count {})",
                    b.size, b.count
                )));
            }
            *merged.entry((b.exponent, b.size)).or_insert(0) += b.count;
        }
        Ok(JordanSpec {
            blocks: merged
                .into_iter()
                .map(|((exponent, size), count)| JordanBlock { exponent, size, count })
                .collect(),
        })
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.count).sum()
    }

    /// Algebraic multiplicity of each eigenvalue exponent.
    pub fn charpoly_exponents(&self) -> MultFunc {
        self.blocks
            .iter()
            .map(|b| (b.exponent, (b.size * b.count) as u64))
            .collect()
    }

    pub fn exponents(&self) -> BTreeSet<QZElem> {
        self.blocks.iter().map(|b| b.exponent).collect()
    }

    /// lcm of the orders of all eigenvalue exponents.
    pub fn conductor(&self) -> u64 {
        self.blocks
            .iter()
            .fold(1, |acc, b| crate::arith::lcm(acc, b.exponent.order()))
    }

    pub fn max_block(&self) -> usize {
        self.blocks.iter().map(|b| b.size).max().unwrap_or(0)
    }

    pub fn to_profile(&self) -> JordanProfile {
        let mut blocks: BTreeMap<QZElem, BTreeMap<usize, usize>> = BTreeMap::new();
        for b in &self.blocks {
            blocks.entry(b.exponent).or_default().insert(b.size, b.count);
        }
        JordanProfile { blocks }
    }

    pub fn from_profile(p: &JordanProfile) -> JordanSpec {
        JordanSpec {
            blocks: p
                .blocks
                .iter()
                .flat_map(|(x, sizes)| {
                    sizes.iter().map(move |(&size, &count)| JordanBlock {
                        exponent: *x,
                        size,
                        count,
                    })
                })
                .collect(),
        }
    }

    /// Block-diagonal matrix over `Q(ζ_N)`, blocks in canonical order, each
    /// `Jord_m(ζ)` with `ζ` on the diagonal and ones on the subdiagonal.
    pub fn materialize(&self, n: u64) -> Result<CycloMatrix> {
        let mut parts = Vec::new();
        for b in &self.blocks {
            let z = root_of_unity(&b.exponent, n)?;
            let block = Matrix::from_fn(b.size, b.size, |i, j| {
                if i == j {
                    z.clone()
                } else if i == j + 1 {
                    CycloElem::from_coeffs(n, vec![BigRational::one()])
                } else {
                    CycloElem::from_coeffs(n, vec![])
                }
            });
            parts.extend(std::iter::repeat_n(block, b.count));
        }
        Ok(Matrix::direct_sum(&parts))
    }

    /// Exponents that can occur as eigenvalues of the `j`-th exterior power:
    /// sums of `j` eigenvalue exponents taken with multiplicity.
    pub fn wedge_spectrum(&self, j: usize) -> Result<BTreeSet<QZElem>> {
        let dim = self.dim();
        if j < 1 || j > dim {
            return Err(Error::OutOfRange { j, dim });
        }
        let mut states: BTreeSet<(usize, QZElem)> = BTreeSet::from([(0, QZElem::ZERO)]);
        for (x, mult) in self.charpoly_exponents().iter() {
            let mut next = BTreeSet::new();
            for &(used, z) in &states {
                for s in 0..=(*mult as usize).min(j - used) {
                    next.insert((used + s, z.add(&x.scale(s as u64))));
                }
            }
            states = next;
        }
        Ok(states.into_iter().filter(|(u, _)| *u == j).map(|(_, z)| z).collect())
    }

    /// Largest Jordan block of `Λ^j M` at each eigenvalue: the maximum of
    /// `1 + Σ s_i(m_i − s_i)` over tuples with `Σ s_i = j`, `0 ≤ s_i ≤ m_i`
    /// and `Σ s_i·x_i ≡ z`. Exponents without an admissible tuple are absent.
    pub fn wedge_max_ranks(&self, j: usize) -> Result<BTreeMap<QZElem, usize>> {
        let dim = self.dim();
        if j < 1 || j > dim {
            return Err(Error::OutOfRange { j, dim });
        }
        // Knapsack over individual blocks: only the running dimension and
        // exponent sum matter for the rest of the tuple, so keeping the best
        // bonus per state loses nothing.
        let mut states: BTreeMap<(usize, QZElem), usize> = BTreeMap::from([((0, QZElem::ZERO), 0)]);
        for b in &self.blocks {
            for _ in 0..b.count {
                let mut next: BTreeMap<(usize, QZElem), usize> = BTreeMap::new();
                for (&(used, z), &bonus) in &states {
                    for s in 0..=b.size.min(j - used) {
                        let key = (used + s, z.add(&b.exponent.scale(s as u64)));
                        let val = bonus + s * (b.size - s);
                        let slot = next.entry(key).or_insert(val);
                        *slot = (*slot).max(val);
                    }
                }
                states = next;
            }
        }
        Ok(states
            .into_iter()
            .filter(|((used, _), _)| *used == j)
            .map(|((_, z), bonus)| (z, bonus + 1))
            .collect())
    }
}

/// `Jord(m₁, m₂)`: a size-1 block for each unit of `m₁` and a size-2 block
/// for each unit of `m₂`.
pub fn jord(m1: &MultFunc, m2: &MultFunc) -> JordanSpec {
    let ones = m1.iter().map(|(x, &c)| JordanBlock {
        exponent: *x,
        size: 1,
        count: c as usize,
    });
    let twos = m2.iter().map(|(x, &c)| JordanBlock {
        exponent: *x,
        size: 2,
        count: c as usize,
    });
    JordanSpec::new(ones.chain(twos)).expect("multiplicity functions have positive values")
}

/// Amplitude of the weight filtration of `(Λ^j Jord_m(ξ))_n`: the top
/// weight `(m−1) + (m−3) + … + (m−2j+1) = j(m − j)`.
pub fn single_block_wedge_amplitude(m: u64, j: u64) -> Result<u64> {
    if j < 1 || j > m {
        return Err(Error::OutOfRange {
            j: j as usize,
            dim: m as usize,
        });
    }
    Ok(j * (m - j))
}

impl fmt::Display for JordanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let one = format!("Jord_{}(exp(2πi·{}))", b.size, b.exponent);
                if b.count == 1 {
                    one
                } else {
                    format!("⊕^{} {}", b.count, one)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl<'de> Deserialize<'de> for JordanSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<JordanBlock>::deserialize(d)?;
        JordanSpec::new(raw).map_err(serde::de::Error::custom)
    }
}
