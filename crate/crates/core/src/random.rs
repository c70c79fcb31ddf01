//! Seeded generators for admissible abelian types and test operators.
//!
//! Sampling of an [`AbelianType`] with caps `(max_g, max_e)`:
//! - `g` uniform in `1..=max_g`, `e₀` uniform in `1..=max_e`, `t_pot` uniform
//!   in `0..=g`, `a_pot = g − t_pot`;
//! - `m_tor` complete with norm `t_pot`: orders `d | e₀` with `φ(d)` no
//!   larger than the remaining norm are drawn uniformly, one full orbit at a
//!   time, until the norm is used up;
//! - `h` complete with norm `2·a_pot` the same way, with orbits of order 2
//!   drawn in pairs so that `h(0)` is even (and `h(1/2)` too);
//! - `m_ab(0) = m_dual_ab(0) = h(0)/2`; with a polarization or residue
//!   characteristic zero flag, each pair `{x, −x}` with `x ≠ −x` has `h(x)`
//!   split uniformly between `m_ab(x)` and `m_ab(−x)`, `1/2` is halved and
//!   `m_dual_ab = reflect(m_ab)`; otherwise, for each order, the points of
//!   `h` of that order are split into two halves of equal size uniformly at
//!   random;
//! - each flag is set with probability 1/4;
//! - `e` is the lcm of the support orders, a divisor of `e₀`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::abvar::{AbelianType, Flags};
use crate::arith::{divisors, lcm, totient};
use crate::jordan_calc::{JordanBlock, JordanSpec};
use crate::linalg::{CycloElem, Field, Matrix};
use crate::qz::{MultFunc, QZElem};
use crate::{CycloMatrix, RationalMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeCaps {
    pub max_g: u64,
    pub max_e: u64,
}

/// Complete function of norm `norm` with orders dividing `e`; when
/// `pair_halves` is set, orbits of order 2 are taken in pairs.
fn random_complete<R: Rng>(rng: &mut R, norm: u64, e: u64, pair_halves: bool) -> MultFunc {
    let divs: Vec<u64> = divisors(e).into_iter().filter(|&d| d > 1).collect();
    let mut f = MultFunc::new();
    let mut left = norm;
    loop {
        let fits: Vec<u64> = divs
            .iter()
            .copied()
            .filter(|&d| {
                let cost = if d == 2 && pair_halves { 2 } else { totient(d) };
                cost <= left
            })
            .collect();
        // order 1 keeps the draw from stalling and fixes the parity of h(0)
        if fits.is_empty() || rng.gen_range(0..=fits.len()) == 0 {
            break;
        }
        let d = *fits.choose(rng).unwrap();
        let c = if d == 2 && pair_halves { 2 } else { 1 };
        f = f.add(&MultFunc::uniform_on_order(d, c));
        left -= c * totient(d);
    }
    debug_assert!(!pair_halves || left.is_multiple_of(2));
    f.add_at(QZElem::ZERO, left);
    f
}

pub fn random_flags<R: Rng>(rng: &mut R) -> Flags {
    Flags {
        residue_char_zero: rng.gen_ratio(1, 4),
        principally_polarized: rng.gen_ratio(1, 4),
    }
}

pub fn random_type<R: Rng>(rng: &mut R, caps: TypeCaps) -> AbelianType {
    random_type_with_flags(rng, caps, None)
}

/// As [`random_type`], optionally forcing the flags.
pub fn random_type_with_flags<R: Rng>(rng: &mut R, caps: TypeCaps, flags: Option<Flags>) -> AbelianType {
    let g = rng.gen_range(1..=caps.max_g.max(1));
    let e0 = rng.gen_range(1..=caps.max_e.max(1));
    let t_pot = rng.gen_range(0..=g);
    let a_pot = g - t_pot;
    let flags = flags.unwrap_or_else(|| random_flags(rng));
    let tor = random_complete(rng, t_pot, e0, false);
    let h = random_complete(rng, 2 * a_pot, e0, true);
    let half0 = h.get(&QZElem::ZERO) / 2;
    let mut ab = MultFunc::new();
    let mut dual_ab = MultFunc::new();
    ab.add_at(QZElem::ZERO, half0);
    dual_ab.add_at(QZElem::ZERO, half0);
    if flags.residue_char_zero || flags.principally_polarized {
        for (x, &c) in h.iter() {
            let nx = x.neg();
            if x.is_zero() || nx < *x {
                continue;
            }
            if nx == *x {
                ab.add_at(*x, c / 2);
            } else {
                let k = rng.gen_range(0..=c);
                ab.add_at(*x, k);
                ab.add_at(nx, c - k);
            }
        }
        dual_ab = ab.reflect();
    } else {
        // halves are taken per order, so that every base change keeps
        // m_ab(0) = m_dual_ab(0)
        let mut by_order: BTreeMap<u64, Vec<QZElem>> = BTreeMap::new();
        for (x, &c) in h.iter().filter(|(x, _)| !x.is_zero()) {
            by_order.entry(x.order()).or_default().extend(std::iter::repeat_n(*x, c as usize));
        }
        for mut units in by_order.into_values() {
            units.shuffle(rng);
            let half = units.len() / 2;
            for (i, x) in units.into_iter().enumerate() {
                if i < half {
                    ab.add_at(x, 1);
                } else {
                    dual_ab.add_at(x, 1);
                }
            }
        }
    }
    let e = [&tor, &ab, &dual_ab].iter().fold(1, |acc, f| lcm(acc, f.support_lcm()));
    AbelianType {
        g,
        e,
        tor,
        ab,
        dual_ab,
        flags,
    }
}

/// A complete function with orders at most `max_order` and values at most
/// `max_value`, over at most `max_orders` distinct orders.
pub fn random_complete_function<R: Rng>(rng: &mut R, max_order: u64, max_orders: usize, max_value: u64) -> MultFunc {
    let k = rng.gen_range(0..=max_orders);
    let mut f = MultFunc::new();
    for _ in 0..k {
        let d = rng.gen_range(1..=max_order);
        let c = rng.gen_range(1..=max_value);
        f = f.add(&MultFunc::uniform_on_order(d, c));
    }
    f
}

/// Block sizes summing to a value in `1..=max_dim`.
pub fn random_partition<R: Rng>(rng: &mut R, max_dim: usize) -> Vec<usize> {
    let n = rng.gen_range(1..=max_dim);
    let mut left = n;
    let mut out = Vec::new();
    while left > 0 {
        let s = rng.gen_range(1..=left);
        out.push(s);
        left -= s;
    }
    out
}

fn random_unimodular<S: Field, R: Rng>(rng: &mut R, n: usize) -> (Matrix<S>, Matrix<S>) {
    // L·U with unit diagonals: invertible with an integral inverse
    let mut small = || S::from_i64(rng.gen_range(-2..=2));
    let l = Matrix::from_fn(n, n, |i, j| if i == j { S::one() } else if i > j { small() } else { S::zero() });
    let u = Matrix::from_fn(n, n, |i, j| if i == j { S::one() } else if i < j { small() } else { S::zero() });
    let p = l.mul(&u);
    let inv = p.inverse().expect("unit triangular product is invertible");
    (p, inv)
}

fn nilpotent_jordan<S: Field>(sizes: &[usize]) -> Matrix<S> {
    let blocks: Vec<Matrix<S>> = sizes
        .iter()
        .map(|&m| Matrix::from_fn(m, m, |i, j| if i == j + 1 { S::one() } else { S::zero() }))
        .collect();
    Matrix::direct_sum(&blocks)
}

/// A nilpotent rational matrix of dimension at most `max_dim` in a random
/// basis, with its block sizes.
pub fn random_nilpotent<R: Rng>(rng: &mut R, max_dim: usize) -> (RationalMatrix, Vec<usize>) {
    let sizes = random_partition(rng, max_dim);
    let n: usize = sizes.iter().sum();
    let (p, inv) = random_unimodular(rng, n);
    (p.mul(&nilpotent_jordan(&sizes)).mul(&inv), sizes)
}

/// A quasi-unipotent matrix over `Q(ζ_N)` of dimension at most `max_dim`,
/// eigenvalue orders at most `max_order`, in a random basis.
pub fn random_quasi_unipotent<R: Rng>(rng: &mut R, max_dim: usize, max_order: u64) -> (CycloMatrix, JordanSpec) {
    let sizes = random_partition(rng, max_dim);
    let blocks = sizes.iter().map(|&size| {
        let d = rng.gen_range(1..=max_order);
        JordanBlock {
            exponent: QZElem::frac(rng.gen_range(0..d), d),
            size,
            count: 1,
        }
    });
    let spec = JordanSpec::new(blocks.collect::<Vec<_>>()).expect("positive sizes");
    let core = spec.materialize(spec.conductor()).expect("conductor covers all orders");
    let (p, inv) = random_unimodular::<CycloElem, _>(rng, spec.dim());
    (p.mul(&core).mul(&inv), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abvar::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_types_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = random_type(&mut rng, TypeCaps { max_g: 6, max_e: 24 });
            assert!(validate(&a).is_empty(), "{a:?}: {:?}", validate(&a));
            assert!(a.g <= 6 && a.e <= 24);
            assert!(crate::abvar::strict_warnings(&a).is_empty());
        }
    }

    #[test]
    fn generator_reaches_interesting_types() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let types: Vec<AbelianType> = (0..500).map(|_| random_type(&mut rng, TypeCaps { max_g: 4, max_e: 12 })).collect();
        assert!(types.iter().any(|a| !a.is_reflexive()));
        assert!(types.iter().any(|a| a.flags.residue_char_zero));
        assert!(types.iter().any(|a| a.tor.support().any(|x| !x.is_zero())));
        assert!(types.iter().any(|a| a.ab.support().any(|x| x.order() > 2)));
        assert!(types.iter().any(|a| a.e > 4));
    }

    #[test]
    fn deterministic_given_seed() {
        let draw = |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (0..20).map(|_| random_type(&mut rng, TypeCaps { max_g: 4, max_e: 12 })).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn operators_have_requested_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (n, sizes) = random_nilpotent(&mut rng, 6);
            let d = sizes.iter().sum::<usize>();
            assert_eq!(n.rows(), d);
            assert!(n.pow(*sizes.iter().max().unwrap() as u32).is_zero());
            let (m, spec) = random_quasi_unipotent(&mut rng, 4, 4);
            let prof = crate::linalg::jordan_profile(&m, &spec.exponents()).unwrap();
            assert_eq!(prof, spec.to_profile());
        }
        let f = random_complete_function(&mut rng, 60, 3, 2);
        assert!(f.is_complete());
    }
}
