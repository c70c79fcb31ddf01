//! Integer polynomials, cyclotomic polynomials, and the correspondence between
//! complete multiplicity functions and products of cyclotomic polynomials.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::{divisors, totient};
use crate::error::{Error, Result};
use crate::qz::MultFunc;

/// A polynomial in `Z[t]`, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> IntPoly {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> IntPoly {
        IntPoly::from_i64(&[1])
    }

    /// `t^n − 1`.
    pub fn t_pow_minus_one(n: usize) -> IntPoly {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        IntPoly::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, mut e: u64) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
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

    /// Quotient and remainder by a monic divisor.
    pub fn divrem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (IntPoly::default(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = std::mem::take(&mut rem[k]);
            if c.is_zero() {
                continue;
            }
            for (i, dc) in divisor.coeffs[..dd].iter().enumerate() {
                rem[k - dd + i] -= &c * dc;
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (IntPoly::new(quot), IntPoly::new(rem))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}t")?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{mag}t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let coeffs = raw
            .iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(|_| de::Error::custom(format!("bad integer {s:?}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<IntPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<IntPoly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The cyclotomic polynomial `Φ_d`, via `(t^d − 1) / Π_{d' | d, d' < d} Φ_{d'}`.
pub fn cyclotomic(d: u64) -> Arc<IntPoly> {
    assert!(d >= 1, "cyclotomic index must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&d) {
        return Arc::clone(p);
    }
    let mut p = IntPoly::t_pow_minus_one(d as usize);
    for dp in divisors(d) {
        if dp == d {
            continue;
        }
        let (q, r) = p.divrem_monic(&cyclotomic(dp));
        debug_assert!(r.is_zero());
        p = q;
    }
    let p = Arc::new(p);
    phi_cache().lock().unwrap().insert(d, Arc::clone(&p));
    p
}

/// Exponents of the cyclotomic factors: `d ↦ multiplicity of Φ_d`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CycloFactorization {
    pub factors: BTreeMap<u64, u64>,
}

impl CycloFactorization {
    /// The complete function taking value `c_d` on every element of order `d`.
    pub fn to_mult_func(&self) -> MultFunc {
        self.factors
            .iter()
            .fold(MultFunc::new(), |acc, (&d, &c)| acc.add(&MultFunc::uniform_on_order(d, c)))
    }

    pub fn to_poly(&self) -> IntPoly {
        self.factors
            .iter()
            .fold(IntPoly::one(), |acc, (&d, &c)| acc.mul(&cyclotomic(d).pow(c)))
    }
}

/// `Q_f(t) = Π_d Φ_d(t)^{c_d}` for a complete `f` with value `c_d` on order `d`.
pub fn q_poly(f: &MultFunc) -> Result<IntPoly> {
    let values = f.order_values()?;
    Ok(CycloFactorization { factors: values }.to_poly())
}

/// Characteristic polynomial attached to a complete exponent function.
pub fn charpoly_from_exponents(g: &MultFunc) -> Result<IntPoly> {
    q_poly(g)
}

/// Splits a monic polynomial into cyclotomic factors by trial division in
/// increasing `d`.
pub fn factor_cyclotomic(p: &IntPoly) -> Result<CycloFactorization> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    let mut residual = p.clone();
    let mut factors = BTreeMap::new();
    let deg = p.degree().unwrap_or(0) as u64;
    // φ(d) ≥ sqrt(d/2) for all d, so no order beyond 2·deg² can contribute.
    let bound = 2 * deg * deg + 2;
    let mut d = 1;
    while d <= bound {
        let rdeg = residual.degree().unwrap_or(0) as u64;
        if rdeg == 0 {
            break;
        }
        if totient(d) <= rdeg {
            let phi = cyclotomic(d);
            loop {
                let (q, r) = residual.divrem_monic(&phi);
                if !r.is_zero() {
                    break;
                }
                residual = q;
                *factors.entry(d).or_insert(0) += 1;
            }
        }
        d += 1;
    }
    if residual.degree() != Some(0) {
        return Err(Error::NotCyclotomic {
            residual: residual.to_string(),
        });
    }
    Ok(CycloFactorization { factors })
}
