//! Elements of the cyclotomic field `Q(ζ_N) = Q[x]/Φ_N(x)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::{Field, UnitRoots};
use crate::arith::lcm;
use crate::error::{Error, Result};
use crate::poly::cyclotomic;
use crate::qz::QZElem;

/// The modulus data of one cyclotomic field.
#[derive(Debug)]
pub struct CycloField {
    conductor: u64,
    /// `Φ_N` without its leading coefficient, ascending.
    modulus: Vec<BigInt>,
}

impl CycloField {
    /// Interned field of conductor `n`.
    pub fn get(n: u64) -> Arc<CycloField> {
        static FIELDS: OnceLock<Mutex<HashMap<u64, Arc<CycloField>>>> = OnceLock::new();
        let fields = FIELDS.get_or_init(Default::default);
        if let Some(f) = fields.lock().unwrap().get(&n) {
            return Arc::clone(f);
        }
        let phi = cyclotomic(n);
        let mut modulus = phi.coeffs().to_vec();
        modulus.pop();
        let field = Arc::new(CycloField {
            conductor: n,
            modulus,
        });
        fields
            .lock()
            .unwrap()
            .entry(n)
            .or_insert_with(|| Arc::clone(&field))
            .clone()
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `[Q(ζ_N) : Q] = φ(N)`.
    pub fn degree(&self) -> usize {
        self.modulus.len()
    }

    /// Reduces a coefficient vector of any length modulo `Φ_N`.
    fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let d = self.degree();
        for k in (d..c.len()).rev() {
            let top = std::mem::replace(&mut c[k], BigRational::zero());
            if top.is_zero() {
                continue;
            }
            // x^k = −Σ_i modulus[i]·x^{k−d+i}
            for (i, m) in self.modulus.iter().enumerate() {
                if !m.is_zero() {
                    let t = &top * m;
                    c[k - d + i] -= t;
                }
            }
        }
        c.resize(d, BigRational::zero());
        c
    }
}

/// An element of `Q(ζ_N)`: a residue polynomial of length `φ(N)` in `ζ_N`.
///
/// Elements over different conductors interoperate: binary operations embed
/// both operands into the field of the lcm conductor.
#[derive(Clone)]
pub struct CycloElem {
    field: Arc<CycloField>,
    coeffs: Vec<BigRational>,
}

impl CycloElem {
    /// Builds an element from coefficients in ascending powers of `ζ_n`; the
    /// vector may be longer than `φ(n)` and is reduced.
    pub fn from_coeffs(n: u64, coeffs: Vec<BigRational>) -> CycloElem {
        let field = CycloField::get(n);
        let coeffs = field.reduce(coeffs);
        CycloElem { field, coeffs }
    }

    pub fn rational(c: BigRational) -> CycloElem {
        CycloElem::from_coeffs(1, vec![c])
    }

    /// `ζ_n^k`.
    pub fn zeta_pow(n: u64, k: u64) -> CycloElem {
        let k = (k % n) as usize;
        let mut c = vec![BigRational::zero(); k + 1];
        c[k] = BigRational::one();
        CycloElem::from_coeffs(n, c)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn field_conductor(&self) -> u64 {
        self.field.conductor
    }

    /// Embeds into `Q(ζ_n)`; requires the current conductor to divide `n`.
    pub fn lift_to(&self, n: u64) -> CycloElem {
        let d = self.field.conductor;
        if d == n {
            return self.clone();
        }
        assert!(n.is_multiple_of(d), "cannot embed Q(ζ_{d}) into Q(ζ_{n})");
        let step = (n / d) as usize;
        let mut c = vec![BigRational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            c[k * step] = a.clone();
        }
        CycloElem::from_coeffs(n, c)
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    fn aligned(a: &CycloElem, b: &CycloElem) -> (CycloElem, CycloElem) {
        let n = lcm(a.field.conductor, b.field.conductor);
        (a.lift_to(n), b.lift_to(n))
    }

    fn same_field(&self, other: &CycloElem) -> bool {
        Arc::ptr_eq(&self.field, &other.field)
    }

    fn add_ref(&self, other: &CycloElem) -> CycloElem {
        if !self.same_field(other) {
            let (a, b) = CycloElem::aligned(self, other);
            return a.add_ref(&b);
        }
        CycloElem {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub_ref(&self, other: &CycloElem) -> CycloElem {
        if !self.same_field(other) {
            let (a, b) = CycloElem::aligned(self, other);
            return a.sub_ref(&b);
        }
        CycloElem {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul_ref(&self, other: &CycloElem) -> CycloElem {
        if !self.same_field(other) {
            if let Some(c) = other.as_rational() {
                return self.scale(&c);
            }
            if let Some(c) = self.as_rational() {
                return other.scale(&c);
            }
            let (a, b) = CycloElem::aligned(self, other);
            return a.mul_ref(&b);
        }
        let d = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); (2 * d).saturating_sub(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycloElem {
            field: Arc::clone(&self.field),
            coeffs: self.field.reduce(prod),
        }
    }

    fn scale(&self, c: &BigRational) -> CycloElem {
        CycloElem {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Inverse via the extended Euclidean algorithm against `Φ_N`.
    pub fn checked_inv(&self) -> Option<CycloElem> {
        if self.is_zero() {
            return None;
        }
        if let Some(c) = self.as_rational() {
            return Some(CycloElem {
                field: Arc::clone(&self.field),
                coeffs: {
                    let mut v = vec![BigRational::zero(); self.coeffs.len()];
                    v[0] = c.recip();
                    v
                },
            });
        }
        let mut modulus: Vec<BigRational> = self
            .field
            .modulus
            .iter()
            .map(|m| BigRational::from_integer(m.clone()))
            .collect();
        modulus.push(BigRational::one());
        // invariant: s·a ≡ r (mod Φ)
        let (mut r0, mut r1) = (modulus, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (Vec::<BigRational>::new(), vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since Φ_N is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let inv: Vec<BigRational> = s0.into_iter().map(|x| x * &c).collect();
        Some(CycloElem::from_coeffs(self.field.conductor, inv))
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n)
        .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
        .collect())
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead_inv = b.last().expect("nonzero divisor").recip();
    let mut quot = vec![BigRational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() * &lead_inv;
        for (i, bc) in b.iter().enumerate() {
            rem[shift + i] -= &c * bc;
        }
        quot[shift] = c;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

impl PartialEq for CycloElem {
    fn eq(&self, other: &Self) -> bool {
        if self.same_field(other) {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = CycloElem::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloElem {}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.field.conductor;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·ζ{n}")?,
                _ => write!(f, "({c})·ζ{n}^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for CycloElem {
    fn zero() -> Self {
        CycloElem::rational(BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl One for CycloElem {
    fn one() -> Self {
        CycloElem::rational(BigRational::one())
    }
}

impl Neg for CycloElem {
    type Output = CycloElem;

    fn neg(self) -> CycloElem {
        CycloElem {
            field: self.field,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr for CycloElem {
            type Output = CycloElem;
            fn $m(self, rhs: CycloElem) -> CycloElem {
                self.$imp(&rhs)
            }
        }
        impl<'a> $tr<&'a CycloElem> for CycloElem {
            type Output = CycloElem;
            fn $m(self, rhs: &'a CycloElem) -> CycloElem {
                self.$imp(rhs)
            }
        }
        impl<'a, 'b> $tr<&'b CycloElem> for &'a CycloElem {
            type Output = CycloElem;
            fn $m(self, rhs: &'b CycloElem) -> CycloElem {
                self.$imp(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Div for CycloElem {
    type Output = CycloElem;

    fn div(self, rhs: CycloElem) -> CycloElem {
        self.mul_ref(&rhs.checked_inv().expect("division by zero in Q(ζ)"))
    }
}

impl Field for CycloElem {
    fn from_i64(n: i64) -> Self {
        CycloElem::rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn inv(&self) -> Self {
        self.checked_inv().expect("division by zero in Q(ζ)")
    }
}

impl UnitRoots for CycloElem {
    fn root_of_unity(x: &QZElem, n: u64) -> Result<Self> {
        root_of_unity(x, n)
    }

    fn conductor(&self) -> u64 {
        self.field.conductor
    }

    fn lift(&self, n: u64) -> Self {
        self.lift_to(n)
    }
}

/// `exp(2πi·x) = ζ_N^{x·N}`; requires `order(x) | N`.
pub fn root_of_unity(x: &QZElem, n: u64) -> Result<CycloElem> {
    if n == 0 || !n.is_multiple_of(x.order()) {
        return Err(Error::ConductorMismatch {
            order: x.order(),
            conductor: n,
        });
    }
    Ok(CycloElem::zeta_pow(n, x.numer() * (n / x.denom())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn q(a: i64, b: i64) -> QZElem {
        QZElem::new(a, b).unwrap()
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(root_of_unity(&QZElem::ZERO, 4).unwrap(), CycloElem::one());
        assert_eq!(root_of_unity(&q(1, 2), 4).unwrap(), -CycloElem::one());
        let z = root_of_unity(&q(1, 4), 4).unwrap();
        assert_eq!(z.coeffs(), &[r(0, 1), r(1, 1)]);
        assert!(matches!(
            root_of_unity(&q(1, 3), 4),
            Err(Error::ConductorMismatch { order: 3, conductor: 4 })
        ));
    }

    #[test]
    fn zeta_has_exact_order() {
        for n in [3u64, 5, 8, 12] {
            let z = CycloElem::zeta_pow(n, 1);
            let mut p = CycloElem::one();
            for k in 1..=n {
                p = p * &z;
                assert_eq!(p.is_one_value(), k == n, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn lifting_is_compatible() {
        // ζ₃ = ζ₁₂⁴ and ζ₄ = ζ₁₂³, so ζ₃·ζ₄ = ζ₁₂⁷
        let prod = CycloElem::zeta_pow(3, 1) * CycloElem::zeta_pow(4, 1);
        assert_eq!(prod, CycloElem::zeta_pow(12, 7));
        assert_eq!(CycloElem::zeta_pow(2, 1).lift_to(6), CycloElem::from_i64(-1));
    }

    impl CycloElem {
        fn is_one_value(&self) -> bool {
            *self == CycloElem::one()
        }
    }

    proptest! {
        #[test]
        fn inverse_is_inverse(n in prop::sample::select(vec![3u64, 4, 5, 7, 8, 9, 12, 15]),
                              cs in prop::collection::vec(-5i64..6, 1..10)) {
            let a = CycloElem::from_coeffs(n, cs.iter().map(|&c| r(c, 1)).collect());
            prop_assume!(!a.is_zero());
            prop_assert_eq!(a.clone() * a.inv(), CycloElem::one());
        }

        #[test]
        fn multiplication_commutes_and_distributes(
            n in prop::sample::select(vec![4u64, 6, 10]),
            a in prop::collection::vec(-3i64..4, 1..5),
            b in prop::collection::vec(-3i64..4, 1..5),
            c in prop::collection::vec(-3i64..4, 1..5),
        ) {
            let mk = |v: &Vec<i64>| CycloElem::from_coeffs(n, v.iter().map(|&x| r(x, 1)).collect());
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            prop_assert_eq!(a.clone() * &b, b.clone() * &a);
            prop_assert_eq!(a.clone() * (b.clone() + &c), a.clone() * &b + a * &c);
        }
    }
}
