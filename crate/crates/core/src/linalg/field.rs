use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qz::QZElem;

/// Exact scalars the linear algebra runs over.
///
/// Implementations must be genuine fields: every nonzero element is
/// invertible and `is_zero` is decidable.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_i64(n: i64) -> Self;

    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }
}

/// Fields that contain the roots of unity needed for quasi-unipotent
/// monodromy.
pub trait UnitRoots: Field {
    /// `exp(2πi·x)` as an element of a field containing the `n`-th roots of
    /// unity. Requires `order(x) | n`.
    fn root_of_unity(x: &QZElem, n: u64) -> Result<Self>;

    /// Smallest conductor the element is expressed over.
    fn conductor(&self) -> u64;

    /// Re-express the element over conductor `n`.
    fn lift(&self, n: u64) -> Self;
}

impl Field for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn inv(&self) -> Self {
        self.recip()
    }
}

/// Over Q only `±1` are available.
impl UnitRoots for BigRational {
    fn root_of_unity(x: &QZElem, n: u64) -> Result<Self> {
        if !n.is_multiple_of(x.order()) {
            return Err(Error::ConductorMismatch {
                order: x.order(),
                conductor: n,
            });
        }
        match x.order() {
            1 => Ok(BigRational::one()),
            2 => Ok(-BigRational::one()),
            order => Err(Error::ConductorMismatch {
                order,
                conductor: 2,
            }),
        }
    }

    fn conductor(&self) -> u64 {
        1
    }

    fn lift(&self, _n: u64) -> Self {
        self.clone()
    }
}
