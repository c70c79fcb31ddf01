//! Monodromy and weight-filtration invariants of tamely ramified abelian
//! varieties, computed exactly from multiplicity-function data and checked
//! against brute-force linear algebra over cyclotomic fields.

pub mod abvar;
pub mod arith;
pub mod error;
pub mod jordan_calc;
pub mod linalg;
pub mod poly;
pub mod qz;
pub mod random;
pub mod verify;
pub mod weight_filt;

pub use abvar::{AbelianType, Finding, Flags, Violation};
pub use error::{Error, Result};
pub use jordan_calc::{JordanBlock, JordanSpec};
pub use linalg::{CycloElem, Field, JordanProfile, Matrix, UnitRoots};
pub use poly::{CycloFactorization, IntPoly};
pub use qz::{MultFunc, QZElem};
pub use weight_filt::{Subspace, WeightFiltration};

/// Exact rationals.
pub type Rational = num_rational::BigRational;
/// Matrices over Q.
pub type RationalMatrix = Matrix<Rational>;
/// Matrices over a cyclotomic field `Q(ζ_N)`.
pub type CycloMatrix = Matrix<CycloElem>;
