//! Exact linear algebra over Q and cyclotomic fields; the brute-force side of
//! every symbolic computation in the crate.

pub mod cyclo;
pub mod field;
pub mod jordan;
pub mod json;
pub mod matrix;

pub use cyclo::{root_of_unity, CycloElem, CycloField};
pub use field::{Field, UnitRoots};
pub use jordan::{jordan_chevalley, jordan_profile, JordanProfile};
pub use json::{CycloMatrixJson, EntryJson};
pub use matrix::{subsets, Matrix};
