//! JSON form of matrices over `Q(ζ_N)`.
//!
//! ```json
//! { "conductor": 4, "rows": [["0", "0"], [["0", "1"], "0"]] }
//! ```
//! An entry is a rational string or a list of rational strings giving the
//! coefficients of `1, ζ_N, ζ_N², …`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::cyclo::CycloElem;
use super::matrix::Matrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Rational(String),
    Coeffs(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycloMatrixJson {
    #[serde(default = "one")]
    pub conductor: u64,
    pub rows: Vec<Vec<EntryJson>>,
}

fn one() -> u64 {
    1
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
}

impl CycloMatrixJson {
    pub fn to_matrix(&self) -> Result<Matrix<CycloElem>> {
        if self.conductor == 0 {
            return Err(Error::Parse("conductor must be positive".into()));
        }
        let cols = self.rows.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut out = Vec::with_capacity(row.len());
            for e in row {
                let coeffs = match e {
                    EntryJson::Rational(s) => vec![parse_rational(s)?],
                    EntryJson::Coeffs(v) => v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
                };
                out.push(CycloElem::from_coeffs(self.conductor, coeffs));
            }
            rows.push(out);
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        Matrix::from_rows(cols, rows)
    }

    pub fn from_matrix(m: &Matrix<CycloElem>) -> CycloMatrixJson {
        let n = m.conductor();
        let m = m.lift(n);
        let rows = m
            .row_vecs()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| match x.as_rational() {
                        Some(q) => EntryJson::Rational(q.to_string()),
                        None => {
                            let c = x.coeffs();
                            let len = c.iter().rposition(|v| !v.is_zero()).map_or(0, |i| i + 1);
                            EntryJson::Coeffs(c[..len].iter().map(|v| v.to_string()).collect())
                        }
                    })
                    .collect()
            })
            .collect();
        CycloMatrixJson { conductor: n, rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    #[test]
    fn round_trip() {
        let js = r#"{"conductor":4,"rows":[["0","0"],[["0","1"],"-1/2"]]}"#;
        let parsed: CycloMatrixJson = serde_json::from_str(js).unwrap();
        let m = parsed.to_matrix().unwrap();
        assert_eq!(m[(1, 0)], CycloElem::zeta_pow(4, 1));
        assert_eq!(m[(1, 1)], CycloElem::from_i64(-1) / CycloElem::from_i64(2));
        assert_eq!(CycloMatrixJson::from_matrix(&m).to_matrix().unwrap(), m);
        assert_eq!(serde_json::to_string(&CycloMatrixJson::from_matrix(&m)).unwrap(), js);
    }

    #[test]
    fn rejects_bad_input() {
        let ragged: CycloMatrixJson = serde_json::from_str(r#"{"rows":[["1"],["1","2"]]}"#).unwrap();
        assert!(ragged.to_matrix().is_err());
        let junk: CycloMatrixJson = serde_json::from_str(r#"{"rows":[["x"]]}"#).unwrap();
        assert!(matches!(junk.to_matrix(), Err(Error::Parse(_))));
    }
}
