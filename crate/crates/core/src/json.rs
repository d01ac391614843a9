//! JSON encodings shared by every file format.
//!
//! Matrices are `{"rows": r, "cols": c, "entries": [[re, im], ...]}` in
//! row-major order; vectors are `{"dim": n, "amplitudes": [[re, im], ...]}`.
//! Floats are written in shortest round-trip form, so parsing an emitted file
//! reproduces every double bit for bit.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, StateVector, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), entries }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.rows == 0 || j.cols == 0 {
            return Err(Error::Encoding(format!("matrix must be non-empty, got {}x{}", j.rows, j.cols)));
        }
        if j.entries.len() != j.rows * j.cols {
            return Err(Error::Encoding(format!(
                "matrix {}x{} needs {} entries, found {}",
                j.rows,
                j.cols,
                j.rows * j.cols,
                j.entries.len()
            )));
        }
        if j.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Encoding("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix::from_row_iterator(j.rows, j.cols, j.entries.iter().map(|[re, im]| C64::new(*re, *im))))
    }
}

impl From<&StateVector> for VectorJson {
    fn from(v: &StateVector) -> Self {
        Self { dim: v.len(), amplitudes: v.iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<VectorJson> for StateVector {
    type Error = Error;

    fn try_from(j: VectorJson) -> Result<Self> {
        if j.amplitudes.len() != j.dim {
            return Err(Error::Encoding(format!("vector of dim {} has {} amplitudes", j.dim, j.amplitudes.len())));
        }
        if j.amplitudes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Encoding("vector amplitudes must be finite".into()));
        }
        Ok(StateVector::from_iterator(j.dim, j.amplitudes.iter().map(|[re, im]| C64::new(*re, *im))))
    }
}

/// `#[serde(with = "crate::json::matrix")]`
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "crate::json::matrices")]`
pub mod matrices {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[ComplexMatrix], s: S) -> Result<S::Ok, S::Error> {
        let js: Vec<MatrixJson> = ms.iter().map(MatrixJson::from).collect();
        js.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ComplexMatrix>, D::Error> {
        let js = Vec::<MatrixJson>::deserialize(d)?;
        js.into_iter().map(|j| ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)).collect()
    }
}

/// `#[serde(with = "crate::json::vector")]`
/// Nested lists of matrices, e.g. one list of effects per measurement outcome.
pub mod matrix_lists {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[Vec<ComplexMatrix>], s: S) -> Result<S::Ok, S::Error> {
        let js: Vec<Vec<MatrixJson>> = ms.iter().map(|row| row.iter().map(MatrixJson::from).collect()).collect();
        js.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<ComplexMatrix>>, D::Error> {
        let js = Vec::<Vec<MatrixJson>>::deserialize(d)?;
        js.into_iter()
            .map(|row| row.into_iter().map(|j| ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &StateVector, s: S) -> Result<S::Ok, S::Error> {
        VectorJson::from(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<StateVector, D::Error> {
        let j = VectorJson::deserialize(d)?;
        StateVector::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "crate::json::vectors")]`
pub mod vectors {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[StateVector], s: S) -> Result<S::Ok, S::Error> {
        let js: Vec<VectorJson> = vs.iter().map(VectorJson::from).collect();
        js.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<StateVector>, D::Error> {
        let js = Vec::<VectorJson>::deserialize(d)?;
        js.into_iter().map(|j| StateVector::try_from(j).map_err(serde::de::Error::custom)).collect()
    }
}

pub fn matrix_to_string(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix json")
}

pub fn matrix_from_str(s: &str) -> Result<ComplexMatrix> {
    ComplexMatrix::try_from(serde_json::from_str::<MatrixJson>(s)?)
}
