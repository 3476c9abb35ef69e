//! JSON encodings.
//!
//! * Field: `{"kind":"prime","p":5}` or `{"kind":"rational"}`.
//! * Matrix: `{"field": <field>, "rows": r, "cols": c, "entries": [["1","0"], ...]}`
//!   with each entry in the scalar text encoding. Plain JSON integers are
//!   accepted on input.
//! * Pair / space: `{"a": <matrix>, "b": <matrix>}`.

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::pencil::{space_make, PencilTransform, TwoDimSpace};
use crate::similarity::MatrixPair;

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[Scalar]> = (0..self.rows()).map(|i| self.row(i)).collect();
        let mut st = ser.serialize_struct("Matrix", 4)?;
        st.serialize_field("field", &self.field())?;
        st.serialize_field("rows", &self.rows())?;
        st.serialize_field("cols", &self.cols())?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Text(String),
    Int(i64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<EntryRepr>>,
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(de)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(de::Error::custom(format!(
                "entries do not form a {}x{} array",
                repr.rows, repr.cols
            )));
        }
        let mut flat = Vec::with_capacity(repr.rows * repr.cols);
        for e in repr.entries.into_iter().flatten() {
            let s = match e {
                EntryRepr::Text(t) => repr.field.parse(&t),
                EntryRepr::Int(v) => Ok(repr.field.from_i64(v)),
            };
            flat.push(s.map_err(de::Error::custom)?);
        }
        Matrix::new(repr.field, repr.rows, repr.cols, flat).map_err(de::Error::custom)
    }
}

impl Serialize for MatrixPair {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("MatrixPair", 2)?;
        st.serialize_field("a", self.a())?;
        st.serialize_field("b", self.b())?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairRepr {
    a: Matrix,
    b: Matrix,
}

impl<'de> Deserialize<'de> for MatrixPair {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let r = PairRepr::deserialize(de)?;
        MatrixPair::new(r.a, r.b).map_err(de::Error::custom)
    }
}

impl Serialize for TwoDimSpace {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.basis().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TwoDimSpace {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let r = PairRepr::deserialize(de)?;
        space_make(r.a, r.b).map_err(de::Error::custom)
    }
}

impl Serialize for PencilTransform {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.matrix().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PencilTransform {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        PencilTransform::new(Matrix::deserialize(de)?).map_err(de::Error::custom)
    }
}
