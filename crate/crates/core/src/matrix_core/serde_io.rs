//! JSON encoding shared across the crate: a complex number is `[re, im]`, a
//! matrix is a row-major array of rows, and a group-valued matrix is the
//! object `{"n": 2|3, "mat": [[...]]}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::mat::{ComplexMatrix, C64};
use super::{GroupElement, HermitianDirection, UnitaryElement};

/// `[re, im]` wrapper for serializing a complex number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex(pub [f64; 2]);

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        Self([z.re, z.im])
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        C64::new(z.0[0], z.0[1])
    }
}

pub fn serialize_complex<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    JsonComplex::from(*z).serialize(s)
}

pub fn serialize_complex_vec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| JsonComplex::from(*z)))
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<JsonComplex>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(JsonComplex::from).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<JsonComplex>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(C64::from).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct Tagged {
    n: usize,
    mat: ComplexMatrix,
}

fn tagged<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
    let t = Tagged::deserialize(d)?;
    if t.n != t.mat.dim() {
        return Err(D::Error::custom(format!(
            "n = {} but matrix is {0}x{0}",
            t.mat.dim()
        )));
    }
    Ok(t.mat)
}

macro_rules! tagged_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                Tagged {
                    n: self.dim(),
                    mat: *self.mat(),
                }
                .serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let m = tagged(d)?;
                <$ty>::new(m).map_err(D::Error::custom)
            }
        }
    };
}

tagged_serde!(GroupElement);
tagged_serde!(UnitaryElement);
tagged_serde!(HermitianDirection);
