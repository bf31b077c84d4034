//! Trace coordinates: class coordinates on `G//G`, the `SL(2)` trace triple
//! and its section, the seven `SL(2)` traces of a triple with their cubic
//! relation, and the nine `SL(3)` traces of a pair.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix_core::serde_io::JsonComplex;
use crate::matrix_core::{ComplexMatrix, GroupElement, C64};

/// `SL(2,C)` or `SL(3,C)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Group {
    SL2,
    SL3,
}

impl Group {
    pub fn from_dim(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Self::SL2),
            3 => Ok(Self::SL3),
            _ => Err(Error::InvalidDimension(n)),
        }
    }

    /// Matrix size `n`.
    pub fn n(self) -> usize {
        match self {
            Self::SL2 => 2,
            Self::SL3 => 3,
        }
    }

    /// Complex dimension `n^2 - 1`.
    pub fn dim(self) -> usize {
        self.n() * self.n() - 1
    }

    /// Rank `n - 1`.
    pub fn rank(self) -> usize {
        self.n() - 1
    }
}

/// Labelled complex values, serialized as a JSON object in label order.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceVector {
    labels: Vec<String>,
    values: Vec<C64>,
}

impl TraceVector {
    pub fn new(labels: Vec<String>, values: Vec<C64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} values",
                labels.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { labels, values })
    }

    fn from_static(labels: &[&str], values: Vec<C64>) -> Self {
        Self {
            labels: labels.iter().map(|s| (*s).to_owned()).collect(),
            values,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<C64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.values[i])
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference; infinite when the lengths differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Serialize for TraceVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.len()))?;
        for (l, v) in self.labels.iter().zip(&self.values) {
            map.serialize_entry(l, &JsonComplex([v.re, v.im]))?;
        }
        map.end()
    }
}

/// Point of `G//G`: `tr g` for `SL(2)`, `(tr g, tr g^{-1})` for `SL(3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPoint {
    pub group: Group,
    pub coords: Vec<C64>,
}

impl ClassPoint {
    /// Largest coordinate difference; infinite across groups.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.group != other.group {
            return f64::INFINITY;
        }
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Serialize for ClassPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ClassPoint", 2)?;
        st.serialize_field("group", &self.group)?;
        let coords: Vec<JsonComplex> = self
            .coords
            .iter()
            .map(|c| JsonComplex([c.re, c.im]))
            .collect();
        st.serialize_field("coords", &coords)?;
        st.end()
    }
}

/// `tr g^{-1}` for `det g = 1`, via the adjugate.
fn trace_of_inverse(g: &ComplexMatrix) -> C64 {
    g.adjugate().trace()
}

/// Class coordinates of `g`.
pub fn class_coordinates(g: &GroupElement) -> ClassPoint {
    let m = g.mat();
    match g.dim() {
        2 => ClassPoint {
            group: Group::SL2,
            coords: vec![m.trace()],
        },
        _ => ClassPoint {
            group: Group::SL3,
            coords: vec![m.trace(), trace_of_inverse(m)],
        },
    }
}

/// `(tr g1, tr g2, tr g1 g2)`.
pub fn sl2_trace_triple(g1: &GroupElement, g2: &GroupElement) -> (C64, C64, C64) {
    (
        g1.mat().trace(),
        g2.mat().trace(),
        (*g1.mat() * *g2.mat()).trace(),
    )
}

/// Root of `l + 1/l = x` of larger modulus; `(x + sqrt(x^2 - 4)) / 2` on ties.
fn trace_root(x: C64) -> C64 {
    let disc = (x * x - 4.0).sqrt();
    let plus = (x + disc) * 0.5;
    let minus = (x - disc) * 0.5;
    if minus.norm() > plus.norm() {
        minus
    } else {
        plus
    }
}

/// Section of the trace triple: `g1 = [[l, 1], [0, 1/l]]`,
/// `g2 = [[u, 0], [s, 1/u]]` with `l + 1/l = x`, `u + 1/u = y` and
/// `s = z - l u - 1/(l u)`. At `x = +-2` the first factor is a Jordan block.
pub fn sl2_lift(x: C64, y: C64, z: C64) -> (GroupElement, GroupElement) {
    let l = trace_root(x);
    let u = trace_root(y);
    let s = z - l * u - (l * u).inv();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let g1 = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => l,
        (0, 1) => one,
        (1, 1) => l.inv(),
        _ => zero,
    });
    let g2 = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => u,
        (1, 0) => s,
        (1, 1) => u.inv(),
        _ => zero,
    });
    (
        GroupElement::new_unchecked(g1),
        GroupElement::new_unchecked(g2),
    )
}

/// Labels of [`sl2_seven_traces`].
pub const SEVEN_TRACE_LABELS: [&str; 7] = ["a", "b", "c", "d", "x", "y", "z"];
/// Labels of [`sl3_nine_traces`].
pub const NINE_TRACE_LABELS: [&str; 9] = ["t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9"];

/// `a = tr g1, b = tr g2, c = tr g3, d = tr g1g2g3, x = tr g1g2,
/// y = tr g2g3, z = tr g3g1`.
pub fn sl2_seven_traces(g1: &GroupElement, g2: &GroupElement, g3: &GroupElement) -> TraceVector {
    let (a, b, c) = (*g1.mat(), *g2.mat(), *g3.mat());
    let ab = a * b;
    let values = vec![
        a.trace(),
        b.trace(),
        c.trace(),
        (ab * c).trace(),
        ab.trace(),
        (b * c).trace(),
        (c * a).trace(),
    ];
    TraceVector::from_static(&SEVEN_TRACE_LABELS, values)
}

/// Sign convention of the `abcd` term in the seven-trace cubic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum FrickeVariant {
    /// `... - abcd`, which does not vanish at the identity representation.
    Printed,
    /// `... + abcd`, which vanishes on all trace vectors of triples.
    #[default]
    Corrected,
}

/// `x^2 + y^2 + z^2 + xyz - (ab+cd)x - (ad+bc)y - (ac+bd)z - 4 + a^2 + b^2 +
/// c^2 + d^2 -+ abcd` at `v = (a, b, c, d, x, y, z)`.
pub fn fricke_cubic(v: &[C64; 7], variant: FrickeVariant) -> C64 {
    let [a, b, c, d, x, y, z] = *v;
    let abcd = a * b * c * d;
    let base = x * x + y * y + z * z + x * y * z
        - (a * b + c * d) * x
        - (a * d + b * c) * y
        - (a * c + b * d) * z
        - 4.0
        + a * a
        + b * b
        + c * c
        + d * d;
    match variant {
        FrickeVariant::Printed => base - abcd,
        FrickeVariant::Corrected => base + abcd,
    }
}

/// [`fricke_cubic`] on the output of [`sl2_seven_traces`].
pub fn fricke_on_traces(tv: &TraceVector, variant: FrickeVariant) -> C64 {
    let v: [C64; 7] = std::array::from_fn(|i| tv.values()[i]);
    fricke_cubic(&v, variant)
}

/// `t1 = tr g1, t2 = tr g1^-1, t3 = tr g2, t4 = tr g2^-1, t5 = tr g1g2,
/// t6 = tr (g1g2)^-1, t7 = tr g1^-1 g2, t8 = tr g1 g2^-1,
/// t9 = tr g1 g2 g1^-1 g2^-1`.
pub fn sl3_nine_traces(g1: &GroupElement, g2: &GroupElement) -> TraceVector {
    let (a, b) = (*g1.mat(), *g2.mat());
    let (ai, bi) = (*g1.inverse().mat(), *g2.inverse().mat());
    let ab = a * b;
    let values = vec![
        a.trace(),
        ai.trace(),
        b.trace(),
        bi.trace(),
        ab.trace(),
        (bi * ai).trace(),
        (ai * b).trace(),
        (a * bi).trace(),
        (ab * ai * bi).trace(),
    ];
    TraceVector::from_static(&NINE_TRACE_LABELS, values)
}

/// `(g1^T, g2^T)`. Preserves `t1..t8` and sends `t9` to
/// `tr g2^-1 g1^-1 g2 g1`.
pub fn sl3_transpose_involution(
    g1: &GroupElement,
    g2: &GroupElement,
) -> (GroupElement, GroupElement) {
    (
        GroupElement::new_unchecked(g1.mat().transpose()),
        GroupElement::new_unchecked(g2.mat().transpose()),
    )
}
