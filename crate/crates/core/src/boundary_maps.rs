//! Boundary maps of a genus `g` surface with `b` punctures, identified with
//! the free group `F_{m+n}` through `e_i -> gamma_i` (`i < b`), then the
//! `alpha_i`, then the `beta_i`; the parabolic boundary map; and dimension
//! estimates for parabolic character varieties.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix_core::serde_io::JsonComplex;
use crate::matrix_core::{stabilizer_dimension, stream_rng, GroupElement};
use crate::retraction::{random_rep_tuple, ParabolicData};
use crate::trace_coords::{class_coordinates, ClassPoint, Group};

/// Radius of the random group elements used by [`dim_estimate`].
const DIM_SAMPLE_RADIUS: f64 = 1.0;

/// Genus `g`, punctures `b`, parabolic count `m` and free count `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceData {
    pub g: usize,
    pub b: usize,
    pub m: usize,
    pub n: usize,
}

impl SurfaceData {
    /// Requires `b >= 1`, `b > m` and `m + n = 2g + b - 1`.
    pub fn new(g: usize, b: usize, m: usize, n: usize) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidSurface(
                "at least one puncture is required".into(),
            ));
        }
        if m >= b {
            return Err(Error::InvalidSurface(format!(
                "need b > m, got b = {b}, m = {m}"
            )));
        }
        if m + n != 2 * g + b - 1 {
            return Err(Error::InvalidSurface(format!(
                "m + n = {} but 2g + b - 1 = {}",
                m + n,
                2 * g + b - 1
            )));
        }
        Ok(Self { g, b, m, n })
    }

    /// Surface with `m + n = 2g + b - 1` filled in.
    pub fn with_free_count(g: usize, b: usize, m: usize) -> Result<Self> {
        let rank = (2 * g + b).checked_sub(1 + m).ok_or_else(|| {
            Error::InvalidSurface(format!(
                "m = {m} exceeds the free rank {}",
                (2 * g + b).saturating_sub(1)
            ))
        })?;
        Self::new(g, b, m, rank)
    }

    /// Rank `m + n` of the free group.
    pub fn rank(&self) -> usize {
        self.m + self.n
    }

    /// Generator index (1-based) of `alpha_i`, `i` in `1..=g`.
    pub fn alpha(&self, i: usize) -> i64 {
        (self.b - 1 + i) as i64
    }

    /// Generator index (1-based) of `beta_i`, `i` in `1..=g`.
    pub fn beta(&self, i: usize) -> i64 {
        (self.b - 1 + self.g + i) as i64
    }

    /// Word of `prod [alpha_i, beta_i] prod_{j < b} gamma_j` with
    /// `[a, b] = a b a^-1 b^-1`.
    pub fn relator_prefix_word(&self) -> Vec<i64> {
        let mut w = Vec::with_capacity(4 * self.g + self.b - 1);
        for i in 1..=self.g {
            let (a, b) = (self.alpha(i), self.beta(i));
            w.extend([a, b, -a, -b]);
        }
        w.extend((1..self.b as i64).collect::<Vec<_>>());
        w
    }

    /// Word of `gamma_b`, the inverse of [`Self::relator_prefix_word`].
    pub fn last_loop_word(&self) -> Vec<i64> {
        invert_word(&self.relator_prefix_word())
    }
}

/// Reversed word with every letter inverted.
pub fn invert_word(word: &[i64]) -> Vec<i64> {
    word.iter().rev().map(|&i| -i).collect()
}

/// Product of the letters left to right; `k` stands for `tuple[k-1]` and `-k`
/// for its inverse. The empty word is the identity.
pub fn word_evaluate(tuple: &[GroupElement], word: &[i64]) -> Result<GroupElement> {
    let n = tuple
        .first()
        .map(GroupElement::dim)
        .ok_or_else(|| Error::ShapeMismatch("cannot evaluate words on an empty tuple".into()))?;
    let mut acc = GroupElement::identity(n);
    for &letter in word {
        let idx = letter.unsigned_abs() as usize;
        if letter == 0 || idx > tuple.len() {
            return Err(Error::IndexOutOfRange {
                index: letter,
                len: tuple.len(),
            });
        }
        let g = &tuple[idx - 1];
        acc = if letter > 0 {
            acc.mul(g)
        } else {
            acc.mul(&g.inverse())
        };
    }
    Ok(acc)
}

/// Class coordinates of `b` or `m` boundary loops.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryVector {
    pub group: Group,
    pub points: Vec<ClassPoint>,
}

impl BoundaryVector {
    /// Largest coordinate difference; infinite on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.group != other.group || self.points.len() != other.points.len() {
            return f64::INFINITY;
        }
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// The first `m` points.
    pub fn project(&self, m: usize) -> Self {
        Self {
            group: self.group,
            points: self.points[..m.min(self.points.len())].to_vec(),
        }
    }
}

impl Serialize for BoundaryVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BoundaryVector", 2)?;
        st.serialize_field("group", &self.group)?;
        let points: Vec<Vec<JsonComplex>> = self
            .points
            .iter()
            .map(|p| p.coords.iter().map(|c| JsonComplex([c.re, c.im])).collect())
            .collect();
        st.serialize_field("points", &points)?;
        st.end()
    }
}

fn tuple_group(tuple: &[GroupElement]) -> Result<Group> {
    let first = tuple
        .first()
        .ok_or_else(|| Error::ShapeMismatch("empty tuple".into()))?;
    if tuple.iter().any(|g| g.dim() != first.dim()) {
        return Err(Error::ShapeMismatch("components of mixed size".into()));
    }
    Group::from_dim(first.dim())
}

/// `(gamma_1, .., gamma_b)` evaluated on `rho o phi^{-1}`, i.e. the free
/// generators carry `gamma_1, .., gamma_{b-1}, alpha_*, beta_*`.
pub fn boundary_loops(tuple: &[GroupElement], surface: &SurfaceData) -> Result<Vec<GroupElement>> {
    tuple_group(tuple)?;
    if tuple.len() != surface.rank() {
        return Err(Error::ShapeMismatch(format!(
            "tuple has {} components, surface needs {}",
            tuple.len(),
            surface.rank()
        )));
    }
    let mut loops: Vec<GroupElement> = tuple[..surface.b - 1].to_vec();
    loops.push(word_evaluate(tuple, &surface.last_loop_word())?);
    Ok(loops)
}

/// `([[rho(gamma_1)]], .., [[rho(gamma_b)]])`.
pub fn boundary(tuple: &[GroupElement], surface: &SurfaceData) -> Result<BoundaryVector> {
    let group = tuple_group(tuple)?;
    let points = boundary_loops(tuple, surface)?
        .iter()
        .map(class_coordinates)
        .collect();
    Ok(BoundaryVector { group, points })
}

/// Class coordinates of the first `m` components.
pub fn boundary_par(tuple: &[GroupElement], m: usize) -> Result<BoundaryVector> {
    let group = tuple_group(tuple)?;
    if m > tuple.len() {
        return Err(Error::ShapeMismatch(format!(
            "m = {m} exceeds {} components",
            tuple.len()
        )));
    }
    Ok(BoundaryVector {
        group,
        points: tuple[..m].iter().map(class_coordinates).collect(),
    })
}

/// `max |pi(boundary(tuple)) - boundary_par(tuple)|` over coordinates.
pub fn diagram_check(tuple: &[GroupElement], surface: &SurfaceData) -> Result<f64> {
    let full = boundary(tuple, surface)?;
    let par = boundary_par(tuple, surface.m)?;
    Ok(full.project(surface.m).distance(&par))
}

/// Whether `boundary(tuple)` is within `tol` of `bvec` in the max norm.
pub fn relative_fiber_membership(
    tuple: &[GroupElement],
    surface: &SurfaceData,
    bvec: &BoundaryVector,
    tol: f64,
) -> Result<bool> {
    let own = boundary(tuple, surface)?;
    if own.group != bvec.group || own.points.len() != bvec.points.len() {
        return Err(Error::ShapeMismatch(format!(
            "boundary vector has {} points, surface has {} punctures",
            bvec.points.len(),
            own.points.len()
        )));
    }
    Ok(own.distance(bvec) <= tol)
}

/// Dimension count for a parabolic character variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimReport {
    #[serde(rename = "dim_H")]
    pub dim_h: i64,
    pub dim_stab: i64,
    #[serde(rename = "dim_X")]
    pub dim_x: i64,
    pub dim_formula: i64,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// `dim_H = sum (dim G - dim G_{h_i}) + n dim G`, `dim_stab` the largest
/// sampled common centralizer dimension, `dim_X = dim_H - dim G + dim_stab`
/// and `dim_formula = (n + m - 1) dim G - m rank G`.
///
/// Samples run in parallel, each on its own stream derived from one draw of
/// `rng`.
pub fn dim_estimate<R: Rng + ?Sized>(
    pardata: &Arc<ParabolicData>,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<DimReport> {
    let m = pardata.m();
    if m + n < 2 {
        return Err(Error::TooFewFactors(m + n));
    }
    let group = Group::from_dim(pardata.n_dim())?;
    let dim_g = group.dim() as i64;
    let dim_h = pardata
        .centralizers()
        .iter()
        .map(|c| dim_g - c.dim() as i64)
        .sum::<i64>()
        + n as i64 * dim_g;
    let base: u64 = rng.random();
    let dim_stab = (0..samples.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let tuple = random_rep_tuple(&mut stream_rng(base, i), pardata, n, DIM_SAMPLE_RADIUS);
            let mats: Vec<_> = tuple.components().iter().map(|g| *g.mat()).collect();
            stabilizer_dimension(&mats)
        })
        .max()
        .unwrap_or(0) as i64;
    let dim_x = dim_h - dim_g + dim_stab;
    let dim_formula = (n + m) as i64 * dim_g - dim_g - (m * group.rank()) as i64;
    Ok(DimReport {
        dim_h,
        dim_stab,
        dim_x,
        dim_formula,
        matches: dim_x == dim_formula,
    })
}
