//! Reduction of compact parabolic quotients with a regular first component:
//! the map `eta : H'/T -> H/K` that prepends a regular torus element `x`, its
//! inverse through eigenvector matching, and word-trace fingerprints used to
//! decide equality of conjugacy classes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix_core::spectral::{
    arg_half_open, eigenvalues, min_eigen_gap, normal_eigen, spectrum_defect,
};
use crate::matrix_core::{
    centralizer_basis, ComplexMatrix, GroupElement, LieAlgebraBasis, UnitaryElement, C64,
    EPS_VALID, GAP_TOL,
};
use crate::retraction::{ParabolicData, RepTuple, SPECTRUM_TOL};
use crate::trace_coords::TraceVector;

/// Default word length for [`fingerprint`].
pub const DEFAULT_DEPTH: usize = 4;
/// Fingerprints closer than this in the max norm are the same class.
pub const CLASS_TOL: f64 = 1e-6;

/// Whether the eigenvalues of `x` are pairwise more than `1e-8` apart.
pub fn is_regular(x: &GroupElement) -> bool {
    min_eigen_gap(&eigenvalues(x.mat())) > GAP_TOL
}

/// A regular element `x` of `SU(n)` with the Lie algebra of its centralizer,
/// which is a maximal torus.
#[derive(Clone, Debug)]
pub struct TorusContext {
    x: UnitaryElement,
    torus_basis: LieAlgebraBasis,
}

impl TorusContext {
    pub fn new(x: UnitaryElement) -> Result<Self> {
        let gap = min_eigen_gap(&eigenvalues(x.mat()));
        if gap <= GAP_TOL {
            return Err(Error::NotRegular(gap));
        }
        let torus_basis = centralizer_basis(&x.as_group());
        Ok(Self { x, torus_basis })
    }

    pub fn x(&self) -> &UnitaryElement {
        &self.x
    }

    pub fn torus_basis(&self) -> &LieAlgebraBasis {
        &self.torus_basis
    }

    pub fn n_dim(&self) -> usize {
        self.x.dim()
    }

    /// Parabolic data `(x, h_2, .., h_m)` from `(h_2, .., h_m)`.
    pub fn extend(&self, rest: &ParabolicData) -> Result<ParabolicData> {
        let mut h = Vec::with_capacity(rest.m() + 1);
        h.push(self.x);
        h.extend_from_slice(rest.h());
        ParabolicData::new(self.n_dim(), h)
    }
}

/// `(x_2, .., k_n) -> (x, x_2, .., k_n)`.
pub fn eta(ctx: &TorusContext, rest: &RepTuple) -> Result<RepTuple> {
    let pd = Arc::new(ctx.extend(rest.pardata())?);
    eta_into(ctx, rest, &pd)
}

/// [`eta`] with precomputed target data, which must be `ctx.extend(rest)`.
pub fn eta_into(
    ctx: &TorusContext,
    rest: &RepTuple,
    target: &Arc<ParabolicData>,
) -> Result<RepTuple> {
    let gap = min_eigen_gap(&eigenvalues(ctx.x.mat()));
    if gap <= GAP_TOL {
        return Err(Error::NotRegular(gap));
    }
    let mut orbit = Vec::with_capacity(rest.orbit().len() + 1);
    orbit.push(ctx.x.as_group());
    orbit.extend_from_slice(rest.orbit());
    RepTuple::new(Arc::clone(target), orbit, rest.free().to_vec())
}

/// Unit eigenvector with its largest entry real and positive.
fn normalize_phase(v: &[C64]) -> Vec<C64> {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z * phase / norm).collect()
}

/// Special unitary `u` with `u y u^-1 = x`. Eigenvalues of `x` are taken by
/// argument ascending in `(-pi, pi]` and each is paired with the nearest
/// eigenvalue of `y`; eigenvector phases are fixed, so `u` is a deterministic
/// representative of its coset `T u`.
pub fn torus_normalizer(ctx: &TorusContext, y: &GroupElement) -> Result<UnitaryElement> {
    if y.dim() != ctx.n_dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} element for a {}x{} torus",
            y.dim(),
            y.dim(),
            ctx.n_dim(),
            ctx.n_dim()
        )));
    }
    let defect = spectrum_defect(y.mat(), ctx.x.mat());
    if defect > SPECTRUM_TOL {
        return Err(Error::SpectrumMismatch(defect));
    }
    let ud = y.mat().unitary_defect();
    if ud > EPS_VALID.sqrt() {
        return Err(Error::NotUnitary(ud));
    }
    let mut x_pairs = normal_eigen(ctx.x.mat());
    x_pairs.sort_by(|a, b| arg_half_open(a.0).total_cmp(&arg_half_open(b.0)));
    let mut y_pairs = normal_eigen(y.mat());
    let gap = min_eigen_gap(&y_pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    if gap <= GAP_TOL {
        return Err(Error::NotRegular(gap));
    }
    let mut qx = Vec::with_capacity(x_pairs.len());
    let mut qy = Vec::with_capacity(x_pairs.len());
    for (lambda, vx) in &x_pairs {
        let (idx, _) = y_pairs
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 .0 - lambda)
                    .norm()
                    .total_cmp(&(b.1 .0 - lambda).norm())
            })
            .expect("spectra have equal size");
        let (_, vy) = y_pairs.swap_remove(idx);
        qx.push(normalize_phase(vx));
        qy.push(normalize_phase(&vy));
    }
    let u = ComplexMatrix::from_columns(&qx) * ComplexMatrix::from_columns(&qy).adjoint();
    Ok(UnitaryElement::new_unchecked(
        *GroupElement::normalized(u).mat(),
    ))
}

/// Inverse of [`eta`] up to the torus: with `u` from [`torus_normalizer`]
/// applied to the first orbit component, returns `u (y_2, .., k_n) u^-1`.
pub fn eta_inverse(ctx: &TorusContext, tuple: &RepTuple) -> Result<RepTuple> {
    let pd = tuple.pardata();
    if pd.m() == 0 {
        return Err(Error::DimensionMismatch(
            "tuple has no orbit component".into(),
        ));
    }
    let rest_pd = Arc::new(ParabolicData::new(pd.n_dim(), pd.h()[1..].to_vec())?);
    eta_inverse_into(ctx, tuple, &rest_pd)
}

/// [`eta_inverse`] with precomputed data `(h_2, .., h_m)`.
pub fn eta_inverse_into(
    ctx: &TorusContext,
    tuple: &RepTuple,
    rest: &Arc<ParabolicData>,
) -> Result<RepTuple> {
    let (first, others) = tuple
        .orbit()
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("tuple has no orbit component".into()))?;
    let u = torus_normalizer(ctx, first)?.as_group();
    let c = |g: &GroupElement| u.conjugate(g);
    RepTuple::new(
        Arc::clone(rest),
        others.iter().map(c).collect(),
        tuple.free().iter().map(c).collect(),
    )
}

/// Traces of all reduced words of length `1..=depth` in the components, their
/// inverses and, with a context, `x` and `x^-1`. Labels spell the word, for
/// example `"g1 x g2^-1"`.
pub fn fingerprint(tuple: &RepTuple, ctx: Option<&TorusContext>, depth: usize) -> TraceVector {
    let comps = tuple.components();
    let mut letters: Vec<(String, ComplexMatrix)> = Vec::new();
    if let Some(c) = ctx {
        letters.push(("x".into(), *c.x.mat()));
        letters.push(("x^-1".into(), c.x.mat().adjoint()));
    }
    for (i, g) in comps.iter().enumerate() {
        letters.push((format!("g{}", i + 1), *g.mat()));
        letters.push((format!("g{}^-1", i + 1), *g.inverse().mat()));
    }
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut stack: Vec<(Vec<usize>, ComplexMatrix)> = (0..letters.len())
        .rev()
        .map(|l| (vec![l], letters[l].1))
        .collect();
    while let Some((word, prod)) = stack.pop() {
        labels.push(
            word.iter()
                .map(|&l| letters[l].0.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        );
        values.push(prod.trace());
        if word.len() < depth {
            let last = *word.last().expect("non-empty word");
            for l in (0..letters.len()).rev() {
                if l ^ 1 == last {
                    continue;
                }
                let mut w = word.clone();
                w.push(l);
                stack.push((w, prod * letters[l].1));
            }
        }
    }
    TraceVector::new(labels, values).expect("traces of group elements are finite")
}

/// Whether two fingerprints agree within [`CLASS_TOL`].
pub fn same_class(a: &TraceVector, b: &TraceVector) -> bool {
    a.labels() == b.labels() && a.max_abs_diff(b) <= CLASS_TOL
}
