//! Polar retraction of `SL(n,C)` onto `SU(n)` and its extension to tuples
//! whose first components lie on fixed conjugacy orbits `G . h_i`.

use std::sync::Arc;

use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix_core::linalg::{condition_number, DenseMatrix};
use crate::matrix_core::spectral::{
    cluster_eigenvalues, eigenspace, min_eigen_gap, normal_eigen, orthonormalize, spectrum_defect,
};
use crate::matrix_core::{
    centralizer_basis, compact_real_basis, exp_hermitian, polar_decompose, random_group_element,
    ComplexMatrix, GroupElement, HermitianDirection, LieAlgebraBasis, UnitaryElement, C64,
    EPS_VALID, GAP_TOL,
};

/// Spectrum agreement required between an orbit component and its `h_i`.
pub const SPECTRUM_TOL: f64 = 1e-8;
/// Eigenvector matrices with a larger condition number count as defective.
pub const MAX_EIGENBASIS_COND: f64 = 1e8;
/// Largest relative singular value accepted for an eigenspace direction.
const EIGENSPACE_RESIDUAL_TOL: f64 = 1e-6;

/// The fixed unitary tuple `h = (h_1, .., h_m)` with centralizer data.
#[derive(Clone, Debug)]
pub struct ParabolicData {
    n_dim: usize,
    h: Vec<UnitaryElement>,
    centralizers: Vec<LieAlgebraBasis>,
    compact_centralizers: Vec<LieAlgebraBasis>,
    hermitian_bases: Vec<Vec<ComplexMatrix>>,
}

impl ParabolicData {
    pub fn new(n_dim: usize, h: Vec<UnitaryElement>) -> Result<Self> {
        if n_dim != 2 && n_dim != 3 {
            return Err(Error::InvalidDimension(n_dim));
        }
        if let Some(bad) = h.iter().find(|x| x.dim() != n_dim) {
            return Err(Error::DimensionMismatch(format!(
                "h has a {}x{} entry, expected {n_dim}x{n_dim}",
                bad.dim(),
                bad.dim()
            )));
        }
        let centralizers: Vec<LieAlgebraBasis> =
            h.iter().map(|x| centralizer_basis(&x.as_group())).collect();
        let mut compact_centralizers = Vec::with_capacity(h.len());
        let mut hermitian_bases = Vec::with_capacity(h.len());
        for c in &centralizers {
            let k = compact_real_basis(c);
            hermitian_bases.push(k.iter().map(|a| a.scale(C64::new(0.0, 1.0))).collect());
            compact_centralizers.push(LieAlgebraBasis::new(n_dim, k)?);
        }
        Ok(Self {
            n_dim,
            h,
            centralizers,
            compact_centralizers,
            hermitian_bases,
        })
    }

    /// Random regular diagonal `h_i` with eigenvalue gaps above `1e-2`.
    pub fn random_regular<R: Rng + ?Sized>(rng: &mut R, n_dim: usize, m: usize) -> Result<Self> {
        let h = (0..m)
            .map(|_| random_regular_torus_element(rng, n_dim, 1e-2))
            .collect();
        Self::new(n_dim, h)
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn m(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[UnitaryElement] {
        &self.h
    }

    pub fn centralizers(&self) -> &[LieAlgebraBasis] {
        &self.centralizers
    }

    /// Skew-Hermitian real bases of `Lie(K_i)`.
    pub fn compact_centralizers(&self) -> &[LieAlgebraBasis] {
        &self.compact_centralizers
    }

    /// Real-orthonormal bases of the Hermitian part `i Lie(K_i)`.
    pub fn hermitian_bases(&self) -> &[Vec<ComplexMatrix>] {
        &self.hermitian_bases
    }
}

impl Serialize for ParabolicData {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ParabolicData", 2)?;
        st.serialize_field("n", &self.n_dim)?;
        st.serialize_field("h", &self.h)?;
        st.end()
    }
}

/// Diagonal element of `SU(n)` whose eigenvalues are pairwise at least
/// `min_gap` apart on the unit circle.
pub fn random_regular_torus_element<R: Rng + ?Sized>(
    rng: &mut R,
    n_dim: usize,
    min_gap: f64,
) -> UnitaryElement {
    loop {
        let angles: Vec<f64> = (0..n_dim)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let x = UnitaryElement::diagonal(&angles);
        let diag: Vec<C64> = (0..n_dim).map(|i| x.mat().get(i, i)).collect();
        if min_eigen_gap(&diag) > min_gap {
            return x;
        }
    }
}

/// A point of `C_1 x .. x C_m x G^n`: orbit components `y_i` with the spectrum
/// of `h_i`, followed by free components.
#[derive(Clone, Debug)]
pub struct RepTuple {
    pardata: Arc<ParabolicData>,
    orbit: Vec<GroupElement>,
    free: Vec<GroupElement>,
}

impl RepTuple {
    pub fn new(
        pardata: Arc<ParabolicData>,
        orbit: Vec<GroupElement>,
        free: Vec<GroupElement>,
    ) -> Result<Self> {
        if orbit.len() != pardata.m() {
            return Err(Error::DimensionMismatch(format!(
                "{} orbit components for {} parabolic factors",
                orbit.len(),
                pardata.m()
            )));
        }
        let n = pardata.n_dim();
        if orbit.iter().chain(&free).any(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "components must be {n}x{n}"
            )));
        }
        for (y, h) in orbit.iter().zip(pardata.h()) {
            let d = spectrum_defect(y.mat(), h.mat());
            if d > SPECTRUM_TOL {
                return Err(Error::SpectrumMismatch(d));
            }
        }
        Ok(Self {
            pardata,
            orbit,
            free,
        })
    }

    pub(crate) fn new_unchecked(
        pardata: Arc<ParabolicData>,
        orbit: Vec<GroupElement>,
        free: Vec<GroupElement>,
    ) -> Self {
        Self {
            pardata,
            orbit,
            free,
        }
    }

    pub fn pardata(&self) -> &Arc<ParabolicData> {
        &self.pardata
    }

    pub fn orbit(&self) -> &[GroupElement] {
        &self.orbit
    }

    pub fn free(&self) -> &[GroupElement] {
        &self.free
    }

    pub fn n_dim(&self) -> usize {
        self.pardata.n_dim()
    }

    /// All components, orbit ones first.
    pub fn components(&self) -> Vec<GroupElement> {
        self.orbit.iter().chain(&self.free).copied().collect()
    }

    /// Largest unitarity defect over all components.
    pub fn unitary_defect(&self) -> f64 {
        self.orbit
            .iter()
            .chain(&self.free)
            .map(|g| g.mat().unitary_defect())
            .fold(0.0, f64::max)
    }

    /// Largest componentwise Frobenius distance.
    pub fn distance(&self, other: &Self) -> f64 {
        self.orbit
            .iter()
            .chain(&self.free)
            .zip(other.orbit.iter().chain(&other.free))
            .map(|(a, b)| a.mat().dist(b.mat()))
            .fold(0.0, f64::max)
    }

    /// Simultaneous conjugation `u (..) u^{-1}` of every component.
    pub fn conjugated_by(&self, u: &GroupElement) -> Self {
        let c = |g: &GroupElement| u.conjugate(g);
        Self {
            pardata: Arc::clone(&self.pardata),
            orbit: self.orbit.iter().map(c).collect(),
            free: self.free.iter().map(c).collect(),
        }
    }
}

impl Serialize for RepTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RepTuple", 3)?;
        st.serialize_field("h", &self.pardata.h)?;
        st.serialize_field("orbit", &self.orbit)?;
        st.serialize_field("free", &self.free)?;
        st.end()
    }
}

/// Random tuple: orbit components `g_i h_i g_i^{-1}` and free components, all
/// from [`random_group_element`] with the given radius.
pub fn random_rep_tuple<R: Rng + ?Sized>(
    rng: &mut R,
    pardata: &Arc<ParabolicData>,
    n: usize,
    radius: f64,
) -> RepTuple {
    let dim = pardata.n_dim();
    let orbit = pardata
        .h()
        .iter()
        .map(|h| random_group_element(rng, dim, radius).conjugate(&h.as_group()))
        .collect();
    let free = (0..n)
        .map(|_| random_group_element(rng, dim, radius))
        .collect();
    RepTuple::new_unchecked(Arc::clone(pardata), orbit, free)
}

/// Random tuple in the compact locus: `u_i h_i u_i^{-1}` and unitary free
/// components.
pub fn random_compact_tuple<R: Rng + ?Sized>(
    rng: &mut R,
    pardata: &Arc<ParabolicData>,
    n: usize,
) -> RepTuple {
    random_rep_tuple(rng, pardata, n, 0.0)
}

/// `phi_t(k exp(p)) = k exp(t p)`. `t = 1` is the identity, `t = 0` lands in
/// `SU(n)`, and unitary inputs are fixed for every `t`.
pub fn phi(g: &GroupElement, t: f64) -> GroupElement {
    let (k, p) = polar_decompose(g).expect("det-1 matrices are invertible");
    GroupElement::new_unchecked(*k.mat() * exp_hermitian(&p.mat().scale_real(t)))
}

/// Orthonormal-per-cluster eigenbasis of `m`, columns ordered by the
/// clusters of `h` (argument ascending). Returns the basis and the worst
/// eigenspace residual.
fn matched_eigenbasis(m: &ComplexMatrix, clusters: &[(C64, usize)]) -> (Vec<Vec<C64>>, f64) {
    let mut cols = Vec::with_capacity(m.dim());
    let mut worst = 0.0f64;
    for &(value, mult) in clusters {
        let es = eigenspace(m, value, mult);
        worst = worst.max(es.residual);
        cols.extend(es.basis);
    }
    (cols, worst)
}

/// Solves `q h q^{-1} = y` with `det q = 1`. Eigenvectors of `y` are matched
/// to those of `h` cluster by cluster; for `y = h` the result is `I` and for
/// normal `y` it is unitary.
pub fn orbit_solve(y: &GroupElement, h: &UnitaryElement) -> Result<GroupElement> {
    let n = h.dim();
    if y.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {n}x{n}",
            y.dim(),
            y.dim()
        )));
    }
    let defect = spectrum_defect(y.mat(), h.mat());
    if defect > SPECTRUM_TOL {
        return Err(Error::SpectrumMismatch(defect));
    }
    let h_values: Vec<C64> = normal_eigen(h.mat()).into_iter().map(|(v, _)| v).collect();
    let clusters: Vec<(C64, usize)> = cluster_eigenvalues(&h_values, GAP_TOL)
        .into_iter()
        .map(|c| (c.value, c.multiplicity))
        .collect();

    let (qh_cols, _) = matched_eigenbasis(h.mat(), &clusters);
    let (mut qy_cols, residual) = matched_eigenbasis(y.mat(), &clusters);
    if residual > EIGENSPACE_RESIDUAL_TOL {
        return Err(Error::NotDiagonalizable(format!(
            "eigenspace residual {residual:e}"
        )));
    }
    let qy_dense = DenseMatrix::from_columns(&qy_cols);
    let cond = condition_number(&qy_dense);
    if cond.is_nan() || cond > MAX_EIGENBASIS_COND {
        return Err(Error::NotDiagonalizable(format!(
            "eigenbasis condition number {cond:e}"
        )));
    }
    let y_scale = 1.0 + y.mat().frobenius_norm();
    if y.mat().normality_defect() <= EPS_VALID * y_scale * y_scale {
        qy_cols = orthonormalize(&qy_cols);
    }
    let qy = ComplexMatrix::from_columns(&qy_cols);
    let qh = ComplexMatrix::from_columns(&qh_cols);
    let q = GroupElement::normalized(qy * qh.adjoint());

    let err = (*q.mat() * *h.mat() * *q.inverse().mat()).dist(y.mat());
    if err > SPECTRUM_TOL * y_scale {
        return Err(Error::NotDiagonalizable(format!(
            "reconstruction error {err:e}"
        )));
    }
    Ok(q)
}

/// Polar data `q = kappa exp(pi)` of an orbit component.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrbitFactor {
    pub kappa: UnitaryElement,
    pub pi: HermitianDirection,
}

/// Polar data `g = k exp(p)` of a free component.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FreeFactor {
    pub k: UnitaryElement,
    pub p: HermitianDirection,
}

/// Path from a tuple (`t = 1`) to the compact locus (`t = 0`).
#[derive(Clone, Debug, Serialize)]
pub struct RetractionPath {
    #[serde(skip)]
    pardata: Arc<ParabolicData>,
    pub orbit: Vec<OrbitFactor>,
    pub free: Vec<FreeFactor>,
}

impl RetractionPath {
    pub fn pardata(&self) -> &Arc<ParabolicData> {
        &self.pardata
    }

    /// Largest exponent norm; bounds the Lipschitz constant of the path.
    pub fn max_exponent_norm(&self) -> f64 {
        self.orbit
            .iter()
            .map(|f| f.pi.norm())
            .chain(self.free.iter().map(|f| f.p.norm()))
            .fold(0.0, f64::max)
    }
}

/// Orbit components follow `kappa exp(t pi) h exp(-t pi) kappa^{-1}`, free
/// components follow `k exp(t p)`.
pub fn build_retraction(tuple: &RepTuple) -> Result<RetractionPath> {
    let pardata = Arc::clone(tuple.pardata());
    let orbit = tuple
        .orbit()
        .iter()
        .zip(pardata.h())
        .map(|(y, h)| {
            let q = orbit_solve(y, h)?;
            let (kappa, pi) = polar_decompose(&q)?;
            Ok(OrbitFactor { kappa, pi })
        })
        .collect::<Result<Vec<_>>>()?;
    let free = tuple
        .free()
        .iter()
        .map(|g| {
            let (k, p) = polar_decompose(g)?;
            Ok(FreeFactor { k, p })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RetractionPath {
        pardata,
        orbit,
        free,
    })
}

/// Point of the path at time `t` in `[0, 1]`.
pub fn evaluate_path(path: &RetractionPath, t: f64) -> RepTuple {
    let orbit = path
        .orbit
        .iter()
        .zip(path.pardata.h())
        .map(|(f, h)| {
            let e = exp_hermitian(&f.pi.mat().scale_real(t));
            let e_inv = exp_hermitian(&f.pi.mat().scale_real(-t));
            let kappa = f.kappa.mat();
            GroupElement::new_unchecked(*kappa * e * *h.mat() * e_inv * kappa.adjoint())
        })
        .collect();
    let free = path
        .free
        .iter()
        .map(|f| GroupElement::new_unchecked(*f.k.mat() * exp_hermitian(&f.p.mat().scale_real(t))))
        .collect();
    RepTuple::new_unchecked(Arc::clone(&path.pardata), orbit, free)
}
