//! Complex matrix arithmetic and Lie-theoretic primitives for `SL(n,C)` and
//! `SU(n)`, `n` in `{2, 3}`.

mod centralizer;
mod hermitian;
pub mod linalg;
mod mat;
mod sampling;
pub mod serde_io;
pub mod spectral;

pub use centralizer::{
    centralizer_basis, compact_real_basis, sl_basis, stabilizer_dimension, LieAlgebraBasis,
};
pub use hermitian::{
    eigen_hermitian, exp_hermitian, exp_i_hermitian, hermitian_exp, hermitian_log, log_positive,
    polar_decompose,
};
pub use mat::{ComplexMatrix, C64};
pub use sampling::{
    random_group_element, random_hermitian_direction, random_unitary, stream_rng, StreamRng,
};

use crate::error::{Error, Result};

/// Tolerance for type invariants (determinant, unitarity, Hermiticity).
pub const EPS_VALID: f64 = 1e-10;
/// Relative singular value cutoff for numerical rank and null spaces.
pub const RANK_TOL: f64 = 1e-8;
/// Eigenvalues closer than this are treated as one degenerate eigenvalue.
pub const GAP_TOL: f64 = 1e-8;

fn check_dim(m: &ComplexMatrix) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Principal `n`-th root of `det(m)`, used to push a matrix back to `det = 1`.
fn det_root(m: &ComplexMatrix) -> C64 {
    m.det().powf(1.0 / m.dim() as f64)
}

/// Element of `SL(n,C)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement(ComplexMatrix);

impl GroupElement {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        check_dim(&mat)?;
        let defect = (mat.det() - C64::new(1.0, 0.0)).norm();
        if defect > EPS_VALID {
            return Err(Error::NotSpecialLinear(defect));
        }
        Ok(Self(mat))
    }

    /// Wraps a matrix whose determinant is known to be 1 up to rounding.
    pub fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    /// Divides by a principal `n`-th root of the determinant.
    pub fn normalized(mat: ComplexMatrix) -> Self {
        let r = det_root(&mat);
        Self(mat.scale(r.inv()))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    #[inline]
    pub fn mat(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn inverse(&self) -> Self {
        // det = 1, so the adjugate is the inverse up to the det rounding error
        Self(self.0.inverse().expect("group element is invertible"))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// `self * other * self^{-1}`.
    pub fn conjugate(&self, other: &Self) -> Self {
        Self(self.0 * other.0 * self.inverse().0)
    }

    pub fn det_defect(&self) -> f64 {
        (self.0.det() - C64::new(1.0, 0.0)).norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.0.unitary_defect() <= tol
    }
}

/// Element of `SU(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryElement(ComplexMatrix);

impl UnitaryElement {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        check_dim(&mat)?;
        let u = mat.unitary_defect();
        if u > EPS_VALID {
            return Err(Error::NotUnitary(u));
        }
        let d = (mat.det() - C64::new(1.0, 0.0)).norm();
        if d > EPS_VALID {
            return Err(Error::NotSpecialLinear(d));
        }
        Ok(Self(mat))
    }

    pub fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    /// Diagonal special unitary element with the given eigen-angles. The last
    /// angle is overwritten so that the angles sum to zero.
    pub fn diagonal(angles: &[f64]) -> Self {
        let n = angles.len();
        let mut a = angles.to_vec();
        a[n - 1] = -angles[..n - 1].iter().sum::<f64>();
        let entries: Vec<C64> = a.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        Self(ComplexMatrix::diag(&entries))
    }

    #[inline]
    pub fn mat(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn as_group(&self) -> GroupElement {
        GroupElement(self.0)
    }
}

impl From<UnitaryElement> for GroupElement {
    fn from(u: UnitaryElement) -> Self {
        GroupElement(u.0)
    }
}

/// Traceless Hermitian matrix, an element of the Cartan complement `p = i su(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianDirection(ComplexMatrix);

impl HermitianDirection {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        check_dim(&mat)?;
        let h = mat.hermitian_defect();
        if h > EPS_VALID {
            return Err(Error::NotHermitian(h));
        }
        let t = mat.trace().norm();
        if t > EPS_VALID {
            return Err(Error::NotTraceless(t));
        }
        Ok(Self(mat))
    }

    /// Traceless Hermitian part of an arbitrary matrix.
    pub fn project(mat: &ComplexMatrix) -> Self {
        Self(mat.hermitian_part().traceless_part())
    }

    pub fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    pub fn zero(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n))
    }

    #[inline]
    pub fn mat(&self) -> &ComplexMatrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }
}
