use super::linalg::{hermitian_eigen, DenseMatrix};
use super::mat::{ComplexMatrix, C64, ZERO};
use super::{GroupElement, HermitianDirection, UnitaryElement, EPS_VALID};
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and unitary eigenvector matrix of the Hermitian
/// part of `m`.
pub fn eigen_hermitian(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let e = hermitian_eigen(&DenseMatrix::from(m));
    let n = m.dim();
    let v = ComplexMatrix::from_fn(n, |i, j| e.vectors.get(i, j));
    (e.values, v)
}

/// `V diag(f(lambda)) V^H` for the Hermitian matrix `m = V diag(lambda) V^H`.
fn spectral_map(m: &ComplexMatrix, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let (vals, v) = eigen_hermitian(m);
    let n = m.dim();
    let fv: Vec<C64> = vals.iter().map(|&l| f(l)).collect();
    ComplexMatrix::from_fn(n, |i, j| {
        (0..n).fold(ZERO, |acc, k| {
            acc + v.get(i, k) * fv[k] * v.get(j, k).conj()
        })
    })
}

/// Matrix exponential of a Hermitian matrix.
pub fn exp_hermitian(m: &ComplexMatrix) -> ComplexMatrix {
    spectral_map(m, |l| C64::new(l.exp(), 0.0))
}

/// `exp(i m)` for Hermitian `m`; unitary.
pub fn exp_i_hermitian(m: &ComplexMatrix) -> ComplexMatrix {
    spectral_map(m, |l| C64::from_polar(1.0, l))
}

/// Exponential on the Cartan complement. The result is positive definite
/// Hermitian with determinant `exp(tr p) = 1`.
pub fn hermitian_exp(p: &HermitianDirection) -> GroupElement {
    GroupElement::new_unchecked(exp_hermitian(p.mat()))
}

/// Logarithm of a Hermitian positive definite matrix, without a trace
/// constraint.
pub fn log_positive(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, _) = eigen_hermitian(p);
    let smallest = vals[0];
    if smallest <= EPS_VALID {
        return Err(Error::NotPositiveDefinite(smallest));
    }
    Ok(spectral_map(p, |l| C64::new(l.ln(), 0.0)).hermitian_part())
}

/// Inverse of [`hermitian_exp`] on positive definite matrices of determinant 1.
///
/// Fails with [`Error::NotPositiveDefinite`] if an eigenvalue is at most
/// `EPS_VALID`, and with [`Error::NotTraceless`] if `det p != 1` (the log then
/// leaves the Cartan complement).
pub fn hermitian_log(p: &ComplexMatrix) -> Result<HermitianDirection> {
    let h = p.hermitian_defect();
    if h > EPS_VALID * (1.0 + p.frobenius_norm()) {
        return Err(Error::NotHermitian(h));
    }
    let l = log_positive(p)?;
    HermitianDirection::new(l)
}

/// Polar decomposition `g = k exp(p)` with `k` in `SU(n)` and `p` traceless
/// Hermitian, `p = log(g^H g) / 2`.
pub fn polar_decompose(g: &GroupElement) -> Result<(UnitaryElement, HermitianDirection)> {
    let gm = g.mat();
    let gram = (gm.adjoint() * *gm).hermitian_part();
    let two_p = log_positive(&gram)?;
    let p = HermitianDirection::project(&two_p.scale_real(0.5));
    let k = *gm * exp_hermitian(&p.mat().scale_real(-1.0));
    Ok((UnitaryElement::new_unchecked(k), p))
}
