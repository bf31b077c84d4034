use super::linalg::{svd, DenseMatrix};
use super::mat::{ComplexMatrix, C64, I, ONE};
use super::{GroupElement, RANK_TOL};
use crate::error::{Error, Result};

/// Basis of a complex Lie subalgebra of `sl(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraBasis {
    elements: Vec<ComplexMatrix>,
    n: usize,
}

impl LieAlgebraBasis {
    /// Checks linear independence at the standard rank cutoff.
    pub fn new(n: usize, elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.iter().any(|e| e.dim() != n) {
            return Err(Error::DimensionMismatch(
                "basis elements of mixed size".into(),
            ));
        }
        if !elements.is_empty() {
            let cols: Vec<Vec<C64>> = elements.iter().map(|e| e.entries().to_vec()).collect();
            if svd(&DenseMatrix::from_columns(&cols)).rank(RANK_TOL) != elements.len() {
                return Err(Error::LinearlyDependent);
            }
        }
        Ok(Self { elements, n })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Complex dimension.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn matrix_dim(&self) -> usize {
        self.n
    }
}

/// Standard basis of `sl(n)`: off-diagonal units, then `E_kk - E_{k+1,k+1}`.
pub fn sl_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n - 1);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut m = ComplexMatrix::zeros(n);
                m.set(i, j, ONE);
                out.push(m);
            }
        }
    }
    for k in 0..n - 1 {
        let mut m = ComplexMatrix::zeros(n);
        m.set(k, k, ONE);
        m.set(k + 1, k + 1, -ONE);
        out.push(m);
    }
    out
}

/// Matrix of `X -> ([X, y_1], .., [X, y_k])` on the `sl(n)` basis.
fn stacked_commutator_operator(elements: &[ComplexMatrix], n: usize) -> DenseMatrix {
    let basis = sl_basis(n);
    let cols: Vec<Vec<C64>> = basis
        .iter()
        .map(|x| {
            elements
                .iter()
                .flat_map(|y| x.commutator(y).entries().to_vec())
                .collect()
        })
        .collect();
    DenseMatrix::from_columns(&cols)
}

fn combine(basis: &[ComplexMatrix], coeffs: &[C64], n: usize) -> ComplexMatrix {
    basis
        .iter()
        .zip(coeffs)
        .fold(ComplexMatrix::zeros(n), |acc, (b, c)| acc + b.scale(*c))
}

/// Lie algebra of the centralizer of `h` in `SL(n,C)`, as the null space of
/// `X -> Xh - hX` on traceless matrices. The rank cutoff is relative to
/// `||h||`, so central elements with rounding noise keep the full algebra.
pub fn centralizer_basis(h: &GroupElement) -> LieAlgebraBasis {
    let n = h.dim();
    let op = stacked_commutator_operator(std::slice::from_ref(h.mat()), n);
    let basis = sl_basis(n);
    let elements = svd(&op)
        .null_space_scaled(RANK_TOL, h.mat().frobenius_norm())
        .iter()
        .map(|v| combine(&basis, v, n))
        .collect();
    LieAlgebraBasis { elements, n }
}

/// Complex dimension of the common centralizer of `elements` in `sl(n)`.
pub fn stabilizer_dimension(elements: &[ComplexMatrix]) -> usize {
    let n = elements.first().map_or(2, ComplexMatrix::dim);
    if elements.is_empty() {
        return n * n - 1;
    }
    let op = stacked_commutator_operator(elements, n);
    let scale = elements
        .iter()
        .map(ComplexMatrix::frobenius_norm)
        .fold(0.0, f64::max);
    let s = svd(&op);
    s.values.len() - s.rank_scaled(RANK_TOL, scale)
}

/// Real-orthonormal basis of the skew-Hermitian part of a `*`-closed complex
/// subalgebra, i.e. the Lie algebra of its compact form. Orthonormality is
/// with respect to `Re tr(A^H B)`.
pub fn compact_real_basis(basis: &LieAlgebraBasis) -> Vec<ComplexMatrix> {
    let mut out: Vec<ComplexMatrix> = Vec::new();
    let candidates = basis
        .elements()
        .iter()
        .flat_map(|x| [x.skew_hermitian_part(), x.scale(I).skew_hermitian_part()]);
    for cand in candidates {
        let scale = cand.frobenius_norm();
        if scale == 0.0 {
            continue;
        }
        let mut v = cand;
        for _ in 0..2 {
            for q in &out {
                v = v - q.scale_real(q.inner(&v));
            }
        }
        let norm = v.frobenius_norm();
        if norm > RANK_TOL * scale {
            out.push(v.scale_real(1.0 / norm));
        }
    }
    out
}
