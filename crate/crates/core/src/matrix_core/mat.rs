use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

const CAP: usize = 9;

/// Dense `n x n` complex matrix with `n` in `{2, 3}`, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: [C64; CAP],
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n == 2 || n == 3, "dimension must be 2 or 3");
        Self {
            n,
            data: [ZERO; CAP],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Builds a matrix from rows, checking shape and finiteness.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n != 2 && n != 3 {
            return Err(Error::InvalidDimension(n));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(
                "matrix rows must have length n".into(),
            ));
        }
        let m = Self::from_fn(n, |i, j| rows[i][j]);
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Real-entry convenience constructor, panics on bad shape.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[C64] {
        &self.data[..self.n * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i])
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> C64 {
        let a = |i, j| self.get(i, j);
        match self.n {
            2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
            _ => {
                a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                    - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                    + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
            }
        }
    }

    /// Classical adjugate, so that `A * adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Self {
        let a = |i, j| self.get(i, j);
        match self.n {
            2 => Self::from_fn(2, |i, j| match (i, j) {
                (0, 0) => a(1, 1),
                (0, 1) => -a(0, 1),
                (1, 0) => -a(1, 0),
                _ => a(0, 0),
            }),
            _ => {
                // cofactor C_ij, adjugate is its transpose
                let cof = |i: usize, j: usize| {
                    let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
                    let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
                    let minor = a(r[0], c[0]) * a(r[1], c[1]) - a(r[0], c[1]) * a(r[1], c[0]);
                    if (i + j).is_multiple_of(2) {
                        minor
                    } else {
                        -minor
                    }
                };
                Self::from_fn(3, |i, j| cof(j, i))
            }
        }
    }

    /// Inverse via the adjugate; `None` if the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        Some(self.adjugate().scale(d.inv()))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for z in m.data.iter_mut().take(self.n * self.n) {
            *z *= s;
        }
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Real Frobenius inner product `Re tr(A^H B)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (*self - *other).frobenius_norm()
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_real(0.5)
    }

    pub fn skew_hermitian_part(&self) -> Self {
        (*self - self.adjoint()).scale_real(0.5)
    }

    /// Removes the scalar part, `A - tr(A)/n I`.
    pub fn traceless_part(&self) -> Self {
        let t = self.trace() / self.n as f64;
        *self - Self::identity(self.n).scale(t)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    pub fn unitary_defect(&self) -> f64 {
        (self.adjoint() * *self).dist(&Self::identity(self.n))
    }

    /// `||A A^H - A^H A||_F`.
    pub fn normality_defect(&self) -> f64 {
        let ah = self.adjoint();
        (*self * ah).dist(&(ah * *self))
    }

    /// `A B A^{-1}` for invertible `A`.
    pub fn conjugate(&self, b: &Self) -> Self {
        let inv = self
            .inverse()
            .expect("conjugating matrix must be invertible");
        *self * *b * inv
    }

    /// Coefficients `(c_1, .., c_n)` of `det(lambda I - A) = lambda^n - c_1 lambda^{n-1} + ... +- c_n`.
    pub fn char_poly_coeffs(&self) -> Vec<C64> {
        let t = self.trace();
        match self.n {
            2 => vec![t, self.det()],
            _ => {
                let t2 = (*self * *self).trace();
                vec![t, (t * t - t2) * 0.5, self.det()]
            }
        }
    }
}

impl Add for ComplexMatrix {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let mut m = self;
        for (a, b) in m.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        m
    }
}

impl Sub for ComplexMatrix {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let mut m = self;
        for (a, b) in m.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        m
    }
}

impl Neg for ComplexMatrix {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        *self * *rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjugate_inverse_3x3() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(0.3, 0.0), c(-1.0, 2.0), c(1.0, 1.0)],
            vec![c(0.0, 0.0), c(0.5, 0.5), c(2.0, -0.2)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        assert!((a * inv).dist(&ComplexMatrix::identity(3)) < 1e-13);
        assert!((inv * a).dist(&ComplexMatrix::identity(3)) < 1e-13);
    }

    #[test]
    fn char_poly_of_diagonal() {
        let d = ComplexMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0), c(1.0 / 6.0, 0.0)]);
        let cp = d.char_poly_coeffs();
        assert!((cp[0] - c(2.0 + 3.0 + 1.0 / 6.0, 0.0)).norm() < 1e-14);
        assert!((cp[1] - c(6.0 + 2.0 / 6.0 + 3.0 / 6.0, 0.0)).norm() < 1e-14);
        assert!((cp[2] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(
            ComplexMatrix::from_rows(&[vec![ONE]]).unwrap_err(),
            Error::InvalidDimension(1)
        );
        assert!(ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ONE]]).is_err());
        assert_eq!(
            ComplexMatrix::from_rows(&[vec![ONE, C64::new(f64::NAN, 0.0)], vec![ONE, ONE]])
                .unwrap_err(),
            Error::NonFinite
        );
    }
}
