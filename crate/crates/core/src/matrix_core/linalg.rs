//! Jacobi-type eigen and singular value routines for small dense complex
//! matrices.
//!
//! Both routines are built on the same complex 2x2 rotation, which is also the
//! closed-form diagonalizer of a 2x2 Hermitian matrix.

use super::mat::{ComplexMatrix, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 100;

/// Column-major-agnostic dense complex matrix of arbitrary shape, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.data[i * cols.len() + j] = *v;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Applies the rotation `[[c, -s e^{i phi}], [s e^{-i phi}, c]]` to columns `p, q`.
    fn rotate_columns(&mut self, p: usize, q: usize, rot: &Rotation) {
        for k in 0..self.rows {
            let ap = self.get(k, p);
            let aq = self.get(k, q);
            self.set(k, p, ap * rot.c + aq * rot.s_conj_phase());
            self.set(k, q, -(ap * rot.s_phase()) + aq * rot.c);
        }
    }

    /// Applies the adjoint rotation from the left to rows `p, q`.
    fn rotate_rows_adjoint(&mut self, p: usize, q: usize, rot: &Rotation) {
        for k in 0..self.cols {
            let ap = self.get(p, k);
            let aq = self.get(q, k);
            self.set(p, k, ap * rot.c + aq * rot.s_phase());
            self.set(q, k, -(ap * rot.s_conj_phase()) + aq * rot.c);
        }
    }
}

impl From<&ComplexMatrix> for DenseMatrix {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.dim(),
            cols: m.dim(),
            data: m.entries().to_vec(),
        }
    }
}

/// Unitary 2x2 rotation `[[c, -s e^{i phi}], [s e^{-i phi}, c]]`.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    c: f64,
    s: f64,
    phase: C64,
}

impl Rotation {
    /// Rotation diagonalizing the Hermitian block `[[a, b], [conj(b), d]]`.
    fn hermitian(a: f64, d: f64, b: C64) -> Self {
        let r = b.norm();
        let phase = if r > 0.0 { b / r } else { ONE };
        let theta = 0.5 * (2.0 * r).atan2(a - d);
        Self {
            c: theta.cos(),
            s: theta.sin(),
            phase,
        }
    }

    #[inline]
    fn s_phase(&self) -> C64 {
        self.phase * self.s
    }

    #[inline]
    fn s_conj_phase(&self) -> C64 {
        self.phase.conj() * self.s
    }
}

/// Eigendecomposition `A = V diag(values) V^H` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: DenseMatrix,
}

/// Cyclic Jacobi eigensolver for Hermitian matrices. Only the Hermitian part
/// of the input is used.
pub fn hermitian_eigen(a: &DenseMatrix) -> HermitianEigen {
    assert_eq!(a.rows, a.cols, "square matrix required");
    let n = a.rows;
    let mut w = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            w.set(i, j, (a.get(i, j) + a.get(j, i).conj()) * 0.5);
        }
    }
    let mut v = DenseMatrix::identity(n);
    let scale: f64 = w.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = w.get(p, q);
                if b.norm() <= 1e-18 * scale {
                    continue;
                }
                let rot = Rotation::hermitian(w.get(p, p).re, w.get(q, q).re, b);
                w.rotate_columns(p, q, &rot);
                w.rotate_rows_adjoint(p, q, &rot);
                w.set(p, q, ZERO);
                w.set(q, p, ZERO);
                for k in [p, q] {
                    let d = w.get(k, k).re;
                    w.set(k, k, C64::new(d, 0.0));
                }
                v.rotate_columns(p, q, &rot);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(i, i).re.total_cmp(&w.get(j, j).re));
    let values = order.iter().map(|&i| w.get(i, i).re).collect();
    let cols: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();
    HermitianEigen {
        values,
        vectors: DenseMatrix::from_columns(&cols),
    }
}

/// Singular values and right singular vectors.
#[derive(Clone, Debug)]
pub struct Svd {
    /// Descending singular values.
    pub values: Vec<f64>,
    /// Right singular vectors as columns, ordered like `values`.
    pub right: DenseMatrix,
}

impl Svd {
    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.values.first().copied().unwrap_or(0.0);
        self.rank_scaled(rel_tol, smax)
    }

    /// Number of singular values above `rel_tol * scale`.
    pub fn rank_scaled(&self, rel_tol: f64, scale: f64) -> usize {
        if scale == 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&s| s > rel_tol * scale).count()
    }

    /// Right singular vectors spanning the numerical kernel.
    pub fn null_space(&self, rel_tol: f64) -> Vec<Vec<C64>> {
        let r = self.rank(rel_tol);
        (r..self.values.len())
            .map(|j| self.right.column(j))
            .collect()
    }

    /// Kernel with the cutoff measured against `scale` instead of the
    /// largest singular value.
    pub fn null_space_scaled(&self, rel_tol: f64, scale: f64) -> Vec<Vec<C64>> {
        let r = self.rank_scaled(rel_tol, scale);
        (r..self.values.len())
            .map(|j| self.right.column(j))
            .collect()
    }
}

/// One-sided (Hestenes) Jacobi SVD. Computes singular values to high relative
/// accuracy, which keeps numeric rank decisions stable near zero.
pub fn svd(a: &DenseMatrix) -> Svd {
    let n = a.cols;
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for k in 0..w.rows {
                    let wp = w.get(k, p);
                    let wq = w.get(k, q);
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let rot = Rotation::hermitian(alpha, beta, gamma);
                w.rotate_columns(p, q, &rot);
                v.rotate_columns(p, q, &rot);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| {
            (0..w.rows)
                .map(|i| w.get(i, j).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let values = order.iter().map(|&i| norms[i]).collect();
    let cols: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();
    Svd {
        values,
        right: DenseMatrix::from_columns(&cols),
    }
}

/// Ratio of extreme singular values; infinite when singular.
pub fn condition_number(a: &DenseMatrix) -> f64 {
    let s = svd(a);
    let smax = s.values.first().copied().unwrap_or(0.0);
    let smin = s.values.last().copied().unwrap_or(0.0);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}
