//! Spectra of small non-Hermitian matrices: normal-matrix eigenbases,
//! characteristic-polynomial roots, eigenvalue clustering and eigenspaces.

use std::f64::consts::PI;

use super::hermitian::eigen_hermitian;
use super::linalg::{hermitian_eigen, svd, DenseMatrix};
use super::mat::{ComplexMatrix, C64, ONE, ZERO};
use super::{GAP_TOL, RANK_TOL};

/// Eigenvalue with multiplicity, after merging values closer than a gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cluster {
    pub value: C64,
    pub multiplicity: usize,
}

/// Joint eigendecomposition of a normal matrix: `(eigenvalue, unit eigenvector)`.
///
/// The Hermitian parts `(N + N^H)/2` and `(N - N^H)/2i` commute; the first is
/// diagonalized, then the second is diagonalized inside each eigenspace of the
/// first. Both steps are Hermitian, so degenerate spectra stay accurate.
pub fn normal_eigen(m: &ComplexMatrix) -> Vec<(C64, Vec<C64>)> {
    let n = m.dim();
    let re_part = m.hermitian_part();
    let im_part = m.skew_hermitian_part().scale(C64::new(0.0, -1.0));
    let (vals, v) = eigen_hermitian(&re_part);

    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end] - vals[end - 1] <= GAP_TOL {
            end += 1;
        }
        let block: Vec<Vec<C64>> = (start..end).map(|j| v.column(j)).collect();
        let s = block.len();
        // compressed imaginary part B = V_c^H Im V_c
        let mut b = DenseMatrix::zeros(s, s);
        for a in 0..s {
            for c in 0..s {
                let mut acc = ZERO;
                for i in 0..n {
                    for j in 0..n {
                        acc += block[a][i].conj() * im_part.get(i, j) * block[c][j];
                    }
                }
                b.set(a, c, acc);
            }
        }
        let e = hermitian_eigen(&b);
        let re_mean = vals[start..end].iter().sum::<f64>() / s as f64;
        for k in 0..s {
            let vec: Vec<C64> = (0..n)
                .map(|i| (0..s).fold(ZERO, |acc, a| acc + block[a][i] * e.vectors.get(a, k)))
                .collect();
            // Rayleigh quotient refines the value from the original matrix
            let mv: Vec<C64> = (0..n)
                .map(|i| (0..n).fold(ZERO, |acc, j| acc + m.get(i, j) * vec[j]))
                .collect();
            let rq: C64 = vec.iter().zip(&mv).map(|(x, y)| x.conj() * y).sum();
            let value = if s == 1 {
                rq
            } else {
                C64::new(re_mean, e.values[k])
            };
            out.push((value, vec));
        }
        start = end;
    }
    out
}

/// Roots of `lambda^n - c_1 lambda^{n-1} + ... +- c_n` for `n <= 3`.
fn char_poly_roots(coeffs: &[C64]) -> Vec<C64> {
    match coeffs.len() {
        2 => {
            let (t, d) = (coeffs[0], coeffs[1]);
            let disc = (t * t - d * 4.0).sqrt();
            let r1 = if (t + disc).norm() >= (t - disc).norm() {
                (t + disc) * 0.5
            } else {
                (t - disc) * 0.5
            };
            let r2 = if r1.norm() > 0.0 { d / r1 } else { t - r1 };
            vec![r1, r2]
        }
        _ => {
            // Durand-Kerner on the monic cubic
            let p = |z: C64| ((z - coeffs[0]) * z + coeffs[1]) * z - coeffs[2];
            let seed = C64::new(0.4, 0.9);
            let mut roots = vec![ONE, seed, seed * seed];
            for _ in 0..500 {
                let mut delta = 0.0f64;
                for i in 0..3 {
                    let mut denom = ONE;
                    for j in 0..3 {
                        if i != j {
                            denom *= roots[i] - roots[j];
                        }
                    }
                    if denom.norm() == 0.0 {
                        denom = C64::new(1e-14, 0.0);
                    }
                    let step = p(roots[i]) / denom;
                    roots[i] -= step;
                    delta = delta.max(step.norm());
                }
                if delta < 1e-16 {
                    break;
                }
            }
            roots
        }
    }
}

/// Eigenvalues of a small matrix. Normal inputs use [`normal_eigen`]; others
/// fall back to characteristic-polynomial roots, which lose accuracy near
/// repeated eigenvalues.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<C64> {
    let scale = 1.0 + m.frobenius_norm();
    if m.normality_defect() <= 1e-10 * scale * scale {
        normal_eigen(m).into_iter().map(|(v, _)| v).collect()
    } else {
        char_poly_roots(&m.char_poly_coeffs())
    }
}

/// Principal argument mapped into `(-pi, pi]`.
pub fn arg_half_open(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Merges eigenvalues within `gap` of each other and orders the clusters by
/// argument ascending in `(-pi, pi]`, ties by modulus.
pub fn cluster_eigenvalues(values: &[C64], gap: f64) -> Vec<Cluster> {
    let mut groups: Vec<Vec<C64>> = Vec::new();
    'outer: for &v in values {
        for g in groups.iter_mut() {
            if g.iter().any(|&w| (w - v).norm() <= gap) {
                g.push(v);
                continue 'outer;
            }
        }
        groups.push(vec![v]);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|g| Cluster {
            value: g.iter().sum::<C64>() / g.len() as f64,
            multiplicity: g.len(),
        })
        .collect();
    clusters.sort_by(|a, b| {
        arg_half_open(a.value)
            .total_cmp(&arg_half_open(b.value))
            .then(a.value.norm().total_cmp(&b.value.norm()))
    });
    clusters
}

/// Smallest distance between two eigenvalues; infinite for a single one.
pub fn min_eigen_gap(values: &[C64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

/// Largest coefficient deviation between the characteristic polynomials.
/// Equal spectra (as multisets) have equal characteristic polynomials.
pub fn spectrum_defect(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.char_poly_coeffs()
        .iter()
        .zip(b.char_poly_coeffs())
        .map(|(x, y)| (x - y).norm() / (1.0 + y.norm()))
        .fold(0.0, f64::max)
}

/// Eigenvalue multiset distance via greedy nearest matching.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut rest: Vec<C64> = b.to_vec();
    let mut worst = 0.0f64;
    for &x in a {
        let (idx, d) = rest
            .iter()
            .enumerate()
            .map(|(i, &y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("same length");
        worst = worst.max(d);
        rest.swap_remove(idx);
    }
    worst
}

/// Outcome of an eigenspace computation.
#[derive(Clone, Debug)]
pub struct Eigenspace {
    /// Orthonormal basis vectors.
    pub basis: Vec<Vec<C64>>,
    /// Largest singular value of `m - lambda I` among the returned directions,
    /// relative to `1 + ||m||`.
    pub residual: f64,
}

/// The `mult` right singular vectors of `m - lambda I` with the smallest
/// singular values.
pub fn eigenspace(m: &ComplexMatrix, lambda: C64, mult: usize) -> Eigenspace {
    let n = m.dim();
    let shifted = *m - ComplexMatrix::identity(n).scale(lambda);
    let s = svd(&DenseMatrix::from(&shifted));
    let basis: Vec<Vec<C64>> = (n - mult..n).map(|j| s.right.column(j)).collect();
    let residual = s.values[n - mult] / (1.0 + m.frobenius_norm());
    Eigenspace { basis, residual }
}

/// Orthonormal basis of the kernel of `m` at the standard rank cutoff.
pub fn kernel(m: &DenseMatrix) -> Vec<Vec<C64>> {
    svd(m).null_space(RANK_TOL)
}

/// Modified Gram-Schmidt on complex column vectors (applied twice).
pub fn orthonormalize(cols: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(cols.len());
    for c in cols {
        let mut v = c.clone();
        for _ in 0..2 {
            for q in &out {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        out.push(v.into_iter().map(|z| z / norm).collect());
    }
    out
}
