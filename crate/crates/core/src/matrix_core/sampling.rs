use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::hermitian::hermitian_exp;
use super::mat::{ComplexMatrix, C64};
use super::spectral::orthonormalize;
use super::{GroupElement, HermitianDirection, UnitaryElement};

/// Random source used across the crate.
pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for sample `index` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed element of `SU(n)`.
///
/// Gram-Schmidt of a complex Ginibre matrix gives a QR factor with positive
/// real `R` diagonal, which is Haar on `U(n)`; dividing by the principal
/// `n`-th root of the determinant pushes it to `SU(n)` equivariantly.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> UnitaryElement {
    assert!(n == 2 || n == 3, "dimension must be 2 or 3");
    let cols: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| complex_gaussian(rng)).collect())
        .collect();
    let q = ComplexMatrix::from_columns(&orthonormalize(&cols));
    let phase = q.det() / q.det().norm();
    let root = C64::from_polar(1.0, phase.arg() / n as f64);
    UnitaryElement::new_unchecked(q.scale(root.inv()))
}

/// Random traceless Hermitian matrix of unit Frobenius norm (normalized GUE).
pub fn random_hermitian_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianDirection {
    loop {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            let d: f64 = rng.sample(StandardNormal);
            m.set(i, i, C64::new(d, 0.0));
            for j in (i + 1)..n {
                let z = complex_gaussian(rng);
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        let m = m.traceless_part();
        let norm = m.frobenius_norm();
        if norm > 1e-12 {
            let mut out = m.scale_real(1.0 / norm);
            for i in 0..n {
                out.set(i, i, C64::new(out.get(i, i).re, 0.0));
            }
            return HermitianDirection::new_unchecked(out);
        }
    }
}

/// `random_unitary * exp(radius * h)` with `h` a random unit direction.
pub fn random_group_element<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> GroupElement {
    let k = random_unitary(rng, n);
    let h = random_hermitian_direction(rng, n);
    if radius == 0.0 {
        return k.as_group();
    }
    GroupElement::new_unchecked(*k.mat() * *hermitian_exp(&h.scale(radius)).mat())
}
