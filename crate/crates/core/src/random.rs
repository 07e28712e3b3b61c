//! Seeded random generators for matrices, tuples and unitaries.
//!
//! Sampling loops throughout the crate draw one independent stream per item
//! so results do not depend on thread count or chunking.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::mat::{self, c, CMatrix};
use crate::tuple::MatrixTuple;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `idx` of a seeded generator.
pub fn stream(seed: u64, idx: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(idx);
    r
}

/// Matrix with i.i.d. standard complex gaussian entries.
pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * inv_sqrt2, im * inv_sqrt2)
    })
}

/// Square `g`-tuple of gaussian matrices at level `n`.
pub fn gaussian_tuple(rng: &mut impl Rng, g: usize, n: usize) -> MatrixTuple {
    MatrixTuple::new((0..g).map(|_| gaussian_matrix(rng, n, n)).collect())
        .expect("gaussian tuples are well formed")
}

/// Rectangular gaussian tuple.
pub fn gaussian_tuple_rect(rng: &mut impl Rng, g: usize, d: usize, e: usize) -> MatrixTuple {
    MatrixTuple::new((0..g).map(|_| gaussian_matrix(rng, d, e)).collect())
        .expect("gaussian tuples are well formed")
}

/// Haar-distributed unitary via the phase-fixed QR of a gaussian matrix.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let m = gaussian_matrix(rng, n, n);
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = nalgebra::DVector::from_fn(n, |i, _| {
        let rii = r[(i, i)];
        if rii.norm() < 1e-300 {
            c(1.0, 0.0)
        } else {
            rii / rii.norm()
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

/// Gaussian `d x e` matrix rescaled to the requested operator norm.
pub fn contraction(rng: &mut impl Rng, d: usize, e: usize, norm: f64) -> CMatrix {
    let m = gaussian_matrix(rng, d, e);
    let s = mat::operator_norm(&m);
    if s <= 0.0 {
        return mat::zeros(d, e);
    }
    m * c(norm / s, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::ToleranceProfile;

    #[test]
    fn haar_is_unitary_and_seeded() {
        let tol = ToleranceProfile::default();
        let u1 = haar_unitary(&mut rng_from_seed(7), 4);
        let u2 = haar_unitary(&mut rng_from_seed(7), 4);
        assert!(mat::is_unitary(&u1, &tol));
        assert_eq!(u1, u2);
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a = gaussian_matrix(&mut stream(3, 5), 2, 2);
        let _ = gaussian_matrix(&mut stream(3, 0), 2, 2);
        let b = gaussian_matrix(&mut stream(3, 5), 2, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn contraction_norm() {
        let m = contraction(&mut rng_from_seed(1), 3, 2, 0.9);
        assert!((mat::operator_norm(&m) - 0.9).abs() < 1e-12);
    }
}
