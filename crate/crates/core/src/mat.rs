//! Dense complex matrix substrate.
//!
//! Everything downstream works with `CMatrix` (a dynamically sized matrix
//! over `Complex64`) and the spectral decisions defined here: PSD verdicts
//! with kernel extraction, operator norms, defect operators and numerical
//! kernels.  Decompositions are delegated to nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::ToleranceProfile;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Complex scalar from real and imaginary parts.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real scalar as a complex number.
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, cs: usize) -> CMatrix {
    CMatrix::zeros(r, cs)
}

/// Dense matrix from rows of real entries; test and fixture helper.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let r = rows.len();
    let cs = rows[0].len();
    CMatrix::from_fn(r, cs, |i, j| cr(rows[i][j]))
}

pub fn all_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.norm()
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |m, &s| m.max(s))
}

/// Ratio of extreme singular values; `f64::INFINITY` for singular input.
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    let min = sv.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * cr(0.5)
}

/// How a hermitian matrix sits relative to the PSD cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdKind {
    PositiveDefinite,
    PsdSingular,
    Indefinite,
}

/// Outcome of a PSD test: the verdict, the smallest eigenvalue, and an
/// orthonormal basis of the near-kernel when the matrix is singular PSD.
#[derive(Debug, Clone)]
pub struct PsdVerdict {
    pub kind: PsdKind,
    pub min_eig: f64,
    pub kernel: Vec<CVector>,
}

/// Classifies a hermitian matrix against the PSD cone.
///
/// The input is symmetrized silently when `||H - H*||_F <= rank_tol` and
/// rejected otherwise.  Eigenvalues above `psd_tol` count as positive,
/// eigenvalues inside `[-psd_tol, psd_tol]` as zero (their eigenvectors form
/// the kernel), anything below as negative.
pub fn psd_check(h: &CMatrix, tol: &ToleranceProfile) -> Result<PsdVerdict> {
    if h.nrows() != h.ncols() {
        return Err(Error::Shape(format!(
            "psd test needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let dev = frobenius(&(h - h.adjoint()));
    if dev > tol.rank_tol.max(1e-12) {
        return Err(Error::NotHermitian(dev));
    }
    let sym = hermitian_part(h);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let kind = if min_eig > tol.psd_tol {
        PsdKind::PositiveDefinite
    } else if min_eig >= -tol.psd_tol {
        PsdKind::PsdSingular
    } else {
        PsdKind::Indefinite
    };
    let mut kernel = Vec::new();
    if kind == PsdKind::PsdSingular {
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam.abs() <= tol.psd_tol {
                kernel.push(eig.eigenvectors.column(i).into_owned());
            }
        }
    }
    Ok(PsdVerdict {
        kind,
        min_eig,
        kernel,
    })
}

/// Hermitian PSD square root of `I - T*T` for a contraction `T`.
///
/// Eigenvalues of `I - T*T` inside `[-psd_tol, 0]` are clamped to zero; a
/// smaller eigenvalue means `T` is not a contraction and is an error.  The
/// defect of `T*` is obtained by passing `T*`.
pub fn defect(t: &CMatrix, tol: &ToleranceProfile) -> Result<CMatrix> {
    let e = t.ncols();
    let h = identity(e) - t.adjoint() * t;
    sqrt_psd(&h, tol).map_err(|_| Error::NormExceedsOne(operator_norm(t)))
}

/// PSD square root via eigendecomposition, clamping the `[-psd_tol, 0]` band.
pub fn sqrt_psd(h: &CMatrix, tol: &ToleranceProfile) -> Result<CMatrix> {
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(h));
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -tol.psd_tol {
            return Err(Error::Precondition(format!(
                "matrix is not PSD (eigenvalue {v:.3e})"
            )));
        }
        *v = v.max(0.0).sqrt();
    }
    let d = CMatrix::from_diagonal(&vals.map(cr));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Inverse PSD square root; errors when an eigenvalue falls below `rank_tol`.
pub fn inv_sqrt_psd(h: &CMatrix, tol: &ToleranceProfile) -> Result<CMatrix> {
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(h));
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v <= tol.rank_tol {
            return Err(Error::Precondition(format!(
                "matrix is not positive definite (eigenvalue {v:.3e})"
            )));
        }
        *v = 1.0 / v.sqrt();
    }
    let d = CMatrix::from_diagonal(&vals.map(cr));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Orthonormal basis of the right null space, by SVD with the `rank_tol`
/// singular value cutoff.
pub fn kernel_basis(a: &CMatrix, tol: &ToleranceProfile) -> Vec<CVector> {
    if a.ncols() == 0 {
        return Vec::new();
    }
    // A thin SVD of a wide matrix drops part of the null space; padding with
    // zero rows keeps all right singular vectors without changing them.
    let padded = if a.nrows() < a.ncols() {
        let mut p = zeros(a.ncols(), a.ncols());
        p.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("svd requested v_t");
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol.rank_tol {
            basis.push(vt.row(i).adjoint());
        }
    }
    basis
}

/// Numerical rank with the `rank_tol` cutoff.
pub fn numerical_rank(a: &CMatrix, tol: &ToleranceProfile) -> usize {
    if a.is_empty() {
        return 0;
    }
    a.clone()
        .singular_values()
        .iter()
        .filter(|&&s| s > tol.rank_tol)
        .count()
}

/// Unitary polar factor: the closest unitary to `m` in Frobenius norm.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    u * vt
}

pub fn is_unitary(u: &CMatrix, tol: &ToleranceProfile) -> bool {
    if u.nrows() != u.ncols() {
        return false;
    }
    let n = u.nrows();
    frobenius(&(u.adjoint() * u - identity(n))) <= tol.rank_tol.max(1e-10) * (n as f64)
}

pub fn check_unitary(u: &CMatrix, tol: &ToleranceProfile) -> Result<()> {
    if is_unitary(u, tol) {
        Ok(())
    } else {
        let dev = if u.nrows() == u.ncols() {
            frobenius(&(u.adjoint() * u - identity(u.nrows())))
        } else {
            f64::INFINITY
        };
        Err(Error::NotUnitary(dev))
    }
}

/// Column-major vectorization.
pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

/// Least-squares coefficients of `target` against a list of same-shaped
/// matrices, together with the Frobenius norm of the misfit.
pub fn fit_in_span(basis: &[CMatrix], target: &CMatrix, tol: &ToleranceProfile) -> (CVector, f64) {
    let k = basis.len();
    let len = target.nrows() * target.ncols();
    let mut m = zeros(len, k);
    for (j, b) in basis.iter().enumerate() {
        m.set_column(j, &vectorize(b));
    }
    let rhs = vectorize(target);
    let svd = m.clone().svd(true, true);
    let coeffs = svd
        .solve(&rhs, tol.rank_tol)
        .unwrap_or_else(|_| CVector::zeros(k));
    let residual = frobenius(&(m * &coeffs - rhs));
    (coeffs, residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn kron_identity_blocks() {
        let i2 = identity(2);
        let i3 = identity(3);
        assert_eq!(kron(&i2, &i3), identity(6));

        let shift = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let k = kron(&shift, &i2);
        let mut expect = zeros(4, 4);
        expect[(0, 2)] = cr(1.0);
        expect[(1, 3)] = cr(1.0);
        assert_eq!(k, expect);

        let a = from_real_rows(&[&[2.0]]);
        let b = from_real_rows(&[&[3.0, 0.0], &[0.0, 3.0]]);
        assert_eq!(kron(&a, &b), from_real_rows(&[&[6.0, 0.0], &[0.0, 6.0]]));
    }

    #[test]
    fn operator_norm_cases() {
        let row = from_real_rows(&[&[0.6, 0.8]]);
        assert!((operator_norm(&row) - 1.0).abs() < 1e-14);
        assert!((operator_norm(&identity(4)) - 1.0).abs() < 1e-14);
        let m = from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((operator_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn psd_check_verdicts() {
        let t = tol();
        let v = psd_check(&identity(3), &t).unwrap();
        assert_eq!(v.kind, PsdKind::PositiveDefinite);
        assert!((v.min_eig - 1.0).abs() < 1e-14);
        assert!(v.kernel.is_empty());

        let d = from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let v = psd_check(&d, &t).unwrap();
        assert_eq!(v.kind, PsdKind::PsdSingular);
        assert_eq!(v.kernel.len(), 1);
        assert!((v.kernel[0][1].norm() - 1.0).abs() < 1e-12);
        assert!(v.kernel[0][0].norm() < 1e-12);

        let d = from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert_eq!(psd_check(&d, &t).unwrap().kind, PsdKind::Indefinite);
    }

    #[test]
    fn psd_check_rejects_non_hermitian() {
        let m = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            psd_check(&m, &tol()),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn defect_values() {
        let t = tol();
        let z = zeros(3, 2);
        assert!(frobenius(&(defect(&z, &t).unwrap() - identity(2))) < 1e-14);

        let one = from_real_rows(&[&[1.0]]);
        assert!(max_abs(&defect(&one, &t).unwrap()) < 1e-7);

        let c06 = from_real_rows(&[&[0.6]]);
        let d = defect(&c06, &t).unwrap();
        assert!((d[(0, 0)].re - 0.8).abs() < 1e-12);

        let two = from_real_rows(&[&[2.0]]);
        assert!(matches!(defect(&two, &t), Err(Error::NormExceedsOne(_))));
    }

    #[test]
    fn kernel_basis_cases() {
        let t = tol();
        assert!(kernel_basis(&identity(2), &t).is_empty());
        assert_eq!(kernel_basis(&zeros(2, 2), &t).len(), 2);

        let ones = from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let k = kernel_basis(&ones, &t);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert!((v.norm() - 1.0).abs() < 1e-12);

        // Wide matrix: the whole null space must be found.
        let wide = from_real_rows(&[&[1.0, 0.0, 0.0]]);
        assert_eq!(kernel_basis(&wide, &t).len(), 2);
    }

    #[test]
    fn polar_factor_is_unitary() {
        let m = from_real_rows(&[&[3.0, 1.0], &[0.0, 2.0]]);
        let u = polar_unitary(&m);
        assert!(is_unitary(&u, &tol()));
    }

    #[test]
    fn fit_in_span_exact_and_miss() {
        let t = tol();
        let b1 = identity(2);
        let b2 = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let target = &b1 * cr(2.0) + &b2 * cr(-3.0);
        let (coef, res) = fit_in_span(&[b1.clone(), b2.clone()], &target, &t);
        assert!(res < 1e-12);
        assert!((coef[0] - cr(2.0)).norm() < 1e-12);
        assert!((coef[1] - cr(-3.0)).norm() < 1e-12);

        let off = from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let (_, res) = fit_in_span(&[b1, b2], &off, &t);
        assert!(res > 0.5);
    }
}
