//! Monic pencils and membership for free spectrahedra and spectraballs.

use crate::error::{Error, Result};
use crate::mat::{self, psd_check, CMatrix, PsdKind};
use crate::tol::ToleranceProfile;
use crate::tuple::{lambda_eval, MatrixTuple};

/// Square coefficient tuple `A` defining the hermitian pencil
/// `I + sum A_j x_j + sum A_j* x_j*` and its feasibility set.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPencil {
    a: MatrixTuple,
}

/// Rectangular coefficient tuple `E` defining the spectraball
/// `{X : || sum E_j (x) X_j || <= 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraballPencil {
    e: MatrixTuple,
}

/// Where a point sits relative to a feasibility set, with the scalar that
/// decided it: the smallest pencil eigenvalue for spectrahedra, the operator
/// norm of the homogeneous part for spectraballs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub region: Region,
    pub certificate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

impl HermitianPencil {
    pub fn new(a: MatrixTuple) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!(
                "hermitian pencil coefficients must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(Self { a })
    }

    pub fn coefficients(&self) -> &MatrixTuple {
        &self.a
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn g(&self) -> usize {
        self.a.g()
    }

    /// `I + Lambda_A(X) + Lambda_A(X)*`, a hermitian `rn x rn` matrix.
    pub fn hermitian_eval(&self, x: &MatrixTuple) -> Result<CMatrix> {
        let lam = lambda_eval(&self.a, x)?;
        let n = lam.nrows();
        Ok(mat::identity(n) + &lam + lam.adjoint())
    }

    /// Classifies `X` against the free spectrahedron via a PSD verdict on
    /// the evaluated pencil.
    pub fn membership(&self, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<Membership> {
        let h = self.hermitian_eval(x)?;
        let verdict = psd_check(&h, tol)?;
        let region = match verdict.kind {
            PsdKind::PositiveDefinite => Region::Interior,
            PsdKind::PsdSingular => Region::Boundary,
            PsdKind::Indefinite => Region::Exterior,
        };
        Ok(Membership {
            region,
            certificate: verdict.min_eig,
        })
    }
}

impl SpectraballPencil {
    pub fn new(e: MatrixTuple) -> Result<Self> {
        Ok(Self { e })
    }

    pub fn coefficients(&self) -> &MatrixTuple {
        &self.e
    }

    pub fn d(&self) -> usize {
        self.e.rows()
    }

    pub fn e(&self) -> usize {
        self.e.cols()
    }

    pub fn g(&self) -> usize {
        self.e.g()
    }

    pub fn lambda(&self, x: &MatrixTuple) -> Result<CMatrix> {
        lambda_eval(&self.e, x)
    }

    /// `I - Lambda_E(X)* Lambda_E(X)`, hermitian of size `en x en`.
    pub fn q_eval(&self, x: &MatrixTuple) -> Result<CMatrix> {
        let lam = self.lambda(x)?;
        Ok(mat::identity(lam.ncols()) - lam.adjoint() * &lam)
    }

    /// The block matrix `[[I, Lambda_E(X)], [Lambda_E(X)*, I]]`; equals the
    /// hermitian pencil of the embedded square tuple.
    pub fn m_eval(&self, x: &MatrixTuple) -> Result<CMatrix> {
        let lam = self.lambda(x)?;
        let (dn, en) = lam.shape();
        let mut m = mat::identity(dn + en);
        m.view_mut((0, dn), (dn, en)).copy_from(&lam);
        m.view_mut((dn, 0), (en, dn)).copy_from(&lam.adjoint());
        Ok(m)
    }

    /// Classifies `X` against the spectraball from the singular values of
    /// `Lambda_E(X)`, with the boundary band `|norm - 1| <= psd_tol`.
    pub fn membership(&self, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<Membership> {
        let s = mat::operator_norm(&self.lambda(x)?);
        let region = if (s - 1.0).abs() <= tol.psd_tol {
            Region::Boundary
        } else if s < 1.0 {
            Region::Interior
        } else {
            Region::Exterior
        };
        Ok(Membership {
            region,
            certificate: s,
        })
    }

    /// The square tuple `[[0, E_j], [0, 0]]` of size `d + e`, whose free
    /// spectrahedron coincides with the spectraball.
    pub fn embed_ball(&self) -> HermitianPencil {
        let (d, e) = (self.d(), self.e());
        let mats = self
            .e
            .iter()
            .map(|ej| {
                let mut m = mat::zeros(d + e, d + e);
                m.view_mut((0, d), (d, e)).copy_from(ej);
                m
            })
            .collect();
        HermitianPencil {
            a: MatrixTuple::new(mats).expect("embedding preserves well-formedness"),
        }
    }

    /// Two-variable row ball coefficients (1 x g unit rows).
    pub fn row_ball(g: usize) -> Self {
        let mats = (0..g)
            .map(|j| {
                let mut m = mat::zeros(1, g);
                m[(0, j)] = mat::cr(1.0);
                m
            })
            .collect();
        Self {
            e: MatrixTuple::new(mats).expect("well formed"),
        }
    }

    /// Column ball: adjoints of the row ball coefficients.
    pub fn column_ball(g: usize) -> Self {
        let row = Self::row_ball(g);
        Self {
            e: row.e.adjoint(),
        }
    }

    /// Free polydisc coefficients `E_j = e_j e_j*` in `M_g`.
    pub fn polydisc(g: usize) -> Self {
        let mats = (0..g)
            .map(|j| {
                let mut m = mat::zeros(g, g);
                m[(j, j)] = mat::cr(1.0);
                m
            })
            .collect();
        Self {
            e: MatrixTuple::new(mats).expect("well formed"),
        }
    }

    /// Free `d x e` matrix ball: all matrix units, enumerated row-major, so
    /// `g = d * e`.
    pub fn matrix_ball(d: usize, e: usize) -> Self {
        let mut mats = Vec::with_capacity(d * e);
        for i in 0..d {
            for j in 0..e {
                let mut m = mat::zeros(d, e);
                m[(i, j)] = mat::cr(1.0);
                mats.push(m);
            }
        }
        Self {
            e: MatrixTuple::new(mats).expect("well formed"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{cr, from_real_rows, operator_norm};
    use crate::random::{gaussian_tuple, gaussian_tuple_rect, rng_from_seed};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn hermitian_eval_basics() {
        let a = HermitianPencil::new(MatrixTuple::new(vec![from_real_rows(&[&[1.0]])]).unwrap())
            .unwrap();
        let zero = MatrixTuple::zeros(1, 2, 2);
        assert_eq!(a.hermitian_eval(&zero).unwrap(), mat::identity(2));

        let x = MatrixTuple::scalars(&[cr(-0.5)]).unwrap();
        let h = a.hermitian_eval(&x).unwrap();
        assert!(h[(0, 0)].norm() < 1e-15);
        assert_eq!(a.membership(&x, &tol()).unwrap().region, Region::Boundary);
    }

    #[test]
    fn q_eval_row_ball_boundary() {
        let e = SpectraballPencil::row_ball(2);
        let x = MatrixTuple::scalars(&[cr(0.6), cr(0.8)]).unwrap();
        let q = e.q_eval(&x).unwrap();
        let expect = from_real_rows(&[&[0.64, -0.48], &[-0.48, 0.36]]);
        assert!(mat::frobenius(&(q.clone() - expect)) < 1e-12);
        let v = psd_check(&q, &tol()).unwrap();
        assert_eq!(v.kind, PsdKind::PsdSingular);

        assert_eq!(e.membership(&x, &tol()).unwrap().region, Region::Boundary);
    }

    #[test]
    fn q_eval_matches_lambda_identity() {
        let mut rng = rng_from_seed(11);
        let e = SpectraballPencil::new(gaussian_tuple_rect(&mut rng, 2, 2, 3)).unwrap();
        let x = gaussian_tuple(&mut rng, 2, 2);
        let lam = e.lambda(&x).unwrap();
        let q = e.q_eval(&x).unwrap();
        let direct = mat::identity(lam.ncols()) - lam.adjoint() * &lam;
        assert!(mat::frobenius(&(q - direct)) < 1e-12);
    }

    #[test]
    fn m_eval_matches_embedded_pencil_and_det_identity() {
        let mut rng = rng_from_seed(5);
        let e = SpectraballPencil::new(gaussian_tuple_rect(&mut rng, 2, 2, 2)).unwrap();
        let embedded = e.embed_ball();
        for trial in 0..20 {
            let x = gaussian_tuple(&mut rng, 2, 2).scale_re(0.4 + 0.05 * trial as f64);
            let m = e.m_eval(&x).unwrap();
            let h = embedded.hermitian_eval(&x).unwrap();
            assert!(mat::frobenius(&(m.clone() - h)) < 1e-12);

            // det M^re = det Q^re through the triangular factorization.
            let q = e.q_eval(&x).unwrap();
            let dm = m.determinant();
            let dq = q.determinant();
            assert!((dm - dq).norm() <= 1e-9 * (1.0 + dq.norm()));

            let mv = psd_check(&m, &tol()).unwrap().kind;
            let qv = psd_check(&q, &tol()).unwrap().kind;
            let m_psd = mv != PsdKind::Indefinite;
            let q_psd = qv != PsdKind::Indefinite;
            assert_eq!(m_psd, q_psd);
        }
    }

    #[test]
    fn membership_zero_is_interior() {
        let e = SpectraballPencil::row_ball(2);
        let zero = MatrixTuple::zeros(2, 2, 2);
        assert_eq!(e.membership(&zero, &tol()).unwrap().region, Region::Interior);
        let h = e.embed_ball();
        assert_eq!(h.membership(&zero, &tol()).unwrap().region, Region::Interior);
    }

    #[test]
    fn row_versus_column_ball_witness() {
        let row = SpectraballPencil::row_ball(2);
        let col = SpectraballPencil::column_ball(2);
        let x1 = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let x2 = from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let x = MatrixTuple::new(vec![x1, x2]).unwrap();
        assert_eq!(row.membership(&x, &tol()).unwrap().region, Region::Boundary);
        assert_eq!(col.membership(&x, &tol()).unwrap().region, Region::Exterior);
        let cert = col.membership(&x, &tol()).unwrap().certificate;
        assert!((cert - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn embedded_membership_agrees_with_ball() {
        let mut rng = rng_from_seed(23);
        for _ in 0..50 {
            let d = 1 + (rng_next(&mut rng) % 3);
            let e_dim = 1 + (rng_next(&mut rng) % 3);
            let e =
                SpectraballPencil::new(gaussian_tuple_rect(&mut rng, 2, d, e_dim)).unwrap();
            let b = e.embed_ball();
            let x = gaussian_tuple(&mut rng, 2, 2);
            for scale in [0.2, 0.9, 1.7] {
                let norm = operator_norm(&e.lambda(&x).unwrap());
                if norm < 1e-12 {
                    continue;
                }
                let xs = x.scale_re(scale / norm);
                let mb = e.membership(&xs, &tol()).unwrap().region;
                let ms = b.membership(&xs, &tol()).unwrap().region;
                assert_eq!(mb, ms);
            }
        }
    }

    fn rng_next(rng: &mut impl rand::Rng) -> usize {
        rng.gen_range(0..1000)
    }

    #[test]
    fn star_shaped_about_zero() {
        let mut rng = rng_from_seed(3);
        let e = SpectraballPencil::new(gaussian_tuple_rect(&mut rng, 2, 2, 2)).unwrap();
        let x = gaussian_tuple(&mut rng, 2, 2);
        let norm = operator_norm(&e.lambda(&x).unwrap());
        let interior = x.scale_re(0.95 / norm);
        for t in [0.0, 0.3, 0.7, 0.99] {
            let m = e.membership(&interior.scale_re(t), &tol()).unwrap();
            assert_eq!(m.region, Region::Interior);
        }
    }

    #[test]
    fn rotational_invariance_of_balls_and_negative_control() {
        let mut rng = rng_from_seed(9);
        let e = SpectraballPencil::new(gaussian_tuple_rect(&mut rng, 2, 2, 2)).unwrap();
        let x = gaussian_tuple(&mut rng, 2, 2);
        let norm = operator_norm(&e.lambda(&x).unwrap());
        let xs = x.scale_re(0.8 / norm);
        for theta in [0.4, 1.3, 2.9] {
            let rot = xs.scale(C64::from_polar(1.0, theta));
            let a = e.membership(&xs, &tol()).unwrap();
            let b = e.membership(&rot, &tol()).unwrap();
            assert_eq!(a.region, b.region);
            assert!((a.certificate - b.certificate).abs() < 1e-12);
        }
    }

    use crate::mat::C64;

    #[test]
    fn psd_iff_resolvent_contraction() {
        // I + T + T* >= 0 iff I + T invertible and ||(I+T)^{-1} T|| <= 1,
        // checked on random square matrices at several scales.
        let mut rng = rng_from_seed(31);
        let t = tol();
        for _ in 0..30 {
            let m = gaussian_tuple(&mut rng, 1, 3);
            for scale in [0.3, 0.8, 1.5, 3.0] {
                let tm = m.mat(0) * cr(scale / operator_norm(m.mat(0)));
                let h = mat::identity(3) + &tm + tm.adjoint();
                let lhs = psd_check(&h, &t).unwrap().kind != PsdKind::Indefinite;
                let ipt = mat::identity(3) + &tm;
                let rhs = match ipt.clone().try_inverse() {
                    None => false,
                    Some(inv) => operator_norm(&(inv * &tm)) <= 1.0 + 1e-9,
                };
                assert_eq!(lhs, rhs, "scale {scale}");
            }
        }
    }

    #[test]
    fn polydisc_embedding_and_corners() {
        let e = SpectraballPencil::polydisc(2);
        let b = e.embed_ball();
        assert_eq!(b.size(), 4);
        // level-one bidisc corners
        for (z1, z2, region) in [
            (0.5, 0.5, Region::Interior),
            (1.0, 0.3, Region::Boundary),
            (1.2, 0.0, Region::Exterior),
        ] {
            let x = MatrixTuple::scalars(&[cr(z1), cr(z2)]).unwrap();
            assert_eq!(e.membership(&x, &tol()).unwrap().region, region);
            assert_eq!(b.membership(&x, &tol()).unwrap().region, region);
        }
    }
}
