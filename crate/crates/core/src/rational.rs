//! State-space realizations of free rational functions regular at zero.

use crate::convexotonic::{ConvexotonicMap, Sign};
use crate::error::{Error, Result};
use crate::mat::{self, cr, CMatrix, CVector};
use crate::tol::ToleranceProfile;
use crate::tuple::{lambda_eval, MatrixTuple};

/// Realization `r(x) = c* (I - Lambda_S(x))^{-1} b` with square state
/// coefficients `S` and state vectors `b`, `c`.
#[derive(Debug, Clone)]
pub struct Realization {
    pub s: MatrixTuple,
    pub b: CVector,
    pub c: CVector,
}

impl Realization {
    pub fn new(s: MatrixTuple, b: CVector, c: CVector) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::Shape("state coefficients must be square".into()));
        }
        let dim = s.rows();
        if b.len() != dim || c.len() != dim {
            return Err(Error::Shape(format!(
                "state vectors must have length {dim}, got {} and {}",
                b.len(),
                c.len()
            )));
        }
        Ok(Self { s, b, c })
    }

    pub fn state_dim(&self) -> usize {
        self.s.rows()
    }
}

/// Evaluates the realization at a square tuple:
/// `(c* (x) I_n) (I - Lambda_S(X))^{-1} (b (x) I_n)`, an `n x n` matrix.
pub fn real_eval(r: &Realization, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<CMatrix> {
    let n = x.level()?;
    let lam = lambda_eval(&r.s, x)?;
    let res = mat::identity(lam.nrows()) - lam;
    if mat::condition_number(&res) >= 1.0 / tol.rank_tol {
        return Err(Error::DomainViolation(
            "realization resolvent is numerically singular".into(),
        ));
    }
    let inv = res
        .try_inverse()
        .ok_or_else(|| Error::DomainViolation("realization resolvent is singular".into()))?;
    let cn = mat::kron(&CMatrix::from_fn(1, r.c.len(), |_, j| r.c[j].conj()), &mat::identity(n));
    let bn = mat::kron(&CMatrix::from_fn(r.b.len(), 1, |i, _| r.b[i]), &mat::identity(n));
    Ok(cn * inv * bn)
}

/// True when the resolvent is comfortably invertible at `x`.
pub fn in_domain(r: &Realization, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<bool> {
    let lam = lambda_eval(&r.s, x)?;
    let res = mat::identity(lam.nrows()) - lam;
    Ok(mat::condition_number(&res) < 1.0 / tol.rank_tol)
}

/// Per-coordinate realizations of a convexotonic map.
///
/// Coordinate `i` is realized on the augmented state space of size `g + 1`:
/// the state coefficients `S_j` place the row `e_j*` next to `-/+ Xi_j`, which
/// absorbs the left factor `x_j` of the coordinate formula
/// `sum_j x_j e_j* (I -/+ Lambda_Xi(x))^{-1} e_i`.
pub fn convexotonic_to_realizations(map: &ConvexotonicMap) -> Vec<Realization> {
    let g = map.g();
    let sign = match map.sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let state: Vec<CMatrix> = (0..g)
        .map(|j| {
            let mut s = mat::zeros(g + 1, g + 1);
            s[(0, 1 + j)] = cr(1.0);
            for k in 0..g {
                for l in 0..g {
                    s[(1 + k, 1 + l)] = map.xi.xi.mat(j)[(k, l)] * cr(sign);
                }
            }
            s
        })
        .collect();
    let s = MatrixTuple::new(state).expect("augmented state coefficients are well formed");
    (0..g)
        .map(|i| {
            let mut b = CVector::zeros(g + 1);
            b[1 + i] = cr(1.0);
            let mut c = CVector::zeros(g + 1);
            c[0] = cr(1.0);
            Realization::new(s.clone(), b, c).expect("well formed")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiplicationTable;
    use crate::mat::from_real_rows;
    use crate::random::{gaussian_tuple, rng_from_seed};

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn constant_and_geometric() {
        // S = 0 gives the constant c* b.
        let r = Realization::new(
            MatrixTuple::zeros(1, 2, 2),
            CVector::from_vec(vec![cr(2.0), cr(0.0)]),
            CVector::from_vec(vec![cr(3.0), cr(0.0)]),
        )
        .unwrap();
        let x = MatrixTuple::zeros(1, 3, 3);
        let v = real_eval(&r, &x, &tol()).unwrap();
        assert!(mat::frobenius(&(v - mat::identity(3) * cr(6.0))) < 1e-12);

        // s = 1, S = [[1]], b = c = 1 realizes 1/(1-x).
        let geo = Realization::new(
            MatrixTuple::new(vec![from_real_rows(&[&[1.0]])]).unwrap(),
            CVector::from_element(1, cr(1.0)),
            CVector::from_element(1, cr(1.0)),
        )
        .unwrap();
        let half = MatrixTuple::scalars(&[cr(0.5)]).unwrap();
        let v = real_eval(&geo, &half, &tol()).unwrap();
        assert!((v[(0, 0)].re - 2.0).abs() < 1e-12);

        let one = MatrixTuple::scalars(&[cr(1.0)]).unwrap();
        assert!(!in_domain(&geo, &one, &tol()).unwrap());
        assert!(in_domain(&geo, &half, &tol()).unwrap());
        assert!(matches!(
            real_eval(&geo, &one, &tol()),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn trivial_realization_of_identity_map() {
        let xi = MultiplicationTable {
            xi: MatrixTuple::zeros(2, 2, 2),
            residual: 0.0,
        };
        let map = ConvexotonicMap::p(xi);
        let reals = convexotonic_to_realizations(&map);
        let x = MatrixTuple::scalars(&[cr(0.3), cr(-0.8)]).unwrap();
        for (i, r) in reals.iter().enumerate() {
            let v = real_eval(r, &x, &tol()).unwrap();
            let expect = x.mat(i)[(0, 0)];
            assert!((v[(0, 0)] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_evaluation_matches_truncated_series() {
        // Evaluation at a nilpotent tuple equals the truncated geometric sum.
        let mut rng = rng_from_seed(17);
        let s = gaussian_tuple(&mut rng, 2, 2).scale_re(0.4);
        let b = CVector::from_vec(vec![cr(1.0), cr(0.5), cr(0.0), cr(0.25)]);
        let c = CVector::from_vec(vec![cr(0.5), cr(1.0), cr(-0.5), cr(0.0)]);
        let r = Realization::new(s.clone(), b.clone(), c.clone()).unwrap();

        let x = gaussian_tuple(&mut rng, 2, 2);
        let order = 3;
        let lifted = crate::convexotonic::nilpotent_lift(&x, order - 1).unwrap();
        let v = real_eval(&r, &lifted, &tol()).unwrap();

        let n = lifted.level().unwrap();
        let lam = lambda_eval(&s, &lifted).unwrap();
        let mut series = mat::zeros(lam.nrows(), lam.ncols());
        let mut power = mat::identity(lam.nrows());
        for _k in 0..order {
            series += &power;
            power = &power * &lam;
        }
        let cn = mat::kron(
            &CMatrix::from_fn(1, c.len(), |_, j| c[j].conj()),
            &mat::identity(n),
        );
        let bn = mat::kron(&CMatrix::from_fn(b.len(), 1, |i, _| b[i]), &mat::identity(n));
        let direct = cn * series * bn;
        assert!(mat::frobenius(&(v - direct)) < 1e-10);
    }

    #[test]
    fn respects_direct_sums_and_similarity() {
        let mut rng = rng_from_seed(21);
        let s = gaussian_tuple(&mut rng, 2, 3).scale_re(0.3);
        let b = CVector::from_fn(6, |i, _| cr(0.2 * (i as f64 + 1.0)));
        let c = CVector::from_fn(6, |i, _| cr(0.1 * (i as f64 + 1.0)));
        let r = Realization::new(s, b, c).unwrap();
        let x = gaussian_tuple(&mut rng, 2, 2).scale_re(0.3);
        let y = gaussian_tuple(&mut rng, 2, 3).scale_re(0.3);
        let vx = real_eval(&r, &x, &tol()).unwrap();
        let vy = real_eval(&r, &y, &tol()).unwrap();
        let vsum = real_eval(&r, &x.direct_sum(&y).unwrap(), &tol()).unwrap();
        let mut expected = mat::zeros(5, 5);
        expected.view_mut((0, 0), (2, 2)).copy_from(&vx);
        expected.view_mut((2, 2), (3, 3)).copy_from(&vy);
        assert!(mat::frobenius(&(vsum - expected)) < 1e-10);

        let sim = gaussian_tuple(&mut rng, 1, 2);
        let smat = mat::identity(2) + sim.mat(0) * cr(0.3);
        let sinv = smat.clone().try_inverse().unwrap();
        let conj = x.conjugate(&smat, &sinv);
        let vconj = real_eval(&r, &conj, &tol()).unwrap();
        assert!(mat::frobenius(&(vconj - &sinv * vx * &smat)) < 1e-9);
    }
}
