//! Construction and verification of bianalytic maps between spectraballs,
//! including the closed-form automorphism families of free polydiscs and
//! free matrix balls.

use crate::algebra::{dot_action, MultiplicationTable};
use crate::convexotonic::{co_eval, ConvexotonicMap};
use crate::error::{Error, Result};
use crate::mat::{self, cr, CMatrix, C64};
use crate::pencil::{Region, SpectraballPencil};
use crate::tol::ToleranceProfile;
use crate::tuple::{lambda_eval, MatrixTuple};

/// Data sheet of a candidate ball-to-ball map: source and target pencils of
/// the same shape, the image `b` of zero (level-one tuple, interior to the
/// target ball), the derivative matrix `M`, the unitaries `W`, `V`, and the
/// multiplication table solved from the compatibility condition.
///
/// The map itself is `x -> b + psi(x) . M` where `psi` is the convexotonic
/// map of `Xi` and `(y . M)_u = sum_c M_{c,u} y_c`.
#[derive(Debug, Clone)]
pub struct BallMapData {
    pub e: SpectraballPencil,
    pub c: SpectraballPencil,
    pub b: MatrixTuple,
    pub m: CMatrix,
    pub w: CMatrix,
    pub v: CMatrix,
    pub xi: MultiplicationTable,
}

impl BallMapData {
    /// Validates shapes, the interior condition on `b` and unitarity of
    /// `W`, `V`, then solves the compatibility condition
    /// `-E_j V* Lambda_C(b)* W E_k = sum_s (Xi_k)_{j,s} E_s`
    /// for `Xi` by least squares.  The residual of that solve is recorded in
    /// the returned table; `verify_b2b` reports it.
    pub fn new(
        e: SpectraballPencil,
        c: SpectraballPencil,
        b: MatrixTuple,
        m: CMatrix,
        w: CMatrix,
        v: CMatrix,
        tol: &ToleranceProfile,
    ) -> Result<Self> {
        let g = e.g();
        if c.g() != g || c.d() != e.d() || c.e() != e.e() {
            return Err(Error::Shape(
                "source and target pencils must share shape and coordinate count".into(),
            ));
        }
        if b.g() != g || b.rows() != 1 || b.cols() != 1 {
            return Err(Error::Shape("center must be a level-one tuple".into()));
        }
        if m.nrows() != g || m.ncols() != g {
            return Err(Error::Shape("derivative matrix must be g x g".into()));
        }
        if w.nrows() != e.d() || v.nrows() != e.e() {
            return Err(Error::Shape("unitaries must match the coefficient shape".into()));
        }
        mat::check_unitary(&w, tol)?;
        mat::check_unitary(&v, tol)?;
        if c.membership(&b, tol)?.region != Region::Interior {
            return Err(Error::Precondition(
                "center is not interior to the target ball".into(),
            ));
        }

        let lam = lambda_eval(c.coefficients(), &b)?;
        let mut xi_mats = vec![mat::zeros(g, g); g];
        let mut worst = 0.0f64;
        for k in 0..g {
            for j in 0..g {
                let target =
                    -(e.coefficients().mat(j) * v.adjoint() * lam.adjoint() * &w
                        * e.coefficients().mat(k));
                let (coef, res) = mat::fit_in_span(e.coefficients().mats(), &target, tol);
                worst = worst.max(res);
                for s in 0..g {
                    xi_mats[k][(j, s)] = coef[s];
                }
            }
        }
        Ok(Self {
            e,
            c,
            b,
            m,
            w,
            v,
            xi: MultiplicationTable {
                xi: MatrixTuple::new(xi_mats)?,
                residual: worst,
            },
        })
    }

    fn center_scalars(&self) -> Vec<C64> {
        (0..self.b.g()).map(|j| self.b.mat(j)[(0, 0)]).collect()
    }
}

/// Residuals of the two defining conditions of a ball-to-ball map:
/// the span condition solved into `Xi` and the derivative condition
/// `D_{Lambda*} W E_j V* D_Lambda = (M . C)_j`.
pub fn verify_b2b(data: &BallMapData, tol: &ToleranceProfile) -> Result<(f64, f64)> {
    let g = data.e.g();
    let lam = lambda_eval(data.c.coefficients(), &data.b)?;
    let mut res_a = data.xi.residual;
    for k in 0..g {
        for j in 0..g {
            let lhs = -(data.e.coefficients().mat(j)
                * data.v.adjoint()
                * lam.adjoint()
                * &data.w
                * data.e.coefficients().mat(k));
            let rhs = dot_action(data.xi.xi.mat(k), data.e.coefficients())?;
            res_a = res_a.max(mat::operator_norm(&(lhs - rhs.mat(j))));
        }
    }
    let d_right = mat::defect(&lam, tol)?;
    let d_left = mat::defect(&lam.adjoint(), tol)?;
    let target = dot_action(&data.m, data.c.coefficients())?;
    let mut res_b = 0.0f64;
    for j in 0..g {
        let lhs = &d_left * &data.w * data.e.coefficients().mat(j) * data.v.adjoint() * &d_right;
        res_b = res_b.max(mat::operator_norm(&(lhs - target.mat(j))));
    }
    Ok((res_a, res_b))
}

/// How a ball map evaluates points.
#[derive(Debug, Clone)]
enum Evaluator {
    /// `b + psi(x) . M` through the convexotonic map of the data table.
    Convexotonic,
    /// Componentwise Moebius maps of the free polydisc.
    Polydisc {
        b: Vec<C64>,
        perm: Vec<usize>,
        rho: Vec<C64>,
    },
    /// The matrix Moebius formula of the free matrix ball.
    MatrixBall { d: usize, e: usize, b: CMatrix },
}

/// A verified bianalytic map between spectraballs.
#[derive(Debug, Clone)]
pub struct BallMap {
    pub data: BallMapData,
    pub psi: ConvexotonicMap,
    evaluator: Evaluator,
}

impl BallMap {
    pub fn eval(&self, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<MatrixTuple> {
        match &self.evaluator {
            Evaluator::Convexotonic => self.eval_convexotonic(x, tol),
            Evaluator::Polydisc { b, perm, rho } => eval_polydisc(b, perm, rho, x),
            Evaluator::MatrixBall { d, e, b } => {
                eval_matrixball(*d, *e, b, &self.data.w, &self.data.v, x, tol)
            }
        }
    }

    /// Always-available evaluation through the convexotonic data, used to
    /// cross-check closed-form evaluators.
    pub fn eval_convexotonic(&self, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<MatrixTuple> {
        let psi_x = co_eval(&self.psi, x, tol)?;
        let moved = dot_action(&self.data.m.transpose(), &psi_x)?;
        moved.shift_by_scalars(&self.data.b)
    }

    /// Value at zero, exactly the data center.
    pub fn value_at_zero(&self) -> MatrixTuple {
        self.data.b.clone()
    }
}

/// Builds the map evaluator from verified data; the two condition residuals
/// must pass `residual_tol`.
pub fn construct_ball_map(data: BallMapData, tol: &ToleranceProfile) -> Result<BallMap> {
    let (ra, rb) = verify_b2b(&data, tol)?;
    if ra > tol.residual_tol || rb > tol.residual_tol {
        return Err(Error::Precondition(format!(
            "map conditions fail: span residual {ra:.3e}, derivative residual {rb:.3e}"
        )));
    }
    let psi = ConvexotonicMap::p(data.xi.clone());
    Ok(BallMap {
        data,
        psi,
        evaluator: Evaluator::Convexotonic,
    })
}

/// The target-only solvability condition: every product
/// `C_j D_Lambda^{-1} Lambda* D_{Lambda*}^{-1} C_k` stays in the span of `C`.
pub fn only_c_condition(
    c: &SpectraballPencil,
    b: &MatrixTuple,
    tol: &ToleranceProfile,
) -> Result<bool> {
    if c.membership(b, tol)?.region != Region::Interior {
        return Err(Error::Precondition("center is not interior".into()));
    }
    let lam = lambda_eval(c.coefficients(), b)?;
    let e_dim = lam.ncols();
    let d_dim = lam.nrows();
    let inv_right = mat::inv_sqrt_psd(&(mat::identity(e_dim) - lam.adjoint() * &lam), tol)
        .map_err(|_| Error::Precondition("defect operator is singular".into()))?;
    let inv_left = mat::inv_sqrt_psd(&(mat::identity(d_dim) - &lam * lam.adjoint()), tol)
        .map_err(|_| Error::Precondition("defect operator is singular".into()))?;
    let middle = &inv_right * lam.adjoint() * &inv_left;
    for cj in c.coefficients().iter() {
        for ck in c.coefficients().iter() {
            let prod = cj * &middle * ck;
            let (_, res) = mat::fit_in_span(c.coefficients().mats(), &prod, tol);
            if res > tol.residual_tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Solves the derivative condition for the source pencil:
/// `E_j = W* D_{Lambda*}^{-1} (M . C)_j D_Lambda^{-1} V`, then verifies the
/// assembled data round-trips through `verify_b2b`.
pub fn solve_e_from_c(
    c: &SpectraballPencil,
    b: &MatrixTuple,
    m: &CMatrix,
    w: &CMatrix,
    v: &CMatrix,
    tol: &ToleranceProfile,
) -> Result<SpectraballPencil> {
    if !only_c_condition(c, b, tol)? {
        return Err(Error::Precondition(
            "target pencil fails the span condition at this center".into(),
        ));
    }
    let g = c.g();
    if m.nrows() != g || m.ncols() != g || mat::numerical_rank(m, tol) != g {
        return Err(Error::Precondition("derivative matrix must be invertible".into()));
    }
    mat::check_unitary(w, tol)?;
    mat::check_unitary(v, tol)?;
    let lam = lambda_eval(c.coefficients(), b)?;
    let inv_right = mat::inv_sqrt_psd(&(mat::identity(lam.ncols()) - lam.adjoint() * &lam), tol)?;
    let inv_left = mat::inv_sqrt_psd(&(mat::identity(lam.nrows()) - &lam * lam.adjoint()), tol)?;
    let target = dot_action(m, c.coefficients())?;
    let mats: Vec<CMatrix> = (0..g)
        .map(|j| w.adjoint() * &inv_left * target.mat(j) * &inv_right * v)
        .collect();
    let e = SpectraballPencil::new(MatrixTuple::new(mats)?)?;
    let data = BallMapData::new(
        e.clone(),
        c.clone(),
        b.clone(),
        m.clone(),
        w.clone(),
        v.clone(),
        tol,
    )?;
    let (ra, rb) = verify_b2b(&data, tol)?;
    if ra > tol.residual_tol || rb > tol.residual_tol {
        return Err(Error::Numerical(format!(
            "recovered source pencil fails verification: {ra:.3e}, {rb:.3e}"
        )));
    }
    Ok(e)
}

fn check_permutation(perm: &[usize], g: usize) -> Result<()> {
    let mut seen = vec![false; g];
    if perm.len() != g {
        return Err(Error::Shape("permutation length mismatch".into()));
    }
    for &p in perm {
        if p >= g || seen[p] {
            return Err(Error::Invalid("not a permutation".into()));
        }
        seen[p] = true;
    }
    Ok(())
}

fn eval_polydisc(b: &[C64], perm: &[usize], rho: &[C64], x: &MatrixTuple) -> Result<MatrixTuple> {
    let n = x.level()?;
    let g = b.len();
    if x.g() != g {
        return Err(Error::Shape("coordinate count mismatch".into()));
    }
    let id = mat::identity(n);
    let mats = (0..g)
        .map(|u| {
            let k = perm[u];
            let ck = rho[k].conj() * b[k];
            let num = x.mat(k) + &id * ck;
            let den = &id + x.mat(k) * ck.conj();
            let inv = den
                .try_inverse()
                .ok_or_else(|| Error::DomainViolation("Moebius denominator is singular".into()))?;
            Ok(num * inv * rho[k])
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(mats)
}

/// Automorphism of the free polydisc determined by a center `b` in the open
/// polydisc, a coordinate permutation and unimodular scalars:
/// `phi_u(x) = rho_{p(u)} (x_{p(u)} + c_{p(u)}) (1 + c_{p(u)}* x_{p(u)})^{-1}`
/// with `c_k = conj(rho_k) b_k`.
pub fn polydisc_automorphism(
    b: &[C64],
    perm: &[usize],
    rho: &[C64],
    tol: &ToleranceProfile,
) -> Result<BallMap> {
    let g = b.len();
    if rho.len() != g {
        return Err(Error::Shape("parameter lengths differ".into()));
    }
    check_permutation(perm, g)?;
    for (j, z) in b.iter().enumerate() {
        if z.norm() >= 1.0 {
            return Err(Error::Precondition(format!(
                "center coordinate {j} is not inside the disc"
            )));
        }
    }
    for (j, r) in rho.iter().enumerate() {
        if (r.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!(
                "phase {j} is not unimodular"
            )));
        }
    }
    let pencil = SpectraballPencil::polydisc(g);
    // Value at zero and derivative in the row convention phi = beta + psi.M.
    let beta: Vec<C64> = (0..g).map(|u| b[perm[u]]).collect();
    let mut m = mat::zeros(g, g);
    for u in 0..g {
        m[(perm[u], u)] = rho[perm[u]] * cr(1.0 - b[perm[u]].norm_sqr());
    }
    // Unitaries solving the derivative condition for this (beta, M):
    // W = Pi* diag(rho), V = Pi* with Pi e_k = e_{perm(k)}.
    let mut pi = mat::zeros(g, g);
    for k in 0..g {
        pi[(perm[k], k)] = cr(1.0);
    }
    let w = pi.adjoint() * CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(rho));
    let v = pi.adjoint();
    let data = BallMapData::new(
        pencil.clone(),
        pencil,
        MatrixTuple::scalars(&beta)?,
        m,
        w,
        v,
        tol,
    )?;
    let (ra, rb) = verify_b2b(&data, tol)?;
    if ra > tol.residual_tol || rb > tol.residual_tol {
        return Err(Error::Numerical(format!(
            "polydisc data failed verification: {ra:.3e}, {rb:.3e}"
        )));
    }
    let psi = ConvexotonicMap::p(data.xi.clone());
    Ok(BallMap {
        data,
        psi,
        evaluator: Evaluator::Polydisc {
            b: b.to_vec(),
            perm: perm.to_vec(),
            rho: rho.to_vec(),
        },
    })
}

fn eval_matrixball(
    d: usize,
    e: usize,
    b: &CMatrix,
    w: &CMatrix,
    v: &CMatrix,
    x: &MatrixTuple,
    tol: &ToleranceProfile,
) -> Result<MatrixTuple> {
    let n = x.level()?;
    let c = w.adjoint() * b * v;
    let left = w * mat::inv_sqrt_psd(&(mat::identity(d) - &c * c.adjoint()), tol)?;
    let right = mat::sqrt_psd(&(mat::identity(e) - c.adjoint() * &c), tol)? * v.adjoint();
    let xm = matt(x, d, e)?;
    let id_n = mat::identity(n);
    let num = &xm + mat::kron(&c, &id_n);
    let den = mat::identity(e * n) + mat::kron(&c.adjoint(), &id_n) * &xm;
    let inv = den
        .try_inverse()
        .ok_or_else(|| Error::DomainViolation("Moebius denominator is singular".into()))?;
    let image = mat::kron(&left, &id_n) * num * inv * mat::kron(&right, &id_n);
    row_tuple(&image, d, e)
}

/// Automorphism of the free `d x e` matrix ball with value `b` at zero
/// (`||b|| < 1`) twisted by unitaries `W`, `V`:
/// `W (I - cc*)^{-1/2} (matt(x) + c) (I + c* matt(x))^{-1} (I - c*c)^{1/2} V*`
/// with `c = W* b V`.
pub fn matrixball_automorphism(
    d: usize,
    e: usize,
    b: &CMatrix,
    w: &CMatrix,
    v: &CMatrix,
    tol: &ToleranceProfile,
) -> Result<BallMap> {
    if b.nrows() != d || b.ncols() != e {
        return Err(Error::Shape(format!(
            "center must be {d}x{e}, got {}x{}",
            b.nrows(),
            b.ncols()
        )));
    }
    let norm = mat::operator_norm(b);
    if norm >= 1.0 {
        return Err(Error::NormExceedsOne(norm));
    }
    mat::check_unitary(w, tol)?;
    mat::check_unitary(v, tol)?;
    let pencil = SpectraballPencil::matrix_ball(d, e);
    let g = d * e;
    let beta: Vec<C64> = (0..d)
        .flat_map(|i| (0..e).map(move |j| (i, j)))
        .map(|(i, j)| b[(i, j)])
        .collect();
    let d_left = mat::defect(&b.adjoint(), tol)?; // (I - b b*)^{1/2}
    let d_right = mat::defect(b, tol)?; // (I - b* b)^{1/2}
    let mut m = mat::zeros(g, g);
    for i in 0..d {
        for j in 0..e {
            for u in 0..d {
                for vv in 0..e {
                    let lhs = (d_left.row(u) * w.column(i))[(0, 0)];
                    let rhs = (v.column(j).adjoint() * d_right.column(vv))[(0, 0)];
                    m[(i * e + j, u * e + vv)] = lhs * rhs;
                }
            }
        }
    }
    let data = BallMapData::new(
        pencil.clone(),
        pencil,
        MatrixTuple::scalars(&beta)?,
        m,
        w.clone(),
        v.clone(),
        tol,
    )?;
    let (ra, rb) = verify_b2b(&data, tol)?;
    if ra > tol.residual_tol || rb > tol.residual_tol {
        return Err(Error::Numerical(format!(
            "matrix ball data failed verification: {ra:.3e}, {rb:.3e}"
        )));
    }
    let psi = ConvexotonicMap::p(data.xi.clone());
    Ok(BallMap {
        data,
        psi,
        evaluator: Evaluator::MatrixBall {
            d,
            e,
            b: b.clone(),
        },
    })
}

/// Reshapes a `d*e`-coordinate tuple at level `n` into the `dn x en` block
/// matrix with block `(i, j)` equal to coordinate `i*e + j` (row-major).
pub fn matt(z: &MatrixTuple, d: usize, e: usize) -> Result<CMatrix> {
    if z.g() != d * e {
        return Err(Error::Shape(format!(
            "expected {} coordinates for a {d}x{e} reshape, got {}",
            d * e,
            z.g()
        )));
    }
    let n = z.level()?;
    let mut out = mat::zeros(d * n, e * n);
    for i in 0..d {
        for j in 0..e {
            out.view_mut((i * n, j * n), (n, n)).copy_from(z.mat(i * e + j));
        }
    }
    Ok(out)
}

/// Inverse of [`matt`]: slices a `dn x en` block matrix into a row-major
/// tuple of `d*e` level-`n` coordinates.
pub fn row_tuple(m: &CMatrix, d: usize, e: usize) -> Result<MatrixTuple> {
    if d == 0 || e == 0 || m.nrows() % d != 0 || m.ncols() % e != 0 {
        return Err(Error::Shape("block shape does not divide the matrix".into()));
    }
    let n = m.nrows() / d;
    if m.ncols() / e != n {
        return Err(Error::Shape("inconsistent block level".into()));
    }
    let mats = (0..d)
        .flat_map(|i| (0..e).map(move |j| (i, j)))
        .map(|(i, j)| m.view((i * n, j * n), (n, n)).into_owned())
        .collect();
    MatrixTuple::new(mats)
}

/// Entry `(c, u)` is the complex partial of coordinate `u` in direction `c`
/// at zero, by central differences at level one; matches the `M` layout of
/// the map data.
pub fn derivative_at_zero<F>(g: usize, f: F) -> Result<CMatrix>
where
    F: Fn(&MatrixTuple) -> Result<MatrixTuple>,
{
    let h = 1e-5;
    let mut m = mat::zeros(g, g);
    for cdir in 0..g {
        let mut plus = vec![cr(0.0); g];
        plus[cdir] = cr(h);
        let mut minus = vec![cr(0.0); g];
        minus[cdir] = cr(-h);
        let fp = f(&MatrixTuple::scalars(&plus)?)?;
        let fm = f(&MatrixTuple::scalars(&minus)?)?;
        for u in 0..g {
            m[(cdir, u)] = (fp.mat(u)[(0, 0)] - fm.mat(u)[(0, 0)]) / cr(2.0 * h);
        }
    }
    Ok(m)
}

/// Maximal deviation of two ball maps over the samples, after checking that
/// their values and derivatives at zero agree within `1e-8` (so equality is
/// forced and deviations flag an implementation bug).
pub fn cartan_uniqueness_check(
    phi1: &BallMap,
    phi2: &BallMap,
    samples: &[MatrixTuple],
    tol: &ToleranceProfile,
) -> Result<f64> {
    if phi1.data.e.g() != phi2.data.e.g() {
        return Err(Error::Shape("maps have different coordinate counts".into()));
    }
    let v0 = phi1.value_at_zero().distance(&phi2.value_at_zero())?;
    if v0 > 1e-8 {
        return Err(Error::Precondition(format!(
            "values at zero differ by {v0:.3e}"
        )));
    }
    let g = phi1.data.e.g();
    let d1 = derivative_at_zero(g, |x| phi1.eval(x, tol))?;
    let d2 = derivative_at_zero(g, |x| phi2.eval(x, tol))?;
    let dgap = mat::operator_norm(&(&d1 - &d2));
    if dgap > 1e-8 {
        return Err(Error::Precondition(format!(
            "derivatives at zero differ by {dgap:.3e}"
        )));
    }
    let mut worst = 0.0f64;
    for x in samples {
        let y1 = phi1.eval(x, tol)?;
        let y2 = phi2.eval(x, tol)?;
        worst = worst.max(y1.distance(&y2)?);
    }
    Ok(worst)
}
