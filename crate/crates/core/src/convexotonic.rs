//! Convexotonic maps: evaluation, inverse-pair verification, pencil pairs
//! attached to a spectraball and a unitary, and their transport identities.

use crate::algebra::{
    dot_action, is_convexotonic, solve_multiplication_table, AlgebraBasis, MultiplicationTable,
};
use crate::error::{Error, Result};
use crate::mat::{self, cr, CMatrix};
use crate::pencil::{HermitianPencil, Membership, Region, SpectraballPencil};
use crate::tol::ToleranceProfile;
use crate::tuple::{lambda_eval, MatrixTuple};

/// Which resolvent the map uses: `Plus` is `x (I - Lambda_Xi(x))^{-1}` and
/// `Minus` its inverse `x (I + Lambda_Xi(x))^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// A rational change of variables built from a multiplication table.
#[derive(Debug, Clone)]
pub struct ConvexotonicMap {
    pub xi: MultiplicationTable,
    pub sign: Sign,
}

impl ConvexotonicMap {
    pub fn p(xi: MultiplicationTable) -> Self {
        Self {
            xi,
            sign: Sign::Plus,
        }
    }

    pub fn q(xi: MultiplicationTable) -> Self {
        Self {
            xi,
            sign: Sign::Minus,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            xi: self.xi.clone(),
            sign: match self.sign {
                Sign::Plus => Sign::Minus,
                Sign::Minus => Sign::Plus,
            },
        }
    }

    pub fn g(&self) -> usize {
        self.xi.xi.g()
    }

    pub fn eval(&self, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<MatrixTuple> {
        co_eval(self, x, tol)
    }
}

/// Resolvent of the map at `x`: `I -/+ Lambda_Xi(x)`.
fn resolvent(map: &ConvexotonicMap, x: &MatrixTuple) -> Result<CMatrix> {
    let lam = lambda_eval(&map.xi.xi, x)?;
    let id = mat::identity(lam.nrows());
    Ok(match map.sign {
        Sign::Plus => id - lam,
        Sign::Minus => id + lam,
    })
}

/// Evaluates the map: the row block `(X_1 ... X_g)` times the inverse
/// resolvent, resliced into `g` square blocks.  Points where the resolvent
/// condition number reaches `1 / rank_tol` are outside the usable domain.
pub fn co_eval(
    map: &ConvexotonicMap,
    x: &MatrixTuple,
    tol: &ToleranceProfile,
) -> Result<MatrixTuple> {
    let g = map.g();
    if x.g() != g {
        return Err(Error::Shape(format!(
            "map has {g} coordinates, point has {}",
            x.g()
        )));
    }
    let n = x.level()?;
    let res = resolvent(map, x)?;
    if mat::condition_number(&res) >= 1.0 / tol.rank_tol {
        return Err(Error::DomainViolation(
            "map resolvent is numerically singular at this point".into(),
        ));
    }
    let inv = res
        .try_inverse()
        .ok_or_else(|| Error::DomainViolation("map resolvent is singular".into()))?;
    let row = x.stack_cols();
    let image = row * inv;
    let mats = (0..g)
        .map(|j| image.view((0, j * n), (n, n)).into_owned())
        .collect();
    MatrixTuple::new(mats)
}

/// Outcome of checking `q(p(X)) = X` over a sample set.
#[derive(Debug, Clone, Copy)]
pub struct InverseCheck {
    pub max_residual: f64,
    pub tested: usize,
    pub skipped: usize,
}

/// Largest `||q(p(X)) - X||` over the samples; points outside either map
/// domain are skipped and counted.
pub fn verify_inverse_pair(
    xi: &MultiplicationTable,
    samples: &[MatrixTuple],
    tol: &ToleranceProfile,
) -> Result<InverseCheck> {
    let p = ConvexotonicMap::p(xi.clone());
    let q = p.inverse();
    let mut max_residual = 0.0f64;
    let mut tested = 0;
    let mut skipped = 0;
    for x in samples {
        let image = match co_eval(&p, x, tol) {
            Ok(y) => y,
            Err(Error::DomainViolation(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let back = match co_eval(&q, &image, tol) {
            Ok(y) => y,
            Err(Error::DomainViolation(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        max_residual = max_residual.max(back.distance(x)?);
        tested += 1;
    }
    Ok(InverseCheck {
        max_residual,
        tested,
        skipped,
    })
}

/// A pair of pencils `B = U A` whose difference tuple `R = (U - I) A`
/// satisfies `A_l R_j = sum_s (Xi_j)_{l,s} A_s`; the convexotonic map of
/// `Xi` carries the feasibility set of `A` onto that of `B`.
#[derive(Debug, Clone)]
pub struct PencilPair {
    pub a: HermitianPencil,
    pub b: HermitianPencil,
    pub u: CMatrix,
    pub xi: MultiplicationTable,
}

impl PencilPair {
    /// Validates `B = U A` and the table identity, returning the worst
    /// residual of the two families.
    pub fn residuals(&self, tol: &ToleranceProfile) -> Result<(f64, f64)> {
        mat::check_unitary(&self.u, tol)?;
        let mut rot = 0.0f64;
        for (aj, bj) in self.a.coefficients().iter().zip(self.b.coefficients().iter()) {
            rot = rot.max(mat::operator_norm(&(bj - &self.u * aj)));
        }
        let g = self.a.g();
        let r = self.a.size();
        let id = mat::identity(r);
        let mut table = 0.0f64;
        for j in 0..g {
            let rj = (&self.u - &id) * self.a.coefficients().mat(j);
            for l in 0..g {
                let mut rhs = mat::zeros(r, r);
                for s in 0..g {
                    rhs += self.a.coefficients().mat(s) * self.xi.xi.mat(j)[(l, s)];
                }
                let lhs = self.a.coefficients().mat(l) * &rj;
                table = table.max(mat::operator_norm(&(lhs - rhs)));
            }
        }
        Ok((rot, table))
    }

    /// The map from the `A` side onto the `B` side.
    pub fn map(&self) -> ConvexotonicMap {
        ConvexotonicMap::p(self.xi.clone())
    }
}

/// Embeds `E_j` into the top-left corner of an `r x r` matrix.
fn embed_top_left(e: &SpectraballPencil, r: usize) -> MatrixTuple {
    let (d, cols) = (e.d(), e.e());
    MatrixTuple::new(
        e.coefficients()
            .iter()
            .map(|ej| {
                let mut m = mat::zeros(r, r);
                m.view_mut((0, 0), (d, cols)).copy_from(ej);
                m
            })
            .collect(),
    )
    .expect("embedding preserves well-formedness")
}

/// Builds the pencil pair attached to a spectraball `E` and an `r x r`
/// unitary `U` (`r >= max(d, e)`).
///
/// The rotated corner embedding `A-hat_j = U [[E_j, 0], [0, 0]]` spans an
/// algebra exactly when `E_k Z E_j` stays in the span of `E` for
/// `Z = U[1..e, 1..d]`; its multiplication table `Xi` is solved by least
/// squares, and `None` reports that the span condition fails.  On success
/// the pair is realized at size `d + e`: the ball pencil `A = [[0, E], [0, 0]]`
/// and `B = U-tilde A` for the unitary dilation
/// `U-tilde = [[D_Z, -Z*], [Z, D_{Z*}]]` of `Z`, which satisfies the table
/// identity because the coordinates of `A` multiply to zero.
pub fn pencil_pair_from_unitary(
    e: &SpectraballPencil,
    u: &CMatrix,
    r: usize,
    tol: &ToleranceProfile,
) -> Result<Option<PencilPair>> {
    let (d, cols) = (e.d(), e.e());
    if u.nrows() != r || u.ncols() != r {
        return Err(Error::Shape(format!(
            "unitary must be {r}x{r}, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    if r < d.max(cols) {
        return Err(Error::Shape(format!(
            "size {r} cannot embed {d}x{cols} coefficients"
        )));
    }
    mat::check_unitary(u, tol)?;

    let rotated = MatrixTuple::new(
        embed_top_left(e, r)
            .iter()
            .map(|m| u * m)
            .collect::<Vec<_>>(),
    )?;
    let Some(table) = solve_multiplication_table(&rotated, tol)? else {
        return Ok(None);
    };
    debug_assert!(is_convexotonic(&table.xi, tol)?);

    let z = u.view((0, 0), (cols, d)).into_owned();
    let dz = mat::defect(&z, tol)?;
    let dz_star = mat::defect(&z.adjoint(), tol)?;
    let mut dilation = mat::zeros(d + cols, d + cols);
    dilation.view_mut((0, 0), (d, d)).copy_from(&dz);
    dilation
        .view_mut((0, d), (d, cols))
        .copy_from(&(-z.adjoint()));
    dilation.view_mut((d, 0), (cols, d)).copy_from(&z);
    dilation.view_mut((d, d), (cols, cols)).copy_from(&dz_star);

    let a = e.embed_ball();
    let b = HermitianPencil::new(MatrixTuple::new(
        a.coefficients()
            .iter()
            .map(|aj| &dilation * aj)
            .collect::<Vec<_>>(),
    )?)?;
    let pair = PencilPair {
        a,
        b,
        u: dilation,
        xi: table,
    };
    let (rot, table_res) = pair.residuals(tol)?;
    if rot > tol.residual_tol || table_res > tol.residual_tol {
        return Err(Error::Numerical(format!(
            "pair residuals too large: rotation {rot:.3e}, table {table_res:.3e}"
        )));
    }
    Ok(Some(pair))
}

/// Residuals of the two transport identities of a pencil pair at `X`:
/// `(I + Lambda_B(p(X))) Q(X) = I + Lambda_A(X)` and
/// `Q(X)* Lre_B(p(X)) Q(X) = Lre_A(X)`, with `Q(x) = I - Lambda_R(x)` and
/// `R = B - A`.
pub fn nstatz_residuals(
    pair: &PencilPair,
    x: &MatrixTuple,
    tol: &ToleranceProfile,
) -> Result<(f64, f64)> {
    let a = pair.a.coefficients();
    let b = pair.b.coefficients();
    let r_tuple = b.sub(a)?;
    let lam_r = lambda_eval(&r_tuple, x)?;
    let q = mat::identity(lam_r.nrows()) - lam_r;
    if mat::condition_number(&q) >= 1.0 / tol.rank_tol {
        return Err(Error::DomainViolation(
            "transport factor Q(X) is numerically singular".into(),
        ));
    }
    let image = co_eval(&pair.map(), x, tol)?;
    let lam_b_img = lambda_eval(b, &image)?;
    let lam_a = lambda_eval(a, x)?;
    let id = mat::identity(q.nrows());
    let first = (&id + &lam_b_img) * &q - (&id + &lam_a);
    let res_a = mat::operator_norm(&first);
    let lre_b = pair.b.hermitian_eval(&image)?;
    let lre_a = pair.a.hermitian_eval(x)?;
    let second = q.adjoint() * lre_b * &q - lre_a;
    let res_b = mat::operator_norm(&second);
    Ok((res_a, res_b))
}

/// Classification of a point and its image under the pair's map.
#[derive(Debug, Clone, Copy)]
pub struct TransportReport {
    pub source: Membership,
    pub image: Membership,
    pub consistent: bool,
}

/// Checks that the map carries interior to interior, boundary to boundary
/// and exterior to exterior (within the shared tolerance band).
pub fn boundary_transport_check(
    pair: &PencilPair,
    x: &MatrixTuple,
    tol: &ToleranceProfile,
) -> Result<TransportReport> {
    let source = pair.a.membership(x, tol)?;
    let image_point = co_eval(&pair.map(), x, tol)?;
    let image = pair.b.membership(&image_point, tol)?;
    Ok(TransportReport {
        source,
        image,
        consistent: source.region == image.region,
    })
}

/// Proper map from a free spectrahedron into the spectraball of the algebra
/// basis generated by its coefficients: pad the point with zero coordinates
/// and apply the inverse-signed map of the basis table.
#[derive(Debug, Clone)]
pub struct ProperBallMap {
    pub basis: AlgebraBasis,
    pub map: ConvexotonicMap,
}

impl ProperBallMap {
    /// Ambient spectraball pencil of the image.
    pub fn target(&self) -> Result<SpectraballPencil> {
        SpectraballPencil::new(self.basis.j.clone())
    }

    pub fn eval(&self, x: &MatrixTuple, tol: &ToleranceProfile) -> Result<MatrixTuple> {
        if x.g() != self.basis.g {
            return Err(Error::Shape(format!(
                "expected {} coordinates, got {}",
                self.basis.g,
                x.g()
            )));
        }
        let n = x.level()?;
        let mut mats = x.mats().to_vec();
        for _ in self.basis.g..self.basis.h {
            mats.push(mat::zeros(n, n));
        }
        co_eval(&self.map, &MatrixTuple::new(mats)?, tol)
    }
}

/// Builds the proper ball map for a linearly independent square tuple.
pub fn proper_map_to_ball(a: &HermitianPencil, tol: &ToleranceProfile) -> Result<ProperBallMap> {
    let basis = crate::algebra::generated_algebra_basis(a.coefficients(), tol)?;
    let table = solve_multiplication_table(&basis.j, tol)?.ok_or_else(|| {
        Error::Numerical("closure of the generated algebra lost the span property".into())
    })?;
    Ok(ProperBallMap {
        basis,
        map: ConvexotonicMap::q(table),
    })
}

/// Tensors each coordinate with the `(m+1) x (m+1)` upper shift, producing
/// a tuple that is nilpotent of order `m + 1` and keeps the homogeneous
/// pencil norm of `X`; rational maps evaluated there see only their
/// degree-`m` truncation.
pub fn nilpotent_lift(x: &MatrixTuple, m: usize) -> Result<MatrixTuple> {
    let _ = x.level()?;
    let mut shift = mat::zeros(m + 1, m + 1);
    for i in 0..m {
        shift[(i, i + 1)] = cr(1.0);
    }
    Ok(x.map(|xj| mat::kron(&shift, xj)))
}
