//! Tuples of same-shaped complex matrices and homogeneous pencil evaluation.

use crate::error::{Error, Result};
use crate::mat::{self, c, kron, CMatrix, C64};

/// A `g`-tuple of `d x e` complex matrices.
///
/// Used both for pencil coefficients and for evaluation points; evaluation
/// points are square (`d == e`) and their common size is called the level.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<CMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::Invalid("a tuple needs at least one matrix".into()));
        }
        let shape = mats[0].shape();
        for (j, m) in mats.iter().enumerate() {
            if m.shape() != shape {
                return Err(Error::Shape(format!(
                    "coordinate {j} has shape {:?}, expected {:?}",
                    m.shape(),
                    shape
                )));
            }
            if !mat::all_finite(m) {
                return Err(Error::Invalid(format!(
                    "coordinate {j} contains a non-finite entry"
                )));
            }
        }
        Ok(Self { mats })
    }

    pub fn zeros(g: usize, d: usize, e: usize) -> Self {
        Self {
            mats: (0..g).map(|_| mat::zeros(d, e)).collect(),
        }
    }

    /// Level-one tuple from complex scalars.
    pub fn scalars(vals: &[C64]) -> Result<Self> {
        Self::new(
            vals.iter()
                .map(|&z| CMatrix::from_element(1, 1, z))
                .collect(),
        )
    }

    pub fn g(&self) -> usize {
        self.mats.len()
    }

    pub fn rows(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.mats[0].ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Common size of a square tuple.
    pub fn level(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::Shape(format!(
                "expected a square tuple, got {}x{}",
                self.rows(),
                self.cols()
            )))
        }
    }

    pub fn mat(&self, j: usize) -> &CMatrix {
        &self.mats[j]
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMatrix> {
        self.mats.iter()
    }

    pub fn map<F: FnMut(&CMatrix) -> CMatrix>(&self, f: F) -> Self {
        Self {
            mats: self.mats.iter().map(f).collect(),
        }
    }

    /// Coordinatewise adjoint (the tuple of `A_j*`).
    pub fn adjoint(&self) -> Self {
        self.map(|m| m.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|m| m * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip<F: Fn(&CMatrix, &CMatrix) -> CMatrix>(&self, other: &Self, f: F) -> Result<Self> {
        if self.g() != other.g() || self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::Shape("tuple shapes differ".into()));
        }
        Ok(Self {
            mats: self
                .mats
                .iter()
                .zip(other.mats.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    /// Largest coordinatewise operator norm; the distance used for tuple
    /// residuals throughout the crate.
    pub fn max_coordinate_norm(&self) -> f64 {
        self.mats
            .iter()
            .map(mat::operator_norm)
            .fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_coordinate_norm())
    }

    /// Coordinatewise direct sum `X (+) Y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.g() != other.g() {
            return Err(Error::Shape("coordinate counts differ".into()));
        }
        let mats = self
            .mats
            .iter()
            .zip(other.mats.iter())
            .map(|(a, b)| {
                let mut m = mat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
                m.view_mut((0, 0), a.shape()).copy_from(a);
                m.view_mut(a.shape(), b.shape()).copy_from(b);
                m
            })
            .collect();
        Ok(Self { mats })
    }

    /// Simultaneous similarity `S^{-1} X S` of a square tuple.
    pub fn conjugate(&self, s: &CMatrix, s_inv: &CMatrix) -> Self {
        self.map(|m| s_inv * m * s)
    }

    /// Coordinates stacked vertically into a `(g d) x e` matrix.
    pub fn stack_rows(&self) -> CMatrix {
        let (d, e) = (self.rows(), self.cols());
        let mut m = mat::zeros(self.g() * d, e);
        for (j, a) in self.mats.iter().enumerate() {
            m.view_mut((j * d, 0), (d, e)).copy_from(a);
        }
        m
    }

    /// Coordinates side by side into a `d x (g e)` matrix.
    pub fn stack_cols(&self) -> CMatrix {
        let (d, e) = (self.rows(), self.cols());
        let mut m = mat::zeros(d, self.g() * e);
        for (j, a) in self.mats.iter().enumerate() {
            m.view_mut((0, j * e), (d, e)).copy_from(a);
        }
        m
    }

    /// Shifts a square tuple by a level-one tuple: `X_j + b_j I_n`.
    pub fn shift_by_scalars(&self, b: &MatrixTuple) -> Result<Self> {
        if b.g() != self.g() || b.rows() != 1 || b.cols() != 1 {
            return Err(Error::Shape("shift must be a level-one tuple".into()));
        }
        let n = self.level()?;
        self.mats
            .iter()
            .zip(b.mats.iter())
            .map(|(x, s)| Ok(x + mat::identity(n) * s[(0, 0)]))
            .collect::<Result<Vec<_>>>()
            .map(|mats| Self { mats })
    }
}

/// Evaluation of the homogeneous pencil: `sum_j kron(A_j, X_j)`.
///
/// `A` may be rectangular `d x e`; the evaluation point `X` must be square of
/// some level `n` and the result has shape `dn x en`.
pub fn lambda_eval(a: &MatrixTuple, x: &MatrixTuple) -> Result<CMatrix> {
    if a.g() != x.g() {
        return Err(Error::Shape(format!(
            "coefficient tuple has {} coordinates, point has {}",
            a.g(),
            x.g()
        )));
    }
    let n = x.level()?;
    let mut acc = mat::zeros(a.rows() * n, a.cols() * n);
    for (aj, xj) in a.iter().zip(x.iter()) {
        acc += kron(aj, xj);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{cr, from_real_rows};

    #[test]
    fn lambda_eval_row_ball_scalars() {
        let e = MatrixTuple::new(vec![
            from_real_rows(&[&[1.0, 0.0]]),
            from_real_rows(&[&[0.0, 1.0]]),
        ])
        .unwrap();
        let x = MatrixTuple::scalars(&[cr(0.6), cr(0.8)]).unwrap();
        let v = lambda_eval(&e, &x).unwrap();
        assert_eq!(v.shape(), (1, 2));
        assert!((v[(0, 0)].re - 0.6).abs() < 1e-15);
        assert!((v[(0, 1)].re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn lambda_eval_zero_point() {
        let a = MatrixTuple::new(vec![from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]])]).unwrap();
        let x = MatrixTuple::zeros(1, 3, 3);
        let v = lambda_eval(&a, &x).unwrap();
        assert_eq!(v, mat::zeros(6, 6));
    }

    #[test]
    fn lambda_eval_nilpotent_table_example() {
        // Xi_1 = [[0,1],[0,0]], Xi_2 = 0 at a scalar point (a, b).
        let xi = MatrixTuple::new(vec![
            from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
            mat::zeros(2, 2),
        ])
        .unwrap();
        let x = MatrixTuple::scalars(&[cr(0.3), cr(0.7)]).unwrap();
        let v = lambda_eval(&xi, &x).unwrap();
        let mut expect = mat::zeros(2, 2);
        expect[(0, 1)] = cr(0.3);
        assert!(mat::frobenius(&(v - expect)) < 1e-15);
    }

    #[test]
    fn lambda_eval_rejects_bad_shapes() {
        let a = MatrixTuple::zeros(2, 2, 2);
        let x = MatrixTuple::zeros(1, 2, 2);
        assert!(lambda_eval(&a, &x).is_err());
        let x = MatrixTuple::zeros(2, 2, 3);
        assert!(lambda_eval(&a, &x).is_err());
    }

    #[test]
    fn tuple_validation() {
        assert!(MatrixTuple::new(vec![]).is_err());
        assert!(MatrixTuple::new(vec![mat::zeros(1, 2), mat::zeros(2, 1)]).is_err());
        let nan = CMatrix::from_element(1, 1, c(f64::NAN, 0.0));
        assert!(MatrixTuple::new(vec![nan]).is_err());
    }

    #[test]
    fn direct_sum_shapes() {
        let x = MatrixTuple::zeros(2, 2, 2);
        let y = MatrixTuple::zeros(2, 3, 3);
        let s = x.direct_sum(&y).unwrap();
        assert_eq!((s.rows(), s.cols()), (5, 5));
    }
}
