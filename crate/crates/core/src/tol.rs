use crate::error::{Error, Result};

/// Thresholds shared by every spectral decision in the crate.
///
/// `psd_tol` is the eigenvalue band used to call a hermitian matrix
/// singular rather than definite, `rank_tol` the singular value cutoff for
/// rank and kernel decisions, and `residual_tol` the acceptance level for
/// least-squares fits of algebraic identities.
///
/// All thresholds are absolute.  Every pencil handled here is monic (the
/// constant term is the identity), which fixes the scale and keeps boundary
/// classification deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceProfile {
    pub psd_tol: f64,
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            psd_tol: 1e-10,
            rank_tol: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

impl ToleranceProfile {
    pub fn new(psd_tol: f64, rank_tol: f64, residual_tol: f64) -> Result<Self> {
        for (name, t) in [
            ("psd_tol", psd_tol),
            ("rank_tol", rank_tol),
            ("residual_tol", residual_tol),
        ] {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Invalid(format!("{name} must be finite and >= 0")));
            }
        }
        Ok(Self {
            psd_tol,
            rank_tol,
            residual_tol,
        })
    }

    pub fn with_psd_tol(mut self, t: f64) -> Self {
        self.psd_tol = t;
        self
    }

    pub fn with_rank_tol(mut self, t: f64) -> Self {
        self.rank_tol = t;
        self
    }

    pub fn with_residual_tol(mut self, t: f64) -> Self {
        self.residual_tol = t;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let tol = ToleranceProfile::default();
        assert_eq!(tol.psd_tol, 1e-10);
        assert_eq!(tol.rank_tol, 1e-10);
        assert_eq!(tol.residual_tol, 1e-8);
    }

    #[test]
    fn rejects_negative() {
        assert!(ToleranceProfile::new(-1.0, 0.0, 0.0).is_err());
        assert!(ToleranceProfile::new(0.0, f64::NAN, 0.0).is_err());
    }
}
