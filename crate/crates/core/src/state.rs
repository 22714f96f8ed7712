//! Validated density matrices.

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_hermitian, herm_eig, hermitian_part, trace, ComplexMatrix, Tolerances,
};

/// Admissible deviation of `Tr ρ` from one.
pub const TRACE_TOL: f64 = 1e-10;

/// Admissible deviation of a probability vector's sum from one.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Checks that `p` is a probability vector of length `len`.
pub fn validate_simplex(p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::InvalidSimplex(format!(
            "expected {len} entries, got {}",
            p.len()
        )));
    }
    if let Some((i, x)) = p.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Error::InvalidSimplex(format!(
            "entry {i} is not finite ({x})"
        )));
    }
    if let Some((i, x)) = p.iter().enumerate().find(|(_, x)| **x < 0.0) {
        return Err(Error::InvalidSimplex(format!(
            "entry {i} is negative ({x})"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidSimplex(format!(
            "entries sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// A Hermitian, positive semidefinite, trace-one matrix, optionally tagged
/// with the bipartite factorization `nm = n·m` it lives on.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    factorization: Option<(usize, usize)>,
}

impl DensityMatrix {
    /// Validates `mat` as a state without a tensor-product structure.
    pub fn new(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        ensure_finite(&mat)?;
        ensure_hermitian(&mat, tol)?;
        let t = trace(&mat).re;
        if (t - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadNormalization { trace: t });
        }
        let min_eig = herm_eig(&mat, tol)?.min();
        if min_eig < -tol.psd {
            return Err(Error::NotPsd { min_eig });
        }
        Ok(Self {
            mat: hermitian_part(&mat),
            factorization: None,
        })
    }

    /// Validates `mat` as a state on `ℂⁿ ⊗ ℂᵐ`.
    pub fn bipartite(mat: ComplexMatrix, n: usize, m: usize, tol: &Tolerances) -> Result<Self> {
        if n == 0 || m == 0 || mat.nrows() != n * m {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot carry a {n}x{m} factorization",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self::new(mat, tol)?.with_factorization(n, m))
    }

    fn with_factorization(mut self, n: usize, m: usize) -> Self {
        self.factorization = Some((n, m));
        self
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn factorization(&self) -> Option<(usize, usize)> {
        self.factorization
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        Ok(herm_eig(&self.mat, tol)?.eigenvalues)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Number of eigenvalues above `tol.psd`.
    pub fn rank(&self, tol: &Tolerances) -> Result<usize> {
        Ok(self
            .eigenvalues(tol)?
            .into_iter()
            .filter(|x| *x > tol.psd)
            .count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, r};

    #[test]
    fn simplex_validation() {
        assert!(validate_simplex(&[0.5, 0.5], 2).is_ok());
        assert!(validate_simplex(&[0.5, 0.4], 2).is_err());
        assert!(validate_simplex(&[1.2, -0.2], 2).is_err());
        assert!(validate_simplex(&[1.0], 2).is_err());
        assert!(validate_simplex(&[f64::NAN, 1.0], 2).is_err());
    }

    #[test]
    fn accepts_mixed_state() {
        let tol = Tolerances::default();
        let rho = DensityMatrix::bipartite(diag_real(&[0.25; 4]), 2, 2, &tol).unwrap();
        assert_eq!(rho.factorization(), Some((2, 2)));
        assert!((rho.purity() - 0.25).abs() < 1e-15);
        assert_eq!(rho.rank(&tol).unwrap(), 4);
    }

    #[test]
    fn rejects_non_states() {
        let tol = Tolerances::default();
        assert!(matches!(
            DensityMatrix::new(diag_real(&[0.5, 0.4]), &tol),
            Err(Error::BadNormalization { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(diag_real(&[1.2, -0.2]), &tol),
            Err(Error::NotPsd { .. })
        ));
        let mut m = diag_real(&[0.5, 0.5]);
        m[(0, 1)] = r(0.1);
        assert!(matches!(
            DensityMatrix::new(m, &tol),
            Err(Error::NotHermitian { .. })
        ));
        assert!(DensityMatrix::bipartite(diag_real(&[0.5, 0.5]), 2, 2, &tol).is_err());
    }
}
