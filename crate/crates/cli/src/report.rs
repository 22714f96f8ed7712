//! `analyze`: spectrum, purity, rank, PPT verdict and block structure.

use densparam::entanglement::partial_transpose_matrix;
use densparam::linalg::{ensure_finite, herm_eig, hermitian_part, hermiticity_deviation, trace};
use densparam::{detect_structure, ComplexMatrix, DensityMatrix, Error, Subsystem, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptSummary {
    pub is_ppt: bool,
    pub min_pt_eig: f64,
    pub subsystem: String,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub dims: (usize, usize),
    pub valid_state: bool,
    pub diagnostics: Vec<String>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    pub purity: f64,
    pub rank: usize,
    pub ppt: PptSummary,
    /// Only for `n = 2` states.
    pub structure: Option<String>,
}

/// Builds the report from a raw matrix. Quantities are evaluated on the
/// Hermitian part; `valid_state` records whether the matrix passes as a state.
pub fn analyze_matrix(
    mat: &ComplexMatrix,
    n: usize,
    m: usize,
    tol: &Tolerances,
) -> CliResult<StateReport> {
    if n == 0 || m == 0 || mat.nrows() != n * m || !mat.is_square() {
        return Err(CliError::input(format!(
            "dims: a {}x{} matrix cannot carry an {n}x{m} factorization",
            mat.nrows(),
            mat.ncols()
        )));
    }
    ensure_finite(mat).map_err(|e| CliError::input(format!("matrix: {e}")))?;
    let numerical = |e: Error| CliError::from_lib("", e);

    let h = hermitian_part(mat);
    let eigenvalues = herm_eig(&h, tol).map_err(numerical)?.eigenvalues;
    let pt = partial_transpose_matrix(&h, n, m, Subsystem::Second).map_err(numerical)?;
    let min_pt_eig = herm_eig(&hermitian_part(&pt), tol)
        .map_err(numerical)?
        .min();
    let report = densparam::PptReport {
        is_ppt: min_pt_eig >= -tol.psd,
        min_pt_eig,
        subsystem: Subsystem::Second,
    };

    let mut diagnostics = Vec::new();
    let deviation = hermiticity_deviation(mat);
    if deviation > tol.herm {
        diagnostics.push(format!("Hermiticity deviation {deviation:e}"));
    }
    let state = match DensityMatrix::bipartite(mat.clone(), n, m, tol) {
        Ok(rho) => Some(rho),
        Err(Error::ConvergenceFailure) => return Err(numerical(Error::ConvergenceFailure)),
        Err(e) => {
            diagnostics.push(e.to_string());
            None
        }
    };
    let structure = match (&state, n) {
        (Some(rho), 2) => Some(
            detect_structure(rho, tol)
                .map_err(numerical)?
                .as_str()
                .to_string(),
        ),
        _ => None,
    };

    Ok(StateReport {
        dims: (n, m),
        valid_state: state.is_some(),
        diagnostics,
        rank: eigenvalues.iter().filter(|x| **x > tol.psd).count(),
        eigenvalues,
        trace: trace(&h).re,
        purity: h.iter().map(|z| z.norm_sqr()).sum(),
        ppt: PptSummary {
            is_ppt: report.is_ppt,
            min_pt_eig,
            subsystem: report.subsystem.as_str().to_string(),
            verdict: report.verdict().to_string(),
        },
        structure,
    })
}
