//! Partial transposition, the PPT test, and structural detectors for
//! bipartite states.
//!
//! PPT is a necessary condition for separability and a sufficient one on
//! `2 ⊗ 2` and `2 ⊗ 3`; elsewhere verdicts here only say "PPT".

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::linalg::{block, herm_eig, hermitian_part, ComplexMatrix, Tolerances};
use crate::state::{validate_simplex, DensityMatrix};

/// Width of the band around zero in which a minimal PT eigenvalue is reported
/// as a boundary case.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Relative block-difference norm below which two blocks count as equal.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Tensor factor to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    First,
    Second,
}

impl Subsystem {
    pub fn as_str(self) -> &'static str {
        match self {
            Subsystem::First => "first",
            Subsystem::Second => "second",
        }
    }
}

/// Outcome of the Peres test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport {
    pub is_ppt: bool,
    pub min_pt_eig: f64,
    pub subsystem: Subsystem,
}

impl PptReport {
    /// `true` when the minimal PT eigenvalue sits within [`BOUNDARY_BAND`] of zero.
    pub fn on_boundary(&self) -> bool {
        self.min_pt_eig.abs() < BOUNDARY_BAND
    }

    /// `"ppt"`, `"npt"` or `"boundary"`.
    pub fn verdict(&self) -> &'static str {
        if self.on_boundary() {
            "boundary"
        } else if self.is_ppt {
            "ppt"
        } else {
            "npt"
        }
    }
}

/// Partial transpose of an `nm`×`nm` matrix viewed as `n`×`n` blocks of size `m`.
///
/// `Second` maps `Σ |i⟩⟨j| ⊗ ρ_ij` to `Σ |i⟩⟨j| ⊗ ρ_ijᵀ`; `First` maps it to
/// `Σ |j⟩⟨i| ⊗ ρ_ij`.
pub fn partial_transpose_matrix(
    mat: &ComplexMatrix,
    n: usize,
    m: usize,
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    if mat.nrows() != n * m || mat.ncols() != n * m {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix does not split as {n}x{m}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            for a in 0..m {
                for b in 0..m {
                    let value = mat[(i * m + a, j * m + b)];
                    match subsystem {
                        Subsystem::Second => out[(i * m + b, j * m + a)] = value,
                        Subsystem::First => out[(j * m + a, i * m + b)] = value,
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> Result<ComplexMatrix> {
    let (n, m) = rho.factorization().ok_or(Error::MissingFactorization)?;
    partial_transpose_matrix(rho.matrix(), n, m, subsystem)
}

/// Peres test on the second subsystem.
pub fn ppt_check(rho: &DensityMatrix, tol: &Tolerances) -> Result<PptReport> {
    ppt_check_on(rho, Subsystem::Second, tol)
}

pub fn ppt_check_on(
    rho: &DensityMatrix,
    subsystem: Subsystem,
    tol: &Tolerances,
) -> Result<PptReport> {
    let pt = partial_transpose(rho, subsystem)?;
    let min_pt_eig = herm_eig(&hermitian_part(&pt), tol)?.min();
    Ok(PptReport {
        is_ppt: min_pt_eig >= -tol.psd,
        min_pt_eig,
        subsystem,
    })
}

fn check_circulant_inputs(p: &[f64; 4], alpha: f64, beta: f64) -> Result<()> {
    validate_simplex(p, 4)?;
    for angle in [alpha, beta] {
        if !(0.0..=FRAC_PI_2).contains(&angle) {
            return Err(Error::AngleOutOfRange { value: angle });
        }
    }
    Ok(())
}

/// Slacks of the two published inequalities for the circulant family
///
/// ```text
/// p₃c_β² + p₄s_β² − |p₁ − p₂| s_β c_β ≥ 0
/// p₁c_α² + p₂s_α² − |p₃ − p₄| s_α c_α ≥ 0
/// ```
pub fn circulant_margins(p: &[f64; 4], alpha: f64, beta: f64) -> Result<(f64, f64)> {
    check_circulant_inputs(p, alpha, beta)?;
    let [p1, p2, p3, p4] = *p;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let first = p3 * cb * cb + p4 * sb * sb - (p1 - p2).abs() * sb * cb;
    let second = p1 * ca * ca + p2 * sa * sa - (p3 - p4).abs() * sa * ca;
    Ok((first, second))
}

/// Both published circulant inequalities hold.
///
/// These compare a single diagonal entry of each `2`×`2` block of the
/// partial transpose with its off-diagonal entry. They coincide with the
/// exact test on the Bell-diagonal slice `α = β = π/4` and whenever
/// `p₁ = p₂` and `p₃ = p₄`, but not in general; see
/// [`circulant_min_pt_eig`] for the exact value.
pub fn circulant_conditions(p: &[f64; 4], alpha: f64, beta: f64) -> Result<bool> {
    let (first, second) = circulant_margins(p, alpha, beta)?;
    Ok(first >= 0.0 && second >= 0.0)
}

/// Closed-form minimal eigenvalue of the partial transpose of
/// [`crate::families::circulant_rho`].
///
/// The partial transpose is a direct sum of two real symmetric `2`×`2`
/// blocks on `{|00⟩, |11⟩}` and `{|01⟩, |10⟩}`; the value returned is the
/// smaller of their lower eigenvalues.
pub fn circulant_min_pt_eig(p: &[f64; 4], alpha: f64, beta: f64) -> Result<f64> {
    check_circulant_inputs(p, alpha, beta)?;
    let [p1, p2, p3, p4] = *p;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let lower = |a: f64, d: f64, b: f64| 0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let outer = lower(
        p2 * cb * cb + p1 * sb * sb,
        p2 * sb * sb + p1 * cb * cb,
        (p3 - p4) * sa * ca,
    );
    let inner = lower(
        p4 * ca * ca + p3 * sa * sa,
        p4 * sa * sa + p3 * ca * ca,
        (p1 - p2) * sb * cb,
    );
    Ok(outer.min(inner))
}

/// Exact PPT conditions for the circulant family.
pub fn circulant_conditions_exact(p: &[f64; 4], alpha: f64, beta: f64) -> Result<bool> {
    Ok(circulant_min_pt_eig(p, alpha, beta)? >= 0.0)
}

/// Block pattern of a `2 ⊗ m` state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    BlockDiagonal,
    BlockToeplitz,
    BlockHankel,
    None,
}

impl Structure {
    pub fn as_str(self) -> &'static str {
        match self {
            Structure::BlockDiagonal => "block_diagonal",
            Structure::BlockToeplitz => "block_toeplitz",
            Structure::BlockHankel => "block_hankel",
            Structure::None => "none",
        }
    }
}

/// Classifies a `2 ⊗ m` state as block diagonal (vanishing off-diagonal
/// blocks), block Toeplitz (equal diagonal blocks) or block Hankel (equal
/// off-diagonal blocks), in that order of precedence.
pub fn detect_structure(rho: &DensityMatrix, _tol: &Tolerances) -> Result<Structure> {
    let (n, m) = rho.factorization().ok_or(Error::MissingFactorization)?;
    if n != 2 {
        return Err(Error::UnsupportedShape(format!(
            "structure detection needs n = 2, got n = {n}"
        )));
    }
    let mat = rho.matrix();
    let scale = mat.norm().max(f64::MIN_POSITIVE);
    let (a, b) = (block(mat, 0, 0, m), block(mat, 0, 1, m));
    let (bc, d) = (block(mat, 1, 0, m), block(mat, 1, 1, m));
    let small = |x: ComplexMatrix| x.norm() / scale <= STRUCTURE_TOL;

    Ok(if small(b.clone()) {
        Structure::BlockDiagonal
    } else if small(&a - &d) {
        Structure::BlockToeplitz
    } else if small(&b - &bc) {
        Structure::BlockHankel
    } else {
        Structure::None
    })
}
