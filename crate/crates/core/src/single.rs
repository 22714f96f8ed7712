//! Parametrization of `n`-level density matrices.
//!
//! A state is `ρ = Aⁿ ⋯ A² D(λ) A²† ⋯ Aⁿ†` where each `Aʲ = exp(Xʲ)` mixes
//! level `j` into the first `j − 1` levels along a complex vector
//! `z_j ∈ ℂ^{j−1}`. The diagonal factor `A¹` commutes with `D` and is not
//! stored.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    diag_real, embed_top_left, herm_eig, hermitian_part, ComplexMatrix, Tolerances, ONE, ZERO,
};
use crate::state::{validate_simplex, DensityMatrix};

/// Eigenvalues plus the chain of mixing vectors `z_2, …, z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParams {
    lambdas: Vec<f64>,
    zvecs: Vec<Vec<Complex64>>,
}

impl SingleParams {
    /// `lambdas` must be a probability vector sorted in descending order and
    /// `zvecs[j - 2]` must have length `j − 1` for `j = 2..=n`.
    ///
    /// The norms `θ_j = ‖z_j‖` are not wrapped; only `θ_j ∈ [0, π/2]` gives a
    /// non-redundant chart, but any value produces a valid state.
    pub fn new(lambdas: Vec<f64>, zvecs: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = lambdas.len();
        if n == 0 {
            return Err(Error::InvalidSimplex("no eigenvalues".into()));
        }
        validate_simplex(&lambdas, n)?;
        if lambdas.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSimplex(
                "eigenvalues must be sorted in descending order".into(),
            ));
        }
        if zvecs.len() != n - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{n} levels need {} mixing vectors, got {}",
                n - 1,
                zvecs.len()
            )));
        }
        for (idx, z) in zvecs.iter().enumerate() {
            let j = idx + 2;
            if z.len() != j - 1 {
                return Err(Error::DimensionMismatch(format!(
                    "z_{j} must have length {}, got {}",
                    j - 1,
                    z.len()
                )));
            }
            if !z.iter().all(|w| w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self { lambdas, zvecs })
    }

    /// Diagonal state `diag(λ)` (all mixing vectors zero).
    pub fn diagonal(lambdas: Vec<f64>) -> Result<Self> {
        let zvecs = (2..=lambdas.len().max(1))
            .map(|j| vec![ZERO; j - 1])
            .collect();
        Self::new(lambdas, zvecs)
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn zvecs(&self) -> &[Vec<Complex64>] {
        &self.zvecs
    }

    /// Mixing vector `z_j` for `j ≥ 2`.
    pub fn z(&self, j: usize) -> &[Complex64] {
        &self.zvecs[j - 2]
    }
}

fn vec_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
}

/// `1 − cos θ` without cancellation for small `θ`.
pub(crate) fn one_minus_cos(theta: f64) -> f64 {
    let h = (0.5 * theta).sin();
    2.0 * h * h
}

/// Skew-Hermitian generator `X_j`: `z_j` in column `j` above the diagonal and
/// `−⟨z_j|` in row `j`, zero elsewhere.
pub fn build_xj_single(z: &[Complex64], n: usize, j: usize) -> Result<ComplexMatrix> {
    if j < 2 || j > n {
        return Err(Error::DimensionMismatch(format!(
            "generator index j = {j} outside 2..={n}"
        )));
    }
    if z.len() != j - 1 {
        return Err(Error::DimensionMismatch(format!(
            "z_{j} must have length {}, got {}",
            j - 1,
            z.len()
        )));
    }
    let mut x = ComplexMatrix::zeros(n, n);
    for (k, w) in z.iter().enumerate() {
        x[(k, j - 1)] = *w;
        x[(j - 1, k)] = -w.conj();
    }
    Ok(x)
}

/// Closed form of the top-left `j`×`j` block of `exp(X_j)`:
///
/// ```text
/// ⎡ I − (1 − c)|z̃⟩⟨z̃|   s|z̃⟩ ⎤
/// ⎣ −s⟨z̃|                c    ⎦
/// ```
///
/// with `θ = ‖z‖`, `z̃ = z/θ`, `c = cos θ`, `s = sin θ`. The projector is
/// `|z̃⟩⟨z̃|_{kl} = z̃_k z̃̄_l`, which is what the exponential produces.
/// Returns `I_j` for `z = 0`.
pub fn build_vjn(z: &[Complex64], j: usize) -> Result<ComplexMatrix> {
    if j < 2 || z.len() != j - 1 {
        return Err(Error::DimensionMismatch(format!(
            "z_{j} must have length {}, got {}",
            j.saturating_sub(1),
            z.len()
        )));
    }
    let theta = vec_norm(z);
    let mut v = ComplexMatrix::identity(j, j);
    if theta == 0.0 {
        return Ok(v);
    }
    let unit: Vec<Complex64> = z.iter().map(|w| w / theta).collect();
    let (s, c) = theta.sin_cos();
    let omc = one_minus_cos(theta);
    for k in 0..j - 1 {
        for l in 0..j - 1 {
            v[(k, l)] -= unit[k] * unit[l].conj() * omc;
        }
        v[(k, j - 1)] = unit[k] * s;
        v[(j - 1, k)] = -unit[k].conj() * s;
    }
    v[(j - 1, j - 1)] = ONE * c;
    Ok(v)
}

/// `Aʲ_n`: `V^j_n` in the top-left corner of `I_n`.
pub fn build_ajn(z: &[Complex64], n: usize, j: usize) -> Result<ComplexMatrix> {
    if j > n {
        return Err(Error::DimensionMismatch(format!(
            "generator index j = {j} exceeds n = {n}"
        )));
    }
    Ok(embed_top_left(&build_vjn(z, j)?, n))
}

/// The unitary `Aⁿ ⋯ A²` of the chain.
pub fn chain_unitary(p: &SingleParams) -> Result<ComplexMatrix> {
    let n = p.n();
    let mut u = ComplexMatrix::identity(n, n);
    for j in (2..=n).rev() {
        u *= build_ajn(p.z(j), n, j)?;
    }
    Ok(u)
}

/// `ρ = Aⁿ ⋯ A² D(λ) A²† ⋯ Aⁿ†`, tagged as an `n ⊗ 1` state.
pub fn assemble_rho_single(p: &SingleParams, tol: &Tolerances) -> Result<DensityMatrix> {
    let u = chain_unitary(p)?;
    let rho = hermitian_part(&(&u * diag_real(p.lambdas()) * u.adjoint()));
    DensityMatrix::bipartite(rho, p.n(), 1, tol)
}

/// Number of real parameters of an `n`-level state, counted as `n − 1`
/// spheres `S^{2j−1}` plus `n − 1` angles and `n − 1` free eigenvalues.
pub fn param_count(n: usize) -> usize {
    assert!(n >= 1, "a system needs at least one level");
    let spheres: usize = (1..n).map(|j| 2 * j - 1).sum();
    spheres + 2 * (n - 1)
}

/// Qubit parameters reproducing the Bloch-ball matrix
///
/// ```text
/// ⎡ c²λ₁ + s²λ₂          sc·e^{iφ}(λ₁ − λ₂) ⎤
/// ⎣ sc·e^{−iφ}(λ₁ − λ₂)  c²λ₂ + s²λ₁        ⎦
/// ```
///
/// with `c = cos θ`, `s = sin θ`. The chain places `z` above the diagonal of
/// the generator, so the phase that yields `+e^{iφ}` in the corner is
/// `z = θ·e^{i(φ + π)}`.
pub fn bloch_qubit(lambda1: f64, lambda2: f64, theta: f64, phi: f64) -> Result<SingleParams> {
    let z = Complex64::from_polar(theta, phi + std::f64::consts::PI);
    SingleParams::new(vec![lambda1, lambda2], vec![vec![z]])
}

/// The Bloch-ball matrix above, evaluated directly.
pub fn bloch_qubit_matrix(lambda1: f64, lambda2: f64, theta: f64, phi: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let off = Complex64::from_polar(s * c * (lambda1 - lambda2), phi);
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            ONE * (c * c * lambda1 + s * s * lambda2),
            off,
            off.conj(),
            ONE * (c * c * lambda2 + s * s * lambda1),
        ],
    )
}

/// Eigenvector of the largest eigenvalue of `rho`, with the overall phase
/// fixed so that its first nonzero amplitude is real and positive.
pub fn dominant_state_vector(rho: &DensityMatrix, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let spectrum = herm_eig(rho.matrix(), tol)?;
    let last = spectrum.eigenvalues.len() - 1;
    let mut psi: Vec<Complex64> = spectrum.eigenvectors.column(last).iter().copied().collect();
    if let Some(lead) = psi.iter().copied().find(|a| a.norm() > 1e-12) {
        let phase = lead.conj() / lead.norm();
        psi.iter_mut().for_each(|a| *a *= phase);
    }
    Ok(psi)
}
