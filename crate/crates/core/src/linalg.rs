//! Dense complex linear-algebra kernel.
//!
//! Everything downstream works on [`ComplexMatrix`]. Matrix functions are
//! evaluated spectrally on Hermitian inputs, so their results are Hermitian
//! (or unitary, for the exponential) to working precision rather than only
//! up to a truncation error.

use nalgebra::{DMatrix, SymmetricEigen, QR, SVD};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense complex matrix, row/column indexed from zero.
pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Numerical tolerances shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Hermiticity deviation `‖M − M†‖ / ‖M‖`.
    pub herm: f64,
    /// Most negative eigenvalue still accepted as positive semidefinite.
    pub psd: f64,
    /// Admissible `‖U†U − I‖`.
    pub unitary: f64,
    /// Admissible eigendecomposition reconstruction residual.
    pub recon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-12,
            psd: 1e-10,
            unitary: 1e-10,
            recon: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn new(herm: f64, psd: f64, unitary: f64, recon: f64) -> Result<Self> {
        let tol = Self {
            herm,
            psd,
            unitary,
            recon,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("tol_herm", self.herm),
            ("tol_psd", self.psd),
            ("tol_unitary", self.unitary),
            ("tol_recon", self.recon),
        ] {
            if !(value > 0.0 && value < 1e-6) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    min: 0.0,
                    max: 1e-6,
                });
            }
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V diag(f(λ)) V†` for a real function of the eigenvalues.
    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map(|x| r(f(x)))
    }

    /// `V diag(f(λ)) V†` for a complex function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fk = f(lambda);
            for row in 0..scaled.nrows() {
                scaled[(row, k)] *= fk;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_real(|x| x)
    }
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Relative Hermiticity deviation `‖M − M†‖_F / ‖M‖_F` (zero for the zero matrix).
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / norm
}

/// `‖U†U − I‖_F`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - ComplexMatrix::identity(n, n)).norm()
}

pub fn ensure_unitary(u: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    ensure_square(u)?;
    let residual = unitarity_residual(u);
    if residual > tol.unitary {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

pub fn ensure_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let deviation = hermiticity_deviation(m);
    if deviation > tol.herm {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Real diagonal matrix.
pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { r(values[i]) } else { ZERO })
}

/// Copy of the `size`×`size` block at block coordinates (`bi`, `bj`).
pub fn block(m: &ComplexMatrix, bi: usize, bj: usize, size: usize) -> ComplexMatrix {
    m.view((bi * size, bj * size), (size, size)).into_owned()
}

pub fn set_block(m: &mut ComplexMatrix, bi: usize, bj: usize, value: &ComplexMatrix) {
    let (h, w) = value.shape();
    m.view_mut((bi * h, bj * w), (h, w)).copy_from(value);
}

/// Block-diagonal matrix from square blocks of possibly different sizes.
pub fn block_diag(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let dim: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

/// Place `v` in the top-left corner of a `dim`×`dim` identity.
pub fn embed_top_left(v: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(dim, dim);
    out.view_mut((0, 0), v.shape()).copy_from(v);
    out
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<Spectrum> {
    ensure_hermitian(m, tol)?;
    let n = m.nrows();
    let h = hermitian_part(m);
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 10_000 * n)
        .ok_or(Error::ConvergenceFailure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);

    let spectrum = Spectrum {
        eigenvalues,
        eigenvectors,
    };
    if !spectrum.eigenvalues.iter().all(|x| x.is_finite()) {
        return Err(Error::ConvergenceFailure);
    }
    let residual = (spectrum.reconstruct() - &h).norm();
    if residual > tol.recon * h.norm().max(1.0) {
        return Err(Error::ConvergenceFailure);
    }
    Ok(spectrum)
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(m: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(herm_eig(m, tol)?.eigenvalues)
}

/// `exp(X)` for skew-Hermitian `X`, through the spectrum of the Hermitian `iX`.
pub fn expm_skew(x: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    ensure_square(x)?;
    ensure_finite(x)?;
    let norm = x.norm();
    if norm > 0.0 {
        let deviation = (x + x.adjoint()).norm() / norm;
        if deviation > tol.herm {
            return Err(Error::NotSkewHermitian { deviation });
        }
    }
    // X = -iH with H = iX Hermitian, so exp(X) = V diag(e^{-iλ}) V†.
    let h = x.map(|z| z * I);
    let spectrum = herm_eig(&hermitian_part(&h), tol)?;
    Ok(spectrum.map(|lambda| Complex64::from_polar(1.0, -lambda)))
}

/// Scalar functions available to [`matfun_psd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatFn {
    Cos,
    Sin,
    Sqrt,
}

impl MatFn {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            MatFn::Cos => x.cos(),
            MatFn::Sin => x.sin(),
            MatFn::Sqrt => x.sqrt(),
        }
    }
}

/// Spectrum of a PSD matrix with eigenvalues in `[-tol.psd, 0)` clipped to zero.
pub fn psd_spectrum(p: &ComplexMatrix, tol: &Tolerances) -> Result<Spectrum> {
    let mut spectrum = herm_eig(p, tol)?;
    let min_eig = spectrum.min();
    if min_eig < -tol.psd {
        return Err(Error::NotPsd { min_eig });
    }
    for x in spectrum.eigenvalues.iter_mut() {
        *x = x.max(0.0);
    }
    Ok(spectrum)
}

/// `f(P)` for Hermitian positive semidefinite `P`.
pub fn matfun_psd(p: &ComplexMatrix, f: MatFn, tol: &Tolerances) -> Result<ComplexMatrix> {
    let spectrum = psd_spectrum(p, tol)?;
    Ok(hermitian_part(&spectrum.map_real(|x| f.apply(x))))
}

/// Left polar decomposition `Z = P·U` with `P = sqrt(Z Z†)` and `U` unitary.
///
/// Built from the SVD `Z = W Σ V†` as `P = W Σ W†`, `U = W V†`. For singular
/// `Z` the singular vectors of the zero singular values pair an orthonormal
/// basis of the cokernel with one of the kernel, so `U` stays unitary.
pub fn polar(z: &ComplexMatrix, tol: &Tolerances) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = ensure_square(z)?;
    ensure_finite(z)?;
    let svd = SVD::try_new(z.clone(), true, true, f64::EPSILON, 10_000 * n)
        .ok_or(Error::ConvergenceFailure)?;
    let w = svd.u.ok_or(Error::ConvergenceFailure)?;
    let v_adj = svd.v_t.ok_or(Error::ConvergenceFailure)?;
    // Singular values from the SVD, eigenvectors from Z Z†: the SVD's own
    // vectors lose orthogonality on clustered spectra.
    let mut gram = herm_eig(&hermitian_part(&(z * z.adjoint())), tol)?;
    let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigma.sort_by(f64::total_cmp);
    gram.eigenvalues = sigma;
    let p = hermitian_part(&gram.reconstruct());
    let u = &w * &v_adj;
    ensure_unitary(&u, tol)?;
    Ok((p, u))
}

/// Smallest eigenvalue of a Hermitian matrix and whether it clears `-tol.psd`.
pub fn psd_check(m: &ComplexMatrix, tol: &Tolerances) -> Result<(bool, f64)> {
    let min_eig = herm_eig(m, tol)?.min();
    Ok((min_eig >= -tol.psd, min_eig))
}

/// Kronecker product; block (i, j) of the result is `A[i, j]·B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * scale, im * scale)
    })
}

/// Haar-distributed `m`×`m` unitary drawn from `rng`.
///
/// QR of a Ginibre matrix with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(rng: &mut R, m: usize) -> ComplexMatrix {
    assert!(m >= 1, "unitary dimension must be positive");
    let g = ginibre(rng, m, m);
    let qr = QR::new(g);
    let mut q = qr.q();
    let rmat = qr.r();
    for k in 0..m {
        let d = rmat[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..m {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// Haar-distributed `m`×`m` unitary, deterministic in `seed`.
pub fn haar_unitary(m: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with(&mut rng, m)
}
