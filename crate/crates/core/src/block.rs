//! Parametrization of density matrices on `ℂⁿ ⊗ ℂᵐ`.
//!
//! The state is treated as an `n`×`n` grid of `m`×`m` blocks. Scalar mixing
//! vectors become block vectors `|Z_j⟩ = (Z_{1,j}, …, Z_{j−1,j})`, scalar
//! angles become the positive matrix angles `Ξ_j = sqrt(Σ_k Z_{k,j}† Z_{k,j})`,
//! and the diagonal factor becomes `D(Λ₁|…|Λₙ)` with `Λ_k = U_k D_k U_k†`.

use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, diag_real, embed_top_left, ensure_unitary, expm_skew, hermitian_part, psd_spectrum,
    set_block, trace, ComplexMatrix, Spectrum, Tolerances,
};
use crate::state::{validate_simplex, DensityMatrix, TRACE_TOL};

/// Column block vector `(Z_{1,j}, …, Z_{j−1,j})` of `m`×`m` blocks.
pub type BlockVector = Vec<ComplexMatrix>;

/// How to obtain `A^j_{n,m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Closed form in terms of `Z̃_j`, `cos Ξ_j`, `sin Ξ_j`. Requires `Ξ_j`
    /// to be invertible.
    Closed,
    /// `exp(X_j)` of the full block generator.
    Exp,
}

/// Parameters of an `n ⊗ m` state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParams {
    n: usize,
    m: usize,
    lambdas: Vec<f64>,
    local_unitaries: Vec<ComplexMatrix>,
    blockvecs: Vec<BlockVector>,
}

impl BlockParams {
    /// `lambdas` has `n·m` entries, sliced consecutively into the `n`
    /// diagonal blocks; `local_unitaries[k]` rotates block `k`;
    /// `blockvecs[j - 2]` holds the `j − 1` blocks of `|Z_j⟩`.
    pub fn new(
        n: usize,
        m: usize,
        lambdas: Vec<f64>,
        local_unitaries: Vec<ComplexMatrix>,
        blockvecs: Vec<BlockVector>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::DimensionMismatch(format!(
                "factor dimensions must be positive, got {n}x{m}"
            )));
        }
        validate_simplex(&lambdas, n * m)?;
        check_unitaries(&local_unitaries, n, m, tol)?;
        if blockvecs.len() != n - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{n} block rows need {} block vectors, got {}",
                n - 1,
                blockvecs.len()
            )));
        }
        for (idx, zj) in blockvecs.iter().enumerate() {
            check_blockvec(zj, idx + 2, m)?;
        }
        Ok(Self {
            n,
            m,
            lambdas,
            local_unitaries,
            blockvecs,
        })
    }

    /// Parameters with every `U_k = I_m`.
    pub fn with_identity_unitaries(
        n: usize,
        m: usize,
        lambdas: Vec<f64>,
        blockvecs: Vec<BlockVector>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let us = vec![ComplexMatrix::identity(m, m); n];
        Self::new(n, m, lambdas, us, blockvecs, tol)
    }

    /// All-zero block vectors for an `n ⊗ m` system.
    pub fn zero_blockvecs(n: usize, m: usize) -> Vec<BlockVector> {
        (2..=n)
            .map(|j| vec![ComplexMatrix::zeros(m, m); j - 1])
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn local_unitaries(&self) -> &[ComplexMatrix] {
        &self.local_unitaries
    }

    pub fn blockvecs(&self) -> &[BlockVector] {
        &self.blockvecs
    }

    /// `|Z_j⟩` for `j ≥ 2`.
    pub fn z(&self, j: usize) -> &BlockVector {
        &self.blockvecs[j - 2]
    }
}

fn check_unitaries(us: &[ComplexMatrix], n: usize, m: usize, tol: &Tolerances) -> Result<()> {
    if us.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} local unitaries, got {}",
            us.len()
        )));
    }
    for u in us {
        if u.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "local unitary must be {m}x{m}, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        ensure_unitary(u, tol)?;
    }
    Ok(())
}

fn check_blockvec(zj: &[ComplexMatrix], j: usize, m: usize) -> Result<()> {
    if zj.len() != j - 1 {
        return Err(Error::DimensionMismatch(format!(
            "|Z_{j}> must have {} blocks, got {}",
            j - 1,
            zj.len()
        )));
    }
    block_size(zj).and_then(|size| {
        if size == m {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "blocks of |Z_{j}> must be {m}x{m}, got {size}x{size}"
            )))
        }
    })
}

/// Common size of a non-empty list of square blocks.
fn block_size(zj: &[ComplexMatrix]) -> Result<usize> {
    let first = zj
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty block vector".into()))?;
    let m = first.nrows();
    for z in zj {
        if z.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!(
                "blocks must all be {m}x{m}, found {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
    }
    Ok(m)
}

/// Spectrum of `Ξ_j²= Σ_k Z_{k,j}† Z_{k,j}` with the eigenvalues replaced by
/// those of `Ξ_j` itself.
fn angle_spectrum(zj: &[ComplexMatrix], tol: &Tolerances) -> Result<Spectrum> {
    let m = block_size(zj)?;
    let gram = zj
        .iter()
        .fold(ComplexMatrix::zeros(m, m), |acc, z| acc + z.adjoint() * z);
    let mut spectrum = psd_spectrum(&hermitian_part(&gram), tol)?;
    for x in spectrum.eigenvalues.iter_mut() {
        *x = x.sqrt();
    }
    Ok(spectrum)
}

/// Matrix angle `Ξ_j = sqrt(Σ_k Z_{k,j}† Z_{k,j})`.
pub fn block_angle(zj: &[ComplexMatrix], tol: &Tolerances) -> Result<ComplexMatrix> {
    Ok(hermitian_part(&angle_spectrum(zj, tol)?.reconstruct()))
}

fn ensure_invertible(spectrum: &Spectrum, tol: &Tolerances) -> Result<()> {
    let min_eig = spectrum.min();
    if min_eig <= tol.psd {
        return Err(Error::SingularAngle { min_eig });
    }
    Ok(())
}

/// `Z̃_{k,j} = Z_{k,j} Ξ_j⁻¹`, so that `Σ_k Z̃_{k,j}† Z̃_{k,j} = I`.
pub fn normalize_blocks(zj: &[ComplexMatrix], tol: &Tolerances) -> Result<BlockVector> {
    let spectrum = angle_spectrum(zj, tol)?;
    ensure_invertible(&spectrum, tol)?;
    let inv = spectrum.map_real(|x| 1.0 / x);
    Ok(zj.iter().map(|z| z * &inv).collect())
}

/// Block generator `X_j` on `ℂⁿ ⊗ ℂᵐ`: block `(k, j) = Z_{k,j}` and block
/// `(j, k) = −Z_{k,j}†` for `k < j`.
pub fn build_xj_block(zj: &[ComplexMatrix], n: usize, j: usize, m: usize) -> Result<ComplexMatrix> {
    if j < 2 || j > n {
        return Err(Error::DimensionMismatch(format!(
            "generator index j = {j} outside 2..={n}"
        )));
    }
    check_blockvec(zj, j, m)?;
    let mut x = ComplexMatrix::zeros(n * m, n * m);
    for (k, z) in zj.iter().enumerate() {
        set_block(&mut x, k, j - 1, z);
        set_block(&mut x, j - 1, k, &(-z.adjoint()));
    }
    Ok(x)
}

/// Closed form of the top-left `jm`×`jm` block of `exp(X_j)`:
///
/// ```text
/// (k, l) block, k, l < j:  δ_kl I − Z̃_k (I − C) Z̃_l†
/// (k, j) block:            Z̃_k S
/// (j, l) block:           −S Z̃_l†
/// (j, j) block:            C
/// ```
///
/// with `C = cos Ξ_j`, `S = sin Ξ_j`.
pub fn build_vjnm(
    zj: &[ComplexMatrix],
    j: usize,
    m: usize,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if j < 2 {
        return Err(Error::DimensionMismatch(format!(
            "generator index j = {j} < 2"
        )));
    }
    check_blockvec(zj, j, m)?;
    let spectrum = angle_spectrum(zj, tol)?;
    ensure_invertible(&spectrum, tol)?;
    // Z̃ S = Z sinc(Ξ) and Z̃ (I − C) Z̃† = Z [(1 − cos Ξ)/Ξ²] Z†, which stay
    // accurate when Ξ is close to singular.
    let cos = hermitian_part(&spectrum.map_real(f64::cos));
    let sinc_xi = hermitian_part(&spectrum.map_real(sinc));
    let versine = hermitian_part(&spectrum.map_real(|x| 0.5 * sinc(0.5 * x).powi(2)));

    let mut v = ComplexMatrix::identity(j * m, j * m);
    for k in 0..j - 1 {
        let left = &zj[k] * &versine;
        for (l, zl) in zj.iter().enumerate().take(j - 1) {
            let mut blk = -(&left * zl.adjoint());
            if k == l {
                blk += ComplexMatrix::identity(m, m);
            }
            set_block(&mut v, k, l, &blk);
        }
        let top = &zj[k] * &sinc_xi;
        set_block(&mut v, j - 1, k, &(-top.adjoint()));
        set_block(&mut v, k, j - 1, &top);
    }
    set_block(&mut v, j - 1, j - 1, &cos);
    Ok(v)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `A^j_{n,m}`: `V^j_{n,m}` in the top-left corner, `I_m` on the remaining
/// `n − j` diagonal blocks.
pub fn build_ajnm(
    zj: &[ComplexMatrix],
    n: usize,
    j: usize,
    m: usize,
    method: Method,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if j < 2 || j > n {
        return Err(Error::DimensionMismatch(format!(
            "generator index j = {j} outside 2..={n}"
        )));
    }
    match method {
        Method::Closed => Ok(embed_top_left(&build_vjnm(zj, j, m, tol)?, n * m)),
        Method::Exp => expm_skew(&build_xj_block(zj, n, j, m)?, tol),
    }
}

/// Closed form when `Ξ_j` is invertible, exponential otherwise.
pub fn build_ajnm_auto(
    zj: &[ComplexMatrix],
    n: usize,
    j: usize,
    m: usize,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    match build_ajnm(zj, n, j, m, Method::Closed, tol) {
        Err(Error::SingularAngle { .. }) => build_ajnm(zj, n, j, m, Method::Exp, tol),
        other => other,
    }
}

/// Block-diagonal core `D(Λ₁|…|Λₙ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonalCore {
    blocks: Vec<ComplexMatrix>,
}

impl BlockDiagonalCore {
    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        block_diag(&self.blocks)
    }
}

/// `Λ_k = U_k diag(λ_{(k−1)m+1}, …, λ_{km}) U_k†` for `k = 1..=n`.
pub fn build_core(
    lambdas: &[f64],
    local_unitaries: &[ComplexMatrix],
    n: usize,
    m: usize,
    tol: &Tolerances,
) -> Result<BlockDiagonalCore> {
    validate_simplex(lambdas, n * m)?;
    check_unitaries(local_unitaries, n, m, tol)?;
    let blocks: Vec<ComplexMatrix> = local_unitaries
        .iter()
        .zip(lambdas.chunks(m))
        .map(|(u, slice)| hermitian_part(&(u * diag_real(slice) * u.adjoint())))
        .collect();
    let total: f64 = blocks.iter().map(|b| trace(b).re).sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::BadNormalization { trace: total });
    }
    Ok(BlockDiagonalCore { blocks })
}

/// The unitary `Aⁿ ⋯ A²`, each factor built with `method` (or automatically
/// when `method` is `None`).
pub fn chain_unitary_block(
    p: &BlockParams,
    method: Option<Method>,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let (n, m) = (p.n, p.m);
    let mut u = ComplexMatrix::identity(n * m, n * m);
    for j in (2..=n).rev() {
        let a = match method {
            Some(method) => build_ajnm(p.z(j), n, j, m, method, tol)?,
            None => build_ajnm_auto(p.z(j), n, j, m, tol)?,
        };
        u *= a;
    }
    Ok(u)
}

/// `ρ = Aⁿ ⋯ A² D(Λ₁|…|Λₙ) A²† ⋯ Aⁿ†`, closed-form factors where the angles
/// allow it.
pub fn assemble_rho_block(p: &BlockParams, tol: &Tolerances) -> Result<DensityMatrix> {
    assemble(p, None, tol)
}

/// Same as [`assemble_rho_block`] with every factor forced through `method`.
pub fn assemble_rho_block_with(
    p: &BlockParams,
    method: Method,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    assemble(p, Some(method), tol)
}

fn assemble(p: &BlockParams, method: Option<Method>, tol: &Tolerances) -> Result<DensityMatrix> {
    let core = build_core(&p.lambdas, &p.local_unitaries, p.n, p.m, tol)?;
    let u = chain_unitary_block(p, method, tol)?;
    let rho = hermitian_part(&(&u * core.to_matrix() * u.adjoint()));
    DensityMatrix::bipartite(rho, p.n, p.m, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{block, c, ginibre, haar_unitary, r, unitarity_residual, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn zero_blocks_have_zero_angle() {
        let z = vec![ComplexMatrix::zeros(3, 3); 2];
        assert!(block_angle(&z, &tol()).unwrap().norm() < 1e-15);
        assert!(matches!(
            normalize_blocks(&z, &tol()),
            Err(Error::SingularAngle { .. })
        ));
    }

    #[test]
    fn scaled_unitary_block() {
        let u = haar_unitary(3, 4);
        let theta = 0.8;
        let z = vec![u.scale(theta)];
        let xi = block_angle(&z, &tol()).unwrap();
        assert!((xi - ComplexMatrix::identity(3, 3).scale(theta)).norm() < 1e-12);
        let unit = normalize_blocks(&z, &tol()).unwrap();
        assert!((&unit[0] - &u).norm() < 1e-12);
    }

    #[test]
    fn angle_squares_to_gram() {
        let mut g = ChaCha8Rng::seed_from_u64(2);
        let z = vec![ginibre(&mut g, 2, 2), ginibre(&mut g, 2, 2)];
        let xi = block_angle(&z, &tol()).unwrap();
        let gram = z[0].adjoint() * &z[0] + z[1].adjoint() * &z[1];
        assert!((&xi * &xi - gram).norm() < 1e-10);
        let unit = normalize_blocks(&z, &tol()).unwrap();
        let sum = unit[0].adjoint() * &unit[0] + unit[1].adjoint() * &unit[1];
        assert!((sum - ComplexMatrix::identity(2, 2)).norm() < 1e-10);
    }

    #[test]
    fn rank_deficient_gram_is_singular() {
        let mut z = ComplexMatrix::zeros(2, 2);
        z[(0, 0)] = c(1.0, 1.0);
        let blocks = vec![z.clone(), z.scale(2.0)];
        assert!(matches!(
            normalize_blocks(&blocks, &tol()),
            Err(Error::SingularAngle { .. })
        ));
        assert!(matches!(
            build_vjnm(&blocks, 3, 2, &tol()),
            Err(Error::SingularAngle { .. })
        ));
        // the exponential path still works
        let a = build_ajnm(&blocks, 3, 3, 2, Method::Exp, &tol()).unwrap();
        assert!(unitarity_residual(&a) < 1e-12);
    }

    #[test]
    fn nearly_singular_angle_stays_unitary() {
        // smallest angle eigenvalue ~1e-8, above the singularity threshold
        let w = haar_unitary(2, 12);
        let z = &w * crate::linalg::diag_real(&[0.8, 1e-8]) * w.adjoint();
        let v = build_vjnm(std::slice::from_ref(&z), 2, 2, &tol()).unwrap();
        assert!(unitarity_residual(&v) < 1e-13);
        let a = build_ajnm(&[z], 2, 2, 2, Method::Exp, &tol()).unwrap();
        assert!((v - a).norm() < 1e-13);
    }

    #[test]
    fn generator_placement() {
        let theta = 0.9;
        let zb = ComplexMatrix::from_row_slice(2, 2, &[ZERO, r(theta), r(-theta), ZERO]);
        let x = build_xj_block(std::slice::from_ref(&zb), 2, 2, 2).unwrap();
        assert_eq!(block(&x, 0, 1, 2), zb);
        assert_eq!(block(&x, 1, 0, 2), -zb.adjoint());
        assert_eq!(block(&x, 0, 0, 2), ComplexMatrix::zeros(2, 2));
        assert_eq!(&x + x.adjoint(), ComplexMatrix::zeros(4, 4));
        let zero = build_xj_block(&[ComplexMatrix::zeros(2, 2)], 2, 2, 2).unwrap();
        assert_eq!(zero, ComplexMatrix::zeros(4, 4));
    }

    #[test]
    fn closed_form_matches_exponential() {
        let mut g = ChaCha8Rng::seed_from_u64(5);
        let z = vec![ginibre(&mut g, 2, 2), ginibre(&mut g, 2, 2)];
        let v = build_vjnm(&z, 3, 2, &tol()).unwrap();
        let e = expm_skew(&build_xj_block(&z, 3, 3, 2).unwrap(), &tol()).unwrap();
        assert!((v - e).norm() < 1e-10);
    }

    #[test]
    fn m1_reduces_to_single() {
        let z = [c(0.3, 0.2), c(-0.5, 0.7)];
        let blocks: Vec<ComplexMatrix> = z
            .iter()
            .map(|w| ComplexMatrix::from_element(1, 1, *w))
            .collect();
        let v_block = build_vjnm(&blocks, 3, 1, &tol()).unwrap();
        let v_single = crate::single::build_vjn(&z, 3).unwrap();
        assert!((v_block - v_single).norm() < 1e-14);
    }

    #[test]
    fn ajnm_embedding() {
        let zeros = vec![ComplexMatrix::zeros(2, 2); 1];
        for method in [Method::Closed, Method::Exp] {
            let res = build_ajnm(&zeros, 3, 2, 2, method, &tol());
            if method == Method::Closed {
                assert!(matches!(res, Err(Error::SingularAngle { .. })));
            } else {
                assert!((res.unwrap() - ComplexMatrix::identity(6, 6)).norm() < 1e-15);
            }
        }
        assert!(
            (build_ajnm_auto(&zeros, 3, 2, 2, &tol()).unwrap() - ComplexMatrix::identity(6, 6))
                .norm()
                < 1e-15
        );

        let mut g = ChaCha8Rng::seed_from_u64(8);
        let z = vec![ginibre(&mut g, 2, 2), ginibre(&mut g, 2, 2)];
        let a = build_ajnm(&z, 3, 3, 2, Method::Closed, &tol()).unwrap();
        let v = build_vjnm(&z, 3, 2, &tol()).unwrap();
        assert_eq!(a, v);
        let padded = build_ajnm(&z[..1], 3, 2, 2, Method::Closed, &tol()).unwrap();
        assert_eq!(block(&padded, 2, 2, 2), ComplexMatrix::identity(2, 2));
    }

    #[test]
    fn core_slices() {
        let lambdas = [0.1, 0.2, 0.3, 0.4];
        let us = vec![ComplexMatrix::identity(2, 2); 2];
        let core = build_core(&lambdas, &us, 2, 2, &tol()).unwrap();
        assert_eq!(core.blocks()[0], diag_real(&[0.1, 0.2]));
        assert_eq!(core.blocks()[1], diag_real(&[0.3, 0.4]));

        let us1 = vec![ComplexMatrix::from_element(1, 1, c(0.6, 0.8)); 3];
        let core = build_core(&[0.5, 0.3, 0.2], &us1, 3, 1, &tol()).unwrap();
        assert!((core.blocks()[1][(0, 0)] - r(0.3)).norm() < 1e-15);

        let bad = vec![ComplexMatrix::identity(2, 2).scale(2.0); 2];
        assert!(matches!(
            build_core(&lambdas, &bad, 2, 2, &tol()),
            Err(Error::NotUnitary { .. })
        ));
        assert!(build_core(&[0.5, 0.5, 0.5, 0.5], &us, 2, 2, &tol()).is_err());
    }

    #[test]
    fn zero_chain_is_block_diagonal() {
        let lambdas = vec![0.1, 0.2, 0.3, 0.15, 0.15, 0.1];
        let us = vec![haar_unitary(2, 1), haar_unitary(2, 2), haar_unitary(2, 3)];
        let p = BlockParams::new(
            3,
            2,
            lambdas.clone(),
            us.clone(),
            BlockParams::zero_blockvecs(3, 2),
            &tol(),
        )
        .unwrap();
        let rho = assemble_rho_block(&p, &tol()).unwrap();
        let core = build_core(&lambdas, &us, 3, 2, &tol()).unwrap();
        assert!((rho.matrix() - core.to_matrix()).norm() < 1e-15);
        assert_eq!(rho.factorization(), Some((3, 2)));
    }

    #[test]
    fn params_validation() {
        let t = tol();
        let lam = vec![0.25; 4];
        assert!(BlockParams::with_identity_unitaries(2, 2, lam.clone(), vec![], &t).is_err());
        assert!(BlockParams::with_identity_unitaries(
            2,
            2,
            lam.clone(),
            vec![vec![ComplexMatrix::zeros(3, 3)]],
            &t
        )
        .is_err());
        assert!(BlockParams::with_identity_unitaries(
            2,
            2,
            lam,
            BlockParams::zero_blockvecs(2, 2),
            &t
        )
        .is_ok());
    }
}
