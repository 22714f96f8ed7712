//! Named state families on `2 ⊗ 2`, `2 ⊗ m` and `n ⊗ m`.
//!
//! Closed-form constructors come with a `*_params` companion giving the
//! inputs of the generic block assembly that yield the same state, so each
//! family can be built along two independent routes.
//!
//! Row ordering for `2 ⊗ 2` is `|00⟩, |01⟩, |10⟩, |11⟩`; `σ_x` and `σ_z`
//! are the standard Pauli matrices.

use std::f64::consts::FRAC_PI_4;

use crate::block::{assemble_rho_block, BlockParams, BlockVector};
use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, commutator, diag_real, ensure_unitary, herm_eig, hermitian_part, matfun_psd, polar,
    psd_spectrum, r, set_block, trace, ComplexMatrix, MatFn, Tolerances, ONE, ZERO,
};
use crate::state::{validate_simplex, DensityMatrix, TRACE_TOL};

/// Residual allowed in the commutation and intertwining preconditions.
pub const CONDITION_TOL: f64 = 1e-10;

/// Residual allowed in `‖Σ P_k² − I‖`.
pub const SPHERE_TOL: f64 = 1e-10;

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_z() -> ComplexMatrix {
    diag_real(&[1.0, -1.0])
}

fn real4(entries: [[f64; 4]; 4]) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| r(entries[i][j]))
}

/// Block vector `Z₂ = σ_x·diag(a, b)`: `Z̃ = σ_x` with matrix angle `diag(a, b)`.
fn sigma_x_angles(a: f64, b: f64) -> BlockVector {
    vec![sigma_x() * diag_real(&[a, b])]
}

fn two_qubit_params(lambdas: Vec<f64>, zj: BlockVector) -> Result<BlockParams> {
    BlockParams::with_identity_unitaries(2, 2, lambdas, vec![zj], &Tolerances::default())
}

/// Rank-one projector onto `sin α |00⟩ + cos α |11⟩`.
pub fn pure_p(alpha: f64) -> Result<DensityMatrix> {
    let (s, c) = alpha.sin_cos();
    let mat = real4([
        [s * s, 0.0, 0.0, s * c],
        [0.0; 4],
        [0.0; 4],
        [s * c, 0.0, 0.0, c * c],
    ]);
    DensityMatrix::bipartite(mat, 2, 2, &Tolerances::default())
}

/// `Λ₁ = 0`, `Λ₂ = ½(I − σ_z)`, `Z̃ = σ_x`, `Ξ = α I`.
pub fn pure_p_params(alpha: f64) -> Result<BlockParams> {
    two_qubit_params(vec![0.0, 0.0, 0.0, 1.0], sigma_x_angles(alpha, alpha))
}

fn isotropic_lambdas(p: f64) -> Vec<f64> {
    let q = (1.0 - p) / 4.0;
    vec![q, q, q, (1.0 + 3.0 * p) / 4.0]
}

fn check_isotropic_range(p: f64) -> Result<()> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: -1.0 / 3.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Isotropic two-qubit state, `−1/3 ≤ p ≤ 1`.
pub fn isotropic(p: f64) -> Result<DensityMatrix> {
    check_isotropic_range(p)?;
    let (a, b) = ((1.0 + p) / 4.0, (1.0 - p) / 4.0);
    let off = p / 2.0;
    let mat = real4([
        [a, 0.0, 0.0, off],
        [0.0, b, 0.0, 0.0],
        [0.0, 0.0, b, 0.0],
        [off, 0.0, 0.0, a],
    ]);
    DensityMatrix::bipartite(mat, 2, 2, &Tolerances::default())
}

/// `Λ₁ = ¼ diag(1 − p, 1 − p)`, `Λ₂ = ¼ diag(1 − p, 1 + 3p)`, `S = C = I/√2`,
/// `Z̃ = σ_x`.
pub fn isotropic_params(p: f64) -> Result<BlockParams> {
    check_isotropic_range(p)?;
    two_qubit_params(isotropic_lambdas(p), sigma_x_angles(FRAC_PI_4, FRAC_PI_4))
}

/// `(1 − p)/4 · I ⊗ I + p P(α)`.
pub fn isotropic_alpha(p: f64, alpha: f64) -> Result<DensityMatrix> {
    let projector = pure_p(alpha)?.into_matrix();
    let mat = ComplexMatrix::identity(4, 4).scale((1.0 - p) / 4.0) + projector.scale(p);
    DensityMatrix::bipartite(mat, 2, 2, &Tolerances::default())
}

/// Isotropic eigenvalue slices with `Ξ = α I`.
pub fn isotropic_alpha_params(p: f64, alpha: f64) -> Result<BlockParams> {
    check_isotropic_range(p)?;
    two_qubit_params(isotropic_lambdas(p), sigma_x_angles(alpha, alpha))
}

/// PPT threshold of [`isotropic_alpha`]: PPT iff `p ≤ 1/(1 + 2 sin 2α)`.
pub fn sep_threshold(alpha: f64) -> f64 {
    1.0 / (1.0 + 2.0 * (2.0 * alpha).sin())
}

fn check_circulant(p: &[f64; 4], alpha: f64, beta: f64) -> Result<()> {
    // shares the input contract of the analytic conditions
    crate::entanglement::circulant_margins(p, alpha, beta).map(|_| ())
}

/// Circulant two-qubit state generated by `Λ₁ = diag(p₂, p₄)`,
/// `Λ₂ = diag(p₃, p₁)`, `S = diag(sin α, sin β)`, `C = diag(cos α, cos β)`
/// and `Z̃ = σ_x`:
///
/// ```text
/// ⎡ p₂c_β² + p₁s_β²   0                 0                 (p₁−p₂)s_βc_β ⎤
/// ⎢ 0                 p₄c_α² + p₃s_α²   (p₃−p₄)s_αc_α     0             ⎥
/// ⎢ 0                 (p₃−p₄)s_αc_α     p₄s_α² + p₃c_α²   0             ⎥
/// ⎣ (p₁−p₂)s_βc_β     0                 0                 p₂s_β² + p₁c_β² ⎦
/// ```
///
/// Each of the two coupled pairs is a rotation of a diagonal pair of
/// probabilities, so the matrix is a state for every `p`, `α`, `β`.
pub fn circulant_rho(p: &[f64; 4], alpha: f64, beta: f64) -> Result<DensityMatrix> {
    check_circulant(p, alpha, beta)?;
    let [p1, p2, p3, p4] = *p;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let outer = (p1 - p2) * sb * cb;
    let inner = (p3 - p4) * sa * ca;
    let mat = real4([
        [p2 * cb * cb + p1 * sb * sb, 0.0, 0.0, outer],
        [0.0, p4 * ca * ca + p3 * sa * sa, inner, 0.0],
        [0.0, inner, p4 * sa * sa + p3 * ca * ca, 0.0],
        [outer, 0.0, 0.0, p2 * sb * sb + p1 * cb * cb],
    ]);
    DensityMatrix::bipartite(mat, 2, 2, &Tolerances::default())
}

pub fn circulant_params(p: &[f64; 4], alpha: f64, beta: f64) -> Result<BlockParams> {
    check_circulant(p, alpha, beta)?;
    let [p1, p2, p3, p4] = *p;
    two_qubit_params(vec![p2, p4, p3, p1], sigma_x_angles(alpha, beta))
}

/// The circulant matrix in its published layout, whose diagonal pairs carry
/// the angle of the other coupled pair. It agrees with [`circulant_rho`] on
/// `α = β = π/4` and is not positive semidefinite in general, so it is
/// returned as a bare matrix.
pub fn circulant_published(p: &[f64; 4], alpha: f64, beta: f64) -> ComplexMatrix {
    let [p1, p2, p3, p4] = *p;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let outer = (p1 - p2) * sb * cb;
    let inner = (p3 - p4) * sa * ca;
    real4([
        [p1 * ca * ca + p2 * sa * sa, 0.0, 0.0, outer],
        [0.0, p3 * cb * cb + p4 * sb * sb, inner, 0.0],
        [0.0, inner, p3 * sb * sb + p4 * cb * cb, 0.0],
        [outer, 0.0, 0.0, p1 * sa * sa + p2 * ca * ca],
    ])
}

/// Bell-diagonal state; PPT iff every `p_k ≤ 1/2`.
pub fn bell_diagonal(p: &[f64; 4]) -> Result<DensityMatrix> {
    validate_simplex(p, 4)?;
    let [p1, p2, p3, p4] = *p;
    let mat = real4([
        [p1 + p2, 0.0, 0.0, p1 - p2],
        [0.0, p3 + p4, p3 - p4, 0.0],
        [0.0, p3 - p4, p3 + p4, 0.0],
        [p1 - p2, 0.0, 0.0, p1 + p2],
    ])
    .scale(0.5);
    DensityMatrix::bipartite(mat, 2, 2, &Tolerances::default())
}

fn check_shape(name: &str, x: &ComplexMatrix, m: usize) -> Result<()> {
    if x.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "{name} must be {m}x{m}, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(())
}

/// Validated inputs of the `2 ⊗ m` constructors, with `C = cos Ξ₂` and
/// `S = sin Ξ₂` precomputed.
struct TwoBlockInputs {
    m: usize,
    u: ComplexMatrix,
    l1: ComplexMatrix,
    l2: ComplexMatrix,
    cos: ComplexMatrix,
    sin: ComplexMatrix,
}

impl TwoBlockInputs {
    fn new(
        u: &ComplexMatrix,
        l1: &ComplexMatrix,
        l2: &ComplexMatrix,
        xi2: &ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let m = u.nrows();
        for (name, x) in [("U", u), ("Lambda1", l1), ("Lambda2", l2), ("Xi2", xi2)] {
            check_shape(name, x, m)?;
        }
        ensure_unitary(u, tol)?;
        psd_spectrum(l1, tol)?;
        psd_spectrum(l2, tol)?;
        let total = trace(l1).re + trace(l2).re;
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadNormalization { trace: total });
        }
        Ok(Self {
            m,
            u: u.clone(),
            l1: hermitian_part(l1),
            l2: hermitian_part(l2),
            cos: matfun_psd(xi2, MatFn::Cos, tol)?,
            sin: matfun_psd(xi2, MatFn::Sin, tol)?,
        })
    }

    /// `U† Λ₁ U`.
    fn rotated_l1(&self) -> ComplexMatrix {
        self.u.adjoint() * &self.l1 * &self.u
    }
}

fn two_by_two_blocks(
    tl: &ComplexMatrix,
    tr: &ComplexMatrix,
    bl: &ComplexMatrix,
    br: &ComplexMatrix,
) -> ComplexMatrix {
    let m = tl.nrows();
    let mut out = ComplexMatrix::zeros(2 * m, 2 * m);
    set_block(&mut out, 0, 0, tl);
    set_block(&mut out, 0, 1, tr);
    set_block(&mut out, 1, 0, bl);
    set_block(&mut out, 1, 1, br);
    out
}

/// General `2 ⊗ m` state with `Z̃ = U`, `C = cos Ξ₂`, `S = sin Ξ₂`:
///
/// ```text
/// ⎡ U(CU†Λ₁UC + SΛ₂S)U†   U(SΛ₂C − CU†Λ₁US) ⎤
/// ⎣ (CΛ₂S − SU†Λ₁UC)U†    CΛ₂C + SU†Λ₁US    ⎦
/// ```
pub fn two_by_m(
    u: &ComplexMatrix,
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    xi2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let t = TwoBlockInputs::new(u, l1, l2, xi2, tol)?;
    let (cs, sn) = (&t.cos, &t.sin);
    let rl1 = t.rotated_l1();
    let inner_tl = cs * &rl1 * cs + sn * &t.l2 * sn;
    let inner_tr = sn * &t.l2 * cs - cs * &rl1 * sn;
    let inner_bl = cs * &t.l2 * sn - sn * &rl1 * cs;
    let inner_br = cs * &t.l2 * cs + sn * &rl1 * sn;
    let mat = two_by_two_blocks(
        &(&t.u * inner_tl * t.u.adjoint()),
        &(&t.u * inner_tr),
        &(inner_bl * t.u.adjoint()),
        &inner_br,
    );
    DensityMatrix::bipartite(hermitian_part(&mat), 2, t.m, tol)
}

/// Eigen-slices and eigenvector unitaries of `Λ₁`, `Λ₂`, with `Z₂ = U Ξ₂`.
pub fn two_by_m_params(
    u: &ComplexMatrix,
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    xi2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<BlockParams> {
    let t = TwoBlockInputs::new(u, l1, l2, xi2, tol)?;
    let s1 = psd_spectrum(&t.l1, tol)?;
    let s2 = psd_spectrum(&t.l2, tol)?;
    let mut lambdas: Vec<f64> = s1
        .eigenvalues
        .iter()
        .chain(&s2.eigenvalues)
        .copied()
        .collect();
    let total: f64 = lambdas.iter().sum();
    lambdas.iter_mut().for_each(|x| *x /= total);
    BlockParams::new(
        2,
        t.m,
        lambdas,
        vec![s1.eigenvectors, s2.eigenvectors],
        vec![vec![u * hermitian_part(xi2)]],
        tol,
    )
}

fn condition(name: &'static str, residual: f64) -> Result<()> {
    if residual > CONDITION_TOL {
        return Err(Error::ConditionViolated {
            condition: name,
            residual,
        });
    }
    Ok(())
}

/// Block Toeplitz state `[[A, UB], [(UB)†, A]]` with `A = CΛC + SΛS` and
/// `B = SΛC − CΛS`, from `Λ₁ = Λ₂ = Λ`, `[Λ, U] = 0` and `UAU† = A`.
pub fn toeplitz_state(
    l: &ComplexMatrix,
    u: &ComplexMatrix,
    xi2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let m = u.nrows();
    check_shape("Lambda", l, m)?;
    condition("[Lambda, U] = 0", commutator(l, u).norm())?;
    let t = TwoBlockInputs::new(u, l, l, xi2, tol)?;
    let (cs, sn) = (&t.cos, &t.sin);
    let a = hermitian_part(&(cs * &t.l1 * cs + sn * &t.l1 * sn));
    let b = sn * &t.l1 * cs - cs * &t.l1 * sn;
    condition("U A U^dagger = A", (&t.u * &a * t.u.adjoint() - &a).norm())?;
    let ub = &t.u * b;
    let mat = two_by_two_blocks(&a, &ub, &ub.adjoint(), &a);
    DensityMatrix::bipartite(mat, 2, m, tol)
}

/// Block Hankel state `[[UA₁U†, X], [X, A₂]]` with `X = UB′`,
/// `B′ = SC(Λ₂ − U†Λ₁U)`, `A₁ = CU†Λ₁UC + SΛ₂S`, `A₂ = CΛ₂C + SU†Λ₁US`,
/// from `[U†Λ₁U, Ξ₂] = 0`, `[Λ₂, Ξ₂] = 0` and `UB′ = B′U†`.
pub fn hankel_state(
    u: &ComplexMatrix,
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    xi2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let t = TwoBlockInputs::new(u, l1, l2, xi2, tol)?;
    let rl1 = t.rotated_l1();
    condition(
        "[U^dagger Lambda1 U, Xi2] = 0",
        commutator(&rl1, xi2).norm(),
    )?;
    condition("[Lambda2, Xi2] = 0", commutator(&t.l2, xi2).norm())?;
    let (cs, sn) = (&t.cos, &t.sin);
    let b_prime = sn * cs * (&t.l2 - &rl1);
    condition(
        "U B' = B' U^dagger",
        (&t.u * &b_prime - &b_prime * t.u.adjoint()).norm(),
    )?;
    let a1 = cs * &rl1 * cs + sn * &t.l2 * sn;
    let a2 = cs * &t.l2 * cs + sn * &rl1 * sn;
    let x = &t.u * b_prime;
    let mat = two_by_two_blocks(&(&t.u * a1 * t.u.adjoint()), &x, &x.adjoint(), &a2);
    DensityMatrix::bipartite(hermitian_part(&mat), 2, t.m, tol)
}

/// `ρ = (1/m) Aⁿ D(0|…|0|I) Aⁿ†` for a block vector `|Z_n⟩` of `n − 1`
/// blocks. The last block column of `Aⁿ` is an isometry, so `mρ` is a
/// rank-`m` projector.
pub fn class3_params(n: usize, m: usize, zn: &[ComplexMatrix]) -> Result<BlockParams> {
    if n < 2 || zn.len() != n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "an n = {n} class-3 state needs n - 1 >= 1 blocks, got {}",
            zn.len()
        )));
    }
    let mut lambdas = vec![0.0; (n - 1) * m];
    lambdas.extend(std::iter::repeat_n(1.0 / m as f64, m));
    let mut blockvecs = BlockParams::zero_blockvecs(n, m);
    blockvecs[n - 2] = zn.to_vec();
    BlockParams::with_identity_unitaries(n, m, lambdas, blockvecs, &Tolerances::default())
}

pub fn class3_state(
    n: usize,
    m: usize,
    zn: &[ComplexMatrix],
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    assemble_rho_block(&class3_params(n, m, zn)?, tol)
}

/// Positive polar factors `P_k` of the normalized blocks `Z̃_{k,n} = P_k U_k`.
pub fn class3_polar_parts(zn: &[ComplexMatrix], tol: &Tolerances) -> Result<Vec<ComplexMatrix>> {
    crate::block::normalize_blocks(zn, tol)?
        .iter()
        .map(|z| polar(z, tol).map(|(p, _)| p))
        .collect()
}

/// `Σ_k P_k² = I` within [`SPHERE_TOL`].
pub fn nonabelian_sphere_check(ps: &[ComplexMatrix], _tol: &Tolerances) -> Result<bool> {
    let first = ps
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no matrices given".into()))?;
    let m = first.nrows();
    let mut sum = ComplexMatrix::zeros(m, m);
    for p in ps {
        check_shape("P_k", p, m)?;
        sum += p * p;
    }
    Ok((sum - ComplexMatrix::identity(m, m)).norm() <= SPHERE_TOL)
}

/// Class-3 state for `n = 2`:
///
/// ```text
/// (1/m) ⎡ U S² U†   U S C ⎤
///       ⎣ C S U†    C²    ⎦
/// ```
///
/// The top-left block is `U S² U†`, which is what the block assembly
/// produces and what makes `mρ` idempotent; it reduces to `S²` when `U`
/// commutes with `Ξ₂`.
pub fn nonabelian_bloch(
    u: &ComplexMatrix,
    xi2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let m = u.nrows();
    check_shape("Xi2", xi2, m)?;
    ensure_unitary(u, tol)?;
    let cs = matfun_psd(xi2, MatFn::Cos, tol)?;
    let sn = matfun_psd(xi2, MatFn::Sin, tol)?;
    let usc = u * &sn * &cs;
    let mat = two_by_two_blocks(
        &(u * &sn * &sn * u.adjoint()),
        &usc,
        &usc.adjoint(),
        &(&cs * &cs),
    )
    .unscale(m as f64);
    DensityMatrix::bipartite(hermitian_part(&mat), 2, m, tol)
}

/// The `n = 2` class-3 matrix in its published layout, with `S²` in the
/// top-left block.
pub fn nonabelian_bloch_published(
    u: &ComplexMatrix,
    xi2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let m = u.nrows();
    let cs = matfun_psd(xi2, MatFn::Cos, tol)?;
    let sn = matfun_psd(xi2, MatFn::Sin, tol)?;
    let usc = u * &sn * &cs;
    Ok(two_by_two_blocks(&(&sn * &sn), &usc, &usc.adjoint(), &(&cs * &cs)).unscale(m as f64))
}

/// Block-diagonal `2 ⊗ m` state `diag(Λ₁, Λ₂)`.
pub fn block_diagonal_state(
    l1: &ComplexMatrix,
    l2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let m = l1.nrows();
    check_shape("Lambda2", l2, m)?;
    DensityMatrix::bipartite(block_diag(&[l1.clone(), l2.clone()]), 2, m, tol)
}

/// One member of a named family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    PureP {
        alpha: f64,
    },
    Isotropic {
        p: f64,
    },
    IsotropicAlpha {
        p: f64,
        alpha: f64,
    },
    Circulant {
        p: [f64; 4],
        alpha: f64,
        beta: f64,
    },
    BellDiagonal {
        p: [f64; 4],
    },
    TwoByM {
        u: ComplexMatrix,
        l1: ComplexMatrix,
        l2: ComplexMatrix,
        xi2: ComplexMatrix,
    },
    Toeplitz {
        l: ComplexMatrix,
        u: ComplexMatrix,
        xi2: ComplexMatrix,
    },
    Hankel {
        u: ComplexMatrix,
        l1: ComplexMatrix,
        l2: ComplexMatrix,
        xi2: ComplexMatrix,
    },
    Class3 {
        n: usize,
        m: usize,
        blocks: Vec<ComplexMatrix>,
    },
    NonabelianBloch {
        u: ComplexMatrix,
        xi2: ComplexMatrix,
    },
}

impl FamilySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilySpec::PureP { .. } => "pure_P",
            FamilySpec::Isotropic { .. } => "isotropic",
            FamilySpec::IsotropicAlpha { .. } => "isotropic_alpha",
            FamilySpec::Circulant { .. } => "circulant",
            FamilySpec::BellDiagonal { .. } => "bell_diagonal",
            FamilySpec::TwoByM { .. } => "two_by_m",
            FamilySpec::Toeplitz { .. } => "toeplitz",
            FamilySpec::Hankel { .. } => "hankel",
            FamilySpec::Class3 { .. } => "class3",
            FamilySpec::NonabelianBloch { .. } => "nonabelian_bloch",
        }
    }

    /// The state from the family's closed form.
    pub fn build(&self, tol: &Tolerances) -> Result<DensityMatrix> {
        match self {
            FamilySpec::PureP { alpha } => pure_p(*alpha),
            FamilySpec::Isotropic { p } => isotropic(*p),
            FamilySpec::IsotropicAlpha { p, alpha } => isotropic_alpha(*p, *alpha),
            FamilySpec::Circulant { p, alpha, beta } => circulant_rho(p, *alpha, *beta),
            FamilySpec::BellDiagonal { p } => bell_diagonal(p),
            FamilySpec::TwoByM { u, l1, l2, xi2 } => two_by_m(u, l1, l2, xi2, tol),
            FamilySpec::Toeplitz { l, u, xi2 } => toeplitz_state(l, u, xi2, tol),
            FamilySpec::Hankel { u, l1, l2, xi2 } => hankel_state(u, l1, l2, xi2, tol),
            FamilySpec::Class3 { n, m, blocks } => class3_state(*n, *m, blocks, tol),
            FamilySpec::NonabelianBloch { u, xi2 } => nonabelian_bloch(u, xi2, tol),
        }
    }

    /// Inputs of the generic block assembly reproducing this state, where the
    /// family is defined through them.
    pub fn block_params(&self, tol: &Tolerances) -> Option<Result<BlockParams>> {
        Some(match self {
            FamilySpec::PureP { alpha } => pure_p_params(*alpha),
            FamilySpec::Isotropic { p } => isotropic_params(*p),
            FamilySpec::IsotropicAlpha { p, alpha } => isotropic_alpha_params(*p, *alpha),
            FamilySpec::Circulant { p, alpha, beta } => circulant_params(p, *alpha, *beta),
            FamilySpec::BellDiagonal { p } => circulant_params(p, FRAC_PI_4, FRAC_PI_4),
            FamilySpec::TwoByM { u, l1, l2, xi2 } => two_by_m_params(u, l1, l2, xi2, tol),
            FamilySpec::Class3 { n, m, blocks } => class3_params(*n, *m, blocks),
            FamilySpec::NonabelianBloch { u, xi2 } => {
                let m = u.nrows();
                class3_params(2, m, &[u * hermitian_part(xi2)])
            }
            FamilySpec::Toeplitz { .. } | FamilySpec::Hankel { .. } => return None,
        })
    }
}

/// Eigenvalues of `rho`, rounded up to zero when within `tol.psd` below it.
pub fn clipped_spectrum(rho: &DensityMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    Ok(herm_eig(rho.matrix(), tol)?
        .eigenvalues
        .into_iter()
        .map(|x| if x < 0.0 && x >= -tol.psd { 0.0 } else { x })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{assemble_rho_block_with, Method};
    use crate::entanglement::{detect_structure, ppt_check, Structure};
    use crate::linalg::{haar_unitary, unitarity_residual};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn close(a: &DensityMatrix, b: &DensityMatrix, eps: f64) -> bool {
        (a.matrix() - b.matrix()).norm() <= eps
    }

    #[test]
    fn pure_p_cases() {
        let zero = pure_p(0.0).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(3, 3)] = ONE;
        assert_eq!(zero.matrix(), &expected);

        let max = pure_p(FRAC_PI_4).unwrap();
        let report = ppt_check(&max, &tol()).unwrap();
        assert!((report.min_pt_eig + 0.5).abs() < 1e-12);

        for alpha in [0.1, 0.9, 2.0] {
            let rho = pure_p(alpha).unwrap();
            let m = rho.matrix();
            assert!((m * m - m).norm() < 1e-12);
            let generic = assemble_rho_block(&pure_p_params(alpha).unwrap(), &tol()).unwrap();
            assert!(close(&rho, &generic, 1e-12));
        }
    }

    #[test]
    fn isotropic_cases() {
        assert!(close(
            &isotropic(0.0).unwrap(),
            &DensityMatrix::new(diag_real(&[0.25; 4]), &tol()).unwrap(),
            1e-15
        ));
        assert!(close(
            &isotropic(1.0).unwrap(),
            &pure_p(FRAC_PI_4).unwrap(),
            1e-15
        ));
        let boundary = ppt_check(&isotropic(1.0 / 3.0).unwrap(), &tol()).unwrap();
        assert!(boundary.min_pt_eig.abs() < 1e-12);
        assert!(boundary.is_ppt);
        assert!(matches!(isotropic(1.2), Err(Error::OutOfRange { .. })));
        assert!(matches!(isotropic(-0.5), Err(Error::OutOfRange { .. })));
        for p in [-1.0 / 3.0, 0.2, 0.7] {
            let generic = assemble_rho_block(&isotropic_params(p).unwrap(), &tol()).unwrap();
            assert!(close(&isotropic(p).unwrap(), &generic, 1e-12));
        }
    }

    #[test]
    fn isotropic_alpha_cases() {
        for p in [0.0, 0.3, 0.9] {
            assert!(close(
                &isotropic_alpha(p, FRAC_PI_4).unwrap(),
                &isotropic(p).unwrap(),
                1e-15
            ));
        }
        let alpha = PI / 8.0;
        let at = isotropic_alpha(sep_threshold(alpha), alpha).unwrap();
        assert!(ppt_check(&at, &tol()).unwrap().min_pt_eig.abs() < 1e-10);
        assert!(close(
            &isotropic_alpha(0.0, 1.0).unwrap(),
            &isotropic(0.0).unwrap(),
            1e-15
        ));
        assert!(matches!(
            isotropic_alpha(1.5, 0.3),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn circulant_cases() {
        let p = [0.1, 0.2, 0.3, 0.4];
        assert!(close(
            &circulant_rho(&p, FRAC_PI_4, FRAC_PI_4).unwrap(),
            &bell_diagonal(&p).unwrap(),
            1e-15
        ));
        let flat = circulant_rho(&p, 0.0, 0.0).unwrap();
        assert_eq!(flat.matrix(), &diag_real(&[p[1], p[3], p[2], p[0]]));
        assert_eq!(
            detect_structure(&flat, &tol()).unwrap(),
            Structure::BlockDiagonal
        );

        let worked = [0.125, 0.125, 0.125, 0.625];
        for beta in [0.0, 0.4, 1.0, FRAC_PI_2] {
            let rho = circulant_rho(&worked, PI / 12.0, beta).unwrap();
            assert!(ppt_check(&rho, &tol()).unwrap().is_ppt);
        }
        for (alpha, beta) in [(0.3, 1.2), (1.1, 0.2), (0.0, 0.7)] {
            let generic =
                assemble_rho_block(&circulant_params(&p, alpha, beta).unwrap(), &tol()).unwrap();
            assert!(close(
                &circulant_rho(&p, alpha, beta).unwrap(),
                &generic,
                1e-12
            ));
        }
        assert!(matches!(
            circulant_rho(&p, -0.1, 0.0),
            Err(Error::AngleOutOfRange { .. })
        ));
    }

    #[test]
    fn published_circulant_layout_is_not_a_state() {
        let p = [1.0, 0.0, 0.0, 0.0];
        let published = circulant_published(&p, 0.0, FRAC_PI_4);
        let min = herm_eig(&published, &tol()).unwrap().min();
        assert!(min < -0.1);
        let q = [0.1, 0.2, 0.3, 0.4];
        let bell = circulant_published(&q, FRAC_PI_4, FRAC_PI_4);
        assert!((bell - bell_diagonal(&q).unwrap().matrix()).norm() < 1e-15);
    }

    #[test]
    fn bell_diagonal_cases() {
        let bell = bell_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(bell.rank(&tol()).unwrap(), 1);
        assert!(!ppt_check(&bell, &tol()).unwrap().is_ppt);
        let mixed = bell_diagonal(&[0.25; 4]).unwrap();
        assert!(ppt_check(&mixed, &tol()).unwrap().is_ppt);
        let ent = bell_diagonal(&[0.125, 0.125, 0.125, 0.625]).unwrap();
        assert!(!ppt_check(&ent, &tol()).unwrap().is_ppt);
        assert!(bell_diagonal(&[0.5, 0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn two_by_m_special_angles() {
        let m = 3;
        let u = haar_unitary(m, 1);
        let l1 = diag_real(&[0.1, 0.2, 0.05]);
        let l2 = diag_real(&[0.3, 0.15, 0.2]);
        let zero = ComplexMatrix::zeros(m, m);
        let rho = two_by_m(&u, &l1, &l2, &zero, &tol()).unwrap();
        assert!((rho.matrix() - block_diag(&[l1.clone(), l2.clone()])).norm() < 1e-14);

        let right = ComplexMatrix::identity(m, m).scale(FRAC_PI_2);
        let rho = two_by_m(&u, &l1, &l2, &right, &tol()).unwrap();
        let swapped = block_diag(&[&u * &l2 * u.adjoint(), u.adjoint() * &l1 * &u]);
        assert!((rho.matrix() - swapped).norm() < 1e-14);
        assert_eq!(
            detect_structure(&rho, &tol()).unwrap(),
            Structure::BlockDiagonal
        );
    }

    #[test]
    fn two_by_m_reduces_to_pure_p() {
        let alpha = 0.6;
        let rho = two_by_m(
            &sigma_x(),
            &ComplexMatrix::zeros(2, 2),
            &(ComplexMatrix::identity(2, 2) - sigma_z()).scale(0.5),
            &ComplexMatrix::identity(2, 2).scale(alpha),
            &tol(),
        )
        .unwrap();
        assert!(close(&rho, &pure_p(alpha).unwrap(), 1e-14));
    }

    #[test]
    fn two_by_m_matches_generic_assembly() {
        let m = 2;
        let u = haar_unitary(m, 2);
        let w = haar_unitary(m, 3);
        let l1 = &w * diag_real(&[0.2, 0.1]) * w.adjoint();
        let l2 = diag_real(&[0.3, 0.4]);
        let v = haar_unitary(m, 4);
        let xi = &v * diag_real(&[0.4, 1.3]) * v.adjoint();
        let rho = two_by_m(&u, &l1, &l2, &xi, &tol()).unwrap();
        let params = two_by_m_params(&u, &l1, &l2, &xi, &tol()).unwrap();
        for method in [Method::Closed, Method::Exp] {
            let generic = assemble_rho_block_with(&params, method, &tol()).unwrap();
            assert!(close(&rho, &generic, 1e-10));
        }
    }

    #[test]
    fn two_by_m_input_errors() {
        let id = ComplexMatrix::identity(2, 2);
        let half = id.scale(0.25);
        assert!(matches!(
            two_by_m(&id.scale(2.0), &half, &half, &id, &tol()),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            two_by_m(&id, &diag_real(&[0.6, -0.1]), &half, &id, &tol()),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            two_by_m(&id, &half, &id, &id, &tol()),
            Err(Error::BadNormalization { .. })
        ));
    }

    #[test]
    fn toeplitz_diagonal_inputs() {
        let l = diag_real(&[0.2, 0.3]);
        let u = diag_real(&[1.0, -1.0]);
        let xi = diag_real(&[0.4, 0.9]);
        let rho = toeplitz_state(&l, &u, &xi, &tol()).unwrap();
        // diagonal inputs commute with Ξ, so B = 0
        assert_eq!(
            detect_structure(&rho, &tol()).unwrap(),
            Structure::BlockDiagonal
        );
        assert!(ppt_check(&rho, &tol()).unwrap().is_ppt);
    }

    #[test]
    fn toeplitz_scalar_unitary_is_genuinely_toeplitz() {
        let w = haar_unitary(2, 5);
        let l = &w * diag_real(&[0.35, 0.15]) * w.adjoint();
        let u = ComplexMatrix::identity(2, 2).scale(1.0) * crate::linalg::c(0.6, 0.8);
        let xi = diag_real(&[0.3, 1.1]);
        let rho = toeplitz_state(&l, &u, &xi, &tol()).unwrap();
        assert_eq!(
            detect_structure(&rho, &tol()).unwrap(),
            Structure::BlockToeplitz
        );
        assert!(ppt_check(&rho, &tol()).unwrap().is_ppt);
        let general = two_by_m(&u, &l, &l, &xi, &tol()).unwrap();
        assert!(close(&rho, &general, 1e-12));
    }

    #[test]
    fn toeplitz_rejects_noncommuting_unitary() {
        let l = diag_real(&[0.2, 0.3]);
        let u = haar_unitary(2, 6);
        let xi = diag_real(&[0.4, 0.9]);
        assert!(matches!(
            toeplitz_state(&l, &u, &xi, &tol()),
            Err(Error::ConditionViolated {
                condition: "[Lambda, U] = 0",
                ..
            })
        ));
    }

    #[test]
    fn hankel_diagonal_inputs() {
        let u = ComplexMatrix::identity(2, 2);
        let l1 = diag_real(&[0.3, 0.1]);
        let l2 = diag_real(&[0.15, 0.45]);
        let xi = diag_real(&[0.5, 1.0]);
        let rho = hankel_state(&u, &l1, &l2, &xi, &tol()).unwrap();
        assert_eq!(
            detect_structure(&rho, &tol()).unwrap(),
            Structure::BlockHankel
        );
        assert!(ppt_check(&rho, &tol()).unwrap().is_ppt);
        let general = two_by_m(&u, &l1, &l2, &xi, &tol()).unwrap();
        assert!(close(&rho, &general, 1e-12));
    }

    #[test]
    fn hankel_equal_lambdas_are_block_diagonal() {
        let u = ComplexMatrix::identity(2, 2);
        let l = ComplexMatrix::identity(2, 2).scale(0.25);
        let xi = diag_real(&[0.5, 1.0]);
        let rho = hankel_state(&u, &l, &l, &xi, &tol()).unwrap();
        assert_eq!(
            detect_structure(&rho, &tol()).unwrap(),
            Structure::BlockDiagonal
        );
    }

    #[test]
    fn hankel_rejects_noncommuting_angle() {
        let u = ComplexMatrix::identity(2, 2);
        let w = haar_unitary(2, 8);
        let xi = &w * diag_real(&[0.5, 1.0]) * w.adjoint();
        let res = hankel_state(
            &u,
            &diag_real(&[0.3, 0.1]),
            &diag_real(&[0.2, 0.4]),
            &xi,
            &tol(),
        );
        assert!(matches!(res, Err(Error::ConditionViolated { .. })));
    }

    #[test]
    fn class3_m1_is_pure() {
        let z = vec![
            ComplexMatrix::from_element(1, 1, crate::linalg::c(0.3, 0.4)),
            ComplexMatrix::from_element(1, 1, crate::linalg::c(-0.2, 0.1)),
        ];
        let rho = class3_state(3, 1, &z, &tol()).unwrap();
        let m = rho.matrix();
        assert!((m * m - m).norm() < 1e-12);
        assert_eq!(rho.rank(&tol()).unwrap(), 1);
    }

    #[test]
    fn class3_unitary_block_is_projector() {
        let m = 3;
        let u = haar_unitary(m, 10);
        let z = vec![u.scale(0.7)];
        let rho = class3_state(2, m, &z, &tol()).unwrap();
        let scaled = rho.matrix().scale(m as f64);
        assert!((&scaled * &scaled - &scaled).norm() < 1e-10);
        assert_eq!(rho.rank(&tol()).unwrap(), m);
        let parts = class3_polar_parts(&z, &tol()).unwrap();
        assert!(nonabelian_sphere_check(&parts, &tol()).unwrap());
    }

    #[test]
    fn nonabelian_bloch_cases() {
        let m = 2;
        let u = haar_unitary(m, 11);
        let zero = nonabelian_bloch(&u, &ComplexMatrix::zeros(m, m), &tol()).unwrap();
        let expected = block_diag(&[ComplexMatrix::zeros(m, m), ComplexMatrix::identity(m, m)])
            .unscale(m as f64);
        assert!((zero.matrix() - expected).norm() < 1e-15);

        let quarter = ComplexMatrix::identity(m, m).scale(FRAC_PI_4);
        let id = ComplexMatrix::identity(m, m);
        let rho = nonabelian_bloch(&id, &quarter, &tol()).unwrap();
        let ones = ComplexMatrix::from_fn(2 * m, 2 * m, |i, j| {
            if i % m == j % m {
                r(1.0 / (2.0 * m as f64))
            } else {
                ZERO
            }
        });
        assert!((rho.matrix() - ones).norm() < 1e-15);
        let scaled = rho.matrix().scale(m as f64);
        assert!((&scaled * &scaled - &scaled).norm() < 1e-12);

        let v = haar_unitary(m, 12);
        let xi = &v * diag_real(&[0.3, 1.2]) * v.adjoint();
        let rho = nonabelian_bloch(&u, &xi, &tol()).unwrap();
        let class3 = class3_state(2, m, &[&u * &xi], &tol()).unwrap();
        assert!(close(&rho, &class3, 1e-10));

        // published layout agrees only when U commutes with Ξ₂
        let published = nonabelian_bloch_published(&u, &xi, &tol()).unwrap();
        assert!((published - rho.matrix()).norm() > 1e-3);
        let commuting = &v * diag_real(&[1.0, -1.0]) * v.adjoint();
        let rho = nonabelian_bloch(&commuting, &xi, &tol()).unwrap();
        let published = nonabelian_bloch_published(&commuting, &xi, &tol()).unwrap();
        assert!((published - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn nonabelian_bloch_m1_is_bloch_sphere() {
        let (theta, phi) = (0.8, 0.4);
        let u = ComplexMatrix::from_element(1, 1, num_complex::Complex64::from_polar(1.0, phi));
        let xi = ComplexMatrix::from_element(1, 1, r(theta));
        let rho = nonabelian_bloch(&u, &xi, &tol()).unwrap();
        let (s, c) = theta.sin_cos();
        assert!((rho.matrix()[(0, 0)] - r(s * s)).norm() < 1e-15);
        assert!(
            (rho.matrix()[(0, 1)] - num_complex::Complex64::from_polar(s * c, phi)).norm() < 1e-15
        );
        assert!((rho.matrix()[(1, 1)] - r(c * c)).norm() < 1e-15);
    }

    #[test]
    fn sphere_check_cases() {
        let id = ComplexMatrix::identity(2, 2);
        assert!(nonabelian_sphere_check(std::slice::from_ref(&id), &tol()).unwrap());
        let half = id.scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(nonabelian_sphere_check(&[half.clone(), half.clone()], &tol()).unwrap());
        assert!(!nonabelian_sphere_check(std::slice::from_ref(&half), &tol()).unwrap());
        assert!(nonabelian_sphere_check(&[half, ComplexMatrix::identity(3, 3)], &tol()).is_err());
        assert!(nonabelian_sphere_check(&[], &tol()).is_err());
    }

    #[test]
    fn family_spec_dual_paths() {
        let u = haar_unitary(2, 13);
        let specs = vec![
            FamilySpec::PureP { alpha: 0.3 },
            FamilySpec::Isotropic { p: 0.4 },
            FamilySpec::IsotropicAlpha { p: 0.4, alpha: 0.2 },
            FamilySpec::Circulant {
                p: [0.1, 0.2, 0.3, 0.4],
                alpha: 0.5,
                beta: 1.0,
            },
            FamilySpec::BellDiagonal {
                p: [0.1, 0.2, 0.3, 0.4],
            },
            FamilySpec::NonabelianBloch {
                u: u.clone(),
                xi2: diag_real(&[0.2, 0.9]),
            },
        ];
        for spec in specs {
            let direct = spec.build(&tol()).unwrap();
            let generic =
                assemble_rho_block(&spec.block_params(&tol()).unwrap().unwrap(), &tol()).unwrap();
            assert!(close(&direct, &generic, 1e-10), "{}", spec.kind());
        }
        assert!(unitarity_residual(&u) < 1e-12);
    }
}
