//! Seeded random inputs for property checks and the validation suite.
//!
//! Every generator draws from a caller-supplied RNG; seed a
//! [`rand_chacha::ChaCha8Rng`] for reproducible streams.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::block::{BlockParams, BlockVector};
use crate::linalg::{
    c, diag_real, ginibre, haar_unitary_with, hermitian_part, trace, ComplexMatrix, Tolerances,
};
use crate::single::SingleParams;

/// Uniform point on the probability simplex with `k` vertices.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    hermitian_part(&ginibre(rng, n, n))
}

pub fn random_skew_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let a = ginibre(rng, n, n);
    (&a - a.adjoint()).scale(0.5)
}

/// Wishart-type PSD matrix `G G†`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    hermitian_part(&(&g * g.adjoint()))
}

/// PSD matrix of rank `rank`.
pub fn random_psd_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, rank);
    hermitian_part(&(&g * g.adjoint()))
}

/// PSD matrix with trace `total`.
pub fn random_psd_trace<R: Rng + ?Sized>(rng: &mut R, n: usize, total: f64) -> ComplexMatrix {
    let p = random_psd(rng, n);
    let t = trace(&p).re;
    p.scale(total / t)
}

/// Random full-rank state of dimension `dim`.
pub fn random_state_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_psd_trace(rng, dim, 1.0)
}

/// Unitary-invariant PSD matrix with eigenvalues uniform in `[lo, hi]`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R, m: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let w = haar_unitary_with(rng, m);
    let values: Vec<f64> = (0..m).map(|_| rng.random_range(lo..hi)).collect();
    hermitian_part(&(&w * diag_real(&values) * w.adjoint()))
}

fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Eigenvalues sorted descending, complex Gaussian mixing vectors.
pub fn random_single_params<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SingleParams {
    let mut lambdas = random_simplex(rng, n);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let zvecs = (2..=n)
        .map(|j| (0..j - 1).map(|_| random_complex(rng)).collect())
        .collect();
    SingleParams::new(lambdas, zvecs).expect("generated parameters are valid")
}

/// `j − 1` Ginibre blocks of size `m`.
pub fn random_blockvec<R: Rng + ?Sized>(rng: &mut R, j: usize, m: usize) -> BlockVector {
    (0..j - 1).map(|_| ginibre(rng, m, m)).collect()
}

/// Random eigenvalues, Haar local unitaries and Ginibre block vectors.
pub fn random_block_params<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> BlockParams {
    let lambdas = random_simplex(rng, n * m);
    let us = (0..n).map(|_| haar_unitary_with(rng, m)).collect();
    let zs = (2..=n).map(|j| random_blockvec(rng, j, m)).collect();
    BlockParams::new(n, m, lambdas, us, zs, &Tolerances::default())
        .expect("generated parameters are valid")
}

/// Inputs `(Λ, U, Ξ₂)` satisfying the block Toeplitz conditions.
///
/// Even draws take all three as functions of one Hermitian seed (which makes
/// the off-diagonal block vanish); odd draws use a scalar phase for `U` with
/// unrelated `Λ` and `Ξ₂`, which gives a genuinely Toeplitz state.
pub fn random_toeplitz_inputs<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    if rng.random_bool(0.5) {
        let seed = random_hermitian(rng, m);
        let spectrum = crate::linalg::herm_eig(&seed, &Tolerances::default())
            .expect("Hermitian seed diagonalizes");
        let shift = spectrum.min();
        let weights: Vec<f64> = spectrum
            .eigenvalues
            .iter()
            .map(|x| x - shift + 0.1)
            .collect();
        let total: f64 = weights.iter().sum();
        let l = spectrum.map_real(|x| 0.5 * (x - shift + 0.1) / total);
        let freq = rng.random_range(0.1..2.0);
        let u = spectrum.map(|x| Complex64::from_polar(1.0, freq * x));
        let xi = spectrum.map_real(|x| (x - shift) * 0.5 + 0.05);
        (hermitian_part(&l), u, hermitian_part(&xi))
    } else {
        let l = random_psd_trace(rng, m, 0.5);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let u = ComplexMatrix::identity(m, m) * Complex64::from_polar(1.0, phase);
        let xi = random_angle(rng, m, 0.05, 1.5);
        (l, u, xi)
    }
}

/// Inputs `(U, Λ₁, Λ₂, Ξ₂)` satisfying the block Hankel conditions: all four
/// diagonal in one random basis, `U` with eigenvalues `±1`.
pub fn random_hankel_inputs<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let w = haar_unitary_with(rng, m);
    let in_basis = |d: &[f64]| hermitian_part(&(&w * diag_real(d) * w.adjoint()));
    let weights = random_simplex(rng, 2 * m);
    let signs: Vec<f64> = (0..m)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let angles: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.5)).collect();
    let u = &w * diag_real(&signs) * w.adjoint();
    (
        u,
        in_basis(&weights[..m]),
        in_basis(&weights[m..]),
        in_basis(&angles),
    )
}

/// `n − 1` blocks `Z_k = Z̃_k Ξ` whose normalized parts `Z̃_k` are normal,
/// simultaneously diagonal, and satisfy `Σ Z̃_k† Z̃_k = I`; `Ξ` is a random
/// invertible angle.
pub fn random_class3_normal_blocks<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
) -> BlockVector {
    let w = haar_unitary_with(rng, m);
    let k = n - 1;
    // per eigen-index, a random point on the unit sphere in ℂ^{n−1}
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); m]; k];
    for i in 0..m {
        let column: Vec<Complex64> = (0..k).map(|_| random_complex(rng)).collect();
        let norm = column.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (row, z) in entries.iter_mut().zip(column) {
            row[i] = z / norm;
        }
    }
    let xi = random_angle(rng, m, 0.1, 1.5);
    entries
        .into_iter()
        .map(|d| {
            let dm = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
            &w * dm * w.adjoint() * &xi
        })
        .collect()
}
