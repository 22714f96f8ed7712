//! `validate`: seeded invariant suite.
//!
//! Trial `t` of invariant number `k` draws from a ChaCha8 stream seeded with
//! the global seed and positioned at stream `k · 2³² + t`, so a reported
//! counterexample can be replayed from `(seed, invariant, trial)` alone.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use densparam::block::{build_ajnm, build_vjnm, chain_unitary_block};
use densparam::entanglement::{circulant_min_pt_eig, partial_transpose_matrix};
use densparam::families::{
    bell_diagonal, circulant_rho, class3_polar_parts, class3_state, hankel_state,
    nonabelian_sphere_check, toeplitz_state,
};
use densparam::linalg::{
    block, expm_skew, herm_eigenvalues, matfun_psd, polar, unitarity_residual, MatFn,
};
use densparam::sample::{
    random_angle, random_block_params, random_class3_normal_blocks, random_hankel_inputs,
    random_simplex, random_single_params, random_skew_hermitian, random_state_matrix,
    random_toeplitz_inputs,
};
use densparam::single::{build_ajn, build_xj_single, chain_unitary};
use densparam::{
    assemble_rho_block, assemble_rho_single, ppt_check, BlockParams, ComplexMatrix, DensityMatrix,
    Method, Result, Structure, Subsystem, Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::params::ParamFile;

/// Outcome of one trial: the residual compared against the invariant's bound,
/// plus the parameters that produced it when they fit a parameter file.
struct Trial {
    residual: f64,
    params: Option<ParamFile>,
}

impl Trial {
    fn of(residual: f64) -> Self {
        Self {
            residual,
            params: None,
        }
    }

    fn with(residual: f64, params: ParamFile) -> Self {
        Self {
            residual,
            params: Some(params),
        }
    }
}

type TrialFn = fn(&mut ChaCha8Rng, &Tolerances) -> Result<Trial>;

struct Invariant {
    name: &'static str,
    bound: f64,
    run: TrialFn,
}

/// Sorted-spectrum distance.
fn spectrum_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Combined defect of a state: Hermiticity, negativity, trace, and distance
/// of its spectrum from `lambdas`.
fn state_defect(rho: &DensityMatrix, lambdas: &[f64], tol: &Tolerances) -> Result<f64> {
    let m = rho.matrix();
    let eig = herm_eigenvalues(m, tol)?;
    let herm = (m - m.adjoint()).norm();
    let neg = (-eig[0]).max(0.0);
    let tr = (densparam::linalg::trace(m).re - 1.0).abs();
    Ok(herm
        .max(neg)
        .max(tr)
        .max(spectrum_distance(eig, lambdas.to_vec())))
}

fn expm_unitary(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let n = rng.random_range(1..=6);
    let x = random_skew_hermitian(rng, n).scale(rng.random_range(0.1..5.0));
    Ok(Trial::of(unitarity_residual(&expm_skew(&x, tol)?)))
}

fn matfun_identities(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let m = rng.random_range(1..=5);
    let p = random_angle(rng, m, 0.0, 3.0);
    let c = matfun_psd(&p, MatFn::Cos, tol)?;
    let s = matfun_psd(&p, MatFn::Sin, tol)?;
    let r = matfun_psd(&p, MatFn::Sqrt, tol)?;
    let id = ComplexMatrix::identity(m, m);
    let pythagoras = (&c * &c + &s * &s - id).norm();
    let root = (&r * &r - &p).norm();
    Ok(Trial::of(pythagoras.max(root)))
}

fn polar_reconstruction(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let m = rng.random_range(1..=5);
    let z = densparam::linalg::ginibre(rng, m, m);
    let (p, u) = polar(&z, tol)?;
    let rel = (&p * &u - &z).norm() / z.norm().max(1.0);
    Ok(Trial::of(rel.max(unitarity_residual(&u))))
}

fn closed_vs_exp_single(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let n = rng.random_range(2..=6);
    let p = random_single_params(rng, n);
    let mut worst: f64 = 0.0;
    for j in 2..=n {
        let x = build_xj_single(p.z(j), n, j)?;
        let exact = expm_skew(&x, tol)?;
        worst = worst.max((build_ajn(p.z(j), n, j)? - exact).norm());
    }
    Ok(Trial::with(worst, ParamFile::from_single(&p)))
}

fn random_dims(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.random_range(2..=3), rng.random_range(1..=3))
}

fn closed_vs_exp_block(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let (n, m) = random_dims(rng);
    let p = random_block_params(rng, n, m);
    let mut worst: f64 = 0.0;
    for j in 2..=n {
        let v = build_vjnm(p.z(j), j, m, tol)?;
        let a = build_ajnm(p.z(j), n, j, m, Method::Exp, tol)?;
        let top = a.view((0, 0), (j * m, j * m)).into_owned();
        worst = worst.max((v - top).norm());
    }
    Ok(Trial::with(worst, ParamFile::from_block(&p)))
}

fn single_state(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let n = rng.random_range(1..=6);
    let p = random_single_params(rng, n);
    let rho = assemble_rho_single(&p, tol)?;
    let u = chain_unitary(&p)?;
    let defect = state_defect(&rho, p.lambdas(), tol)?.max(unitarity_residual(&u));
    Ok(Trial::with(defect, ParamFile::from_single(&p)))
}

fn block_state(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=3));
    let p = random_block_params(rng, n, m);
    let rho = assemble_rho_block(&p, tol)?;
    let u = chain_unitary_block(&p, None, tol)?;
    let defect = state_defect(&rho, p.lambdas(), tol)?.max(unitarity_residual(&u));
    Ok(Trial::with(defect, ParamFile::from_block(&p)))
}

fn m1_reduction(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let n = rng.random_range(2..=5);
    let single = random_single_params(rng, n);
    let scalar = |z: num_complex::Complex64| ComplexMatrix::from_element(1, 1, z);
    let blockvecs = single
        .zvecs()
        .iter()
        .map(|zj| zj.iter().copied().map(scalar).collect())
        .collect();
    let phases = (0..n)
        .map(|_| {
            scalar(num_complex::Complex64::from_polar(
                1.0,
                rng.random_range(0.0..6.3),
            ))
        })
        .collect();
    let p = BlockParams::new(n, 1, single.lambdas().to_vec(), phases, blockvecs, tol)?;
    let a = assemble_rho_single(&single, tol)?;
    let b = assemble_rho_block(&p, tol)?;
    Ok(Trial::with(
        (a.matrix() - b.matrix()).norm(),
        ParamFile::from_block(&p),
    ))
}

fn pt_spectrum(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let (n, m) = (rng.random_range(1..=3), rng.random_range(1..=3));
    let rho = random_state_matrix(rng, n * m);
    let first = partial_transpose_matrix(&rho, n, m, Subsystem::First)?;
    let second = partial_transpose_matrix(&rho, n, m, Subsystem::Second)?;
    let back = partial_transpose_matrix(&second, n, m, Subsystem::Second)?;
    let spectra = spectrum_distance(
        herm_eigenvalues(&first, tol)?,
        herm_eigenvalues(&second, tol)?,
    );
    Ok(Trial::of(spectra.max((back - rho).norm())))
}

fn bell_law(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let p = random_simplex(rng, 4);
    let p = [p[0], p[1], p[2], p[3]];
    let report = ppt_check(&bell_diagonal(&p)?, tol)?;
    let predicted = p.iter().all(|x| *x <= 0.5);
    // a wrong verdict off the boundary counts as a unit failure
    let wrong = report.is_ppt != predicted && !report.on_boundary();
    Ok(Trial::of(if wrong { 1.0 } else { 0.0 }))
}

fn circulant_closed_form(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let p = random_simplex(rng, 4);
    let p = [p[0], p[1], p[2], p[3]];
    let (alpha, beta) = (
        rng.random_range(0.0..FRAC_PI_2),
        rng.random_range(0.0..FRAC_PI_2),
    );
    let numeric = ppt_check(&circulant_rho(&p, alpha, beta)?, tol)?.min_pt_eig;
    Ok(Trial::of(
        (numeric - circulant_min_pt_eig(&p, alpha, beta)?).abs(),
    ))
}

/// Residual 1 when the structure verdict is wrong or the state is not PPT.
fn structured_verdict(rho: &DensityMatrix, tol: &Tolerances, off_diag: f64) -> Result<f64> {
    let expected_generic = if off_diag > 1e-6 {
        None
    } else {
        Some(Structure::BlockDiagonal)
    };
    let structure = densparam::detect_structure(rho, tol)?;
    let structure_ok = match expected_generic {
        Some(s) => s == structure,
        None => structure != Structure::BlockDiagonal && structure != Structure::None,
    };
    let ppt = ppt_check(rho, tol)?;
    Ok(if structure_ok && ppt.is_ppt { 0.0 } else { 1.0 })
}

fn toeplitz_hankel(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let m = rng.random_range(1..=3);
    let rho = if rng.random_bool(0.5) {
        let (l, u, xi) = random_toeplitz_inputs(rng, m);
        toeplitz_state(&l, &u, &xi, tol)?
    } else {
        let (u, l1, l2, xi) = random_hankel_inputs(rng, m);
        hankel_state(&u, &l1, &l2, &xi, tol)?
    };
    let off = block(rho.matrix(), 0, 1, m).norm();
    Ok(Trial::of(structured_verdict(&rho, tol, off)?))
}

fn class3_projector(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Trial> {
    let (n, m) = (rng.random_range(2..=3), rng.random_range(1..=3));
    let blocks = random_class3_normal_blocks(rng, n, m);
    let rho = class3_state(n, m, &blocks, tol)?;
    let scaled = rho.matrix().scale(m as f64);
    let idem = (&scaled * &scaled - &scaled).norm();
    let rank_gap = (rho.rank(tol)? as f64 - m as f64).abs();
    let sphere = if nonabelian_sphere_check(&class3_polar_parts(&blocks, tol)?, tol)? {
        0.0
    } else {
        1.0
    };
    Ok(Trial::of(idem.max(rank_gap).max(sphere)))
}

fn invariants() -> Vec<Invariant> {
    vec![
        Invariant {
            name: "expm_unitary",
            bound: 1e-10,
            run: expm_unitary,
        },
        Invariant {
            name: "matfun_identities",
            bound: 1e-10,
            run: matfun_identities,
        },
        Invariant {
            name: "polar_reconstruction",
            bound: 1e-10,
            run: polar_reconstruction,
        },
        Invariant {
            name: "closed_vs_exp_single",
            bound: 1e-9,
            run: closed_vs_exp_single,
        },
        Invariant {
            name: "closed_vs_exp_block",
            bound: 1e-9,
            run: closed_vs_exp_block,
        },
        Invariant {
            name: "single_state",
            bound: 1e-10,
            run: single_state,
        },
        Invariant {
            name: "block_state",
            bound: 1e-10,
            run: block_state,
        },
        Invariant {
            name: "m1_reduction",
            bound: 1e-12,
            run: m1_reduction,
        },
        Invariant {
            name: "pt_spectrum",
            bound: 1e-10,
            run: pt_spectrum,
        },
        Invariant {
            name: "bell_law",
            bound: 0.0,
            run: bell_law,
        },
        Invariant {
            name: "circulant_closed_form",
            bound: 1e-12,
            run: circulant_closed_form,
        },
        Invariant {
            name: "toeplitz_hankel",
            bound: 0.0,
            run: toeplitz_hankel,
        },
        Invariant {
            name: "class3_projector",
            bound: 1e-10,
            run: class3_projector,
        },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub invariant: String,
    pub seed: u64,
    pub trial: usize,
    pub residual: Option<f64>,
    pub bound: f64,
    pub error: Option<String>,
    pub params: Option<ParamFile>,
}

pub struct Validation {
    pub log: String,
    pub failure: Option<Counterexample>,
}

fn trial_rng(seed: u64, invariant: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((invariant as u64) << 32) | trial as u64);
    rng
}

pub fn validate(seed: u64, trials: usize, tol: &Tolerances) -> CliResult<Validation> {
    if trials == 0 {
        return Err(CliError::input("--trials: must be at least 1"));
    }
    let mut log = String::new();
    let mut failure = None;
    for (k, inv) in invariants().into_iter().enumerate() {
        let mut worst: f64 = 0.0;
        let mut failed = None;
        for t in 0..trials {
            let mut rng = trial_rng(seed, k, t);
            match (inv.run)(&mut rng, tol) {
                Ok(trial) if trial.residual <= inv.bound => worst = worst.max(trial.residual),
                Ok(trial) => {
                    failed = Some(Counterexample {
                        invariant: inv.name.to_string(),
                        seed,
                        trial: t,
                        residual: Some(trial.residual),
                        bound: inv.bound,
                        error: None,
                        params: trial.params,
                    });
                    break;
                }
                Err(e) => {
                    failed = Some(Counterexample {
                        invariant: inv.name.to_string(),
                        seed,
                        trial: t,
                        residual: None,
                        bound: inv.bound,
                        error: Some(e.to_string()),
                        params: None,
                    });
                    break;
                }
            }
        }
        match failed {
            None => {
                let _ = writeln!(
                    log,
                    "PASS {} ({trials} trials, max residual {worst:.3e}, bound {:e})",
                    inv.name, inv.bound
                );
            }
            Some(ce) => {
                let _ = writeln!(
                    log,
                    "FAIL {} (trial {}: {})",
                    inv.name,
                    ce.trial,
                    ce.error.clone().unwrap_or_else(|| format!(
                        "residual {:.3e}",
                        ce.residual.unwrap_or(f64::NAN)
                    ))
                );
                failure.get_or_insert(ce);
            }
        }
    }
    Ok(Validation { log, failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use densparam::linalg::diag_real;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let tol = Tolerances::default();
        let a = validate(42, 20, &tol).unwrap();
        assert!(a.failure.is_none(), "{}", a.log);
        let b = validate(42, 20, &tol).unwrap();
        assert_eq!(a.log, b.log);
    }

    #[test]
    fn zero_trials_is_an_input_error() {
        let err = match validate(1, 0, &Tolerances::default()) {
            Err(e) => e,
            Ok(_) => panic!("accepted"),
        };
        assert_eq!(err.code, crate::error::EXIT_INPUT);
    }

    #[test]
    fn streams_are_independent_per_trial() {
        let a: f64 = trial_rng(7, 1, 2).random();
        let b: f64 = trial_rng(7, 1, 3).random();
        let c: f64 = trial_rng(7, 1, 2).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn diagonal_state_has_no_defect() {
        let tol = Tolerances::default();
        let rho = DensityMatrix::new(diag_real(&[0.5, 0.3, 0.2]), &tol).unwrap();
        assert_eq!(state_defect(&rho, &[0.2, 0.3, 0.5], &tol).unwrap(), 0.0);
    }
}
