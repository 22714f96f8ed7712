//! `reproduce`: recompute a worked example and compare with its stated
//! matrix or verdict.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};
use std::fmt::Write as _;

use densparam::entanglement::{circulant_conditions, ppt_check, Structure};
use densparam::families::{
    bell_diagonal, circulant_params, circulant_published, circulant_rho, class3_polar_parts,
    class3_state, hankel_state, isotropic, isotropic_params, nonabelian_sphere_check, pure_p,
    pure_p_params, toeplitz_state, two_by_m,
};
use densparam::sample::{random_class3_normal_blocks, random_hankel_inputs, random_psd_trace};
use densparam::{assemble_rho_block, detect_structure, ComplexMatrix, Result, Tolerances};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::matrix_io::to_matrix_text;

pub const EXAMPLES: [&str; 7] = [
    "pure_P",
    "isotropic_threshold",
    "circulant_pi12",
    "bell_boundary",
    "toeplitz_demo",
    "hankel_demo",
    "class3_projector",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn residual(name: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self::new(
            name,
            residual <= bound,
            format!("residual {residual:.3e} (<= {bound:e})"),
        )
    }
}

pub struct Reproduction {
    pub log: String,
    pub checks: Vec<Check>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn section(log: &mut String, title: &str, m: &ComplexMatrix) {
    let _ = writeln!(log, "{title}:");
    log.push_str(&to_matrix_text(m));
}

pub fn reproduce(id: &str, seed: u64, tol: &Tolerances) -> CliResult<Reproduction> {
    let mut log = String::new();
    let checks = match id {
        "pure_P" => pure_p_example(&mut log, tol),
        "isotropic_threshold" => isotropic_example(&mut log, tol),
        "circulant_pi12" => circulant_example(&mut log, tol),
        "bell_boundary" => bell_example(&mut log, tol),
        "toeplitz_demo" => toeplitz_example(&mut log, seed, tol),
        "hankel_demo" => hankel_example(&mut log, seed, tol),
        "class3_projector" => class3_example(&mut log, seed, tol),
        other => {
            return Err(CliError::input(format!(
                "example: unknown id '{other}' (expected one of {})",
                EXAMPLES.join(", ")
            )))
        }
    }
    .map_err(|e| CliError::from_lib(id, e))?;
    Ok(Reproduction { log, checks })
}

fn pure_p_example(log: &mut String, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let alpha = PI / 5.0;
    let stated = pure_p(alpha)?;
    let computed = assemble_rho_block(&pure_p_params(alpha)?, tol)?;
    section(log, "stated P(pi/5)", stated.matrix());
    section(log, "assembled P(pi/5)", computed.matrix());
    checks.push(Check::residual(
        "P(alpha) matches its closed form",
        (stated.matrix() - computed.matrix()).norm(),
        1e-12,
    ));
    let m = computed.matrix();
    checks.push(Check::residual(
        "P(alpha) is a projector",
        (m * m - m).norm(),
        1e-12,
    ));
    let max = ppt_check(&assemble_rho_block(&pure_p_params(FRAC_PI_4)?, tol)?, tol)?;
    checks.push(Check::new(
        "P(pi/4) is maximally entangled",
        (max.min_pt_eig + 0.5).abs() <= 1e-12,
        format!("min PT eigenvalue {:.16e}, expected -0.5", max.min_pt_eig),
    ));
    let product = ppt_check(&assemble_rho_block(&pure_p_params(0.0)?, tol)?, tol)?;
    checks.push(Check::new(
        "P(0) is a product state",
        product.is_ppt,
        format!("min PT eigenvalue {:.3e}", product.min_pt_eig),
    ));
    Ok(checks)
}

fn isotropic_example(log: &mut String, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let p = 0.2;
    let stated = isotropic(p)?;
    let computed = assemble_rho_block(&isotropic_params(p)?, tol)?;
    section(log, "stated I(0.2)", stated.matrix());
    section(log, "assembled I(0.2)", computed.matrix());
    checks.push(Check::residual(
        "I(p) matches its closed form",
        (stated.matrix() - computed.matrix()).norm(),
        1e-12,
    ));
    let third = 1.0 / 3.0;
    let below = ppt_check(
        &assemble_rho_block(&isotropic_params(third - 1e-10)?, tol)?,
        tol,
    )?;
    let above = ppt_check(
        &assemble_rho_block(&isotropic_params(third + 1e-10)?, tol)?,
        tol,
    )?;
    let _ = writeln!(
        log,
        "min PT eigenvalue at 1/3 - 1e-10: {:.16e}\nmin PT eigenvalue at 1/3 + 1e-10: {:.16e}",
        below.min_pt_eig, above.min_pt_eig
    );
    checks.push(Check::new(
        "PT spectrum crosses zero at p = 1/3",
        below.min_pt_eig >= 0.0 && above.min_pt_eig < 0.0,
        format!("{:.3e} -> {:.3e}", below.min_pt_eig, above.min_pt_eig),
    ));
    Ok(checks)
}

fn circulant_example(log: &mut String, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let p = [0.125, 0.125, 0.125, 0.625];
    let beta = FRAC_PI_3;
    let edge = PI / 12.0;
    for (alpha, expect_ppt) in [(edge - 1e-6, true), (edge + 1e-3, false)] {
        let rho = assemble_rho_block(&circulant_params(&p, alpha, beta)?, tol)?;
        let report = ppt_check(&rho, tol)?;
        let stated = circulant_conditions(&p, alpha, beta)?;
        let _ = writeln!(
            log,
            "alpha = {alpha:.10}: min PT eigenvalue {:.16e}, stated conditions say {}",
            report.min_pt_eig,
            if stated { "separable" } else { "not separable" }
        );
        let label = if expect_ppt { "PPT" } else { "NPT" };
        checks.push(Check::new(
            format!("{label} at alpha = {alpha:.10}"),
            report.is_ppt == expect_ppt && !report.on_boundary(),
            format!("min PT eigenvalue {:.3e}", report.min_pt_eig),
        ));
        checks.push(Check::new(
            format!("stated conditions give {label} at alpha = {alpha:.10}"),
            stated == expect_ppt,
            String::new(),
        ));
    }
    let computed = circulant_rho(&p, edge, beta)?;
    section(log, "assembled rho(p; pi/12, pi/3)", computed.matrix());
    let published = circulant_published(&p, edge, beta);
    section(log, "published layout at the same parameters", &published);
    let _ = writeln!(
        log,
        "note: the published layout differs from the assembled state by {:.3e}; it is not \
         positive semidefinite for general (p, alpha, beta)",
        (published - computed.matrix()).norm()
    );
    Ok(checks)
}

fn bell_example(log: &mut String, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let q = [0.1, 0.2, 0.3, 0.4];
    let stated = bell_diagonal(&q)?;
    let computed = assemble_rho_block(&circulant_params(&q, FRAC_PI_4, FRAC_PI_4)?, tol)?;
    section(log, "stated rho(0.1, 0.2, 0.3, 0.4)", stated.matrix());
    section(log, "assembled at alpha = beta = pi/4", computed.matrix());
    checks.push(Check::residual(
        "Bell-diagonal form at alpha = beta = pi/4",
        (stated.matrix() - computed.matrix()).norm(),
        1e-12,
    ));
    let rest = |x: f64| (1.0 - x) / 3.0;
    for (top, expect) in [(0.5, "boundary"), (0.5 - 1e-3, "ppt"), (0.5 + 1e-3, "npt")] {
        let p = [top, rest(top), rest(top), rest(top)];
        let report = ppt_check(&bell_diagonal(&p)?, tol)?;
        let _ = writeln!(
            log,
            "p1 = {top}: min PT eigenvalue {:.16e} ({})",
            report.min_pt_eig,
            report.verdict()
        );
        checks.push(Check::new(
            format!("p1 = {top} is {expect}"),
            report.verdict() == expect,
            format!("got {}", report.verdict()),
        ));
    }
    Ok(checks)
}

fn toeplitz_example(log: &mut String, seed: u64, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = 2;
    let l = random_psd_trace(&mut rng, m, 0.5);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let u = ComplexMatrix::identity(m, m) * Complex64::from_polar(1.0, phase);
    let xi = densparam::sample::random_angle(&mut rng, m, 0.1, 1.4);
    let rho = toeplitz_state(&l, &u, &xi, tol)?;
    section(log, "block Toeplitz state", rho.matrix());
    let general = two_by_m(&u, &l, &l, &xi, tol)?;
    let structure = detect_structure(&rho, tol)?;
    let report = ppt_check(&rho, tol)?;
    let _ = writeln!(
        log,
        "structure: {}, min PT eigenvalue {:.16e}",
        structure.as_str(),
        report.min_pt_eig
    );
    Ok(vec![
        Check::residual(
            "agrees with the general 2 x m state",
            (rho.matrix() - general.matrix()).norm(),
            1e-10,
        ),
        Check::new(
            "classified as block Toeplitz",
            structure == Structure::BlockToeplitz,
            structure.as_str(),
        ),
        Check::new("PPT", report.is_ppt, format!("{:.3e}", report.min_pt_eig)),
    ])
}

fn hankel_example(log: &mut String, seed: u64, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u, l1, l2, xi) = random_hankel_inputs(&mut rng, 2);
    let rho = hankel_state(&u, &l1, &l2, &xi, tol)?;
    section(log, "block Hankel state", rho.matrix());
    let general = two_by_m(&u, &l1, &l2, &xi, tol)?;
    let structure = detect_structure(&rho, tol)?;
    let report = ppt_check(&rho, tol)?;
    let _ = writeln!(
        log,
        "structure: {}, min PT eigenvalue {:.16e}",
        structure.as_str(),
        report.min_pt_eig
    );
    Ok(vec![
        Check::residual(
            "agrees with the general 2 x m state",
            (rho.matrix() - general.matrix()).norm(),
            1e-10,
        ),
        Check::new(
            "classified as block Hankel",
            structure == Structure::BlockHankel,
            structure.as_str(),
        ),
        Check::new("PPT", report.is_ppt, format!("{:.3e}", report.min_pt_eig)),
    ])
}

fn class3_example(log: &mut String, seed: u64, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (3, 2);
    let blocks = random_class3_normal_blocks(&mut rng, n, m);
    let rho = class3_state(n, m, &blocks, tol)?;
    section(log, "class-3 state (n = 3, m = 2)", rho.matrix());
    let scaled = rho.matrix().scale(m as f64);
    let rank = rho.rank(tol)?;
    let parts = class3_polar_parts(&blocks, tol)?;
    Ok(vec![
        Check::residual(
            "m rho is idempotent",
            (&scaled * &scaled - &scaled).norm(),
            1e-10,
        ),
        Check::new("rank equals m", rank == m, format!("rank {rank}")),
        Check::new(
            "polar parts lie on the nonabelian sphere",
            nonabelian_sphere_check(&parts, tol)?,
            String::new(),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_passes() {
        for id in EXAMPLES {
            for seed in [0, 1, 42] {
                let r = reproduce(id, seed, &Tolerances::default()).unwrap();
                let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
                assert!(failed.is_empty(), "{id} seed {seed}: {failed:?}");
            }
        }
    }

    #[test]
    fn unknown_example() {
        let err = match reproduce("nope", 0, &Tolerances::default()) {
            Err(e) => e,
            Ok(_) => panic!("accepted"),
        };
        assert_eq!(err.code, crate::error::EXIT_INPUT);
    }
}
