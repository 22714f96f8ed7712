//! Parameter files.
//!
//! ```json
//! {"schema_version": "1", "kind": "block",
//!  "payload": {"n": 2, "m": 2, "lambdas": [0.1, 0.2, 0.3, 0.4],
//!              "z": [[[[[0.3, 0], [0, 0]], [[0, 0], [0.5, 0]]]]]}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major nested
//! arrays, angles are in radians.

use densparam::block::{assemble_rho_block_with, BlockVector};
use densparam::single::SingleParams;
use densparam::{
    assemble_rho_block, assemble_rho_single, BlockParams, ComplexMatrix, DensityMatrix, FamilySpec,
    Method, Tolerances,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::matrix_io::{parse_json, square_from_rows, to_rows, Rows};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamFile {
    pub schema_version: String,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Body {
    Single(SinglePayload),
    Block(BlockPayload),
    Family(FamilyPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinglePayload {
    /// Eigenvalues, sorted descending.
    pub lambdas: Vec<f64>,
    /// `z[j - 2]` holds the `j − 1` entries of `z_j`; omitted means all zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Vec<Complex64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Auto,
    Closed,
    Exp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockPayload {
    pub n: usize,
    pub m: usize,
    pub lambdas: Vec<f64>,
    /// One `m`×`m` unitary per block; omitted means identities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<Rows>>,
    /// `z[j - 2]` holds the `j − 1` blocks of `|Z_j⟩`; omitted means all zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Vec<Rows>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyPayload {
    #[serde(rename = "pure_P", alias = "pure_p")]
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
        u: Rows,
        lambda1: Rows,
        lambda2: Rows,
        xi2: Rows,
    },
    Toeplitz {
        lambda: Rows,
        u: Rows,
        xi2: Rows,
    },
    Hankel {
        u: Rows,
        lambda1: Rows,
        lambda2: Rows,
        xi2: Rows,
    },
    Class3 {
        n: usize,
        m: usize,
        z: Vec<Rows>,
    },
    NonabelianBloch {
        u: Rows,
        xi2: Rows,
    },
}

/// A state built from a parameter file.
pub struct Generated {
    pub rho: DensityMatrix,
    /// Eigenvalues the file prescribes, when it prescribes them.
    pub lambdas: Option<Vec<f64>>,
}

impl ParamFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let file: ParamFile = parse_json(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::input(format!(
                "schema_version: unsupported version '{}', expected '{SCHEMA_VERSION}'",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn new(body: Body) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            body,
        }
    }

    pub fn from_single(p: &SingleParams) -> Self {
        Self::new(Body::Single(SinglePayload {
            lambdas: p.lambdas().to_vec(),
            z: Some(p.zvecs().to_vec()),
        }))
    }

    pub fn from_block(p: &BlockParams) -> Self {
        Self::new(Body::Block(BlockPayload {
            n: p.n(),
            m: p.m(),
            lambdas: p.lambdas().to_vec(),
            unitaries: Some(p.local_unitaries().iter().map(to_rows).collect()),
            z: Some(
                p.blockvecs()
                    .iter()
                    .map(|zj| zj.iter().map(to_rows).collect())
                    .collect(),
            ),
            method: None,
        }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameter files serialize")
    }

    pub fn generate(&self, tol: &Tolerances) -> CliResult<Generated> {
        match &self.body {
            Body::Single(p) => {
                let params = p.to_params()?;
                let rho = assemble_rho_single(&params, tol)
                    .map_err(|e| CliError::from_lib("payload", e))?;
                Ok(Generated {
                    rho,
                    lambdas: Some(p.lambdas.clone()),
                })
            }
            Body::Block(p) => {
                let params = p.to_params(tol)?;
                let rho = match p.method.unwrap_or(MethodName::Auto) {
                    MethodName::Auto => assemble_rho_block(&params, tol),
                    MethodName::Closed => assemble_rho_block_with(&params, Method::Closed, tol),
                    MethodName::Exp => assemble_rho_block_with(&params, Method::Exp, tol),
                }
                .map_err(|e| CliError::from_lib("payload.z", e))?;
                Ok(Generated {
                    rho,
                    lambdas: Some(p.lambdas.clone()),
                })
            }
            Body::Family(f) => {
                let spec = f.to_spec()?;
                let rho = spec
                    .build(tol)
                    .map_err(|e| CliError::from_lib("payload", e))?;
                Ok(Generated { rho, lambdas: None })
            }
        }
    }
}

impl SinglePayload {
    pub fn to_params(&self) -> CliResult<SingleParams> {
        let n = self.lambdas.len();
        let zvecs = match &self.z {
            Some(z) => z.clone(),
            None => (2..=n)
                .map(|j| vec![Complex64::new(0.0, 0.0); j - 1])
                .collect(),
        };
        SingleParams::new(self.lambdas.clone(), zvecs).map_err(|e| {
            let field = match e {
                densparam::Error::InvalidSimplex(_) => "payload.lambdas",
                _ => "payload.z",
            };
            CliError::from_lib(field, e)
        })
    }
}

impl BlockPayload {
    pub fn to_params(&self, tol: &Tolerances) -> CliResult<BlockParams> {
        let (n, m) = (self.n, self.m);
        if n == 0 || m == 0 {
            return Err(CliError::input(format!(
                "payload.n/payload.m: dimensions must be positive, got {n}x{m}"
            )));
        }
        let unitaries = match &self.unitaries {
            Some(us) => us
                .iter()
                .enumerate()
                .map(|(k, u)| square_from_rows(u, &format!("payload.unitaries[{k}]")))
                .collect::<CliResult<Vec<_>>>()?,
            None => vec![ComplexMatrix::identity(m, m); n],
        };
        let blockvecs: Vec<BlockVector> = match &self.z {
            Some(z) => z
                .iter()
                .enumerate()
                .map(|(j, zj)| {
                    zj.iter()
                        .enumerate()
                        .map(|(k, blk)| square_from_rows(blk, &format!("payload.z[{j}][{k}]")))
                        .collect::<CliResult<Vec<_>>>()
                })
                .collect::<CliResult<Vec<_>>>()?,
            None => BlockParams::zero_blockvecs(n, m),
        };
        BlockParams::new(n, m, self.lambdas.clone(), unitaries, blockvecs, tol).map_err(|e| {
            let field = match e {
                densparam::Error::InvalidSimplex(_) => "payload.lambdas",
                densparam::Error::NotUnitary { .. } => "payload.unitaries",
                _ => "payload",
            };
            CliError::from_lib(field, e)
        })
    }
}

impl FamilyPayload {
    pub fn to_spec(&self) -> CliResult<FamilySpec> {
        let sq = |rows: &Rows, name: &str| square_from_rows(rows, &format!("payload.{name}"));
        Ok(match self {
            FamilyPayload::PureP { alpha } => FamilySpec::PureP { alpha: *alpha },
            FamilyPayload::Isotropic { p } => FamilySpec::Isotropic { p: *p },
            FamilyPayload::IsotropicAlpha { p, alpha } => FamilySpec::IsotropicAlpha {
                p: *p,
                alpha: *alpha,
            },
            FamilyPayload::Circulant { p, alpha, beta } => FamilySpec::Circulant {
                p: *p,
                alpha: *alpha,
                beta: *beta,
            },
            FamilyPayload::BellDiagonal { p } => FamilySpec::BellDiagonal { p: *p },
            FamilyPayload::TwoByM {
                u,
                lambda1,
                lambda2,
                xi2,
            } => FamilySpec::TwoByM {
                u: sq(u, "u")?,
                l1: sq(lambda1, "lambda1")?,
                l2: sq(lambda2, "lambda2")?,
                xi2: sq(xi2, "xi2")?,
            },
            FamilyPayload::Toeplitz { lambda, u, xi2 } => FamilySpec::Toeplitz {
                l: sq(lambda, "lambda")?,
                u: sq(u, "u")?,
                xi2: sq(xi2, "xi2")?,
            },
            FamilyPayload::Hankel {
                u,
                lambda1,
                lambda2,
                xi2,
            } => FamilySpec::Hankel {
                u: sq(u, "u")?,
                l1: sq(lambda1, "lambda1")?,
                l2: sq(lambda2, "lambda2")?,
                xi2: sq(xi2, "xi2")?,
            },
            FamilyPayload::Class3 { n, m, z } => FamilySpec::Class3 {
                n: *n,
                m: *m,
                blocks: z
                    .iter()
                    .enumerate()
                    .map(|(k, blk)| square_from_rows(blk, &format!("payload.z[{k}]")))
                    .collect::<CliResult<Vec<_>>>()?,
            },
            FamilyPayload::NonabelianBloch { u, xi2 } => FamilySpec::NonabelianBloch {
                u: sq(u, "u")?,
                xi2: sq(xi2, "xi2")?,
            },
        })
    }
}
