//! Parameter-grid sweeps of the two-qubit families.
//!
//! Rows run over the grid in row-major order with the last declared axis
//! varying fastest. Each row carries the minimal PT eigenvalue, the exact
//! PPT verdict where one is known in closed form, and for the circulant
//! family the verdict of the published inequalities.

use std::collections::BTreeMap;
use std::str::FromStr;

use densparam::entanglement::{
    circulant_conditions, circulant_conditions_exact, ppt_check, BOUNDARY_BAND,
};
use densparam::families::sep_threshold;
use densparam::{FamilySpec, Tolerances};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    PureP,
    Isotropic,
    IsotropicAlpha,
    Circulant,
    BellDiagonal,
}

impl FromStr for SweepFamily {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "pure_P" | "pure_p" => SweepFamily::PureP,
            "isotropic" => SweepFamily::Isotropic,
            "isotropic_alpha" => SweepFamily::IsotropicAlpha,
            "circulant" => SweepFamily::Circulant,
            "bell_diagonal" => SweepFamily::BellDiagonal,
            other => {
                return Err(CliError::input(format!(
                    "--family: unknown family '{other}' (expected pure_P, isotropic, \
                     isotropic_alpha, circulant or bell_diagonal)"
                )))
            }
        })
    }
}

impl SweepFamily {
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            SweepFamily::PureP => &["alpha"],
            SweepFamily::Isotropic => &["p"],
            SweepFamily::IsotropicAlpha => &["p", "alpha"],
            SweepFamily::Circulant => &["p1", "p2", "p3", "p4", "alpha", "beta"],
            SweepFamily::BellDiagonal => &["p1", "p2", "p3", "p4"],
        }
    }

    fn spec(self, v: &BTreeMap<&str, f64>) -> FamilySpec {
        let simplex = || [v["p1"], v["p2"], v["p3"], v["p4"]];
        match self {
            SweepFamily::PureP => FamilySpec::PureP { alpha: v["alpha"] },
            SweepFamily::Isotropic => FamilySpec::Isotropic { p: v["p"] },
            SweepFamily::IsotropicAlpha => FamilySpec::IsotropicAlpha {
                p: v["p"],
                alpha: v["alpha"],
            },
            SweepFamily::Circulant => FamilySpec::Circulant {
                p: simplex(),
                alpha: v["alpha"],
                beta: v["beta"],
            },
            SweepFamily::BellDiagonal => FamilySpec::BellDiagonal { p: simplex() },
        }
    }

    /// Exact PPT verdict.
    fn analytic(self, v: &BTreeMap<&str, f64>) -> Option<bool> {
        match self {
            SweepFamily::PureP => Some((2.0 * v["alpha"]).sin().abs() == 0.0),
            SweepFamily::Isotropic => Some(v["p"] <= 1.0 / 3.0),
            SweepFamily::IsotropicAlpha => {
                let (p, alpha) = (v["p"], v["alpha"]);
                // p ≤ 0 mixes towards the identity and never leaves PPT
                Some(p <= 0.0 || p <= sep_threshold(alpha))
            }
            SweepFamily::Circulant => circulant_conditions_exact(
                &[v["p1"], v["p2"], v["p3"], v["p4"]],
                v["alpha"],
                v["beta"],
            )
            .ok(),
            SweepFamily::BellDiagonal => Some(
                [v["p1"], v["p2"], v["p3"], v["p4"]]
                    .iter()
                    .all(|x| *x <= 0.5),
            ),
        }
    }

    fn published(self, v: &BTreeMap<&str, f64>) -> Option<bool> {
        match self {
            SweepFamily::Circulant => {
                circulant_conditions(&[v["p1"], v["p2"], v["p3"], v["p4"]], v["alpha"], v["beta"])
                    .ok()
            }
            _ => None,
        }
    }
}

/// `name=start:stop:count`; `count` evenly spaced points including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let bad = |why: &str| CliError::input(format!("--axis '{spec}': {why}"));
        let (name, range) = spec
            .split_once('=')
            .ok_or_else(|| bad("expected name=start:stop:count"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad("expected name=start:stop:count"));
        };
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(&format!("'{s}' is not a finite number")))
        };
        let count: usize = count
            .trim()
            .parse()
            .ok()
            .filter(|c| *c >= 1)
            .ok_or_else(|| bad("count must be a positive integer"))?;
        Ok(Axis {
            name: name.trim().to_string(),
            start: num(start)?,
            stop: num(stop)?,
            count,
        })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

/// `name=value`.
pub fn parse_fixed(spec: &str) -> CliResult<(String, f64)> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| CliError::input(format!("--fixed '{spec}': expected name=value")))?;
    let value = value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::input(format!("--fixed '{spec}': not a finite number")))?;
    Ok((name.trim().to_string(), value))
}

pub struct SweepPlan {
    family: SweepFamily,
    axes: Vec<Axis>,
    fixed: Vec<(&'static str, f64)>,
    axis_names: Vec<&'static str>,
}

impl SweepPlan {
    pub fn new(family: SweepFamily, axes: Vec<Axis>, fixed: Vec<(String, f64)>) -> CliResult<Self> {
        let params = family.parameters();
        let lookup = |name: &str, flag: &str| {
            params.iter().copied().find(|p| *p == name).ok_or_else(|| {
                CliError::input(format!(
                    "{flag}: '{name}' is not a parameter of this family (expected one of {})",
                    params.join(", ")
                ))
            })
        };
        let mut seen: Vec<&'static str> = Vec::new();
        let mut axis_names = Vec::new();
        for axis in &axes {
            let name = lookup(&axis.name, "--axis")?;
            if seen.contains(&name) {
                return Err(CliError::input(format!("--axis: '{name}' given twice")));
            }
            seen.push(name);
            axis_names.push(name);
        }
        let mut fixed_named = Vec::new();
        for (name, value) in &fixed {
            let name = lookup(name, "--fixed")?;
            if seen.contains(&name) {
                return Err(CliError::input(format!("--fixed: '{name}' given twice")));
            }
            seen.push(name);
            fixed_named.push((name, *value));
        }
        if let Some(missing) = params.iter().find(|p| !seen.contains(p)) {
            return Err(CliError::input(format!(
                "parameter '{missing}' needs an --axis or --fixed value"
            )));
        }
        if axes.is_empty() {
            return Err(CliError::input("--axis: at least one axis is required"));
        }
        Ok(Self {
            family,
            axes,
            fixed: fixed_named,
            axis_names,
        })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coordinates(&self, mut index: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.axes.len()];
        for (slot, axis) in coords.iter_mut().zip(&self.axes).rev() {
            *slot = axis.value(index % axis.count);
            index /= axis.count;
        }
        coords
    }

    fn evaluate(&self, index: usize, tol: &Tolerances) -> SweepRow {
        let coords = self.coordinates(index);
        let mut values: BTreeMap<&str, f64> = self.fixed.iter().copied().collect();
        values.extend(self.axis_names.iter().copied().zip(coords.iter().copied()));
        let min_pt_eig = self
            .family
            .spec(&values)
            .build(tol)
            .and_then(|rho| ppt_check(&rho, tol))
            .map(|r| r.min_pt_eig)
            .ok();
        let (analytic, published) = match min_pt_eig {
            Some(_) => (
                self.family.analytic(&values),
                self.family.published(&values),
            ),
            None => (None, None),
        };
        let status = match (min_pt_eig, analytic) {
            (None, _) => "invalid",
            (Some(e), _) if e.abs() < BOUNDARY_BAND => "boundary",
            (Some(_), None) => "n/a",
            (Some(e), Some(a)) if (e >= 0.0) == a => "agree",
            _ => "disagree",
        };
        SweepRow {
            coords,
            min_pt_eig,
            analytic,
            published,
            status,
        }
    }

    /// Evaluates every grid point in parallel; rows come back in grid order.
    pub fn run(&self, tol: &Tolerances) -> Vec<SweepRow> {
        (0..self.len())
            .into_par_iter()
            .map(|i| self.evaluate(i, tol))
            .collect()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = self.axis_names.iter().map(|s| s.to_string()).collect();
        h.extend(
            ["min_pt_eig", "analytic_ppt", "published_ppt", "status"]
                .iter()
                .map(|s| s.to_string()),
        );
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub min_pt_eig: Option<f64>,
    pub analytic: Option<bool>,
    pub published: Option<bool>,
    pub status: &'static str,
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_flag(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        let mut r: Vec<String> = self.coords.iter().copied().map(fmt_num).collect();
        r.push(self.min_pt_eig.map(fmt_num).unwrap_or_default());
        r.push(fmt_flag(self.analytic));
        r.push(fmt_flag(self.published));
        r.push(self.status.to_string());
        r
    }
}

pub fn write_csv<W: std::io::Write>(plan: &SweepPlan, rows: &[SweepRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| CliError::input(format!("output: {e}"));
    w.write_record(plan.header()).map_err(io_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("output: {e}")))?;
    Ok(())
}
