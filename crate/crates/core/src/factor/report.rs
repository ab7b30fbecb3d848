use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IdLawError, Result};
use crate::idlaw::CharExponent;
use crate::quad::QuadConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPoint {
    pub input: Vec<f64>,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub residual: f64,
}

impl ReportPoint {
    pub fn new(input: Vec<f64>, lhs: Complex64, rhs: Complex64) -> Self {
        Self {
            input,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            residual: (lhs - rhs).norm(),
        }
    }

    pub fn lhs(&self) -> Complex64 {
        Complex64::new(self.lhs_re, self.lhs_im)
    }

    pub fn rhs(&self) -> Complex64 {
        Complex64::new(self.rhs_re, self.rhs_im)
    }
}

/// Pointwise comparison of two sides of an identity.
///
/// `pass` holds exactly when `max_residual < tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub identity: String,
    pub tolerance: f64,
    pub points: Vec<ReportPoint>,
    pub max_residual: f64,
    pub pass: bool,
}

pub(crate) fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(IdLawError::InvalidSpec(format!("tolerance {tol} must be > 0")));
    }
    Ok(())
}

impl FactorizationReport {
    pub fn from_points(identity: &str, tolerance: f64, points: Vec<ReportPoint>) -> Result<Self> {
        check_tolerance(tolerance)?;
        if points.is_empty() {
            return Err(IdLawError::EmptyInput("grid"));
        }
        // NaN residuals must fail the check
        let max_residual = points
            .iter()
            .map(|p| if p.residual.is_nan() { f64::INFINITY } else { p.residual })
            .fold(0.0, f64::max);
        Ok(Self {
            identity: identity.to_string(),
            tolerance,
            max_residual,
            pass: max_residual < tolerance,
            points,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per point; multi-dimensional inputs are joined with `;`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["input", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"])?;
        for p in &self.points {
            let input = p
                .input
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                input,
                p.lhs_re.to_string(),
                p.lhs_im.to_string(),
                p.rhs_re.to_string(),
                p.rhs_im.to_string(),
                p.residual.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Evaluates both sides on every grid point, in parallel.
pub fn compare_exponents(
    identity: &str,
    lhs: &CharExponent,
    rhs: &CharExponent,
    grid: &[Vec<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<FactorizationReport> {
    check_tolerance(tol)?;
    if grid.is_empty() {
        return Err(IdLawError::EmptyInput("grid"));
    }
    let points = grid
        .par_iter()
        .map(|y| {
            let a = lhs.eval_with(y, cfg)?;
            let b = rhs.eval_with(y, cfg)?;
            Ok(ReportPoint::new(y.clone(), a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    FactorizationReport::from_points(identity, tol, points)
}

/// 41 points on `[−5, 5]` for `d = 1`. Otherwise the origin plus radii
/// `1..=5` along 8 directions: the unit circle at 45° steps in the first
/// coordinate plane for `d = 2`, and `±e_i` plus four diagonals for `d ≥ 3`.
pub fn default_grid(dim: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        return (0..41).map(|k| vec![-5.0 + 0.25 * k as f64]).collect();
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if dim == 2 {
        for k in 0..8 {
            let a = std::f64::consts::FRAC_PI_4 * k as f64;
            dirs.push(vec![a.cos(), a.sin()]);
        }
    } else {
        let s = 1.0 / (dim as f64).sqrt();
        for i in 0..dim.min(4) {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[i] = sign;
                dirs.push(e);
            }
        }
        let mut k = 0;
        while dirs.len() < 8 {
            let v: Vec<f64> = (0..dim)
                .map(|i| if (k >> (i % 2)) & 1 == 0 { s } else { -s })
                .collect();
            dirs.push(v);
            k += 1;
        }
        dirs.truncate(8);
    }
    let mut grid = vec![vec![0.0; dim]];
    for d in &dirs {
        for r in 1..=5 {
            grid.push(d.iter().map(|x| x * r as f64).collect());
        }
    }
    grid
}
