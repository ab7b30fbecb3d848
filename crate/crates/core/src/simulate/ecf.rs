use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_beta, sample_map, sample_time_change_second_form, IdLawError, IntegralMap, Result,
    SimSpec, Samples,
};
use crate::quad::QuadConfig;

/// Horizon used for the maps on `(0, ∞)` unless the caller picks one.
pub const DEFAULT_S_MAX: f64 = 30.0;

/// Mean of `e^{i⟨y, X⟩}` over the samples, with separate standard errors
/// for the real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCF {
    pub y: Vec<Vec<f64>>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub se_re: Vec<f64>,
    pub se_im: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

impl EmpiricalCF {
    pub fn estimate(&self, k: usize) -> Complex64 {
        Complex64::new(self.re[k], self.im[k])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["y", "re", "im", "se_re", "se_im"])?;
        for k in 0..self.y.len() {
            w.write_record([
                join(&self.y[k]),
                self.re[k].to_string(),
                self.im[k].to_string(),
                self.se_re[k].to_string(),
                self.se_im[k].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Sample std (denominator `n − 1`) over `√n`.
fn standard_error(sum: f64, sum_sq: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (var / nf).sqrt()
}

pub fn empirical_cf(samples: &Samples, y_grid: &[Vec<f64>]) -> Result<EmpiricalCF> {
    if samples.is_empty() {
        return Err(IdLawError::EmptyInput("samples"));
    }
    if y_grid.is_empty() {
        return Err(IdLawError::EmptyInput("y grid"));
    }
    if let Some(y) = y_grid.iter().find(|y| y.len() != samples.dim) {
        return Err(IdLawError::DimensionMismatch {
            expected: samples.dim,
            got: y.len(),
        });
    }
    let n = samples.len();
    let stats: Vec<[f64; 4]> = y_grid
        .par_iter()
        .map(|y| {
            let mut acc = [0.0; 4];
            for row in samples.rows() {
                let a: f64 = y.iter().zip(row).map(|(u, x)| u * x).sum();
                let (s, c) = a.sin_cos();
                acc[0] += c;
                acc[1] += s;
                acc[2] += c * c;
                acc[3] += s * s;
            }
            acc
        })
        .collect();
    let nf = n as f64;
    let mut ecf = EmpiricalCF {
        y: y_grid.to_vec(),
        re: Vec::with_capacity(stats.len()),
        im: Vec::with_capacity(stats.len()),
        se_re: Vec::with_capacity(stats.len()),
        se_im: Vec::with_capacity(stats.len()),
        n,
        seed: samples.seed,
    };
    for [c, s, cc, ss] in stats {
        let mut z = Complex64::new(c / nf, s / nf);
        let r = z.norm();
        if r > 1.0 {
            z /= r;
        }
        ecf.re.push(z.re);
        ecf.im.push(z.im);
        ecf.se_re.push(standard_error(c, cc, n));
        ecf.se_im.push(standard_error(s, ss, n));
    }
    Ok(ecf)
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        f64::INFINITY.copysign(diff)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPoint {
    pub y: Vec<f64>,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub se_re: f64,
    pub se_im: f64,
    pub z_re: f64,
    pub z_im: f64,
}

impl McPoint {
    fn new(y: Vec<f64>, lhs: Complex64, rhs: Complex64, se_re: f64, se_im: f64) -> Self {
        Self {
            y,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            se_re,
            se_im,
            z_re: z_score(lhs.re - rhs.re, se_re),
            z_im: z_score(lhs.im - rhs.im, se_im),
        }
    }

    pub fn max_abs_z(&self) -> f64 {
        let m = self.z_re.abs().max(self.z_im.abs());
        if m.is_nan() {
            f64::INFINITY
        } else {
            m
        }
    }
}

/// Monte Carlo against quadrature, or sampler against sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub check: String,
    pub map: String,
    pub beta: Option<f64>,
    pub n: usize,
    pub seed: u64,
    pub s_max: Option<f64>,
    pub z_max: f64,
    pub points: Vec<McPoint>,
    pub max_abs_z: f64,
    pub pass: bool,
}

impl McReport {
    fn new(
        check: &str,
        map: IntegralMap,
        n: usize,
        seed: u64,
        s_max: Option<f64>,
        z_max: f64,
        points: Vec<McPoint>,
    ) -> Self {
        let max_abs_z = points.iter().map(McPoint::max_abs_z).fold(0.0, f64::max);
        Self {
            check: check.to_string(),
            map: map.name().to_string(),
            beta: map.beta(),
            n,
            seed,
            s_max,
            z_max,
            max_abs_z,
            pass: max_abs_z <= z_max,
            points,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["y", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "se_re", "se_im", "z_re", "z_im"])?;
        for p in &self.points {
            w.write_record([
                join(&p.y),
                p.lhs_re.to_string(),
                p.lhs_im.to_string(),
                p.rhs_re.to_string(),
                p.rhs_im.to_string(),
                p.se_re.to_string(),
                p.se_im.to_string(),
                p.z_re.to_string(),
                p.z_im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `y = 0.25, 0.5, …, 5` for `d = 1`. Otherwise ten points `0.5k·e₁` and ten
/// along the normalized diagonal.
pub fn default_mc_grid(dim: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        return (1..=20).map(|k| vec![0.25 * k as f64]).collect();
    }
    let diag = 1.0 / (dim as f64).sqrt();
    let mut grid = Vec::with_capacity(20);
    for k in 1..=10 {
        let mut y = vec![0.0; dim];
        y[0] = 0.5 * k as f64;
        grid.push(y);
    }
    for k in 1..=10 {
        grid.push(vec![0.5 * k as f64 * diag; dim]);
    }
    grid
}

fn check_z_max(z_max: f64) -> Result<()> {
    if !(z_max > 0.0) {
        return Err(IdLawError::InvalidSpec(format!("z_max = {z_max} must be > 0")));
    }
    Ok(())
}

/// Empirical CF of the sampled random integral against `exp` of the
/// quadrature exponent of the mapped law.
#[allow(clippy::too_many_arguments)]
pub fn mc_vs_quadrature(
    spec: &SimSpec,
    map: IntegralMap,
    y_grid: &[Vec<f64>],
    n: usize,
    seed: u64,
    z_max: f64,
    s_max: f64,
    cfg: &QuadConfig,
) -> Result<McReport> {
    check_z_max(z_max)?;
    let samples = sample_map(spec, map, s_max, n, seed)?;
    let ecf = empirical_cf(&samples, y_grid)?;
    let target = spec.exponent()?.mapped(map)?;
    let points = y_grid
        .par_iter()
        .enumerate()
        .map(|(k, y)| {
            let exact = target.eval_with(y, cfg)?.exp();
            Ok(McPoint::new(y.clone(), ecf.estimate(k), exact, ecf.se_re[k], ecf.se_im[k]))
        })
        .collect::<Result<Vec<_>>>()?;
    let horizon = map.has_infinite_horizon().then_some(s_max);
    Ok(McReport::new("mc_vs_quadrature", map, n, seed, horizon, z_max, points))
}

/// Two-sample z-scores `(a − b) / √(se_a² + se_b²)` per grid point.
pub fn two_sample_z(a: &EmpiricalCF, b: &EmpiricalCF) -> Result<Vec<McPoint>> {
    if a.y != b.y {
        return Err(IdLawError::InvalidSpec("empirical CFs use different grids".into()));
    }
    Ok((0..a.y.len())
        .map(|k| {
            McPoint::new(
                a.y[k].clone(),
                a.estimate(k),
                b.estimate(k),
                a.se_re[k].hypot(b.se_re[k]),
                a.se_im[k].hypot(b.se_im[k]),
            )
        })
        .collect())
}

/// `∫₀¹ t^{1/β} dY(t)` against `∫₀¹ t dY(t^β)` on [`default_mc_grid`], from
/// independent random streams.
pub fn time_change_equivalence(spec: &SimSpec, beta: f64, n: usize, seed: u64, z_max: f64) -> Result<McReport> {
    check_beta(beta)?;
    check_z_max(z_max)?;
    let grid = default_mc_grid(spec.dim);
    let first = sample_map(spec, IntegralMap::Jbeta(beta), 1.0, n, seed)?;
    let second = sample_time_change_second_form(spec, beta, n, seed)?;
    let points = two_sample_z(&empirical_cf(&first, &grid)?, &empirical_cf(&second, &grid)?)?;
    Ok(McReport::new(
        "time_change_equivalence",
        IntegralMap::Jbeta(beta),
        n,
        seed,
        None,
        z_max,
        points,
    ))
}
