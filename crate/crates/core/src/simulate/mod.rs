//! Exact Monte Carlo for random integrals driven by finite-activity Lévy
//! processes.
//!
//! Sample `i` of a run with seed `s` draws from its own ChaCha8 stream keyed by
//! `(s, i)`, so the output does not depend on how many threads produce it.

mod ecf;

pub use ecf::{
    default_mc_grid, empirical_cf, mc_vs_quadrature, time_change_equivalence, two_sample_z,
    EmpiricalCF, McPoint, McReport, DEFAULT_S_MAX,
};

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{IdLawError, Result};
use crate::idlaw::{CharExponent, ClosedForm, JumpAtom, LawSpec, LevyTriplet};
use crate::maps::{check_beta, IntegralMap, InnerClock};
use crate::quad::{integrate_with_points, QuadConfig};

/// Discarded tail mass allowed beyond the simulation horizon.
pub const TAIL_LIMIT: f64 = 1e-6;

/// `Y(1) = γ + Σ^{1/2} Z + Σ_{k ≤ N} J_k` with `N ~ Poisson(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub dim: usize,
    pub drift: Vec<f64>,
    pub diffusion: Vec<Vec<f64>>,
    #[serde(default)]
    pub rate: f64,
    #[serde(default)]
    pub jumps: Vec<JumpAtom>,
}

impl SimSpec {
    pub fn gaussian(cov: Vec<Vec<f64>>) -> Result<Self> {
        let dim = cov.len();
        Self::new(vec![0.0; dim], cov, 0.0, Vec::new())
    }

    pub fn new(drift: Vec<f64>, diffusion: Vec<Vec<f64>>, rate: f64, jumps: Vec<JumpAtom>) -> Result<Self> {
        let s = Self {
            dim: drift.len(),
            drift,
            diffusion,
            rate,
            jumps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(IdLawError::InvalidSpec(m));
        let d = self.dim;
        if d == 0 || self.drift.len() != d {
            return bad(format!("drift must have {d} ≥ 1 components"));
        }
        if self.drift.iter().any(|x| !x.is_finite()) {
            return bad("drift must be finite".into());
        }
        if self.diffusion.len() != d || self.diffusion.iter().any(|r| r.len() != d) {
            return bad(format!("diffusion must be {d}×{d}"));
        }
        let t = LevyTriplet::gaussian(self.diffusion.clone());
        let report = t.validate();
        if !report.is_valid() {
            return Err(IdLawError::InvalidTriplet(report));
        }
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return bad(format!("rate {} must be ≥ 0", self.rate));
        }
        if self.rate > 0.0 || !self.jumps.is_empty() {
            let cf = ClosedForm::CompoundPoisson {
                rate: self.rate,
                jumps: self.jumps.clone(),
            };
            cf.validate().map_err(|e| IdLawError::InvalidSpec(e.to_string()))?;
            if cf.dim() != d {
                return bad(format!("jumps are {}-dimensional, expected {d}", cf.dim()));
            }
        }
        Ok(())
    }

    pub fn from_closed_form(cf: &ClosedForm) -> Result<Self> {
        cf.validate()?;
        match cf {
            ClosedForm::Gaussian { mean, cov } => Self::new(mean.clone(), cov.clone(), 0.0, Vec::new()),
            ClosedForm::Drift { shift } => {
                let d = shift.len();
                Self::new(shift.clone(), vec![vec![0.0; d]; d], 0.0, Vec::new())
            }
            ClosedForm::CompoundPoisson { rate, jumps } => {
                let d = cf.dim();
                Self::new(vec![0.0; d], vec![vec![0.0; d]; d], *rate, jumps.clone())
            }
            ClosedForm::LevyAreaBdlp { .. } => Err(IdLawError::Unsupported(
                "levy_area_bdlp has infinite jump activity and cannot be simulated exactly".into(),
            )),
        }
    }

    /// Requires a purely atomic Lévy measure. Atoms inside the closed unit
    /// ball are compensated in the triplet, so their mean moves into the drift.
    pub fn from_triplet(t: &LevyTriplet) -> Result<Self> {
        let report = t.validate();
        if !report.is_valid() {
            return Err(IdLawError::InvalidTriplet(report));
        }
        let mut drift = t.shift.clone();
        let mut atoms = Vec::new();
        for ray in &t.levy.rays {
            if !ray.radial.segments.is_empty() || ray.radial.grid_tail.is_some() {
                return Err(IdLawError::Unsupported(
                    "only atomic Lévy measures can be simulated exactly".into(),
                ));
            }
            for a in &ray.radial.atoms {
                let x: Vec<f64> = ray.dir.iter().map(|d| d * a.r).collect();
                if a.r <= 1.0 {
                    for (g, xi) in drift.iter_mut().zip(&x) {
                        *g -= a.m * xi;
                    }
                }
                atoms.push((x, a.m));
            }
        }
        let rate: f64 = atoms.iter().map(|(_, m)| m).sum();
        let jumps = atoms
            .into_iter()
            .map(|(x, m)| JumpAtom { x, p: m / rate })
            .collect();
        Self::new(drift, t.cov.clone(), rate, jumps)
    }

    pub fn from_law(law: &LawSpec) -> Result<Self> {
        match law {
            LawSpec::ClosedForm(cf) => Self::from_closed_form(cf),
            LawSpec::Triplet(t) => Self::from_triplet(t),
        }
    }

    pub fn exponent(&self) -> Result<CharExponent> {
        let g = CharExponent::closed_form(ClosedForm::Gaussian {
            mean: self.drift.clone(),
            cov: self.diffusion.clone(),
        })?;
        if self.rate > 0.0 {
            g.sum(&CharExponent::closed_form(ClosedForm::CompoundPoisson {
                rate: self.rate,
                jumps: self.jumps.clone(),
            })?)
        } else {
            Ok(g)
        }
    }

    /// Symmetric square root of the diffusion matrix, row-major.
    fn diffusion_root(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |i, j| self.diffusion[i][j]);
        let eig = SymmetricEigen::new(m);
        let root_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let root = &eig.eigenvectors * DMatrix::from_diagonal(&root_vals) * eig.eigenvectors.transpose();
        (0..d).map(|i| (0..d).map(|j| root[(i, j)]).collect()).collect()
    }
}

/// Row-major `n × dim` sample matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub dim: usize,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.values.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.dim)
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.rows().map(|r| r[k]).sum::<f64>() / self.len() as f64
    }

    /// Sample variance with the `n − 1` denominator.
    pub fn variance(&self, k: usize) -> f64 {
        let m = self.mean(k);
        let n = self.len() as f64;
        self.rows().map(|r| (r[k] - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)
    }

    /// Header `x1..xd`, one row per sample, shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record((1..=self.dim).map(|k| format!("x{k}")))?;
        for r in self.rows() {
            w.write_record(r.iter().map(|v| v.to_string()))?;
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

/// Random integral `∫ f(s) dY(c(s))` over `[0, horizon]`, where `c` has rate
/// `c′ ∈ [0, 1]`. The deterministic parts use closed-form moments.
#[derive(Debug, Clone, Copy)]
struct Plan {
    horizon: f64,
    kernel: Kernel,
    thinning: Option<InnerClock>,
    /// `∫ f c′`
    drift_factor: f64,
    /// `∫ f² c′`
    var_factor: f64,
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Power(f64),
    OneMinusSqrtPower(f64),
    Exp,
}

impl Kernel {
    fn at(&self, s: f64) -> f64 {
        match *self {
            Kernel::Power(a) => s.powf(a),
            Kernel::OneMinusSqrtPower(a) => (1.0 - s.sqrt()).powf(a),
            Kernel::Exp => (-s).exp(),
        }
    }
}

fn plan(map: IntegralMap, s_max: f64) -> Result<Plan> {
    map.validate()?;
    Ok(match map {
        IntegralMap::Jbeta(b) => Plan {
            horizon: 1.0,
            kernel: Kernel::Power(1.0 / b),
            thinning: None,
            drift_factor: b / (b + 1.0),
            var_factor: b / (b + 2.0),
        },
        IntegralMap::UbetaF(b) => {
            // ∫₀¹ (1 − √t)^a dt = 2 / ((a + 1)(a + 2))
            let a = 1.0 / b;
            Plan {
                horizon: 1.0,
                kernel: Kernel::OneMinusSqrtPower(a),
                thinning: None,
                drift_factor: 2.0 / ((a + 1.0) * (a + 2.0)),
                var_factor: 2.0 / ((2.0 * a + 1.0) * (2.0 * a + 2.0)),
            }
        }
        IntegralMap::Imap => Plan {
            horizon: s_max,
            kernel: Kernel::Exp,
            thinning: None,
            drift_factor: -(-s_max).exp_m1(),
            var_factor: -0.5 * (-2.0 * s_max).exp_m1(),
        },
        IntegralMap::IJbeta(b) => {
            let s = s_max;
            Plan {
                horizon: s,
                kernel: Kernel::Exp,
                thinning: Some(InnerClock::new(b)?),
                drift_factor: -(-s).exp_m1() + (-(1.0 + b) * s).exp_m1() / (1.0 + b),
                var_factor: -0.5 * (-2.0 * s).exp_m1() + (-(2.0 + b) * s).exp_m1() / (2.0 + b),
            }
        }
    })
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct Prepared<'a> {
    spec: &'a SimSpec,
    root: Vec<Vec<f64>>,
    cumulative: Vec<f64>,
}

impl<'a> Prepared<'a> {
    fn new(spec: &'a SimSpec) -> Result<Self> {
        spec.validate()?;
        let mut acc = 0.0;
        let cumulative = spec
            .jumps
            .iter()
            .map(|j| {
                acc += j.p;
                acc
            })
            .collect();
        Ok(Self {
            spec,
            root: spec.diffusion_root(),
            cumulative,
        })
    }

    fn pick_jump(&self, u: f64) -> &JumpAtom {
        let total = *self.cumulative.last().unwrap();
        let k = self.cumulative.partition_point(|&c| c <= u * total);
        &self.spec.jumps[k.min(self.spec.jumps.len() - 1)]
    }

    /// Drift and Gaussian parts; draws `dim` normals from `rng`.
    fn continuous_part(&self, rng: &mut ChaCha8Rng, drift_factor: f64, var_factor: f64, out: &mut [f64]) {
        let d = self.spec.dim;
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let scale = var_factor.sqrt();
        for i in 0..d {
            let g: f64 = (0..d).map(|j| self.root[i][j] * z[j]).sum();
            out[i] = drift_factor * self.spec.drift[i] + scale * g;
        }
    }

    /// Arrivals of a rate-`rate` Poisson process on `[0, horizon]`, by
    /// exponential gaps in increasing time.
    fn arrivals(&self, rng: &mut ChaCha8Rng, rate: f64, horizon: f64, mut visit: impl FnMut(&mut ChaCha8Rng, f64)) {
        if rate <= 0.0 {
            return;
        }
        let mut t = 0.0;
        loop {
            let gap: f64 = rng.sample(Exp1);
            t += gap / rate;
            if t > horizon {
                break;
            }
            visit(rng, t);
        }
    }

    fn sample_plan(&self, p: &Plan, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        self.continuous_part(rng, p.drift_factor, p.var_factor, out);
        let jumps = &self.spec.jumps;
        if jumps.is_empty() {
            return;
        }
        self.arrivals(rng, self.spec.rate, p.horizon, |rng, s| {
            let keep: f64 = rng.random();
            let pick: f64 = rng.random();
            if let Some(clock) = p.thinning {
                if keep >= clock.rate(s) {
                    return;
                }
            }
            let w = p.kernel.at(s);
            for (o, x) in out.iter_mut().zip(&self.pick_jump(pick).x) {
                *o += w * x;
            }
        });
    }

    /// `∫₀¹ t dY(t^β)`: jumps arrive at intensity `λβt^{β−1}`. Thinning from
    /// rate `λβ` for `β ≥ 1`, inversion `t = T^{1/β}` of uniform arrivals otherwise.
    fn sample_second_form(&self, beta: f64, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        self.continuous_part(rng, beta / (beta + 1.0), beta / (beta + 2.0), out);
        if self.spec.jumps.is_empty() {
            return;
        }
        let add = |t: f64, pick: f64, out: &mut [f64]| {
            for (o, x) in out.iter_mut().zip(&self.pick_jump(pick).x) {
                *o += t * x;
            }
        };
        if beta >= 1.0 {
            self.arrivals(rng, self.spec.rate * beta, 1.0, |rng, t| {
                let keep: f64 = rng.random();
                let pick: f64 = rng.random();
                if keep < t.powf(beta - 1.0) {
                    add(t, pick, out);
                }
            });
        } else {
            self.arrivals(rng, self.spec.rate, 1.0, |rng, t| {
                let pick: f64 = rng.random();
                add(t.powf(1.0 / beta), pick, out);
            });
        }
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(IdLawError::EmptyInput("sample count"));
    }
    Ok(())
}

fn run_samples<F>(dim: usize, n: usize, seed: u64, f: F) -> Samples
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let mut row = vec![0.0; dim];
            f(&mut rng, &mut row);
            row
        })
        .collect();
    Samples {
        dim,
        seed,
        values: rows.concat(),
    }
}

/// `n` exact draws of `∫ f dY` for any of the four maps. Maps on `(0, ∞)`
/// are truncated at `s_max`, which must pass [`check_horizon`].
pub fn sample_map(spec: &SimSpec, map: IntegralMap, s_max: f64, n: usize, seed: u64) -> Result<Samples> {
    check_count(n)?;
    let prepared = Prepared::new(spec)?;
    if map.has_infinite_horizon() {
        check_horizon(spec, map, s_max)?;
    }
    let p = plan(map, s_max)?;
    Ok(run_samples(spec.dim, n, seed, |rng, out| prepared.sample_plan(&p, rng, out)))
}

/// `∫₀¹ t^{1/β} dY(t)`.
pub fn sample_jbeta_integral(spec: &SimSpec, beta: f64, n: usize, seed: u64) -> Result<Samples> {
    check_beta(beta)?;
    sample_map(spec, IntegralMap::Jbeta(beta), 1.0, n, seed)
}

/// `∫₀^{s_max} e^{−s} dY(σ_β(s))`.
pub fn sample_time_changed_integral(
    spec: &SimSpec,
    beta: f64,
    s_max: f64,
    n: usize,
    seed: u64,
) -> Result<Samples> {
    check_beta(beta)?;
    sample_map(spec, IntegralMap::IJbeta(beta), s_max, n, seed)
}

/// `∫₀¹ t dY(t^β)`, drawn from other random streams than the first form.
pub fn sample_time_change_second_form(spec: &SimSpec, beta: f64, n: usize, seed: u64) -> Result<Samples> {
    check_beta(beta)?;
    check_count(n)?;
    let prepared = Prepared::new(spec)?;
    let mut s = run_samples(spec.dim, n, seed ^ 0x9E37_79B9_7F4A_7C15, |rng, out| {
        prepared.sample_second_form(beta, rng, out)
    });
    s.seed = seed;
    Ok(s)
}

/// Largest `|∫_{s_max}^∞ Φ(e^{−s} y) c′(s) ds|` over the default Monte Carlo
/// grid: the exponent mass the truncated sampler leaves out.
pub fn discarded_tail(spec: &SimSpec, map: IntegralMap, s_max: f64) -> Result<f64> {
    let phi = spec.exponent()?;
    let clock = map.clock();
    let cfg = QuadConfig::default();
    let pts: Vec<f64> = (0..=6).map(|k| s_max + 10.0 * k as f64).collect();
    let mut worst = 0.0f64;
    for y in default_mc_grid(spec.dim) {
        let q = integrate_with_points(
            |s: f64| {
                let z: Vec<f64> = y.iter().map(|v| v * (-s).exp()).collect();
                let rate = clock.map_or(1.0, |c| c.rate(s));
                Ok(phi.eval_with(&z, &cfg)? * rate)
            },
            &pts,
            &cfg,
        )?;
        worst = worst.max(q.value.norm());
    }
    Ok(worst)
}

pub fn check_horizon(spec: &SimSpec, map: IntegralMap, s_max: f64) -> Result<()> {
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(IdLawError::InvalidSpec(format!("s_max = {s_max} must be positive")));
    }
    let bound = discarded_tail(spec, map, s_max)?;
    if !(bound < TAIL_LIMIT) {
        return Err(IdLawError::TailBound {
            s_max,
            bound,
            limit: TAIL_LIMIT,
        });
    }
    Ok(())
}

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| IdLawError::InvalidSpec(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idlaw::{RadialMeasure, SpectralMeasure};

    fn cp(rate: f64, jumps: &[(f64, f64)]) -> SimSpec {
        SimSpec::new(
            vec![0.0],
            vec![vec![0.0]],
            rate,
            jumps.iter().map(|&(x, p)| JumpAtom { x: vec![x], p }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(SimSpec::new(vec![0.0], vec![vec![-1.0]], 0.0, vec![]).is_err());
        assert!(SimSpec::new(vec![0.0], vec![vec![1.0]], -1.0, vec![]).is_err());
        assert!(SimSpec::new(vec![0.0], vec![vec![0.0]], 1.0, vec![JumpAtom { x: vec![1.0], p: 0.4 }]).is_err());
        assert!(SimSpec::new(vec![0.0], vec![vec![0.0]], 1.0, vec![JumpAtom { x: vec![1.0, 2.0], p: 1.0 }]).is_err());
        assert!(SimSpec::from_closed_form(&ClosedForm::LevyAreaBdlp { u: 1.0 }).is_err());
    }

    #[test]
    fn triplet_conversion_moves_compensation_into_drift() {
        let t = LevyTriplet {
            dim: 1,
            shift: vec![0.2],
            cov: vec![vec![0.5]],
            levy: SpectralMeasure::single_ray(vec![1.0], RadialMeasure::atoms([(0.5, 2.0), (3.0, 1.0)])),
        };
        let s = SimSpec::from_triplet(&t).unwrap();
        assert!((s.drift[0] - (0.2 - 1.0)).abs() < 1e-15);
        assert!((s.rate - 3.0).abs() < 1e-15);
        let a = s.exponent().unwrap();
        let b = CharExponent::from_triplet(t).unwrap();
        for &y in &[0.3, 1.7, -4.0] {
            assert!((a.at(y).unwrap() - b.at(y).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn deterministic_drift_only() {
        let spec = SimSpec::new(vec![2.0], vec![vec![0.0]], 0.0, vec![]).unwrap();
        let s = sample_jbeta_integral(&spec, 3.0, 1, 7).unwrap();
        assert_eq!(s.values, vec![2.0 * 0.75]);
        let s = sample_time_changed_integral(&SimSpec::new(vec![1.0], vec![vec![0.0]], 0.0, vec![]).unwrap(), 1.0, 30.0, 3, 1).unwrap();
        for r in s.rows() {
            assert!((r[0] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_variance_and_mean() {
        let g = SimSpec::gaussian(vec![vec![1.0]]).unwrap();
        let s = sample_jbeta_integral(&g, 1.0, 200_000, 11).unwrap();
        let v = s.variance(0);
        // SE of a sample variance of a normal: σ²√(2/(n−1))
        let se = (1.0 / 3.0) * (2.0 / 199_999.0f64).sqrt();
        assert!((v - 1.0 / 3.0).abs() < 4.0 * se, "{v}");

        let c = cp(1.0, &[(2.0, 1.0)]);
        let s = sample_jbeta_integral(&c, 1.0, 200_000, 5).unwrap();
        // E = λ·2·∫t dt = 1, Var = λ·4·∫t² dt = 4/3
        let se = (4.0 / 3.0 / 200_000.0f64).sqrt();
        assert!((s.mean(0) - 1.0).abs() < 4.0 * se);

        let s = sample_time_changed_integral(&g, 1.0, 30.0, 200_000, 3).unwrap();
        let se = (1.0 / 6.0) * (2.0 / 199_999.0f64).sqrt();
        assert!((s.variance(0) - 1.0 / 6.0).abs() < 4.0 * se);
    }

    #[test]
    fn too_short_horizon_is_rejected() {
        let c = cp(2.0, &[(2.0, 0.5), (-2.0, 0.5)]);
        let r = sample_time_changed_integral(&c, 1.0, 3.0, 10, 1);
        assert!(matches!(r, Err(IdLawError::TailBound { .. })), "{r:?}");
        assert!(sample_time_changed_integral(&c, 1.0, 30.0, 10, 1).is_ok());
    }

    #[test]
    fn samples_do_not_depend_on_thread_count() {
        let c = SimSpec::new(vec![0.1], vec![vec![0.5]], 2.0, vec![JumpAtom { x: vec![2.0], p: 0.5 }, JumpAtom { x: vec![-2.0], p: 0.5 }]).unwrap();
        let a = with_workers(1, || sample_time_changed_integral(&c, 1.0, 30.0, 5_000, 42)).unwrap().unwrap();
        let b = with_workers(4, || sample_time_changed_integral(&c, 1.0, 30.0, 5_000, 42)).unwrap().unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        let c2 = sample_time_changed_integral(&c, 1.0, 30.0, 5_000, 43).unwrap();
        assert_ne!(a.values, c2.values);
    }

    #[test]
    fn longer_horizon_extends_the_same_stream() {
        let c = cp(2.0, &[(2.0, 0.5), (-2.0, 0.5)]);
        let a = sample_time_changed_integral(&c, 1.0, 30.0, 2_000, 9).unwrap();
        let b = sample_time_changed_integral(&c, 1.0, 40.0, 2_000, 9).unwrap();
        let worst = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-11, "{worst}");
    }

    #[test]
    fn csv_dump() {
        let spec = SimSpec::new(vec![1.0, -0.5], vec![vec![0.0; 2]; 2], 0.0, vec![]).unwrap();
        let s = sample_jbeta_integral(&spec, 1.0, 2, 0).unwrap();
        assert_eq!(s.to_csv().unwrap(), "x1,x2\n0.5,-0.25\n0.5,-0.25\n");
    }
}
