//! Random-integral mappings realized on characteristic exponents.
//!
//! | map      | random integral                         | exponent                                  |
//! |----------|-----------------------------------------|-------------------------------------------|
//! | `Jbeta`  | `∫₀¹ t^{1/β} dY(t)`                     | `∫₀¹ Φ(t^{1/β} y) dt`                     |
//! | `Imap`   | `∫₀^∞ e^{−s} dY(s)`                     | `∫₀¹ Φ(u y) / u du`                       |
//! | `UbetaF` | `∫₀¹ (1 − √t)^{1/β} dY(t)`              | `∫₀¹ Φ((1 − √t)^{1/β} y) dt`              |
//! | `IJbeta` | `∫₀^∞ e^{−s} dY(σ_β(s))`                | `∫₀¹ Φ(u y) (u^{−1} − u^{β−1}) du`        |

mod triplet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use triplet::{
    jbeta_measure, jbeta_radial, jbeta_tail, jbeta_triplet, log_moment_preserved,
    LogMomentCheck, GRID_PER_DECADE,
};

use crate::error::{IdLawError, Result};
use crate::idlaw::CharExponent;
use crate::quad::{integrate, integrate_with_points, QuadConfig};

pub fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(IdLawError::InvalidBeta(beta));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "beta", rename_all = "snake_case")]
pub enum IntegralMap {
    Jbeta(f64),
    Imap,
    UbetaF(f64),
    IJbeta(f64),
}

impl IntegralMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            IntegralMap::Imap => Ok(()),
            IntegralMap::Jbeta(b) | IntegralMap::UbetaF(b) | IntegralMap::IJbeta(b) => check_beta(*b),
        }
    }

    /// Parses the CLI vocabulary `jbeta | i | ubetaf | ijbeta`.
    pub fn parse(name: &str, beta: f64) -> Result<Self> {
        let map = match name {
            "jbeta" => IntegralMap::Jbeta(beta),
            "i" => IntegralMap::Imap,
            "ubetaf" => IntegralMap::UbetaF(beta),
            "ijbeta" => IntegralMap::IJbeta(beta),
            other => return Err(IdLawError::Unsupported(format!("unknown map '{other}'"))),
        };
        map.validate()?;
        Ok(map)
    }

    pub fn name(&self) -> &'static str {
        match self {
            IntegralMap::Jbeta(_) => "jbeta",
            IntegralMap::Imap => "i",
            IntegralMap::UbetaF(_) => "ubetaf",
            IntegralMap::IJbeta(_) => "ijbeta",
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            IntegralMap::Imap => None,
            IntegralMap::Jbeta(b) | IntegralMap::UbetaF(b) | IntegralMap::IJbeta(b) => Some(*b),
        }
    }

    /// Deterministic integrand `f` of the random integral `∫ f dY(clock)`.
    pub fn kernel(&self, t: f64) -> f64 {
        match self {
            IntegralMap::Jbeta(b) => t.powf(1.0 / b),
            IntegralMap::UbetaF(b) => (1.0 - t.sqrt()).powf(1.0 / b),
            IntegralMap::Imap | IntegralMap::IJbeta(_) => (-t).exp(),
        }
    }

    /// Time change driving the Lévy process, for the maps on `(0, ∞)`.
    pub fn clock(&self) -> Option<InnerClock> {
        match self {
            IntegralMap::IJbeta(b) => Some(InnerClock { beta: *b }),
            _ => None,
        }
    }

    pub fn has_infinite_horizon(&self) -> bool {
        matches!(self, IntegralMap::Imap | IntegralMap::IJbeta(_))
    }

    pub fn apply(&self, phi: &CharExponent, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
        match *self {
            IntegralMap::Jbeta(b) => jbeta_exponent(phi, b, y, cfg),
            IntegralMap::Imap => i_exponent(phi, y, cfg),
            IntegralMap::UbetaF(b) => ubeta_f_exponent(phi, b, y, cfg),
            IntegralMap::IJbeta(b) => i_jbeta_exponent(phi, b, y, cfg),
        }
    }
}

/// Deterministic inner clock `σ_β(s) = s + β^{−1}e^{−βs} − β^{−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerClock {
    pub beta: f64,
}

impl InnerClock {
    pub fn new(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { beta })
    }

    pub fn value(&self, s: f64) -> f64 {
        // s − (1 − e^{−βs})/β without cancellation for small s
        s + (-self.beta * s).exp_m1() / self.beta
    }

    pub fn rate(&self, s: f64) -> f64 {
        -(-self.beta * s).exp_m1()
    }
}

pub fn inner_clock(beta: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(IdLawError::NegativeTime(s));
    }
    Ok(InnerClock::new(beta)?.value(s))
}

pub fn inner_clock_rate(beta: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(IdLawError::NegativeTime(s));
    }
    Ok(InnerClock::new(beta)?.rate(s))
}

fn scaled(y: &[f64], s: f64) -> Vec<f64> {
    y.iter().map(|v| v * s).collect()
}

fn prepare(phi: &CharExponent, y: &[f64]) -> Result<bool> {
    if y.len() != phi.dim() {
        return Err(IdLawError::DimensionMismatch {
            expected: phi.dim(),
            got: y.len(),
        });
    }
    Ok(y.iter().any(|v| *v != 0.0))
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `log J^β(ν)^(y) = ∫₀¹ Φ_ν(t^{1/β} y) dt`.
///
/// For `β > 1` the kernel `t^{1/β}` has an unbounded derivative at 0, so the
/// integral is taken in `w = t^{1/β}`: `∫₀¹ Φ(w y) β w^{β−1} dw`.
pub fn jbeta_exponent(phi: &CharExponent, beta: f64, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
    check_beta(beta)?;
    if !prepare(phi, y)? {
        return Ok(ZERO);
    }
    let inner = cfg.nested();
    let q = if beta > 1.0 {
        integrate(
            |w: f64| Ok(phi.eval_unchecked(&scaled(y, w), &inner)? * (beta * w.powf(beta - 1.0))),
            0.0,
            1.0,
            cfg,
        )?
    } else {
        let inv = 1.0 / beta;
        integrate(
            |t: f64| phi.eval_unchecked(&scaled(y, t.powf(inv)), &inner),
            0.0,
            1.0,
            cfg,
        )?
    };
    Ok(q.value)
}

/// Finite-difference step for the inversion formula.
pub const INVERSE_STEP: f64 = 1e-5;

/// Recovers `Φ_ν(y)` from `Φ_μ = log J^β(ν)^` through
/// `d/ds [s·Φ_μ(s^{1/β} y)]` at `s = 1`: central differences with step
/// `h = 1e-5` and one Richardson level.
pub fn jbeta_inverse_exponent(
    phi_mu: &CharExponent,
    beta: f64,
    y: &[f64],
    cfg: &QuadConfig,
) -> Result<Complex64> {
    check_beta(beta)?;
    if !prepare(phi_mu, y)? {
        return Ok(ZERO);
    }
    let inner = cfg.nested().nested();
    let g = |s: f64| -> Result<Complex64> {
        Ok(phi_mu.eval_unchecked(&scaled(y, s.powf(1.0 / beta)), &inner)? * s)
    };
    let central = |h: f64| -> Result<Complex64> { Ok((g(1.0 + h)? - g(1.0 - h)?) / (2.0 * h)) };
    let coarse = central(INVERSE_STEP)?;
    let fine = central(0.5 * INVERSE_STEP)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Tail bound below which the integral over `(0, ε)` is replaced by its
/// midpoint estimate.
const SMALL_U_TAIL: f64 = 1e-11;

/// `∫₀¹ g(u) du` for integrands that are bounded or mildly singular at 0
/// but may stop decaying when the law leaves ID_log.
fn integrate_from_origin<F>(mut g: F, cfg: &QuadConfig) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut eps = 0.125;
    let tail = loop {
        let bound = (g(eps)? * eps).norm();
        if bound < SMALL_U_TAIL {
            break g(0.5 * eps)? * eps;
        }
        eps *= 0.25;
        if eps < 1e-300 {
            return Err(IdLawError::NotIdLog(format!(
                "integrand does not decay near u = 0 (|u·g(u)| = {bound:e} at u = {:e})",
                eps * 4.0
            )));
        }
    };
    let mut pts = vec![eps];
    let mut x = eps;
    while x < 0.1 {
        x *= 1e3;
        if x < 1.0 {
            pts.push(x);
        }
    }
    pts.push(1.0);
    Ok(tail + integrate_with_points(g, &pts, cfg)?.value)
}

fn require_id_log(phi: &CharExponent) -> Result<()> {
    if phi.infinite_log_moment_leaf() {
        return Err(IdLawError::NotIdLog(
            "a Lévy measure in the expression has infinite log-moment".into(),
        ));
    }
    Ok(())
}

/// `log I(ν)^(y) = ∫₀^∞ Φ_ν(e^{−s} y) ds = ∫₀¹ Φ_ν(u y) / u du`.
pub fn i_exponent(phi: &CharExponent, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
    if !prepare(phi, y)? {
        return Ok(ZERO);
    }
    require_id_log(phi)?;
    let inner = cfg.nested();
    integrate_from_origin(|u| Ok(phi.eval_unchecked(&scaled(y, u), &inner)? / u), cfg)
}

/// `∫₀¹ Φ((1 − √t)^{1/β} y) dt`, taken as `∫₀¹ Φ(v^{1/β} y) 2(1 − v) dv`
/// (and further `v = w^β` when `β > 1`).
pub fn ubeta_f_exponent(phi: &CharExponent, beta: f64, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
    check_beta(beta)?;
    if !prepare(phi, y)? {
        return Ok(ZERO);
    }
    let inner = cfg.nested();
    let q = if beta > 1.0 {
        integrate(
            |w: f64| {
                let wb = w.powf(beta);
                Ok(phi.eval_unchecked(&scaled(y, w), &inner)?
                    * (2.0 * (1.0 - wb) * beta * w.powf(beta - 1.0)))
            },
            0.0,
            1.0,
            cfg,
        )?
    } else {
        let inv = 1.0 / beta;
        integrate(
            |v: f64| Ok(phi.eval_unchecked(&scaled(y, v.powf(inv)), &inner)? * (2.0 * (1.0 - v))),
            0.0,
            1.0,
            cfg,
        )?
    };
    Ok(q.value)
}

/// `log I(J^β(ν))^(y) = ∫₀¹ Φ_ν(u y) (u^{−1} − u^{β−1}) du`.
pub fn i_jbeta_exponent(phi: &CharExponent, beta: f64, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
    check_beta(beta)?;
    if !prepare(phi, y)? {
        return Ok(ZERO);
    }
    require_id_log(phi)?;
    let inner = cfg.nested();
    integrate_from_origin(
        |u| Ok(phi.eval_unchecked(&scaled(y, u), &inner)? * ((-(beta * u.ln()).exp_m1()) / u)),
        cfg,
    )
}

/// Same quantity as [`i_jbeta_exponent`], computed in the time variable:
/// `∫₀^∞ Φ_ν(e^{−s} y) σ′_β(s) ds`, truncated where `e^{−s}|y|` is negligible.
pub fn i_jbeta_exponent_by_clock(
    phi: &CharExponent,
    beta: f64,
    y: &[f64],
    cfg: &QuadConfig,
) -> Result<Complex64> {
    let clock = InnerClock::new(beta)?;
    if !prepare(phi, y)? {
        return Ok(ZERO);
    }
    require_id_log(phi)?;
    let inner = cfg.nested();
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let horizon = 40.0 + norm.ln().max(0.0);
    let mut pts: Vec<f64> = (0..=8).map(|k| horizon * k as f64 / 8.0).collect();
    pts[0] = 0.0;
    let q = integrate_with_points(
        |s: f64| Ok(phi.eval_unchecked(&scaled(y, (-s).exp()), &inner)? * clock.rate(s)),
        &pts,
        cfg,
    )?;
    Ok(q.value)
}
