//! Adaptive quadrature for real- and complex-valued integrands.
//!
//! Two rules are available. The default is a globally adaptive 7/15-point
//! Gauss–Kronrod scheme with QUADPACK-style error scaling: it bisects the
//! subinterval with the largest error estimate until the total estimate
//! meets the tolerance. Adaptive Simpson with Richardson correction is kept
//! as an alternative rule.
//!
//! Integrands are fallible so that nested evaluations (a transform whose
//! integrand is itself a quadrature) propagate their failures.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{IdLawError, Result};

/// Values that can be integrated.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    GaussKronrod15,
    AdaptiveSimpson { max_depth: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Subinterval budget for Gauss–Kronrod, evaluation budget / 1000 for Simpson.
    pub max_subdivisions: usize,
    pub rule: QuadRule,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
            rule: QuadRule::GaussKronrod15,
        }
    }
}

impl QuadConfig {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Configuration for integrands evaluated inside another quadrature.
    pub fn nested(&self) -> Self {
        Self {
            abs_tol: (self.abs_tol * 0.1).max(1e-15),
            rel_tol: (self.rel_tol * 0.1).max(1e-15),
            ..*self
        }
    }

    fn target(&self, value_magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_magnitude)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<V> {
    pub value: V,
    pub abs_error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<V, F>(f: &mut F, a: f64, b: f64) -> Result<Panel<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = f_center.magnitude() * WGK[7];
    let mut fv1 = [V::default(); 7];
    let mut fv2 = [V::default(); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let scale = half.abs();
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        value: res_k * half,
        error: err,
    })
}

fn gauss_kronrod<V, F>(mut f: F, points: &[f64], cfg: &QuadConfig) -> Result<Quadrature<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod15(&mut f, w[0], w[1])?);
        }
    }
    let mut evaluations = 15 * heap.len();
    loop {
        let (value, error) = heap.iter().fold((V::default(), 0.0), |(v, e), p| {
            (v + p.value, e + p.error)
        });
        if error <= cfg.target(value.magnitude()) {
            return Ok(Quadrature {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if heap.len() >= cfg.max_subdivisions {
            return Err(IdLawError::QuadratureFailed {
                achieved: error,
                requested: cfg.target(value.magnitude()),
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(IdLawError::QuadratureFailed {
                achieved: error,
                requested: cfg.target(value.magnitude()),
            });
        }
        heap.push(kronrod15(&mut f, worst.a, mid)?);
        heap.push(kronrod15(&mut f, mid, worst.b)?);
        evaluations += 30;
    }
}

struct SimpsonState<'a, F> {
    f: &'a mut F,
    evaluations: usize,
    budget: usize,
    unresolved: f64,
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<V, F>(
    st: &mut SimpsonState<'_, F>,
    a: f64,
    b: f64,
    fa: V,
    fm: V,
    fb: V,
    whole: V,
    tol: f64,
    depth: u32,
) -> Result<V>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = (st.f)(lm)?;
    let frm = (st.f)(rm)?;
    st.evaluations += 2;
    let h = (b - a) / 12.0;
    let left = (fa + flm * 4.0 + fm) * h;
    let right = (fm + frm * 4.0 + fb) * h;
    let delta = left + right - whole;
    if delta.magnitude() <= 15.0 * tol {
        return Ok(left + right + delta * (1.0 / 15.0));
    }
    if depth == 0 || st.evaluations >= st.budget {
        st.unresolved += delta.magnitude() / 15.0;
        return Ok(left + right + delta * (1.0 / 15.0));
    }
    let l = simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

fn adaptive_simpson<V, F>(
    mut f: F,
    points: &[f64],
    max_depth: u32,
    cfg: &QuadConfig,
) -> Result<Quadrature<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let span: f64 = points.last().unwrap() - points[0];
    let mut st = SimpsonState {
        f: &mut f,
        evaluations: 0,
        budget: cfg.max_subdivisions.saturating_mul(1000),
        unresolved: 0.0,
    };
    let mut total = V::default();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let m = 0.5 * (a + b);
        let fa = (st.f)(a)?;
        let fm = (st.f)(m)?;
        let fb = (st.f)(b)?;
        st.evaluations += 3;
        let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
        let tol = cfg.abs_tol * (b - a) / span;
        total = total + simpson_step(&mut st, a, b, fa, fm, fb, whole, tol, max_depth)?;
    }
    let requested = cfg.target(total.magnitude());
    if st.unresolved > requested {
        return Err(IdLawError::QuadratureFailed {
            achieved: st.unresolved,
            requested,
        });
    }
    Ok(Quadrature {
        value: total,
        abs_error: st.unresolved,
        evaluations: st.evaluations,
    })
}

/// Integrates `f` over `[points[0], points[last]]`, treating interior
/// entries of `points` as known breakpoints (kinks or discontinuities).
pub fn integrate_with_points<V, F>(f: F, points: &[f64], cfg: &QuadConfig) -> Result<Quadrature<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    if points.len() < 2 || points.last().unwrap() <= &points[0] {
        return Ok(Quadrature {
            value: V::default(),
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    match cfg.rule {
        QuadRule::GaussKronrod15 => gauss_kronrod(f, points, cfg),
        QuadRule::AdaptiveSimpson { max_depth } => adaptive_simpson(f, points, max_depth, cfg),
    }
}

pub fn integrate<V, F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Quadrature<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    integrate_with_points(f, &[a, b], cfg)
}

/// Integrates over `[a, ∞)` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<V, F>(mut f: F, a: f64, cfg: &QuadConfig) -> Result<Quadrature<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let cfg = QuadConfig {
        rule: QuadRule::GaussKronrod15,
        ..*cfg
    };
    integrate(
        |t: f64| {
            if t >= 1.0 {
                return Ok(V::default());
            }
            let s = 1.0 - t;
            Ok(f(a + t / s)? * (1.0 / (s * s)))
        },
        0.0,
        1.0,
        &cfg,
    )
}

/// Convenience wrapper for infallible real integrands.
pub fn integrate_real<F>(mut f: F, points: &[f64], cfg: &QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_with_points(|x| Ok(f(x)), points, cfg).map(|q| q.value)
}
