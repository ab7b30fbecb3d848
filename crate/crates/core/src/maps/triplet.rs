//! `J^β` on Lévy triplets.
//!
//! Along a ray the image radial measure is `ρ_β = ∫₀¹ (ρ ∘ dilation by t^{1/β}) dt`,
//! whose tail is `N_β(r) = ∫₀¹ N(r t^{−1/β}) dt`. Atoms and infinite power
//! segments have images that are again power segments. Everything else is
//! tabulated on a logarithmic radius grid; there the tail is exact at the
//! nodes and cell midpoints, and within about `1e-4` of the cell mass next
//! to points where the image density falls to zero.

use serde::{Deserialize, Serialize};

use super::check_beta;
use crate::error::{IdLawError, Result};
use crate::idlaw::{
    log_moment, power_integral, GridTail, LevyTriplet, RadialMeasure, Ray, Segment, SpectralMeasure,
};
use crate::quad::{integrate_real, QuadConfig};

/// Grid nodes per decade of radius in the fallback representation.
pub const GRID_PER_DECADE: usize = 64;
/// Decades tabulated below the outermost breakpoint.
const GRID_DECADES: f64 = 9.0;

pub fn jbeta_triplet(t: &LevyTriplet, beta: f64) -> Result<LevyTriplet> {
    check_beta(beta)?;
    let report = t.validate();
    if !report.is_valid() {
        return Err(IdLawError::InvalidTriplet(report));
    }
    let mut outer = vec![0.0; t.dim];
    for ray in &t.levy.rays {
        // ∫_{‖x‖>1} x ‖x‖^{−1−β} dM
        let m = ray.radial.outer_power_moment(-beta);
        for (o, d) in outer.iter_mut().zip(&ray.dir) {
            *o += m * d;
        }
    }
    let k_shift = beta / (beta + 1.0);
    let k_cov = beta / (beta + 2.0);
    Ok(LevyTriplet {
        dim: t.dim,
        shift: t.shift.iter().zip(&outer).map(|(a, o)| k_shift * (a + o)).collect(),
        cov: t
            .cov
            .iter()
            .map(|row| row.iter().map(|v| k_cov * v).collect())
            .collect(),
        levy: jbeta_measure(&t.levy, beta)?,
    })
}

pub fn jbeta_measure(m: &SpectralMeasure, beta: f64) -> Result<SpectralMeasure> {
    check_beta(beta)?;
    let mut rays = Vec::new();
    for ray in &m.rays {
        for radial in jbeta_radial(&ray.radial, beta)? {
            rays.push(Ray {
                dir: ray.dir.clone(),
                radial,
            });
        }
    }
    Ok(SpectralMeasure { rays })
}

/// Image of one radial measure, as layers that share the ray's direction.
///
/// Segments on one ray may not overlap, so closed-form images with distinct
/// exponents go to separate layers: one per exponent. Components without a
/// closed-form image (finite segments, grid cells) form one tabulated layer.
pub fn jbeta_radial(radial: &RadialMeasure, beta: f64) -> Result<Vec<RadialMeasure>> {
    check_beta(beta)?;
    let mut exact: Vec<Segment> = radial
        .atoms
        .iter()
        .map(|a| Segment::new(0.0, a.r, a.m * beta * a.r.powf(-beta), beta - 1.0))
        .collect();
    let mut rest = RadialMeasure {
        grid_tail: radial.grid_tail.clone(),
        ..Default::default()
    };
    for s in &radial.segments {
        match infinite_segment_image(s, beta) {
            Some(img) => exact.extend(img),
            None => rest.segments.push(*s),
        }
    }
    let mut exponents: Vec<f64> = exact.iter().map(|s| s.p).collect();
    exponents.sort_by(f64::total_cmp);
    exponents.dedup();
    let mut layers: Vec<RadialMeasure> = exponents
        .iter()
        .map(|&p| {
            let same: Vec<Segment> = exact.iter().copied().filter(|s| s.p == p).collect();
            RadialMeasure {
                segments: merge(&same),
                ..Default::default()
            }
        })
        .collect();
    if !rest.is_empty() {
        layers.push(grid_image(&rest, beta)?);
    }
    Ok(layers)
}

fn infinite_segment_image(s: &Segment, beta: f64) -> Option<Vec<Segment>> {
    if s.hi.is_finite() {
        return None;
    }
    // q > 0 because an infinite segment has p < −1
    let q = beta - 1.0 - s.p;
    let mut out = Vec::with_capacity(2);
    if s.lo > 0.0 {
        out.push(Segment::new(0.0, s.lo, s.c * beta * s.lo.powf(-q) / q, beta - 1.0));
    }
    out.push(Segment::new(s.lo, f64::INFINITY, s.c * beta / q, s.p));
    Some(out)
}

/// Sums overlapping segments of one exponent into disjoint ones.
fn merge(pieces: &[Segment]) -> Vec<Segment> {
    let mut cuts: Vec<f64> = pieces.iter().flat_map(|s| [s.lo, s.hi]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out: Vec<Segment> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let c: f64 = pieces
            .iter()
            .filter(|s| s.lo <= a && s.hi >= b)
            .map(|s| s.c)
            .sum();
        if c == 0.0 {
            continue;
        }
        let p = pieces[0].p;
        match out.last_mut() {
            Some(last) if last.hi == a && last.c == c => last.hi = b,
            _ => out.push(Segment::new(a, b, c, p)),
        }
    }
    out
}

/// Image density at `u` of one power segment.
fn segment_image_density(s: &Segment, beta: f64, u: f64) -> f64 {
    if u >= s.hi {
        return 0.0;
    }
    let q = beta - 1.0 - s.p;
    let upper = if s.lo > 0.0 { (u / s.lo).min(1.0) } else { 1.0 };
    let lower = u / s.hi;
    if upper <= lower {
        return 0.0;
    }
    let inner = if q == 0.0 {
        (upper / lower).ln()
    } else {
        (upper.powf(q) - lower.powf(q)) / q
    };
    s.c * beta * u.powf(s.p) * inner
}

fn image_density(radial: &RadialMeasure, beta: f64, u: f64) -> f64 {
    let atoms: f64 = radial
        .atoms
        .iter()
        .filter(|a| u < a.r)
        .map(|a| a.m * beta * a.r.powf(-beta) * u.powf(beta - 1.0))
        .sum();
    atoms
        + radial
            .pieces()
            .map(|s| segment_image_density(&s, beta, u))
            .sum::<f64>()
}

/// `N_β(r) = ∫₀¹ N(r t^{−1/β}) dt`, the tail of the image radial measure at `r > 0`.
pub fn jbeta_tail(radial: &RadialMeasure, beta: f64, r: f64) -> Result<f64> {
    check_beta(beta)?;
    let cfg = QuadConfig::default().nested();
    let breaks = radial.breakpoints();
    if beta >= 1.0 {
        // t = s^β keeps the weight β s^{β−1} bounded
        let mut pts: Vec<f64> = breaks.iter().filter(|b| **b > r).map(|b| r / b).collect();
        pts.extend([0.0, 1.0]);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        integrate_real(
            |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                radial.tail(r / s) * beta * s.powf(beta - 1.0)
            },
            &pts,
            &cfg,
        )
    } else {
        let mut pts: Vec<f64> = breaks
            .iter()
            .filter(|b| **b > r)
            .map(|b| (r / b).powf(beta))
            .collect();
        pts.extend([0.0, 1.0]);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let inv = 1.0 / beta;
        integrate_real(
            |t: f64| {
                if t == 0.0 {
                    return 0.0;
                }
                radial.tail(r * t.powf(-inv))
            },
            &pts,
            &cfg,
        )
    }
}

fn local_exponent(radial: &RadialMeasure, beta: f64, a: f64, b: f64) -> Option<f64> {
    let fa = image_density(radial, beta, a);
    let fb = image_density(radial, beta, b);
    if fa > 0.0 && fb > 0.0 && fa.is_finite() && fb.is_finite() {
        Some((fb / fa).ln() / (b / a).ln())
    } else {
        None
    }
}

/// Exponent `p` with `∫_mid^hi u^p du = share · ∫_lo^hi u^p du`.
fn fit_cell_exponent(lo: f64, mid: f64, hi: f64, share: f64) -> Option<f64> {
    let frac = |p: f64| power_integral(p, mid, hi) / power_integral(p, lo, hi);
    let (mut a, mut b) = (-200.0, 200.0);
    if !(share > frac(a) && share < frac(b)) {
        return None;
    }
    // frac is increasing in p
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if frac(m) < share {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

fn grid_image(radial: &RadialMeasure, beta: f64) -> Result<RadialMeasure> {
    let breaks = radial.breakpoints();
    let r_max = *breaks.last().expect("fallback needs a finite breakpoint");
    let r_min = (r_max * 10f64.powf(-GRID_DECADES)).min(breaks[0] * 1e-2);

    let decades = (r_max / r_min).log10();
    let n = (decades * GRID_PER_DECADE as f64).ceil() as usize;
    let mut radii: Vec<f64> = (0..=n)
        .map(|k| r_min * (r_max / r_min).powf(k as f64 / n as f64))
        .collect();
    radii.extend(breaks.iter().copied());
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|b, a| (*b - *a).abs() <= 1e-9 * *a);
    // the dedup keeps the first of a close pair; pin the ends exactly
    *radii.last_mut().unwrap() = r_max;

    let node_tails = radii
        .iter()
        .map(|&r| jbeta_tail(radial, beta, r))
        .collect::<Result<Vec<_>>>()?;
    let last = *node_tails.last().unwrap();
    let mut tail: Vec<f64> = node_tails.iter().map(|t| (t - last).max(0.0)).collect();
    for k in (0..tail.len() - 1).rev() {
        tail[k] = tail[k].max(tail[k + 1]);
    }
    *tail.last_mut().unwrap() = 0.0;

    // Each cell's exponent reproduces the exact tail at its geometric midpoint.
    let exponents = radii
        .windows(2)
        .zip(node_tails.windows(2))
        .map(|(w, t)| {
            let mass = t[0] - t[1];
            let guess = {
                let ratio = w[1] / w[0];
                local_exponent(radial, beta, w[0] * ratio.powf(0.25), w[0] * ratio.powf(0.75))
            };
            if !(mass > 0.0) {
                return Ok(guess.unwrap_or(-1.0));
            }
            let mid = (w[0] * w[1]).sqrt();
            let upper = ((jbeta_tail(radial, beta, mid)? - t[1]) / mass).clamp(0.0, 1.0);
            Ok(fit_cell_exponent(w[0], mid, w[1], upper).or(guess).unwrap_or(-1.0))
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut segments = Vec::new();
    // head below the grid: power law continued from the first nodes
    let (h1, h2) = (0.25 * r_min, 0.5 * r_min);
    if let Some(p) = local_exponent(radial, beta, h1, h2) {
        let p = p.max(-3.0 + 1e-9);
        let c = image_density(radial, beta, h2) / h2.powf(p);
        if c > 0.0 && c.is_finite() {
            segments.push(Segment::new(0.0, r_min, c, p));
        }
    }
    Ok(RadialMeasure {
        atoms: Vec::new(),
        segments,
        grid_tail: Some(GridTail {
            radii,
            tail,
            exponents,
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMomentCheck {
    /// `∫_{‖x‖>1} log‖x‖ dM^{(β)}`.
    pub lhs: f64,
    /// `∫_{‖x‖>1} log‖x‖ dM`.
    pub rhs: f64,
    /// Both finite or both infinite.
    pub equivalent: bool,
}

pub fn log_moment_preserved(m: &SpectralMeasure, beta: f64) -> Result<LogMomentCheck> {
    check_beta(beta)?;
    let image = jbeta_measure(m, beta)?;
    let lhs = log_moment(&image);
    let rhs = log_moment(m);
    Ok(LogMomentCheck {
        lhs: lhs.value,
        rhs: rhs.value,
        equivalent: lhs.finite == rhs.finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idlaw::{Atom, CharExponent};
    use crate::maps::jbeta_exponent;
    use crate::quad::integrate_real;

    fn atom_ray(r: f64, m: f64) -> SpectralMeasure {
        SpectralMeasure::single_ray(vec![1.0], RadialMeasure::atoms([(r, m)]))
    }

    #[test]
    fn shift_and_covariance_factors() {
        let t = jbeta_triplet(&LevyTriplet::drift(vec![1.0]), 1.0).unwrap();
        assert_eq!(t.shift, vec![0.5]);
        let t = jbeta_triplet(&LevyTriplet::gaussian(vec![vec![1.0]]), 1.0).unwrap();
        assert!((t.cov[0][0] - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn atom_image() {
        let t = jbeta_triplet(&LevyTriplet::pure_jump(1, atom_ray(2.0, 1.0)), 1.0).unwrap();
        // ½·∫_{u>1} u^{−1} δ₂ = ¼
        assert!((t.shift[0] - 0.25).abs() < 1e-16);
        let r = &t.levy.rays[0].radial;
        for &u in &[0.1, 0.5, 1.0, 1.9] {
            assert!((r.tail(u) - (1.0 - u / 2.0)).abs() < 1e-15);
        }
        assert_eq!(r.tail(2.5), 0.0);
        // brute force: a^{(1)} = ∫₀¹ ∫ t·x·(1{|tx| ≤ 1} − 1{|x| ≤ 1}) M(dx) dt
        let shift = integrate_real(
            |t: f64| if 2.0 * t <= 1.0 { 2.0 * t } else { 0.0 },
            &[0.0, 0.5, 1.0],
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((shift - t.shift[0]).abs() < 1e-12);
    }

    fn consistency(t: &LevyTriplet, beta: f64, tol: f64) {
        let image = jbeta_triplet(t, beta).unwrap();
        assert!(image.validate().is_valid(), "{}", image.validate());
        let direct = CharExponent::from_triplet(image).unwrap();
        let phi = CharExponent::from_triplet(t.clone()).unwrap();
        let cfg = QuadConfig::default();
        for k in -10..=10 {
            let y = 0.5 * k as f64;
            let a = direct.at(y).unwrap();
            let b = jbeta_exponent(&phi, beta, &[y], &cfg).unwrap();
            assert!((a - b).norm() < tol, "β={beta} y={y}: {a} vs {b}");
        }
    }

    #[test]
    fn consistency_for_atoms_and_heavy_tails() {
        let mut radial = RadialMeasure::atoms([(0.5, 1.0), (2.0, 0.7)]);
        radial.segments.push(Segment::new(1.5, f64::INFINITY, 0.8, -2.5));
        let t = LevyTriplet {
            dim: 1,
            shift: vec![0.3],
            cov: vec![vec![0.4]],
            levy: SpectralMeasure::single_ray(vec![1.0], radial),
        };
        for &b in &[0.5, 1.0, 2.0, 3.0] {
            let img = jbeta_radial(&t.levy.rays[0].radial, b).unwrap();
            assert_eq!(img.len(), 2);
            assert!(img.iter().all(|l| l.grid_tail.is_none()));
            consistency(&t, b, 1e-7);
        }
    }

    #[test]
    fn consistency_for_grid_fallback() {
        let t = LevyTriplet::pure_jump(
            1,
            SpectralMeasure::single_ray(
                vec![1.0],
                RadialMeasure {
                    segments: vec![Segment::new(0.0, 3.0, 0.5, -1.5)],
                    ..Default::default()
                },
            ),
        );
        for &b in &[0.5, 1.0, 2.0] {
            let img = jbeta_radial(&t.levy.rays[0].radial, b).unwrap();
            assert!(img.iter().any(|l| l.grid_tail.is_some()));
            consistency(&t, b, 1e-5);
        }
    }

    #[test]
    fn iterated_transform_uses_grid() {
        let t = LevyTriplet::pure_jump(1, atom_ray(2.0, 1.0));
        let once = jbeta_triplet(&t, 1.0).unwrap();
        let twice = jbeta_triplet(&once, 2.0).unwrap();
        assert!(twice.levy.rays.iter().any(|r| r.radial.grid_tail.is_some()));
        let phi = CharExponent::from_triplet(t).unwrap();
        let nested = phi
            .mapped(crate::maps::IntegralMap::Jbeta(1.0))
            .unwrap()
            .mapped(crate::maps::IntegralMap::Jbeta(2.0))
            .unwrap();
        let direct = CharExponent::from_triplet(twice).unwrap();
        for &y in &[0.3, 1.0, 4.0] {
            let e = (direct.at(y).unwrap() - nested.at(y).unwrap()).norm();
            eprintln!("y={y} err={e:e}");
            assert!(e < 1e-5);
        }
    }

    #[test]
    fn image_tail_closed_forms() {
        let r = RadialMeasure::atoms([(2.0, 1.0)]);
        for &b in &[0.5, 1.0, 2.0] {
            for &u in &[0.2, 1.0, 1.7] {
                let want = 1.0 - (u / 2.0f64).powf(b);
                assert!((jbeta_tail(&r, b, u).unwrap() - want).abs() < 1e-10);
            }
        }
        let img = jbeta_radial(&r, 2.0).unwrap();
        assert_eq!(img.len(), 1);
        assert_eq!(img[0].segments.len(), 1);
        assert_eq!(img[0].atoms, Vec::<Atom>::new());
    }

    #[test]
    fn layers_are_valid_and_exact() {
        let mut radial = RadialMeasure::atoms([(1.0, 1.0), (3.0, 2.0)]);
        radial.segments.push(Segment::new(2.0, f64::INFINITY, 1.0, -1.5));
        let img = jbeta_radial(&radial, 0.5).unwrap();
        // exponents −0.5 (atoms and the head of the tail) and −1.5
        assert_eq!(img.len(), 2);
        for layer in &img {
            let mut v = Vec::new();
            layer.validate("x", &mut v);
            assert!(v.is_empty(), "{v:?}");
        }
        for &u in &[0.5, 1.5, 2.5, 4.0] {
            let got: f64 = img.iter().map(|l| l.tail(u)).sum();
            let want = jbeta_tail(&radial, 0.5, u).unwrap();
            assert!((got - want).abs() < 1e-12, "u={u}: {got} vs {want}");
        }
    }

    #[test]
    fn log_moment_examples() {
        let e = std::f64::consts::E;
        let c = log_moment_preserved(&atom_ray(e, 1.0), 1.0).unwrap();
        assert!((c.lhs - (-1.0f64).exp()).abs() < 1e-14);
        assert!((c.rhs - 1.0).abs() < 1e-15);
        assert!(c.equivalent);

        let c = log_moment_preserved(&atom_ray(0.7, 2.0), 2.0).unwrap();
        assert_eq!((c.lhs, c.rhs, c.equivalent), (0.0, 0.0, true));

        let heavy = SpectralMeasure::single_ray(
            vec![1.0],
            RadialMeasure {
                segments: vec![Segment::new(1.0, f64::INFINITY, 1.0, -2.0)],
                ..Default::default()
            },
        );
        for &b in &[0.5, 1.0, 3.0] {
            let c = log_moment_preserved(&heavy, b).unwrap();
            assert!(c.lhs.is_finite() && c.rhs.is_finite() && c.equivalent);
            assert!((c.rhs - 1.0).abs() < 1e-15);
            // image tail part on (1, ∞): β/(β+1) ∫ log u · u^{−2} du
            assert!((c.lhs - b / (b + 1.0)).abs() < 1e-14);
        }
    }
}
