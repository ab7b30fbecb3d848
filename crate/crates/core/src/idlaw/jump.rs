//! The jump part of the Lévy–Khintchine exponent along one ray,
//! `∫ (e^{iuw} − 1 − iuw·1{u ≤ 1}) ρ(du)` with `w = ⟨y, θ⟩`.

use num_complex::Complex64;

use super::measure::{power_integral, RadialMeasure, Segment};
use crate::error::Result;
use crate::quad::{integrate_with_points, QuadConfig};

/// Below this value of `|u·w|` the kernel is integrated through its power series.
const SERIES_RADIUS: f64 = 2.0;
const SERIES_TERMS: usize = 60;

/// `e^{iz} − 1 − iz·[compensate]`, accurate for small `z`.
pub fn levy_kernel(z: f64, compensate: bool) -> Complex64 {
    let half = (0.5 * z).sin();
    let re = -2.0 * half * half;
    let im = if compensate {
        if z.abs() < 0.5 {
            // sin z − z
            let z2 = z * z;
            let mut term = -z * z2 / 6.0;
            let mut sum = term;
            for k in 2..12 {
                let k = k as f64;
                term *= -z2 / ((2.0 * k) * (2.0 * k + 1.0));
                sum += term;
            }
            sum
        } else {
            z.sin() - z
        }
    } else {
        z.sin()
    };
    Complex64::new(re, im)
}

/// `∫_a^b c·u^p · Σ_{n≥n0} (iuw)^n / n! du`, valid when `|w|·b ≤ SERIES_RADIUS`.
fn series_piece(c: f64, p: f64, a: f64, b: f64, w: f64, n0: usize) -> Complex64 {
    let iw = Complex64::new(0.0, w);
    let mut coef = Complex64::new(1.0, 0.0);
    for n in 1..n0 {
        coef = coef * iw / n as f64;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    for n in n0..n0 + SERIES_TERMS {
        coef = coef * iw / n as f64;
        let term = coef * power_integral(p + n as f64, a, b);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            small += 1;
            if small >= 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum * c
}

fn quad_piece(
    c: f64,
    p: f64,
    a: f64,
    b: f64,
    w: f64,
    compensate: bool,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    // One breakpoint per half-period keeps the panels well resolved.
    let period = std::f64::consts::PI / w.abs();
    let count = (((b - a) / period).ceil() as usize).clamp(1, 400);
    let pts: Vec<f64> = (0..=count)
        .map(|k| a + (b - a) * k as f64 / count as f64)
        .collect();
    let q = integrate_with_points(
        |u: f64| Ok(levy_kernel(u * w, compensate) * (c * u.powf(p))),
        &pts,
        cfg,
    )?;
    Ok(q.value)
}

/// `∫_R^∞ u^p e^{iuw} du` for `p < −1`, `R > 0`, by rotating the contour
/// into the half plane where `e^{iuw}` decays.
fn oscillatory_tail(p: f64, r: f64, w: f64, cfg: &QuadConfig) -> Result<Complex64> {
    let aw = w.abs();
    let sign = w.signum();
    let q = integrate_with_points(
        |x: f64| {
            let u = Complex64::new(r, sign * x / aw);
            Ok(u.powf(p) * (-x).exp())
        },
        &[0.0, 1.0, 4.0, 12.0, 30.0, 60.0],
        cfg,
    )?;
    let phase = Complex64::new(0.0, r * w).exp();
    Ok(Complex64::new(0.0, sign) * phase * q.value / aw)
}

/// Jump integral of a single power segment.
pub fn segment_jump(seg: &Segment, w: f64, cfg: &QuadConfig) -> Result<Complex64> {
    if w == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (c, p) = (seg.c, seg.p);
    let u_star = SERIES_RADIUS / w.abs();
    let mut total = Complex64::new(0.0, 0.0);

    // compensated range (lo, min(hi, 1)]
    if seg.lo < 1.0 {
        let (a, b) = (seg.lo, seg.hi.min(1.0));
        let split = b.min(u_star).max(a);
        if split > a {
            total += series_piece(c, p, a, split, w, 2);
        }
        if b > split {
            total += quad_piece(c, p, split, b, w, true, cfg)?;
        }
    }
    // uncompensated range (max(lo, 1), hi)
    if seg.hi > 1.0 {
        let a = seg.lo.max(1.0);
        let b = seg.hi;
        if b.is_infinite() {
            // ∫_a^∞ c u^p (e^{iuw} − 1) du; the contour starts where |uw| ≥ 2,
            // below that the series avoids cancellation at small w
            let split = u_star.max(a);
            if split > a {
                total += series_piece(c, p, a, split, w, 1);
            }
            let osc = oscillatory_tail(p, split, w, cfg)?;
            total += (osc - power_integral(p, split, f64::INFINITY)) * c;
        } else {
            let split = b.min(u_star).max(a);
            if split > a {
                total += series_piece(c, p, a, split, w, 1);
            }
            if b > split {
                total += quad_piece(c, p, split, b, w, false, cfg)?;
            }
        }
    }
    Ok(total)
}

/// Jump integral of a full radial measure along direction coordinate `w`.
pub fn radial_jump(radial: &RadialMeasure, w: f64, cfg: &QuadConfig) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    if w == 0.0 {
        return Ok(total);
    }
    for a in &radial.atoms {
        total += levy_kernel(a.r * w, a.r <= 1.0) * a.m;
    }
    for seg in radial.pieces() {
        total += segment_jump(&seg, w, cfg)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn brute(seg: &Segment, w: f64, upper: f64) -> Complex64 {
        // composite Simpson oracle on a fine uniform grid, split at 1
        let simpson = |a: f64, b: f64, n: usize, comp: bool| {
            let h = (b - a) / n as f64;
            let f = |u: f64| levy_kernel(u * w, comp) * (seg.c * u.powf(seg.p));
            let mut s = f(a) + f(b);
            for k in 1..n {
                let x = a + h * k as f64;
                s += f(x) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * (h / 3.0)
        };
        let mut total = Complex64::new(0.0, 0.0);
        if seg.lo < 1.0 {
            total += simpson(seg.lo, seg.hi.min(1.0), 200_000, true);
        }
        if seg.hi > 1.0 {
            total += simpson(seg.lo.max(1.0), seg.hi.min(upper), 2_000_000, false);
        }
        total
    }

    #[test]
    fn kernel_small_argument_matches_direct() {
        for &z in &[0.6, 1.0, -2.0, 0.49] {
            let direct = Complex64::new(0.0, z).exp() - 1.0 - Complex64::new(0.0, z);
            assert!((levy_kernel(z, true) - direct).norm() < 1e-15);
        }
        let z = 1e-4;
        let k = levy_kernel(z, true);
        assert!((k.re + z * z / 2.0 - z.powi(4) / 24.0).abs() < 1e-23);
        assert!((k.im + z * z * z / 6.0 - z.powi(5) / 120.0).abs() < 1e-27);
    }

    #[test]
    fn finite_segment_against_fine_simpson() {
        let cfg = QuadConfig::default();
        for seg in [
            Segment::new(0.2, 3.0, 1.5, -1.5),
            Segment::new(0.5, 0.9, 2.0, 1.0),
            Segment::new(1.5, 6.0, 0.7, 0.0),
        ] {
            for &w in &[0.3, 2.0, -5.0] {
                let got = segment_jump(&seg, w, &cfg).unwrap();
                let want = brute(&seg, w, f64::INFINITY);
                assert!((got - want).norm() < 1e-9, "{seg:?} w={w}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn segment_starting_at_origin_with_singular_density() {
        // density u^{-2.5} on (0, 1): the series handles the origin exactly.
        // Oracle: substitute u = v², integrand 2v·v^{-5}·k(v²w) is smooth.
        let seg = Segment::new(0.0, 1.0, 1.0, -2.5);
        let cfg = QuadConfig::default();
        for &w in &[0.5, 3.0, -7.0] {
            let got = segment_jump(&seg, w, &cfg).unwrap();
            let want = integrate(
                |v: f64| Ok(levy_kernel(v * v * w, true) * (2.0 * v.powf(-4.0))),
                0.0,
                1.0,
                &cfg,
            )
            .unwrap()
            .value;
            assert!((got - want).norm() < 1e-9, "w={w}: {got} vs {want}");
        }
    }

    #[test]
    fn infinite_segment_matches_truncated_integral_plus_tail() {
        // density u^{-3} on (1, ∞): check against Simpson up to U and the
        // asymptotic remainder ∫_U^∞ u^{-3}(e^{iuw} − 1) du ≈ −1/(2U²) + O(U^{-3}/w).
        let seg = Segment::new(1.0, f64::INFINITY, 1.0, -3.0);
        let cfg = QuadConfig::default();
        let w = 2.0;
        let upper = 400.0;
        let head = brute(&seg, w, upper);
        let remainder = Complex64::new(-0.5 / (upper * upper), 0.0);
        let got = segment_jump(&seg, w, &cfg).unwrap();
        assert!((got - (head + remainder)).norm() < 1e-7, "{got} vs {}", head + remainder);
    }

    #[test]
    fn infinite_segment_vanishes_at_small_argument() {
        // ∫_a^∞ (cos uw − 1) u^{-2.5} du = w^{1.5} [Γ(−1.5) cos(3π/4) − ∫_0^{aw} (cos v − 1) v^{-2.5} dv]
        let a = 1.5;
        let seg = Segment::new(a, f64::INFINITY, 1.0, -2.5);
        let cfg = QuadConfig::default();
        let stable = 4.0 * std::f64::consts::PI.sqrt() / 3.0 * (0.75 * std::f64::consts::PI).cos();
        for &w in &[1e-3, 1e-6, 1e-10] {
            let v = a * w;
            let head = -v.sqrt() + v.powf(2.5) / 60.0;
            let want = w.powf(1.5) * (stable - head);
            let got = segment_jump(&seg, w, &cfg).unwrap();
            assert!((got.re - want).abs() < 1e-8 * want.abs(), "w={w}: {} vs {want}", got.re);
            // leading odd term w ∫_a^∞ u^{-1.5} du
            assert!((got.im - 2.0 * w / a.sqrt()).abs() < 2.0 * w.powf(1.5), "w={w}: {}", got.im);
        }
    }

    #[test]
    fn heavy_segment_through_origin_region() {
        let seg = Segment::new(0.3, f64::INFINITY, 1.0, -2.0);
        let cfg = QuadConfig::default();
        let a = segment_jump(&seg, 1.5, &cfg).unwrap();
        let b = segment_jump(&seg, -1.5, &cfg).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
        assert!(a.re < 0.0);
    }
}
