//! Polar representation of Lévy spectral measures.
//!
//! A measure is a finite list of rays. Each ray carries a radial measure made
//! of point masses, power-density segments `c·u^p du` on `(lo, hi)`, and an
//! optional tabulated tail on a radius grid. Every grid cell is itself a
//! power segment whose mass matches the tabulated tail difference, so all
//! closed forms written for segments apply to grids as well.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::validate::{Violation, ViolationKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub r: f64,
    pub m: f64,
}

/// Density `c·u^p` on `(lo, hi)`; `hi` may be infinite (written as `null` in JSON).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub lo: f64,
    #[serde(serialize_with = "ser_inf", deserialize_with = "de_inf")]
    pub hi: f64,
    pub c: f64,
    pub p: f64,
}

fn ser_inf<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_none()
    } else {
        s.serialize_f64(*v)
    }
}

fn de_inf<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// `∫_a^b u^p du` for `0 ≤ a ≤ b ≤ ∞`; may be infinite.
pub fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if p == -1.0 {
        return if a == 0.0 || b.is_infinite() {
            f64::INFINITY
        } else {
            (b / a).ln()
        };
    }
    let e = p + 1.0;
    let upper = if b.is_infinite() {
        if e < 0.0 {
            0.0
        } else {
            return f64::INFINITY;
        }
    } else {
        b.powf(e)
    };
    let lower = if a == 0.0 {
        if e > 0.0 {
            0.0
        } else {
            return f64::INFINITY;
        }
    } else {
        a.powf(e)
    };
    (upper - lower) / e
}

/// `∫_a^b log(u)·u^p du` for `1 ≤ a ≤ b ≤ ∞`.
pub fn log_power_integral(p: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if p == -1.0 {
        if b.is_infinite() {
            return f64::INFINITY;
        }
        let (la, lb) = (a.ln(), b.ln());
        return 0.5 * (lb * lb - la * la);
    }
    let e = p + 1.0;
    let anti = |u: f64| u.powf(e) * (u.ln() / e - 1.0 / (e * e));
    if b.is_infinite() {
        if e >= 0.0 {
            return f64::INFINITY;
        }
        return -anti(a);
    }
    anti(b) - anti(a)
}

impl Segment {
    pub fn new(lo: f64, hi: f64, c: f64, p: f64) -> Self {
        Self { lo, hi, c, p }
    }

    pub fn density(&self, u: f64) -> f64 {
        if u > self.lo && u < self.hi {
            self.c * u.powf(self.p)
        } else {
            0.0
        }
    }

    /// Mass of `(a, b) ∩ (lo, hi)`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.c * power_integral(self.p, a.max(self.lo), b.min(self.hi))
    }

    pub fn tail(&self, r: f64) -> f64 {
        self.mass_between(r, f64::INFINITY)
    }

    /// `∫ min(1, u²) dρ` over the segment.
    pub fn truncated_second_moment(&self) -> f64 {
        self.c
            * (power_integral(self.p + 2.0, self.lo, self.hi.min(1.0))
                + power_integral(self.p, self.lo.max(1.0), self.hi))
    }

    /// `∫_{u>1} log(u) dρ`.
    pub fn log_moment(&self) -> f64 {
        self.c * log_power_integral(self.p, self.lo.max(1.0), self.hi)
    }

    /// `∫_{u>1} u^k dρ`.
    pub fn outer_power_moment(&self, k: f64) -> f64 {
        self.c * power_integral(self.p + k, self.lo.max(1.0), self.hi)
    }
}

/// Tabulated tail on a radius grid.
///
/// `tail[k]` is the mass this grid carries on `(radii[k], radii[last]]`, so the
/// last entry is zero. Cell `k` has density `c_k·u^{exponents[k]}` with `c_k`
/// fixed by the cell mass; a missing exponent list means `-1` everywhere,
/// i.e. a tail that is linear in `log r` between nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridTail {
    pub radii: Vec<f64>,
    pub tail: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<f64>,
}

impl GridTail {
    fn exponent(&self, k: usize) -> f64 {
        self.exponents.get(k).copied().unwrap_or(-1.0)
    }

    fn cell(&self, k: usize) -> Option<Segment> {
        let mass = self.tail[k] - self.tail[k + 1];
        if mass <= 0.0 {
            return None;
        }
        let (lo, hi) = (self.radii[k], self.radii[k + 1]);
        let p = self.exponent(k);
        Some(Segment::new(lo, hi, mass / power_integral(p, lo, hi), p))
    }

    pub fn cells(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.radii.len().saturating_sub(1)).filter_map(move |k| self.cell(k))
    }

    pub fn lo(&self) -> f64 {
        self.radii.first().copied().unwrap_or(0.0)
    }

    pub fn hi(&self) -> f64 {
        self.radii.last().copied().unwrap_or(0.0)
    }

    pub fn tail_at(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if n < 2 || r >= self.radii[n - 1] {
            return 0.0;
        }
        if r <= self.radii[0] {
            return self.tail[0];
        }
        let k = self.radii.partition_point(|&x| x <= r) - 1;
        let inner = self.cell(k).map_or(0.0, |s| s.mass_between(r, s.hi));
        self.tail[k + 1] + inner
    }

    fn validate(&self, at: &str, out: &mut Vec<Violation>) {
        let n = self.radii.len();
        if n < 2 || self.tail.len() != n {
            out.push(Violation::new(
                at,
                ViolationKind::Shape,
                format!("needs ≥ 2 radii and matching tail values, got {} and {}", n, self.tail.len()),
            ));
            return;
        }
        if !self.exponents.is_empty() && self.exponents.len() != n - 1 {
            out.push(Violation::new(
                at,
                ViolationKind::Shape,
                format!("expected {} cell exponents, got {}", n - 1, self.exponents.len()),
            ));
        }
        if !(self.radii[0] > 0.0) || self.radii.windows(2).any(|w| !(w[1] > w[0])) {
            out.push(Violation::new(
                at,
                ViolationKind::Positivity,
                "radii must be positive and strictly increasing",
            ));
        }
        if self.tail.iter().any(|t| !(t.is_finite() && *t >= 0.0))
            || self.tail.windows(2).any(|w| w[1] > w[0])
        {
            out.push(Violation::new(
                at,
                ViolationKind::Positivity,
                "tail values must be finite, non-negative and non-increasing",
            ));
        }
        if self.tail[n - 1] != 0.0 {
            out.push(Violation::new(at, ViolationKind::Shape, "last tail value must be 0"));
        }
        if self.exponents.iter().any(|p| !p.is_finite()) {
            out.push(Violation::new(at, ViolationKind::Shape, "cell exponents must be finite"));
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasure {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<Segment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_tail: Option<GridTail>,
}

impl RadialMeasure {
    pub fn atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self {
            atoms: atoms.into_iter().map(|(r, m)| Atom { r, m }).collect(),
            ..Self::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty() && self.grid_tail.is_none()
    }

    /// All density pieces: explicit segments followed by grid cells.
    pub fn pieces(&self) -> impl Iterator<Item = Segment> + '_ {
        self.segments
            .iter()
            .copied()
            .chain(self.grid_tail.iter().flat_map(|g| g.cells()))
    }

    /// `ρ((r, ∞))`.
    pub fn tail(&self, r: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.r > r).map(|a| a.m).sum();
        let segs: f64 = self.segments.iter().map(|s| s.tail(r)).sum();
        atoms + segs + self.grid_tail.as_ref().map_or(0.0, |g| g.tail_at(r))
    }

    pub fn density(&self, u: f64) -> f64 {
        self.pieces().map(|s| s.density(u)).sum()
    }

    pub fn truncated_second_moment(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.m * a.r.min(1.0).powi(2)).sum();
        atoms + self.pieces().map(|s| s.truncated_second_moment()).sum::<f64>()
    }

    pub fn log_moment(&self) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.r > 1.0)
            .map(|a| a.m * a.r.ln())
            .sum();
        atoms + self.pieces().map(|s| s.log_moment()).sum::<f64>()
    }

    pub fn outer_power_moment(&self, k: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.r > 1.0)
            .map(|a| a.m * a.r.powf(k))
            .sum();
        atoms + self.pieces().map(|s| s.outer_power_moment(k)).sum::<f64>()
    }

    /// Radii where the tail function has a jump or a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.atoms.iter().map(|a| a.r).collect();
        for s in &self.segments {
            pts.push(s.lo);
            pts.push(s.hi);
        }
        if let Some(g) = &self.grid_tail {
            pts.push(g.lo());
            pts.push(g.hi());
        }
        pts.retain(|x| x.is_finite() && *x > 0.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Largest finite radius that bounds a component's support or start.
    pub fn outer_radius(&self) -> f64 {
        self.breakpoints().last().copied().unwrap_or(0.0)
    }

    pub(crate) fn validate(&self, at: &str, out: &mut Vec<Violation>) {
        for (i, a) in self.atoms.iter().enumerate() {
            let here = format!("{at}.atoms[{i}]");
            if !(a.r.is_finite() && a.r > 0.0) {
                out.push(Violation::new(&here, ViolationKind::Positivity, format!("radius {} must be > 0", a.r)));
            }
            if !(a.m.is_finite() && a.m > 0.0) {
                out.push(Violation::new(&here, ViolationKind::Positivity, format!("mass {} must be > 0", a.m)));
            }
        }
        for (i, s) in self.segments.iter().enumerate() {
            let here = format!("{at}.segments[{i}]");
            if !(s.lo.is_finite() && s.lo >= 0.0 && s.hi > s.lo) {
                out.push(Violation::new(
                    &here,
                    ViolationKind::Shape,
                    format!("needs 0 ≤ lo < hi, got ({}, {})", s.lo, s.hi),
                ));
                continue;
            }
            if !(s.c.is_finite() && s.c > 0.0) {
                out.push(Violation::new(&here, ViolationKind::Positivity, format!("coefficient {} must be > 0", s.c)));
            }
            if !s.p.is_finite() {
                out.push(Violation::new(&here, ViolationKind::Shape, "exponent must be finite"));
                continue;
            }
            if s.lo == 0.0 && s.p <= -3.0 {
                out.push(Violation::new(
                    &here,
                    ViolationKind::Integrability,
                    format!("∫ r²·r^{} dr diverges at 0", s.p),
                ));
            }
            if s.hi.is_infinite() && s.p >= -1.0 {
                out.push(Violation::new(
                    &here,
                    ViolationKind::Integrability,
                    format!("∫ r^{} dr diverges at ∞", s.p),
                ));
            }
        }
        let mut spans: Vec<(f64, f64, String)> = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| (s.lo, s.hi, format!("{at}.segments[{i}]")))
            .collect();
        if let Some(g) = &self.grid_tail {
            let here = format!("{at}.grid_tail");
            g.validate(&here, out);
            if g.radii.len() >= 2 {
                spans.push((g.lo(), g.hi(), here));
            }
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in spans.windows(2) {
            if w[1].0 < w[0].1 {
                out.push(Violation::new(
                    &w[1].2,
                    ViolationKind::Overlap,
                    format!("overlaps {} on ({}, {})", w[0].2, w[1].0, w[0].1.min(w[1].1)),
                ));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawRay")]
pub struct Ray {
    pub dir: Vec<f64>,
    #[serde(flatten)]
    pub radial: RadialMeasure,
}

/// Wire form of [`Ray`]; spelled out so unknown keys are rejected, which
/// `flatten` cannot do.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRay {
    dir: Vec<f64>,
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    segments: Vec<Segment>,
    #[serde(default)]
    grid_tail: Option<GridTail>,
}

impl From<RawRay> for Ray {
    fn from(r: RawRay) -> Self {
        Ray {
            dir: r.dir,
            radial: RadialMeasure {
                atoms: r.atoms,
                segments: r.segments,
                grid_tail: r.grid_tail,
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralMeasure {
    #[serde(default)]
    pub rays: Vec<Ray>,
}

impl SpectralMeasure {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single_ray(dir: Vec<f64>, radial: RadialMeasure) -> Self {
        Self {
            rays: vec![Ray { dir, radial }],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rays.iter().all(|r| r.radial.is_empty())
    }

    /// Sum of measures: rays are concatenated.
    pub fn plus(&self, other: &SpectralMeasure) -> SpectralMeasure {
        SpectralMeasure {
            rays: self.rays.iter().chain(&other.rays).cloned().collect(),
        }
    }

    pub fn truncated_second_moment(&self) -> f64 {
        self.rays.iter().map(|r| r.radial.truncated_second_moment()).sum()
    }

    pub fn validate(&self, dim: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, ray) in self.rays.iter().enumerate() {
            let at = format!("levy.rays[{i}]");
            if ray.dir.len() != dim {
                out.push(Violation::new(
                    &at,
                    ViolationKind::Dimension,
                    format!("direction has {} components, expected {dim}", ray.dir.len()),
                ));
            } else {
                let norm = ray.dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !((norm - 1.0).abs() <= 1e-12) {
                    out.push(Violation::new(
                        &at,
                        ViolationKind::UnitDirection,
                        format!("direction norm {norm} differs from 1"),
                    ));
                }
            }
            ray.radial.validate(&at, &mut out);
        }
        out
    }
}

/// Outcome of a log-moment computation `∫_{‖x‖>1} log‖x‖ dM`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMoment {
    pub value: f64,
    pub finite: bool,
}

/// `∫_{‖x‖>1} log‖x‖ M(dx)`, closed form for every component.
pub fn log_moment(measure: &SpectralMeasure) -> LogMoment {
    let value: f64 = measure.rays.iter().map(|r| r.radial.log_moment()).sum();
    LogMoment {
        value,
        finite: value.is_finite(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn power_integral_cases() {
        assert!((power_integral(-2.0, 1.0, f64::INFINITY) - 1.0).abs() < 1e-15);
        assert!((power_integral(-1.0, 1.0, E) - 1.0).abs() < 1e-15);
        assert!(power_integral(-1.0, 1.0, f64::INFINITY).is_infinite());
        assert!(power_integral(-3.0, 0.0, 1.0).is_infinite());
        assert!((power_integral(0.5, 0.0, 4.0) - 16.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn log_moment_of_atom_at_e() {
        let m = SpectralMeasure::single_ray(vec![1.0], RadialMeasure::atoms([(E, 1.0)]));
        let lm = log_moment(&m);
        assert!((lm.value - 1.0).abs() < 1e-15 && lm.finite);
    }

    #[test]
    fn log_moment_ignores_inner_atoms() {
        let m = SpectralMeasure::single_ray(vec![1.0], RadialMeasure::atoms([(0.5, 3.0), (1.0, 2.0)]));
        assert_eq!(log_moment(&m), LogMoment { value: 0.0, finite: true });
    }

    #[test]
    fn log_moment_of_heavy_segment() {
        // ∫₁^∞ log(u) u^{-2} du = 1
        let m = SpectralMeasure::single_ray(
            vec![1.0],
            RadialMeasure {
                segments: vec![Segment::new(1.0, f64::INFINITY, 1.0, -2.0)],
                ..Default::default()
            },
        );
        let lm = log_moment(&m);
        assert!((lm.value - 1.0).abs() < 1e-14 && lm.finite);
    }

    #[test]
    fn log_moment_flags_divergence() {
        let m = SpectralMeasure::single_ray(
            vec![1.0],
            RadialMeasure {
                segments: vec![Segment::new(1.0, f64::INFINITY, 1.0, -1.0)],
                ..Default::default()
            },
        );
        assert!(!log_moment(&m).finite);
    }

    #[test]
    fn grid_cells_reproduce_tabulated_tail() {
        let g = GridTail {
            radii: vec![0.5, 1.0, 2.0, 4.0],
            tail: vec![3.0, 2.0, 0.5, 0.0],
            exponents: vec![-1.0, 0.5, -2.0],
        };
        for (r, t) in g.radii.iter().zip(&g.tail) {
            assert!((g.tail_at(*r) - t).abs() < 1e-14);
        }
        let total: f64 = g.cells().map(|c| c.mass_between(0.0, f64::INFINITY)).sum();
        assert!((total - 3.0).abs() < 1e-14);
        // tail is continuous and monotone inside cells
        let mut prev = g.tail_at(0.5);
        for k in 1..200 {
            let r = 0.5 + 3.5 * k as f64 / 200.0;
            let t = g.tail_at(r);
            assert!(t <= prev + 1e-15);
            prev = t;
        }
    }

    #[test]
    fn segment_json_uses_null_for_infinity() {
        let s = Segment::new(1.0, f64::INFINITY, 1.0, -2.0);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"lo":1.0,"hi":null,"c":1.0,"p":-2.0}"#);
        let back: Segment = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }
}
