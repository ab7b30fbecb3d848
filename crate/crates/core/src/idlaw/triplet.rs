use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jump::radial_jump;
use super::measure::SpectralMeasure;
use super::validate::{ValidationReport, Violation, ViolationKind};
use crate::error::{IdLawError, Result};
use crate::quad::QuadConfig;

/// Lévy–Khintchine data `[a, S, M]` of an infinitely divisible law on `R^d`.
///
/// The jump integral is compensated on the closed unit ball `{‖x‖ ≤ 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyTriplet {
    pub dim: usize,
    pub shift: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    #[serde(default)]
    pub levy: SpectralMeasure,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn quadratic_form(m: &[Vec<f64>], y: &[f64]) -> f64 {
    m.iter()
        .zip(y)
        .map(|(row, yi)| yi * dot(row, y))
        .sum()
}

impl LevyTriplet {
    pub fn gaussian(cov: Vec<Vec<f64>>) -> Self {
        let dim = cov.len();
        Self {
            dim,
            shift: vec![0.0; dim],
            cov,
            levy: SpectralMeasure::empty(),
        }
    }

    pub fn drift(shift: Vec<f64>) -> Self {
        let dim = shift.len();
        Self {
            dim,
            shift,
            cov: vec![vec![0.0; dim]; dim],
            levy: SpectralMeasure::empty(),
        }
    }

    pub fn pure_jump(dim: usize, levy: SpectralMeasure) -> Self {
        Self {
            dim,
            shift: vec![0.0; dim],
            cov: vec![vec![0.0; dim]; dim],
            levy,
        }
    }

    /// Triplet of the convolution: shifts, covariances and measures add.
    pub fn plus(&self, other: &LevyTriplet) -> Result<LevyTriplet> {
        if self.dim != other.dim {
            return Err(IdLawError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(LevyTriplet {
            dim: self.dim,
            shift: self.shift.iter().zip(&other.shift).map(|(a, b)| a + b).collect(),
            cov: self
                .cov
                .iter()
                .zip(&other.cov)
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| a + b).collect())
                .collect(),
            levy: self.levy.plus(&other.levy),
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let d = self.dim;
        if d == 0 {
            v.push(Violation::new("dim", ViolationKind::Dimension, "dimension must be ≥ 1"));
        }
        if self.shift.len() != d {
            v.push(Violation::new(
                "shift",
                ViolationKind::Dimension,
                format!("shift has {} components, expected {d}", self.shift.len()),
            ));
        }
        if self.shift.iter().any(|x| !x.is_finite()) {
            v.push(Violation::new("shift", ViolationKind::Shape, "shift must be finite"));
        }
        if self.cov.len() != d || self.cov.iter().any(|r| r.len() != d) {
            v.push(Violation::new(
                "cov",
                ViolationKind::Dimension,
                format!("covariance must be {d}×{d}"),
            ));
        } else if d > 0 {
            let mut symmetric = true;
            for i in 0..d {
                for j in 0..i {
                    if (self.cov[i][j] - self.cov[j][i]).abs() > 1e-12 {
                        symmetric = false;
                    }
                }
            }
            if !symmetric {
                v.push(Violation::new("cov", ViolationKind::Symmetry, "covariance is not symmetric"));
            } else {
                let m = DMatrix::from_fn(d, d, |i, j| self.cov[i][j]);
                let min_eig = m
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                if !(min_eig >= -1e-10) {
                    v.push(Violation::new(
                        "cov",
                        ViolationKind::PositiveSemidefinite,
                        format!("smallest eigenvalue {min_eig:e} is negative"),
                    ));
                }
            }
        }
        v.extend(self.levy.validate(d));
        ValidationReport { violations: v }
    }

    /// Exponent without validating; callers must have validated `self`.
    pub(crate) fn exponent_unchecked(&self, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
        let mut phi = Complex64::new(-0.5 * quadratic_form(&self.cov, y), dot(y, &self.shift));
        for ray in &self.levy.rays {
            phi += radial_jump(&ray.radial, dot(y, &ray.dir), cfg)?;
        }
        Ok(phi)
    }

    pub fn check_dim(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim {
            return Err(IdLawError::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(())
    }
}

/// `Φ(y) = i⟨y,a⟩ − ½⟨y,Sy⟩ + ∫ (e^{i⟨y,x⟩} − 1 − i⟨y,x⟩·1{‖x‖≤1}) M(dx)`.
pub fn exponent_from_triplet(t: &LevyTriplet, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
    t.check_dim(y)?;
    let report = t.validate();
    if !report.is_valid() {
        return Err(IdLawError::InvalidTriplet(report));
    }
    t.exponent_unchecked(y, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idlaw::measure::{RadialMeasure, Segment};
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn gaussian_exponent() {
        let t = LevyTriplet::gaussian(vec![vec![1.0]]);
        let v = exponent_from_triplet(&t, &[2.0], &cfg()).unwrap();
        assert_eq!(v, Complex64::new(-2.0, 0.0));
    }

    #[test]
    fn zero_argument_gives_zero() {
        let t = LevyTriplet {
            dim: 1,
            shift: vec![0.7],
            cov: vec![vec![2.0]],
            levy: SpectralMeasure::single_ray(
                vec![1.0],
                RadialMeasure {
                    atoms: vec![super::super::measure::Atom { r: 0.5, m: 1.0 }],
                    segments: vec![Segment::new(0.0, 2.0, 1.0, -2.5)],
                    grid_tail: None,
                },
            ),
        };
        assert_eq!(exponent_from_triplet(&t, &[0.0], &cfg()).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn outer_atom_is_not_compensated() {
        let t = LevyTriplet::pure_jump(1, SpectralMeasure::single_ray(vec![1.0], RadialMeasure::atoms([(2.0, 1.0)])));
        let v = exponent_from_triplet(&t, &[PI / 2.0], &cfg()).unwrap();
        assert!((v - Complex64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unit_radius_atom_is_compensated() {
        let t = LevyTriplet::pure_jump(1, SpectralMeasure::single_ray(vec![1.0], RadialMeasure::atoms([(1.0, 1.0)])));
        let y = 0.8;
        let v = exponent_from_triplet(&t, &[y], &cfg()).unwrap();
        let want = Complex64::new(0.0, y).exp() - 1.0 - Complex64::new(0.0, y);
        assert!((v - want).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let t = LevyTriplet::gaussian(vec![vec![1.0]]);
        assert!(matches!(
            exponent_from_triplet(&t, &[1.0, 2.0], &cfg()),
            Err(IdLawError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn invalid_measure_is_an_error() {
        let t = LevyTriplet::pure_jump(
            1,
            SpectralMeasure::single_ray(
                vec![1.0],
                RadialMeasure {
                    segments: vec![Segment::new(0.0, 1.0, 1.0, -3.0)],
                    ..Default::default()
                },
            ),
        );
        assert!(matches!(
            exponent_from_triplet(&t, &[1.0], &cfg()),
            Err(IdLawError::InvalidTriplet(_))
        ));
    }

    #[test]
    fn validate_reports_each_violation() {
        let ok = LevyTriplet::gaussian(vec![vec![1.0]]);
        assert!(ok.validate().is_valid());

        let bad_seg = LevyTriplet::pure_jump(
            1,
            SpectralMeasure::single_ray(
                vec![1.0],
                RadialMeasure {
                    segments: vec![Segment::new(0.0, 1.0, 1.0, -3.0)],
                    ..Default::default()
                },
            ),
        );
        let r = bad_seg.validate();
        assert!(r.has(ViolationKind::Integrability));
        assert_eq!(r.violations[0].component, "levy.rays[0].segments[0]");

        let neg = LevyTriplet::pure_jump(1, SpectralMeasure::single_ray(vec![1.0], RadialMeasure::atoms([(1.0, -1.0)])));
        let r = neg.validate();
        assert_eq!(r.violations.len(), 1);
        assert!(r.has(ViolationKind::Positivity));

        let t = LevyTriplet {
            dim: 2,
            shift: vec![0.0, 0.0],
            cov: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            levy: SpectralMeasure::single_ray(vec![1.0, 1.0], RadialMeasure::atoms([(1.0, 1.0)])),
        };
        let r = t.validate();
        assert!(r.has(ViolationKind::PositiveSemidefinite));
        assert!(r.has(ViolationKind::UnitDirection));

        let overlap = LevyTriplet::pure_jump(
            1,
            SpectralMeasure::single_ray(
                vec![1.0],
                RadialMeasure {
                    segments: vec![Segment::new(0.0, 2.0, 1.0, 0.0), Segment::new(1.0, 3.0, 1.0, 0.0)],
                    ..Default::default()
                },
            ),
        );
        assert!(overlap.validate().has(ViolationKind::Overlap));
    }

    #[test]
    fn two_dimensional_compound_poisson() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = LevyTriplet::pure_jump(
            2,
            SpectralMeasure {
                rays: vec![
                    super::super::measure::Ray { dir: vec![s, s], radial: RadialMeasure::atoms([(2.0, 0.5)]) },
                    super::super::measure::Ray { dir: vec![1.0, 0.0], radial: RadialMeasure::atoms([(3.0, 1.5)]) },
                ],
            },
        );
        let y = [0.4, -1.1];
        let v = exponent_from_triplet(&t, &y, &cfg()).unwrap();
        let j1 = [2.0 * s, 2.0 * s];
        let j2 = [3.0, 0.0];
        let want = (Complex64::new(0.0, dot(&y, &j1)).exp() - 1.0) * 0.5
            + (Complex64::new(0.0, dot(&y, &j2)).exp() - 1.0) * 1.5;
        assert!((v - want).norm() < 1e-14);
    }
}
