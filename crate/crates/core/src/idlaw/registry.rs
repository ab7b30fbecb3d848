//! Named exponents with closed-form evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::measure::{Ray, RadialMeasure, SpectralMeasure};
use super::triplet::{dot, quadratic_form, LevyTriplet};
use crate::error::{IdLawError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpAtom {
    pub x: Vec<f64>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "closed_form", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosedForm {
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    Drift { shift: Vec<f64> },
    /// `λ·Σ p_j (e^{i⟨y, x_j⟩} − 1)`.
    CompoundPoisson { rate: f64, jumps: Vec<JumpAtom> },
    /// `1 − tu·coth(tu)`, one-dimensional.
    LevyAreaBdlp { u: f64 },
}

/// `x·coth(x)`, even and analytic at 0.
pub fn x_coth_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-2 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0
    } else {
        ax / ax.tanh()
    }
}

/// `log(x / sinh x)`, even, with stable small and large argument branches.
pub fn log_x_over_sinh_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-2 {
        let x2 = x * x;
        -x2 / 6.0 + x2 * x2 / 180.0 - x2 * x2 * x2 / 2835.0
    } else if ax > 20.0 {
        (2.0 * ax).ln() - ax - (-(-2.0 * ax).exp()).ln_1p()
    } else {
        (ax / ax.sinh()).ln()
    }
}

impl ClosedForm {
    pub fn dim(&self) -> usize {
        match self {
            ClosedForm::Gaussian { mean, .. } => mean.len(),
            ClosedForm::Drift { shift } => shift.len(),
            ClosedForm::CompoundPoisson { jumps, .. } => jumps.first().map_or(1, |j| j.x.len()),
            ClosedForm::LevyAreaBdlp { .. } => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::Gaussian { .. } => "gaussian",
            ClosedForm::Drift { .. } => "drift",
            ClosedForm::CompoundPoisson { .. } => "compound_poisson",
            ClosedForm::LevyAreaBdlp { .. } => "levy_area_bdlp",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(IdLawError::LawFormat(m));
        match self {
            ClosedForm::Gaussian { mean, cov } => {
                let t = LevyTriplet {
                    dim: mean.len(),
                    shift: mean.clone(),
                    cov: cov.clone(),
                    levy: SpectralMeasure::empty(),
                };
                let r = t.validate();
                if !r.is_valid() {
                    return Err(IdLawError::InvalidTriplet(r));
                }
            }
            ClosedForm::Drift { shift } => {
                if shift.is_empty() || shift.iter().any(|x| !x.is_finite()) {
                    return bad("drift needs a finite, non-empty shift".into());
                }
            }
            ClosedForm::CompoundPoisson { rate, jumps } => {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return bad(format!("rate {rate} must be ≥ 0"));
                }
                if jumps.is_empty() {
                    return bad("compound Poisson needs at least one jump atom".into());
                }
                let d = jumps[0].x.len();
                if d == 0 || jumps.iter().any(|j| j.x.len() != d) {
                    return bad("jump atoms must share a dimension ≥ 1".into());
                }
                if jumps.iter().any(|j| !(j.p > 0.0) || j.x.iter().any(|x| !x.is_finite())) {
                    return bad("jump probabilities must be positive and positions finite".into());
                }
                let total: f64 = jumps.iter().map(|j| j.p).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return bad(format!("jump probabilities sum to {total}, expected 1"));
                }
            }
            ClosedForm::LevyAreaBdlp { u } => {
                if !(u.is_finite() && *u > 0.0) {
                    return bad(format!("u = {u} must be > 0"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, y: &[f64]) -> Complex64 {
        match self {
            ClosedForm::Gaussian { mean, cov } => {
                Complex64::new(-0.5 * quadratic_form(cov, y), dot(y, mean))
            }
            ClosedForm::Drift { shift } => Complex64::new(0.0, dot(y, shift)),
            ClosedForm::CompoundPoisson { rate, jumps } => {
                let mut s = Complex64::new(0.0, 0.0);
                for j in jumps {
                    s += super::jump::levy_kernel(dot(y, &j.x), false) * j.p;
                }
                s * *rate
            }
            ClosedForm::LevyAreaBdlp { u } => Complex64::new(1.0 - x_coth_x(y[0] * u), 0.0),
        }
    }

    /// Equivalent Lévy triplet, when the law has one in the polar representation.
    pub fn to_triplet(&self) -> Result<LevyTriplet> {
        match self {
            ClosedForm::Gaussian { mean, cov } => Ok(LevyTriplet {
                dim: mean.len(),
                shift: mean.clone(),
                cov: cov.clone(),
                levy: SpectralMeasure::empty(),
            }),
            ClosedForm::Drift { shift } => Ok(LevyTriplet::drift(shift.clone())),
            ClosedForm::CompoundPoisson { rate, jumps } => {
                let d = self.dim();
                let mut shift = vec![0.0; d];
                let mut rays = Vec::new();
                for j in jumps {
                    let r = j.x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if r == 0.0 {
                        continue;
                    }
                    let m = rate * j.p;
                    if r <= 1.0 {
                        for (s, x) in shift.iter_mut().zip(&j.x) {
                            *s += m * x;
                        }
                    }
                    rays.push(Ray {
                        dir: j.x.iter().map(|v| v / r).collect(),
                        radial: RadialMeasure::atoms([(r, m)]),
                    });
                }
                Ok(LevyTriplet {
                    dim: d,
                    shift,
                    cov: vec![vec![0.0; d]; d],
                    levy: SpectralMeasure { rays },
                })
            }
            ClosedForm::LevyAreaBdlp { .. } => Err(IdLawError::Unsupported(
                "levy_area_bdlp has no finite polar Lévy measure representation".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::QuadConfig;

    #[test]
    fn hyperbolic_helpers_match_direct_formulas() {
        for &x in &[0.011_f64, 0.3, 1.0, 4.0, 19.0, 25.0] {
            assert!((x_coth_x(x) - x / x.tanh()).abs() < 1e-13 * x_coth_x(x));
            let direct = (x / x.sinh()).ln();
            assert!((log_x_over_sinh_x(x) - direct).abs() < 1e-12, "x={x}");
        }
        assert!((x_coth_x(1e-3) - 1.0 - 1e-6 / 3.0 + 1e-12 / 45.0).abs() < 4e-16);
        assert!((log_x_over_sinh_x(1e-3) + 1e-6 / 6.0 - 1e-12 / 180.0).abs() < 1e-20);
        assert!((log_x_over_sinh_x(-1.0) - log_x_over_sinh_x(1.0)).abs() == 0.0);
    }

    #[test]
    fn compound_poisson_triplet_matches_closed_form() {
        let cf = ClosedForm::CompoundPoisson {
            rate: 2.0,
            jumps: vec![
                JumpAtom { x: vec![2.0], p: 0.25 },
                JumpAtom { x: vec![-0.5], p: 0.75 },
            ],
        };
        cf.validate().unwrap();
        let t = cf.to_triplet().unwrap();
        assert!(t.validate().is_valid());
        for &y in &[-3.0, 0.4, 2.5] {
            let a = cf.eval(&[y]);
            let b = t.exponent_unchecked(&[y], &QuadConfig::default()).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let cf = ClosedForm::CompoundPoisson {
            rate: 1.0,
            jumps: vec![JumpAtom { x: vec![1.0], p: 0.5 }],
        };
        assert!(cf.validate().is_err());
    }

    #[test]
    fn json_tagging() {
        let cf: ClosedForm = serde_json::from_str(
            r#"{"closed_form":"levy_area_bdlp","params":{"u":1.5}}"#,
        )
        .unwrap();
        assert_eq!(cf, ClosedForm::LevyAreaBdlp { u: 1.5 });
    }
}
