//! Conditional law of Lévy's stochastic area as a factorization example.
//!
//! Given `B_u = (√u, √u)`, the area has characteristic function
//! `χ(t) = (tu / sinh tu) · exp(1 − tu·coth tu)`. The second factor is the
//! background law `ν` and the first is `I(ν)`, so `χ` is `I(ν) * ν`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{FactorizationReport, ReportPoint};
use crate::error::{IdLawError, Result};
use crate::idlaw::{log_x_over_sinh_x, x_coth_x, CharExponent, ClosedForm};
use crate::maps::IntegralMap;
use crate::quad::QuadConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyAreaCase {
    pub u: f64,
}

impl LevyAreaCase {
    pub fn new(u: f64) -> Result<Self> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(IdLawError::InvalidSpec(format!("u = {u} must be > 0")));
        }
        Ok(Self { u })
    }

    /// `Φ_ν(t) = 1 − tu·coth(tu)`.
    pub fn bdlp_exponent(&self, t: f64) -> f64 {
        1.0 - x_coth_x(t * self.u)
    }

    /// `log(tu / sinh tu)`, the exponent of `I(ν)`.
    pub fn class_l_factor(&self, t: f64) -> f64 {
        log_x_over_sinh_x(t * self.u)
    }

    pub fn log_chi(&self, t: f64) -> f64 {
        self.bdlp_exponent(t) + self.class_l_factor(t)
    }

    pub fn chi(&self, t: f64) -> f64 {
        self.log_chi(t).exp()
    }

    /// The same product with `cosh` in place of `coth`.
    pub fn chi_cosh_variant(&self, t: f64) -> f64 {
        let x = t * self.u;
        (self.class_l_factor(t) + 1.0 - x * x.cosh()).exp()
    }

    pub fn exponent(&self) -> CharExponent {
        CharExponent::closed_form(ClosedForm::LevyAreaBdlp { u: self.u }).expect("u > 0")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoshVariant {
    /// `(t, χ(t), χ_cosh(t))` on the demo grid.
    pub points: Vec<[f64; 3]>,
    /// `lim_{t→0} χ_cosh(t) = e`; a characteristic function must give 1.
    pub limit_at_zero: f64,
    pub discrepancy_at_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaDemoReport {
    pub u: f64,
    /// `I(ν)` by quadrature against `log(tu / sinh tu)`.
    pub i_part: FactorizationReport,
    /// `exp(Φ_ν + log I(ν)^)` against the closed form of `χ`.
    pub product: FactorizationReport,
    /// `max |log χ − (Φ_ν + log(tu / sinh tu))|`.
    pub part_sum_residual: f64,
    pub cosh_variant: CoshVariant,
    pub pass: bool,
}

/// `t = 0.1, 0.2, …, 5.0`.
pub fn default_t_grid() -> Vec<f64> {
    (1..=50).map(|k| 0.1 * k as f64).collect()
}

pub fn levy_area_demo(u: f64, t_grid: &[f64], tol: f64, cfg: &QuadConfig) -> Result<AreaDemoReport> {
    let case = LevyAreaCase::new(u)?;
    if t_grid.is_empty() {
        return Err(IdLawError::EmptyInput("t grid"));
    }
    let i_nu = case.exponent().mapped(IntegralMap::Imap)?;
    let i_points = t_grid
        .par_iter()
        .map(|&t| {
            let q = i_nu.eval_with(&[t], cfg)?;
            Ok(ReportPoint::new(vec![t], q, Complex64::new(case.class_l_factor(t), 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let i_part = FactorizationReport::from_points("area", tol, i_points)?;

    let product_points = i_part
        .points
        .iter()
        .map(|p| {
            let t = p.input[0];
            let lhs = (Complex64::new(case.bdlp_exponent(t), 0.0) + p.lhs()).exp();
            ReportPoint::new(vec![t], lhs, Complex64::new(case.chi(t), 0.0))
        })
        .collect();
    let product = FactorizationReport::from_points("area-product", tol, product_points)?;

    let part_sum_residual = t_grid
        .iter()
        .map(|&t| (case.log_chi(t) - (case.bdlp_exponent(t) + case.class_l_factor(t))).abs())
        .fold(0.0, f64::max);

    let e = std::f64::consts::E;
    let cosh_variant = CoshVariant {
        points: t_grid
            .iter()
            .map(|&t| [t, case.chi(t), case.chi_cosh_variant(t)])
            .collect(),
        limit_at_zero: case.chi_cosh_variant(0.0),
        discrepancy_at_zero: case.chi_cosh_variant(0.0) - case.chi(0.0),
    };
    debug_assert!((cosh_variant.discrepancy_at_zero - (e - 1.0)).abs() < 1e-15);

    let pass = i_part.pass && product.pass && part_sum_residual < 1e-12;
    Ok(AreaDemoReport {
        u,
        i_part,
        product,
        part_sum_residual,
        cosh_variant,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let c = LevyAreaCase::new(1.0).unwrap();
        assert!((c.class_l_factor(1.0) + 0.161439).abs() < 1e-6);
        assert!((c.class_l_factor(1.0) + 1.0f64.sinh().ln()).abs() < 1e-15);
        // 0.850918 · e^{−0.313035}
        assert!((c.chi(1.0) - 0.622212).abs() < 1e-6);
        assert!((c.class_l_factor(1.0).exp() - 0.850918).abs() < 1e-6);
        assert!((c.bdlp_exponent(1.0) + 0.313035).abs() < 1e-6);
        assert_eq!(c.chi(0.0), 1.0);
        assert_eq!(c.bdlp_exponent(0.0), 0.0);
        assert_eq!(c.class_l_factor(0.0), 0.0);
        assert!((c.chi_cosh_variant(0.0) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn demo_passes_for_both_conditioning_times() {
        for &u in &[1.0, 2.0] {
            let r = levy_area_demo(u, &default_t_grid(), 1e-8, &QuadConfig::default()).unwrap();
            assert!(r.pass, "u={u}: {} {}", r.i_part.max_residual, r.product.max_residual);
            assert!((r.cosh_variant.discrepancy_at_zero - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(LevyAreaCase::new(0.0).is_err());
        assert!(levy_area_demo(1.0, &[], 1e-8, &QuadConfig::default()).is_err());
    }
}
