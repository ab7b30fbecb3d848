//! Factorization calculus for the classes `U_β`, `U_β^f` and `L^f`.
//!
//! A law `μ = J^β(ν)` factors as `μ = J^β(ρ) * ρ` with the background factor
//! `ρ = J^{2β}(ν^{*½})`. Every check here builds both sides of an identity as
//! [`CharExponent`] trees and compares them pointwise on a grid.

mod area;
mod report;

pub use area::{default_t_grid, levy_area_demo, AreaDemoReport, CoshVariant, LevyAreaCase};
pub use report::{compare_exponents, default_grid, FactorizationReport, ReportPoint};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{IdLawError, Result};
use crate::idlaw::{CharExponent, RadialMeasure, SpectralMeasure};
use crate::maps::{check_beta, jbeta_radial, jbeta_tail, IntegralMap};
use crate::quad::QuadConfig;

/// `Φ_ρ = log J^{2β}(ν^{*½})^`.
pub fn rho_from_nu(phi_nu: &CharExponent, beta: f64) -> Result<CharExponent> {
    check_beta(beta)?;
    phi_nu.scale(0.5)?.mapped(IntegralMap::Jbeta(2.0 * beta))
}

/// `Φ_μ = log (J^β(ρ) * ρ)^`.
pub fn mu_from_rho(phi_rho: &CharExponent, beta: f64) -> Result<CharExponent> {
    check_beta(beta)?;
    phi_rho.mapped(IntegralMap::Jbeta(beta))?.sum(phi_rho)
}

/// Recovers `ν` from its background factor by inverting `J^{2β}`.
pub fn nu_from_rho(phi_rho: &CharExponent, beta: f64) -> Result<CharExponent> {
    check_beta(beta)?;
    phi_rho.inverse_jbeta(2.0 * beta)?.scale(2.0)
}

/// `J^β(ρ) * ρ = J^β(ν)` with `ρ` from [`rho_from_nu`].
pub fn verify_factorization(
    phi_nu: &CharExponent,
    beta: f64,
    grid: &[Vec<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<FactorizationReport> {
    let lhs = mu_from_rho(&rho_from_nu(phi_nu, beta)?, beta)?;
    let rhs = phi_nu.mapped(IntegralMap::Jbeta(beta))?;
    compare_exponents("eq3", &lhs, &rhs, grid, tol, cfg)
}

/// `J^{2β}(J^β(ρ) * ρ) = J^β(ρ^{*2})`.
pub fn identity_e_check(
    phi_rho: &CharExponent,
    beta: f64,
    grid: &[Vec<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<FactorizationReport> {
    let lhs = mu_from_rho(phi_rho, beta)?.mapped(IntegralMap::Jbeta(2.0 * beta))?;
    let rhs = phi_rho.scale(2.0)?.mapped(IntegralMap::Jbeta(beta))?;
    compare_exponents("eq15", &lhs, &rhs, grid, tol, cfg)
}

/// The `(1 − √t)^{1/β}` kernel against the composition `J^{2β} ∘ J^β`.
pub fn ubeta_f_membership(
    phi_nu: &CharExponent,
    beta: f64,
    grid: &[Vec<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<FactorizationReport> {
    let lhs = phi_nu.mapped(IntegralMap::UbetaF(beta))?;
    let rhs = phi_nu
        .mapped(IntegralMap::Jbeta(beta))?
        .mapped(IntegralMap::Jbeta(2.0 * beta))?;
    compare_exponents("cor1a", &lhs, &rhs, grid, tol, cfg)
}

/// The inner-clock integral against `I ∘ J^β`.
pub fn clock_identity_check(
    phi_nu: &CharExponent,
    beta: f64,
    grid: &[Vec<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<FactorizationReport> {
    let lhs = phi_nu.mapped(IntegralMap::IJbeta(beta))?;
    let rhs = phi_nu
        .mapped(IntegralMap::Jbeta(beta))?
        .mapped(IntegralMap::Imap)?;
    compare_exponents("prop2", &lhs, &rhs, grid, tol, cfg)
}

/// `rho_from_nu(nu_from_rho(ρ)) = ρ`, where `nu_from_rho` goes through the
/// numerical inverse. The outer quadrature runs on a finite-difference
/// integrand, so `cfg` should be no tighter than the differencing noise.
pub fn inverse_roundtrip_check(
    phi_rho: &CharExponent,
    beta: f64,
    grid: &[Vec<f64>],
    tol: f64,
    cfg: &QuadConfig,
) -> Result<FactorizationReport> {
    let lhs = rho_from_nu(&nu_from_rho(phi_rho, beta)?, beta)?;
    compare_exponents("eq3-inverse", &lhs, phi_rho, grid, tol, cfg)
}

fn scaled_radial(r: &RadialMeasure, k: f64) -> RadialMeasure {
    let mut out = r.clone();
    for a in &mut out.atoms {
        a.m *= k;
    }
    for s in &mut out.segments {
        s.c *= k;
    }
    if let Some(g) = &mut out.grid_tail {
        for t in &mut g.tail {
            *t *= k;
        }
    }
    out
}

/// 20 radii `r_out·k/16`, `k = 1..=20`, from the outermost breakpoint of `g`.
pub fn default_radius_grid(g: &SpectralMeasure) -> Vec<f64> {
    let r_out = g
        .rays
        .iter()
        .map(|r| r.radial.outer_radius())
        .fold(0.0, f64::max);
    let r_out = if r_out > 0.0 { r_out } else { 1.0 };
    (1..=20).map(|k| r_out * k as f64 / 16.0).collect()
}

/// Tail form of the factorization, per ray and tail set `{‖x‖ > r}`:
/// `∫₀¹ M(t^{−1/β}A) dt + M(A) = ∫₀¹ G(t^{−1/β}A) dt` with
/// `M = ½ ∫₀¹ G(t^{−1/(2β)} ·) dt`.
///
/// `M` is built through the triplet transform. The left side integrates its
/// tail again and the right side integrates the tail of `G` directly.
pub fn spectral_factor_check(
    g: &SpectralMeasure,
    beta: f64,
    radius_grid: &[f64],
    tol: f64,
) -> Result<FactorizationReport> {
    check_beta(beta)?;
    report::check_tolerance(tol)?;
    if radius_grid.is_empty() {
        return Err(IdLawError::EmptyInput("radius grid"));
    }
    if let Some(r) = radius_grid.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(IdLawError::InvalidSpec(format!("radius {r} must be positive")));
    }
    let empty = RadialMeasure::default();
    let radials: Vec<&RadialMeasure> = if g.rays.is_empty() {
        vec![&empty]
    } else {
        g.rays.iter().map(|r| &r.radial).collect()
    };
    let mut points = Vec::new();
    for radial in radials {
        let m_layers: Vec<RadialMeasure> = jbeta_radial(radial, 2.0 * beta)?
            .iter()
            .map(|l| scaled_radial(l, 0.5))
            .collect();
        let row = radius_grid
            .par_iter()
            .map(|&r| {
                let mut lhs = 0.0;
                for layer in &m_layers {
                    lhs += jbeta_tail(layer, beta, r)? + layer.tail(r);
                }
                let rhs = if radial.is_empty() { 0.0 } else { jbeta_tail(radial, beta, r)? };
                Ok(ReportPoint::new(vec![r], Complex64::new(lhs, 0.0), Complex64::new(rhs, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        points.extend(row);
    }
    FactorizationReport::from_points("cor5", tol, points)
}
