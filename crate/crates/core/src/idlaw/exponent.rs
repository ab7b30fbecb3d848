//! Characteristic exponents as lazily evaluated expression trees.

use std::sync::Arc;

use num_complex::Complex64;

use super::measure::log_moment;
use super::registry::ClosedForm;
use super::triplet::LevyTriplet;
use crate::error::{IdLawError, Result};
use crate::maps::{self, IntegralMap};
use crate::quad::QuadConfig;

#[derive(Debug)]
pub enum Node {
    FromTriplet(LevyTriplet),
    ClosedForm(ClosedForm),
    Scale(f64, CharExponent),
    Sum(CharExponent, CharExponent),
    Mapped(IntegralMap, CharExponent),
    /// Pointwise inverse of `J^β` through the derivative formula.
    InverseJbeta(f64, CharExponent),
}

/// `y ↦ Φ(y) = log μ̂(y)` for an infinitely divisible law `μ` on `R^d`.
///
/// Cloning is cheap; subtrees are shared.
#[derive(Debug, Clone)]
pub struct CharExponent {
    dim: usize,
    node: Arc<Node>,
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(IdLawError::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

impl CharExponent {
    pub fn from_triplet(t: LevyTriplet) -> Result<Self> {
        let report = t.validate();
        if !report.is_valid() {
            return Err(IdLawError::InvalidTriplet(report));
        }
        Ok(Self {
            dim: t.dim,
            node: Arc::new(Node::FromTriplet(t)),
        })
    }

    pub fn closed_form(cf: ClosedForm) -> Result<Self> {
        cf.validate()?;
        Ok(Self {
            dim: cf.dim(),
            node: Arc::new(Node::ClosedForm(cf)),
        })
    }

    pub fn gaussian_1d(variance: f64) -> Self {
        Self::closed_form(ClosedForm::Gaussian {
            mean: vec![0.0],
            cov: vec![vec![variance]],
        })
        .expect("valid variance")
    }

    /// Exponent of the point mass at the origin.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            node: Arc::new(Node::ClosedForm(ClosedForm::Drift { shift: vec![0.0; dim] })),
        }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(IdLawError::NonPositivePower(c));
        }
        Ok(Self {
            dim: self.dim,
            node: Arc::new(Node::Scale(c, self.clone())),
        })
    }

    pub fn sum(&self, other: &CharExponent) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            node: Arc::new(Node::Sum(self.clone(), other.clone())),
        })
    }

    pub fn mapped(&self, map: IntegralMap) -> Result<Self> {
        map.validate()?;
        Ok(Self {
            dim: self.dim,
            node: Arc::new(Node::Mapped(map, self.clone())),
        })
    }

    pub fn inverse_jbeta(&self, beta: f64) -> Result<Self> {
        maps::check_beta(beta)?;
        Ok(Self {
            dim: self.dim,
            node: Arc::new(Node::InverseJbeta(beta, self.clone())),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn as_triplet(&self) -> Option<&LevyTriplet> {
        match &*self.node {
            Node::FromTriplet(t) => Some(t),
            _ => None,
        }
    }

    /// True when every leaf is a triplet or one of the registry laws, i.e. the
    /// tree is built only from exponents of known ID laws.
    pub fn is_triplet_backed(&self) -> bool {
        match &*self.node {
            Node::FromTriplet(_) | Node::ClosedForm(_) => true,
            Node::Scale(_, e) | Node::Mapped(_, e) => e.is_triplet_backed(),
            Node::Sum(a, b) => a.is_triplet_backed() && b.is_triplet_backed(),
            Node::InverseJbeta(..) => false,
        }
    }

    /// Looks for a triplet leaf with infinite log-moment, which puts the law
    /// outside ID_log.
    pub fn infinite_log_moment_leaf(&self) -> bool {
        match &*self.node {
            Node::FromTriplet(t) => !log_moment(&t.levy).finite,
            Node::ClosedForm(_) => false,
            Node::Scale(_, e) | Node::InverseJbeta(_, e) => e.infinite_log_moment_leaf(),
            Node::Mapped(_, e) => e.infinite_log_moment_leaf(),
            Node::Sum(a, b) => a.infinite_log_moment_leaf() || b.infinite_log_moment_leaf(),
        }
    }

    pub fn eval(&self, y: &[f64]) -> Result<Complex64> {
        self.eval_with(y, &QuadConfig::default())
    }

    pub fn eval_with(&self, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
        same_dim(self.dim, y.len())?;
        self.eval_unchecked(y, cfg)
    }

    pub(crate) fn eval_unchecked(&self, y: &[f64], cfg: &QuadConfig) -> Result<Complex64> {
        if y.iter().all(|v| *v == 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match &*self.node {
            Node::FromTriplet(t) => t.exponent_unchecked(y, cfg),
            Node::ClosedForm(cf) => Ok(cf.eval(y)),
            Node::Scale(c, e) => Ok(e.eval_unchecked(y, cfg)? * *c),
            Node::Sum(a, b) => Ok(a.eval_unchecked(y, cfg)? + b.eval_unchecked(y, cfg)?),
            Node::Mapped(map, e) => map.apply(e, y, cfg),
            Node::InverseJbeta(beta, e) => maps::jbeta_inverse_exponent(e, *beta, y, cfg),
        }
    }

    /// Convenience for one-dimensional exponents.
    pub fn at(&self, y: f64) -> Result<Complex64> {
        self.eval(&[y])
    }
}

/// Convolution: exponents add.
pub fn convolve(a: &CharExponent, b: &CharExponent) -> Result<CharExponent> {
    a.sum(b)
}

/// Convolution power `μ^{*c}`: the exponent is multiplied by `c`.
pub fn conv_power(a: &CharExponent, c: f64) -> Result<CharExponent> {
    a.scale(c)
}
