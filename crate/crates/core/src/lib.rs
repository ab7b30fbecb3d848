//! Numerical toolkit for infinitely divisible laws and the random-integral
//! mappings `J^β`, `I`, `U_β^f` and `I∘J^β`.
//!
//! Laws are handled through their characteristic exponents
//! ([`idlaw::CharExponent`]). The mappings act on exponents by quadrature
//! ([`maps`]) and on Lévy triplets in closed form where possible.
//! [`factor`] checks the factorization identities, and [`simulate`]
//! cross-checks everything by Monte Carlo.

pub mod error;
pub mod idlaw;
pub mod factor;
pub mod maps;
pub mod quad;
pub mod simulate;

pub use error::{IdLawError, Result};
pub use idlaw::{
    conv_power, convolve, exponent_from_triplet, log_moment, CharExponent, ClosedForm, JumpAtom,
    LawSpec, LevyTriplet, LogMoment, RadialMeasure, Ray, Segment, SpectralMeasure,
    ValidationReport,
};
pub use maps::{InnerClock, IntegralMap};
pub use num_complex::Complex64;
pub use quad::{QuadConfig, QuadRule};
pub use simulate::{EmpiricalCF, McReport, SimSpec, Samples};
