//! Infinitely divisible laws: Lévy–Khintchine triplets, polar spectral
//! measures, closed-form exponents and the convolution algebra.

mod exponent;
pub mod jump;
mod law;
mod measure;
mod registry;
mod triplet;
mod validate;

pub use exponent::{conv_power, convolve, CharExponent, Node};
pub use law::LawSpec;
pub use measure::{
    log_moment, log_power_integral, power_integral, Atom, GridTail, LogMoment, RadialMeasure,
    Ray, Segment, SpectralMeasure,
};
pub use registry::{log_x_over_sinh_x, x_coth_x, ClosedForm, JumpAtom};
pub use triplet::{exponent_from_triplet, LevyTriplet};
pub use validate::{ValidationReport, Violation, ViolationKind};


