//! Fixture laws shared by the benchmarks.

use idlaw_core::{CharExponent, ClosedForm, JumpAtom, LevyTriplet, RadialMeasure, Segment, SpectralMeasure};

pub fn compound_poisson_form() -> ClosedForm {
    ClosedForm::CompoundPoisson {
        rate: 1.0,
        jumps: vec![JumpAtom { x: vec![2.0], p: 0.5 }, JumpAtom { x: vec![-0.5], p: 0.5 }],
    }
}

pub fn compound_poisson() -> CharExponent {
    CharExponent::closed_form(compound_poisson_form()).expect("valid law")
}

/// Atom plus a heavy power tail, so the triplet image stays in closed form.
pub fn heavy_tail_triplet() -> LevyTriplet {
    let mut radial = RadialMeasure::atoms([(0.5, 1.0)]);
    radial.segments.push(Segment::new(1.5, f64::INFINITY, 0.8, -2.5));
    LevyTriplet {
        dim: 1,
        shift: vec![0.3],
        cov: vec![vec![0.4]],
        levy: SpectralMeasure::single_ray(vec![1.0], radial),
    }
}

/// Finite power segment, whose image needs the grid representation.
pub fn finite_segment_triplet() -> LevyTriplet {
    LevyTriplet::pure_jump(
        1,
        SpectralMeasure::single_ray(
            vec![1.0],
            RadialMeasure { segments: vec![Segment::new(0.0, 3.0, 0.5, -1.5)], ..Default::default() },
        ),
    )
}
