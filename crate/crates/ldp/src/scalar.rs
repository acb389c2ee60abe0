//! Scalar abstraction for the dense kernels.
//!
//! The solver itself works in `f64`, but the matrix/vector kernels are
//! generic so the same code drives both floating-point arithmetic and the
//! exact rational arithmetic used by the oracles. `Scalar` is the ring
//! interface every entry type must satisfy; `Real` adds the floating-point
//! operations (norms, square roots, tolerance comparisons) that the
//! factorizations need.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Float, One, Zero};

/// Ring operations shared by every entry type the dense containers accept.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// False for values that must never enter a container (NaN, infinities).
    fn is_admissible(&self) -> bool;
}

/// Floating-point scalars: everything in [`Scalar`] plus `num_traits::Float`.
pub trait Real: Scalar + Float {}

impl Scalar for f64 {
    fn is_admissible(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn is_admissible(&self) -> bool {
        self.is_finite()
    }
}

impl Real for f64 {}
impl Real for f32 {}

impl Scalar for BigRational {
    fn is_admissible(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_reject_non_finite() {
        assert!(1.0f64.is_admissible());
        assert!((-0.0f64).is_admissible());
        assert!(!f64::NAN.is_admissible());
        assert!(!f64::INFINITY.is_admissible());
        assert!(!f32::NEG_INFINITY.is_admissible());
    }

    #[test]
    fn rationals_are_always_admissible() {
        let half = BigRational::new(1.into(), 2.into());
        assert!(half.is_admissible());
    }
}
