//! Scalar abstraction shared by states, instances and the ACO formulas.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type every numeric value of the algebra is stored in.
///
/// Implemented for `f32` and `f64`; `f64` is what the builders, oracles and
/// the CLI use.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Tolerance for probability weights summing to one.
    const WEIGHT_TOLERANCE: f64;

    /// Tolerance for a list entry to be accepted as an integral index.
    const INDEX_TOLERANCE: f64 = 1e-9;

    /// Bit pattern used for hashing and exact comparisons.
    fn canonical_bits(self) -> u64;

    /// Lossless widening used by sampling and serialization.
    fn as_f64(self) -> f64;

    /// Narrowing from `f64`; `f64` is the identity.
    fn of(value: f64) -> Self;

    /// Integer constant.
    fn of_usize(value: usize) -> Self {
        Self::of(value as f64)
    }
}

impl Scalar for f64 {
    const WEIGHT_TOLERANCE: f64 = 1e-9;

    fn canonical_bits(self) -> u64 {
        // -0.0 and 0.0 hash alike.
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }

    fn as_f64(self) -> f64 {
        self
    }

    fn of(value: f64) -> Self {
        value
    }
}

impl Scalar for f32 {
    const WEIGHT_TOLERANCE: f64 = 1e-5;
    const INDEX_TOLERANCE: f64 = 1e-4;

    fn canonical_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            u64::from(self.to_bits())
        }
    }

    fn as_f64(self) -> f64 {
        f64::from(self)
    }

    fn of(value: f64) -> Self {
        value as f32
    }
}

/// Interprets a scalar as a 1-based integer, rejecting values that are not
/// integral within the type's index tolerance.
pub fn as_index<F: Scalar>(value: F) -> Option<usize> {
    let v = value.as_f64();
    let rounded = v.round();
    if v < 0.0 || (v - rounded).abs() > F::INDEX_TOLERANCE || !v.is_finite() {
        return None;
    }
    Some(rounded as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_tolerance() {
        assert_eq!(as_index(3.0_f64), Some(3));
        assert_eq!(as_index(3.0_f64 + 1e-12), Some(3));
        assert_eq!(as_index(3.2_f64), None);
        assert_eq!(as_index(-1.0_f64), None);
        assert_eq!(as_index(7.0_f32), Some(7));
    }

    #[test]
    fn zero_signs_hash_alike() {
        assert_eq!((-0.0_f64).canonical_bits(), 0.0_f64.canonical_bits());
    }
}
