//! Numeric abstraction for valuations, weights and capacities.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, NumAssign, ToPrimitive};

/// A non-negative quantity carried on edges and purposes: `f32`, `f64`, or
/// an exact rational.
pub trait Scalar:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Num
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Absolute slack used when two accumulated sums of magnitude around
    /// `scale` are compared. Zero for exact types.
    fn slack(scale: Self) -> Self;

    /// `a <= b` up to [`Scalar::slack`].
    fn approx_le(a: Self, b: Self) -> bool {
        let scale = if a > b { a } else { b };
        a <= b + Self::slack(scale)
    }

    /// `a == b` up to [`Scalar::slack`].
    fn approx_eq(a: Self, b: Self) -> bool {
        Self::approx_le(a, b) && Self::approx_le(b, a)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

macro_rules! float_scalar {
    ($t:ty, $rel:expr) => {
        impl Scalar for $t {
            fn slack(scale: Self) -> Self {
                $rel * scale.abs().max(1.0)
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-5);

impl Scalar for Ratio<i64> {
    fn slack(_scale: Self) -> Self {
        Ratio::from_integer(0)
    }
}
