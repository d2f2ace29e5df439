//! Floating point scalar abstraction for the numerical modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: f32 or f64.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; exact for `f64` itself.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    /// Conversion from an integer count.
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize is representable in every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Reduces an angle in turns to `[0, 1)`.
    fn wrap_turns(self) -> Self {
        let r = self - self.floor();
        // `x - floor(x)` can round up to exactly 1 for tiny negative x.
        if r >= Self::one() {
            Self::zero()
        } else {
            r
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_turns_stays_in_unit_interval() {
        for x in [-1e-18_f64, -0.25, 0.0, 0.5, 1.0, 3.75, -7.0] {
            let w = x.wrap_turns();
            assert!((0.0..1.0).contains(&w), "{x} -> {w}");
        }
        assert_eq!((-0.25_f64).wrap_turns(), 0.75);
        assert_eq!((-1e-18_f64).wrap_turns(), 0.0);
        assert_eq!(3.75_f32.wrap_turns(), 0.75);
    }
}
