//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real floating-point type the algorithms are generic over: `f32` or `f64`.
///
/// The tolerance hooks scale the invariants that are stated for double
/// precision down to what single precision can actually hold.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Debug + Display + LowerExp + Default
{
    /// Allowed deviation of `|z_n|` from one for a valid sequence sample.
    fn unit_tolerance() -> Self;

    /// Allowed imaginary magnitude, per unit of length, in a spectrum that
    /// should be real.
    fn reality_tolerance() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 is representable")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize is representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("real value converts to f64")
    }
}

impl Real for f64 {
    fn unit_tolerance() -> Self {
        1e-12
    }

    fn reality_tolerance() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn unit_tolerance() -> Self {
        1e-5
    }

    fn reality_tolerance() -> Self {
        1e-2
    }
}
