//! Real scalar abstraction for the linear-algebra kernel.

use num_traits as nt;

/// Floating-point scalar the matrix kernel is generic over.
///
/// `f64` is what the physics layers use (every tolerance in the crate is an
/// `f64` magnitude); `f32` is supported so the kernel stays honest about not
/// hard-coding a precision.
pub trait Scalar:
    nt::Float
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::NumAssign
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon for this precision.
    fn eps() -> Self;

    /// Lossless conversion from `usize` (dimensions are small here).
    fn from_dim(n: usize) -> Self {
        Self::from_usize(n).expect("dimension representable")
    }
}

impl Scalar for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}
