//! Floating-point abstraction shared by every numerical module.
//!
//! All solvers, the reduction and the simulator are written against
//! [`Scalar`], which is implemented for `f32` and `f64`. File formats and
//! the CLI use `f64`; see the aliases at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::{de::DeserializeOwned, Serialize};

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Convert a count or index.
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
