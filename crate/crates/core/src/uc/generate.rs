use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{UcInstance, UcUnit};
use crate::error::{Error, Result};
use crate::Scalar;

/// Closed sampling intervals for random unit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcRanges {
    pub fixed_cost: (f64, f64),
    pub linear_cost: (f64, f64),
    pub quadratic_cost: (f64, f64),
    pub p_min: (f64, f64),
    pub p_max: (f64, f64),
}

impl UcRanges {
    /// A ∈ [10, 50], B ∈ [0.5, 1.5], C ∈ [0.01, 0.2], p_min ∈ [10, 20],
    /// p_max ∈ [50, 100].
    pub fn standard() -> Self {
        Self {
            fixed_cost: (10.0, 50.0),
            linear_cost: (0.5, 1.5),
            quadratic_cost: (0.01, 0.2),
            p_min: (10.0, 20.0),
            p_max: (50.0, 100.0),
        }
    }
}

impl Default for UcRanges {
    fn default() -> Self {
        Self::standard()
    }
}

/// Random UC instance with `L = load_factor · Σ p_max`.
pub fn random_uc<T: Scalar>(n: usize, ranges: &UcRanges, load_factor: f64, seed: u64) -> Result<UcInstance<T>> {
    if n == 0 {
        return Err(Error::invalid("unit count must be at least 1"));
    }
    if !(load_factor > 0.0 && load_factor <= 1.0) {
        return Err(Error::invalid(format!("load factor must lie in (0, 1], got {load_factor}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64)| if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    let mut units = Vec::with_capacity(n);
    for _ in 0..n {
        let a = draw(ranges.fixed_cost);
        let b = draw(ranges.linear_cost);
        let c = draw(ranges.quadratic_cost);
        let lo = draw(ranges.p_min);
        let hi = draw(ranges.p_max).max(lo);
        units.push(UcUnit::new(T::lit(a), T::lit(b), T::lit(c), T::lit(lo), T::lit(hi))?);
    }
    let capacity: T = units.iter().map(|u| u.p_max).sum();
    UcInstance::new(units, capacity * T::lit(load_factor))
}
