//! Single-period unit commitment and its marginal-cost reduction to
//! knapsack.
//!
//! For a fixed marginal cost `D` every unit's output is pinned to
//! `clamp((D − B)/(2C), p_min, p_max)`, which leaves a purely binary
//! choice of which units to switch off. Scanning `D` and solving that
//! knapsack recovers the UC optimum.

mod dispatch;
mod generate;
mod io;
mod reduce;
mod scan;

pub use dispatch::{economic_dispatch, exact_dispatch, kkt_multipliers, uc_cost, verify_kkt, KktMultipliers};
pub use generate::{random_uc, UcRanges};
pub use io::{load_uc, parse_uc, save_uc, write_scan_csv, write_uc};
pub use reduce::{build_knapsack, Reduction};
pub use scan::{brute_force_uc, default_grid, solve_uc_via_scan, uniform_grid, CostMode, ScanOutcome, ScanPoint, ScanSolver, BRUTE_FORCE_UC_MAX_UNITS, DEFAULT_GRID_POINTS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knapsack::Selection;
use crate::Scalar;

/// On/off vector, one bit per unit.
pub type Commitment = Selection;

/// A generating unit with cost `A·y + B·p + C·p²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct UcUnit<T> {
    /// Commitment cost `A`.
    pub fixed_cost: T,
    /// Linear coefficient `B`.
    pub linear_cost: T,
    /// Quadratic coefficient `C`, strictly positive.
    pub quadratic_cost: T,
    pub p_min: T,
    pub p_max: T,
}

impl<T: Scalar> UcUnit<T> {
    pub fn new(fixed_cost: T, linear_cost: T, quadratic_cost: T, p_min: T, p_max: T) -> Result<Self> {
        let all = [fixed_cost, linear_cost, quadratic_cost, p_min, p_max];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("unit parameters must be finite"));
        }
        if fixed_cost < T::zero() || linear_cost < T::zero() {
            return Err(Error::invalid("commitment and linear costs must be nonnegative"));
        }
        if !(quadratic_cost > T::zero()) {
            return Err(Error::invalid(format!(
                "quadratic cost must be positive, got {quadratic_cost}"
            )));
        }
        if p_min < T::zero() || p_min > p_max {
            return Err(Error::invalid(format!("need 0 ≤ p_min ≤ p_max, got [{p_min}, {p_max}]")));
        }
        Ok(Self {
            fixed_cost,
            linear_cost,
            quadratic_cost,
            p_min,
            p_max,
        })
    }

    /// `∂C/∂p = B + 2Cp`.
    pub fn marginal_cost(&self, p: T) -> T {
        self.linear_cost + T::lit(2.0) * self.quadratic_cost * p
    }

    /// Production cost `B·p + C·p²` (without the commitment cost).
    pub fn production_cost(&self, p: T) -> T {
        self.linear_cost * p + self.quadratic_cost * p * p
    }

    /// Cost of running at `p`, including the commitment cost.
    pub fn running_cost(&self, p: T) -> T {
        self.fixed_cost + self.production_cost(p)
    }

    /// Output at marginal cost `d`, projected onto `[p_min, p_max]`.
    pub fn dispatch_at_marginal(&self, d: T) -> T {
        ((d - self.linear_cost) / (T::lit(2.0) * self.quadratic_cost))
            .max(self.p_min)
            .min(self.p_max)
    }
}

/// Free function form of [`UcUnit::dispatch_at_marginal`].
pub fn dispatch_at_marginal<T: Scalar>(unit: &UcUnit<T>, d: T) -> T {
    unit.dispatch_at_marginal(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct UcInstance<T> {
    units: Vec<UcUnit<T>>,
    load: T,
}

impl<T: Scalar> UcInstance<T> {
    pub fn new(units: Vec<UcUnit<T>>, load: T) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::invalid("UC instance needs at least one unit"));
        }
        if !(load > T::zero()) || !load.is_finite() {
            return Err(Error::invalid(format!("load must be positive, got {load}")));
        }
        let capacity: T = units.iter().map(|u| u.p_max).sum();
        if capacity < load {
            return Err(Error::DemandInfeasible {
                capacity: capacity.to_f64_lossy(),
                load: load.to_f64_lossy(),
            });
        }
        Ok(Self { units, load })
    }

    pub fn units(&self) -> &[UcUnit<T>] {
        &self.units
    }

    pub fn load(&self) -> T {
        self.load
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Range of marginal costs spanning every clamping regime:
    /// `[min B, max(B + 2C p_max)]`.
    pub fn marginal_span(&self) -> (T, T) {
        let lo = self.units.iter().map(|u| u.linear_cost).fold(T::infinity(), T::min);
        let hi = self
            .units
            .iter()
            .map(|u| u.marginal_cost(u.p_max))
            .fold(T::neg_infinity(), T::max);
        (lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Dispatch<T> {
    pub powers: Vec<T>,
}

/// Common marginal cost `D` (the demand multiplier `λ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct MarginalParam<T> {
    pub value: T,
}
