use super::{Commitment, UcInstance};
use crate::error::{Error, Result};
use crate::knapsack::{Item, KnapsackInstance, Selection};
use crate::Scalar;

/// Knapsack over switch-off decisions at a fixed marginal cost.
///
/// Item `k` stands for unit `item_units[k]`: its weight is the unit's
/// output `p_i(D)` and its value the cost saved by switching it off,
/// `A_i + B_i p_i + C_i p_i²`. The capacity is the surplus `Σ p_i(D) − L`.
/// Units whose output is zero at `D` are switched off for free and are not
/// items; `knapsack` is `None` when no unit can be switched off (zero
/// surplus or no positive-output unit).
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    pub marginal: T,
    pub knapsack: Option<KnapsackInstance<T>>,
    /// `p_i(D)` for every unit.
    pub powers: Vec<T>,
    pub item_units: Vec<usize>,
}

impl<T: Scalar> Reduction<T> {
    /// Map a switch-off selection `z` back to a commitment `y = 1 − z`.
    pub fn commitment(&self, switch_off: Option<&Selection>) -> Result<Commitment> {
        let mut on: Vec<bool> = self.powers.iter().map(|&p| p > T::zero()).collect();
        if let Some(z) = switch_off {
            if z.len() != self.item_units.len() {
                return Err(Error::invalid(format!(
                    "switch-off vector has {} bits for {} items",
                    z.len(),
                    self.item_units.len()
                )));
            }
            for (&unit, &off) in self.item_units.iter().zip(z.bits()) {
                if off {
                    on[unit] = false;
                }
            }
        }
        Ok(Selection::new(on))
    }
}

pub fn build_knapsack<T: Scalar>(uc: &UcInstance<T>, d: T) -> Result<Reduction<T>> {
    let powers: Vec<T> = uc.units().iter().map(|u| u.dispatch_at_marginal(d)).collect();
    let supply: T = powers.iter().copied().sum();
    if supply < uc.load() {
        return Err(Error::InfeasibleAtMarginal {
            marginal: d.to_f64_lossy(),
            supply: supply.to_f64_lossy(),
            load: uc.load().to_f64_lossy(),
        });
    }
    let surplus = supply - uc.load();
    let item_units: Vec<usize> = (0..uc.len()).filter(|&i| powers[i] > T::zero()).collect();
    let knapsack = if surplus > T::zero() && !item_units.is_empty() {
        let items = item_units
            .iter()
            .map(|&i| Item::new(uc.units()[i].running_cost(powers[i]), powers[i]))
            .collect();
        Some(KnapsackInstance::new(format!("uc-D{d}"), items, surplus)?)
    } else {
        None
    };
    Ok(Reduction {
        marginal: d,
        knapsack,
        powers,
        item_units,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uc::UcUnit;

    #[test]
    fn two_identical_units() {
        // p(D) = (3 − 1)/(2·0.1) = 10 for both.
        let u = UcUnit::<f64>::new(5.0, 1.0, 0.1, 0.0, 100.0).unwrap();
        let uc = UcInstance::new(vec![u, u], 10.0).unwrap();
        let r = build_knapsack(&uc, 3.0).unwrap();
        let ks = r.knapsack.as_ref().unwrap();
        assert!((ks.capacity() - 10.0).abs() < 1e-12);
        assert!((ks.items()[0].weight - 10.0).abs() < 1e-12);
        assert!((ks.items()[0].value - 25.0).abs() < 1e-12);
        assert!(ks.evaluate(&[true, false]).unwrap().feasible);
        assert!(!ks.evaluate(&[true, true]).unwrap().feasible);
        let y = r.commitment(Some(&"10".parse().unwrap())).unwrap();
        assert_eq!(y.to_string(), "01");
    }

    #[test]
    fn zero_surplus_keeps_everything_on() {
        let u = UcUnit::<f64>::new(5.0, 1.0, 0.1, 0.0, 100.0).unwrap();
        let uc = UcInstance::new(vec![u, u], 20.0).unwrap();
        let r = build_knapsack(&uc, 3.0).unwrap();
        assert!(r.knapsack.is_none());
        assert_eq!(r.commitment(None).unwrap().to_string(), "11");
    }

    #[test]
    fn insufficient_supply_is_an_error() {
        let u = UcUnit::<f64>::new(5.0, 1.0, 0.1, 0.0, 100.0).unwrap();
        let uc = UcInstance::new(vec![u, u], 21.0).unwrap();
        assert!(matches!(build_knapsack(&uc, 3.0), Err(Error::InfeasibleAtMarginal { .. })));
    }

    #[test]
    fn zero_output_units_are_not_items() {
        let a = UcUnit::<f64>::new(5.0, 1.0, 0.1, 0.0, 100.0).unwrap();
        let b = UcUnit::<f64>::new(5.0, 4.0, 0.1, 0.0, 100.0).unwrap();
        let uc = UcInstance::new(vec![a, b], 5.0).unwrap();
        let r = build_knapsack(&uc, 3.0).unwrap();
        assert_eq!(r.item_units, vec![0]);
        assert_eq!(r.commitment(Some(&"0".parse().unwrap())).unwrap().to_string(), "10");
    }
}
