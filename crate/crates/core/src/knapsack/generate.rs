use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Item, KnapsackInstance};
use crate::error::{Error, Result};
use crate::Scalar;

/// `⌈α · Σw / 100⌉` for integer total weight.
pub fn inverse_correlated_capacity(total_weight: u64, alpha: u64) -> u64 {
    (alpha * total_weight).div_ceil(100)
}

/// Inversely strongly correlated family: `v ~ U{1..1000}`,
/// `w ~ U{v+98..v+102}`, capacity `⌈α Σw / 100⌉` with `α ~ U{10..20}`.
pub fn gen_inverse_strongly_correlated<T: Scalar>(n: usize, seed: u64) -> Result<KnapsackInstance<T>> {
    if n == 0 {
        return Err(Error::invalid("item count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n);
    let mut total_weight = 0u64;
    for _ in 0..n {
        let v: u64 = rng.gen_range(1..=1000);
        let w: u64 = rng.gen_range(v + 98..=v + 102);
        total_weight += w;
        pairs.push(Item::new(T::from_u64(v).unwrap(), T::from_u64(w).unwrap()));
    }
    let alpha: u64 = rng.gen_range(10..=20);
    let capacity = inverse_correlated_capacity(total_weight, alpha);
    KnapsackInstance::new(
        format!("isc-n{n}-s{seed}"),
        pairs,
        T::from_u64(capacity).unwrap(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_rule_hand_value() {
        assert_eq!(inverse_correlated_capacity(1000, 10), 100);
        assert_eq!(inverse_correlated_capacity(1001, 10), 101);
        assert_eq!(inverse_correlated_capacity(999, 20), 200);
    }

    #[test]
    fn items_respect_family_bounds() {
        for seed in 0..20 {
            let inst = gen_inverse_strongly_correlated::<f64>(150, seed).unwrap();
            let total: f64 = inst.total_weight();
            for it in inst.items() {
                assert!((1.0..=1000.0).contains(&it.value));
                let gap = it.weight - it.value;
                assert!((98.0..=102.0).contains(&gap));
                assert_eq!(it.value.fract(), 0.0);
            }
            let lo = (10.0 * total / 100.0).ceil();
            let hi = (20.0 * total / 100.0).ceil();
            assert!(inst.capacity() >= lo && inst.capacity() <= hi);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = gen_inverse_strongly_correlated::<f64>(1, 7).unwrap();
        let b = gen_inverse_strongly_correlated::<f64>(1, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_inverse_strongly_correlated::<f64>(40, 7).unwrap();
        let d = gen_inverse_strongly_correlated::<f64>(40, 8).unwrap();
        assert_ne!(c, d);
    }

    #[test]
    fn zero_items_rejected() {
        assert!(matches!(
            gen_inverse_strongly_correlated::<f64>(0, 1),
            Err(Error::InvalidArgument(_))
        ));
    }
}
