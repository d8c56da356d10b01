use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StateVector;
use crate::error::{Error, Result};
use crate::knapsack::Selection;
use crate::Scalar;

/// Measured bitstrings with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleSet {
    counts: BTreeMap<Selection, u64>,
    shots: u64,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, bits: Selection, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(bits).or_insert(0) += count;
        self.shots += count;
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (Selection, u64)>) -> Self {
        let mut set = Self::new();
        for (bits, c) in counts {
            set.add(bits, c);
        }
        set
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<Selection, u64> {
        &self.counts
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Selection, u64)> {
        self.counts.iter().map(|(b, &c)| (b, c))
    }

    /// Bit length of the stored strings, if consistent.
    pub fn width(&self) -> Option<usize> {
        let mut lens = self.counts.keys().map(Selection::len);
        let first = lens.next()?;
        lens.all(|l| l == first).then_some(first)
    }

    /// `bitstring,count` with a header row, keys in lexicographic order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,count\n");
        for (b, c) in &self.counts {
            let _ = writeln!(out, "{b},{c}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut set = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || (idx == 0 && line == "bitstring,count") {
                continue;
            }
            let parse_err = |field: &str, message: String| Error::Parse {
                line: idx + 1,
                field: field.into(),
                message,
            };
            let (bits, count) = line
                .split_once(',')
                .ok_or_else(|| parse_err("row", format!("expected `bitstring,count`, got {line:?}")))?;
            let bits: Selection = bits.trim().parse().map_err(|e: Error| parse_err("bitstring", e.to_string()))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| parse_err("count", format!("bad count {count:?}")))?;
            set.add(bits, count);
        }
        Ok(set)
    }
}

/// Draw `shots` i.i.d. basis states from `|amp|²` by inverse CDF.
pub fn sample<T: Scalar>(state: &StateVector<T>, shots: u64, seed: u64) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let mut cumulative = Vec::with_capacity(state.amplitudes().len());
    let mut acc = 0.0f64;
    for a in state.amplitudes() {
        acc += a.norm_sqr().to_f64_lossy();
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_index: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
        *by_index.entry(idx).or_insert(0) += 1;
    }
    let n = state.num_qubits();
    Ok(SampleSet::from_counts(
        by_index.into_iter().map(|(i, c)| (Selection::from_index(i, n), c)),
    ))
}

/// Exact outcome probabilities indexed by basis state.
pub fn distribution<T: Scalar>(state: &StateVector<T>, max_qubits: usize) -> Result<Vec<T>> {
    if state.num_qubits() > max_qubits {
        return Err(Error::Resource(format!(
            "distribution of {} qubits exceeds the cap of {max_qubits}",
            state.num_qubits()
        )));
    }
    Ok(state.probabilities())
}

/// Outcome probabilities keyed by bitstring, keeping entries `≥ floor`.
pub fn distribution_map<T: Scalar>(state: &StateVector<T>, max_qubits: usize, floor: T) -> Result<BTreeMap<Selection, T>> {
    let n = state.num_qubits();
    Ok(distribution(state, max_qubits)?
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p >= floor)
        .map(|(i, p)| (Selection::from_index(i, n), p))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{apply_ry, init_product_state, DEFAULT_MAX_QUBITS};

    #[test]
    fn zero_state_always_zero_string() {
        let s = StateVector::<f64>::zero(5).unwrap();
        let set = sample(&s, 1000, 1).unwrap();
        assert_eq!(set.counts().len(), 1);
        assert_eq!(set.counts()[&"00000".parse().unwrap()], 1000);
    }

    #[test]
    fn fair_coin_frequency() {
        let s = init_product_state(&[0.5f64]).unwrap();
        let set = sample(&s, 100_000, 42).unwrap();
        let ones = set.counts().get(&"1".parse().unwrap()).copied().unwrap_or(0);
        let p = ones as f64 / 1e5;
        assert!((0.49..=0.51).contains(&p), "{p}");
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let s = init_product_state(&[0.2f64, 0.7, 0.5]).unwrap();
        assert_eq!(sample(&s, 5000, 9).unwrap(), sample(&s, 5000, 9).unwrap());
        assert_ne!(sample(&s, 5000, 9).unwrap(), sample(&s, 5000, 10).unwrap());
        assert!(sample(&s, 0, 9).is_err());
    }

    #[test]
    fn bitstrings_are_qubit_zero_first() {
        let mut s = StateVector::<f64>::zero(3).unwrap();
        apply_ry(&mut s, 0, std::f64::consts::PI).unwrap();
        let set = sample(&s, 10, 0).unwrap();
        assert_eq!(set.counts().keys().next().unwrap().to_string(), "100");
    }

    #[test]
    fn uniform_distribution_and_normalization() {
        let s = init_product_state(&[0.5f64, 0.5]).unwrap();
        let d = distribution(&s, DEFAULT_MAX_QUBITS).unwrap();
        assert!(d.iter().all(|&p| (p - 0.25).abs() < 1e-15));
        let s = init_product_state(&[0.1f64, 0.7, 0.35, 0.9]).unwrap();
        let total: f64 = distribution(&s, DEFAULT_MAX_QUBITS).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!(distribution(&s, 3).is_err());
        let m = distribution_map(&s, DEFAULT_MAX_QUBITS, 0.05).unwrap();
        assert!(m.values().all(|&p| p >= 0.05));
    }

    #[test]
    fn sampled_frequencies_match_distribution() {
        let s = init_product_state(&[0.1f64, 0.7, 0.35]).unwrap();
        let exact = distribution(&s, DEFAULT_MAX_QUBITS).unwrap();
        let shots = 1_000_000u64;
        let set = sample(&s, shots, 5).unwrap();
        for (i, &p) in exact.iter().enumerate() {
            let c = set.counts().get(&Selection::from_index(i, 3)).copied().unwrap_or(0);
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            assert!((c as f64 / shots as f64 - p).abs() <= 5.0 * sigma + 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let set = SampleSet::from_counts([("011".parse().unwrap(), 3), ("111".parse().unwrap(), 1)]);
        assert_eq!(set.to_csv(), "bitstring,count\n011,3\n111,1\n");
        assert_eq!(SampleSet::from_csv(&set.to_csv()).unwrap(), set);
        assert_eq!(set.shots(), 4);
        assert_eq!(set.width(), Some(3));
        assert!(SampleSet::from_csv("bitstring,count\n01a,3\n").is_err());
        assert!(SampleSet::from_csv("bitstring,count\n01,x\n").is_err());
    }
}
