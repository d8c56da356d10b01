use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubit pairs for the copula mixer, grouped into sublayers of disjoint
/// pairs. Sublayers are applied in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingScheme {
    sublayers: Vec<Vec<(usize, usize)>>,
}

impl PairingScheme {
    pub fn new(sublayers: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        for (s, layer) in sublayers.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for &(i, j) in layer {
                if i == j {
                    return Err(Error::invalid(format!("sublayer {s} pairs qubit {i} with itself")));
                }
                if !seen.insert(i) || !seen.insert(j) {
                    return Err(Error::invalid(format!("sublayer {s} uses a qubit twice in pair ({i}, {j})")));
                }
            }
        }
        Ok(Self { sublayers })
    }

    /// Nearest-neighbour ring: `(0,1), (2,3), …` then `(1,2), (3,4), …`.
    /// The closing pair `(n−1, 0)` joins the second sublayer for even `n`
    /// and gets its own sublayer for odd `n ≥ 3`.
    pub fn ring(n: usize) -> Self {
        let even: Vec<_> = (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect();
        let mut odd: Vec<_> = (0..(n.saturating_sub(1)) / 2).map(|k| (2 * k + 1, 2 * k + 2)).collect();
        let mut sublayers = vec![even];
        if n > 2 && n.is_multiple_of(2) {
            odd.push((n - 1, 0));
            sublayers.push(odd);
        } else if n > 2 {
            sublayers.push(odd);
            sublayers.push(vec![(n - 1, 0)]);
        }
        sublayers.retain(|l| !l.is_empty());
        Self { sublayers }
    }

    /// Only the first ring sublayer: disjoint pairs `(0,1), (2,3), …`.
    pub fn disjoint(n: usize) -> Self {
        let mut ring = Self::ring(n);
        ring.sublayers.truncate(1);
        ring
    }

    pub fn sublayers(&self) -> &[Vec<(usize, usize)>] {
        &self.sublayers
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sublayers.iter().flatten().copied()
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        match self.pairs().find(|&(i, j)| i >= n || j >= n) {
            Some((i, j)) => Err(Error::invalid(format!("pair ({i}, {j}) out of range for {n} qubits"))),
            None => Ok(()),
        }
    }
}
