use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::copula::{apply_rcop_dagger, apply_rcop_theta, rcop_angles, ry_angle, CopulaSpec};
use super::pairing::PairingScheme;
use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::qsim::{
    apply_controlled_ry, apply_phase_z, apply_ry, apply_rz, init_product_state, Gate2, StateVector,
    DEFAULT_MAX_QUBITS,
};
use crate::Scalar;

/// Layer angles; depth is the common length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct QaoaParams<T> {
    pub gammas: Vec<T>,
    pub betas: Vec<T>,
}

impl<T: Scalar> QaoaParams<T> {
    pub fn new(gammas: Vec<T>, betas: Vec<T>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::invalid(format!(
                "{} gammas but {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    pub fn empty() -> Self {
        Self {
            gammas: Vec::new(),
            betas: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn push(&mut self, gamma: T, beta: T) {
        self.gammas.push(gamma);
        self.betas.push(beta);
    }

    pub fn layers(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.gammas.iter().copied().zip(self.betas.iter().copied())
    }

    fn check(&self) -> Result<()> {
        if self.gammas.len() != self.betas.len() {
            return Err(Error::invalid("gamma and beta lists differ in length"));
        }
        Ok(())
    }
}

/// How the register is prepared before the first layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Independent `√(1−pᵢ)|0⟩ + √pᵢ|1⟩` on every qubit.
    #[default]
    Product,
    /// `R_cop|00⟩` on each pair of the first mixer sublayer, product state
    /// on qubits that sublayer leaves out.
    Paired,
}

/// `exp(−iγ Σ vᵢZᵢ)` as one `phase_z` per qubit.
pub fn apply_cost_layer<T: Scalar>(state: &mut StateVector<T>, gamma: T, values: &[T]) -> Result<()> {
    if values.len() != state.num_qubits() {
        return Err(Error::invalid(format!(
            "{} values for {} qubits",
            values.len(),
            state.num_qubits()
        )));
    }
    for (q, &v) in values.iter().enumerate() {
        apply_phase_z(state, q, gamma * v)?;
    }
    Ok(())
}

/// `R_cop · (RZ(2β) ⊗ RZ(2β)) · R_cop†` on every pair, gate by gate.
pub fn apply_copula_mixer<T: Scalar>(
    state: &mut StateVector<T>,
    beta: T,
    spec: &CopulaSpec<T>,
    pairing: &PairingScheme,
) -> Result<()> {
    check_dims(state.num_qubits(), spec, pairing)?;
    let two_beta = T::lit(2.0) * beta;
    let p = spec.probs();
    for (i, j) in pairing.pairs() {
        apply_rcop_dagger(state, i, j, p[i], p[j], spec.theta())?;
        apply_rz(state, i, two_beta)?;
        apply_rz(state, j, two_beta)?;
        apply_rcop_theta(state, i, j, p[i], p[j], spec.theta())?;
    }
    Ok(())
}

fn check_dims<T: Scalar>(n: usize, spec: &CopulaSpec<T>, pairing: &PairingScheme) -> Result<()> {
    if spec.len() != n {
        return Err(Error::invalid(format!("copula spec has {} marginals for {n} qubits", spec.len())));
    }
    pairing.validate_for(n)
}

/// Simulate the cop-QAOA state for `params` from the product initial state.
pub fn run_circuit<T: Scalar>(
    instance: &KnapsackInstance<T>,
    spec: &CopulaSpec<T>,
    pairing: &PairingScheme,
    params: &QaoaParams<T>,
) -> Result<StateVector<T>> {
    CopQaoa::new(instance, spec.clone(), pairing.clone(), InitialState::Product)?.run(params)
}

/// Prepared cop-QAOA circuit family for one instance.
///
/// Each pair's `R_cop` is precomputed as a 4×4 matrix so a mixer layer is
/// one fused two-qubit pass per pair, and the cost layer is a single
/// diagonal pass.
#[derive(Debug, Clone)]
pub struct CopQaoa<T> {
    spec: CopulaSpec<T>,
    pairing: PairingScheme,
    initial: InitialState,
    values: Vec<T>,
    rotations: Vec<((usize, usize), Gate2<T>)>,
    max_qubits: usize,
}

impl<T: Scalar> CopQaoa<T> {
    pub fn new(
        instance: &KnapsackInstance<T>,
        spec: CopulaSpec<T>,
        pairing: PairingScheme,
        initial: InitialState,
    ) -> Result<Self> {
        Self::with_values(instance.values(), spec, pairing, initial)
    }

    pub fn with_values(values: Vec<T>, spec: CopulaSpec<T>, pairing: PairingScheme, initial: InitialState) -> Result<Self> {
        check_dims(values.len(), &spec, &pairing)?;
        let p = spec.probs();
        let rotations = pairing
            .pairs()
            .map(|(i, j)| Ok(((i, j), rcop_matrix(p[i], p[j], spec.theta())?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec,
            pairing,
            initial,
            values,
            rotations,
            max_qubits: DEFAULT_MAX_QUBITS,
        })
    }

    pub fn with_max_qubits(mut self, max_qubits: usize) -> Self {
        self.max_qubits = max_qubits;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.values.len()
    }

    pub fn spec(&self) -> &CopulaSpec<T> {
        &self.spec
    }

    pub fn pairing(&self) -> &PairingScheme {
        &self.pairing
    }

    pub fn initial(&self) -> InitialState {
        self.initial
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn initial_state(&self) -> Result<StateVector<T>> {
        let n = self.num_qubits();
        if n > self.max_qubits {
            return Err(Error::Resource(format!(
                "{n} qubits exceeds the statevector cap of {}",
                self.max_qubits
            )));
        }
        let p = self.spec.probs();
        match self.initial {
            InitialState::Product => init_product_state(p),
            InitialState::Paired => {
                let first = self.pairing.sublayers().first().cloned().unwrap_or_default();
                let mut paired = vec![false; n];
                for &(i, j) in &first {
                    paired[i] = true;
                    paired[j] = true;
                }
                let mut state = StateVector::zero_with_cap(n, self.max_qubits)?;
                for (q, _) in paired.iter().enumerate().filter(|(_, &on)| !on) {
                    apply_ry(&mut state, q, ry_angle(p[q]))?;
                }
                for (i, j) in first {
                    apply_rcop_theta(&mut state, i, j, p[i], p[j], self.spec.theta())?;
                }
                Ok(state)
            }
        }
    }

    /// Diagonal cost layer `exp(−iγ Σ vᵢZᵢ)`.
    pub fn apply_cost(&self, state: &mut StateVector<T>, gamma: T) -> Result<()> {
        let n = self.num_qubits();
        if state.num_qubits() != n {
            return Err(Error::invalid(format!("state has {} qubits, circuit {n}", state.num_qubits())));
        }
        let mut phases = vec![Complex::new(T::one(), T::zero()); 1 << n];
        let mut len = 1;
        for &v in &self.values {
            let plus = Complex::from_polar(T::one(), gamma * v);
            let minus = plus.conj();
            let (lower, upper) = phases.split_at_mut(len);
            for (hi, lo) in upper[..len].iter_mut().zip(lower.iter_mut()) {
                *hi = *lo * plus;
                *lo *= minus;
            }
            len *= 2;
        }
        state.multiply_diagonal(&phases)
    }

    /// Fused copula mixer `exp(−iβ H_cop)` over all pairs.
    pub fn apply_mixer(&self, state: &mut StateVector<T>, beta: T) -> Result<()> {
        let d = [
            Complex::from_polar(T::one(), -T::lit(2.0) * beta),
            Complex::new(T::one(), T::zero()),
            Complex::new(T::one(), T::zero()),
            Complex::from_polar(T::one(), T::lit(2.0) * beta),
        ];
        for &((i, j), ref r) in &self.rotations {
            let mut m = [[Complex::new(T::zero(), T::zero()); 4]; 4];
            for (row, out) in m.iter_mut().enumerate() {
                for (col, cell) in out.iter_mut().enumerate() {
                    *cell = (0..4).map(|k| r[row][k] * d[k] * r[col][k].conj()).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
                }
            }
            state.apply_two(i, j, &m)?;
        }
        Ok(())
    }

    pub fn apply_layer(&self, state: &mut StateVector<T>, gamma: T, beta: T) -> Result<()> {
        self.apply_cost(state, gamma)?;
        self.apply_mixer(state, beta)
    }

    pub fn run(&self, params: &QaoaParams<T>) -> Result<StateVector<T>> {
        let mut state = self.initial_state()?;
        self.extend(&mut state, params)?;
        Ok(state)
    }

    /// Apply the layers of `params` on top of `state`.
    pub fn extend(&self, state: &mut StateVector<T>, params: &QaoaParams<T>) -> Result<()> {
        params.check()?;
        for (g, b) in params.layers() {
            self.apply_layer(state, g, b)?;
        }
        Ok(())
    }

    /// Unfused gate list for `params`, starting from `|0…0⟩`.
    pub fn circuit(&self, params: &QaoaParams<T>) -> Result<Circuit<T>> {
        params.check()?;
        let n = self.num_qubits();
        let p = self.spec.probs();
        let theta = self.spec.theta();
        let mut c = Circuit::new(n);
        match self.initial {
            InitialState::Product => {
                for (q, &pq) in p.iter().enumerate() {
                    c.push(GateKind::Ry, vec![q], ry_angle(pq));
                }
            }
            InitialState::Paired => {
                let first = self.pairing.sublayers().first().cloned().unwrap_or_default();
                let covered: Vec<usize> = first.iter().flat_map(|&(i, j)| [i, j]).collect();
                for q in (0..n).filter(|q| !covered.contains(q)) {
                    c.push(GateKind::Ry, vec![q], ry_angle(p[q]));
                }
                for (i, j) in first {
                    c.push_rcop(i, j, rcop_angles(p[i], p[j], theta));
                }
            }
        }
        for (g, b) in params.layers() {
            for (q, &v) in self.values.iter().enumerate() {
                c.push(GateKind::Rz, vec![q], T::lit(2.0) * g * v);
            }
            for (i, j) in self.pairing.pairs() {
                let [a0, a1, a2] = rcop_angles(p[i], p[j], theta);
                c.push(GateKind::Ncry, vec![i, j], -a2);
                c.push(GateKind::Cry, vec![i, j], -a1);
                c.push(GateKind::Ry, vec![i], -a0);
                c.push(GateKind::Rz, vec![i], T::lit(2.0) * b);
                c.push(GateKind::Rz, vec![j], T::lit(2.0) * b);
                c.push_rcop(i, j, [a0, a1, a2]);
            }
        }
        Ok(c)
    }
}

/// `R_cop` as a 4×4 matrix in the local basis `bit_i + 2·bit_j`.
fn rcop_matrix<T: Scalar>(pi: T, pj: T, theta: T) -> Result<Gate2<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut m = [[zero; 4]; 4];
    for col in 0..4 {
        let mut amps = vec![zero; 4];
        amps[col] = Complex::new(T::one(), T::zero());
        let mut s = StateVector::from_amplitudes(amps)?;
        apply_rcop_theta(&mut s, 0, 1, pi, pj, theta)?;
        for (row, a) in s.amplitudes().iter().enumerate() {
            m[row][col] = *a;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// `exp(−i·angle·Y/2)` on `qubits[0]`.
    Ry,
    /// `exp(−i·angle·Z/2)` on `qubits[0]`.
    Rz,
    /// RY on `qubits[1]` when `qubits[0]` is 1.
    Cry,
    /// RY on `qubits[1]` when `qubits[0]` is 0.
    Ncry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GateOp<T> {
    pub gate: GateKind,
    pub qubits: Vec<usize>,
    pub angle: T,
}

/// Flat gate list, exportable as JSON for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Circuit<T> {
    pub num_qubits: usize,
    pub gates: Vec<GateOp<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: GateKind, qubits: Vec<usize>, angle: T) {
        self.gates.push(GateOp { gate, qubits, angle });
    }

    fn push_rcop(&mut self, i: usize, j: usize, [a0, a1, a2]: [T; 3]) {
        self.push(GateKind::Ry, vec![i], a0);
        self.push(GateKind::Cry, vec![i, j], a1);
        self.push(GateKind::Ncry, vec![i, j], a2);
    }

    pub fn apply(&self, state: &mut StateVector<T>) -> Result<()> {
        for (k, op) in self.gates.iter().enumerate() {
            let arity = match op.gate {
                GateKind::Ry | GateKind::Rz => 1,
                GateKind::Cry | GateKind::Ncry => 2,
            };
            if op.qubits.len() != arity {
                return Err(Error::invalid(format!(
                    "gate {k} ({:?}) takes {arity} qubits, got {}",
                    op.gate,
                    op.qubits.len()
                )));
            }
            let q = &op.qubits;
            match op.gate {
                GateKind::Ry => apply_ry(state, q[0], op.angle)?,
                GateKind::Rz => apply_rz(state, q[0], op.angle)?,
                GateKind::Cry => apply_controlled_ry(state, q[0], q[1], op.angle, true)?,
                GateKind::Ncry => apply_controlled_ry(state, q[0], q[1], op.angle, false)?,
            }
        }
        Ok(())
    }

    /// Run from `|0…0⟩`.
    pub fn simulate(&self) -> Result<StateVector<T>> {
        let mut s = StateVector::zero(self.num_qubits)?;
        self.apply(&mut s)?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
