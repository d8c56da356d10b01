use copqaoa_core::copqaoa::{
    apply_copula_mixer, apply_cost_layer, apply_rcop, copula_pmf, expected_cost_hamiltonian, objective_from_samples,
    run_circuit, sample_stats, Circuit, CopQaoa, CopulaSpec, InitialState, ObjectiveTable, PairingScheme, QaoaParams,
};
use copqaoa_core::knapsack::{gen_inverse_strongly_correlated, lazy_greedy, smoothed_probabilities, KnapsackInstance};
use copqaoa_core::qsim::{distribution, init_product_state, sample, SampleSet, StateVector, DEFAULT_MAX_QUBITS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn classic() -> KnapsackInstance<f64> {
    KnapsackInstance::from_pairs("classic", &[(60.0, 10.0), (100.0, 20.0), (120.0, 30.0)], 50.0).unwrap()
}

fn random_state(n: usize, rng: &mut impl Rng) -> StateVector<f64> {
    let amps: Vec<_> = (0..1 << n)
        .map(|_| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn max_diff(a: &StateVector<f64>, b: &StateVector<f64>) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_prob_diff(a: &StateVector<f64>, b: &StateVector<f64>) -> f64 {
    a.probabilities().iter().zip(b.probabilities()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_spec(n: usize, rng: &mut impl Rng) -> CopulaSpec<f64> {
    CopulaSpec::new((0..n).map(|_| rng.gen()).collect()).unwrap()
}

#[test]
fn pmf_properties_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (p1, p2, th): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen_range(-1.0..=1.0));
        let q = copula_pmf(p1, p2, th).unwrap();
        assert!(q.iter().all(|&x| x >= 0.0));
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((q[2] + q[3] - p1).abs() < 1e-12);
        assert!((q[1] + q[3] - p2).abs() < 1e-12);
        let ind = copula_pmf(p1, p2, 0.0).unwrap();
        let want = [(1.0 - p1) * (1.0 - p2), (1.0 - p1) * p2, p1 * (1.0 - p2), p1 * p2];
        for (a, b) in ind.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn rcop_squared_amplitudes_equal_pmf() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let (p1, p2): (f64, f64) = (rng.gen(), rng.gen());
        let mut s = StateVector::zero(2).unwrap();
        apply_rcop(&mut s, 0, 1, p1, p2).unwrap();
        let pr = s.probabilities();
        let q = copula_pmf(p1, p2, -1.0).unwrap();
        for (got, want) in [pr[0], pr[2], pr[1], pr[3]].iter().zip(q) {
            assert!((got - want).abs() < 1e-10);
        }
    }
}

#[test]
fn rcop_unitary_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let s0 = random_state(4, &mut rng);
        let mut s = s0.clone();
        let (p1, p2): (f64, f64) = (rng.gen(), rng.gen());
        apply_rcop(&mut s, 3, 1, p1, p2).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        copqaoa_core::copqaoa::apply_rcop_dagger(&mut s, 3, 1, p1, p2, -1.0).unwrap();
        assert!(max_diff(&s, &s0) < 1e-12);
    }
}

#[test]
fn mixer_at_zero_and_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [2, 3, 5, 6] {
        let spec = random_spec(n, &mut rng);
        let pairing = PairingScheme::ring(n);
        let s0 = random_state(n, &mut rng);
        let mut s = s0.clone();
        apply_copula_mixer(&mut s, 0.0, &spec, &pairing).unwrap();
        assert!(max_diff(&s, &s0) < 1e-12);
        let mut s = s0.clone();
        apply_copula_mixer(&mut s, std::f64::consts::PI, &spec, &pairing).unwrap();
        assert!(max_prob_diff(&s, &s0) < 1e-12);
    }
}

#[test]
fn paired_state_is_mixer_eigenstate() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2, 4, 5, 8] {
        let spec = random_spec(n, &mut rng);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..10.0)).collect();
        let engine = CopQaoa::with_values(values, spec, PairingScheme::disjoint(n), InitialState::Paired).unwrap();
        let s0 = engine.initial_state().unwrap();
        for beta in [0.3, 1.1, -2.0, std::f64::consts::PI] {
            let params = QaoaParams::new(vec![0.0, 0.0], vec![beta, 0.7 * beta]).unwrap();
            let s = engine.run(&params).unwrap();
            assert!(max_prob_diff(&s, &s0) < 1e-10, "n={n} beta={beta}");
        }
    }
}

#[test]
fn cost_layer_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 5;
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..50.0)).collect();
    let s0 = random_state(n, &mut rng);
    let mut s = s0.clone();
    apply_cost_layer(&mut s, 0.0, &values).unwrap();
    assert!(max_diff(&s, &s0) < 1e-15);
    let mut a = s0.clone();
    apply_cost_layer(&mut a, 0.13, &values).unwrap();
    assert!(max_prob_diff(&a, &s0) < 1e-14);
    apply_cost_layer(&mut a, 0.29, &values).unwrap();
    let mut b = s0.clone();
    apply_cost_layer(&mut b, 0.42, &values).unwrap();
    assert!(max_diff(&a, &b) < 1e-12);
    assert!(apply_cost_layer(&mut b, 0.42, &values[..3]).is_err());
}

#[test]
fn fused_engine_matches_gate_list() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, init) in [(3, InitialState::Product), (6, InitialState::Product), (7, InitialState::Paired)] {
        let spec = CopulaSpec::with_theta((0..n).map(|_| rng.gen()).collect(), rng.gen_range(-1.0..1.0)).unwrap();
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..20.0)).collect();
        let engine = CopQaoa::with_values(values.clone(), spec.clone(), PairingScheme::ring(n), init).unwrap();
        let params = QaoaParams::new(vec![0.05, -0.11, 0.2], vec![0.4, 1.3, -0.6]).unwrap();
        let fused = engine.run(&params).unwrap();
        let circuit = engine.circuit(&params).unwrap();
        let listed = circuit.simulate().unwrap();
        assert!(max_diff(&fused, &listed) < 1e-12, "n={n}");
        let parsed: Circuit<f64> = serde_json::from_str(&circuit.to_json().unwrap()).unwrap();
        assert_eq!(parsed, circuit);

        if init == InitialState::Product {
            let mut s = init_product_state(spec.probs()).unwrap();
            for (g, b) in params.layers() {
                apply_cost_layer(&mut s, g, &values).unwrap();
                apply_copula_mixer(&mut s, b, &spec, &PairingScheme::ring(n)).unwrap();
            }
            assert!(max_diff(&fused, &s) < 1e-12);
        }
    }
}

#[test]
fn depth_zero_is_product_distribution() {
    let inst: KnapsackInstance<f64> = gen_inverse_strongly_correlated(8, 3).unwrap();
    let probs = smoothed_probabilities(&inst, 0.05, None).unwrap();
    let spec = CopulaSpec::new(probs.clone()).unwrap();
    let s = run_circuit(&inst, &spec, &PairingScheme::ring(8), &QaoaParams::empty()).unwrap();
    let d = distribution(&s, DEFAULT_MAX_QUBITS).unwrap();
    for (x, &p) in d.iter().enumerate() {
        let want: f64 = (0..8).map(|q| if x >> q & 1 == 1 { probs[q] } else { 1.0 - probs[q] }).product();
        assert!((p - want).abs() < 1e-15);
    }
}

#[test]
fn hard_warm_start_returns_greedy_bits() {
    let inst = classic();
    let greedy = lazy_greedy(&inst);
    let probs = smoothed_probabilities(&inst, 1e6, None).unwrap();
    let spec = CopulaSpec::new(probs).unwrap();
    let s = run_circuit(&inst, &spec, &PairingScheme::ring(3), &QaoaParams::empty()).unwrap();
    let samples = sample(&s, 1000, 1).unwrap();
    assert_eq!(samples.counts().get(&greedy.selection), Some(&1000));
}

#[test]
fn norm_preserved_at_depth_five() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let inst: KnapsackInstance<f64> = gen_inverse_strongly_correlated(12, 1).unwrap();
    let spec = random_spec(12, &mut rng);
    let params = QaoaParams::new(
        (0..5).map(|_| rng.gen_range(0.0..0.05)).collect(),
        (0..5).map(|_| rng.gen_range(0.0..3.1)).collect(),
    )
    .unwrap();
    let s = run_circuit(&inst, &spec, &PairingScheme::ring(12), &params).unwrap();
    assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn objective_hand_examples() {
    let inst = classic();
    let mixed = SampleSet::from_counts([("110".parse().unwrap(), 3), ("111".parse().unwrap(), 1)]);
    assert_eq!(objective_from_samples(&inst, &mixed).unwrap(), 120.0);
    let single = SampleSet::from_counts([("011".parse().unwrap(), 7)]);
    assert_eq!(objective_from_samples(&inst, &single).unwrap(), 220.0);
    let bad = SampleSet::from_counts([("111".parse().unwrap(), 5)]);
    assert_eq!(objective_from_samples(&inst, &bad).unwrap(), 0.0);
    let stats = sample_stats(&inst, &mixed).unwrap();
    assert_eq!(stats.valid_ratio, 0.75);
    assert_eq!(stats.best.unwrap().value, 160.0);
}

#[test]
fn exact_stats_agree_with_samples() {
    let inst: KnapsackInstance<f64> = gen_inverse_strongly_correlated(10, 4).unwrap();
    let spec = CopulaSpec::new(smoothed_probabilities(&inst, 0.1, None).unwrap()).unwrap();
    let params = QaoaParams::new(vec![0.004], vec![0.8]).unwrap();
    let s = run_circuit(&inst, &spec, &PairingScheme::ring(10), &params).unwrap();
    let table = ObjectiveTable::new(&inst).unwrap();
    let exact = table.state_stats(&s, 0.0).unwrap();
    let shots = 100_000u64;
    let sampled = sample_stats(&inst, &sample(&s, shots, 3).unwrap()).unwrap();
    let sigma = (exact.valid_ratio * (1.0 - exact.valid_ratio) / shots as f64).sqrt();
    assert!((sampled.valid_ratio - exact.valid_ratio).abs() <= 3.0 * sigma + 1e-12);
    let second: f64 = s
        .probabilities()
        .iter()
        .enumerate()
        .map(|(x, p)| p * table.masked_value(x).powi(2))
        .sum();
    let sd = ((second - exact.objective.powi(2)) / shots as f64).sqrt();
    assert!((sampled.objective - exact.objective).abs() <= 3.0 * sd);
    assert!(sampled.best_value().unwrap() <= exact.best_value().unwrap());
}

#[test]
fn cost_hamiltonian_expectation() {
    let probs = [0.2, 0.9, 0.5];
    let s = init_product_state(&probs).unwrap();
    let values = [3.0, 5.0, 7.0];
    let want: f64 = probs.iter().zip(values).map(|(p, v)| v * (1.0 - 2.0 * p)).sum();
    assert!((expected_cost_hamiltonian(&s, &values).unwrap() - want).abs() < 1e-14);
}

#[test]
fn dimension_errors() {
    let inst = classic();
    let spec = CopulaSpec::new(vec![0.5, 0.5]).unwrap();
    assert!(run_circuit(&inst, &spec, &PairingScheme::ring(3), &QaoaParams::empty()).is_err());
    let spec = CopulaSpec::new(vec![0.5; 3]).unwrap();
    assert!(run_circuit(&inst, &spec, &PairingScheme::ring(4), &QaoaParams::empty()).is_err());
    assert!(QaoaParams::new(vec![0.1], vec![]).is_err());
    let mut s = StateVector::<f64>::zero(3).unwrap();
    assert!(apply_copula_mixer(&mut s, 0.1, &CopulaSpec::new(vec![0.5; 2]).unwrap(), &PairingScheme::ring(2)).is_err());
}
