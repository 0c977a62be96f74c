// SPDX-License-Identifier: Apache-2.0

//! Netlist, analog and quantum invariants checked against brute-force oracles
//! computed directly from truth tables.

use analog_dj::analog::{evaluate, evaluation_count, midpoint_probe};
use analog_dj::boolean::{index_assignment, random_function, random_promise_function};
use analog_dj::quantum::StateVector;
use analog_dj::{
    phase_sum_reference, run_deutsch_analog, run_dja_quantum, AnalogConfig, BlockKind,
    FunctionClass, Netlist, SopForm, TruthTable,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_tables(arity: usize) -> impl Iterator<Item = TruthTable> {
    let len = 1usize << arity;
    (0u64..1 << len).map(move |code| TruthTable::from_fn(arity, |i| (code >> i) & 1 == 1).unwrap())
}

/// Every table with n ≤ 3 plus seeded random tables up to n = 10.
fn corpus() -> Vec<TruthTable> {
    let mut out: Vec<TruthTable> = (1..=3).flat_map(all_tables).collect();
    for seed in 0..300u64 {
        out.push(random_function(1 + (seed % 10) as usize, seed).unwrap());
    }
    out
}

fn brute_fraction(tt: &TruthTable) -> f64 {
    let ones = tt.outputs().iter().filter(|&&b| b).count();
    ones as f64 / (1u64 << tt.arity()) as f64
}

fn check_structure(tt: &TruthTable) {
    let n = tt.arity();
    let sop = tt.to_sop();
    let k = sop.minterms().len();
    let net = Netlist::synthesize(&sop);
    net.validate().unwrap();
    let s = net.stats().unwrap();
    if n == 1 {
        assert_eq!((s.buffers, s.multipliers), (k, 0));
    } else {
        assert_eq!((s.buffers, s.multipliers), (0, k));
    }
    assert_eq!((s.adders, s.adder_fan_in, s.limiters), (1, k, 1));
    assert!(s.inverters <= n);
    // an inverter exists exactly for variables complemented in some minterm
    let needed = (0..n)
        .filter(|&v| {
            sop.minterms()
                .iter()
                .any(|&m| !sop.literal_is_positive(m, v))
        })
        .count();
    assert_eq!(s.inverters, needed);
    for b in &net.blocks {
        if b.kind == BlockKind::Multiplier {
            assert_eq!(b.inputs.len(), n);
        }
    }
}

#[test]
fn structural_theorem_exhaustive_and_random() {
    for n in 1..=3 {
        all_tables(n).for_each(|tt| check_structure(&tt));
    }
    for seed in 0..200u64 {
        check_structure(&random_function(1 + (seed % 10) as usize, seed).unwrap());
    }
}

#[test]
fn netlist_json_round_trip() {
    for seed in 0..1000u64 {
        let tt = random_function(1 + (seed % 8) as usize, seed).unwrap();
        let net = Netlist::synthesize(&tt.to_sop());
        let text = net.to_json();
        let back = Netlist::from_json(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.to_json(), text);
    }
}

#[test]
fn midpoint_equals_ones_fraction() {
    let ideal = AnalogConfig::ideal();
    for tt in corpus() {
        let net = Netlist::synthesize(&tt.to_sop());
        let v = midpoint_probe(&net, &ideal).unwrap();
        assert!((v - brute_fraction(&tt)).abs() <= 1e-12, "{v}");
        // every value involved is a dyadic rational, so f64 is exact
        assert_eq!(v, brute_fraction(&tt));
    }
}

#[test]
fn vertex_evaluation_matches_table() {
    let ideal = AnalogConfig::ideal();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for seed in 0..60u64 {
        let n = 1 + (seed % 10) as usize;
        let tt = random_function(n, seed).unwrap();
        let net = Netlist::synthesize(&tt.to_sop());
        let vertices: Vec<usize> = if n <= 6 {
            (0..1 << n).collect()
        } else {
            (0..100).map(|_| rng.random_range(0..1usize << n)).collect()
        };
        for idx in vertices {
            let a = index_assignment(n, idx);
            let volts: Vec<f64> = a.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            let expected = if tt.eval(&a).unwrap() { 1.0 } else { 0.0 };
            assert_eq!(evaluate(&net, &volts, &ideal).unwrap(), expected);
        }
    }
}

#[test]
fn probe_counts_one_evaluation() {
    for tt in corpus().iter().take(50) {
        let net = Netlist::synthesize(&tt.to_sop());
        let before = evaluation_count();
        midpoint_probe(&net, &AnalogConfig::noisy(0.05, 0.01, 3)).unwrap();
        assert_eq!(evaluation_count() - before, 1);
        assert_eq!(
            run_deutsch_analog(tt, &AnalogConfig::ideal())
                .unwrap()
                .evaluations,
            1
        );
    }
}

#[test]
fn promise_soundness() {
    let ideal = AnalogConfig::ideal();
    for n in 1..=10 {
        for (i, class) in [
            FunctionClass::Constant0,
            FunctionClass::Constant1,
            FunctionClass::Balanced,
        ]
        .into_iter()
        .enumerate()
        {
            for seed in 0..5u64 {
                let tt = random_promise_function(n, class, seed * 3 + i as u64).unwrap();
                let r = run_deutsch_analog(&tt, &ideal).unwrap();
                assert_eq!(r.verdict.class(), tt.classify());
                assert_eq!(r.distance, 0.0);
            }
        }
    }
}

#[test]
fn state_vector_matches_closed_form() {
    for n in 1..=4 {
        for tt in all_tables(n) {
            let p = run_dja_quantum(&tt).unwrap().p_all_zero;
            assert!((p - phase_sum_reference(&tt)).abs() < 1e-9);
        }
    }
    for seed in 0..500u64 {
        let tt = random_function(1 + (seed % 10) as usize, seed).unwrap();
        let p = run_dja_quantum(&tt).unwrap().p_all_zero;
        assert!((p - phase_sum_reference(&tt)).abs() < 1e-9);
    }
}

#[test]
fn quantum_analog_bridge() {
    for tt in corpus() {
        let m = midpoint_probe(&Netlist::synthesize(&tt.to_sop()), &AnalogConfig::ideal()).unwrap();
        let p = run_dja_quantum(&tt).unwrap().p_all_zero;
        assert!((p - (1.0 - 2.0 * m).powi(2)).abs() < 1e-9);
    }
}

fn random_state(qubits: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let raw: Vec<Complex64> = (0..1usize << qubits)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(raw.into_iter().map(|a| a / norm).collect()).unwrap()
}

#[test]
fn gates_preserve_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let n = 1 + i % 6;
        let mut s = random_state(n + 1, &mut rng);
        let tt = random_function(n, i as u64).unwrap();
        let q = rng.random_range(0..=n);
        s.hadamard(q).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        s.apply_oracle(&tt).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oracle_is_an_involutive_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..200 {
        let n = 1 + i % 5;
        let tt = random_function(n, 1000 + i as u64).unwrap();
        let original = random_state(n + 1, &mut rng);
        let mut once = original.clone();
        once.apply_oracle(&tt).unwrap();
        let mut sorted_a: Vec<(u64, u64)> = original
            .amplitudes()
            .iter()
            .map(|a| (a.re.to_bits(), a.im.to_bits()))
            .collect();
        let mut sorted_b: Vec<(u64, u64)> = once
            .amplitudes()
            .iter()
            .map(|a| (a.re.to_bits(), a.im.to_bits()))
            .collect();
        sorted_a.sort_unstable();
        sorted_b.sort_unstable();
        assert_eq!(sorted_a, sorted_b);
        once.apply_oracle(&tt).unwrap();
        assert_eq!(once, original);
    }
}

proptest! {
    #[test]
    fn validate_accepts_every_synthesized_sop(n in 1usize..=8, mask in any::<u64>(), seed in any::<u64>()) {
        let len = 1u32 << n;
        let minterms: Vec<u32> = (0..len).filter(|&i| (mask.rotate_left(i % 64) ^ seed) & 1 == 1).collect();
        let sop = SopForm::new(n, minterms).unwrap();
        prop_assert!(Netlist::synthesize(&sop).validate().is_ok());
    }

    #[test]
    fn noisy_evaluation_is_deterministic(seed in any::<u64>(), delta in 0.0f64..0.5, sigma in 0.0f64..0.2) {
        let tt = random_function(4, seed).unwrap();
        let net = Netlist::synthesize(&tt.to_sop());
        let cfg = AnalogConfig::noisy(delta, sigma, seed);
        prop_assert_eq!(midpoint_probe(&net, &cfg).unwrap(), midpoint_probe(&net, &cfg).unwrap());
    }
}
