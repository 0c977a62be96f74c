// SPDX-License-Identifier: Apache-2.0

//! State-vector reference for the Deutsch and Deutsch–Jozsa circuits.
//!
//! Qubit `0` is `x1` and is the most significant bit of the basis index, so a
//! basis index `(x << 1) | y` lines up with truth-table index `x`. The target
//! qubit is the least significant bit.
//!
//! The single-qubit state `(|0⟩ + |1⟩)/√2` produced by a Hadamard on `|0⟩` is
//! the "plus" state. Some texts on this algorithm call it a Bell state, but
//! that name properly belongs to the two-qubit maximally entangled states.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolean::TruthTable;

/// Total qubits (query register plus target) the simulator will allocate.
pub const QUBIT_CAP: usize = 21;

/// Tolerance on `Σ|a|² = 1`.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Distance from 0 or 1 within which a probability is read as certain.
pub const CERTAINTY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("query register needs at least one qubit")]
    EmptyRegister,
    #[error("{qubits} qubits exceed the cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },
    #[error("qubit {qubit} is out of range for a {qubits}-qubit state")]
    QubitIndex { qubit: usize, qubits: usize },
    #[error("oracle of arity {arity} does not fit a {qubits}-qubit state (needs {} qubits)", arity + 1)]
    OracleArity { arity: usize, qubits: usize },
    #[error("basis index {index} is out of range for {qubits} qubits")]
    BasisIndex { index: usize, qubits: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
}

fn check_qubits(qubits: usize) -> Result<(), QuantumError> {
    if qubits > QUBIT_CAP {
        return Err(QuantumError::QubitCap {
            qubits,
            cap: QUBIT_CAP,
        });
    }
    Ok(())
}

/// Normalized amplitudes over `2^qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(qubits: usize, index: usize) -> Result<Self, QuantumError> {
        if qubits == 0 {
            return Err(QuantumError::EmptyRegister);
        }
        check_qubits(qubits)?;
        let len = 1usize << qubits;
        if index >= len {
            return Err(QuantumError::BasisIndex { index, qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amplitudes })
    }

    /// Wraps arbitrary amplitudes, which must already be normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, QuantumError> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QuantumError::BadLength(len));
        }
        let qubits = len.trailing_zeros() as usize;
        check_qubits(qubits)?;
        let state = Self { qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `Σ|a|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), QuantumError> {
        if qubit >= self.qubits {
            return Err(QuantumError::QubitIndex {
                qubit,
                qubits: self.qubits,
            });
        }
        Ok(())
    }

    pub fn hadamard(&mut self, qubit: usize) -> Result<(), QuantumError> {
        self.check_qubit(qubit)?;
        let stride = 1usize << (self.qubits - 1 - qubit);
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        for base in (0..self.amplitudes.len()).step_by(2 * stride) {
            for i in base..base + stride {
                let a = self.amplitudes[i];
                let b = self.amplitudes[i + stride];
                self.amplitudes[i] = (a + b) * scale;
                self.amplitudes[i + stride] = (a - b) * scale;
            }
        }
        Ok(())
    }

    pub fn pauli_x(&mut self, qubit: usize) -> Result<(), QuantumError> {
        self.check_qubit(qubit)?;
        let stride = 1usize << (self.qubits - 1 - qubit);
        for base in (0..self.amplitudes.len()).step_by(2 * stride) {
            for i in base..base + stride {
                self.amplitudes.swap(i, i + stride);
            }
        }
        Ok(())
    }

    /// Applies `U_f : |x⟩|y⟩ ↦ |x⟩|y ⊕ f(x)⟩`, with the target as the last qubit.
    pub fn apply_oracle(&mut self, f: &TruthTable) -> Result<(), QuantumError> {
        if self.qubits != f.arity() + 1 {
            return Err(QuantumError::OracleArity {
                arity: f.arity(),
                qubits: self.qubits,
            });
        }
        for (x, &fx) in f.outputs().iter().enumerate() {
            if fx {
                self.amplitudes.swap(x << 1, (x << 1) | 1);
            }
        }
        Ok(())
    }

    /// Probability that measuring the first `n` qubits yields all zeros,
    /// summed over the remaining qubits.
    pub fn prob_prefix_zero(&self, n: usize) -> f64 {
        let rest = 1usize << (self.qubits - n);
        self.amplitudes[..rest].iter().map(|a| a.norm_sqr()).sum()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() < 1e-24 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(
                f,
                "({:.6}{:+.6}i)|{:0width$b}⟩",
                a.re,
                a.im,
                i,
                width = self.qubits
            )?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `n` query qubits in `|0…0⟩` and the target in `|1⟩`.
pub fn init_register(n: usize) -> Result<StateVector, QuantumError> {
    if n == 0 {
        return Err(QuantumError::EmptyRegister);
    }
    check_qubits(n + 1)?;
    StateVector::basis(n + 1, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuantumVerdict {
    Constant,
    Balanced,
    Indeterminate,
}

impl fmt::Display for QuantumVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantumVerdict::Constant => "Constant",
            QuantumVerdict::Balanced => "Balanced",
            QuantumVerdict::Indeterminate => "Indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumReport {
    /// Probability of reading the whole query register as zero.
    pub p_all_zero: f64,
    pub verdict: QuantumVerdict,
}

impl QuantumReport {
    pub fn from_probability(p_all_zero: f64) -> Self {
        let verdict = if p_all_zero > 1.0 - CERTAINTY_TOLERANCE {
            QuantumVerdict::Constant
        } else if p_all_zero < CERTAINTY_TOLERANCE {
            QuantumVerdict::Balanced
        } else {
            QuantumVerdict::Indeterminate
        };
        Self {
            p_all_zero,
            verdict,
        }
    }
}

/// Runs `H^{⊗(n+1)} · U_f · H^{⊗n}` on `|0…0⟩|1⟩` and reads the query
/// register. For `n = 1` this is the two-qubit Deutsch circuit.
pub fn run_dja_quantum(f: &TruthTable) -> Result<QuantumReport, QuantumError> {
    let n = f.arity();
    let mut state = init_register(n)?;
    for q in 0..=n {
        state.hadamard(q)?;
    }
    state.apply_oracle(f)?;
    for q in 0..n {
        state.hadamard(q)?;
    }
    Ok(QuantumReport::from_probability(state.prob_prefix_zero(n)))
}

/// Closed form `((1/2^n) Σ_x (-1)^{f(x)})²`, computed straight from the table.
pub fn phase_sum_reference(f: &TruthTable) -> f64 {
    let signed: i64 = f.outputs().iter().map(|&b| if b { -1 } else { 1 }).sum();
    let mean = signed as f64 / f.len() as f64;
    mean * mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::{random_promise_function, FunctionClass};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &StateVector, b: &[Complex64]) -> bool {
        a.amplitudes()
            .iter()
            .zip(b)
            .all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn init_examples() {
        let s = init_register(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let s = init_register(3).unwrap();
        assert_eq!(s.amplitudes().len(), 16);
        assert_eq!(s.amplitudes().iter().filter(|a| a.norm() > 0.0).count(), 1);
        assert_eq!(s.amplitudes()[1], c(1.0));
        assert_eq!(init_register(0), Err(QuantumError::EmptyRegister));
        assert_eq!(
            init_register(21),
            Err(QuantumError::QubitCap {
                qubits: 22,
                cap: 21
            })
        );
    }

    #[test]
    fn hadamard_examples() {
        let mut zero = StateVector::basis(1, 0).unwrap();
        zero.hadamard(0).unwrap();
        assert!(close(&zero, &[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]));
        let mut one = StateVector::basis(1, 1).unwrap();
        one.hadamard(0).unwrap();
        assert!(close(&one, &[c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)]));
        for idx in 0..8 {
            let original = StateVector::basis(3, idx).unwrap();
            for q in 0..3 {
                let mut s = original.clone();
                s.hadamard(q).unwrap();
                s.hadamard(q).unwrap();
                assert!(close(&s, original.amplitudes()));
            }
        }
        assert_eq!(
            zero.hadamard(1),
            Err(QuantumError::QubitIndex {
                qubit: 1,
                qubits: 1
            })
        );
    }

    #[test]
    fn hadamard_targets_msb_first() {
        // H on qubit 0 of |00⟩ spreads over indices 0 and 2
        let mut s = StateVector::basis(2, 0).unwrap();
        s.hadamard(0).unwrap();
        assert!(close(
            &s,
            &[c(FRAC_1_SQRT_2), c(0.0), c(FRAC_1_SQRT_2), c(0.0)]
        ));
    }

    #[test]
    fn oracle_examples() {
        let id = TruthTable::from_bit_str(1, "01").unwrap();
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_oracle(&id).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11).unwrap());

        let zero = TruthTable::constant(2, false).unwrap();
        let mut s = init_register(2).unwrap();
        for q in 0..3 {
            s.hadamard(q).unwrap();
        }
        let before = s.clone();
        s.apply_oracle(&zero).unwrap();
        assert_eq!(s, before);

        let f = random_promise_function(3, FunctionClass::Neither, 4).unwrap();
        s = init_register(3).unwrap();
        s.hadamard(0).unwrap();
        s.hadamard(3).unwrap();
        let before = s.clone();
        s.apply_oracle(&f).unwrap();
        s.apply_oracle(&f).unwrap();
        assert_eq!(s, before);

        assert_eq!(
            s.apply_oracle(&zero),
            Err(QuantumError::OracleArity {
                arity: 2,
                qubits: 4
            })
        );
    }

    #[test]
    fn dja_examples() {
        for n in 1..=5 {
            let r = run_dja_quantum(&TruthTable::constant(n, true).unwrap()).unwrap();
            assert!((r.p_all_zero - 1.0).abs() < 1e-9);
            assert_eq!(r.verdict, QuantumVerdict::Constant);
            let b = random_promise_function(n, FunctionClass::Balanced, n as u64).unwrap();
            let r = run_dja_quantum(&b).unwrap();
            assert!(r.p_all_zero.abs() < 1e-9);
            assert_eq!(r.verdict, QuantumVerdict::Balanced);
        }
        let or2 = TruthTable::from_bit_str(2, "0111").unwrap();
        let r = run_dja_quantum(&or2).unwrap();
        assert!((r.p_all_zero - 0.25).abs() < 1e-12);
        assert_eq!(r.verdict, QuantumVerdict::Indeterminate);
    }

    #[test]
    fn deutsch_table_of_four() {
        for (bits, verdict) in [
            ("00", QuantumVerdict::Constant),
            ("11", QuantumVerdict::Constant),
            ("01", QuantumVerdict::Balanced),
            ("10", QuantumVerdict::Balanced),
        ] {
            let r = run_dja_quantum(&TruthTable::from_bit_str(1, bits).unwrap()).unwrap();
            assert_eq!(r.verdict, verdict, "{bits}");
        }
    }

    #[test]
    fn phase_sum_examples() {
        let b = random_promise_function(4, FunctionClass::Balanced, 0).unwrap();
        assert_eq!(phase_sum_reference(&b), 0.0);
        assert_eq!(
            phase_sum_reference(&TruthTable::constant(3, false).unwrap()),
            1.0
        );
        assert_eq!(
            phase_sum_reference(&TruthTable::constant(3, true).unwrap()),
            1.0
        );
        let maj = TruthTable::from_fn(3, |i| i.count_ones() >= 2).unwrap();
        assert_eq!(phase_sum_reference(&maj), 0.0);
        let or2 = TruthTable::from_bit_str(2, "0111").unwrap();
        assert_eq!(phase_sum_reference(&or2), 0.25);
    }

    #[test]
    fn from_amplitudes_checks() {
        assert_eq!(
            StateVector::from_amplitudes(vec![c(1.0); 3]),
            Err(QuantumError::BadLength(3))
        );
        assert!(matches!(
            StateVector::from_amplitudes(vec![c(1.0), c(1.0)]),
            Err(QuantumError::NotNormalized(_))
        ));
        let s = StateVector::from_amplitudes(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        assert_eq!(s.qubits(), 1);
    }

    #[test]
    fn display_lists_nonzero_terms() {
        let mut s = StateVector::basis(2, 0).unwrap();
        s.hadamard(1).unwrap();
        assert_eq!(
            s.to_string(),
            "(0.707107+0.000000i)|00⟩ + (0.707107+0.000000i)|01⟩"
        );
    }
}
