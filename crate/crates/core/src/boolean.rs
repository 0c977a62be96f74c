// SPDX-License-Identifier: Apache-2.0

//! Truth tables, exhaustive classification and canonical sum-of-products.
//!
//! Assignments are indexed with `x1` as the most significant bit: for arity
//! `n`, the assignment `(x1, .., xn)` has index `x1·2^(n-1) + .. + xn`. Every
//! other module (netlist synthesis, the quantum register layout) uses the same
//! convention.

use std::fmt;

use num_rational::Ratio;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest arity accepted for truth tables and netlists.
///
/// Canonical SOP synthesis emits one multiplier per minterm, so 2^16 product
/// terms is the practical ceiling.
pub const ARITY_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BooleanError {
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("arity {arity} exceeds the cap of {cap}")]
    ArityCap { arity: usize, cap: usize },
    #[error("expected {expected} outputs, got {got}")]
    OutputLength { expected: usize, got: usize },
    #[error("assignment has {got} bits but the function has arity {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("illegal character {ch:?} at bit {position}")]
    IllegalBit { ch: char, position: usize },
    #[error("minterm {minterm} is out of range for arity {arity}")]
    MintermRange { minterm: u32, arity: usize },
    #[error("minterms must be strictly increasing (found {prev} before {next})")]
    MintermOrder { prev: u32, next: u32 },
    #[error("no {class} function exists with arity {arity}")]
    Infeasible { class: FunctionClass, arity: usize },
}

pub(crate) fn check_arity(arity: usize) -> Result<(), BooleanError> {
    if arity == 0 {
        return Err(BooleanError::ZeroArity);
    }
    if arity > ARITY_CAP {
        return Err(BooleanError::ArityCap {
            arity,
            cap: ARITY_CAP,
        });
    }
    Ok(())
}

/// Constant-or-balanced classification, plus `Neither` for functions outside
/// the promise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionClass {
    Constant0,
    Constant1,
    Balanced,
    Neither,
}

impl FunctionClass {
    pub const ALL: [FunctionClass; 4] = [
        FunctionClass::Constant0,
        FunctionClass::Constant1,
        FunctionClass::Balanced,
        FunctionClass::Neither,
    ];

    /// True for the three classes covered by the constant-or-balanced promise.
    pub fn is_promise(self) -> bool {
        !matches!(self, FunctionClass::Neither)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionClass::Constant0 => "constant0",
            FunctionClass::Constant1 => "constant1",
            FunctionClass::Balanced => "balanced",
            FunctionClass::Neither => "neither",
        }
    }
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionClass::Constant0 => "Constant0",
            FunctionClass::Constant1 => "Constant1",
            FunctionClass::Balanced => "Balanced",
            FunctionClass::Neither => "Neither",
        })
    }
}

impl std::str::FromStr for FunctionClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "constant0" | "const0" => Ok(FunctionClass::Constant0),
            "constant1" | "const1" => Ok(FunctionClass::Constant1),
            "balanced" => Ok(FunctionClass::Balanced),
            "neither" => Ok(FunctionClass::Neither),
            other => Err(format!(
                "unknown class `{other}` (expected constant0, constant1, balanced or neither)"
            )),
        }
    }
}

/// Complete specification of an `n`-input, single-output Boolean function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruthTable {
    arity: usize,
    outputs: Vec<bool>,
}

impl TruthTable {
    pub fn new(arity: usize, outputs: Vec<bool>) -> Result<Self, BooleanError> {
        check_arity(arity)?;
        let expected = 1usize << arity;
        if outputs.len() != expected {
            return Err(BooleanError::OutputLength {
                expected,
                got: outputs.len(),
            });
        }
        Ok(Self { arity, outputs })
    }

    /// Builds a table by evaluating `f` on every assignment index.
    pub fn from_fn(arity: usize, f: impl FnMut(usize) -> bool) -> Result<Self, BooleanError> {
        check_arity(arity)?;
        Ok(Self {
            arity,
            outputs: (0..1usize << arity).map(f).collect(),
        })
    }

    pub fn constant(arity: usize, value: bool) -> Result<Self, BooleanError> {
        Self::from_fn(arity, |_| value)
    }

    /// Builds a table from a `0`/`1` string, index 0 first.
    pub fn from_bit_str(arity: usize, bits: &str) -> Result<Self, BooleanError> {
        let outputs = bits
            .chars()
            .enumerate()
            .map(|(position, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                ch => Err(BooleanError::IllegalBit { ch, position }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(arity, outputs)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn output(&self, index: usize) -> bool {
        self.outputs[index]
    }

    /// Evaluates the function on an assignment `(x1, .., xn)`.
    pub fn eval(&self, assignment: &[bool]) -> Result<bool, BooleanError> {
        if assignment.len() != self.arity {
            return Err(BooleanError::AssignmentLength {
                expected: self.arity,
                got: assignment.len(),
            });
        }
        Ok(self.outputs[assignment_index(assignment)])
    }

    pub fn ones_count(&self) -> u64 {
        self.outputs.iter().filter(|&&b| b).count() as u64
    }

    /// Digital baseline: inspects every one of the 2^n outputs.
    pub fn classify(&self) -> FunctionClass {
        let ones = self.ones_count();
        let total = self.outputs.len() as u64;
        if ones == 0 {
            FunctionClass::Constant0
        } else if ones == total {
            FunctionClass::Constant1
        } else if 2 * ones == total {
            FunctionClass::Balanced
        } else {
            FunctionClass::Neither
        }
    }

    /// Exact fraction of assignments mapped to 1.
    pub fn ones_fraction(&self) -> Ratio<u64> {
        Ratio::new(self.ones_count(), self.outputs.len() as u64)
    }

    /// Canonical sum-of-products: the sorted indices of all 1-outputs.
    pub fn to_sop(&self) -> SopForm {
        SopForm {
            arity: self.arity,
            minterms: self
                .outputs
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i as u32)
                .collect(),
        }
    }

    pub fn to_bit_string(&self) -> String {
        self.outputs
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Renders the two-line text format: `n=<arity>` then the bit string.
    pub fn to_text(&self) -> String {
        format!("n={}\n{}\n", self.arity, self.to_bit_string())
    }
}

/// Index of an assignment with `x1` as the most significant bit.
pub fn assignment_index(assignment: &[bool]) -> usize {
    assignment
        .iter()
        .fold(0usize, |acc, &bit| (acc << 1) | usize::from(bit))
}

/// Inverse of [`assignment_index`].
pub fn index_assignment(arity: usize, index: usize) -> Vec<bool> {
    (0..arity)
        .map(|var| (index >> (arity - 1 - var)) & 1 == 1)
        .collect()
}

/// First canonical form: the set of minterms whose OR equals the function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SopForm {
    arity: usize,
    minterms: Vec<u32>,
}

impl SopForm {
    pub fn new(arity: usize, minterms: Vec<u32>) -> Result<Self, BooleanError> {
        check_arity(arity)?;
        let bound = 1u64 << arity;
        for &m in &minterms {
            if u64::from(m) >= bound {
                return Err(BooleanError::MintermRange { minterm: m, arity });
            }
        }
        if let Some(w) = minterms.windows(2).find(|w| w[0] >= w[1]) {
            return Err(BooleanError::MintermOrder {
                prev: w[0],
                next: w[1],
            });
        }
        Ok(Self { arity, minterms })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn minterms(&self) -> &[u32] {
        &self.minterms
    }

    /// Whether variable `var` (0-based, `0` is `x1`) appears uncomplemented
    /// in `minterm`.
    pub fn literal_is_positive(&self, minterm: u32, var: usize) -> bool {
        (minterm >> (self.arity - 1 - var)) & 1 == 1
    }

    /// Re-expands the minterm list into a full truth table.
    pub fn to_truth_table(&self) -> TruthTable {
        let mut outputs = vec![false; 1usize << self.arity];
        for &m in &self.minterms {
            outputs[m as usize] = true;
        }
        TruthTable {
            arity: self.arity,
            outputs,
        }
    }
}

/// Deterministically draws a function of the requested class.
///
/// `Neither` picks a ones-count uniformly from the counts that violate the
/// promise, then a uniformly random support of that size.
pub fn random_promise_function(
    arity: usize,
    class: FunctionClass,
    seed: u64,
) -> Result<TruthTable, BooleanError> {
    check_arity(arity)?;
    let total = 1usize << arity;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ones = match class {
        FunctionClass::Constant0 => return TruthTable::constant(arity, false),
        FunctionClass::Constant1 => return TruthTable::constant(arity, true),
        FunctionClass::Balanced => total / 2,
        FunctionClass::Neither => {
            if arity < 2 {
                return Err(BooleanError::Infeasible { class, arity });
            }
            // counts in 1..total excluding total/2: total - 2 choices
            let pick = rng.random_range(1..total - 1);
            if pick >= total / 2 {
                pick + 1
            } else {
                pick
            }
        }
    };
    let mut outputs = vec![false; total];
    for i in index::sample(&mut rng, total, ones) {
        outputs[i] = true;
    }
    TruthTable::new(arity, outputs)
}

/// Uniformly random table over all 2^(2^n) functions of the given arity.
pub fn random_function(arity: usize, seed: u64) -> Result<TruthTable, BooleanError> {
    check_arity(arity)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TruthTable::from_fn(arity, |_| rng.random())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(arity: usize, bits: &str) -> TruthTable {
        TruthTable::from_bit_str(arity, bits).unwrap()
    }

    // Majority of three, built by counting ones in each assignment.
    fn majority3() -> TruthTable {
        TruthTable::from_fn(3, |i| i.count_ones() >= 2).unwrap()
    }

    #[test]
    fn majority_oracle_matches_hand_table() {
        assert_eq!(majority3().to_bit_string(), "00010111");
    }

    #[test]
    fn eval_examples() {
        assert!(tt(2, "0110").eval(&[true, false]).unwrap());
        let zero = TruthTable::constant(3, false).unwrap();
        for i in 0..8 {
            assert!(!zero.eval(&index_assignment(3, i)).unwrap());
        }
        assert!(majority3().eval(&[true, true, false]).unwrap());
    }

    #[test]
    fn eval_rejects_wrong_length() {
        let err = tt(2, "0110").eval(&[true]).unwrap_err();
        assert_eq!(
            err,
            BooleanError::AssignmentLength {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn classify_examples() {
        assert_eq!(tt(2, "1111").classify(), FunctionClass::Constant1);
        assert_eq!(tt(1, "01").classify(), FunctionClass::Balanced);
        assert_eq!(tt(2, "0111").classify(), FunctionClass::Neither);
        assert_eq!(tt(1, "00").classify(), FunctionClass::Constant0);
        assert_eq!(tt(1, "10").classify(), FunctionClass::Balanced);
    }

    #[test]
    fn ones_fraction_examples() {
        assert_eq!(tt(1, "01").ones_fraction(), Ratio::new(1, 2));
        assert_eq!(tt(2, "0000").ones_fraction(), Ratio::new(0, 1));
        let balanced = random_promise_function(5, FunctionClass::Balanced, 3).unwrap();
        assert_eq!(balanced.ones_count(), 16);
        assert_eq!(balanced.ones_fraction(), Ratio::new(1, 2));
    }

    #[test]
    fn sop_examples() {
        assert_eq!(tt(2, "0110").to_sop().minterms(), &[1, 2]);
        assert_eq!(tt(2, "1111").to_sop().minterms(), &[0, 1, 2, 3]);
        assert_eq!(majority3().to_sop().minterms(), &[3, 5, 6, 7]);
    }

    #[test]
    fn sop_literals_follow_msb_convention() {
        let sop = SopForm::new(3, vec![0b100]).unwrap();
        assert!(sop.literal_is_positive(0b100, 0));
        assert!(!sop.literal_is_positive(0b100, 1));
        assert!(!sop.literal_is_positive(0b100, 2));
    }

    #[test]
    fn sop_new_validates() {
        assert!(matches!(
            SopForm::new(2, vec![1, 1]),
            Err(BooleanError::MintermOrder { .. })
        ));
        assert!(matches!(
            SopForm::new(2, vec![4]),
            Err(BooleanError::MintermRange { .. })
        ));
        assert!(matches!(
            SopForm::new(17, vec![]),
            Err(BooleanError::ArityCap { .. })
        ));
    }

    #[test]
    fn table_construction_errors() {
        assert_eq!(
            TruthTable::new(0, vec![true]).unwrap_err(),
            BooleanError::ZeroArity
        );
        assert_eq!(
            TruthTable::new(2, vec![true; 3]).unwrap_err(),
            BooleanError::OutputLength {
                expected: 4,
                got: 3
            }
        );
        assert!(matches!(
            TruthTable::constant(17, true),
            Err(BooleanError::ArityCap { arity: 17, .. })
        ));
    }

    #[test]
    fn random_promise_examples() {
        let t = random_promise_function(4, FunctionClass::Balanced, 7).unwrap();
        assert_eq!(t.ones_count(), 8);
        assert_eq!(
            random_promise_function(2, FunctionClass::Constant0, 99)
                .unwrap()
                .to_bit_string(),
            "0000"
        );
        assert_eq!(
            random_promise_function(1, FunctionClass::Neither, 0).unwrap_err(),
            BooleanError::Infeasible {
                class: FunctionClass::Neither,
                arity: 1
            }
        );
    }

    #[test]
    fn random_promise_is_deterministic() {
        for class in FunctionClass::ALL {
            let a = random_promise_function(6, class, 42).unwrap();
            let b = random_promise_function(6, class, 42).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn neither_hits_every_non_promise_count() {
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..200 {
            let t = random_promise_function(2, FunctionClass::Neither, seed).unwrap();
            seen.insert(t.ones_count());
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn text_format() {
        assert_eq!(tt(2, "0110").to_text(), "n=2\n0110\n");
    }

    #[test]
    fn class_parse_and_display() {
        for class in FunctionClass::ALL {
            assert_eq!(class.as_str().parse::<FunctionClass>().unwrap(), class);
        }
        assert!("maybe".parse::<FunctionClass>().is_err());
    }
}
