// SPDX-License-Identifier: Apache-2.0

//! Constant-versus-balanced classification of Boolean oracles on an
//! idealized analog computer.
//!
//! A function is compiled into its canonical sum-of-products circuit built
//! from unity-gain analog blocks (inverters, multipliers, an adder and a
//! limiter). Driving every input to the logic midpoint and reading the output
//! once gives `0` for constant-0, `1` for constant-1 and `1/2` for any
//! balanced function. The [`quantum`] module simulates the Deutsch–Jozsa
//! circuit on a state vector so both one-query procedures can be compared
//! against the exhaustive digital baseline in [`boolean`].

pub mod analog;
pub mod boolean;
pub mod expr;
pub mod netlist;
pub mod quantum;

pub use analog::{
    decide_class, evaluate, midpoint_probe, monte_carlo_sweep, run_deutsch_analog, AnalogConfig,
    AnalogError, DecisionReport, SweepRow, Verdict,
};
pub use boolean::{
    random_promise_function, BooleanError, FunctionClass, SopForm, TruthTable, ARITY_CAP,
};
pub use expr::{parse_expr, parse_truth_table_file, Expr, ExprError, TableFormatError};
pub use netlist::{BlockKind, Netlist, NetlistError, NetlistStats, Violation, Violations, Wire};
pub use quantum::{
    phase_sum_reference, run_dja_quantum, QuantumError, QuantumReport, QuantumVerdict, StateVector,
    QUBIT_CAP,
};
