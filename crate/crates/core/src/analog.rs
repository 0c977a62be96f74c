// SPDX-License-Identifier: Apache-2.0

//! Memoryless evaluation of analog block netlists.
//!
//! All voltages are normalized so logic 0 is `0.0` and logic 1 is `1.0`;
//! [`AnalogConfig::logic_high`] only scales values for display. Ideal block
//! transfer functions:
//!
//! | block | output            |
//! |-------|-------------------|
//! | BUF   | `v`               |
//! | INV   | `1 - v`           |
//! | MUL   | product of inputs |
//! | ADD   | sum of inputs (`0` with no inputs) |
//! | LIM   | `v` clamped to `[0, 1]` |
//!
//! With a non-zero gain or offset bound every block output `y` becomes
//! `y·(1+ε)+η`, with `ε ~ U[-δ, δ]` and `η ~ U[-σ, σ]` drawn per block from a
//! generator seeded by [`AnalogConfig::seed`], so a given config always
//! reproduces the same perturbation.

use std::cell::Cell;
use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolean::{BooleanError, FunctionClass, TruthTable};
use crate::netlist::{BlockKind, CompiledNetlist, Netlist, Slot, Violations};

/// Logic midpoint in normalized units.
pub const MIDPOINT: f64 = 0.5;

thread_local! {
    static EVALUATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of netlist evaluations performed so far on the calling thread.
pub fn evaluation_count() -> u64 {
    EVALUATIONS.with(Cell::get)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalogError {
    #[error(transparent)]
    Netlist(#[from] Violations),
    #[error(transparent)]
    Boolean(#[from] BooleanError),
    #[error("expected {expected} input voltages, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("input x{index} = {value} is outside the normalized range [0, 1]")]
    InputRange { index: usize, value: f64 },
    #[error("measurement {0} is not finite")]
    NonFinite(f64),
    #[error("invalid analog configuration: {0}")]
    Config(String),
    #[error("function is {0}, outside the constant-or-balanced promise")]
    PromiseViolation(FunctionClass),
    #[error("trial count must be at least 1")]
    NoTrials,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalogConfig {
    /// Volts corresponding to logic 1, used only when presenting results.
    pub logic_high: f64,
    /// Per-block multiplicative gain error bound δ.
    pub gain_error_bound: f64,
    /// Per-block additive offset bound σ, in normalized volts.
    pub offset_bound: f64,
    pub seed: u64,
}

impl Default for AnalogConfig {
    fn default() -> Self {
        Self {
            logic_high: 1.0,
            gain_error_bound: 0.0,
            offset_bound: 0.0,
            seed: 0,
        }
    }
}

impl AnalogConfig {
    pub fn ideal() -> Self {
        Self::default()
    }

    pub fn noisy(gain_error_bound: f64, offset_bound: f64, seed: u64) -> Self {
        Self {
            gain_error_bound,
            offset_bound,
            seed,
            ..Self::default()
        }
    }

    pub fn with_logic_high(self, logic_high: f64) -> Self {
        Self { logic_high, ..self }
    }

    pub fn is_ideal(&self) -> bool {
        self.gain_error_bound == 0.0 && self.offset_bound == 0.0
    }

    pub fn check(&self) -> Result<(), AnalogError> {
        if !(self.logic_high.is_finite() && self.logic_high > 0.0) {
            return Err(AnalogError::Config(format!(
                "logic_high must be positive, got {}",
                self.logic_high
            )));
        }
        for (name, v) in [
            ("gain_error_bound", self.gain_error_bound),
            ("offset_bound", self.offset_bound),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(AnalogError::Config(format!(
                    "{name} must be a finite non-negative number, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Converts a normalized voltage to volts.
    pub fn to_volts(&self, normalized: f64) -> f64 {
        normalized * self.logic_high
    }
}

/// Evaluates `netlist` on normalized input voltages `(x1, .., xn)`.
pub fn evaluate(
    netlist: &Netlist,
    inputs: &[f64],
    config: &AnalogConfig,
) -> Result<f64, AnalogError> {
    let compiled = netlist.compile()?;
    evaluate_compiled(&compiled, inputs, config)
}

/// [`evaluate`] on an already validated netlist.
pub fn evaluate_compiled(
    netlist: &CompiledNetlist,
    inputs: &[f64],
    config: &AnalogConfig,
) -> Result<f64, AnalogError> {
    config.check()?;
    if inputs.len() != netlist.arity {
        return Err(AnalogError::InputCount {
            expected: netlist.arity,
            got: inputs.len(),
        });
    }
    if let Some((i, &v)) = inputs
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        return Err(AnalogError::InputRange {
            index: i + 1,
            value: v,
        });
    }
    EVALUATIONS.with(|c| c.set(c.get() + 1));

    let mut noise = (!config.is_ideal()).then(|| {
        (
            ChaCha8Rng::seed_from_u64(config.seed),
            config.gain_error_bound,
            config.offset_bound,
        )
    });

    let mut values = Vec::with_capacity(netlist.kinds.len());
    for (kind, slots) in netlist.kinds.iter().zip(&netlist.inputs) {
        let read = |s: &Slot| match *s {
            Slot::Input(i) => inputs[i],
            Slot::Block(j) => values[j],
        };
        let ideal = match kind {
            BlockKind::Buffer => read(&slots[0]),
            BlockKind::Inverter => 1.0 - read(&slots[0]),
            BlockKind::Multiplier => slots.iter().map(read).product(),
            BlockKind::Adder => slots.iter().map(read).fold(0.0, |acc, v| acc + v),
            BlockKind::Limiter => read(&slots[0]).clamp(0.0, 1.0),
        };
        let out = match noise.as_mut() {
            None => ideal,
            Some((rng, delta, sigma)) => {
                let gain = rng.random_range(-*delta..=*delta);
                let offset = rng.random_range(-*sigma..=*sigma);
                ideal * (1.0 + gain) + offset
            }
        };
        values.push(out);
    }
    Ok(match netlist.output {
        Slot::Input(i) => inputs[i],
        Slot::Block(j) => values[j],
    })
}

/// One measurement with every input held at the logic midpoint.
pub fn midpoint_probe(netlist: &Netlist, config: &AnalogConfig) -> Result<f64, AnalogError> {
    evaluate(netlist, &vec![MIDPOINT; netlist.arity], config)
}

/// Class read off a single analog measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Constant0,
    Constant1,
    Balanced,
}

impl Verdict {
    /// Nominal normalized voltage for this verdict.
    pub fn target(self) -> f64 {
        match self {
            Verdict::Constant0 => 0.0,
            Verdict::Constant1 => 1.0,
            Verdict::Balanced => MIDPOINT,
        }
    }

    pub fn class(self) -> FunctionClass {
        match self {
            Verdict::Constant0 => FunctionClass::Constant0,
            Verdict::Constant1 => FunctionClass::Constant1,
            Verdict::Balanced => FunctionClass::Balanced,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.class().fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    /// `|measured - verdict.target()|`.
    pub distance: f64,
}

/// Nearest of `{0, 1/2, 1}`; exact ties at 1/4 and 3/4 go to `Balanced`.
pub fn decide_class(measured: f64) -> Result<Decision, AnalogError> {
    if !measured.is_finite() {
        return Err(AnalogError::NonFinite(measured));
    }
    let verdict = if measured < 0.25 {
        Verdict::Constant0
    } else if measured > 0.75 {
        Verdict::Constant1
    } else {
        Verdict::Balanced
    };
    Ok(Decision {
        verdict,
        distance: (measured - verdict.target()).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    /// Normalized voltage. Stays in `[0, 1]` for ideal runs; block noise
    /// after the limiter can push it slightly outside.
    pub measured: f64,
    pub verdict: Verdict,
    pub distance: f64,
    pub backend: String,
    /// Netlist evaluations spent producing this report.
    pub evaluations: u64,
}

/// Synthesizes the canonical circuit for `tt`, probes it once at the
/// midpoint and classifies the reading.
pub fn run_deutsch_analog(
    tt: &TruthTable,
    config: &AnalogConfig,
) -> Result<DecisionReport, AnalogError> {
    let netlist = Netlist::synthesize(&tt.to_sop());
    let before = evaluation_count();
    let measured = midpoint_probe(&netlist, config)?;
    let evaluations = evaluation_count() - before;
    let Decision { verdict, distance } = decide_class(measured)?;
    Ok(DecisionReport {
        measured,
        verdict,
        distance,
        backend: "analog".into(),
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub delta: f64,
    pub sigma: f64,
    pub trials: u64,
    pub misclass_rate: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one trial, a pure function of the sweep seed and the trial's
/// coordinates.
pub fn trial_seed(seed: u64, grid_point: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ grid_point) ^ trial)
}

/// Misclassification rate of perturbed midpoint probes over a δ×σ grid.
///
/// Rows are ordered δ-major. Trials run in parallel; each derives its own
/// seed from `(seed, grid point, trial)`, so the table does not depend on
/// scheduling.
pub fn monte_carlo_sweep(
    tt: &TruthTable,
    deltas: &[f64],
    sigmas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepRow>, AnalogError> {
    if trials == 0 {
        return Err(AnalogError::NoTrials);
    }
    let class = tt.classify();
    if !class.is_promise() {
        return Err(AnalogError::PromiseViolation(class));
    }
    let compiled = Netlist::synthesize(&tt.to_sop()).compile()?;
    let inputs = vec![MIDPOINT; tt.arity()];

    let mut rows = Vec::with_capacity(deltas.len() * sigmas.len());
    for (di, &delta) in deltas.iter().enumerate() {
        for (si, &sigma) in sigmas.iter().enumerate() {
            let grid_point = (di * sigmas.len() + si) as u64;
            AnalogConfig::noisy(delta, sigma, 0).check()?;
            let wrong = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let config = AnalogConfig::noisy(delta, sigma, trial_seed(seed, grid_point, t));
                    let measured = evaluate_compiled(&compiled, &inputs, &config)?;
                    Ok::<u64, AnalogError>(u64::from(
                        decide_class(measured)?.verdict.class() != class,
                    ))
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            rows.push(SweepRow {
                n: tt.arity(),
                delta,
                sigma,
                trials,
                misclass_rate: wrong as f64 / trials as f64,
            });
        }
    }
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str = "n,delta,sigma,trials,misclass_rate";

pub fn write_sweep_csv(rows: &[SweepRow], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.6}",
            r.n, r.delta, r.sigma, r.trials, r.misclass_rate
        )?;
    }
    Ok(())
}
