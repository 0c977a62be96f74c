// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: classify oracles with each backend, synthesize
//! netlists, run tolerance sweeps and generate promise functions.
//!
//! Exit codes: `0` success, `2` bad input (parse errors, caps, infeasible
//! requests), `3` promise violation, `4` backend disagreement, `5` I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use analog_dj::analog::{write_sweep_csv, AnalogError};
use analog_dj::expr::expr_to_truth_table;
use analog_dj::{
    monte_carlo_sweep, parse_truth_table_file, random_promise_function, run_deutsch_analog,
    run_dja_quantum, AnalogConfig, DecisionReport, FunctionClass, Netlist, NetlistStats,
    QuantumReport, QuantumVerdict, SweepRow, TruthTable,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PROMISE: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "analog-dj",
    version,
    about = "One-measurement constant/balanced classification on analog block circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify an oracle with the analog, quantum and/or exhaustive backend.
    Classify(ClassifyArgs),
    /// Write the canonical analog netlist for an oracle.
    Synth(SynthArgs),
    /// Monte Carlo misclassification rates over gain/offset error grids.
    Sweep(SweepArgs),
    /// Generate a random function of a given class as a truth-table file.
    Random(RandomArgs),
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Boolean expression over x1..xn, e.g. "x1 ^ x2".
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    expr: Option<String>,
    /// Truth-table file (`n=<arity>` then the bit string).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Input count; required for constant expressions.
    #[arg(long, requires = "expr")]
    arity: Option<usize>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Volts per logic 1, used when printing voltages.
    #[arg(long, default_value_t = 1.0)]
    logic_high: f64,
    /// Per-block gain error bound.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Per-block offset bound (normalized volts).
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Analog,
    Quantum,
    Exhaustive,
    All,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, value_enum, default_value_t = Backend::All)]
    backend: Backend,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Emit JSON wrapped with the run manifest.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    /// Destination for the netlist JSON.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    /// Comma-separated gain error bounds.
    #[arg(long, value_delimiter = ',', required = true)]
    delta_grid: Vec<f64>,
    /// Comma-separated offset bounds.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    sigma_grid: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    /// constant0, constant1, balanced or neither.
    #[arg(long)]
    class: FunctionClass,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Promise(String),
    Disagree,
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Promise(_) => EXIT_PROMISE,
            CliError::Disagree => EXIT_DISAGREE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(m) | CliError::Promise(m) | CliError::Io(m) => m.clone(),
            CliError::Disagree => "backends disagree on a constant-or-balanced function".into(),
        }
    }
}

fn from_analog(e: AnalogError) -> CliError {
    match e {
        AnalogError::PromiseViolation(_) => CliError::Promise(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputEcho {
    pub kind: &'static str,
    pub value: String,
}

/// Echo of everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub input: InputEcho,
    pub arity: usize,
    pub seed: u64,
    pub config: serde_json::Value,
    pub version: &'static str,
}

fn manifest(
    command: &'static str,
    oracle: &OracleArgs,
    arity: usize,
    seed: u64,
    config: serde_json::Value,
) -> RunManifest {
    let input = match (&oracle.expr, &oracle.table) {
        (Some(e), _) => InputEcho {
            kind: "expr",
            value: e.clone(),
        },
        (None, Some(p)) => InputEcho {
            kind: "table",
            value: p.display().to_string(),
        },
        (None, None) => unreachable!("clap requires an oracle"),
    };
    RunManifest {
        command,
        input,
        arity,
        seed,
        config,
        version: env!("CARGO_PKG_VERSION"),
    }
}

fn load_oracle(oracle: &OracleArgs) -> Result<TruthTable, CliError> {
    if let Some(text) = &oracle.expr {
        return expr_to_truth_table(text, oracle.arity).map_err(|e| CliError::Input(e.to_string()));
    }
    let path = oracle.table.as_ref().expect("clap requires an oracle");
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_truth_table_file(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

#[derive(Debug, Serialize)]
struct ExhaustiveReport {
    class: FunctionClass,
    ones: u64,
    total: u64,
}

#[derive(Debug, Serialize)]
struct AnalogView {
    #[serde(flatten)]
    report: DecisionReport,
    measured_volts: f64,
}

#[derive(Debug, Serialize)]
struct ClassifyOutput {
    manifest: RunManifest,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhaustive: Option<ExhaustiveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analog: Option<AnalogView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantum: Option<QuantumReport>,
    /// `None` unless every backend ran on a promise function.
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
}

fn quantum_matches(class: FunctionClass, verdict: QuantumVerdict) -> bool {
    match class {
        FunctionClass::Constant0 | FunctionClass::Constant1 => verdict == QuantumVerdict::Constant,
        FunctionClass::Balanced => verdict == QuantumVerdict::Balanced,
        FunctionClass::Neither => verdict == QuantumVerdict::Indeterminate,
    }
}

fn cmd_classify(args: &ClassifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tt = load_oracle(&args.oracle)?;
    let config = AnalogConfig {
        logic_high: args.noise.logic_high,
        gain_error_bound: args.noise.delta,
        offset_bound: args.noise.sigma,
        seed: args.noise.seed,
    };
    config.check().map_err(from_analog)?;
    let wants = |b: Backend| args.backend == b || args.backend == Backend::All;

    let class = tt.classify();
    let exhaustive = wants(Backend::Exhaustive).then(|| ExhaustiveReport {
        class,
        ones: tt.ones_count(),
        total: tt.len() as u64,
    });
    let analog = if wants(Backend::Analog) {
        let report = run_deutsch_analog(&tt, &config).map_err(from_analog)?;
        Some(AnalogView {
            measured_volts: config.to_volts(report.measured),
            report,
        })
    } else {
        None
    };
    let quantum = if wants(Backend::Quantum) {
        Some(run_dja_quantum(&tt).map_err(|e| CliError::Input(e.to_string()))?)
    } else {
        None
    };
    let agree = match (&analog, &quantum) {
        (Some(a), Some(q)) if args.backend == Backend::All && class.is_promise() => {
            Some(a.report.verdict.class() == class && quantum_matches(class, q.verdict))
        }
        _ => None,
    };

    let output = ClassifyOutput {
        manifest: manifest(
            "classify",
            &args.oracle,
            tt.arity(),
            config.seed,
            serde_json::to_value(config).expect("config serializes"),
        ),
        exhaustive,
        analog,
        quantum,
        agree,
    };
    let text = if args.json {
        to_json(&output)
    } else {
        render_classify(&output, &config)
    };
    writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))?;
    if agree == Some(false) {
        return Err(CliError::Disagree);
    }
    Ok(())
}

fn render_classify(o: &ClassifyOutput, config: &AnalogConfig) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "oracle: {} (n={})",
        o.manifest.input.value, o.manifest.arity
    );
    if config.logic_high != 1.0 {
        let _ = write!(s, ", logic high {} V", config.logic_high);
    }
    s.push('\n');
    let _ = writeln!(s, "{:<11} {:<14} evidence", "backend", "verdict");
    if let Some(e) = &o.exhaustive {
        let _ = writeln!(
            s,
            "{:<11} {:<14} ones={}/{}",
            "exhaustive",
            e.class.to_string(),
            e.ones,
            e.total
        );
    }
    if let Some(a) = &o.analog {
        let _ = writeln!(
            s,
            "{:<11} {:<14} measured={:.6} V (normalized {:.6}, distance {:.6}, evaluations {})",
            "analog",
            a.report.verdict.to_string(),
            a.measured_volts,
            a.report.measured,
            a.report.distance,
            a.report.evaluations
        );
    }
    if let Some(q) = &o.quantum {
        let _ = writeln!(
            s,
            "{:<11} {:<14} p_all_zero={:.6}",
            "quantum",
            q.verdict.to_string(),
            q.p_all_zero
        );
    }
    match o.agree {
        Some(true) => s.push_str("agreement: all backends agree"),
        Some(false) => s.push_str("agreement: BACKENDS DISAGREE"),
        None if o.exhaustive.as_ref().is_some_and(|e| !e.class.is_promise()) => {
            s.push_str("note: function is outside the constant-or-balanced promise")
        }
        None => {}
    }
    s.trim_end().to_string()
}

#[derive(Debug, Serialize)]
struct SynthOutput {
    manifest: RunManifest,
    out: String,
    stats: NetlistStats,
}

fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tt = load_oracle(&args.oracle)?;
    let netlist = Netlist::synthesize(&tt.to_sop());
    let stats = netlist
        .stats()
        .map_err(|e| CliError::Input(e.to_string()))?;
    write_file(&args.out, &netlist.to_json())?;
    let text = if args.json {
        to_json(&SynthOutput {
            manifest: manifest(
                "synth",
                &args.oracle,
                tt.arity(),
                0,
                serde_json::Value::Null,
            ),
            out: args.out.display().to_string(),
            stats,
        })
    } else {
        format!("wrote {}\n{stats}", args.out.display())
    };
    writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Debug, Serialize)]
struct SweepOutput {
    manifest: RunManifest,
    rows: Vec<SweepRow>,
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tt = load_oracle(&args.oracle)?;
    let rows = monte_carlo_sweep(
        &tt,
        &args.delta_grid,
        &args.sigma_grid,
        args.trials,
        args.seed,
    )
    .map_err(from_analog)?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv).expect("writing to memory");
    let csv = String::from_utf8(csv).expect("ascii csv");
    if let Some(path) = &args.out {
        write_file(path, &csv)?;
    }
    let result = if args.json {
        let config = serde_json::json!({
            "delta_grid": args.delta_grid,
            "sigma_grid": args.sigma_grid,
            "trials": args.trials,
        });
        writeln!(
            out,
            "{}",
            to_json(&SweepOutput {
                manifest: manifest("sweep", &args.oracle, tt.arity(), args.seed, config),
                rows,
            })
        )
    } else if args.out.is_none() {
        write!(out, "{csv}")
    } else {
        Ok(())
    };
    result.map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_random(args: &RandomArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let tt = random_promise_function(args.n, args.class, args.seed)
        .map_err(|e| CliError::Input(e.to_string()))?;
    match &args.out {
        Some(path) => write_file(path, &tt.to_text()),
        None => write!(out, "{}", tt.to_text()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Random(a) => cmd_random(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
