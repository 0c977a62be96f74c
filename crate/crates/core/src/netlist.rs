// SPDX-License-Identifier: Apache-2.0

//! Analog block netlists and canonical sum-of-products synthesis.
//!
//! A synthesized circuit has up to four layers:
//!
//! 1. one shared `INV` per variable that appears complemented in some minterm,
//! 2. one `MUL` per minterm multiplying its `n` literals (a `BUF` when `n = 1`),
//! 3. a single `ADD` summing every product term (fan-in 0 means ground),
//! 4. a `LIM` clamping the sum to the logic range; it drives the output.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boolean::{check_arity, BooleanError, SopForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    #[serde(rename = "BUF")]
    Buffer,
    #[serde(rename = "INV")]
    Inverter,
    #[serde(rename = "MUL")]
    Multiplier,
    #[serde(rename = "ADD")]
    Adder,
    #[serde(rename = "LIM")]
    Limiter,
}

impl BlockKind {
    pub const ALL: [BlockKind; 5] = [
        BlockKind::Buffer,
        BlockKind::Inverter,
        BlockKind::Multiplier,
        BlockKind::Adder,
        BlockKind::Limiter,
    ];

    pub fn code(self) -> &'static str {
        match self {
            BlockKind::Buffer => "BUF",
            BlockKind::Inverter => "INV",
            BlockKind::Multiplier => "MUL",
            BlockKind::Adder => "ADD",
            BlockKind::Limiter => "LIM",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        BlockKind::ALL.into_iter().find(|k| k.code() == code)
    }

    /// Whether `fan_in` inputs are legal. A zero-input adder is the ground
    /// source.
    pub fn accepts_fan_in(self, fan_in: usize) -> bool {
        match self {
            BlockKind::Buffer | BlockKind::Inverter | BlockKind::Limiter => fan_in == 1,
            BlockKind::Multiplier => fan_in >= 2,
            BlockKind::Adder => true,
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A signal: an input terminal `x<i>` (1-based) or the output of a block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Wire {
    Input(usize),
    Block(String),
}

impl Wire {
    pub fn parse(text: &str) -> Wire {
        match terminal_index(text) {
            Some(i) => Wire::Input(i),
            None => Wire::Block(text.to_string()),
        }
    }
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wire::Input(i) => write!(f, "x{i}"),
            Wire::Block(id) => f.write_str(id),
        }
    }
}

fn terminal_index(text: &str) -> Option<usize> {
    let digits = text.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

fn looks_like_terminal(text: &str) -> bool {
    text.strip_prefix('x')
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub id: String,
    pub kind: BlockKind,
    pub inputs: Vec<Wire>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Netlist {
    pub arity: usize,
    pub blocks: Vec<Block>,
    pub output: Wire,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadArity(BooleanError),
    InvalidId {
        id: String,
    },
    DuplicateId {
        id: String,
    },
    FanIn {
        block: String,
        kind: BlockKind,
        got: usize,
    },
    /// `user` is a block id, or `output` for the output wire.
    UnknownReference {
        user: String,
        wire: String,
    },
    ForwardReference {
        block: String,
        wire: String,
    },
    Cycle {
        blocks: Vec<String>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadArity(e) => write!(f, "bad arity: {e}"),
            Violation::InvalidId { id } => {
                write!(
                    f,
                    "invalid block id {id:?} (empty or shaped like a terminal)"
                )
            }
            Violation::DuplicateId { id } => write!(f, "duplicate block id {id:?}"),
            Violation::FanIn { block, kind, got } => {
                write!(f, "block {block}: {kind} cannot take {got} input(s)")
            }
            Violation::UnknownReference { user, wire } => {
                write!(f, "{user}: unknown reference {wire:?}")
            }
            Violation::ForwardReference { block, wire } => {
                write!(
                    f,
                    "block {block}: input {wire} is defined later in the block list"
                )
            }
            Violation::Cycle { blocks } => write!(f, "cycle through {}", blocks.join(" -> ")),
        }
    }
}

/// All violations found by [`Netlist::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid netlist: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct Violations(pub Vec<Violation>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error(transparent)]
    Boolean(#[from] BooleanError),
    #[error(transparent)]
    Invalid(#[from] Violations),
    #[error("malformed netlist JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("block record {index} (line {line}), field `{field}`: {message}")]
    Record {
        index: usize,
        line: usize,
        field: &'static str,
        message: String,
    },
}

/// Per-kind block counts and DAG depth.
///
/// `depth` follows the two-level logic convention: input inverters supply
/// complemented literals and are not counted, so every synthesized
/// sum-of-products has depth 3 (product, sum, limit). `block_depth` counts
/// every block on the longest input-to-output path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetlistStats {
    pub buffers: usize,
    pub inverters: usize,
    pub multipliers: usize,
    pub adders: usize,
    pub limiters: usize,
    /// Total adder fan-in.
    pub adder_fan_in: usize,
    pub depth: usize,
    pub block_depth: usize,
}

impl NetlistStats {
    pub fn count(&self, kind: BlockKind) -> usize {
        match kind {
            BlockKind::Buffer => self.buffers,
            BlockKind::Inverter => self.inverters,
            BlockKind::Multiplier => self.multipliers,
            BlockKind::Adder => self.adders,
            BlockKind::Limiter => self.limiters,
        }
    }
}

impl fmt::Display for NetlistStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BUF={} INV={} MUL={} ADD={} (fan-in {}) LIM={} depth={} block_depth={}",
            self.buffers,
            self.inverters,
            self.multipliers,
            self.adders,
            self.adder_fan_in,
            self.limiters,
            self.depth,
            self.block_depth
        )
    }
}

/// Wire resolved to a position: terminal index (0-based) or block index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Slot {
    Input(usize),
    Block(usize),
}

/// Index-resolved form of a validated netlist, ready for evaluation.
#[derive(Debug, Clone)]
pub struct CompiledNetlist {
    pub(crate) arity: usize,
    pub(crate) kinds: Vec<BlockKind>,
    pub(crate) inputs: Vec<Vec<Slot>>,
    pub(crate) output: Slot,
}

impl CompiledNetlist {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn block_count(&self) -> usize {
        self.kinds.len()
    }
}

struct Builder {
    blocks: Vec<Block>,
}

impl Builder {
    fn push(&mut self, kind: BlockKind, inputs: Vec<Wire>) -> Wire {
        let id = format!("b{}", self.blocks.len());
        self.blocks.push(Block {
            id: id.clone(),
            kind,
            inputs,
        });
        Wire::Block(id)
    }
}

impl Netlist {
    /// Compiles a canonical SOP into the multiplier/adder/limiter circuit.
    pub fn synthesize(sop: &SopForm) -> Netlist {
        let n = sop.arity();
        let mut b = Builder { blocks: Vec::new() };
        let mut inverters: Vec<Option<Wire>> = vec![None; n];
        let mut terms = Vec::with_capacity(sop.minterms().len());

        for &m in sop.minterms() {
            let literals: Vec<Wire> = (0..n)
                .map(|var| {
                    if sop.literal_is_positive(m, var) {
                        Wire::Input(var + 1)
                    } else {
                        inverters[var]
                            .get_or_insert_with(|| {
                                b.push(BlockKind::Inverter, vec![Wire::Input(var + 1)])
                            })
                            .clone()
                    }
                })
                .collect();
            let kind = if n == 1 {
                BlockKind::Buffer
            } else {
                BlockKind::Multiplier
            };
            terms.push(b.push(kind, literals));
        }

        let sum = b.push(BlockKind::Adder, terms);
        let output = b.push(BlockKind::Limiter, vec![sum]);
        Netlist {
            arity: n,
            blocks: b.blocks,
            output,
        }
    }

    /// Checks every structural invariant and returns all violations.
    pub fn validate(&self) -> Result<(), Violations> {
        self.compile().map(|_| ())
    }

    /// Validates and resolves wire names to indices.
    pub fn compile(&self) -> Result<CompiledNetlist, Violations> {
        let mut violations = Vec::new();
        if let Err(e) = check_arity(self.arity) {
            violations.push(Violation::BadArity(e));
        }

        let mut position: HashMap<&str, usize> = HashMap::with_capacity(self.blocks.len());
        for (i, block) in self.blocks.iter().enumerate() {
            if block.id.is_empty() || looks_like_terminal(&block.id) {
                violations.push(Violation::InvalidId {
                    id: block.id.clone(),
                });
            }
            if position.insert(&block.id, i).is_some() {
                violations.push(Violation::DuplicateId {
                    id: block.id.clone(),
                });
            }
            if !block.kind.accepts_fan_in(block.inputs.len()) {
                violations.push(Violation::FanIn {
                    block: block.id.clone(),
                    kind: block.kind,
                    got: block.inputs.len(),
                });
            }
        }

        let resolve = |wire: &Wire| -> Option<Slot> {
            match wire {
                Wire::Input(i) if (1..=self.arity).contains(i) => Some(Slot::Input(i - 1)),
                Wire::Input(_) => None,
                Wire::Block(id) => position.get(id.as_str()).map(|&j| Slot::Block(j)),
            }
        };

        let mut inputs = Vec::with_capacity(self.blocks.len());
        let mut forward = Vec::new();
        for (i, block) in self.blocks.iter().enumerate() {
            let mut slots = Vec::with_capacity(block.inputs.len());
            for wire in &block.inputs {
                match resolve(wire) {
                    Some(slot) => {
                        if let Slot::Block(j) = slot {
                            if j >= i {
                                forward.push((i, j, wire));
                            }
                        }
                        slots.push(slot);
                    }
                    None => violations.push(Violation::UnknownReference {
                        user: block.id.clone(),
                        wire: wire.to_string(),
                    }),
                }
            }
            inputs.push(slots);
        }

        let cycles = find_cycles(&inputs);
        let on_cycle: HashSet<usize> = cycles.iter().flatten().copied().collect();
        for (i, j, wire) in forward {
            if !(on_cycle.contains(&i) && on_cycle.contains(&j)) {
                violations.push(Violation::ForwardReference {
                    block: self.blocks[i].id.clone(),
                    wire: wire.to_string(),
                });
            }
        }
        for cycle in cycles {
            violations.push(Violation::Cycle {
                blocks: cycle.iter().map(|&i| self.blocks[i].id.clone()).collect(),
            });
        }

        let output = resolve(&self.output);
        if output.is_none() {
            violations.push(Violation::UnknownReference {
                user: "output".into(),
                wire: self.output.to_string(),
            });
        }

        if !violations.is_empty() {
            return Err(Violations(violations));
        }
        Ok(CompiledNetlist {
            arity: self.arity,
            kinds: self.blocks.iter().map(|b| b.kind).collect(),
            inputs,
            output: output.expect("checked above"),
        })
    }

    pub fn stats(&self) -> Result<NetlistStats, Violations> {
        let compiled = self.compile()?;
        let mut stats = NetlistStats {
            buffers: 0,
            inverters: 0,
            multipliers: 0,
            adders: 0,
            limiters: 0,
            adder_fan_in: 0,
            depth: 0,
            block_depth: 0,
        };
        for block in &self.blocks {
            match block.kind {
                BlockKind::Buffer => stats.buffers += 1,
                BlockKind::Inverter => stats.inverters += 1,
                BlockKind::Multiplier => stats.multipliers += 1,
                BlockKind::Adder => {
                    stats.adders += 1;
                    stats.adder_fan_in += block.inputs.len();
                }
                BlockKind::Limiter => stats.limiters += 1,
            }
        }
        // (logic depth, block depth) per block, in list order (topological)
        let mut depth: Vec<(usize, usize)> = Vec::with_capacity(compiled.kinds.len());
        for (kind, slots) in compiled.kinds.iter().zip(&compiled.inputs) {
            let (logic, all) = slots
                .iter()
                .map(|s| match s {
                    Slot::Input(_) => (0, 0),
                    Slot::Block(j) => depth[*j],
                })
                .fold((0, 0), |(a, b), (c, d)| (a.max(c), b.max(d)));
            let own = usize::from(*kind != BlockKind::Inverter);
            depth.push((logic + own, all + 1));
        }
        if let Slot::Block(j) = compiled.output {
            (stats.depth, stats.block_depth) = depth[j];
        }
        Ok(stats)
    }

    /// Renders the JSON netlist format, one block record per line.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{{\n  \"arity\": {},\n  \"blocks\": [",
            self.arity
        ));
        for (i, block) in self.blocks.iter().enumerate() {
            let record = RawBlock {
                id: block.id.clone(),
                kind: block.kind.code().to_string(),
                inputs: block.inputs.iter().map(ToString::to_string).collect(),
            };
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&serde_json::to_string(&record).expect("plain strings serialize"));
        }
        if !self.blocks.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("],\n  \"output\": ");
        out.push_str(&serde_json::to_string(&self.output.to_string()).expect("string"));
        out.push_str("\n}\n");
        out
    }

    /// Parses the JSON netlist format and validates the result.
    pub fn from_json(text: &str) -> Result<Netlist, NetlistError> {
        let raw: RawNetlist = serde_json::from_str(text).map_err(|e| NetlistError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let record_lines = record_lines(text);
        let mut blocks = Vec::with_capacity(raw.blocks.len());
        for (index, rb) in raw.blocks.into_iter().enumerate() {
            let line = record_lines.get(index).copied().unwrap_or(0);
            let kind = BlockKind::from_code(&rb.kind).ok_or_else(|| NetlistError::Record {
                index,
                line,
                field: "kind",
                message: format!(
                    "unknown kind {:?} (expected BUF, INV, MUL, ADD or LIM)",
                    rb.kind
                ),
            })?;
            blocks.push(Block {
                id: rb.id,
                kind,
                inputs: rb.inputs.iter().map(|w| Wire::parse(w)).collect(),
            });
        }
        let netlist = Netlist {
            arity: raw.arity,
            blocks,
            output: Wire::parse(&raw.output),
        };
        netlist.validate()?;
        Ok(netlist)
    }
}

/// Cycles among block-to-block edges, each reported once as a list of block
/// indices in edge order.
fn find_cycles(inputs: &[Vec<Slot>]) -> Vec<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; inputs.len()];
    let mut cycles = Vec::new();
    let mut stack: Vec<usize> = Vec::new();

    for root in 0..inputs.len() {
        if mark[root] != Mark::New {
            continue;
        }
        // iterative DFS: frames of (node, next edge index)
        let mut frames = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        stack.push(root);
        while let Some(&mut (node, ref mut edge)) = frames.last_mut() {
            let next = inputs[node][*edge..]
                .iter()
                .position(|s| matches!(s, Slot::Block(_)));
            match next {
                Some(offset) => {
                    let Slot::Block(dep) = inputs[node][*edge + offset] else {
                        unreachable!()
                    };
                    *edge += offset + 1;
                    match mark[dep] {
                        Mark::New => {
                            mark[dep] = Mark::Active;
                            stack.push(dep);
                            frames.push((dep, 0));
                        }
                        Mark::Active => {
                            let start = stack.iter().rposition(|&x| x == dep).expect("on stack");
                            cycles.push(stack[start..].to_vec());
                        }
                        Mark::Done => {}
                    }
                }
                None => {
                    mark[node] = Mark::Done;
                    stack.pop();
                    frames.pop();
                }
            }
        }
    }
    cycles
}

// Line number of each block record's opening brace inside the blocks array.
fn record_lines(text: &str) -> Vec<usize> {
    let Some(start) = text.find("\"blocks\"") else {
        return Vec::new();
    };
    let mut lines = Vec::new();
    let mut line = 1 + text[..start].matches('\n').count();
    let mut depth = 0i32;
    let mut in_string = false;
    let mut escaped = false;
    for c in text[start..].chars() {
        if c == '\n' {
            line += 1;
        }
        if in_string {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            '{' if depth == 1 => lines.push(line),
            _ => {}
        }
    }
    lines
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    id: String,
    kind: String,
    inputs: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetlist {
    arity: usize,
    blocks: Vec<RawBlock>,
    output: String,
}
