// SPDX-License-Identifier: Apache-2.0

//! Boolean expression front end and truth-table file reader.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := xorterm ('|' xorterm)*
//! xorterm := term ('^' term)*
//! term    := factor ('&' factor)*
//! factor  := '!' factor | '(' expr ')' | 'x' DIGITS | '0' | '1'
//! ```
//!
//! A chain `a & b & c` becomes one `And` node with three children; an explicit
//! parenthesised group stays nested, so printing and re-parsing is the
//! identity. `^` is binary and left-associative.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::boolean::{check_arity, BooleanError, TruthTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Variable `x<index>`, `index ≥ 1`.
    Var(usize),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Const0,
    Const1,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at position {position}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        position: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error(
        "invalid variable `{token}` at position {position} (expected x<digits> with index >= 1)"
    )]
    BadVariable { position: usize, token: String },
    #[error("x{missing} unused: variables must be contiguous from x1")]
    MissingVariable { missing: usize },
    #[error("expression has no variables; an explicit arity is required")]
    NoVariables,
    #[error("arity {arity} is smaller than the highest variable x{required}")]
    ArityTooSmall { arity: usize, required: usize },
    #[error(transparent)]
    Boolean(#[from] BooleanError),
}

impl Expr {
    pub fn negate(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn xor(a: Expr, b: Expr) -> Expr {
        Expr::Xor(Box::new(a), Box::new(b))
    }

    /// Direct recursive evaluation on one assignment (`assignment[0]` is x1).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            Expr::Var(i) => assignment[i - 1],
            Expr::Not(e) => !e.eval(assignment),
            Expr::And(es) => es.iter().all(|e| e.eval(assignment)),
            Expr::Or(es) => es.iter().any(|e| e.eval(assignment)),
            Expr::Xor(a, b) => a.eval(assignment) ^ b.eval(assignment),
            Expr::Const0 => false,
            Expr::Const1 => true,
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_vars(out)),
            Expr::Xor(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Const0 | Expr::Const1 => {}
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars.last().copied()
    }

    /// Number of input variables, requiring `x1..xk` to all appear.
    pub fn infer_arity(&self) -> Result<usize, ExprError> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        let max = *vars.last().ok_or(ExprError::NoVariables)?;
        if let Some(missing) = (1..=max).find(|i| !vars.contains(i)) {
            return Err(ExprError::MissingVariable { missing });
        }
        Ok(max)
    }

    /// Tabulates the expression over all `2^arity` assignments.
    ///
    /// Works column-wise: each node produces its full output column, so the
    /// tree is walked once rather than once per assignment.
    pub fn to_truth_table(&self, arity: usize) -> Result<TruthTable, ExprError> {
        check_arity(arity)?;
        if let Some(required) = self.max_var() {
            if required > arity {
                return Err(ExprError::ArityTooSmall { arity, required });
            }
        }
        let outputs = self.column(arity);
        Ok(TruthTable::new(arity, outputs)?)
    }

    fn column(&self, arity: usize) -> Vec<bool> {
        let len = 1usize << arity;
        match self {
            Expr::Var(i) => {
                let shift = arity - i;
                (0..len).map(|idx| (idx >> shift) & 1 == 1).collect()
            }
            Expr::Not(e) => e.column(arity).into_iter().map(|b| !b).collect(),
            Expr::And(es) => fold_columns(es, arity, |a, b| a & b),
            Expr::Or(es) => fold_columns(es, arity, |a, b| a | b),
            Expr::Xor(a, b) => a
                .column(arity)
                .into_iter()
                .zip(b.column(arity))
                .map(|(x, y)| x ^ y)
                .collect(),
            Expr::Const0 => vec![false; len],
            Expr::Const1 => vec![true; len],
        }
    }

    // Binding strength used by the printer: higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(_) => 1,
            Expr::Xor(..) => 2,
            Expr::And(_) => 3,
            Expr::Not(_) | Expr::Var(_) | Expr::Const0 | Expr::Const1 => 4,
        }
    }
}

fn fold_columns(es: &[Expr], arity: usize, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    let mut iter = es.iter();
    let mut acc = iter
        .next()
        .map(|e| e.column(arity))
        .unwrap_or_else(|| vec![false; 1usize << arity]);
    for e in iter {
        for (a, b) in acc.iter_mut().zip(e.column(arity)) {
            *a = op(*a, b);
        }
    }
    acc
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Prints in the input grammar with the minimum parentheses needed to parse
/// back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Const0 => f.write_str("0"),
            Expr::Const1 => f.write_str("1"),
            Expr::Not(e) => {
                f.write_str("!")?;
                write_child(f, e, e.precedence() < 4)
            }
            Expr::And(es) | Expr::Or(es) => {
                let (sep, level) = match self {
                    Expr::And(_) => (" & ", 3),
                    _ => (" | ", 1),
                };
                for (k, e) in es.iter().enumerate() {
                    if k > 0 {
                        f.write_str(sep)?;
                    }
                    // same-level children must stay grouped or they would flatten
                    write_child(f, e, e.precedence() <= level)?;
                }
                Ok(())
            }
            Expr::Xor(a, b) => {
                write_child(f, a, a.precedence() < 2)?;
                f.write_str(" ^ ")?;
                write_child(f, b, b.precedence() <= 2)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Or,
    Xor,
    And,
    Not,
    LParen,
    RParen,
    Var(usize),
    Zero,
    One,
    End,
}

impl Tok {
    fn describe(self) -> String {
        match self {
            Tok::Or => "'|'".into(),
            Tok::Xor => "'^'".into(),
            Tok::And => "'&'".into(),
            Tok::Not => "'!'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Var(i) => format!("'x{i}'"),
            Tok::Zero => "'0'".into(),
            Tok::One => "'1'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

/// Token with its 1-based character position.
type Spanned = (Tok, usize);

fn lex(text: &str) -> Result<Vec<Spanned>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        let single = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '|' => Some(Tok::Or),
            '^' => Some(Tok::Xor),
            '&' => Some(Tok::And),
            '!' => Some(Tok::Not),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '0' => Some(Tok::Zero),
            '1' => Some(Tok::One),
            _ => None,
        };
        if let Some(tok) = single {
            toks.push((tok, pos));
            i += 1;
            continue;
        }
        if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let token: String = chars[start..i].iter().collect();
            let index = token
                .strip_prefix('x')
                .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&n| n >= 1);
            match index {
                Some(n) => toks.push((Tok::Var(n), pos)),
                None => {
                    return Err(ExprError::BadVariable {
                        position: pos,
                        token,
                    })
                }
            }
            continue;
        }
        return Err(ExprError::Syntax {
            position: pos,
            found: format!("{c:?}"),
            expected: vec!["'!'", "'('", "variable", "'0'", "'1'"],
        });
    }
    toks.push((Tok::End, chars.len() + 1));
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

const FACTOR_START: &[&str] = &["'!'", "'('", "variable", "'0'", "'1'"];

impl Parser {
    fn peek(&self) -> Spanned {
        self.toks[self.at]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.at];
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: Vec<&'static str>) -> ExprError {
        let (tok, position) = self.peek();
        ExprError::Syntax {
            position,
            found: tok.describe(),
            expected,
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut items = vec![self.xorterm()?];
        while self.peek().0 == Tok::Or {
            self.bump();
            items.push(self.xorterm()?);
        }
        Ok(collapse(items, Expr::Or))
    }

    fn xorterm(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        while self.peek().0 == Tok::Xor {
            self.bump();
            let rhs = self.term()?;
            acc = Expr::xor(acc, rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut items = vec![self.factor()?];
        while self.peek().0 == Tok::And {
            self.bump();
            items.push(self.factor()?);
        }
        Ok(collapse(items, Expr::And))
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.peek().0 {
            Tok::Not => {
                self.bump();
                Ok(Expr::negate(self.factor()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().0 != Tok::RParen {
                    return Err(self.error(vec!["')'"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Var(i) => {
                self.bump();
                Ok(Expr::Var(i))
            }
            Tok::Zero => {
                self.bump();
                Ok(Expr::Const0)
            }
            Tok::One => {
                self.bump();
                Ok(Expr::Const1)
            }
            _ => Err(self.error(FACTOR_START.to_vec())),
        }
    }
}

fn collapse(mut items: Vec<Expr>, make: fn(Vec<Expr>) -> Expr) -> Expr {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        make(items)
    }
}

/// Parses an expression in the grammar above.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Empty);
    }
    let mut parser = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let expr = parser.expr()?;
    if parser.peek().0 != Tok::End {
        return Err(parser.error(vec!["'|'", "'^'", "'&'", "end of input"]));
    }
    Ok(expr)
}

/// Parses and tabulates an expression; `arity_override` is required for
/// constant expressions and may widen the table beyond the highest variable.
pub fn expr_to_truth_table(
    text: &str,
    arity_override: Option<usize>,
) -> Result<TruthTable, ExprError> {
    let expr = parse_expr(text)?;
    let arity = match arity_override {
        Some(n) => n,
        None => expr.infer_arity()?,
    };
    expr.to_truth_table(arity)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableFormatErrorKind {
    MissingHeader,
    BadHeader(String),
    MissingBits,
    Length { expected: usize, got: usize },
    IllegalChar(char),
    TrailingContent,
    Arity(BooleanError),
}

/// Truth-table file error with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {}", describe_kind(kind))]
pub struct TableFormatError {
    pub line: usize,
    pub column: usize,
    pub kind: TableFormatErrorKind,
}

fn describe_kind(kind: &TableFormatErrorKind) -> String {
    match kind {
        TableFormatErrorKind::MissingHeader => "missing `n=<arity>` header".into(),
        TableFormatErrorKind::BadHeader(h) => format!("bad header {h:?}, expected `n=<arity>`"),
        TableFormatErrorKind::MissingBits => "missing bit string".into(),
        TableFormatErrorKind::Length { expected, got } => {
            format!("expected {expected} bits, got {got}")
        }
        TableFormatErrorKind::IllegalChar(c) => format!("illegal character {c:?}"),
        TableFormatErrorKind::TrailingContent => "unexpected content after the bit string".into(),
        TableFormatErrorKind::Arity(e) => e.to_string(),
    }
}

/// Reads the two-line `n=<arity>` / bit-string format.
pub fn parse_truth_table_file(text: &str) -> Result<TruthTable, TableFormatError> {
    let err = |line, column, kind| TableFormatError { line, column, kind };
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');

    let header = lines
        .next()
        .filter(|h| !h.is_empty())
        .ok_or_else(|| err(1, 1, TableFormatErrorKind::MissingHeader))?;
    let digits = header
        .strip_prefix("n=")
        .ok_or_else(|| err(1, 1, TableFormatErrorKind::BadHeader(header.into())))?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(err(1, 3, TableFormatErrorKind::BadHeader(header.into())));
    }
    let arity: usize = digits
        .parse()
        .map_err(|_| err(1, 3, TableFormatErrorKind::BadHeader(header.into())))?;
    check_arity(arity).map_err(|e| err(1, 3, TableFormatErrorKind::Arity(e)))?;

    let bits = lines
        .next()
        .ok_or_else(|| err(2, 1, TableFormatErrorKind::MissingBits))?;
    if let Some((col, c)) = bits
        .chars()
        .enumerate()
        .find(|(_, c)| *c != '0' && *c != '1')
    {
        return Err(err(2, col + 1, TableFormatErrorKind::IllegalChar(c)));
    }
    let expected = 1usize << arity;
    let got = bits.chars().count();
    if got != expected {
        return Err(err(
            2,
            got.min(expected) + 1,
            TableFormatErrorKind::Length { expected, got },
        ));
    }
    if lines.next().is_some() {
        return Err(err(3, 1, TableFormatErrorKind::TrailingContent));
    }
    TruthTable::from_bit_str(arity, bits).map_err(|e| err(2, 1, TableFormatErrorKind::Arity(e)))
}
