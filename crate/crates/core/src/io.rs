//! Line-oriented text formats and DOT export.
//!
//! ```text
//! # the shift over two letters
//! transducer n=2 states=2
//! state 0: 0 1 | 0 0
//! state 1: 0 1 | 1 1
//! ```
//!
//! Automata drop the `| outputs` half. Rules list `n^window` outputs in
//! lexicographic order of the window word; partitions list one class label
//! per state; automorphisms give the vertex permutation and the flattened
//! edge-letter table on one line each.

use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::Automaton;
use crate::decomposition::{Factorization, Verification};
use crate::error::Error;
use crate::graph_aut::DigraphAutomorphism;
use crate::partition::StatePartition;
use crate::perm::Perm;
use crate::rule::LocalRule;
use crate::transducer::{ElementOrder, Transducer};

/// Failure to read a text file: either malformed text or well-formed text
/// describing an invalid object.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error(transparent)]
    Invalid(#[from] Error),
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

fn syntax<T>(line: usize, column: usize, message: impl Into<String>) -> FormatResult<T> {
    Err(FormatError::Syntax { line, column, message: message.into() })
}

/// A whitespace-separated token with its 1-based position.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn number(&self) -> FormatResult<usize> {
        self.text
            .parse()
            .or_else(|_| syntax(self.line, self.column, format!("expected a number, found `{}`", self.text)))
    }

    fn fail<T>(&self, message: impl Into<String>) -> FormatResult<T> {
        syntax(self.line, self.column, message)
    }
}

/// Significant lines with comments stripped, each split into tokens.
/// `:` and `|` stand alone as tokens even when glued to a neighbour.
struct Lines<'a> {
    lines: Vec<(usize, Vec<Token<'a>>)>,
    at: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut lines = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            last_line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (j, c) in body.char_indices().chain([(body.len(), ' ')]) {
                let single = c == ':' || c == '|';
                if c.is_whitespace() || single {
                    if let Some(s) = start.take() {
                        tokens.push(Token { text: &body[s..j], line: i + 1, column: s + 1 });
                    }
                    if single {
                        tokens.push(Token { text: &body[j..j + 1], line: i + 1, column: j + 1 });
                    }
                } else if start.is_none() {
                    start = Some(j);
                }
            }
            if !tokens.is_empty() {
                lines.push((i + 1, tokens));
            }
        }
        Lines { lines, at: 0, last_line }
    }

    fn next_line(&mut self, what: &str) -> FormatResult<&[Token<'a>]> {
        match self.lines.get(self.at) {
            Some((_, tokens)) => {
                self.at += 1;
                Ok(tokens)
            }
            None => syntax(self.last_line + 1, 1, format!("unexpected end of input, expected {what}")),
        }
    }

    fn rest(&mut self) -> Vec<Token<'a>> {
        let tokens = self.lines[self.at..].iter().flat_map(|(_, t)| t.iter().copied()).collect();
        self.at = self.lines.len();
        tokens
    }

    fn finish(&self) -> FormatResult<()> {
        match self.lines.get(self.at) {
            Some((_, tokens)) => tokens[0].fail("unexpected trailing content"),
            None => Ok(()),
        }
    }
}

/// Parses `tag key=value ...` with exactly the given keys in order.
fn header(lines: &mut Lines<'_>, tag: &str, keys: &[&str]) -> FormatResult<Vec<usize>> {
    let tokens = lines.next_line("a header")?;
    if tokens[0].text != tag {
        return tokens[0].fail(format!("expected `{tag}` header, found `{}`", tokens[0].text));
    }
    if tokens.len() != keys.len() + 1 {
        return tokens[0].fail(format!("header needs {}", keys.join(", ")));
    }
    tokens[1..]
        .iter()
        .zip(keys)
        .map(|(tok, key)| match tok.text.split_once('=') {
            Some((k, v)) if k == *key => Token { text: v, line: tok.line, column: tok.column + k.len() + 1 }.number(),
            _ => tok.fail(format!("expected `{key}=<number>`")),
        })
        .collect()
}

fn numbers(tokens: &[Token<'_>]) -> FormatResult<Vec<usize>> {
    tokens.iter().map(Token::number).collect()
}

/// Expects `label [index] :` at the start of a line and returns the tail.
fn labelled<'t, 'a>(tokens: &'t [Token<'a>], label: &str, index: Option<usize>) -> FormatResult<&'t [Token<'a>]> {
    if tokens[0].text != label {
        return tokens[0].fail(format!("expected `{label}`"));
    }
    let mut i = 1;
    if let Some(expected) = index {
        let Some(tok) = tokens.get(i) else { return tokens[0].fail(format!("missing {label} index")) };
        if tok.number()? != expected {
            return tok.fail(format!("expected {label} {expected}"));
        }
        i += 1;
    }
    match tokens.get(i) {
        Some(tok) if tok.text == ":" => Ok(&tokens[i + 1..]),
        Some(tok) => tok.fail("expected `:`"),
        None => tokens[0].fail("expected `:`"),
    }
}

fn row_of(tokens: &[Token<'_>], n: usize, what: &str) -> FormatResult<Vec<usize>> {
    let row = numbers(tokens)?;
    if row.len() != n {
        let tok = tokens.first().map_or((0, 0), |t| (t.line, t.column));
        return syntax(tok.0, tok.1, format!("{what} needs {n} entries, found {}", row.len()));
    }
    Ok(row)
}

fn join(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn render_automaton(a: &Automaton) -> String {
    let mut out = format!("automaton n={} states={}\n", a.alphabet_size(), a.state_count());
    for q in 0..a.state_count() {
        writeln!(out, "state {q}: {}", join(a.row(q))).unwrap();
    }
    out
}

pub fn parse_automaton(text: &str) -> FormatResult<Automaton> {
    let mut lines = Lines::new(text);
    let h = header(&mut lines, "automaton", &["n", "states"])?;
    let a = automaton_body(&mut lines, h[0], h[1])?;
    lines.finish()?;
    Ok(a)
}

fn automaton_body(lines: &mut Lines<'_>, n: usize, states: usize) -> FormatResult<Automaton> {
    let mut delta = Vec::new();
    for q in 0..states {
        let tokens = lines.next_line("a state line")?;
        delta.extend(row_of(labelled(tokens, "state", Some(q))?, n, "transition row")?);
    }
    Ok(Automaton::new(n, states, delta)?)
}

pub fn render_transducer(t: &Transducer) -> String {
    let mut out = format!("transducer n={} states={}\n", t.alphabet_size(), t.state_count());
    for q in 0..t.state_count() {
        writeln!(out, "state {q}: {} | {}", join(t.base().row(q)), join(t.output_row(q))).unwrap();
    }
    out
}

pub fn parse_transducer(text: &str) -> FormatResult<Transducer> {
    let mut lines = Lines::new(text);
    let h = header(&mut lines, "transducer", &["n", "states"])?;
    let t = transducer_body(&mut lines, h[0], h[1])?;
    lines.finish()?;
    Ok(t)
}

fn transducer_body(lines: &mut Lines<'_>, n: usize, states: usize) -> FormatResult<Transducer> {
    let mut delta = Vec::new();
    let mut lambda = Vec::new();
    for q in 0..states {
        let tokens = lines.next_line("a state line")?;
        let tail = labelled(tokens, "state", Some(q))?;
        let Some(bar) = tail.iter().position(|t| t.text == "|") else {
            return tokens[0].fail("expected `<transitions> | <outputs>`");
        };
        delta.extend(row_of(&tail[..bar], n, "transition row")?);
        lambda.extend(row_of(&tail[bar + 1..], n, "output row")?);
    }
    Ok(Transducer::new(Automaton::new(n, states, delta)?, lambda)?)
}

pub fn render_rule(f: &LocalRule) -> String {
    let n = f.alphabet_size();
    let mut out = format!("rule n={n} window={}\n", f.window());
    for chunk in f.table().chunks(n) {
        writeln!(out, "{}", join(chunk)).unwrap();
    }
    out
}

pub fn parse_rule(text: &str) -> FormatResult<LocalRule> {
    let mut lines = Lines::new(text);
    let h = header(&mut lines, "rule", &["n", "window"])?;
    let table = numbers(&lines.rest())?;
    Ok(LocalRule::new(h[0], h[1], table)?)
}

pub fn render_partition(p: &StatePartition) -> String {
    format!("partition states={}\n{}\n", p.len(), join(p.as_slice()))
}

pub fn parse_partition(text: &str) -> FormatResult<StatePartition> {
    let mut lines = Lines::new(text);
    let h = header(&mut lines, "partition", &["states"])?;
    let labels = numbers(&lines.rest())?;
    if labels.len() != h[0] {
        return Err(Error::PartitionMismatch { expected: h[0], found: labels.len() }.into());
    }
    Ok(StatePartition::new(labels)?)
}

pub fn render_automorphism(phi: &DigraphAutomorphism) -> String {
    let states = phi.vertex_perm().len();
    let n = phi.edge_table().len().checked_div(states).unwrap_or(0);
    format!(
        "automorphism n={n} states={states}\nvertices: {}\nedges: {}\n",
        join(phi.vertex_perm().as_slice()),
        join(phi.edge_table())
    )
}

/// Reads an automorphism of `a`; the file's sizes must match.
pub fn parse_automorphism(text: &str, a: &Automaton) -> FormatResult<DigraphAutomorphism> {
    let mut lines = Lines::new(text);
    let h = header(&mut lines, "automorphism", &["n", "states"])?;
    if h[0] != a.alphabet_size() {
        return Err(Error::AlphabetMismatch { left: a.alphabet_size(), right: h[0] }.into());
    }
    if h[1] != a.state_count() {
        return Err(Error::PartitionMismatch { expected: a.state_count(), found: h[1] }.into());
    }
    let vertices = row_of(labelled(lines.next_line("a vertices line")?, "vertices", None)?, h[1], "vertex permutation")?;
    let edges = row_of(labelled(lines.next_line("an edges line")?, "edges", None)?, h[0] * h[1], "edge table")?;
    lines.finish()?;
    Ok(DigraphAutomorphism::new(a, Perm::new(vertices)?, edges)?)
}

/// Any single machine file, dispatched on its header tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineFile {
    Automaton(Automaton),
    Transducer(Transducer),
    Rule(LocalRule),
}

impl MachineFile {
    pub fn render(&self) -> String {
        match self {
            MachineFile::Automaton(a) => render_automaton(a),
            MachineFile::Transducer(t) => render_transducer(t),
            MachineFile::Rule(f) => render_rule(f),
        }
    }

    pub fn parse(text: &str) -> FormatResult<MachineFile> {
        let lines = Lines::new(text);
        let Some((_, tokens)) = lines.lines.first() else {
            return syntax(1, 1, "empty input");
        };
        match tokens[0].text {
            "automaton" => parse_automaton(text).map(MachineFile::Automaton),
            "transducer" => parse_transducer(text).map(MachineFile::Transducer),
            "rule" => parse_rule(text).map(MachineFile::Rule),
            other => tokens[0].fail(format!("unknown format `{other}`")),
        }
    }
}

/// One entry of a decomposition manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestFactor {
    pub file: String,
    pub states: usize,
    /// `None` when the order search hit its cap.
    pub order: Option<usize>,
    /// Sync-sequence term where the factor was found; `None` for the
    /// remainder and for involution factors after the first of a step.
    pub level: Option<usize>,
    pub pair: Option<(usize, usize)>,
}

/// Description of a factorization written next to its factor files.
/// Files are listed in product order: the original equals the product of
/// the remainder followed by the factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub n: usize,
    pub original_states: usize,
    pub remainder: ManifestFactor,
    pub factors: Vec<ManifestFactor>,
    pub verified: bool,
}

impl Manifest {
    /// Manifest for `f`, naming files `remainder.txt`, `factor_1.txt`, ...
    pub fn describe(f: &Factorization, verification: &Verification) -> Manifest {
        let order = |t: &Transducer| match t.order() {
            Ok(ElementOrder::Finite(k)) => Some(k),
            _ => None,
        };
        // inverse_factors run in the reverse order of the steps
        let mut step_of = Vec::new();
        for step in f.steps.iter().rev() {
            for i in (0..step.factors.len()).rev() {
                step_of.push((step, i == 0));
            }
        }
        let factors = f
            .inverse_factors
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let (step, first) = step_of.get(i).map_or((None, false), |&(s, first)| (Some(s), first));
                ManifestFactor {
                    file: format!("factor_{}.txt", i + 1),
                    states: t.state_count(),
                    order: order(t),
                    level: step.filter(|_| first).map(|s| s.level),
                    pair: step.filter(|_| first).map(|s| s.pair),
                }
            })
            .collect();
        Manifest {
            n: f.original.alphabet_size(),
            original_states: f.original.state_count(),
            remainder: ManifestFactor {
                file: "remainder.txt".into(),
                states: f.remainder.state_count(),
                order: order(&f.remainder),
                level: None,
                pair: None,
            },
            factors,
            verified: verification.ok(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("manifest n={} states={} factors={}\n", self.n, self.original_states, self.factors.len());
        out.push_str("reconstruction: remainder-first\n");
        let entry = |out: &mut String, label: &str, e: &ManifestFactor| {
            let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
            let pair = e.pair.map_or("-".to_string(), |(p, q)| format!("{p},{q}"));
            writeln!(
                out,
                "{label}: {} states={} order={} level={} pair={pair}",
                e.file,
                e.states,
                opt(e.order),
                opt(e.level)
            )
            .unwrap();
        };
        entry(&mut out, "remainder", &self.remainder);
        for f in &self.factors {
            entry(&mut out, "factor", f);
        }
        writeln!(out, "verified: {}", self.verified).unwrap();
        out
    }

    pub fn parse(text: &str) -> FormatResult<Manifest> {
        let mut lines = Lines::new(text);
        let h = header(&mut lines, "manifest", &["n", "states", "factors"])?;
        let mode = labelled(lines.next_line("the reconstruction line")?, "reconstruction", None)?;
        match mode {
            [t] if t.text == "remainder-first" => {}
            [t, ..] => return t.fail("expected `remainder-first`"),
            [] => return syntax(0, 0, "missing reconstruction mode"),
        }
        let remainder = manifest_entry(lines.next_line("the remainder line")?, "remainder")?;
        let factors = (0..h[2])
            .map(|_| manifest_entry(lines.next_line("a factor line")?, "factor"))
            .collect::<FormatResult<Vec<_>>>()?;
        let tokens = lines.next_line("the verified line")?;
        let verified = match labelled(tokens, "verified", None)? {
            [t] if t.text == "true" => true,
            [t] if t.text == "false" => false,
            _ => return tokens[0].fail("expected `verified: true|false`"),
        };
        lines.finish()?;
        Ok(Manifest { n: h[0], original_states: h[1], remainder, factors, verified })
    }
}

fn manifest_entry(tokens: &[Token<'_>], label: &str) -> FormatResult<ManifestFactor> {
    let tail = labelled(tokens, label, None)?;
    let [file, fields @ ..] = tail else { return tokens[0].fail("missing file name") };
    let mut values: [Option<&Token<'_>>; 4] = [None; 4];
    const KEYS: [&str; 4] = ["states", "order", "level", "pair"];
    let mut parsed = Vec::new();
    for tok in fields {
        let Some((k, v)) = tok.text.split_once('=') else { return tok.fail("expected `key=value`") };
        let Some(slot) = KEYS.iter().position(|&key| key == k) else {
            return tok.fail(format!("unknown key `{k}`"));
        };
        values[slot] = Some(tok);
        parsed.push((slot, Token { text: v, line: tok.line, column: tok.column + k.len() + 1 }));
    }
    if let Some(i) = values.iter().position(Option::is_none) {
        return tokens[0].fail(format!("missing `{}`", KEYS[i]));
    }
    let value = |slot: usize| parsed.iter().rev().find(|(s, _)| *s == slot).map(|(_, t)| *t).unwrap();
    let optional = |t: Token<'_>| if t.text == "-" { Ok(None) } else { t.number().map(Some) };
    let pair_tok = value(3);
    let pair = if pair_tok.text == "-" {
        None
    } else {
        let Some((p, q)) = pair_tok.text.split_once(',') else { return pair_tok.fail("expected `p,q`") };
        let part = |s| Token { text: s, ..pair_tok }.number();
        Some((part(p)?, part(q)?))
    };
    Ok(ManifestFactor {
        file: file.text.to_string(),
        states: value(0).number()?,
        order: optional(value(1))?,
        level: optional(value(2))?,
        pair,
    })
}

fn dot_edges(out: &mut String, states: usize, n: usize, edge: impl Fn(usize, usize) -> (usize, String)) {
    for q in 0..states {
        writeln!(out, "  q{q};").unwrap();
    }
    for q in 0..states {
        for x in 0..n {
            let (to, label) = edge(q, x);
            writeln!(out, "  q{q} -> q{to} [label=\"{label}\"];").unwrap();
        }
    }
    out.push_str("}\n");
}

/// DOT digraph with one edge per transition, labelled by its letter.
pub fn automaton_to_dot(a: &Automaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    dot_edges(&mut out, a.state_count(), a.alphabet_size(), |q, x| (a.delta(q, x), x.to_string()));
    out
}

/// DOT digraph with edges labelled `input|output`.
pub fn transducer_to_dot(t: &Transducer) -> String {
    let mut out = String::from("digraph transducer {\n  rankdir=LR;\n  node [shape=circle];\n");
    dot_edges(&mut out, t.state_count(), t.alphabet_size(), |q, x| {
        (t.delta(q, x), format!("{x}|{}", t.output(q, x)))
    });
    out
}
