//! The `.qc` circuit text format.
//!
//! ```text
//! qubits 3
//! outputs 0 2
//! h 0
//! cx 0 1
//! u 1 2 [ 0 1
//!         1 0 ]      # explicit 2^a x 2^a matrix, row-major
//! ```
//!
//! `#` starts a comment; blank lines are ignored. A statement ends at the end
//! of its line unless a `[` is still open, so matrix literals may span lines.

use super::gate::{preset_arity, Gate, GENERIC_LABEL, UNITARY_TOL};
use super::Circuit;
use crate::error::{Error, ParseErrorKind, Result};
use crate::linalg::io::{format_complex, parse_complex};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

/// Tokens of one statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub tokens: Vec<Token>,
}

impl Statement {
    pub fn head(&self) -> &Token {
        &self.tokens[0]
    }

    pub fn line(&self) -> usize {
        self.head().line
    }
}

/// Split text into statements. `[` and `]` are always tokens of their own.
pub(crate) fn lex(text: &str) -> Result<Vec<Statement>> {
    let mut out = Vec::new();
    let mut cur: Vec<Token> = Vec::new();
    let mut open: Option<(usize, usize)> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let mut start: Option<usize> = None;
        let flush = |start: &mut Option<usize>, end: usize, cur: &mut Vec<Token>| {
            if let Some(s) = start.take() {
                cur.push(Token {
                    text: body[s..end].to_string(),
                    line,
                    column: s + 1,
                });
            }
        };
        for (i, ch) in body.char_indices() {
            if ch.is_whitespace() {
                flush(&mut start, i, &mut cur);
            } else if ch == '[' || ch == ']' {
                flush(&mut start, i, &mut cur);
                if ch == '[' {
                    if open.is_some() {
                        return Err(Error::syntax(line, i + 1, "nested `[`"));
                    }
                    open = Some((line, i + 1));
                } else if open.take().is_none() {
                    return Err(Error::syntax(line, i + 1, "unmatched `]`"));
                }
                cur.push(Token {
                    text: ch.to_string(),
                    line,
                    column: i + 1,
                });
            } else if start.is_none() {
                start = Some(i);
            }
        }
        flush(&mut start, body.len(), &mut cur);
        if open.is_none() && !cur.is_empty() {
            out.push(Statement {
                tokens: std::mem::take(&mut cur),
            });
        }
    }
    if let Some((line, column)) = open {
        return Err(Error::syntax(line, column, "`[` is never closed"));
    }
    Ok(out)
}

fn parse_index(tok: &Token, what: &str) -> Result<usize> {
    tok.text.parse::<usize>().map_err(|_| {
        Error::syntax(
            tok.line,
            tok.column,
            format!("expected {what}, found `{}`", tok.text),
        )
    })
}

fn parse_qubit(tok: &Token, width: usize) -> Result<usize> {
    let q = parse_index(tok, "qubit index")?;
    if q >= width {
        return Err(Error::parse(
            tok.line,
            tok.column,
            ParseErrorKind::QubitOutOfRange { index: q, width },
        ));
    }
    Ok(q)
}

fn end_of(stmt: &Statement) -> (usize, usize) {
    let t = stmt.tokens.last().expect("statements are nonempty");
    (t.line, t.column + t.text.len())
}

/// One gate statement on a register of `width` qubits.
pub(crate) fn parse_gate(stmt: &Statement, width: usize) -> Result<Gate> {
    let head = stmt.head();
    let toks = &stmt.tokens;
    let missing = |what: &str| {
        let (l, c) = end_of(stmt);
        Error::syntax(l, c, format!("missing {what}"))
    };
    let (arity, first_target) = if head.text == GENERIC_LABEL {
        let tok = toks.get(1).ok_or_else(|| missing("gate arity"))?;
        let a = parse_index(tok, "gate arity")?;
        if a == 0 || a > width {
            return Err(Error::syntax(
                tok.line,
                tok.column,
                format!("arity {a} impossible on {width} qubit(s)"),
            ));
        }
        (a, 2)
    } else {
        let a = preset_arity(&head.text).ok_or_else(|| {
            Error::parse(
                head.line,
                head.column,
                ParseErrorKind::UnknownMnemonic(head.text.clone()),
            )
        })?;
        (a, 1)
    };

    let mut targets = Vec::with_capacity(arity);
    for k in 0..arity {
        let tok = toks
            .get(first_target + k)
            .ok_or_else(|| missing("target qubit"))?;
        let q = parse_qubit(tok, width)?;
        if targets.contains(&q) {
            return Err(Error::syntax(
                tok.line,
                tok.column,
                format!("repeated target qubit {q}"),
            ));
        }
        targets.push(q);
    }
    let mut pos = first_target + arity;

    if head.text != GENERIC_LABEL {
        if let Some(extra) = toks.get(pos) {
            return Err(Error::syntax(
                extra.line,
                extra.column,
                format!("unexpected `{}` after `{}` targets", extra.text, head.text),
            ));
        }
        return Gate::preset(&head.text, &targets);
    }

    let dim = 1usize << arity;
    match toks.get(pos) {
        Some(t) if t.text == "[" => pos += 1,
        Some(t) => {
            return Err(Error::syntax(
                t.line,
                t.column,
                format!("expected `[`, found `{}`", t.text),
            ))
        }
        None => return Err(missing("`[` opening the matrix")),
    }
    let mut entries = Vec::with_capacity(dim * dim);
    while let Some(t) = toks.get(pos) {
        if t.text == "]" {
            break;
        }
        let z = parse_complex(&t.text).ok_or_else(|| {
            Error::syntax(t.line, t.column, format!("bad complex entry `{}`", t.text))
        })?;
        entries.push(z);
        pos += 1;
    }
    let close = toks.get(pos).ok_or_else(|| missing("`]`"))?;
    if entries.len() != dim * dim {
        return Err(Error::syntax(
            close.line,
            close.column,
            format!(
                "{arity}-qubit gate needs {} matrix entries, found {}",
                dim * dim,
                entries.len()
            ),
        ));
    }
    if let Some(extra) = toks.get(pos + 1) {
        return Err(Error::syntax(
            extra.line,
            extra.column,
            format!("unexpected `{}` after matrix", extra.text),
        ));
    }
    let matrix = ComplexMatrix::from_vec(dim, dim, entries)?;
    if !matrix.is_unitary(UNITARY_TOL) {
        return Err(Error::parse(
            head.line,
            head.column,
            ParseErrorKind::NonUnitary,
        ));
    }
    Gate::new(matrix, targets)
}

/// Parse `qubits` / `outputs` header statements.
pub(crate) fn parse_header(stmts: &[Statement]) -> Result<(usize, Vec<usize>)> {
    let Some(q) = stmts.first() else {
        return Err(Error::syntax(1, 1, "expected `qubits <m>`"));
    };
    if q.head().text != "qubits" || q.tokens.len() != 2 {
        return Err(Error::syntax(
            q.line(),
            q.head().column,
            "expected `qubits <m>`",
        ));
    }
    let width = parse_index(&q.tokens[1], "qubit count")?;
    if width == 0 {
        let t = &q.tokens[1];
        return Err(Error::syntax(
            t.line,
            t.column,
            "circuit width must be at least 1",
        ));
    }
    let Some(o) = stmts.get(1) else {
        let (l, c) = end_of(q);
        return Err(Error::syntax(l, c, "expected `outputs` line"));
    };
    if o.head().text != "outputs" {
        return Err(Error::syntax(
            o.line(),
            o.head().column,
            "expected `outputs` line",
        ));
    }
    let mut outputs = Vec::new();
    for t in &o.tokens[1..] {
        let q = parse_qubit(t, width)?;
        if outputs.contains(&q) {
            return Err(Error::syntax(
                t.line,
                t.column,
                format!("output qubit {q} listed twice"),
            ));
        }
        outputs.push(q);
    }
    Ok((width, outputs))
}

/// Build a circuit from already-lexed statements (header first).
pub(crate) fn parse_statements(stmts: &[Statement]) -> Result<Circuit> {
    let (width, outputs) = parse_header(stmts)?;
    let mut c = Circuit::new(width, outputs)?;
    for s in &stmts[2..] {
        c.push(parse_gate(s, width)?)?;
    }
    Ok(c)
}

/// Parse a `.qc` document.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_statements(&lex(text)?)
}

pub(crate) fn serialize_gate(g: &Gate) -> String {
    let targets: Vec<String> = g.targets().iter().map(|t| t.to_string()).collect();
    if g.is_preset() {
        return format!("{} {}", g.label(), targets.join(" "));
    }
    let entries: Vec<String> = g
        .matrix()
        .as_slice()
        .iter()
        .map(|&z| format_complex(z))
        .collect();
    format!(
        "{GENERIC_LABEL} {} {} [ {} ]",
        g.arity(),
        targets.join(" "),
        entries.join(" ")
    )
}

pub(crate) fn serialize(c: &Circuit) -> String {
    let mut s = format!("qubits {}\noutputs", c.width());
    for o in c.outputs() {
        s.push_str(&format!(" {o}"));
    }
    s.push('\n');
    for g in c.gates() {
        s.push_str(&serialize_gate(g));
        s.push('\n');
    }
    s
}
