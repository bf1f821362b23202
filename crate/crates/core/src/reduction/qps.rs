//! The `.qps` proof-system text format.
//!
//! ```text
//! qv 3
//! qm 1
//! qp 1
//! messages 2
//! outbit 2
//! verifier 1
//!   h 0
//!   cx 0 3
//! end
//! prover 1
//! end
//! verifier 2
//!   cx 0 3
//! end
//! ```
//!
//! Verifier blocks act on `qv + qm` qubits (verifier first), prover blocks on
//! `qm + qp` (message first). A simulator block may open with its own
//! `qubits`/`outputs` lines; otherwise it is `qv + qm` wide with every qubit
//! an output. `#` starts a comment.

use std::collections::BTreeMap;

use super::{ProofSystemSpec, SimulatorSpec};
use crate::circuit::{lex, parse_gate, parse_header, serialize_gate, Circuit, Statement, Token};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum BlockKind {
    Verifier,
    Prover,
    Simulator,
}

impl BlockKind {
    fn name(self) -> &'static str {
        match self {
            BlockKind::Verifier => "verifier",
            BlockKind::Prover => "prover",
            BlockKind::Simulator => "simulator",
        }
    }
}

struct Block {
    head: Token,
    body: Vec<Statement>,
}

fn number(t: &Token, what: &str) -> Result<usize> {
    t.text.parse().map_err(|_| {
        Error::syntax(
            t.line,
            t.column,
            format!("expected {what}, found `{}`", t.text),
        )
    })
}

fn single_arg<'a>(s: &'a Statement, what: &str) -> Result<&'a Token> {
    match s.tokens.as_slice() {
        [_, t] => Ok(t),
        _ => Err(Error::syntax(
            s.line(),
            s.head().column,
            format!("expected `{} <{what}>`", s.head().text),
        )),
    }
}

/// Parse a `.qps` document into the proof system and its simulator.
pub fn parse_qps(text: &str) -> Result<(ProofSystemSpec, SimulatorSpec)> {
    let stmts = lex(text)?;
    let mut header: BTreeMap<&'static str, (usize, Token)> = BTreeMap::new();
    let mut blocks: BTreeMap<(BlockKind, usize), Block> = BTreeMap::new();
    let mut open: Option<((BlockKind, usize), Block)> = None;

    for s in stmts {
        let head = s.head().clone();
        if let Some((key, mut block)) = open.take() {
            if head.text == "end" {
                if s.tokens.len() != 1 {
                    let t = &s.tokens[1];
                    return Err(Error::syntax(
                        t.line,
                        t.column,
                        "unexpected token after `end`",
                    ));
                }
                blocks.insert(key, block);
            } else {
                block.body.push(s);
                open = Some((key, block));
            }
            continue;
        }
        let kind = match head.text.as_str() {
            "verifier" => Some(BlockKind::Verifier),
            "prover" => Some(BlockKind::Prover),
            "simulator" => Some(BlockKind::Simulator),
            _ => None,
        };
        if let Some(kind) = kind {
            let idx = number(single_arg(&s, "index")?, "block index")?;
            if blocks.contains_key(&(kind, idx)) {
                return Err(Error::syntax(
                    head.line,
                    head.column,
                    format!("duplicate {} block {idx}", kind.name()),
                ));
            }
            open = Some((
                (kind, idx),
                Block {
                    head,
                    body: Vec::new(),
                },
            ));
            continue;
        }
        let key = match head.text.as_str() {
            "qv" => "qv",
            "qm" => "qm",
            "qp" => "qp",
            "messages" => "messages",
            "outbit" => "outbit",
            "end" => {
                return Err(Error::syntax(
                    head.line,
                    head.column,
                    "`end` outside a block",
                ))
            }
            other => {
                return Err(Error::syntax(
                    head.line,
                    head.column,
                    format!("unknown keyword `{other}`"),
                ))
            }
        };
        let v = number(single_arg(&s, "n")?, key)?;
        if header.insert(key, (v, head.clone())).is_some() {
            return Err(Error::syntax(
                head.line,
                head.column,
                format!("`{key}` given twice"),
            ));
        }
    }
    if let Some((_, block)) = open {
        return Err(Error::syntax(
            block.head.line,
            block.head.column,
            format!("{} block is missing `end`", block.head.text),
        ));
    }

    let get = |key: &str| -> Result<usize> {
        header
            .get(key)
            .map(|(v, _)| *v)
            .ok_or_else(|| Error::syntax(1, 1, format!("missing `{key}` line")))
    };
    let (qv, qm, qp, messages, outbit) = (
        get("qv")?,
        get("qm")?,
        get("qp")?,
        get("messages")?,
        get("outbit")?,
    );
    let shape_err = |key: &str, msg: String| {
        let (_, t) = &header[key];
        Error::syntax(t.line, t.column, msg)
    };
    if qv == 0 || qm == 0 {
        return Err(shape_err("qv", "qv and qm must be at least 1".into()));
    }
    if messages < 2 || messages % 2 != 0 {
        return Err(shape_err(
            "messages",
            format!("message count must be even and at least 2, got {messages}"),
        ));
    }
    if outbit >= qv {
        return Err(shape_err(
            "outbit",
            format!("outbit {outbit} is not a verifier qubit (qv = {qv})"),
        ));
    }
    let k = messages / 2 + 1;

    let mut verifiers = Vec::with_capacity(k);
    let mut provers = Vec::with_capacity(k - 1);
    let mut sims = BTreeMap::new();
    for ((kind, idx), block) in blocks {
        let limit = match kind {
            BlockKind::Verifier => k,
            BlockKind::Prover => k - 1,
            BlockKind::Simulator => messages,
        };
        if idx == 0 || idx > limit {
            return Err(Error::syntax(
                block.head.line,
                block.head.column,
                format!("{} index {idx} outside 1..={limit}", kind.name()),
            ));
        }
        match kind {
            BlockKind::Verifier => {
                verifiers.push((idx, gates_into(Circuit::identity(qv + qm)?, &block.body)?));
            }
            BlockKind::Prover => {
                let base = Circuit::new(qm + qp, (0..qm).collect())?;
                provers.push((idx, gates_into(base, &block.body)?));
            }
            BlockKind::Simulator => {
                let starts_with_header = block
                    .body
                    .first()
                    .is_some_and(|s| s.head().text == "qubits");
                let c = if starts_with_header {
                    let (w, outs) = parse_header(&block.body)?;
                    gates_into(Circuit::new(w, outs)?, &block.body[2..])?
                } else {
                    gates_into(Circuit::identity(qv + qm)?, &block.body)?
                };
                if c.num_outputs() != qv + qm {
                    return Err(Error::syntax(
                        block.head.line,
                        block.head.column,
                        format!(
                            "simulator {idx} has {} outputs, expected {}",
                            c.num_outputs(),
                            qv + qm
                        ),
                    ));
                }
                sims.insert(idx, c);
            }
        }
    }
    if verifiers.len() != k {
        let have: Vec<usize> = verifiers.iter().map(|(i, _)| *i).collect();
        let missing = (1..=k).find(|i| !have.contains(i)).unwrap_or(k);
        return Err(Error::syntax(
            1,
            1,
            format!("missing verifier block {missing}"),
        ));
    }
    // absent prover blocks are the identity
    let mut prover_list: Vec<Circuit> = (0..k - 1)
        .map(|_| Circuit::new(qm + qp, (0..qm).collect()))
        .collect::<Result<_>>()?;
    for (idx, c) in provers {
        prover_list[idx - 1] = c;
    }
    let spec = ProofSystemSpec::new(
        qv,
        qm,
        qp,
        messages,
        outbit,
        verifiers.into_iter().map(|(_, c)| c).collect(),
        prover_list,
    )?;
    let sim = if sims.is_empty() {
        SimulatorSpec::Honest
    } else {
        SimulatorSpec::Circuits(sims)
    };
    sim.check(&spec)?;
    Ok((spec, sim))
}

fn gates_into(mut c: Circuit, body: &[Statement]) -> Result<Circuit> {
    for s in body {
        c.push(parse_gate(s, c.width())?)?;
    }
    Ok(c)
}

fn write_block(out: &mut String, name: &str, idx: usize, c: &Circuit, header: bool) {
    out.push_str(&format!("{name} {idx}\n"));
    if header {
        out.push_str(&format!("  qubits {}\n  outputs", c.width()));
        for o in c.outputs() {
            out.push_str(&format!(" {o}"));
        }
        out.push('\n');
    }
    for g in c.gates() {
        out.push_str("  ");
        out.push_str(&serialize_gate(g));
        out.push('\n');
    }
    out.push_str("end\n");
}

/// Canonical `.qps` text; [`parse_qps`] reads it back to an equal pair.
pub fn to_qps(spec: &ProofSystemSpec, sim: &SimulatorSpec) -> String {
    let mut out = format!(
        "qv {}\nqm {}\nqp {}\nmessages {}\noutbit {}\n",
        spec.qv, spec.qm, spec.qp, spec.messages, spec.outbit
    );
    for (i, v) in spec.verifiers.iter().enumerate() {
        write_block(&mut out, "verifier", i + 1, v, false);
    }
    for (i, p) in spec.provers.iter().enumerate() {
        write_block(&mut out, "prover", i + 1, p, false);
    }
    if let SimulatorSpec::Circuits(map) = sim {
        for (j, c) in map {
            write_block(&mut out, "simulator", *j, c, true);
        }
    }
    out
}
