//! Text forms of complex numbers and matrices.
//!
//! A complex entry is `re`, `imj`, or `re±imj`, where each part is a decimal
//! (exponent allowed) or a rational `p/q`; a bare `j`, `+j` or `-j` means
//! unit imaginary part. A matrix file holds one or more blocks
//!
//! ```text
//! matrix <rows> <cols>
//! <rows·cols entries, whitespace separated, row-major>
//! ```
//!
//! with `#` starting a comment that runs to the end of the line.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

fn parse_real(s: &str) -> Option<f64> {
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.parse().ok()?;
            let q: f64 = q.parse().ok()?;
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Parse one complex literal.
pub fn parse_complex(token: &str) -> Option<C64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    let Some(body) = t.strip_suffix('j') else {
        return parse_real(t).map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_real(&body[..i])?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => parse_real(s.strip_prefix('+').unwrap_or(s))?,
    };
    Some(C64::new(re, im))
}

fn format_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let plain = format!("{x}");
    if plain.len() > 20 {
        format!("{x:e}")
    } else {
        plain
    }
}

/// Shortest text that parses back to exactly `z`.
pub fn format_complex(z: C64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format_real(z.re),
        (true, false) => format!("{}j", format_real(z.im)),
        (false, false) => {
            let sign = if z.im < 0.0 { "-" } else { "+" };
            format!("{}{sign}{}j", format_real(z.re), format_real(z.im.abs()))
        }
    }
}

struct Tok<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokens(text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start = None;
        for (i, ch) in line
            .char_indices()
            .chain(std::iter::once((line.len(), ' ')))
        {
            match (ch.is_whitespace(), start) {
                (true, Some(s)) => {
                    out.push(Tok {
                        text: &line[s..i],
                        line: ln + 1,
                        column: s + 1,
                    });
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
    }
    out
}

/// Parse every `matrix` block in `text`.
pub fn parse_matrices(text: &str) -> Result<Vec<ComplexMatrix>> {
    let toks = tokens(text);
    let mut out = Vec::new();
    let mut i = 0;
    let dim = |t: Option<&Tok>, what: &str, prev: &Tok| -> Result<usize> {
        match t {
            Some(t) => t.text.parse::<usize>().map_err(|_| {
                Error::syntax(
                    t.line,
                    t.column,
                    format!("expected {what}, found `{}`", t.text),
                )
            }),
            None => Err(Error::syntax(
                prev.line,
                prev.column,
                format!("missing {what}"),
            )),
        }
    };
    while i < toks.len() {
        let head = &toks[i];
        if head.text != "matrix" {
            return Err(Error::syntax(
                head.line,
                head.column,
                format!("expected `matrix`, found `{}`", head.text),
            ));
        }
        let rows = dim(toks.get(i + 1), "row count", head)?;
        let cols = dim(toks.get(i + 2), "column count", head)?;
        i += 3;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let Some(t) = toks.get(i) else {
                let last = toks.last().unwrap_or(head);
                return Err(Error::syntax(
                    last.line,
                    last.column,
                    format!("matrix needs {} entries, found {}", rows * cols, data.len()),
                ));
            };
            let z = parse_complex(t.text).ok_or_else(|| {
                Error::syntax(t.line, t.column, format!("bad complex entry `{}`", t.text))
            })?;
            data.push(z);
            i += 1;
        }
        out.push(ComplexMatrix::from_vec(rows, cols, data)?);
    }
    Ok(out)
}

/// Parse a file holding exactly one matrix.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut all = parse_matrices(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(Error::syntax(1, 1, "no matrix found")),
        n => Err(Error::syntax(
            1,
            1,
            format!("expected one matrix, found {n}"),
        )),
    }
}

pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut s = format!("matrix {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_complex(m[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}
