//! Plain-text matrix format.
//!
//! ```text
//! matrix 2 2
//! 0.5+0j 0-0.5j
//! 0+0.5j 0.5+0j
//! ```
//!
//! Entries are whitespace separated and written as `RE{+|-}IMj`. Line breaks
//! carry no meaning beyond separating tokens. Writing uses the shortest
//! representation that round-trips exactly.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

/// Parses `RE{+|-}IMj`. A bare real (`0.25`) or bare imaginary (`-2j`) is
/// also accepted.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let body = match token.strip_suffix('j') {
        Some(b) => b,
        None => return token.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0)),
    };
    // The split point is the last sign that is neither leading nor an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().ok()?;
            let im = body[i..].parse::<f64>().ok()?;
            Some(Complex64::new(re, im))
        }
        None => body.parse::<f64>().ok().map(|im| Complex64::new(0.0, im)),
    }
}

pub fn write_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "matrix {} {}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|&z| format_complex(z)).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

/// Reads one matrix from a `(line, token)` stream whose next token is the
/// `matrix` header.
pub(crate) fn read_matrix_tokens<'a>(
    tokens: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<ComplexMatrix> {
    let (line, head) = tokens.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing `matrix` header".into(),
    })?;
    if head != "matrix" {
        return Err(Error::Parse {
            line,
            msg: format!("expected `matrix`, found `{head}`"),
        });
    }
    let mut dim = |what: &str| -> Result<usize> {
        let (l, t) = tokens.next().ok_or(Error::Parse {
            line,
            msg: format!("missing {what} count"),
        })?;
        t.parse::<usize>().map_err(|_| Error::Parse {
            line: l,
            msg: format!("bad {what} count `{t}`"),
        })
    };
    let rows = dim("row")?;
    let cols = dim("column")?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let (l, t) = tokens.next().ok_or(Error::Parse {
            line,
            msg: format!("expected {} entries, found {}", rows * cols, data.len()),
        })?;
        let z = parse_complex(t).ok_or(Error::Parse {
            line: l,
            msg: format!("bad complex entry `{t}`"),
        })?;
        data.push(z);
    }
    ComplexMatrix::from_vec(rows, cols, data)
}

pub(crate) fn tokenize(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .flat_map(|(n, l)| l.split_whitespace().map(move |t| (n + 1, t)))
}

pub fn read_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut tokens = tokenize(text);
    let m = read_matrix_tokens(&mut tokens)?;
    if let Some((line, t)) = tokens.next() {
        return Err(Error::Parse {
            line,
            msg: format!("trailing token `{t}`"),
        });
    }
    Ok(m)
}
