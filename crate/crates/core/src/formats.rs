//! Plain-text file formats.
//!
//! Integral files (`GFI 1`):
//!
//! ```text
//! GFI 1
//! d <d> na <N_alpha> nb <N_beta> enuc <E_nuc>
//! S i j value
//! H i j value
//! G i j k l value
//! ```
//!
//! Indices are 1-based, `#` starts a comment, unlisted entries are zero.
//! `S` and `H` are symmetrized from whichever triangle is given and `G` is
//! completed by its 8-fold symmetry. Two records that land on the same
//! entry must agree within 1e-12.
//!
//! Orbital files (`GFO 1`) hold a spin pair:
//!
//! ```text
//! GFO 1
//! d <d> na <N_alpha> nb <N_beta>
//! A row col value
//! B row col value
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::error::IntegralError;
use crate::hf::{symmetry_orbit, IntegralSet, SpinPair, TwoElectron, SYMMETRY_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {record} conflicts with line {first_line} (values differ by {magnitude:e})")]
    Duplicate {
        line: usize,
        first_line: usize,
        record: String,
        magnitude: f64,
    },
    #[error(
        "line {line}: symmetry violation: {record} differs from symmetry-equivalent {other} on line {first_line} by {magnitude:e}"
    )]
    Symmetry {
        line: usize,
        first_line: usize,
        record: String,
        other: String,
        magnitude: f64,
    },
    #[error("invalid integrals: {0}")]
    Invalid(IntegralError),
    #[error("orbital file has {what} = {got}, expected {expected}")]
    Mismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn err(&self, idx: usize, message: impl Into<String>) -> FormatError {
        let column = self.tokens.get(idx).or(self.tokens.last()).map_or(1, |t| t.column);
        FormatError::Parse {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn expect_len(&self, n: usize, what: &str) -> Result<(), FormatError> {
        if self.tokens.len() != n {
            let idx = self.tokens.len().min(n);
            return Err(self.err(
                idx,
                format!("{what} record needs {n} fields, found {}", self.tokens.len()),
            ));
        }
        Ok(())
    }

    fn keyword(&self, idx: usize, word: &str) -> Result<(), FormatError> {
        match self.tokens.get(idx) {
            Some(t) if t.text == word => Ok(()),
            Some(t) => Err(self.err(idx, format!("expected `{word}`, found `{}`", t.text))),
            None => Err(self.err(idx, format!("expected `{word}`"))),
        }
    }

    fn count(&self, idx: usize) -> Result<usize, FormatError> {
        let t = self.tokens.get(idx).ok_or_else(|| self.err(idx, "missing count"))?;
        t.text
            .parse()
            .map_err(|_| self.err(idx, format!("`{}` is not a non-negative integer", t.text)))
    }

    fn float(&self, idx: usize) -> Result<f64, FormatError> {
        let t = self.tokens.get(idx).ok_or_else(|| self.err(idx, "missing value"))?;
        match t.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(idx, format!("`{}` is not a finite number", t.text))),
        }
    }

    fn index(&self, idx: usize, bound: usize) -> Result<usize, FormatError> {
        let t = self.tokens.get(idx).ok_or_else(|| self.err(idx, "missing index"))?;
        match t.text.parse::<usize>() {
            Ok(i) if (1..=bound).contains(&i) => Ok(i - 1),
            _ => Err(self.err(idx, format!("index `{}` is outside 1..={bound}", t.text))),
        }
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(n, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &content[s..pos],
                        column: content[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line { number: n + 1, tokens })
    })
}

fn magic<'a>(it: &mut impl Iterator<Item = Line<'a>>, word: &str) -> Result<(), FormatError> {
    let line = it.next().ok_or(FormatError::Parse {
        line: 1,
        column: 1,
        message: "empty file".into(),
    })?;
    line.keyword(0, word)?;
    if line.tokens.get(1).map(|t| t.text) != Some("1") {
        return Err(line.err(1, format!("unsupported {word} version")));
    }
    line.expect_len(2, word)
}

fn missing_header(word: &str) -> FormatError {
    FormatError::Parse {
        line: 2,
        column: 1,
        message: format!("missing {word} header line"),
    }
}

fn fmt_record(kind: char, idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("{kind}[{}]", parts.join(","))
}

/// Tracks which record first set each symmetry class.
struct Seen<K> {
    first: HashMap<K, (Vec<usize>, f64, usize)>,
}

impl<K: std::hash::Hash + Eq> Seen<K> {
    fn new() -> Self {
        Self { first: HashMap::new() }
    }

    fn insert(&mut self, key: K, kind: char, idx: Vec<usize>, value: f64, line: usize) -> Result<bool, FormatError> {
        if let Some((first_idx, first_value, first_line)) = self.first.get(&key) {
            let magnitude = (first_value - value).abs();
            if magnitude > SYMMETRY_TOL {
                return Err(if *first_idx == idx {
                    FormatError::Duplicate {
                        line,
                        first_line: *first_line,
                        record: fmt_record(kind, &idx),
                        magnitude,
                    }
                } else {
                    FormatError::Symmetry {
                        line,
                        first_line: *first_line,
                        record: fmt_record(kind, &idx),
                        other: fmt_record(kind, first_idx),
                        magnitude,
                    }
                });
            }
            return Ok(false);
        }
        self.first.insert(key, (idx, value, line));
        Ok(true)
    }
}

pub fn parse_integrals(text: &str) -> Result<IntegralSet, FormatError> {
    let mut it = lines(text);
    magic(&mut it, "GFI")?;
    let header = it.next().ok_or_else(|| missing_header("GFI"))?;
    header.expect_len(8, "header")?;
    header.keyword(0, "d")?;
    let d = header.count(1)?;
    header.keyword(2, "na")?;
    let na = header.count(3)?;
    header.keyword(4, "nb")?;
    let nb = header.count(5)?;
    header.keyword(6, "enuc")?;
    let e_nuc = header.float(7)?;

    let mut s = DMatrix::zeros(d, d);
    let mut h = DMatrix::zeros(d, d);
    let mut g = TwoElectron::zeros(d);
    let mut seen_s = Seen::new();
    let mut seen_h = Seen::new();
    let mut seen_g = Seen::new();
    for line in it {
        let kind = line.tokens[0].text;
        match kind {
            "S" | "H" => {
                line.expect_len(4, kind)?;
                let i = line.index(1, d)?;
                let j = line.index(2, d)?;
                let v = line.float(3)?;
                let (m, seen, c) = if kind == "S" {
                    (&mut s, &mut seen_s, 'S')
                } else {
                    (&mut h, &mut seen_h, 'H')
                };
                if seen.insert((i.min(j), i.max(j)), c, vec![i, j], v, line.number)? {
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
            "G" => {
                line.expect_len(6, "G")?;
                let idx = [
                    line.index(1, d)?,
                    line.index(2, d)?,
                    line.index(3, d)?,
                    line.index(4, d)?,
                ];
                let v = line.float(5)?;
                let orbit = symmetry_orbit(idx);
                let key = *orbit.iter().min().expect("orbit is non-empty");
                if seen_g.insert(key, 'G', idx.to_vec(), v, line.number)? {
                    for img in orbit {
                        g.set(img, v);
                    }
                }
            }
            other => return Err(line.err(0, format!("unknown record type `{other}`"))),
        }
    }
    IntegralSet::new(s, h, g, e_nuc, na, nb).map_err(FormatError::Invalid)
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_integrals(path: impl AsRef<Path>) -> Result<IntegralSet, FormatError> {
    parse_integrals(&read(path.as_ref())?)
}

/// Writes the upper triangles of `S` and `H` and one representative per
/// symmetry class of `g`, omitting zeros. Values round-trip exactly.
pub fn write_integrals(ints: &IntegralSet) -> String {
    let d = ints.d();
    let mut out = String::new();
    writeln!(out, "GFI 1").unwrap();
    writeln!(
        out,
        "d {d} na {} nb {} enuc {:e}",
        ints.n_alpha(),
        ints.n_beta(),
        ints.e_nuc()
    )
    .unwrap();
    for (kind, m) in [('S', ints.s()), ('H', ints.h())] {
        for i in 0..d {
            for j in i..d {
                if m[(i, j)] != 0.0 {
                    writeln!(out, "{kind} {} {} {:e}", i + 1, j + 1, m[(i, j)]).unwrap();
                }
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let idx = [i, j, k, l];
                    let v = ints.g().get(i, j, k, l);
                    if v != 0.0 && symmetry_orbit(idx).iter().min() == Some(&idx) {
                        writeln!(out, "G {} {} {} {} {v:e}", i + 1, j + 1, k + 1, l + 1).unwrap();
                    }
                }
            }
        }
    }
    out
}

/// Reads a spin pair and checks its dimensions against `(d, N_α, N_β)`.
/// The matrices are returned as written; no orthonormalization is applied.
pub fn parse_orbitals(text: &str, d: usize, n_alpha: usize, n_beta: usize) -> Result<SpinPair, FormatError> {
    let mut it = lines(text);
    magic(&mut it, "GFO")?;
    let header = it.next().ok_or_else(|| missing_header("GFO"))?;
    header.expect_len(6, "header")?;
    header.keyword(0, "d")?;
    header.keyword(2, "na")?;
    header.keyword(4, "nb")?;
    for (what, idx, expected) in [("d", 1, d), ("na", 3, n_alpha), ("nb", 5, n_beta)] {
        let got = header.count(idx)?;
        if got != expected {
            return Err(FormatError::Mismatch { what, expected, got });
        }
    }
    let mut a = DMatrix::zeros(d, n_alpha);
    let mut b = DMatrix::zeros(d, n_beta);
    for line in it {
        let (m, n) = match line.tokens[0].text {
            "A" => (&mut a, n_alpha),
            "B" => (&mut b, n_beta),
            other => return Err(line.err(0, format!("unknown record type `{other}`"))),
        };
        line.expect_len(4, "orbital")?;
        let row = line.index(1, d)?;
        let col = line.index(2, n)?;
        m[(row, col)] = line.float(3)?;
    }
    Ok(SpinPair { c_alpha: a, c_beta: b })
}

pub fn load_orbitals(path: impl AsRef<Path>, d: usize, n_alpha: usize, n_beta: usize) -> Result<SpinPair, FormatError> {
    parse_orbitals(&read(path.as_ref())?, d, n_alpha, n_beta)
}

pub fn write_orbitals(pair: &SpinPair) -> String {
    let mut out = String::new();
    writeln!(out, "GFO 1").unwrap();
    writeln!(
        out,
        "d {} na {} nb {}",
        pair.c_alpha.nrows(),
        pair.c_alpha.ncols(),
        pair.c_beta.ncols()
    )
    .unwrap();
    for (kind, m) in [('A', &pair.c_alpha), ('B', &pair.c_beta)] {
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                writeln!(out, "{kind} {} {} {:e}", row + 1, col + 1, m[(row, col)]).unwrap();
            }
        }
    }
    out
}
