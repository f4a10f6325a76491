//! Matrix files (Matrix Market, JSON, CSV) and the operation-sequence grammar.
//!
//! Entry grammar, shared by every format: `p`, `-p` or `p/q` parse to exact
//! rationals; anything else that parses as a finite decimal (`0.25`, `1e-3`)
//! is a float. A single float entry makes the whole matrix a float matrix.
//!
//! Operation files hold one operation per line, `#` starts a comment:
//!
//! ```text
//! RS i j      # swap rows i and j
//! RM i c      # multiply row i by c (c != 0)
//! RA i j c    # add c * row i to row j
//! CS i j      # swap columns i and j
//! CM i c      # multiply column i by c (c != 0)
//! CA i j c    # add c * column j to column i
//! ```
//!
//! Indices are zero-based; `c` is an integer or `p/q`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, FloatMatrix, Rational, RationalMatrix};
use crate::transforms::{ElemOp, OpKind, OpSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Mtx,
    Json,
    Csv,
}

impl MatrixFormat {
    /// Guess from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "mtx" => Some(MatrixFormat::Mtx),
            "json" => Some(MatrixFormat::Json),
            "csv" => Some(MatrixFormat::Csv),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParsedMatrix {
    Rational(RationalMatrix),
    Float(FloatMatrix),
}

impl ParsedMatrix {
    /// The exact matrix; float input maps to its exact dyadic rational image.
    pub fn exact(&self) -> RationalMatrix {
        match self {
            ParsedMatrix::Rational(r) => r.clone(),
            ParsedMatrix::Float(f) => RationalMatrix::from_float_exact(f),
        }
    }

    pub fn float(&self) -> Result<FloatMatrix> {
        match self {
            ParsedMatrix::Rational(r) => r.to_float(),
            ParsedMatrix::Float(f) => Ok(f.clone()),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            ParsedMatrix::Rational(r) => r.shape(),
            ParsedMatrix::Float(f) => (f.rows(), f.cols()),
        }
    }

    pub fn is_float(&self) -> bool {
        matches!(self, ParsedMatrix::Float(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Entry {
    Exact(Rational),
    Float(f64),
}

fn parse_entry(token: &str) -> std::result::Result<Entry, String> {
    match parse_rational(token) {
        Ok(r) => Ok(Entry::Exact(r)),
        Err(e) if e.contains("zero denominator") => Err(e),
        Err(_) => match token.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Entry::Float(v)),
            Ok(_) => Err(format!("non-finite entry {token:?}")),
            Err(_) => Err(format!("malformed entry {token:?}")),
        },
    }
}

fn assemble(rows: usize, cols: usize, entries: Vec<Entry>) -> Result<ParsedMatrix> {
    if entries.iter().any(|e| matches!(e, Entry::Float(_))) {
        let data = entries
            .into_iter()
            .map(|e| match e {
                Entry::Float(v) => v,
                Entry::Exact(r) => num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN),
            })
            .collect();
        Ok(ParsedMatrix::Float(FloatMatrix::from_row_major(
            rows, cols, data,
        )?))
    } else {
        let data = entries
            .into_iter()
            .map(|e| match e {
                Entry::Exact(r) => r,
                Entry::Float(_) => unreachable!(),
            })
            .collect();
        Ok(ParsedMatrix::Rational(RationalMatrix::new(
            rows, cols, data,
        )?))
    }
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, t)| (line[..byte].chars().count() + 1, t))
        .collect()
}

fn parse_count(line_no: usize, col: usize, token: &str, what: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| Error::parse(line_no, col, format!("expected {what}, found {token:?}")))
}

pub fn parse_mtx(text: &str) -> Result<ParsedMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines
        .next()
        .ok_or(Error::EmptyInput("matrix market file"))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::parse(
            hline,
            1,
            "expected '%%MatrixMarket matrix <layout> <field> general'",
        ));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => {
            return Err(Error::parse(
                hline,
                1,
                format!("unsupported layout {other:?}"),
            ))
        }
    };
    if !matches!(fields[3].as_str(), "real" | "integer") {
        return Err(Error::parse(
            hline,
            1,
            format!("unsupported field {:?}", fields[3]),
        ));
    }
    if fields[4] != "general" {
        return Err(Error::parse(
            hline,
            1,
            format!("unsupported symmetry {:?}", fields[4]),
        ));
    }
    let mut body = lines.filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (sline, size) = body
        .next()
        .ok_or(Error::EmptyInput("matrix market size line"))?;
    let size_tokens = tokens(size);
    let expected = if coordinate { 3 } else { 2 };
    if size_tokens.len() != expected {
        return Err(Error::parse(
            sline,
            1,
            format!("size line needs {expected} integers"),
        ));
    }
    let rows = parse_count(sline, size_tokens[0].0, size_tokens[0].1, "row count")?;
    let cols = parse_count(sline, size_tokens[1].0, size_tokens[1].1, "column count")?;
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut entries = vec![Entry::Exact(Rational::from_integer(0.into())); rows * cols];
    if coordinate {
        let nnz = parse_count(sline, size_tokens[2].0, size_tokens[2].1, "entry count")?;
        let mut seen = vec![false; rows * cols];
        let mut count = 0;
        for (ln, line) in body {
            let t = tokens(line);
            if t.len() != 3 {
                return Err(Error::parse(ln, 1, "coordinate line needs 'row col value'"));
            }
            let i = parse_count(ln, t[0].0, t[0].1, "row index")?;
            let j = parse_count(ln, t[1].0, t[1].1, "column index")?;
            if i == 0 || i > rows {
                return Err(Error::parse(
                    ln,
                    t[0].0,
                    format!("row index {i} outside 1..={rows}"),
                ));
            }
            if j == 0 || j > cols {
                return Err(Error::parse(
                    ln,
                    t[1].0,
                    format!("column index {j} outside 1..={cols}"),
                ));
            }
            let idx = (i - 1) * cols + (j - 1);
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::parse(
                    ln,
                    t[0].0,
                    format!("duplicate entry ({i}, {j})"),
                ));
            }
            entries[idx] = parse_entry(t[2].1).map_err(|m| Error::parse(ln, t[2].0, m))?;
            count += 1;
        }
        if count != nnz {
            return Err(Error::parse(
                sline,
                1,
                format!("declared {nnz} entries, found {count}"),
            ));
        }
    } else {
        let mut count = 0;
        for (ln, line) in body {
            for (col, tok) in tokens(line) {
                if count == rows * cols {
                    return Err(Error::parse(ln, col, "more values than the declared shape"));
                }
                // column-major
                let (i, j) = (count % rows, count / rows);
                entries[i * cols + j] = parse_entry(tok).map_err(|m| Error::parse(ln, col, m))?;
                count += 1;
            }
        }
        if count != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                expected: rows * cols,
                got: count,
            });
        }
    }
    assemble(rows, cols, entries)
}

pub fn parse_csv(text: &str) -> Result<ParsedMatrix> {
    let mut rows: Vec<Vec<Entry>> = Vec::new();
    for (ln, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut col = 1;
        for field in line.split(',') {
            row.push(parse_entry(field).map_err(|m| Error::parse(ln, col, m))?);
            col += field.chars().count() + 1;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(
                    ln,
                    1,
                    format!("expected {} values, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    assemble(m, n, rows.into_iter().flatten().collect())
}

#[derive(Deserialize)]
struct JsonMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<serde_json::Value>>,
}

pub fn parse_json(text: &str) -> Result<ParsedMatrix> {
    let raw: JsonMatrix = serde_json::from_str(text)?;
    if raw.rows == 0 || raw.cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if raw.entries.len() != raw.rows || raw.entries.iter().any(|r| r.len() != raw.cols) {
        return Err(Error::DimensionMismatch(format!(
            "declared {}x{} but entries have a different shape",
            raw.rows, raw.cols
        )));
    }
    let mut entries = Vec::with_capacity(raw.rows * raw.cols);
    for (i, row) in raw.entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let bad = |message: String| Error::BadEntry {
                row: i,
                col: j,
                message,
            };
            let e = match v {
                serde_json::Value::String(s) => parse_entry(s).map_err(bad)?,
                serde_json::Value::Number(num) => {
                    if let Some(k) = num.as_i64() {
                        Entry::Exact(Rational::from_integer(k.into()))
                    } else if let Some(k) = num.as_u64() {
                        Entry::Exact(Rational::from_integer(k.into()))
                    } else {
                        Entry::Float(
                            num.as_f64()
                                .ok_or_else(|| bad(format!("bad number {num}")))?,
                        )
                    }
                }
                other => return Err(bad(format!("expected a string or number, found {other}"))),
            };
            entries.push(e);
        }
    }
    assemble(raw.rows, raw.cols, entries)
}

pub fn parse_matrix_str(text: &str, format: MatrixFormat) -> Result<ParsedMatrix> {
    match format {
        MatrixFormat::Mtx => parse_mtx(text),
        MatrixFormat::Json => parse_json(text),
        MatrixFormat::Csv => parse_csv(text),
    }
}

pub fn parse_matrix(path: &Path, format: MatrixFormat) -> Result<ParsedMatrix> {
    parse_matrix_str(&std::fs::read_to_string(path)?, format)
}

/// Serialize an exact matrix. Non-integer entries are written as `p/q` in
/// every format (a Matrix Market extension this reader accepts).
pub fn write_matrix(a: &RationalMatrix, format: MatrixFormat) -> Result<String> {
    Ok(match format {
        MatrixFormat::Json => serde_json::to_string_pretty(a)? + "\n",
        MatrixFormat::Csv => (0..a.rows())
            .map(|i| {
                a.row(i)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
                    + "\n"
            })
            .collect(),
        MatrixFormat::Mtx => {
            let integral = (0..a.rows()).all(|i| a.row(i).iter().all(|v| v.is_integer()));
            let field = if integral { "integer" } else { "real" };
            let mut out = format!("%%MatrixMarket matrix array {field} general\n");
            if !integral {
                out.push_str("% exact rational entries written as p/q\n");
            }
            out.push_str(&format!("{} {}\n", a.rows(), a.cols()));
            for j in 0..a.cols() {
                for i in 0..a.rows() {
                    out.push_str(&format!("{}\n", a.get(i, j)));
                }
            }
            out
        }
    })
}

/// Parse an operation file for a matrix of the given shape.
pub fn parse_ops_str(text: &str, shape: (usize, usize)) -> Result<OpSequence> {
    let mut ops = Vec::new();
    for (ln, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let line = raw.split('#').next().unwrap_or("");
        let t = tokens(line);
        let Some(&(mcol, mnemonic)) = t.first() else {
            continue;
        };
        let kind = OpKind::from_mnemonic(mnemonic)
            .ok_or_else(|| Error::parse(ln, mcol, format!("unknown operation {mnemonic:?}")))?;
        let arity = match kind {
            OpKind::RowMult | OpKind::ColMult | OpKind::RowSwitch | OpKind::ColSwitch => 2,
            OpKind::RowAdd | OpKind::ColAdd => 3,
        };
        if t.len() != arity + 1 {
            return Err(Error::parse(
                ln,
                mcol,
                format!("{mnemonic} takes {arity} arguments, found {}", t.len() - 1),
            ));
        }
        let dim = if kind.is_row() { shape.0 } else { shape.1 };
        let index = |k: usize| -> Result<usize> {
            let (col, tok) = t[k];
            let v = parse_count(ln, col, tok, "index")?;
            if v >= dim {
                return Err(Error::parse(
                    ln,
                    col,
                    format!("index {v} out of range 0..{dim}"),
                ));
            }
            Ok(v)
        };
        let coefficient = |k: usize| -> Result<Rational> {
            let (col, tok) = t[k];
            parse_rational(tok).map_err(|m| Error::parse(ln, col, m))
        };
        let op = match kind {
            OpKind::RowSwitch => ElemOp::row_switch(index(1)?, index(2)?),
            OpKind::ColSwitch => ElemOp::col_switch(index(1)?, index(2)?),
            OpKind::RowMult => ElemOp::row_mult(index(1)?, coefficient(2)?),
            OpKind::ColMult => ElemOp::col_mult(index(1)?, coefficient(2)?),
            OpKind::RowAdd => ElemOp::row_add(index(1)?, index(2)?, coefficient(3)?),
            OpKind::ColAdd => ElemOp::col_add(index(1)?, index(2)?, coefficient(3)?),
        }
        .map_err(|e| Error::parse(ln, mcol, e.to_string()))?;
        ops.push(op);
    }
    OpSequence::new(shape, ops)
}

pub fn parse_ops(path: &Path, shape: (usize, usize)) -> Result<OpSequence> {
    parse_ops_str(&std::fs::read_to_string(path)?, shape)
}
