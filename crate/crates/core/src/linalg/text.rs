//! Plain-text matrix files.
//!
//! Symmetric matrices: line 1 holds the order `n`, followed by `n` lines of
//! `n` whitespace-separated decimals. Rectangular blocks (subspace bases)
//! use a header line `rows cols`. Values are written in shortest
//! round-trip form, so a write/read cycle is bit-exact.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::SymmetricMatrix;
use crate::error::{Error, Result};
use crate::tol::TOL_SKEW;

pub fn write_symmetric(a: &SymmetricMatrix) -> String {
    let m = a.matrix();
    let mut out = format!("{}\n", m.nrows());
    write_rows(&mut out, m);
    out
}

pub fn write_dense(m: &DMatrix<f64>) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    write_rows(&mut out, m);
    out
}

fn write_rows(out: &mut String, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:e}", m[(i, j)]);
        }
        out.push('\n');
    }
}

/// Parses a symmetric matrix file, rejecting relative skew above `1e-12`.
pub fn read_symmetric(text: &str) -> Result<SymmetricMatrix> {
    let mut lines = data_lines(text);
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let mut fields = header.split_whitespace();
    let n = parse_usize(fields.next().unwrap_or(""))?;
    if fields.next().is_some() {
        return Err(Error::Parse("symmetric matrix header must be a single integer".into()));
    }
    let m = read_rows(lines, n, n)?;
    let norm = m.norm();
    let skew = (&m - m.transpose()).norm();
    if skew > TOL_SKEW * norm {
        return Err(Error::NotSymmetric { skew: if norm > 0.0 { skew / norm } else { skew } });
    }
    SymmetricMatrix::new(m)
}

/// Parses a rectangular block with a `rows cols` header.
pub fn read_dense(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = data_lines(text);
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (rows, cols) = match fields.as_slice() {
        [r, c] => (parse_usize(r)?, parse_usize(c)?),
        [n] => {
            let n = parse_usize(n)?;
            (n, n)
        }
        _ => return Err(Error::Parse(format!("bad header line {header:?}"))),
    };
    read_rows(lines, rows, cols)
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.trim().is_empty())
}

fn parse_usize(s: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::Parse(format!("expected a positive integer, found {s:?}"))),
    }
}

fn read_rows<'a>(mut lines: impl Iterator<Item = &'a str>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("expected {rows} rows, found {i}")))?;
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != cols {
            return Err(Error::Parse(format!("row {} has {} entries, expected {cols}", i + 1, values.len())));
        }
        for (j, v) in values.iter().enumerate() {
            let x: f64 = v.parse().map_err(|_| Error::Parse(format!("bad number {v:?}")))?;
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            m[(i, j)] = x;
        }
    }
    if lines.next().is_some() {
        return Err(Error::Parse(format!("more than {rows} rows")));
    }
    Ok(m)
}
