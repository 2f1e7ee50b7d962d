//! Text file formats.
//!
//! * Matrix: `n p` on the first line, then `n` rows of `p` numbers written
//!   with 17 significant digits so every `f64` survives a round trip.
//! * Factored product: `HPROD n m`, then `m` rows of `n` numbers, each row a
//!   canonical reflector direction in application order `H₁ … Hₘ`.
//! * Error trace: CSV with header `iter,residual,lambda_min,trace,dim_e1`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use hhfactor::{DMatrix, DVector, DecompositionTrace, HouseholderProduct, Reflector};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

pub const FACTORED_MAGIC: &str = "HPROD";

/// One greedy iteration as written to the trace CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTraceRow {
    pub iter: usize,
    pub residual: f64,
    pub lambda_min: f64,
    pub trace: f64,
    pub dim_e1: usize,
}

impl ErrorTraceRow {
    pub fn rows(trace: &DecompositionTrace) -> Vec<ErrorTraceRow> {
        trace
            .records
            .iter()
            .map(|r| ErrorTraceRow {
                iter: r.iteration,
                residual: r.residual,
                lambda_min: r.lambda_min,
                trace: r.trace,
                dim_e1: r.dim_e1,
            })
            .collect()
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_row<'a, W: Write>(w: &mut W, values: impl Iterator<Item = &'a f64>) -> Result<()> {
    let line: Vec<String> = values.map(|v| fmt_f64(*v)).collect();
    writeln!(w, "{}", line.join(" "))?;
    Ok(())
}

pub fn write_matrix<W: Write>(w: &mut W, m: &DMatrix<f64>) -> Result<()> {
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for row in m.row_iter() {
        write_row(w, row.iter())?;
    }
    Ok(())
}

pub fn write_factored<W: Write>(w: &mut W, p: &HouseholderProduct) -> Result<()> {
    writeln!(w, "{FACTORED_MAGIC} {} {}", p.dim(), p.len())?;
    for h in p.factors() {
        write_row(w, h.direction().iter())?;
    }
    Ok(())
}

/// A content line and its 1-based line number.
type Line = (usize, String);

/// Non-empty, non-comment lines.
fn content_lines<R: Read>(r: R) -> Result<Vec<Line>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            out.push((i + 1, trimmed.to_string()));
        }
    }
    Ok(out)
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| {
        CliError::parse(
            line,
            format!("expected a non-negative integer, got {tok:?}"),
        )
    })
}

fn parse_row(line: usize, text: &str, width: usize) -> Result<Vec<f64>> {
    let values = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| CliError::parse(line, format!("bad number {tok:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != width {
        return Err(CliError::parse(
            line,
            format!("expected {width} values, found {}", values.len()),
        ));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::parse(line, format!("non-finite value {v}")));
    }
    Ok(values)
}

/// Splits off the header line.
fn header_and_body(lines: Vec<Line>) -> Result<(Line, Vec<Line>)> {
    let mut it = lines.into_iter();
    let header = it
        .next()
        .ok_or_else(|| CliError::parse(1, "empty file".into()))?;
    Ok((header, it.collect()))
}

fn check_rows(body: &[Line], rows: usize, header_line: usize) -> Result<()> {
    if body.len() != rows {
        let line = body.get(rows).map_or(header_line, |(l, _)| *l);
        return Err(CliError::parse(
            line,
            format!("expected {rows} data rows, found {}", body.len()),
        ));
    }
    Ok(())
}

pub fn read_matrix<R: Read>(r: R) -> Result<DMatrix<f64>> {
    let ((hl, header), body) = header_and_body(content_lines(r)?)?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [n, p] = toks[..] else {
        return Err(CliError::parse(
            hl,
            format!("expected header \"n p\", got {header:?}"),
        ));
    };
    let (n, p) = (parse_usize(hl, n)?, parse_usize(hl, p)?);
    check_rows(&body, n, hl)?;
    let mut m = DMatrix::zeros(n, p);
    for (i, (line, text)) in body.iter().enumerate() {
        for (j, v) in parse_row(*line, text, p)?.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

pub fn read_factored<R: Read>(r: R) -> Result<HouseholderProduct> {
    let ((hl, header), body) = header_and_body(content_lines(r)?)?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [magic, n, m] = toks[..] else {
        return Err(CliError::parse(
            hl,
            format!("expected header \"{FACTORED_MAGIC} n m\", got {header:?}"),
        ));
    };
    if magic != FACTORED_MAGIC {
        return Err(CliError::parse(hl, format!("unknown format tag {magic:?}")));
    }
    let (n, m) = (parse_usize(hl, n)?, parse_usize(hl, m)?);
    check_rows(&body, m, hl)?;
    let mut factors = Vec::with_capacity(m);
    for (line, text) in &body {
        let u = DVector::from_vec(parse_row(*line, text, n)?);
        factors.push(Reflector::new(u).map_err(|e| CliError::parse(*line, e.to_string()))?);
    }
    Ok(HouseholderProduct::new(n, factors)?)
}

pub fn write_trace<W: Write>(w: W, rows: &[ErrorTraceRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    if rows.is_empty() {
        csv.write_record(["iter", "residual", "lambda_min", "trace", "dim_e1"])?;
    }
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(r: R) -> Result<Vec<ErrorTraceRow>> {
    let mut csv = csv::Reader::from_reader(r);
    let rows = csv
        .deserialize()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(rows)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_file(path))
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    with_path(path, read_matrix(open(path)?))
}

pub fn load_factored(path: &Path) -> Result<HouseholderProduct> {
    with_path(path, read_factored(open(path)?))
}

pub fn load_trace(path: &Path) -> Result<Vec<ErrorTraceRow>> {
    with_path(path, read_trace(open(path)?))
}

pub fn save_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut w = create(path)?;
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn save_factored(path: &Path, p: &HouseholderProduct) -> Result<()> {
    let mut w = create(path)?;
    write_factored(&mut w, p)?;
    w.flush()?;
    Ok(())
}

pub fn save_trace(path: &Path, rows: &[ErrorTraceRow]) -> Result<()> {
    write_trace(create(path)?, rows)
}
