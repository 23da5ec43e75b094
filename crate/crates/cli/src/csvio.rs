//! CSV readers and writers.
//!
//! Every file has a header row, `,` separators, `.` decimals and LF line
//! endings. Floats are written as `{:.16e}` (17 significant digits), which
//! reads back to the identical `f64`. Undefined attributes are blank.

use std::fs::File;
use std::path::Path;

use bispec_core::polar::StokesBin;
use bispec_core::study::BiasTable;
use bispec_core::{BivariateSignal, StokesParams};

use crate::error::{CliError, CliResult};

pub const SIGNAL_HEADER: [&str; 3] = ["t", "u", "v"];
pub const ESTIMATE_HEADER: [&str; 9] = ["nu", "S0", "S1", "S2", "S3", "s1", "s2", "s3", "phi"];
pub const POINCARE_HEADER: [&str; 4] = ["nu", "phi", "two_theta", "two_chi"];
pub const BIAS_HEADER: [&str; 4] = ["phi_true", "m", "bias", "stderr"];

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// One output row of a spectrum file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub nu: f64,
    pub bin: StokesBin,
}

fn writer(path: &Path) -> CliResult<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let io_err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = writer(path)?;
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_signal(path: &Path, x: &BivariateSignal) -> CliResult<()> {
    write_rows(path, &SIGNAL_HEADER, x.iter().enumerate().map(|(t, (u, v))| [t.to_string(), num(u), num(v)]))
}

fn stokes_fields(s: &StokesBin) -> [String; 8] {
    let st = s.stokes;
    let norm = s.normalized();
    [
        num(st.s0),
        num(st.s1),
        num(st.s2),
        num(st.s3),
        opt(norm.map(|n| n[0])),
        opt(norm.map(|n| n[1])),
        opt(norm.map(|n| n[2])),
        opt(s.phi),
    ]
}

pub fn write_spectrum(path: &Path, rows: &[SpectrumRow]) -> CliResult<()> {
    write_rows(
        path,
        &ESTIMATE_HEADER,
        rows.iter().map(|r| std::iter::once(num(r.nu)).chain(stokes_fields(&r.bin))),
    )
}

pub fn write_poincare(path: &Path, rows: &[SpectrumRow]) -> CliResult<()> {
    write_rows(
        path,
        &POINCARE_HEADER,
        rows.iter().map(|r| {
            [num(r.nu), opt(r.bin.phi), opt(r.bin.theta.map(|t| 2.0 * t)), opt(r.bin.chi.map(|c| 2.0 * c))]
        }),
    )
}

pub fn write_bias(path: &Path, table: &BiasTable) -> CliResult<()> {
    write_rows(
        path,
        &BIAS_HEADER,
        table.cells.iter().map(|c| [num(c.phi_true), c.m.to_string(), num(c.bias), num(c.stderr)]),
    )
}

/// Columns `nu` then `S0_<name> … S3_<name>, phi_<name>` for each named
/// spectrum. All spectra must have the same rows.
pub fn write_comparison(path: &Path, named: &[(&str, &[SpectrumRow])]) -> CliResult<()> {
    let mut header = vec!["nu".to_string()];
    for (name, _) in named {
        for col in ["S0", "S1", "S2", "S3", "phi"] {
            header.push(format!("{col}_{name}"));
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let len = named.first().map_or(0, |(_, r)| r.len());
    write_rows(
        path,
        &header,
        (0..len).map(|i| {
            let mut row = vec![num(named[0].1[i].nu)];
            for (_, rows) in named {
                let b = rows[i].bin;
                row.extend([num(b.stokes.s0), num(b.stokes.s1), num(b.stokes.s2), num(b.stokes.s3), opt(b.phi)]);
            }
            row
        }),
    )
}

/// Reads all data rows after checking the header. Each row comes back with
/// its 1-based line number.
fn read_rows(path: &Path, header: &[&str]) -> CliResult<Vec<(u64, csv::StringRecord)>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let classify = |e: csv::Error| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Io(format!("{}: {e}", path.display())),
        _ => CliError::invalid(format!("{}: {e}", path.display())),
    };
    let got = r.headers().map_err(classify)?.clone();
    if got.iter().map(str::trim).ne(header.iter().copied()) {
        return Err(CliError::invalid(format!(
            "{}: line 1: expected header `{}`, got `{}`",
            path.display(),
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(classify)?;
            let line = rec.position().map_or(0, |p| p.line());
            Ok((line, rec))
        })
        .collect()
}

fn field(path: &Path, line: u64, rec: &csv::StringRecord, idx: usize, name: &str) -> CliResult<f64> {
    let raw = rec.get(idx).unwrap_or("").trim();
    raw.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::invalid(format!("{}: line {line}: column `{name}`: not a number: `{raw}`", path.display())))
}

fn optional_field(path: &Path, line: u64, rec: &csv::StringRecord, idx: usize, name: &str) -> CliResult<Option<f64>> {
    match rec.get(idx).map(str::trim) {
        None | Some("") => Ok(None),
        Some(_) => field(path, line, rec, idx, name).map(Some),
    }
}

/// `t` must run 0, 1, 2, … without gaps.
pub fn read_signal(path: &Path) -> CliResult<BivariateSignal> {
    let rows = read_rows(path, &SIGNAL_HEADER)?;
    let mut pairs = Vec::with_capacity(rows.len());
    for (expected_t, (line, rec)) in rows.iter().enumerate() {
        let t = rec.get(0).unwrap_or("").trim();
        if t.parse::<usize>().ok() != Some(expected_t) {
            return Err(CliError::invalid(format!(
                "{}: line {line}: column `t`: expected {expected_t}, got `{t}`",
                path.display()
            )));
        }
        pairs.push((field(path, *line, rec, 1, "u")?, field(path, *line, rec, 2, "v")?));
    }
    BivariateSignal::from_pairs(pairs).map_err(|e| crate::error::in_file(path, e))
}

/// Frequencies and Stokes parameters of a spectrum file. The normalized
/// columns are checked for well-formedness but not used.
pub fn read_spectrum(path: &Path) -> CliResult<Vec<(f64, StokesParams)>> {
    let rows = read_rows(path, &ESTIMATE_HEADER)?;
    if rows.is_empty() {
        return Err(CliError::invalid(format!("{}: no data rows", path.display())));
    }
    rows.iter()
        .map(|(line, rec)| {
            let f = |i: usize| field(path, *line, rec, i, ESTIMATE_HEADER[i]);
            for (i, name) in ESTIMATE_HEADER.iter().enumerate().skip(5) {
                optional_field(path, *line, rec, i, name)?;
            }
            Ok((f(0)?, StokesParams::new(f(1)?, f(2)?, f(3)?, f(4)?)))
        })
        .collect()
}
