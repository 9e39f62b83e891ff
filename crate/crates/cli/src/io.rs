//! File formats. Every file starts with the configuration header; CSV
//! readers skip `#` lines.
//!
//! - sequences: `level,start,length,value`
//! - coefficients: `beta,nu,m,value` with `;`-separated multi-indices and an
//!   optional `# rho = …` line
//! - grids: JSON `{lower, upper, level, values}` (node values in row-major order)
//! - norm reports: JSON, or CSV with one row per shell
//! - witness curves: CSV `scan,sample,x,j,value` and gnuplot `.dat` blocks

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use besov_core::normest::{GridSpec, NormReport};
use besov_core::seqspace::MAX_LEVEL;
use besov_core::{DyadicSequence, GridFunction, LevelRun, QuarkCoeffs};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str, row: usize) -> CliResult<T> {
    rec.get(i)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Usage(format!("row {row}: unreadable `{name}`")))
}

fn check_columns(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> CliResult<()> {
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if got != expected {
        return Err(CliError::Usage(format!("expected columns {expected:?}, got {got:?}")));
    }
    Ok(())
}

pub fn write_sequence<W: Write>(mut w: W, header: &str, seq: &DyadicSequence) -> CliResult<()> {
    w.write_all(header.as_bytes())?;
    let mut c = csv_writer(w);
    c.write_record(["level", "start", "length", "value"])?;
    for r in seq.runs().iter().filter(|r| r.length > 0) {
        c.write_record([r.level.to_string(), r.start.to_string(), r.length.to_string(), r.value.to_string()])?;
    }
    c.flush()?;
    Ok(())
}

/// Reads runs back; the depth is the largest level present, or `# jmax = …`
/// from the header when that is larger.
pub fn read_sequence(text: &str) -> CliResult<DyadicSequence> {
    let mut rdr = csv_reader(text);
    check_columns(&mut rdr, &["level", "start", "length", "value"])?;
    let mut runs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        runs.push(LevelRun {
            level: field(&rec, 0, "level", i + 1)?,
            start: field(&rec, 1, "start", i + 1)?,
            length: field(&rec, 2, "length", i + 1)?,
            value: field(&rec, 3, "value", i + 1)?,
        });
    }
    let declared = header_value(text, "jmax").and_then(|v| v.parse::<u32>().ok()).unwrap_or(0);
    let depth = runs.iter().map(|r| r.level).max().unwrap_or(0).max(declared).min(MAX_LEVEL);
    Ok(DyadicSequence::from_runs(runs, depth)?)
}

/// Value of a `# key = value` header line.
pub fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l[1..].split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn split<T: std::str::FromStr>(s: &str, name: &str, row: usize) -> CliResult<Vec<T>> {
    s.split(';')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("row {row}: unreadable `{name}`"))))
        .collect()
}

pub fn write_coeffs<W: Write>(mut w: W, header: &str, coeffs: &QuarkCoeffs) -> CliResult<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "# rho = {}", coeffs.rho())?;
    let mut c = csv_writer(w);
    c.write_record(["beta", "nu", "m", "value"])?;
    for (idx, v) in coeffs.iter() {
        c.write_record([join(&idx.beta), idx.nu.to_string(), join(&idx.m), v.to_string()])?;
    }
    c.flush()?;
    Ok(())
}

pub fn read_coeffs(text: &str) -> CliResult<QuarkCoeffs> {
    let mut rdr = csv_reader(text);
    check_columns(&mut rdr, &["beta", "nu", "m", "value"])?;
    let mut coeffs: Option<QuarkCoeffs> = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let beta: Vec<u32> = split(rec.get(0).unwrap_or(""), "beta", i + 1)?;
        let m: Vec<i64> = split(rec.get(2).unwrap_or(""), "m", i + 1)?;
        let c = coeffs.get_or_insert_with(|| QuarkCoeffs::new(beta.len()));
        c.insert(&beta, field(&rec, 1, "nu", i + 1)?, &m, field(&rec, 3, "value", i + 1)?)?;
    }
    let mut coeffs = coeffs.ok_or_else(|| CliError::Usage(String::from("coefficient file has no rows")))?;
    if let Some(rho) = header_value(text, "rho") {
        let rho: f64 = rho.parse().map_err(|_| CliError::Usage(format!("unreadable rho `{rho}`")))?;
        coeffs = coeffs.with_rho(rho)?;
    }
    Ok(coeffs)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GridFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: u32,
    pub values: Vec<f64>,
}

pub fn write_grid<W: Write>(w: W, meta: serde_json::Value, f: &GridFunction) -> CliResult<()> {
    let spec = f.spec();
    let file = GridFile {
        meta: Some(meta),
        lower: spec.lower().to_vec(),
        upper: spec.upper().to_vec(),
        level: spec.level(),
        values: f.values().to_vec(),
    };
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_grid(text: &str) -> CliResult<GridFunction> {
    let file: GridFile = serde_json::from_str(text)?;
    let spec = GridSpec::new(file.lower, file.upper, file.level)?;
    Ok(GridFunction::from_values(spec, file.values)?)
}

/// One shell row of a report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ShellRow {
    pub j: u32,
    pub raw: f64,
    pub value: f64,
    pub growing: bool,
}

/// What `measure` writes; `lp` and `seminorm` are absent for single-number
/// norms.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MeasureReport {
    pub norm: String,
    pub total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seminorm: Option<f64>,
    pub per_shell: Vec<ShellRow>,
    pub flags: Vec<String>,
}

impl MeasureReport {
    pub fn from_norm(norm: &str, r: &NormReport) -> Self {
        MeasureReport {
            norm: norm.to_string(),
            total: r.total,
            lp: Some(r.lp),
            seminorm: Some(r.seminorm),
            per_shell: r
                .per_shell
                .iter()
                .map(|e| ShellRow {
                    j: e.j,
                    raw: e.raw,
                    value: e.value,
                    growing: e.growing,
                })
                .collect(),
            flags: r.flags.clone(),
        }
    }

    pub fn scalar(norm: &str, total: f64) -> Self {
        MeasureReport {
            norm: norm.to_string(),
            total,
            lp: None,
            seminorm: None,
            per_shell: Vec::new(),
            flags: Vec::new(),
        }
    }
}

pub fn write_report_json<W: Write>(mut w: W, meta: serde_json::Value, r: &MeasureReport) -> CliResult<()> {
    let mut v = serde_json::to_value(r)?;
    v["meta"] = meta;
    serde_json::to_writer_pretty(&mut w, &v)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_report_csv<W: Write>(mut w: W, header: &str, r: &MeasureReport) -> CliResult<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "# norm = {}", r.norm)?;
    writeln!(w, "# total = {}", r.total)?;
    if let (Some(lp), Some(sn)) = (r.lp, r.seminorm) {
        writeln!(w, "# lp = {lp}\n# seminorm = {sn}")?;
    }
    for f in &r.flags {
        writeln!(w, "# flag = {f}")?;
    }
    let mut c = csv_writer(w);
    c.write_record(["j", "raw", "value", "growing"])?;
    for e in &r.per_shell {
        c.write_record([e.j.to_string(), e.raw.to_string(), e.value.to_string(), e.growing.to_string()])?;
    }
    c.flush()?;
    Ok(())
}

/// Witness curves of one scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub scan: String,
    pub samples: Vec<f64>,
    /// `curves[i][j]` for `j = 0..=J_max`.
    pub curves: Vec<Vec<f64>>,
}

pub fn write_curves_csv<W: Write>(mut w: W, header: &str, sets: &[CurveSet]) -> CliResult<()> {
    w.write_all(header.as_bytes())?;
    let mut c = csv_writer(w);
    c.write_record(["scan", "sample", "x", "j", "value"])?;
    for set in sets {
        for (i, (x, curve)) in set.samples.iter().zip(&set.curves).enumerate() {
            for (j, v) in curve.iter().enumerate() {
                c.write_record([set.scan.clone(), i.to_string(), x.to_string(), j.to_string(), v.to_string()])?;
            }
        }
    }
    c.flush()?;
    Ok(())
}

/// Two-column `j value` blocks, one per sample, separated by two blank lines
/// so gnuplot's `index` selects them.
pub fn write_dat<W: Write>(mut w: W, header: &str, set: &CurveSet) -> CliResult<()> {
    w.write_all(header.as_bytes())?;
    for (i, (x, curve)) in set.samples.iter().zip(&set.curves).enumerate() {
        if i > 0 {
            writeln!(w, "\n")?;
        }
        writeln!(w, "# {} sample {i} x = {x}", set.scan)?;
        for (j, v) in curve.iter().enumerate() {
            writeln!(w, "{j} {v}")?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use besov_core::seqspace::construct_zeta;

    #[test]
    fn sequence_round_trip() {
        let z = construct_zeta(12).unwrap();
        let mut buf = Vec::new();
        write_sequence(&mut buf, "# besov test\n# jmax = 12\n", &z).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(read_sequence(&text).unwrap(), z);
    }

    #[test]
    fn coeff_round_trip() {
        let mut c = QuarkCoeffs::new(2).with_rho(3.0).unwrap();
        c.insert(&[0, 1], 3, &[-2, 5], 0.25).unwrap();
        c.insert(&[0, 0], 0, &[1, 1], -1.5).unwrap();
        let mut buf = Vec::new();
        write_coeffs(&mut buf, "# besov test\n", &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(read_coeffs(&text).unwrap(), c);
    }

    #[test]
    fn grid_round_trip() {
        let spec = GridSpec::new(vec![0.0, -1.0], vec![1.0, 1.0], 3).unwrap();
        let f = GridFunction::sample(spec, |x| x[0] - 2.0 * x[1]).unwrap();
        let mut buf = Vec::new();
        write_grid(&mut buf, serde_json::json!({"k": 1}), &f).unwrap();
        assert_eq!(read_grid(std::str::from_utf8(&buf).unwrap()).unwrap(), f);
    }

    #[test]
    fn malformed_inputs_are_usage_errors() {
        assert!(matches!(read_sequence("a,b\n1,2\n"), Err(CliError::Usage(_))));
        assert!(matches!(read_sequence("level,start,length,value\n1,x,1,1\n"), Err(CliError::Usage(_))));
        assert!(matches!(read_grid("{\"lower\": [0]}"), Err(CliError::Usage(_))));
        assert!(matches!(read_coeffs("beta,nu,m,value\n"), Err(CliError::Usage(_))));
    }
}
