//! Numeric CSV tables in boundary units and atomic file output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{io_err, CliError, Result};

pub const TRACE_HEADER: [&str; 2] = ["t_us", "p1"];
pub const PHASE_MAP_HEADER: [&str; 3] = ["phi_rad", "t_us", "p1"];
pub const SPECTRUM_HEADER: [&str; 3] = ["detuning_mhz", "amplitude_mhz", "p1"];
pub const CURVES_HEADER: [&str; 3] = ["omega_mhz", "voltage", "p1"];
pub const SPECTROSCOPY_HEADER: [&str; 2] = ["flux", "frequency_ghz"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Table { path: PathBuf::new(), message: e.to_string() };
        w.write_record(&self.header).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v))).map_err(fail)?;
        }
        w.into_inner().map_err(|e| CliError::Table { path: PathBuf::new(), message: e.to_string() })
    }
}

/// 17 significant digits, enough to reproduce any `f64` exactly.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a numeric table and checks its header against `expected`.
pub fn read_table(path: &Path, expected: &[&str]) -> Result<Table> {
    let bad = |message: String| CliError::Table { path: path.to_owned(), message };
    let text = fs::read(path).map_err(io_err(path))?;
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(&text[..]);
    let header: Vec<String> = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_owned).collect();
    if header != expected {
        return Err(bad(format!("expected header `{}`, found `{}`", expected.join(","), header.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad(format!("row {}: `{s}` is not a number", i + 2))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::Table {
        path: path.to_owned(),
        message: "output path has no file name".into(),
    })?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}

/// `<path>.meta`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}
