//! lzs command-line front end.
//!
//! Configuration is layered (defaults, preset, file, `--set`, flags), each
//! command returns a [`commands::Report`], and [`emit`] writes its tables
//! atomically together with a `.meta` sidecar that reruns the same command.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub use commands::{Command, Report};
pub use config::{ConfigSource, RunConfig};
pub use error::{CliError, ExitKind, Result};

/// Sidecar text: run facts as comments, then every effective key.
pub fn sidecar(command: Command, cfg: &RunConfig, report: &Report) -> String {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut s = format!("# lzs {} {}\n", env!("CARGO_PKG_VERSION"), command.name());
    s.push_str(&format!("# created_unix = {stamp}\n"));
    s.push_str("# units: frequencies in MHz (ordinary, not angular), times in us, phases in rad, rates in 1/s\n");
    for (k, v) in &report.notes {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push_str(&cfg.render());
    s
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn summary_text(report: &Report) -> String {
    report.summary.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Writes a report. With an output path the main table (or the summary for
/// commands without one) goes to the file and the summary to `stdout`;
/// without one the table goes to `stdout` and the summary to `stderr`.
pub fn emit(command: Command, cfg: &RunConfig, report: &Report, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let console = |w: &mut dyn Write, bytes: &[u8]| w.write_all(bytes).map_err(error::io_err("<stdout>"));
    match cfg.output_path() {
        Some(out) => {
            let body = match &report.table {
                Some(t) => t.to_csv()?,
                None => summary_text(report).into_bytes(),
            };
            table::write_atomic(out, &body)?;
            for (suffix, t) in &report.extra {
                table::write_atomic(&with_suffix(out, suffix), &t.to_csv()?)?;
            }
            table::write_atomic(&table::sidecar_path(out), sidecar(command, cfg, report).as_bytes())?;
            console(stdout, summary_text(report).as_bytes())?;
        }
        None => match &report.table {
            Some(t) => {
                console(stdout, &t.to_csv()?)?;
                console(stderr, summary_text(report).as_bytes())?;
            }
            None => console(stdout, summary_text(report).as_bytes())?,
        },
    }
    Ok(())
}

/// Loads the configuration, runs `command` and emits the result.
pub fn execute(command: Command, source: &ConfigSource, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = source.load()?;
    let report = commands::run(command, &cfg)?;
    emit(command, &cfg, &report, stdout, stderr)
}
