use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lzs_cli::table::{read_table, TRACE_HEADER};

fn lzs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lzs")).args(args).env_remove("LZS_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.trim_start().strip_prefix('=')).map(|v| v.trim().to_owned()))
        .unwrap_or_else(|| panic!("no `{key}` in:\n{text}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn formulas_for_the_boundary_preset() {
    let o = lzs(&["formulas", "--preset", "fig5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(value(&text, "regime"), "boundary");
    let gv: f64 = value(&text, "rabi_like_interference_khz").parse().unwrap();
    assert!((gv - 296.0).abs() < 6.0, "{gv}");
    let alpha: f64 = value(&text, "alpha").parse().unwrap();
    assert!((alpha - 0.686).abs() < 1e-3);
}

#[test]
fn no_drive_means_no_excitation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = lzs(&["evolve", "--preset", "fig4", "--set", "drive.rabi_mhz=0", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&out, &TRACE_HEADER).unwrap();
    assert_eq!(t.rows.len(), 2001);
    assert!(t.rows.iter().all(|r| r[1] == 0.0));
    assert!(dir.path().join("trace.csv.meta").exists());
}

#[test]
fn fitted_boundary_trace_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("fig5.csv");
    let fit = dir.path().join("fit.csv");
    assert!(lzs(&["evolve", "--preset", "fig5", "--out", path(&trace)]).status.success());
    let o = lzs(&["fit-trace", "--input", path(&trace), "--out", path(&fit)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f: f64 = value(&stdout(&o), "frequency_khz").parse().unwrap();
    assert!((f - 390.0).abs() < 39.0, "{f}");
}

#[test]
fn sidecar_reproduces_output_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let o = lzs(&[
        "sweep-phase", "--preset", "fig4", "--set", "phase.values_rad=0.6,1.6", "--set", "time.t_end_us=0.5",
        "--workers", "2", "--out", path(&first),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = dir.path().join("first.csv.meta");
    let o = lzs(&["sweep-phase", "--config", path(&meta), "--workers", "1", "--out", path(&second)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn small_spectrum_sweep_reports_asymmetry() {
    let o = lzs(&[
        "sweep-spectrum", "--preset", "fig6a",
        "--set", "spectrum.detuning_start_mhz=-10", "--set", "spectrum.detuning_end_mhz=10",
        "--set", "spectrum.detuning_points=3", "--set", "spectrum.amplitude_start_mhz=20",
        "--set", "spectrum.amplitude_end_mhz=30", "--set", "spectrum.amplitude_points=2",
        "--set", "spectrum.t_total_us=10",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert!(csv.starts_with("detuning_mhz,amplitude_mhz,p1\n"));
    assert_eq!(csv.lines().count(), 7);
    let summary = String::from_utf8_lossy(&o.stderr).into_owned();
    let a: f64 = value(&summary, "asymmetry").parse().unwrap();
    assert!((0.0..0.5).contains(&a));
}

#[test]
fn negative_modulation_frequency_exits_with_config_code() {
    let o = lzs(&["evolve", "--set", "modulation.omega_mhz=-1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("kind=config") && err.contains("key=modulation.omega_mhz"), "{err}");
}

#[test]
fn missing_input_is_an_io_error() {
    let o = lzs(&["fit-trace", "--input", "/nonexistent/trace.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn spectroscopy_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("spec.csv");
    let mut text = String::from("flux,frequency_ghz\n");
    for k in 0..21 {
        let flux = -0.4 + 0.04 * k as f64;
        let f = (8.0 * 0.264 * 13.822 * (std::f64::consts::PI * flux).cos().abs()).sqrt() - 0.264;
        text.push_str(&format!("{flux},{f:.16e}\n"));
    }
    fs::write(&input, text).unwrap();
    let o = lzs(&["fit-spectrum", "--input", path(&input)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = String::from_utf8_lossy(&o.stderr).into_owned();
    let ec: f64 = value(&summary, "ec_ghz").parse().unwrap();
    assert!((ec - 0.264).abs() < 1e-6);
}
