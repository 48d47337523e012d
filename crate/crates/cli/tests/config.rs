use std::fs;

use lzs_cli::config::{parse_text, ConfigSource};
use lzs_cli::{CliError, ExitKind};
use lzs_core::units::mhz;

fn source() -> ConfigSource {
    ConfigSource { file: None, preset: None, sets: Vec::new(), out: None, input: None, workers: None, tol: None }
}

#[test]
fn comments_and_whitespace_are_ignored() {
    let pairs = parse_text("# header\n\n drive.rabi_mhz =  3.5  # trailing\nsolver.tol=1e-8\n").unwrap();
    assert_eq!(pairs, vec![("drive.rabi_mhz".into(), "3.5".into()), ("solver.tol".into(), "1e-8".into())]);
}

#[test]
fn unknown_and_duplicate_keys_are_rejected() {
    let e = parse_text("drive.rabbi_mhz = 1\n").unwrap_err();
    assert!(matches!(e, CliError::Parse { line: 1, .. }), "{e}");
    let e = parse_text("solver.tol = 1e-8\nsolver.tol = 1e-9\n").unwrap_err();
    assert!(matches!(e, CliError::Parse { line: 2, .. }), "{e}");
    assert_eq!(e.kind(), ExitKind::Config);
}

#[test]
fn layers_apply_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.conf");
    fs::write(&file, "preset = fig5\ndrive.rabi_mhz = 10\nsolver.tol = 1e-8\n").unwrap();
    let mut s = source();
    s.file = Some(file);
    s.sets = vec!["drive.rabi_mhz=11".into()];
    s.tol = Some(1e-10);
    let cfg = s.load().unwrap();
    // preset supplies the modulation, the file and --set override the drive, the flag wins for tol
    assert_eq!(cfg.params.modulation.omega, mhz(2.4));
    assert_eq!(cfg.params.drive.rabi, mhz(11.0));
    assert_eq!(cfg.params.tol, 1e-10);
    assert!((cfg.t_end - 40e-6).abs() < 1e-18);
}

#[test]
fn bad_values_name_their_key() {
    let mut s = source();
    s.sets = vec!["modulation.omega_mhz=-1".into()];
    match s.load().unwrap_err() {
        CliError::Validation { key, .. } => assert_eq!(key, "modulation.omega_mhz"),
        e => panic!("unexpected {e}"),
    }
    let mut s = source();
    s.preset = Some("fig9".into());
    assert_eq!(s.load().unwrap_err().exit_code(), 2);
}

#[test]
fn rendered_config_reloads_to_the_same_values() {
    let mut s = source();
    s.preset = Some("fig4".into());
    s.sets = vec!["phase.values_rad=0.1,0.2".into()];
    let cfg = s.load().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("again.conf");
    fs::write(&file, cfg.render()).unwrap();
    let mut again = source();
    again.file = Some(file);
    let reloaded = again.load().unwrap();
    assert_eq!(reloaded.values, cfg.values);
    assert_eq!(reloaded.params, cfg.params);
    assert_eq!(reloaded.phases, vec![0.1, 0.2]);
}
