use std::fs;

use lzs_cli::table::{read_table, sidecar_path, write_atomic, Table, TRACE_HEADER};

#[test]
fn values_round_trip_bitwise() {
    let mut t = Table::new(&TRACE_HEADER);
    for k in 0..200 {
        let x = k as f64 * 0.002;
        t.push(vec![x, (x * 7.3).sin().powi(2) / 3.0]);
    }
    t.push(vec![f64::MIN_POSITIVE, 1.0 - f64::EPSILON]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    write_atomic(&path, &t.to_csv().unwrap()).unwrap();
    let back = read_table(&path, &TRACE_HEADER).unwrap();
    assert_eq!(back, t);
    // no temporary files left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn header_mismatch_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    fs::write(&path, "time,p\n0,0\n").unwrap();
    let e = read_table(&path, &TRACE_HEADER).unwrap_err();
    assert_eq!(e.exit_code(), 1);
    fs::write(&path, "t_us,p1\n0,abc\n").unwrap();
    assert!(read_table(&path, &TRACE_HEADER).unwrap_err().to_string().contains("abc"));
}

#[test]
fn sidecar_sits_next_to_output() {
    assert_eq!(sidecar_path("out/a.csv".as_ref()), std::path::PathBuf::from("out/a.csv.meta"));
}
