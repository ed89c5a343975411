use std::path::PathBuf;

use rfsurrogate_cli::touchstone::{self, Format, FreqUnit, TouchstoneError};
use rfsurrogate_core::{CMatrix, Complex64, ComplexResponse, FrequencyGrid};
use rfsurrogate_oracle::{OracleKind, OracleSpec};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() < tol
}

fn si_response() -> ComplexResponse {
    let oracle = OracleSpec::preset(OracleKind::Si);
    let p = oracle.space.point(17).unwrap();
    oracle.simulate(&p, &oracle.dense_grid().unwrap()).unwrap()
}

fn max_error(a: &ComplexResponse, b: &ComplexResponse) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(u, v)| (u - v).norm()))
        .fold(0.0, f64::max)
}

#[test]
fn identity_through_two_port() {
    let t = touchstone::read(&data("thru_ri_ghz.s2p")).unwrap();
    assert_eq!(t.response.grid().points(), &[1e9]);
    let s = t.response.at(0);
    assert_eq!(s[(0, 0)], Complex64::new(0.0, 0.0));
    assert_eq!(s[(1, 0)], Complex64::new(1.0, 0.0));
    assert_eq!(s[(0, 1)], Complex64::new(1.0, 0.0));
    assert_eq!(s[(1, 1)], Complex64::new(0.0, 0.0));
    assert_eq!((t.format, t.unit, t.z0), (Format::Ri, FreqUnit::GHz, 50.0));
}

#[test]
fn magnitude_angle_with_comments_in_mhz() {
    let t = touchstone::read(&data("line_ma_mhz.s2p")).unwrap();
    assert_eq!(t.response.grid().points(), &[100e6, 200e6, 500.5e6]);
    let s = t.response.at(0);
    assert!(close(s[(0, 0)], Complex64::new(0.0, 0.1), 1e-12));
    let h = 0.9 / 2f64.sqrt();
    assert!(close(s[(1, 0)], Complex64::new(h, -h), 1e-12));
    let s = t.response.at(1);
    assert!(close(s[(0, 0)], Complex64::new(-0.2, 0.0), 1e-12));
    assert!(close(s[(0, 1)], Complex64::new(0.0, -0.8), 1e-12));
}

#[test]
fn unit_magnitude_quarter_turn_is_j() {
    let t = touchstone::parse("# GHz S MA R 50\n1 1 90 0 0 0 0 1 90\n", Some(2)).unwrap();
    assert!(close(t.response.at(0)[(0, 0)], Complex64::new(0.0, 1.0), 1e-12));
}

#[test]
fn decibel_format_in_khz() {
    let t = touchstone::read(&data("filter_db_khz.s2p")).unwrap();
    assert_eq!(t.response.grid().points(), &[1e9, 2e9]);
    let s = t.response.at(0);
    assert!(close(s[(0, 0)], Complex64::new(0.1, 0.0), 1e-12));
    let m = 10f64.powf(-1.0 / 20.0);
    assert!(close(s[(1, 0)], Complex64::new(0.0, m), 1e-12));
    let s = t.response.at(1);
    assert!((s[(0, 0)].norm() - 0.5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn one_port_lowercase_options_in_hz() {
    let t = touchstone::read(&data("load_ri_hz.s1p")).unwrap();
    assert_eq!(t.response.ports(), 1);
    assert_eq!(t.z0, 75.0);
    assert_eq!(t.response.at(1)[(0, 0)], Complex64::new(0.25, 0.25));
}

#[test]
fn missing_option_line_uses_defaults() {
    let t = touchstone::read(&data("default_options.s2p")).unwrap();
    assert_eq!((t.format, t.unit, t.z0), (Format::Ma, FreqUnit::GHz, 50.0));
    assert_eq!(t.response.grid().points(), &[2e9]);
    assert!(close(t.response.at(0)[(1, 0)], Complex64::new(0.5, 0.0), 1e-15));
}

#[test]
fn parse_errors_are_distinct_and_carry_lines() {
    let e = |n: &str| touchstone::read(&data(n)).unwrap_err();
    assert!(matches!(e("bad_option.s2p"), TouchstoneError::Option { line: 2, .. }));
    assert!(matches!(e("non_monotone.s2p"), TouchstoneError::NonMonotone { line: 4, .. }));
    assert!(matches!(e("columns.s2p"), TouchstoneError::Columns { line: 3, expected: 9, found: 8 }));
    assert!(matches!(e("bad_number.s2p"), TouchstoneError::Number { line: 3, .. }));
    assert!(matches!(touchstone::parse("! nothing\n", Some(2)), Err(TouchstoneError::Empty)));
    assert!(matches!(
        touchstone::parse("# GHz S RI\n0 0 0 1 0 1 0 0 0\n", Some(2)),
        Err(TouchstoneError::Frequency { line: 2, .. })
    ));
    assert!(matches!(
        touchstone::parse("# GHz S RI\n# GHz S RI\n", Some(2)),
        Err(TouchstoneError::Option { line: 2, .. })
    ));
    assert!(matches!(touchstone::parse("# GHz Y RI\n", Some(2)), Err(TouchstoneError::Option { line: 1, .. })));
}

#[test]
fn round_trip_every_format_and_unit() {
    let resp = si_response();
    let dir = tempfile::tempdir().unwrap();
    for format in [Format::Ri, Format::Ma, Format::Db] {
        for unit in [FreqUnit::Hz, FreqUnit::KHz, FreqUnit::MHz, FreqUnit::GHz] {
            let path = dir.path().join("r.s2p");
            touchstone::write_with(&resp, &path, format, unit).unwrap();
            let back = touchstone::read(&path).unwrap();
            assert_eq!((back.format, back.unit), (format, unit));
            let err = max_error(&resp, &back.response);
            assert!(err < 1e-9, "{format:?} {unit:?}: {err}");
            for (a, b) in resp.grid().points().iter().zip(back.response.grid().points()) {
                assert!((a - b).abs() <= 1e-15 * a);
            }
        }
    }
}

#[test]
fn default_writer_is_ri_hz_and_byte_deterministic() {
    let resp = si_response();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.s2p"), dir.path().join("b.s2p"));
    touchstone::write(&resp, &a).unwrap();
    touchstone::write(&resp, &b).unwrap();
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# Hz S RI R 50\n"));
    let back = touchstone::read(&a).unwrap();
    assert_eq!(back.response, resp);
}

#[test]
fn unwritable_path_and_empty_grid_fail() {
    let resp = si_response();
    let e = touchstone::write(&resp, std::path::Path::new("/nonexistent-dir/x.s2p")).unwrap_err();
    assert!(matches!(e, TouchstoneError::Io { .. }));
    assert!(FrequencyGrid::new(vec![]).is_err());
}

#[test]
fn four_port_is_rejected_on_write() {
    let g = FrequencyGrid::new(vec![1e9]).unwrap();
    let r = ComplexResponse::new(g, vec![CMatrix::identity(4, 4)]).unwrap();
    assert!(matches!(
        touchstone::render(&r, Format::Ri, FreqUnit::Hz, 50.0),
        Err(TouchstoneError::Ports(4))
    ));
}

proptest::proptest! {
    #[test]
    fn ri_text_round_trip_is_exact(
        values in proptest::collection::vec(-1e3f64..1e3, 8..=8 * 6),
        start in 1e3f64..1e9,
    ) {
        let n = values.len() / 8;
        let grid = FrequencyGrid::new((0..n).map(|k| start * (1.0 + k as f64)).collect()).unwrap();
        let data = values[..8 * n]
            .chunks(8)
            .map(|v| CMatrix::from_fn(2, 2, |i, j| Complex64::new(v[4 * i + 2 * j], v[4 * i + 2 * j + 1])))
            .collect();
        let resp = ComplexResponse::new(grid, data).unwrap();
        let text = touchstone::render(&resp, Format::Ri, FreqUnit::Hz, 50.0).unwrap();
        let back = touchstone::parse(&text, Some(2)).unwrap();
        proptest::prop_assert_eq!(back.response, resp);
    }
}
