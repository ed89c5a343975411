use rfsurrogate_bnn::{BayesNet, Mode, NetConfig};
use rfsurrogate_core::{Axis, DesignPoint, DesignSpace, FrequencyGrid, RngStream, Unit};
use rfsurrogate_sampling::{aggregate_geometry, field_csv, uncertainty_field, UncertaintyField};

fn space() -> DesignSpace {
    DesignSpace::new(vec![
        Axis::new("A", Unit::Millimeter, 1.0, 2.0, 0.25).unwrap(),
        Axis::new("B", Unit::Micrometer, 10.0, 12.0, 1.0).unwrap(),
    ])
    .unwrap()
}

fn setup(mode: Mode, deterministic: bool) -> (BayesNet, Vec<DesignPoint>, FrequencyGrid) {
    let sp = space();
    let grid = FrequencyGrid::linspace(1e9, 5e9, 21).unwrap();
    let config = NetConfig {
        mode,
        widths: vec![8, 8],
        head_width: 6,
        conv_channels: [3, 3],
        init_rho: -2.0,
        deterministic,
        ..Default::default()
    };
    let scaler = rfsurrogate_bnn::data::input_scaler(&sp, &grid, mode).unwrap();
    let out_len = if mode == Mode::Point { 1 } else { grid.len() };
    let net = BayesNet::new(config, scaler, 3, out_len).unwrap();
    let points = (0..11).map(|i| sp.point(i).unwrap()).collect();
    (net, points, grid)
}

#[test]
fn deterministic_net_has_zero_field() {
    for mode in [Mode::Point, Mode::Vector] {
        let (net, pts, grid) = setup(mode, true);
        let f = uncertainty_field(&net, (0..pts.len()).collect(), &pts, &grid, 8, &RngStream::new(1, "u")).unwrap();
        assert!(f.values.iter().all(|v| v.abs() < 1e-9));
        assert!(aggregate_geometry(&f).iter().all(|&v| v == 0.0));
    }
}

#[test]
fn matches_brute_force_recomputation() {
    for mode in [Mode::Point, Mode::Vector] {
        let (net, pts, grid) = setup(mode, false);
        let stream = RngStream::new(2, "u");
        let m = 5;
        let f = uncertainty_field(&net, (0..pts.len()).collect(), &pts, &grid, m, &stream).unwrap();
        let x = net.query_inputs(&pts, &grid).unwrap();
        let e = net.ensemble_predict(&x, m, &stream).unwrap();
        let samples: Vec<_> = e.samples.into_iter().map(|s| net.to_spectra(s, pts.len()).unwrap()).collect();
        for i in 0..pts.len() {
            for k in 0..grid.len() {
                let mut ss = 0.0;
                for c in 0..3 {
                    let col = k * 3 + c;
                    let mean = samples.iter().map(|s| s[(i, col)]).sum::<f64>() / m as f64;
                    ss += samples.iter().map(|s| (s[(i, col)] - mean).powi(2)).sum::<f64>();
                }
                let direct = (ss / m as f64).sqrt();
                assert!((f.values[(i, k)] - direct).abs() < 1e-12, "{mode:?} ({i},{k})");
            }
        }
        if mode == Mode::Vector {
            // two-sample identity: population spread is half the Frobenius distance
            let f2 = uncertainty_field(&net, (0..pts.len()).collect(), &pts, &grid, 2, &stream).unwrap();
            let (a, b) = (&samples[0], &samples[1]);
            for i in 0..pts.len() {
                for k in 0..grid.len() {
                    let d: f64 = (0..3).map(|c| (a[(i, k * 3 + c)] - b[(i, k * 3 + c)]).powi(2)).sum::<f64>().sqrt();
                    assert!((f2.values[(i, k)] - d / 2.0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn aggregate_is_row_sum() {
    let (net, pts, grid) = setup(Mode::Point, false);
    let f = uncertainty_field(&net, (100..111).collect(), &pts, &grid, 4, &RngStream::new(3, "u")).unwrap();
    let agg = aggregate_geometry(&f);
    for (i, a) in agg.iter().enumerate() {
        let direct: f64 = (0..grid.len()).map(|k| f.values[(i, k)]).sum();
        assert!((a - direct).abs() < 1e-12 * direct.max(1.0));
    }
    let single = FrequencyGrid::new(vec![2e9]).unwrap();
    let one = uncertainty_field(&net, (0..pts.len()).collect(), &pts, &single, 4, &RngStream::new(3, "u")).unwrap();
    let agg1 = aggregate_geometry(&one);
    for i in 0..pts.len() {
        assert_eq!(agg1[i], one.values[(i, 0)]);
    }
}

#[test]
fn field_rejects_bad_shapes_and_small_ensembles() {
    let (net, pts, grid) = setup(Mode::Point, false);
    assert!(uncertainty_field(&net, (0..pts.len()).collect(), &pts, &grid, 1, &RngStream::new(1, "u")).is_err());
    let bad = ndarray::Array2::from_elem((2, 3), -1.0);
    assert!(UncertaintyField::new(vec![0, 1], pts[..2].to_vec(), FrequencyGrid::linspace(1.0, 3.0, 3).unwrap(), bad).is_err());
}

#[test]
fn csv_export_layout() {
    let (net, pts, grid) = setup(Mode::Point, false);
    let f = uncertainty_field(&net, vec![7, 9], &pts[..2], &grid, 3, &RngStream::new(4, "u")).unwrap();
    let csv = field_csv(&f, &space());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "candidate_index,A,B,frequency_hz,uncertainty");
    assert_eq!(lines.len(), 1 + 2 * 21);
    assert!(lines[1].starts_with("7,"));
    assert!(lines[22].starts_with("9,"));
    assert_eq!(lines[1].split(',').count(), 5);
}
