use rfsurrogate_core::{DesignPoint, FrequencyGrid};
use rfsurrogate_oracle::{OracleKind, OracleSpec};
use rfsurrogate_vecfit::{ensemble_uncertainty, fit, FitConfig};

fn centre(spec: &OracleSpec) -> DesignPoint {
    DesignPoint::new(spec.space.axes().iter().map(|a| a.value(a.count() / 2)).collect())
}

#[test]
fn line_fits_with_twelve_poles() {
    let spec = OracleSpec::preset(OracleKind::Mtl);
    let grid = spec.dense_grid().unwrap();
    let data = spec.simulate(&centre(&spec), &grid).unwrap();
    let out = fit(&data, &FitConfig::new(12).with_iterations(20)).unwrap();
    let scale: f64 = data.data().iter().map(|s| s.norm_squared()).sum::<f64>() / (grid.len() * 4) as f64;
    let rel = out.rms / scale.sqrt();
    assert!(rel < 1e-4, "relative rms {rel:e}");
    assert!(out.model.is_stable());
}

#[test]
fn filter_ensemble_spread_peaks_at_passband() {
    let spec = OracleSpec::preset(OracleKind::Bclf);
    let x = centre(&spec);
    let dense = spec.dense_grid().unwrap();
    let samples_grid = FrequencyGrid::linspace(spec.band.min, spec.band.max, 30).unwrap();
    let samples = spec.simulate(&x, &samples_grid).unwrap();
    let u = ensemble_uncertainty(&samples, &[8, 10, 12], &dense, &FitConfig::new(1)).unwrap();

    // resonant region from the oracle: where |S21| rises above -20 dB
    let db = spec.dense_reference(&x).unwrap();
    let c21 = db.channels().iter().position(|&c| c == (1, 0)).unwrap();
    let inside: Vec<usize> = (0..dense.len()).filter(|&k| db.value(k, c21) > -20.0).collect();
    let (lo, hi) = (inside[0], *inside.last().unwrap());
    let argmax = u
        .per_frequency
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (k, &v)| if v > b.1 { (k, v) } else { b })
        .0;
    assert!(
        argmax >= lo && argmax <= hi,
        "argmax {} GHz outside [{}, {}] GHz",
        dense.points()[argmax] / 1e9,
        dense.points()[lo] / 1e9,
        dense.points()[hi] / 1e9
    );
}
