use ndarray::Array2;
use rfsurrogate_bnn::{Activation, BayesNet, Head, InputScaler, NetConfig};
use rfsurrogate_core::RngStream;

fn net(init_rho: f64, widths: Vec<usize>) -> BayesNet {
    let config = NetConfig {
        widths,
        head_width: 6,
        init_rho,
        ..Default::default()
    };
    BayesNet::new(config, InputScaler::new(vec![-1.0; 2], vec![1.0; 2]).unwrap(), 2, 1).unwrap()
}

fn inputs() -> Array2<f64> {
    Array2::from_shape_fn((5, 2), |(i, j)| ((i * 3 + j) as f64 * 0.37).sin())
}

#[test]
fn vanishing_sigma_collapses_the_ensemble() {
    let n = net(-800.0, vec![8, 8]);
    let x = inputs();
    let mean_forward = n.predict_sample(&x, None).unwrap();
    let e = n.ensemble_predict(&x, 6, &RngStream::new(1, "ens")).unwrap();
    for s in &e.samples {
        assert_eq!(s, &mean_forward);
    }
}

#[test]
fn two_members_average_exactly() {
    let n = net(-2.0, vec![8]);
    let x = inputs();
    let e = n.ensemble_predict(&x, 2, &RngStream::new(2, "ens")).unwrap();
    let expected = (&e.samples[0] + &e.samples[1]) / 2.0;
    assert_eq!(e.mean, expected);
    assert_ne!(e.samples[0], e.samples[1]);
}

#[test]
fn members_are_index_addressed() {
    let n = net(-2.0, vec![8]);
    let x = inputs();
    let stream = RngStream::new(3, "ens");
    let e = n.ensemble_predict(&x, 5, &stream).unwrap();
    let third = n.predict_sample(&x, Some(&n.member_noise(&stream, 3))).unwrap();
    assert_eq!(e.samples[3], third);
    assert!(n.ensemble_predict(&x, 1, &stream).is_err());
}

#[test]
fn variance_of_sample_variance_shrinks_fourfold() {
    let n = net(-1.0, vec![4]);
    let x = inputs().slice(ndarray::s![0..1, ..]).to_owned();
    let var_of_var = |m: usize| {
        let trials = 300;
        let vars: Vec<f64> = (0..trials)
            .map(|t| {
                let e = n.ensemble_predict(&x, m, &RngStream::new(t, &format!("vv{m}"))).unwrap();
                let v: Vec<f64> = e.samples.iter().map(|s| s[(0, 0)]).collect();
                let mean = v.iter().sum::<f64>() / m as f64;
                v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (m - 1) as f64
            })
            .collect();
        let mean = vars.iter().sum::<f64>() / trials as f64;
        vars.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    };
    let ratio = var_of_var(100) / var_of_var(400);
    assert!((2.5..6.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn linear_net_expectation_matches_mean_forward() {
    let mut n = net(-1.0, vec![3]);
    for l in &mut n.backbone {
        l.activation = Activation::Identity;
    }
    if let Head::Dense { layers } = &mut n.head {
        for l in layers {
            l.activation = Activation::Identity;
        }
    }
    let x = inputs().slice(ndarray::s![0..1, ..]).to_owned();
    let mean_forward = n.predict_sample(&x, None).unwrap();
    let trials = 10_000;
    let stream = RngStream::new(4, "reparam");
    let draws: Vec<Array2<f64>> = (0..trials)
        .map(|m| n.predict_sample(&x, Some(&n.member_noise(&stream, m))).unwrap())
        .collect();
    for c in 0..2 {
        let v: Vec<f64> = draws.iter().map(|d| d[(0, c)]).collect();
        let mean = v.iter().sum::<f64>() / trials as f64;
        let sd = (v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt();
        let tol = 3.0 * sd / (trials as f64).sqrt();
        assert!((mean - mean_forward[(0, c)]).abs() < tol, "channel {c}: {mean} vs {}", mean_forward[(0, c)]);
    }
}
