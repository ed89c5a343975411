use ndarray::{array, Array2};
use proptest::prelude::*;
use rfsurrogate_bnn::{
    conv_plan, softplus_inv, Activation, BayesLinearLayer, BayesNet, BayesTConv1DLayer, InputScaler, Mode,
    NetConfig, TrainData, VariationalParam,
};
use rfsurrogate_core::RngStream;

fn small(mode: Mode, out_len: usize) -> BayesNet {
    let config = NetConfig {
        mode,
        widths: vec![6, 5],
        head_width: 4,
        conv_channels: [3, 2],
        init_rho: -2.0,
        ..Default::default()
    };
    let dims = if mode == Mode::Point { 3 } else { 2 };
    BayesNet::new(config, InputScaler::new(vec![0.0; dims], vec![1.0; dims]).unwrap(), 2, out_len).unwrap()
}

#[test]
fn single_layer_example() {
    let layer = BayesLinearLayer {
        weight: VariationalParam::new(vec![1, 1], vec![1.0], vec![softplus_inv(1.0)]),
        bias: VariationalParam::new(vec![1], vec![0.0], vec![0.0]),
        activation: Activation::Identity,
    };
    let w = layer.weight.realize(Some(&[2.0]));
    let b = layer.bias.realize(Some(&[0.0]));
    let y = layer.forward(&array![[3.0]], &w, &b);
    assert!((y[(0, 0)] - 9.0).abs() < 1e-15);
}

#[test]
fn zero_noise_is_the_mean_network() {
    for (mode, len) in [(Mode::Point, 1), (Mode::Vector, 21)] {
        let net = small(mode, len);
        let x = Array2::from_shape_fn((3, net.input_dim), |(i, j)| 0.3 * i as f64 - 0.2 * j as f64);
        let zero = net.zero_noise();
        assert_eq!(net.forward_sample(&x, Some(&zero)).unwrap(), net.forward_sample(&x, None).unwrap());
        let eps = net.sample_noise(&mut RngStream::new(1, "e"));
        let a = net.forward_sample(&x, Some(&eps)).unwrap();
        assert_eq!(a, net.forward_sample(&x, Some(&eps)).unwrap());
        assert_ne!(a, net.forward_sample(&x, None).unwrap());
        assert_eq!(a.dim(), (3, 2 * len));
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    let net = small(Mode::Point, 1);
    assert!(net.forward_sample(&Array2::zeros((2, 4)), None).is_err());
    let mut bad = net.zero_noise();
    bad.0[0].pop();
    assert!(net.forward_sample(&Array2::zeros((2, 3)), Some(&bad)).is_err());
}

#[test]
fn perfect_predictor_nll() {
    let mut net = small(Mode::Point, 1);
    net.config.noise_sigma = 1.0;
    net.config.deterministic = true;
    let x = Array2::from_shape_fn((7, 3), |(i, j)| ((i + 2 * j) as f64 * 0.1).cos());
    let y = net.predict_sample(&x, None).unwrap();
    let data = TrainData::new(x, y, None).unwrap();
    let loss = net.elbo_loss(&data, &[net.zero_noise()], 1.0).unwrap();
    let per_point = loss.nll / 14.0;
    assert!((per_point - 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-12);
    assert_eq!(loss.kl, 0.0);
}

#[test]
fn kl_vanishes_when_posterior_is_prior() {
    let mut net = small(Mode::Vector, 16);
    for p in net.params_mut() {
        p.mu.iter_mut().for_each(|m| *m = 0.0);
        p.rho.iter_mut().for_each(|r| *r = softplus_inv(1.0));
    }
    assert!(net.kl().abs() < 1e-9);
}

#[test]
fn default_vector_head_reaches_401_points() {
    let (len, pads) = conv_plan(401, 4, 2, 2).unwrap();
    assert_eq!((len, pads.clone()), (98, vec![1, 1]));
    let config = NetConfig {
        mode: Mode::Vector,
        ..Default::default()
    };
    let net = BayesNet::new(config, InputScaler::new(vec![0.0; 3], vec![1.0; 3]).unwrap(), 4, 401).unwrap();
    let y = net.forward_sample(&Array2::zeros((2, 3)), None).unwrap();
    assert_eq!(y.dim(), (2, 1604));
    assert!(BayesNet::new(
        NetConfig {
            mode: Mode::Vector,
            ..Default::default()
        },
        InputScaler::new(vec![0.0], vec![1.0]).unwrap(),
        1,
        9
    )
    .is_err());
}

#[test]
fn checkpoint_round_trip_is_exact() {
    let mut net = small(Mode::Vector, 21);
    let x = Array2::from_shape_fn((4, 2), |(i, j)| (i * j) as f64 / 7.0);
    let y = Array2::from_shape_fn((4, 42), |(i, u)| (i as f64 - u as f64 / 9.0).sin() * 1e-3 + 1.0 / 3.0);
    let data = TrainData::new(x.clone(), y, None).unwrap();
    net.fit(&data, Some(3), &RngStream::new(1, "ck")).unwrap();
    let text = net.to_json().unwrap();
    let back = BayesNet::from_json(&text).unwrap();
    assert_eq!(back, net);
    assert_eq!(back.predict_sample(&x, None).unwrap(), net.predict_sample(&x, None).unwrap());
    assert_eq!(back.to_json().unwrap(), text);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.json");
    net.save(&path).unwrap();
    assert_eq!(BayesNet::load(&path).unwrap(), net);
    let broken = text.replacen("\"shape\": [\n", "\"shape\": [\n 7,\n", 1);
    assert!(BayesNet::from_json(&broken).is_err());
}

proptest! {
    #[test]
    fn tconv_output_length(len in 1usize..40, k in 1usize..7, stride in 1usize..4, pad_seed in 0usize..4) {
        let pad = pad_seed % stride;
        let layer = BayesTConv1DLayer {
            kernel: VariationalParam::constant(vec![2, 3, k], 0.1, -3.0),
            bias: VariationalParam::constant(vec![3], 0.0, -3.0),
            stride,
            output_padding: pad,
            activation: Activation::Tanh,
        };
        let x = Array2::from_elem((2 * len, 2), 0.5);
        let y = layer.forward(&x, 2, len, &layer.kernel.mu, &layer.bias.mu);
        prop_assert_eq!(layer.output_len(len), (len - 1) * stride + k + pad);
        prop_assert_eq!(y.dim(), (2 * layer.output_len(len), 3));
    }

    #[test]
    fn conv_plan_reaches_target(target in 4usize..600, k in 2usize..6, stride in 1usize..4) {
        if let Some((mut len, pads)) = conv_plan(target, k, stride, 2) {
            for p in pads {
                prop_assert!(p < stride);
                len = (len - 1) * stride + k + p;
            }
            prop_assert_eq!(len, target);
        }
    }
}
