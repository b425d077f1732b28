//! Scratch diagnostic: watch the local training loss on one synthetic device.
use fediot_core::autoencoder::*;
use fediot_core::data::*;
use fediot_core::numeric::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let rank: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let rows: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1500);
    let epochs: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(100);
    let lr: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.012);

    let cfg = SynthConfig {
        num_devices: 1,
        feature_dim: 115,
        benign_rows: vec![rows],
        anomaly_rows: vec![rows],
        manifold_rank: rank,
        ..SynthConfig::default()
    };
    let tables = synth_generate(&cfg).unwrap();
    let ds = split_and_scale(0, &tables[0], 5.0, &RngStream::new(1, StreamLabel::new(Purpose::Split, 0, 0))).unwrap();
    println!("train rows: {}", ds.train_benign.rows());

    let arch = ArchitectureSpec::with_defaults(115).unwrap();
    let params = ModelParams::init(&arch, &RngStream::new(2, StreamLabel::new(Purpose::Init, 0, 0)));
    let mut opt = OptimizerState::new(lr, 0.9, 1e-5, &params);
    let (params, trace) = train_epochs(
        params, &ds.train_benign, epochs, 128, Activation::Relu, &mut opt,
        &RngStream::new(3, StreamLabel::new(Purpose::TrainShuffle, 0, 0)),
    ).unwrap();
    for (e, l) in trace.iter().enumerate() {
        if e % 10 == 0 || e == trace.len() - 1 { println!("epoch {e:3}: loss {l:.5}"); }
    }
    // threshold-side picture
    let scores_b = fediot_core::metrics::reconstruction_scores(&params, &ds.threshold_benign, Activation::Relu).unwrap();
    let mb: f64 = scores_b.iter().sum::<f64>() / scores_b.len() as f64;
    let anom_rows: Vec<usize> = ds.test_labels.iter().enumerate().filter(|(_, &l)| l == 1).map(|(i, _)| i).collect();
    let scores_a = fediot_core::metrics::reconstruction_scores(&params, &ds.test_features.select_rows(&anom_rows), Activation::Relu).unwrap();
    let ma: f64 = scores_a.iter().sum::<f64>() / scores_a.len() as f64;
    println!("benign mean score {mb:.5}  anomaly mean score {ma:.5}  ratio {:.2}", ma / mb);
}
