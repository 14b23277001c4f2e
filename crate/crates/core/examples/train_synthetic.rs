//! Trains the autoencoder on a synthetic gear signal and prints the epoch log.
use aedcst::model::ModelConfig;
use aedcst::pipeline::{generate_synthetic, prepare, SyntheticSpec};
use aedcst::training::{train, TrainConfig};

fn main() -> aedcst::Result<()> {
    let xi: f64 = std::env::args().nth(1).map(|s| s.parse().expect("xi")).unwrap_or(0.5);
    let x = generate_synthetic(&SyntheticSpec::default())?;
    let ds = prepare(&x, 0.2, 80)?;
    let cfg = TrainConfig { xi, ..TrainConfig::default() };
    let out = train(&ds.train, &ModelConfig::default(), &cfg)?;
    println!("{}", out.initial);
    for l in &out.history {
        println!("{l}");
    }
    println!("stopped early: {}", out.stopped_early);
    Ok(())
}
