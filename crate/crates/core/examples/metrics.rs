//! Distortion and compression figures for a toy reconstruction.
use aedcst::metrics::MetricsReport;

fn main() -> aedcst::Result<()> {
    let orig: Vec<f64> = (0..800).map(|i| 0.3 + (i as f64 * 0.05).sin()).collect();
    let rec: Vec<f64> = orig.iter().enumerate().map(|(i, v)| v + 0.01 * ((i * 13 % 7) as f64 - 3.0)).collect();
    let r = MetricsReport::compute(&orig, &rec, 32 * 800, 2400, 12.0)?;
    println!("{r}");
    println!("{}", r.to_json());
    Ok(())
}
