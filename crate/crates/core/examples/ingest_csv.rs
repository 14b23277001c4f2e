//! Reads one column of a delimited file and reports the block split.
//!
//! cargo run --example ingest_csv -- data.csv 2
use aedcst::pipeline::{ingest, DatasetSpec};

fn main() -> aedcst::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = match args.next() {
        Some(p) => std::path::PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("aedcst_ingest_demo.csv");
            let rows: String = (0..4000).map(|i| format!("{i},{:.6},{:.6}\n", (i as f64 * 0.1).sin(), (i as f64 * 0.37).cos())).collect();
            std::fs::write(&p, format!("t,x,y\n{rows}"))?;
            p
        }
    };
    let column = args.next().map(|c| c.parse().expect("column")).unwrap_or(1);
    let ds = ingest(&DatasetSpec { path, column, ..DatasetSpec::default() })?;
    println!("train blocks {}, test blocks {}", ds.train.len(), ds.test.len());
    println!("dropped samples {}, skipped rows {}", ds.dropped, ds.skipped_rows);
    println!("divisor {} (1.0 normalized = {} source units)", ds.norm.divisor, ds.norm.to_source(1.0));
    Ok(())
}
