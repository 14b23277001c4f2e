//! Scores AE-DCST, AE-DCT and the fixed standard DCST on the same split.
use aedcst::pipeline::{generate_synthetic, prepare, run_variant, RunConfig, SyntheticSpec, Variant};

fn main() -> aedcst::Result<()> {
    let cfg = RunConfig::default();
    let x = generate_synthetic(&SyntheticSpec::default())?;
    let ds = prepare(&x, 0.2, cfg.model.h)?;
    println!("{:<14} {:>8} {:>8} {:>8} {:>7}", "variant", "CR", "PRD", "QS", "N_coe");
    for v in [Variant::AeDcst, Variant::AeDct, Variant::StandardDcst] {
        let r = run_variant(v, &ds, &cfg)?.evaluation.report;
        println!("{:<14} {:>8.3} {:>8.3} {:>8.4} {:>7.2}", v.to_string(), r.cr, r.prd, r.qs, r.n_coe);
    }
    Ok(())
}
