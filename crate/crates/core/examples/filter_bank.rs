//! Fast DCST on one block: subband layout, round trip and operation counts.
use aedcst::transform::{dcst_mult_formula, dct_naive, DcstPlan, DctPlan};

fn main() -> aedcst::Result<()> {
    let n = 64;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin() + 0.2 * (i as f64 * 1.7).cos()).collect();

    let plan = DcstPlan::new(n)?;
    for t in 0..plan.layout().len() {
        let band = plan.layout().band(t);
        let (y, _) = plan.forward_counted(&x)?;
        let energy: f64 = y[band.clone()].iter().map(|v| v * v).sum();
        println!("band {t}: {band:?} energy {energy:.4}");
    }

    let (y, fwd) = plan.forward_counted(&x)?;
    let back = plan.inverse(&y)?;
    let err = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("round trip max error {err:.2e}");
    println!("dcst: {} mults, {} adds (closed form {})", fwd.mults, fwd.adds, dcst_mult_formula(n));

    let (c, dct_ops) = DctPlan::new(n)?.forward_counted(&x)?;
    let ref_c = dct_naive(&x)?;
    let err = c.iter().zip(&ref_c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("dct: {} mults, {} adds, max deviation from direct sum {err:.2e}", dct_ops.mults, dct_ops.adds);
    Ok(())
}
