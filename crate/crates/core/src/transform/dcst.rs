use super::fast::{DctPlan, OpCount, Tally};
use super::layout::SubbandLayout;
use super::naive::{dct_naive, idct_naive};
use super::check_pow2;
use crate::error::{check_finite, check_len, Result};

/// Discrete cosine Stockwell transform by way of the naive DCT.
///
/// Takes the full DCT, then replaces every band except the DC term by the
/// inverse DCT of that band. Output index 0 is the DC coefficient unchanged.
pub fn dcst(c: &[f64]) -> Result<Vec<f64>> {
    let n = c.len();
    check_pow2(n)?;
    let layout = SubbandLayout::new(n)?;
    let mut x = dct_naive(c)?;
    for t in 1..layout.len() {
        let r = layout.band(t);
        let band = idct_naive(&x[r.clone()])?;
        x[r].copy_from_slice(&band);
    }
    Ok(x)
}

/// Inverse of [`dcst`]: per-band DCT, then the full inverse DCT.
pub fn idcst(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    check_pow2(n)?;
    let layout = SubbandLayout::new(n)?;
    let mut c = x.to_vec();
    for t in 1..layout.len() {
        let r = layout.band(t);
        let band = dct_naive(&c[r.clone()])?;
        c[r].copy_from_slice(&band);
    }
    idct_naive(&c)
}

/// Fast DCST and IDCST built from one full-size [`DctPlan`] and one plan per
/// band width.
#[derive(Debug, Clone)]
pub struct DcstPlan {
    layout: SubbandLayout,
    full: DctPlan,
    bands: Vec<DctPlan>,
}

impl DcstPlan {
    pub fn new(n: usize) -> Result<Self> {
        let layout = SubbandLayout::new(n)?;
        let full = DctPlan::new(n)?;
        let bands = layout
            .band_widths
            .iter()
            .map(|&w| DctPlan::new(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { layout, full, bands })
    }

    pub fn len(&self) -> usize {
        self.full.len()
    }

    pub fn is_empty(&self) -> bool {
        self.full.is_empty()
    }

    pub fn layout(&self) -> &SubbandLayout {
        &self.layout
    }

    pub fn forward(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_len(c, self.len())?;
        check_finite(c)?;
        let mut x = c.to_vec();
        self.forward_in_place(&mut x);
        Ok(x)
    }

    pub fn inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(x, self.len())?;
        check_finite(x)?;
        let mut c = x.to_vec();
        self.inverse_in_place(&mut c);
        Ok(c)
    }

    pub fn forward_counted(&self, c: &[f64]) -> Result<(Vec<f64>, OpCount)> {
        check_len(c, self.len())?;
        let mut x = c.to_vec();
        let mut count = OpCount::default();
        self.forward_tally(&mut x, &mut count);
        Ok((x, count))
    }

    pub fn inverse_counted(&self, x: &[f64]) -> Result<(Vec<f64>, OpCount)> {
        check_len(x, self.len())?;
        let mut c = x.to_vec();
        let mut count = OpCount::default();
        self.inverse_tally(&mut c, &mut count);
        Ok((c, count))
    }

    pub(crate) fn forward_in_place(&self, x: &mut [f64]) {
        self.forward_tally(x, &mut ());
    }

    pub(crate) fn inverse_in_place(&self, x: &mut [f64]) {
        self.inverse_tally(x, &mut ());
    }

    fn forward_tally<T: Tally>(&self, x: &mut [f64], t: &mut T) {
        self.full.forward_tally(x, t);
        for b in 1..self.layout.len() {
            self.bands[b].inverse_tally(&mut x[self.layout.band(b)], t);
        }
    }

    fn inverse_tally<T: Tally>(&self, x: &mut [f64], t: &mut T) {
        for b in 1..self.layout.len() {
            self.bands[b].forward_tally(&mut x[self.layout.band(b)], t);
        }
        self.full.inverse_tally(x, t);
    }
}

/// Fast DCST through a freshly built [`DcstPlan`].
pub fn dcst_fast(c: &[f64]) -> Result<Vec<f64>> {
    DcstPlan::new(c.len())?.forward(c)
}

/// Fast IDCST through a freshly built [`DcstPlan`].
pub fn idcst_fast(x: &[f64]) -> Result<Vec<f64>> {
    DcstPlan::new(x.len())?.inverse(x)
}
