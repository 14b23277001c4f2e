use super::check_pow2;
use crate::error::{Error, Result};

/// Dyadic band partition of an `N`-point coefficient vector.
///
/// Band 0 is the DC term. Band `t >= 1` starts at `2^(t-1)` and is
/// `2^(t-1)` wide, so the widths read 1, 1, 2, 4, ..., N/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubbandLayout {
    pub band_starts: Vec<usize>,
    pub band_widths: Vec<usize>,
}

impl SubbandLayout {
    pub fn new(n: usize) -> Result<Self> {
        check_pow2(n)?;
        if n < 2 {
            return Err(Error::NotPowerOfTwo(n));
        }
        let mut band_starts = vec![0];
        let mut band_widths = vec![1];
        let mut w = 1;
        while w < n {
            band_starts.push(w);
            band_widths.push(w);
            w *= 2;
        }
        Ok(Self { band_starts, band_widths })
    }

    pub fn len(&self) -> usize {
        self.band_starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.band_starts.is_empty()
    }

    pub fn total(&self) -> usize {
        self.band_widths.iter().sum()
    }

    /// Index range covered by band `t`.
    pub fn band(&self, t: usize) -> std::ops::Range<usize> {
        let s = self.band_starts[t];
        s..s + self.band_widths[t]
    }

    /// Band that owns coefficient `i`.
    pub fn band_of(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            (usize::BITS - i.leading_zeros()) as usize
        }
    }
}
