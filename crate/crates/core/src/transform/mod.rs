//! Orthonormal DCT-II / DCT-III and the dyadic cosine Stockwell filter bank.
//!
//! Every size must be a power of two. The naive functions evaluate the
//! defining sums directly and serve as references; [`DctPlan`] and
//! [`DcstPlan`] run the O(N log N) butterfly network with optional operation
//! counting.

mod dcst;
mod fast;
mod layout;
mod naive;

pub use dcst::{dcst, dcst_fast, idcst, idcst_fast, DcstPlan};
pub use fast::{dct_fast, idct_fast, DctPlan, OpCount};
pub use layout::SubbandLayout;
pub use naive::{dct_naive, idct_naive};

use crate::error::{Error, Result};

pub(crate) fn check_pow2(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(())
}

/// Multiplication count predicted by the closed form for Chen's DCT,
/// `N log2 N - 3N/2 + 4`.
pub fn dct_mult_formula(n: usize) -> f64 {
    let n = n as f64;
    n * n.log2() - 1.5 * n + 4.0
}

/// Multiplication count of the fast DCST predicted by the closed form
/// `(2N + 4) log2 N - 5N + 7`.
pub fn dcst_mult_formula(n: usize) -> f64 {
    let n = n as f64;
    (2.0 * n + 4.0) * n.log2() - 5.0 * n + 7.0
}

/// Addition count of the fast DCST predicted by `(3N + 2) log2 N - 6N + 6`.
pub fn dcst_add_formula(n: usize) -> f64 {
    let n = n as f64;
    (3.0 * n + 2.0) * n.log2() - 6.0 * n + 6.0
}
