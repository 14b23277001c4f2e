use std::f64::consts::PI;

use crate::error::{check_finite, Error, Result};

// cos(pi * j / (2N)) for j in 0..4N; every kernel argument reduces to one of these.
fn cos_table(n: usize) -> Vec<f64> {
    (0..4 * n).map(|j| (PI * j as f64 / (2 * n) as f64).cos()).collect()
}

/// Orthonormal DCT-II by direct summation.
pub fn dct_naive(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Empty("transform input"));
    }
    check_finite(x)?;
    let table = cos_table(n);
    let m = 4 * n;
    let s0 = (1.0 / n as f64).sqrt();
    let s1 = (2.0 / n as f64).sqrt();
    let mut out = vec![0.0; n];
    for (k, o) in out.iter_mut().enumerate() {
        // index (2i + 1) k mod 4N, advanced by 2k per term
        let (step, mut j) = ((2 * k) % m, k % m);
        let mut acc = 0.0;
        for &v in x {
            acc += v * table[j];
            j += step;
            if j >= m {
                j -= m;
            }
        }
        *o = if k == 0 { s0 * acc } else { s1 * acc };
    }
    Ok(out)
}

/// Orthonormal inverse (DCT-III) by direct summation.
pub fn idct_naive(c: &[f64]) -> Result<Vec<f64>> {
    let n = c.len();
    if n == 0 {
        return Err(Error::Empty("transform input"));
    }
    check_finite(c)?;
    let table = cos_table(n);
    let m = 4 * n;
    let s0 = (1.0 / n as f64).sqrt();
    let s1 = (2.0 / n as f64).sqrt();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let step = (2 * i + 1) % m;
        let mut j = 0;
        let mut acc = 0.0;
        for &v in &c[1..] {
            j += step;
            if j >= m {
                j -= m;
            }
            acc += v * table[j];
        }
        *o = s0 * c[0] + s1 * acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_input() {
        let c = dct_naive(&[1.0; 4]).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-15);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-15));
        let x = idct_naive(&[2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn zeros() {
        assert_eq!(dct_naive(&[0.0; 4]).unwrap(), vec![0.0; 4]);
        assert_eq!(idct_naive(&[0.0; 4]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(dct_naive(&[1.0, f64::NAN]).is_err());
        assert!(idct_naive(&[]).is_err());
        assert!(dct_naive(&[]).is_err());
    }
}
