//! Compression and reconstruction-quality figures.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub cr: f64,
    pub prd: f64,
    pub prdn: f64,
    pub rms: f64,
    /// Written as `null` when infinite.
    #[serde(with = "infinite_as_null")]
    pub qs: f64,
    /// Mean number of nonzero latent coefficients per block.
    pub n_coe: f64,
}

impl MetricsReport {
    /// Builds a report from concatenated signals and bit counts.
    pub fn compute(orig: &[f64], rec: &[f64], original_bits: u64, compressed_bits: u64, n_coe: f64) -> Result<Self> {
        let cr = cr(original_bits, compressed_bits)?;
        let prd = prd(orig, rec)?;
        if prd == 0.0 {
            log::warn!("exact reconstruction, quality score is infinite");
        }
        Ok(Self { cr, prd, prdn: prdn(orig, rec)?, rms: rms(orig, rec)?, qs: qs(cr, prd), n_coe })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8}{:>12}", "metric", "value")?;
        for (name, v) in [
            ("CR", self.cr),
            ("PRD", self.prd),
            ("PRDN", self.prdn),
            ("RMS", self.rms),
            ("QS", self.qs),
            ("N_coe", self.n_coe),
        ] {
            writeln!(f, "{name:<8}{v:>12.4}")?;
        }
        Ok(())
    }
}

fn check_pair(orig: &[f64], rec: &[f64]) -> Result<()> {
    if orig.len() != rec.len() {
        return Err(Error::LengthMismatch { expected: orig.len(), actual: rec.len() });
    }
    if orig.is_empty() {
        return Err(Error::Empty("signal"));
    }
    Ok(())
}

fn sq_err(orig: &[f64], rec: &[f64]) -> f64 {
    orig.iter().zip(rec).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Original over compressed size.
pub fn cr(original_bits: u64, compressed_bits: u64) -> Result<f64> {
    if compressed_bits == 0 {
        return Err(Error::InvalidParameter("compressed size is zero".into()));
    }
    if original_bits == 0 {
        return Err(Error::InvalidParameter("original size is zero".into()));
    }
    Ok(original_bits as f64 / compressed_bits as f64)
}

/// Root-mean-square error times 100.
pub fn rms(orig: &[f64], rec: &[f64]) -> Result<f64> {
    check_pair(orig, rec)?;
    Ok((sq_err(orig, rec) / orig.len() as f64).sqrt() * 100.0)
}

/// Percent root-mean-square difference.
pub fn prd(orig: &[f64], rec: &[f64]) -> Result<f64> {
    check_pair(orig, rec)?;
    let den: f64 = orig.iter().map(|a| a * a).sum();
    if den == 0.0 {
        return Err(Error::InvalidParameter("original signal is all zero".into()));
    }
    Ok((sq_err(orig, rec) / den).sqrt() * 100.0)
}

/// PRD with the mean of the original removed from the denominator.
pub fn prdn(orig: &[f64], rec: &[f64]) -> Result<f64> {
    check_pair(orig, rec)?;
    let mean = orig.iter().sum::<f64>() / orig.len() as f64;
    let den: f64 = orig.iter().map(|a| (a - mean) * (a - mean)).sum();
    if den == 0.0 {
        return Err(Error::InvalidParameter("original signal is constant".into()));
    }
    Ok((sq_err(orig, rec) / den).sqrt() * 100.0)
}

/// Quality score `cr / prd`. A perfect reconstruction scores infinity.
pub fn qs(cr: f64, prd: f64) -> f64 {
    if prd == 0.0 {
        f64::INFINITY
    } else {
        cr / prd
    }
}
