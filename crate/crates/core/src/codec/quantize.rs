use crate::error::{check_finite, Error, Result};

/// Largest magnitude a quantized value may take by default.
pub const DEFAULT_CAP: i64 = 1 << 40;

/// Integer-converted latent coefficients of one block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantizedLatent {
    pub values: Vec<i64>,
}

impl QuantizedLatent {
    pub fn new(values: Vec<i64>) -> Self {
        Self { values }
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0).count()
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::InvalidParameter(format!("phi = {phi} must be positive")));
    }
    Ok(())
}

/// Step between adjacent reconstruction levels, `phi / 10^theta`.
pub fn step(phi: f64, theta: u8) -> f64 {
    phi / 10f64.powi(theta as i32)
}

/// `round(10^theta * q / phi)` with ties away from zero.
pub fn quantize_latent(latent: &[f64], phi: f64, theta: u8) -> Result<QuantizedLatent> {
    quantize_latent_capped(latent, phi, theta, DEFAULT_CAP)
}

pub fn quantize_latent_capped(latent: &[f64], phi: f64, theta: u8, cap: i64) -> Result<QuantizedLatent> {
    check_phi(phi)?;
    check_finite(latent)?;
    let scale = 10f64.powi(theta as i32);
    let values = latent
        .iter()
        .map(|&q| {
            let r = (scale * q / phi).round();
            if r.abs() > cap as f64 {
                Err(Error::Overflow { value: r, cap })
            } else {
                Ok(r as i64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantizedLatent { values })
}

/// `value * phi / 10^theta`.
pub fn dequantize_latent(q: &QuantizedLatent, phi: f64, theta: u8) -> Result<Vec<f64>> {
    check_phi(phi)?;
    let scale = 10f64.powi(theta as i32);
    Ok(q.values.iter().map(|&v| v as f64 * phi / scale).collect())
}
