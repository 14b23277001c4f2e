//! The asymmetrical autoencoder: a dense encoder, a fixed spectral transform,
//! trainable scaling and hard thresholding, then the inverse transform and a
//! dense decoder.
//!
//! ```text
//! c  = act(W1 x + b1)
//! Q  = DCST(c) / V
//! Q~ = H_T(Q)
//! x^ = W2 IDCST(Q~) + b2
//! ```

mod weights;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::transform::{DcstPlan, DctPlan};

pub use weights::MAGIC as WEIGHTS_MAGIC;

/// Standard 8x8 luminance quantization table, row-major.
pub const JPEG_LUMA: [f64; 64] = [
    16.0, 11.0, 10.0, 16.0, 24.0, 40.0, 51.0, 61.0, //
    12.0, 12.0, 14.0, 19.0, 26.0, 58.0, 60.0, 55.0, //
    14.0, 13.0, 16.0, 24.0, 40.0, 57.0, 69.0, 56.0, //
    14.0, 17.0, 22.0, 29.0, 51.0, 87.0, 80.0, 62.0, //
    18.0, 22.0, 37.0, 56.0, 68.0, 109.0, 103.0, 77.0, //
    24.0, 35.0, 55.0, 64.0, 81.0, 104.0, 113.0, 92.0, //
    49.0, 64.0, 78.0, 87.0, 103.0, 121.0, 120.0, 101.0, //
    72.0, 92.0, 95.0, 98.0, 112.0, 100.0, 103.0, 99.0,
];

/// Row-major indices of an `n x n` matrix in zigzag scan order.
pub fn zigzag_order(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n * n);
    for s in 0..2 * n.saturating_sub(1) + 1 {
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        if s % 2 == 0 {
            // travel up and to the right
            for r in (lo..=hi).rev() {
                out.push(r * n + (s - r));
            }
        } else {
            for r in lo..=hi {
                out.push(r * n + (s - r));
            }
        }
    }
    out
}

/// Zigzag scan of [`JPEG_LUMA`].
pub fn jpeg_zigzag() -> Vec<f64> {
    zigzag_order(8).into_iter().map(|i| JPEG_LUMA[i]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }
}

/// Spectral transform sitting between the encoder and the scaling layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    #[default]
    Dcst,
    Dct,
}

/// All trainable tensors. Matrices are row-major: `w1` is `n x h`, `w2` is
/// `h x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub h: usize,
    pub n: usize,
    pub activation: Activation,
    pub domain: Domain,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub h: usize,
    pub n: usize,
    pub activation: Activation,
    pub domain: Domain,
    /// Thresholds start at `kappa` times the largest warm-up magnitude.
    pub kappa: f64,
    /// Threshold used when no warm-up data is available.
    pub threshold_fallback: f64,
    /// Use the zigzag luminance table for `V` when `n == 64`.
    pub jpeg_init: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            h: 80,
            n: 64,
            activation: Activation::Tanh,
            domain: Domain::Dcst,
            kappa: 0.9,
            threshold_fallback: 0.05,
            jpeg_init: true,
        }
    }
}

/// Thresholded latent coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector {
    pub values: Vec<f64>,
    pub nonzero_count: usize,
}

impl LatentVector {
    pub fn new(values: Vec<f64>) -> Self {
        let nonzero_count = values.iter().filter(|v| **v != 0.0).count();
        Self { values, nonzero_count }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn uniform(rng: &mut ChaCha8Rng, len: usize, bound: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// Seeded parameter initialization.
///
/// Weights are uniform in `±1/sqrt(fan_in)`, biases zero, `V` the zigzag
/// luminance table for `n = 64` (ones otherwise) and `T` the fallback
/// threshold. Use [`calibrate_thresholds`] to set `T` from data.
pub fn init_params(seed: u64, cfg: &ModelConfig) -> Result<ModelParams> {
    if cfg.h == 0 {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    crate::transform::SubbandLayout::new(cfg.n)?;
    if cfg.threshold_fallback < 0.0 || !cfg.threshold_fallback.is_finite() {
        return Err(Error::InvalidParameter("threshold_fallback must be >= 0".into()));
    }
    let (h, n) = (cfg.h, cfg.n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w1 = uniform(&mut rng, n * h, 1.0 / (h as f64).sqrt());
    let w2 = uniform(&mut rng, h * n, 1.0 / (n as f64).sqrt());
    let v = if n == 64 && cfg.jpeg_init { jpeg_zigzag() } else { vec![1.0; n] };
    Ok(ModelParams {
        h,
        n,
        activation: cfg.activation,
        domain: cfg.domain,
        w1,
        b1: vec![0.0; n],
        v,
        t: vec![cfg.threshold_fallback; n],
        w2,
        b2: vec![0.0; h],
    })
}

/// Sets `T_i = kappa * max_b |Q_i(b)|` over the warm-up blocks. Entries that
/// never move off zero keep the current threshold.
pub fn calibrate_thresholds(params: &mut ModelParams, warmup: &[Vec<f64>], kappa: f64) -> Result<()> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter("kappa must be >= 0".into()));
    }
    if warmup.is_empty() {
        return Ok(());
    }
    let model = Model::new(params.clone())?;
    let mut peak = vec![0.0f64; params.n];
    for x in warmup {
        let q = model.scaled(x)?;
        for (p, v) in peak.iter_mut().zip(&q) {
            *p = p.max(v.abs());
        }
    }
    for (t, p) in params.t.iter_mut().zip(&peak) {
        if *p > 0.0 {
            *t = kappa * p;
        }
    }
    Ok(())
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let (h, n) = (self.h, self.n);
        crate::transform::SubbandLayout::new(n)?;
        if h == 0 {
            return Err(Error::InvalidParameter("h must be positive".into()));
        }
        for (name, len, want) in [
            ("w1", self.w1.len(), n * h),
            ("b1", self.b1.len(), n),
            ("v", self.v.len(), n),
            ("t", self.t.len(), n),
            ("w2", self.w2.len(), h * n),
            ("b2", self.b2.len(), h),
        ] {
            if len != want {
                return Err(Error::InvalidParameter(format!("{name} has {len} entries, expected {want}")));
            }
        }
        for tensor in [&self.w1, &self.b1, &self.v, &self.t, &self.w2, &self.b2] {
            check_finite(tensor)?;
        }
        if let Some(i) = self.v.iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter(format!("V[{i}] = {} is not positive", self.v[i])));
        }
        if let Some(i) = self.t.iter().position(|&t| t < 0.0) {
            return Err(Error::InvalidParameter(format!("T[{i}] = {} is negative", self.t[i])));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Spectral {
    Dcst(DcstPlan),
    Dct(DctPlan),
}

impl Spectral {
    fn new(domain: Domain, n: usize) -> Result<Self> {
        Ok(match domain {
            Domain::Dcst => Spectral::Dcst(DcstPlan::new(n)?),
            Domain::Dct => Spectral::Dct(DctPlan::new(n)?),
        })
    }

    fn forward(&self, x: &mut [f64]) {
        match self {
            Spectral::Dcst(p) => p.forward_in_place(x),
            Spectral::Dct(p) => p.forward_in_place(x),
        }
    }

    fn inverse(&self, x: &mut [f64]) {
        match self {
            Spectral::Dcst(p) => p.inverse_in_place(x),
            Spectral::Dct(p) => p.inverse_in_place(x),
        }
    }
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct Trace {
    pub c: Vec<f64>,
    pub spectrum: Vec<f64>,
    pub q: Vec<f64>,
    pub latent: Vec<f64>,
    pub y: Vec<f64>,
    pub x_hat: Vec<f64>,
}

/// Validated parameters together with a prebuilt transform plan.
#[derive(Debug, Clone)]
pub struct Model {
    params: ModelParams,
    spectral: Spectral,
}

pub(crate) fn matvec(w: &[f64], rows: usize, cols: usize, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..rows)
        .map(|r| {
            let row = &w[r * cols..(r + 1) * cols];
            row.iter().zip(x).fold(b[r], |acc, (a, v)| acc + a * v)
        })
        .collect()
}

impl Model {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let spectral = Spectral::new(params.domain, params.n)?;
        Ok(Self { params, spectral })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn into_params(self) -> ModelParams {
        self.params
    }

    /// Mutable access for the optimizer. Callers must keep the invariants
    /// checked by [`ModelParams::validate`].
    pub(crate) fn params_mut(&mut self) -> &mut ModelParams {
        &mut self.params
    }

    pub fn encode_features(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = &self.params;
        check_len(x, p.h)?;
        check_finite(x)?;
        let z = matvec(&p.w1, p.n, p.h, x, &p.b1);
        Ok(z.into_iter().map(|v| p.activation.apply(v)).collect())
    }

    pub fn spectrum(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_len(c, self.params.n)?;
        let mut s = c.to_vec();
        self.spectral.forward(&mut s);
        Ok(s)
    }

    /// Spectrum divided by `V`, before thresholding.
    pub fn scaled(&self, x: &[f64]) -> Result<Vec<f64>> {
        let s = self.spectrum(&self.encode_features(x)?)?;
        Ok(s.iter().zip(&self.params.v).map(|(a, v)| a / v).collect())
    }

    pub fn encoder_forward(&self, x: &[f64]) -> Result<LatentVector> {
        let q = self.scaled(x)?;
        Ok(LatentVector::new(threshold_values(&q, &self.params.t)))
    }

    /// Transform-domain latent back to an `h`-sample block. No inverse
    /// scaling is applied.
    pub fn decoder_forward(&self, latent: &[f64]) -> Result<Vec<f64>> {
        let p = &self.params;
        check_len(latent, p.n)?;
        check_finite(latent)?;
        let mut y = latent.to_vec();
        self.spectral.inverse(&mut y);
        Ok(matvec(&p.w2, p.h, p.n, &y, &p.b2))
    }

    pub fn reconstruct(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.decoder_forward(&self.encoder_forward(x)?.values)
    }

    pub fn trace(&self, x: &[f64]) -> Result<Trace> {
        let p = &self.params;
        let c = self.encode_features(x)?;
        let spectrum = self.spectrum(&c)?;
        let q: Vec<f64> = spectrum.iter().zip(&p.v).map(|(a, v)| a / v).collect();
        let latent = threshold_values(&q, &p.t);
        let mut y = latent.clone();
        self.spectral.inverse(&mut y);
        let x_hat = matvec(&p.w2, p.h, p.n, &y, &p.b2);
        Ok(Trace { c, spectrum, q, latent, y, x_hat })
    }

    pub(crate) fn spectral_forward(&self, x: &mut [f64]) {
        self.spectral.forward(x)
    }

    pub(crate) fn spectral_inverse(&self, x: &mut [f64]) {
        self.spectral.inverse(x)
    }
}

fn threshold_values(q: &[f64], t: &[f64]) -> Vec<f64> {
    q.iter().zip(t).map(|(&q, &t)| if q.abs() > t { q } else { 0.0 }).collect()
}

/// `act(W1 x + b1)`.
pub fn encode_features(x: &[f64], params: &ModelParams) -> Result<Vec<f64>> {
    Model::new(params.clone())?.encode_features(x)
}

/// Elementwise `X_i / V_i`.
pub fn scale(x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_len(v, x.len())?;
    if let Some(i) = v.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter(format!("V[{i}] = {} is not positive", v[i])));
    }
    Ok(x.iter().zip(v).map(|(a, b)| a / b).collect())
}

/// Keeps `Q_i` when `|Q_i| > T_i`, zero otherwise.
pub fn hard_threshold(q: &[f64], t: &[f64]) -> Result<LatentVector> {
    check_len(t, q.len())?;
    if let Some(i) = t.iter().position(|&t| !(t >= 0.0)) {
        return Err(Error::InvalidParameter(format!("T[{i}] = {} is negative", t[i])));
    }
    Ok(LatentVector::new(threshold_values(q, t)))
}

pub fn encoder_forward(x: &[f64], params: &ModelParams) -> Result<LatentVector> {
    Model::new(params.clone())?.encoder_forward(x)
}

pub fn decoder_forward(latent: &LatentVector, params: &ModelParams) -> Result<Vec<f64>> {
    Model::new(params.clone())?.decoder_forward(&latent.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> ModelParams {
        let cfg = ModelConfig { h: 12, n: 8, ..ModelConfig::default() };
        init_params(3, &cfg).unwrap()
    }

    #[test]
    fn zigzag_start() {
        let z = zigzag_order(8);
        assert_eq!(&z[..10], &[0, 1, 8, 16, 9, 2, 3, 10, 17, 24]);
        assert_eq!(z[63], 63);
        let mut sorted = z.clone();
        sorted.sort();
        assert_eq!(sorted, (0..64).collect::<Vec<_>>());
        let v = jpeg_zigzag();
        assert_eq!(v[0], 16.0);
        assert_eq!(v[1], 11.0);
        assert_eq!(v[2], 12.0);
        assert_eq!(v[63], 99.0);
    }

    #[test]
    fn init_shapes_and_fallback() {
        let p = init_params(1, &ModelConfig::default()).unwrap();
        p.validate().unwrap();
        assert_eq!(p.v[..2], [16.0, 11.0]);
        let q = init_params(1, &ModelConfig { n: 32, ..ModelConfig::default() }).unwrap();
        assert!(q.v.iter().all(|&v| v == 1.0));
        assert_eq!(init_params(1, &ModelConfig::default()).unwrap(), p);
        assert_ne!(init_params(2, &ModelConfig::default()).unwrap(), p);
    }

    #[test]
    fn scale_examples() {
        assert_eq!(scale(&[2.0, 4.0], &[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(scale(&[48.0, 22.0], &[16.0, 11.0]).unwrap(), vec![3.0, 2.0]);
        assert!(scale(&[1.0], &[0.0]).is_err());
        assert!(scale(&[1.0], &[-1.0]).is_err());
    }

    #[test]
    fn threshold_examples() {
        let l = hard_threshold(&[0.3, 0.8, -0.8, 0.5], &[0.5; 4]).unwrap();
        assert_eq!(l.values, vec![0.0, 0.8, -0.8, 0.0]);
        assert_eq!(l.nonzero_count, 2);
        assert!(hard_threshold(&[1.0], &[-0.1]).is_err());
    }

    #[test]
    fn zero_weights_give_zero_features() {
        let mut p = small_params();
        p.w1.iter_mut().for_each(|w| *w = 0.0);
        let c = encode_features(&[0.7; 12], &p).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_features() {
        let mut p = small_params();
        p.activation = Activation::Identity;
        p.w1 = (0..8 * 12).map(|k| if k / 12 == k % 12 { 1.0 } else { 0.0 }).collect();
        let mut x = vec![0.0; 12];
        x[0] = 1.0;
        let c = encode_features(&x, &p).unwrap();
        assert_eq!(c[0], 1.0);
        assert!(c[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn large_thresholds_silence_latent() {
        let mut p = small_params();
        p.t = vec![1e9; 8];
        let l = encoder_forward(&[0.5; 12], &p).unwrap();
        assert_eq!(l.nonzero_count, 0);
        let y = decoder_forward(&l, &p).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn calibrated_thresholds_sit_below_peak() {
        let mut p = small_params();
        let blocks: Vec<Vec<f64>> = (0..4).map(|b| (0..12).map(|i| ((i + b) as f64).sin()).collect()).collect();
        calibrate_thresholds(&mut p, &blocks, 0.9).unwrap();
        let m = Model::new(p.clone()).unwrap();
        let mut any = false;
        for x in &blocks {
            any |= m.encoder_forward(x).unwrap().nonzero_count > 0;
        }
        assert!(any);
        assert!(p.t.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn validate_catches_bad_tensors() {
        let mut p = small_params();
        p.v[2] = 0.0;
        assert!(p.validate().is_err());
        let mut p = small_params();
        p.b2.pop();
        assert!(p.validate().is_err());
        let mut p = small_params();
        p.w1[0] = f64::INFINITY;
        assert!(p.validate().is_err());
    }
}
