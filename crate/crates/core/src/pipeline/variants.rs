use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::codec::{compress_block, decompress_block, dequantize_latent, hybrid_decode, hybrid_encode, quantize_latent, CompressedBlockStream, QuantizedLatent};
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::model::{Domain, Model, ModelConfig, ModelParams};
use crate::training::{train, TrainConfig, TrainOutcome};
use crate::transform::DcstPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    AeDcst,
    AeDct,
    StandardDcst,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ae-dcst" => Ok(Variant::AeDcst),
            "ae-dct" => Ok(Variant::AeDct),
            "standard-dcst" => Ok(Variant::StandardDcst),
            _ => Err(Error::InvalidParameter(format!("unknown variant {s:?}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::AeDcst => "ae-dcst",
            Variant::AeDct => "ae-dct",
            Variant::StandardDcst => "standard-dcst",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodecConfig {
    pub phi: f64,
    pub theta: u8,
    /// Width of one original sample for compression ratios.
    pub bits_per_sample: u32,
    /// Count the Huffman table descriptors in the compressed size.
    pub include_tables: bool,
    /// Block length of the fixed-transform baseline.
    pub standard_block: usize,
    /// Share of baseline coefficients kept, largest magnitudes first.
    pub standard_keep: f64,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self { phi: 3.5, theta: 3, bits_per_sample: 32, include_tables: true, standard_block: 64, standard_keep: 0.6 }
    }
}

impl CodecConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(Error::InvalidParameter("phi must be positive".into()));
        }
        if ![16, 32, 64].contains(&self.bits_per_sample) {
            return Err(Error::InvalidParameter("bits_per_sample must be 16, 32 or 64".into()));
        }
        if !(self.standard_keep > 0.0 && self.standard_keep <= 1.0) {
            return Err(Error::InvalidParameter("standard_keep must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Every tunable of an end-to-end run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub codec: CodecConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        cfg.train.validate()?;
        cfg.codec.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Compressed test set plus everything needed to score it.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: MetricsReport,
    pub stream: CompressedBlockStream,
    pub quantized: Vec<QuantizedLatent>,
    pub original: Vec<f64>,
    pub reconstruction: Vec<f64>,
}

fn score(orig: Vec<f64>, rec: Vec<f64>, stream: CompressedBlockStream, quantized: Vec<QuantizedLatent>, codec: &CodecConfig) -> Result<Evaluation> {
    let original_bits = codec.bits_per_sample as u64 * orig.len() as u64;
    let n_coe = quantized.iter().map(|q| q.nonzero_count()).sum::<usize>() as f64 / quantized.len() as f64;
    let report = MetricsReport::compute(&orig, &rec, original_bits, stream.compressed_bits(codec.include_tables), n_coe)?;
    Ok(Evaluation { report, stream, quantized, original: orig, reconstruction: rec })
}

/// Compresses `blocks` with a trained model, decodes the serialized stream
/// and scores the reconstruction.
pub fn evaluate_model(model: &Model, blocks: &[Vec<f64>], codec: &CodecConfig) -> Result<Evaluation> {
    codec.validate()?;
    if blocks.is_empty() {
        return Err(Error::Empty("evaluation blocks"));
    }
    let q = blocks.iter().map(|x| compress_block(x, model, codec.phi, codec.theta)).collect::<Result<Vec<_>>>()?;
    let stream = hybrid_encode(&q, model.params().h, codec.theta, codec.phi)?;
    let decoded = hybrid_decode(&CompressedBlockStream::from_bytes(&stream.to_bytes()?)?)?;
    let mut rec = Vec::with_capacity(blocks.len() * model.params().h);
    for d in &decoded {
        rec.extend(decompress_block(d, model, codec.phi, codec.theta)?);
    }
    score(blocks.concat(), rec, stream, decoded, codec)
}

/// Zeroes all but the `keep` largest-magnitude entries; ties go to the lower
/// index.
pub fn keep_largest(x: &mut [f64], keep: usize) {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    for &i in &idx[keep.min(x.len())..] {
        x[i] = 0.0;
    }
}

/// Fixed-transform baseline: the sample stream is re-blocked to
/// `codec.standard_block`, transformed, truncated to the largest
/// coefficients, quantized and hybrid coded.
pub fn standard_dcst(samples: &[f64], codec: &CodecConfig) -> Result<Evaluation> {
    codec.validate()?;
    let n = codec.standard_block;
    let plan = DcstPlan::new(n)?;
    let keep = (codec.standard_keep * n as f64).round() as usize;
    let blocks: Vec<&[f64]> = samples.chunks_exact(n).collect();
    if blocks.is_empty() {
        return Err(Error::Empty("baseline blocks"));
    }
    let mut q = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let mut x = plan.forward(b)?;
        keep_largest(&mut x, keep);
        q.push(quantize_latent(&x, codec.phi, codec.theta)?);
    }
    let stream = hybrid_encode(&q, n, codec.theta, codec.phi)?;
    let decoded = hybrid_decode(&CompressedBlockStream::from_bytes(&stream.to_bytes()?)?)?;
    let mut rec = Vec::with_capacity(blocks.len() * n);
    for d in &decoded {
        rec.extend(plan.inverse(&dequantize_latent(d, codec.phi, codec.theta)?)?);
    }
    score(blocks.concat(), rec, stream, decoded, codec)
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub variant: Variant,
    pub evaluation: Evaluation,
    /// Present for the learned variants.
    pub training: Option<TrainOutcome>,
}

impl VariantResult {
    pub fn params(&self) -> Option<&ModelParams> {
        self.training.as_ref().map(|t| &t.params)
    }
}

/// Trains (where applicable) on the training split and scores the test split.
pub fn run_variant(variant: Variant, data: &Dataset, cfg: &RunConfig) -> Result<VariantResult> {
    if data.test.is_empty() {
        return Err(Error::Empty("test split"));
    }
    match variant {
        Variant::StandardDcst => {
            let evaluation = standard_dcst(&data.test_samples(), &cfg.codec)?;
            Ok(VariantResult { variant, evaluation, training: None })
        }
        Variant::AeDcst | Variant::AeDct => {
            let domain = if variant == Variant::AeDct { Domain::Dct } else { Domain::Dcst };
            let model_cfg = ModelConfig { domain, ..cfg.model };
            let outcome = train(&data.train, &model_cfg, &cfg.train)?;
            let model = Model::new(outcome.params.clone())?;
            let evaluation = evaluate_model(&model, &data.test, &cfg.codec)?;
            Ok(VariantResult { variant, evaluation, training: Some(outcome) })
        }
    }
}
