//! Data ingestion, synthetic signals, baseline variants and end-to-end runs.

mod dataset;
mod synth;
mod variants;

pub use dataset::{ingest, prepare, read_column, Dataset, DatasetSpec, Delimiter, Normalization, INT_SCALE};
pub use synth::{generate_synthetic, SyntheticSpec, Tone};
pub use variants::{evaluate_model, keep_largest, run_variant, standard_dcst, CodecConfig, Evaluation, RunConfig, Variant, VariantResult};
