//! Integer conversion, two-stage run-length coding, canonical Huffman coding
//! and the binary stream container.

mod bits;
mod container;
mod huffman;
mod quantize;
mod rle;

pub use bits::{BitReader, BitWriter};
pub use container::{hybrid_decode, hybrid_encode, run_lists, CompressedBlockStream, RunLists, MAGIC, VERSION};
pub use huffman::{code_lengths, frequencies, huffman_build, huffman_decode, huffman_encode, CodeTable, MAX_CODE_LEN};
pub use quantize::{dequantize_latent, quantize_latent, quantize_latent_capped, step, QuantizedLatent, DEFAULT_CAP};
pub use rle::{rle_decode, rle_encode};

use crate::error::Result;
use crate::model::Model;

/// Encoder path for one block: latent, then integer conversion.
pub fn compress_block(x: &[f64], model: &Model, phi: f64, theta: u8) -> Result<QuantizedLatent> {
    quantize_latent(&model.encoder_forward(x)?.values, phi, theta)
}

/// Decoder path for one block: back to reals, then the decoder (which applies
/// the inverse transform itself).
pub fn decompress_block(q: &QuantizedLatent, model: &Model, phi: f64, theta: u8) -> Result<Vec<f64>> {
    model.decoder_forward(&dequantize_latent(q, phi, theta)?)
}
