//! Run-length plus Huffman coding of quantized latents, with per-part sizes.
use aedcst::codec::{hybrid_decode, hybrid_encode, quantize_latent, run_lists, CompressedBlockStream};

fn main() -> aedcst::Result<()> {
    let (phi, theta) = (3.5, 3);
    let latents: Vec<Vec<f64>> = (0..8)
        .map(|b| (0..64).map(|i| if (i + b) % 5 == 0 { 0.02 * ((i * 7 + b) % 11) as f64 - 0.1 } else { 0.0 }).collect())
        .collect();
    let q = latents.iter().map(|l| quantize_latent(l, phi, theta)).collect::<aedcst::Result<Vec<_>>>()?;
    let lists = run_lists(&q)?;
    println!("v1 {} symbols, v2 {} symbols, c2 {} symbols", lists.v1.len(), lists.v2.len(), lists.c2.len());

    let stream = hybrid_encode(&q, 80, theta, phi)?;
    let bytes = stream.to_bytes()?;
    println!(
        "header {} B, tables {} B, payload {} bits, file {} B",
        stream.header_bytes() - stream.table_bytes(),
        stream.table_bytes(),
        stream.payload_bits(),
        bytes.len()
    );
    let back = hybrid_decode(&CompressedBlockStream::from_bytes(&bytes)?)?;
    assert_eq!(back, q);
    println!("decoded {} blocks, identical", back.len());
    Ok(())
}
