//! Hybrid coding and the `HCDCST01` stream container.
//!
//! All integers are little-endian.
//!
//! ```text
//! magic            8 bytes  "HCDCST01"
//! version          u16
//! block_count      u32
//! H                u16
//! N                u16
//! theta            u8
//! phi              f64
//! 3 x table        u16 alphabet size k,
//!                  k symbols (first as zigzag LEB128, then LEB128 gaps),
//!                  k code lengths as u8
//! 3 x segment      u32 bit length, in table order v1, v2, c2
//! payload          concatenated segments, zero padded to a byte
//! checksum         u64 FNV-1a over all preceding bytes
//! ```

use std::fs;
use std::path::Path;

use super::bits::{BitReader, BitWriter};
use super::huffman::{frequencies, huffman_build, CodeTable};
use super::quantize::QuantizedLatent;
use super::rle::{rle_decode, rle_encode};
use crate::checksum::fnv1a64;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"HCDCST01";
pub const VERSION: u16 = 1;

/// Decoded form of a compressed transmission unit.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedBlockStream {
    pub block_count: u32,
    pub h: u16,
    pub n: u16,
    pub theta: u8,
    pub phi: f64,
    /// Code tables for v1, v2 and c2.
    pub tables: [CodeTable; 3],
    /// Bit length of each coded segment.
    pub segment_bits: [u32; 3],
    /// Packed segments.
    pub payload: Vec<u8>,
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).ok_or(Error::Truncated)?;
        if end > self.buf.len() {
            return Err(Error::Truncated);
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.u8()?;
            v |= ((b & 0x7f) as u64) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(Error::Corrupt("varint longer than 64 bits".into()))
    }
}

fn put_table(out: &mut Vec<u8>, t: &CodeTable) -> Result<()> {
    let k = u16::try_from(t.len()).map_err(|_| Error::InvalidParameter(format!("alphabet of {} symbols exceeds u16", t.len())))?;
    out.extend_from_slice(&k.to_le_bytes());
    let syms = t.symbols();
    put_varint(out, zigzag(syms[0]));
    for w in syms.windows(2) {
        put_varint(out, w[1].wrapping_sub(w[0]) as u64);
    }
    out.extend_from_slice(t.lengths());
    Ok(())
}

fn get_table(c: &mut Cursor<'_>) -> Result<CodeTable> {
    let k = c.u16()? as usize;
    if k == 0 {
        return Err(Error::Corrupt("empty code table".into()));
    }
    let mut syms = Vec::with_capacity(k);
    syms.push(unzigzag(c.varint()?));
    for _ in 1..k {
        let gap = c.varint()?;
        if gap == 0 {
            return Err(Error::Corrupt("repeated symbol".into()));
        }
        let prev = *syms.last().unwrap();
        let next = prev.checked_add_unsigned(gap).ok_or_else(|| Error::Corrupt("symbol overflow".into()))?;
        syms.push(next);
    }
    let lengths = c.take(k)?.to_vec();
    CodeTable::from_lengths(syms, lengths)
}

fn table_bytes(t: &CodeTable) -> usize {
    let mut v = Vec::new();
    put_table(&mut v, t).map(|_| v.len()).unwrap_or(0)
}

impl CompressedBlockStream {
    pub fn payload_bits(&self) -> u64 {
        self.segment_bits.iter().map(|&b| b as u64).sum()
    }

    /// Bytes outside the payload, checksum included.
    pub fn header_bytes(&self) -> usize {
        8 + 2 + 4 + 2 + 2 + 1 + 8 + self.table_bytes() + 3 * 4 + 8
    }

    /// Bytes taken by the three table descriptors.
    pub fn table_bytes(&self) -> usize {
        self.tables.iter().map(table_bytes).sum()
    }

    /// Serialized size, header plus the padded payload.
    pub fn size_bytes(&self) -> usize {
        self.header_bytes() + self.payload_bits().div_ceil(8) as usize
    }

    /// Size in bits used for compression ratios. With `include_tables` off
    /// the table descriptors are left out.
    pub fn compressed_bits(&self, include_tables: bool) -> u64 {
        let mut bytes = self.size_bytes();
        if !include_tables {
            bytes -= self.table_bytes();
        }
        8 * bytes as u64
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.size_bytes());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.block_count.to_le_bytes());
        out.extend_from_slice(&self.h.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.push(self.theta);
        out.extend_from_slice(&self.phi.to_le_bytes());
        for t in &self.tables {
            put_table(&mut out, t)?;
        }
        for b in &self.segment_bits {
            out.extend_from_slice(&b.to_le_bytes());
        }
        let payload_len = self.payload_bits().div_ceil(8) as usize;
        if self.payload.len() != payload_len {
            return Err(Error::Corrupt(format!("payload is {} bytes, expected {payload_len}", self.payload.len())));
        }
        out.extend_from_slice(&self.payload);
        let sum = fnv1a64(&out);
        out.extend_from_slice(&sum.to_le_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() {
            return Err(Error::Truncated);
        }
        if &bytes[..8] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes.len() < 8 + 8 {
            return Err(Error::Truncated);
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().unwrap());
        let computed = fnv1a64(body);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        let mut c = Cursor { buf: body, pos: 8 };
        let version = c.u16()?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let block_count = c.u32()?;
        let h = c.u16()?;
        let n = c.u16()?;
        let theta = c.u8()?;
        let phi = c.f64()?;
        if !(phi > 0.0 && phi.is_finite()) {
            return Err(Error::Corrupt(format!("phi = {phi}")));
        }
        let tables = [get_table(&mut c)?, get_table(&mut c)?, get_table(&mut c)?];
        let segment_bits = [c.u32()?, c.u32()?, c.u32()?];
        let total: u64 = segment_bits.iter().map(|&b| b as u64).sum();
        let payload = c.take(total.div_ceil(8) as usize)?.to_vec();
        if c.pos != body.len() {
            return Err(Error::Corrupt(format!("{} trailing bytes", body.len() - c.pos)));
        }
        Ok(Self { block_count, h, n, theta, phi, tables, segment_bits, payload })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

/// The intermediate lists of the two run-length passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunLists {
    pub v1: Vec<i64>,
    pub c1: Vec<i64>,
    pub v2: Vec<i64>,
    pub c2: Vec<i64>,
}

/// Run-length codes the concatenated blocks, then run-length codes the run
/// counts.
pub fn run_lists(blocks: &[QuantizedLatent]) -> Result<RunLists> {
    let seq: Vec<i64> = blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
    let (v1, c1) = rle_encode(&seq)?;
    let (v2, c2) = rle_encode(&c1)?;
    Ok(RunLists { v1, c1, v2, c2 })
}

/// Two-stage run-length coding followed by one Huffman table per list for
/// v1, v2 and c2.
pub fn hybrid_encode(blocks: &[QuantizedLatent], h: usize, theta: u8, phi: f64) -> Result<CompressedBlockStream> {
    let Some(first) = blocks.first() else {
        return Err(Error::Empty("block set"));
    };
    let n = first.values.len();
    if n == 0 {
        return Err(Error::Empty("block"));
    }
    if let Some(b) = blocks.iter().find(|b| b.values.len() != n) {
        return Err(Error::LengthMismatch { expected: n, actual: b.values.len() });
    }
    let n16 = u16::try_from(n).map_err(|_| Error::InvalidParameter("N exceeds u16".into()))?;
    let h16 = u16::try_from(h).map_err(|_| Error::InvalidParameter("H exceeds u16".into()))?;
    let count = u32::try_from(blocks.len()).map_err(|_| Error::InvalidParameter("too many blocks".into()))?;
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::InvalidParameter(format!("phi = {phi} must be positive")));
    }
    let lists = run_lists(blocks)?;
    let mut payload = BitWriter::new();
    let mut segment_bits = [0u32; 3];
    let mut tables = Vec::with_capacity(3);
    for (k, list) in [&lists.v1, &lists.v2, &lists.c2].into_iter().enumerate() {
        let table = huffman_build(&frequencies(list))?;
        let before = payload.bit_len();
        table.encode_into(list, &mut payload)?;
        segment_bits[k] = u32::try_from(payload.bit_len() - before)
            .map_err(|_| Error::InvalidParameter("segment exceeds u32 bits".into()))?;
        tables.push(table);
    }
    let tables: [CodeTable; 3] = tables.try_into().unwrap();
    Ok(CompressedBlockStream {
        block_count: count,
        h: h16,
        n: n16,
        theta,
        phi,
        tables,
        segment_bits,
        payload: payload.into_bytes(),
    })
}

pub fn hybrid_decode(stream: &CompressedBlockStream) -> Result<Vec<QuantizedLatent>> {
    let mut start = 0u64;
    let mut lists = Vec::with_capacity(3);
    for (t, &bits) in stream.tables.iter().zip(&stream.segment_bits) {
        let mut r = BitReader::window(&stream.payload, start, bits as u64);
        if r.remaining() != bits as u64 {
            return Err(Error::Truncated);
        }
        lists.push(t.decode_all(&mut r)?);
        start += bits as u64;
    }
    let c1 = rle_decode(&lists[1], &lists[2])?;
    let seq = rle_decode(&lists[0], &c1)?;
    let n = stream.n as usize;
    let want = stream.block_count as usize * n;
    if seq.len() != want || n == 0 {
        return Err(Error::Corrupt(format!("decoded {} values, expected {want}", seq.len())));
    }
    Ok(seq.chunks_exact(n).map(|c| QuantizedLatent::new(c.to_vec())).collect())
}
