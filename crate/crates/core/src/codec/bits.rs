use crate::error::{Error, Result};

/// MSB-first bit packer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitWriter {
    bytes: Vec<u8>,
    len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `n` bits of `code`, most significant first.
    pub fn write(&mut self, code: u64, n: u8) {
        for i in (0..n).rev() {
            let bit = (code >> i) & 1;
            let off = (self.len % 8) as u8;
            if off == 0 {
                self.bytes.push(0);
            }
            if bit == 1 {
                *self.bytes.last_mut().unwrap() |= 0x80 >> off;
            }
            self.len += 1;
        }
    }

    /// Appends every bit of `other`.
    pub fn append(&mut self, other: &BitWriter) {
        let mut r = BitReader::new(&other.bytes, other.len);
        while let Ok(b) = r.read_bit() {
            self.write(b as u64, 1);
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.len
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    end: u64,
}

impl<'a> BitReader<'a> {
    /// Reads at most `len` bits of `bytes`.
    pub fn new(bytes: &'a [u8], len: u64) -> Self {
        Self { bytes, pos: 0, end: len.min(bytes.len() as u64 * 8) }
    }

    /// Reader over `[start, start + len)` bits of `bytes`.
    pub fn window(bytes: &'a [u8], start: u64, len: u64) -> Self {
        let end = (start + len).min(bytes.len() as u64 * 8);
        Self { bytes, pos: start.min(end), end }
    }

    pub fn read_bit(&mut self) -> Result<u8> {
        if self.pos >= self.end {
            return Err(Error::Truncated);
        }
        let b = (self.bytes[(self.pos / 8) as usize] >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        Ok(b)
    }

    pub fn remaining(&self) -> u64 {
        self.end - self.pos
    }
}
