//! Binary weights container.
//!
//! ```text
//! "AEDCST01"          8 bytes
//! H                   u32 LE
//! N                   u32 LE
//! flags               u8   bit 0: identity activation, bit 1: DCT domain
//! W1 b1 V T W2 b2     f64 LE, row-major
//! checksum            u64 LE, FNV-1a over every preceding byte
//! ```

use std::fs;
use std::path::Path;

use super::{Activation, Domain, ModelParams};
use crate::checksum::fnv1a64;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"AEDCST01";

const FLAG_IDENTITY: u8 = 1;
const FLAG_DCT: u8 = 2;

impl ModelParams {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.validate()?;
        let floats = self.w1.len() + self.b1.len() + self.v.len() + self.t.len() + self.w2.len() + self.b2.len();
        let mut out = Vec::with_capacity(8 + 9 + 8 * floats + 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.h as u32).to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        let mut flags = 0u8;
        if self.activation == Activation::Identity {
            flags |= FLAG_IDENTITY;
        }
        if self.domain == Domain::Dct {
            flags |= FLAG_DCT;
        }
        out.push(flags);
        for tensor in [&self.w1, &self.b1, &self.v, &self.t, &self.w2, &self.b2] {
            for v in tensor.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let sum = fnv1a64(&out);
        out.extend_from_slice(&sum.to_le_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 + 9 + 8 {
            return Err(Error::Truncated);
        }
        if &bytes[..8] != MAGIC {
            return Err(Error::BadMagic);
        }
        let body = &bytes[..bytes.len() - 8];
        let stored = u64::from_le_bytes(bytes[bytes.len() - 8..].try_into().unwrap());
        let computed = fnv1a64(body);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        let h = u32::from_le_bytes(body[8..12].try_into().unwrap()) as usize;
        let n = u32::from_le_bytes(body[12..16].try_into().unwrap()) as usize;
        let flags = body[16];
        if flags & !(FLAG_IDENTITY | FLAG_DCT) != 0 {
            return Err(Error::Corrupt(format!("unknown flag bits {flags:#04x}")));
        }
        let want = (2 * n * h + 3 * n + h)
            .checked_mul(8)
            .ok_or_else(|| Error::Corrupt("dimensions overflow".into()))?;
        let data = &body[17..];
        if data.len() != want {
            return Err(Error::Corrupt(format!("payload is {} bytes, expected {want}", data.len())));
        }
        let mut floats = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mut take = |k: usize| -> Vec<f64> { floats.by_ref().take(k).collect() };
        let params = ModelParams {
            h,
            n,
            activation: if flags & FLAG_IDENTITY != 0 { Activation::Identity } else { Activation::Tanh },
            domain: if flags & FLAG_DCT != 0 { Domain::Dct } else { Domain::Dcst },
            w1: take(n * h),
            b1: take(n),
            v: take(n),
            t: take(n),
            w2: take(h * n),
            b2: take(h),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
