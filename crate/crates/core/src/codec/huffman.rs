//! Canonical Huffman codes over `i64` symbols.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use super::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};

/// Longest codeword the container can describe.
pub const MAX_CODE_LEN: u8 = 64;

/// Canonical prefix code. Symbols are kept sorted ascending; codes follow
/// from the lengths alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    symbols: Vec<i64>,
    lengths: Vec<u8>,
    codes: Vec<u64>,
    index: HashMap<i64, usize>,
    // canonical decoding tables indexed by code length
    first_code: Vec<u64>,
    count: Vec<u64>,
    offset: Vec<usize>,
    by_code: Vec<usize>,
}

impl CodeTable {
    /// Rebuilds a table from `(symbol, code length)` pairs.
    pub fn from_lengths(symbols: Vec<i64>, lengths: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Corrupt("empty code table".into()));
        }
        if symbols.len() != lengths.len() {
            return Err(Error::Corrupt("symbol and length lists differ in size".into()));
        }
        if symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Corrupt("symbols not strictly ascending".into()));
        }
        if lengths.iter().any(|&l| l == 0 || l > MAX_CODE_LEN) {
            return Err(Error::Corrupt("code length out of range".into()));
        }
        // Kraft inequality, exact for lengths up to 64
        let kraft: u128 = lengths.iter().map(|&l| 1u128 << (MAX_CODE_LEN - l)).sum();
        if kraft > 1u128 << MAX_CODE_LEN {
            return Err(Error::Corrupt("code lengths violate the Kraft inequality".into()));
        }
        let mut by_code: Vec<usize> = (0..symbols.len()).collect();
        by_code.sort_by_key(|&i| (lengths[i], symbols[i]));
        let maxlen = *lengths.iter().max().unwrap() as usize;
        let mut count = vec![0u64; maxlen + 1];
        for &l in &lengths {
            count[l as usize] += 1;
        }
        let mut first_code = vec![0u64; maxlen + 1];
        let mut offset = vec![0usize; maxlen + 1];
        let mut code = 0u64;
        let mut seen = 0usize;
        for l in 1..=maxlen {
            first_code[l] = code;
            offset[l] = seen;
            seen += count[l] as usize;
            code = code.wrapping_add(count[l]);
            if l < maxlen {
                code <<= 1;
            }
        }
        let mut codes = vec![0u64; symbols.len()];
        for (rank, &i) in by_code.iter().enumerate() {
            let l = lengths[i] as usize;
            codes[i] = first_code[l] + (rank - offset[l]) as u64;
        }
        let index = symbols.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self { symbols, lengths, codes, index, first_code, count, offset, by_code })
    }

    pub fn symbols(&self) -> &[i64] {
        &self.symbols
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `(code, length)` for `symbol`.
    pub fn code(&self, symbol: i64) -> Option<(u64, u8)> {
        self.index.get(&symbol).map(|&i| (self.codes[i], self.lengths[i]))
    }

    pub fn encode_into(&self, seq: &[i64], out: &mut BitWriter) -> Result<()> {
        for &s in seq {
            let (c, l) = self.code(s).ok_or(Error::UnknownSymbol(s))?;
            out.write(c, l);
        }
        Ok(())
    }

    pub fn decode_one(&self, r: &mut BitReader<'_>) -> Result<i64> {
        let mut code = 0u64;
        for l in 1..self.count.len() {
            code = (code << 1) | r.read_bit()? as u64;
            let k = code.wrapping_sub(self.first_code[l]);
            if code >= self.first_code[l] && k < self.count[l] {
                return Ok(self.symbols[self.by_code[self.offset[l] + k as usize]]);
            }
        }
        Err(Error::Corrupt("bit pattern matches no codeword".into()))
    }

    /// Decodes symbols until the reader is exhausted.
    pub fn decode_all(&self, r: &mut BitReader<'_>) -> Result<Vec<i64>> {
        let mut out = Vec::new();
        while r.remaining() > 0 {
            out.push(self.decode_one(r)?);
        }
        Ok(out)
    }

    /// Sum of codeword lengths over `seq`.
    pub fn encoded_bits(&self, seq: &[i64]) -> Result<u64> {
        seq.iter()
            .map(|&s| self.code(s).map(|(_, l)| l as u64).ok_or(Error::UnknownSymbol(s)))
            .sum()
    }
}

/// Symbol frequencies of `seq`, sorted by symbol.
pub fn frequencies(seq: &[i64]) -> Vec<(i64, u64)> {
    let mut m = BTreeMap::new();
    for &s in seq {
        *m.entry(s).or_insert(0u64) += 1;
    }
    m.into_iter().collect()
}

/// Optimal code lengths for the given frequencies. Ties are broken by node
/// creation order, so the result is deterministic.
pub fn code_lengths(freqs: &[(i64, u64)]) -> Result<Vec<u8>> {
    let n = freqs.len();
    if n == 0 {
        return Err(Error::Empty("huffman alphabet"));
    }
    if n == 1 {
        return Ok(vec![1]);
    }
    // node ids: leaves 0..n, internal nodes after
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        freqs.iter().enumerate().map(|(i, &(_, f))| Reverse((f.max(1), i))).collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((fa, a)) = heap.pop().unwrap();
        let Reverse((fb, b)) = heap.pop().unwrap();
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((fa + fb, next)));
        next += 1;
    }
    let root = next - 1;
    let mut depth = vec![0u32; 2 * n - 1];
    for i in (0..root).rev() {
        depth[i] = depth[parent[i]] + 1;
    }
    let mut out = Vec::with_capacity(n);
    for &d in &depth[..n] {
        if d > MAX_CODE_LEN as u32 {
            return Err(Error::InvalidParameter(format!("code length {d} exceeds {MAX_CODE_LEN}")));
        }
        out.push(d as u8);
    }
    Ok(out)
}

/// Builds a canonical table from `(symbol, frequency)` pairs.
pub fn huffman_build(freqs: &[(i64, u64)]) -> Result<CodeTable> {
    let mut sorted = freqs.to_vec();
    sorted.sort_by_key(|&(s, _)| s);
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidParameter("duplicate symbol in frequency list".into()));
    }
    let lengths = code_lengths(&sorted)?;
    CodeTable::from_lengths(sorted.into_iter().map(|(s, _)| s).collect(), lengths)
}

pub fn huffman_encode(seq: &[i64], table: &CodeTable) -> Result<BitWriter> {
    let mut w = BitWriter::new();
    table.encode_into(seq, &mut w)?;
    Ok(w)
}

/// Decodes exactly `count` symbols from the first `bit_len` bits of `bytes`.
pub fn huffman_decode(bytes: &[u8], bit_len: u64, count: usize, table: &CodeTable) -> Result<Vec<i64>> {
    let mut r = BitReader::new(bytes, bit_len);
    (0..count).map(|_| table.decode_one(&mut r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_symbol() {
        let t = huffman_build(&[(42, 5)]).unwrap();
        assert_eq!(t.lengths(), &[1]);
        let w = huffman_encode(&[42, 42, 42], &t).unwrap();
        assert_eq!(w.bit_len(), 3);
        assert_eq!(huffman_decode(w.bytes(), 3, 3, &t).unwrap(), vec![42, 42, 42]);
    }

    #[test]
    fn frequent_symbol_shortest() {
        let t = huffman_build(&[(0, 3), (1, 1), (2, 1)]).unwrap();
        let l0 = t.code(0).unwrap().1;
        assert!(l0 < t.code(1).unwrap().1 && l0 < t.code(2).unwrap().1);
        assert_eq!(l0, 1);
    }

    #[test]
    fn canonical_codes() {
        let t = CodeTable::from_lengths(vec![-1, 3, 7, 9], vec![2, 1, 3, 3]).unwrap();
        assert_eq!(t.code(3), Some((0b0, 1)));
        assert_eq!(t.code(-1), Some((0b10, 2)));
        assert_eq!(t.code(7), Some((0b110, 3)));
        assert_eq!(t.code(9), Some((0b111, 3)));
    }

    #[test]
    fn errors() {
        let t = huffman_build(&[(1, 2), (2, 2)]).unwrap();
        assert!(matches!(huffman_encode(&[3], &t), Err(Error::UnknownSymbol(3))));
        assert!(matches!(huffman_decode(&[0], 1, 2, &t), Err(Error::Truncated)));
        assert!(CodeTable::from_lengths(vec![1, 2, 3], vec![1, 1, 1]).is_err());
        assert!(CodeTable::from_lengths(vec![2, 1], vec![1, 1]).is_err());
        assert!(huffman_build(&[]).is_err());
    }
}
