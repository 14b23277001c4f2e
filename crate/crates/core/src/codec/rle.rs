use crate::error::{Error, Result};

/// Maximal runs of `seq` as `(values, counts)`.
pub fn rle_encode(seq: &[i64]) -> Result<(Vec<i64>, Vec<i64>)> {
    let Some(&first) = seq.first() else {
        return Err(Error::Empty("run-length input"));
    };
    let mut values = vec![first];
    let mut counts = vec![1i64];
    for &s in &seq[1..] {
        if s == *values.last().unwrap() {
            *counts.last_mut().unwrap() += 1;
        } else {
            values.push(s);
            counts.push(1);
        }
    }
    Ok((values, counts))
}

pub fn rle_decode(values: &[i64], counts: &[i64]) -> Result<Vec<i64>> {
    if values.len() != counts.len() {
        return Err(Error::Corrupt(format!("{} run values but {} counts", values.len(), counts.len())));
    }
    let mut total = 0usize;
    for &c in counts {
        if c < 1 {
            return Err(Error::Corrupt(format!("run count {c} is not positive")));
        }
        total = total
            .checked_add(c as usize)
            .filter(|t| *t <= 1 << 40)
            .ok_or_else(|| Error::Corrupt("run lengths too large".into()))?;
    }
    let mut out = Vec::with_capacity(total);
    for (&v, &c) in values.iter().zip(counts) {
        out.extend(std::iter::repeat(v).take(c as usize));
    }
    Ok(out)
}
