//! Canonical prefix codes over a short list of length blocks.

use crate::bitio::{BitReader, Codeword};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Block {
    len: u32,
    count: u64,
    first_value: u64,
    first_rank: u64,
}

/// Canonical code for symbols ranked 0.., where the lengths are given as
/// consecutive `(length, count)` blocks in non-decreasing length order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalCode {
    blocks: Vec<Block>,
    size: u64,
}

impl CanonicalCode {
    /// Empty blocks are skipped. Lengths must not decrease across non-empty
    /// blocks and must fit in 64 bits; the Kraft sum must not exceed one.
    pub fn from_blocks(blocks: impl IntoIterator<Item = (u32, u64)>) -> Result<Self> {
        let mut out: Vec<Block> = Vec::new();
        let mut next_value: u128 = 0;
        let mut prev_len = 0u32;
        let mut rank = 0u64;
        for (len, count) in blocks {
            if count == 0 {
                continue;
            }
            if len > 64 || len < prev_len {
                return Err(Error::InvalidParameter(format!(
                    "canonical block lengths must be non-decreasing and <= 64 (got {len})"
                )));
            }
            next_value <<= len - prev_len;
            if next_value + u128::from(count) > 1u128 << len {
                return Err(Error::InvalidParameter(
                    "canonical blocks violate the Kraft inequality".into(),
                ));
            }
            out.push(Block {
                len,
                count,
                first_value: next_value as u64,
                first_rank: rank,
            });
            next_value += u128::from(count);
            prev_len = len;
            rank += count;
        }
        Ok(CanonicalCode {
            blocks: out,
            size: rank,
        })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    fn block_of(&self, rank: u64) -> Option<&Block> {
        self.blocks
            .iter()
            .find(|b| rank >= b.first_rank && rank < b.first_rank + b.count)
    }

    pub fn len_of(&self, rank: u64) -> Option<u32> {
        self.block_of(rank).map(|b| b.len)
    }

    pub fn encode(&self, rank: u64) -> Result<Codeword> {
        let b = self.block_of(rank).ok_or(Error::RankOutOfRange {
            rank,
            size: self.size,
        })?;
        Ok(Codeword::new(b.first_value + (rank - b.first_rank), b.len))
    }

    pub fn decode(&self, r: &mut BitReader<'_>) -> Result<u64> {
        let mut value = 0u64;
        let mut have = 0u32;
        for b in &self.blocks {
            if b.len > have {
                let extra = b.len - have;
                let bits = r.read_bits(extra)?;
                value = if extra == 64 {
                    bits
                } else {
                    (value << extra) | bits
                };
                have = b.len;
            }
            if value >= b.first_value && value - b.first_value < b.count {
                return Ok(b.first_rank + (value - b.first_value));
            }
        }
        Err(Error::InvalidParameter(
            "bit pattern is not a codeword of this (incomplete) code".into(),
        ))
    }
}
