//! Unary, quasi-uniform and Golomb codes.
//!
//! Ranks are 0-based everywhere: rank 0 is the most probable symbol and gets
//! one of the shorter codewords.

use crate::bitio::{BitReader, BitString, BitWriter, Codeword};
use crate::error::{Error, Result};

/// `⌈log2 n⌉` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    debug_assert!(n >= 1);
    64 - (n - 1).leading_zeros()
}

/// `n` ones followed by a zero.
pub fn unary_encode(n: u64) -> BitString {
    let mut s = BitString::new();
    s.push_ones(n);
    s.push(Codeword::new(0, 1));
    s
}

pub fn unary_decode(r: &mut BitReader<'_>) -> Result<u64> {
    r.read_unary()
}

/// The optimal code for a quasi-uniform source of `n` symbols: `2^m - n`
/// codewords of length `m - 1` followed by `2n - 2^m` of length `m`, with
/// `m = ⌈log2 n⌉`. Codewords are assigned canonically (numerically increasing
/// with rank). `n = 1` is the null code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuasiUniform {
    n: u64,
    long_len: u32,
    short_count: u64,
}

impl QuasiUniform {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "quasi-uniform code needs at least one symbol".into(),
            ));
        }
        let long_len = ceil_log2(n);
        let short_count = if long_len == 64 {
            0u64.wrapping_sub(n)
        } else {
            (1u64 << long_len) - n
        };
        Ok(QuasiUniform {
            n,
            long_len,
            short_count,
        })
    }

    pub fn size(&self) -> u64 {
        self.n
    }

    /// Number of codewords of length `⌊log2 n⌋` when `n` is not a power of two;
    /// zero when it is.
    pub fn short_count(&self) -> u64 {
        self.short_count
    }

    pub fn long_len(&self) -> u32 {
        self.long_len
    }

    pub fn len_of(&self, rank: u64) -> u32 {
        if rank < self.short_count {
            self.long_len - 1
        } else {
            self.long_len
        }
    }

    pub fn encode(&self, rank: u64) -> Result<Codeword> {
        if rank >= self.n {
            return Err(Error::RankOutOfRange { rank, size: self.n });
        }
        Ok(if rank < self.short_count {
            Codeword::new(rank, self.long_len - 1)
        } else {
            Codeword::new(rank + self.short_count, self.long_len)
        })
    }

    pub fn decode(&self, r: &mut BitReader<'_>) -> Result<u64> {
        if self.n == 1 {
            return Ok(0);
        }
        let head = r.read_bits(self.long_len - 1)?;
        if head < self.short_count {
            return Ok(head);
        }
        let v = (head << 1) | u64::from(r.read_bit()?);
        Ok(v - self.short_count)
    }
}

pub fn quasi_uniform_encode(n: u64, rank: u64) -> Result<Codeword> {
    QuasiUniform::new(n)?.encode(rank)
}

pub fn quasi_uniform_decode(n: u64, r: &mut BitReader<'_>) -> Result<u64> {
    QuasiUniform::new(n)?.decode(r)
}

/// Golomb code of order `k`: `Q_k(i mod k)` followed by the unary code of
/// `⌊i/k⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Golomb {
    k: u64,
    binary: QuasiUniform,
}

impl Golomb {
    pub fn new(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("Golomb order must be >= 1".into()));
        }
        Ok(Golomb {
            k,
            binary: QuasiUniform::new(k)?,
        })
    }

    pub fn order(&self) -> u64 {
        self.k
    }

    pub fn len_of(&self, i: u64) -> u64 {
        u64::from(self.binary.len_of(i % self.k)) + i / self.k + 1
    }

    pub fn encode_into(&self, w: &mut BitWriter, i: u64) {
        // i % k < k, so the rank is always in range
        w.write_codeword(self.binary.encode(i % self.k).unwrap());
        w.write_unary(i / self.k);
    }

    pub fn encode(&self, i: u64) -> BitString {
        let mut s = BitString::from(self.binary.encode(i % self.k).unwrap());
        s.append(&unary_encode(i / self.k));
        s
    }

    pub fn decode(&self, r: &mut BitReader<'_>) -> Result<u64> {
        let rem = self.binary.decode(r)?;
        let quot = r.read_unary()?;
        Ok(quot * self.k + rem)
    }
}

pub fn golomb_encode(k: u64, i: u64) -> Result<BitString> {
    Ok(Golomb::new(k)?.encode(i))
}

pub fn golomb_decode(k: u64, r: &mut BitReader<'_>) -> Result<u64> {
    Golomb::new(k)?.decode(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qu(n: u64, rank: u64) -> String {
        quasi_uniform_encode(n, rank).unwrap().to_string()
    }

    #[test]
    fn unary_examples() {
        assert_eq!(unary_encode(0).to_string(), "0");
        assert_eq!(unary_encode(3).to_string(), "1110");
        let ten = unary_encode(10);
        assert_eq!(ten.len(), 11);
        let value = ten.bits().fold(0u64, |acc, b| (acc << 1) | u64::from(b));
        assert_eq!(value, (1 << 11) - 2);
    }

    #[test]
    fn quasi_uniform_examples() {
        assert_eq!(qu(5, 0), "00");
        assert_eq!(qu(5, 3), "110");
        assert_eq!(qu(4, 2), "10");
        assert_eq!(qu(1, 0), "");
        // full Q_5 listing: three short, two long
        let all: Vec<_> = (0..5).map(|r| qu(5, r)).collect();
        assert_eq!(all, ["00", "01", "10", "110", "111"]);
    }

    #[test]
    fn quasi_uniform_rank_out_of_range() {
        assert_eq!(
            quasi_uniform_encode(5, 5),
            Err(Error::RankOutOfRange { rank: 5, size: 5 })
        );
        assert!(QuasiUniform::new(0).is_err());
    }

    #[test]
    fn quasi_uniform_decode_examples() {
        for (n, rank) in [(5, 0), (5, 3), (4, 2), (1, 0)] {
            let mut w = BitWriter::new();
            w.write_codeword(quasi_uniform_encode(n, rank).unwrap());
            let buf = w.finish();
            let mut r = BitReader::new(&buf);
            assert_eq!(quasi_uniform_decode(n, &mut r).unwrap(), rank);
        }
    }

    #[test]
    fn quasi_uniform_kraft_is_exactly_one() {
        for n in 1..=4096u64 {
            let q = QuasiUniform::new(n).unwrap();
            let top = q.long_len();
            // sum of 2^(top - len) must equal 2^top
            let total: u64 = (0..n).map(|r| 1u64 << (top - q.len_of(r))).sum();
            assert_eq!(total, 1u64 << top, "N = {n}");
        }
    }

    #[test]
    fn golomb_examples() {
        assert_eq!(golomb_encode(1, 4).unwrap().to_string(), "11110");
        assert_eq!(golomb_encode(3, 7).unwrap().to_string(), "10110");
        assert_eq!(golomb_encode(2, 0).unwrap().to_string(), "00");
        assert!(golomb_encode(0, 1).is_err());
    }

    #[test]
    fn golomb_roundtrip_exhaustive_small() {
        for k in 1..=64u64 {
            let g = Golomb::new(k).unwrap();
            let mut w = BitWriter::new();
            let values: Vec<u64> = (0..2000).chain([99_999, 100_000]).collect();
            for &i in &values {
                g.encode_into(&mut w, i);
            }
            let buf = w.finish();
            let mut r = BitReader::new(&buf);
            for &i in &values {
                assert_eq!(g.decode(&mut r).unwrap(), i, "k = {k}");
            }
        }
    }

    #[test]
    fn golomb_lengths_non_decreasing() {
        for k in 1..=64u64 {
            let g = Golomb::new(k).unwrap();
            let lens: Vec<u64> = (0..1000).map(|i| g.len_of(i)).collect();
            assert!(lens.windows(2).all(|w| w[0] <= w[1]), "k = {k}");
            for i in [0u64, 5, 17, 999] {
                assert_eq!(g.encode(i).len(), g.len_of(i));
            }
        }
    }
}
