//! The codes `C_{−k}` (optimal at `q = 2^{−k}`) and their limit `C_{−∞}`.
//!
//! Every pair of signature `s` gets one of two lengths, `Λ_s` or `Λ_s + 1`.
//! `C_{−k}` is realized as the canonical code with exactly that length
//! multiset; within a signature pairs are ranked by ascending first component
//! and the shorter codewords go to the lower ranks.
//!
//! The canonical state is kept as the *deficit* `D = (1 − K)·2^L`, where `K`
//! is the Kraft sum allocated so far and `L` the current length. `D` stays
//! small even when `L` is in the tens of thousands, and the next free
//! codeword at length `L` is `2^L − D`: a long run of ones followed by a short
//! tail.

use crate::basecodes::QuasiUniform;
use crate::bitio::{BitReader, BitWriter};
use crate::codec::PairCodec;
use crate::error::{Error, Result};

/// Lengths used by the `s + 1` pairs of one signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureLengthRow {
    pub s: u64,
    pub lambda: u64,
    pub n_short: u64,
    pub n_long: u64,
}

impl SignatureLengthRow {
    /// Sum of the codeword lengths of the signature.
    pub fn total_len(&self) -> u128 {
        u128::from(self.lambda) * u128::from(self.s + 1) + u128::from(self.n_long)
    }

    pub fn max_len(&self) -> u64 {
        if self.n_long > 0 {
            self.lambda + 1
        } else {
            self.lambda
        }
    }

    /// `(length, count)` blocks, short first.
    pub fn blocks(&self) -> [(u64, u64); 2] {
        [(self.lambda, self.n_short), (self.lambda + 1, self.n_long)]
    }
}

const MAX_K: u64 = 62;

fn check_k(k: u64) -> Result<()> {
    if (2..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "C_-k needs 2 <= k <= {MAX_K}, got {k}"
        )))
    }
}

fn overflow(s: u64) -> Error {
    Error::AllocationOverflow(s)
}

/// Length row of signature `s` in `C_{−k}`.
pub fn signature_length_row(k: u64, s: u64) -> Result<SignatureLengthRow> {
    check_k(k)?;
    let half = 1u64 << (k - 1);
    let full = 1u64 << k;
    if s + 2 <= half {
        // s = 2^i + j − 1 with 0 <= j < 2^i
        let i = u64::from(63 - (s + 1).leading_zeros());
        let j = s + 1 - (1 << i);
        return Ok(SignatureLengthRow {
            s,
            lambda: (s + 2) * (i + 1) - (1 << (i + 1)),
            n_short: (1 << i) - j - 1,
            n_long: 2 * j + 1,
        });
    }
    let t = s - (half - 1);
    let period = full - 1;
    let (l, j) = (t / period, t % period);
    let base = l.checked_mul(period).ok_or(overflow(s))?;
    let lambda = (s + 2)
        .checked_mul(k)
        .and_then(|v| v.checked_sub(full))
        .ok_or(overflow(s))?;
    let (n_short, n_long) = if j + 3 <= half {
        (base + half - j - 1, 2 * j + 1)
    } else if j + 2 == half {
        (base, full - 2)
    } else if j + 4 <= full {
        (base + 3 * half - 2 - j, 2 * j + 2 - full)
    } else if j + 3 == full {
        (base + half + 1, full - 4)
    } else {
        (base + half - 1, full - 1)
    };
    Ok(SignatureLengthRow {
        s,
        lambda,
        n_short,
        n_long,
    })
}

/// Length row of signature `s` in the limit code.
pub fn limit_signature_row(s: u64) -> SignatureLengthRow {
    let t = u64::from(63 - (s + 1).leading_zeros());
    let r = s + 1 - (1 << t);
    // (t − 1)(s + 2) + 2r + 2, written to stay unsigned at t = 0
    let lambda = t * (s + 2) + 2 * r + 2 - (s + 2);
    SignatureLengthRow {
        s,
        lambda,
        n_short: (1 << t) - 1 - r,
        n_long: 2 * r + 1,
    }
}

/// Deficit tracker for a canonical code enumerated in non-decreasing length.
#[derive(Debug, Clone, Copy)]
struct Deficit {
    len: u64,
    d: u128,
}

impl Deficit {
    const START: Deficit = Deficit { len: 0, d: 1 };

    fn extend_to(&mut self, len: u64, s: u64) -> Result<()> {
        let shift = len - self.len;
        if shift > 0 {
            if shift >= 128 || self.d.leading_zeros() < shift as u32 {
                return Err(overflow(s));
            }
            self.d <<= shift;
            self.len = len;
        }
        Ok(())
    }

    fn take(&mut self, count: u64, s: u64) -> Result<()> {
        self.d = self.d.checked_sub(u128::from(count)).ok_or(overflow(s))?;
        Ok(())
    }
}

/// Writes `2^len − x` as a `len`-bit word, `1 <= x <= 2^len`.
fn write_complement(w: &mut BitWriter, len: u64, x: u128) {
    let tail = len.min(64) as u32;
    w.write_ones(len - u64::from(tail));
    let low = !((x - 1) as u64);
    let mask = if tail == 64 {
        u64::MAX
    } else {
        (1u64 << tail) - 1
    };
    w.write_bits(low & mask, tail);
}

/// Canonical realization of `C_{−k}`. Encoding and decoding cost `O(i + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CminusCodec {
    k: u64,
}

impl CminusCodec {
    pub fn new(k: u64) -> Result<Self> {
        check_k(k)?;
        Ok(CminusCodec { k })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn row(&self, s: u64) -> SignatureLengthRow {
        // k is validated and rows are defined for every s reachable by u64 pairs
        signature_length_row(self.k, s).expect("valid k")
    }

    pub fn len_of(&self, (i, j): (u64, u64)) -> Result<u64> {
        let s = i.checked_add(j).ok_or(overflow(u64::MAX))?;
        let row = signature_length_row(self.k, s)?;
        Ok(if i < row.n_short {
            row.lambda
        } else {
            row.lambda + 1
        })
    }

    pub fn write(&self, w: &mut BitWriter, (i, j): (u64, u64)) -> Result<()> {
        let s = i.checked_add(j).ok_or(overflow(u64::MAX))?;
        let mut state = Deficit::START;
        for sig in 0..s {
            for (len, count) in signature_length_row(self.k, sig)?.blocks() {
                if count > 0 {
                    state.extend_to(len, sig)?;
                    state.take(count, sig)?;
                }
            }
        }
        let row = signature_length_row(self.k, s)?;
        let (len, offset) = if i < row.n_short {
            (row.lambda, i)
        } else {
            if row.n_short > 0 {
                state.extend_to(row.lambda, s)?;
                state.take(row.n_short, s)?;
            }
            (row.lambda + 1, i - row.n_short)
        };
        state.extend_to(len, s)?;
        write_complement(w, len, state.d - u128::from(offset));
        Ok(())
    }

    pub fn read(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        let mut state = Deficit::START;
        // u = 2^L − (value of the L bits read so far)
        let mut u: u128 = 1;
        for s in 0u64.. {
            let row = signature_length_row(self.k, s)?;
            for (block, (len, count)) in row.blocks().into_iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let mut need = len - state.len;
                state.extend_to(len, s)?;
                while need > 0 {
                    let take = need.min(32) as u32;
                    let x = u128::from(r.read_bits(take)?);
                    u = (u << take) - x;
                    need -= u64::from(take);
                }
                if u + u128::from(count) > state.d {
                    let offset = (state.d - u) as u64;
                    let i = if block == 0 {
                        offset
                    } else {
                        row.n_short + offset
                    };
                    return Ok((i, s - i));
                }
                state.take(count, s)?;
            }
        }
        unreachable!("signature counter exhausted")
    }
}

impl PairCodec for CminusCodec {
    fn encode_into(&self, w: &mut BitWriter, pair: (u64, u64)) -> Result<()> {
        self.write(w, pair)
    }

    fn decode(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        self.read(r)
    }

    fn codeword_len(&self, pair: (u64, u64)) -> Result<u64> {
        self.len_of(pair)
    }
}

pub fn cminus_encode(k: u64, pair: (u64, u64)) -> Result<crate::bitio::BitString> {
    CminusCodec::new(k)?.encode(pair)
}

pub fn cminus_decode(k: u64, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
    CminusCodec::new(k)?.read(r)
}

/// The limit code: with `s = 2^t − 1 + r`, a pair is sent as a run of
/// `(t−1)(s+1) + 2r + 1` ones followed by `Q_{s+2}(i)`. The last word of
/// `Q_{s+2}` (all ones) is never emitted for a pair; it continues the run
/// into signature `s + 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LimitCodec;

impl LimitCodec {
    fn run_len(s: u64) -> Result<u64> {
        let t = u64::from(63 - s.checked_add(1).ok_or(overflow(s))?.leading_zeros());
        let r = s + 1 - (1 << t);
        t.checked_mul(s + 1)
            .and_then(|v| v.checked_add(2 * r + 1))
            .map(|v| v - (s + 1))
            .ok_or(overflow(s))
    }

    pub fn len_of(&self, (i, j): (u64, u64)) -> Result<u64> {
        let s = i.checked_add(j).ok_or(overflow(u64::MAX))?;
        let q = QuasiUniform::new(s + 2)?;
        Ok(Self::run_len(s)? + u64::from(q.len_of(i)))
    }

    pub fn write(&self, w: &mut BitWriter, (i, j): (u64, u64)) -> Result<()> {
        let s = i.checked_add(j).ok_or(overflow(u64::MAX))?;
        let q = QuasiUniform::new(s.checked_add(2).ok_or(overflow(s))?)?;
        w.write_ones(Self::run_len(s)?);
        w.write_codeword(q.encode(i)?);
        Ok(())
    }

    pub fn read(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        for s in 0u64..u64::MAX - 2 {
            let rank = QuasiUniform::new(s + 2)?.decode(r)?;
            if rank <= s {
                return Ok((rank, s - rank));
            }
        }
        Err(Error::MalformedRun)
    }
}

impl PairCodec for LimitCodec {
    fn encode_into(&self, w: &mut BitWriter, pair: (u64, u64)) -> Result<()> {
        self.write(w, pair)
    }

    fn decode(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        self.read(r)
    }

    fn codeword_len(&self, pair: (u64, u64)) -> Result<u64> {
        self.len_of(pair)
    }
}

pub fn limit_encode(pair: (u64, u64)) -> Result<crate::bitio::BitString> {
    LimitCodec.encode(pair)
}

pub fn limit_decode(r: &mut BitReader<'_>) -> Result<(u64, u64)> {
    LimitCodec.read(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};

    fn row(k: u64, s: u64) -> (u64, u64, u64) {
        let r = signature_length_row(k, s).unwrap();
        (r.lambda, r.n_short, r.n_long)
    }

    #[test]
    fn row_examples() {
        assert_eq!(row(3, 0), (0, 0, 1));
        assert_eq!(row(3, 3), (7, 3, 1));
        assert_eq!(row(2, 2), (4, 3, 0));
        assert_eq!(row(2, 1), (2, 0, 2));
        assert!(signature_length_row(1, 0).is_err());
    }

    #[test]
    fn rows_count_and_order() {
        for k in 2..=8 {
            let mut prev = 0;
            for s in 0..=512 {
                let r = signature_length_row(k, s).unwrap();
                assert_eq!(r.n_short + r.n_long, s + 1, "k = {k}, s = {s}");
                for (len, count) in r.blocks() {
                    if count > 0 {
                        assert!(len >= prev, "k = {k}, s = {s}");
                        prev = len;
                    }
                }
            }
        }
    }

    #[test]
    fn kraft_deficit_is_bounded() {
        for k in 2..=6 {
            let mut sum = BigUint::from(0u32);
            let top = signature_length_row(k, 128).unwrap().lambda + 1;
            for s in 0..=128 {
                for (len, count) in signature_length_row(k, s).unwrap().blocks() {
                    sum += BigUint::from(count) << (top - len) as usize;
                }
            }
            let full = BigUint::from(1u32) << top as usize;
            assert!(sum < full);
            // 1 − K ≤ 130·2^{−Λ_128}
            assert!((full - sum) <= BigUint::from(260u32), "k = {k}");
        }
    }

    #[test]
    fn encode_examples() {
        assert_eq!(cminus_encode(2, (0, 0)).unwrap().to_string(), "0");
        assert_eq!(cminus_encode(3, (0, 0)).unwrap().to_string(), "0");
        assert_eq!(cminus_encode(2, (0, 1)).unwrap().len(), 3);
        assert_eq!(cminus_encode(2, (1, 0)).unwrap().len(), 3);
        assert_eq!(limit_encode((0, 0)).unwrap().to_string(), "0");
        assert_eq!(limit_encode((0, 1)).unwrap().to_string(), "10");
        assert_eq!(limit_encode((1, 0)).unwrap().to_string(), "110");
    }

    #[test]
    fn small_signatures_are_prefix_free_listing() {
        // k = 2 listing through signature 3
        let words: Vec<String> = (0..4u64)
            .flat_map(|s| (0..=s).map(move |i| (i, s - i)))
            .map(|p| cminus_encode(2, p).unwrap().to_string())
            .collect();
        for (a, wa) in words.iter().enumerate() {
            for (b, wb) in words.iter().enumerate() {
                if a != b {
                    assert!(!wb.starts_with(wa.as_str()), "{wa} prefixes {wb}");
                }
            }
        }
    }

    fn roundtrip(codec: &dyn PairCodec, pairs: &[(u64, u64)]) {
        let mut w = BitWriter::new();
        let mut total = 0;
        for &p in pairs {
            codec.encode_into(&mut w, p).unwrap();
            total += codec.codeword_len(p).unwrap();
        }
        assert_eq!(w.bit_len(), total);
        let buf = w.finish();
        let mut r = BitReader::new(&buf);
        for &p in pairs {
            assert_eq!(codec.decode(&mut r).unwrap(), p);
        }
        assert_eq!(r.position(), total);
    }

    #[test]
    fn roundtrip_random_pairs() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let pairs: Vec<(u64, u64)> = (0..200)
            .map(|_| (rng.gen_range(0..=2000), rng.gen_range(0..=2000)))
            .chain((0..6).flat_map(|s| (0..=s).map(move |i| (i, s - i))))
            .collect();
        for k in 2..=6 {
            roundtrip(&CminusCodec::new(k).unwrap(), &pairs);
        }
        roundtrip(&LimitCodec, &pairs);
    }

    #[test]
    fn limit_rows_match_codeword_lengths() {
        for s in 0..=256u64 {
            let row = limit_signature_row(s);
            assert_eq!(row.n_short + row.n_long, s + 1);
            for i in 0..=s {
                let expect = if i < row.n_short {
                    row.lambda
                } else {
                    row.lambda + 1
                };
                assert_eq!(LimitCodec.len_of((i, s - i)).unwrap(), expect, "s = {s}");
            }
        }
    }

    #[test]
    fn small_signatures_match_the_limit_code() {
        for k in 3..=8u64 {
            let codec = CminusCodec::new(k).unwrap();
            for s in 0..=(1u64 << (k - 1)) - 2 {
                for i in 0..=s {
                    assert_eq!(
                        codec.len_of((i, s - i)).unwrap(),
                        LimitCodec.len_of((i, s - i)).unwrap()
                    );
                }
            }
        }
    }
}
