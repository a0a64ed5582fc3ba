//! The code `C_k`, optimal for pairs of geometric integers with `q = 2^{−1/k}`.
//!
//! A pair `(i, j)` is sent as the top-code word of `(i mod k, j mod k)`
//! followed by the unary codes of `⌊i/k⌋` and `⌊j/k⌋`.

use crate::bitio::{BitReader, BitString, BitWriter};
use crate::codec::PairCodec;
use crate::error::Result;
use crate::fringe2::TopCode;

#[derive(Debug, Clone)]
pub struct CkCodec {
    k: u64,
    top: TopCode,
}

impl CkCodec {
    pub fn new(k: u64) -> Result<Self> {
        Ok(CkCodec {
            k,
            top: TopCode::new(k)?,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn top(&self) -> &TopCode {
        &self.top
    }

    pub fn len_of(&self, (i, j): (u64, u64)) -> u64 {
        let k = self.k;
        u64::from(self.top.len_of(i % k, j % k)) + 2 + i / k + j / k
    }

    pub fn write(&self, w: &mut BitWriter, (i, j): (u64, u64)) {
        let k = self.k;
        w.write_codeword(self.top.encode(i % k, j % k));
        w.write_unary(i / k);
        w.write_unary(j / k);
    }

    pub fn read(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        let (a, b) = self.top.decode(r)?;
        let hi_i = r.read_unary()?;
        let hi_j = r.read_unary()?;
        Ok((hi_i * self.k + a, hi_j * self.k + b))
    }
}

impl PairCodec for CkCodec {
    fn encode_into(&self, w: &mut BitWriter, pair: (u64, u64)) -> Result<()> {
        self.write(w, pair);
        Ok(())
    }

    fn decode(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        self.read(r)
    }

    fn codeword_len(&self, pair: (u64, u64)) -> Result<u64> {
        Ok(self.len_of(pair))
    }
}

pub fn ck_encode(codec: &CkCodec, pair: (u64, u64)) -> BitString {
    // writing into memory cannot fail
    codec.encode(pair).expect("in-memory encoding")
}

pub fn ck_decode(codec: &CkCodec, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
    codec.read(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basecodes::Golomb;
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};

    fn enc(k: u64, pair: (u64, u64)) -> String {
        ck_encode(&CkCodec::new(k).unwrap(), pair).to_string()
    }

    #[test]
    fn examples() {
        assert_eq!(enc(1, (2, 1)), "11010");
        assert_eq!(enc(3, (0, 0)), "00000");
        assert_eq!(enc(3, (4, 1)), "100100");
        for (k, pair) in [(1, (2, 1)), (3, (0, 0)), (3, (4, 1))] {
            let codec = CkCodec::new(k).unwrap();
            let mut w = BitWriter::new();
            codec.write(&mut w, pair);
            let buf = w.finish();
            assert_eq!(ck_decode(&codec, &mut BitReader::new(&buf)).unwrap(), pair);
        }
    }

    #[test]
    fn roundtrip_random() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for k in 1..=32u64 {
            let codec = CkCodec::new(k).unwrap();
            let pairs: Vec<(u64, u64)> = (0..300)
                .map(|_| (rng.gen_range(0..=10_000), rng.gen_range(0..=10_000)))
                .collect();
            let mut w = BitWriter::new();
            let mut total = 0;
            for &p in &pairs {
                codec.write(&mut w, p);
                total += codec.len_of(p);
            }
            assert_eq!(w.bit_len(), total);
            let buf = w.finish();
            let mut r = BitReader::new(&buf);
            for &p in &pairs {
                assert_eq!(codec.read(&mut r).unwrap(), p, "k = {k}");
            }
            assert_eq!(r.position(), total);
        }
    }

    #[test]
    fn truncated_kraft_sum_approaches_one() {
        for k in 1..=6u64 {
            let codec = CkCodec::new(k).unwrap();
            let b = 64 * k;
            let max_len = (0..b)
                .flat_map(|i| (0..b).map(move |j| (i, j)))
                .map(|p| codec.len_of(p))
                .max()
                .unwrap();
            let mut sum = BigUint::from(0u32);
            for i in 0..b {
                for j in 0..b {
                    sum += BigUint::from(1u32) << (max_len - codec.len_of((i, j))) as usize;
                }
            }
            let full = BigUint::from(1u32) << max_len as usize;
            assert!(sum < full);
            // 1 − sum ≤ 2·2^{−B/k} = 2^{−63}
            let deficit = full.clone() - sum;
            assert!(deficit << 63usize <= full, "k = {k}");
        }
    }

    #[test]
    fn c2_has_the_lengths_of_golomb_pairs() {
        let codec = CkCodec::new(2).unwrap();
        let g = Golomb::new(2).unwrap();
        let mut a: Vec<u64> = Vec::new();
        let mut b: Vec<u64> = Vec::new();
        for i in 0..40 {
            for j in 0..40 {
                a.push(codec.len_of((i, j)));
                b.push(g.len_of(i) + g.len_of(j));
            }
        }
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn top_lengths_stay_within_three_levels() {
        for k in 1..=40u64 {
            let codec = CkCodec::new(k).unwrap();
            let m = codec.top().params().big_m;
            for (i, j) in codec.top().symbols() {
                let l = codec.top().len_of(i, j);
                assert!(l + 1 >= m && l <= m + 1);
            }
        }
    }
}
