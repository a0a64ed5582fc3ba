//! Common interface of the pair codes and the family selector.

use std::fmt;
use std::str::FromStr;

use crate::basecodes::Golomb;
use crate::bitio::{BitReader, BitString, BitWriter};
use crate::ck::CkCodec;
use crate::cminus::{CminusCodec, LimitCodec};
use crate::error::{Error, Result};

/// A prefix code on pairs of nonnegative integers.
pub trait PairCodec {
    fn encode_into(&self, w: &mut BitWriter, pair: (u64, u64)) -> Result<()>;

    fn decode(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)>;

    fn codeword_len(&self, pair: (u64, u64)) -> Result<u64>;

    fn encode(&self, pair: (u64, u64)) -> Result<BitString> {
        let mut w = BitWriter::new();
        self.encode_into(&mut w, pair)?;
        let len = w.bit_len();
        let buf = w.finish();
        let mut r = BitReader::new(&buf);
        let mut out = BitString::new();
        let mut left = len;
        while left > 0 {
            let take = left.min(64) as u32;
            out.push(crate::bitio::Codeword::new(r.read_bits(take)?, take));
            left -= u64::from(take);
        }
        Ok(out)
    }
}

/// `G_k · G_k`: each component coded separately with the Golomb code of order `k`.
#[derive(Debug, Clone, Copy)]
pub struct GolombPairCodec {
    golomb: Golomb,
}

impl GolombPairCodec {
    pub fn new(k: u64) -> Result<Self> {
        Ok(GolombPairCodec {
            golomb: Golomb::new(k)?,
        })
    }
}

impl PairCodec for GolombPairCodec {
    fn encode_into(&self, w: &mut BitWriter, (i, j): (u64, u64)) -> Result<()> {
        self.golomb.encode_into(w, i);
        self.golomb.encode_into(w, j);
        Ok(())
    }

    fn decode(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        let i = self.golomb.decode(r)?;
        let j = self.golomb.decode(r)?;
        Ok((i, j))
    }

    fn codeword_len(&self, (i, j): (u64, u64)) -> Result<u64> {
        Ok(self.golomb.len_of(i) + self.golomb.len_of(j))
    }
}

/// Which pair code to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodeFamily {
    /// `C_k`, optimal at `q = 2^{−1/k}`, `k >= 1`.
    Ck(u64),
    /// `C_{−k}`, optimal at `q = 2^{−k}`, `k >= 2`.
    Cminus(u64),
    /// `C_{−∞}`.
    Limit,
    /// `G_k · G_k`, `k >= 1`.
    GolombPair(u64),
}

impl CodeFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CodeFamily::Ck(k) | CodeFamily::GolombPair(k) if k == 0 => Err(
                Error::InvalidParameter(format!("{} requires k >= 1", self.name())),
            ),
            CodeFamily::Cminus(k) if !(2..=62).contains(&k) => Err(Error::InvalidParameter(
                "cminus requires 2 <= k <= 62".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CodeFamily::Ck(_) => "ck",
            CodeFamily::Cminus(_) => "cminus",
            CodeFamily::Limit => "limit",
            CodeFamily::GolombPair(_) => "golomb",
        }
    }

    pub fn k(&self) -> Option<u64> {
        match *self {
            CodeFamily::Ck(k) | CodeFamily::Cminus(k) | CodeFamily::GolombPair(k) => Some(k),
            CodeFamily::Limit => None,
        }
    }

    /// Builds the codec. `C_k` construction costs `O(k²)`.
    pub fn codec(&self) -> Result<Box<dyn PairCodec + Send + Sync>> {
        self.validate()?;
        Ok(match *self {
            CodeFamily::Ck(k) => Box::new(CkCodec::new(k)?),
            CodeFamily::Cminus(k) => Box::new(CminusCodec::new(k)?),
            CodeFamily::Limit => Box::new(LimitCodec),
            CodeFamily::GolombPair(k) => Box::new(GolombPairCodec::new(k)?),
        })
    }
}

impl fmt::Display for CodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{} k={k}", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// Parses `ck:3`, `cminus:2`, `golomb:4` or `limit`.
impl FromStr for CodeFamily {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (name, k) = match text.split_once(':') {
            Some((name, k)) => {
                let k = k.trim().parse::<u64>().map_err(|_| {
                    Error::InvalidParameter(format!("bad order in family spec {text:?}"))
                })?;
                (name.trim(), Some(k))
            }
            None => (text.trim(), None),
        };
        let family = match (name, k) {
            ("limit", None) => CodeFamily::Limit,
            ("ck", Some(k)) => CodeFamily::Ck(k),
            ("cminus", Some(k)) => CodeFamily::Cminus(k),
            ("golomb", Some(k)) => CodeFamily::GolombPair(k),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown family spec {text:?} (expected ck:K, cminus:K, golomb:K or limit)"
                )))
            }
        };
        family.validate()?;
        Ok(family)
    }
}
