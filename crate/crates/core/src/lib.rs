//! Optimal prefix codes for pairs of independent, identically distributed
//! geometric integers, `P(i, j) = (1 − q)² q^{i+j}`.
//!
//! * [`ck`]: `C_k`, optimal at `q = 2^{−1/k}`.
//! * [`cminus`]: `C_{−k}`, optimal at `q = 2^{−k}`, and the limit code.
//! * [`analysis`]: entropy, average lengths, redundancy and parameter selection.
//! * [`oracle`]: Huffman codes of truncated alphabets as ground truth.

pub mod analysis;
pub mod basecodes;
pub mod bitio;
pub mod canonical;
pub mod ck;
pub mod cli;
pub mod cminus;
pub mod codec;
pub mod error;
pub mod fringe2;
pub mod oracle;

pub use codec::{CodeFamily, PairCodec};
pub use error::{Error, Result};
