//! MSB-first bit streams.
//!
//! Bits are packed into bytes starting at the most significant bit; the last
//! partial byte is padded with zero bits. Codewords are handled as fragments of
//! at most 64 bits ([`Codeword`]) or as arbitrarily long [`BitString`]s, which
//! some codes need since their lengths grow linearly with the signature.

use std::fmt;

use crate::error::{Error, Result};

/// A codeword fragment of at most 64 bits. The first transmitted bit is the
/// most significant of the `len` low bits of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Codeword {
    value: u64,
    len: u32,
}

impl Codeword {
    pub const EMPTY: Codeword = Codeword { value: 0, len: 0 };

    /// Panics if `len > 64` or `value` does not fit in `len` bits.
    pub fn new(value: u64, len: u32) -> Self {
        assert!(len <= 64, "codeword fragment longer than 64 bits");
        assert!(
            len == 64 || value >> len == 0,
            "value {value:#b} does not fit in {len} bits"
        );
        Codeword { value, len }
    }

    /// `n` one bits, `n <= 64`.
    pub fn ones(n: u32) -> Self {
        assert!(n <= 64);
        let value = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Codeword { value, len: n }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if (self.value >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A bit sequence of unbounded length, stored as a list of fragments.
#[derive(Debug, Clone, Default)]
pub struct BitString {
    fragments: Vec<Codeword>,
    len: u64,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, cw: Codeword) {
        if !cw.is_empty() {
            self.len += u64::from(cw.len);
            self.fragments.push(cw);
        }
    }

    pub fn push_ones(&mut self, mut n: u64) {
        while n > 0 {
            let take = n.min(64) as u32;
            self.push(Codeword::ones(take));
            n -= u64::from(take);
        }
    }

    pub fn append(&mut self, other: &BitString) {
        for &cw in &other.fragments {
            self.push(cw);
        }
    }

    pub fn fragments(&self) -> &[Codeword] {
        &self.fragments
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.fragments
            .iter()
            .flat_map(|cw| (0..cw.len).rev().map(move |i| (cw.value >> i) & 1 == 1))
    }
}

impl From<Codeword> for BitString {
    fn from(cw: Codeword) -> Self {
        let mut s = BitString::new();
        s.push(cw);
        s
    }
}

impl PartialEq for BitString {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.bits().eq(other.bits())
    }
}

impl Eq for BitString {}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cw in &self.fragments {
            write!(f, "{cw}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct BitWriter {
    buf: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the `len` low bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, len: u32) {
        debug_assert!(len <= 64 && (len == 64 || value >> len == 0));
        let mut remaining = len;
        while remaining > 0 {
            let used = (self.bit_len % 8) as u32;
            if used == 0 {
                self.buf.push(0);
            }
            let free = 8 - used;
            let take = free.min(remaining);
            let chunk = ((value >> (remaining - take)) & ((1u64 << take) - 1)) as u8;
            // buf is non-empty: a byte was pushed above whenever the cursor was aligned
            let last = self.buf.last_mut().unwrap();
            *last |= chunk << (free - take);
            remaining -= take;
            self.bit_len += u64::from(take);
        }
    }

    pub fn write_codeword(&mut self, cw: Codeword) {
        self.write_bits(cw.value, cw.len);
    }

    pub fn write_bit_string(&mut self, bits: &BitString) {
        for &cw in &bits.fragments {
            self.write_codeword(cw);
        }
    }

    pub fn write_ones(&mut self, mut n: u64) {
        while n > 0 && !self.bit_len.is_multiple_of(8) {
            self.write_bits(1, 1);
            n -= 1;
        }
        let bytes = n / 8;
        self.buf.extend(std::iter::repeat_n(0xFF, bytes as usize));
        self.bit_len += bytes * 8;
        n -= bytes * 8;
        if n > 0 {
            self.write_codeword(Codeword::ones(n as u32));
        }
    }

    /// Writes `n` ones followed by a zero.
    pub fn write_unary(&mut self, n: u64) {
        self.write_ones(n);
        self.write_bits(0, 1);
    }

    /// Number of bits written so far (before padding).
    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Returns the byte buffer; the final partial byte is zero-padded.
    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0 }
    }

    /// Bits consumed so far.
    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.data.len() as u64 * 8 - self.pos
    }

    fn ensure(&self, n: u64) -> Result<()> {
        let available = self.remaining();
        if available < n {
            return Err(Error::StreamExhausted {
                needed: n,
                available,
            });
        }
        Ok(())
    }

    /// Reads the next `n <= 64` bits as an MSB-first integer.
    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        assert!(n <= 64, "read_bits supports at most 64 bits");
        self.ensure(u64::from(n))?;
        let mut out = 0u64;
        let mut remaining = n;
        while remaining > 0 {
            let byte = self.data[(self.pos / 8) as usize];
            let used = (self.pos % 8) as u32;
            let avail = 8 - used;
            let take = avail.min(remaining);
            let chunk = (u64::from(byte) >> (avail - take)) & ((1u64 << take) - 1);
            out = if take == 64 {
                chunk
            } else {
                (out << take) | chunk
            };
            remaining -= take;
            self.pos += u64::from(take);
        }
        Ok(out)
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        Ok(self.read_bits(1)? == 1)
    }

    /// Counts ones up to and including the terminating zero.
    pub fn read_unary(&mut self) -> Result<u64> {
        let mut n = 0u64;
        loop {
            if self.pos.is_multiple_of(8) {
                while let Some(&0xFF) = self.data.get((self.pos / 8) as usize) {
                    n += 8;
                    self.pos += 8;
                }
            }
            if !self.read_bit()? {
                return Ok(n);
            }
            n += 1;
        }
    }

    /// True when every remaining bit is zero.
    pub fn rest_is_zero(&self) -> bool {
        let mut probe = self.clone();
        while probe.remaining() > 0 {
            let n = probe.remaining().min(64) as u32;
            if probe.read_bits(n) != Ok(0) {
                return false;
            }
        }
        true
    }
}
