//! Optimal trees of fringe thickness at most two for 4-uniform finite sources.
//!
//! A full binary tree with `N` leaves and depth spread at most two is, up to
//! profile equivalence, one of the trees `T(σ, c)`: with `m = ⌈log2 N⌉` and
//! `M = m − σ` it has `2^M − N + c` leaves at depth `M − 1`, `2N − 2^M − 3c`
//! at depth `M` and `2c` at depth `M + 1`. Stepping `c` by one moves a sibling
//! pair down one level, so the cost change `D(σ, c)` only involves three
//! weights, and the sign of `D` along the `≺` ordering of the trees is
//! monotone. That makes the set of optimal trees an interval of `≺`.

mod top;

use std::cmp::Ordering;
use std::fmt::Debug;

pub use top::{delta_poly, top_code_params, top_code_table, TopCode, TopCodeParams};

use crate::basecodes::ceil_log2;
use crate::error::{Error, Result};

/// A symbol weight. Floating-point weights compare with a relative tolerance;
/// integer weights (rationals over a common denominator) compare exactly.
pub trait Weight: Copy + Debug + PartialEq {
    fn zero() -> Self;
    fn plus(self, other: Self) -> Self;
    fn times(self, n: u64) -> Self;
    fn compare(self, other: Self) -> Ordering;
    fn to_f64(self) -> f64;
}

/// Relative tolerance used when comparing floating-point weight sums.
pub const REL_TOLERANCE: f64 = 1e-12;

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn times(self, n: u64) -> Self {
        self * n as f64
    }
    fn compare(self, other: Self) -> Ordering {
        let scale = self.abs().max(other.abs());
        if (self - other).abs() <= REL_TOLERANCE * scale {
            Ordering::Equal
        } else if self < other {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Weight for u64 {
    fn zero() -> Self {
        0
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn times(self, n: u64) -> Self {
        self * n
    }
    fn compare(self, other: Self) -> Ordering {
        self.cmp(&other)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Positive weights in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSource<W> {
    weights: Vec<W>,
}

impl<W: Weight> WeightedSource<W> {
    pub fn new(weights: Vec<W>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSource("no weights"));
        }
        if weights
            .iter()
            .any(|w| w.compare(W::zero()) != Ordering::Greater)
        {
            return Err(Error::InvalidSource("weights must be positive"));
        }
        if weights
            .windows(2)
            .any(|p| p[0].compare(p[1]) == Ordering::Less)
        {
            return Err(Error::InvalidSource("weights must be non-increasing"));
        }
        Ok(WeightedSource { weights })
    }

    pub fn len(&self) -> u64 {
        self.weights.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    /// Weight of the `i`-th heaviest symbol, 1-based.
    fn p(&self, i: u64) -> W {
        self.weights[(i - 1) as usize]
    }

    pub fn total(&self) -> W {
        self.weights.iter().fold(W::zero(), |acc, &w| acc.plus(w))
    }

    pub fn is_four_uniform(&self) -> bool {
        let first = self.weights[0];
        let last = self.weights[self.weights.len() - 1];
        first.compare(last.times(4)) != Ordering::Greater
    }
}

/// Profile `(n_{M−1}, n_M, n_{M+1})` of the tree `T(σ, c)` on `N` leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompactProfile {
    pub n: u64,
    pub sigma: u8,
    pub c: u64,
    /// `M = ⌈log2 N⌉ − σ`.
    pub big_m: u32,
    pub counts: [u64; 3],
}

impl CompactProfile {
    /// Non-empty `(depth, leaf count)` levels, shallowest first.
    pub fn levels(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (self.big_m + i as u32 - 1, n))
    }

    /// Exact check of `Σ n_ℓ 2^{−ℓ} = 1`.
    pub fn kraft_is_one(&self) -> bool {
        let [a, b, c] = self.counts.map(u128::from);
        a * 4 + b * 2 + c == 1u128 << (self.big_m + 1)
    }

    /// Codeword length of the symbol of 0-based rank `rank`.
    pub fn len_of(&self, rank: u64) -> u32 {
        let [a, b, _] = self.counts;
        if rank < a {
            self.big_m - 1
        } else if rank < a + b {
            self.big_m
        } else {
            self.big_m + 1
        }
    }
}

/// `(ccmin(σ), ccmax(σ))`, or `None` when `σ = 1` is impossible (`N = 1`).
pub fn c_bounds(sigma: u8, n: u64) -> Option<(u64, u64)> {
    let m = ceil_log2(n);
    if u32::from(sigma) > m || sigma > 1 {
        return None;
    }
    let pow = 1u64 << (m - u32::from(sigma));
    let min = if sigma == 1 { n - pow } else { 0 };
    let max = (2 * n - pow) / 3;
    Some((min, max))
}

pub fn profile_from(sigma: u8, c: u64, n: u64) -> Result<CompactProfile> {
    if n == 0 {
        return Err(Error::InvalidSource("no symbols"));
    }
    let (min, max) = c_bounds(sigma, n).ok_or(Error::COutOfRange {
        sigma,
        c,
        n,
        min: 0,
        max: 0,
    })?;
    if c < min || c > max {
        return Err(Error::COutOfRange {
            sigma,
            c,
            n,
            min,
            max,
        });
    }
    let big_m = ceil_log2(n) - u32::from(sigma);
    let pow = 1u64 << big_m;
    let counts = [pow + c - n, 2 * n - pow - 3 * c, 2 * c];
    Ok(CompactProfile {
        n,
        sigma,
        c,
        big_m,
        counts,
    })
}

/// Cost `Σ depth · weight` of `T(σ, c)`, heavier weights on shallower leaves.
pub fn tree_cost<W: Weight>(src: &WeightedSource<W>, profile: &CompactProfile) -> W {
    src.weights
        .iter()
        .enumerate()
        .fold(W::zero(), |acc, (rank, &w)| {
            acc.plus(w.times(u64::from(profile.len_of(rank as u64))))
        })
}

fn check_delta_range(src_len: u64, sigma: u8, c: u64) -> Result<u32> {
    let (min, max) = c_bounds(sigma, src_len).ok_or(Error::COutOfRange {
        sigma,
        c,
        n: src_len,
        min: 0,
        max: 0,
    })?;
    if c <= min || c > max {
        return Err(Error::COutOfRange {
            sigma,
            c,
            n: src_len,
            min: min + 1,
            max,
        });
    }
    Ok(ceil_log2(src_len) - u32::from(sigma))
}

fn delta_terms<W: Weight>(src: &WeightedSource<W>, sigma: u8, c: u64) -> Result<(W, W)> {
    let n = src.len();
    let big_m = check_delta_range(n, sigma, c)?;
    let gained = src.p(n - 2 * c + 1).plus(src.p(n - 2 * c + 2));
    let lost = src.p((1u64 << big_m) + c - n);
    Ok((gained, lost))
}

/// `D(σ, c) = cost T(σ, c) − cost T(σ, c − 1)
///          = p_{N−2c+1} + p_{N−2c+2} − p_{2^M−N+c}` (1-based `p`).
pub fn delta_sc<W: Weight>(src: &WeightedSource<W>, sigma: u8, c: u64) -> Result<f64> {
    let (gained, lost) = delta_terms(src, sigma, c)?;
    Ok(gained.to_f64() - lost.to_f64())
}

/// Sign of [`delta_sc`], decided exactly for integer weights and with
/// [`REL_TOLERANCE`] for floating-point weights.
pub fn delta_sign<W: Weight>(src: &WeightedSource<W>, sigma: u8, c: u64) -> Result<Ordering> {
    let (gained, lost) = delta_terms(src, sigma, c)?;
    Ok(gained.compare(lost))
}

/// The trees `T(σ, c)` of an `N`-leaf source in `≺` order: `σ = 1` by
/// decreasing `c`, then `σ = 0` by increasing `c`. The quasi-uniform tree,
/// which is both `(1, ccmin(1))` and `(0, 0)`, appears once, as `(0, 0)`.
pub fn tree_order(n: u64) -> Vec<(u8, u64)> {
    let mut out = Vec::new();
    if let Some((min, max)) = c_bounds(1, n) {
        out.extend((min + 1..=max).rev().map(|c| (1u8, c)));
    }
    let (_, max0) = c_bounds(0, n).expect("sigma = 0 is always valid");
    out.extend((0..=max0).map(|c| (0u8, c)));
    out
}

/// Position of `(σ, c)` in [`tree_order`], identifying `(1, ccmin(1))` with
/// `(0, 0)`.
pub fn order_position(n: u64, sigma: u8, c: u64) -> Option<usize> {
    let (min, max) = c_bounds(sigma, n)?;
    if c < min || c > max {
        return None;
    }
    let ones = c_bounds(1, n).map_or(0, |(lo, hi)| hi.saturating_sub(lo));
    Some(match sigma {
        1 => (max - c) as usize,
        _ => (ones + c) as usize,
    })
}

/// Optimal interval `[(σ_*, c_*), (σ^*, c^*)]` of the `≺` order.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalRange<W> {
    pub lower: (u8, u64),
    pub upper: (u8, u64),
    /// Cost of every tree in the range.
    pub cost: W,
    /// One entry per step between consecutive trees of [`tree_order`]: the
    /// sign of the cost change (−1, 0, 1).
    pub signs: Vec<i8>,
}

impl<W> OptimalRange<W> {
    /// True when `(σ, c)` lies inside the range (for a source of `n` symbols).
    pub fn contains(&self, n: u64, sigma: u8, c: u64) -> bool {
        let (Some(lo), Some(hi), Some(x)) = (
            order_position(n, self.lower.0, self.lower.1),
            order_position(n, self.upper.0, self.upper.1),
            order_position(n, sigma, c),
        ) else {
            return false;
        };
        lo <= x && x <= hi
    }
}

fn sign_of(o: Ordering) -> i8 {
    match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Sign sequence of the cost changes along the `≺` order, labelled by the
/// `(σ, c)` whose `D` produced each entry.
pub fn sign_sequence<W: Weight>(src: &WeightedSource<W>) -> Result<Vec<((u8, u64), i8)>> {
    let n = src.len();
    let mut out = Vec::new();
    if let Some((min, max)) = c_bounds(1, n) {
        for c in (min + 1..=max).rev() {
            out.push(((1, c), -sign_of(delta_sign(src, 1, c)?)));
        }
    }
    let (_, max0) = c_bounds(0, n).expect("sigma = 0 is always valid");
    for c in 1..=max0 {
        out.push(((0, c), sign_of(delta_sign(src, 0, c)?)));
    }
    Ok(out)
}

/// Selects the optimal fringe-≤2 trees from the sign sequence: the range
/// starts right after the last negative step and ends right before the first
/// positive one.
///
/// The caller guarantees that the source has an optimal tree of fringe
/// thickness at most two; some 4-uniform sources do not, and that is not
/// detected here.
pub fn fringe2_optimal_range<W: Weight>(src: &WeightedSource<W>) -> Result<OptimalRange<W>> {
    if !src.is_four_uniform() {
        let w = src.weights();
        return Err(Error::NotFourUniform {
            ratio: w[0].to_f64() / w[w.len() - 1].to_f64(),
        });
    }
    let n = src.len();
    let seq = sign_sequence(src)?;
    let order = tree_order(n);

    let lower = match seq.iter().rposition(|&(_, s)| s < 0) {
        None => order[0],
        Some(i) => {
            let ((sigma, c), _) = seq[i];
            (sigma, c - u64::from(sigma))
        }
    };
    let upper = match seq.iter().position(|&(_, s)| s > 0) {
        None => order[order.len() - 1],
        Some(i) => {
            let ((sigma, c), _) = seq[i];
            (sigma, c - 1 + u64::from(sigma))
        }
    };
    let profile = profile_from(lower.0, lower.1, n)?;
    Ok(OptimalRange {
        lower,
        upper,
        cost: tree_cost(src, &profile),
        signs: seq.into_iter().map(|(_, s)| s).collect(),
    })
}
