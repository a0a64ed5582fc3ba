//! Huffman codes of truncated alphabets, used as ground truth for optimality
//! and for checking the structure of optimal trees.
//!
//! The pairs of signature `s <= S` are kept as individual symbols of weight
//! `q^s`; everything beyond `S` is lumped into a single tail symbol.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_SYMBOLS: u64 = 5_000_000;
pub const DEFAULT_MAX_Q: f64 = 0.95;

/// `Σ_{s>S} (s+1) q^s`.
pub fn tail_weight(q: f64, s_max: u64) -> f64 {
    let s1 = (s_max + 1) as f64;
    q.powf(s1) * (s1 * (1.0 - q) + 1.0) / (1.0 - q).powi(2)
}

#[derive(Debug, Clone)]
pub struct TruncatedSource {
    pub q: f64,
    /// Largest signature kept explicitly.
    pub s_max: u64,
    /// Non-increasing weights, tail symbol included.
    pub weights: Vec<f64>,
    /// Signature of each weight; `None` marks the tail symbol.
    pub signatures: Vec<Option<u64>>,
    pub tail_index: usize,
}

impl TruncatedSource {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn tail(&self) -> f64 {
        self.weights[self.tail_index]
    }

    /// `(1 − q)^{−2}`
    pub fn total(&self) -> f64 {
        (1.0 - self.q).powi(-2)
    }
}

pub fn build_truncated_source(q: f64, eps: f64) -> Result<TruncatedSource> {
    build_truncated_source_with(q, eps, DEFAULT_MAX_SYMBOLS, DEFAULT_MAX_Q)
}

pub fn build_truncated_source_with(
    q: f64,
    eps: f64,
    max_symbols: u64,
    max_q: f64,
) -> Result<TruncatedSource> {
    if !(q > 0.0 && q < 1.0 && q <= max_q) {
        return Err(Error::QOutOfRange(q));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let norm = (1.0 - q).powi(2);
    let mut s_max = 0u64;
    while tail_weight(q, s_max) * norm >= eps {
        s_max += 1;
    }
    let symbols = (s_max + 1) * (s_max + 2) / 2 + 1;
    if symbols > max_symbols {
        return Err(Error::SourceTooLarge {
            symbols,
            cap: max_symbols,
        });
    }
    let mut weights = Vec::with_capacity(symbols as usize);
    let mut signatures = Vec::with_capacity(symbols as usize);
    let mut w = 1.0;
    for s in 0..=s_max {
        for _ in 0..=s {
            weights.push(w);
            signatures.push(Some(s));
        }
        w *= q;
    }
    let tail = tail_weight(q, s_max);
    let tail_index = weights.partition_point(|&x| x >= tail);
    weights.insert(tail_index, tail);
    signatures.insert(tail_index, None);
    Ok(TruncatedSource {
        q,
        s_max,
        weights,
        signatures,
        tail_index,
    })
}

/// Optimal codeword lengths for non-increasing positive weights.
///
/// Two-queue construction: leaves are consumed from the lightest end and
/// merged nodes are queued in creation order. On equal weights the leaf is
/// taken first, and among equal leaves the one with the higher index.
pub fn huffman_lengths(weights: &[f64]) -> Result<Vec<u32>> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::EmptySource);
    }
    if weights
        .iter()
        .any(|&w| w.is_nan() || w <= 0.0 || !w.is_finite())
    {
        return Err(Error::InvalidSource("weights must be positive and finite"));
    }
    if weights.windows(2).any(|p| p[0] < p[1]) {
        return Err(Error::InvalidSource("weights must be non-increasing"));
    }
    if n == 1 {
        return Ok(vec![0]);
    }
    let mut weight: Vec<f64> = weights.to_vec();
    weight.reserve(n - 1);
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut leaves: VecDeque<usize> = (0..n).rev().collect();
    let mut merged: VecDeque<usize> = VecDeque::with_capacity(n);
    let pop = |leaves: &mut VecDeque<usize>, merged: &mut VecDeque<usize>, weight: &[f64]| {
        match (leaves.front(), merged.front()) {
            (Some(&a), Some(&b)) if weight[b] < weight[a] => merged.pop_front(),
            (Some(_), _) => leaves.pop_front(),
            (None, _) => merged.pop_front(),
        }
        .expect("at least two nodes remain")
    };
    while leaves.len() + merged.len() > 1 {
        let a = pop(&mut leaves, &mut merged, &weight);
        let b = pop(&mut leaves, &mut merged, &weight);
        let node = weight.len();
        weight.push(weight[a] + weight[b]);
        parent[a] = node;
        parent[b] = node;
        merged.push_back(node);
    }
    let mut depth = vec![0u32; 2 * n - 1];
    for v in (0..2 * n - 2).rev() {
        depth[v] = depth[parent[v]] + 1;
    }
    depth.truncate(n);
    Ok(depth)
}

/// Exact test of `Σ 2^{−len} = 1`.
pub fn kraft_is_exact(lengths: &[u32]) -> bool {
    let Some(&deepest) = lengths.iter().max() else {
        return false;
    };
    let mut count = vec![0u64; deepest as usize + 1];
    for &l in lengths {
        count[l as usize] += 1;
    }
    for level in (1..=deepest as usize).rev() {
        if !count[level].is_multiple_of(2) {
            return false;
        }
        count[level - 1] += count[level] / 2;
    }
    count[0] == 1
}

/// Huffman code of a truncated source.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub source: TruncatedSource,
    pub lengths: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    /// Average length in bits per pair.
    pub value: f64,
    /// `eps·(tail depth + 2)`; a heuristic, not a bound.
    pub uncertainty: f64,
    pub s_max: u64,
    pub alphabet: usize,
}

impl OracleRun {
    pub fn new(q: f64, eps: f64) -> Result<Self> {
        let source = build_truncated_source(q, eps)?;
        let lengths = huffman_lengths(&source.weights)?;
        Ok(OracleRun { source, lengths })
    }

    pub fn estimate(&self, eps: f64) -> OracleEstimate {
        let cost: f64 = self
            .source
            .weights
            .iter()
            .zip(&self.lengths)
            .map(|(w, &l)| w * f64::from(l))
            .sum();
        let tail_depth = self.lengths[self.source.tail_index];
        OracleEstimate {
            value: cost * (1.0 - self.source.q).powi(2),
            uncertainty: eps * f64::from(tail_depth + 2),
            s_max: self.source.s_max,
            alphabet: self.source.len(),
        }
    }

    /// Lengths of the pairs of each signature `0..=S`; the tail is left out.
    pub fn lengths_by_signature(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.source.s_max as usize + 1];
        for (sig, &l) in self.source.signatures.iter().zip(&self.lengths) {
            if let Some(s) = sig {
                out[*s as usize].push(l);
            }
        }
        out
    }

    /// Signatures up to which the truncation is assumed not to distort the tree.
    pub fn safe_limit(&self) -> u64 {
        self.source.s_max / 2
    }
}

pub fn oracle_optimal_avg_len(q: f64, eps: f64) -> Result<OracleEstimate> {
    Ok(OracleRun::new(q, eps)?.estimate(eps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoLevelReport {
    /// Signatures whose lengths span more than two consecutive levels.
    pub witnesses: Vec<u64>,
}

impl TwoLevelReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Checks that every signature `s <= s_max_checked` occupies at most two
/// consecutive levels.
pub fn two_level_check(by_signature: &[Vec<u32>], s_max_checked: u64) -> TwoLevelReport {
    let witnesses = by_signature
        .iter()
        .enumerate()
        .take(s_max_checked as usize + 1)
        .filter(|(_, lens)| {
            let lo = lens.iter().min();
            let hi = lens.iter().max();
            matches!((lo, hi), (Some(lo), Some(hi)) if hi - lo > 1)
        })
        .map(|(s, _)| s as u64)
        .collect();
    TwoLevelReport { witnesses }
}

/// Largest number of empty levels between the deepest leaf of signature `s`
/// and the shallowest leaf of `s + 1`, over the upper half of
/// `0..=s_max_checked` (the structure is only claimed for large `s`).
pub fn max_gap(by_signature: &[Vec<u32>], s_max_checked: u64) -> u32 {
    let last = (s_max_checked as usize).min(by_signature.len().saturating_sub(1));
    (last / 2..last)
        .filter_map(|s| {
            let deepest = by_signature[s].iter().max()?;
            let next = by_signature[s + 1].iter().min()?;
            Some(next.saturating_sub(deepest + 1))
        })
        .max()
        .unwrap_or(0)
}

/// Gap allowed for large signatures: `⌊log2(1/q)⌋`.
pub fn gap_bound(q: f64) -> u32 {
    (1.0 / q).log2().floor() as u32
}
