//! Entropy, average code lengths, redundancy, crossovers and parameter
//! selection. Averages are in bits per pair; redundancies are per integer
//! symbol, `½·avg − H(q)`.

use std::sync::OnceLock;

use crate::basecodes::{ceil_log2, Golomb, QuasiUniform};
use crate::ck::CkCodec;
use crate::cminus::{limit_signature_row, signature_length_row};
use crate::codec::CodeFamily;
use crate::error::{Error, Result};
use crate::fringe2::top_code_params;

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::QOutOfRange(q))
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Entropy of the geometric distribution `(1 − q) q^i`, in bits per integer.
pub fn entropy_per_symbol(q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(binary_entropy(q) / (1.0 - q))
}

/// Average length of `C_k` under an arbitrary `q`, closed form.
pub fn avg_len_ck(q: f64, k: u64) -> Result<f64> {
    check_q(q)?;
    let p = top_code_params(k)?;
    let (kf, j, r) = (k as f64, p.j as f64, p.r as f64);
    let qk = q.powf(kf);
    let qk1 = qk * q;
    let v = 1.0 - qk1
        + (1.0 - q) * (qk1 * (kf - j - 1.0) + j)
        + (1.0 - q).powi(2) * (qk * (2.0 * r + p.delta_j as f64) - r);
    Ok(f64::from(p.big_m) + 1.0 + q.powf(j) * v / (1.0 - qk).powi(2))
}

/// Average length of `C_k` at its own parameter `q = 2^{−1/k}`, using the
/// specialized form.
pub fn avg_len_ck_dyadic(k: u64) -> Result<f64> {
    let p = top_code_params(k)?;
    let (q, kf, j) = (p.q, k as f64, p.j as f64);
    let v =
        1.0 + (1.0 - q) * (q * kf + (2.0 - q) * j) + (1.0 - q).powi(2) * (1.0 + p.delta_j as f64);
    Ok(f64::from(p.big_m) + 1.0 + 2.0 * q.powf(j) * v)
}

/// Average length of the Golomb code of order `k`, per integer.
pub fn avg_len_golomb(q: f64, k: u64) -> Result<f64> {
    check_q(q)?;
    let binary = QuasiUniform::new(k)?;
    let qk = q.powf(k as f64);
    let norm = (1.0 - q) / (1.0 - qk);
    let short = binary.short_count().min(k);
    let long = f64::from(binary.long_len());
    // P(i mod k < short) with P(a) = q^a (1 − q)/(1 − q^k)
    let p_short = norm * (1.0 - q.powf(short as f64)) / (1.0 - q);
    let remainder = long - p_short;
    Ok(remainder + 1.0 + qk / (1.0 - qk))
}

/// Average length of `G_k · G_k`, per pair.
pub fn avg_len_golomb_pair(q: f64, k: u64) -> Result<f64> {
    Ok(2.0 * avg_len_golomb(q, k)?)
}

/// Average length of the limit code, closed form.
pub fn avg_len_limit_closed(q: f64) -> Result<f64> {
    check_q(q)?;
    let mut sum = 0.0;
    let mut size = 1.0f64;
    loop {
        let term = q.powf(size) * (size * (1.0 - q) + 2.0);
        sum += term;
        if term < 1e-17 * sum || size > 1e300 {
            break;
        }
        size *= 2.0;
    }
    Ok(1.0 + sum / (1.0 - q))
}

/// A code described by its per-signature length totals.
pub trait LengthModel {
    /// Sum of the codeword lengths of the `s + 1` pairs of signature `s`.
    fn signature_total(&self, s: u64) -> Result<u128>;

    /// A constant `a` with `max length at signature s <= a·(s+2)·log2(s+2)`.
    fn envelope(&self) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct CminusModel(pub u64);

impl LengthModel for CminusModel {
    fn signature_total(&self, s: u64) -> Result<u128> {
        Ok(signature_length_row(self.0, s)?.total_len())
    }

    fn envelope(&self) -> f64 {
        self.0 as f64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LimitModel;

impl LengthModel for LimitModel {
    fn signature_total(&self, s: u64) -> Result<u128> {
        Ok(limit_signature_row(s).total_len())
    }

    fn envelope(&self) -> f64 {
        3.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GolombPairModel(pub Golomb);

impl LengthModel for GolombPairModel {
    fn signature_total(&self, s: u64) -> Result<u128> {
        Ok((0..=s)
            .map(|i| u128::from(self.0.len_of(i) + self.0.len_of(s - i)))
            .sum())
    }

    fn envelope(&self) -> f64 {
        f64::from(2 * ceil_log2(self.0.order()) + 3)
    }
}

impl LengthModel for CkCodec {
    fn signature_total(&self, s: u64) -> Result<u128> {
        Ok((0..=s).map(|i| u128::from(self.len_of((i, s - i)))).sum())
    }

    fn envelope(&self) -> f64 {
        f64::from(self.top().params().big_m + 3)
    }
}

const MAX_SERIES_TERMS: u64 = 50_000_000;

/// `(1 − q)² Σ_s q^s·total(s)`, stopped once a certified bound on the
/// remainder falls below `eps`.
pub fn avg_len_by_series(model: &dyn LengthModel, q: f64, eps: f64) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::QOutOfRange(q));
    }
    if q >= 1.0 {
        return Err(Error::NoConvergence(q));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let norm = (1.0 - q).powi(2);
    let a = model.envelope();
    // bound on the term of signature s: norm·q^s·(s+1)·a·(s+2)·log2(s+2)
    let bound = |s: f64, qs: f64| norm * qs * (s + 1.0) * a * (s + 2.0) * (s + 2.0).log2();
    let mut sum = 0.0;
    let mut qs = 1.0;
    for s in 0..MAX_SERIES_TERMS {
        sum += norm * qs * model.signature_total(s)? as f64;
        qs *= q;
        let next = (s + 1) as f64;
        // successive bound ratios decrease towards q
        let ratio = q * (next + 2.0) / (next + 1.0) * (next + 3.0).log2() / (next + 2.0).log2();
        if ratio < 1.0 {
            let tail = bound(next, qs) / (1.0 - ratio);
            if tail < eps {
                return Ok(sum);
            }
        }
    }
    Err(Error::NoConvergence(q))
}

/// Smallest `k >= 1` with `q^k + q^{k+1} <= 1`.
pub fn best_golomb_order(q: f64) -> Result<u64> {
    check_q(q)?;
    // q^k (1 + q) <= 1  ⇔  k >= ln(1 + q)/ln(1/q); the slack keeps the
    // interval endpoints themselves on the lower side
    let x = (1.0 + q).ln() / -q.ln();
    Ok(((x - 1e-9).ceil() as u64).max(1))
}

/// `q_k`, the root of `q^k + q^{k+1} = 1` in `[0, 1)`; `q_0 = 0`.
pub fn golomb_threshold(k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let f = |q: f64| q.powf(k as f64) * (1.0 + q) - 1.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    lo
}

/// Limiting redundancy per symbol of `C_k` as a function of
/// `λ = 2^M/k² ∈ [3/4, 3/2]`.
pub fn asymptotic_redundancy_at(lambda: f64) -> f64 {
    let log2e = std::f64::consts::LOG2_E;
    let a = (lambda - 0.5).sqrt();
    0.5 * (1.0 + lambda.log2()) + 2f64.powf(1.0 - 2.0 * a) * (1.0 + 2.0 * a / log2e)
        - (std::f64::consts::E * log2e).log2()
}

pub fn asymptotic_redundancy(k: u64) -> Result<f64> {
    let p = top_code_params(k)?;
    let lambda = 2f64.powi(p.big_m as i32) / (k as f64 * k as f64);
    Ok(asymptotic_redundancy_at(lambda))
}

/// Redundancy per symbol of `C_k` at `q = 2^{−1/k}`.
pub fn ck_redundancy(k: u64) -> Result<f64> {
    let p = top_code_params(k)?;
    Ok(0.5 * avg_len_ck_dyadic(k)? - entropy_per_symbol(p.q)?)
}

/// Point where `a(q) − b(q)` changes sign, by bisection down to `tol`.
pub fn crossover<A, B>(a: A, b: B, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    A: Fn(f64) -> Result<f64>,
    B: Fn(f64) -> Result<f64>,
{
    let diff = |q: f64| -> Result<f64> { Ok(a(q)? - b(q)?) };
    let (mut lo_q, mut hi_q) = (lo, hi);
    let d_lo = diff(lo_q)?;
    let d_hi = diff(hi_q)?;
    if d_lo == 0.0 {
        return Ok(lo_q);
    }
    if d_hi == 0.0 {
        return Ok(hi_q);
    }
    if (d_lo > 0.0) == (d_hi > 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi_q - lo_q > tol {
        let mid = 0.5 * (lo_q + hi_q);
        let d = diff(mid)?;
        if d == 0.0 {
            return Ok(mid);
        }
        if (d > 0.0) == (d_lo > 0.0) {
            lo_q = mid;
        } else {
            hi_q = mid;
        }
    }
    Ok(0.5 * (lo_q + hi_q))
}

const SERIES_EPS: f64 = 1e-12;

/// Average length of any family at `q`, closed form where one exists.
pub fn avg_len_family(family: CodeFamily, q: f64) -> Result<f64> {
    family.validate()?;
    match family {
        CodeFamily::Ck(k) => avg_len_ck(q, k),
        CodeFamily::GolombPair(k) => avg_len_golomb_pair(q, k),
        CodeFamily::Limit => avg_len_limit_closed(q),
        CodeFamily::Cminus(k) => avg_len_by_series(&CminusModel(k), q, SERIES_EPS),
    }
}

/// Best parameter and its average among `k` in `ks`.
fn best_of(
    ks: impl IntoIterator<Item = u64>,
    make: impl Fn(u64) -> CodeFamily,
    q: f64,
) -> Result<(CodeFamily, f64)> {
    let mut best: Option<(CodeFamily, f64)> = None;
    for k in ks {
        let f = make(k);
        let v = avg_len_family(f, q)?;
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((f, v));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty candidate set".into()))
}

/// `C_k` orders worth trying at `q`: everything up to 64, plus a window
/// around the Golomb order for larger `q`.
fn ck_orders(q: f64) -> Result<Vec<u64>> {
    let g = best_golomb_order(q)?;
    let mut ks: Vec<u64> = (1..=64).collect();
    if g + 4 > 64 {
        ks.extend(g.saturating_sub(4).max(65)..=g + 4);
    }
    Ok(ks)
}

pub const CMINUS_ORDERS: std::ops::RangeInclusive<u64> = 2..=16;

/// Best averages of every family at one `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedundancyPoint {
    pub q: f64,
    pub entropy: f64,
    pub golomb_best: (u64, f64),
    pub ck_best: (u64, f64),
    pub cminus_best: (u64, f64),
    pub limit: f64,
}

impl RedundancyPoint {
    pub fn at(q: f64) -> Result<Self> {
        let entropy = entropy_per_symbol(q)?;
        let k = |f: CodeFamily| f.k().unwrap_or(0);
        let g = best_golomb_order(q)?;
        let (gf, gv) = best_of(
            g.saturating_sub(2).max(1)..=g + 2,
            CodeFamily::GolombPair,
            q,
        )?;
        let (cf, cv) = best_of(ck_orders(q)?, CodeFamily::Ck, q)?;
        let (mf, mv) = best_of(CMINUS_ORDERS, CodeFamily::Cminus, q)?;
        Ok(RedundancyPoint {
            q,
            entropy,
            golomb_best: (k(gf), gv),
            ck_best: (k(cf), cv),
            cminus_best: (k(mf), mv),
            limit: avg_len_limit_closed(q)?,
        })
    }

    /// Per-symbol redundancy of a per-pair average.
    pub fn redundancy(&self, avg: f64) -> f64 {
        0.5 * avg - self.entropy
    }
}

/// Candidate families for selection, in tie-break order.
fn candidates(q: f64) -> Result<Vec<CodeFamily>> {
    let mut out: Vec<CodeFamily> = ck_orders(q)?.into_iter().map(CodeFamily::Ck).collect();
    let g = best_golomb_order(q)?;
    out.extend((g.saturating_sub(2).max(1)..=g + 2).map(CodeFamily::GolombPair));
    if q < 0.5 {
        out.extend(CMINUS_ORDERS.map(CodeFamily::Cminus));
    }
    out.push(CodeFamily::Limit);
    Ok(out)
}

/// Family with the smallest average length at `q`.
pub fn best_family(q: f64) -> Result<CodeFamily> {
    let mut best: Option<(CodeFamily, f64)> = None;
    for f in candidates(q)? {
        let v = avg_len_family(f, q)?;
        if best.is_none_or(|(_, b)| v < b - 1e-12) {
            best = Some((f, v));
        }
    }
    Ok(best.expect("candidate list is never empty").0)
}

const TABLE_Q_MAX: f64 = 0.99;
const TABLE_STEPS: usize = 990;

/// `(q_start, family)`: `family` is best from `q_start` up to the next entry.
fn selection_table() -> &'static [(f64, CodeFamily)] {
    static TABLE: OnceLock<Vec<(f64, CodeFamily)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let grid: Vec<f64> = (1..=TABLE_STEPS)
            .map(|i| TABLE_Q_MAX * i as f64 / TABLE_STEPS as f64)
            .collect();
        let pick = |q: f64| best_family(q).expect("q inside (0, 1)");
        let mut table = vec![(0.0, pick(grid[0]))];
        let mut prev_q = grid[0];
        for &q in &grid[1..] {
            let f = pick(q);
            let cur = table.last().unwrap().1;
            if f != cur {
                let (mut lo, mut hi) = (prev_q, q);
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if pick(mid) == cur {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                table.push((hi, f));
            }
            prev_q = q;
        }
        table
    })
}

/// Chooses a code from the sample mean of the integers seen so far, via the
/// maximum-likelihood estimate `q̂ = mean/(1 + mean)`.
pub fn adaptive_select(mean: f64) -> CodeFamily {
    let mean = if mean.is_nan() { 0.0 } else { mean.max(0.0) };
    let q = mean / (1.0 + mean);
    if q <= 0.0 {
        return CodeFamily::Limit;
    }
    if q > TABLE_Q_MAX || !q.is_finite() {
        if q >= 1.0 {
            // q̂ rounds to one: the largest order near the Golomb one
            return CodeFamily::Ck(best_golomb_order(1.0 - f64::EPSILON).unwrap_or(1));
        }
        return best_family(q).unwrap_or(CodeFamily::Ck(1));
    }
    let table = selection_table();
    let idx = table.partition_point(|&(start, _)| start <= q);
    table[idx.saturating_sub(1)].1
}
