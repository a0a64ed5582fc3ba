use crate::basecodes::ceil_log2;
use crate::bitio::{BitReader, Codeword};
use crate::canonical::CanonicalCode;
use crate::error::{Error, Result};

use super::{profile_from, CompactProfile};

/// Explicit parameters of the optimal top code for the `k × k` source with
/// weights `q^{i+j}`, `q = 2^{−1/k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopCodeParams {
    pub k: u64,
    pub q: f64,
    /// `⌈log2 k²⌉`
    pub m: u32,
    /// `k² − ⌈k(k−1)/4⌉`
    pub big_q: u64,
    /// `⌈log2 Q⌉`
    pub big_m: u32,
    pub sigma: u8,
    /// Floor of the largest real root of `Δ`.
    pub xi: i64,
    pub j: u64,
    pub r: u64,
    /// `Δ(j)`
    pub delta_j: i64,
    pub c: u64,
    pub profile: CompactProfile,
}

/// `Δ(x) = 2k² − 2^{M+1} + x(x+1) − (k−x−2)(k−x−1)/2`, always an integer at
/// integer `x`.
pub fn delta_poly(k: u64, big_m: u32, x: i64) -> i64 {
    let k = i128::from(k);
    let x = i128::from(x);
    let v = 2 * k * k - (1i128 << (big_m + 1)) + x * (x + 1) - (k - x - 2) * (k - x - 1) / 2;
    v as i64
}

pub fn top_code_params(k: u64) -> Result<TopCodeParams> {
    if k == 0 {
        return Err(Error::InvalidParameter("top code needs k >= 1".into()));
    }
    let n = k * k;
    let m = ceil_log2(n);
    let big_q = n - (k * (k - 1)).div_ceil(4);
    let big_m = ceil_log2(big_q);
    let sigma = (m - big_m) as u8;
    let delta = |x: i64| delta_poly(k, big_m, x);

    // 2Δ(x) = x² + (2k−1)x + c0; place ξ with the quadratic formula, then fix
    // it with exact integer evaluations since ⌊x0⌋ is boundary-sensitive
    let kf = k as f64;
    let b = 2.0 * kf - 1.0;
    let c0 = 4.0 * kf * kf - 2f64.powi(big_m as i32 + 2) - (kf - 1.0) * (kf - 2.0);
    let disc = b * b - 4.0 * c0;
    if disc < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Δ has no real root for k = {k}"
        )));
    }
    let mut xi = ((-b + disc.sqrt()) / 2.0).floor() as i64;
    while delta(xi) > 0 {
        xi -= 1;
    }
    while delta(xi + 1) <= 0 {
        xi += 1;
    }
    debug_assert_eq!(delta(xi + 1), delta(xi) + xi + k as i64);

    let d_xi = delta(xi);
    let (j, r) = if -d_xi <= 2 * xi {
        (xi, (1 - d_xi).div_euclid(2))
    } else {
        (xi + 1, 0)
    };
    if j < 0 || r < 0 || r > j {
        return Err(Error::InvalidParameter(format!(
            "top code parameters out of range for k = {k}: j = {j}, r = {r}"
        )));
    }
    let c = n as i64 - (1i64 << big_m) + j * (j + 1) / 2 + r;
    let c =
        u64::try_from(c).map_err(|_| Error::InvalidParameter(format!("negative c for k = {k}")))?;
    let profile = profile_from(sigma, c, n)?;
    Ok(TopCodeParams {
        k,
        q: 2f64.powf(-1.0 / kf),
        m,
        big_q,
        big_m,
        sigma,
        xi,
        j: j as u64,
        r: r as u64,
        delta_j: delta(j),
        c,
        profile,
    })
}

/// The top code `T_k`: symbols `(i, j) ∈ [0, k)²` ranked by signature `i + j`
/// then by `i`, with lengths taken from the optimal profile and canonical
/// codewords.
#[derive(Debug, Clone)]
pub struct TopCode {
    params: TopCodeParams,
    by_rank: Vec<(u32, u32)>,
    rank_of: Vec<u32>,
    code: CanonicalCode,
}

impl TopCode {
    pub fn new(k: u64) -> Result<Self> {
        let params = top_code_params(k)?;
        let ku = k as usize;
        let mut by_rank = Vec::with_capacity(ku * ku);
        for s in 0..(2 * ku - 1) {
            let lo = s.saturating_sub(ku - 1);
            for i in lo..=s.min(ku - 1) {
                by_rank.push((i as u32, (s - i) as u32));
            }
        }
        let mut rank_of = vec![0u32; ku * ku];
        for (rank, &(i, j)) in by_rank.iter().enumerate() {
            rank_of[i as usize * ku + j as usize] = rank as u32;
        }
        let code = CanonicalCode::from_blocks(params.profile.levels())?;
        Ok(TopCode {
            params,
            by_rank,
            rank_of,
            code,
        })
    }

    pub fn params(&self) -> &TopCodeParams {
        &self.params
    }

    pub fn k(&self) -> u64 {
        self.params.k
    }

    pub fn rank(&self, i: u64, j: u64) -> u64 {
        u64::from(self.rank_of[(i * self.params.k + j) as usize])
    }

    /// Codeword of `(i, j)`, both below `k`.
    pub fn encode(&self, i: u64, j: u64) -> Codeword {
        assert!(i < self.params.k && j < self.params.k);
        self.code.encode(self.rank(i, j)).expect("rank below k²")
    }

    pub fn len_of(&self, i: u64, j: u64) -> u32 {
        self.params.profile.len_of(self.rank(i, j))
    }

    pub fn decode(&self, r: &mut BitReader<'_>) -> Result<(u64, u64)> {
        let rank = self.code.decode(r)?;
        let (i, j) = self.by_rank[rank as usize];
        Ok((u64::from(i), u64::from(j)))
    }

    /// Symbols in rank order.
    pub fn symbols(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.by_rank
            .iter()
            .map(|&(i, j)| (u64::from(i), u64::from(j)))
    }
}

pub fn top_code_table(k: u64) -> Result<TopCode> {
    TopCode::new(k)
}
