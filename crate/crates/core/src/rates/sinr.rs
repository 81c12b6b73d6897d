//! SINR and achievable-rate expressions of the one-layer RSMA downlink.
//!
//! Every user on a (beam, block) first decodes the common stream while the
//! group's private streams act as interference, then its private stream with
//! the remaining private streams as interference. GEO interference `I_p` and
//! thermal noise add to every denominator.

use ndarray::{Array1, Array2, Array3};

use crate::error::{Error, Result};
use crate::model::{AllocationState, ChannelRealization, SystemConfig};

/// `a eta p / (noise + a * others * p)`.
pub fn private_sinr_kernel(gain: f64, own: f64, others: f64, power: f64, noise: f64) -> f64 {
    gain * own * power / (noise + gain * others * power)
}

/// `a eta_0 p / (noise + a * private_total * p)`.
pub fn common_sinr_kernel(gain: f64, common: f64, private_total: f64, power: f64, noise: f64) -> f64 {
    gain * common * power / (noise + gain * private_total * power)
}

/// `|w^H h|^2` for user `u`'s private precoder.
pub fn private_gain(real: &ChannelRealization, alloc: &AllocationState, m: usize, u: usize, k: usize) -> f64 {
    (alloc.precoders.private[[m, u, k]].conj() * real.leo_gains[[m, u, k]]).norm_sqr()
}

/// `|w_c^H h|^2` for user `u` under the common precoder.
pub fn common_gain(real: &ChannelRealization, alloc: &AllocationState, m: usize, u: usize, k: usize) -> f64 {
    (alloc.precoders.common[[m, k]].conj() * real.leo_gains[[m, u, k]]).norm_sqr()
}

fn private_load(alloc: &AllocationState, m: usize, k: usize, skip: Option<usize>) -> f64 {
    (0..alloc.dims().1)
        .filter(|&j| Some(j) != skip && alloc.assignment[[m, j, k]])
        .map(|j| alloc.private_coeff[[m, j, k]])
        .sum()
}

/// Private SINR of `u` on `(m, k)`; `noise` is `sigma^2` and `geo` is `I_p`.
pub fn private_sinr(
    real: &ChannelRealization,
    alloc: &AllocationState,
    m: usize,
    u: usize,
    k: usize,
    noise: f64,
    geo: f64,
) -> f64 {
    private_sinr_kernel(
        private_gain(real, alloc, m, u, k),
        alloc.private_coeff[[m, u, k]],
        private_load(alloc, m, k, Some(u)),
        alloc.beam_power[[m, k]],
        geo + noise,
    )
}

/// Bottleneck common-stream SINR of `(m, k)` and `B log2(1 + gamma_c)`.
pub fn common_sinr_and_rate(
    real: &ChannelRealization,
    alloc: &AllocationState,
    m: usize,
    k: usize,
    noise: f64,
    geo: f64,
    bandwidth: f64,
) -> Result<(f64, f64)> {
    let total = private_load(alloc, m, k, None);
    let gamma = (0..alloc.dims().1)
        .filter(|&u| alloc.assignment[[m, u, k]])
        .map(|u| {
            common_sinr_kernel(
                common_gain(real, alloc, m, u, k),
                alloc.common_coeff[[m, k]],
                total,
                alloc.beam_power[[m, k]],
                geo + noise,
            )
        })
        .reduce(f64::min)
        .ok_or(Error::UndefinedGroup { beam: m, block: k })?;
    Ok((gamma, bandwidth * spectral_efficiency(gamma)))
}

/// `log2(1 + gamma)` computed without cancellation for small gamma.
pub fn spectral_efficiency(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

/// Every rate of one allocation. Groups without users carry zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct RateBreakdown {
    /// bits/s, `[beam][block]`.
    pub common_rate: Array2<f64>,
    /// bits/s, `[beam][user][block]`.
    pub private_rate: Array3<f64>,
    pub common_sinr: Array2<f64>,
    pub private_sinr: Array3<f64>,
    /// bits/s per user, `sum x (C + R)`.
    pub total_per_user: Array1<f64>,
    /// `max(0, sum_u x C - R_c)`, bits/s, `[beam][block]`.
    pub common_overcommit: Array2<f64>,
}

impl RateBreakdown {
    pub fn sum_rate(&self) -> f64 {
        self.total_per_user.sum()
    }

    /// Largest common-rate overcommitment over all groups.
    pub fn max_overcommit(&self) -> f64 {
        self.common_overcommit.iter().copied().fold(0.0, f64::max)
    }
}

pub fn rate_breakdown(real: &ChannelRealization, alloc: &AllocationState, cfg: &SystemConfig) -> RateBreakdown {
    let (mc, uc, kc) = alloc.dims();
    let sigma2 = cfg.noise_power();
    let b = cfg.bandwidth;
    let mut out = RateBreakdown {
        common_rate: Array2::zeros((mc, kc)),
        private_rate: Array3::zeros((mc, uc, kc)),
        common_sinr: Array2::zeros((mc, kc)),
        private_sinr: Array3::zeros((mc, uc, kc)),
        total_per_user: Array1::zeros(uc),
        common_overcommit: Array2::zeros((mc, kc)),
    };
    for m in 0..mc {
        for k in 0..kc {
            if let Ok((g, r)) = common_sinr_and_rate(real, alloc, m, k, sigma2, cfg.geo_interference, b) {
                out.common_sinr[[m, k]] = g;
                out.common_rate[[m, k]] = r;
            }
            let mut shares = 0.0;
            for u in (0..uc).filter(|&u| alloc.assignment[[m, u, k]]) {
                let g = private_sinr(real, alloc, m, u, k, sigma2, cfg.geo_interference);
                let r = b * spectral_efficiency(g);
                out.private_sinr[[m, u, k]] = g;
                out.private_rate[[m, u, k]] = r;
                out.total_per_user[u] += alloc.common_share[[m, u, k]] + r;
                shares += alloc.common_share[[m, u, k]];
            }
            out.common_overcommit[[m, k]] = (shares - out.common_rate[[m, k]]).max(0.0);
        }
    }
    out
}

/// Sum rate in bits/s together with its breakdown. C2 violations are
/// reported in `common_overcommit`, not clipped.
pub fn sum_rate(real: &ChannelRealization, alloc: &AllocationState, cfg: &SystemConfig) -> (f64, RateBreakdown) {
    let rb = rate_breakdown(real, alloc, cfg);
    (rb.sum_rate(), rb)
}
