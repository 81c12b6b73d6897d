//! Slow, independent reference computations used to check the fast paths.
//!
//! Nothing here shares code with the rate or solver modules beyond the data
//! types, so agreement between the two is meaningful.

use std::f64::consts::PI;

use ndarray::Array3;

use crate::model::{AllocationState, ChannelRealization, SystemConfig};

/// `J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt` by the trapezoid rule,
/// which converges geometrically for this smooth periodic integrand.
pub fn bessel_quadrature(order: u32, x: f64) -> f64 {
    let steps = 2048;
    let h = PI / steps as f64;
    let n = order as f64;
    let f = |t: f64| (n * t - x * t.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for i in 1..steps {
        sum += f(i as f64 * h);
    }
    sum * h / PI
}

/// Sum rate in bits/s by direct transcription of the rate expressions for
/// scalar unit precoders. Also returns the largest common-rate
/// overcommitment.
pub fn reference_sum_rate(real: &ChannelRealization, alloc: &AllocationState, cfg: &SystemConfig) -> (f64, f64) {
    let (mc, uc, kc) = alloc.dims();
    let interference_plus_noise =
        cfg.geo_interference + 10f64.powf((cfg.noise_density_dbm_hz - 30.0) / 10.0) * cfg.bandwidth;
    let mut total = 0.0;
    let mut worst = 0.0f64;
    for m in 0..mc {
        for k in 0..kc {
            let users: Vec<usize> = (0..uc).filter(|&u| alloc.assignment[[m, u, k]]).collect();
            if users.is_empty() {
                continue;
            }
            let p = alloc.beam_power[[m, k]];
            let mut gamma_c = f64::INFINITY;
            for &u in &users {
                let h2 = real.leo_gains[[m, u, k]].norm() * real.leo_gains[[m, u, k]].norm();
                let mut all = 0.0;
                let mut others = 0.0;
                for &j in &users {
                    all += alloc.private_coeff[[m, j, k]];
                    if j != u {
                        others += alloc.private_coeff[[m, j, k]];
                    }
                }
                let gc = h2 * alloc.common_coeff[[m, k]] * p / (interference_plus_noise + h2 * all * p);
                gamma_c = gamma_c.min(gc);
                let gp = h2 * alloc.private_coeff[[m, u, k]] * p / (interference_plus_noise + h2 * others * p);
                total += cfg.bandwidth * (1.0 + gp).log2() + alloc.common_share[[m, u, k]];
            }
            let rc = cfg.bandwidth * (1.0 + gamma_c).log2();
            let shares: f64 = users.iter().map(|&u| alloc.common_share[[m, u, k]]).sum();
            worst = worst.max(shares - rc);
        }
    }
    (total, worst.max(0.0))
}

/// Best objective of a single (beam, block) with users `gains`, found on a
/// uniform grid over `(p, eta_0, eta_1, ..)` with `points` values per axis.
/// The common shares are optimized exactly at each grid point: the point is
/// feasible iff the common rate covers every private shortfall, and the
/// objective is then the private rates plus the whole common rate.
///
/// Rates are in bits/s/Hz. Returns `None` when no grid point is feasible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridOptimum {
    pub value: f64,
    pub power: f64,
    pub common: f64,
    pub private: [f64; 2],
}

pub fn grid_optimum_two_users(
    gains: [f64; 2],
    noise: f64,
    p_max: f64,
    min_rate: f64,
    points: usize,
) -> Option<GridOptimum> {
    let axis = |i: usize, hi: f64| hi * i as f64 / (points - 1) as f64;
    let mut best: Option<GridOptimum> = None;
    for ip in 0..points {
        let p = axis(ip, p_max);
        for i0 in 0..points {
            let e0 = axis(i0, 1.0);
            for i1 in 0..points {
                let e1 = axis(i1, 1.0);
                if e0 + e1 > 1.0 + 1e-12 {
                    break;
                }
                for i2 in 0..points {
                    let e2 = axis(i2, 1.0);
                    if e0 + e1 + e2 > 1.0 + 1e-12 {
                        break;
                    }
                    let r1 = (1.0 + gains[0] * e1 * p / (noise + gains[0] * e2 * p)).log2();
                    let r2 = (1.0 + gains[1] * e2 * p / (noise + gains[1] * e1 * p)).log2();
                    let gc = gains
                        .iter()
                        .map(|&a| a * e0 * p / (noise + a * (e1 + e2) * p))
                        .fold(f64::INFINITY, f64::min);
                    let rc = (1.0 + gc).log2();
                    let need = (min_rate - r1).max(0.0) + (min_rate - r2).max(0.0);
                    if need > rc {
                        continue;
                    }
                    let value = r1 + r2 + rc;
                    if best.is_none_or(|b| value > b.value) {
                        best = Some(GridOptimum {
                            value,
                            power: p,
                            common: e0,
                            private: [e1, e2],
                        });
                    }
                }
            }
        }
    }
    best
}

/// Every assignment placing each user in one allowed (beam, block) slot
/// with at most `cap` users per beam.
pub fn enumerate_assignments(
    beams: usize,
    users: usize,
    blocks: usize,
    allowed: &dyn Fn(usize) -> Vec<usize>,
    cap: usize,
) -> Vec<Array3<bool>> {
    let slots: Vec<(usize, usize)> = (0..beams)
        .flat_map(|m| allowed(m).into_iter().map(move |k| (m, k)))
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; users];
    loop {
        let mut counts = vec![0usize; beams];
        for &c in &choice {
            counts[slots[c].0] += 1;
        }
        if counts.iter().all(|&c| c <= cap) {
            let mut x = Array3::from_elem((beams, users, blocks), false);
            for (u, &c) in choice.iter().enumerate() {
                x[[slots[c].0, u, slots[c].1]] = true;
            }
            out.push(x);
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == users {
                return out;
            }
            choice[i] += 1;
            if choice[i] < slots.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
