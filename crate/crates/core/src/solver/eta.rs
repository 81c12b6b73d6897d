//! Closed forms for the RSMA power-split coefficients.

use super::weights::GroupWeights;
use crate::model::{AllocationState, ChannelRealization, DualState, SystemConfig};
use crate::rates::sinr::private_gain;

/// `eta = (mu1 +- sqrt(mu2)) / mu3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaQuadratic {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

/// `mu3 = 0`: the stationarity condition carries no quadratic information.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegenerateQuadratic;

impl std::fmt::Display for DegenerateQuadratic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("coefficient quadratic is degenerate")
    }
}

impl std::error::Error for DegenerateQuadratic {}

/// Interferer data for one `j != u`.
#[derive(Clone, Copy, Debug)]
pub struct Interferer {
    pub gain: f64,
    pub weight: f64,
    pub x: f64,
}

/// Sums over interferers `j != u` of the target user `u`.
pub fn assemble(
    interferers: &[Interferer],
    own_weight: f64,
    lambda1: f64,
    lambda4: f64,
    power: f64,
    noise: f64,
) -> EtaQuadratic {
    let xu = 1.0;
    let mut q = EtaQuadratic {
        mu1: 0.0,
        mu2: 0.0,
        mu3: 0.0,
    };
    let mut cross = 0.0;
    for j in interferers {
        q.mu1 += -lambda4 * noise + j.gain * power * (-j.weight * j.x + (1.0 + lambda1) * own_weight * xu);
        cross += 4.0 * j.gain * (1.0 + lambda1) * lambda4 * power * noise * own_weight * xu;
        q.mu3 += 2.0 * j.gain * lambda4 * power * xu;
    }
    q.mu2 = q.mu1 * q.mu1 + cross;
    q
}

/// Quadratic for `u` on `(m, k)` at the current iterate.
pub fn eta_quadratic(
    real: &ChannelRealization,
    alloc: &AllocationState,
    dual: &DualState,
    m: usize,
    u: usize,
    k: usize,
    cfg: &SystemConfig,
) -> EtaQuadratic {
    let w = GroupWeights::new(dual, cfg.solver.sca_weight, m, k);
    let interferers: Vec<Interferer> = alloc
        .group_members(m, k)
        .into_iter()
        .filter(|&j| j != u)
        .map(|j| Interferer {
            gain: private_gain(real, alloc, m, j, k),
            weight: w.private(j),
            x: 1.0,
        })
        .collect();
    assemble(
        &interferers,
        w.private(u),
        dual.lambda1[u],
        dual.lambda4[[m, k]],
        alloc.beam_power[[m, k]],
        cfg.geo_interference + cfg.noise_power(),
    )
}

/// Picks the coefficient in `[0, 1]` maximizing `objective` among the real
/// branches and the interval ends.
pub fn solve_private_eta(
    quad: &EtaQuadratic,
    mut objective: impl FnMut(f64) -> f64,
) -> Result<f64, DegenerateQuadratic> {
    if quad.mu3 == 0.0 || !quad.mu3.is_finite() {
        return Err(DegenerateQuadratic);
    }
    let mut best = (0.0, objective(0.0));
    let mut consider = |eta: f64| {
        if (0.0..=1.0).contains(&eta) {
            let v = objective(eta);
            if v > best.1 {
                best = (eta, v);
            }
        }
    };
    consider(1.0);
    if quad.mu2 >= 0.0 {
        let s = quad.mu2.sqrt();
        consider((quad.mu1 + s) / quad.mu3);
        consider((quad.mu1 - s) / quad.mu3);
    }
    Ok(best.0)
}

/// `min(1, lambda2 w_c / lambda4)`, where `w_c` is the common-rate weight
/// (`gamma_c B` or its surrogate slope). Keeps `previous` when `lambda4 = 0`.
pub fn solve_common_eta(lambda2: f64, common_weight: f64, lambda4: f64, previous: f64) -> f64 {
    if lambda4 <= 0.0 {
        return previous;
    }
    (lambda2 * common_weight / lambda4).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root() {
        let q = EtaQuadratic {
            mu1: 1.0,
            mu2: 0.0,
            mu3: 2.0,
        };
        // flat objective except a peak at 0.5
        let eta = solve_private_eta(&q, |e| -(e - 0.5).abs()).unwrap();
        assert_eq!(eta, 0.5);
    }

    #[test]
    fn negative_discriminant_goes_to_boundary() {
        let q = EtaQuadratic {
            mu1: 1.0,
            mu2: -1.0,
            mu3: 2.0,
        };
        let eta = solve_private_eta(&q, |e| e).unwrap();
        assert_eq!(eta, 1.0);
        let eta = solve_private_eta(&q, |e| -e).unwrap();
        assert_eq!(eta, 0.0);
    }

    #[test]
    fn degenerate() {
        let q = EtaQuadratic {
            mu1: 1.0,
            mu2: 1.0,
            mu3: 0.0,
        };
        assert_eq!(solve_private_eta(&q, |e| e), Err(DegenerateQuadratic));
    }

    #[test]
    fn common_eta_cases() {
        assert_eq!(solve_common_eta(0.0, 0.5, 4.0, 0.3), 0.0);
        assert_eq!(solve_common_eta(2.0, 0.5, 4.0, 0.3), 0.25);
        assert_eq!(solve_common_eta(20.0, 0.5, 4.0, 0.3), 1.0);
        assert_eq!(solve_common_eta(2.0, 0.5, 0.0, 0.3), 0.3);
    }

    #[test]
    fn single_interferer_matches_stationarity() {
        // d/d eta of (1+l1) w_u ln(eta) - w_j ln(N + h_j p eta) - l4 eta vanishes at the + branch
        let (h, p, n, l1, l4, wu, wj) = (2.0, 3.0, 4.0, 0.5, 0.8, 1.2, 0.7);
        let q = assemble(
            &[Interferer {
                gain: h,
                weight: wj,
                x: 1.0,
            }],
            wu,
            l1,
            l4,
            p,
            n,
        );
        let eta = (q.mu1 + q.mu2.sqrt()) / q.mu3;
        let grad = (1.0 + l1) * wu / eta - wj * h * p / (n + h * p * eta) - l4;
        assert!(grad.abs() < 1e-12, "{grad}");
    }
}
