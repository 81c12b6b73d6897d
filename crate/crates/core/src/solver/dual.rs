//! Gradient-ascent share update and projected subgradient multiplier steps.
//!
//! Rates enter in bits/s/Hz: `served`, `common_rate` and `min_rate` are divided
//! by the beam bandwidth before they reach these functions.

use ndarray::{Array1, Array2, Array3};

use crate::model::DualState;

/// `max(0, C + step (1 + lambda1 - lambda2))`.
pub fn update_common_share(share: f64, lambda1: f64, lambda2: f64, step: f64) -> f64 {
    (share + step * (1.0 + lambda1 - lambda2)).max(0.0)
}

/// Constraint values driving one multiplier step.
#[derive(Clone, Debug)]
pub struct Subgradients<'a> {
    /// Served rate `sum x (C + R)` per user.
    pub served: &'a Array1<f64>,
    pub min_rate: f64,
    /// Common shares `[beam][user][block]`, already masked by the assignment.
    pub shares: &'a Array3<f64>,
    pub common_rate: &'a Array2<f64>,
    /// `f_{m,k} p_{m,k}`.
    pub interference: &'a Array2<f64>,
    pub interference_threshold: f64,
    /// `eta_0 + sum x eta` per (beam, block).
    pub coefficient_load: &'a Array2<f64>,
    pub power_sum: f64,
    pub total_power: f64,
    /// Groups with at least one user; multipliers of empty groups stay put.
    pub active: &'a Array2<bool>,
    /// Keep `lambda3` and `lambda5` fixed (beam powers are not optimized).
    pub freeze_power_prices: bool,
}

/// One projected subgradient step on every multiplier family.
pub fn update_multipliers(dual: &DualState, g: &Subgradients<'_>, step: f64) -> DualState {
    let mut next = dual.clone();
    for (u, l) in next.lambda1.iter_mut().enumerate() {
        *l = (*l + step * (g.min_rate - g.served[u])).max(0.0);
    }
    let (mc, kc) = g.common_rate.dim();
    for m in 0..mc {
        for k in 0..kc {
            if !g.active[[m, k]] {
                continue;
            }
            let shares: f64 = g.shares.slice(ndarray::s![m, .., k]).sum();
            let l2 = &mut next.lambda2[[m, k]];
            *l2 = (*l2 + step * (shares - g.common_rate[[m, k]])).max(0.0);
            let l4 = &mut next.lambda4[[m, k]];
            *l4 = (*l4 + step * (g.coefficient_load[[m, k]] - 1.0)).max(0.0);
            if !g.freeze_power_prices {
                let l3 = &mut next.lambda3[[m, k]];
                *l3 = (*l3 + step * (g.interference[[m, k]] - g.interference_threshold)).max(0.0);
            }
        }
    }
    if !g.freeze_power_prices {
        next.lambda5 = (next.lambda5 + step * (g.power_sum - g.total_power)).max(0.0);
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemConfig;

    #[test]
    fn share_update_cases() {
        assert!((update_common_share(0.3, 0.0, 0.0, 0.01) - 0.31).abs() < 1e-15);
        assert_eq!(update_common_share(0.3, 0.5, 1.5, 0.01), 0.3);
        assert_eq!(update_common_share(0.0, 0.0, 3.0, 0.01), 0.0);
    }

    struct Fixture {
        served: Array1<f64>,
        shares: Array3<f64>,
        common: Array2<f64>,
        interference: Array2<f64>,
        load: Array2<f64>,
        active: Array2<bool>,
    }

    fn slack() -> Fixture {
        Fixture {
            served: Array1::from_elem(2, 5.0),
            shares: Array3::zeros((1, 2, 1)),
            common: Array2::from_elem((1, 1), 1.0),
            interference: Array2::from_elem((1, 1), 0.5),
            load: Array2::from_elem((1, 1), 0.5),
            active: Array2::from_elem((1, 1), true),
        }
    }

    fn grads(f: &Fixture, power_sum: f64) -> Subgradients<'_> {
        Subgradients {
            served: &f.served,
            min_rate: 0.1,
            shares: &f.shares,
            common_rate: &f.common,
            interference: &f.interference,
            interference_threshold: 3.0,
            coefficient_load: &f.load,
            power_sum,
            total_power: 60.0,
            active: &f.active,
            freeze_power_prices: false,
        }
    }

    fn small_cfg() -> SystemConfig {
        let mut cfg = SystemConfig::default();
        cfg.num_beams = 1;
        cfg.num_resource_blocks = 1;
        cfg.num_users = 2;
        cfg
    }

    #[test]
    fn slack_constraints_keep_zero_multipliers() {
        let f = slack();
        let dual = DualState::filled(&small_cfg(), 0.0);
        let next = update_multipliers(&dual, &grads(&f, 10.0), 0.1);
        assert_eq!(next, dual);
    }

    #[test]
    fn power_overshoot_raises_lambda5() {
        let f = slack();
        let dual = DualState::filled(&small_cfg(), 0.0);
        let next = update_multipliers(&dual, &grads(&f, 61.0), 0.1);
        assert!((next.lambda5 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn frozen_prices_do_not_move() {
        let f = slack();
        let dual = DualState::filled(&small_cfg(), 0.2);
        let mut g = grads(&f, 100.0);
        g.freeze_power_prices = true;
        let next = update_multipliers(&dual, &g, 0.1);
        assert_eq!(next.lambda5, 0.2);
        assert_eq!(next.lambda3[[0, 0]], 0.2);
        assert!(next.is_nonnegative());
    }
}
