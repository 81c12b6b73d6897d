use ndarray::{Array1, Array2, Array3};
use num_complex::Complex64;

use super::config::SystemConfig;

/// Unit-norm precoder weights. In the single-feed-per-beam scenario every
/// weight is the scalar 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecoderSet {
    /// `[beam][block]`.
    pub common: Array2<Complex64>,
    /// `[beam][user][block]`.
    pub private: Array3<Complex64>,
}

impl PrecoderSet {
    pub fn scalar_unit(beams: usize, users: usize, blocks: usize) -> Self {
        PrecoderSet {
            common: Array2::from_elem((beams, blocks), Complex64::new(1.0, 0.0)),
            private: Array3::from_elem((beams, users, blocks), Complex64::new(1.0, 0.0)),
        }
    }
}

/// Primal decision variables.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationState {
    /// Watts, `[beam][block]`.
    pub beam_power: Array2<f64>,
    /// Common-stream coefficient `eta_0`, `[beam][block]`.
    pub common_coeff: Array2<f64>,
    /// Private-stream coefficients, `[beam][user][block]`.
    pub private_coeff: Array3<f64>,
    /// Share of the common rate credited to each user, bits/s.
    pub common_share: Array3<f64>,
    pub assignment: Array3<bool>,
    pub precoders: PrecoderSet,
}

impl AllocationState {
    pub fn zeros(cfg: &SystemConfig) -> Self {
        let (m, u, k) = (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks);
        AllocationState {
            beam_power: Array2::zeros((m, k)),
            common_coeff: Array2::zeros((m, k)),
            private_coeff: Array3::zeros((m, u, k)),
            common_share: Array3::zeros((m, u, k)),
            assignment: Array3::from_elem((m, u, k), false),
            precoders: PrecoderSet::scalar_unit(m, u, k),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.private_coeff.dim()
    }

    /// Users assigned to `(beam, block)` in ascending index order.
    pub fn group_members(&self, beam: usize, block: usize) -> Vec<usize> {
        (0..self.dims().1)
            .filter(|&u| self.assignment[[beam, u, block]])
            .collect()
    }

    /// `eta_0 + sum_u x eta_u` for one (beam, block).
    pub fn coefficient_load(&self, beam: usize, block: usize) -> f64 {
        let private: f64 = (0..self.dims().1)
            .filter(|&u| self.assignment[[beam, u, block]])
            .map(|u| self.private_coeff[[beam, u, block]])
            .sum();
        self.common_coeff[[beam, block]] + private
    }

    pub fn total_power(&self) -> f64 {
        self.beam_power.sum()
    }

    /// Number of (beam, block) slots each user occupies; C7 demands exactly one.
    pub fn slots_per_user(&self) -> Vec<usize> {
        let (m, u, k) = self.dims();
        (0..u)
            .map(|user| {
                (0..m)
                    .flat_map(|beam| (0..k).map(move |block| (beam, block)))
                    .filter(|&(beam, block)| self.assignment[[beam, user, block]])
                    .count()
            })
            .collect()
    }
}

/// SINRs of the previous iterate and the SCA coefficients derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaPoint {
    /// `[beam][user][block]`.
    pub private_sinr: Array3<f64>,
    pub private_tau: Array3<f64>,
    pub private_varpi: Array3<f64>,
    /// `[beam][block]`, the bottleneck user's common-stream SINR.
    pub common_sinr: Array2<f64>,
    pub common_tau: Array2<f64>,
    pub common_varpi: Array2<f64>,
}

/// Lagrange multipliers of the power-allocation subproblem.
///
/// Multipliers tied to rates are expressed per hertz of beam bandwidth, the
/// unit in which the solver iterates.
#[derive(Clone, Debug, PartialEq)]
pub struct DualState {
    /// Minimum-rate constraint, per user.
    pub lambda1: Array1<f64>,
    /// Common-rate decodability, `[beam][block]`.
    pub lambda2: Array2<f64>,
    /// Interference temperature, `[beam][block]`.
    pub lambda3: Array2<f64>,
    /// Coefficient budget, `[beam][block]`.
    pub lambda4: Array2<f64>,
    /// Total power.
    pub lambda5: f64,
    pub sca: ScaPoint,
}

impl DualState {
    pub fn filled(cfg: &SystemConfig, value: f64) -> Self {
        let (m, u, k) = (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks);
        DualState {
            lambda1: Array1::from_elem(u, value),
            lambda2: Array2::from_elem((m, k), value),
            lambda3: Array2::from_elem((m, k), value),
            lambda4: Array2::from_elem((m, k), value),
            lambda5: value,
            sca: ScaPoint {
                private_sinr: Array3::zeros((m, u, k)),
                private_tau: Array3::zeros((m, u, k)),
                private_varpi: Array3::zeros((m, u, k)),
                common_sinr: Array2::zeros((m, k)),
                common_tau: Array2::zeros((m, k)),
                common_varpi: Array2::zeros((m, k)),
            },
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lambda5 >= 0.0
            && self.lambda1.iter().all(|&v| v >= 0.0)
            && self.lambda2.iter().all(|&v| v >= 0.0)
            && self.lambda3.iter().all(|&v| v >= 0.0)
            && self.lambda4.iter().all(|&v| v >= 0.0)
    }
}
