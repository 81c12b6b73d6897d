use std::f64::consts::{PI, TAU};

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rand::Rng;

use super::config::{ChannelMode, SystemConfig, UserLayout};
use super::trial_rng;
use crate::error::Result;
use crate::rates::pattern;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// RNG stream used for channel draws; other consumers use different streams.
pub(crate) const CHANNEL_STREAM: u64 = 0;

/// One block-fading snapshot of the LEO/GEO coexistence scenario.
///
/// All arrays are indexed `[beam][user][block]` except `leo_to_geo`, which is
/// `[beam][block]`. Only `|h|^2` enters the rate expressions; the Doppler phase
/// rotates `h` without changing its magnitude.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    pub leo_gains: Array3<Complex64>,
    /// GEO-to-LEO-user power gains. The scenario collapses `g * q` into the
    /// fixed `geo_interference`, so these are carried but not used for rates.
    pub geo_to_leo: Array3<f64>,
    pub leo_to_geo: Array2<f64>,
    pub doppler_phases: Array3<f64>,
    pub distances: Array3<f64>,
    pub boresight_angles: Array3<f64>,
}

impl ChannelRealization {
    pub fn num_beams(&self) -> usize {
        self.leo_gains.dim().0
    }

    pub fn num_users(&self) -> usize {
        self.leo_gains.dim().1
    }

    pub fn num_blocks(&self) -> usize {
        self.leo_gains.dim().2
    }

    /// `|h_{m,u,k}|^2`.
    pub fn power_gain(&self, beam: usize, user: usize, block: usize) -> f64 {
        self.leo_gains[[beam, user, block]].norm_sqr()
    }

    /// Builds a realization from explicit power gains with zero phase; used by
    /// tests and small hand-set instances.
    pub fn from_power_gains(power: Array3<f64>, leo_to_geo: Array2<f64>) -> Self {
        let dim = power.dim();
        ChannelRealization {
            leo_gains: power.mapv(|g| Complex64::new(g.max(0.0).sqrt(), 0.0)),
            geo_to_leo: Array3::zeros(dim),
            leo_to_geo,
            doppler_phases: Array3::zeros(dim),
            distances: Array3::zeros(dim),
            boresight_angles: Array3::zeros(dim),
        }
    }
}

/// Free-space factor `G_T G_R (c / (4 pi f_c d))^2`.
pub fn free_space_factor(cfg: &SystemConfig, distance: f64) -> f64 {
    let ratio = SPEED_OF_LIGHT / (4.0 * PI * cfg.carrier_frequency * distance);
    cfg.antenna.g_t * cfg.antenna.g_r * ratio * ratio
}

/// Draws the realization for `trial_index`. Deterministic in
/// `(cfg.rng_seed, trial_index)`.
pub fn generate_realization(cfg: &SystemConfig, trial_index: u64) -> Result<ChannelRealization> {
    cfg.validate()?;
    let (m_count, u_count, k_count) = (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks);
    let mut rng = trial_rng(cfg.rng_seed, trial_index, CHANNEL_STREAM);
    let geo = &cfg.geometry;
    let theta_3db = cfg.beam_gain.theta_3db;
    let max_angle = PI / 2.0 - 1e-9;

    let leo_to_geo = Array2::from_shape_fn((m_count, k_count), |_| {
        if geo.leo_to_geo_hi > geo.leo_to_geo_lo {
            rng.gen_range(geo.leo_to_geo_lo..geo.leo_to_geo_hi)
        } else {
            geo.leo_to_geo_lo
        }
    });

    // angles[m][u] and off-nadir angle per (m, u)
    let mut angles = Array2::<f64>::zeros((m_count, u_count));
    let mut off_nadir = Array2::<f64>::zeros((m_count, u_count));
    match geo.layout {
        UserLayout::HomeBeam => {
            let spacing = geo.beam_spacing * theta_3db;
            let centre = |m: usize| (m as f64 - (m_count as f64 - 1.0) / 2.0) * spacing;
            for u in 0..u_count {
                let home = u % m_count;
                let r = geo.angle_spread * theta_3db * rng.gen::<f64>().sqrt();
                let phi = rng.gen_range(0.0..TAU);
                let (x, y) = (centre(home) + r * phi.cos(), r * phi.sin());
                let nadir = x.hypot(y).min(max_angle);
                for m in 0..m_count {
                    angles[[m, u]] = (x - centre(m)).hypot(y).min(max_angle);
                    off_nadir[[m, u]] = nadir;
                }
            }
        }
        UserLayout::Independent => {
            let hi = (geo.angle_spread * theta_3db).min(max_angle);
            for m in 0..m_count {
                for u in 0..u_count {
                    let a = rng.gen_range(0.0..hi);
                    angles[[m, u]] = a;
                    off_nadir[[m, u]] = a;
                }
            }
        }
    }

    let dim = (m_count, u_count, k_count);
    let boresight_angles = Array3::from_shape_fn(dim, |(m, u, _)| angles[[m, u]]);
    let distances = Array3::from_shape_fn(dim, |(m, u, _)| geo.altitude_m / off_nadir[[m, u]].cos());
    let doppler_phases = Array3::from_shape_fn(dim, |_| rng.gen_range(0.0..TAU));
    let geo_to_leo = Array3::from_shape_fn(dim, |_| rng.gen::<f64>());

    let leo_gains = Array3::from_shape_fn(dim, |(m, u, k)| {
        let pattern_gain = pattern::beam_gain_with_floor(boresight_angles[[m, u, k]], &cfg.beam_gain);
        let link = match cfg.channel_mode {
            ChannelMode::Normalized => 1.0,
            ChannelMode::Physical => free_space_factor(cfg, distances[[m, u, k]]),
        };
        Complex64::from_polar((pattern_gain * link).sqrt(), doppler_phases[[m, u, k]])
    });

    Ok(ChannelRealization {
        leo_gains,
        geo_to_leo,
        leo_to_geo,
        doppler_phases,
        distances,
        boresight_angles,
    })
}
