//! Tapered-aperture beam pattern
//! `G(theta) = G_max [J1(rho)/(2 rho) + 36 J3(rho)/rho^3]^2`,
//! `rho = 2.07123 sin(theta) / sin(theta_3dB)`.

use std::sync::OnceLock;

use super::bessel::{j1, j3, reduced_series, SERIES_LIMIT};
use crate::error::{Error, Result};
use crate::model::BeamGainParams;

/// Places the half-power point at `theta = theta_3dB`.
pub const HALF_POWER_RHO: f64 = 2.07123;

/// The pattern amplitude `J1(rho)/(2 rho) + 36 J3(rho)/rho^3`.
///
/// Below the series limit the quotients are summed directly from the
/// divided series, which is regular at `rho = 0` where the amplitude is 1.
pub fn amplitude(rho: f64) -> f64 {
    let rho = rho.abs();
    if rho < SERIES_LIMIT {
        let q = rho * rho / 4.0;
        reduced_series(1, q) / 4.0 + 4.5 * reduced_series(3, q)
    } else {
        amplitude_from_bessel(rho)
    }
}

/// Same amplitude through explicit `J1`, `J3` evaluations; singular at 0.
pub fn amplitude_from_bessel(rho: f64) -> f64 {
    j1(rho) / (2.0 * rho) + 36.0 * j3(rho) / rho.powi(3)
}

pub fn rho(theta: f64, theta_3db: f64) -> f64 {
    HALF_POWER_RHO * theta.sin() / theta_3db.sin()
}

/// Gain at off-axis angle `theta` (radians). Intended for the main lobe,
/// `0 <= theta < first null`.
pub fn beam_gain(theta: f64, theta_3db: f64, g_max: f64) -> Result<f64> {
    if !(theta_3db > 0.0 && theta_3db < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain(format!(
            "theta_3db must lie in (0, pi/2), got {theta_3db}"
        )));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::domain(format!(
            "off-axis angle must be non-negative, got {theta}"
        )));
    }
    let a = amplitude(rho(theta, theta_3db));
    Ok(g_max * a * a)
}

/// First zero of the pattern amplitude, found once by bisection.
pub fn first_null_rho() -> f64 {
    static NULL: OnceLock<f64> = OnceLock::new();
    *NULL.get_or_init(|| {
        // amplitude is positive at 3 and negative at 7
        let (mut lo, mut hi) = (3.0, 7.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if amplitude(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Off-axis angle of the first null for a given half-power angle.
pub fn first_null_angle(theta_3db: f64) -> f64 {
    let s = first_null_rho() * theta_3db.sin() / HALF_POWER_RHO;
    if s >= 1.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        s.asin()
    }
}

/// Main-lobe pattern with `theta` capped at the first null, floored at the
/// sidelobe envelope `g_max * sidelobe_floor`.
pub fn beam_gain_with_floor(theta: f64, params: &BeamGainParams) -> f64 {
    let capped = theta.clamp(0.0, first_null_angle(params.theta_3db));
    let a = amplitude(rho(capped, params.theta_3db));
    params.g_max * (a * a).max(params.sidelobe_floor)
}
