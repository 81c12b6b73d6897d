//! Scenario constants and the flat `key = value` configuration format.
//!
//! Defaults reproduce the reference simulation setup: five beams sharing five
//! resource blocks, ten users, 60 W total power, a 3 W interference limit at
//! the GEO user, 4 W of GEO interference at every LEO user, 1 Mbps minimum
//! rate, 10 MHz per beam at 19 GHz and a -170 dBm/Hz noise floor.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// How the free-space factor of the LEO channel is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelMode {
    /// `G_T G_R (c / 4 pi f_c d)^2` is replaced by 1, leaving only the beam pattern.
    Normalized,
    /// Full link budget with slant range and carrier frequency.
    Physical,
}

/// Where users sit relative to the beam centres.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UserLayout {
    /// Beam centres on a strip; every user lies inside the footprint of one
    /// home beam and sees the other beams at their geometric off-axis angle.
    HomeBeam,
    /// Every (beam, user) angle drawn independently from `[0, spread * theta_3dB)`.
    Independent,
}

/// Which resource blocks a beam may serve users on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMode {
    /// Beam `m` transmits only on block `m mod K`.
    Paired,
    /// Every beam may use every block.
    AllBlocks,
}

/// Rate-gradient weight substituted into the closed-form stationarity equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaWeight {
    /// Slope of the SCA surrogate, `tau / ln 2`.
    Surrogate,
    /// The expansion-point SINR itself.
    Sinr,
}

/// Bessel-pattern parameters shared by all beams.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamGainParams {
    /// Boresight gain, linear.
    pub g_max: f64,
    /// Half-power angle, radians.
    pub theta_3db: f64,
    /// Sidelobe envelope relative to `g_max`, linear. Applied as a floor on the
    /// main-lobe pattern; the pattern itself is evaluated only up to its first null.
    pub sidelobe_floor: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AntennaGains {
    pub g_t: f64,
    pub g_r: f64,
}

/// User placement and LEO-to-GEO coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryParams {
    pub layout: UserLayout,
    /// Radius of the user drop region, in multiples of `theta_3dB`.
    pub angle_spread: f64,
    /// Distance between adjacent beam centres, in multiples of `theta_3dB`.
    pub beam_spacing: f64,
    /// Satellite altitude in metres (physical mode only).
    pub altitude_m: f64,
    /// LEO-beam-to-GEO-user power gains are drawn from `U(f_lo, f_hi)`.
    pub leo_to_geo_lo: f64,
    pub leo_to_geo_hi: f64,
}

/// Iteration controls and initial point of the SCA/KKT solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// Initial subgradient / gradient-ascent step.
    pub step_size: f64,
    /// Geometric decay applied to the step every iteration.
    pub step_decay: f64,
    pub max_iterations: usize,
    /// Stop once multipliers and allocation move less than this (relative).
    pub convergence_tolerance: f64,
    /// Largest relative constraint residual a converged report may carry.
    pub feasibility_tolerance: f64,
    /// SINR floor applied before forming SCA coefficients.
    pub gamma_floor: f64,
    /// Re-expand the SCA surrogates every this many iterations.
    pub sca_refresh_every: usize,
    pub sca_weight: ScaWeight,
    pub init_common_coeff: f64,
    pub init_private_total: f64,
    pub init_multiplier: f64,
    /// `lambda1` above this, with a non-shrinking violation, marks the min-rate
    /// constraint as unreachable.
    pub infeasible_lambda_cap: f64,
    pub infeasible_patience: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub num_beams: usize,
    pub num_resource_blocks: usize,
    pub num_users: usize,
    /// Watts.
    pub total_power: f64,
    /// Watts at the GEO user.
    pub interference_threshold: f64,
    /// Watts received from the GEO satellite at every LEO user.
    pub geo_interference: f64,
    /// Bits per second.
    pub min_rate: f64,
    /// Hertz per beam.
    pub bandwidth: f64,
    pub carrier_frequency: f64,
    pub noise_density_dbm_hz: f64,
    pub beam_gain: BeamGainParams,
    pub antenna: AntennaGains,
    pub channel_mode: ChannelMode,
    pub geometry: GeometryParams,
    pub block_mode: BlockMode,
    pub solver: SolverSettings,
    pub rng_seed: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            step_size: 1e-3,
            step_decay: 0.999,
            max_iterations: 10_000,
            convergence_tolerance: 1e-6,
            feasibility_tolerance: 1e-6,
            gamma_floor: 1e-9,
            sca_refresh_every: 1,
            sca_weight: ScaWeight::Surrogate,
            init_common_coeff: 0.2,
            init_private_total: 0.8,
            init_multiplier: 0.1,
            infeasible_lambda_cap: 1e6,
            infeasible_patience: 500,
        }
    }
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            num_beams: 5,
            num_resource_blocks: 5,
            num_users: 10,
            total_power: 60.0,
            interference_threshold: 3.0,
            geo_interference: 4.0,
            min_rate: 1e6,
            bandwidth: 10e6,
            carrier_frequency: 19e9,
            noise_density_dbm_hz: -170.0,
            beam_gain: BeamGainParams {
                g_max: 10f64.powf(4.1),
                theta_3db: 0.07,
                sidelobe_floor: 1e-3,
            },
            antenna: AntennaGains { g_t: 1.0, g_r: 1.0 },
            channel_mode: ChannelMode::Normalized,
            geometry: GeometryParams {
                layout: UserLayout::HomeBeam,
                angle_spread: 1.0,
                beam_spacing: 3f64.sqrt(),
                altitude_m: 600e3,
                leo_to_geo_lo: 0.01,
                leo_to_geo_hi: 0.1,
            },
            block_mode: BlockMode::Paired,
            solver: SolverSettings::default(),
            rng_seed: 1,
        }
    }
}

impl SystemConfig {
    /// Default scenario with `beams` beams, as many blocks and twice as many users.
    pub fn with_beams(beams: usize) -> Self {
        SystemConfig::default().scaled_to_beams(beams)
    }

    /// Sets `M = K = beams` and `U = 2M`.
    pub fn scaled_to_beams(mut self, beams: usize) -> Self {
        self.num_beams = beams;
        self.num_resource_blocks = beams;
        self.num_users = 2 * beams;
        self
    }

    /// Thermal noise power over one beam's bandwidth, watts.
    pub fn noise_power(&self) -> f64 {
        super::noise_power(self.noise_density_dbm_hz, self.bandwidth)
    }

    /// `ceil(U / M)`: the per-beam user cap of the greedy assignment.
    pub fn users_per_beam(&self) -> usize {
        self.num_users.div_ceil(self.num_beams)
    }

    /// Min rate in units of the beam bandwidth (bits/s/Hz).
    pub fn min_rate_normalized(&self) -> f64 {
        self.min_rate / self.bandwidth
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if self.num_beams == 0 || self.num_resource_blocks == 0 || self.num_users == 0 {
            return Err(Error::config(
                "num_beams, num_resource_blocks and num_users must be >= 1",
            ));
        }
        if self.num_users < self.num_beams {
            return Err(Error::config(format!(
                "num_users ({}) must be at least num_beams ({})",
                self.num_users, self.num_beams
            )));
        }
        positive("total_power", self.total_power)?;
        positive("interference_threshold", self.interference_threshold)?;
        positive("bandwidth", self.bandwidth)?;
        positive("carrier_frequency", self.carrier_frequency)?;
        positive("g_max", self.beam_gain.g_max)?;
        positive("theta_3db", self.beam_gain.theta_3db)?;
        positive("g_t", self.antenna.g_t)?;
        positive("g_r", self.antenna.g_r)?;
        positive("altitude_m", self.geometry.altitude_m)?;
        positive("angle_spread", self.geometry.angle_spread)?;
        positive("step_size", self.solver.step_size)?;
        positive("convergence_tolerance", self.solver.convergence_tolerance)?;
        positive("feasibility_tolerance", self.solver.feasibility_tolerance)?;
        positive("gamma_floor", self.solver.gamma_floor)?;
        if self.beam_gain.theta_3db >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::config("theta_3db must be below pi/2"));
        }
        if !(0.0..1.0).contains(&self.beam_gain.sidelobe_floor) {
            return Err(Error::config("sidelobe_floor must lie in [0, 1)"));
        }
        if !(self.geo_interference >= 0.0 && self.geo_interference.is_finite()) {
            return Err(Error::config("geo_interference must be non-negative"));
        }
        if !(self.min_rate >= 0.0 && self.min_rate.is_finite()) {
            return Err(Error::config("min_rate must be non-negative"));
        }
        if !(self.geometry.beam_spacing >= 0.0 && self.geometry.beam_spacing.is_finite()) {
            return Err(Error::config("beam_spacing must be non-negative"));
        }
        let (lo, hi) = (self.geometry.leo_to_geo_lo, self.geometry.leo_to_geo_hi);
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::config(format!(
                "leo_to_geo gains need 0 < lo <= hi, got [{lo}, {hi}]"
            )));
        }
        if !(self.solver.step_decay > 0.0 && self.solver.step_decay <= 1.0) {
            return Err(Error::config("step_decay must lie in (0, 1]"));
        }
        if self.solver.max_iterations == 0 || self.solver.sca_refresh_every == 0 {
            return Err(Error::config("max_iterations and sca_refresh_every must be >= 1"));
        }
        let s = &self.solver;
        if !(0.0..=1.0).contains(&s.init_common_coeff)
            || !(0.0..=1.0).contains(&s.init_private_total)
            || s.init_common_coeff + s.init_private_total > 1.0 + 1e-12
        {
            return Err(Error::config(
                "initial RSMA coefficients must be in [0, 1] and sum to at most 1",
            ));
        }
        if !(s.init_multiplier >= 0.0) {
            return Err(Error::config("init_multiplier must be non-negative"));
        }
        if !(self.noise_power() > 0.0) {
            return Err(Error::config("noise power must be positive"));
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_kv(&text, &path.display().to_string())
    }

    /// Parses `key = value` lines on top of the defaults. `#` starts a comment.
    /// When `num_users` is absent it follows `2 * num_beams`.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        Self::parse_kv(text, "<string>")
    }

    fn parse_kv(text: &str, origin: &str) -> Result<Self> {
        let mut cfg = SystemConfig::default();
        let mut users_given = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let location = || format!("{origin}:{}", lineno + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                location: location(),
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value).map_err(|message| Error::Parse {
                location: location(),
                message,
            })?;
            users_given |= key == "num_users";
        }
        if !users_given {
            cfg.num_users = 2 * cfg.num_beams;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its textual key and value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse::<T>().map_err(|_| format!("invalid value `{v}` for `{key}`"))
        }
        let g = &mut self.geometry;
        let s = &mut self.solver;
        match key {
            "num_beams" => self.num_beams = num(key, value)?,
            "num_resource_blocks" => self.num_resource_blocks = num(key, value)?,
            "num_users" => self.num_users = num(key, value)?,
            "total_power_w" => self.total_power = num(key, value)?,
            "interference_threshold_w" => self.interference_threshold = num(key, value)?,
            "geo_interference_w" => self.geo_interference = num(key, value)?,
            "min_rate_bps" => self.min_rate = num(key, value)?,
            "bandwidth_hz" => self.bandwidth = num(key, value)?,
            "carrier_frequency_hz" => self.carrier_frequency = num(key, value)?,
            "noise_density_dbm_hz" => self.noise_density_dbm_hz = num(key, value)?,
            "g_max" => self.beam_gain.g_max = num(key, value)?,
            "theta_3db_rad" => self.beam_gain.theta_3db = num(key, value)?,
            "sidelobe_floor" => self.beam_gain.sidelobe_floor = num(key, value)?,
            "g_t" => self.antenna.g_t = num(key, value)?,
            "g_r" => self.antenna.g_r = num(key, value)?,
            "channel_mode" => {
                self.channel_mode = match value {
                    "normalized" => ChannelMode::Normalized,
                    "physical" => ChannelMode::Physical,
                    _ => return Err(format!("unknown channel_mode `{value}`")),
                }
            }
            "user_layout" => {
                g.layout = match value {
                    "home_beam" => UserLayout::HomeBeam,
                    "independent" => UserLayout::Independent,
                    _ => return Err(format!("unknown user_layout `{value}`")),
                }
            }
            "angle_spread" => g.angle_spread = num(key, value)?,
            "beam_spacing" => g.beam_spacing = num(key, value)?,
            "altitude_m" => g.altitude_m = num(key, value)?,
            "leo_to_geo_lo" => g.leo_to_geo_lo = num(key, value)?,
            "leo_to_geo_hi" => g.leo_to_geo_hi = num(key, value)?,
            "block_mode" => {
                self.block_mode = match value {
                    "paired" => BlockMode::Paired,
                    "all_blocks" => BlockMode::AllBlocks,
                    _ => return Err(format!("unknown block_mode `{value}`")),
                }
            }
            "step_size" => s.step_size = num(key, value)?,
            "step_decay" => s.step_decay = num(key, value)?,
            "max_iterations" => s.max_iterations = num(key, value)?,
            "convergence_tolerance" => s.convergence_tolerance = num(key, value)?,
            "feasibility_tolerance" => s.feasibility_tolerance = num(key, value)?,
            "gamma_floor" => s.gamma_floor = num(key, value)?,
            "sca_refresh_every" => s.sca_refresh_every = num(key, value)?,
            "sca_weight" => {
                s.sca_weight = match value {
                    "surrogate" => ScaWeight::Surrogate,
                    "sinr" => ScaWeight::Sinr,
                    _ => return Err(format!("unknown sca_weight `{value}`")),
                }
            }
            "init_common_coeff" => s.init_common_coeff = num(key, value)?,
            "init_private_total" => s.init_private_total = num(key, value)?,
            "init_multiplier" => s.init_multiplier = num(key, value)?,
            "infeasible_lambda_cap" => s.infeasible_lambda_cap = num(key, value)?,
            "infeasible_patience" => s.infeasible_patience = num(key, value)?,
            "rng_seed" => self.rng_seed = num(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Serializes every field; `from_kv_str(cfg.to_kv_string())` reproduces `cfg`.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::from("# rsma scenario configuration\n");
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("num_beams", self.num_beams.to_string());
        put("num_resource_blocks", self.num_resource_blocks.to_string());
        put("num_users", self.num_users.to_string());
        put("total_power_w", self.total_power.to_string());
        put("interference_threshold_w", self.interference_threshold.to_string());
        put("geo_interference_w", self.geo_interference.to_string());
        put("min_rate_bps", self.min_rate.to_string());
        put("bandwidth_hz", self.bandwidth.to_string());
        put("carrier_frequency_hz", self.carrier_frequency.to_string());
        put("noise_density_dbm_hz", self.noise_density_dbm_hz.to_string());
        put("g_max", self.beam_gain.g_max.to_string());
        put("theta_3db_rad", self.beam_gain.theta_3db.to_string());
        put("sidelobe_floor", self.beam_gain.sidelobe_floor.to_string());
        put("g_t", self.antenna.g_t.to_string());
        put("g_r", self.antenna.g_r.to_string());
        put(
            "channel_mode",
            match self.channel_mode {
                ChannelMode::Normalized => "normalized",
                ChannelMode::Physical => "physical",
            }
            .into(),
        );
        let g = &self.geometry;
        put(
            "user_layout",
            match g.layout {
                UserLayout::HomeBeam => "home_beam",
                UserLayout::Independent => "independent",
            }
            .into(),
        );
        put("angle_spread", g.angle_spread.to_string());
        put("beam_spacing", g.beam_spacing.to_string());
        put("altitude_m", g.altitude_m.to_string());
        put("leo_to_geo_lo", g.leo_to_geo_lo.to_string());
        put("leo_to_geo_hi", g.leo_to_geo_hi.to_string());
        put(
            "block_mode",
            match self.block_mode {
                BlockMode::Paired => "paired",
                BlockMode::AllBlocks => "all_blocks",
            }
            .into(),
        );
        let s = &self.solver;
        put("step_size", s.step_size.to_string());
        put("step_decay", s.step_decay.to_string());
        put("max_iterations", s.max_iterations.to_string());
        put("convergence_tolerance", s.convergence_tolerance.to_string());
        put("feasibility_tolerance", s.feasibility_tolerance.to_string());
        put("gamma_floor", s.gamma_floor.to_string());
        put("sca_refresh_every", s.sca_refresh_every.to_string());
        put(
            "sca_weight",
            match s.sca_weight {
                ScaWeight::Surrogate => "surrogate",
                ScaWeight::Sinr => "sinr",
            }
            .into(),
        );
        put("init_common_coeff", s.init_common_coeff.to_string());
        put("init_private_total", s.init_private_total.to_string());
        put("init_multiplier", s.init_multiplier.to_string());
        put("infeasible_lambda_cap", s.infeasible_lambda_cap.to_string());
        put("infeasible_patience", s.infeasible_patience.to_string());
        put("rng_seed", self.rng_seed.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SystemConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.users_per_beam(), 2);
        assert!((cfg.min_rate_normalized() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn kv_round_trip() {
        let mut cfg = SystemConfig::with_beams(3);
        cfg.total_power = 42.5;
        cfg.geometry.layout = UserLayout::Independent;
        cfg.solver.sca_weight = ScaWeight::Sinr;
        cfg.rng_seed = u64::MAX;
        let back = SystemConfig::from_kv_str(&cfg.to_kv_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn comments_blank_lines_and_derived_users() {
        let text = "# header\n\nnum_beams = 3   # three beams\n num_resource_blocks=3\n";
        let cfg = SystemConfig::from_kv_str(text).unwrap();
        assert_eq!(cfg.num_beams, 3);
        assert_eq!(cfg.num_users, 6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            SystemConfig::from_kv_str("bogus = 1"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            SystemConfig::from_kv_str("total_power_w = abc"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            SystemConfig::from_kv_str("no equals sign"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            SystemConfig::from_kv_str("total_power_w = -1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            SystemConfig::from_kv_str("num_beams = 4\nnum_users = 3"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_noise_power_rejected() {
        let mut cfg = SystemConfig::default();
        cfg.noise_density_dbm_hz = f64::NEG_INFINITY;
        assert!(cfg.validate().is_err());
    }
}
