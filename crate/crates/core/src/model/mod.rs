//! Scenario configuration, decision-variable containers and channel draws.

pub mod channel;
pub mod config;
pub mod state;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use channel::{generate_realization, ChannelRealization};
pub use config::{
    AntennaGains, BeamGainParams, BlockMode, ChannelMode, GeometryParams, ScaWeight, SolverSettings, SystemConfig,
    UserLayout,
};
pub use state::{AllocationState, DualState, PrecoderSet, ScaPoint};

/// Noise power in watts for a density in dBm/Hz over `bandwidth` hertz.
pub fn noise_power(density_dbm_hz: f64, bandwidth: f64) -> f64 {
    10f64.powf((density_dbm_hz - 30.0) / 10.0) * bandwidth
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for per-trial consumers other than the channel draw.
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ trial)
}

/// Independent, reproducible RNG for one (seed, trial, stream) triple.
pub fn trial_rng(seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed) ^ splitmix64(trial.rotate_left(17)));
    rng.set_stream(stream);
    rng
}
