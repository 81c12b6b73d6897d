//! Beam pattern, precoders, SINRs, rates and SCA surrogates.

pub mod bessel;
pub mod pattern;
pub mod precoder;
pub mod sca;
pub mod sinr;

pub use pattern::beam_gain;
pub use precoder::{compute_precoders, group_precoders, GroupPrecoders};
pub use sca::{sca_coefficients, surrogate, ScaCoefficients};
pub use sinr::{common_sinr_and_rate, private_sinr, rate_breakdown, spectral_efficiency, sum_rate, RateBreakdown};
