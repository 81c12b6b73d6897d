//! Sum-rate maximization for a rate-splitting multibeam LEO downlink that
//! shares spectrum with a GEO system under an interference-temperature limit.
//!
//! The crate covers channel generation ([`model`]), rate expressions
//! ([`rates`]), the iterative power/coefficient optimizer ([`solver`]),
//! user assignment ([`assignment`]), the compared schemes ([`frameworks`])
//! and a Monte Carlo harness with CLI plumbing ([`experiment`]).

pub mod assignment;
pub mod error;
pub mod experiment;
pub mod frameworks;
pub mod model;
pub mod oracle;
pub mod rates;
pub mod solver;

pub use error::{Error, Result};
