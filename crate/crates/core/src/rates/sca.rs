//! Log-domain SCA lower bound `log2(1 + g) >= tau log2(g) + varpi`, tight at
//! the expansion point `g0`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaCoefficients {
    pub tau: f64,
    pub varpi: f64,
}

impl ScaCoefficients {
    /// Surrogate value at `gamma`.
    pub fn surrogate(&self, gamma: f64) -> f64 {
        surrogate(gamma, self.tau, self.varpi)
    }

    /// Slope of the surrogate in `ln(gamma)`, i.e. `d s / d ln(gamma)`.
    pub fn log_slope(&self) -> f64 {
        self.tau / std::f64::consts::LN_2
    }
}

/// `tau = g0/(1+g0)`, `varpi = log2(1+g0) - tau log2(g0)`.
pub fn sca_coefficients(gamma0: f64) -> Result<ScaCoefficients> {
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::domain(format!(
            "SCA expansion point must be positive, got {gamma0}"
        )));
    }
    let tau = gamma0 / (1.0 + gamma0);
    Ok(ScaCoefficients {
        tau,
        varpi: gamma0.ln_1p() / std::f64::consts::LN_2 - tau * gamma0.log2(),
    })
}

pub fn surrogate(gamma: f64, tau: f64, varpi: f64) -> f64 {
    tau * gamma.log2() + varpi
}
