use crate::model::{DualState, ScaWeight};

/// Rate-gradient weights of one (beam, block) read from the SCA point.
pub(crate) struct GroupWeights<'a> {
    dual: &'a DualState,
    mode: ScaWeight,
    m: usize,
    k: usize,
}

impl<'a> GroupWeights<'a> {
    pub fn new(dual: &'a DualState, mode: ScaWeight, m: usize, k: usize) -> Self {
        GroupWeights { dual, mode, m, k }
    }

    pub fn private(&self, u: usize) -> f64 {
        let idx = [self.m, u, self.k];
        match self.mode {
            ScaWeight::Surrogate => self.dual.sca.private_tau[idx] / std::f64::consts::LN_2,
            ScaWeight::Sinr => self.dual.sca.private_sinr[idx],
        }
    }

    pub fn common(&self) -> f64 {
        let idx = [self.m, self.k];
        match self.mode {
            ScaWeight::Surrogate => self.dual.sca.common_tau[idx] / std::f64::consts::LN_2,
            ScaWeight::Sinr => self.dual.sca.common_sinr[idx],
        }
    }
}
