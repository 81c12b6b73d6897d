//! Regularized (MMSE-type) precoders `w = (sigma^2 I + sum x eta p h h^H)^-1 h`,
//! normalized to unit length.
//!
//! With one feed per beam, the channel of a (beam, user, block) triple is a
//! scalar and every normalized weight is 1. The vector form is kept for
//! multi-feed experiments.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{AllocationState, ChannelRealization, PrecoderSet};

/// Precoders of the scalar single-feed model: all ones.
pub fn compute_precoders(real: &ChannelRealization, _alloc: &AllocationState, _noise: f64) -> PrecoderSet {
    PrecoderSet::scalar_unit(real.num_beams(), real.num_users(), real.num_blocks())
}

/// Multi-feed precoders of one (beam, block) group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPrecoders {
    pub common: DVector<Complex64>,
    pub private: Vec<DVector<Complex64>>,
}

fn covariance(
    channels: &[DVector<Complex64>],
    coeffs: &[f64],
    power: f64,
    noise: f64,
    skip: Option<usize>,
) -> DMatrix<Complex64> {
    let n = channels[0].len();
    let mut r = DMatrix::<Complex64>::identity(n, n) * Complex64::new(noise, 0.0);
    for (j, h) in channels.iter().enumerate() {
        if Some(j) == skip {
            continue;
        }
        r += h * h.adjoint() * Complex64::new(coeffs[j] * power, 0.0);
    }
    r
}

fn regularized_direction(r: DMatrix<Complex64>, target: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let w = r
        .lu()
        .solve(target)
        .ok_or_else(|| Error::domain("regularized covariance is singular"))?;
    let norm = w.norm();
    if norm == 0.0 {
        return Err(Error::domain("zero channel vector"));
    }
    Ok(w / Complex64::new(norm, 0.0))
}

/// Vector precoders for the assigned users of a group. `coeffs[j]` is user
/// `j`'s private coefficient. The private weight of `u` leaves out `u`'s own
/// stream; the common weight serves the weakest channel against all private
/// streams.
pub fn group_precoders(
    channels: &[DVector<Complex64>],
    coeffs: &[f64],
    power: f64,
    noise: f64,
) -> Result<GroupPrecoders> {
    if channels.is_empty() || channels.len() != coeffs.len() {
        return Err(Error::domain("one coefficient per channel vector required"));
    }
    if !(noise > 0.0) {
        return Err(Error::domain("noise power must be positive"));
    }
    let private = (0..channels.len())
        .map(|u| regularized_direction(covariance(channels, coeffs, power, noise, Some(u)), &channels[u]))
        .collect::<Result<Vec<_>>>()?;
    let weakest = channels
        .iter()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("non-empty");
    let common = regularized_direction(covariance(channels, coeffs, power, noise, None), weakest)?;
    Ok(GroupPrecoders { common, private })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Array2, Array3};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_mode_all_unit() {
        let real =
            ChannelRealization::from_power_gains(Array3::from_elem((2, 3, 2), 0.4), Array2::from_elem((2, 2), 0.05));
        let mut cfg = crate::model::SystemConfig::default();
        cfg.num_beams = 2;
        cfg.num_resource_blocks = 2;
        cfg.num_users = 3;
        let set = compute_precoders(&real, &AllocationState::zeros(&cfg), 1e-13);
        assert!(set.common.iter().chain(set.private.iter()).all(|w| *w == c(1.0, 0.0)));
    }

    #[test]
    fn large_noise_gives_matched_filter() {
        let h1 = DVector::from_vec(vec![c(1.0, 0.5), c(-0.3, 2.0)]);
        let h2 = DVector::from_vec(vec![c(0.2, 0.0), c(1.0, -1.0)]);
        let pre = group_precoders(&[h1.clone(), h2], &[0.5, 0.5], 10.0, 1e12).unwrap();
        let mf = &h1 / c(h1.norm(), 0.0);
        assert!((&pre.private[0] - mf).norm() < 1e-9);
    }

    #[test]
    fn two_feed_matches_explicit_inverse() {
        let h1 = DVector::from_vec(vec![c(1.0, 0.0), c(0.5, 0.5)]);
        let h2 = DVector::from_vec(vec![c(0.3, -0.2), c(1.2, 0.0)]);
        let (eta, p, s2) = ([0.4, 0.3], 5.0, 0.7);
        let pre = group_precoders(&[h1.clone(), h2.clone()], &eta, p, s2).unwrap();

        // R = s2 I + eta2 p h2 h2^H, inverted by the 2x2 adjugate formula
        let q = eta[1] * p;
        let a = c(s2, 0.0) + h2[0] * h2[0].conj() * q;
        let b = h2[0] * h2[1].conj() * q;
        let cc = h2[1] * h2[0].conj() * q;
        let d = c(s2, 0.0) + h2[1] * h2[1].conj() * q;
        let det = a * d - b * cc;
        let w0 = (d * h1[0] - b * h1[1]) / det;
        let w1 = (-cc * h1[0] + a * h1[1]) / det;
        let n = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
        assert!((pre.private[0][0] - w0 / n).norm() < 1e-12);
        assert!((pre.private[0][1] - w1 / n).norm() < 1e-12);
        assert!((pre.common.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = DVector::from_vec(vec![c(1.0, 0.0)]);
        assert!(group_precoders(&[], &[], 1.0, 1.0).is_err());
        assert!(group_precoders(&[h.clone()], &[0.5], 1.0, 0.0).is_err());
        assert!(group_precoders(&[h], &[0.5, 0.5], 1.0, 1.0).is_err());
    }
}
