//! Beam-power stationarity cubic `z3 p^3 + z2 p^2 + z1 p + z0 = 0`.

use super::weights::GroupWeights;
use crate::model::{AllocationState, ChannelRealization, DualState, SystemConfig};
use crate::rates::sinr::private_gain;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicCoefficients {
    pub zeta3: f64,
    pub zeta2: f64,
    pub zeta1: f64,
    pub zeta0: f64,
}

impl CubicCoefficients {
    pub fn eval(&self, p: f64) -> f64 {
        ((self.zeta3 * p + self.zeta2) * p + self.zeta1) * p + self.zeta0
    }

    fn derivative(&self, p: f64) -> f64 {
        (3.0 * self.zeta3 * p + 2.0 * self.zeta2) * p + self.zeta1
    }

    /// Residual tolerance accepted for a root.
    pub fn root_tolerance(&self) -> f64 {
        1e-9 * self.zeta0.abs().max(1.0)
    }
}

/// The cubic degenerates to a non-zero constant: no stationary point exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoStationaryPoint;

impl std::fmt::Display for NoStationaryPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("beam-power polynomial has no stationary point")
    }
}

impl std::error::Error for NoStationaryPoint {}

/// Per-user data entering the stationarity sums.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairTerm {
    pub gain: f64,
    pub coeff: f64,
    /// Private-rate weight standing in for `gamma * W`.
    pub weight: f64,
    pub lambda1: f64,
    /// 1 for a real user, 0 for the phantom partner of a lone user.
    pub x: f64,
}

/// Assembles the sums over ordered pairs `(u, j != u)`.
///
/// `price` is `lambda5 + f lambda3`, `noise` is `I_p + sigma^2` and
/// `common_weight` multiplies `lambda2` in place of `gamma_c W`.
pub(crate) fn assemble(
    users: &[PairTerm],
    noise: f64,
    price: f64,
    lambda2: f64,
    common_weight: f64,
) -> CubicCoefficients {
    let phantom = PairTerm {
        gain: 0.0,
        coeff: 0.0,
        weight: 0.0,
        lambda1: 0.0,
        x: 0.0,
    };
    let lone = [users.first().copied().unwrap_or(phantom), phantom];
    let list: &[PairTerm] = if users.len() == 1 { &lone } else { users };
    let n = noise;
    let c = price;
    let lc = lambda2 * common_weight;
    let mut z = CubicCoefficients {
        zeta3: 0.0,
        zeta2: 0.0,
        zeta1: 0.0,
        zeta0: 0.0,
    };
    for (iu, u) in list.iter().enumerate() {
        if u.x == 0.0 {
            continue;
        }
        let own = lc + u.weight + u.lambda1 * u.weight;
        for (ij, j) in list.iter().enumerate() {
            if ij == iu {
                continue;
            }
            // hu, hj are power gains; x factors kept explicit to mirror the sums
            let (hu, hj) = (u.gain, j.gain);
            let (eu, ej) = (u.coeff, j.coeff);
            let (xu, xj) = (u.x, j.x);
            z.zeta3 += hj * hu * ej * eu * xj * xu * c;
            z.zeta2 += hj * eu * n * xu * c + hu * ej * xj * (c * n - hj * eu * (lc + u.lambda1 * u.weight) * xu);
            z.zeta1 += n * n * c
                + n * (-hj * eu * own * xu - hu * ej * xj * (j.weight * xj + lc * xu + u.lambda1 * u.weight * xu));
            z.zeta0 += -n * n * (j.weight * xj + own * xu);
        }
    }
    z
}

/// Coefficients for `(m, k)` at the current iterate. Users outside the group
/// contribute nothing.
pub fn cubic_coefficients(
    real: &ChannelRealization,
    alloc: &AllocationState,
    dual: &DualState,
    m: usize,
    k: usize,
    cfg: &SystemConfig,
) -> CubicCoefficients {
    let w = GroupWeights::new(dual, cfg.solver.sca_weight, m, k);
    let users: Vec<PairTerm> = alloc
        .group_members(m, k)
        .into_iter()
        .map(|u| PairTerm {
            gain: private_gain(real, alloc, m, u, k),
            coeff: alloc.private_coeff[[m, u, k]],
            weight: w.private(u),
            lambda1: dual.lambda1[u],
            x: 1.0,
        })
        .collect();
    let price = dual.lambda5 + real.leo_to_geo[[m, k]] * dual.lambda3[[m, k]];
    assemble(
        &users,
        cfg.geo_interference + cfg.noise_power(),
        price,
        dual.lambda2[[m, k]],
        w.common(),
    )
}

/// All real roots, each polished by Newton steps.
pub fn real_roots(c: &CubicCoefficients) -> Vec<f64> {
    let scale = c.zeta3.abs().max(c.zeta2.abs()).max(c.zeta1.abs()).max(c.zeta0.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let tiny = |v: f64| v.abs() <= 1e-15 * scale;
    let raw = if !tiny(c.zeta3) {
        cubic_roots(c.zeta2 / c.zeta3, c.zeta1 / c.zeta3, c.zeta0 / c.zeta3)
    } else if !tiny(c.zeta2) {
        quadratic_roots(c.zeta2, c.zeta1, c.zeta0)
    } else if !tiny(c.zeta1) {
        vec![-c.zeta0 / c.zeta1]
    } else {
        Vec::new()
    };
    raw.into_iter()
        .filter(|r| r.is_finite())
        .map(|r| polish(c, r))
        .collect()
}

fn polish(c: &CubicCoefficients, mut r: f64) -> f64 {
    for _ in 0..3 {
        let f = c.eval(r);
        let d = c.derivative(r);
        if f == 0.0 || d == 0.0 {
            break;
        }
        let next = r - f / d;
        if !(next.is_finite() && c.eval(next).abs() < f.abs()) {
            break;
        }
        r = next;
    }
    r
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // a double root perturbed by rounding still counts
        let vertex = -b / (2.0 * a);
        return if disc > -1e-12 * b * b {
            vec![vertex]
        } else {
            Vec::new()
        };
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Roots of the monic cubic `p^3 + a p^2 + b p + c`.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = a / 3.0;
    // depressed: t^3 + pp t + qq with p = t - a/3
    let pp = b - a * a / 3.0;
    let qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let half_q = qq / 2.0;
    let third_p = pp / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    if disc > 0.0 {
        let s = disc.sqrt();
        // avoid cancellation by taking the larger-magnitude term first
        let big = if half_q >= 0.0 { -half_q - s } else { -half_q + s };
        let u = big.cbrt();
        let v = if u != 0.0 { -third_p / u } else { 0.0 };
        vec![u + v - shift]
    } else if third_p == 0.0 {
        vec![-shift]
    } else {
        let r = (-third_p).sqrt();
        let arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        (0..3)
            .map(|i| 2.0 * r * ((phi - 2.0 * std::f64::consts::PI * i as f64) / 3.0).cos() - shift)
            .collect()
    }
}

/// Real roots inside `[0, p_max]`.
pub fn stationary_points(c: &CubicCoefficients, p_max: f64) -> Vec<f64> {
    real_roots(c)
        .into_iter()
        .filter(|&r| (0.0..=p_max).contains(&r))
        .collect()
}

/// Chooses the beam power among the stationary points in `[0, p_max]` and the
/// two interval ends, maximizing `objective`.
pub fn solve_beam_power(
    coef: &CubicCoefficients,
    p_max: f64,
    objective: impl Fn(f64) -> f64,
) -> Result<f64, NoStationaryPoint> {
    if coef.zeta3 == 0.0 && coef.zeta2 == 0.0 && coef.zeta1 == 0.0 {
        return Err(NoStationaryPoint);
    }
    let mut best = (0.0, objective(0.0));
    let top = objective(p_max);
    if top > best.1 {
        best = (p_max, top);
    }
    for r in stationary_points(coef, p_max) {
        let v = objective(r);
        if v > best.1 {
            best = (r, v);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coef(z3: f64, z2: f64, z1: f64, z0: f64) -> CubicCoefficients {
        CubicCoefficients {
            zeta3: z3,
            zeta2: z2,
            zeta1: z1,
            zeta0: z0,
        }
    }

    #[test]
    fn linear_case() {
        let p = solve_beam_power(&coef(0.0, 0.0, 1.0, -5.0), 10.0, |p| -(p - 5.0).powi(2)).unwrap();
        assert!((p - 5.0).abs() < 1e-15);
    }

    #[test]
    fn factored_cubic_roots() {
        let c = coef(1.0, -6.0, 11.0, -6.0);
        let mut r = real_roots(&c);
        r.sort_by(f64::total_cmp);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn factored_cubic_selection_matches_grid() {
        // objective whose derivative is -(p-1)(p-2)(p-3): maxima at 1 and 3
        let objective = |p: f64| -(p.powi(4) / 4.0 - 2.0 * p.powi(3) + 5.5 * p * p - 6.0 * p);
        let c = coef(1.0, -6.0, 11.0, -6.0);
        for p_max in [1.5, 2.5, 3.5, 10.0] {
            let chosen = solve_beam_power(&c, p_max, objective).unwrap();
            let grid = (0..=100_000)
                .map(|i| p_max * i as f64 / 100_000.0)
                .max_by(|a, b| objective(*a).total_cmp(&objective(*b)))
                .unwrap();
            assert!(objective(chosen) >= objective(grid) - 1e-9, "p_max {p_max}");
            // 1 and 3 tie exactly, so only the objective is compared
            assert!(
                [0.0, 1.0, 2.0, 3.0, p_max].iter().any(|c| (chosen - c).abs() < 1e-9),
                "{chosen} vs {grid}"
            );
        }
    }

    #[test]
    fn degenerate_constant() {
        assert_eq!(
            solve_beam_power(&coef(0.0, 0.0, 0.0, 2.0), 1.0, |p| p),
            Err(NoStationaryPoint)
        );
    }

    #[test]
    fn double_and_triple_roots() {
        let c = coef(1.0, -3.0, 3.0, -1.0);
        for r in real_roots(&c) {
            assert!(c.eval(r).abs() <= c.root_tolerance());
            assert!((r - 1.0).abs() < 1e-5);
        }
        let q = coef(0.0, 1.0, -4.0, 4.0);
        let r = real_roots(&q);
        assert!(!r.is_empty() && r.iter().all(|v| (v - 2.0).abs() < 1e-7));
    }

    #[test]
    fn fuzzed_roots_meet_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let c = coef(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            for r in stationary_points(&c, 10.0) {
                assert!(c.eval(r).abs() <= c.root_tolerance(), "{c:?} root {r}");
            }
        }
    }

    #[test]
    fn lone_user_has_closed_form() {
        let user = PairTerm {
            gain: 3.0,
            coeff: 0.6,
            weight: 0.9,
            lambda1: 0.5,
            x: 1.0,
        };
        let z = assemble(&[user], 4.0, 0.2, 0.3, 0.7);
        assert_eq!((z.zeta3, z.zeta2), (0.0, 0.0));
        let p = -z.zeta0 / z.zeta1;
        assert!((p - (0.3 * 0.7 + 1.5 * 0.9) / 0.2).abs() < 1e-12);
    }

    #[test]
    fn empty_group_gives_zero() {
        let z = assemble(&[], 4.0, 0.2, 0.3, 0.7);
        assert_eq!(z, coef(0.0, 0.0, 0.0, 0.0));
    }
}
