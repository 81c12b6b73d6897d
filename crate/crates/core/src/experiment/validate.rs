//! Quick oracle checks run by `rsma-sim validate`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::frameworks::run_proposed;
use crate::model::{generate_realization, ChannelRealization, SystemConfig};
use crate::oracle::{bessel_quadrature, grid_optimum_two_users, reference_sum_rate};
use crate::rates::pattern::{beam_gain, HALF_POWER_RHO};
use crate::rates::{sca_coefficients, sum_rate};
use crate::solver::{stationary_points, CubicCoefficients};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// One beam, one block, two users, drawn from `seed`.
pub fn small_instance(base: &SystemConfig, seed: u64) -> Result<(SystemConfig, ChannelRealization)> {
    let mut cfg = base.clone();
    cfg.num_beams = 1;
    cfg.num_resource_blocks = 1;
    cfg.num_users = 2;
    cfg.rng_seed = seed;
    let real = generate_realization(&cfg, 0)?;
    Ok((cfg, real))
}

/// Solver objective over the grid optimum, both in bits/s/Hz, or `None`
/// when the grid finds no feasible point.
pub fn small_instance_ratio(base: &SystemConfig, seed: u64, points: usize) -> Result<Option<(f64, f64)>> {
    let (cfg, real) = small_instance(base, seed)?;
    let f = real.leo_to_geo[[0, 0]];
    let p_max = (cfg.interference_threshold / f).min(cfg.total_power);
    let noise = cfg.geo_interference + cfg.noise_power();
    let gains = [real.power_gain(0, 0, 0), real.power_gain(0, 1, 0)];
    let Some(grid) = grid_optimum_two_users(gains, noise, p_max, cfg.min_rate_normalized(), points) else {
        return Ok(None);
    };
    let report = run_proposed(&real, &cfg)?;
    // an infeasible report scores zero
    let solver = if report.residuals.max() <= cfg.solver.feasibility_tolerance {
        report.sum_rate / cfg.bandwidth
    } else {
        0.0
    };
    Ok(Some((solver, grid.value)))
}

pub fn run_checks(base: &SystemConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let g = beam_gain(0.07, 0.07, 1.0)?;
    let r = HALF_POWER_RHO;
    let a = bessel_quadrature(1, r) / (2.0 * r) + 36.0 * bessel_quadrature(3, r) / r.powi(3);
    checks.push(Check {
        name: "beam pattern half-power point",
        passed: (g - 0.5).abs() < 0.005 && (g - a * a).abs() < 1e-10,
        detail: format!("gain {g:.6}, quadrature {:.6}", a * a),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let c = CubicCoefficients {
            zeta3: rng.gen_range(-1.0..1.0),
            zeta2: rng.gen_range(-1.0..1.0),
            zeta1: rng.gen_range(-1.0..1.0),
            zeta0: rng.gen_range(-1.0..1.0),
        };
        for root in stationary_points(&c, 10.0) {
            worst = worst.max(c.eval(root).abs() / c.root_tolerance());
        }
    }
    checks.push(Check {
        name: "cubic root residuals",
        passed: worst <= 1.0,
        detail: format!("worst residual / bound = {worst:.3e}"),
    });

    let mut sca_ok = true;
    for i in 0..100 {
        let g0 = 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0);
        let c = sca_coefficients(g0)?;
        sca_ok &= (c.surrogate(g0) - g0.ln_1p() / std::f64::consts::LN_2).abs() < 1e-12;
        for j in 0..200 {
            let g = 10f64.powf(-3.0 + 6.0 * j as f64 / 199.0);
            sca_ok &= c.surrogate(g) <= (1.0 + g).log2() + 1e-12;
        }
    }
    checks.push(Check {
        name: "SCA surrogate tight and below the rate",
        passed: sca_ok,
        detail: String::new(),
    });

    let real = generate_realization(base, 0)?;
    let report = run_proposed(&real, base)?;
    let (fast, _) = sum_rate(&real, &report.allocation, base);
    let (slow, _) = reference_sum_rate(&real, &report.allocation, base);
    checks.push(Check {
        name: "sum rate matches reference implementation",
        passed: ((fast - slow) / slow.max(1.0)).abs() < 1e-9,
        detail: format!("{fast:.3} vs {slow:.3} bit/s"),
    });

    let mut worst_ratio = f64::INFINITY;
    for seed in 0..5 {
        if let Some((solver, grid)) = small_instance_ratio(base, seed, 30)? {
            worst_ratio = worst_ratio.min(solver / grid);
        }
    }
    checks.push(Check {
        name: "single-beam solve near grid optimum",
        passed: worst_ratio >= 0.98,
        detail: format!("worst solver / grid = {worst_ratio:.4}"),
    });
    Ok(checks)
}
