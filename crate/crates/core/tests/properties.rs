use ndarray::{Array1, Array2, Array3};
use proptest::prelude::*;

use rsma_core::assignment::{greedy_assign, random_assign, Assignment};
use rsma_core::experiment::csv::{parse_sweep_csv, sweep_csv_string};
use rsma_core::experiment::sweep::{aggregate, TrialRecord};
use rsma_core::experiment::{SweepParameter, SweepResult};
use rsma_core::frameworks::FrameworkKind;
use rsma_core::model::{generate_realization, ChannelRealization, DualState, SystemConfig};
use rsma_core::rates::pattern::beam_gain_with_floor;
use rsma_core::rates::sca_coefficients;
use rsma_core::rates::sinr::{common_sinr_kernel, private_sinr_kernel};
use rsma_core::solver::{update_multipliers, Subgradients};

fn scenario() -> impl Strategy<Value = SystemConfig> {
    (1usize..5, 1usize..4, 0u64..1000, prop::bool::ANY).prop_map(|(m, per_beam, seed, all_blocks)| {
        let mut cfg = SystemConfig::default();
        cfg.num_beams = m;
        cfg.num_resource_blocks = m;
        cfg.num_users = m * per_beam;
        cfg.rng_seed = seed;
        if all_blocks {
            cfg.block_mode = rsma_core::model::BlockMode::AllBlocks;
        }
        cfg
    })
}

fn check_assignment(a: &Assignment, cfg: &SystemConfig) {
    let (mc, uc, kc) = a.x.dim();
    assert_eq!((mc, uc, kc), (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks));
    for u in 0..uc {
        let n: usize = a.x.slice(ndarray::s![.., u, ..]).iter().filter(|&&b| b).count();
        assert_eq!(n, 1, "user {u}");
    }
    a.check(cfg.users_per_beam()).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realizations_are_reproducible_and_in_range(cfg in scenario(), trial in 0u64..50) {
        let a = generate_realization(&cfg, trial).unwrap();
        let b = generate_realization(&cfg, trial).unwrap();
        prop_assert_eq!(&a, &b);
        for v in a.leo_gains.iter() {
            prop_assert!(v.norm_sqr().is_finite() && v.norm_sqr() >= 0.0);
        }
        for &f in a.leo_to_geo.iter().chain(a.geo_to_leo.iter()) {
            prop_assert!(f.is_finite() && f >= 0.0);
        }
        for &t in a.boresight_angles.iter() {
            prop_assert!((0.0..std::f64::consts::FRAC_PI_2).contains(&t));
        }
    }

    #[test]
    fn normalized_gain_depends_only_on_angle(cfg in scenario(), trial in 0u64..20) {
        let real = generate_realization(&cfg, trial).unwrap();
        for ((m, u, k), h) in real.leo_gains.indexed_iter() {
            let theta = real.boresight_angles[[m, u, k]];
            let want = beam_gain_with_floor(theta, &cfg.beam_gain);
            prop_assert!((h.norm_sqr() - want).abs() <= 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn private_sinr_monotone(
        gain in 1e-3f64..1e3, own in 0f64..1.0, others in 0f64..1.0,
        p in 1e-3f64..60.0, noise in 0.1f64..10.0, d in 1e-6f64..0.1,
    ) {
        let base = private_sinr_kernel(gain, own, others, p, noise);
        prop_assert!(private_sinr_kernel(gain, own + d, others, p, noise) >= base);
        prop_assert!(private_sinr_kernel(gain, own, others + d, p, noise) <= base);
    }

    #[test]
    fn dropping_the_bottleneck_user_never_lowers_common_sinr(
        gains in prop::collection::vec(1e-3f64..1e3, 2..6),
        e0 in 0f64..1.0, total in 0f64..1.0, p in 1e-3f64..60.0, noise in 0.1f64..10.0,
    ) {
        let sinr = |g: &[f64]| g.iter()
            .map(|&a| common_sinr_kernel(a, e0, total, p, noise))
            .fold(f64::INFINITY, f64::min);
        let full = sinr(&gains);
        let (arg, _) = gains.iter().enumerate()
            .map(|(i, &a)| (i, common_sinr_kernel(a, e0, total, p, noise)))
            .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        let mut rest = gains.clone();
        rest.remove(arg);
        prop_assert!(sinr(&rest) >= full);
    }

    #[test]
    fn surrogate_is_tight_and_below(g0 in -3f64..3.0, g in -3f64..3.0) {
        let (g0, g) = (10f64.powf(g0), 10f64.powf(g));
        let c = sca_coefficients(g0).unwrap();
        prop_assert!((c.surrogate(g0) - (1.0 + g0).log2()).abs() < 1e-12);
        prop_assert!(c.surrogate(g) <= (1.0 + g).log2() + 1e-12);
    }

    #[test]
    fn multipliers_stay_nonnegative(
        seed in 0u64..1000, step in 1e-4f64..10.0, init in 0f64..2.0, freeze in prop::bool::ANY,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cfg = SystemConfig::default();
        let (mc, uc, kc) = (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks);
        let mut draw = |lo: f64, hi: f64| rng.gen_range(lo..hi);
        let served = Array1::from_shape_fn(uc, |_| draw(0.0, 5.0));
        let shares = Array3::from_shape_fn((mc, uc, kc), |_| draw(0.0, 2.0));
        let common = Array2::from_shape_fn((mc, kc), |_| draw(0.0, 5.0));
        let interference = Array2::from_shape_fn((mc, kc), |_| draw(0.0, 6.0));
        let load = Array2::from_shape_fn((mc, kc), |_| draw(0.0, 2.0));
        let active = Array2::from_shape_fn((mc, kc), |(m, k)| (m + k) % 3 != 0);
        let power_sum = draw(0.0, 120.0);
        let mut dual = DualState::filled(&cfg, init);
        for _ in 0..5 {
            dual = update_multipliers(&dual, &Subgradients {
                served: &served,
                min_rate: 0.1,
                shares: &shares,
                common_rate: &common,
                interference: &interference,
                interference_threshold: cfg.interference_threshold,
                coefficient_load: &load,
                power_sum,
                total_power: cfg.total_power,
                active: &active,
                freeze_power_prices: freeze,
            }, step);
            prop_assert!(dual.is_nonnegative());
        }
    }

    #[test]
    fn assignments_are_valid(cfg in scenario(), trial in 0u64..20) {
        let real = generate_realization(&cfg, trial).unwrap();
        check_assignment(&greedy_assign(&real, &cfg), &cfg);
        let r = random_assign(&cfg, trial);
        check_assignment(&r, &cfg);
        prop_assert_eq!(r.x, random_assign(&cfg, trial).x);
    }

    #[test]
    fn greedy_is_invariant_to_user_relabeling(
        seed in 0u64..500, dup in 0usize..4,
        perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        // users `dup` and `dup + 4` share a channel column, so the tie-break
        // order decides between them
        let mut cfg = SystemConfig::default();
        cfg.num_beams = 2;
        cfg.num_resource_blocks = 2;
        cfg.num_users = 8;
        cfg.rng_seed = seed;
        let base = generate_realization(&cfg, 0).unwrap();
        let mut power = base.leo_gains.mapv(|h| h.norm_sqr());
        let col = power.slice(ndarray::s![.., dup, ..]).to_owned();
        power.slice_mut(ndarray::s![.., dup + 4, ..]).assign(&col);
        let real = ChannelRealization::from_power_gains(power.clone(), base.leo_to_geo.clone());
        let mut permuted = power.clone();
        for (new, &old) in perm.iter().enumerate() {
            permuted.slice_mut(ndarray::s![.., new, ..]).assign(&power.slice(ndarray::s![.., old, ..]));
        }
        let real_p = ChannelRealization::from_power_gains(permuted, base.leo_to_geo.clone());
        let a = greedy_assign(&real, &cfg).x;
        let b = greedy_assign(&real_p, &cfg).x;
        // the slot multiset of channel columns is the same
        let slots = |x: &Array3<bool>, real: &ChannelRealization| {
            let mut v: Vec<(usize, usize, Vec<u64>)> = x.indexed_iter()
                .filter(|(_, &on)| on)
                .map(|((m, u, k), _)| (m, k, (0..2).flat_map(|mm| (0..2).map(move |kk| (mm, kk)))
                    .map(|(mm, kk)| real.power_gain(mm, u, kk).to_bits()).collect()))
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(slots(&a, &real), slots(&b, &real_p));
    }

    #[test]
    fn sweep_csv_round_trips(
        rates in prop::collection::vec((0f64..1e10, 0f64..1e8, 1f64..1e4, 0f64..=1.0), 1..8),
    ) {
        let rows = rates.iter().enumerate().map(|(i, &(r, s, it, c))| rsma_core::experiment::SweepRow {
            param: 10.0 * i as f64 + 0.125,
            framework: FrameworkKind::ALL[i % 3],
            mean_sum_rate: r,
            stderr: s,
            mean_iterations: it,
            converged_fraction: c,
        }).collect::<Vec<_>>();
        let result = SweepResult { parameter: SweepParameter::TotalPower, rows, gains: vec![], trials: vec![] };
        prop_assert_eq!(parse_sweep_csv(&sweep_csv_string(&result)).unwrap(), result.rows);
    }

    #[test]
    fn aggregates_ignore_trial_order(
        rates in prop::collection::vec(0f64..1e9, 2..30), key in any::<u64>(),
    ) {
        let records: Vec<TrialRecord> = rates.iter().enumerate().map(|(t, &r)| TrialRecord {
            param: 1.0, trial: t, framework: FrameworkKind::Proposed, sum_rate: r,
            iterations: t, converged: t % 3 != 0, max_residual: 0.0,
        }).collect();
        let mut shuffled = records.clone();
        shuffled.sort_by_key(|r| (r.trial as u64).wrapping_mul(key | 1).rotate_left(7));
        let (a, b) = (aggregate(1.0, FrameworkKind::Proposed, &records), aggregate(1.0, FrameworkKind::Proposed, &shuffled));
        prop_assert!((a.mean_sum_rate - b.mean_sum_rate).abs() <= 1e-9 * a.mean_sum_rate.max(1.0));
        prop_assert!((a.stderr - b.stderr).abs() <= 1e-9 * a.stderr.max(1.0));
        prop_assert!(a.stderr >= 0.0);
        prop_assert_eq!(a.mean_iterations, b.mean_iterations);
        prop_assert_eq!(a.converged_fraction, b.converged_fraction);
        prop_assert!((0.0..=1.0).contains(&a.converged_fraction));
    }
}
