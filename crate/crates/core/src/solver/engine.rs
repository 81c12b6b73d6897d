//! The SCA/KKT iteration: beam powers, coefficients, common shares and
//! multipliers updated in turn until the iterate settles.
//!
//! Internally every rate is in bits/s/Hz, so the bandwidth factor of the
//! closed forms is 1 and the rate multipliers are prices per hertz. Reports
//! convert rates and shares back to bits/s.

use std::io::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2, Array3};

use super::cubic::{self, PairTerm};
use super::dual::{update_common_share, update_multipliers, Subgradients};
use super::eta::{self, Interferer};
use crate::error::{Error, Result};
use crate::model::{AllocationState, ChannelRealization, DualState, ScaWeight, SystemConfig};
use crate::rates::precoder::compute_precoders;
use crate::rates::sca::sca_coefficients;
use crate::rates::sinr::{common_gain, private_gain, rate_breakdown, spectral_efficiency, RateBreakdown};

/// Relative constraint residuals; 0 means satisfied.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    /// Worst min-rate shortfall over `R_min`.
    pub min_rate: f64,
    /// Worst common-rate overcommitment over `max(R_c, R_min)`.
    pub common_rate: f64,
    /// Worst `f p - I_th` over `I_th`.
    pub interference: f64,
    /// Worst coefficient load above 1.
    pub coefficient_budget: f64,
    /// Total power above `P_tot`, over `P_tot`.
    pub total_power: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.min_rate,
            self.common_rate,
            self.interference,
            self.coefficient_budget,
            self.total_power,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn evaluate(
        real: &ChannelRealization,
        alloc: &AllocationState,
        rates: &RateBreakdown,
        cfg: &SystemConfig,
    ) -> Self {
        let (mc, uc, kc) = alloc.dims();
        let mut r = Residuals::default();
        for u in 0..uc {
            r.min_rate = r.min_rate.max((cfg.min_rate - rates.total_per_user[u]) / cfg.min_rate);
        }
        for m in 0..mc {
            for k in 0..kc {
                let scale = rates.common_rate[[m, k]].max(cfg.min_rate);
                r.common_rate = r.common_rate.max(rates.common_overcommit[[m, k]] / scale);
                let p = alloc.beam_power[[m, k]];
                let f = real.leo_to_geo[[m, k]];
                r.interference = r
                    .interference
                    .max((f * p - cfg.interference_threshold) / cfg.interference_threshold);
                r.coefficient_budget = r.coefficient_budget.max(alloc.coefficient_load(m, k) - 1.0);
            }
        }
        r.total_power = ((alloc.total_power() - cfg.total_power) / cfg.total_power).max(0.0);
        r.min_rate = r.min_rate.max(0.0);
        r.interference = r.interference.max(0.0);
        r.coefficient_budget = r.coefficient_budget.max(0.0);
        r
    }
}

/// Per-iteration multiplier snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub lambda1_norm: f64,
    pub lambda2_norm: f64,
    pub lambda3_norm: f64,
    pub lambda4_norm: f64,
    pub lambda5: f64,
    /// bits/s at the iterate, before the final share recovery.
    pub sum_rate: f64,
    pub max_residual: f64,
}

pub const TRACE_HEADER: &str =
    "iteration,lambda1_norm,lambda2_norm,lambda3_norm,lambda4_norm,lambda5,sum_rate_bps,max_residual";

impl TraceRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.iteration,
            self.lambda1_norm,
            self.lambda2_norm,
            self.lambda3_norm,
            self.lambda4_norm,
            self.lambda5,
            self.sum_rate,
            self.max_residual
        )
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Common shares are in bits/s.
    pub allocation: AllocationState,
    /// Rate multipliers are per hertz of beam bandwidth.
    pub dual: DualState,
    pub rates: RateBreakdown,
    pub residuals: Residuals,
    /// bits/s.
    pub sum_rate: f64,
    pub iterations: usize,
    pub trajectory: Vec<TraceRow>,
    /// The iterate settled and every residual is within the feasibility tolerance.
    pub converged: bool,
    /// The minimum-rate multipliers diverged without the shortfall shrinking.
    pub infeasible: bool,
}

impl SolveReport {
    pub fn write_trace(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(64 * (self.trajectory.len() + 1));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for row in &self.trajectory {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Variations of the iteration used by the benchmark frameworks.
#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Beam powers held fixed for the whole run, `[beam][block]`.
    pub fixed_power: Option<Array2<f64>>,
}

struct Group {
    m: usize,
    k: usize,
    f: f64,
    p_max: f64,
    members: Vec<usize>,
    /// Coefficient sweep order: strongest channel first.
    order: Vec<usize>,
    gains: Vec<f64>,
    common_gains: Vec<f64>,
    p: f64,
    eta0: f64,
    eta: Vec<f64>,
    share: Vec<f64>,
    // SCA expansion
    gamma: Vec<f64>,
    tau: Vec<f64>,
    gamma_c: f64,
    tau_c: f64,
}

#[derive(Clone, Copy)]
struct Prices<'a> {
    lambda1: &'a [f64],
    lambda2: f64,
    lambda3: f64,
    lambda4: f64,
    lambda5: f64,
}

impl Group {
    fn load(&self) -> f64 {
        self.eta0 + self.eta.iter().sum::<f64>()
    }

    fn private_sinr(&self, i: usize, p: f64, eta: &[f64], noise: f64) -> f64 {
        let others: f64 = eta.iter().sum::<f64>() - eta[i];
        let a = self.gains[i];
        a * eta[i] * p / (noise + a * others.max(0.0) * p)
    }

    fn common_sinr(&self, p: f64, eta0: f64, eta: &[f64], noise: f64) -> f64 {
        let total: f64 = eta.iter().sum();
        self.common_gains
            .iter()
            .map(|&a| a * eta0 * p / (noise + a * total * p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Group part of the Lagrangian with exact rates.
    fn value(&self, p: f64, eta0: f64, eta: &[f64], prices: Prices<'_>, noise: f64) -> f64 {
        self.value_scaled(p, eta0, eta, 1.0, prices, noise)
    }

    /// [`Group::value`] with every private coefficient multiplied by `scale`.
    fn value_scaled(&self, p: f64, eta0: f64, eta: &[f64], scale: f64, prices: Prices<'_>, noise: f64) -> f64 {
        let total = scale * eta.iter().sum::<f64>();
        let mut v = 0.0;
        let mut gamma_c = f64::INFINITY;
        for (i, &u) in self.members.iter().enumerate() {
            let a = self.gains[i];
            let own = scale * eta[i];
            let gamma = a * own * p / (noise + a * (total - own).max(0.0) * p);
            v += (1.0 + prices.lambda1[u]) * spectral_efficiency(gamma);
            let ac = self.common_gains[i];
            gamma_c = gamma_c.min(ac * eta0 * p / (noise + ac * total * p));
        }
        v += prices.lambda2 * spectral_efficiency(gamma_c);
        v - (prices.lambda3 * self.f + prices.lambda5) * p - prices.lambda4 * (eta0 + total)
    }

    /// `(-shortfall, rate)` after the best common-share recovery, compared
    /// lexicographically.
    fn merit(&self, p: f64, eta0: f64, eta: &[f64], r_min: f64, noise: f64) -> (f64, f64) {
        let rc = spectral_efficiency(self.common_sinr(p, eta0, eta, noise));
        let mut private = 0.0;
        let mut need = 0.0;
        for i in 0..self.members.len() {
            let r = spectral_efficiency(self.private_sinr(i, p, eta, noise));
            private += r;
            need += (r_min - r).max(0.0);
        }
        (-(need - rc).max(0.0), private + rc)
    }

    /// Best split of the current load between the common and the private
    /// streams, private ratios held fixed.
    fn best_exchange(&self, prices: Prices<'_>, noise: f64) -> ((f64, Vec<f64>), f64) {
        let load = self.load();
        let private: f64 = self.eta.iter().sum();
        let base = if private > 0.0 {
            self.eta.iter().map(|x| x / private).collect()
        } else {
            vec![1.0 / self.eta.len() as f64; self.eta.len()]
        };
        let c = golden_max(
            |c| self.value_scaled(self.p, c, &base, load - c, prices, noise),
            0.0,
            load,
        );
        let v = self.value_scaled(self.p, c, &base, load - c, prices, noise);
        ((c, base.iter().map(|x| x * (load - c)).collect()), v)
    }

    fn shifted(&self, t: f64) -> (f64, Vec<f64>) {
        let moved: f64 = self.eta.iter().sum::<f64>() * t;
        (self.eta0 + moved, self.eta.iter().map(|e| e * (1.0 - t)).collect())
    }

    /// Moves the smallest fraction of the private budget into the common
    /// stream that lets the common rate cover every shortfall. Near the
    /// optimum the rate is flat along this direction. No-op if already
    /// feasible or if even a pure common stream falls short.
    fn restore_feasibility(&mut self, r_min: f64, noise: f64) {
        let feasible = |g: &Group, t: f64| {
            let (e0, e) = g.shifted(t);
            g.merit(g.p, e0, &e, r_min, noise).0 >= 0.0
        };
        if feasible(self, 0.0) {
            return;
        }
        let steps = 32;
        let Some(first) = (1..=steps).find(|&i| feasible(self, i as f64 / steps as f64)) else {
            return;
        };
        let (mut lo, mut hi) = ((first - 1) as f64 / steps as f64, first as f64 / steps as f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if feasible(self, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (e0, e) = self.shifted(hi);
        self.eta0 = e0;
        self.eta = e;
    }

    fn weight(&self, gamma: f64, tau: f64, mode: ScaWeight) -> f64 {
        match mode {
            ScaWeight::Surrogate => tau / std::f64::consts::LN_2,
            ScaWeight::Sinr => gamma,
        }
    }

    fn refresh_sca(&mut self, noise: f64, floor: f64) -> Result<()> {
        for i in 0..self.members.len() {
            let g = self.private_sinr(i, self.p, &self.eta, noise).max(floor);
            self.gamma[i] = g;
            self.tau[i] = sca_coefficients(g)?.tau;
        }
        let gc = self.common_sinr(self.p, self.eta0, &self.eta, noise).max(floor);
        self.gamma_c = gc;
        self.tau_c = sca_coefficients(gc)?.tau;
        Ok(())
    }
}

/// Maximizer of a unimodal `f` on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..40 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

fn max_abs_diff<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn norm(values: impl Iterator<Item = f64>) -> f64 {
    values.map(|v| v * v).sum::<f64>().sqrt()
}

/// Optimizes powers, coefficients and common shares for a fixed assignment.
pub fn solve(real: &ChannelRealization, assignment: &Array3<bool>, cfg: &SystemConfig) -> Result<SolveReport> {
    solve_with(real, assignment, cfg, &SolveOptions::default())
}

pub fn solve_with(
    real: &ChannelRealization,
    assignment: &Array3<bool>,
    cfg: &SystemConfig,
    options: &SolveOptions,
) -> Result<SolveReport> {
    cfg.validate()?;
    let (mc, uc, kc) = (cfg.num_beams, cfg.num_users, cfg.num_resource_blocks);
    if assignment.dim() != (mc, uc, kc) || real.leo_gains.dim() != (mc, uc, kc) {
        return Err(Error::config(
            "assignment or realization shape does not match the configuration",
        ));
    }
    if let Some(fixed) = &options.fixed_power {
        if fixed.dim() != (mc, kc) || fixed.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::config(
                "fixed beam powers must be finite, non-negative and shaped [beam][block]",
            ));
        }
    }
    let mut slots = vec![0usize; uc];
    for ((_, u, _), &x) in assignment.indexed_iter() {
        if x {
            slots[u] += 1;
        }
    }
    if slots.iter().any(|&s| s != 1) {
        return Err(Error::config("every user must occupy exactly one (beam, block) slot"));
    }

    let s = &cfg.solver;
    let noise = cfg.geo_interference + cfg.noise_power();
    let bw = cfg.bandwidth;
    let r_min = cfg.min_rate / bw;
    let p_tot = cfg.total_power;
    let i_th = cfg.interference_threshold;
    let fixed = options.fixed_power.as_ref();

    let mut shell = AllocationState::zeros(cfg);
    shell.assignment = assignment.clone();
    shell.precoders = compute_precoders(real, &shell, cfg.noise_power());

    let mut groups: Vec<Group> = Vec::new();
    for m in 0..mc {
        for k in 0..kc {
            let members: Vec<usize> = (0..uc).filter(|&u| assignment[[m, u, k]]).collect();
            if members.is_empty() {
                continue;
            }
            let f = real.leo_to_geo[[m, k]];
            let p_max = if f > 0.0 { (i_th / f).min(p_tot) } else { p_tot };
            let n = members.len();
            let p = match fixed {
                Some(fp) => fp[[m, k]],
                None => (p_tot / (mc * kc) as f64).min(p_max),
            };
            let gains: Vec<f64> = members.iter().map(|&u| private_gain(real, &shell, m, u, k)).collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
            groups.push(Group {
                m,
                k,
                f,
                p_max,
                order,
                gains,
                common_gains: members.iter().map(|&u| common_gain(real, &shell, m, u, k)).collect(),
                members,
                p,
                eta0: s.init_common_coeff,
                eta: vec![s.init_private_total / n as f64; n],
                share: vec![0.0; n],
                gamma: vec![0.0; n],
                tau: vec![0.0; n],
                gamma_c: 0.0,
                tau_c: 0.0,
            });
        }
    }

    let mut dual = DualState::filled(cfg, s.init_multiplier);
    let mut active = Array2::from_elem((mc, kc), false);
    for g in &groups {
        active[[g.m, g.k]] = true;
    }
    // power prices of empty groups never move; start them at zero
    for m in 0..mc {
        for k in 0..kc {
            if !active[[m, k]] {
                dual.lambda2[[m, k]] = 0.0;
                dual.lambda3[[m, k]] = 0.0;
                dual.lambda4[[m, k]] = 0.0;
            }
        }
    }
    let fixed_power_sum: f64 = fixed.map(|fp| fp.sum()).unwrap_or(0.0);

    let mut trajectory = Vec::new();
    let mut step = s.step_size;
    let mut converged_loop = false;
    let mut infeasible = false;
    let mut stalled = 0usize;
    let mut best_shortfall = f64::INFINITY;
    let mut settled = 0usize;
    let mut iterations = 0usize;

    // scratch buffers reused across iterations
    let mut served = Array1::<f64>::zeros(uc);
    let mut shares = Array3::<f64>::zeros((mc, uc, kc));
    let mut common_rate = Array2::<f64>::zeros((mc, kc));
    let mut interference = Array2::<f64>::zeros((mc, kc));
    let mut load = Array2::<f64>::zeros((mc, kc));

    for it in 0..s.max_iterations {
        iterations = it + 1;
        if it % s.sca_refresh_every == 0 {
            for g in groups.iter_mut() {
                g.refresh_sca(noise, s.gamma_floor)?;
            }
        }
        let before: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = groups
            .iter()
            .map(|g| (g.p, g.eta0, g.eta.clone(), g.share.clone()))
            .collect();
        let lambda1: Vec<f64> = dual.lambda1.to_vec();

        // a silent group is a fixed point of both steps whatever its prices:
        // its SINRs, and with them the surrogate weights, vanish. Restart it.
        for g in groups.iter_mut() {
            if fixed.is_none() && (g.p <= 0.0 || g.load() <= 0.0) {
                g.eta0 = s.init_common_coeff;
                let n = g.eta.len() as f64;
                g.eta.fill(s.init_private_total / n);
            }
        }

        // beam powers
        let mut requested = fixed_power_sum;
        if fixed.is_none() {
            for g in groups.iter_mut() {
                let prices = Prices {
                    lambda1: &lambda1,
                    lambda2: dual.lambda2[[g.m, g.k]],
                    lambda3: dual.lambda3[[g.m, g.k]],
                    lambda4: dual.lambda4[[g.m, g.k]],
                    lambda5: dual.lambda5,
                };
                let users: Vec<PairTerm> = (0..g.members.len())
                    .map(|i| PairTerm {
                        gain: g.gains[i],
                        coeff: g.eta[i],
                        weight: g.weight(g.gamma[i], g.tau[i], s.sca_weight),
                        lambda1: lambda1[g.members[i]],
                        x: 1.0,
                    })
                    .collect();
                let price = prices.lambda5 + g.f * prices.lambda3;
                let coef = cubic::assemble(
                    &users,
                    noise,
                    price,
                    prices.lambda2,
                    g.weight(g.gamma_c, g.tau_c, s.sca_weight),
                );
                let (eta0, eta_now) = (g.eta0, g.eta.clone());
                let value = |p: f64| g.value(p, eta0, &eta_now, prices, noise);
                if let Ok(p) = cubic::solve_beam_power(&coef, g.p_max, value) {
                    // move only on strict improvement
                    if value(p) > value(g.p.min(g.p_max)) {
                        g.p = p;
                    }
                }
            }
            requested = groups.iter().map(|g| g.p).sum();
            if requested > p_tot {
                let scale = p_tot / requested;
                for g in groups.iter_mut() {
                    g.p *= scale;
                }
            }
        }

        // private coefficients, one user at a time
        for g in groups.iter_mut() {
            let prices = Prices {
                lambda1: &lambda1,
                lambda2: dual.lambda2[[g.m, g.k]],
                lambda3: dual.lambda3[[g.m, g.k]],
                lambda4: dual.lambda4[[g.m, g.k]],
                lambda5: dual.lambda5,
            };
            let n = g.members.len();
            // the coefficients of a silent beam carry no rate information; leave them
            if g.p > 0.0 {
                for &i in &g.order {
                    let interferers: Vec<Interferer> = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| Interferer {
                            gain: g.gains[j],
                            weight: g.weight(g.gamma[j], g.tau[j], s.sca_weight),
                            x: 1.0,
                        })
                        .collect();
                    let quad = eta::assemble(
                        &interferers,
                        g.weight(g.gamma[i], g.tau[i], s.sca_weight),
                        lambda1[g.members[i]],
                        prices.lambda4,
                        g.p,
                        noise,
                    );
                    let mut trial = g.eta.clone();
                    let mut value = |e: f64| {
                        trial[i] = e;
                        g.value(g.p, g.eta0, &trial, prices, noise)
                    };
                    let candidate = match eta::solve_private_eta(&quad, &mut value) {
                        Ok(e) => e,
                        Err(_) => ((1.0 - g.eta0) / n as f64).max(0.0),
                    };
                    if value(candidate) > value(g.eta[i]) {
                        g.eta[i] = candidate;
                    }
                }
                // coordinate moves cannot hand the private stream from one user
                // to another; a swap can
                for i in 0..n {
                    for j in i + 1..n {
                        let mut swapped = g.eta.clone();
                        swapped.swap(i, j);
                        if g.merit(g.p, g.eta0, &swapped, r_min, noise) > g.merit(g.p, g.eta0, &g.eta, r_min, noise) {
                            g.eta = swapped;
                        }
                    }
                }
                let eta0 = eta::solve_common_eta(
                    prices.lambda2,
                    g.weight(g.gamma_c, g.tau_c, s.sca_weight),
                    prices.lambda4,
                    g.eta0,
                );
                if g.value(g.p, eta0, &g.eta, prices, noise) > g.value(g.p, g.eta0, &g.eta, prices, noise) {
                    g.eta0 = eta0;
                }
            }
            // the load price sees the requested load, as the power price does
            let l = g.load();
            load[[g.m, g.k]] = l;
            if l > 1.0 {
                g.eta0 /= l;
                for e in g.eta.iter_mut() {
                    *e /= l;
                }
            }
            // surrogate steps creep along the flat common/private exchange
            // ridge; search it directly at constant load
            if g.p > 0.0 {
                let (ridge, v) = g.best_exchange(prices, noise);
                if v > g.value(g.p, g.eta0, &g.eta, prices, noise) {
                    (g.eta0, g.eta) = ridge;
                }
            }
            for i in 0..n {
                g.share[i] = update_common_share(g.share[i], lambda1[g.members[i]], prices.lambda2, step);
            }
        }

        // constraint values at the new iterate
        served.fill(0.0);
        shares.fill(0.0);
        let mut sum_rate = 0.0;
        for g in groups.iter_mut() {
            let rc = spectral_efficiency(g.common_sinr(g.p, g.eta0, &g.eta, noise));
            common_rate[[g.m, g.k]] = rc;
            interference[[g.m, g.k]] = g.f * g.p;
            // lambda2 sees the requested shares, lambda1 only what rc can deliver
            let held: f64 = g.share.iter().sum();
            let deliver = if held > rc { rc / held } else { 1.0 };
            for (i, &u) in g.members.iter().enumerate() {
                shares[[g.m, u, g.k]] = g.share[i];
                let r = spectral_efficiency(g.private_sinr(i, g.p, &g.eta, noise));
                served[u] += r + g.share[i] * deliver;
                sum_rate += r + g.share[i] * deliver;
            }
        }
        let previous = dual.clone();
        dual = update_multipliers(
            &dual,
            &Subgradients {
                served: &served,
                min_rate: r_min,
                shares: &shares,
                common_rate: &common_rate,
                interference: &interference,
                interference_threshold: i_th,
                coefficient_load: &load,
                power_sum: requested,
                total_power: p_tot,
                active: &active,
                freeze_power_prices: fixed.is_some(),
            },
            step,
        );
        debug_assert!(dual.is_nonnegative());

        let shortfall = served.iter().map(|&r| (r_min - r).max(0.0)).fold(0.0, f64::max);
        let mut iterate_residual = shortfall / r_min;
        for g in &groups {
            let ssum: f64 = g.share.iter().sum();
            let rc = common_rate[[g.m, g.k]];
            iterate_residual = iterate_residual.max((ssum - rc).max(0.0) / rc.max(r_min));
        }
        trajectory.push(TraceRow {
            iteration: it,
            lambda1_norm: norm(dual.lambda1.iter().copied()),
            lambda2_norm: norm(dual.lambda2.iter().copied()),
            lambda3_norm: norm(dual.lambda3.iter().copied()),
            lambda4_norm: norm(dual.lambda4.iter().copied()),
            lambda5: dual.lambda5,
            sum_rate: sum_rate * bw,
            max_residual: iterate_residual,
        });

        // stopping rules
        let lambda_scale = dual
            .lambda1
            .iter()
            .chain(dual.lambda2.iter())
            .chain(dual.lambda3.iter())
            .chain(dual.lambda4.iter())
            .chain(std::iter::once(&dual.lambda5))
            .fold(1.0f64, |a, &b| a.max(b.abs()));
        let dl = max_abs_diff(dual.lambda1.iter(), previous.lambda1.iter())
            .max(max_abs_diff(dual.lambda2.iter(), previous.lambda2.iter()))
            .max(max_abs_diff(dual.lambda3.iter(), previous.lambda3.iter()))
            .max(max_abs_diff(dual.lambda4.iter(), previous.lambda4.iter()))
            .max((dual.lambda5 - previous.lambda5).abs())
            / lambda_scale;
        let share_scale = groups.iter().flat_map(|g| g.share.iter()).fold(r_min, |a, &b| a.max(b));
        let mut da = 0.0f64;
        for (g, (p, e0, e, c)) in groups.iter().zip(&before) {
            da = da
                .max((g.p - p).abs() / p_tot)
                .max((g.eta0 - e0).abs())
                .max(max_abs_diff(g.eta.iter(), e.iter()))
                .max(max_abs_diff(g.share.iter(), c.iter()) / share_scale);
        }
        if dl < s.convergence_tolerance && da < s.convergence_tolerance {
            settled += 1;
            if settled >= 3 {
                converged_loop = true;
                break;
            }
        } else {
            settled = 0;
        }

        let max_l1 = dual.lambda1.iter().copied().fold(0.0, f64::max);
        if max_l1 > s.infeasible_lambda_cap {
            if shortfall < best_shortfall {
                best_shortfall = shortfall;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= s.infeasible_patience {
                    infeasible = true;
                    break;
                }
            }
        }
        step *= s.step_decay;
    }

    for g in groups.iter_mut() {
        g.restore_feasibility(r_min, noise);
    }

    // write back, recovering shares that cover every shortfall when possible
    let mut alloc = shell;
    for g in &groups {
        alloc.beam_power[[g.m, g.k]] = g.p;
        alloc.common_coeff[[g.m, g.k]] = g.eta0;
        let rc = spectral_efficiency(g.common_sinr(g.p, g.eta0, &g.eta, noise));
        let need: Vec<f64> = (0..g.members.len())
            .map(|i| (r_min - spectral_efficiency(g.private_sinr(i, g.p, &g.eta, noise))).max(0.0))
            .collect();
        let need_sum: f64 = need.iter().sum();
        let final_shares: Vec<f64> = if need_sum <= rc {
            let surplus = rc - need_sum;
            let held: f64 = g.share.iter().sum();
            let n = g.members.len() as f64;
            need.iter()
                .zip(&g.share)
                .map(|(&d, &c)| d + if held > 0.0 { surplus * c / held } else { surplus / n })
                .collect()
        } else {
            need.iter().map(|&d| d * rc / need_sum).collect()
        };
        for (i, &u) in g.members.iter().enumerate() {
            alloc.private_coeff[[g.m, u, g.k]] = g.eta[i];
            alloc.common_share[[g.m, u, g.k]] = final_shares[i] * bw;
        }
        dual.sca.private_sinr.slice_mut(ndarray::s![g.m, .., g.k]).fill(0.0);
        for (i, &u) in g.members.iter().enumerate() {
            let c = sca_coefficients(g.gamma[i].max(s.gamma_floor))?;
            dual.sca.private_sinr[[g.m, u, g.k]] = g.gamma[i];
            dual.sca.private_tau[[g.m, u, g.k]] = c.tau;
            dual.sca.private_varpi[[g.m, u, g.k]] = c.varpi;
        }
        let c = sca_coefficients(g.gamma_c.max(s.gamma_floor))?;
        dual.sca.common_sinr[[g.m, g.k]] = g.gamma_c;
        dual.sca.common_tau[[g.m, g.k]] = c.tau;
        dual.sca.common_varpi[[g.m, g.k]] = c.varpi;
    }
    if let Some(fp) = fixed {
        alloc.beam_power.assign(fp);
    }
    let rates = rate_breakdown(real, &alloc, cfg);
    let residuals = Residuals::evaluate(real, &alloc, &rates, cfg);
    let converged = converged_loop && !infeasible && residuals.max() <= s.feasibility_tolerance;
    Ok(SolveReport {
        sum_rate: rates.sum_rate(),
        allocation: alloc,
        dual,
        rates,
        residuals,
        iterations,
        trajectory,
        converged,
        infeasible,
    })
}
