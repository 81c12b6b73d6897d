//! Bessel functions of the first kind for small integer orders.
//!
//! Ascending series below `SERIES_LIMIT`, Hankel asymptotic expansion above.
//! Over the beam-pattern domain (argument below the first pattern null, about
//! 5.9) only the series branch is used. The relative error there is below
//! 1e-12 away from zeros of `J_n`. The asymptotic branch is accurate to about
//! 1e-8 absolute at `x = 8` and improves quickly with `x`.

use std::f64::consts::PI;

pub const SERIES_LIMIT: f64 = 8.0;

/// Truncated sum of `sum_k (-q)^k / (k! (k+n)!)`. Multiplying by `(x/2)^n`
/// gives `J_n(x)` with `q = x^2/4`.
pub(crate) fn reduced_series(order: u32, q: f64) -> f64 {
    let n = order as f64;
    let mut term = 1.0 / factorial(order);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (kf + n));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let eight_x = 8.0 * x;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut previous = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() > previous || term == 0.0 {
            break;
        }
        previous = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (order as f64) * PI / 2.0 - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `J_n(x)` for `x >= 0`.
pub fn bessel_j(order: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < SERIES_LIMIT {
        (x / 2.0).powi(order as i32) * reduced_series(order, x * x / 4.0)
    } else {
        asymptotic(order, x)
    }
}

pub fn j1(x: f64) -> f64 {
    bessel_j(1, x)
}

pub fn j3(x: f64) -> f64 {
    bessel_j(3, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bessel_quadrature;

    #[test]
    fn series_matches_quadrature() {
        for i in 1..80 {
            let x = i as f64 * 0.1;
            for n in [0u32, 1, 3] {
                let a = bessel_j(n, x);
                let b = bessel_quadrature(n, x);
                assert!((a - b).abs() < 1e-12, "J{n}({x}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn asymptotic_matches_quadrature() {
        for i in 0..60 {
            let x = 8.0 + i as f64 * 0.5;
            for n in [1u32, 3] {
                let a = bessel_j(n, x);
                let b = bessel_quadrature(n, x);
                assert!((a - b).abs() < 5e-8, "J{n}({x}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn known_values() {
        // tabulated: J1(1) = 0.44005058574493355, J3(5) = 0.36483123061366696
        assert!((j1(1.0) - 0.440_050_585_744_933_55).abs() < 1e-15);
        assert!((j3(5.0) - 0.364_831_230_613_666_96).abs() < 1e-14);
    }
}
