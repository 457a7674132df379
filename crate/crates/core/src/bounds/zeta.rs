//! Hurwitz-style zeta tails `ξ_τ(a) = Σ_{i ≥ a} i^{-τ}`.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-13;

/// `Σ_{i=a}^∞ i^{-tau}` with truncation error below `tol`.
///
/// Terms below a cut-off `N` are summed directly; the remainder is the
/// Euler–Maclaurin expansion of the integral tail up to the fifth derivative.
pub fn zeta_tail(tau: f64, a: u64, tol: f64) -> Result<f64> {
    if !(tau > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "zeta tail diverges for tau = {tau} <= 1"
        )));
    }
    if a == 0 {
        return Err(Error::InvalidParameter("zeta tail needs a >= 1".into()));
    }
    let tol = tol.max(f64::EPSILON);
    let mut cut = a.max(16);
    while remainder_bound(tau, cut as f64) > tol && cut < (1 << 40) {
        cut *= 2;
    }
    let direct: f64 = (a..cut).rev().map(|i| (i as f64).powf(-tau)).sum();
    Ok(direct + euler_maclaurin_tail(tau, cut as f64))
}

fn euler_maclaurin_tail(tau: f64, n: f64) -> f64 {
    let f = n.powf(-tau);
    let integral = n.powf(1.0 - tau) / (tau - 1.0);
    let d1 = -tau * f / n;
    let d3 = -tau * (tau + 1.0) * (tau + 2.0) * f / n.powi(3);
    let d5 = -tau * (tau + 1.0) * (tau + 2.0) * (tau + 3.0) * (tau + 4.0) * f / n.powi(5);
    integral + 0.5 * f - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0
}

fn remainder_bound(tau: f64, n: f64) -> f64 {
    let rising: f64 = (0..7).map(|k| tau + k as f64).product();
    rising * n.powf(-tau - 7.0) / 1_209_600.0
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct summation to 2·10^6 terms plus the integral bracket.
    fn oracle(tau: f64, a: u64) -> f64 {
        let cut = 2_000_000u64;
        let head: f64 = (a..cut).rev().map(|i| (i as f64).powf(-tau)).sum();
        let lo = (cut as f64).powf(1.0 - tau) / (tau - 1.0);
        let hi = (cut as f64 - 1.0).powf(1.0 - tau) / (tau - 1.0);
        head + 0.5 * (lo + hi)
    }

    #[test]
    fn basel_constant() {
        let v = zeta_tail(2.0, 1, 1e-14).unwrap();
        assert!((v - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn apery_tail_from_three() {
        let apery = 1.202_056_903_159_594_2;
        let v = zeta_tail(3.0, 3, 1e-14).unwrap();
        assert!((v - (apery - 1.0 - 0.125)).abs() < 1e-12);
        assert!((v - oracle(3.0, 3)).abs() < 1e-12);
        assert!((v - 0.077_056_9).abs() < 1e-7);
    }

    #[test]
    fn agrees_with_direct_summation() {
        for &(tau, a) in &[(2.5, 1u64), (3.0, 7), (4.2, 3), (2.1, 50)] {
            let v = zeta_tail(tau, a, 1e-14).unwrap();
            let o = oracle(tau, a);
            assert!(
                (v - o).abs() < 1e-9 * o.max(1e-3),
                "tau={tau} a={a}: {v} vs {o}"
            );
        }
    }

    #[test]
    fn strictly_decreasing_in_start() {
        let vals: Vec<f64> = (1..40).map(|a| zeta_tail(2.7, a, 1e-14).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn divergent_exponent_rejected() {
        assert!(zeta_tail(1.0, 1, 1e-12).is_err());
        assert!(zeta_tail(0.5, 3, 1e-12).is_err());
        assert!(zeta_tail(2.0, 0, 1e-12).is_err());
    }
}
