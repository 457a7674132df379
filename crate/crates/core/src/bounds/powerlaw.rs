use serde::{Deserialize, Serialize};

use crate::bounds::zeta::{zeta_tail, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Cap on the block index scans.
pub const MAX_BLOCKS: u64 = 10_000_000;

/// How the asymptotic power-law formulas are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reading {
    /// Block thresholds `(δ + k − 1)(1 − 2F_ℓ(k))`, `m̃` from the difference
    /// of tails with exponent `−τ`.
    #[default]
    Corrected,
    /// The displayed formulas evaluated as typeset.
    Literal,
}

/// Asymptotic fractions for the shifted power law `P[d = δ + k] ∝ (δ + k)^{-τ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawQuantities {
    pub tau: f64,
    pub delta: u32,
    pub h_over_j: f64,
    pub reading: Reading,
    pub d_ave: f64,
    pub kappa: u64,
    /// Position inside block `κ`, `None` when the literal condition has no
    /// solution in `[0, 1]`.
    pub y: Option<f64>,
    pub m_bar_frac: Option<f64>,
    pub ell_frac: Option<f64>,
    pub m_tilde_kappa: u64,
    /// Whole blocks `0..=κ̃`.
    pub m_tilde_frac: f64,
    /// Interpolated inside block `κ̃` to exactly half the degree mass
    /// (corrected reading only).
    pub m_tilde_frac_interpolated: Option<f64>,
    /// `(τ, a, ξ_τ(a))` for the tails entering the final values.
    pub zeta_cache: Vec<(f64, u64, f64)>,
}

struct Tails {
    tau: f64,
    delta: u64,
    cache: Vec<(f64, u64, f64)>,
}

impl Tails {
    fn xi(&mut self, s: f64, a: u64) -> Result<f64> {
        if let Some(&(_, _, v)) = self.cache.iter().find(|&&(t, b, _)| t == s && b == a) {
            return Ok(v);
        }
        let v = zeta_tail(s, a, DEFAULT_TOL)?;
        self.cache.push((s, a, v));
        Ok(v)
    }

    /// Vertex fraction with degree `< δ + k`.
    fn f_v(&mut self, k: u64) -> Result<f64> {
        Ok(1.0 - self.xi(self.tau, self.delta + k)? / self.xi(self.tau, self.delta)?)
    }

    /// Degree-mass fraction of vertices with degree `< δ + k`.
    fn f_l(&mut self, k: u64) -> Result<f64> {
        Ok(1.0 - self.xi(self.tau - 1.0, self.delta + k)? / self.xi(self.tau - 1.0, self.delta)?)
    }
}

fn bisect_min_y(pred: impl Fn(f64) -> bool) -> Option<f64> {
    if pred(0.0) {
        return Some(0.0);
    }
    if !pred(1.0) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

pub fn power_law_quantities(
    tau: f64,
    delta: u32,
    j: f64,
    h: f64,
    reading: Reading,
) -> Result<PowerLawQuantities> {
    if !(tau > 2.0) || delta < 3 {
        return Err(Error::InvalidParameter(format!(
            "need tau > 2 and delta >= 3, got ({tau}, {delta})"
        )));
    }
    if !(j > 0.0) || !(h >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need J > 0 and h >= 0, got J={j}, h={h}"
        )));
    }
    let ratio = h / j;
    let d = f64::from(delta);
    let mut t = Tails {
        tau,
        delta: u64::from(delta),
        cache: Vec::new(),
    };
    let xi_tau_delta = t.xi(tau, u64::from(delta))?;
    let xi_tau1_delta = t.xi(tau - 1.0, u64::from(delta))?;
    let d_ave = xi_tau1_delta / xi_tau_delta;

    // κ = min{k >= 1 : h/J >= threshold(k)} − 1
    let mut kappa = None;
    for k in 1..=MAX_BLOCKS {
        let threshold = match reading {
            Reading::Corrected => (d + k as f64 - 1.0) * (1.0 - 2.0 * t.f_l(k)?),
            Reading::Literal => (d + k as f64 - 1.0) * t.f_l(k)?,
        };
        if ratio >= threshold {
            kappa = Some(k - 1);
            break;
        }
    }
    let kappa = kappa.ok_or_else(|| {
        Error::Numeric(format!(
            "kappa scan exceeded {MAX_BLOCKS} blocks (tau={tau}, delta={delta}, h/J={ratio})"
        ))
    })?;
    let block = d + kappa as f64;
    let f_v = t.f_v(kappa)?;
    let f_l = t.f_l(kappa)?;
    let p_block = block.powf(-tau) / xi_tau_delta;
    let q_block = block.powf(1.0 - tau) / xi_tau1_delta;

    let (y, m_bar_frac, ell_frac) = match reading {
        Reading::Corrected => {
            let y = bisect_min_y(|y| ratio >= block * (1.0 - 2.0 * (f_l + y * q_block)));
            (
                y,
                y.map(|y| f_v + y * p_block),
                y.map(|y| f_l + y * q_block),
            )
        }
        Reading::Literal => {
            let base = t.xi(tau - 1.0, u64::from(delta) + kappa)? / xi_tau1_delta;
            let slope = kappa as f64 * xi_tau_delta / xi_tau1_delta;
            let y = bisect_min_y(|y| ratio >= block * (1.0 - (base + y * slope)));
            (y, y.map(|y| f_v + y), y.map(|y| base + y * slope))
        }
    };

    let (m_tilde_kappa, m_tilde_frac, m_tilde_frac_interpolated) = match reading {
        Reading::Corrected => {
            let mut found = None;
            for m in 0..MAX_BLOCKS {
                let mass =
                    (xi_tau1_delta - t.xi(tau - 1.0, u64::from(delta) + m + 1)?) / xi_tau_delta;
                if mass >= 0.5 * d_ave {
                    found = Some(m);
                    break;
                }
            }
            let mk = found.ok_or_else(|| Error::Numeric("m-tilde scan did not converge".into()))?;
            let whole = t.f_v(mk + 1)?;
            let fl = t.f_l(mk)?;
            let b = d + mk as f64;
            let y = (0.5 - fl) / (b.powf(1.0 - tau) / xi_tau1_delta);
            let interp = t.f_v(mk)? + y * b.powf(-tau) / xi_tau_delta;
            (mk, whole, Some(interp))
        }
        Reading::Literal => {
            let mut found = None;
            for m in 1..MAX_BLOCKS {
                let mass =
                    (xi_tau1_delta + t.xi(tau - 1.0, u64::from(delta) + m + 1)?) / xi_tau_delta;
                if mass >= 0.5 * d_ave {
                    found = Some(m);
                    break;
                }
            }
            let mk = found.ok_or_else(|| Error::Numeric("m-tilde scan did not converge".into()))?;
            let sum: f64 = (0..=mk).map(|i| (d + i as f64).powf(tau)).sum();
            (mk, sum / xi_tau_delta, None)
        }
    };

    Ok(PowerLawQuantities {
        tau,
        delta,
        h_over_j: ratio,
        reading,
        d_ave,
        kappa,
        y,
        m_bar_frac,
        ell_frac,
        m_tilde_kappa,
        m_tilde_frac,
        m_tilde_frac_interpolated,
        zeta_cache: t.cache,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::gamma::{gamma_upper, m_tilde};
    use crate::graph::{sample_degrees, DegreeDistribution};
    use crate::rng;

    #[test]
    fn literal_kappa_example() {
        let q = power_law_quantities(3.0, 3, 1.0, 1.0, Reading::Literal).unwrap();
        assert_eq!(q.kappa, 0);
        let xi2_3 = zeta_tail(2.0, 3, 1e-14).unwrap();
        let xi2_4 = zeta_tail(2.0, 4, 1e-14).unwrap();
        assert!((3.0 * (1.0 - xi2_4 / xi2_3) - 0.844).abs() < 1e-3);
    }

    #[test]
    fn average_degree() {
        let q = power_law_quantities(3.0, 3, 1.0, 1.0, Reading::Corrected).unwrap();
        assert!((q.d_ave - 0.394_934_1 / 0.077_056_9).abs() < 1e-4);
        assert!((q.d_ave - 5.125).abs() < 1e-3);
    }

    #[test]
    fn vanishing_field_limit() {
        let q = power_law_quantities(3.0, 3, 1.0, 1e-9, Reading::Corrected).unwrap();
        assert!((q.ell_frac.unwrap() - 0.5).abs() < 1e-6);
        assert!((q.m_bar_frac.unwrap() - q.m_tilde_frac_interpolated.unwrap()).abs() < 1e-6);
    }

    #[test]
    fn fractions_in_unit_interval() {
        for tau in [2.2, 2.5, 3.0, 4.0] {
            for h in [0.01, 0.5, 1.0, 3.0] {
                let q = power_law_quantities(tau, 3, 1.0, h, Reading::Corrected).unwrap();
                for f in [q.m_bar_frac.unwrap(), q.ell_frac.unwrap(), q.m_tilde_frac] {
                    assert!((0.0..=1.0).contains(&f), "tau {tau}, h {h}: {f}");
                }
            }
        }
    }

    /// The corrected fractions match the finite-n scans on a large sample.
    #[test]
    fn corrected_reading_matches_sampled_sequence() {
        let n = 200_001;
        let dist = DegreeDistribution::PowerLaw { tau: 3.0, delta: 3 };
        let seq = sample_degrees(&dist, n, false, &mut rng::master(4)).unwrap();
        for h in [0.5, 1.0, 2.0] {
            let q = power_law_quantities(3.0, 3, 1.0, h, Reading::Corrected).unwrap();
            let up = match gamma_upper(&seq, 1.0, h) {
                Ok(u) => u,
                Err(e) => panic!("h {h}: {e}"),
            };
            let mbar = up.m_bar as f64 / n as f64;
            let ell = up.ell_mbar as f64 / seq.total() as f64;
            assert!(
                (mbar - q.m_bar_frac.unwrap()).abs() < 0.01,
                "h {h}: {mbar} vs {:?}",
                q.m_bar_frac
            );
            assert!(
                (ell - q.ell_frac.unwrap()).abs() < 0.01,
                "h {h}: {ell} vs {:?}",
                q.ell_frac
            );
        }
        let mt = m_tilde(&seq) as f64 / n as f64;
        let q = power_law_quantities(3.0, 3, 1.0, 1.0, Reading::Corrected).unwrap();
        assert!(
            (mt - q.m_tilde_frac_interpolated.unwrap()).abs() < 0.01,
            "{mt} vs {q:?}"
        );
        assert!(q.m_tilde_frac >= mt - 0.01);
    }

    #[test]
    fn literal_tilde_m_is_not_a_fraction() {
        let q = power_law_quantities(3.0, 3, 1.0, 1.0, Reading::Literal).unwrap();
        assert!(q.m_tilde_frac > 1.0);
    }

    #[test]
    fn domain() {
        assert!(power_law_quantities(2.0, 3, 1.0, 1.0, Reading::Corrected).is_err());
        assert!(power_law_quantities(3.0, 2, 1.0, 1.0, Reading::Corrected).is_err());
    }
}
