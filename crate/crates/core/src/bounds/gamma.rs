use log::warn;
use serde::{Deserialize, Serialize};

use crate::bounds::idelta::i_delta_value;
use crate::error::{Error, Result};
use crate::graph::DegreeSequence;

/// Default constant `c` of the `c·ℓ_n^{3/4}` fluctuation slack.
pub const DEFAULT_SLACK_CONSTANT: f64 = 1.0;
/// Grid size for the `x` scan of the weak-(H) condition.
pub const WEAK_H_GRID: usize = 1000;

fn path_profile(seq: &DegreeSequence, m: usize) -> f64 {
    let l = seq.ell(m) as f64;
    l * (1.0 - l / seq.total() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub gamma_plus: f64,
    pub m_bar: usize,
    pub ell_mbar: u64,
    /// `c·ℓ_n^{3/4}`, reported and never added to `gamma_plus`.
    pub slack: f64,
    pub slack_constant: f64,
    /// `m̄` from the first-order degree-threshold condition.
    pub m_bar_threshold: usize,
    pub warning: Option<String>,
}

/// `m̄ = min{1 <= m <= n : ℓ_m(1 − ℓ_m/ℓ_n) >= ℓ_{m+1}(1 − ℓ_{m+1}/ℓ_n) − h/J}`
/// and `Γ⁺ = Jℓ_m̄(1 − ℓ_m̄/ℓ_n) − h·m̄`. Requires `ℓ_m̄ < ℓ_n/2`.
pub fn gamma_upper(seq: &DegreeSequence, j: f64, h: f64) -> Result<UpperBound> {
    gamma_upper_with_slack(seq, j, h, DEFAULT_SLACK_CONSTANT)
}

pub fn gamma_upper_with_slack(seq: &DegreeSequence, j: f64, h: f64, c: f64) -> Result<UpperBound> {
    if !(j > 0.0) || !(h >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need J > 0 and h >= 0, got J={j}, h={h}"
        )));
    }
    let n = seq.n();
    let ln = seq.total() as f64;
    let ratio = h / j;
    let exact = |m: usize| m == n || path_profile(seq, m) >= path_profile(seq, m + 1) - ratio;
    let threshold = |m: usize| {
        m == n || f64::from(seq.degrees()[m]) * (1.0 - 2.0 * seq.ell(m) as f64 / ln) <= ratio
    };
    let m_bar = (1..=n).find(|&m| exact(m)).unwrap_or(n);
    let m_bar_threshold = (1..=n).find(|&m| threshold(m)).unwrap_or(n);

    let mut warning = None;
    if m_bar != m_bar_threshold {
        // The two conditions differ by d_{m+1}²/ℓ_n; any gap beyond that is a bug.
        for m in m_bar.min(m_bar_threshold)..m_bar.max(m_bar_threshold) {
            let d = f64::from(seq.degrees()[m]);
            let a = d * (1.0 - 2.0 * seq.ell(m) as f64 / ln);
            if (a - ratio).abs() > d * d / ln + 1e-9 {
                return Err(Error::Numeric(format!(
                    "m-bar {m_bar} and threshold form {m_bar_threshold} disagree beyond the d²/ℓ_n correction at m = {m}"
                )));
            }
        }
        let msg = format!(
            "m-bar {m_bar} differs from threshold form {m_bar_threshold} within the d²/ℓ_n correction"
        );
        warn!("{msg}");
        warning = Some(msg);
    }
    // Half the degree mass; the same as m̄ < n/2 for regular sequences.
    if 2 * seq.ell(m_bar) >= seq.total() {
        return Err(Error::Numeric(format!(
            "no m-bar below half the degree mass: m-bar = {m_bar}, n = {n}"
        )));
    }
    Ok(UpperBound {
        gamma_plus: j * path_profile(seq, m_bar) - h * m_bar as f64,
        m_bar,
        ell_mbar: seq.ell(m_bar),
        slack: c * ln.powf(0.75),
        slack_constant: c,
        m_bar_threshold,
        warning,
    })
}

/// Upper constant for r-regular sequences `(Jr/4)·n·(1 − (h/(Jr))²)`.
pub fn dirac_upper_constant(r: u32, n: usize, j: f64, h: f64) -> f64 {
    let r = f64::from(r);
    j * r / 4.0 * n as f64 * (1.0 - (h / (j * r)).powi(2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// `J·d_ave·I_{d_ave}(1/2)·n − h·m̃`, without the `o(n)` correction.
    pub gamma_minus: f64,
    pub m_tilde: usize,
    pub i_dave_half: f64,
    pub o_n_omitted: bool,
}

/// `m̃ = min{m : ℓ_m >= ℓ_n/2}`.
pub fn m_tilde(seq: &DegreeSequence) -> usize {
    (1..=seq.n())
        .find(|&m| 2 * seq.ell(m) >= seq.total())
        .unwrap_or(seq.n())
}

pub fn gamma_lower(seq: &DegreeSequence, j: f64, h: f64) -> Result<LowerBound> {
    let d_ave = seq.d_ave();
    let i = i_delta_value(d_ave, 0.5)?;
    let mt = m_tilde(seq);
    Ok(LowerBound {
        gamma_minus: j * d_ave * i * seq.n() as f64 - h * mt as f64,
        m_tilde: mt,
        i_dave_half: i,
        o_n_omitted: true,
    })
}

/// Right-hand side of the strict sufficient condition for (H).
pub fn h_condition_strict_margin(d_min: f64, d_ave: f64) -> Result<f64> {
    let i_ave = i_delta_value(d_ave, 0.5)?;
    let i_min = i_delta_value(d_min, 0.5)?;
    Ok(2.0 * i_ave - 0.5 * (1.0 - 4.0 * i_min).powi(2) / (1.0 - 2.0 * i_min))
}

/// `(h/J)(1/d_ave + 1/2) < 2I_{d_ave}(1/2) − ½(1 − 4I_{d_min}(1/2))²/(1 − 2I_{d_min}(1/2))`.
pub fn h_condition_strict(d_min: f64, d_ave: f64, j: f64, h: f64) -> Result<bool> {
    if d_min < 3.0 {
        return Err(Error::InvalidParameter(format!(
            "strict (H) condition needs d_min >= 3, got {d_min}"
        )));
    }
    let rhs = h_condition_strict_margin(d_min, d_ave)?;
    Ok(h / j * (1.0 / d_ave + 0.5) < rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakHCheck {
    pub holds: bool,
    /// Smallest `RHS − LHS` over the grid (downhill-exempt points skipped).
    pub worst_margin: f64,
    pub worst_x: f64,
}

/// Weak (H): for every `x` on the grid,
/// `h(m̄ + σ_max(x))/(Jℓ_n) <= 2p(1 − p) − (x − 2I)²/(x − I)` with
/// `p = ℓ_m̄/ℓ_n`, `I = I_{d_min}(x)` and `σ_max(x) = max{m : ℓ_m <= xℓ_n}`
/// bounding `t + (|σ| − s)(x − 2I)/(x − I)`. Points with `x < 2I` and
/// `h/J < d_min(2I/x − 1)` are downhill and always pass.
pub fn h_condition_weak(seq: &DegreeSequence, j: f64, h: f64) -> Result<WeakHCheck> {
    let upper = match gamma_upper(seq, j, h) {
        Ok(u) => u,
        Err(Error::Numeric(_)) => {
            return Ok(WeakHCheck {
                holds: false,
                worst_margin: f64::NEG_INFINITY,
                worst_x: 0.0,
            })
        }
        Err(e) => return Err(e),
    };
    let ln = seq.total() as f64;
    let p = upper.ell_mbar as f64 / ln;
    let d_min = f64::from(seq.d_min());
    let mut worst = WeakHCheck {
        holds: true,
        worst_margin: f64::INFINITY,
        worst_x: 0.0,
    };
    let mut sigma_max = 0usize;
    for k in 1..=WEAK_H_GRID {
        let x = 0.5 * k as f64 / WEAK_H_GRID as f64;
        while sigma_max < seq.n() && seq.ell(sigma_max + 1) as f64 <= x * ln {
            sigma_max += 1;
        }
        let i = i_delta_value(d_min, x)?;
        if x < 2.0 * i && h / j < d_min * (2.0 * i / x - 1.0) {
            continue;
        }
        let lhs = h * (upper.m_bar + sigma_max) as f64 / (j * ln);
        let rhs = 2.0 * p * (1.0 - p) - (x - 2.0 * i).powi(2) / (x - i);
        let margin = rhs - lhs;
        if margin < worst.worst_margin {
            worst.worst_margin = margin;
            worst.worst_x = x;
        }
        if margin < 0.0 {
            worst.holds = false;
        }
    }
    Ok(worst)
}

/// Everything the bounds module reports for one degree sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub ell_n: u64,
    pub d_min: u32,
    pub d_ave: f64,
    pub upper: Option<UpperBound>,
    pub upper_error: Option<String>,
    pub lower: LowerBound,
    pub dirac_upper_constant: Option<f64>,
    /// `(δ, x, I_δ(x))`.
    pub i_values: Vec<(f64, f64, f64)>,
    pub strict_h: Option<bool>,
    pub strict_h_margin: Option<f64>,
    pub weak_h: WeakHCheck,
}

pub fn bounds_report(
    seq: &DegreeSequence,
    j: f64,
    h: f64,
    slack_constant: f64,
) -> Result<BoundsReport> {
    let (upper, upper_error) = match gamma_upper_with_slack(seq, j, h, slack_constant) {
        Ok(u) => (Some(u), None),
        Err(Error::Numeric(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let lower = gamma_lower(seq, j, h)?;
    let d_min = f64::from(seq.d_min());
    let d_ave = seq.d_ave();
    let dirac =
        (seq.d_min() == seq.d_max()).then(|| dirac_upper_constant(seq.d_min(), seq.n(), j, h));
    let strict_h = if d_min >= 3.0 {
        Some(h_condition_strict(d_min, d_ave, j, h)?)
    } else {
        None
    };
    Ok(BoundsReport {
        n: seq.n(),
        ell_n: seq.total(),
        d_min: seq.d_min(),
        d_ave,
        upper,
        upper_error,
        i_values: vec![
            (d_ave, 0.5, lower.i_dave_half),
            (d_min, 0.5, i_delta_value(d_min, 0.5)?),
        ],
        lower,
        dirac_upper_constant: dirac,
        strict_h,
        strict_h_margin: if d_min > 1.0 {
            Some(h_condition_strict_margin(d_min, d_ave)?)
        } else {
            None
        },
        weak_h: h_condition_weak(seq, j, h)?,
    })
}
