//! Small statistics helpers shared by the experiments.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::Numeric(format!(
            "need at least 2 samples, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

/// Weighted least squares `y ≈ intercept + slope·x`. Standard errors are
/// the weights-as-inverse-variances ones.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(Error::InvalidParameter(
            "fit inputs differ in length".into(),
        ));
    }
    if x.len() < 2 {
        return Err(Error::Numeric("need at least 2 points for a fit".into()));
    }
    if w.iter().any(|&wi| !(wi > 0.0 && wi.is_finite())) {
        return Err(Error::Numeric(
            "fit weights must be positive and finite".into(),
        ));
    }
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    if !(det.abs() > 1e-12 * sw * sxx.max(1e-300)) {
        return Err(Error::Numeric("singular fit: x values do not vary".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr: (sw / det).sqrt(),
        intercept_stderr: (sxx / det).sqrt(),
    })
}

/// Upper-tail p-value of Pearson's statistic against equal cell
/// probabilities.
pub fn chi_square_uniform_p(counts: &[usize]) -> Result<f64> {
    let k = counts.len();
    let probs = vec![1.0 / k as f64; k];
    chi_square_p(counts, &probs)
}

/// Upper-tail p-value of Pearson's statistic against `probs`.
pub fn chi_square_p(counts: &[usize], probs: &[f64]) -> Result<f64> {
    if counts.len() != probs.len() || counts.len() < 2 {
        return Err(Error::InvalidParameter(
            "chi-square needs >= 2 matching cells".into(),
        ));
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::Numeric("chi-square on empty counts".into()));
    }
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * total as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64)
        .map_err(|e| Error::Numeric(format!("chi-square distribution: {e}")))?;
    Ok(1.0 - dist.cdf(stat))
}

/// Kolmogorov–Smirnov distance between the empirical law of `xs` and the
/// unit exponential.
pub fn ks_unit_exponential(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x.max(0.0)).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
