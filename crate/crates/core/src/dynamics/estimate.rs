use rayon::prelude::*;
use serde::Serialize;

use super::chain::{simulate_hitting, ConfigSet, HittingSample, SimCaps};
use crate::energy::{ModelParams, SpinConfig};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::rng::{self, SimRng};
use crate::stats::{ks_unit_exponential, mean_stderr, weighted_linear_fit};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub completed: usize,
    pub truncated: usize,
    /// Every replica in index order, truncated ones included.
    pub samples: Vec<HittingSample>,
}

#[allow(clippy::too_many_arguments)]
fn run_replicas(
    g: &MultiGraph,
    params: &ModelParams,
    start: &SpinConfig,
    target: &ConfigSet,
    gate: Option<&ConfigSet>,
    replicas: usize,
    caps: &SimCaps,
    make_rng: impl Fn(u64) -> SimRng + Sync,
) -> Result<Vec<HittingSample>> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|k| simulate_hitting(g, params, start, target, gate, &mut make_rng(k), caps))
        .collect()
}

fn summarise(samples: Vec<HittingSample>) -> Result<MeanEstimate> {
    let taus: Vec<f64> = samples
        .iter()
        .filter(|s| !s.truncated)
        .map(|s| s.tau)
        .collect();
    let truncated = samples.len() - taus.len();
    if taus.is_empty() {
        return Err(Error::AllTruncated(samples.len()));
    }
    let (mean, stderr) = if taus.len() == 1 {
        (taus[0], f64::NAN)
    } else {
        mean_stderr(&taus)?
    };
    Ok(MeanEstimate {
        mean,
        stderr,
        completed: taus.len(),
        truncated,
        samples,
    })
}

/// Sample mean of the hitting time over `replicas` independent runs;
/// replica `k` draws from stream `k` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_mean_hitting(
    g: &MultiGraph,
    params: &ModelParams,
    start: &SpinConfig,
    target: &ConfigSet,
    gate: Option<&ConfigSet>,
    replicas: usize,
    seed: u64,
    caps: &SimCaps,
) -> Result<MeanEstimate> {
    if replicas < 2 {
        return Err(Error::InvalidParameter("need at least 2 replicas".into()));
    }
    let samples = run_replicas(g, params, start, target, gate, replicas, caps, |k| {
        rng::stream(seed, k)
    })?;
    summarise(samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrheniusFit {
    pub betas: Vec<f64>,
    pub log_means: Vec<f64>,
    /// Estimate of Γ*.
    pub slope: f64,
    /// Estimate of `log K*`.
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

/// Least squares of `log mean τ` against β, weighted by `(mean/stderr)²`
/// when standard errors are given.
pub fn arrhenius_fit(
    betas: &[f64],
    means: &[f64],
    stderrs: Option<&[f64]>,
) -> Result<ArrheniusFit> {
    if betas.len() < 3 {
        return Err(Error::InvalidParameter(
            "Arrhenius fit needs at least 3 β values".into(),
        ));
    }
    if means.len() != betas.len() || stderrs.is_some_and(|s| s.len() != betas.len()) {
        return Err(Error::InvalidParameter(
            "Arrhenius inputs differ in length".into(),
        ));
    }
    if means.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::Numeric("mean hitting times must be positive".into()));
    }
    let log_means: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let weights: Vec<f64> = match stderrs {
        Some(se) if se.iter().zip(means).all(|(&s, _)| s > 0.0 && s.is_finite()) => {
            se.iter().zip(means).map(|(s, m)| (m / s).powi(2)).collect()
        }
        _ => vec![1.0; betas.len()],
    };
    let fit = weighted_linear_fit(betas, &log_means, &weights)?;
    Ok(ArrheniusFit {
        betas: betas.to_vec(),
        log_means,
        slope: fit.slope,
        intercept: fit.intercept,
        slope_stderr: fit.slope_stderr,
        intercept_stderr: fit.intercept_stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpLawTest {
    pub ks: f64,
    pub threshold: f64,
    pub pass: bool,
    pub samples: usize,
}

/// KS distance of `τ / mean τ` from the unit exponential, passing below
/// `1.36/√N`.
pub fn exponential_law_test(samples: &[f64]) -> Result<ExpLawTest> {
    exponential_law_test_with(samples, 1.0)
}

/// As [`exponential_law_test`] with the threshold scaled by `factor`.
pub fn exponential_law_test_with(samples: &[f64], factor: f64) -> Result<ExpLawTest> {
    if samples.len() < 100 {
        return Err(Error::InvalidParameter(format!(
            "exponential law test needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    if !(mean > 0.0 && mean.is_finite()) || samples.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Numeric(
            "degenerate samples for the exponential law test".into(),
        ));
    }
    let scaled: Vec<f64> = samples.iter().map(|x| x / mean).collect();
    let ks = ks_unit_exponential(&scaled);
    let threshold = factor * 1.36 / (samples.len() as f64).sqrt();
    Ok(ExpLawTest {
        ks,
        threshold,
        pass: ks < threshold,
        samples: samples.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GatePassage {
    /// Share of crossings whose last excursion from ⊟ visited the gate.
    pub fraction: f64,
    /// Share of crossings that visited the gate at any time.
    pub fraction_any: f64,
    pub completed: usize,
    pub truncated: usize,
}

/// Runs ⊟ → ⊞ crossings and records gate visits on the final excursion.
pub fn gate_passage_probability(
    g: &MultiGraph,
    params: &ModelParams,
    gate: &ConfigSet,
    replicas: usize,
    seed: u64,
    caps: &SimCaps,
) -> Result<GatePassage> {
    let start = SpinConfig::minus(g.n());
    let samples = run_replicas(
        g,
        params,
        &start,
        &ConfigSet::Plus,
        Some(gate),
        replicas,
        caps,
        |k| rng::stream(seed, k),
    )?;
    let done: Vec<&HittingSample> = samples.iter().filter(|s| !s.truncated).collect();
    if done.is_empty() {
        return Err(Error::AllTruncated(samples.len()));
    }
    let share = |f: fn(&HittingSample) -> bool| {
        done.iter().filter(|s| f(s)).count() as f64 / done.len() as f64
    };
    Ok(GatePassage {
        fraction: share(|s| s.visited_gate),
        fraction_any: share(|s| s.visited_gate_any),
        completed: done.len(),
        truncated: samples.len() - done.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prefactor {
    pub beta: f64,
    pub mean: f64,
    pub stderr: f64,
    /// `e^{−βΓ*}` times the mean crossing time.
    pub k_hat: f64,
    pub k_stderr: f64,
    pub completed: usize,
    pub truncated: usize,
}

/// Mean crossing time ⊟ → ⊞ for each β; the β at position `i` uses
/// sub-seed label `i`, replica `k` its stream `k`.
#[allow(clippy::too_many_arguments)]
pub fn hitting_grid(
    g: &MultiGraph,
    params: &ModelParams,
    betas: &[f64],
    replicas: usize,
    seed: u64,
    gate: Option<&ConfigSet>,
    caps: &SimCaps,
) -> Result<Vec<MeanEstimate>> {
    if replicas < 2 {
        return Err(Error::InvalidParameter("need at least 2 replicas".into()));
    }
    let start = SpinConfig::minus(g.n());
    betas
        .iter()
        .enumerate()
        .map(|(i, &beta)| {
            let p = params.at_beta(beta);
            let samples =
                run_replicas(g, &p, &start, &ConfigSet::Plus, gate, replicas, caps, |k| {
                    rng::substream(seed, i as u64, k)
                })?;
            summarise(samples)
        })
        .collect()
}

/// `K̂(β) = e^{−βΓ*}·(mean crossing time)` for each β, seeded as in
/// [`hitting_grid`].
pub fn prefactor_estimate(
    g: &MultiGraph,
    params: &ModelParams,
    gamma_star: f64,
    betas: &[f64],
    replicas: usize,
    seed: u64,
    caps: &SimCaps,
) -> Result<Vec<Prefactor>> {
    let grid = hitting_grid(g, params, betas, replicas, seed, None, caps)?;
    Ok(betas
        .iter()
        .zip(grid)
        .map(|(&beta, est)| {
            let scale = (-beta * gamma_star).exp();
            Prefactor {
                beta,
                mean: est.mean,
                stderr: est.stderr,
                k_hat: est.mean * scale,
                k_stderr: est.stderr * scale,
                completed: est.completed,
                truncated: est.truncated,
            }
        })
        .collect())
}
