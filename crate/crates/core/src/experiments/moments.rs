//! Internal-match counts of the dynamically grown matching.
//!
//! `z_{x,t}` counts the stubs among the first `x` that are matched among
//! themselves after `t` single-draw steps started from a uniform matching of
//! `x` points.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::StubMatching;
use crate::rng;
use crate::stats::{mean_stderr, weighted_linear_fit, LinearFit};

const LABEL_MOMENTS: u64 = 0x30_0000;
const LABEL_CONCENTRATION: u64 = 0x31_0000;

/// `E[z_{x,t}] = x(x−1)/(x+2t−1)`.
pub fn z_mean(x: usize, t: usize) -> f64 {
    let (x, t) = (x as f64, t as f64);
    x * (x - 1.0) / (x + 2.0 * t - 1.0)
}

/// `E[z²_{x,t}]`; `x²` at `t = 0`.
pub fn z_second_moment(x: usize, t: usize) -> f64 {
    if t == 0 {
        return (x * x) as f64;
    }
    let (x, s) = (x as f64, (t - 1) as f64);
    x * (x - 1.0) * (x * (x - 3.0) + 4.0 * (s + 1.0)) / ((x + 2.0 * s + 1.0) * (x + 2.0 * s - 1.0))
}

/// `Var w_{x,t+1}` with `w = z/(x+2(t+1))`, in the simplified closed form.
pub fn w_variance_closed_form(x: usize, t: usize) -> f64 {
    let (x, t) = (x as f64, t as f64);
    let a = x / (x + 2.0 * (t + 1.0));
    let b = (x - 1.0) / (x + 2.0 * (t + 1.0));
    4.0 * a * b / (x + 2.0 * t + 1.0) * (t + 1.0) / (x + 2.0 * t - 1.0)
        * (1.0 - 1.0 / (1.0 + 2.0 * t / x + 1.0 / x))
}

/// `E[z̄_{x,(M−x)/2}] = x(M−x)/(M−1)`.
pub fn zbar_mean(x: usize, m: usize) -> f64 {
    x as f64 * (m - x) as f64 / (m as f64 - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub x: usize,
    pub t: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    pub exact_mean: f64,
    pub second: f64,
    pub second_stderr: f64,
    pub exact_second: f64,
    /// Sample variance of `z/(x+2t)`.
    pub w_variance: f64,
    /// Closed form for the same; absent at `t = 0`.
    pub w_variance_exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub m: usize,
    /// Mean over replicas of `max_x |z̄_{x,(M−x)/2} − x(M−x)/(M−1)|`.
    pub mean_max_deviation: f64,
    pub stderr: f64,
    /// `M^{1−α/3}`.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsResult {
    pub rows: Vec<MomentRow>,
    pub concentration: Vec<ConcentrationRow>,
    pub alpha: f64,
    /// Fitted exponent of the maximal deviation in `M`.
    pub exponent: Option<LinearFit>,
}

fn z_sample(x: usize, t: usize, rng: &mut rng::SimRng) -> Result<usize> {
    let mut m = StubMatching::uniform(x, rng)?;
    for _ in 0..t {
        m.dynamic_match_step(rng);
    }
    m.internal_match_count(x)
}

fn max_deviation(m: usize, rng: &mut rng::SimRng) -> Result<f64> {
    let matching = StubMatching::uniform(m, rng)?;
    let profile = matching.internal_match_profile();
    Ok(profile
        .iter()
        .enumerate()
        .map(|(half, &z)| {
            let x = 2 * half;
            ((x - z) as f64 - zbar_mean(x, m)).abs()
        })
        .fold(0.0, f64::max))
}

pub fn matching_moment_experiment(
    xs: &[usize],
    ts: &[usize],
    replicas: usize,
    m_grid: &[usize],
    alpha: f64,
    concentration_replicas: usize,
    seed: u64,
) -> Result<MomentsResult> {
    let mut rows = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &t) in ts.iter().enumerate() {
            let label = LABEL_MOMENTS + ((i as u64) << 8) + j as u64;
            let z: Vec<f64> = (0..replicas as u64)
                .into_par_iter()
                .map(|k| z_sample(x, t, &mut rng::substream(seed, label, k)).map(|z| z as f64))
                .collect::<Result<_>>()?;
            let z2: Vec<f64> = z.iter().map(|v| v * v).collect();
            let (mean, mean_se) = mean_stderr(&z)?;
            let (second, second_se) = mean_stderr(&z2)?;
            let scale = (x + 2 * t) as f64;
            let w_variance = (second - mean * mean) / (scale * scale) * replicas as f64
                / (replicas as f64 - 1.0);
            rows.push(MomentRow {
                x,
                t,
                mean,
                mean_stderr: mean_se,
                exact_mean: z_mean(x, t),
                second,
                second_stderr: second_se,
                exact_second: z_second_moment(x, t),
                w_variance,
                w_variance_exact: (t >= 1).then(|| w_variance_closed_form(x, t - 1)),
            });
        }
    }
    let mut concentration = Vec::new();
    for (i, &m) in m_grid.iter().enumerate() {
        let devs: Vec<f64> = (0..concentration_replicas as u64)
            .into_par_iter()
            .map(|k| {
                max_deviation(
                    m,
                    &mut rng::substream(seed, LABEL_CONCENTRATION + i as u64, k),
                )
            })
            .collect::<Result<_>>()?;
        let (mean, se) = if devs.len() >= 2 {
            mean_stderr(&devs)?
        } else {
            (devs[0], f64::NAN)
        };
        concentration.push(ConcentrationRow {
            m,
            mean_max_deviation: mean,
            stderr: se,
            reference: (m as f64).powf(1.0 - alpha / 3.0),
        });
    }
    let exponent = if concentration.len() >= 2 {
        let x: Vec<f64> = concentration.iter().map(|r| (r.m as f64).ln()).collect();
        let y: Vec<f64> = concentration
            .iter()
            .map(|r| r.mean_max_deviation.ln())
            .collect();
        Some(weighted_linear_fit(&x, &y, &vec![1.0; x.len()])?)
    } else {
        None
    };
    Ok(MomentsResult {
        rows,
        concentration,
        alpha,
        exponent,
    })
}
