//! Edge-boundary concentration on Erdős–Rényi graphs.

use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{boundary_edge_count, ModelParams, SpinConfig};
use crate::error::Result;
use crate::graph::build_er;
use crate::landscape::{landscape_report, Landscape};
use crate::rng;

const LABEL_SAMPLES: u64 = 0xE0;
const LABEL_EXACT: u64 = 0xE1;
/// Accepted band for boundary/μ.
pub const RATIO_BAND: (f64, f64) = (0.9, 1.1);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErExact {
    pub n: usize,
    pub p: f64,
    pub gamma_star: f64,
    /// `¼·J·n²·p`.
    pub leading_order: f64,
    pub ratio: f64,
    pub h_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErResult {
    pub n: usize,
    pub p: f64,
    pub sigma_size: usize,
    /// `μ = p·|σ|·(n − |σ|)`.
    pub mu: f64,
    /// `|E(σ, σ̄)| / μ`, one per sample (fresh graph and σ each).
    pub ratios: Vec<f64>,
    pub within_band: usize,
    pub exact: Option<ErExact>,
}

pub fn er_exact_row(n: usize, p: f64, params: &ModelParams, seed: u64) -> Result<ErExact> {
    let g = build_er(n, p, &mut rng::substream(seed, LABEL_EXACT, 0))?;
    let l = Landscape::new(&g, params)?;
    let (report, _) = landscape_report(&l)?;
    let leading_order = 0.25 * params.j * (n * n) as f64 * p;
    Ok(ErExact {
        n,
        p,
        gamma_star: report.gamma_star,
        leading_order,
        ratio: report.gamma_star / leading_order,
        h_holds: report.h_holds,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn er_concentration_experiment(
    n: usize,
    p: Option<f64>,
    sigma_size: usize,
    samples: usize,
    exact: Option<(usize, f64)>,
    params: &ModelParams,
    seed: u64,
) -> Result<ErResult> {
    let p = p.unwrap_or_else(|| (n as f64).ln() / n as f64);
    let mu = p * sigma_size as f64 * (n - sigma_size) as f64;
    let ratios: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::substream(seed, LABEL_SAMPLES, k);
            let g = build_er(n, p, &mut r)?;
            let sigma = SpinConfig::from_plus_set(n, index::sample(&mut r, n, sigma_size))?;
            Ok(boundary_edge_count(&g, &sigma) as f64 / mu)
        })
        .collect::<Result<_>>()?;
    let within_band = ratios
        .iter()
        .filter(|&&r| (RATIO_BAND.0..=RATIO_BAND.1).contains(&r))
        .count();
    let exact = exact
        .map(|(en, ep)| er_exact_row(en, ep, params, seed))
        .transpose()?;
    Ok(ErResult {
        n,
        p,
        sigma_size,
        mu,
        ratios,
        within_band,
        exact,
    })
}
