//! `Γ*/n` across sizes: exact where the landscape fits, brackets beyond.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{gamma_lower, DEFAULT_SLACK_CONSTANT};
use crate::energy::ModelParams;
use crate::error::Result;
use crate::graph::{build_cm_static, sample_degrees, DegreeDistribution};
use crate::landscape::{sorted_flip_path, Landscape};
use crate::rng;

const LABEL_SCALING: u64 = 0x5C;
/// Largest `n` with an exact barrier row.
pub const EXACT_SCALING_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub seed: usize,
    pub gamma_exact: Option<f64>,
    pub path_height: f64,
    pub gamma_lower: f64,
    /// `c·ℓ_n^{3/4}` with the default constant.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingSummary {
    pub n: usize,
    /// Mean and standard deviation of Γ*/n (exact rows) or height/n.
    pub mean_per_n: f64,
    pub sd_per_n: f64,
    pub path_sd_per_n: f64,
    pub exact: bool,
}

/// One CM instance: degrees from `dist`, graph from stream `(n, seed)`.
pub fn scaling_row(
    dist: &DegreeDistribution,
    n: usize,
    seed_index: usize,
    params: &ModelParams,
    seed: u64,
) -> Result<ScalingRow> {
    let mut r = rng::substream(seed, LABEL_SCALING + ((n as u64) << 16), seed_index as u64);
    let seq = sample_degrees(dist, n, false, &mut r)?;
    let g = build_cm_static(seq.degrees(), &mut r)?;
    let gamma_exact = if n <= EXACT_SCALING_CAP {
        Some(Landscape::new(&g, params)?.energy_barrier())
    } else {
        None
    };
    Ok(ScalingRow {
        n,
        seed: seed_index,
        gamma_exact,
        path_height: sorted_flip_path(&g, params).height,
        gamma_lower: gamma_lower(&seq, params.j, params.h)?.gamma_minus,
        slack: DEFAULT_SLACK_CONSTANT * (seq.total() as f64).powf(0.75),
    })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    } else {
        0.0
    };
    (m, var.sqrt())
}

pub fn barrier_scaling_experiment(
    dist: &DegreeDistribution,
    ns: &[usize],
    seeds: usize,
    params: &ModelParams,
    seed: u64,
) -> Result<(Vec<ScalingRow>, Vec<ScalingSummary>)> {
    let jobs: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| (0..seeds).map(move |s| (n, s)))
        .collect();
    let rows: Vec<ScalingRow> = jobs
        .into_par_iter()
        .map(|(n, s)| scaling_row(dist, n, s, params, seed))
        .collect::<Result<_>>()?;
    let summaries = ns
        .iter()
        .map(|&n| {
            let here: Vec<&ScalingRow> = rows.iter().filter(|r| r.n == n).collect();
            let exact = here.iter().all(|r| r.gamma_exact.is_some());
            let vals: Vec<f64> = here
                .iter()
                .map(|r| r.gamma_exact.unwrap_or(r.path_height) / n as f64)
                .collect();
            let heights: Vec<f64> = here.iter().map(|r| r.path_height / n as f64).collect();
            let (mean_per_n, sd_per_n) = mean_sd(&vals);
            ScalingSummary {
                n,
                mean_per_n,
                sd_per_n,
                path_sd_per_n: mean_sd(&heights).1,
                exact,
            }
        })
        .collect();
    Ok((rows, summaries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rows_sit_below_the_path() {
        let params = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let (rows, summary) = barrier_scaling_experiment(
            &DegreeDistribution::Dirac { r: 3 },
            &[8, 12, 30],
            4,
            &params,
            1,
        )
        .unwrap();
        assert_eq!(rows.len(), 12);
        for r in &rows {
            if let Some(g) = r.gamma_exact {
                assert!(g <= r.path_height + 1e-9);
            }
        }
        assert!(summary[0].exact && !summary[2].exact);
    }
}
