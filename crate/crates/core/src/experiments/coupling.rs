//! Coupled growth of two Configuration Models from different bases.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::ModelParams;
use crate::error::Result;
use crate::graph::matching::StubMatching;
use crate::graph::{
    edge_set_difference, is_connected, sample_degrees, sample_raw_degrees, CoupledCM,
    DegreeDistribution, GrowthScheme, MultiGraph, RedrawRule,
};
use crate::landscape::Landscape;
use crate::rng::{self, SimRng};
use crate::stats::{weighted_linear_fit, LinearFit};

const LABEL_DECAY: u64 = 0xC0;
const LABEL_OSCILLATION: u64 = 0xC1;
/// Largest graph in the oscillation-bound rows.
pub const OSCILLATION_MAX_N: usize = 12;

#[derive(Debug, Clone)]
pub struct CouplingParams {
    pub n: usize,
    pub degrees: DegreeDistribution,
    pub t_grid: Vec<usize>,
    pub seeds: usize,
    pub scheme: GrowthScheme,
    pub redraw: RedrawRule,
    pub exact_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub t: usize,
    /// Share of seeds with `G ≠ G′` under the identity labelling.
    pub mismatch_fraction: f64,
    pub mean_edge_difference: f64,
    pub mean_base_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationRow {
    pub index: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub k: usize,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub bound: f64,
    pub connected: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingResult {
    pub decay: Vec<DecayRow>,
    /// Log–log slope of the mismatch fraction against `t` (rows with a
    /// positive fraction only).
    pub slope: Option<LinearFit>,
    pub oscillation: Vec<OscillationRow>,
    /// Violations among pairs of connected graphs.
    pub oscillation_violations: usize,
    /// Identical bases grown to the largest `t` stayed identical.
    pub identical_stays_identical: bool,
}

/// Measures at a checkpoint; a pending stub is closed on a copy first.
fn measure(
    pair: &CoupledCM,
    dist: &DegreeDistribution,
    rng: &mut SimRng,
) -> Result<(bool, usize, f64)> {
    let mut closed;
    let pair = if pair.pending_stub() {
        closed = pair.clone();
        while closed.pending_stub() {
            closed.grow_coupled_pair(&sample_raw_degrees(dist, 1, rng)?, rng);
        }
        &closed
    } else {
        pair
    };
    let (a, b) = pair.graphs()?;
    let diff = edge_set_difference(&a, &b)?;
    Ok((diff > 0, diff, pair.base_mismatch_fraction()))
}

/// One seed grown through the whole grid: `(differs, |EΔE′|, base share)` per `t`.
fn decay_trajectory(
    p: &CouplingParams,
    identical: bool,
    rng: &mut SimRng,
) -> Result<Vec<(bool, usize, f64)>> {
    let base = sample_degrees(&p.degrees, p.n, false, rng)?;
    let mut pair = if identical {
        CoupledCM::identical(base.degrees(), p.scheme, rng)?
    } else {
        CoupledCM::independent(base.degrees(), p.scheme, rng)?
    };
    let added = sample_raw_degrees(&p.degrees, p.t_grid.last().copied().unwrap_or(0), rng)?;
    let mut out = Vec::with_capacity(p.t_grid.len());
    let mut grown = 0;
    for &t in &p.t_grid {
        for &d in &added[grown..t] {
            pair.grow_coupled_pair(&[d], rng);
        }
        grown = t;
        out.push(measure(&pair, &p.degrees, rng)?);
    }
    Ok(out)
}

/// Relabels `a` into the vertex set of `b`: base vertices keep their id,
/// grown vertices are shifted past the extra base vertices of `b`.
fn embed(a: &MultiGraph, base_a: usize, base_b: usize, n_b: usize) -> Result<MultiGraph> {
    let map = |v: u32| {
        let v = v as usize;
        if v < base_a {
            v
        } else {
            v - base_a + base_b
        }
    };
    MultiGraph::from_edges(n_b, a.edges().iter().map(|&(u, v)| (map(u), map(v))))
}

fn oscillation_row(
    index: usize,
    p: &CouplingParams,
    params: &ModelParams,
    rng: &mut SimRng,
) -> Result<OscillationRow> {
    // bases of 4..=8 vertices, the larger at most two bigger, both even
    let r = match p.degrees {
        DegreeDistribution::Dirac { r } => r,
        DegreeDistribution::PowerLaw { delta, .. } => delta,
    };
    let step = if r % 2 == 0 { 1 } else { 2 };
    let n_a = 2 + step * rng.random_range(1..=6 / step);
    let n_b = (n_a + step * rng.random_range(0..=1)).min(OSCILLATION_MAX_N - step);
    let da = vec![r; n_a];
    let db = vec![r; n_b];
    let a = StubMatching::uniform(da.iter().map(|&d| d as usize).sum(), rng)?;
    let b = StubMatching::uniform(db.iter().map(|&d| d as usize).sum(), rng)?;
    let mut pair = CoupledCM::new(a, &da, b, &db, p.scheme, p.redraw)?;
    let room = (OSCILLATION_MAX_N - n_b) / step;
    let grow = step * rng.random_range(0..=room);
    for _ in 0..grow {
        pair.grow_coupled_pair(&[r], rng);
    }
    let (ga, gb) = pair.graphs()?;
    let k = edge_set_difference(&embed(&ga, n_a, n_b, gb.n())?, &gb)?;
    let gamma_a = Landscape::new(&ga, params)?.energy_barrier();
    let gamma_b = Landscape::new(&gb, params)?.energy_barrier();
    let bound = params.j * k as f64 + params.h * (gb.n() - ga.n()) as f64;
    let connected = is_connected(&ga) && is_connected(&gb);
    Ok(OscillationRow {
        index,
        n_a: ga.n(),
        n_b: gb.n(),
        k,
        gamma_a,
        gamma_b,
        bound,
        connected,
        holds: (gamma_a - gamma_b).abs() <= bound + 1e-9,
    })
}

pub fn coupling_decay_experiment(
    p: &CouplingParams,
    params: &ModelParams,
    seed: u64,
) -> Result<CouplingResult> {
    let runs: Vec<Vec<(bool, usize, f64)>> = (0..p.seeds as u64)
        .into_par_iter()
        .map(|s| decay_trajectory(p, false, &mut rng::substream(seed, LABEL_DECAY, s)))
        .collect::<Result<_>>()?;
    let seeds = p.seeds as f64;
    let decay: Vec<DecayRow> = p
        .t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| DecayRow {
            t,
            mismatch_fraction: runs.iter().filter(|r| r[i].0).count() as f64 / seeds,
            mean_edge_difference: runs.iter().map(|r| r[i].1 as f64).sum::<f64>() / seeds,
            mean_base_mismatch: runs.iter().map(|r| r[i].2).sum::<f64>() / seeds,
        })
        .collect();
    let pts: Vec<(f64, f64)> = decay
        .iter()
        .filter(|r| r.mismatch_fraction > 0.0)
        .map(|r| ((r.t as f64).ln(), r.mismatch_fraction.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        weighted_linear_fit(&x, &y, &vec![1.0; x.len()]).ok()
    } else {
        None
    };
    let identical = decay_trajectory(p, true, &mut rng::substream(seed, LABEL_DECAY, u64::MAX))?;
    let oscillation: Vec<OscillationRow> = (0..p.exact_rows)
        .into_par_iter()
        .map(|i| {
            oscillation_row(
                i,
                p,
                params,
                &mut rng::substream(seed, LABEL_OSCILLATION, i as u64),
            )
        })
        .collect::<Result<_>>()?;
    Ok(CouplingResult {
        decay,
        slope,
        oscillation_violations: oscillation
            .iter()
            .filter(|r| r.connected && !r.holds)
            .count(),
        oscillation,
        identical_stays_identical: identical.iter().all(|m| !m.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_keeps_base_and_shifts_growth() {
        let a = MultiGraph::from_edges(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
        let e = embed(&a, 4, 6, 7).unwrap();
        assert_eq!(e.sorted_edges(), vec![(0, 1), (2, 3), (3, 6)]);
    }

    #[test]
    fn small_run() {
        let p = CouplingParams {
            n: 10,
            degrees: DegreeDistribution::Dirac { r: 3 },
            t_grid: vec![2, 6],
            seeds: 6,
            scheme: GrowthScheme::Single,
            redraw: RedrawRule::Printed,
            exact_rows: 4,
        };
        let params = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let r = coupling_decay_experiment(&p, &params, 5).unwrap();
        assert_eq!(r.decay.len(), 2);
        assert!(r.identical_stays_identical);
        assert_eq!(r.oscillation.len(), 4);
        assert!(r
            .oscillation
            .iter()
            .all(|row| row.n_b <= OSCILLATION_MAX_N && row.n_a <= row.n_b));
        assert_eq!(r, coupling_decay_experiment(&p, &params, 5).unwrap());
    }
}
