//! Explicit descent and crossing paths, usable beyond the exhaustive cap.

use crate::energy::{flip_delta, hamiltonian, ModelParams, SpinConfig};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

use super::ENERGY_TOL;

#[derive(Debug, Clone)]
pub struct GreedyPath {
    /// Configurations after the start, in order.
    pub path: Vec<SpinConfig>,
    /// `max(0, max ℋ(γ) − ℋ(σ))`.
    pub elevation: f64,
    pub end_energy: f64,
}

/// Removes plus vertices one at a time, each time the one with the smallest
/// `|E(v, σ∖v)| − |E(v, σ̄)|` (lowest index on ties). Stops at ⊟, or once
/// below the start energy with every further removal uphill.
pub fn greedy_removal_path(
    g: &MultiGraph,
    params: &ModelParams,
    sigma: &SpinConfig,
) -> Result<GreedyPath> {
    if sigma.n() != g.n() {
        return Err(Error::VertexCountMismatch {
            left: sigma.n(),
            right: g.n(),
        });
    }
    let start = hamiltonian(g, sigma, params);
    let mut current = sigma.clone();
    let mut energy = start;
    let mut path = Vec::new();
    let mut top = start;
    while current.count() > 0 {
        let mut best: Option<(f64, usize)> = None;
        for v in current.plus_vertices() {
            let d = flip_delta(g, &current, v, params);
            if best.is_none_or(|(bd, _)| d < bd - ENERGY_TOL) {
                best = Some((d, v));
            }
        }
        let (d, v) = best.expect("non-empty plus set");
        if energy < start - ENERGY_TOL && d > 0.0 {
            break;
        }
        current.flip(v);
        energy += d;
        top = top.max(energy);
        path.push(current.clone());
    }
    Ok(GreedyPath {
        path,
        elevation: top - start,
        end_energy: energy,
    })
}

#[derive(Debug, Clone)]
pub struct SortedFlipPath {
    /// Vertices in flip order: increasing degree, then index.
    pub order: Vec<usize>,
    /// `ℋ(γ_m) − ℋ(⊟)` for `m = 0..=n`.
    pub profile: Vec<f64>,
    pub height: f64,
    /// First `m` attaining the height.
    pub argmax: usize,
}

/// Flips ⊟ to ⊞ one vertex at a time, lowest degree first.
pub fn sorted_flip_path(g: &MultiGraph, params: &ModelParams) -> SortedFlipPath {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut inside = vec![false; n];
    let mut boundary = 0i64;
    let mut profile = Vec::with_capacity(n + 1);
    profile.push(0.0);
    for (k, &v) in order.iter().enumerate() {
        let (mut into, mut out) = (0i64, 0i64);
        for &w in g.neighbors(v) {
            let w = w as usize;
            if w == v {
                continue;
            }
            if inside[w] {
                into += 1;
            } else {
                out += 1;
            }
        }
        boundary += out - into;
        inside[v] = true;
        profile.push(params.j * boundary as f64 - params.h * (k + 1) as f64);
    }
    let (argmax, height) =
        profile
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (m, &e)| if e > acc.1 { (m, e) } else { acc },
            );
    SortedFlipPath {
        order,
        profile,
        height,
        argmax,
    }
}
