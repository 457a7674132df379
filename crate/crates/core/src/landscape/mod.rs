//! Exhaustive energy-landscape analysis over all `2^n` configurations.
//!
//! Configurations are indexed by their `+1` bit mask. Energies are built
//! along a Gray code from integer boundary counts, then sorted by
//! `(ℋ, index)` to drive a union–find filtration: a configuration is
//! inserted together with its already-inserted single-flip neighbours, and
//! two sets first share a component at their communication height.

mod filtration;
pub mod gates;
pub mod paths;
pub mod report;

use log::warn;
use rayon::prelude::*;

use crate::energy::{ModelParams, SpinConfig};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

pub use gates::{gate_sets, gate_sets_with_cap, satisfies_gate_conditions, GateReport};
pub use paths::{greedy_removal_path, sorted_flip_path, GreedyPath, SortedFlipPath};
pub use report::{landscape_report, Classification, LandscapeReport};

/// Largest `n` for barrier, Φ and V computations.
pub const BARRIER_CAP: usize = 24;
/// Largest `n` for gate construction.
pub const GATE_CAP: usize = 20;
/// Energies closer than this are the same level.
pub const ENERGY_TOL: f64 = 1e-9;
/// Absolute limit when a cap is overridden (memory).
pub const HARD_CAP: usize = 30;

/// Energies of all configurations of one graph, sorted for the filtration.
pub struct Landscape {
    n: usize,
    params: ModelParams,
    energies: Vec<f64>,
    order: Vec<u32>,
    /// Per vertex: neighbour masks by multiplicity layer (`layer k` holds
    /// neighbours joined by more than `k` non-loop edges).
    layers: Vec<Vec<u32>>,
}

impl Landscape {
    pub fn new(g: &MultiGraph, params: &ModelParams) -> Result<Self> {
        Self::with_cap(g, params, BARRIER_CAP)
    }

    /// As [`Landscape::new`] with a different cap; caps above the default
    /// log a warning.
    pub fn with_cap(g: &MultiGraph, params: &ModelParams, cap: usize) -> Result<Self> {
        let n = g.n();
        if cap > BARRIER_CAP {
            warn!("landscape capacity raised from {BARRIER_CAP} to {cap}");
        }
        let cap = cap.min(HARD_CAP);
        if n > cap {
            return Err(Error::Capacity {
                what: "exhaustive landscape",
                n,
                cap,
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter(
                "landscape of an empty graph".into(),
            ));
        }
        if !(params.j > 0.0 && params.h >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need J > 0, h >= 0; got {params:?}"
            )));
        }
        let layers = neighbor_layers(g);
        let energies = gray_code_energies(g, params, &layers);
        let mut order: Vec<u32> = (0..energies.len() as u32).collect();
        let key = |&a: &u32, &b: &u32| {
            energies[a as usize]
                .total_cmp(&energies[b as usize])
                .then(a.cmp(&b))
        };
        if n >= 14 {
            order.par_sort_unstable_by(key);
        } else {
            order.sort_unstable_by(key);
        }
        Ok(Self {
            n,
            params: *params,
            energies,
            order,
            layers,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn size(&self) -> usize {
        self.energies.len()
    }

    pub fn energy(&self, index: u32) -> f64 {
        self.energies[index as usize]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Configurations sorted by `(ℋ, index)`.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn minus_index(&self) -> u32 {
        0
    }

    pub fn plus_index(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    pub fn config(&self, index: u32) -> SpinConfig {
        SpinConfig::from_index(self.n, u64::from(index)).expect("index within landscape")
    }

    /// Number of non-loop edges between `v` and the vertices in `mask`.
    pub fn edges_into(&self, v: usize, mask: u32) -> u32 {
        self.layers[v]
            .iter()
            .map(|&l| (l & mask).count_ones())
            .sum()
    }

    /// Φ(A, B): lowest energy at which some `a ∈ A` and `b ∈ B` are joined.
    pub fn communication_height(&self, a: &[u32], b: &[u32]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidParameter(
                "communication height needs non-empty sets".into(),
            ));
        }
        filtration::communication_height(self, a, b)
    }

    /// Γ* = Φ(⊟, ⊞) − ℋ(⊟).
    pub fn energy_barrier(&self) -> f64 {
        let phi =
            filtration::communication_height(self, &[self.minus_index()], &[self.plus_index()])
                .expect("non-empty sets");
        phi - self.energy(self.minus_index())
    }

    /// `V_ξ` for every configuration; `+∞` on global minima.
    pub fn stability_levels(&self) -> Vec<f64> {
        filtration::stability_levels(self)
    }

    /// Φ(source, ξ) for every ξ.
    pub fn minimax_from(&self, source: u32) -> Vec<f64> {
        filtration::minimax_from(self, source)
    }
}

fn neighbor_layers(g: &MultiGraph) -> Vec<Vec<u32>> {
    (0..g.n())
        .map(|v| {
            let mut mult = vec![0usize; g.n()];
            for &w in g.neighbors(v) {
                if w as usize != v {
                    mult[w as usize] += 1;
                }
            }
            let depth = mult.iter().copied().max().unwrap_or(0);
            (0..depth)
                .map(|k| {
                    mult.iter()
                        .enumerate()
                        .filter(|&(_, &m)| m > k)
                        .fold(0u32, |acc, (w, _)| acc | 1 << w)
                })
                .collect()
        })
        .collect()
}

/// `ℋ(σ) = ℋ(⊟) + J·|E(σ, σ̄)| − h·|σ|` along a Gray code.
fn gray_code_energies(g: &MultiGraph, params: &ModelParams, layers: &[Vec<u32>]) -> Vec<f64> {
    let n = g.n();
    let h_minus = -0.5 * params.j * g.edge_count() as f64 + 0.5 * params.h * n as f64;
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let degree_no_loops: Vec<i64> = (0..n)
        .map(|v| layers[v].iter().map(|l| i64::from(l.count_ones())).sum())
        .collect();
    let mut energies = vec![0.0; 1 << n];
    energies[0] = h_minus;
    let mut config = 0u32;
    let mut boundary = 0i64;
    for i in 1u32..(1u32 << n) {
        let v = i.trailing_zeros() as usize;
        let differs = if config >> v & 1 == 1 {
            !config & full
        } else {
            config
        };
        let dif: i64 = layers[v]
            .iter()
            .map(|&l| i64::from((l & differs).count_ones()))
            .sum();
        boundary += degree_no_loops[v] - 2 * dif;
        config ^= 1 << v;
        energies[config as usize] =
            h_minus + params.j * boundary as f64 - params.h * f64::from(config.count_ones());
    }
    energies
}
