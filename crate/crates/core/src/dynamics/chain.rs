use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::energy::{ModelParams, SpinConfig};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Metropolis rate of a move that changes the energy by `delta`.
pub fn flip_rate(delta: f64, beta: f64) -> f64 {
    (-beta * delta.max(0.0)).exp()
}

/// A set of configurations the chain can be tested against cheaply.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigSet {
    Minus,
    Plus,
    /// Bit-mask indices; needs `n ≤ 63`.
    Indices(HashSet<u64>),
}

impl ConfigSet {
    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        if n > 63 {
            return Err(Error::Capacity {
                what: "indexed configuration set",
                n,
                cap: 63,
            });
        }
        let set: HashSet<u64> = indices.into_iter().collect();
        if let Some(x) = set.iter().find(|&&x| x >> n != 0) {
            return Err(Error::InvalidParameter(format!(
                "index {x:x} has more than {n} bits"
            )));
        }
        Ok(ConfigSet::Indices(set))
    }

    pub fn contains(&self, chain: &GlauberChain) -> bool {
        match self {
            ConfigSet::Minus => chain.plus_count == 0,
            ConfigSet::Plus => chain.plus_count == chain.n(),
            ConfigSet::Indices(set) => chain.index.is_some_and(|x| set.contains(&x)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimCaps {
    pub max_events: u64,
    pub max_wall: Option<Duration>,
}

impl Default for SimCaps {
    fn default() -> Self {
        Self {
            max_events: 1_000_000_000,
            max_wall: None,
        }
    }
}

/// The running chain: spins, local fields and the rate of every flip.
#[derive(Debug, Clone)]
pub struct GlauberChain<'g> {
    g: &'g MultiGraph,
    params: ModelParams,
    spins: Vec<i8>,
    field: Vec<i64>,
    rates: Vec<f64>,
    index: Option<u64>,
    plus_count: usize,
    time: f64,
    events: u64,
}

impl<'g> GlauberChain<'g> {
    pub fn new(g: &'g MultiGraph, params: &ModelParams, start: &SpinConfig) -> Result<Self> {
        if start.n() != g.n() {
            return Err(Error::VertexCountMismatch {
                left: start.n(),
                right: g.n(),
            });
        }
        if !(params.beta >= 0.0 && params.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "β must be finite and >= 0, got {}",
                params.beta
            )));
        }
        let n = g.n();
        let spins: Vec<i8> = (0..n)
            .map(|v| if start.is_plus(v) { 1 } else { -1 })
            .collect();
        let field = (0..n)
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .filter(|&&w| w as usize != v)
                    .map(|&w| i64::from(spins[w as usize]))
                    .sum()
            })
            .collect();
        let mut chain = Self {
            g,
            params: *params,
            spins,
            field,
            rates: vec![0.0; n],
            index: start.index(),
            plus_count: start.count(),
            time: 0.0,
            events: 0,
        };
        for v in 0..n {
            chain.rates[v] = flip_rate(chain.delta(v), params.beta);
        }
        Ok(chain)
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    /// `ℋ(σ^v) − ℋ(σ)`.
    pub fn delta(&self, v: usize) -> f64 {
        let s = f64::from(self.spins[v]);
        self.params.j * s * self.field[v] as f64 + self.params.h * s
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn index(&self) -> Option<u64> {
        self.index
    }

    pub fn plus_count(&self) -> usize {
        self.plus_count
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn state(&self) -> SpinConfig {
        SpinConfig::from_plus_set(self.n(), (0..self.n()).filter(|&v| self.spins[v] > 0))
            .expect("vertices in range")
    }

    /// Picks the next flip without applying it.
    pub fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total: f64 = self.rates.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (v, &r) in self.rates.iter().enumerate() {
            if u < r {
                return v;
            }
            u -= r;
        }
        // rounding at the top end
        self.rates.iter().rposition(|&r| r > 0.0).unwrap_or(0)
    }

    /// One holding time plus one flip; returns the flipped vertex.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let total: f64 = self.rates.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numeric(format!(
                "total flip rate {total} is not positive"
            )));
        }
        let hold: f64 = rng.sample(Exp1);
        let v = self.choose(rng);
        self.time += hold / total;
        self.flip(v);
        Ok(v)
    }

    fn flip(&mut self, v: usize) {
        let new = -self.spins[v];
        self.spins[v] = new;
        if new > 0 {
            self.plus_count += 1;
        } else {
            self.plus_count -= 1;
        }
        if let Some(x) = self.index.as_mut() {
            *x ^= 1 << v;
        }
        let beta = self.params.beta;
        let g = self.g;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if w != v {
                self.field[w] += 2 * i64::from(new);
                self.rates[w] = flip_rate(self.delta(w), beta);
            }
        }
        self.rates[v] = flip_rate(self.delta(v), beta);
        self.events += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HittingSample {
    pub tau: f64,
    pub events: u64,
    /// The gate was visited after the last visit to the start.
    pub visited_gate: bool,
    /// The gate was visited at any point.
    pub visited_gate_any: bool,
    pub returns_to_start: u64,
    pub truncated: bool,
}

/// First entry into `target` after the start has been left.
pub fn simulate_hitting<R: Rng + ?Sized>(
    g: &MultiGraph,
    params: &ModelParams,
    start: &SpinConfig,
    target: &ConfigSet,
    gate: Option<&ConfigSet>,
    rng: &mut R,
    caps: &SimCaps,
) -> Result<HittingSample> {
    let mut chain = GlauberChain::new(g, params, start)?;
    let start_index = chain.index;
    let start_state = (start_index.is_none()).then(|| start.clone());
    let at_start = |c: &GlauberChain| match (start_index, &start_state) {
        (Some(x), _) => c.index == Some(x),
        (None, Some(s)) => c.plus_count == s.count() && c.state() == *s,
        (None, None) => false,
    };
    let clock = caps.max_wall.map(|limit| (Instant::now(), limit));
    let mut gate_since_start = false;
    let mut gate_any = false;
    let mut returns = 0u64;
    loop {
        if chain.events >= caps.max_events
            || (chain.events % 4096 == 0 && clock.is_some_and(|(t0, limit)| t0.elapsed() >= limit))
        {
            return Ok(HittingSample {
                tau: chain.time,
                events: chain.events,
                visited_gate: gate_since_start,
                visited_gate_any: gate_any,
                returns_to_start: returns,
                truncated: true,
            });
        }
        chain.step(rng)?;
        if at_start(&chain) {
            returns += 1;
            gate_since_start = false;
        }
        if gate.is_some_and(|s| s.contains(&chain)) {
            gate_since_start = true;
            gate_any = true;
        }
        if target.contains(&chain) {
            return Ok(HittingSample {
                tau: chain.time,
                events: chain.events,
                visited_gate: gate_since_start,
                visited_gate_any: gate_any,
                returns_to_start: returns,
                truncated: false,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::flip_delta;
    use crate::graph::{build_reference_graph, ReferenceFamily};
    use crate::rng;

    #[test]
    fn rate_formula() {
        assert_eq!(flip_rate(-2.0, 5.0), 1.0);
        assert!((flip_rate(1.5, 2.0) - 0.049787068367863944).abs() < 1e-15);
    }

    #[test]
    fn local_fields_track_the_hamiltonian() {
        let g =
            MultiGraph::from_edges(5, [(0, 1), (0, 1), (1, 2), (2, 2), (3, 4), (4, 0)]).unwrap();
        let p = ModelParams::new(1.3, 0.4, 1.1).unwrap();
        let mut chain = GlauberChain::new(&g, &p, &SpinConfig::minus(5)).unwrap();
        let mut r = rng::master(5);
        for _ in 0..200 {
            chain.step(&mut r).unwrap();
            let s = chain.state();
            assert_eq!(s.index(), chain.index());
            for v in 0..5 {
                assert!((chain.delta(v) - flip_delta(&g, &s, v, &p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn starting_inside_target_waits_for_a_return() {
        let g = build_reference_graph(ReferenceFamily::Complete { n: 3 }).unwrap();
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let mut r = rng::master(1);
        let s = simulate_hitting(
            &g,
            &p,
            &SpinConfig::minus(3),
            &ConfigSet::Minus,
            None,
            &mut r,
            &SimCaps::default(),
        )
        .unwrap();
        assert!(s.tau > 0.0);
        assert!(s.events >= 2);
    }

    #[test]
    fn event_cap_truncates() {
        let g = build_reference_graph(ReferenceFamily::Complete { n: 4 }).unwrap();
        let p = ModelParams::new(1.0, 0.5, 6.0).unwrap();
        let caps = SimCaps {
            max_events: 10,
            max_wall: None,
        };
        let s = simulate_hitting(
            &g,
            &p,
            &SpinConfig::minus(4),
            &ConfigSet::Plus,
            None,
            &mut rng::master(2),
            &caps,
        )
        .unwrap();
        assert!(s.truncated);
        assert_eq!(s.events, 10);
    }

    #[test]
    fn identical_seeds_reproduce_trajectories() {
        let g = build_reference_graph(ReferenceFamily::Torus { l: 3 }).unwrap();
        let p = ModelParams::new(1.0, 0.7, 1.5).unwrap();
        let run = || {
            simulate_hitting(
                &g,
                &p,
                &SpinConfig::minus(9),
                &ConfigSet::Plus,
                None,
                &mut rng::stream(9, 4),
                &SimCaps::default(),
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.tau.to_bits(), b.tau.to_bits());
        assert_eq!(a.events, b.events);
    }
}
