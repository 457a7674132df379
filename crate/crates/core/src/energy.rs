//! Spin configurations and the Ising Hamiltonian on a multigraph.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// Largest vertex count with a compact integer index.
pub const MAX_INDEX_BITS: usize = 63;

/// Assignment of ±1 spins, stored as the bit set of `+1` vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig {
    n: usize,
    words: Vec<u64>,
}

impl SpinConfig {
    /// All spins `−1` (⊟).
    pub fn minus(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    /// All spins `+1` (⊞).
    pub fn plus(n: usize) -> Self {
        let mut s = Self::minus(n);
        for v in 0..n {
            s.set(v, true);
        }
        s
    }

    /// Configuration whose `+1` set is the bit pattern of `index`.
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        if n > MAX_INDEX_BITS {
            return Err(Error::Capacity {
                what: "compact configuration index",
                n,
                cap: MAX_INDEX_BITS,
            });
        }
        if n < 64 && index >> n != 0 {
            return Err(Error::InvalidParameter(format!(
                "index {index:#x} exceeds {n} vertices"
            )));
        }
        let mut s = Self::minus(n);
        if n > 0 {
            s.words[0] = index;
        }
        Ok(s)
    }

    pub fn from_plus_set(n: usize, plus: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::minus(n);
        for v in plus {
            if v >= n {
                return Err(Error::InvalidParameter(format!(
                    "vertex {v} out of range for {n}"
                )));
            }
            s.set(v, true);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Compact index; `None` when `n > 63`.
    pub fn index(&self) -> Option<u64> {
        if self.n > MAX_INDEX_BITS {
            None
        } else {
            Some(self.words.first().copied().unwrap_or(0))
        }
    }

    pub fn is_plus(&self, v: usize) -> bool {
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    /// `+1` or `−1`.
    pub fn spin(&self, v: usize) -> i64 {
        if self.is_plus(v) {
            1
        } else {
            -1
        }
    }

    pub fn set(&mut self, v: usize, plus: bool) {
        assert!(v < self.n, "vertex {v} out of range for {}", self.n);
        if plus {
            self.words[v / 64] |= 1 << (v % 64);
        } else {
            self.words[v / 64] &= !(1 << (v % 64));
        }
    }

    pub fn flip(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range for {}", self.n);
        self.words[v / 64] ^= 1 << (v % 64);
    }

    pub fn flipped(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.flip(v);
        s
    }

    /// `|σ|`, the number of `+1` spins.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The spin-reversed configuration `σ̄`.
    pub fn complement(&self) -> Self {
        let mut s = self.clone();
        for w in &mut s.words {
            *w = !*w;
        }
        s.clear_tail();
        s
    }

    fn clear_tail(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn plus_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.is_plus(v))
    }

    /// Lowercase hex bit mask for `n <= 63`, otherwise a sorted `+1` list
    /// such as `[0,5,17]`.
    pub fn to_text(&self) -> String {
        match self.index() {
            Some(i) => format!("{i:x}"),
            None => {
                let ids: Vec<String> = self.plus_vertices().map(|v| v.to_string()).collect();
                format!("[{}]", ids.join(","))
            }
        }
    }

    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(body) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let mut plus = Vec::new();
            for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                plus.push(part.parse::<usize>().map_err(|e| {
                    Error::InvalidParameter(format!("bad vertex id `{part}`: {e}"))
                })?);
            }
            return Self::from_plus_set(n, plus);
        }
        let index = u64::from_str_radix(text, 16)
            .map_err(|e| Error::InvalidParameter(format!("bad configuration `{text}`: {e}")))?;
        Self::from_index(n, index)
    }
}

impl fmt::Debug for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfig(n={}, {})", self.n, self.to_text())
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Pair potential `J`, field `h` and inverse temperature `β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub j: f64,
    pub h: f64,
    pub beta: f64,
}

impl ModelParams {
    /// Requires `J > 0`, `h > 0`, `β >= 0`.
    pub fn new(j: f64, h: f64, beta: f64) -> Result<Self> {
        let p = Self { j, h, beta };
        p.validate()?;
        Ok(p)
    }

    /// As [`ModelParams::new`] but admits `h = 0`, for symmetry checks.
    pub fn with_zero_field_allowed(j: f64, h: f64, beta: f64) -> Result<Self> {
        if !(j > 0.0 && j.is_finite() && h >= 0.0 && h.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "J={j}, h={h}, beta={beta}"
            )));
        }
        Ok(Self { j, h, beta })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j > 0.0 && self.j.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "J must be positive, got {}",
                self.j
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn at_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }
}

/// `ℋ(σ) = −(J/2) Σ_edges ξ(v)ξ(w) − (h/2) Σ_v ξ(v)`, multi-edges counted
/// with multiplicity and every self-loop contributing `−J/2`.
pub fn hamiltonian(g: &MultiGraph, sigma: &SpinConfig, params: &ModelParams) -> f64 {
    let pair: i64 = g
        .edges()
        .iter()
        .map(|&(u, v)| sigma.spin(u as usize) * sigma.spin(v as usize))
        .sum();
    let field: i64 = (0..g.n()).map(|v| sigma.spin(v)).sum();
    -0.5 * params.j * pair as f64 - 0.5 * params.h * field as f64
}

/// `ℋ(σ with v flipped) − ℋ(σ)` from the neighbourhood of `v`.
pub fn flip_delta(g: &MultiGraph, sigma: &SpinConfig, v: usize, params: &ModelParams) -> f64 {
    let s = sigma.spin(v);
    let local: i64 = g
        .neighbors(v)
        .iter()
        .filter(|&&w| w as usize != v)
        .map(|&w| sigma.spin(w as usize))
        .sum();
    params.j * (s * local) as f64 + params.h * s as f64
}

/// `|E(σ, σ̄)|`, edges with one `+1` and one `−1` endpoint.
pub fn boundary_edge_count(g: &MultiGraph, sigma: &SpinConfig) -> u64 {
    g.edges()
        .iter()
        .filter(|&&(u, v)| sigma.is_plus(u as usize) != sigma.is_plus(v as usize))
        .count() as u64
}

/// `ℓ_σ`, total degree of the `+1` vertices.
pub fn plus_degree_sum(g: &MultiGraph, sigma: &SpinConfig) -> u64 {
    sigma.plus_vertices().map(|v| u64::from(g.degree(v))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cm_static, build_reference_graph, ReferenceFamily};
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn k(n: usize) -> MultiGraph {
        build_reference_graph(ReferenceFamily::Complete { n }).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let g = k(3);
        assert!((hamiltonian(&g, &SpinConfig::minus(3), &p) + 0.75).abs() < 1e-12);
        let one = SpinConfig::from_plus_set(3, [0]).unwrap();
        assert!((hamiltonian(&g, &one, &p) - 0.75).abs() < 1e-12);

        let loop1 = MultiGraph::from_edges(1, [(0, 0)]).unwrap();
        let p2 = ModelParams::new(1.0, 2.0, 1.0).unwrap();
        assert!((hamiltonian(&loop1, &SpinConfig::minus(1), &p2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flip_examples() {
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        assert!((flip_delta(&k(3), &SpinConfig::minus(3), 0, &p) - 1.5).abs() < 1e-12);
        let loop1 = MultiGraph::from_edges(1, [(0, 0)]).unwrap();
        assert!((flip_delta(&loop1, &SpinConfig::minus(1), 0, &p) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn boundary_and_degree_sums() {
        let g = k(4);
        assert_eq!(boundary_edge_count(&g, &SpinConfig::minus(4)), 0);
        assert_eq!(boundary_edge_count(&g, &SpinConfig::plus(4)), 0);
        assert_eq!(
            boundary_edge_count(&g, &SpinConfig::from_plus_set(4, [1, 3]).unwrap()),
            4
        );
        assert_eq!(plus_degree_sum(&g, &SpinConfig::minus(4)), 0);
        assert_eq!(plus_degree_sum(&g, &SpinConfig::plus(4)), 12);
        let cm = build_cm_static(&[3; 10], &mut rng::master(1)).unwrap();
        let s = SpinConfig::from_plus_set(10, 0..5).unwrap();
        assert_eq!(plus_degree_sum(&cm, &s), 15);
    }

    #[test]
    fn text_round_trip() {
        let s = SpinConfig::from_plus_set(10, [0, 3, 9]).unwrap();
        assert_eq!(s.to_text(), "209");
        assert_eq!(SpinConfig::parse(10, "209").unwrap(), s);
        let big = SpinConfig::from_plus_set(70, [1, 64, 69]).unwrap();
        assert_eq!(big.to_text(), "[1,64,69]");
        assert_eq!(SpinConfig::parse(70, "[1,64,69]").unwrap(), big);
        assert!(SpinConfig::from_index(70, 1).is_err());
        assert!(SpinConfig::from_index(3, 8).is_err());
    }

    #[test]
    fn complement_and_extremes() {
        let s = SpinConfig::from_plus_set(5, [1, 2]).unwrap();
        assert_eq!(
            s.complement(),
            SpinConfig::from_plus_set(5, [0, 3, 4]).unwrap()
        );
        assert_eq!(SpinConfig::minus(5).complement(), SpinConfig::plus(5));
        assert_eq!(SpinConfig::plus(64).count(), 64);
        assert_eq!(SpinConfig::plus(65).complement().count(), 0);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, -1.0).is_err());
        assert!(ModelParams::with_zero_field_allowed(1.0, 0.0, 1.0).is_ok());
    }

    fn random_instance(seed: u64) -> (MultiGraph, SpinConfig) {
        let mut r = rng::master(seed);
        let n = r.random_range(1..12);
        let m = r.random_range(0..25);
        let edges: Vec<(usize, usize)> = (0..m)
            .map(|_| (r.random_range(0..n), r.random_range(0..n)))
            .collect();
        let g = MultiGraph::from_edges(n, edges).unwrap();
        let s = SpinConfig::from_plus_set(n, (0..n).filter(|_| r.random::<bool>())).unwrap();
        (g, s)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn boundary_identity(seed in any::<u64>(), j in 0.1f64..3.0, h in 0.1f64..3.0) {
            let (g, s) = random_instance(seed);
            let p = ModelParams::new(j, h, 1.0).unwrap();
            let lhs = hamiltonian(&g, &s, &p) - hamiltonian(&g, &SpinConfig::minus(g.n()), &p);
            let rhs = j * boundary_edge_count(&g, &s) as f64 - h * s.count() as f64;
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn flip_delta_matches_difference(seed in any::<u64>(), j in 0.1f64..3.0, h in 0.1f64..3.0) {
            let (g, s) = random_instance(seed);
            let p = ModelParams::new(j, h, 1.0).unwrap();
            for v in 0..g.n() {
                let d = flip_delta(&g, &s, v, &p);
                let diff = hamiltonian(&g, &s.flipped(v), &p) - hamiltonian(&g, &s, &p);
                prop_assert!((d - diff).abs() < 1e-12 * (1.0 + diff.abs()));
                let back = flip_delta(&g, &s.flipped(v), v, &p);
                prop_assert!((d + back).abs() < 1e-12);
            }
        }

        #[test]
        fn zero_field_symmetry(seed in any::<u64>()) {
            let (g, s) = random_instance(seed);
            let p = ModelParams::with_zero_field_allowed(1.0, 0.0, 1.0).unwrap();
            prop_assert!((hamiltonian(&g, &s, &p) - hamiltonian(&g, &s.complement(), &p)).abs() < 1e-12);
        }
    }
}
