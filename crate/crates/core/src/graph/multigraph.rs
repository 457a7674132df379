use std::collections::VecDeque;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::degrees::DegreeSequence;

/// Undirected multigraph on vertices `0..n`. Multi-edges and self-loops are
/// kept explicitly.
///
/// Each self-loop at `v` appears once in `adjacency[v]`; the degree counts
/// it twice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    n: usize,
    adjacency: Vec<Vec<u32>>,
    loops: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl MultiGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adjacency: vec![Vec::new(); n],
            loops: vec![0; n],
            edges: Vec::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidParameter(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.n
            )));
        }
        let (a, b) = (u.min(v) as u32, u.max(v) as u32);
        self.edges.push((a, b));
        if u == v {
            self.adjacency[u].push(u as u32);
            self.loops[u] += 1;
        } else {
            self.adjacency[u].push(v as u32);
            self.adjacency[v].push(u as u32);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(min, max)` pairs in insertion order, with multiplicity.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Neighbour multiset of `v`; a self-loop contributes `v` once.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn self_loops(&self, v: usize) -> u32 {
        self.loops[v]
    }

    /// Degree with each self-loop counted twice.
    pub fn degree(&self, v: usize) -> u32 {
        self.adjacency[v].len() as u32 + self.loops[v]
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Degree sequence (sorted). Fails on isolated vertices.
    pub fn degree_sequence(&self) -> Result<DegreeSequence> {
        DegreeSequence::new(self.degrees())
    }

    /// Sorted `(u, v)` edge multiset.
    pub fn sorted_edges(&self) -> Vec<(u32, u32)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parse_err = |lineno: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            msg: format!("line {}: {msg}", lineno + 1),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(hl, "header must be `n m`".into()));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(hl, format!("{e}")))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(hl, format!("{e}")))?;
        let mut g = Self::empty(n);
        for (i, line) in lines {
            let mut it = line.split_whitespace();
            let mut next = || -> Result<usize> {
                it.next()
                    .ok_or_else(|| parse_err(i, "expected `u v`".into()))?
                    .parse()
                    .map_err(|e| parse_err(i, format!("{e}")))
            };
            let (u, v) = (next()?, next()?);
            g.add_edge(u, v).map_err(|e| parse_err(i, e.to_string()))?;
        }
        if g.edge_count() != m {
            return Err(parse_err(
                hl,
                format!("header declares {m} edges, found {}", g.edge_count()),
            ));
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

/// Erdős–Rényi graph: each unordered pair independently with probability `p`.
pub fn build_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<MultiGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut g = MultiGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Deterministic reference families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ReferenceFamily {
    Complete {
        n: usize,
    },
    /// `L × L` square lattice with periodic boundary.
    Torus {
        l: usize,
    },
    /// `2^dim` vertices, adjacent when labels differ in one bit.
    Hypercube {
        dim: usize,
    },
}

impl std::str::FromStr for ReferenceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::Config(format!("bad graph family `{s}`"));
        let size = |p: &str| p.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["complete", n] => Ok(ReferenceFamily::Complete { n: size(n)? }),
            ["torus", l] => Ok(ReferenceFamily::Torus { l: size(l)? }),
            ["hypercube", d] => Ok(ReferenceFamily::Hypercube { dim: size(d)? }),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for ReferenceFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReferenceFamily::Complete { n } => write!(f, "complete {n}"),
            ReferenceFamily::Torus { l } => write!(f, "torus {l}"),
            ReferenceFamily::Hypercube { dim } => write!(f, "hypercube {dim}"),
        }
    }
}

pub fn build_reference_graph(family: ReferenceFamily) -> Result<MultiGraph> {
    match family {
        ReferenceFamily::Complete { n } => {
            if n == 0 {
                return Err(Error::InvalidParameter(
                    "complete graph needs n >= 1".into(),
                ));
            }
            let mut g = MultiGraph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    g.add_edge(u, v)?;
                }
            }
            Ok(g)
        }
        ReferenceFamily::Torus { l } => {
            if l == 0 {
                return Err(Error::InvalidParameter("torus needs L >= 1".into()));
            }
            let mut g = MultiGraph::empty(l * l);
            for r in 0..l {
                for c in 0..l {
                    let v = r * l + c;
                    g.add_edge(v, r * l + (c + 1) % l)?;
                    g.add_edge(v, ((r + 1) % l) * l + c)?;
                }
            }
            Ok(g)
        }
        ReferenceFamily::Hypercube { dim } => {
            if dim == 0 || dim > 24 {
                return Err(Error::InvalidParameter(format!(
                    "hypercube dimension {dim} outside 1..=24"
                )));
            }
            let mut g = MultiGraph::empty(1 << dim);
            for v in 0..1usize << dim {
                for b in 0..dim {
                    let w = v ^ (1 << b);
                    if v < w {
                        g.add_edge(v, w)?;
                    }
                }
            }
            Ok(g)
        }
    }
}

pub fn is_connected(g: &MultiGraph) -> bool {
    if g.n() <= 1 {
        return true;
    }
    let mut seen = vec![false; g.n()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            let w = w as usize;
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == g.n()
}

/// Size of the symmetric difference of the two edge multisets, vertices
/// identified by label.
pub fn edge_set_difference(g: &MultiGraph, h: &MultiGraph) -> Result<usize> {
    if g.n() != h.n() {
        return Err(Error::VertexCountMismatch {
            left: g.n(),
            right: h.n(),
        });
    }
    let a = g.sorted_edges();
    let b = h.sorted_edges();
    let (mut i, mut j, mut diff) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                diff += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                diff += 1;
                j += 1;
            }
        }
    }
    Ok(diff + (a.len() - i) + (b.len() - j))
}
