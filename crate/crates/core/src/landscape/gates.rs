//! Maximal gate pair `(P*, C*)` of the `⊟ → ⊞` transition.
//!
//! With Λ = Φ(⊟, ⊞) and `S = {ζ : Φ(ζ, ⊟) < Φ(ζ, ⊞)}`, the candidates for
//! `C*` are the configurations reachable from ⊞ inside `{ℋ ≤ Λ} ∖ S`. Those
//! adjacent to `S` form `C*` and their neighbours in `S` form `P*`. Such a
//! `C*` lies exactly at level Λ, and `P*` strictly below it.

use std::collections::VecDeque;
use std::fmt::Write as _;

use log::warn;
use serde::Serialize;

use super::{Landscape, ENERGY_TOL, GATE_CAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub n: usize,
    /// Λ = Φ(⊟, ⊞).
    pub level: f64,
    pub gamma_star: f64,
    pub p_star: Vec<u32>,
    pub c_star: Vec<u32>,
}

impl GateReport {
    pub fn to_text(&self) -> String {
        let hex = |v: &[u32]| {
            v.iter()
                .map(|x| format!("{x:x}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "level: {}", self.level);
        let _ = writeln!(s, "gamma_star: {}", self.gamma_star);
        let _ = writeln!(s, "p_star_count: {}", self.p_star.len());
        let _ = writeln!(s, "p_star: {}", hex(&self.p_star));
        let _ = writeln!(s, "c_star_count: {}", self.c_star.len());
        let _ = writeln!(s, "c_star: {}", hex(&self.c_star));
        s
    }
}

struct Split {
    level: f64,
    in_s: Vec<bool>,
    candidate: Vec<bool>,
}

fn split(l: &Landscape) -> Split {
    let phi_m = l.minimax_from(l.minus_index());
    let phi_p = l.minimax_from(l.plus_index());
    let level = phi_m[l.plus_index() as usize];
    let in_s: Vec<bool> = phi_m
        .iter()
        .zip(&phi_p)
        .map(|(&m, &p)| m < p - ENERGY_TOL)
        .collect();
    let mut candidate = vec![false; l.size()];
    let start = l.plus_index();
    if !in_s[start as usize] && l.energy(start) <= level + ENERGY_TOL {
        candidate[start as usize] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for v in 0..l.n() {
                let y = x ^ (1 << v);
                let yi = y as usize;
                if !candidate[yi] && !in_s[yi] && l.energy(y) <= level + ENERGY_TOL {
                    candidate[yi] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    Split {
        level,
        in_s,
        candidate,
    }
}

pub fn gate_sets(l: &Landscape) -> Result<GateReport> {
    gate_sets_with_cap(l, GATE_CAP)
}

pub fn gate_sets_with_cap(l: &Landscape, cap: usize) -> Result<GateReport> {
    if cap > GATE_CAP {
        warn!("gate capacity raised from {GATE_CAP} to {cap}");
    }
    if l.n() > cap {
        return Err(Error::Capacity {
            what: "gate construction",
            n: l.n(),
            cap,
        });
    }
    let Split {
        level,
        in_s,
        candidate,
    } = split(l);
    let n = l.n();
    let touches_s = |x: u32| (0..n).any(|v| in_s[(x ^ (1 << v)) as usize]);

    let mut is_c = vec![false; l.size()];
    let mut c_star = Vec::new();
    for x in 0..l.size() as u32 {
        if candidate[x as usize] && touches_s(x) {
            is_c[x as usize] = true;
            c_star.push(x);
        }
    }
    if c_star.is_empty() {
        return Err(Error::Structural(format!(
            "no gate configuration found at level {level} (barrier {})",
            level - l.energy(l.minus_index())
        )));
    }
    if let Some(&x) = c_star
        .iter()
        .find(|&&x| (l.energy(x) - level).abs() > ENERGY_TOL)
    {
        return Err(Error::Structural(format!(
            "gate configuration {x:x} has energy {} off level {level}",
            l.energy(x)
        )));
    }
    let p_star: Vec<u32> = (0..l.size() as u32)
        .filter(|&x| in_s[x as usize] && (0..n).any(|v| is_c[(x ^ (1 << v)) as usize]))
        .collect();

    // maximality: no adjacent (S, candidate) pair is left out
    let mut is_p = vec![false; l.size()];
    for &p in &p_star {
        is_p[p as usize] = true;
    }
    for x in 0..l.size() as u32 {
        if !candidate[x as usize] {
            continue;
        }
        for v in 0..n {
            let y = x ^ (1 << v);
            if in_s[y as usize] && !(is_c[x as usize] && is_p[y as usize]) {
                return Err(Error::Structural(format!(
                    "gate pair not maximal: ({y:x}, {x:x}) could be adjoined"
                )));
            }
        }
    }
    Ok(GateReport {
        n,
        level,
        gamma_star: level - l.energy(l.minus_index()),
        p_star,
        c_star,
    })
}

/// Checks the three gate conditions for a candidate pair `(P, C)`.
pub fn satisfies_gate_conditions(l: &Landscape, p: &[u32], c: &[u32]) -> bool {
    if p.is_empty() || c.is_empty() {
        return false;
    }
    let adjacent = |x: u32, y: u32| (x ^ y).count_ones() == 1;
    if !p.iter().all(|&x| c.iter().any(|&y| adjacent(x, y)))
        || !c.iter().all(|&y| p.iter().any(|&x| adjacent(x, y)))
    {
        return false;
    }
    let Split {
        in_s, candidate, ..
    } = split(l);
    p.iter().all(|&x| in_s[x as usize]) && c.iter().all(|&y| candidate[y as usize])
}
