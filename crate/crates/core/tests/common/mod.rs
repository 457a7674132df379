//! Oracles shared by integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use cmglauber::energy::{hamiltonian, ModelParams, SpinConfig};
use cmglauber::graph::MultiGraph;

pub fn energies(g: &MultiGraph, p: &ModelParams) -> Vec<f64> {
    let n = g.n();
    (0..1u64 << n)
        .map(|x| hamiltonian(g, &SpinConfig::from_index(n, x).unwrap(), p))
        .collect()
}

/// Exact expected hitting time of `target` from every state of the
/// Metropolis chain, by Gaussian elimination on `(−Q) m = 1` off target.
pub fn exact_mean_hitting(g: &MultiGraph, p: &ModelParams, target: usize) -> Vec<f64> {
    let n = g.n();
    let e = energies(g, p);
    let states: Vec<usize> = (0..e.len()).filter(|&x| x != target).collect();
    let pos = |x: usize| states.iter().position(|&s| s == x);
    let k = states.len();
    let mut a = vec![vec![0.0f64; k + 1]; k];
    for (i, &x) in states.iter().enumerate() {
        for v in 0..n {
            let y = x ^ (1 << v);
            let rate = (-p.beta * (e[y] - e[x]).max(0.0)).exp();
            a[i][i] += rate;
            if let Some(j) = pos(y) {
                a[i][j] -= rate;
            }
        }
        a[i][k] = 1.0;
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        for c in col..=k {
            a[col][c] /= d;
        }
        for r in 0..k {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut out = vec![0.0; e.len()];
    for (i, &x) in states.iter().enumerate() {
        out[x] = a[i][k];
    }
    out
}
