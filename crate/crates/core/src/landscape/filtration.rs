//! Union–find sweeps over the sorted configurations.

use super::{Landscape, ENERGY_TOL};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// Disjoint sets whose root is always the member inserted first, so the
/// root is also the component's lowest configuration.
struct Forest {
    parent: Vec<u32>,
    pos: Vec<u32>,
}

impl Forest {
    fn new(l: &Landscape) -> Self {
        let mut pos = vec![NONE; l.size()];
        for (rank, &x) in l.order().iter().enumerate() {
            pos[x as usize] = rank as u32;
        }
        Self {
            parent: (0..l.size() as u32).collect(),
            pos,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Joins the roots `a` and `b`; returns `(kept, absorbed)`.
    fn link(&mut self, a: u32, b: u32) -> (u32, u32) {
        let (keep, lose) = if self.pos[a as usize] < self.pos[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[lose as usize] = keep;
        (keep, lose)
    }

    fn inserted_before(&self, y: u32, x: u32) -> bool {
        self.pos[y as usize] < self.pos[x as usize]
    }
}

/// Linked member lists keyed by root.
struct Lists {
    next: Vec<u32>,
    head: Vec<u32>,
    tail: Vec<u32>,
}

impl Lists {
    fn new(size: usize) -> Self {
        Self {
            next: vec![NONE; size],
            head: vec![NONE; size],
            tail: vec![NONE; size],
        }
    }

    fn singleton(&mut self, x: u32) {
        self.head[x as usize] = x;
        self.tail[x as usize] = x;
        self.next[x as usize] = NONE;
    }

    /// Moves the list of `from` onto the end of the list of `to`.
    fn append(&mut self, to: u32, from: u32) {
        let h = std::mem::replace(&mut self.head[from as usize], NONE);
        let t = std::mem::replace(&mut self.tail[from as usize], NONE);
        if h == NONE {
            return;
        }
        if self.head[to as usize] == NONE {
            self.head[to as usize] = h;
        } else {
            self.next[self.tail[to as usize] as usize] = h;
        }
        self.tail[to as usize] = t;
    }

    fn take(&mut self, root: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut cur = std::mem::replace(&mut self.head[root as usize], NONE);
        self.tail[root as usize] = NONE;
        while cur != NONE {
            out.push(cur);
            cur = self.next[cur as usize];
        }
        out
    }

    fn push(&mut self, root: u32, x: u32) {
        self.next[x as usize] = NONE;
        if self.head[root as usize] == NONE {
            self.head[root as usize] = x;
        } else {
            self.next[self.tail[root as usize] as usize] = x;
        }
        self.tail[root as usize] = x;
    }
}

fn neighbours(n: usize, x: u32) -> impl Iterator<Item = u32> {
    (0..n).map(move |v| x ^ (1 << v))
}

pub(super) fn communication_height(l: &Landscape, a: &[u32], b: &[u32]) -> Result<f64> {
    const IN_A: u8 = 1;
    const IN_B: u8 = 2;
    let mut flags = vec![0u8; l.size()];
    for &x in a {
        *flags.get_mut(x as usize).ok_or_else(|| out_of_range(x))? |= IN_A;
    }
    for &x in b {
        *flags.get_mut(x as usize).ok_or_else(|| out_of_range(x))? |= IN_B;
    }
    let mut forest = Forest::new(l);
    for &x in l.order() {
        let mut root = x;
        for y in neighbours(l.n(), x) {
            if !forest.inserted_before(y, x) {
                continue;
            }
            let ry = forest.find(y);
            if ry == root {
                continue;
            }
            let merged = flags[root as usize] | flags[ry as usize];
            root = forest.link(root, ry).0;
            flags[root as usize] = merged;
        }
        if flags[root as usize] == IN_A | IN_B {
            return Ok(l.energy(x));
        }
    }
    Ok(f64::INFINITY)
}

fn out_of_range(x: u32) -> Error {
    Error::InvalidParameter(format!("configuration index {x} outside the landscape"))
}

pub(super) fn stability_levels(l: &Landscape) -> Vec<f64> {
    let mut v = vec![f64::INFINITY; l.size()];
    let mut forest = Forest::new(l);
    let mut pending = Lists::new(l.size());
    for &x in l.order() {
        let e_ins = l.energy(x);
        pending.singleton(x);
        let mut root = x;
        for y in neighbours(l.n(), x) {
            if !forest.inserted_before(y, x) {
                continue;
            }
            let ry = forest.find(y);
            if ry == root {
                continue;
            }
            let (keep, lose) = forest.link(root, ry);
            let floor = l.energy(keep);
            for xi in pending.take(lose) {
                if floor < l.energy(xi) - ENERGY_TOL {
                    v[xi as usize] = e_ins - l.energy(xi);
                } else {
                    pending.push(keep, xi);
                }
            }
            root = keep;
        }
    }
    v
}

pub(super) fn minimax_from(l: &Landscape, source: u32) -> Vec<f64> {
    let mut phi = vec![f64::INFINITY; l.size()];
    let mut forest = Forest::new(l);
    let mut members = Lists::new(l.size());
    let mut source_root = NONE;
    for &x in l.order() {
        let e_ins = l.energy(x);
        members.singleton(x);
        if x == source {
            phi[x as usize] = e_ins;
            source_root = x;
        }
        let mut root = x;
        for y in neighbours(l.n(), x) {
            if !forest.inserted_before(y, x) {
                continue;
            }
            let ry = forest.find(y);
            if ry == root {
                continue;
            }
            let (keep, lose) = forest.link(root, ry);
            let with_source = root == source_root || ry == source_root;
            if with_source {
                let other = if root == source_root { ry } else { root };
                for m in members.take(other) {
                    phi[m as usize] = e_ins;
                }
                members.take(lose);
                source_root = keep;
            } else {
                members.append(keep, lose);
            }
            root = keep;
        }
    }
    phi
}
