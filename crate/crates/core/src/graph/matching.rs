use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::multigraph::MultiGraph;

const UNPAIRED: u32 = u32::MAX;

/// Perfect matching on stub indices `0..2m`. `partner[s]` is the stub
/// paired with `s`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StubMatching {
    partner: Vec<u32>,
}

/// Rule used to add two points to a matching.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthScheme {
    /// One draw `u` on `{0..=2m}`; `u = 2m` appends the new pair, otherwise
    /// `u`'s old partner moves to the first new point and `u` pairs with the
    /// second.
    #[default]
    Single,
    /// Two draws `u1` on `{0..2m}` and `u2` on `{0..=2m}`, both new points
    /// spliced into existing pairs and the two displaced stubs re-paired.
    TwoChoice,
}

impl StubMatching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds from explicit pairs over `0..2m`.
    pub fn from_pairs(points: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut partner = vec![UNPAIRED; points];
        for &(a, b) in pairs {
            if a >= points || b >= points || a == b {
                return Err(Error::Structural(format!("bad pair ({a}, {b})")));
            }
            if partner[a] != UNPAIRED || partner[b] != UNPAIRED {
                return Err(Error::Structural(format!("stub reused in pair ({a}, {b})")));
            }
            partner[a] = b as u32;
            partner[b] = a as u32;
        }
        if partner.contains(&UNPAIRED) {
            return Err(Error::Structural("matching is not perfect".into()));
        }
        Ok(Self { partner })
    }

    /// Uniform perfect matching of `points` stubs.
    pub fn uniform<R: Rng + ?Sized>(points: usize, rng: &mut R) -> Result<Self> {
        if !points.is_multiple_of(2) {
            return Err(Error::OddTotalDegree(points as u64));
        }
        let mut order: Vec<u32> = (0..points as u32).collect();
        order.shuffle(rng);
        let mut partner = vec![UNPAIRED; points];
        for pair in order.chunks_exact(2) {
            partner[pair[0] as usize] = pair[1];
            partner[pair[1] as usize] = pair[0];
        }
        Ok(Self { partner })
    }

    pub fn points(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, s: usize) -> usize {
        self.partner[s] as usize
    }

    /// Pairs `(a, b)` with `a < b`, ordered by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(s, &p)| s < p as usize)
            .map(|(s, &p)| (s, p as usize))
            .collect()
    }

    fn link(&mut self, a: usize, b: usize) {
        self.partner[a] = b as u32;
        self.partner[b] = a as u32;
    }

    /// Single-draw growth with a given `u ∈ {0..=2m}`. Returns the stubs
    /// whose partner changed.
    pub fn apply_single(&mut self, u: usize) -> Vec<usize> {
        let a = self.partner.len();
        let b = a + 1;
        assert!(u <= a, "draw {u} outside 0..={a}");
        self.partner.extend([UNPAIRED, UNPAIRED]);
        if u == a {
            self.link(a, b);
            return vec![a, b];
        }
        let p = self.partner(u);
        self.link(b, u);
        self.link(a, p);
        vec![a, b, u, p]
    }

    /// Two-draw growth with `u1 ∈ {0..2m}` and `u2 ∈ {0..=2m}`. Returns
    /// the stubs whose partner changed.
    pub fn apply_two_choice(&mut self, u1: usize, u2: usize) -> Vec<usize> {
        let a = self.partner.len();
        let b = a + 1;
        assert!(
            u1 < a.max(1) && u2 <= a,
            "draws ({u1}, {u2}) out of range for {a} points"
        );
        self.partner.extend([UNPAIRED, UNPAIRED]);
        if u2 == a {
            self.link(a, b);
            return vec![a, b];
        }
        if u1 == u2 {
            let p = self.partner(u2);
            self.link(b, u2);
            self.link(a, p);
            return vec![a, b, u2, p];
        }
        let p1 = self.partner(u1);
        let p2 = self.partner(u2);
        self.link(a, u1);
        self.link(b, u2);
        if p1 == u2 {
            return vec![a, b, u1, u2];
        }
        self.link(p1, p2);
        vec![a, b, u1, u2, p1, p2]
    }

    /// Draws `u` and applies [`StubMatching::apply_single`].
    pub fn dynamic_match_step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let u = rng.random_range(0..=self.points());
        self.apply_single(u);
    }

    /// Draws `(u1, u2)` and applies [`StubMatching::apply_two_choice`]. From
    /// the empty matching only the appending branch is possible.
    pub fn two_choice_step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let m2 = self.points();
        if m2 == 0 {
            self.apply_two_choice(0, 0);
            return;
        }
        let u1 = rng.random_range(0..m2);
        let u2 = rng.random_range(0..=m2);
        self.apply_two_choice(u1, u2);
    }

    pub fn grow<R: Rng + ?Sized>(&mut self, scheme: GrowthScheme, rng: &mut R) {
        match scheme {
            GrowthScheme::Single => self.dynamic_match_step(rng),
            GrowthScheme::TwoChoice => self.two_choice_step(rng),
        }
    }

    /// Number of stubs in `0..x` whose partner also lies in `0..x`.
    pub fn internal_match_count(&self, x: usize) -> Result<usize> {
        if !x.is_multiple_of(2) || x > self.points() {
            return Err(Error::InvalidParameter(format!(
                "prefix {x} must be even and at most {}",
                self.points()
            )));
        }
        Ok(self.partner[..x]
            .iter()
            .filter(|&&p| (p as usize) < x)
            .count())
    }

    /// `internal_match_count` for every even prefix `0, 2, …, 2m` in one pass.
    pub fn internal_match_profile(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.points() / 2 + 1);
        let mut z = 0usize;
        out.push(0);
        for s in 0..self.points() {
            if (self.partner[s] as usize) < s {
                z += 2;
            }
            if s % 2 == 1 {
                out.push(z);
            }
        }
        out
    }
}

/// Stub owners for stubs numbered vertex by vertex.
pub fn stub_owners(degrees: &[u32]) -> Vec<u32> {
    let mut owners = Vec::with_capacity(degrees.iter().map(|&d| d as usize).sum());
    for (v, &d) in degrees.iter().enumerate() {
        owners.extend(std::iter::repeat_n(v as u32, d as usize));
    }
    owners
}

/// Collapses a matching to a multigraph using `owners[s]` as the vertex of
/// stub `s`.
pub fn matching_to_graph(matching: &StubMatching, owners: &[u32], n: usize) -> Result<MultiGraph> {
    if owners.len() != matching.points() {
        return Err(Error::Structural(format!(
            "{} owners for {} stubs",
            owners.len(),
            matching.points()
        )));
    }
    let mut g = MultiGraph::empty(n);
    for (a, b) in matching.pairs() {
        g.add_edge(owners[a] as usize, owners[b] as usize)?;
    }
    Ok(g)
}

/// Configuration Model: uniform matching of all stubs, vertex `i` owning
/// `degrees[i]` of them.
pub fn build_cm_static<R: Rng + ?Sized>(degrees: &[u32], rng: &mut R) -> Result<MultiGraph> {
    let owners = stub_owners(degrees);
    let matching = StubMatching::uniform(owners.len(), rng)?;
    matching_to_graph(&matching, &owners, degrees.len())
}

/// Configuration Model grown two stubs at a time from the empty matching.
pub fn build_cm_dynamic<R: Rng + ?Sized>(
    degrees: &[u32],
    scheme: GrowthScheme,
    rng: &mut R,
) -> Result<MultiGraph> {
    let owners = stub_owners(degrees);
    if !owners.len().is_multiple_of(2) {
        return Err(Error::OddTotalDegree(owners.len() as u64));
    }
    let mut matching = StubMatching::empty();
    while matching.points() < owners.len() {
        matching.grow(scheme, rng);
    }
    matching_to_graph(&matching, &owners, degrees.len())
}
