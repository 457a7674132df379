use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::matching::{matching_to_graph, stub_owners, GrowthScheme, StubMatching};
use crate::graph::multigraph::MultiGraph;

/// Probability with which the larger graph redraws a shared choice among
/// its extra stubs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedrawRule {
    /// `δ = D / (N_big · N_small)` where `N` are the draw ranges and `D` the
    /// difference in base stub counts. Does not keep the larger graph's
    /// matching uniform.
    #[default]
    Printed,
    /// `δ = D / N_big`: the redrawn choice is exactly uniform on the larger
    /// range.
    MarginalPreserving,
}

impl RedrawRule {
    fn probability(self, extra: usize, range_small: usize, range_big: usize) -> f64 {
        if extra == 0 {
            return 0.0;
        }
        match self {
            RedrawRule::Printed => extra as f64 / (range_big as f64 * range_small as f64),
            RedrawRule::MarginalPreserving => extra as f64 / range_big as f64,
        }
    }
}

/// Two Configuration Models grown with shared uniform choices.
///
/// Stub labels of the smaller graph `a` map into the larger graph `b` by the
/// identity on the base stubs `0..ℓ_a` and by a shift of `ℓ_b − ℓ_a` on the
/// stubs added afterwards. Base stubs `ℓ_a..ℓ_b` of `b` are its extra points.
#[derive(Clone, Debug)]
pub struct CoupledCM {
    a: StubMatching,
    b: StubMatching,
    owners_a: Vec<u32>,
    owners_b: Vec<u32>,
    n_a: usize,
    n_b: usize,
    base_a: usize,
    base_b: usize,
    scheme: GrowthScheme,
    redraw: RedrawRule,
    mismatch_flag: Vec<bool>,
    mismatched_stubs: usize,
    redraws: usize,
}

impl CoupledCM {
    /// Couples two completed matchings. `a` must have no more stubs than `b`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: StubMatching,
        degrees_a: &[u32],
        b: StubMatching,
        degrees_b: &[u32],
        scheme: GrowthScheme,
        redraw: RedrawRule,
    ) -> Result<Self> {
        let owners_a = stub_owners(degrees_a);
        let owners_b = stub_owners(degrees_b);
        if owners_a.len() != a.points() || owners_b.len() != b.points() {
            return Err(Error::Structural(
                "degree list does not match stub count".into(),
            ));
        }
        if a.points() > b.points() {
            return Err(Error::InvalidParameter(
                "first graph of a coupled pair must have the smaller total degree".into(),
            ));
        }
        let mut pair = Self {
            base_a: a.points(),
            base_b: b.points(),
            a,
            b,
            owners_a,
            owners_b,
            n_a: degrees_a.len(),
            n_b: degrees_b.len(),
            scheme,
            redraw,
            mismatch_flag: Vec::new(),
            mismatched_stubs: 0,
            redraws: 0,
        };
        pair.mismatch_flag = (0..pair.a.points())
            .map(|s| pair.stub_mismatched(s))
            .collect();
        pair.mismatched_stubs = pair.mismatch_flag.iter().filter(|&&f| f).count();
        Ok(pair)
    }

    /// Two independent uniform matchings on the same degree list.
    pub fn independent<R: Rng + ?Sized>(
        degrees: &[u32],
        scheme: GrowthScheme,
        rng: &mut R,
    ) -> Result<Self> {
        let stubs = degrees.iter().map(|&d| d as usize).sum();
        let a = StubMatching::uniform(stubs, rng)?;
        let b = StubMatching::uniform(stubs, rng)?;
        Self::new(a, degrees, b, degrees, scheme, RedrawRule::default())
    }

    /// Both graphs start from the same matching.
    pub fn identical<R: Rng + ?Sized>(
        degrees: &[u32],
        scheme: GrowthScheme,
        rng: &mut R,
    ) -> Result<Self> {
        let stubs = degrees.iter().map(|&d| d as usize).sum();
        let a = StubMatching::uniform(stubs, rng)?;
        Self::new(
            a.clone(),
            degrees,
            a,
            degrees,
            scheme,
            RedrawRule::default(),
        )
    }

    fn shift(&self) -> usize {
        self.base_b - self.base_a
    }

    fn map_to_b(&self, s: usize) -> usize {
        if s < self.base_a {
            s
        } else {
            s + self.shift()
        }
    }

    fn map_to_a(&self, t: usize) -> Option<usize> {
        if t < self.base_a {
            Some(t)
        } else if t < self.base_b {
            None
        } else {
            Some(t - self.shift())
        }
    }

    fn stub_mismatched(&self, s: usize) -> bool {
        self.map_to_b(self.a.partner(s)) != self.b.partner(self.map_to_b(s))
    }

    /// Shared draw on `0..range` in `a`'s labels, possibly redrawn for `b`.
    fn draw<R: Rng + ?Sized>(&mut self, range: usize, rng: &mut R) -> (usize, usize) {
        let u = rng.random_range(0..range);
        let extra = self.shift();
        let delta = self.redraw.probability(extra, range, range + extra);
        if delta > 0.0 && rng.random::<f64>() < delta {
            self.redraws += 1;
            (u, self.base_a + rng.random_range(0..extra))
        } else {
            (u, self.map_to_b(u))
        }
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let m2 = self.a.points();
        let (touched_a, touched_b) = match self.scheme {
            GrowthScheme::Single => {
                let (u, ub) = self.draw(m2 + 1, rng);
                (self.a.apply_single(u), self.b.apply_single(ub))
            }
            GrowthScheme::TwoChoice if m2 == 0 && self.b.points() == 0 => {
                (self.a.apply_two_choice(0, 0), self.b.apply_two_choice(0, 0))
            }
            GrowthScheme::TwoChoice => {
                let (u1, u1b) = self.draw(m2, rng);
                let (u2, u2b) = self.draw(m2 + 1, rng);
                (
                    self.a.apply_two_choice(u1, u2),
                    self.b.apply_two_choice(u1b, u2b),
                )
            }
        };
        self.mismatch_flag.extend([false, false]);
        let candidates: Vec<usize> = touched_a
            .iter()
            .copied()
            .chain(touched_b.iter().filter_map(|&t| self.map_to_a(t)))
            .collect();
        for s in candidates {
            let now = self.stub_mismatched(s);
            if now != self.mismatch_flag[s] {
                self.mismatch_flag[s] = now;
                if now {
                    self.mismatched_stubs += 1;
                } else {
                    self.mismatched_stubs -= 1;
                }
            }
        }
    }

    /// Adds one vertex per entry of `new_degrees` to both graphs and pairs
    /// the new stubs two at a time. With an odd running total one stub stays
    /// pending until the next call.
    pub fn grow_coupled_pair<R: Rng + ?Sized>(&mut self, new_degrees: &[u32], rng: &mut R) {
        for &d in new_degrees {
            self.owners_a
                .extend(std::iter::repeat_n(self.n_a as u32, d as usize));
            self.owners_b
                .extend(std::iter::repeat_n(self.n_b as u32, d as usize));
            self.n_a += 1;
            self.n_b += 1;
        }
        while self.a.points() + 2 <= self.owners_a.len() {
            self.step(rng);
        }
    }

    pub fn pending_stub(&self) -> bool {
        self.owners_a.len() != self.a.points()
    }

    /// Stub-level pairs of `a` with no counterpart in `b`.
    pub fn mismatch_pairs(&self) -> usize {
        self.mismatched_stubs / 2
    }

    /// Mismatch recomputed from scratch; equals [`CoupledCM::mismatch_pairs`].
    pub fn recount_mismatch_pairs(&self) -> usize {
        (0..self.a.points())
            .filter(|&s| self.stub_mismatched(s))
            .count()
            / 2
    }

    /// Fraction of the base stubs of `a` whose partner differs in `b`.
    pub fn base_mismatch_fraction(&self) -> f64 {
        if self.base_a == 0 {
            return 0.0;
        }
        self.mismatch_flag[..self.base_a]
            .iter()
            .filter(|&&f| f)
            .count() as f64
            / self.base_a as f64
    }

    pub fn redraw_count(&self) -> usize {
        self.redraws
    }

    pub fn matchings(&self) -> (&StubMatching, &StubMatching) {
        (&self.a, &self.b)
    }

    pub fn graphs(&self) -> Result<(MultiGraph, MultiGraph)> {
        if self.pending_stub() {
            return Err(Error::Structural(
                "coupled pair has an unpaired stub".into(),
            ));
        }
        Ok((
            matching_to_graph(&self.a, &self.owners_a, self.n_a)?,
            matching_to_graph(&self.b, &self.owners_b, self.n_b)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::multigraph::edge_set_difference;
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn identical_bases_never_diverge() {
        for scheme in [GrowthScheme::Single, GrowthScheme::TwoChoice] {
            let mut r = rng::master(8);
            let mut pair = CoupledCM::identical(&[3; 20], scheme, &mut r).unwrap();
            for _ in 0..100 {
                pair.grow_coupled_pair(&[3, 3], &mut r);
                assert_eq!(pair.mismatch_pairs(), 0);
            }
            let (g, h) = pair.graphs().unwrap();
            assert_eq!(edge_set_difference(&g, &h).unwrap(), 0);
        }
    }

    #[test]
    fn marginal_preserving_redraw_is_uniform() {
        // Small graph: one pair; large graph: two pairs. One growth step.
        let runs = 60_000;
        let mut hits = [0usize; 6];
        let mut r = rng::master(99);
        for _ in 0..runs {
            let a = StubMatching::from_pairs(2, &[(0, 1)]).unwrap();
            let b = StubMatching::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
            let mut pair = CoupledCM::new(
                a,
                &[1, 1],
                b,
                &[1, 1, 1, 1],
                GrowthScheme::Single,
                RedrawRule::MarginalPreserving,
            )
            .unwrap();
            pair.grow_coupled_pair(&[1, 1], &mut r);
            let (_, b) = pair.matchings();
            hits[b.partner(5)] += 1;
        }
        // Stub 5 of b pairs with each of 0..=4 with probability 1/5.
        for (s, &c) in hits.iter().enumerate().take(5) {
            let f = c as f64 / runs as f64;
            assert!((f - 0.2).abs() < 0.01, "stub {s}: {f}");
        }
    }

    #[test]
    fn printed_redraw_is_rarer() {
        let p = RedrawRule::Printed.probability(2, 5, 7);
        let q = RedrawRule::MarginalPreserving.probability(2, 5, 7);
        assert!((p - 2.0 / 35.0).abs() < 1e-15);
        assert!((q - 2.0 / 7.0).abs() < 1e-15);
        assert_eq!(RedrawRule::Printed.probability(0, 5, 5), 0.0);
    }

    #[test]
    fn smaller_graph_first() {
        let a = StubMatching::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        let b = StubMatching::from_pairs(2, &[(0, 1)]).unwrap();
        assert!(CoupledCM::new(
            a,
            &[2, 2],
            b,
            &[2],
            GrowthScheme::Single,
            RedrawRule::Printed
        )
        .is_err());
    }

    #[test]
    fn odd_growth_leaves_pending_stub() {
        let mut r = rng::master(1);
        let mut pair = CoupledCM::independent(&[3; 4], GrowthScheme::Single, &mut r).unwrap();
        pair.grow_coupled_pair(&[3], &mut r);
        assert!(pair.pending_stub());
        assert!(pair.graphs().is_err());
        pair.grow_coupled_pair(&[3], &mut r);
        assert!(!pair.pending_stub());
        assert_eq!(pair.graphs().unwrap().0.n(), 6);
    }

    proptest! {
        #[test]
        fn tally_matches_recount_and_bounds_edge_difference(
            seed in any::<u64>(),
            grow in 0usize..60,
            two in any::<bool>(),
            extra in 0usize..3,
            marginal in any::<bool>(),
        ) {
            let mut r = rng::master(seed);
            let scheme = if two { GrowthScheme::TwoChoice } else { GrowthScheme::Single };
            let redraw = if marginal { RedrawRule::MarginalPreserving } else { RedrawRule::Printed };
            let small = vec![3u32; 8];
            let mut big = small.clone();
            big.extend(std::iter::repeat_n(2u32, extra));
            let a = StubMatching::uniform(24, &mut r).unwrap();
            let b = StubMatching::uniform(24 + 2 * extra, &mut r).unwrap();
            let mut pair = CoupledCM::new(a, &small, b, &big, scheme, redraw).unwrap();
            pair.grow_coupled_pair(&vec![2u32; grow], &mut r);
            prop_assert_eq!(pair.mismatch_pairs(), pair.recount_mismatch_pairs());
            if extra == 0 {
                let (g, h) = pair.graphs().unwrap();
                let diff = edge_set_difference(&g, &h).unwrap();
                prop_assert!(diff <= 2 * pair.mismatch_pairs());
                if pair.mismatch_pairs() == 0 {
                    prop_assert_eq!(diff, 0);
                }
            }
        }
    }
}
