//! Stable/metastable classification and serialisable summaries.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{Landscape, ENERGY_TOL};
use crate::error::{Error, Result};

/// Ground states and metastable states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub stable: Vec<u32>,
    pub metastable: Vec<u32>,
    /// Largest finite stability level.
    pub v_max: f64,
}

impl Landscape {
    /// Ω_stab and Ω_meta from a precomputed V table.
    pub fn classify_states_with(&self, v: &[f64]) -> Result<Classification> {
        if self.params().h <= 0.0 {
            return Err(Error::InvalidParameter(
                "metastability classification requires h > 0".into(),
            ));
        }
        let e_min = self.energy(self.order()[0]);
        let stable: Vec<u32> = (0..self.size() as u32)
            .filter(|&x| self.energy(x) <= e_min + ENERGY_TOL)
            .collect();
        let v_max = (0..self.size())
            .filter(|&x| self.energy(x as u32) > e_min + ENERGY_TOL)
            .map(|x| v[x])
            .fold(f64::NEG_INFINITY, f64::max);
        let metastable = (0..self.size() as u32)
            .filter(|&x| self.energy(x) > e_min + ENERGY_TOL)
            .filter(|&x| (v[x as usize] - v_max).abs() <= ENERGY_TOL)
            .collect();
        Ok(Classification {
            stable,
            metastable,
            v_max,
        })
    }

    pub fn classify_states(&self) -> Result<Classification> {
        self.classify_states_with(&self.stability_levels())
    }

    /// Writes `config_hex,energy,V` rows in index order.
    pub fn write_v_table<W: Write>(&self, v: &[f64], out: &mut W) -> Result<()> {
        writeln!(out, "config_hex,energy,V")?;
        for (x, (&e, &vx)) in self.energies().iter().zip(v).enumerate() {
            writeln!(out, "{x:x},{e},{vx}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeReport {
    pub n: usize,
    pub j: f64,
    pub h: f64,
    pub energy_minus: f64,
    pub energy_plus: f64,
    pub communication_height: f64,
    pub gamma_star: f64,
    pub v_minus: f64,
    pub stable: Vec<u32>,
    pub metastable: Vec<u32>,
    pub v_max: f64,
    /// Ω_meta = {⊟}.
    pub h_holds: bool,
}

impl LandscapeReport {
    pub fn to_text(&self) -> String {
        let hex = |v: &[u32]| {
            v.iter()
                .map(|x| format!("{x:x}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "J: {}", self.j);
        let _ = writeln!(s, "h: {}", self.h);
        let _ = writeln!(s, "energy_minus: {}", self.energy_minus);
        let _ = writeln!(s, "energy_plus: {}", self.energy_plus);
        let _ = writeln!(s, "communication_height: {}", self.communication_height);
        let _ = writeln!(s, "gamma_star: {}", self.gamma_star);
        let _ = writeln!(s, "v_minus: {}", self.v_minus);
        let _ = writeln!(s, "v_max: {}", self.v_max);
        let _ = writeln!(s, "stable: {}", hex(&self.stable));
        let _ = writeln!(s, "metastable: {}", hex(&self.metastable));
        let _ = writeln!(s, "h_holds: {}", self.h_holds);
        s
    }
}

/// Full summary; the V table is returned alongside for CSV output.
pub fn landscape_report(l: &Landscape) -> Result<(LandscapeReport, Vec<f64>)> {
    let v = l.stability_levels();
    let class = l.classify_states_with(&v)?;
    let minus = l.minus_index();
    let plus = l.plus_index();
    let gamma_star = l.energy_barrier();
    let h_holds = class.metastable == [minus];
    let report = LandscapeReport {
        n: l.n(),
        j: l.params().j,
        h: l.params().h,
        energy_minus: l.energy(minus),
        energy_plus: l.energy(plus),
        communication_height: gamma_star + l.energy(minus),
        gamma_star,
        v_minus: v[minus as usize],
        stable: class.stable,
        metastable: class.metastable,
        v_max: class.v_max,
        h_holds,
    };
    Ok((report, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::ModelParams;
    use crate::graph::{build_reference_graph, ReferenceFamily};

    #[test]
    fn complete_graph_satisfies_h() {
        let g = build_reference_graph(ReferenceFamily::Complete { n: 6 }).unwrap();
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let l = Landscape::new(&g, &p).unwrap();
        let (r, v) = landscape_report(&l).unwrap();
        assert!(r.h_holds);
        assert_eq!(r.stable, vec![l.plus_index()]);
        assert!((r.v_minus - r.gamma_star).abs() < 1e-12);
        assert!(v[l.plus_index() as usize].is_infinite());
        let mut csv = Vec::new();
        l.write_v_table(&v, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(text.lines().last().unwrap().starts_with("3f,"));
    }

    #[test]
    fn edgeless_graph_is_all_metastable() {
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let l = Landscape::new(&crate::graph::MultiGraph::empty(3), &p).unwrap();
        let (r, _) = landscape_report(&l).unwrap();
        assert_eq!(r.v_max, 0.0);
        assert_eq!(r.metastable, (0..7).collect::<Vec<u32>>());
        assert!(!r.h_holds);
    }

    #[test]
    fn single_plus_on_triangle_is_unstable() {
        let g = build_reference_graph(ReferenceFamily::Complete { n: 3 }).unwrap();
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        let l = Landscape::new(&g, &p).unwrap();
        let v = l.stability_levels();
        assert_eq!(v[0b010], 0.0);
    }

    #[test]
    fn zero_field_is_rejected() {
        let g = build_reference_graph(ReferenceFamily::Complete { n: 4 }).unwrap();
        let p = ModelParams::with_zero_field_allowed(1.0, 0.0, 1.0).unwrap();
        let l = Landscape::new(&g, &p).unwrap();
        assert!(matches!(
            l.classify_states(),
            Err(Error::InvalidParameter(_))
        ));
    }
}
