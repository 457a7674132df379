//! Monte Carlo hitting times and occupations checked against exact
//! continuous-time chain computations.
#![allow(clippy::needless_range_loop)]

mod common;

use cmglauber::dynamics::{
    estimate_mean_hitting, gate_passage_probability, ConfigSet, GlauberChain, SimCaps,
};
use cmglauber::energy::{ModelParams, SpinConfig};
use cmglauber::graph::{
    build_cm_static, build_reference_graph, DegreeSequence, MultiGraph, ReferenceFamily,
};
use cmglauber::landscape::Landscape;
use cmglauber::rng;

#[test]
fn edgeless_pair_matches_exact_chain() {
    let g = MultiGraph::empty(2);
    let p = ModelParams::new(1.0, 0.8, 1.5).unwrap();
    let exact = common::exact_mean_hitting(&g, &p, 3)[0];
    let est = estimate_mean_hitting(
        &g,
        &p,
        &SpinConfig::minus(2),
        &ConfigSet::Plus,
        None,
        10_000,
        11,
        &SimCaps::default(),
    )
    .unwrap();
    assert!(
        (est.mean - exact).abs() < 3.0 * est.stderr,
        "{} vs {exact} ± {}",
        est.mean,
        est.stderr
    );
}

#[test]
fn complete_graph_matches_exact_chain() {
    let g = build_reference_graph(ReferenceFamily::Complete { n: 4 }).unwrap();
    for (i, beta) in [0.5, 1.5, 2.5].into_iter().enumerate() {
        let p = ModelParams::new(1.0, 0.5, beta).unwrap();
        let exact = common::exact_mean_hitting(&g, &p, 15)[0];
        let est = estimate_mean_hitting(
            &g,
            &p,
            &SpinConfig::minus(4),
            &ConfigSet::Plus,
            None,
            4000,
            20 + i as u64,
            &SimCaps::default(),
        )
        .unwrap();
        assert!(
            (est.mean - exact).abs() < 3.0 * est.stderr,
            "β = {beta}: {} vs {exact}",
            est.mean
        );
    }
}

#[test]
fn occupation_converges_to_gibbs() {
    let g = MultiGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 1)])
        .unwrap();
    let p = ModelParams::new(1.0, 0.6, 0.7).unwrap();
    let e = common::energies(&g, &p);
    let z: f64 = e.iter().map(|x| (-p.beta * x).exp()).sum();
    let gibbs: Vec<f64> = e.iter().map(|x| (-p.beta * x).exp() / z).collect();

    let batches = 40;
    let batch_time = 2000.0;
    let mut chain = GlauberChain::new(&g, &p, &SpinConfig::minus(5)).unwrap();
    let mut r = rng::master(8);
    let mut per_batch = vec![vec![0.0; 32]; batches];
    for occ in per_batch.iter_mut() {
        let end = chain.time() + batch_time;
        loop {
            let here = chain.index().unwrap() as usize;
            let before = chain.time();
            chain.step(&mut r).unwrap();
            let t = chain.time().min(end);
            occ[here] += t - before;
            if chain.time() >= end {
                // the overshoot belongs to the next batch; small against the batch length
                break;
            }
        }
    }
    for x in 0..32 {
        let fr: Vec<f64> = per_batch.iter().map(|b| b[x] / batch_time).collect();
        let m = fr.iter().sum::<f64>() / batches as f64;
        let var = fr.iter().map(|f| (f - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
        let se = (var / batches as f64).sqrt();
        assert!(
            (m - gibbs[x]).abs() <= 3.0 * se + 1e-4,
            "state {x:x}: {m} vs {}",
            gibbs[x]
        );
    }
}

#[test]
fn flip_frequencies_follow_rates() {
    let g = build_reference_graph(ReferenceFamily::Torus { l: 3 }).unwrap();
    let p = ModelParams::new(1.0, 0.5, 0.8).unwrap();
    let start = SpinConfig::from_plus_set(9, [0, 1, 4]).unwrap();
    let chain = GlauberChain::new(&g, &p, &start).unwrap();
    let total: f64 = chain.rates().iter().sum();
    let mut counts = [0usize; 9];
    let mut r = rng::master(13);
    let draws = 100_000;
    for _ in 0..draws {
        counts[chain.choose(&mut r)] += 1;
    }
    for v in 0..9 {
        let q = chain.rates()[v] / total;
        let sd = (draws as f64 * q * (1.0 - q)).sqrt();
        assert!(
            (counts[v] as f64 - draws as f64 * q).abs() <= 3.0 * sd,
            "vertex {v}"
        );
    }
}

#[test]
fn doubling_replicas_halves_variance() {
    let g = build_reference_graph(ReferenceFamily::Complete { n: 4 }).unwrap();
    let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
    let run = |reps| {
        estimate_mean_hitting(
            &g,
            &p,
            &SpinConfig::minus(4),
            &ConfigSet::Plus,
            None,
            reps,
            3,
            &SimCaps::default(),
        )
        .unwrap()
        .stderr
    };
    let ratio = (run(8000) / run(4000)).powi(2);
    assert!((0.4..0.6).contains(&ratio), "{ratio}");
}

#[test]
fn infinite_temperature_is_fast() {
    let g = build_reference_graph(ReferenceFamily::Complete { n: 6 }).unwrap();
    let p = ModelParams::new(1.0, 0.5, 0.0).unwrap();
    let est = estimate_mean_hitting(
        &g,
        &p,
        &SpinConfig::minus(6),
        &ConfigSet::Plus,
        None,
        500,
        4,
        &SimCaps::default(),
    )
    .unwrap();
    // the β = 0 walk on the 6-cube needs about 2^6 mean time to hit a corner
    assert!(est.mean < 200.0, "{}", est.mean);
    assert!(est.mean < 1e-2 * (3.0f64 * 7.5).exp());
}

#[test]
fn whole_barrier_level_is_always_crossed() {
    let g = build_reference_graph(ReferenceFamily::Complete { n: 4 }).unwrap();
    let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
    let l = Landscape::new(&g, &p).unwrap();
    let level = l.energy_barrier() + l.energy(0);
    let set = ConfigSet::from_indices(
        4,
        (0..16u64).filter(|&x| (l.energy(x as u32) - level).abs() < 1e-9),
    )
    .unwrap();
    let out = gate_passage_probability(&g, &p, &set, 300, 6, &SimCaps::default()).unwrap();
    assert_eq!(out.fraction, 1.0);
}

#[test]
fn gate_passage_is_weaker_at_high_temperature() {
    let d = DegreeSequence::regular(10, 3).unwrap();
    let g = build_cm_static(d.degrees(), &mut rng::master(10)).unwrap();
    let p = ModelParams::new(1.0, 0.5, 0.1).unwrap();
    let l = Landscape::new(&g, &p).unwrap();
    let gates = cmglauber::landscape::gate_sets(&l).unwrap();
    let set = ConfigSet::from_indices(10, gates.c_star.iter().map(|&x| u64::from(x))).unwrap();
    let out = gate_passage_probability(&g, &p, &set, 300, 7, &SimCaps::default()).unwrap();
    assert!(out.fraction < 0.9, "{}", out.fraction);
}
