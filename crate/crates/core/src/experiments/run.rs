use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentSpec, GraphSpec};
use super::coupling::{coupling_decay_experiment, CouplingParams};
use super::er::er_concentration_experiment;
use super::manifest::{OutputRecord, RunManifest};
use super::moments::matching_moment_experiment;
use super::output::{emit_report, fmt_f, fmt_opt, Table};
use super::scaling::barrier_scaling_experiment;
use crate::bounds::bounds_report;
use crate::dynamics::{arrhenius_fit, exponential_law_test, hitting_grid, ConfigSet, SimCaps};
use crate::error::{Error, Result};
use crate::graph::{DegreeDistribution, DegreeSequence, MultiGraph};
use crate::landscape::{gate_sets, landscape_report, Landscape};
use crate::rng;

const LABEL_GRAPH: u64 = 0x6;

/// Tables, a JSON summary and any extra files (name, content).
struct Outcome {
    tables: Vec<Table>,
    summary: Value,
    files: Vec<(String, String)>,
}

fn build_graph(config: &ExperimentConfig) -> Result<MultiGraph> {
    let spec = config
        .graph
        .as_ref()
        .ok_or_else(|| Error::Config("graph: missing".into()))?;
    spec.build(&mut rng::substream(config.seed, LABEL_GRAPH, 0))
}

fn key_values(name: &str, pairs: &[(&str, String)]) -> Table {
    let mut t = Table::new(name, &["key", "value"]);
    for (k, v) in pairs {
        t.push(vec![(*k).to_string(), v.clone()]);
    }
    t
}

fn dist(text: &str) -> Result<DegreeDistribution> {
    text.parse()
        .map_err(|e| Error::Config(format!("experiment.degrees: {e}")))
}

fn run_generate(config: &ExperimentConfig) -> Result<Outcome> {
    let g = build_graph(config)?;
    let degrees: String = g.degrees().iter().map(|d| format!("{d}\n")).collect();
    Ok(Outcome {
        tables: vec![],
        summary: json!({
            "n": g.n(),
            "edges": g.edge_count(),
            "connected": crate::graph::is_connected(&g),
        }),
        files: vec![
            ("graph.txt".into(), g.to_edge_list()),
            ("degrees.txt".into(), degrees),
        ],
    })
}

fn run_landscape(config: &ExperimentConfig, v_table: bool) -> Result<Outcome> {
    let g = build_graph(config)?;
    let l = Landscape::new(&g, &config.model.params()?)?;
    let (report, v) = landscape_report(&l)?;
    let mut files = vec![("landscape.txt".into(), report.to_text())];
    if v_table {
        let mut csv = Vec::new();
        l.write_v_table(&v, &mut csv)?;
        files.push((
            "v_table.csv".into(),
            String::from_utf8(csv).expect("ascii csv"),
        ));
    }
    let table = key_values(
        "landscape",
        &[
            ("n", report.n.to_string()),
            ("gamma_star", fmt_f(report.gamma_star)),
            ("v_minus", fmt_f(report.v_minus)),
            ("h_holds", report.h_holds.to_string()),
            ("metastable_count", report.metastable.len().to_string()),
        ],
    );
    Ok(Outcome {
        tables: vec![table],
        summary: serde_json::to_value(&report)?,
        files,
    })
}

fn run_gates(config: &ExperimentConfig) -> Result<Outcome> {
    let g = build_graph(config)?;
    let l = Landscape::new(&g, &config.model.params()?)?;
    let gates = gate_sets(&l)?;
    let mut t = Table::new("gates", &["config_hex", "set", "energy"]);
    for (set, members) in [("P", &gates.p_star), ("C", &gates.c_star)] {
        for &x in members {
            t.push(vec![format!("{x:x}"), set.into(), fmt_f(l.energy(x))]);
        }
    }
    Ok(Outcome {
        tables: vec![t],
        summary: serde_json::to_value(&gates)?,
        files: vec![("gates.txt".into(), gates.to_text())],
    })
}

fn run_bounds(
    config: &ExperimentConfig,
    slack_constant: f64,
    degrees_file: Option<&Path>,
) -> Result<Outcome> {
    let seq = match degrees_file {
        Some(path) => DegreeSequence::read(path)?,
        None => build_graph(config)?.degree_sequence()?,
    };
    let m = &config.model;
    let report = bounds_report(&seq, m.j, m.h, slack_constant)?;
    let mut t = Table::new("bounds", &["quantity", "value", "slack", "note"]);
    let mut row = |q: &str, v: String, slack: String, note: &str| {
        t.push(vec![q.into(), v, slack, note.into()])
    };
    row("n", report.n.to_string(), String::new(), "");
    row(
        "ell_n",
        report.ell_n.to_string(),
        String::new(),
        "total degree",
    );
    row("d_min", report.d_min.to_string(), String::new(), "");
    row("d_ave", fmt_f(report.d_ave), String::new(), "");
    match &report.upper {
        Some(u) => {
            row(
                "gamma_plus",
                fmt_f(u.gamma_plus),
                fmt_f(u.slack),
                "slack is the reported ell_n^(3/4) term",
            );
            row(
                "m_bar",
                u.m_bar.to_string(),
                String::new(),
                u.warning.as_deref().unwrap_or(""),
            );
        }
        None => row(
            "gamma_plus",
            String::new(),
            String::new(),
            report.upper_error.as_deref().unwrap_or(""),
        ),
    }
    let lower_note = if report.lower.o_n_omitted {
        "o(n) term omitted"
    } else {
        ""
    };
    row(
        "gamma_minus",
        fmt_f(report.lower.gamma_minus),
        String::new(),
        lower_note,
    );
    row(
        "m_tilde",
        report.lower.m_tilde.to_string(),
        String::new(),
        "",
    );
    row(
        "i_dave_half",
        fmt_f(report.lower.i_dave_half),
        String::new(),
        "",
    );
    if let Some(c) = report.dirac_upper_constant {
        row(
            "dirac_upper_constant",
            fmt_f(c),
            String::new(),
            "regular sequences only",
        );
    }
    row(
        "strict_h",
        report.strict_h.map(|b| b.to_string()).unwrap_or_default(),
        fmt_opt(report.strict_h_margin),
        "margin in the slack column",
    );
    row(
        "weak_h",
        report.weak_h.holds.to_string(),
        fmt_f(report.weak_h.worst_margin),
        "worst margin",
    );
    Ok(Outcome {
        tables: vec![t],
        summary: serde_json::to_value(&report)?,
        files: vec![(
            "bounds.txt".into(),
            serde_json::to_string_pretty(&report)? + "\n",
        )],
    })
}

fn run_simulate(
    config: &ExperimentConfig,
    betas: &[f64],
    replicas: usize,
    gate: bool,
) -> Result<Outcome> {
    let g = build_graph(config)?;
    let params = config.model.params()?;
    let caps = SimCaps {
        max_events: config.cap_events.unwrap_or(SimCaps::default().max_events),
        max_wall: None,
    };
    let gate_set = if gate {
        let gates = gate_sets(&Landscape::new(&g, &params)?)?;
        Some(ConfigSet::from_indices(
            g.n(),
            gates.c_star.iter().map(|&x| u64::from(x)),
        )?)
    } else {
        None
    };
    let grid = hitting_grid(
        &g,
        &params,
        betas,
        replicas,
        config.seed,
        gate_set.as_ref(),
        &caps,
    )?;
    let mut hits = Table::new(
        "hitting",
        &[
            "beta",
            "replica",
            "tau",
            "events",
            "visited_gate",
            "truncated",
        ],
    );
    let mut arr = Table::new(
        "arrhenius",
        &[
            "beta",
            "mean",
            "stderr",
            "logmean",
            "completed",
            "truncated",
            "ks",
        ],
    );
    let mut per_beta = Vec::new();
    for (&beta, est) in betas.iter().zip(&grid) {
        for (k, s) in est.samples.iter().enumerate() {
            hits.push(vec![
                fmt_f(beta),
                k.to_string(),
                fmt_f(s.tau),
                s.events.to_string(),
                s.visited_gate.to_string(),
                s.truncated.to_string(),
            ]);
        }
        let taus: Vec<f64> = est
            .samples
            .iter()
            .filter(|s| !s.truncated)
            .map(|s| s.tau)
            .collect();
        let ks = exponential_law_test(&taus).ok();
        arr.push(vec![
            fmt_f(beta),
            fmt_f(est.mean),
            fmt_f(est.stderr),
            fmt_f(est.mean.ln()),
            est.completed.to_string(),
            est.truncated.to_string(),
            fmt_opt(ks.map(|k| k.ks)),
        ]);
        let gate_fraction = gate_set.as_ref().map(|_| {
            est.samples
                .iter()
                .filter(|s| !s.truncated && s.visited_gate)
                .count() as f64
                / est.completed as f64
        });
        per_beta.push(json!({
            "beta": beta,
            "mean": est.mean,
            "stderr": est.stderr,
            "ks": ks.map(|k| k.ks),
            "ks_pass": ks.map(|k| k.pass),
            "completed": est.completed,
            "truncated": est.truncated,
            "gate_fraction": gate_fraction,
        }));
    }
    let means: Vec<f64> = grid.iter().map(|e| e.mean).collect();
    let ses: Vec<f64> = grid.iter().map(|e| e.stderr).collect();
    let fit = if betas.len() >= 3 {
        Some(arrhenius_fit(betas, &means, Some(&ses))?)
    } else {
        None
    };
    let summary = json!({
        "per_beta": per_beta,
        "mean": grid.last().map(|e| e.mean),
        "stderr": grid.last().map(|e| e.stderr),
        "ks": per_beta.last().and_then(|v| v["ks"].as_f64()),
        "slope": fit.as_ref().map(|f| f.slope),
        "intercept": fit.as_ref().map(|f| f.intercept),
        "slope_stderr": fit.as_ref().map(|f| f.slope_stderr),
    });
    let arr = arr.with_series("log mean hitting time", "beta", "logmean");
    let hits = hits.with_series("tau", "replica", "tau");
    Ok(Outcome {
        tables: vec![hits, arr],
        summary,
        files: vec![],
    })
}

fn run_couple(config: &ExperimentConfig, spec: &ExperimentSpec) -> Result<Outcome> {
    let ExperimentSpec::Couple {
        n,
        degrees,
        t,
        seeds,
        scheme,
        redraw,
        exact_rows,
    } = spec
    else {
        unreachable!("dispatch")
    };
    let p = CouplingParams {
        n: *n,
        degrees: dist(degrees)?,
        t_grid: t.clone(),
        seeds: *seeds,
        scheme: *scheme,
        redraw: *redraw,
        exact_rows: *exact_rows,
    };
    let r = coupling_decay_experiment(&p, &config.model.params()?, config.seed)?;
    let mut decay = Table::new(
        "decay",
        &[
            "t",
            "mismatch_fraction",
            "mean_edge_difference",
            "mean_base_mismatch",
        ],
    );
    for row in &r.decay {
        decay.push(vec![
            row.t.to_string(),
            fmt_f(row.mismatch_fraction),
            fmt_f(row.mean_edge_difference),
            fmt_f(row.mean_base_mismatch),
        ]);
    }
    let mut oscillation = Table::new(
        "oscillation",
        &[
            "index",
            "n_a",
            "n_b",
            "k",
            "gamma_a",
            "gamma_b",
            "bound",
            "connected",
            "holds",
        ],
    );
    for row in &r.oscillation {
        oscillation.push(vec![
            row.index.to_string(),
            row.n_a.to_string(),
            row.n_b.to_string(),
            row.k.to_string(),
            fmt_f(row.gamma_a),
            fmt_f(row.gamma_b),
            fmt_f(row.bound),
            row.connected.to_string(),
            row.holds.to_string(),
        ]);
    }
    let summary = json!({
        "slope": r.slope.map(|f| f.slope),
        "slope_stderr": r.slope.map(|f| f.slope_stderr),
        "oscillation_rows": r.oscillation.len(),
        "oscillation_violations": r.oscillation_violations,
        "identical_stays_identical": r.identical_stays_identical,
    });
    let decay = decay.with_series("mismatch fraction", "t", "mismatch_fraction");
    Ok(Outcome {
        tables: vec![decay, oscillation],
        summary,
        files: vec![],
    })
}

fn run_moments(config: &ExperimentConfig, spec: &ExperimentSpec) -> Result<Outcome> {
    let ExperimentSpec::Moments {
        x,
        t,
        replicas,
        m_grid,
        alpha,
        concentration_replicas,
    } = spec
    else {
        unreachable!("dispatch")
    };
    let r = matching_moment_experiment(
        x,
        t,
        *replicas,
        m_grid,
        *alpha,
        *concentration_replicas,
        config.seed,
    )?;
    let mut moments = Table::new(
        "moments",
        &[
            "x",
            "t",
            "mean",
            "mean_stderr",
            "exact_mean",
            "second",
            "second_stderr",
            "exact_second",
            "w_variance",
            "w_variance_exact",
        ],
    );
    for row in &r.rows {
        moments.push(vec![
            row.x.to_string(),
            row.t.to_string(),
            fmt_f(row.mean),
            fmt_f(row.mean_stderr),
            fmt_f(row.exact_mean),
            fmt_f(row.second),
            fmt_f(row.second_stderr),
            fmt_f(row.exact_second),
            fmt_f(row.w_variance),
            fmt_opt(row.w_variance_exact),
        ]);
    }
    let mut conc = Table::new(
        "concentration",
        &["m", "mean_max_deviation", "stderr", "reference"],
    );
    for row in &r.concentration {
        conc.push(vec![
            row.m.to_string(),
            fmt_f(row.mean_max_deviation),
            fmt_f(row.stderr),
            fmt_f(row.reference),
        ]);
    }
    let summary = json!({
        "alpha": r.alpha,
        "exponent": r.exponent.map(|f| f.slope),
        "exponent_stderr": r.exponent.map(|f| f.slope_stderr),
        "reference_exponent": 1.0 - r.alpha / 3.0,
    });
    let conc = conc
        .with_series("max deviation", "m", "mean_max_deviation")
        .with_series("reference", "m", "reference");
    let moments = moments.with_series("mean", "t", "mean");
    Ok(Outcome {
        tables: vec![moments, conc],
        summary,
        files: vec![],
    })
}

fn run_er(config: &ExperimentConfig, spec: &ExperimentSpec) -> Result<Outcome> {
    let ExperimentSpec::ErCheck {
        n,
        p,
        sigma_size,
        samples,
        exact_n,
        exact_p,
    } = spec
    else {
        unreachable!("dispatch")
    };
    let exact = exact_n.zip(*exact_p);
    let r = er_concentration_experiment(
        *n,
        *p,
        *sigma_size,
        *samples,
        exact,
        &config.model.params()?,
        config.seed,
    )?;
    let mut t = Table::new("er_ratios", &["sample", "ratio"]);
    for (k, ratio) in r.ratios.iter().enumerate() {
        t.push(vec![k.to_string(), fmt_f(*ratio)]);
    }
    let summary = json!({
        "n": r.n,
        "p": r.p,
        "sigma_size": r.sigma_size,
        "mu": r.mu,
        "samples": r.ratios.len(),
        "within_band": r.within_band,
        "exact": r.exact,
    });
    Ok(Outcome {
        tables: vec![t],
        summary,
        files: vec![],
    })
}

fn run_scaling(config: &ExperimentConfig, spec: &ExperimentSpec) -> Result<Outcome> {
    let ExperimentSpec::Scaling { degrees, n, seeds } = spec else {
        unreachable!("dispatch")
    };
    let (rows, summaries) = barrier_scaling_experiment(
        &dist(degrees)?,
        n,
        *seeds,
        &config.model.params()?,
        config.seed,
    )?;
    let mut t = Table::new(
        "scaling",
        &[
            "n",
            "seed",
            "gamma_exact",
            "path_height",
            "gamma_lower",
            "slack",
        ],
    );
    for r in &rows {
        t.push(vec![
            r.n.to_string(),
            r.seed.to_string(),
            fmt_opt(r.gamma_exact),
            fmt_f(r.path_height),
            fmt_f(r.gamma_lower),
            fmt_f(r.slack),
        ]);
    }
    let mut s = Table::new(
        "scaling_summary",
        &["n", "mean_per_n", "sd_per_n", "path_sd_per_n", "exact"],
    );
    for r in &summaries {
        s.push(vec![
            r.n.to_string(),
            fmt_f(r.mean_per_n),
            fmt_f(r.sd_per_n),
            fmt_f(r.path_sd_per_n),
            r.exact.to_string(),
        ]);
    }
    let s = s.with_series("gamma per vertex", "n", "mean_per_n");
    Ok(Outcome {
        tables: vec![t, s],
        summary: serde_json::to_value(&summaries)?,
        files: vec![],
    })
}

fn dispatch(config: &ExperimentConfig) -> Result<Outcome> {
    match &config.experiment {
        ExperimentSpec::Generate => run_generate(config),
        ExperimentSpec::Landscape { v_table } => run_landscape(config, *v_table),
        ExperimentSpec::Gates => run_gates(config),
        ExperimentSpec::Bounds {
            slack_constant,
            degrees_file,
        } => run_bounds(config, *slack_constant, degrees_file.as_deref()),
        ExperimentSpec::Simulate {
            betas,
            replicas,
            gate,
        } => run_simulate(config, betas, *replicas, *gate),
        spec @ ExperimentSpec::Couple { .. } => run_couple(config, spec),
        spec @ ExperimentSpec::Moments { .. } => run_moments(config, spec),
        spec @ ExperimentSpec::ErCheck { .. } => run_er(config, spec),
        spec @ ExperimentSpec::Scaling { .. } => run_scaling(config, spec),
    }
}

/// Runs the configured experiment, writes every output and the manifest
/// into `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let outcome = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("workers: {e}")))?
            .install(|| dispatch(config))?,
        None => dispatch(config)?,
    };
    let out: &Path = &config.out;
    let mut paths: Vec<PathBuf> =
        emit_report(&outcome.tables, &outcome.summary, config.format, out)?;
    for (name, content) in &outcome.files {
        let path = out.join(name);
        std::fs::write(&path, content)?;
        paths.push(path);
    }
    let outputs = paths
        .iter()
        .map(|p| OutputRecord::of(out, p))
        .collect::<Result<_>>()?;
    let manifest = RunManifest {
        experiment: config.experiment.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        outputs,
        started_unix,
        wall_seconds: clock.elapsed().as_secs_f64(),
    };
    manifest.write(out)?;
    Ok(manifest)
}

/// Graph spec for a family name such as `"complete 4"`.
pub fn graph_from_family(text: &str) -> Result<GraphSpec> {
    Ok(GraphSpec::family(text.parse()?))
}
