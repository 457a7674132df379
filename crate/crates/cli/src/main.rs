//! `cmglauber` command-line front end.
//!
//! Every subcommand builds an experiment config, either from scratch or on
//! top of `--config FILE`, with flags taking precedence over file values.
//! The merged config goes through the same strict parser as config files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cmglauber::experiments::{run_experiment, ExperimentConfig};
use cmglauber::{Error, Result};
use toml::{Table, Value};

#[derive(Parser)]
#[command(
    name = "cmglauber",
    version,
    about = "Metastability of Ising Glauber dynamics on random multigraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample or build a graph and write its edge list.
    Generate(Common),
    /// Exact energy landscape: barriers, stability levels, condition (H).
    Landscape {
        #[command(flatten)]
        common: Common,
        /// Also write the stability level of every configuration.
        #[arg(long)]
        v_table: bool,
    },
    /// Exact critical gate of the transition from all-minus to all-plus.
    Gates(Common),
    /// Analytic barrier bounds for a degree sequence.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        slack_constant: Option<f64>,
        /// One degree per line; replaces the graph.
        #[arg(long)]
        degrees_file: Option<PathBuf>,
    },
    /// Monte Carlo hitting times of all-plus from all-minus.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Strictly increasing inverse temperatures, comma separated.
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[arg(long)]
        replicas: Option<usize>,
        /// Record passages through the exact critical gate.
        #[arg(long)]
        gate: bool,
    },
    /// Coupled growth of two configuration-model graphs.
    Couple {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<usize>>,
        #[arg(long)]
        seeds: Option<usize>,
        /// `single` or `two-choice`.
        #[arg(long)]
        scheme: Option<String>,
        /// `printed` or `marginal-preserving`.
        #[arg(long)]
        redraw: Option<String>,
        #[arg(long)]
        exact_rows: Option<usize>,
    },
    /// Moments of the internal matching count under dynamic growth.
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<usize>>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        m_grid: Option<Vec<usize>>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        concentration_replicas: Option<usize>,
    },
    /// Edge-boundary concentration on Erdős–Rényi graphs.
    ErCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        sigma_size: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        exact_n: Option<usize>,
        #[arg(long)]
        exact_p: Option<f64>,
    },
    /// Barrier per vertex across sizes and seeds.
    Scaling {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Run whatever experiment the config file describes.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv`, `json` or `plotdata`.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Per-replica event cap for simulations.
    #[arg(long)]
    cap_events: Option<u64>,
    /// `complete N`, `torus L`, `hypercube D`, `cm N dirac R`,
    /// `cm N powerlaw TAU DELTA` or `er N P`.
    #[arg(long, conflicts_with = "graph_file")]
    graph: Option<String>,
    /// Edge list with an `n m` header line.
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// Build configuration-model graphs by dynamic growth.
    #[arg(long)]
    dynamic: bool,
    #[arg(long)]
    j: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn number<T: std::str::FromStr>(word: Option<&&str>, what: &str) -> Result<T> {
    word.and_then(|w| w.parse().ok())
        .ok_or_else(|| config_error(format!("--graph: expected {what}")))
}

fn graph_table(text: &str, dynamic: bool) -> Result<Table> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let mut t = Table::new();
    let kind = *words
        .first()
        .ok_or_else(|| config_error("--graph: empty"))?;
    t.insert("kind".into(), kind.into());
    let size = number::<i64>(words.get(1), "a size after the family name")?;
    match kind {
        "complete" | "cm" | "er" => t.insert("n".into(), size.into()),
        "torus" => t.insert("l".into(), size.into()),
        "hypercube" => t.insert("dim".into(), size.into()),
        _ => return Err(config_error(format!("--graph: unknown family `{kind}`"))),
    };
    match kind {
        "cm" if words.len() > 2 => {
            t.insert("degrees".into(), words[2..].join(" ").into());
            t.insert("dynamic".into(), dynamic.into());
        }
        "cm" => return Err(config_error("--graph: cm needs a degree distribution")),
        "er" => {
            t.insert(
                "p".into(),
                number::<f64>(words.get(2), "an edge probability")?.into(),
            );
        }
        _ if words.len() > 2 => {
            return Err(config_error(format!(
                "--graph: trailing `{}`",
                words[2..].join(" ")
            )))
        }
        _ => {}
    }
    Ok(t)
}

/// Flag values for the experiment table, `None` meaning "keep the file value".
type ExperimentFlags = Vec<(&'static str, Option<Value>)>;

fn list<T: Into<Value> + Clone>(v: &Option<Vec<T>>) -> Option<Value> {
    v.as_ref()
        .map(|v| Value::Array(v.iter().cloned().map(Into::into).collect()))
}

fn ints(v: &Option<Vec<usize>>) -> Option<Value> {
    v.as_ref()
        .map(|v| Value::Array(v.iter().map(|&x| Value::Integer(x as i64)).collect()))
}

fn int(v: Option<usize>) -> Option<Value> {
    v.map(|v| Value::Integer(v as i64))
}

fn flag(b: bool) -> Option<Value> {
    b.then_some(Value::Boolean(true))
}

fn split(command: &Command) -> (&Common, Option<&'static str>, ExperimentFlags) {
    match command {
        Command::Generate(c) => (c, Some("generate"), vec![]),
        Command::Gates(c) => (c, Some("gates"), vec![]),
        Command::Run(c) => (c, None, vec![]),
        Command::Landscape { common, v_table } => {
            (common, Some("landscape"), vec![("v_table", flag(*v_table))])
        }
        Command::Bounds {
            common,
            slack_constant,
            degrees_file,
        } => (
            common,
            Some("bounds"),
            vec![
                ("slack_constant", slack_constant.map(Value::Float)),
                (
                    "degrees_file",
                    degrees_file
                        .as_ref()
                        .map(|p| p.display().to_string().into()),
                ),
            ],
        ),
        Command::Simulate {
            common,
            betas,
            replicas,
            gate,
        } => (
            common,
            Some("simulate"),
            vec![
                ("betas", list(betas)),
                ("replicas", int(*replicas)),
                ("gate", flag(*gate)),
            ],
        ),
        Command::Couple {
            common,
            n,
            degrees,
            t,
            seeds,
            scheme,
            redraw,
            exact_rows,
        } => (
            common,
            Some("couple"),
            vec![
                ("n", int(*n)),
                ("degrees", degrees.clone().map(Value::String)),
                ("t", ints(t)),
                ("seeds", int(*seeds)),
                ("scheme", scheme.clone().map(Value::String)),
                ("redraw", redraw.clone().map(Value::String)),
                ("exact_rows", int(*exact_rows)),
            ],
        ),
        Command::Moments {
            common,
            x,
            t,
            replicas,
            m_grid,
            alpha,
            concentration_replicas,
        } => (
            common,
            Some("moments"),
            vec![
                ("x", ints(x)),
                ("t", ints(t)),
                ("replicas", int(*replicas)),
                ("m_grid", ints(m_grid)),
                ("alpha", alpha.map(Value::Float)),
                ("concentration_replicas", int(*concentration_replicas)),
            ],
        ),
        Command::ErCheck {
            common,
            n,
            p,
            sigma_size,
            samples,
            exact_n,
            exact_p,
        } => (
            common,
            Some("er-check"),
            vec![
                ("n", int(*n)),
                ("p", p.map(Value::Float)),
                ("sigma_size", int(*sigma_size)),
                ("samples", int(*samples)),
                ("exact_n", int(*exact_n)),
                ("exact_p", exact_p.map(Value::Float)),
            ],
        ),
        Command::Scaling {
            common,
            degrees,
            n,
            seeds,
        } => (
            common,
            Some("scaling"),
            vec![
                ("degrees", degrees.clone().map(Value::String)),
                ("n", ints(n)),
                ("seeds", int(*seeds)),
            ],
        ),
    }
}

fn sub_table<'a>(root: &'a mut Table, key: &str) -> Result<&'a mut Table> {
    root.entry(key)
        .or_insert_with(|| Value::Table(Table::new()))
        .as_table_mut()
        .ok_or_else(|| config_error(format!("{key}: expected a table")))
}

fn merged_config(command: &Command) -> Result<ExperimentConfig> {
    let (common, kind, exp_flags) = split(command);
    let (mut root, origin) = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                config_error(format!("cannot read config `{}`: {e}", path.display()))
            })?;
            let root: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
                path: path.clone(),
                msg: e.to_string(),
            })?;
            (root, path.clone())
        }
        None if kind.is_none() => return Err(config_error("run: --config is required")),
        None => (Table::new(), PathBuf::from("<command line>")),
    };

    if let Some(seed) = common.seed {
        root.insert("seed".into(), Value::Integer(seed as i64));
    }
    if let Some(out) = &common.out {
        root.insert("out".into(), out.display().to_string().into());
    }
    if let Some(format) = &common.format {
        root.insert("format".into(), format.clone().into());
    }
    if let Some(w) = common.workers {
        root.insert("workers".into(), Value::Integer(w as i64));
    }
    if let Some(c) = common.cap_events {
        root.insert("cap_events".into(), Value::Integer(c as i64));
    }
    if let Some(g) = &common.graph {
        root.insert(
            "graph".into(),
            Value::Table(graph_table(g, common.dynamic)?),
        );
    } else if let Some(path) = &common.graph_file {
        let mut t = Table::new();
        t.insert("kind".into(), "file".into());
        t.insert("path".into(), path.display().to_string().into());
        root.insert("graph".into(), Value::Table(t));
    }
    for (key, v) in [("j", common.j), ("h", common.h), ("beta", common.beta)] {
        if let Some(v) = v {
            sub_table(&mut root, "model")?.insert(key.into(), Value::Float(v));
        }
    }
    if !root.contains_key("model") {
        // An explicit table keeps the echoed config self-describing.
        let mut m = Table::new();
        m.insert("j".into(), Value::Float(1.0));
        m.insert("h".into(), Value::Float(0.5));
        root.insert("model".into(), Value::Table(m));
    }

    if let Some(kind) = kind {
        let exp = sub_table(&mut root, "experiment")?;
        match exp.get("kind").and_then(Value::as_str) {
            Some(k) if k != kind => {
                return Err(config_error(format!(
                    "experiment.kind: config describes a `{k}` experiment, not `{kind}`"
                )))
            }
            Some(_) => {}
            None => {
                exp.insert("kind".into(), kind.into());
            }
        }
        for (key, v) in exp_flags {
            if let Some(v) = v {
                exp.insert(key.into(), v);
            }
        }
    }
    for key in ["seed", "out"] {
        if !root.contains_key(key) {
            return Err(config_error(format!(
                "{key}: missing (pass --{key} or set it in the config)"
            )));
        }
    }
    let text = toml::to_string(&root).map_err(|e| config_error(e.to_string()))?;
    ExperimentConfig::from_toml(&text, &origin)
}

fn run(cli: &Cli) -> Result<()> {
    let config = merged_config(&cli.command)?;
    std::fs::create_dir_all(&config.out)?;
    let manifest = run_experiment(&config)?;
    let out: &Path = &config.out;
    for o in &manifest.outputs {
        println!("{}", out.join(&o.file).display());
    }
    println!("{}", out.join("manifest.json").display());
    log::info!(
        "{} finished in {:.2}s",
        manifest.experiment,
        manifest.wall_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
