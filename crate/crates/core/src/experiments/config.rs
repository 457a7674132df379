use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::energy::ModelParams;
use crate::error::{Error, Result};
use crate::graph::{
    build_cm_dynamic, build_cm_static, build_er, build_reference_graph, sample_degrees,
    DegreeDistribution, GrowthScheme, MultiGraph, RedrawRule, ReferenceFamily,
};

/// Output flavour of tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Plotdata,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "plotdata" => Ok(OutputFormat::Plotdata),
            _ => Err(Error::Config(format!(
                "unknown format `{s}` (csv, json, plotdata)"
            ))),
        }
    }
}

/// Where the graph of an experiment comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Complete {
        n: usize,
    },
    Torus {
        l: usize,
    },
    Hypercube {
        dim: usize,
    },
    /// Edge list with an `n m` header line.
    File {
        path: PathBuf,
    },
    Cm {
        n: usize,
        /// `"dirac r"` or `"powerlaw τ δ"`.
        degrees: String,
        #[serde(default)]
        dynamic: bool,
        #[serde(default)]
        allow_low_degree: bool,
    },
    Er {
        n: usize,
        p: f64,
    },
}

impl GraphSpec {
    pub fn family(family: ReferenceFamily) -> Self {
        match family {
            ReferenceFamily::Complete { n } => GraphSpec::Complete { n },
            ReferenceFamily::Torus { l } => GraphSpec::Torus { l },
            ReferenceFamily::Hypercube { dim } => GraphSpec::Hypercube { dim },
        }
    }

    /// Builds the graph; random kinds draw from `rng`.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MultiGraph> {
        match self {
            GraphSpec::Complete { n } => build_reference_graph(ReferenceFamily::Complete { n: *n }),
            GraphSpec::Torus { l } => build_reference_graph(ReferenceFamily::Torus { l: *l }),
            GraphSpec::Hypercube { dim } => {
                build_reference_graph(ReferenceFamily::Hypercube { dim: *dim })
            }
            GraphSpec::File { path } => MultiGraph::read(path),
            GraphSpec::Cm {
                n,
                degrees,
                dynamic,
                allow_low_degree,
            } => {
                let dist: DegreeDistribution = degrees.parse()?;
                let seq = sample_degrees(&dist, *n, *allow_low_degree, rng)?;
                if *dynamic {
                    build_cm_dynamic(seq.degrees(), GrowthScheme::Single, rng)
                } else {
                    build_cm_static(seq.degrees(), rng)
                }
            }
            GraphSpec::Er { n, p } => build_er(*n, *p, rng),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GraphSpec::File { path } if !path.is_file() => Err(Error::Config(format!(
                "graph.path: file `{}` not found",
                path.display()
            ))),
            GraphSpec::Cm {
                degrees,
                allow_low_degree,
                ..
            } => {
                let dist: DegreeDistribution = degrees
                    .parse()
                    .map_err(|e| Error::Config(format!("graph.degrees: {e}")))?;
                dist.validate(*allow_low_degree)
                    .map_err(|e| Error::Config(format!("graph.degrees: {e}")))
            }
            GraphSpec::Er { p, .. } if !(0.0..=1.0).contains(p) => {
                Err(Error::Config(format!("graph.p: {p} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub j: f64,
    pub h: f64,
    #[serde(default = "one")]
    pub beta: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            j: 1.0,
            h: 0.5,
            beta: 1.0,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.j, self.h, self.beta)
            .map_err(|e| Error::Config(format!("model: {e}")))
    }
}

fn default_slack() -> f64 {
    crate::bounds::DEFAULT_SLACK_CONSTANT
}

fn default_dirac3() -> String {
    "dirac 3".into()
}

fn default_alpha() -> f64 {
    0.75
}

/// What to run, with its own parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExperimentSpec {
    /// Writes the graph and its degree sequence.
    Generate,
    Landscape {
        #[serde(default)]
        v_table: bool,
    },
    Gates,
    Bounds {
        #[serde(default = "default_slack")]
        slack_constant: f64,
        /// Degree sequence file used instead of the graph.
        #[serde(default)]
        degrees_file: Option<PathBuf>,
    },
    Simulate {
        betas: Vec<f64>,
        replicas: usize,
        /// Mark crossings through the exact gate (needs `n <= 20`).
        #[serde(default)]
        gate: bool,
    },
    Couple {
        n: usize,
        #[serde(default = "default_dirac3")]
        degrees: String,
        t: Vec<usize>,
        seeds: usize,
        #[serde(default)]
        scheme: GrowthScheme,
        #[serde(default)]
        redraw: RedrawRule,
        /// Pairs with at most 12 vertices checked against the oscillation bound.
        #[serde(default)]
        exact_rows: usize,
    },
    Moments {
        x: Vec<usize>,
        t: Vec<usize>,
        replicas: usize,
        #[serde(default)]
        m_grid: Vec<usize>,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default)]
        concentration_replicas: usize,
    },
    ErCheck {
        n: usize,
        /// Defaults to `ln n / n`.
        p: Option<f64>,
        sigma_size: usize,
        samples: usize,
        exact_n: Option<usize>,
        exact_p: Option<f64>,
    },
    Scaling {
        #[serde(default = "default_dirac3")]
        degrees: String,
        n: Vec<usize>,
        seeds: usize,
    },
}

impl ExperimentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSpec::Generate => "generate",
            ExperimentSpec::Landscape { .. } => "landscape",
            ExperimentSpec::Gates => "gates",
            ExperimentSpec::Bounds { .. } => "bounds",
            ExperimentSpec::Simulate { .. } => "simulate",
            ExperimentSpec::Couple { .. } => "couple",
            ExperimentSpec::Moments { .. } => "moments",
            ExperimentSpec::ErCheck { .. } => "er-check",
            ExperimentSpec::Scaling { .. } => "scaling",
        }
    }

    fn needs_graph(&self) -> bool {
        matches!(
            self,
            ExperimentSpec::Generate
                | ExperimentSpec::Landscape { .. }
                | ExperimentSpec::Gates
                | ExperimentSpec::Bounds {
                    degrees_file: None,
                    ..
                }
                | ExperimentSpec::Simulate { .. }
        )
    }
}

/// A complete, reproducible experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    pub workers: Option<usize>,
    pub cap_events: Option<u64>,
    pub graph: Option<GraphSpec>,
    #[serde(default)]
    pub model: ModelSection,
    pub experiment: ExperimentSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            msg: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialise config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::Config(format!("{field}: {why}")));
        self.model.params()?;
        if self.workers == Some(0) {
            return bad("workers", "must be at least 1".into());
        }
        if self.cap_events == Some(0) {
            return bad("cap_events", "must be at least 1".into());
        }
        match (&self.graph, self.experiment.needs_graph()) {
            (Some(g), _) => g.validate()?,
            (None, true) => {
                return bad(
                    "graph",
                    format!("required by the {} experiment", self.experiment.name()),
                )
            }
            (None, false) => {}
        }
        match &self.experiment {
            ExperimentSpec::Simulate {
                betas, replicas, ..
            } => {
                if betas.is_empty() || betas.iter().any(|b| !(*b >= 0.0 && b.is_finite())) {
                    return bad("experiment.betas", "need finite values >= 0".into());
                }
                if betas.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("experiment.betas", "must be strictly increasing".into());
                }
                if *replicas < 2 {
                    return bad("experiment.replicas", "need at least 2".into());
                }
            }
            ExperimentSpec::Couple {
                n,
                degrees,
                t,
                seeds,
                ..
            } => {
                let dist: DegreeDistribution = degrees
                    .parse()
                    .map_err(|e| Error::Config(format!("experiment.degrees: {e}")))?;
                dist.validate(false)
                    .map_err(|e| Error::Config(format!("experiment.degrees: {e}")))?;
                if *n == 0 || *seeds == 0 {
                    return bad("experiment", "n and seeds must be positive".into());
                }
                if t.is_empty() || t.windows(2).any(|w| w[1] <= w[0]) || t[0] == 0 {
                    return bad(
                        "experiment.t",
                        "must be positive and strictly increasing".into(),
                    );
                }
            }
            ExperimentSpec::Moments {
                x,
                t,
                replicas,
                m_grid,
                alpha,
                concentration_replicas,
            } => {
                if let Some(v) = x.iter().find(|&&v| v == 0 || v % 2 != 0) {
                    return bad("experiment.x", format!("{v} is not a positive even number"));
                }
                if t.is_empty() || *replicas < 2 {
                    return bad("experiment", "need a t grid and at least 2 replicas".into());
                }
                if let Some(m) = m_grid.iter().find(|&&m| m < 4 || m % 2 != 0) {
                    return bad(
                        "experiment.m_grid",
                        format!("{m} is not an even number >= 4"),
                    );
                }
                if !m_grid.is_empty() && *concentration_replicas == 0 {
                    return bad(
                        "experiment.concentration_replicas",
                        "must be positive".into(),
                    );
                }
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return bad("experiment.alpha", format!("{alpha} outside (0, 1)"));
                }
            }
            ExperimentSpec::ErCheck {
                n,
                p,
                sigma_size,
                samples,
                exact_n,
                exact_p,
            } => {
                if *n < 2 || *sigma_size == 0 || sigma_size >= n || *samples == 0 {
                    return bad(
                        "experiment",
                        "need n >= 2, 0 < sigma_size < n, samples > 0".into(),
                    );
                }
                if p.is_some_and(|p| !(0.0..=1.0).contains(&p)) {
                    return bad("experiment.p", "outside [0, 1]".into());
                }
                if exact_n.is_some() != exact_p.is_some() {
                    return bad("experiment", "exact_n and exact_p go together".into());
                }
                if exact_p.is_some_and(|p| !(p > 0.0 && p <= 1.0)) {
                    return bad("experiment.exact_p", "outside (0, 1]".into());
                }
            }
            ExperimentSpec::Scaling { degrees, n, seeds } => {
                let dist: DegreeDistribution = degrees
                    .parse()
                    .map_err(|e| Error::Config(format!("experiment.degrees: {e}")))?;
                dist.validate(false)
                    .map_err(|e| Error::Config(format!("experiment.degrees: {e}")))?;
                if n.is_empty() || *seeds == 0 {
                    return bad("experiment", "need an n list and seeds > 0".into());
                }
            }
            ExperimentSpec::Bounds {
                slack_constant,
                degrees_file,
            } => {
                if !(*slack_constant >= 0.0) {
                    return bad("experiment.slack_constant", "must be >= 0".into());
                }
                if let Some(path) = degrees_file.as_ref().filter(|p| !p.is_file()) {
                    return bad(
                        "experiment.degrees_file",
                        format!("file `{}` not found", path.display()),
                    );
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LANDSCAPE: &str = r#"
seed = 1
out = "out"

[graph]
kind = "complete"
n = 4

[model]
j = 1.0
h = 0.5

[experiment]
kind = "landscape"
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::from_toml(LANDSCAPE, Path::new("x.toml")).unwrap();
        assert_eq!(c.graph, Some(GraphSpec::Complete { n: 4 }));
        assert_eq!(c.experiment, ExperimentSpec::Landscape { v_table: false });
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap(), Path::new("y")).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = LANDSCAPE.replace("n = 4", "n = 4\nsize = 5");
        let err = ExperimentConfig::from_toml(&text, Path::new("x.toml")).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(err.to_string().contains("line"), "{err}");
        let text = LANDSCAPE.replace("seed = 1", "seed = 1\nsede = 2");
        assert!(ExperimentConfig::from_toml(&text, Path::new("x.toml")).is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let missing = LANDSCAPE.replace(
            "kind = \"complete\"\nn = 4",
            "kind = \"file\"\npath = \"/no/such/graph\"",
        );
        let err = ExperimentConfig::from_toml(&missing, Path::new("x")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let betas = LANDSCAPE.replace(
            "kind = \"landscape\"",
            "kind = \"simulate\"\nbetas = [2.0, 1.0, 3.0]\nreplicas = 10",
        );
        assert!(ExperimentConfig::from_toml(&betas, Path::new("x")).is_err());
        let no_seed = LANDSCAPE.replace("seed = 1\n", "");
        assert!(ExperimentConfig::from_toml(&no_seed, Path::new("x")).is_err());
    }
}
