use std::path::Path;

use cmglauber::experiments::{run_experiment, ExperimentConfig, RunManifest};
use sha2::{Digest, Sha256};

fn config(dir: &Path, body: &str) -> ExperimentConfig {
    let text = format!("seed = 11\nout = {:?}\n{body}", dir.display().to_string());
    ExperimentConfig::from_toml(&text, Path::new("test.toml")).unwrap()
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap_or("")
        .to_string()
}

#[test]
fn manifest_echoes_the_config_and_checksums_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        dir.path(),
        "[graph]\nkind = \"complete\"\nn = 4\n[model]\nj = 1.0\nh = 0.5\n[experiment]\nkind = \"landscape\"\nv_table = true\n",
    );
    let m = run_experiment(&c).unwrap();
    let back = RunManifest::read(&RunManifest::path(dir.path())).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.config, c);
    // the echoed config reproduces the run
    let again =
        ExperimentConfig::from_toml(&back.config.to_toml().unwrap(), Path::new("echo")).unwrap();
    assert_eq!(again, c);
    for o in &m.outputs {
        let data = std::fs::read(dir.path().join(&o.file)).unwrap();
        assert_eq!(o.sha256, hex::encode(Sha256::digest(&data)), "{}", o.file);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["gamma_star"], 3.0);
    assert_eq!(
        first_line(&dir.path().join("v_table.csv")),
        "config_hex,energy,V"
    );
}

#[test]
fn csv_headers_are_fixed() {
    let cases: &[(&str, &[(&str, &str)])] = &[
        (
            "[graph]\nkind = \"complete\"\nn = 4\n[experiment]\nkind = \"simulate\"\nbetas = [0.5, 1.0, 1.5]\nreplicas = 20\ngate = true\n",
            &[
                ("hitting.csv", "beta,replica,tau,events,visited_gate,truncated"),
                ("arrhenius.csv", "beta,mean,stderr,logmean,completed,truncated,ks"),
            ],
        ),
        (
            "[graph]\nkind = \"torus\"\nl = 3\n[experiment]\nkind = \"gates\"\n",
            &[("gates.csv", "config_hex,set,energy")],
        ),
        (
            "[graph]\nkind = \"cm\"\nn = 100\ndegrees = \"dirac 3\"\n[experiment]\nkind = \"bounds\"\n",
            &[("bounds.csv", "quantity,value,slack,note")],
        ),
        (
            "[experiment]\nkind = \"couple\"\nn = 10\nt = [5, 10]\nseeds = 3\nexact_rows = 1\n",
            &[
                ("decay.csv", "t,mismatch_fraction,mean_edge_difference,mean_base_mismatch"),
                ("oscillation.csv", "index,n_a,n_b,k,gamma_a,gamma_b,bound,connected,holds"),
            ],
        ),
        (
            "[experiment]\nkind = \"moments\"\nx = [2]\nt = [1]\nreplicas = 10\n",
            &[
                (
                    "moments.csv",
                    "x,t,mean,mean_stderr,exact_mean,second,second_stderr,exact_second,w_variance,w_variance_exact",
                ),
                ("concentration.csv", "m,mean_max_deviation,stderr,reference"),
            ],
        ),
        (
            "[experiment]\nkind = \"er-check\"\nn = 30\nsigma_size = 10\nsamples = 5\n",
            &[("er_ratios.csv", "sample,ratio")],
        ),
        (
            "[experiment]\nkind = \"scaling\"\nn = [8]\nseeds = 2\n",
            &[
                ("scaling.csv", "n,seed,gamma_exact,path_height,gamma_lower,slack"),
                ("scaling_summary.csv", "n,mean_per_n,sd_per_n,path_sd_per_n,exact"),
            ],
        ),
    ];
    for (body, headers) in cases {
        let dir = tempfile::tempdir().unwrap();
        run_experiment(&config(dir.path(), body)).unwrap();
        for (file, header) in *headers {
            assert_eq!(first_line(&dir.path().join(file)), *header, "{file}");
        }
    }
}

#[test]
fn empty_concentration_grid_leaves_a_header_only_file() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&config(
        dir.path(),
        "[experiment]\nkind = \"moments\"\nx = [2]\nt = [0]\nreplicas = 10\n",
    ))
    .unwrap();
    assert_eq!(
        std::fs::read_to_string(dir.path().join("concentration.csv")).unwrap(),
        "m,mean_max_deviation,stderr,reference\n"
    );
}

#[test]
fn arrhenius_plotdata_is_a_straight_line_in_beta() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&config(
        dir.path(),
        "format = \"plotdata\"\n[graph]\nkind = \"complete\"\nn = 4\n[experiment]\nkind = \"simulate\"\nbetas = [2.0, 2.5, 3.0, 3.5]\nreplicas = 300\n",
    ))
    .unwrap();
    let text = std::fs::read_to_string(dir.path().join("arrhenius.dat")).unwrap();
    let block = text
        .split("\n\n")
        .find(|b| b.starts_with("# log mean hitting time"))
        .unwrap();
    assert_eq!(block.lines().nth(1), Some("beta logmean"));
    let pts: Vec<(f64, f64)> = block
        .lines()
        .skip(2)
        .map(|l| {
            let mut w = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
            (w.next().unwrap(), w.next().unwrap())
        })
        .collect();
    assert_eq!(pts.len(), 4);
    let slopes: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    for s in slopes {
        assert!((2.0..3.6).contains(&s), "{s}");
    }
}

#[test]
fn reruns_are_byte_identical_and_independent_of_workers() {
    let body = "cap_events = 100000\n[graph]\nkind = \"cm\"\nn = 12\ndegrees = \"dirac 3\"\n[experiment]\nkind = \"simulate\"\nbetas = [0.5, 1.0]\nreplicas = 30\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut ca = config(a.path(), body);
    ca.workers = Some(1);
    let mut cb = config(b.path(), body);
    cb.workers = Some(4);
    let ma = run_experiment(&ca).unwrap();
    let mb = run_experiment(&cb).unwrap();
    let sums = |m: &RunManifest| {
        m.outputs
            .iter()
            .map(|o| o.sha256.clone())
            .collect::<Vec<_>>()
    };
    assert_eq!(sums(&ma), sums(&mb));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 5);
}
