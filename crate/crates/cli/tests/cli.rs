use std::path::Path;
use std::process::{Command, Output};

fn cmglauber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmglauber"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn landscape_on_complete_four_reports_the_barrier() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmglauber(&[
        "landscape",
        "--graph",
        "complete 4",
        "--j",
        "1",
        "--h",
        "0.5",
        "--seed",
        "1",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("landscape.txt")).unwrap();
    assert!(text.lines().any(|l| l == "gamma_star: 3"), "{text}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["gamma_star"], 3.0);
}

#[test]
fn missing_graph_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmglauber(&[
        "landscape",
        "--graph-file",
        "/definitely/not/here.txt",
        "--seed",
        "1",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not found"));
}

#[test]
fn unknown_config_keys_are_rejected_with_their_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "seed = 1\nout = \"x\"\nreplicaz = 3\n[experiment]\nkind = \"gates\"\n",
    )
    .unwrap();
    let o = cmglauber(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("replicaz"), "{err}");
}

#[test]
fn capacity_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmglauber(&[
        "gates",
        "--graph",
        "complete 40",
        "--seed",
        "1",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn same_seed_gives_byte_identical_csv() {
    let run = |dir: &Path, workers: &str| {
        let o = cmglauber(&[
            "simulate",
            "--graph",
            "cm 10 dirac 3",
            "--betas",
            "0.5,1,1.5",
            "--replicas",
            "40",
            "--seed",
            "17",
            "--workers",
            workers,
            "--out",
            &out_arg(dir),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (
            std::fs::read(dir.join("hitting.csv")).unwrap(),
            std::fs::read(dir.join("arrhenius.csv")).unwrap(),
        )
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run(a.path(), "1");
    assert_eq!(first, run(b.path(), "3"));
    let header = String::from_utf8(first.0).unwrap();
    assert!(header.starts_with("beta,replica,tau,events,visited_gate,truncated\n"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "seed = 5\nout = {:?}\nformat = \"json\"\n[graph]\nkind = \"complete\"\nn = 5\n[model]\nj = 1.0\nh = 0.5\n[experiment]\nkind = \"landscape\"\n",
            out.display().to_string()
        ),
    )
    .unwrap();
    let o = cmglauber(&[
        "landscape",
        "--config",
        cfg.to_str().unwrap(),
        "--graph",
        "complete 4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("landscape.json").is_file());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["graph"]["n"], 4);
    assert_eq!(manifest["config"]["seed"], 5);

    let wrong = cmglauber(&["gates", "--config", cfg.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn every_subcommand_runs_on_a_small_instance() {
    let cases: &[&[&str]] = &[
        &["generate", "--graph", "cm 12 dirac 3"],
        &["gates", "--graph", "torus 3"],
        &[
            "bounds",
            "--graph",
            "hypercube 3",
            "--slack-constant",
            "0.5",
        ],
        &[
            "couple",
            "--n",
            "20",
            "--t",
            "10,20",
            "--seeds",
            "5",
            "--exact-rows",
            "2",
        ],
        &[
            "moments",
            "--x",
            "2,4",
            "--t",
            "0,1,2",
            "--replicas",
            "200",
            "--m-grid",
            "100,200",
            "--concentration-replicas",
            "4",
        ],
        &[
            "er-check",
            "--n",
            "40",
            "--sigma-size",
            "20",
            "--samples",
            "10",
            "--exact-n",
            "8",
            "--exact-p",
            "0.9",
        ],
        &["scaling", "--n", "8,10", "--seeds", "2"],
    ];
    for args in cases {
        let dir = tempfile::tempdir().unwrap();
        let mut full = args.to_vec();
        let out = out_arg(dir.path());
        full.extend(["--seed", "2", "--out", &out, "--format", "plotdata"]);
        let o = cmglauber(&full);
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(dir.path().join("manifest.json").is_file(), "{args:?}");
    }
}
