use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neurolasso"))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tiny")
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .output()
        .expect("failed to spawn neurolasso")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn x_of(report: &Value) -> Vec<f64> {
    serde_json::from_value(report["x"].clone()).unwrap()
}

fn small_spec(dir: &Path) -> PathBuf {
    let p = dir.join("spec.json");
    fs::write(
        &p,
        r#"{"n": 32, "l": 64, "spikes": 4, "sigma": 0.01, "lambda_factor": 0.01, "seed": 3}"#,
    )
    .unwrap();
    p
}

#[test]
fn solve_certifies_and_matches_oracle() {
    let inst = fixture();
    let neural = run(&["solve", "--instance", s(&inst)]);
    assert_eq!(
        code(&neural),
        0,
        "{}",
        String::from_utf8_lossy(&neural.stderr)
    );
    let neural = stdout_json(&neural);
    assert_eq!(neural["certificate"]["passed"], true);
    assert_eq!(neural["summary"]["status"], "converged");
    assert_eq!(neural["solver"], "neural");
    assert!(neural["version"].is_string());
    assert!(neural["config"]["neural"]["tol"].is_number());

    let oracle = stdout_json(&run(&[
        "solve",
        "--instance",
        s(&inst),
        "--solver",
        "oracle",
    ]));
    let (a, b) = (x_of(&neural), x_of(&oracle));
    assert_eq!(a.len(), 4);
    assert!(b.iter().any(|v| *v != 0.0) && b.contains(&0.0));
    for (p, q) in a.iter().zip(&b) {
        assert!((p - q).abs() < 1e-6, "{a:?} vs {b:?}");
    }
}

#[test]
fn matrix_free_and_dense_agree() {
    let inst = fixture().join("instance.json");
    let dense = stdout_json(&run(&["solve", "--instance", s(&inst)]));
    let free = run(&["solve", "--instance", s(&inst), "--matrix-free"]);
    assert_eq!(code(&free), 0);
    let free = stdout_json(&free);
    assert_eq!(free["gram_mode"], "matrix-free");
    for (p, q) in x_of(&dense).iter().zip(&x_of(&free)) {
        assert!((p - q).abs() < 1e-7);
    }
}

#[test]
fn solution_files_round_trip_through_certify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = fixture();
    let sol = dir.path().join("x.csv");
    let report = dir.path().join("report.json");
    let out = run(&[
        "solve",
        "--instance",
        s(&inst),
        "--solver",
        "fista",
        "--solution",
        s(&sol),
        "--output",
        s(&report),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());

    for candidate in [&sol, &report] {
        let out = run(&[
            "certify",
            "--instance",
            s(&inst),
            "--solution",
            s(candidate),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert_eq!(v["certificate"]["passed"], true);
        assert_eq!(v["certificate"]["z"].as_array().unwrap().len(), 4);
    }

    // Nudging one coordinate must break the certificate.
    let text = fs::read_to_string(&sol).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let v: f64 = lines[1].parse().unwrap();
    lines[1] = format!("{:?}", v + 0.1);
    let bumped = dir.path().join("bumped.csv");
    fs::write(&bumped, lines.join("\n") + "\n").unwrap();
    let out = run(&["certify", "--instance", s(&inst), "--solution", s(&bumped)]);
    assert_eq!(code(&out), 2);
    let v = stdout_json(&out);
    assert_eq!(v["certificate"]["passed"], false);
    assert!(
        v["certificate"]["fixed_point_residual_inf"]
            .as_f64()
            .unwrap()
            > 1e-3
    );
}

#[test]
fn compare_runs_all_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cmp.csv");
    let out = run(&[
        "compare",
        "--instance",
        s(&fixture()),
        "--solver",
        "neural,ista",
        "--solver",
        "fista",
        "--solver",
        "oracle",
        "--csv",
        s(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert!(v["disagreements"].as_array().unwrap().is_empty());
    let table = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("solver,status,objective"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn compare_needs_two_solvers() {
    let out = run(&[
        "compare",
        "--instance",
        s(&fixture()),
        "--solver",
        "neural,neural",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["solve"])), 1);
    assert_eq!(
        code(&run(&[
            "solve",
            "--instance",
            s(&fixture()),
            "--solver",
            "newton"
        ])),
        1
    );
    assert_eq!(
        code(&run(&["solve", "--instance", "/nonexistent/instance.json"])),
        1
    );
    assert_eq!(
        code(&run(&["solve", "--instance", s(&fixture()), "--tol", "-1"])),
        1
    );
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn step_budget_exhaustion_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"neural": {"max_steps": 3}, "baseline": {"max_iters": 3}}"#,
    )
    .unwrap();
    for solver in ["neural", "ista"] {
        let out = run(&[
            "solve",
            "--instance",
            s(&fixture()),
            "--solver",
            solver,
            "--config",
            s(&cfg),
        ]);
        assert_eq!(code(&out), 2);
        assert_eq!(stdout_json(&out)["summary"]["status"], "max_steps_reached");
    }
}

#[test]
fn trajectory_with_lyapunov_column() {
    let dir = tempfile::tempdir().unwrap();
    let tr = dir.path().join("traj.csv");
    let out = run(&[
        "solve",
        "--instance",
        s(&fixture()),
        "--trajectory",
        s(&tr),
        "--lyapunov",
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&tr).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,time,residual_inf,primal_objective,lyapunov"
    );
    let v: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(v.len() > 2);
    assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    let gen = |name: &str, seed: &str, format: &str| {
        let out_dir = dir.path().join(name);
        let out = run(&[
            "generate",
            "--config",
            s(&spec),
            "--output",
            s(&out_dir),
            "--seed",
            seed,
            "--format",
            format,
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let first = gen("a", "11", "binary");
    let again = gen("b", "11", "binary");
    let other = gen("c", "12", "binary");
    for f in ["A.nlsm", "b.nlsm", "x0.nlsm", "instance.json"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(again.join(f)).unwrap(),
            "{f}"
        );
    }
    assert_ne!(
        fs::read(first.join("A.nlsm")).unwrap(),
        fs::read(other.join("A.nlsm")).unwrap()
    );
    let meta: Value =
        serde_json::from_slice(&fs::read(first.join("instance.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 11);
    assert_eq!(
        fs::read(first.join("A.nlsm")).unwrap().len(),
        16 + 32 * 64 * 8
    );

    let csv = gen("d", "11", "csv");
    assert!(fs::read_to_string(csv.join("A.csv"))
        .unwrap()
        .starts_with("# 32 64\n"));

    // A generated instance feeds straight into solve, which then scores recovery.
    let out = run(&["solve", "--instance", s(&first), "--matrix-free"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["recovery"]["lasso"]["relative_error"].as_f64().unwrap() < 0.5);
}

#[test]
fn signal_recovery_experiment_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    let out_dir = dir.path().join("run");
    let traj = dir.path().join("traj.csv");
    let out = bin()
        .env("NEUROLASSO_THREADS", "1")
        .args([
            "experiment",
            "signal-recovery",
            "--config",
            s(&spec),
            "--output",
            s(&out_dir),
            "--trajectory",
            s(&traj),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let signals = fs::read_to_string(out_dir.join("signals.csv")).unwrap();
    let lines: Vec<&str> = signals.lines().collect();
    assert_eq!(lines[0], "index,x0,least_norm,recovered");
    assert_eq!(lines.len(), 65);

    let report: Value =
        serde_json::from_slice(&fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 3);
    assert_eq!(report["spec"]["n"], 32);
    assert_eq!(report["config"]["neural"]["step"], "spectral-estimate");
    let rec = &report["recovery"];
    assert!(
        rec["lasso"]["relative_error"].as_f64().unwrap()
            < rec["least_norm"]["relative_error"].as_f64().unwrap()
    );
    assert_eq!(rec["lasso"]["recall"], 1.0);
    assert!(fs::read_to_string(&traj).unwrap().starts_with("step,time,"));
}
