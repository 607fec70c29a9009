use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sgb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgb"))
        .args(args)
        .env_remove("SGB_JOBS")
        .env_remove("SGB_OUTPUT_DIR")
        .output()
        .expect("spawn sgb")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

const SMALL_ENV: &str = "random-coverage:arms=12,universe=10,p_max=0.5,density=0.4,seed=3";

#[test]
fn validate_prints_schedule() {
    let out = sgb(&["validate", "--n", "534", "--k", "8", "--horizon", "50000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("epsilon* = 0.2508"), "{text}");
    assert!(text.contains("m = 24\n"));
    assert!(text.contains("s_1 = 93\n"));
    assert!(text.contains("exploration length = 17712"));
    assert!(text.trim_end().ends_with("valid"));

    let out = sgb(&["validate", "--n", "534", "--k", "8", "--horizon", "1000"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("invalid: T = 1000"));
}

#[test]
fn run_is_deterministic() {
    let args = [
        "run",
        "--env",
        SMALL_ENV,
        "--method",
        "sgb",
        "--k",
        "2",
        "--horizon",
        "3000",
        "--seed",
        "7",
        "-q",
    ];
    let a = sgb(&args);
    let b = sgb(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let line = stdout(&a);
    assert_eq!(line.lines().count(), 1);
    let fields: Vec<&str> = line.trim_end().split(',').collect();
    assert_eq!(fields.len(), 13);
    assert_eq!(&fields[..6], &[fields[0], fields[1], "2", "3000", "0", "7"]);
    assert_eq!(fields[0], "sgb");
}

#[test]
fn run_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = sgb(&[
        "run",
        "--env",
        SMALL_ENV,
        "--method",
        "etcg",
        "--k",
        "2",
        "--horizon",
        "3000",
        "--trace-out",
        trace.to_str().unwrap(),
        "--header",
        "-q",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).starts_with("method,epsilon,k,horizon,rep,seed,"));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,phase,action_size,reward,cum_reward"
    );
    assert_eq!(text.lines().count(), 3001);
    assert!(text.lines().nth(1).unwrap().starts_with("1,1,1,"));
}

#[test]
fn short_horizon_needs_force() {
    let base = [
        "run",
        "--env",
        SMALL_ENV,
        "--method",
        "sgb",
        "--k",
        "3",
        "--horizon",
        "60",
        "-q",
    ];
    let out = sgb(&base);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));
    let mut forced = base.to_vec();
    forced.push("--force");
    assert!(sgb(&forced).status.success());
}

#[test]
fn brute_force_budget_exits_one() {
    let env = "random-coverage:arms=25,universe=10,p_max=0.5,density=0.4,seed=1";
    let out = sgb(&["offline", "--env", env, "--k", "3", "--algo", "brute"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("brute force"));
}

#[test]
fn offline_algorithms() {
    let greedy = stdout(&sgb(&["offline", "--env", SMALL_ENV, "--k", "3"]));
    let brute = stdout(&sgb(&[
        "offline", "--env", SMALL_ENV, "--k", "3", "--algo", "brute",
    ]));
    let value = |s: &str| -> f64 {
        s.lines()
            .find_map(|l| l.strip_prefix("value = "))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(value(&greedy) <= value(&brute));
    assert!(greedy.contains("evaluations = 33"));
    let sg = sgb(&[
        "offline",
        "--env",
        SMALL_ENV,
        "--k",
        "3",
        "--algo",
        "stochastic-greedy",
        "--epsilon",
        "0.3",
        "--seed",
        "4",
    ]);
    assert!(sg.status.success());
}

#[test]
fn graph_environment_from_file() {
    let graph = repo_file("data/pa-534.txt");
    let out = sgb(&[
        "offline",
        "--env",
        graph.to_str().unwrap(),
        "--k",
        "2",
        "--mc-reps",
        "20",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("evaluations = 1067"));
}

#[test]
fn clean_event_diagnostic() {
    let out = sgb(&[
        "diagnose",
        "clean-event",
        "--env",
        SMALL_ENV,
        "--k",
        "2",
        "--horizon",
        "400",
        "--reps",
        "50",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("runs = 50"));
    assert!(text.contains("bound 1 - 2/T = 0.995"));

    let graph = repo_file("data/pa-534.txt");
    let out = sgb(&[
        "diagnose",
        "clean-event",
        "--env",
        &format!("graph:{}", graph.display()),
        "--k",
        "2",
        "--horizon",
        "50000",
        "--reps",
        "2",
        "--mc-reps",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let out = sgb(&["run", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--no-such-flag"));
    assert_eq!(sgb(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        sgb(&[
            "run",
            "--env",
            SMALL_ENV,
            "--method",
            "ucb",
            "--k",
            "2",
            "--horizon",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn help_documents_every_flag() {
    let cases: [(&[&str], &[&str]); 6] = [
        (&["validate"], &["--n", "--k", "--horizon", "--epsilon"]),
        (
            &["run"],
            &[
                "--env",
                "--method",
                "--epsilon",
                "--k",
                "--horizon",
                "--seed",
                "--trace-out",
                "--force",
                "--t-initial",
                "--p",
                "--mc-reps",
            ],
        ),
        (
            &["sweep"],
            &[
                "--config",
                "--jobs",
                "--output-dir",
                "SGB_JOBS",
                "SGB_OUTPUT_DIR",
            ],
        ),
        (
            &["offline"],
            &["--env", "--k", "--algo", "--epsilon", "--mc-reps", "--seed"],
        ),
        (
            &["diagnose", "clean-event"],
            &["--env", "--k", "--horizon", "--reps", "--rad-scale"],
        ),
        (&[], &["validate", "run", "sweep", "offline", "diagnose"]),
    ];
    for (sub, flags) in cases {
        let mut args = sub.to_vec();
        args.push("--help");
        let out = sgb(&args);
        assert!(out.status.success());
        let text = stdout(&out);
        for flag in flags {
            assert!(text.contains(flag), "{sub:?} help lacks {flag}");
        }
    }
}

#[test]
fn missing_file_reports_path() {
    let out = sgb(&[
        "offline",
        "--env",
        "coverage:/nonexistent/inst.txt",
        "--k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/inst.txt"));
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "master_seed = 1\nks = [2\n").unwrap();
    let out = sgb(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml") && err.contains("line"), "{err}");
}

#[test]
fn sweep_is_reproducible() {
    let config = repo_file("configs/quick.toml");
    let mut outputs = Vec::new();
    for jobs in ["1", "2"] {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_sgb"))
            .args(["sweep", "-q", "--config", config.to_str().unwrap()])
            .env("SGB_OUTPUT_DIR", dir.path())
            .env("SGB_JOBS", jobs)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
        outputs.push((
            out.stdout,
            read("summary.csv"),
            read("references.csv"),
            read("errors.csv"),
        ));
        assert!(dir.path().join("traces").read_dir().unwrap().count() > 0);
    }
    assert_eq!(outputs[0], outputs[1]);
    let summary = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "method,epsilon,k,horizon,rep,seed,cum_reward,regret,regret_ref,regret_ref_stderr,exploration_end,exploit_mean_reward,wall_ms"
    );
}
