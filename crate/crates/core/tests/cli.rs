//! End-to-end checks of the `femtoho` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn femtoho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_femtoho"))
        .args(args)
        .env_remove("FEMTOHO_THREADS")
        .output()
        .expect("spawn femtoho")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = match fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

#[test]
fn validate_defaults_succeeds_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = femtoho(&["validate", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unknown_flag_and_key_exit_one_naming_the_token() {
    let o = femtoho(&["run", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--bogus-flag"));

    let o = femtoho(&["validate", "--set", "no_such_key=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no_such_key"));

    let o = femtoho(&["validate", "--set", "tick_s=0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tick_s"));
}

#[test]
fn run_writes_event_log_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = femtoho(&[
        "run", "--set", "sim_duration_s=20", "--seed", "4", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(files_in(&out), ["events.csv", "metrics.csv"]);
    let events = fs::read_to_string(out.join("events.csv")).unwrap();
    assert!(events.starts_with("tick,ue_id,event,from_cell,to_cell,reason\n"));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.contains("proposed,fap_assignment_probability,"));
}

#[test]
fn sweep_covers_ten_distances_and_emits_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = femtoho(&[
        "sweep",
        "--set",
        "sim_duration_s=5",
        "--replications",
        "1",
        "--algorithm",
        "rss",
        "--emit-plot-data",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut distances: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    distances.dedup();
    assert_eq!(distances.len(), 10);
    let files = files_in(&out);
    assert!(files.contains(&"fig10_assignment_probability.dat".to_string()));
    assert!(files.contains(&"fig11_handovers.dat".to_string()));
    assert!(files.contains(&"plot_figures.gp".to_string()));
}

#[test]
fn compare_lists_all_four_algorithms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let o = femtoho(&["compare", "--set", "sim_duration_s=10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("compare.csv")).unwrap();
    for label in ["rss", "rss-pathloss", "speed", "proposed"] {
        assert!(csv.contains(&format!(",{label},")), "{label}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    fs::write(&cfg, "seed = 9\nsim_duration_s = 10\nalgorithm = rss\n").unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    let cfg_s = cfg.to_str().unwrap();
    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec!["run", "--config", cfg_s, "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = femtoho(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read_to_string(out.join("events.csv")).unwrap()
    };
    let from_file = run(&a, &[]);
    let from_flag = run(&b, &["--seed", "10", "--set", "seed=9"]);
    let explicit = run(&c, &["--set", "seed=10"]);
    assert_eq!(from_flag, explicit);
    assert_ne!(from_file, from_flag);
    let metrics = fs::read_to_string(a.join("metrics.csv")).unwrap();
    assert!(metrics.lines().nth(1).unwrap().starts_with("rss,"));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = femtoho(&["run", "--set", "sim_duration_s=2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
