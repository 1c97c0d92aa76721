use std::path::Path;
use std::process::{Command, Output};

fn wiretap(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wiretap"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("WIRETAP_SEED")
        .env_remove("WIRETAP_PRESET")
        .env_remove("WIRETAP_CONFIG")
        .env_remove("WIRETAP_TRIALS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn help_lists_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let o = wiretap(&["--help"], dir.path());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for sub in ["verify-uhf", "plan", "simulate", "leakage", "sweep", "--set", "--preset", "--seed"] {
        assert!(text.contains(sub), "missing {sub}");
    }
}

#[test]
fn verify_uhf_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&wiretap(&["verify-uhf", "--l", "3", "--k", "1"], dir.path())), 0);
    let report = json(&dir.path().join("verify-uhf.json"));
    assert_eq!(report["report"].as_array().unwrap().len(), 5);
    assert!(report["metadata"]["config_hash"].as_str().unwrap().len() == 64);
    assert_eq!(code(&wiretap(&["verify-uhf", "--l", "7", "--k", "1"], dir.path())), 2);
    assert_eq!(code(&wiretap(&["verify-uhf", "--l", "3", "--k", "3"], dir.path())), 2);
    assert_eq!(code(&wiretap(&["verify-uhf", "--l", "3"], dir.path())), 2);
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&wiretap(&["plan"], dir.path())), 2);
    assert_eq!(code(&wiretap(&["--preset", "nope", "plan"], dir.path())), 2);
    assert_eq!(code(&wiretap(&["--preset", "tiny-bsc", "--set", "plan.bogus=1", "plan"], dir.path())), 2);
    assert_eq!(code(&wiretap(&["--preset", "tiny-bsc", "--set", "noequals", "plan"], dir.path())), 2);
    assert_eq!(code(&wiretap(&["--preset", "tiny-bsc", "simulate", "--trials", "0"], dir.path())), 2);
    assert_eq!(code(&wiretap(&["frobnicate"], dir.path())), 2);

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[params]\nk = 1\nkk = 2\n").unwrap();
    let o = wiretap(&["--config", cfg.to_str().unwrap(), "plan"], dir.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("kk"), "{err}");
}

#[test]
fn infeasible_plan_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = wiretap(&["--preset", "degraded-bsc", "--set", "plan.r_s=0.9", "plan"], dir.path());
    assert_eq!(code(&o), 1);
    let plan = json(&dir.path().join("plan.json"));
    assert_eq!(plan["report"]["feasible"], false);
    let o = wiretap(&["--preset", "degraded-bsc", "plan"], dir.path());
    assert_eq!(code(&o), 0);
}

#[test]
fn leakage_and_simulate_succeed_on_presets() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&wiretap(&["--preset", "tiny-bsc", "leakage"], dir.path())), 0);
    let leak = json(&dir.path().join("leakage.json"));
    assert_eq!(leak["report"]["pass"], true);
    assert_eq!(leak["report"]["recycle"]["eta"], 2);
    let o = wiretap(&["--preset", "degraded-bsc", "simulate", "--trials", "3000"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sim = json(&dir.path().join("simulate.json"));
    assert_eq!(sim["report"]["trials"], 3000);
}

#[test]
fn precedence_flag_over_env_over_file_over_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "seed = 5\n").unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_wiretap"));
        c.args(["--preset", "tiny-bsc", "--config", cfg.to_str().unwrap(), "--out"]).arg(dir.path()).args(extra).arg("plan");
        c.env_remove("WIRETAP_SEED");
        if let Some(s) = env {
            c.env("WIRETAP_SEED", s);
        }
        assert!(c.output().unwrap().status.success());
        json(&dir.path().join("plan.json"))["metadata"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(&[], None), 5);
    assert_eq!(run(&[], Some("6")), 6);
    assert_eq!(run(&["--seed", "7"], Some("6")), 7);
}

#[test]
fn sweep_writes_csv_json_and_markers() {
    let dir = tempfile::tempdir().unwrap();
    let o = wiretap(&["--preset", "tiny-bsc", "--seed", "3", "sweep"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,estimate,stderr,trials,reference");
    assert_eq!(csv.lines().count(), 5);
    let meta = json(&dir.path().join("sweep.json"));
    assert_eq!(meta["metadata"]["seed"], 3);
    assert_eq!(std::fs::read_dir(dir.path().join("cells")).unwrap().count(), 4);
}

#[test]
fn config_hash_tracks_inputs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    wiretap(&["--preset", "tiny-bsc", "plan"], a.path());
    wiretap(&["--preset", "tiny-bsc", "--set", "plan.r_s=0.1", "plan"], b.path());
    let ha = json(&a.path().join("plan.json"))["metadata"]["config_hash"].clone();
    let hb = json(&b.path().join("plan.json"))["metadata"]["config_hash"].clone();
    assert_ne!(ha, hb);
}
