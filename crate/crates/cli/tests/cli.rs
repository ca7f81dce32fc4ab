use std::process::{Command, Output};

fn extremal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extremal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

const COMPUTE: &[&str] = &["compute", "matching", "--l", "3", "--n", "9", "--k", "3", "--format", "json"];
const SWEEP: &[&str] = &["sweep", "lemma2", "--l-max", "6", "--k-max", "8", "--n-max", "100", "--format", "csv"];
const ORACLE: &[&str] = &["oracle", "matching", "--n", "6", "--k", "3", "--l", "2"];

#[test]
fn compute_golden() {
    let out = extremal(COMPUTE);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("compute_matching.json"));
    assert_eq!(golden("compute_matching.json"), "{\"formula\":\"56\",\"erdos\":\"56\",\"argmax_i\":3}\n");
}

#[test]
fn sweep_golden() {
    let out = extremal(SWEEP);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, golden("sweep_lemma2.csv"));
    assert!(text.starts_with("ell,n,k,formula,erdos,equal,argmax_i\n"));
}

#[test]
fn oracle_golden() {
    let out = extremal(ORACLE);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, golden("oracle_matching.json"));
    assert!(text.starts_with("{\"max_size\":10,\"optimal\":true,"));
}

#[test]
fn output_independent_of_threads() {
    for args in [COMPUTE, SWEEP, ORACLE] {
        let base = extremal(args).stdout;
        for threads in ["1", "2", "7"] {
            let mut with = args.to_vec();
            with.extend(["--threads", threads]);
            assert_eq!(extremal(&with).stdout, base, "{args:?} --threads {threads}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(extremal(&["compute", "matching", "--l", "two"]).status.code(), Some(1));
    assert_eq!(extremal(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(extremal(&["--help"]).status.code(), Some(0));
    let bad = extremal(&["compute", "matching", "--l", "1", "--n", "4", "--k", "2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("domain error"));
    assert_eq!(extremal(&["oracle", "matching", "--n", "10", "--k", "4", "--l", "2"]).status.code(), Some(3));
    let starved = extremal(&["oracle", "matching", "--n", "9", "--k", "2", "--l", "3", "--max-nodes", "2"]);
    assert_eq!(starved.status.code(), Some(3));
    assert!(String::from_utf8(starved.stdout).unwrap().contains("\"optimal\":false"));
}

#[test]
fn big_counts_stay_exact() {
    let out = extremal(&["compute", "matching", "--l", "2", "--n", "100", "--k", "30"]);
    let text = String::from_utf8(out.stdout).unwrap();
    // C(99, 29) exceeds 2^64; it must come through as a decimal string.
    assert!(text.contains("\"formula\":\"") && text.contains("\"erdos\":\""));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let formula = v["formula"].as_str().unwrap();
    assert!(formula.len() > 20 && formula.bytes().all(|b| b.is_ascii_digit()));
}

#[test]
fn construct_round_trips_through_file() {
    let dir = std::env::temp_dir().join(format!("extremal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("family.txt");
    let out = extremal(&[
        "construct", "intersect", "--s", "2", "--n", "8", "--k", "4", "--t", "2", "--r", "1",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let fam: extremal_core::SetFamily = std::fs::read_to_string(&path).unwrap().parse().unwrap();
    assert_eq!(fam.len(), 17);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["size"], 17);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_and_seed_drive_smoothing() {
    let dir = std::env::temp_dir().join(format!("extremal-smooth-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "max_iter = 300\nsigma = 0.01\n").unwrap();
    let trace = dir.join("trace.csv");
    let args = [
        "smooth", "matching", "--l", "2", "--n", "6", "--k", "3", "--config", cfg.to_str().unwrap(),
        "--seed", "4", "--trace", trace.to_str().unwrap(),
    ];
    let a = extremal(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(extremal(&args).stdout, a.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["iterations"], 300);
    assert_eq!(v["sigma"], 0.01);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("iter,y,penalty,sigma,step_deviation\n"));
    assert_eq!(csv.lines().count(), 301);
    std::fs::write(&cfg, "max_iter = many\n").unwrap();
    assert_eq!(extremal(&args).status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}
