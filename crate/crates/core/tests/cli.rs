use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_safe-bandits"))
        .args(args)
        .env_remove("SAFE_BANDITS_WORKERS")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const DRUG: &str = r#"{
    "instance": {"preset": "drug-trial"},
    "horizon": 300, "trials": 3, "record_stride": 100,
    "agents": [{"algorithm": "docb"}, {"algorithm": "tsbu"}]
}"#;

#[test]
fn run_writes_csv_per_agent() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), DRUG);
    let out = dir.path().join("out");
    let o = cli(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for agent in ["docb", "tsbu"] {
        let csv = fs::read_to_string(out.join(format!("{agent}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,regret_mean,regret_median,regret_q1,regret_q3,regret_min,regret_max,unsafe_mean,unsafe_median,unsafe_q1,unsafe_q3,violation_mean"
        );
        let ts: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(ts, ["100", "200", "300"]);
        let side: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join(format!("{agent}.json"))).unwrap())
                .unwrap();
        assert_eq!(side["mean_final_pulls"].as_array().unwrap().len(), 5);
    }
}

#[test]
fn run_output_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), DRUG);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(cli(&["run", "--config", &config, "--out", a.to_str().unwrap(), "--workers", "1"]).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_safe-bandits"))
        .args(["run", "--config", &config, "--out", b.to_str().unwrap()])
        .env("SAFE_BANDITS_WORKERS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    for f in ["docb.csv", "tsbu.csv", "docb.json", "tsbu.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn bounds_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), DRUG);
    let o = cli(&["bounds", "--config", &config]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let coeff = report["regret_main_coeff"].as_f64().unwrap();
    assert!((coeff - 137.086).abs() < 0.01, "{coeff}");
    assert_eq!(report["k_star"], 2);
}

#[test]
fn sweep_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"instance": {"preset": "gap-large", "i": 1}, "horizon": 200, "trials": 2,
            "agents": [{"algorithm": "topsi"}]}"#,
    );
    let out = dir.path().join("sweep");
    let o = cli(&[
        "sweep", "--config", &config, "--param", "i", "--values", "2,4,6", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.lines().nth(2).unwrap().starts_with("i,4,topsi,2,0,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let bad = write_config(dir.path(), r#"{"instance": {"preset": "drug-trial"}, "horizon": 0, "trials": 1, "agents": [{"algorithm": "docb"}]}"#);
    assert_eq!(cli(&["run", "--config", &bad, "--out", out]).status.code(), Some(1));
    assert_eq!(cli(&["run", "--config", "/nonexistent.json", "--out", out]).status.code(), Some(1));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    let good = write_config(dir.path(), DRUG);
    let o = cli(&["sweep", "--config", &good, "--param", "alpha", "--values", "0.01", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    let o = cli(&["list-algorithms"]);
    assert!(o.status.success());
    let listing = String::from_utf8(o.stdout).unwrap();
    for name in ["docb", "topsi", "tsbu", "naive-ts", "naive-ts-slack", "bwcr", "pess"] {
        assert!(listing.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let o = cli(&["bounds", "--config", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        seen += 1;
    }
    assert!(seen >= 5);
}
