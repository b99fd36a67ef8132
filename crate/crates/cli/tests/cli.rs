use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("cfg.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn load_json(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

const SMALL: &str = r#"
seed = 7

[counterexample]
j_max = 4
quotient_max_j = 4
quotient_samples = 500

[olimpico]
count = 2000
m_max = 6

[locvsglob]
randomized_count = 4
k_to = 14
"#;

#[test]
fn replay_is_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    for exp in ["olimpico", "locvsglob", "counterexample"] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for out in [&a, &b] {
            let o = run(&[exp, "--config", &cfg, "--out", out.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{exp}: {}", String::from_utf8_lossy(&o.stdout));
        }
        let name = format!("{exp}.json");
        assert_eq!(load_json(&a.join(&name)), load_json(&b.join(&name)), "{exp}");
        let csv = format!("{exp}.csv");
        assert_eq!(
            std::fs::read_to_string(a.join(&csv)).unwrap(),
            std::fs::read_to_string(b.join(&csv)).unwrap()
        );
    }
}

#[test]
fn seed_flag_changes_the_random_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut texts = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.path().join(seed);
        let o = run(&["olimpico", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let v = load_json(&out.join("olimpico.json"));
        assert_eq!(v["seed"], seed.parse::<u64>().unwrap());
        texts.push(std::fs::read_to_string(out.join("olimpico.csv")).unwrap());
    }
    assert_ne!(texts[0], texts[1]);
}

#[test]
fn small_preset_violates_the_sequence_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}\n").replace("j_max = 4", "j_max = 4\npreset = \"small\""));
    let out = dir.path().join("o");
    let o = run(&["counterexample", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = load_json(&out.join("counterexample.json"));
    assert_eq!(v["pass"], false);
    let failing: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failing.contains(&"sequence conditions"), "{failing:?}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed: sequence conditions"));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[olimpico]\ncount = 10\nbogus = 1\n");
    let o = run(&["olimpico", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn invalid_values_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[locvsglob]\nells = [1.5]\n");
    let o = run(&["locvsglob", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn depth_above_cap_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["counterexample", "--jmax", "13", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource cap"));
    assert!(!dir.path().join("counterexample.json").exists());
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn format_flag_selects_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let json_only = dir.path().join("j");
    let o = run(&["olimpico", "--config", &cfg, "--format", "json", "--out", json_only.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json_only.join("olimpico.json").exists());
    assert!(!json_only.join("olimpico.csv").exists());

    let csv_only = dir.path().join("c");
    let o = run(&["olimpico", "--config", &cfg, "--format", "csv", "--out", csv_only.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(csv_only.join("olimpico.csv")).unwrap();
    assert!(text.starts_with("m,count,min_margin\n"));
    assert!(!csv_only.join("olimpico.json").exists());
}

#[test]
fn heaviside_and_gamma_reports_carry_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("o");
    for exp in ["heaviside", "gamma"] {
        let o = run(&[exp, "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", "2"]);
        assert_eq!(o.status.code(), Some(0), "{exp}: {}", String::from_utf8_lossy(&o.stdout));
    }
    let g = load_json(&out.join("gamma.json"));
    assert!(g["notes"][0].as_str().unwrap().contains("tested δ"));
    let h = std::fs::read_to_string(out.join("heaviside.csv")).unwrap();
    assert!(h.starts_with("weight,epsilon,value\n"));
    assert!(h.lines().count() > 6);
}
