use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynsif"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dynsif-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn material_prints_speeds() {
    let o = run(&["material"]);
    assert_eq!(code(&o), 0);
    let r = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(r[0], ["c_l", "c_s", "c_R", "V", "R0", "t_l", "two_t_l", "theta"]);
    let c_s: f64 = r[1][1].parse().unwrap();
    let c_r: f64 = r[1][2].parse().unwrap();
    assert!((c_s - 0.5345).abs() < 5e-4 && (c_r - 0.4957).abs() < 5e-4);
    for cell in &r[1] {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{cell}");
    }
}

#[test]
fn validation_errors_exit_two() {
    assert_eq!(code(&run(&["material", "--set", "speed_fraction=1.0"])), 2);
    assert_eq!(code(&run(&["material", "--set", "nu=0.7"])), 2);
    assert_eq!(code(&run(&["material", "--set", "nonsense=1"])), 2);
    assert_eq!(code(&run(&["plane-weights", "--range", "1:0:0.1"])), 2);
    assert_eq!(code(&run(&["plane-weights", "--axis", "depth"])), 2);
    assert_eq!(code(&run(&["plane-weights", "--axis", "sideways"])), 2);
    assert_eq!(code(&run(&["halfplane-weights", "--set", "depth=inf"])), 2);
    assert_eq!(code(&run(&["crack-growth", "--set", "load_point=0:1:0"])), 2);
    assert_eq!(code(&run(&["crack-growth", "--set", "schedule=1:0.2,2:0.3", "--set", "load_point=0.2:1:0"])), 2);
    assert_eq!(code(&run(&["material", "--config", "/nonexistent/run.cfg"])), 2);
}

#[test]
fn config_file_and_overrides() {
    let d = scratch("cfg");
    let cfg = d.join("run.cfg");
    std::fs::write(&cfg, "# plane run\nnu = 0.25\nspeed_fraction = 0.3\n").unwrap();
    let o = run(&["material", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = rows(&String::from_utf8(o.stdout).unwrap());
    let c_s: f64 = r[1][1].parse().unwrap();
    assert!((c_s - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    let v: f64 = r[1][3].parse().unwrap();
    let c_r: f64 = r[1][2].parse().unwrap();
    assert!((v / c_r - 0.3).abs() < 1e-12);
    let o = run(&["material", "--config", cfg.to_str().unwrap(), "--set", "speed_fraction=0.6"]);
    let r = rows(&String::from_utf8(o.stdout).unwrap());
    assert!((r[1][3].parse::<f64>().unwrap() / c_r - 0.6).abs() < 1e-12);
}

#[test]
fn plane_weights_are_deterministic_with_manifest() {
    let a = scratch("pw-a");
    let b = scratch("pw-b");
    for d in [&a, &b] {
        let o = run(&["plane-weights", "--range", "0.1:0.9:0.2", "--out", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let ta = std::fs::read_to_string(a.join("plane_weights.csv")).unwrap();
    let tb = std::fs::read_to_string(b.join("plane_weights.csv")).unwrap();
    assert_eq!(ta, tb);
    let r = rows(&ta);
    assert_eq!(r.len(), 6);
    assert_eq!(r[0][0], "V_over_cR");
    assert_eq!(r[0][1..], ["w_I_I", "w_I_II", "w_II_I", "w_II_II", "W_I_I", "W_I_II", "W_II_I", "W_II_II"]);
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "plane-weights");
    assert_eq!(m["config"]["range"], "0.1:0.9:0.2");
    assert!(m["version"].is_string());
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(m["outputs"].as_array().unwrap().iter().any(|f| f == "plane_weights.csv"));
}

#[test]
fn halfplane_weights_before_reflection() {
    let d = scratch("hw");
    let o = run(&[
        "halfplane-weights",
        "--range",
        "0.5:1.5:0.5",
        "--collocation",
        "12",
        "--circle-nodes",
        "200",
        "--inv-terms",
        "24",
        "--set",
        "euler_terms=8",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&std::fs::read_to_string(d.join("halfplane_weights.csv")).unwrap());
    assert_eq!(r.len(), 4);
    for row in &r[1..] {
        let v: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
        assert!(v[2].abs() < 5e-3 && v[3].abs() < 5e-3, "{row:?}");
        assert!((v[1] - 0.6599).abs() < 0.02 && (v[4] - 0.7814).abs() < 0.02, "{row:?}");
    }
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["knobs"]["collocation"], 12);
    assert_eq!(m["knobs"]["circle_nodes"], 200);
    assert_eq!(m["knobs"]["inv_terms"], 24);
}

#[test]
fn coarse_circle_rule_fails_validation() {
    let d = scratch("val");
    let o = run(&["validate", "--circle-nodes", "10", "--out", d.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r = rows(&std::fs::read_to_string(d.join("validate.csv")).unwrap());
    let row = r.iter().find(|r| r[0] == "halfplane_factorization").unwrap();
    assert_eq!(row[3], "false");
    let plane = r.iter().find(|r| r[0] == "plane_factorization").unwrap();
    assert_eq!(plane[3], "true");
}

#[test]
fn plane_crack_growth_run() {
    let d = scratch("growth");
    let o = run(&[
        "crack-growth",
        "--set",
        "depth=inf",
        "--set",
        "schedule=1:0.2,3:0.5",
        "--set",
        "load_point=0.1:1:0.5",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stages = rows(&std::fs::read_to_string(d.join("stages.csv")).unwrap());
    assert_eq!(stages.len(), 2);
    let residual: f64 = stages[1][3].parse().unwrap();
    let recon: f64 = stages[1][4].parse().unwrap();
    assert!(residual < 1e-2 && recon < 1e-2, "{stages:?}");
    let sifs = rows(&std::fs::read_to_string(d.join("sifs.csv")).unwrap());
    assert_eq!(sifs[0], ["t", "K_I", "K_II"]);
    assert_eq!(sifs.len(), 17);
    for name in ["radiated.csv", "history.csv", "manifest.json"] {
        assert!(d.join(name).exists(), "{name}");
    }
}
