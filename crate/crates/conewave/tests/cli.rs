use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use conewave::config::{ExperimentConfig, Scenario};
use conewave_core::wavepacket::classify_point;
use conewave_core::Region;

fn workdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("conewave-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn conewave(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conewave"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn json(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn origin_of_a_real_bump_is_the_space_time_origin() {
    let d = workdir("origin");
    let cfg = d.join("c.json");
    fs::write(&cfg, r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "bump", "p1": 1, "p2": 2}}"#).unwrap();
    let out = conewave(&["origin"], &cfg, &d.join("o"));
    assert_eq!(out.status.code(), Some(0));
    let r = json(&d.join("o"));
    for e in r["estimates"].as_array().unwrap() {
        assert!(e["t_star"].as_f64().unwrap().abs() < 1e-9);
        assert!(e["x_star"].as_f64().unwrap().abs() < 1e-9);
    }
    assert_eq!(r["estimates"][0]["method"], "closed_form");
    assert_eq!(r["estimates"][1]["method"], "scan");
}

#[test]
fn approximate_rows_are_tagged_and_certified() {
    let d = workdir("approx");
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/quartic_fixed_origin.json");
    let out = conewave(&["approximate"], &cfg, &d);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let scenario = Scenario::build(ExperimentConfig::from_path(&cfg).unwrap()).unwrap();
    let csv = fs::read_to_string(d.join("points.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,x,region,re_u,im_u,re_H,im_H,abs_err,bound,bound_ratio");
    let mut seen = [0usize; 3];
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 10);
        let (t, x): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let expected = match classify_point(&scenario.symbol, &scenario.cone, t, x) {
            Region::InsideCone { .. } => "inside",
            Region::OutsideCone => "outside",
            Region::OnTimeSlice => "slice-excluded",
        };
        assert_eq!(f[2], expected);
        match f[2] {
            "slice-excluded" => {
                seen[2] += 1;
                assert!(f[8].is_empty());
            }
            tag => {
                seen[(tag == "outside") as usize] += 1;
                let (err, bound): (f64, f64) = (f[7].parse().unwrap(), f[8].parse().unwrap());
                assert!(err <= bound + 1e-9);
            }
        }
    }
    assert!(seen.iter().all(|&n| n > 0), "{seen:?}");
    assert_eq!(json(&d)["rows"]["violations"], 0);
}

#[test]
fn malformed_config_exits_with_one() {
    let d = workdir("bad");
    let cfg = d.join("c.json");
    fs::write(&cfg, r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "bump", "p1": 1}}"#).unwrap();
    let out = conewave(&["evaluate"], &cfg, &d.join("o"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
    let out = conewave(&["evaluate", "--delta", "0.5"], &cfg, &d.join("o"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evaluate_and_sweep_write_both_formats() {
    let d = workdir("sweep");
    let cfg = d.join("c.json");
    fs::write(
        &cfg,
        r#"{"symbol": {"kind": "custom", "name": "cosh"}, "profile": {"shape": "shifted_bump", "p1": -0.5, "p2": 0.5, "xc": 2},
            "times": {"log_spaced": {"min": 10, "max": 1000, "count": 5}}, "x_samples": 5}"#,
    )
    .unwrap();
    let out = conewave(&["evaluate"], &cfg, &d.join("e"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(d.join("e/points.csv")).unwrap().lines().count(), 26);
    let out = conewave(&["sweep"], &cfg, &d.join("s"));
    assert_eq!(out.status.code(), Some(0));
    let r = json(&d.join("s"));
    assert_eq!(r["slices"], 5);
    assert!((r["bound_slope"].as_f64().unwrap() + 0.625).abs() < 1e-9);
    assert!(r["error_slope"].as_f64().unwrap() < -0.45);
}
