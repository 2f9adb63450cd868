use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sweepline::curve::{load_curve, CurveSpec};
use sweepline_oracle::shoelace_area;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn sweepline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sweepline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn sweep(curve: &str, extra: &[&str], out: &Path) -> (Output, Value) {
    let curve = fixture(curve);
    let mut args = vec!["sweep", "--curve", curve.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let output = sweepline(&args);
    let report = fs::read_to_string(out.join("report.json"))
        .map(|t| serde_json::from_str(&t).unwrap())
        .unwrap_or(Value::Null);
    (output, report)
}

fn koch4_shoelace() -> f64 {
    let curve = load_curve(&CurveSpec::Koch { level: 4 }).unwrap();
    let poly: Vec<[f64; 2]> = curve.vertices().iter().map(|p| [p.x, p.y]).collect();
    shoelace_area(&poly)
}

#[test]
fn sweep_square_report() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = sweep("square.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["steps"], 1);
    assert!((report["total_area"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert_eq!(report["frontier_remaining"], 0);
    assert_eq!(report["policy"], "largest");
    assert_eq!(report["seed"], 0);
    for key in ["area_history", "eps_min", "ray_diagnostics"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn koch4_frames_are_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = sweep("koch4.json", &["--policy", "largest", "--svg-every", "10"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let steps = report["steps"].as_u64().unwrap() as usize;
    let area = report["total_area"].as_f64().unwrap();
    let exact = koch4_shoelace();
    assert!(((area - exact) / exact).abs() <= 1e-9, "{area} vs {exact}");

    let mut frames: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("frame_") && n.ends_with(".svg"))
        .collect();
    frames.sort();
    assert_eq!(frames.len(), steps.div_ceil(10) + 1);
    assert_eq!(frames[0], "frame_0001.svg");
    for name in [&frames[0], &frames[frames.len() / 2], frames.last().unwrap()] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let strokes: Vec<_> = doc
            .descendants()
            .filter_map(|n| n.attribute("stroke"))
            .collect();
        assert!(strokes.contains(&"black"), "{name}");
    }
    let first = fs::read_to_string(dir.path().join(&frames[0])).unwrap();
    assert!(first.contains(r#"stroke="blue""#) && first.contains(r#"stroke="red""#));
    let last = fs::read_to_string(dir.path().join(frames.last().unwrap())).unwrap();
    assert!(!last.contains(r#"stroke="blue""#));
}

#[test]
fn svg_off_writes_no_frames() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = sweep("cshape.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec!["report.json"]);
}

#[test]
fn fifo_and_lifo_agree_on_c_shape() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (_, fifo) = sweep("cshape.json", &["--policy", "fifo"], a.path());
    let (_, lifo) = sweep("cshape.json", &["--policy", "lifo"], b.path());
    let (fa, la) = (fifo["total_area"].as_f64().unwrap(), lifo["total_area"].as_f64().unwrap());
    assert!((fa - la).abs() <= 1e-9 * fa);
    assert!((fa - 7.0).abs() <= 1e-9);
}

#[test]
fn identical_config_gives_identical_report() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--policy", "fifo", "--seed", "7"];
    sweep("koch4.json", &args, a.path());
    sweep("koch4.json", &args, b.path());
    let ra = fs::read(a.path().join("report.json")).unwrap();
    let rb = fs::read(b.path().join("report.json")).unwrap();
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
}

#[test]
fn step_limit_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = sweep("cshape.json", &["--max-steps", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report["status"], "StepLimit");
    assert_eq!(report["steps"], 1);
}

#[test]
fn load_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = sweep("missing.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    let bowtie = dir.path().join("bowtie.json");
    fs::write(&bowtie, r#"{"type": "polyline", "vertices": [[0,0],[1,1],[1,0],[0,1]]}"#).unwrap();
    let out = sweepline(&["area", "--curve", bowtie.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let out = sweepline(&["area", "--curve", fixture("square.json").to_str().unwrap(), "--eps-min=-1"]);
    assert_eq!(out.status.code(), Some(1));
}

fn classify(points: &str) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("points.csv");
    fs::write(&csv, points).unwrap();
    sweepline(&[
        "classify",
        "--curve",
        fixture("cshape.json").to_str().unwrap(),
        "--points",
        csv.to_str().unwrap(),
    ])
}

#[test]
fn classify_c_shape_points() {
    let out = classify("1.5,0.5\n1.5,1.5\n2,1.5\n");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let verdicts: Vec<_> = text.lines().map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(verdicts, ["Interior", "Exterior", "OnCurve"]);
    let hint: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((hint - 0.5).abs() < 1e-12);
}

#[test]
fn classify_empty_and_malformed() {
    let out = classify("");
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let out = classify("0.5,0.5\na,b\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
}

#[test]
fn classify_to_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("points.csv");
    fs::write(&csv, "0.5,0.5\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = sweepline(&[
        "classify",
        "--curve",
        fixture("square.json").to_str().unwrap(),
        "--points",
        csv.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(out_dir.join("classify.csv")).unwrap();
    assert!(text.starts_with("0.5,0.5,Interior,"));
}

#[test]
fn area_prints_twelve_digits() {
    let area = |name: &str| {
        let out = sweepline(&["area", "--curve", fixture(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        String::from_utf8(out.stdout).unwrap().trim().to_string()
    };
    assert_eq!(area("square.json"), "1.00000000000");
    assert_eq!(area("cshape.json"), "7.00000000000");
    let printed: f64 = area("koch4.json").parse().unwrap();
    let exact = koch4_shoelace();
    assert!(((printed - exact) / exact).abs() <= 1e-9);
}
