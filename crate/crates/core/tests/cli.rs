use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ode_efficiency::{InputSystem, ModelFile, Trajectory};

const BIN: &str = env!("CARGO_BIN_EXE_odeff");

const EXAMPLE_MODEL: &str = r#"{
  "dim": 2,
  "intercepts": [1.0, 2.0],
  "coefficients": [[0.25, 0.25], [0.5, 0.5]],
  "price": 6.0,
  "region": [
    {"type": "lower_bound", "index": 0, "value": 1.25},
    {"type": "lower_bound", "index": 1, "value": 2.5},
    {"type": "ball", "center": [0.0, 0.0], "radius": 10.0}
  ]
}
"#;

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

fn odeff(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn score_reproduces_the_worked_example() {
    let d = Dir::new();
    let model = d.file("model.json", EXAMPLE_MODEL);
    let data = d.file("data.csv", "label,y,x1,x2\nXd,1,1.25,6.21\n");
    let out = d.path("scores.csv");
    let o = odeff(&["score", "--model", s(&model), "--data", s(&data), "--anchor", "1.25,2.5", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("label,y,d_j,d_w,efficiency,clamped"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "Xd");
    let num = |k: usize| row[k].parse::<f64>().unwrap();
    assert!((num(2) - 3.71).abs() < 0.005);
    assert!((num(3) - 7.42).abs() < 0.005);
    assert!((num(4) - 0.5).abs() < 0.001);
    assert_eq!(row[5], "false");
}

#[test]
fn geometry_file_lists_the_three_points_and_a_boundary() {
    let d = Dir::new();
    let model = d.file("model.json", EXAMPLE_MODEL);
    let data = d.file("data.csv", "label,y,x1,x2\nXd,1,1.25,6.21\n");
    let geo = d.path("geo.csv");
    let o = odeff(&[
        "score", "--model", s(&model), "--data", s(&data), "--anchor", "1.25,2.5",
        "--out", s(&d.path("scores.csv")), "--fig2-geometry", s(&geo),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&geo).unwrap();
    let kinds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    for k in ["anchor", "observation", "worst"] {
        assert!(kinds.contains(&k), "missing {k}");
    }
    let worst = text.lines().find(|l| l.starts_with("worst")).unwrap();
    let x2: f64 = worst.rsplit(',').next().unwrap().parse().unwrap();
    assert!((x2 - 9.92157).abs() < 1e-4);
    assert!(kinds.iter().filter(|k| **k == "boundary").count() > 100);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let d = Dir::new();
    let model = d.file("model.json", EXAMPLE_MODEL);
    let data = d.file("data.csv", "label,y,x1,x2\nXd,1,1.25,6.21\nXw,1,1.25,9.9\nfar,1,20,20\n");
    let run = |name: &str| {
        let out = d.path(name);
        let o = odeff(&["score", "--model", s(&model), "--data", s(&data), "--anchor", "1.25,2.5", "--out", s(&out)]);
        assert_eq!(code(&o), 0);
        fs::read(out).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    assert_eq!(first, run("c.csv"));
}

#[test]
fn solve_with_a_zero_system_is_all_zeros() {
    let d = Dir::new();
    let model = d.file("zero.json", r#"{"dim": 2, "intercepts": [0, 0], "coefficients": [[0, 0], [0, 0]]}"#);
    let out = d.path("traj.csv");
    let o = odeff(&["solve", "--model", s(&model), "--y-max", "1", "--step", "0.1", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("y,x1,x2,dx1,dx2"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[1..].iter().all(|v| *v == 0.0)));
}

#[test]
fn optimum_report_is_json() {
    let d = Dir::new();
    let model = d.file("model.json", EXAMPLE_MODEL);
    let o = odeff(&["optimum", "--model", s(&model), "--price", &(3.0 * 0.75f64.exp()).to_string()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["y_star"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let x1 = (0.75f64.exp() - 1.0) / 0.75;
    assert!((v["x_star"][0].as_f64().unwrap() - x1).abs() < 1e-6);
    // price from the model file
    let o = odeff(&["optimum", "--model", s(&model)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["y_star"].as_f64().unwrap() - 2f64.ln() / 0.75).abs() < 1e-6);
}

#[test]
fn region_check_reports_membership() {
    let d = Dir::new();
    let model = d.file("model.json", EXAMPLE_MODEL);
    let data = d.file("data.csv", "label,y,x1,x2\nin,1,1.25,6.21\nlow,1,1.0,6.0\nfar,1,9,9\n");
    let o = odeff(&["region-check", "--model", s(&model), "--data", s(&data)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let verdicts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(verdicts, ["true", "false", "false"]);
}

fn write_paths(d: &Dir) -> PathBuf {
    let sys = InputSystem::two_input_example();
    let mut text = String::from("segment,y,x1,x2\n");
    for (seg, x0) in [[0.0, 0.0], [1.0, 0.5]].iter().enumerate() {
        let t = Trajectory::solve_from(&sys, x0, 2.0, 1e-3).unwrap();
        for (y, x) in t.grid().iter().zip(t.states()).step_by(10) {
            text += &format!("{seg},{y:.17e},{:.17e},{:.17e}\n", x[0], x[1]);
        }
    }
    d.file("paths.csv", &text)
}

#[test]
fn fit_then_solve_round_trip() {
    let d = Dir::new();
    let data = write_paths(&d);
    let fitted = d.path("fitted.json");
    let o = odeff(&["fit", "--data", s(&data), "--out", s(&fitted)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let model = ModelFile::read(fs::File::open(&fitted).unwrap()).unwrap();
    assert_eq!(model.dim, 2);

    let traj = d.path("traj.csv");
    let o = odeff(&["solve", "--model", s(&fitted), "--y-max", "2", "--out", s(&traj)]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(traj).unwrap();
    let truth = Trajectory::solve(&InputSystem::two_input_example(), 2.0, 1e-3).unwrap();
    let mut sq = 0.0;
    let mut n = 0;
    for (line, x) in text.lines().skip(1).zip(truth.states()) {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        sq += (v[1] - x[0]).powi(2) + (v[2] - x[1]).powi(2);
        n += 2;
    }
    assert_eq!(n, 2 * truth.len());
    assert!((sq / n as f64).sqrt() < 5e-2);
}

fn assert_fails_cleanly(args: &[&str], out: &Path, expected: i32) {
    let mut full = args.to_vec();
    full.extend(["--out", s(out)]);
    let o = odeff(&full);
    assert_eq!(code(&o), expected, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(!msg.trim().is_empty(), "{args:?} printed no diagnostic");
    assert!(!out.exists(), "{args:?} wrote {}", out.display());
}

#[test]
fn error_paths_exit_non_zero_and_write_nothing() {
    let d = Dir::new();
    let model = d.file("model.json", EXAMPLE_MODEL);
    let data = d.file("data.csv", "label,y,x1,x2\nXd,1,1.25,6.21\n");
    let out = d.path("never.csv");
    let (m, data) = (s(&model), s(&data));

    // I/O
    assert_fails_cleanly(&["solve", "--model", s(&d.path("missing.json"))], &out, 1);
    assert_fails_cleanly(&["score", "--model", m, "--data", s(&d.path("missing.csv"))], &out, 1);

    // validation
    let broken = d.file("broken.json", "{\"dim\": 2, \"intercepts\": [1.0]");
    assert_fails_cleanly(&["solve", "--model", s(&broken)], &out, 2);
    let short = d.file("short.json", r#"{"dim": 2, "intercepts": [1.0], "coefficients": [[0, 0], [0, 0]]}"#);
    assert_fails_cleanly(&["solve", "--model", s(&short)], &out, 2);
    assert_fails_cleanly(&["score", "--model", m], &out, 2);
    assert_fails_cleanly(&["fit"], &out, 2);
    assert_fails_cleanly(&["score", "--model", m, "--data", data, "--anchor", "1,2,3"], &out, 2);
    assert_fails_cleanly(&["solve", "--model", m, "--step", "-1"], &out, 2);
    assert_fails_cleanly(&["optimum", "--model", m, "--price", "0"], &out, 2);
    let bad_row = d.file("bad.csv", "y,x1,x2\n1,abc,2\n");
    assert_fails_cleanly(&["score", "--model", m, "--data", s(&bad_row), "--anchor", "1.25,2.5"], &out, 2);
    let wrong_width = d.file("wide.csv", "y,x1,x2,x3\n1,1,2,3\n");
    assert_fails_cleanly(&["score", "--model", m, "--data", s(&wrong_width), "--anchor", "1.25,2.5"], &out, 2);
    let no_price = d.file("noprice.json", r#"{"dim": 2, "intercepts": [1, 2], "coefficients": [[0.25, 0.25], [0.5, 0.5]]}"#);
    assert_fails_cleanly(&["optimum", "--model", s(&no_price)], &out, 2);
    let unsorted = d.file("unsorted.csv", "y,x1,x2\n0,0,0\n0.5,1,1\n0.2,2,2\n0.7,3,3\n");
    assert_fails_cleanly(&["fit", "--data", s(&unsorted)], &out, 2);

    // numerical
    assert_fails_cleanly(&["optimum", "--model", m, "--price", "2"], &out, 3);
    assert_fails_cleanly(&["optimum", "--model", m, "--price", "1e6", "--y-max", "2"], &out, 3);
    let single = d.file(
        "single.csv",
        &(0..30).fold(String::from("y,x1,x2\n"), |acc, k| {
            let y = k as f64 * 0.05;
            let x1 = ((0.75 * y).exp() - 1.0) / 0.75;
            acc + &format!("{y},{x1},{}\n", 2.0 * x1)
        }),
    );
    assert_fails_cleanly(&["fit", "--data", s(&single)], &out, 3);
    let blowup = d.file("blowup.json", r#"{"dim": 1, "intercepts": [1], "coefficients": [[800]]}"#);
    assert_fails_cleanly(&["solve", "--model", s(&blowup), "--y-max", "10"], &out, 3);
}

#[test]
fn failed_run_leaves_an_existing_output_untouched() {
    let d = Dir::new();
    let out = d.file("keep.csv", "previous contents\n");
    let o = odeff(&["optimum", "--model", s(&d.file("m.json", EXAMPLE_MODEL)), "--price", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 3);
    assert_eq!(fs::read_to_string(out).unwrap(), "previous contents\n");
}
