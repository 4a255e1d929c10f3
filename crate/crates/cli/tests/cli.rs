use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use signorini_core::geometry::io::write_field;
use signorini_core::geometry::{Grid, ScalarField};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signorini"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn solve(dir: &Path, config: &str) -> (Output, std::path::PathBuf) {
    let cfg = dir.join("problem.cfg");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("solve");
    let o = run(&["solve", "--config", path(&cfg), "--out", path(&out)]);
    (o, out)
}

#[test]
fn solve_hat_writes_annotated_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = solve(dir.path(), "n = 2\nm = 65\nomega = auto\nboundary = hat 1.5\n");
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats = json(&out.join("stats.json"));
    assert_eq!(stats["version"], "stats/1");
    assert_eq!(stats["stats"]["converged"], true);
    assert!(stats["config"].as_str().unwrap().contains("boundary = hat 1.5"));
    let comp = json(&out.join("complementarity.json"));
    assert_eq!(comp["report"]["pass"], true);
    assert_eq!(comp["contact_empty"], false);
    let dump = fs::read_to_string(out.join("u.field")).unwrap();
    assert!(dump.starts_with("# version = field/1\n"));
    assert!(dump.contains("# m = 65\n"));
    assert!(out.join("u_plane.csv").exists());
}

#[test]
fn m_override_and_constant_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.cfg");
    fs::write(&cfg, "n = 2\nm = 65\nomega = auto\nboundary = const 1\n").unwrap();
    let out = dir.path().join("one");
    let o = run(&["solve", "--config", path(&cfg), "--out", path(&out), "--m", "33"]);
    assert_eq!(code(&o), 0);
    let comp = json(&out.join("complementarity.json"));
    assert_eq!(comp["contact_empty"], true);
    assert!(comp["config"].as_str().unwrap().contains("m = 33\n"));
}

#[test]
fn malformed_config_exits_one_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = solve(dir.path(), "n = 2\nm = 65\nbogus = 3\nboundary = hat 1.5\n");
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert!(!out.exists());
}

#[test]
fn non_convergence_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = solve(dir.path(), "n = 2\nm = 65\nmax_iters = 3\nboundary = hat 1.5\n");
    assert_eq!(code(&o), 2);
    assert_eq!(json(&out.join("stats.json"))["stats"]["converged"], false);
}

#[test]
fn profile_of_quadratic_has_flat_frequency_and_zero_weiss() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("q.field");
    let u = ScalarField::sample(Grid::new(2, 257).unwrap(), |x| x[0] * x[0] - x[1] * x[1]).unwrap();
    write_field(&u, fs::File::create(&field).unwrap()).unwrap();
    let out = dir.path().join("prof");
    let args = ["profile", "--field", path(&field), "--kappa", "2", "--radii", "0.1:0.5:6", "--out", path(&out)];
    assert_eq!(code(&run(&args)), 0);
    let pairs = |name: &str| -> Vec<f64> {
        fs::read_to_string(out.join(name))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let n = pairs("N.dat");
    assert_eq!(n.len(), 6);
    assert!(n.iter().all(|v| (v - 2.0).abs() < 0.02), "{n:?}");
    assert!(pairs("W_kappa2.dat").iter().all(|w| w.abs() < 0.05));
    let first = fs::read(out.join("profile_kappa2.csv")).unwrap();
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(fs::read(out.join("profile_kappa2.csv")).unwrap(), first);
}

#[test]
fn profile_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.field");
    fs::write(&empty, "").unwrap();
    let out = dir.path().join("o");
    assert_eq!(code(&run(&["profile", "--field", path(&empty), "--out", path(&out)])), 1);
    let field = dir.path().join("f.field");
    let u = ScalarField::sample(Grid::new(2, 33).unwrap(), |x| x[0]).unwrap();
    write_field(&u, fs::File::create(&field).unwrap()).unwrap();
    let o = run(&["profile", "--field", path(&field), "--x0", "0.1,0.2", "--out", path(&out)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn classify_no_contact_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("c.field");
    let u = ScalarField::sample(Grid::new(2, 65).unwrap(), |_| 1.0).unwrap();
    write_field(&u, fs::File::create(&field).unwrap()).unwrap();
    let out = dir.path().join("cls");
    assert_eq!(code(&run(&["classify", "--field", path(&field), "--out", path(&out)])), 0);
    let report = json(&out.join("fbreport.json"));
    assert_eq!(report["version"], "fbreport/1");
    assert_eq!(report["points"].as_array().unwrap().len(), 0);
    assert_eq!(report["config"]["m"], 65);
}

#[test]
fn classify_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cls.cfg");
    fs::write(&cfg, "theta = 0.1\ntheta = 0.2\n").unwrap();
    let field = dir.path().join("c.field");
    let u = ScalarField::sample(Grid::new(2, 33).unwrap(), |_| 1.0).unwrap();
    write_field(&u, fs::File::create(&field).unwrap()).unwrap();
    let o = run(&["classify", "--config", path(&cfg), "--field", path(&field), "--out", path(dir.path())]);
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_single_criterion() {
    let o = run(&["verify", "--only", "8"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().next().unwrap().starts_with("PASS [ 8]"), "{text}");
    assert_eq!(code(&run(&["verify", "--only", "11"])), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["solve"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}
