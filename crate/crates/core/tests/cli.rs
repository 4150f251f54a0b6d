//! The `fourbody` binary end to end: exit codes, files and formats.

use std::path::Path;
use std::process::{Command, Output};

use fourbody::io::read_config_file;

fn fourbody(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourbody"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn build(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let out = fourbody(&full);
    assert!(out.status.success(), "{}", text(&out.stderr));
    path
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tet = build(dir.path(), "tet.json", &["tetrahedron", "--masses", "1,2,3,4"]);
    let out = fourbody(&["check", &tet]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["oracle"]["max_relative_deviation"].as_f64().unwrap() < 1e-12);
    assert_eq!(report["shape"]["kind"], "Tetrahedral");

    let random = write(
        dir.path(),
        "random.json",
        r#"{"dim":2,"positions":[[0,0],[1,0.1],[0.3,1.2],[1.5,1.7]],"masses":[1,2,0.5,1.2],"G":1.0}"#,
    );
    let out = fourbody(&["check", &random]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("max normalized residual"));

    let negative = write(dir.path(), "neg.json", r#"{"dim":2,"positions":[[0,0],[1,0],[0,1]],"masses":[1,-1,1]}"#);
    let out = fourbody(&["check", &negative]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("mass must be positive"));

    let collide = write(dir.path(), "col.json", r#"{"dim":2,"positions":[[0,0],[0,0],[0,1]],"masses":[1,1,1]}"#);
    let out = fourbody(&["check", &collide]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("collision"));

    let broken = write(dir.path(), "bad.json", "{\"dim\": 2,");
    let out = fourbody(&["check", &broken]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("malformed JSON"));
}

#[test]
fn build_outputs_round_trip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = build(dir.path(), "trap.json", &["trapezium", "--alpha", "75deg"]);
    let raw: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let beta = raw["family"]["beta"].as_f64().unwrap();
    assert!(beta > 22.5f64.to_radians() && beta < 37.5f64.to_radians());
    let (config, masses) = read_config_file(Path::new(&path)).unwrap();
    let xs: Vec<f64> = raw["positions"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|p| p.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()))
        .collect();
    let ys: Vec<f64> = config.positions().iter().flat_map(|r| [r.x, r.y]).collect();
    assert!(xs.iter().zip(&ys).all(|(a, b)| (a - b).abs() <= 1e-15));
    assert_eq!(masses.values()[0], 1.0);
    assert_eq!(fourbody(&["check", &path]).status.code(), Some(0));
    assert_eq!(fourbody(&["oracle", &path]).status.code(), Some(0));
}

#[test]
fn build_rejections_name_the_constraint() {
    let out = fourbody(&["build", "kite-convex", "--alpha", "30deg", "--beta", "30deg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("singular"));
    let out = fourbody(&["build", "kite-concave", "--alpha", "60", "--beta", "20", "--deg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("alpha != pi/3"), "{}", text(&out.stderr));
    let out = fourbody(&["build", "rhombus", "--alpha", "0.4"]);
    assert!(text(&out.stderr).contains("alpha > pi/6"));
}

#[test]
fn build_csv_distances() {
    let out = fourbody(&["build", "rhombus", "--ratio", "1", "--format", "csv"]);
    assert!(out.status.success());
    let body = text(&out.stdout);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "i,j,q");
    assert_eq!(lines.len(), 7);
}

#[test]
fn invert_commands() {
    let out = fourbody(&["invert", "rhombus", "--ratio", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["alpha"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    let out = fourbody(&["invert", "trapezium", "--ratio", "0.1", "--format", "csv"]);
    assert!(out.status.success());
    assert!(text(&out.stdout).starts_with("family,ratio,alpha,beta\ntrapezium,0.1,"));
    let out = fourbody(&["invert", "kite-convex", "--ratio", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn region_files() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("trap.csv");
    let out = fourbody(&["region", "trapezium", "--grid", "64", "--format", "csv", "--out", grid.to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let body = std::fs::read_to_string(&grid).unwrap();
    assert!(body.starts_with("alpha,beta,allowed,m1_ratio,m4_ratio\n"));
    assert_eq!(body.lines().count(), 64 * 64 + 1);

    let curve = std::fs::read_to_string(dir.path().join("trap.csv.curve.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(curve.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["alpha", "beta", "mass_ratio"]);
    let mut n = 0;
    for row in reader.records() {
        let row = row.unwrap();
        let (a, b): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        assert!(fourbody::families::trapezium_region(a, b));
        n += 1;
    }
    assert!(n > 50);
}

#[test]
fn simulate_modes() {
    let dir = tempfile::tempdir().unwrap();
    let eq = build(dir.path(), "eq.json", &["equilateral", "--m4", "2"]);
    let prefix = dir.path().join("rot");
    let out = fourbody(&["simulate", &eq, "--mode", "rotate", "--steps", "2000", "--out", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rot.json")).unwrap()).unwrap();
    assert!(summary["diagnostics"]["max_shape_deviation"].as_f64().unwrap() < 1e-6);
    let traj = std::fs::read_to_string(dir.path().join("rot.csv")).unwrap();
    assert!(traj.starts_with("t,x1,y1,x2,y2,x3,y3,x4,y4,shape_deviation,energy_drift\n"));

    let tet = build(dir.path(), "tet.json", &["tetrahedron"]);
    let out = fourbody(&["simulate", &tet, "--mode", "collapse"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["stop"], "ScaleReached");
    assert!(summary["diagnostics"]["max_shape_deviation"].as_f64().unwrap() < 1e-6);
    let out = fourbody(&["simulate", &tet, "--mode", "rotate"]);
    assert_eq!(out.status.code(), Some(1));

    let random = write(
        dir.path(),
        "random.json",
        r#"{"dim":2,"positions":[[0,0],[1,0.1],[0.3,1.2],[1.5,1.7]],"masses":[1,2,0.5,1.2]}"#,
    );
    let out = fourbody(&["simulate", &random, "--mode", "rotate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("oracle deviation"));
}

#[test]
fn deterministic_output() {
    let a = fourbody(&["region", "kite-convex", "--grid", "32", "--format", "csv"]);
    let b = fourbody(&["region", "kite-convex", "--grid", "32", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
}
