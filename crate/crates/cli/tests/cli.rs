use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

struct Workdir(TempDir);

impl Workdir {
    fn new() -> Self {
        Workdir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn geoloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoloop"))
        .args(args)
        .env_remove("GEOLOOP_EPS_EQ")
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

const TORUS1: &str = r#"{"kind":"flat_torus","dim":1}"#;
const TORUS2: &str = r#"{"kind":"flat_torus","dim":2}"#;
const SPHERE: &str = r#"{"kind":"sphere","dim":2,"radius":1.0}"#;
const WINDING_ONE: &str = r#"{"species":"G","basepoint":[0.0],"points":[[0.0],[0.7],[0.35],[0.0]]}"#;

#[test]
fn reduce_backtrack_to_basepoint() {
    let d = Workdir::new();
    let m = d.file("m.json", SPHERE);
    let w = d.file(
        "w.json",
        r#"{"species":"G","basepoint":[1.0,0.0,0.0],"points":[[1.0,0.0,0.0],[0.0,1.0,0.0],[1.0,0.0,0.0]]}"#,
    );
    let o = geoloop(&["reduce", "--manifold", path_str(&m), "--word", path_str(&w)]);
    let v = stdout_json(&o);
    assert_eq!(v["points"], serde_json::json!([[1.0, 0.0, 0.0]]));
}

#[test]
fn mul_with_inverse_is_identity() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS1);
    let g = d.file("g.json", WINDING_ONE);
    let inv = geoloop(&["inv", "--manifold", path_str(&m), "--word", path_str(&g)]);
    assert!(inv.status.success());
    let gi = d.file("gi.json", std::str::from_utf8(&inv.stdout).unwrap());
    let v = stdout_json(&geoloop(&[
        "mul",
        "--manifold",
        path_str(&m),
        "--word",
        path_str(&g),
        "--word",
        path_str(&gi),
    ]));
    assert_eq!(v["points"], serde_json::json!([[0.0]]));
}

#[test]
fn pi1_winding_one() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS1);
    let g = d.file("g.json", WINDING_ONE);
    let o = geoloop(&["pi1", "--manifold", path_str(&m), "--word", path_str(&g)]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), r#"{"class":[1]}"#);
}

#[test]
fn word_json_round_trip_is_byte_identical() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS2);
    let corpus = geoloop(&[
        "random-words",
        "--manifold",
        path_str(&m),
        "--count",
        "20",
        "--seed",
        "5",
    ]);
    let words: Vec<Value> = stdout_json(&corpus).as_array().unwrap().clone();
    for (i, w) in words.iter().enumerate() {
        let text = serde_json::to_string(w).unwrap();
        let f = d.file(&format!("w{i}.json"), &text);
        let o = geoloop(&["reduce", "--manifold", path_str(&m), "--word", path_str(&f)]);
        assert!(o.status.success());
        assert_eq!(String::from_utf8(o.stdout).unwrap().trim_end(), text);
    }
}

#[test]
fn random_words_are_deterministic_and_valid() {
    let d = Workdir::new();
    let m = d.file("m.json", SPHERE);
    let args = [
        "random-words",
        "--manifold",
        path_str(&m),
        "--count",
        "25",
        "--max-length",
        "6",
        "--seed",
        "11",
    ];
    let a = geoloop(&args);
    let b = geoloop(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let words = stdout_json(&a);
    for (i, w) in words.as_array().unwrap().iter().enumerate() {
        let f = d.file(&format!("w{i}.json"), &serde_json::to_string(w).unwrap());
        let v = stdout_json(&geoloop(&[
            "validate",
            "--manifold",
            path_str(&m),
            "--word",
            path_str(&f),
        ]));
        assert_eq!(v["valid"], Value::Bool(true));
    }
    let empty = geoloop(&["random-words", "--manifold", path_str(&m), "--count", "0"]);
    assert_eq!(stdout_json(&empty), serde_json::json!([]));
}

#[test]
fn validate_reports_antipodal_hop() {
    let d = Workdir::new();
    let m = d.file("m.json", SPHERE);
    let w = d.file("w.json", r#"{"species":"Z","points":[[-1.0,0.0,0.0],[1.0,0.0,0.0]]}"#);
    let v = stdout_json(&geoloop(&[
        "validate",
        "--manifold",
        path_str(&m),
        "--word",
        path_str(&w),
    ]));
    assert_eq!(v["valid"], Value::Bool(false));
    assert_eq!(v["index"], Value::from(0));
}

#[test]
fn invalid_word_exits_two_without_output() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS1);
    let w = d.file(
        "w.json",
        r#"{"species":"G","basepoint":[0.0],"points":[[0.0],[0.5],[0.0]]}"#,
    );
    let o = geoloop(&["reduce", "--manifold", path_str(&m), "--word", path_str(&w)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn parse_errors_exit_one() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS1);
    let broken = d.file("w.json", "{\"species\":");
    let o = geoloop(&["reduce", "--manifold", path_str(&m), "--word", path_str(&broken)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());

    let missing = geoloop(&[
        "reduce",
        "--manifold",
        "/nonexistent/m.json",
        "--word",
        path_str(&broken),
    ]);
    assert_eq!(missing.status.code(), Some(1));

    let unknown = geoloop(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));

    let bad_kind = d.file("k.json", r#"{"kind":"klein_bottle"}"#);
    let o = geoloop(&["sample", "--manifold", path_str(&bad_kind)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solver_non_convergence_exits_three() {
    let d = Workdir::new();
    let m = d.file(
        "m.json",
        r#"{"kind":"chart","dim":2,"metric":"poincare_disk","rho_u":50.0}"#,
    );
    // far apart near the boundary: the straight initial guess is hopeless
    let o = geoloop(&[
        "solve-geodesic",
        "--manifold",
        path_str(&m),
        "--from",
        "[0.9,0.3]",
        "--to",
        "[-0.9,0.3]",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn pairs_beyond_the_chart_radius_exit_two() {
    let d = Workdir::new();
    let m = d.file(
        "m.json",
        r#"{"kind":"chart","dim":2,"metric":"polar_sphere","rho_u":3.0}"#,
    );
    let o = geoloop(&[
        "solve-geodesic",
        "--manifold",
        path_str(&m),
        "--from",
        "[0.05,0.0]",
        "--to",
        "[3.0,3.1]",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn solve_geodesic_polar_chart() {
    let d = Workdir::new();
    let m = d.file(
        "m.json",
        r#"{"kind":"chart","dim":2,"metric":"polar_sphere","rho_u":3.0}"#,
    );
    let v = stdout_json(&geoloop(&[
        "solve-geodesic",
        "--manifold",
        path_str(&m),
        "--from",
        "[1.5707963267948966,0.0]",
        "--to",
        "[1.5707963267948966,1.0]",
        "--samples",
        "8",
    ]));
    assert!((v["length"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["points"].as_array().unwrap().len(), 9);
}

#[test]
fn realize_csv_layout() {
    let d = Workdir::new();
    let m = d.file("m.json", SPHERE);
    let w = d.file(
        "w.json",
        r#"{"species":"G","basepoint":[1.0,0.0,0.0],"points":[[1.0,0.0,0.0],[0.0,0.0,1.0],[0.0,1.0,0.0],[1.0,0.0,0.0]]}"#,
    );
    let o = geoloop(&[
        "realize",
        "--manifold",
        path_str(&m),
        "--word",
        path_str(&w),
        "--samples",
        "3",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,coord_0,coord_1,coord_2");
    assert_eq!(lines.len(), 5);
    // t = 1/3 is the first breakpoint, at (0, 1, 0)
    let row: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((row[2] - 1.0).abs() < 1e-12 && row[1].abs() < 1e-12 && row[3].abs() < 1e-12);
    assert_eq!(lines[4], "1,1,0,0");
}

#[test]
fn tolerance_flag_and_environment() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS1);
    // successive points 1e-6 apart: distinct at the default tolerance
    let w = d.file("w.json", r#"{"species":"Z","points":[[0.2],[0.200001],[0.1]]}"#);
    let args = |extra: &[&str]| {
        let mut a = vec!["reduce", "--manifold", path_str(&m), "--word", path_str(&w)];
        a.extend_from_slice(extra);
        a.into_iter().map(String::from).collect::<Vec<_>>()
    };
    let n_points = |o: Output| stdout_json(&o)["points"].as_array().unwrap().len();
    assert_eq!(
        n_points(geoloop(&args(&[]).iter().map(|s| s.as_str()).collect::<Vec<_>>())),
        3
    );
    assert_eq!(
        n_points(geoloop(
            &args(&["--tolerance", "1e-3"])
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
        )),
        2
    );
    let env = Command::new(env!("CARGO_BIN_EXE_geoloop"))
        .args(args(&[]))
        .env("GEOLOOP_EPS_EQ", "1e-3")
        .output()
        .unwrap();
    assert_eq!(n_points(env), 2);
    let bad_env = Command::new(env!("CARGO_BIN_EXE_geoloop"))
        .args(args(&[]))
        .env("GEOLOOP_EPS_EQ", "tiny")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(1));
}

#[test]
fn word_from_stdin() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS1);
    let mut child = Command::new(env!("CARGO_BIN_EXE_geoloop"))
        .args(["pi1", "--manifold", path_str(&m), "--word", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(WINDING_ONE.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout_json(&o)["class"], serde_json::json!([1]));
}

#[test]
fn act_conjugate_deck() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS2);
    let z = d.file(
        "z.json",
        r#"{"species":"Z_based","basepoint":[0.0,0.0],"points":[[0.0,0.0],[0.8,0.0],[0.4,0.0],[0.0,0.0]]}"#,
    );
    let g = d.file(
        "g.json",
        r#"{"species":"G","basepoint":[0.0,0.0],"points":[[0.0,0.0],[0.0,0.7],[0.0,0.35],[0.0,0.0]]}"#,
    );
    let deck = stdout_json(&geoloop(&["deck", "--manifold", path_str(&m), "--word", path_str(&z)]));
    assert_eq!(deck["class"], serde_json::json!([1, 0]));

    let acted = geoloop(&[
        "act",
        "--manifold",
        path_str(&m),
        "--word",
        path_str(&z),
        "--word",
        path_str(&g),
    ]);
    let zg = d.file("zg.json", std::str::from_utf8(&acted.stdout).unwrap());
    let deck = stdout_json(&geoloop(&["deck", "--manifold", path_str(&m), "--word", path_str(&zg)]));
    assert_eq!(deck["class"], serde_json::json!([1, 1]));

    let conj = geoloop(&[
        "conjugate",
        "--manifold",
        path_str(&m),
        "--word",
        path_str(&g),
        "--word",
        path_str(&g),
    ]);
    let c = d.file("c.json", std::str::from_utf8(&conj.stdout).unwrap());
    let class = stdout_json(&geoloop(&["pi1", "--manifold", path_str(&m), "--word", path_str(&c)]));
    assert_eq!(class["class"], serde_json::json!([0, 1]));
}

#[test]
fn chi_and_relator() {
    let d = Workdir::new();
    let m = d.file("m.json", TORUS2);
    let t = d.file(
        "t.json",
        r#"{"genus":1,"elements":[
            {"species":"G","basepoint":[0.0,0.0],"points":[[0.0,0.0],[0.7,0.0],[0.35,0.0],[0.0,0.0]]},
            {"species":"G","basepoint":[0.0,0.0],"points":[[0.0,0.0],[0.0,0.7],[0.0,0.35],[0.0,0.0]]}
        ]}"#,
    );
    let chi = stdout_json(&geoloop(&["chi", "--manifold", path_str(&m), "--tuple", path_str(&t)]));
    assert_eq!(chi["class"], serde_json::json!([0, 0]));
    let rel = stdout_json(&geoloop(&[
        "relator",
        "--manifold",
        path_str(&m),
        "--tuple",
        path_str(&t),
    ]));
    assert_eq!(rel["relator"], Value::Bool(true));

    let odd = d.file(
        "odd.json",
        r#"{"elements":[{"species":"G","basepoint":[0.0,0.0],"points":[[0.0,0.0]]}]}"#,
    );
    let o = geoloop(&["chi", "--manifold", path_str(&m), "--tuple", path_str(&odd)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_points_are_seeded() {
    let d = Workdir::new();
    let m = d.file("m.json", SPHERE);
    let a = geoloop(&["sample", "--manifold", path_str(&m), "--count", "5", "--seed", "2"]);
    let b = geoloop(&["sample", "--manifold", path_str(&m), "--count", "5", "--seed", "2"]);
    assert_eq!(a.stdout, b.stdout);
    let pts = stdout_json(&a);
    for p in pts.as_array().unwrap() {
        let n: f64 = p.as_array().unwrap().iter().map(|x| x.as_f64().unwrap().powi(2)).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
