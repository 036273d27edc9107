use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn uqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uqc"))
        .args(args)
        .env_remove("UQC_THREADS")
        .output()
        .expect("spawn uqc")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&uqc(args))).unwrap()
}

fn strip_wall_time(v: &mut Value) {
    if let Value::Object(map) = v {
        map.remove("wall_time_ms");
        for child in map.values_mut() {
            strip_wall_time(child);
        }
    }
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn unknown_model_exits_with_message() {
    let out = uqc(&["run", "--model", "nosuch"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown model"));
}

#[test]
fn engines_give_identical_moments() {
    let a = json(&["run", "--model", "simple", "--method", "nipc-full", "--k", "3", "--pce-order", "2"]);
    let b = json(&["run", "--model", "simple", "--method", "nipc-full-amtc", "--k", "3", "--pce-order", "2"]);
    assert_eq!(a["uq_result"]["mean"], b["uq_result"]["mean"]);
    assert_eq!(a["uq_result"]["stddev"], b["uq_result"]["stddev"]);
    assert_eq!(a["evaluation"]["total_scalar_evals"], 36);
    assert_eq!(b["evaluation"]["total_scalar_evals"], 18);
    assert_eq!(b["evaluation"]["expansion_copies"], 18);
}

#[test]
fn runs_are_reproducible() {
    for method in ["nipc-full-amtc", "nipc-reg", "sc", "mc"] {
        let args = ["run", "--model", "multipoint", "--method", method, "--k", "4", "--mc-samples", "500", "--seed", "7"];
        let mut a = json(&args);
        let mut b = json(&args);
        strip_wall_time(&mut a);
        strip_wall_time(&mut b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), "{method}");
    }
}

#[test]
fn out_file_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = uqc(&["run", "--model", "simple", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("method,mean,stddev,n_model_points,"));
    assert_eq!(text.lines().count(), 2);
    assert!(!text.contains('\r'));
}

#[test]
fn model_file_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lin.uq");
    fs::write(&path, "# linear\ninput a ~ Normal(0, 1)\ninput b ~ Normal(0, 1)\noutput f = a + b\n").unwrap();
    let v = json(&["run", "--model", path.to_str().unwrap(), "--k", "2", "--pce-order", "1"]);
    assert!(v["uq_result"]["mean"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["uq_result"]["stddev"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);

    fs::write(&path, "output f = (").unwrap();
    let out = uqc(&["run", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error at 1:"));
}

#[test]
fn piston_domain_error_exits() {
    let out = uqc(&["run", "--model", "piston", "--method", "nipc-full-amtc", "--k", "5", "--pce-order", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain error"));
    let ok = json(&["run", "--model", "piston", "--method", "nipc-full-amtc", "--k", "4", "--pce-order", "3"]);
    let full = json(&["run", "--model", "piston", "--method", "nipc-full", "--k", "4", "--pce-order", "3"]);
    assert_eq!(ok["uq_result"]["mean"], full["uq_result"]["mean"]);
}

#[test]
fn bench_simple_matches_closed_form() {
    let text = stdout(&uqc(&["bench", "--model", "simple", "--k", "3..7", "--repeats", "1"]));
    assert!(text.starts_with("k,points,naive_scalar_evals,amtc_scalar_evals,expansion_copies,naive_ms,amtc_ms,reduction\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    for row in rows {
        let k: usize = row[0].parse().unwrap();
        let naive: usize = row[2].parse().unwrap();
        let amtc: usize = row[3].parse().unwrap();
        assert_eq!((naive, amtc), (4 * k * k, k * k + 3 * k));
        let reduction: f64 = row[7].parse().unwrap();
        assert_eq!(reduction, 1.0 - (k * k + 3 * k) as f64 / (4 * k * k) as f64);
        assert_eq!(reduction, 1.0 - amtc as f64 / naive as f64);
    }
}

#[test]
fn bench_multipoint_grows() {
    let rows = csv_rows(&stdout(&uqc(&["bench", "--model", "multipoint", "--k", "3..7", "--repeats", "1"])));
    let red: Vec<f64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    assert!(red.iter().all(|&r| r >= 0.40));
    assert!(red.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn counts_piston_within_band() {
    let rows = csv_rows(&stdout(&uqc(&["counts", "--model", "piston", "--k", "3..7"])));
    for r in rows {
        let red: f64 = r[5].parse().unwrap();
        assert!((0.40..=0.70).contains(&red), "{r:?}");
    }
}

#[test]
fn graph_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let before = dir.path().join("before.dot");
    let after = dir.path().join("after.dot");
    let infl = dir.path().join("infl.csv");
    let p = |x: &std::path::Path| x.to_str().unwrap().to_string();
    let out = uqc(&["graph", "--model", "simple", "--out-before", &p(&before), "--out-after", &p(&after), "--influence", &p(&infl)]);
    assert!(out.status.success());
    let a = fs::read_to_string(&after).unwrap();
    assert_eq!(a.matches("peripheries=2").count(), 2);
    assert!(!fs::read_to_string(&before).unwrap().contains("peripheries=2"));
    assert_eq!(fs::read_to_string(&infl).unwrap(), "op,kind,u1,u2\nop0,cos,1,0\nop1,neg,0,1\nop2,exp,0,1\nop3,add,1,1\n");

    let out = uqc(&["graph", "--model", "piston", "--out-before", &p(&before), "--out-after", &p(&after), "--influence", &p(&infl)]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&infl).unwrap();
    let mut sigs: Vec<String> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(2).collect::<Vec<_>>().join(""))
        .collect();
    sigs.sort();
    sigs.dedup();
    let a = fs::read_to_string(&after).unwrap();
    assert_eq!(a.matches("subgraph cluster_").count(), sigs.len());
}

#[test]
fn single_input_graph_only_gains_feed_expansions() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("one.uq");
    fs::write(&model, "input x ~ Normal(0, 1)\ny = sin(x)\noutput f = exp(y) + y\n").unwrap();
    let before = dir.path().join("b.dot");
    let after = dir.path().join("a.dot");
    let out = uqc(&["graph", "--model", model.to_str().unwrap(), "--out-before", before.to_str().unwrap(), "--out-after", after.to_str().unwrap()]);
    assert!(out.status.success());
    let b = fs::read_to_string(&before).unwrap();
    let a = fs::read_to_string(&after).unwrap();
    assert_eq!(a.matches("peripheries=2").count(), 0);
    assert_eq!(a.matches("shape=box").count(), b.matches("shape=box").count());
}

#[test]
fn convergence_simple_improves() {
    let text = stdout(&uqc(&["convergence", "--model", "simple", "--methods", "nipc-full", "--k", "2..5"]));
    assert!(text.starts_with("method,n_model_points,mean,error_vs_reference,k\n"));
    let rows = csv_rows(&text);
    let err = |k: &str| -> f64 { rows.iter().find(|r| r[4] == k).unwrap()[3].parse().unwrap() };
    assert_eq!(err("5"), 0.0);
    assert!(err("5") < err("2"));
}

#[test]
fn bad_threads_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_uqc"))
        .args(["run", "--model", "simple"])
        .env("UQC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let par = Command::new(env!("CARGO_BIN_EXE_uqc"))
        .args(["run", "--model", "multipoint", "--k", "6"])
        .env("UQC_THREADS", "3")
        .output()
        .unwrap();
    let mut a: Value = serde_json::from_slice(&par.stdout).unwrap();
    let mut b = json(&["run", "--model", "multipoint", "--k", "6"]);
    strip_wall_time(&mut a);
    strip_wall_time(&mut b);
    assert_eq!(a, b);
}
