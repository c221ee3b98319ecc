use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tenscert::io::save;
use tenscert::nnapprox::positive_instance;
use tenscert::DenseTensor;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tenscert"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn diag(dir: &TempDir) -> PathBuf {
    write(dir, "s.json", r#"{"shape":[2,2,2],"data":[1,0,0,0,0,0,0,1],"symmetric":true}"#)
}

fn run(args: &[&str], file: &Path) -> Output {
    bin().args(args).arg(file).output().unwrap()
}

fn report(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn approx_on_diagonal_cubic_has_two_tied_classes() {
    let dir = TempDir::new().unwrap();
    let r = report(&run(&["approx", "--rank", "1"], &diag(&dir)));
    assert_eq!(r["command"], "approx");
    assert!((r["results"]["residual"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(r["results"]["tied_classes"], 2);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn approx_on_rank_one_file() {
    let dir = TempDir::new().unwrap();
    let t = DenseTensor::outer(&[vec![1.0, 2.0], vec![3.0, -1.0, 0.5], vec![0.2, 0.4]]).unwrap();
    let path = dir.path().join("r1.json");
    save(&t, false, &path).unwrap();
    let r = report(&run(&["approx", "--rank", "1"], &path));
    assert!(r["results"]["residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn approx_nonneg_rank_two_fits_diagonal_cubic() {
    let dir = TempDir::new().unwrap();
    let r = report(&run(&["approx", "--rank", "2", "--nonneg"], &diag(&dir)));
    assert!(r["results"]["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["results"]["kkt"]["witness"], Value::Null);
}

#[test]
fn certify_fixtures() {
    let dir = TempDir::new().unwrap();
    let r = report(&run(&["certify", "--symmetric"], &diag(&dir)));
    assert_eq!(r["results"]["verdict"], "not-certified");
    assert_eq!(r["results"]["discriminant"], "0");
    assert_eq!(r["results"]["backend"], "rational");

    let generic = write(&dir, "g.json", r#"{"shape":[2,2,2],"data":["1","2/3","2/3","-1/2","2/3","-1/2","-1/2","5/7"],"symmetric":true}"#);
    let r = report(&run(&["certify"], &generic));
    assert_eq!(r["results"]["verdict"], "certified-unique");

    let r = report(&run(&["certify", "--backend", "float"], &generic));
    assert_eq!(r["results"]["backend"], "float");
}

#[test]
fn pairs_eigen_on_diagonal_cubic() {
    let dir = TempDir::new().unwrap();
    let r = report(&run(&["pairs", "--mode", "eigen"], &diag(&dir)));
    let mut lambdas: Vec<f64> = r["results"]["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["lambda"].as_f64().unwrap())
        .collect();
    lambdas.sort_by(f64::total_cmp);
    assert_eq!(lambdas.len(), 3);
    assert!((lambdas[0] - 0.5f64.sqrt()).abs() < 1e-10);
    assert!((lambdas[1] - 1.0).abs() < 1e-10 && (lambdas[2] - 1.0).abs() < 1e-10);
}

#[test]
fn charpoly_on_diagonal_cubic() {
    let dir = TempDir::new().unwrap();
    let r = report(&run(&["charpoly"], &diag(&dir)));
    let coeffs: Vec<&str> = r["results"]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(coeffs, ["-1", "0", "4", "0", "-5", "0", "2"]);
}

#[test]
fn deflate_on_generated_instance_reports_gap() {
    let dir = TempDir::new().unwrap();
    let t = positive_instance(&[2, 2, 2], 3, 11).unwrap();
    let path = dir.path().join("p.json");
    save(&t, false, &path).unwrap();
    let r = report(&run(&["deflate", "--restarts", "32", "--seed", "3"], &path));
    assert!(r["results"]["gap"].as_f64().unwrap() > 0.0);
    assert_eq!(r["results"]["seed"], 3);
}

#[test]
fn results_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "t.json", r#"{"shape":[2,3,2],"data":[0.3,0.1,0.9,0.4,0.2,0.8,0.5,0.7,0.6,0.05,0.35,0.95]}"#);
    for args in [
        &["approx", "--rank", "1", "--seed", "7"][..],
        &["approx", "--rank", "2", "--nonneg", "--seed", "7"][..],
        &["pairs"][..],
    ] {
        let results = |threads: &str| {
            let out = bin().args(args).arg(&path).env("TENSCERT_THREADS", threads).output().unwrap();
            serde_json::to_string(&report(&out)["results"]).unwrap()
        };
        assert_eq!(results("1"), results("1"));
        assert_eq!(results("1"), results("3"));
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("report.json");
    let out = bin()
        .args(["charpoly", "--out"])
        .arg(&out_path)
        .arg(diag(&dir))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(r["command"], "charpoly");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let s = diag(&dir);
    let truncated = write(&dir, "bad.json", r#"{"shape":[2,2],"data":[1,2"#);
    let short = write(&dir, "short.json", r#"{"shape":[2,2],"data":[1,2,3]}"#);
    let asym = write(&dir, "asym.json", r#"{"shape":[2,2],"data":[1,2,3,4],"symmetric":true}"#);
    let signed = write(&dir, "neg.json", r#"{"shape":[2,2],"data":[1,-2,3,4]}"#);
    let zero = write(&dir, "zero.json", r#"{"shape":[2,2,2],"data":[0,0,0,0,0,0,0,0]}"#);
    let cube = write(&dir, "cube.json", &format!(r#"{{"shape":[3,3,3],"data":{:?}}}"#, vec![1.0; 27]));
    let missing = dir.path().join("missing.json");

    assert_eq!(code(&run(&["approx", "--rank", "0"], &s)), 2);
    assert_eq!(code(&run(&["approx"], &truncated)), 2);
    assert_eq!(code(&run(&["approx"], &short)), 2);
    assert_eq!(code(&run(&["approx"], &asym)), 2);
    assert_eq!(code(&run(&["approx"], &missing)), 2);
    assert_eq!(code(&run(&["pairs", "--mode", "eigen"], &zero)), 3);
    assert_eq!(code(&run(&["certify"], &cube)), 4);
    assert_eq!(code(&run(&["approx", "--rank", "2"], &s)), 4);
    assert_eq!(code(&run(&["approx", "--nonneg"], &signed)), 5);
    assert_eq!(code(&run(&["approx"], &zero)), 5);
    assert_eq!(code(&run(&["deflate"], &s)), 5);
    let ones = write(&dir, "ones.json", r#"{"shape":[2,2,2],"data":[1,1,1,1,1,1,1,1]}"#);
    assert_eq!(code(&run(&["deflate", "--restarts", "4"], &ones)), 5);
    let bad_threads = bin().args(["charpoly"]).arg(&s).env("TENSCERT_THREADS", "zero").output().unwrap();
    assert_eq!(code(&bad_threads), 2);

    let stderr = String::from_utf8(run(&["certify"], &cube).stderr).unwrap();
    assert!(stderr.contains("2×2×2"), "{stderr}");
}
