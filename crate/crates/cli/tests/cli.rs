use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use heisenberg_invariants::{
    act, heisenberg_invariants, sample_random_signal, Complex64, ComplexVector, GroupElement,
    HeisenbergInvariants, OrbitRecoveryReport,
};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heisenberg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write<T: serde::Serialize>(dir: &TempDir, name: &str, value: &T) -> PathBuf {
    let p = path(dir, name);
    fs::write(&p, serde_json::to_string(value).unwrap()).unwrap();
    p
}

fn read<T: serde::de::DeserializeOwned>(p: &Path) -> T {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn invariants_writes_bundle() {
    let dir = TempDir::new().unwrap();
    let x = sample_random_signal(4, 1);
    let input = write(&dir, "x.json", &x);
    let output = path(&dir, "inv.json");
    let out = run(&["invariants", s(&input), s(&output)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("generic: true"));
    let inv: HeisenbergInvariants = read(&output);
    assert_eq!(inv, heisenberg_invariants(&x));
}

#[test]
fn invariants_exit_codes() {
    let dir = TempDir::new().unwrap();
    let truncated = path(&dir, "bad.json");
    fs::write(&truncated, r#"{"n": 3, "re": [1, 2"#).unwrap();
    assert_eq!(code(&run(&["invariants", s(&truncated), s(&path(&dir, "o.json"))])), 2);

    let ones = write(&dir, "ones.json", &ComplexVector::from_real(&[1.0; 4]).unwrap());
    let o = path(&dir, "o.json");
    assert_eq!(code(&run(&["invariants", s(&ones), s(&o), "--require-generic"])), 3);
    assert_eq!(code(&run(&["invariants", s(&ones), s(&o)])), 0);
}

#[test]
fn recover_then_verify() {
    let dir = TempDir::new().unwrap();
    let x = sample_random_signal(5, 17);
    let inv = write(&dir, "inv.json", &heisenberg_invariants(&x));
    let report_path = path(&dir, "report.json");
    let out = run(&["recover", s(&inv), s(&report_path), "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: OrbitRecoveryReport = read(&report_path);
    assert!(report.success);

    let truth = write(&dir, "x.json", &x);
    let candidate = write(&dir, "cand.json", &report.candidate);
    let out = run(&["verify", s(&truth), s(&candidate)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("witness"));
}

#[test]
fn recover_rejects_tampered_power_invariant() {
    let dir = TempDir::new().unwrap();
    let x = sample_random_signal(4, 5);
    let mut inv = heisenberg_invariants(&x);
    inv.i_n *= 2.0;
    let input = write(&dir, "inv.json", &inv);
    let out = run(&["recover", s(&input), s(&path(&dir, "r.json")), "--max-restarts", "300"]);
    assert_ne!(code(&out), 0);
    assert_eq!(code(&out), 3);
}

#[test]
fn recover_rejects_non_real_bispectrum() {
    let dir = TempDir::new().unwrap();
    let x = sample_random_signal(4, 6);
    let mut inv = heisenberg_invariants(&x);
    // the bispectrum of a complex vector is not that of any real y
    inv.bm = heisenberg_invariants::unitary_bispectrum(&sample_random_signal(4, 99));
    let input = write(&dir, "inv.json", &inv);
    assert_eq!(code(&run(&["recover", s(&input), s(&path(&dir, "r.json"))])), 3);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let n = 4;
    let x = sample_random_signal(n, 8);
    let g = GroupElement::new(n, 1, 3, 2);
    let px = write(&dir, "x.json", &x);
    let pg = write(&dir, "gx.json", &act(&g, &x).unwrap());
    let p2 = write(&dir, "2x.json", &x.scale(Complex64::new(2.0, 0.0)));
    let rotated = x.scale(Complex64::from_polar(1.0, std::f64::consts::PI / (2.0 * n as f64)));
    let pr = write(&dir, "rx.json", &rotated);
    let short = write(&dir, "short.json", &sample_random_signal(3, 8));

    let out = run(&["verify", s(&px), s(&pg), "--tol", "1e-9"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("witness (1, 3, 2)"));
    assert_eq!(code(&run(&["verify", s(&px), s(&p2)])), 1);
    assert_eq!(code(&run(&["verify", s(&px), s(&pr)])), 1);
    assert_eq!(code(&run(&["verify", s(&px), s(&short)])), 2);
}

#[test]
fn experiment_rows_and_summaries() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "spec.json");
    fs::write(&spec, r#"{"n_values": [3, 4, 5], "trials": 20, "seed": 7}"#).unwrap();
    let csv = path(&dir, "out.csv");
    assert_eq!(code(&run(&["experiment", s(&spec), s(&csv)])), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,trial,seed,success,orbit_distance,restarts_used,res_bm,res_bfm,res_pr,res_phase,res_final,wall_ms"
    );
    assert_eq!(lines.len(), 1 + 60 + 3);
    for line in lines.iter().filter(|l| l.contains(",summary,")) {
        let rate: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(rate >= 0.95, "{line}");
    }

    let again = path(&dir, "again.csv");
    assert_eq!(code(&run(&["experiment", s(&spec), s(&again)])), 0);
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn experiment_single_trial_and_malformed_spec() {
    let dir = TempDir::new().unwrap();
    let spec = path(&dir, "spec.json");
    fs::write(&spec, r#"{"n_values": [4], "trials": 1, "seed": 1}"#).unwrap();
    let csv = path(&dir, "out.csv");
    assert_eq!(code(&run(&["experiment", s(&spec), s(&csv)])), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let data: Vec<&str> = text.lines().skip(1).filter(|l| !l.contains("summary")).collect();
    assert_eq!(data.len(), 1);

    for bad in [
        r#"{"n_values": [4], "trials": 0, "seed": 1}"#,
        r#"{"n_values": [1], "trials": 2, "seed": 1}"#,
        r#"{"n_values": [4], "seed": 1}"#,
        "not json",
    ] {
        fs::write(&spec, bad).unwrap();
        assert_eq!(code(&run(&["experiment", s(&spec), s(&csv)])), 2, "{bad}");
    }
}

#[test]
fn degree_audit_table() {
    let out = run(&["degree-audit", "--max-n", "10"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    for line in stdout.lines().skip(1) {
        assert!(line.split('\t').skip(1).all(|c| c == "0"), "{line}");
    }

    let out = run(&["degree-audit", "--max-n", "2"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "N\td=1\n2\t0\n");

    let out = run(&["degree-audit", "--max-n", "4", "--include-boundary"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("d=4"));
    assert!(stdout.lines().any(|l| l == "3\t0\t0\t10"));
}

#[test]
fn cyclic_subcommands() {
    let dir = TempDir::new().unwrap();
    let out_path = path(&dir, "out.json");

    let fixture = path(&dir, "w.json");
    fs::write(&fixture, r#"{"n":2,"r":1,"a":[{"re":2,"im":0},{"re":8,"im":0}]}"#).unwrap();
    assert_eq!(code(&run(&["cyclic", "recover-weighted", s(&fixture), s(&out_path)])), 0);
    let v: ComplexVector = read(&out_path);
    let truth = ComplexVector::from_real(&[1.0, 2.0]).unwrap();
    let in_orbit = (0..6).any(|j| {
        heisenberg_invariants::cyclic::weighted_action(&truth, j).distance(&v) < 1e-12
    });
    assert!(in_orbit);

    fs::write(&fixture, r#"{"n":2,"r":0,"a":[{"re":2,"im":0},{"re":8,"im":0}]}"#).unwrap();
    assert_eq!(code(&run(&["cyclic", "recover-weighted", s(&fixture), s(&out_path)])), 3);

    let x = ComplexVector::new(vec![
        Complex64::new(2.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 0.0),
    ])
    .unwrap();
    let px = write(&dir, "x.json", &x);
    assert_eq!(code(&run(&["cyclic", "recover-regular", s(&px), s(&out_path)])), 0);
    let w: ComplexVector = read(&out_path);
    assert!((0..3).any(|k| heisenberg_invariants::cyclic_shift(&x, k).distance(&w) < 1e-12));

    let pw = write(&dir, "v.json", &truth);
    assert_eq!(code(&run(&["cyclic", "weighted-invariants", s(&pw), s(&out_path)])), 0);
    assert!(fs::read_to_string(&out_path).unwrap().contains("\"r\""));

    let p12 = path(&dir, "w12.json");
    fs::write(&p12, r#"{"r1":4,"r2":1,"a":{"re":0,"im":4}}"#).unwrap();
    assert_eq!(code(&run(&["cyclic", "recover-weight12", s(&p12), s(&out_path)])), 0);
    fs::write(&p12, r#"{"r1":4,"r2":1,"a":{"re":0,"im":5}}"#).unwrap();
    assert_eq!(code(&run(&["cyclic", "recover-weight12", s(&p12), s(&out_path)])), 3);
}

#[test]
fn sample_is_seeded() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    assert_eq!(code(&run(&["sample", "--n", "6", "--seed", "4", s(&a)])), 0);
    assert_eq!(code(&run(&["sample", "--n", "6", "--seed", "4", s(&b)])), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let x: ComplexVector = read(&a);
    assert_eq!(x, sample_random_signal(6, 4));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["degree-audit", "--max-n", "1"])), 2);
}
