use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shearfree"));
    c.env_remove("SHEARFREE_THREADS");
    c
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(sub: &str, scenario: &Path, out: &Path) -> Output {
    bin().args([sub, "--scenario"]).arg(scenario).arg("--out").arg(out).output().expect("binary runs")
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn flat_identity_passes_and_dumps_l() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("solve", &bundled("flat_identity.scn"), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(s["kind"], "burgers-flat");
    assert_eq!(s["passed"], true);
    assert!(s["results"]["max_error"].as_f64().unwrap() <= 1e-9);
    assert!(s["results"]["max_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(s["inputs"]["numerics"]["h"], 1e-3);
    let csv = std::fs::read_to_string(dir.path().join("L.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("u,x,L,residual,error"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 101 * 101);
    for row in rows.iter().take(50) {
        for field in row.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:?}"), field);
        }
    }
}

#[test]
fn shock_records_the_caustic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("caustic", &bundled("shock.scn"), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert!((s["results"]["first"]["u"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("caustic.csv")).unwrap();
    assert!(csv.starts_with("pair,u,x,p\n"));
}

#[test]
fn circle_locus_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("example-circle", &bundled("circle.scn"), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    for r in s["results"]["locus_residuals"].as_array().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-10);
    }
    let csv = std::fs::read_to_string(dir.path().join("caustic.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn other_bundled_scenarios_pass() {
    for (sub, name, files) in [
        ("congruence", "congruence.scn", &["L.csv", "M.csv", "shear.csv"][..]),
        ("congruence", "forced_pair.scn", &["L.csv", "M.csv", "shear.csv"][..]),
        ("dual", "gravity_dual.scn", &["dual.csv"][..]),
        ("solve", "forced_line.scn", &["L.csv"][..]),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(sub, &bundled(name), dir.path());
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        for f in files {
            assert!(dir.path().join(f).exists(), "{name}: {f}");
        }
    }
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let scn = bundled("congruence.scn");
    let first = bin().args(["congruence", "--threads", "1", "--scenario"]).arg(&scn).arg("--out").arg(a.path()).output().unwrap();
    let second = bin().env("SHEARFREE_THREADS", "3").args(["congruence", "--scenario"]).arg(&scn).arg("--out").arg(b.path()).output().unwrap();
    assert!(first.status.success() && second.status.success());
    for f in ["L.csv", "M.csv", "shear.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "[scenario]\nkind = burgers-flat\n[data]\nL0 = sin(\n",
        "[scenario]\nkind = burgers-flat\nbogus = 1\n[data]\nL0 = x\n[grid]\nu_max = 1\nnu = 2\nx_min = 0\nx_max = 1\nnx = 2\n",
        "[scenario]\nkind = congruence\n",
        "[scenario\n",
        "[scenario]\nkind = burgers-flat\n[data]\nL0 = x\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let p = write(dir.path(), &format!("bad{i}.scn"), text);
        let out = run("solve", &p, &dir.path().join(format!("out{i}")));
        assert_eq!(out.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run("solve", &dir.path().join("missing.scn"), dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = bin().env("SHEARFREE_THREADS", "lots").args(["solve", "--scenario"]).arg(bundled("flat_identity.scn")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_violations_exit_3_and_name_the_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let quartic = "[scenario]\nkind = burgers-forced\n[data]\nL0 = x\na4 = 1\n[grid]\nu_max = 0.5\nnu = 2\nx_min = 0\nx_max = 1\nnx = 2\n";
    let p = write(dir.path(), "quartic.scn", quartic);
    let out = run("solve", &p, &dir.path().join("q"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at most cubic"));
    assert_eq!(summary(&dir.path().join("q"))["error"]["kind"], "QuarticForcing");

    let domain = "[scenario]\nkind = burgers-flat\n[data]\nL0 = sqrt(x)\n[grid]\nu_max = 0.5\nnu = 2\nx_min = 0\nx_max = 1\nnx = 2\n";
    let p = write(dir.path(), "domain.scn", domain);
    let out = run("solve", &p, &dir.path().join("d"));
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`L0`"));
}

#[test]
fn unexpected_caustics_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[scenario]\nkind = burgers-flat\n[data]\nL0 = -tanh(x)\n[grid]\nu_max = 1.5\nnu = 2\nx_min = -1\nx_max = 1\nnx = 3\n";
    let p = write(dir.path(), "c.scn", text);
    let out = run("solve", &p, &dir.path().join("a"));
    assert_eq!(out.status.code(), Some(4));
    let p = write(dir.path(), "e.scn", &format!("{text}[check]\nexpect_caustic = true\n"));
    let out = run("solve", &p, &dir.path().join("b"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(summary(&dir.path().join("b"))["results"]["caustic"]["u"].is_number());
}

#[test]
fn failing_checks_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[scenario]\nkind = burgers-flat\n[data]\nL0 = x\nexact = x\n[grid]\nu_max = 0.5\nnu = 3\nx_min = 0.5\nx_max = 1\nnx = 3\n[check]\nmax_error = 1e-9\n";
    let p = write(dir.path(), "f.scn", text);
    let out = run("solve", &p, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(summary(dir.path())["passed"], false);
}

#[test]
fn selftest_reports_every_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["selftest", "--out"]).arg(dir.path()).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 10);
    let s = summary(dir.path());
    let criteria = s["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    let failed: Vec<u64> = criteria.iter().filter(|c| c["passed"] == false).map(|c| c["id"].as_u64().unwrap()).collect();
    // Step-halving ratios of the two schemes that are exact on their test problems are roundoff.
    assert_eq!(failed, vec![3, 6]);
    assert_eq!(out.status.code(), Some(1));
}
