use std::path::Path;
use std::process::Command;

fn herzlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_herzlab"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const ZERO: &str = r#"
command = "norm"
[grid]
n = 2
L = 16
G = 64
[field]
kind = "zero"
[source]
p = 2
alpha = 0
q = 2
"#;

#[test]
fn zero_field_has_norm_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "zero.toml", ZERO);
    let out = dir.path().join("zero.csv");
    let status = herzlab().args(["norm", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text, "quantity,value\nherz_norm,0.0000000000000000e0\n");
    let meta = std::fs::read_to_string(dir.path().join("zero.csv.meta.json")).unwrap();
    assert!(meta.contains("\"k_min\"") && meta.contains("\"version\""), "{meta}");
}

#[test]
fn malformed_config_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[grid\nn = 1\n");
    let out = herzlab().args(["norm", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("config error"), "{err}");

    // Admissibility: α <= -1/p diverges.
    let cfg = write(dir.path(), "alpha.toml", &ZERO.replace("alpha = 0", "alpha = -0.75"));
    let out = herzlab().args(["norm", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("inadmissible"));

    // Ensemble commands refuse to run without a seed.
    let cfg = write(
        dir.path(),
        "hardy.toml",
        "[ensemble]\nsize = 3\n[check]\na = [0.5]\nq = [1]\n",
    );
    let out = herzlab().args(["hardy-check", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("seed"));
    let out = herzlab().args(["hardy-check", "--seed", "4", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);

    let missing = herzlab().args(["norm", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert!(!missing.status.success());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        r#"
command = "embed-sweep"
[source]
family = "F"
s = 0
p = 1
alpha = 0
q = 2
beta = 2
[target]
family = "F"
s = -0.5
p = 2
alpha = 0
q = 2
beta = 2
[ensemble]
seed = 9
size = 50
levels = [3, 4]
[check]
theorem = "sobolev"
[output]
format = "json"
"#,
    );
    let run = |name: &str| {
        let out = dir.path().join(name);
        assert!(herzlab().args(["embed-sweep", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap().success());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 2);
    assert_eq!(doc["meta"]["seed"], 9);
}

#[test]
fn phitransform_writes_coefficients_readable_by_seqnorm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "phi.toml",
        r#"
[grid]
n = 1
L = 64
G = 1024
[field]
kind = "random"
radius = 6.0
seed = 2
[system]
kind = "fj-pair"
levels = 3
[output]
coeffs = "phi.coeffs"
"#,
    );
    let out = herzlab().args(["phitransform", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let err: f64 = text.lines().find(|l| l.starts_with("roundtrip_error")).unwrap()[16..].parse().unwrap();
    assert!(err < 1e-8);

    let cfg = write(
        dir.path(),
        "seq.toml",
        "[coeffs]\npath = \"phi.coeffs\"\n[source]\nfamily = \"B\"\ns = 0\np = 2\nalpha = 0\nq = 2\nbeta = 2\n",
    );
    let out = herzlab().args(["seqnorm", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("seq_norm,"));
}
