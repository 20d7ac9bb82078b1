use std::path::Path;
use std::process::Command as Process;

use mvsheaf_cli::parse::parse;
use mvsheaf_cli::report::{sha256_hex, Input, Verdict};
use mvsheaf_cli::run::{run, Command, Flags};
use serde_json::Value;

const DOC: &str = "\
K3 = gamma(unit=(2,0), ranks=[1])
B = product(chain(1), chain(3))
E = cofinite(K3, parity)
";

fn report(command: Command, name: &str) -> (Verdict, Value, String) {
    let doc = parse(DOC).unwrap();
    let def = doc.get(name).unwrap();
    let input = Input {
        sha256: sha256_hex(DOC.as_bytes()),
        algebra: name.into(),
        expression: def.algebra.to_string(),
    };
    let r = run(command, &def.algebra, input, &Flags::default());
    let json = r.to_json();
    (r.verdict, serde_json::from_str(&json).unwrap(), json)
}

#[test]
fn spectrum_of_a_boolean_product() {
    let (verdict, v, _) = report(Command::Spectrum, "B");
    assert_eq!(verdict, Verdict::Pass);
    assert_eq!(v["details"]["spectrum"]["max_count"], 2);
    assert_eq!(v["details"]["spectrum"]["radical_is_zero"], true);
    assert_eq!(v["schema"], "mvsheaf-report/1");
}

#[test]
fn verify_all_on_k3() {
    let (verdict, v, _) = report(Command::VerifyAll, "K3");
    assert_eq!(verdict, Verdict::Pass, "{v}");
    assert!(v["checks"].as_array().unwrap().len() > 20);
    assert_eq!(v["errors"].as_array().unwrap().len(), 0);
}

#[test]
fn cofinite_parity_is_locally_but_not_radically_retractive() {
    let (verdict, v, _) = report(Command::Represent, "E");
    assert_eq!(verdict, Verdict::Pass, "{v}");
    assert_eq!(v["details"]["locally_retractive"], true);
    assert_eq!(v["details"]["radical_retractive"], false);
    assert_eq!(v["details"]["embedding"]["surjective"], false);
}

#[test]
fn reports_are_byte_stable() {
    for command in [Command::Topology, Command::SheafCheck, Command::Represent] {
        assert_eq!(report(command, "K3").2, report(command, "K3").2);
    }
}

fn mvsheaf(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_mvsheaf"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn binary_exit_codes_and_output() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("doc.mvalg"), DOC).unwrap();
    std::fs::write(dir.path().join("bad.mvalg"), "A = chain(0)\n").unwrap();

    let (code, stdout, _) = mvsheaf(dir.path(), &["spectrum", "doc.mvalg", "--algebra", "B"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["input"]["sha256"], sha256_hex(DOC.as_bytes()));
    assert_eq!(v["input"]["algebra"], "B");

    let (code, stdout, _) = mvsheaf(dir.path(), &["topology", "doc.mvalg", "--out", "r.json"]);
    assert_eq!((code, stdout.as_str()), (0, ""));
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(written["input"]["algebra"], "E");

    let (code, _, stderr) = mvsheaf(dir.path(), &["spectrum", "bad.mvalg"]);
    assert_eq!(code, 3);
    assert!(
        stderr.contains("line 1, column 11: chain rank must be positive"),
        "{stderr}"
    );
    assert_eq!(
        mvsheaf(dir.path(), &["spectrum", "doc.mvalg", "--algebra", "Z"]).0,
        3
    );
    assert_eq!(mvsheaf(dir.path(), &["spectrum", "missing.mvalg"]).0, 3);
    assert_eq!(mvsheaf(dir.path(), &["frobnicate"]).0, 3);
}
