use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use secrecy_core::{fixture_library, DerivationDocument, Formula, Justification, ModelDocument};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run<P: AsRef<std::ffi::OsStr>>(args: &[P]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secrecy"))
        .args(args)
        .output()
        .unwrap()
}

fn run_on(cmd: &str, file: &Path, rest: &[&str]) -> Output {
    let mut args = vec![cmd.to_owned(), file.to_string_lossy().into_owned()];
    args.extend(rest.iter().map(|s| s.to_string()));
    run(&args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn running_doc() -> ModelDocument {
    ModelDocument::from_json(&fs::read_to_string(fixture("running.json")).unwrap()).unwrap()
}

#[test]
fn validate_reports() {
    let out = run_on("validate", &fixture("running.json"), &[]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "valid"));

    let dir = TempDir::new().unwrap();
    let mut doc = running_doc();
    let facets: Vec<String> = doc.facets.iter().map(|f| f.join("+")).collect();
    doc.neighborhoods.insert("u0".into(), vec![facets]);
    let bad = write(&dir, "all.json", &doc.to_canonical_json());
    let out = run_on("validate", &bad, &[]);
    assert_eq!(code(&out), 1);
    assert!(
        stdout(&out).contains("SN violation: vertex u0"),
        "{}",
        stdout(&out)
    );

    let text = fs::read_to_string(fixture("running.json")).unwrap();
    let truncated = write(&dir, "truncated.json", &text[..text.len() / 2]);
    assert_eq!(code(&run_on("validate", &truncated, &[])), 2);

    let mut impure = running_doc();
    impure.facets.push(vec!["u0".into()]);
    let impure = write(&dir, "impure.json", &impure.to_canonical_json());
    let out = run_on("validate", &impure, &[]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("invalid:"), "{}", stdout(&out));
}

#[test]
fn check_and_truthset() {
    let out = run_on("check", &fixture("running.json"), &["u0+w1", "S{a} p"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "true"));
    let out = run_on(
        "check",
        &fixture("nonnormal1.json"),
        &["u0+w1", "S{a} S{a} p"],
    );
    assert_eq!((code(&out), stdout(&out).trim()), (1, "false"));
    assert_eq!(
        code(&run_on(
            "check",
            &fixture("running.json"),
            &["u0+w1", "K{c} p"]
        )),
        2
    );
    assert_eq!(
        code(&run_on("check", &fixture("running.json"), &["u9+w1", "p"])),
        2
    );
    assert_eq!(
        code(&run_on(
            "check",
            &fixture("running.json"),
            &["u0+w1", "p &"]
        )),
        2
    );

    let out = run_on("truthset", &fixture("running.json"), &["p"]);
    assert_eq!(
        (code(&out), stdout(&out).trim()),
        (0, "u0+w1 u0+w2 u0+w3 u1+w1")
    );
    let out = run_on("truthset", &fixture("running.json"), &["#f"]);
    assert_eq!(stdout(&out).trim(), "");
}

#[test]
fn normalize_is_canonical_and_idempotent() {
    let dir = TempDir::new().unwrap();
    let once = dir.path().join("once.json");
    let out = run(&[
        "normalize".as_ref(),
        fixture("nonnormal2.json").as_os_str(),
        "--out".as_ref(),
        once.as_os_str(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&once).unwrap();
    assert_eq!(
        ModelDocument::from_json(&text).unwrap().to_canonical_json(),
        text
    );
    let twice = run_on("normalize", &once, &[]);
    assert_eq!(stdout(&twice), text);
}

#[test]
fn sn_check_lists_witnesses() {
    let out = run_on("sn-check", &fixture("running.json"), &["--witnesses"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("witness:"))
            .count(),
        3
    );

    let dir = TempDir::new().unwrap();
    let mut doc = running_doc();
    let all: Vec<String> = doc.facets.iter().map(|f| f.join("+")).collect();
    doc.neighborhoods.insert("w1".into(), vec![all]);
    let bad = write(&dir, "bad.json", &doc.to_canonical_json());
    let out = run_on("sn-check", &bad, &[]);
    assert_eq!(code(&out), 1);
    assert!(
        stdout(&out)
            .lines()
            .all(|l| l.starts_with("SN violation: vertex w1")),
        "{}",
        stdout(&out)
    );
}

#[test]
fn share_checks_every_aux_fixture() {
    for name in [
        "aux-twins",
        "aux-grid",
        "aux-three-agents",
        "aux-empty-event",
        "aux-shared-star",
    ] {
        let dir = TempDir::new().unwrap();
        let out_file = dir.path().join("share.json");
        let out = run(&[
            "share".as_ref(),
            fixture(&format!("{name}.json")).as_os_str(),
            "--pool".as_ref(),
            fixture("pools/share.txt").as_os_str(),
            "--out".as_ref(),
            out_file.as_os_str(),
        ]);
        assert_eq!(
            code(&out),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(
            stdout(&out).contains(", 0 disagreements"),
            "{name}: {}",
            stdout(&out)
        );
        let doc = ModelDocument::from_json(&fs::read_to_string(&out_file).unwrap()).unwrap();
        assert!(doc.to_model().is_ok());
    }
}

#[test]
fn share_on_plain_models_and_bad_moduli() {
    let out = run_on("share", &fixture("running.json"), &["--modulus", "10"]);
    assert_eq!(code(&out), 0);
    let doc = ModelDocument::from_json(&stdout(&out)).unwrap();
    assert_eq!(doc.facets.len(), 9 * 10);
    assert_eq!(
        code(&run_on(
            "share",
            &fixture("aux-grid.json"),
            &["--modulus", "3"]
        )),
        2
    );
}

#[test]
fn prove_every_fixture_and_reject_mutants() {
    for d in fixture_library() {
        let out = run_on("prove", &fixture(&format!("proofs/{}.json", d.name)), &[]);
        assert_eq!(code(&out), 0, "{}", d.name);
        assert!(stdout(&out).starts_with("ok: "));
    }
    let out = run_on("prove", &fixture("proofs/no-secret-top.json"), &[]);
    assert_eq!(stdout(&out).trim(), "ok: no-secret-top proves ~S{a} #t");

    let dir = TempDir::new().unwrap();
    let mut d = fixture_library()
        .into_iter()
        .find(|d| d.name == "secret-implies-truth")
        .unwrap();
    let i = d
        .steps
        .iter()
        .position(|s| matches!(s.by, Justification::Mp(..)))
        .unwrap();
    d.steps[i].formula = Formula::Top;
    let bad = write(
        &dir,
        "bad.json",
        &DerivationDocument::from_derivation(&d).to_json(),
    );
    let out = run_on("prove", &bad, &[]);
    assert_eq!(code(&out), 1);
    assert!(
        stdout(&out).contains(&format!("step {i}: BadMP")),
        "{}",
        stdout(&out)
    );

    let garbled = write(
        &dir,
        "garbled.json",
        r#"{"name": "x", "steps": [{"formula": "p &", "by": "A1"}]}"#,
    );
    assert_eq!(code(&run_on("prove", &garbled, &[])), 2);
    let unknown = write(
        &dir,
        "unknown.json",
        r#"{"name": "x", "steps": [{"formula": "p", "by": "A9"}]}"#,
    );
    assert_eq!(code(&run_on("prove", &unknown, &[])), 2);
}

#[test]
fn search_verdicts_and_limits() {
    let out = run(&["search", "S{a} p -> S{a} S{a} p"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let (first, doc) = text.split_once('\n').unwrap();
    assert!(first.starts_with("countermodel at facet "));
    assert!(ModelDocument::from_json(doc).unwrap().to_model().is_ok());

    let out = run(&["search", "S{a} p -> p"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("valid up to bound"));

    let out = run(&[
        "search", "p", "--agents", "4", "--states", "4", "--cap", "1000",
    ]);
    assert_eq!(code(&out), 3);
    assert_eq!(code(&run(&["search", "S{a} p ->"])), 2);
    assert_eq!(code(&run(&["search", "K{c} p"])), 2);

    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "bounds.toml",
        "agents = 2\nlocal_states_per_agent = 3\natoms = [\"p\"]\n",
    );
    let out = run(&[
        "search".as_ref(),
        "S{a} p -> S{a} S{a} p".as_ref(),
        "--config".as_ref(),
        config.as_os_str(),
    ]);
    assert_eq!(code(&out), 1);
    let tight = write(&dir, "tight.toml", "cap = 10\n");
    let out = run(&[
        "search".as_ref(),
        "p".as_ref(),
        "--config".as_ref(),
        tight.as_os_str(),
    ]);
    assert_eq!(code(&out), 3);
    let typo = write(&dir, "typo.toml", "agent = 2\n");
    let out = run(&[
        "search".as_ref(),
        "p".as_ref(),
        "--config".as_ref(),
        typo.as_os_str(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn search_samples_random_models_from_a_seed() {
    let args = [
        "search",
        "S{a} p -> S{a} S{a} p",
        "--samples",
        "200",
        "--seed",
        "5",
    ];
    let first = run(&args);
    assert_eq!(code(&first), 1);
    assert!(stdout(&first).starts_with("seed "));
    assert_eq!(stdout(&first), stdout(&run(&args)));
    let out = run(&["search", "S{a} p -> K{a} p", "--samples", "50"]);
    assert_eq!(
        (code(&out), stdout(&out).trim()),
        (0, "valid on 50 sampled models")
    );
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["validate", "/nonexistent/model.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}
