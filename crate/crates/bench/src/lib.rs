//! Shared inputs for the benchmarks.

use std::path::PathBuf;

use secrecy_core::{parse, Formula, ModelDocument, SecrecyModel};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_model(name: &str) -> SecrecyModel {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    ModelDocument::from_json(&text)
        .and_then(|d| d.to_model())
        .expect("fixture is a valid model")
}

/// A formula pool file, one formula per line; `//` starts a comment line.
pub fn load_pool(name: &str) -> Vec<Formula> {
    std::fs::read_to_string(fixture_path(name))
        .expect("pool readable")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("//"))
        .map(|l| parse(l).expect("pool formula parses"))
        .collect()
}
