//! Shared helpers for the integration tests: program loading and an
//! independent way of writing expected formulae as Boolean predicates.

#![allow(dead_code)]

pub mod dll;
pub mod laws;
pub mod tree;
pub mod viability;

use fieldreach::formula::{submasks, FieldSpace, PathFormula};
use fieldreach::semantics::{run, Analysis, AnalysisConfig};

/// Reads a file of the repository's `programs/` directory.
pub fn program(name: &str) -> String {
    let path = format!("{}/../../programs/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {path}: {e}"))
}

/// Analyses a program with the default configuration.
pub fn analyse(src: &str) -> Analysis {
    run(src, &AnalysisConfig::default()).expect("analysis succeeds")
}

/// The formula whose models are the assignments satisfying `pred`, where
/// `pred` is asked whether a named proposition is true. This builds the
/// expected values directly from propositional notation, independently
/// of the operators under test.
pub fn pred(space: &FieldSpace, p: impl Fn(&dyn Fn(&str) -> bool) -> bool) -> PathFormula {
    let models = submasks(space.universe()).filter(|&m| {
        let has = |name: &str| {
            let b = space.bit(name).unwrap_or_else(|| panic!("unknown proposition {name}"));
            m & b != 0
        };
        p(&has)
    });
    PathFormula::models(space, models)
}

/// The formula with exactly the listed models.
pub fn models(space: &FieldSpace, ms: &[&[&str]]) -> PathFormula {
    let lists: Vec<Vec<&str>> = ms.iter().map(|m| m.to_vec()).collect();
    space.from_name_lists(&lists).expect("known fields")
}
