//! Soundness corpus: every closed program is executed concretely and the
//! exact abstraction of each reached state is compared with the analysis
//! result at the same program point.

use std::fs;
use std::path::PathBuf;

use fieldreach::oracle::{check_soundness, run_concrete, DEFAULT_STEP_BUDGET};
use fieldreach::semantics::{run, AnalysisConfig};

fn corpus() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "lang"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect()
}

fn check(cfg: &AnalysisConfig) {
    let progs = corpus();
    assert!(progs.len() >= 20, "corpus too small");
    let mut failures = Vec::new();
    for (name, src) in &progs {
        let an = run(src, cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        let conc = run_concrete(&an.module, an.result.entry, DEFAULT_STEP_BUDGET)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let rep = check_soundness(&an.module, &an.space, &an.result, &conc);
        assert!(rep.states_checked > 0, "{name}: nothing checked");
        for v in rep.violations {
            failures.push(format!("{name}: {v:?}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn corpus_is_sound() {
    check(&AnalysisConfig::default());
}

#[test]
fn corpus_is_sound_with_aggressive_widening() {
    check(&AnalysisConfig {
        widen: Some(1),
        ..AnalysisConfig::default()
    });
}

#[test]
fn corpus_is_sound_without_widening() {
    check(&AnalysisConfig {
        widen: None,
        ..AnalysisConfig::default()
    });
}
