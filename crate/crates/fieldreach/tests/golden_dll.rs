//! Golden values for the loop building a doubly-linked list.
//!
//! The expected rows are written in propositional notation and turned into
//! model sets by enumeration, independently of the analysis operators.

mod common;

use common::dll::expected;
use common::{analyse, pred, program};
use fieldreach::report::{ds_listing, labelled_trace};
use fieldreach::semantics::{run, AnalysisConfig};

#[test]
fn dll_table_matches_every_row() {
    let an = analyse(&program("dll.lang"));
    let space = &an.space;
    let scope = an.result.entry_scope();
    let (x, tmp) = (scope.var("x").unwrap(), scope.var("tmp").unwrap());
    let trace = labelled_trace(&an.result);
    for (label, cells) in expected() {
        let (_, row) = trace
            .iter()
            .find(|(l, _)| l == label)
            .unwrap_or_else(|| panic!("row {label} missing"));
        let rc = &row.state.rc;
        let got = [rc.reach(x, x), rc.reach(x, tmp), rc.reach(tmp, x), rc.reach(tmp, tmp), rc.cyc(x), rc.cyc(tmp)];
        for (i, (g, w)) in got.iter().zip(cells).enumerate() {
            let want = pred(space, w);
            assert!(
                g.equiv(&want, space),
                "row {label} column {i}: got {}, want {}",
                space.render(&g.canonicalize(space)),
                space.render(&want)
            );
        }
    }
}

#[test]
fn dll_loop_stabilises_after_two_iterations() {
    let an = analyse(&program("dll.lang"));
    assert_eq!(an.result.loop_iterations.values().copied().collect::<Vec<_>>(), vec![2]);
    assert_eq!(an.result.widenings, 0);
}

#[test]
fn dll_cycle_queries() {
    let an = analyse(&program("dll.lang"));
    let s = &an.space;
    let q = |fs: &[&str]| an.result.query_cycle(s, "x", s.mask_of(fs).unwrap()).unwrap();
    assert!(!q(&["n"]));
    assert!(!q(&["p"]));
    assert!(q(&["n", "p"]));
    assert!(q(&[]));
}

#[test]
fn dll_deep_sharing_listing() {
    let an = analyse(&program("dll.lang"));
    let all = vec!["DS(x,x)".to_string(), "DS(x,tmp)".into(), "DS(tmp,tmp)".into()];
    let want: Vec<(usize, Vec<String>)> = vec![
        (1, vec![]),
        (2, vec![]),
        (4, vec!["DS(tmp,tmp)".into()]),
        (5, all.clone()),
        (6, all.clone()),
        (7, all.clone()),
        (8, all.clone()),
        (9, all),
    ];
    assert_eq!(ds_listing(&an.module, &an.result), want);
}

#[test]
fn dll_result_does_not_depend_on_widening() {
    let base = analyse(&program("dll.lang"));
    for widen in [None, Some(2), Some(100)] {
        let cfg = AnalysisConfig {
            widen,
            ..AnalysisConfig::default()
        };
        let an = run(&program("dll.lang"), &cfg).unwrap();
        assert!(an.result.exit.rc.equiv(&base.result.exit.rc, &base.space));
    }
}
