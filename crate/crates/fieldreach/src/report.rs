//! Report rendering: per-line text tables in x-notation, deep-sharing
//! listings and the JSON schema.
//!
//! Text tables list the trace of the entry method. Rows are labelled by
//! source line; the k-th repeated visit of a line gets k primes (`3'`).
//! Columns are the reachability entries `(v,w)` over the shown reference
//! variables, ordered lexicographically on pairs of declaration indices,
//! followed by the cyclicity entries and the deep-sharing pairs.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::formula::FieldSpace;
use crate::lang::{Cmd, CmdKind, MethodId, Module, StmtId};
use crate::semantics::{Analysis, AnalysisResult, PointState, Scope, TraceKind, TraceRow};

/// Metadata attached to JSON reports.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportMeta {
    /// Wall-clock timings in milliseconds, by phase; omitted when empty so
    /// that reports stay byte-for-byte reproducible by default.
    pub timings_ms: BTreeMap<String, f64>,
}

/// Labels of the trace rows, with primes for repeated lines.
pub fn row_labels(trace: &[TraceRow]) -> Vec<String> {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    trace
        .iter()
        .map(|r| {
            let k = seen.entry(r.line).or_insert(0);
            let label = format!("{}{}", r.line, "'".repeat(*k));
            *k += 1;
            label
        })
        .collect()
}

/// The trace rows of the entry method with their labels.
pub fn labelled_trace(result: &AnalysisResult) -> Vec<(String, &TraceRow)> {
    row_labels(&result.trace)
        .into_iter()
        .zip(result.trace.iter())
        .collect()
}

/// Column headers of a table over `scope`.
pub fn column_headers(scope: &Scope) -> Vec<String> {
    let shown = scope.shown();
    let mut h = Vec::new();
    for &v in &shown {
        for &w in &shown {
            h.push(format!("reach({},{})", scope.names[v], scope.names[w]));
        }
    }
    for &v in &shown {
        h.push(format!("cyc({})", scope.names[v]));
    }
    h
}

/// The formula cells of one state, in column order.
pub fn row_cells(scope: &Scope, st: &PointState, space: &FieldSpace) -> Vec<String> {
    let shown = scope.shown();
    let mut cells = Vec::new();
    for &v in &shown {
        for &w in &shown {
            cells.push(space.render_compact(&st.rc.reach(v, w).canonicalize(space)));
        }
    }
    for &v in &shown {
        cells.push(space.render_compact(&st.rc.cyc(v).canonicalize(space)));
    }
    cells
}

/// Deep-sharing pairs among the shown variables, as `DS(a,b)` strings
/// with `a` declared before (or equal to) `b`.
pub fn ds_cells(scope: &Scope, st: &PointState) -> Vec<String> {
    let shown = scope.shown();
    let mut out = Vec::new();
    for (i, &a) in shown.iter().enumerate() {
        for &b in &shown[i..] {
            if st.sp.ds(a, b) {
                out.push(format!("DS({},{})", scope.names[a], scope.names[b]));
            }
        }
    }
    out
}

/// Source line reported for every command of a method: its own line,
/// except loops, which are reported at their closing line (the state
/// after the loop).
pub fn command_lines(module: &Module, method: MethodId) -> Vec<(usize, StmtId)> {
    fn walk(cmds: &[Cmd], out: &mut Vec<(usize, StmtId)>) {
        for c in cmds {
            match &c.kind {
                CmdKind::If(_, t, e) => {
                    out.push((c.line, c.id));
                    walk(t, out);
                    walk(e, out);
                }
                CmdKind::While { body, end_line, .. } => {
                    walk(body, out);
                    out.push((*end_line, c.id));
                }
                _ => out.push((c.line, c.id)),
            }
        }
    }
    let mut out = Vec::new();
    walk(&module.methods[method].body, &mut out);
    out
}

/// Per-line states of a method at the fixpoint: the post-states of the
/// commands reported on each line, joined over iterations and contexts.
/// When several commands share a line, the last one in program order
/// wins.
pub fn fixpoint_lines(module: &Module, result: &AnalysisResult, method: MethodId) -> BTreeMap<usize, PointState> {
    let mut out = BTreeMap::new();
    let mut order: Vec<(usize, StmtId)> = command_lines(module, method);
    order.sort_by_key(|&(l, id)| (l, id));
    for (line, id) in order {
        if let Some(Some(st)) = result.points.get(id) {
            out.insert(line, st.clone());
        }
    }
    out
}

/// The deep-sharing listing of the entry method at the fixpoint: one
/// `(line, pairs)` entry per source line holding a command.
pub fn ds_listing(module: &Module, result: &AnalysisResult) -> Vec<(usize, Vec<String>)> {
    let scope = result.entry_scope();
    fixpoint_lines(module, result, result.entry)
        .into_iter()
        .map(|(l, st)| (l, ds_cells(scope, &st)))
        .collect()
}

/// The text table of the entry trace.
pub fn text_table(an: &Analysis) -> String {
    let res = &an.result;
    let scope = res.entry_scope();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "method {}",
        an.module.methods[res.entry].qualified_name(&an.module.ct)
    );
    let mut header = vec!["line".to_string()];
    header.extend(column_headers(scope));
    header.push("sharing".to_string());
    let _ = writeln!(s, "{}", header.join(" | "));
    for (label, row) in labelled_trace(res) {
        let mut cells = vec![label];
        cells.extend(row_cells(scope, &row.state, &an.space));
        let ds = ds_cells(scope, &row.state);
        cells.push(if ds.is_empty() { "-".to_string() } else { ds.join(",") });
        let _ = writeln!(s, "{}", cells.join(" | "));
    }
    s
}

/// A compact text summary: the final state of the entry method plus
/// the purity of every analysed method.
pub fn text_summary(an: &Analysis) -> String {
    let res = &an.result;
    let scope = res.entry_scope();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "method {}",
        an.module.methods[res.entry].qualified_name(&an.module.ct)
    );
    let shown = scope.shown();
    for &v in &shown {
        for &w in &shown {
            let _ = writeln!(
                s,
                "reach({},{}) = {}",
                scope.names[v],
                scope.names[w],
                an.space.render(&res.exit.rc.reach(v, w).canonicalize(&an.space))
            );
        }
    }
    for &v in &shown {
        let _ = writeln!(
            s,
            "cyc({}) = {}",
            scope.names[v],
            an.space.render(&res.exit.rc.cyc(v).canonicalize(&an.space))
        );
    }
    let ds = ds_cells(scope, &res.exit);
    if !ds.is_empty() {
        let _ = writeln!(s, "sharing: {}", ds.join(","));
    }
    for (m, flags) in purity(an) {
        let _ = writeln!(s, "purity {m}: {}", flags.join(", "));
    }
    s
}

/// Purity of the inputs of every method with a memoised summary:
/// `(qualified name, ["this: pure", "p: impure", ...])`.
pub fn purity(an: &Analysis) -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    let mut methods: Vec<usize> = an.result.summaries.iter().map(|s| s.method).collect();
    methods.dedup();
    for m in methods {
        let sc = &an.result.scopes[m];
        let flags = an.result.impure_inputs(m);
        let items = sc
            .inputs
            .iter()
            .zip(flags)
            .map(|(&v, f)| format!("{}: {}", sc.names[v], if f { "impure" } else { "pure" }))
            .collect();
        out.push((an.module.methods[m].qualified_name(&an.module.ct), items));
    }
    out
}

/// Fixpoint states of every analysed method, keyed by `Method:line`.
pub fn line_points(an: &Analysis) -> BTreeMap<String, (MethodId, PointState)> {
    let mut out = BTreeMap::new();
    for m in 0..an.module.methods.len() {
        let name = an.module.methods[m].qualified_name(&an.module.ct);
        for (line, st) in fixpoint_lines(&an.module, &an.result, m) {
            out.insert(format!("{name}:{line}"), (m, st));
        }
    }
    out
}

/// The JSON report.
pub fn json_report(an: &Analysis, meta: &ReportMeta) -> Value {
    let mut points = Map::new();
    for (k, (m, st)) in line_points(an) {
        let scope = &an.result.scopes[m];
        let shown = scope.shown();
        let mut v = st.rc.to_json(&scope.names, &shown, &an.space);
        let ds: Vec<Value> = ds_pairs_json(scope, &st);
        v.as_object_mut()
            .expect("object")
            .insert("ds".into(), Value::Array(ds));
        points.insert(k, v);
    }
    let mut report = Map::new();
    report.insert("points".into(), Value::Object(points));
    report.insert("metadata".into(), metadata(an, meta));
    Value::Object(report)
}

fn ds_pairs_json(scope: &Scope, st: &PointState) -> Vec<Value> {
    let shown = scope.shown();
    let mut out = Vec::new();
    for (i, &a) in shown.iter().enumerate() {
        for &b in &shown[i..] {
            if st.sp.ds(a, b) {
                out.push(json!([scope.names[a], scope.names[b]]));
            }
        }
    }
    out
}

fn metadata(an: &Analysis, meta: &ReportMeta) -> Value {
    let res = &an.result;
    let mut iters = Map::new();
    for (&id, &n) in &res.loop_iterations {
        iters.insert(format!("line {}", an.module.stmt_line[id]), json!(n));
    }
    let mut m = Map::new();
    m.insert(
        "entry".into(),
        json!(an.module.methods[res.entry].qualified_name(&an.module.ct)),
    );
    m.insert("fields".into(), json!(an.space.names()));
    m.insert("loop_iterations".into(), Value::Object(iters));
    m.insert("widenings".into(), json!(res.widenings));
    m.insert("passes".into(), json!(res.passes));
    if !meta.timings_ms.is_empty() {
        m.insert("timings_ms".into(), json!(meta.timings_ms));
    }
    Value::Object(m)
}

/// The JSON report of a program without any method.
pub fn empty_json_report(module: &Module) -> Value {
    let _ = module;
    json!({ "points": {}, "metadata": { "entry": null, "loop_iterations": {}, "widenings": 0, "passes": 0 } })
}

/// Whether a trace row is the state after a loop.
pub fn is_loop_exit(r: &TraceRow) -> bool {
    r.kind == TraceKind::LoopExit
}
