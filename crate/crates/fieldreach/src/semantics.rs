//! The abstract semantics: transfer functions for expressions, method
//! calls and commands, loop fixpoints with widening, and the global
//! fixpoint over method denotations.
//!
//! Every method is analysed in a [`Scope`] made of its own variables
//! (`this`, formal parameters, locals and `out`), one *shallow copy* of
//! every formal parameter holding its entry value, and the special
//! variable `ρ` holding the value of the expression being evaluated.
//!
//! The analysis state at a program point is the product of an
//! [`RcValue`] (reachability and cyclicity) and an [`SpValue`]
//! (sharing, deep-sharing and purity). Method denotations are computed on
//! demand and memoised per calling context (method, entry value); global
//! passes are repeated until no memoised denotation changes.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::domain::RcValue;
use crate::formula::{FieldSpace, FormulaError, Mask, PathFormula};
use crate::lang::{
    CallSite, Cmd, CmdKind, Ex, InitAnnotation, LangError, Method, MethodId, Module, StmtId, Ty,
    OUT, THIS,
};
use crate::sharing::{self, SpValue};

/// Default number of updates of one entry tolerated before widening it to
/// `TRUE`.
pub const DEFAULT_WIDEN: usize = 16;

/// Errors raised while setting up or running the analysis.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("unknown entry method `{0}`")]
    UnknownEntry(String),
    #[error("annotation at line {line}: {msg}")]
    Annotation { line: usize, msg: String },
    #[error("no fixpoint after {0} global passes")]
    NoFixpoint(usize),
}

/// Analysis parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisConfig {
    /// Entry method (`main`, `Class.method` or a unique method name);
    /// `None` selects `main`, or the last declared method if there is no
    /// `main` block.
    pub entry: Option<String>,
    /// Fields tracked explicitly; `None` tracks every reference field.
    pub tracked: Option<Vec<String>>,
    /// Widening threshold; `None` disables widening.
    pub widen: Option<usize>,
    /// Upper bound on global passes.
    pub max_passes: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            entry: None,
            tracked: None,
            widen: Some(DEFAULT_WIDEN),
            max_passes: 200,
        }
    }
}

/// Variable layout of a method analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scope {
    pub method: MethodId,
    /// Names of all variables (shallow copies are named `name@entry`, the
    /// result variable `ρ`).
    pub names: Vec<String>,
    pub tys: Vec<Ty>,
    /// Number of method variables (they come first, with their ids).
    pub n_method: usize,
    /// Shallow copy of each formal parameter, in parameter order.
    pub shallow: Vec<usize>,
    /// The expression result variable.
    pub rho: usize,
    /// Method inputs (`this` first, then the formals).
    pub inputs: Vec<usize>,
    /// For each input, the variable holding its entry value: `this`
    /// itself (it cannot be assigned) or the shallow copy of the formal.
    pub handles: Vec<usize>,
    /// `[this?, formals…, out?]`.
    pub interface: Vec<usize>,
    pub this: Option<usize>,
    pub out: Option<usize>,
}

impl Scope {
    /// Builds the scope of a method.
    pub fn new(m: &Method) -> Self {
        let mut names: Vec<String> = m.vars.iter().map(|v| v.name.clone()).collect();
        let mut tys: Vec<Ty> = m.vars.iter().map(|v| v.ty).collect();
        let n_method = names.len();
        let mut shallow = Vec::new();
        for &p in &m.params {
            shallow.push(names.len());
            names.push(format!("{}@entry", m.vars[p].name));
            tys.push(m.vars[p].ty);
        }
        let rho = names.len();
        names.push("ρ".to_string());
        // ρ may hold any value; give it a reference type so it is tracked.
        tys.push(Ty::Ref(0));
        let inputs = m.inputs();
        let mut handles = Vec::new();
        if let Some(t) = m.this {
            handles.push(t);
        }
        handles.extend(shallow.iter().copied());
        Scope {
            method: m.id,
            names,
            tys,
            n_method,
            shallow,
            rho,
            inputs,
            handles,
            interface: m.interface(),
            this: m.this,
            out: m.out,
        }
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True if the scope has no variables (never the case: `ρ` exists).
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Whether variable `v` has a reference type (`ρ` counts as one).
    pub fn is_ref(&self, v: usize) -> bool {
        v == self.rho || self.tys[v].is_ref()
    }

    /// Index of a variable by name.
    pub fn var(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Reference variables other than `ρ`.
    pub fn refs(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| v != self.rho && self.is_ref(v))
            .collect()
    }

    /// Variables shown in reports: reference-typed method variables other
    /// than `this` and `out`.
    pub fn shown(&self) -> Vec<usize> {
        (0..self.n_method)
            .filter(|&v| self.tys[v].is_ref() && Some(v) != self.this && Some(v) != self.out)
            .collect()
    }
}

/// The analysis state at a program point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointState {
    pub rc: RcValue,
    pub sp: SpValue,
}

impl PointState {
    /// Bottom over a scope.
    pub fn bottom(scope: &Scope, space: &FieldSpace) -> Self {
        PointState {
            rc: RcValue::bottom(scope.len(), space),
            sp: SpValue::bottom(scope.len(), scope.inputs.len()),
        }
    }

    /// Pointwise join.
    pub fn join(&self, o: &PointState) -> Self {
        PointState {
            rc: self.rc.join(&o.rc),
            sp: self.sp.join(&o.sp),
        }
    }

    /// Ordering (reachability up to viability, sharing by inclusion).
    pub fn leq(&self, o: &PointState, space: &FieldSpace) -> bool {
        self.rc.leq(&o.rc, space) && self.sp.leq(&o.sp)
    }

    fn project(&self, vs: &[usize]) -> Self {
        PointState {
            rc: self.rc.project(vs),
            sp: self.sp.project(vs),
        }
    }
}

/// Kind of a trace row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// The entry state of the analysed method.
    Entry,
    /// The state after a command.
    Command,
    /// The state at a loop head before one evaluation of the body.
    LoopHead,
    /// The state after a loop.
    LoopExit,
}

/// One row of the execution trace of the entry method. Consecutive
/// records on the same source line are merged, keeping the last state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub line: usize,
    pub kind: TraceKind,
    pub state: PointState,
}

/// A memoised method denotation for one calling context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodSummary {
    pub method: MethodId,
    /// Entry value over the method inputs.
    pub entry: PointState,
    /// Exit value over `[this?, formals…, out]`; the formals stand for
    /// their entry values, purity flags are in `exit.sp`.
    pub exit: PointState,
}

/// The result of an analysis run.
#[derive(Clone, Debug)]
pub struct AnalysisResult {
    pub entry: MethodId,
    pub scopes: Vec<Scope>,
    /// Post-state of every command, joined over contexts and iterations.
    pub points: Vec<Option<PointState>>,
    /// Trace of the entry method.
    pub trace: Vec<TraceRow>,
    /// State at the end of the entry method body.
    pub exit: PointState,
    /// Memoised denotations, sorted by method.
    pub summaries: Vec<MethodSummary>,
    /// Number of body evaluations of each loop (maximum over its
    /// executions in the final pass).
    pub loop_iterations: BTreeMap<StmtId, usize>,
    /// Number of entries widened to `TRUE`.
    pub widenings: usize,
    /// Number of global passes.
    pub passes: usize,
}

impl AnalysisResult {
    /// Scope of the entry method.
    pub fn entry_scope(&self) -> &Scope {
        &self.scopes[self.entry]
    }

    /// Whether a cycle traversing exactly the fields of `mask` may be
    /// reachable from `var` at the end of the entry method.
    pub fn query_cycle(&self, space: &FieldSpace, var: &str, mask: Mask) -> Option<bool> {
        let v = self.entry_scope().var(var)?;
        Some(query_cycle_in(&self.exit.rc, space, v, mask))
    }

    /// Like [`AnalysisResult::query_cycle`] after a given command.
    pub fn query_cycle_at(&self, space: &FieldSpace, stmt: StmtId, var: &str, mask: Mask) -> Option<bool> {
        let st = self.points.get(stmt)?.as_ref()?;
        let m = self.scopes.iter().find(|s| s.var(var).is_some() && st.rc.len() == s.len())?;
        Some(query_cycle_in(&st.rc, space, m.var(var)?, mask))
    }

    /// Impure inputs of each method, joined over all analysed contexts.
    pub fn impure_inputs(&self, method: MethodId) -> Vec<bool> {
        let k = self.scopes[method].inputs.len();
        let mut out = vec![false; k];
        for s in self.summaries.iter().filter(|s| s.method == method) {
            for (i, f) in s.exit.sp.impure_flags().iter().enumerate() {
                out[i] |= *f;
            }
        }
        out
    }
}

/// `mask` is a viable model of `cyc(v)`.
pub fn query_cycle_in(rc: &RcValue, space: &FieldSpace, v: usize, mask: Mask) -> bool {
    rc.cyc(v).contains(mask) && space.is_viable(mask)
}

/// Builds the entry state of a method from `init` annotations: listed
/// reachability/cyclicity entries and deep-sharing pairs; `SH` is derived
/// (`SH(v, w)` iff either reaches the other or they deep-share, and
/// `SH(v, v)` iff `reach(v, v)` is satisfiable).
pub fn initial_state(
    module: &Module,
    method: MethodId,
    space: &FieldSpace,
    annots: &[InitAnnotation],
) -> Result<PointState, AnalysisError> {
    let scope = Scope::new(&module.methods[method]);
    let mut st = PointState::bottom(&scope, space);
    let lookup = |line: usize, name: &str| -> Result<usize, AnalysisError> {
        match scope.var(name) {
            Some(v) if v < scope.n_method && scope.is_ref(v) => Ok(v),
            Some(_) => Err(AnalysisError::Annotation {
                line,
                msg: format!("variable `{name}` is not of reference type"),
            }),
            None => Err(AnalysisError::Annotation {
                line,
                msg: format!("unknown variable `{name}`"),
            }),
        }
    };
    let formula = |line: usize, spec| {
        space
            .from_spec(spec)
            .map_err(|e| AnalysisError::Annotation {
                line,
                msg: e.to_string(),
            })
    };
    for a in annots {
        match a {
            InitAnnotation::Reach {
                line,
                from,
                to,
                models,
            } => {
                let (v, w) = (lookup(*line, from)?, lookup(*line, to)?);
                let f = formula(*line, models)?;
                let cur = st.rc.reach(v, w).join(&f);
                st.rc.set_reach(v, w, cur);
            }
            InitAnnotation::Cyc { line, var, models } => {
                let v = lookup(*line, var)?;
                let f = formula(*line, models)?;
                let cur = st.rc.cyc(v).join(&f);
                st.rc.set_cyc(v, cur);
            }
            InitAnnotation::Ds { line, a, b } => {
                let (v, w) = (lookup(*line, a)?, lookup(*line, b)?);
                st.sp.add_ds(v, w);
            }
        }
    }
    st.rc = st.rc.normalize();
    for v in scope.refs() {
        for w in scope.refs() {
            if st.rc.reach(v, w).is_satisfiable(space)
                || st.rc.reach(w, v).is_satisfiable(space)
                || st.sp.ds(v, w)
            {
                st.sp.add_sh(v, w);
            }
        }
    }
    Ok(st)
}

/// A parsed program with its field universe, ready for analysis.
#[derive(Debug)]
pub struct Analysis {
    pub module: Module,
    pub space: FieldSpace,
    pub result: AnalysisResult,
}

/// Parses, checks and analyses a program.
pub fn run(src: &str, cfg: &AnalysisConfig) -> Result<Analysis, AnalysisError> {
    let module = Module::from_source(src)?;
    let space = FieldSpace::from_class_table(&module.ct, cfg.tracked.as_deref())?;
    let entry = select_entry(&module, cfg.entry.as_deref())?;
    let annots = crate::lang::parse_init_annotations(&module.program.annotations)?;
    let init = initial_state(&module, entry, &space, &annots)?;
    let result = analyze(&module, entry, &space, &init, cfg)?;
    Ok(Analysis {
        module,
        space,
        result,
    })
}

/// Resolves the entry method: the named one, else `main`, else the last
/// declared method.
pub fn select_entry(module: &Module, name: Option<&str>) -> Result<MethodId, AnalysisError> {
    match name {
        Some(n) => module
            .find_method(n)
            .ok_or_else(|| AnalysisError::UnknownEntry(n.to_string())),
        None => module
            .main
            .or_else(|| module.methods.len().checked_sub(1))
            .ok_or_else(|| AnalysisError::UnknownEntry("main".to_string())),
    }
}

/// Analyses `entry` from the given initial state (over its scope).
pub fn analyze(
    module: &Module,
    entry: MethodId,
    space: &FieldSpace,
    init: &PointState,
    cfg: &AnalysisConfig,
) -> Result<AnalysisResult, AnalysisError> {
    let scopes: Vec<Scope> = module.methods.iter().map(Scope::new).collect();
    let mut an = Analyzer {
        module,
        space,
        widen: cfg.widen,
        scopes,
        table: HashMap::new(),
        visited: HashSet::new(),
        points: Vec::new(),
        trace: Vec::new(),
        loop_iters: BTreeMap::new(),
        widenings: 0,
        changed: false,
    };
    let mut passes = 0;
    loop {
        passes += 1;
        an.visited.clear();
        an.points = vec![None; module.stmt_count()];
        an.trace.clear();
        an.loop_iters.clear();
        an.changed = false;
        let exit = an.run_entry(entry, init);
        if !an.changed {
            let mut summaries: Vec<MethodSummary> = an
                .table
                .iter()
                .map(|(k, e)| MethodSummary {
                    method: k.method,
                    entry: k.entry.clone(),
                    exit: e.value.clone(),
                })
                .collect();
            summaries.sort_by_key(|s| s.method);
            return Ok(AnalysisResult {
                entry,
                scopes: an.scopes,
                points: an.points,
                trace: an.trace,
                exit,
                summaries,
                loop_iterations: an.loop_iters,
                widenings: an.widenings,
                passes,
            });
        }
        if passes >= cfg.max_passes {
            return Err(AnalysisError::NoFixpoint(passes));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    method: MethodId,
    entry: PointState,
}

struct TableEntry {
    value: PointState,
    counters: Vec<usize>,
}

struct Analyzer<'a> {
    module: &'a Module,
    space: &'a FieldSpace,
    widen: Option<usize>,
    scopes: Vec<Scope>,
    table: HashMap<Key, TableEntry>,
    visited: HashSet<Key>,
    points: Vec<Option<PointState>>,
    trace: Vec<TraceRow>,
    loop_iters: BTreeMap<StmtId, usize>,
    widenings: usize,
    changed: bool,
}

/// Joins `new` into `old` entry by entry; an entry that grows more than
/// `k` times is set to `TRUE`. Returns the joined value, whether anything
/// grew and how many entries were widened.
pub fn join_widen(
    old: &RcValue,
    new: &RcValue,
    counters: &mut [usize],
    k: Option<usize>,
    space: &FieldSpace,
) -> (RcValue, bool, usize) {
    let n = old.len();
    let mut r = old.clone();
    let mut grew = false;
    let mut widened = 0;
    let mut step = |cur: &PathFormula, nf: &PathFormula, c: &mut usize| -> Option<PathFormula> {
        if nf.leq(cur, space) {
            return None;
        }
        grew = true;
        *c += 1;
        if matches!(k, Some(k) if *c > k) && !cur.is_true() {
            widened += 1;
            return Some(cur.true_like());
        }
        Some(cur.join(nf))
    };
    for v in 0..n {
        for w in 0..n {
            if let Some(f) = step(old.reach(v, w), new.reach(v, w), &mut counters[v * n + w]) {
                r.set_reach(v, w, f);
            }
        }
        if let Some(f) = step(old.cyc(v), new.cyc(v), &mut counters[n * n + v]) {
            r.set_cyc(v, f);
        }
    }
    (r.normalize(), grew, widened)
}

impl<'a> Analyzer<'a> {
    fn fls(&self) -> PathFormula {
        self.space.falsity()
    }

    fn record(&mut self, id: StmtId, st: &PointState) {
        let slot = &mut self.points[id];
        *slot = Some(match slot.take() {
            Some(old) => old.join(st),
            None => st.clone(),
        });
    }

    fn push_trace(&mut self, tracing: bool, line: usize, kind: TraceKind, st: &PointState) {
        if !tracing {
            return;
        }
        if let Some(last) = self.trace.last_mut() {
            if last.line == line {
                last.kind = kind;
                last.state = st.clone();
                return;
            }
        }
        self.trace.push(TraceRow {
            line,
            kind,
            state: st.clone(),
        });
    }

    /// Analyses the entry method from a state over its full scope.
    fn run_entry(&mut self, entry: MethodId, init: &PointState) -> PointState {
        let scope = self.scopes[entry].clone();
        let m = &self.module.methods[entry];
        let mut st = init.clone();
        if m.owner.is_some() {
            self.push_trace(true, m.line, TraceKind::Entry, &st);
        }
        for (i, &p) in m.params.iter().enumerate() {
            st.rc = st.rc.copy(p, scope.shallow[i]);
            st.sp = st.sp.copy(p, scope.shallow[i]);
        }
        let body = m.body.clone();
        self.exec_block(&scope, &body, st, true)
    }

    /// Denotation of `method` for an entry value over its inputs.
    fn summary(&mut self, method: MethodId, entry: PointState) -> PointState {
        let key = Key { method, entry };
        if self.visited.contains(&key) {
            return match self.table.get(&key) {
                Some(e) => e.value.clone(),
                None => self.bottom_exit(method),
            };
        }
        self.visited.insert(key.clone());
        let res = self.analyze_body(method, &key.entry);
        let n = res.rc.len();
        let bottom = self.bottom_exit(method);
        let entry = self.table.entry(key).or_insert_with(|| TableEntry {
            value: bottom,
            counters: vec![0; n * n + n],
        });
        let (rc, grew, widened) = join_widen(&entry.value.rc, &res.rc, &mut entry.counters, self.widen, self.space);
        let sp = entry.value.sp.join(&res.sp);
        let sp_grew = sp != entry.value.sp;
        if grew || sp_grew {
            self.changed = true;
            entry.value = PointState { rc, sp };
        }
        self.widenings += widened;
        entry.value.clone()
    }

    fn bottom_exit(&self, method: MethodId) -> PointState {
        let sc = &self.scopes[method];
        PointState {
            rc: RcValue::bottom(sc.interface.len(), self.space),
            sp: SpValue::bottom(sc.interface.len(), sc.inputs.len()),
        }
    }

    /// Runs a method body from an entry value over its inputs and returns
    /// the exit value over its interface.
    fn analyze_body(&mut self, method: MethodId, entry: &PointState) -> PointState {
        let scope = self.scopes[method].clone();
        let n = scope.len();
        let mut map = vec![None; scope.inputs.len()];
        for (i, &v) in scope.inputs.iter().enumerate() {
            map[i] = Some(v);
        }
        let mut st = PointState {
            rc: entry.rc.embed(&map, n, self.space),
            sp: entry.sp.embed(&map, n, scope.inputs.len()),
        };
        let m = &self.module.methods[method];
        for (i, &p) in m.params.iter().enumerate() {
            st.rc = st.rc.copy(p, scope.shallow[i]);
            st.sp = st.sp.copy(p, scope.shallow[i]);
        }
        let body = m.body.clone();
        let params = m.params.clone();
        let st = self.exec_block(&scope, &body, st, false);
        // Keep the entry values of the formals, `this` and `out`.
        let keep: Vec<usize> = scope
            .shallow
            .iter()
            .copied()
            .chain(scope.this)
            .chain(scope.out)
            .collect();
        let drop: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();
        let mut ex = st.project(&drop);
        for (i, &p) in params.iter().enumerate() {
            ex.rc = ex.rc.rename(scope.shallow[i], p);
            ex.sp = ex.sp.rename(scope.shallow[i], p);
        }
        let imap: Vec<Option<usize>> = scope.interface.iter().map(|&v| Some(v)).collect();
        PointState {
            rc: ex.rc.restrict(&imap, self.space),
            sp: ex.sp.restrict(&imap, scope.inputs.len()).with_impure(ex.sp.impure_flags().to_vec()),
        }
    }

    fn exec_block(&mut self, scope: &Scope, cmds: &[Cmd], mut st: PointState, tracing: bool) -> PointState {
        for c in cmds {
            st = self.exec(scope, c, st, tracing);
        }
        st
    }

    fn exec(&mut self, scope: &Scope, c: &Cmd, st: PointState, tracing: bool) -> PointState {
        let rho = scope.rho;
        let out = match &c.kind {
            CmdKind::Skip => st,
            CmdKind::Assign(v, e) => {
                let s1 = self.eval(scope, e, st);
                if scope.is_ref(*v) {
                    PointState {
                        rc: s1.rc.project(&[*v]).rename(rho, *v),
                        sp: sharing::assign(&s1.sp, *v, rho),
                    }
                } else {
                    s1.project(&[rho])
                }
            }
            CmdKind::FieldAssign(v, f, e) => {
                let s1 = self.eval(scope, e, st);
                if self.module.ct.fields[*f].ty.is_ref() {
                    let rc = self.field_update(scope, &s1.rc, *v, *f);
                    let sp = sharing::field_update(&s1.sp, *v, rho, &scope.handles);
                    PointState { rc, sp }.project(&[rho])
                } else {
                    s1.project(&[rho])
                }
            }
            CmdKind::If(_, t, e) => {
                let a = self.exec_block(scope, t, st.clone(), tracing);
                let b = self.exec_block(scope, e, st, tracing);
                a.join(&b)
            }
            CmdKind::While { body, end_line, .. } => {
                let r = self.exec_while(scope, c, body, st, tracing);
                let r = PointState {
                    rc: r.rc.normalize(),
                    sp: r.sp,
                };
                self.record(c.id, &r);
                self.push_trace(tracing, *end_line, TraceKind::LoopExit, &r);
                return r;
            }
            CmdKind::Return(e) => {
                let s1 = self.eval(scope, e, st);
                match scope.out {
                    Some(o) => PointState {
                        rc: s1.rc.rename(rho, o),
                        sp: s1.sp.rename(rho, o),
                    },
                    None => s1.project(&[rho]),
                }
            }
        };
        let out = PointState {
            rc: out.rc.normalize(),
            sp: out.sp,
        };
        self.record(c.id, &out);
        self.push_trace(tracing, c.line, TraceKind::Command, &out);
        out
    }

    /// Kleene iteration `X₀ = entry`, `Xₖ = X₀ ⊔ body(Xₖ₋₁)` with per-entry
    /// widening.
    fn exec_while(&mut self, scope: &Scope, c: &Cmd, body: &[Cmd], x0: PointState, tracing: bool) -> PointState {
        let n = scope.len();
        let mut counters = vec![0; n * n + n];
        let mut x = x0.clone();
        let mut iterations = 0;
        loop {
            self.push_trace(tracing, c.line, TraceKind::LoopHead, &x);
            iterations += 1;
            let b = self.exec_block(scope, body, x.clone(), tracing);
            let next = x0.join(&b);
            if next.leq(&x, self.space) {
                break;
            }
            let (rc, _, widened) = join_widen(&x.rc, &next.rc, &mut counters, self.widen, self.space);
            self.widenings += widened;
            x = PointState {
                rc,
                sp: x.sp.join(&next.sp),
            };
        }
        let e = self.loop_iters.entry(c.id).or_insert(0);
        *e = (*e).max(iterations);
        x
    }

    fn only(&self, f: crate::lang::FieldId) -> PathFormula {
        self.space.only(self.space.field_mask(f))
    }

    /// Field update `v.f := ρ` on the state after evaluating the
    /// right-hand side (ρ still present).
    fn field_update(&self, scope: &Scope, i1: &RcValue, v: usize, f: crate::lang::FieldId) -> RcValue {
        let rho = scope.rho;
        let xf = self.only(f);
        let rho_v = i1.reach(rho, v);
        let mid = xf.join(&xf.odot(rho_v));
        let mut r = i1.clone();
        let vars: Vec<usize> = scope.refs();
        for &w1 in &vars {
            let pre = i1.reach(w1, v);
            if pre.is_false() {
                continue;
            }
            let left = pre.odot(&mid);
            for &w2 in &vars {
                let post = i1.reach(rho, w2);
                if post.is_false() {
                    continue;
                }
                let add = left.odot(post);
                let cur = r.reach(w1, w2).join(&add);
                r.set_reach(w1, w2, cur);
            }
            let cyc = rho_v.odot(&xf).join(i1.cyc(rho));
            let cur = r.cyc(w1).join(&cyc);
            r.set_cyc(w1, cur);
        }
        r
    }

    fn eval(&mut self, scope: &Scope, e: &Ex, st: PointState) -> PointState {
        let rho = scope.rho;
        match e {
            Ex::Int(_) | Ex::Null => st,
            Ex::Var(v) => {
                if scope.is_ref(*v) {
                    PointState {
                        rc: st.rc.copy(*v, rho),
                        sp: sharing::eval_var(&st.sp, *v, rho),
                    }
                } else {
                    st
                }
            }
            Ex::New(_) => {
                let e0 = self.space.empty_path();
                let mut rc = st.rc.project(&[rho]);
                rc.set_reach(rho, rho, e0.clone());
                rc.set_cyc(rho, e0);
                PointState {
                    rc,
                    sp: sharing::eval_new(&st.sp, rho),
                }
            }
            Ex::Bin(a, _, b) => {
                let s1 = self.eval(scope, a, st).project(&[rho]);
                self.eval(scope, b, s1).project(&[rho])
            }
            Ex::Field(v, f) => {
                if !self.module.ct.fields[*f].ty.is_ref() {
                    return st;
                }
                let rc = self.field_read(scope, &st, *v, *f);
                PointState {
                    rc,
                    sp: sharing::eval_field(&st.sp, *v, rho),
                }
            }
            Ex::Call(cs) => self.call(scope, cs, st),
        }
    }

    /// Field access `v.f`.
    fn field_read(&self, scope: &Scope, st: &PointState, v: usize, f: crate::lang::FieldId) -> RcValue {
        let rho = scope.rho;
        let i = &st.rc;
        let xf = self.only(f);
        let mut r = i.project(&[rho]);
        let cv = i.cyc(v).clone();
        r.set_cyc(rho, cv.clone());
        r.set_reach(rho, rho, cv);
        for w in scope.refs() {
            r.set_reach(rho, w, i.reach(v, w).ominus(&xf));
            let into = if st.sp.ds(w, v) {
                self.space.truth()
            } else {
                i.reach(w, v).odot(&xf)
            };
            r.set_reach(w, rho, into);
        }
        r.normalize()
    }

    /// Method call `v₀.m(v₁..vₙ)`.
    fn call(&mut self, scope: &Scope, cs: &CallSite, st: PointState) -> PointState {
        let rho = scope.rho;
        let n = scope.len();
        let space = self.space;
        let st = st.project(&[rho]);
        let mut actuals = vec![cs.recv];
        actuals.extend(cs.args.iter().copied());
        let k = actuals.len();
        let amap: Vec<Option<usize>> = actuals.iter().map(|&a| Some(a)).collect();
        let entry = PointState {
            rc: st.rc.restrict(&amap, space).canonicalize(space),
            sp: st.sp.restrict(&amap, k),
        };
        // Join the denotations of every possible callee.
        let mut exit: Option<PointState> = None;
        for &m in &cs.callees {
            let s = self.summary(m, entry.clone());
            exit = Some(match exit {
                Some(e) => e.join(&s),
                None => s,
            });
        }
        let exit = exit.unwrap_or_else(|| PointState {
            rc: RcValue::bottom(k + 1, space),
            sp: SpValue::bottom(k + 1, k),
        });
        let mut imap = amap.clone();
        imap.push(Some(rho));
        let i2 = exit.rc.embed(&imap, n, space);
        let (sp_new, sp2) = sharing::call(&st.sp, &actuals, rho, &exit.sp, &scope.handles);
        let impure: Vec<bool> = (0..k).map(|i| exit.sp.impure(i)).collect();

        let i = &st.rc;
        let sp = &st.sp;
        let refs = scope.refs();
        let tru = space.truth();
        let fls = self.fls();

        // I''' : paths created through impure inputs.
        let mut i3 = RcValue::bottom(n, space);
        for &w1 in &refs {
            for &w2 in &refs {
                let mut acc = fls.clone();
                for (ii, &vi) in actuals.iter().enumerate() {
                    if !impure[ii] {
                        continue;
                    }
                    for &vj in &actuals {
                        let tail = i.reach(vj, w2);
                        if tail.is_false() {
                            continue;
                        }
                        let a = sp.ds(w1, vi);
                        let b = sp2.ds(vi, vj);
                        let val = match (a, b) {
                            (false, false) => i.reach(w1, vi).odot(i2.reach(vi, vj)).odot(tail),
                            (false, true) => i.reach(w1, vi).odot(&tru),
                            (true, false) => tru.odot(tail),
                            (true, true) => tru.clone(),
                        };
                        acc = acc.join(&val);
                    }
                }
                i3.set_reach(w1, w2, acc);
            }
        }
        let post = i.join(&i2).join(&i3);

        let mut r = post.clone();
        // Paths from the result.
        for &w in &refs {
            if i.reach(w, w).is_false() {
                continue;
            }
            let mut acc = fls.clone();
            for &vk in &actuals {
                if sp2.ds(vk, rho) {
                    acc = tru.clone();
                    break;
                }
                let pk = post.reach(vk, w);
                acc = acc
                    .join(&i2.reach(rho, vk).odot(pk))
                    .join(&pk.ominus(i2.reach(vk, rho)));
            }
            let cur = r.reach(rho, w).join(&acc);
            r.set_reach(rho, w, cur);
        }
        // Paths to the result.
        let rho_live = !i2.reach(rho, rho).is_false();
        for &w in &refs {
            let mut acc = fls.clone();
            let mut top = false;
            for (ii, &vi) in actuals.iter().enumerate() {
                let vr = i2.reach(vi, rho);
                acc = acc.join(&i.reach(w, vi).odot(vr));
                if rho_live && sp.ds(w, vi) && (!vr.is_false() || impure[ii]) {
                    top = true;
                }
            }
            if top {
                acc = tru.clone();
            }
            let cur = r.reach(w, rho).join(&acc);
            r.set_reach(w, rho, cur);
        }
        // Cyclicity.
        for &w in &refs {
            let mut acc = fls.clone();
            for (ii, &vi) in actuals.iter().enumerate() {
                if impure[ii]
                    && (sp.ds(w, vi) || !i.reach(w, vi).is_false() || !i.reach(vi, w).is_false())
                {
                    acc = acc.join(i2.cyc(vi));
                }
            }
            let cur = r.cyc(w).join(&acc);
            r.set_cyc(w, cur);
        }
        let mut cr = r.cyc(rho).clone();
        for &vk in &actuals {
            if !i2.reach(vk, rho).is_false() {
                cr = cr.join(i.cyc(vk));
            }
        }
        r.set_cyc(rho, cr);
        PointState {
            rc: r.normalize(),
            sp: sp_new,
        }
    }
}

/// Entry names accepted for annotations and reports.
pub fn reserved_names() -> [&'static str; 2] {
    [THIS, OUT]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_src(src: &str, entry: Option<&str>) -> Analysis {
        let cfg = AnalysisConfig {
            entry: entry.map(str::to_string),
            ..AnalysisConfig::default()
        };
        run(src, &cfg).unwrap()
    }

    #[test]
    fn shallow_variables_keep_entry_reachability() {
        let src = "class K { K f; K mth(K x1, K x2) { x1.f := x2; x1 := null; return x2; } }\n\
                   main { K a; K b; K c; K r; a := new K; b := new K; c := new K; r := c.mth(a, b); }";
        let an = run_src(src, None);
        let m = an.module.find_method("K.mth").unwrap();
        let s = an.result.summaries.iter().find(|s| s.method == m).unwrap();
        // Interface: [this, x1, x2, out].
        let xf = an.space.only_fields(&["f"]).unwrap();
        assert!(s.exit.rc.reach(1, 2).equiv(&xf, &an.space));
        assert!(s.exit.rc.reach(1, 3).equiv(&xf, &an.space));
        let imp = an.result.impure_inputs(m);
        assert_eq!(imp, vec![false, true, false]);
    }

    #[test]
    fn field_read_removes_field() {
        let src = "class K { K f; K g; K h; }\n\
                   main { K x; K y; K z; K w; x := new K; y := new K; x.f := y; x.g := new K; \
                   z := new K; y.h := z; y := null; w := x.f; }";
        let an = run_src(src, None);
        let sc = an.result.entry_scope();
        let (w, z) = (sc.var("w").unwrap(), sc.var("z").unwrap());
        let expect = an.space.from_name_lists(&[vec!["h"], vec!["f", "h"]]).unwrap();
        assert!(an.result.exit.rc.reach(w, z).equiv(&expect, &an.space));
    }

    #[test]
    fn skip_and_int_commands_are_identity() {
        let src = "class K { K f; }\nmain { int i; K x; x := new K; skip; i := i + 1; }";
        let an = run_src(src, None);
        let pts = &an.result.points;
        let a = pts[0].as_ref().unwrap();
        assert_eq!(pts[1].as_ref().unwrap(), a);
        assert_eq!(pts[2].as_ref().unwrap(), a);
    }
}
