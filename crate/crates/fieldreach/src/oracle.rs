//! Concrete ground truth: a bounded interpreter for the input language,
//! exact field-set enumeration of heap paths, the exact abstraction of a
//! concrete state, and a soundness checker comparing it with analysis
//! results.
//!
//! The interpreter follows the denotational semantics directly: `new`
//! zero-initialises every field, a call allocates a fresh frame with
//! `this`, the arguments, zeroed locals and `out`, and `return e` merely
//! assigns `out` (execution continues). Every time a command completes,
//! the state is recorded against the command id, laid out like the
//! analysis scope of its method (method variables, then the entry values
//! of the formal parameters, then an always-`null` slot for `ρ`).

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::RcValue;
use crate::formula::{FieldSpace, Mask, PathFormula};
use crate::lang::ast::BinOp;
use crate::lang::{ClassId, ClassTable, Cmd, CmdKind, Ex, FieldId, MethodId, Module, StmtId, Ty};
use crate::semantics::{AnalysisResult, Scope};
use crate::sharing::SpValue;

/// Default bound on executed commands.
pub const DEFAULT_STEP_BUDGET: usize = 100_000;

/// A run-time value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Null,
    Loc(usize),
}

impl Value {
    fn default_for(t: Ty) -> Value {
        match t {
            Ty::Int => Value::Int(0),
            Ty::Ref(_) => Value::Null,
        }
    }

    /// The location held, if any.
    pub fn loc(self) -> Option<usize> {
        match self {
            Value::Loc(l) => Some(l),
            _ => None,
        }
    }

    fn truthy(self) -> bool {
        match self {
            Value::Int(i) => i != 0,
            Value::Null => false,
            Value::Loc(_) => true,
        }
    }
}

/// A heap object: its run-time class and the values of its fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Object {
    pub class: ClassId,
    /// `(field, value)` for every field of the class, in field order.
    pub fields: Vec<(FieldId, Value)>,
}

impl Object {
    /// The value of a field (`None` if the class has no such field).
    pub fn get(&self, f: FieldId) -> Option<Value> {
        self.fields.iter().find(|(g, _)| *g == f).map(|(_, v)| *v)
    }
}

/// A heap: locations are indices into the object vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Heap {
    pub objects: Vec<Object>,
}

impl Heap {
    /// An empty heap.
    pub fn new() -> Self {
        Heap::default()
    }

    /// Allocates a zero-initialised object of class `c`.
    pub fn alloc(&mut self, ct: &ClassTable, c: ClassId) -> usize {
        let fields = ct
            .fields_of(c)
            .iter()
            .map(|&f| (f, Value::default_for(ct.fields[f].ty)))
            .collect();
        self.objects.push(Object { class: c, fields });
        self.objects.len() - 1
    }

    /// Sets a field of an object; returns false if the class lacks it.
    pub fn set(&mut self, loc: usize, f: FieldId, v: Value) -> bool {
        match self.objects[loc].fields.iter_mut().find(|(g, _)| *g == f) {
            Some(slot) => {
                slot.1 = v;
                true
            }
            None => false,
        }
    }

    /// Number of objects.
    pub fn len(&self) -> usize {
        self.objects.len()
    }

    /// True if no object was allocated.
    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Outgoing reference edges `(field, target)` of a location.
    pub fn edges(&self, loc: usize) -> impl Iterator<Item = (FieldId, usize)> + '_ {
        self.objects[loc]
            .fields
            .iter()
            .filter_map(|&(f, v)| v.loc().map(|l| (f, l)))
    }

    /// Locations reachable from `loc` (including itself).
    pub fn reachable(&self, loc: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([loc]);
        let mut work = vec![loc];
        while let Some(l) = work.pop() {
            for (_, t) in self.edges(l) {
                if seen.insert(t) {
                    work.push(t);
                }
            }
        }
        seen
    }

    /// Locations reachable from `loc` through at least one edge.
    pub fn reachable_nonempty(&self, loc: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut work: Vec<usize> = self.edges(loc).map(|(_, t)| t).collect();
        while let Some(l) = work.pop() {
            if seen.insert(l) {
                work.extend(self.edges(l).map(|(_, t)| t));
            }
        }
        seen
    }
}

/// A concrete state recorded at a program point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConcreteState {
    /// Values of the scope variables (see the module documentation).
    pub frame: Vec<Value>,
    pub heap: Heap,
}

/// Errors of concrete execution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("null dereference at line {line}")]
    NullDereference { line: usize },
    #[error("step budget of {0} commands exhausted")]
    BudgetExceeded(usize),
    #[error("no method `{name}` for the receiver at line {line}")]
    NoMethod { line: usize, name: String },
    #[error("the entry method has inputs; only closed programs can be executed")]
    OpenEntry,
}

/// Purity observed for one concrete call.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CallRecord {
    pub method: MethodId,
    /// Whether the call wrote a field of an object reachable from each
    /// input (`this` first) at call time.
    pub impure: Vec<bool>,
}

/// The outcome of a concrete run.
#[derive(Clone, Debug)]
pub struct ConcreteRun {
    /// Distinct states reached after each command.
    pub states: Vec<Vec<ConcreteState>>,
    /// Purity record of every distinct call observation.
    pub calls: Vec<CallRecord>,
    /// The final state of the entry method.
    pub last: ConcreteState,
    /// Number of executed commands.
    pub steps: usize,
}

struct ActiveCall {
    reach: Vec<BTreeSet<usize>>,
    impure: Vec<bool>,
}

struct Interp<'a> {
    module: &'a Module,
    scopes: Vec<Scope>,
    heap: Heap,
    budget: usize,
    steps: usize,
    seen: Vec<HashSet<ConcreteState>>,
    calls: HashSet<CallRecord>,
    active: Vec<ActiveCall>,
}

/// Runs a closed entry method (`main` or a method without inputs).
pub fn run_concrete(module: &Module, entry: MethodId, budget: usize) -> Result<ConcreteRun, OracleError> {
    let m = &module.methods[entry];
    if !m.inputs().is_empty() {
        return Err(OracleError::OpenEntry);
    }
    let scopes: Vec<Scope> = module.methods.iter().map(Scope::new).collect();
    let mut it = Interp {
        module,
        scopes,
        heap: Heap::new(),
        budget,
        steps: 0,
        seen: vec![HashSet::new(); module.stmt_count()],
        calls: HashSet::new(),
        active: Vec::new(),
    };
    let frame = it.fresh_frame(entry, None, &[]);
    let frame = it.exec_block(entry, &m.body, frame)?;
    let last = ConcreteState {
        frame,
        heap: it.heap.clone(),
    };
    let states = it
        .seen
        .into_iter()
        .map(|s| {
            let mut v: Vec<ConcreteState> = s.into_iter().collect();
            v.sort_by_key(|st| format!("{st:?}"));
            v
        })
        .collect();
    let mut calls: Vec<CallRecord> = it.calls.into_iter().collect();
    calls.sort_by_key(|c| (c.method, c.impure.clone()));
    Ok(ConcreteRun {
        states,
        calls,
        last,
        steps: it.steps,
    })
}

impl<'a> Interp<'a> {
    fn fresh_frame(&self, m: MethodId, this: Option<Value>, args: &[Value]) -> Vec<Value> {
        let meth = &self.module.methods[m];
        let sc = &self.scopes[m];
        let mut f: Vec<Value> = sc.tys.iter().map(|&t| Value::default_for(t)).collect();
        if let (Some(t), Some(v)) = (meth.this, this) {
            f[t] = v;
        }
        for (i, &p) in meth.params.iter().enumerate() {
            f[p] = args[i];
            f[sc.shallow[i]] = args[i];
        }
        f[sc.rho] = Value::Null;
        f
    }

    fn exec_block(&mut self, m: MethodId, cmds: &[Cmd], mut f: Vec<Value>) -> Result<Vec<Value>, OracleError> {
        for c in cmds {
            f = self.exec(m, c, f)?;
        }
        Ok(f)
    }

    fn record(&mut self, id: StmtId, f: &[Value]) {
        let st = ConcreteState {
            frame: f.to_vec(),
            heap: self.heap.clone(),
        };
        self.seen[id].insert(st);
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(OracleError::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn exec(&mut self, m: MethodId, c: &Cmd, mut f: Vec<Value>) -> Result<Vec<Value>, OracleError> {
        self.tick()?;
        match &c.kind {
            CmdKind::Skip => {}
            CmdKind::Assign(v, e) => {
                let val = self.eval(e, &f, c.line)?;
                f[*v] = val;
            }
            CmdKind::FieldAssign(v, fld, e) => {
                let val = self.eval(e, &f, c.line)?;
                let loc = f[*v].loc().ok_or(OracleError::NullDereference { line: c.line })?;
                self.heap.set(loc, *fld, val);
                for a in &mut self.active {
                    for (i, r) in a.reach.iter().enumerate() {
                        if r.contains(&loc) {
                            a.impure[i] = true;
                        }
                    }
                }
            }
            CmdKind::If(g, t, e) => {
                let b = self.eval(g, &f, c.line)?.truthy();
                f = self.exec_block(m, if b { t } else { e }, f)?;
            }
            CmdKind::While { guard, body, .. } => {
                while self.eval(guard, &f, c.line)?.truthy() {
                    f = self.exec_block(m, body, f)?;
                    self.tick()?;
                }
            }
            CmdKind::Return(e) => {
                let val = self.eval(e, &f, c.line)?;
                if let Some(o) = self.module.methods[m].out {
                    f[o] = val;
                }
            }
        }
        self.record(c.id, &f);
        Ok(f)
    }

    fn eval(&mut self, e: &Ex, f: &[Value], line: usize) -> Result<Value, OracleError> {
        Ok(match e {
            Ex::Int(i) => Value::Int(*i),
            Ex::Null => Value::Null,
            Ex::Var(v) => f[*v],
            Ex::Field(v, fld) => {
                let loc = f[*v].loc().ok_or(OracleError::NullDereference { line })?;
                self.heap.objects[loc].get(*fld).unwrap_or(Value::Null)
            }
            Ex::Bin(a, op, b) => {
                let x = self.eval(a, f, line)?;
                let y = self.eval(b, f, line)?;
                binop(x, *op, y)
            }
            Ex::New(c) => Value::Loc(self.heap.alloc(&self.module.ct, *c)),
            Ex::Call(cs) => {
                let recv = f[cs.recv];
                let loc = recv.loc().ok_or(OracleError::NullDereference { line })?;
                let class = self.heap.objects[loc].class;
                let callee = self.module.lookup(class, &cs.name).ok_or_else(|| OracleError::NoMethod {
                    line,
                    name: cs.name.clone(),
                })?;
                let args: Vec<Value> = cs.args.iter().map(|&a| f[a]).collect();
                let mut inputs = vec![recv];
                inputs.extend(args.iter().copied());
                let reach = inputs
                    .iter()
                    .map(|v| v.loc().map(|l| self.heap.reachable(l)).unwrap_or_default())
                    .collect();
                self.active.push(ActiveCall {
                    reach,
                    impure: vec![false; inputs.len()],
                });
                let frame = self.fresh_frame(callee, Some(recv), &args);
                let body = &self.module.methods[callee].body;
                let res = self.exec_block(callee, body, frame);
                let act = self.active.pop().expect("active call");
                let frame = res?;
                self.calls.insert(CallRecord {
                    method: callee,
                    impure: act.impure,
                });
                match self.module.methods[callee].out {
                    Some(o) => frame[o],
                    None => Value::Null,
                }
            }
        })
    }
}

fn binop(x: Value, op: BinOp, y: Value) -> Value {
    let b = |c: bool| Value::Int(c as i64);
    match (x, y) {
        (Value::Int(a), Value::Int(c)) => match op {
            BinOp::Add => Value::Int(a.wrapping_add(c)),
            BinOp::Sub => Value::Int(a.wrapping_sub(c)),
            BinOp::Mul => Value::Int(a.wrapping_mul(c)),
            BinOp::Lt => b(a < c),
            BinOp::Le => b(a <= c),
            BinOp::Gt => b(a > c),
            BinOp::Ge => b(a >= c),
            BinOp::Eq => b(a == c),
            BinOp::Ne => b(a != c),
        },
        _ => match op {
            BinOp::Eq => b(x == y),
            BinOp::Ne => b(x != y),
            _ => Value::Int(0),
        },
    }
}

/// All `(target, traversed field set)` pairs of paths starting at `src`
/// (the least set containing `(src, ∅)` and closed under following an
/// edge). Fields are mapped to propositions by `space`.
pub fn traversal_saturate(heap: &Heap, space: &FieldSpace, src: usize) -> BTreeSet<(usize, Mask)> {
    let mut seen = BTreeSet::from([(src, 0)]);
    let mut work = VecDeque::from([(src, 0)]);
    while let Some((l, m)) = work.pop_front() {
        for (f, t) in heap.edges(l) {
            let next = (t, m | space.field_mask(f));
            if seen.insert(next) {
                work.push_back(next);
            }
        }
    }
    seen
}

/// Field sets of the cycles reachable from `src` (the empty cycle
/// included).
pub fn cycle_sets(heap: &Heap, space: &FieldSpace, src: usize) -> BTreeSet<Mask> {
    let mut out = BTreeSet::from([0]);
    let locs: BTreeSet<usize> = traversal_saturate(heap, space, src).into_iter().map(|(l, _)| l).collect();
    for l in locs {
        for (t, m) in traversal_saturate(heap, space, l) {
            if t == l {
                out.insert(m);
            }
        }
    }
    out
}

/// The exact reachability/cyclicity abstraction of a frame and heap:
/// `reach(v, w)` has exactly the traversal sets of the paths from `v` to
/// `w`, `cyc(v)` those of the cycles reachable from `v`; null and
/// integer variables get `FALSE`.
pub fn alpha_state(frame: &[Value], heap: &Heap, refs: &[usize], space: &FieldSpace) -> RcValue {
    let n = frame.len();
    let mut r = RcValue::bottom(n, space);
    for &v in refs {
        let Some(lv) = frame[v].loc() else { continue };
        let sat = traversal_saturate(heap, space, lv);
        for &w in refs {
            let Some(lw) = frame[w].loc() else { continue };
            let ms = sat.iter().filter(|(l, _)| *l == lw).map(|&(_, m)| m);
            r.set_reach(v, w, PathFormula::models(space, ms));
        }
        r.set_cyc(v, PathFormula::models(space, cycle_sets(heap, space, lv)));
    }
    r
}

/// Exact sharing of a frame and heap: `SH(v, w)` iff both reach a common
/// location, `DS(v, w)` iff both reach a common location through
/// non-empty paths.
pub fn sharing_state(frame: &[Value], heap: &Heap, refs: &[usize], inputs: usize) -> SpValue {
    let mut sp = SpValue::bottom(frame.len(), inputs);
    let mut all = HashMap::new();
    let mut deep = HashMap::new();
    for &v in refs {
        if let Some(l) = frame[v].loc() {
            all.insert(v, heap.reachable(l));
            deep.insert(v, heap.reachable_nonempty(l));
        }
    }
    for &v in refs {
        for &w in refs {
            if let (Some(a), Some(b)) = (all.get(&v), all.get(&w)) {
                if !a.is_disjoint(b) {
                    sp.add_sh(v, w);
                }
            }
            if let (Some(a), Some(b)) = (deep.get(&v), deep.get(&w)) {
                if !a.is_disjoint(b) {
                    sp.add_ds(v, w);
                }
            }
        }
    }
    sp
}

/// A path from `src` to `dst` traversing exactly the fields of `mask`,
/// as `src -f-> l1 -g-> ... dst` (field names per `ct`).
pub fn path_witness(heap: &Heap, ct: &ClassTable, space: &FieldSpace, src: usize, dst: usize, mask: Mask) -> Option<String> {
    let mut parent: HashMap<(usize, Mask), ((usize, Mask), FieldId)> = HashMap::new();
    let start = (src, 0);
    let mut seen = HashSet::from([start]);
    let mut work = VecDeque::from([start]);
    let mut goal = None;
    while let Some(s) = work.pop_front() {
        if s == (dst, mask) {
            goal = Some(s);
            break;
        }
        for (f, t) in heap.edges(s.0) {
            let next = (t, s.1 | space.field_mask(f));
            if seen.insert(next) {
                parent.insert(next, (s, f));
                work.push_back(next);
            }
        }
    }
    let mut cur = goal?;
    let mut steps = Vec::new();
    while let Some(&(p, f)) = parent.get(&cur) {
        steps.push((f, cur.0));
        cur = p;
    }
    steps.reverse();
    let mut s = format!("o{src}");
    for (f, t) in steps {
        let _ = write!(s, " -{}-> o{t}", ct.field_name(f));
    }
    Some(s)
}

/// Kind of a soundness violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A concrete path from `from` to `to` whose field set the analysis
    /// excluded.
    Reach { from: String, to: String },
    /// A concrete cycle whose field set the analysis excluded.
    Cyc { var: String },
    /// A concretely realised field set judged non-viable.
    NotViable,
    /// Concrete deep-sharing missed by the analysis.
    DeepSharing { a: String, b: String },
    /// Concrete sharing missed by the analysis.
    Sharing { a: String, b: String },
    /// A concrete update of an input structure missed by the analysis.
    Purity { method: String, input: String },
    /// A point reached concretely but unreachable for the analysis.
    Unreached,
}

/// A soundness violation with its witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub stmt: Option<StmtId>,
    pub line: usize,
    pub kind: ViolationKind,
    /// The offending field set (names).
    pub model: Vec<String>,
    /// A human-readable concrete witness.
    pub witness: String,
}

/// Outcome of a soundness check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SoundnessReport {
    /// Number of `(point, state)` pairs checked.
    pub states_checked: usize,
    pub violations: Vec<Violation>,
}

impl SoundnessReport {
    /// No violation was found.
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares every concrete state with the analysis result at the same
/// point: every concrete traversal set must be a (viable) model of the
/// corresponding formula, concrete (deep-)sharing must be predicted, and
/// concrete input updates must be reported as impurity.
pub fn check_soundness(module: &Module, space: &FieldSpace, result: &AnalysisResult, run: &ConcreteRun) -> SoundnessReport {
    let mut rep = SoundnessReport::default();
    for (id, states) in run.states.iter().enumerate() {
        if states.is_empty() {
            continue;
        }
        let m = module.stmt_method[id];
        let line = module.stmt_line[id];
        let scope = &result.scopes[m];
        let Some(abs) = result.points.get(id).and_then(|p| p.as_ref()) else {
            rep.violations.push(Violation {
                stmt: Some(id),
                line,
                kind: ViolationKind::Unreached,
                model: vec![],
                witness: format!("{} concrete state(s)", states.len()),
            });
            continue;
        };
        let refs = scope.refs();
        for st in states {
            rep.states_checked += 1;
            check_state(module, space, scope, id, line, st, &abs.rc, &abs.sp, &refs, &mut rep);
        }
    }
    for call in &run.calls {
        let flags = result.impure_inputs(call.method);
        let sc = &result.scopes[call.method];
        for (i, &imp) in call.impure.iter().enumerate() {
            if imp && !flags.get(i).copied().unwrap_or(false) {
                rep.violations.push(Violation {
                    stmt: None,
                    line: module.methods[call.method].line,
                    kind: ViolationKind::Purity {
                        method: module.methods[call.method].qualified_name(&module.ct),
                        input: sc.names[sc.inputs[i]].clone(),
                    },
                    model: vec![],
                    witness: "a field of the input structure was written".to_string(),
                });
            }
        }
    }
    rep
}

#[allow(clippy::too_many_arguments)]
fn check_state(
    module: &Module,
    space: &FieldSpace,
    scope: &Scope,
    id: StmtId,
    line: usize,
    st: &ConcreteState,
    abs: &RcValue,
    sp: &SpValue,
    refs: &[usize],
    rep: &mut SoundnessReport,
) {
    let conc = alpha_state(&st.frame, &st.heap, refs, space);
    let name = |v: usize| scope.names[v].clone();
    let loc = |v: usize| st.frame[v].loc();
    for &v in refs {
        for &w in refs {
            for m in conc.reach(v, w).model_vec() {
                if !space.is_viable(m) {
                    rep.violations.push(Violation {
                        stmt: Some(id),
                        line,
                        kind: ViolationKind::NotViable,
                        model: space.names_of(m),
                        witness: path_witness(&st.heap, &module.ct, space, loc(v).unwrap(), loc(w).unwrap(), m)
                            .unwrap_or_default(),
                    });
                } else if !abs.reach(v, w).contains(m) {
                    rep.violations.push(Violation {
                        stmt: Some(id),
                        line,
                        kind: ViolationKind::Reach { from: name(v), to: name(w) },
                        model: space.names_of(m),
                        witness: path_witness(&st.heap, &module.ct, space, loc(v).unwrap(), loc(w).unwrap(), m)
                            .unwrap_or_default(),
                    });
                }
            }
        }
        for m in conc.cyc(v).model_vec() {
            if space.is_viable(m) && !abs.cyc(v).contains(m) {
                rep.violations.push(Violation {
                    stmt: Some(id),
                    line,
                    kind: ViolationKind::Cyc { var: name(v) },
                    model: space.names_of(m),
                    witness: cycle_witness(&st.heap, &module.ct, space, loc(v).unwrap(), m).unwrap_or_default(),
                });
            }
        }
    }
    let csp = sharing_state(&st.frame, &st.heap, refs, sp.inputs());
    for (i, &v) in refs.iter().enumerate() {
        for &w in &refs[i..] {
            if csp.ds(v, w) && !sp.ds(v, w) {
                rep.violations.push(Violation {
                    stmt: Some(id),
                    line,
                    kind: ViolationKind::DeepSharing { a: name(v), b: name(w) },
                    model: vec![],
                    witness: format!("o{} and o{}", loc(v).unwrap(), loc(w).unwrap()),
                });
            }
            if csp.sh(v, w) && !sp.sh(v, w) {
                rep.violations.push(Violation {
                    stmt: Some(id),
                    line,
                    kind: ViolationKind::Sharing { a: name(v), b: name(w) },
                    model: vec![],
                    witness: format!("o{} and o{}", loc(v).unwrap(), loc(w).unwrap()),
                });
            }
        }
    }
}

fn cycle_witness(heap: &Heap, ct: &ClassTable, space: &FieldSpace, src: usize, mask: Mask) -> Option<String> {
    for (l, _) in traversal_saturate(heap, space, src) {
        if traversal_saturate(heap, space, l).contains(&(l, mask)) {
            let to = path_witness(heap, ct, space, src, l, mask_of_path_to(heap, space, src, l)?)?;
            let cyc = path_witness(heap, ct, space, l, l, mask)?;
            return Some(format!("{to}; cycle {cyc}"));
        }
    }
    None
}

fn mask_of_path_to(heap: &Heap, space: &FieldSpace, src: usize, dst: usize) -> Option<Mask> {
    traversal_saturate(heap, space, src)
        .into_iter()
        .find(|&(l, _)| l == dst)
        .map(|(_, m)| m)
}

/// A concrete path: its locations and the fields of its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub locs: Vec<usize>,
    pub fields: Vec<FieldId>,
}

impl Path {
    /// The traversed field set.
    pub fn mask(&self, space: &FieldSpace) -> Mask {
        self.fields.iter().fold(0, |a, &f| a | space.field_mask(f))
    }

    /// Splits into `(π′, π″)` at position `k` (sharing location `k`).
    pub fn split(&self, k: usize) -> (Path, Path) {
        (
            Path {
                locs: self.locs[..=k].to_vec(),
                fields: self.fields[..k].to_vec(),
            },
            Path {
                locs: self.locs[k..].to_vec(),
                fields: self.fields[k..].to_vec(),
            },
        )
    }
}

/// All paths with at most `max_len` edges in a heap.
pub fn enumerate_paths(heap: &Heap, max_len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    let mut frontier: Vec<Path> = (0..heap.len())
        .map(|l| Path {
            locs: vec![l],
            fields: vec![],
        })
        .collect();
    for _ in 0..=max_len {
        let mut next = Vec::new();
        for p in frontier {
            let last = *p.locs.last().expect("non-empty path");
            if p.fields.len() < max_len {
                for (f, t) in heap.edges(last) {
                    let mut q = p.clone();
                    q.locs.push(t);
                    q.fields.push(f);
                    next.push(q);
                }
            }
            out.push(p);
        }
        frontier = next;
    }
    out
}

/// Checks the path lemmas of `⊙` and `⊖` on every split of every path
/// with at most `max_len` edges, using the exact formulas of the pieces:
///
/// * concatenation: `t(π′·π″) ⊨ x{t(π′)} ⊙ x{t(π″)}`;
/// * difference: `t(π″) ⊨ x{t(π)} ⊖ x{t(π′)}` for `π = π′·π″`;
/// * first step: `t(π″) ⊨ x{t(π)} ⊖ x{fld}` when `π′` is the single
///   edge `fld`.
///
/// Returns `(instances checked, failure descriptions)`.
pub fn check_path_lemmas(heap: &Heap, space: &FieldSpace, max_len: usize) -> (usize, Vec<String>) {
    let mut checked = 0;
    let mut fails = Vec::new();
    for p in enumerate_paths(heap, max_len) {
        let whole = space.only(p.mask(space));
        for k in 0..=p.fields.len() {
            let (a, b) = p.split(k);
            let (ma, mb) = (a.mask(space), b.mask(space));
            checked += 1;
            if !space.only(ma).odot(&space.only(mb)).contains(p.mask(space)) {
                fails.push(format!("concatenation fails on {p:?} at {k}"));
            }
            if !whole.ominus(&space.only(ma)).contains(mb) {
                fails.push(format!("difference fails on {p:?} at {k}"));
            }
            if k == 1 {
                let fld = space.only(space.field_mask(p.fields[0]));
                if !whole.ominus(&fld).contains(mb) {
                    fails.push(format!("first-step difference fails on {p:?}"));
                }
            }
        }
    }
    (checked, fails)
}

/// Graphviz rendering of a state: variables as boxes, objects as
/// circles, field-labelled edges.
pub fn heap_dot(module: &Module, scope: &Scope, st: &ConcreteState) -> String {
    let mut s = String::from("digraph heap {\n");
    for (i, o) in st.heap.objects.iter().enumerate() {
        let _ = writeln!(s, "  o{i} [label=\"o{i}:{}\"];", module.ct.class_name(o.class));
    }
    for (v, val) in st.frame.iter().enumerate() {
        if let Value::Loc(l) = val {
            let _ = writeln!(s, "  \"{}\" [shape=box];\n  \"{}\" -> o{l};", scope.names[v], scope.names[v]);
        }
    }
    for (i, o) in st.heap.objects.iter().enumerate() {
        for &(f, v) in &o.fields {
            if let Value::Loc(t) = v {
                let _ = writeln!(s, "  o{i} -> o{t} [label=\"{}\"];", module.ct.field_name(f));
            }
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn module(src: &str) -> Module {
        Module::from_source(src).unwrap()
    }

    #[test]
    fn skip_program_has_one_empty_state() {
        let m = module("main { skip }");
        let r = run_concrete(&m, m.main.unwrap(), 100).unwrap();
        assert_eq!(r.states[0].len(), 1);
        assert!(r.states[0][0].heap.is_empty());
    }

    #[test]
    fn null_field_update_is_an_error() {
        let m = module("class K { K f; }\nmain { K x; K y;\n x.f := y; }");
        let e = run_concrete(&m, m.main.unwrap(), 100).unwrap_err();
        assert_eq!(e, OracleError::NullDereference { line: 3 });
    }

    #[test]
    fn budget_is_enforced() {
        let m = module("main { int i; i := 1; while (i > 0) do i := i + 1 }");
        assert_eq!(
            run_concrete(&m, m.main.unwrap(), 50).unwrap_err(),
            OracleError::BudgetExceeded(50)
        );
    }

    #[test]
    fn two_cycle_saturation() {
        let m = module("class K { K f; K g; }\nmain { skip }");
        let space = FieldSpace::from_class_table(&m.ct, None).unwrap();
        let mut h = Heap::new();
        let (a, b) = (h.alloc(&m.ct, 0), h.alloc(&m.ct, 0));
        let (f, g) = (m.ct.field_id("f").unwrap(), m.ct.field_id("g").unwrap());
        h.set(a, f, Value::Loc(b));
        h.set(b, g, Value::Loc(a));
        let sat = traversal_saturate(&h, &space, a);
        let fg = space.mask_of(&["f", "g"]).unwrap();
        assert!(sat.contains(&(a, fg)));
        assert!(!sat.contains(&(a, space.mask_of(&["f"]).unwrap())));
        assert!(sat.contains(&(a, 0)));
    }

    #[test]
    fn lone_object_saturation() {
        let m = module("class K { K f; }\nmain { skip }");
        let space = FieldSpace::from_class_table(&m.ct, None).unwrap();
        let mut h = Heap::new();
        let a = h.alloc(&m.ct, 0);
        assert_eq!(traversal_saturate(&h, &space, a), BTreeSet::from([(a, 0)]));
    }
}
