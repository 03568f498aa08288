//! Name resolution and type checking.
//!
//! The checker turns the surface AST into a resolved intermediate form in
//! which variables, fields, classes and methods are referred to by index.
//! Every method (and the `main` block, treated as a parameterless method
//! without receiver or result) gets a fixed variable layout
//! `[this?] ++ params ++ locals ++ [out?]`; since declarations precede
//! commands, the type environment is the same at every point of a body.

use std::collections::{BTreeMap, HashMap};

use super::ast::{self, BinOp, Expr, Pos, Program, StmtKind, TypeName};
use super::classtable::{ClassId, ClassTable, FieldId, Ty};
use super::error::LangError;
use super::parser::parse_program;

pub type VarId = usize;
pub type MethodId = usize;
pub type StmtId = usize;

/// Name of the implicit result variable of a method.
pub const OUT: &str = "out";
/// Name of the receiver variable.
pub const THIS: &str = "this";

/// A variable of a method scope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Var {
    pub name: String,
    pub ty: Ty,
}

/// A resolved method call site `recv.name(args)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallSite {
    pub recv: VarId,
    pub name: String,
    pub args: Vec<VarId>,
    /// Every method that may be dispatched here: the lookup of `name`
    /// from each subclass of the receiver's declared type.
    pub callees: Vec<MethodId>,
}

/// Resolved expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ex {
    Int(i64),
    Null,
    Var(VarId),
    Field(VarId, FieldId),
    Bin(Box<Ex>, BinOp, Box<Ex>),
    New(ClassId),
    Call(CallSite),
}

/// A resolved command with a program-wide unique id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cmd {
    pub id: StmtId,
    pub line: usize,
    pub kind: CmdKind,
}

/// Resolved commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmdKind {
    Skip,
    Assign(VarId, Ex),
    FieldAssign(VarId, FieldId, Ex),
    If(Ex, Vec<Cmd>, Vec<Cmd>),
    While {
        guard: Ex,
        body: Vec<Cmd>,
        end_line: usize,
    },
    Return(Ex),
}

/// A resolved method (or the `main` block).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub id: MethodId,
    /// Defining class; `None` for `main`.
    pub owner: Option<ClassId>,
    pub name: String,
    pub vars: Vec<Var>,
    pub this: Option<VarId>,
    pub params: Vec<VarId>,
    pub locals: Vec<VarId>,
    pub out: Option<VarId>,
    pub body: Vec<Cmd>,
    pub line: usize,
}

impl Method {
    /// Input variables: the receiver (if any) followed by the formals.
    pub fn inputs(&self) -> Vec<VarId> {
        self.this.iter().copied().chain(self.params.iter().copied()).collect()
    }

    /// Inputs followed by `out` (if any).
    pub fn interface(&self) -> Vec<VarId> {
        let mut v = self.inputs();
        v.extend(self.out);
        v
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Qualified display name `Class.method`.
    pub fn qualified_name(&self, ct: &ClassTable) -> String {
        match self.owner {
            Some(c) => format!("{}.{}", ct.class_name(c), self.name),
            None => self.name.clone(),
        }
    }

    /// The type environment (identical at every point of the body).
    pub fn type_env(&self) -> BTreeMap<String, Ty> {
        self.vars.iter().map(|v| (v.name.clone(), v.ty)).collect()
    }
}

/// A parsed, resolved and type-checked program.
#[derive(Clone, Debug)]
pub struct Module {
    pub program: Program,
    pub ct: ClassTable,
    pub methods: Vec<Method>,
    pub main: Option<MethodId>,
    /// Owning method of every command id.
    pub stmt_method: Vec<MethodId>,
    /// Source line of every command id.
    pub stmt_line: Vec<usize>,
    /// Methods declared directly in each class, by name.
    declared: Vec<HashMap<String, MethodId>>,
}

impl Module {
    /// Parses and checks a source text.
    pub fn from_source(src: &str) -> Result<Module, LangError> {
        let p = parse_program(src)?;
        let ct = ClassTable::build(&p)?;
        type_check(p, ct)
    }

    /// Dynamic lookup of `name` starting from class `c`.
    pub fn lookup(&self, c: ClassId, name: &str) -> Option<MethodId> {
        let mut cur = Some(c);
        while let Some(k) = cur {
            if let Some(&m) = self.declared[k].get(name) {
                return Some(m);
            }
            cur = self.ct.classes[k].parent;
        }
        None
    }

    /// Finds a method by `Class.method`, plain method name (if unique) or
    /// `main`.
    pub fn find_method(&self, spec: &str) -> Option<MethodId> {
        if spec == "main" {
            return self.main;
        }
        if let Some((c, m)) = spec.split_once('.') {
            return self
                .methods
                .iter()
                .find(|x| x.name == m && x.owner.map(|o| self.ct.class_name(o)) == Some(c))
                .map(|x| x.id);
        }
        let hits: Vec<_> = self
            .methods
            .iter()
            .filter(|x| x.owner.is_some() && x.name == spec)
            .collect();
        if hits.len() == 1 {
            Some(hits[0].id)
        } else {
            None
        }
    }

    /// Number of command ids.
    pub fn stmt_count(&self) -> usize {
        self.stmt_line.len()
    }

    /// Type environment at a program point.
    pub fn type_env_at(&self, s: StmtId) -> BTreeMap<String, Ty> {
        self.methods[self.stmt_method[s]].type_env()
    }
}

/// Resolves and type checks a program against its class table.
pub fn type_check(p: Program, ct: ClassTable) -> Result<Module, LangError> {
    let mut methods: Vec<Method> = Vec::new();
    let mut declared = vec![HashMap::new(); ct.classes.len()];
    let mut decl_refs: Vec<(&ast::MethodDecl, Option<ClassId>)> = Vec::new();

    // Pass 1: method headers.
    for (ci, c) in p.classes.iter().enumerate() {
        for md in &c.methods {
            if declared[ci].contains_key(&md.name) {
                return Err(LangError::ty(
                    md.pos,
                    format!("duplicate method `{}` in class `{}`", md.name, c.name),
                ));
            }
            let id = methods.len();
            declared[ci].insert(md.name.clone(), id);
            methods.push(header(&ct, md.pos, Some(ci), &md.name, &md.params, &md.locals, Some(&md.ret))?);
            decl_refs.push((md, Some(ci)));
        }
    }
    let main = match &p.main {
        Some(m) => {
            let id = methods.len();
            methods.push(header(&ct, m.pos, None, "main", &[], &m.locals, None)?);
            Some(id)
        }
        None => None,
    };

    // Overriding methods must keep the signature.
    for (ci, c) in ct.classes.iter().enumerate() {
        for (name, &m) in &declared[ci] {
            let mut cur = c.parent;
            while let Some(k) = cur {
                if let Some(&sup) = declared[k].get(name) {
                    if signature(&methods[m]) != signature(&methods[sup]) {
                        return Err(LangError::ty(
                            Pos {
                                line: methods[m].line,
                                col: 1,
                            },
                            format!("method `{}` overrides with a different signature", name),
                        ));
                    }
                    break;
                }
                cur = ct.classes[k].parent;
            }
        }
    }

    for (i, m) in methods.iter_mut().enumerate() {
        m.id = i;
    }
    let mut module = Module {
        program: Program::default(),
        ct,
        methods,
        main,
        stmt_method: Vec::new(),
        stmt_line: Vec::new(),
        declared,
    };

    // Pass 2: bodies.
    let mut bodies: Vec<(MethodId, Vec<ast::Stmt>)> = decl_refs
        .iter()
        .enumerate()
        .map(|(i, (md, _))| (i, md.body.clone()))
        .collect();
    if let (Some(mid), Some(m)) = (main, &p.main) {
        bodies.push((mid, m.body.clone()));
    }
    let mut stmt_method = Vec::new();
    let mut stmt_line = Vec::new();
    let mut resolved = Vec::new();
    for (mid, body) in &bodies {
        let mut ck = Checker {
            m: &module,
            mid: *mid,
            stmt_method: &mut stmt_method,
            stmt_line: &mut stmt_line,
        };
        let cmds = ck.block(body, true)?;
        resolved.push((*mid, cmds));
    }
    for (mid, cmds) in resolved {
        module.methods[mid].body = cmds;
    }
    module.stmt_method = stmt_method;
    module.stmt_line = stmt_line;
    module.program = p;
    Ok(module)
}

fn signature(m: &Method) -> (Vec<Ty>, Option<Ty>) {
    (
        m.params.iter().map(|&p| m.vars[p].ty).collect(),
        m.out.map(|o| m.vars[o].ty),
    )
}

fn header(
    ct: &ClassTable,
    pos: Pos,
    owner: Option<ClassId>,
    name: &str,
    params: &[ast::Decl],
    locals: &[ast::Decl],
    ret: Option<&TypeName>,
) -> Result<Method, LangError> {
    let mut vars = Vec::new();
    let resolve = |d: &ast::Decl| -> Result<Var, LangError> {
        if d.name == OUT || d.name == THIS {
            return Err(LangError::ty(d.pos, format!("`{}` is a reserved variable name", d.name)));
        }
        let ty = ct
            .resolve_type(&d.ty)
            .ok_or_else(|| LangError::ty(d.pos, format!("unknown type `{}`", d.ty)))?;
        Ok(Var {
            name: d.name.clone(),
            ty,
        })
    };
    let this = owner.map(|c| {
        vars.push(Var {
            name: THIS.to_string(),
            ty: Ty::Ref(c),
        });
        0
    });
    let mut pids = Vec::new();
    for d in params {
        pids.push(vars.len());
        vars.push(resolve(d)?);
    }
    let mut lids = Vec::new();
    for d in locals {
        lids.push(vars.len());
        vars.push(resolve(d)?);
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].iter().any(|w| w.name == v.name) {
            return Err(LangError::ty(pos, format!("variable `{}` declared twice", v.name)));
        }
    }
    let out = match ret {
        Some(t) => {
            let ty = ct
                .resolve_type(t)
                .ok_or_else(|| LangError::ty(pos, format!("unknown return type `{t}`")))?;
            vars.push(Var {
                name: OUT.to_string(),
                ty,
            });
            Some(vars.len() - 1)
        }
        None => None,
    };
    Ok(Method {
        // Ids are assigned by position once all headers are known.
        id: usize::MAX,
        owner,
        name: name.to_string(),
        vars,
        this,
        params: pids,
        locals: lids,
        out,
        body: Vec::new(),
        line: pos.line,
    })
}

/// Static type of an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ETy {
    Int,
    Null,
    Ref(ClassId),
}

struct Checker<'a> {
    m: &'a Module,
    mid: MethodId,
    stmt_method: &'a mut Vec<MethodId>,
    stmt_line: &'a mut Vec<usize>,
}

impl<'a> Checker<'a> {
    fn method(&self) -> &Method {
        &self.m.methods[self.mid]
    }

    fn var(&self, name: &str, pos: Pos) -> Result<VarId, LangError> {
        if name == OUT {
            return Err(LangError::ty(pos, "`out` cannot be used directly; use `return`"));
        }
        self.method()
            .var_id(name)
            .ok_or_else(|| LangError::ty(pos, format!("unknown variable `{name}`")))
    }

    fn var_ty(&self, v: VarId) -> ETy {
        match self.method().vars[v].ty {
            Ty::Int => ETy::Int,
            Ty::Ref(c) => ETy::Ref(c),
        }
    }

    fn assignable(&self, from: ETy, to: Ty) -> bool {
        match (from, to) {
            (ETy::Int, Ty::Int) => true,
            (ETy::Null, Ty::Ref(_)) => true,
            (ETy::Ref(a), Ty::Ref(b)) => self.m.ct.is_subclass(a, b),
            _ => false,
        }
    }

    fn show(&self, t: ETy) -> String {
        match t {
            ETy::Int => "int".into(),
            ETy::Null => "null".into(),
            ETy::Ref(c) => self.m.ct.class_name(c).to_string(),
        }
    }

    fn field_of(&self, v: VarId, f: &str, pos: Pos) -> Result<FieldId, LangError> {
        let c = match self.var_ty(v) {
            ETy::Ref(c) => c,
            t => {
                return Err(LangError::ty(
                    pos,
                    format!("cannot access field `{f}` of a value of type {}", self.show(t)),
                ))
            }
        };
        let fid = self
            .m
            .ct
            .field_id(f)
            .filter(|&fid| self.m.ct.has_field(c, fid))
            .ok_or_else(|| {
                LangError::ty(
                    pos,
                    format!("class `{}` has no field `{f}`", self.m.ct.class_name(c)),
                )
            })?;
        Ok(fid)
    }

    fn expr(&self, e: &Expr, pos: Pos) -> Result<(Ex, ETy), LangError> {
        match e {
            Expr::Int(n) => Ok((Ex::Int(*n), ETy::Int)),
            Expr::Null => Ok((Ex::Null, ETy::Null)),
            Expr::Var(v) => {
                let id = self.var(v, pos)?;
                Ok((Ex::Var(id), self.var_ty(id)))
            }
            Expr::Field(v, f) => {
                let id = self.var(v, pos)?;
                let fid = self.field_of(id, f, pos)?;
                let t = match self.m.ct.fields[fid].ty {
                    Ty::Int => ETy::Int,
                    Ty::Ref(c) => ETy::Ref(c),
                };
                Ok((Ex::Field(id, fid), t))
            }
            Expr::New(c) => {
                let cid = self
                    .m
                    .ct
                    .class_id(c)
                    .ok_or_else(|| LangError::ty(pos, format!("unknown class `{c}`")))?;
                Ok((Ex::New(cid), ETy::Ref(cid)))
            }
            Expr::Bin(a, op, b) => {
                let (ea, ta) = self.expr(a, pos)?;
                let (eb, tb) = self.expr(b, pos)?;
                let ok = match op {
                    BinOp::Eq | BinOp::Ne => match (ta, tb) {
                        (ETy::Int, ETy::Int) => true,
                        (ETy::Int, _) | (_, ETy::Int) => false,
                        _ => true,
                    },
                    _ => ta == ETy::Int && tb == ETy::Int,
                };
                if !ok {
                    return Err(LangError::ty(
                        pos,
                        format!(
                            "operator `{}` not applicable to {} and {}",
                            op.symbol(),
                            self.show(ta),
                            self.show(tb)
                        ),
                    ));
                }
                Ok((Ex::Bin(Box::new(ea), *op, Box::new(eb)), ETy::Int))
            }
            Expr::Call { recv, method, args } => {
                let r = self.var(recv, pos)?;
                let c = match self.var_ty(r) {
                    ETy::Ref(c) => c,
                    t => {
                        return Err(LangError::ty(
                            pos,
                            format!("cannot call `{method}` on a value of type {}", self.show(t)),
                        ))
                    }
                };
                let target = self.m.lookup(c, method).ok_or_else(|| {
                    LangError::ty(
                        pos,
                        format!("class `{}` has no method `{method}`", self.m.ct.class_name(c)),
                    )
                })?;
                let tm = &self.m.methods[target];
                if tm.params.len() != args.len() {
                    return Err(LangError::ty(
                        pos,
                        format!(
                            "method `{method}` expects {} arguments, got {}",
                            tm.params.len(),
                            args.len()
                        ),
                    ));
                }
                let mut ids = Vec::new();
                for (a, &p) in args.iter().zip(&tm.params) {
                    let id = self.var(a, pos)?;
                    if !self.assignable(self.var_ty(id), tm.vars[p].ty) {
                        return Err(LangError::ty(
                            pos,
                            format!("argument `{a}` has incompatible type for `{method}`"),
                        ));
                    }
                    ids.push(id);
                }
                let mut callees: Vec<MethodId> = self
                    .m
                    .ct
                    .subclasses(c)
                    .into_iter()
                    .filter_map(|k| self.m.lookup(k, method))
                    .collect();
                callees.sort_unstable();
                callees.dedup();
                let rt = match tm.out.map(|o| tm.vars[o].ty) {
                    Some(Ty::Ref(k)) => ETy::Ref(k),
                    // A method without a declared result type cannot exist;
                    // `int` results are typed as ints.
                    _ => ETy::Int,
                };
                Ok((
                    Ex::Call(CallSite {
                        recv: r,
                        name: method.clone(),
                        args: ids,
                        callees,
                    }),
                    rt,
                ))
            }
        }
    }

    fn guard(&self, e: &Expr, pos: Pos) -> Result<Ex, LangError> {
        let (ex, t) = self.expr(e, pos)?;
        if t != ETy::Int {
            return Err(LangError::ty(pos, "condition must be an integer or a comparison"));
        }
        Ok(ex)
    }

    fn block(&mut self, body: &[ast::Stmt], top: bool) -> Result<Vec<Cmd>, LangError> {
        let mut out = Vec::new();
        for (i, s) in body.iter().enumerate() {
            let id = self.stmt_line.len();
            self.stmt_line.push(s.pos.line);
            self.stmt_method.push(self.mid);
            let kind = match &s.kind {
                StmtKind::Skip => CmdKind::Skip,
                StmtKind::Assign(v, e) => {
                    let vid = self.var(v, s.pos)?;
                    if Some(vid) == self.method().this {
                        return Err(LangError::ty(s.pos, "cannot assign to `this`"));
                    }
                    let (ex, t) = self.expr(e, s.pos)?;
                    let vt = self.method().vars[vid].ty;
                    if !self.assignable(t, vt) {
                        return Err(LangError::ty(
                            s.pos,
                            format!(
                                "cannot assign {} to `{v}` of type {}",
                                self.show(t),
                                self.m.ct.type_name(vt)
                            ),
                        ));
                    }
                    CmdKind::Assign(vid, ex)
                }
                StmtKind::FieldAssign(v, f, e) => {
                    let vid = self.var(v, s.pos)?;
                    let fid = self.field_of(vid, f, s.pos)?;
                    let (ex, t) = self.expr(e, s.pos)?;
                    let ft = self.m.ct.fields[fid].ty;
                    if !self.assignable(t, ft) {
                        return Err(LangError::ty(
                            s.pos,
                            format!(
                                "cannot assign {} to field `{f}` of type {}",
                                self.show(t),
                                self.m.ct.type_name(ft)
                            ),
                        ));
                    }
                    CmdKind::FieldAssign(vid, fid, ex)
                }
                StmtKind::If {
                    guard,
                    then_branch,
                    else_branch,
                } => {
                    let g = self.guard(guard, s.pos)?;
                    let a = self.block(then_branch, false)?;
                    let b = self.block(else_branch, false)?;
                    CmdKind::If(g, a, b)
                }
                StmtKind::While {
                    guard,
                    body,
                    end_line,
                } => {
                    let g = self.guard(guard, s.pos)?;
                    let b = self.block(body, false)?;
                    CmdKind::While {
                        guard: g,
                        body: b,
                        end_line: *end_line,
                    }
                }
                StmtKind::Return(e) => {
                    let out = self.method().out.ok_or_else(|| {
                        LangError::ty(s.pos, "`return` is only allowed inside methods")
                    })?;
                    if !top || i + 1 != body.len() {
                        return Err(LangError::ty(
                            s.pos,
                            "`return` must be the last command of a method body",
                        ));
                    }
                    let (ex, t) = self.expr(e, s.pos)?;
                    let ot = self.method().vars[out].ty;
                    if !self.assignable(t, ot) {
                        return Err(LangError::ty(
                            s.pos,
                            format!("cannot return {} from a method returning {}", self.show(t), self.m.ct.type_name(ot)),
                        ));
                    }
                    CmdKind::Return(ex)
                }
            };
            out.push(Cmd {
                id,
                line: s.pos.line,
                kind,
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DLL: &str = "class Node { Node n; Node p; }\n\
        main { int i; Node tmp; Node x; i := 1; tmp := new Node;\n\
        while (i < 10) { x := new Node; x.n := tmp; tmp.p := x; tmp := x; i := i + 1; }\n\
        while (x != null) { x := x.n; } }";

    #[test]
    fn list_builder_checks() {
        let m = Module::from_source(DLL).unwrap();
        let main = &m.methods[m.main.unwrap()];
        assert_eq!(main.vars.len(), 3);
        assert_eq!(m.stmt_count(), 10);
    }

    #[test]
    fn int_to_reference_rejected() {
        let src = "class Node { Node n; }\nmain { Node x; x := 3 }";
        assert!(matches!(Module::from_source(src), Err(LangError::Type { .. })));
    }

    #[test]
    fn call_on_int_rejected() {
        let src = "class Node { Node n; Node m() { return this.n } }\nmain { int x; Node y; y := x.m() }";
        assert!(matches!(Module::from_source(src), Err(LangError::Type { .. })));
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(Module::from_source("main { Node x; }").is_err());
        assert!(Module::from_source("class A { A f; }\nmain { A x; x := y }").is_err());
        assert!(Module::from_source("class A { A f; }\nmain { A x; x := x.g }").is_err());
    }

    #[test]
    fn return_must_be_last() {
        let src = "class A { A f; A m() { return this; skip } }";
        assert!(Module::from_source(src).is_err());
        let src = "class A { A f; A m() { if (1) then return this } }";
        assert!(Module::from_source(src).is_err());
    }

    #[test]
    fn assigning_this_rejected() {
        let src = "class A { A f; A m() { this := null; return this } }";
        assert!(Module::from_source(src).is_err());
    }

    #[test]
    fn dispatch_targets_include_overrides() {
        let src = "class A { A f; A m() { return this } }\n\
                   class B extends A { A m() { return null } }\n\
                   main { A a; A r; a := new B; r := a.m() }";
        let m = Module::from_source(src).unwrap();
        let main = &m.methods[m.main.unwrap()];
        match &main.body[1].kind {
            CmdKind::Assign(_, Ex::Call(cs)) => assert_eq!(cs.callees.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn field_update_with_same_class_accepted() {
        let src = "class Node { Node n; }\nmain { Node x; Node tmp; x := new Node; tmp := new Node; x.n := tmp }";
        assert!(Module::from_source(src).is_ok());
    }
}
