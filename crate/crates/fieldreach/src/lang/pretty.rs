//! Pretty-printer producing source text that parses back to the same AST
//! (up to source positions).

use std::fmt::Write;

use super::ast::*;

/// Renders a program as source text.
pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for a in &p.annotations {
        let _ = writeln!(out, "//@ {}", a.text);
    }
    for c in &p.classes {
        let _ = write!(out, "class {}", c.name);
        if let Some(s) = &c.extends {
            let _ = write!(out, " extends {s}");
        }
        out.push_str(" {\n");
        for f in &c.fields {
            let _ = writeln!(out, "  {} {};", f.ty, f.name);
        }
        for m in &c.methods {
            let params: Vec<String> = m.params.iter().map(|d| format!("{} {}", d.ty, d.name)).collect();
            let _ = writeln!(out, "  {} {}({}) {{", m.ret, m.name, params.join(", "));
            decls(&mut out, &m.locals, 2);
            block(&mut out, &m.body, 2);
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }
    if let Some(m) = &p.main {
        out.push_str("main {\n");
        decls(&mut out, &m.locals, 1);
        block(&mut out, &m.body, 1);
        out.push_str("}\n");
    }
    out
}

fn indent(out: &mut String, n: usize) {
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn decls(out: &mut String, ds: &[Decl], lvl: usize) {
    for d in ds {
        indent(out, lvl);
        let _ = writeln!(out, "{} {};", d.ty, d.name);
    }
}

fn block(out: &mut String, body: &[Stmt], lvl: usize) {
    for s in body {
        stmt(out, s, lvl);
    }
}

fn stmt(out: &mut String, s: &Stmt, lvl: usize) {
    indent(out, lvl);
    match &s.kind {
        StmtKind::Skip => out.push_str("skip;\n"),
        StmtKind::Assign(v, e) => {
            let _ = writeln!(out, "{v} := {};", pretty_expr(e));
        }
        StmtKind::FieldAssign(v, f, e) => {
            let _ = writeln!(out, "{v}.{f} := {};", pretty_expr(e));
        }
        StmtKind::If {
            guard,
            then_branch,
            else_branch,
        } => {
            let _ = writeln!(out, "if ({}) then {{", pretty_expr(guard));
            block(out, then_branch, lvl + 1);
            indent(out, lvl);
            out.push_str("} else {\n");
            block(out, else_branch, lvl + 1);
            indent(out, lvl);
            out.push_str("}\n");
        }
        StmtKind::While { guard, body, .. } => {
            let _ = writeln!(out, "while ({}) do {{", pretty_expr(guard));
            block(out, body, lvl + 1);
            indent(out, lvl);
            out.push_str("}\n");
        }
        StmtKind::Return(e) => {
            let _ = writeln!(out, "return {};", pretty_expr(e));
        }
    }
}

/// Renders an expression, fully parenthesizing nested binary operations.
pub fn pretty_expr(e: &Expr) -> String {
    match e {
        Expr::Int(n) if *n < 0 => format!("(0 - {})", (*n as i128).abs()),
        Expr::Int(n) => n.to_string(),
        Expr::Null => "null".to_string(),
        Expr::Var(v) => v.clone(),
        Expr::Field(v, f) => format!("{v}.{f}"),
        Expr::New(c) => format!("new {c}"),
        Expr::Bin(a, op, b) => format!("({} {} {})", pretty_expr(a), op.symbol(), pretty_expr(b)),
        Expr::Call { recv, method, args } => format!("{recv}.{method}({})", args.join(", ")),
    }
}
