//! Recursive-descent parser.
//!
//! Accepted syntax, beyond the core grammar of commands and expressions:
//! `then`/`do` are optional, bodies of `if`/`while` may be braced blocks,
//! `;` separates commands (a trailing `;` and a missing `;` after a
//! braced block are both accepted), and a top-level `main { ... }` block
//! may appear anywhere among the class declarations.

use super::ast::*;
use super::error::LangError;
use super::lexer::{tokenize, Tok, Token};

const KEYWORDS: [&str; 13] = [
    "class", "extends", "int", "null", "new", "skip", "if", "then", "else", "while", "do",
    "return", "main",
];

/// Returns true if `s` is a reserved word.
pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parses a complete program.
pub fn parse_program(src: &str) -> Result<Program, LangError> {
    let (toks, annotations) = tokenize(src)?;
    let mut p = Parser {
        toks,
        i: 0,
        prev_rbrace: false,
    };
    let mut prog = p.program()?;
    prog.annotations = annotations;
    Ok(prog)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    /// Whether the last consumed token was a closing brace.
    prev_rbrace: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn prev_pos(&self) -> Pos {
        self.toks[self.i.saturating_sub(1)].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        self.prev_rbrace = t.tok == Tok::Sym("}");
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), LangError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), LangError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(format!("expected `{k}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn type_name(&mut self) -> Result<TypeName, LangError> {
        if self.eat_kw("int") {
            Ok(TypeName::Int)
        } else {
            Ok(TypeName::Class(self.ident()?))
        }
    }

    fn program(&mut self) -> Result<Program, LangError> {
        let mut prog = Program::default();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(k) if k == "class" => prog.classes.push(self.class()?),
                Tok::Ident(k) if k == "main" => {
                    if prog.main.is_some() {
                        return self.err("duplicate `main` block");
                    }
                    prog.main = Some(self.main()?);
                }
                _ => {
                    return self.err(format!(
                        "expected `class` or `main`, found {}",
                        self.describe()
                    ))
                }
            }
        }
        Ok(prog)
    }

    fn class(&mut self) -> Result<ClassDecl, LangError> {
        let pos = self.pos();
        self.expect_kw("class")?;
        let name = self.ident()?;
        let extends = if self.eat_kw("extends") {
            Some(self.ident()?)
        } else {
            None
        };
        self.expect_sym("{")?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.is_sym("}") {
            let mpos = self.pos();
            let ty = self.type_name()?;
            let mname = self.ident()?;
            if self.is_sym("(") {
                methods.push(self.method_rest(mpos, ty, mname)?);
            } else {
                self.expect_sym(";")?;
                fields.push(Decl {
                    ty,
                    name: mname,
                    pos: mpos,
                });
            }
        }
        self.expect_sym("}")?;
        Ok(ClassDecl {
            name,
            extends,
            fields,
            methods,
            pos,
        })
    }

    fn method_rest(&mut self, pos: Pos, ret: TypeName, name: String) -> Result<MethodDecl, LangError> {
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.is_sym(")") {
            loop {
                let ppos = self.pos();
                let ty = self.type_name()?;
                let pname = self.ident()?;
                params.push(Decl {
                    ty,
                    name: pname,
                    pos: ppos,
                });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        self.expect_sym("{")?;
        let locals = self.decls()?;
        let body = self.seq()?;
        self.expect_sym("}")?;
        Ok(MethodDecl {
            ret,
            name,
            params,
            locals,
            body,
            pos,
        })
    }

    fn main(&mut self) -> Result<MainDecl, LangError> {
        let pos = self.pos();
        self.expect_kw("main")?;
        self.expect_sym("{")?;
        let locals = self.decls()?;
        let body = self.seq()?;
        self.expect_sym("}")?;
        Ok(MainDecl { locals, body, pos })
    }

    /// Local declarations `T v;` at the start of a body.
    fn decls(&mut self) -> Result<Vec<Decl>, LangError> {
        let mut out = Vec::new();
        loop {
            let starts_decl = match (self.peek(), self.peek_at(1)) {
                (Tok::Ident(a), Tok::Ident(b)) => (a == "int" || !is_keyword(a)) && !is_keyword(b),
                _ => false,
            };
            if !starts_decl {
                break;
            }
            let pos = self.pos();
            let ty = self.type_name()?;
            let name = self.ident()?;
            self.expect_sym(";")?;
            out.push(Decl { ty, name, pos });
        }
        Ok(out)
    }

    /// A sequence of commands up to (not including) `}` or end of input.
    fn seq(&mut self) -> Result<Vec<Stmt>, LangError> {
        let mut out = Vec::new();
        loop {
            if self.is_sym("}") || *self.peek() == Tok::Eof {
                break;
            }
            if self.eat_sym(";") {
                continue;
            }
            let s = self.stmt()?;
            let ended_with_block = self.prev_rbrace;
            out.push(s);
            if self.eat_sym(";") || ended_with_block {
                continue;
            }
            if self.is_sym("}") || *self.peek() == Tok::Eof {
                break;
            }
            return self.err(format!("expected `;`, found {}", self.describe()));
        }
        Ok(out)
    }

    /// A branch of `if`/`while`: a braced block or a single command.
    fn branch(&mut self) -> Result<(Vec<Stmt>, usize), LangError> {
        if self.eat_sym("{") {
            let body = self.seq()?;
            let end = self.pos().line;
            self.expect_sym("}")?;
            Ok((body, end))
        } else {
            let s = self.stmt()?;
            Ok((vec![s], self.prev_pos().line))
        }
    }

    fn guard(&mut self) -> Result<Expr, LangError> {
        let pos = self.pos();
        let e = self.expr()?;
        if e.has_side_effects() {
            return Err(LangError::GuardSideEffect { pos });
        }
        Ok(e)
    }

    fn stmt(&mut self) -> Result<Stmt, LangError> {
        let pos = self.pos();
        if self.eat_kw("skip") {
            return Ok(Stmt {
                pos,
                kind: StmtKind::Skip,
            });
        }
        if self.eat_kw("if") {
            let guard = self.guard()?;
            self.eat_kw("then");
            let (then_branch, _) = self.branch()?;
            let else_branch = if self.eat_kw("else") {
                self.branch()?.0
            } else {
                Vec::new()
            };
            return Ok(Stmt {
                pos,
                kind: StmtKind::If {
                    guard,
                    then_branch,
                    else_branch,
                },
            });
        }
        if self.eat_kw("while") {
            let guard = self.guard()?;
            self.eat_kw("do");
            let (body, end_line) = self.branch()?;
            return Ok(Stmt {
                pos,
                kind: StmtKind::While {
                    guard,
                    body,
                    end_line,
                },
            });
        }
        if self.eat_kw("return") {
            let e = self.expr()?;
            return Ok(Stmt {
                pos,
                kind: StmtKind::Return(e),
            });
        }
        let v = self.ident()?;
        if self.eat_sym(".") {
            let f = self.ident()?;
            self.expect_sym(":=")?;
            let e = self.expr()?;
            return Ok(Stmt {
                pos,
                kind: StmtKind::FieldAssign(v, f, e),
            });
        }
        self.expect_sym(":=")?;
        let e = self.expr()?;
        Ok(Stmt {
            pos,
            kind: StmtKind::Assign(v, e),
        })
    }

    fn expr(&mut self) -> Result<Expr, LangError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::Bin(Box::new(lhs), op, Box::new(rhs)))
    }

    fn additive(&mut self) -> Result<Expr, LangError> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            let r = self.term()?;
            e = Expr::Bin(Box::new(e), op, Box::new(r));
        }
    }

    fn term(&mut self) -> Result<Expr, LangError> {
        let mut e = self.atom()?;
        while self.eat_sym("*") {
            let r = self.atom()?;
            e = Expr::Bin(Box::new(e), BinOp::Mul, Box::new(r));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, LangError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Sym("-") => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        Ok(Expr::Int(n.wrapping_neg()))
                    }
                    _ => self.err("expected integer literal after `-`"),
                }
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(k) if k == "null" => {
                self.bump();
                Ok(Expr::Null)
            }
            Tok::Ident(k) if k == "new" => {
                self.bump();
                Ok(Expr::New(self.ident()?))
            }
            Tok::Ident(_) => {
                let v = self.ident()?;
                if !self.eat_sym(".") {
                    return Ok(Expr::Var(v));
                }
                let m = self.ident()?;
                if !self.eat_sym("(") {
                    return Ok(Expr::Field(v, m));
                }
                let mut args = Vec::new();
                if !self.is_sym(")") {
                    loop {
                        args.push(self.ident()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
                Ok(Expr::Call {
                    recv: v,
                    method: m,
                    args,
                })
            }
            _ => self.err(format!("expected expression, found {}", self.describe())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source() {
        let p = parse_program("").unwrap();
        assert!(p.classes.is_empty());
        assert!(p.main.is_none());
    }

    #[test]
    fn guard_side_effect_rejected() {
        let src = "main { Node x; while (x.m()) do skip }";
        assert!(matches!(
            parse_program(src),
            Err(LangError::GuardSideEffect { .. })
        ));
        let src = "main { Node x; if (new Node) then skip }";
        assert!(matches!(
            parse_program(src),
            Err(LangError::GuardSideEffect { .. })
        ));
    }

    #[test]
    fn tree_join() {
        let src = "class Tree {\n Tree left;\n Tree right;\n Tree parent;\n\
                   Tree join(Tree l, Tree r) {\n Tree t; t := new Tree;\n t.left := l;\n t.right := r;\n\
                   if (l!=null) then l.parent := t;\n if (r!=null) then r.parent := t;\n return t;\n }\n}\n";
        let p = parse_program(src).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].fields.len(), 3);
        assert_eq!(p.classes[0].methods.len(), 1);
        let m = &p.classes[0].methods[0];
        assert_eq!(m.params.len(), 2);
        assert_eq!(m.locals.len(), 1);
        assert_eq!(m.body.len(), 6);
    }

    #[test]
    fn while_block_without_semicolon() {
        let src = "main { int i; i := 0; while (i < 3) { i := i + 1; } i := 5 }";
        let p = parse_program(src).unwrap();
        assert_eq!(p.main.unwrap().body.len(), 3);
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_program("main {\n x := ;\n}") {
            Err(LangError::Syntax { pos, .. }) => assert_eq!(pos.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
