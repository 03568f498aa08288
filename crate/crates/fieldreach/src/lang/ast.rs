//! Surface syntax tree produced by the parser.
//!
//! Names are kept as plain strings here; resolution to class, field,
//! variable and method indices happens in [`crate::lang::typeck`].

use std::fmt;

/// A source position (1-based line and column).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A declared type: `int` or a class name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeName {
    Int,
    Class(String),
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeName::Int => write!(f, "int"),
            TypeName::Class(c) => write!(f, "{c}"),
        }
    }
}

/// A typed name: a field, a formal parameter or a local variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub ty: TypeName,
    pub name: String,
    pub pos: Pos,
}

/// Binary operators on integers (and reference equality for `==`/`!=`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    /// Comparison operators yield `0`/`1`.
    pub fn is_comparison(self) -> bool {
        !matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }
}

/// Expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Null,
    Var(String),
    Field(String, String),
    Bin(Box<Expr>, BinOp, Box<Expr>),
    New(String),
    Call {
        recv: String,
        method: String,
        args: Vec<String>,
    },
}

impl Expr {
    /// True if the expression contains a method call or an allocation.
    pub fn has_side_effects(&self) -> bool {
        match self {
            Expr::Call { .. } | Expr::New(_) => true,
            Expr::Bin(a, _, b) => a.has_side_effects() || b.has_side_effects(),
            _ => false,
        }
    }
}

/// A command together with its source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub pos: Pos,
    pub kind: StmtKind,
}

/// Commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Skip,
    Assign(String, Expr),
    FieldAssign(String, String, Expr),
    If {
        guard: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    While {
        guard: Expr,
        body: Vec<Stmt>,
        /// Line of the closing brace of a braced body (the line of the
        /// last body command otherwise).
        end_line: usize,
    },
    Return(Expr),
}

/// A method definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodDecl {
    pub ret: TypeName,
    pub name: String,
    pub params: Vec<Decl>,
    pub locals: Vec<Decl>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

/// A class declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub extends: Option<String>,
    pub fields: Vec<Decl>,
    pub methods: Vec<MethodDecl>,
    pub pos: Pos,
}

/// The top-level `main { ... }` block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainDecl {
    pub locals: Vec<Decl>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

/// A `//@ init ...` annotation line, kept verbatim for later parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawAnnotation {
    pub line: usize,
    pub text: String,
}

/// A whole program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub classes: Vec<ClassDecl>,
    pub main: Option<MainDecl>,
    pub annotations: Vec<RawAnnotation>,
}
