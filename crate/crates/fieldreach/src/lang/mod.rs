//! The object-oriented input language: syntax, class table and typing.

pub mod annot;
pub mod ast;
pub mod classtable;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod typeck;

pub use annot::{parse_init_annotations, InitAnnotation, ModelSpec};
pub use ast::Program;
pub use classtable::{build_class_table, ClassId, ClassTable, FieldId, Ty};
pub use error::LangError;
pub use parser::parse_program;
pub use pretty::pretty_program;
pub use typeck::{type_check, CallSite, Cmd, CmdKind, Ex, Method, MethodId, Module, StmtId, Var, VarId, OUT, THIS};
