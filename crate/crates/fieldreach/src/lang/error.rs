//! Front-end diagnostics.

use super::ast::Pos;
use thiserror::Error;

/// Errors raised while lexing, parsing, building the class table or
/// type checking a program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("lexical error at {pos}: {msg}")]
    Lex { pos: Pos, msg: String },
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("guard with side effects at {pos}: conditions may not call methods or allocate")]
    GuardSideEffect { pos: Pos },
    #[error("class error: {0}")]
    Class(String),
    #[error("type error at {pos}: {msg}")]
    Type { pos: Pos, msg: String },
    #[error("annotation error at line {line}: {msg}")]
    Annotation { line: usize, msg: String },
}

impl LangError {
    pub(crate) fn ty(pos: Pos, msg: impl Into<String>) -> Self {
        LangError::Type {
            pos,
            msg: msg.into(),
        }
    }
}
