//! Tokenizer.
//!
//! Identifiers are ASCII letters, digits and underscores, not starting
//! with a digit. Integer literals are decimal and must fit in `i64`.
//! `//` starts a line comment; a comment starting with `//@` is kept as
//! an annotation line.

use super::ast::{Pos, RawAnnotation};
use super::error::LangError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: [&str; 17] = [
    ":=", "<=", ">=", "==", "!=", "{", "}", "(", ")", ";", ",", ".", "+", "-", "*", "<", ">",
];

/// Splits `src` into tokens and collects annotation comments.
pub fn tokenize(src: &str) -> Result<(Vec<Token>, Vec<RawAnnotation>), LangError> {
    let mut toks = Vec::new();
    let mut anns = Vec::new();
    for (lno, line) in src.lines().enumerate() {
        let line_no = lno + 1;
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let pos = Pos {
                line: line_no,
                col: i + 1,
            };
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if line[i..].starts_with("//") {
                if let Some(rest) = line[i..].strip_prefix("//@") {
                    anns.push(RawAnnotation {
                        line: line_no,
                        text: rest.trim().to_string(),
                    });
                }
                break;
            }
            if c.is_ascii_alphabetic() || c == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push(Token {
                    tok: Tok::Ident(line[start..i].to_string()),
                    pos,
                });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &line[start..i];
                let v: i64 = text.parse().map_err(|_| LangError::Lex {
                    pos,
                    msg: format!("integer literal `{text}` out of range"),
                })?;
                toks.push(Token {
                    tok: Tok::Int(v),
                    pos,
                });
                continue;
            }
            match SYMBOLS.iter().find(|s| line[i..].starts_with(**s)) {
                Some(s) => {
                    toks.push(Token {
                        tok: Tok::Sym(s),
                        pos,
                    });
                    i += s.len();
                }
                None => {
                    let ch = line[i..].chars().next().unwrap_or('?');
                    return Err(LangError::Lex {
                        pos,
                        msg: format!("unexpected character `{ch}`"),
                    });
                }
            }
        }
    }
    let last = src.lines().count().max(1);
    toks.push(Token {
        tok: Tok::Eof,
        pos: Pos { line: last, col: 1 },
    });
    Ok((toks, anns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_and_comments() {
        let (t, a) = tokenize("x := y.f; // hi\n//@ init cyc(x): [[]]\nwhile (i<=10)").unwrap();
        let kinds: Vec<_> = t.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(kinds[1], Tok::Sym(":="));
        assert_eq!(kinds[3], Tok::Sym("."));
        assert!(kinds.contains(&Tok::Sym("<=")));
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].line, 2);
        assert_eq!(a[0].text, "init cyc(x): [[]]");
    }

    #[test]
    fn bad_character() {
        assert!(matches!(tokenize("x := #"), Err(LangError::Lex { .. })));
    }
}
