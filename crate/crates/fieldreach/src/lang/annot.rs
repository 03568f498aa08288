//! `//@ init ...` annotation lines describing the entry abstract state.
//!
//! ```text
//! //@ init reach(a,b): [[f,g],[]]   reachability from a to b (model list)
//! //@ init reach(a,b): true         unconstrained reachability
//! //@ init cyc(a): [[]]             cyclicity of a
//! //@ init ds(a,b)                  a and b may deep-share
//! ```
//! Entries that are not annotated are `false` (and no deep-sharing).

use super::ast::RawAnnotation;
use super::error::LangError;

/// A model list, or `true`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    True,
    Models(Vec<Vec<String>>),
}

/// A parsed annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitAnnotation {
    Reach {
        line: usize,
        from: String,
        to: String,
        models: ModelSpec,
    },
    Cyc {
        line: usize,
        var: String,
        models: ModelSpec,
    },
    Ds {
        line: usize,
        a: String,
        b: String,
    },
}

impl InitAnnotation {
    pub fn line(&self) -> usize {
        match self {
            InitAnnotation::Reach { line, .. }
            | InitAnnotation::Cyc { line, .. }
            | InitAnnotation::Ds { line, .. } => *line,
        }
    }
}

/// Parses all `init` annotations; other `//@` lines are ignored.
pub fn parse_init_annotations(raw: &[RawAnnotation]) -> Result<Vec<InitAnnotation>, LangError> {
    let mut out = Vec::new();
    for r in raw {
        let Some(rest) = r.text.strip_prefix("init") else {
            continue;
        };
        out.push(parse_one(r.line, rest.trim())?);
    }
    Ok(out)
}

fn err(line: usize, msg: impl Into<String>) -> LangError {
    LangError::Annotation {
        line,
        msg: msg.into(),
    }
}

fn parse_one(line: usize, s: &str) -> Result<InitAnnotation, LangError> {
    let open = s.find('(').ok_or_else(|| err(line, "expected `(`"))?;
    let close = s.find(')').ok_or_else(|| err(line, "expected `)`"))?;
    if close < open {
        return Err(err(line, "malformed argument list"));
    }
    let kind = s[..open].trim();
    let args: Vec<String> = s[open + 1..close]
        .split(',')
        .map(|a| a.trim().to_string())
        .filter(|a| !a.is_empty())
        .collect();
    let tail = s[close + 1..].trim();
    let models = || -> Result<ModelSpec, LangError> {
        let body = tail
            .strip_prefix(':')
            .ok_or_else(|| err(line, "expected `:` followed by a model list"))?
            .trim();
        parse_models(line, body)
    };
    match (kind, args.len()) {
        ("reach", 2) => Ok(InitAnnotation::Reach {
            line,
            from: args[0].clone(),
            to: args[1].clone(),
            models: models()?,
        }),
        ("cyc", 1) => Ok(InitAnnotation::Cyc {
            line,
            var: args[0].clone(),
            models: models()?,
        }),
        ("ds", 2) => {
            if !tail.is_empty() {
                return Err(err(line, "unexpected text after `ds(..)`"));
            }
            Ok(InitAnnotation::Ds {
                line,
                a: args[0].clone(),
                b: args[1].clone(),
            })
        }
        _ => Err(err(line, format!("unknown annotation `{kind}` with {} arguments", args.len()))),
    }
}

/// Parses `true`, `false` or a list of field lists such as `[[f,g],[]]`.
pub fn parse_models(line: usize, s: &str) -> Result<ModelSpec, LangError> {
    let s = s.trim();
    match s {
        "true" => return Ok(ModelSpec::True),
        "false" => return Ok(ModelSpec::Models(Vec::new())),
        _ => {}
    }
    let inner = s
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| err(line, "model list must be enclosed in `[ ]`"))?
        .trim();
    let mut models = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        let r = rest
            .strip_prefix('[')
            .ok_or_else(|| err(line, "expected `[` starting a model"))?;
        let end = r.find(']').ok_or_else(|| err(line, "unterminated model"))?;
        let fields: Vec<String> = r[..end]
            .split(',')
            .map(|f| f.trim().to_string())
            .filter(|f| !f.is_empty())
            .collect();
        models.push(fields);
        rest = r[end + 1..].trim_start();
        if let Some(x) = rest.strip_prefix(',') {
            rest = x.trim_start();
        }
    }
    Ok(ModelSpec::Models(models))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(text: &str) -> Vec<RawAnnotation> {
        vec![RawAnnotation {
            line: 3,
            text: text.to_string(),
        }]
    }

    #[test]
    fn reach_and_cyc() {
        let a = parse_init_annotations(&raw("init reach(l,l): [[]]")).unwrap();
        assert_eq!(
            a[0],
            InitAnnotation::Reach {
                line: 3,
                from: "l".into(),
                to: "l".into(),
                models: ModelSpec::Models(vec![vec![]])
            }
        );
        let a = parse_init_annotations(&raw("init cyc(x): [[n, p], []]")).unwrap();
        assert_eq!(
            a[0],
            InitAnnotation::Cyc {
                line: 3,
                var: "x".into(),
                models: ModelSpec::Models(vec![vec!["n".into(), "p".into()], vec![]])
            }
        );
        let a = parse_init_annotations(&raw("init ds(a, b)")).unwrap();
        assert!(matches!(a[0], InitAnnotation::Ds { .. }));
    }

    #[test]
    fn malformed() {
        assert!(parse_init_annotations(&raw("init reach(a): [[]]")).is_err());
        assert!(parse_init_annotations(&raw("init cyc(a) [[]]")).is_err());
        assert!(parse_init_annotations(&raw("init cyc(a): [f]")).is_err());
    }
}
