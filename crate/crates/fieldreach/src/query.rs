//! Queries on the final state of the entry method, the interface a
//! termination prover consumes:
//!
//! * `cyc v {f1,f2}` — may a cycle reachable from `v` traverse exactly
//!   these fields? (`true` cannot be excluded, `false` is guaranteed);
//! * `reach v w` — the viable models of `reach(v, w)`.

use serde_json::{json, Value};
use thiserror::Error;

use crate::semantics::Analysis;

/// A parsed query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Cyc { var: String, fields: Vec<String> },
    Reach { from: String, to: String },
}

/// Query errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("malformed query `{0}` (expected `cyc v {{f,..}}` or `reach v w`)")]
    Syntax(String),
    #[error("unknown variable `{0}` in query")]
    UnknownVariable(String),
    #[error("unknown field `{0}` in query")]
    UnknownField(String),
}

/// The answer to a query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Cyc(bool),
    Reach(Vec<Vec<String>>),
}

impl Answer {
    /// Text rendering: `true`/`false`, or the model list.
    pub fn render(&self) -> String {
        match self {
            Answer::Cyc(b) => b.to_string(),
            Answer::Reach(ms) => {
                let items: Vec<String> = ms.iter().map(|m| format!("{{{}}}", m.join(","))).collect();
                format!("[{}]", items.join(", "))
            }
        }
    }

    /// JSON rendering.
    pub fn to_json(&self) -> Value {
        match self {
            Answer::Cyc(b) => json!(b),
            Answer::Reach(ms) => json!(ms),
        }
    }
}

/// Parses `cyc v {f,g}` or `reach v w`.
pub fn parse_query(s: &str) -> Result<Query, QueryError> {
    let err = || QueryError::Syntax(s.to_string());
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("cyc") {
        let rest = rest.trim_start();
        let (var, set) = rest.split_once(char::is_whitespace).ok_or_else(err)?;
        let set = set.trim();
        let inner = set
            .strip_prefix('{')
            .and_then(|x| x.strip_suffix('}'))
            .ok_or_else(err)?;
        let fields = inner
            .split(',')
            .map(str::trim)
            .filter(|f| !f.is_empty())
            .map(str::to_string)
            .collect();
        return Ok(Query::Cyc {
            var: var.to_string(),
            fields,
        });
    }
    if let Some(rest) = s.strip_prefix("reach") {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        if let [a, b] = parts[..] {
            return Ok(Query::Reach {
                from: a.to_string(),
                to: b.to_string(),
            });
        }
    }
    Err(err())
}

/// Answers a query on the state at the end of the entry method.
pub fn answer(an: &Analysis, q: &Query) -> Result<Answer, QueryError> {
    let scope = an.result.entry_scope();
    let var = |n: &str| {
        scope
            .var(n)
            .filter(|&v| v < scope.n_method && scope.is_ref(v))
            .ok_or_else(|| QueryError::UnknownVariable(n.to_string()))
    };
    match q {
        Query::Cyc { var: v, fields } => {
            let v = var(v)?;
            let mut mask = 0;
            for f in fields {
                mask |= an
                    .space
                    .bit(f)
                    .or_else(|| an.space.mask_of(&[f]).ok())
                    .ok_or_else(|| QueryError::UnknownField(f.clone()))?;
            }
            Ok(Answer::Cyc(crate::semantics::query_cycle_in(
                &an.result.exit.rc,
                &an.space,
                v,
                mask,
            )))
        }
        Query::Reach { from, to } => {
            let (a, b) = (var(from)?, var(to)?);
            let f = an.result.exit.rc.reach(a, b);
            Ok(Answer::Reach(
                an.space
                    .display_models(f)
                    .into_iter()
                    .map(|m| an.space.names_of(m))
                    .collect(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_queries() {
        assert_eq!(
            parse_query("cyc x {left}").unwrap(),
            Query::Cyc {
                var: "x".into(),
                fields: vec!["left".into()]
            }
        );
        assert_eq!(
            parse_query("cyc x {}").unwrap(),
            Query::Cyc {
                var: "x".into(),
                fields: vec![]
            }
        );
        assert_eq!(
            parse_query(" reach a b ").unwrap(),
            Query::Reach {
                from: "a".into(),
                to: "b".into()
            }
        );
        assert!(parse_query("cyc x left").is_err());
        assert!(parse_query("reach a").is_err());
        assert!(parse_query("size x").is_err());
    }
}
