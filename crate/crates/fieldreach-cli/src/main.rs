//! `analyze`: command-line front end of the field-sensitive reachability
//! and cyclicity analyzer.
//!
//! Exit codes: `0` on success, `1` when the program cannot be analysed
//! (lexical, syntax, type or annotation errors, or a soundness violation
//! found by `--oracle-check`), `2` on usage errors (bad flags, unreadable
//! input, unknown entry method, field or query variable).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use fieldreach::compare::{describe, TypeContext};
use fieldreach::formula::FormulaError;
use fieldreach::lang::{Module, Ty};
use fieldreach::oracle::{check_soundness, run_concrete, DEFAULT_STEP_BUDGET};
use fieldreach::query::{answer, parse_query, Query};
use fieldreach::report::{ds_listing, empty_json_report, json_report, text_summary, text_table, ReportMeta};
use fieldreach::semantics::{run, Analysis, AnalysisConfig, AnalysisError, DEFAULT_WIDEN};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Field-sensitive reachability and cyclicity analysis of a small
/// object-oriented language.
#[derive(Parser, Debug)]
#[command(name = "analyze", version, about)]
struct Cli {
    /// Source file to analyse.
    input: PathBuf,

    /// Entry method (`name` or `Class.name`); defaults to `main`, or to
    /// the last method when there is no `main`.
    #[arg(long)]
    entry: Option<String>,

    /// Fields to track, comma-separated, or `all` (the default). Untracked
    /// fields are summarised by the single proposition `ANY`.
    #[arg(long, value_name = "LIST")]
    track_fields: Option<String>,

    /// Widening threshold: number of growing iterations allowed per entry
    /// before it jumps to TRUE, or `off`.
    #[arg(long, value_name = "K|off")]
    widen: Option<String>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Print the per-line trace table of the entry method and its
    /// deep-sharing listing.
    #[arg(long)]
    dump_lines: bool,

    /// A query on the final state of the entry method: `cyc v {f,g}` or
    /// `reach v w`. May be repeated.
    #[arg(long, value_name = "QUERY")]
    query: Vec<String>,

    /// Also print the final state abstracted into the simpler domains
    /// (monotone formulae, excluded fields, required fields, reachability
    /// without fields, class pairs).
    #[arg(long)]
    compare_domains: bool,

    /// Execute the (closed) entry method concretely and check every
    /// reached state against the analysis result.
    #[arg(long)]
    oracle_check: bool,

    /// Step budget of the concrete interpreter used by `--oracle-check`.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_STEP_BUDGET)]
    heap_budget: usize,

    /// Include wall-clock timings in JSON output (makes it
    /// non-reproducible).
    #[arg(long)]
    timings: bool,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
    fn analysis(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn parse_widen(s: Option<&str>) -> Result<Option<usize>, Failure> {
    match s {
        None => Ok(Some(DEFAULT_WIDEN)),
        Some("off") => Ok(None),
        Some(k) => match k.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(Failure::usage(format!(
                "invalid --widen value `{k}` (expected a positive integer or `off`)"
            ))),
        },
    }
}

fn parse_tracked(s: Option<&str>) -> Option<Vec<String>> {
    match s.map(str::trim) {
        None | Some("all") => None,
        Some(list) => Some(
            list.split(',')
                .map(str::trim)
                .filter(|f| !f.is_empty())
                .map(str::to_string)
                .collect(),
        ),
    }
}

fn classify(e: AnalysisError) -> Failure {
    match &e {
        AnalysisError::UnknownEntry(_) | AnalysisError::Formula(FormulaError::UnknownField(_)) => {
            Failure::usage(e.to_string())
        }
        _ => Failure::analysis(e.to_string()),
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let src = std::fs::read_to_string(&cli.input)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", cli.input.display())))?;
    let widen = parse_widen(cli.widen.as_deref())?;
    let queries = cli
        .query
        .iter()
        .map(|q| parse_query(q).map(|p| (q.clone(), p)))
        .collect::<Result<Vec<(String, Query)>, _>>()
        .map_err(|e| Failure::usage(e.to_string()))?;

    // A program without methods has nothing to analyse.
    let module = Module::from_source(&src).map_err(|e| Failure::analysis(e.to_string()))?;
    if module.methods.is_empty() && cli.entry.is_none() {
        return Ok(match cli.format {
            Format::Json => format!("{}\n", pretty(&empty_json_report(&module))),
            Format::Text => "no methods to analyse\n".to_string(),
        });
    }

    let cfg = AnalysisConfig {
        entry: cli.entry.clone(),
        tracked: parse_tracked(cli.track_fields.as_deref()),
        widen,
        ..AnalysisConfig::default()
    };
    let t0 = Instant::now();
    let an = run(&src, &cfg).map_err(classify)?;
    let analysis_ms = t0.elapsed().as_secs_f64() * 1e3;

    let answers = queries
        .iter()
        .map(|(text, q)| answer(&an, q).map(|a| (text.clone(), a)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage(e.to_string()))?;

    let oracle = if cli.oracle_check {
        let t1 = Instant::now();
        let concrete = run_concrete(&an.module, an.result.entry, cli.heap_budget)
            .map_err(|e| Failure::analysis(format!("concrete execution failed: {e}")))?;
        let rep = check_soundness(&an.module, &an.space, &an.result, &concrete);
        Some((rep, t1.elapsed().as_secs_f64() * 1e3))
    } else {
        None
    };

    let out = match cli.format {
        Format::Text => {
            let mut s = String::new();
            if cli.dump_lines {
                s.push_str(&text_table(&an));
                s.push_str("deep sharing at the fixpoint:\n");
                for (line, ds) in ds_listing(&an.module, &an.result) {
                    s.push_str(&format!("{line}: [{}]\n", ds.join(", ")));
                }
            }
            s.push_str(&text_summary(&an));
            if cli.compare_domains {
                s.push_str("domain comparison:\n");
                for l in domain_lines(&an) {
                    s.push_str(&format!("  {l}\n"));
                }
            }
            for (text, a) in &answers {
                s.push_str(&format!("{text} = {}\n", a.render()));
            }
            if let Some((rep, _)) = &oracle {
                s.push_str(&format!(
                    "oracle: {} states checked, {} violations\n",
                    rep.states_checked,
                    rep.violations.len()
                ));
                for v in &rep.violations {
                    s.push_str(&format!("  line {}: {:?} {{{}}}: {}\n", v.line, v.kind, v.model.join(","), v.witness));
                }
            }
            s
        }
        Format::Json => {
            let mut meta = ReportMeta::default();
            if cli.timings {
                meta.timings_ms = BTreeMap::from([("analysis".to_string(), analysis_ms)]);
                if let Some((_, ms)) = &oracle {
                    meta.timings_ms.insert("oracle".to_string(), *ms);
                }
            }
            let mut v = json_report(&an, &meta);
            let obj = v.as_object_mut().expect("report is an object");
            if !answers.is_empty() {
                let qs: Vec<Value> = answers
                    .iter()
                    .map(|(text, a)| json!({ "query": text, "answer": a.to_json() }))
                    .collect();
                obj.insert("queries".into(), Value::Array(qs));
            }
            if cli.compare_domains {
                obj.insert("domains".into(), json!(domain_lines(&an)));
            }
            if let Some((rep, _)) = &oracle {
                let vs: Vec<Value> = rep
                    .violations
                    .iter()
                    .map(|v| json!({ "line": v.line, "kind": format!("{:?}", v.kind), "model": v.model, "witness": v.witness }))
                    .collect();
                obj.insert(
                    "oracle".into(),
                    json!({ "states_checked": rep.states_checked, "violations": vs }),
                );
            }
            format!("{}\n", pretty(&v))
        }
    };

    if let Some((rep, _)) = &oracle {
        if !rep.is_sound() {
            print!("{out}");
            return Err(Failure::analysis(format!(
                "{} soundness violation(s) found",
                rep.violations.len()
            )));
        }
    }
    Ok(out)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialise")
}

/// The final entry state abstracted into the comparison domains.
fn domain_lines(an: &Analysis) -> Vec<String> {
    let scope = an.result.entry_scope();
    let shown = scope.shown();
    let types = (0..scope.len())
        .map(|v| match scope.tys[v] {
            Ty::Ref(c) if shown.contains(&v) => Some(c),
            _ => None,
        })
        .collect();
    let tc = TypeContext {
        ct: &an.module.ct,
        types,
    };
    describe(&an.result.exit.rc, &scope.names, &tc, &an.space)
}
