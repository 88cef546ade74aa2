//! The four subcommands. Each returns its standard output on success or a
//! [`Failure`] carrying the exit code and the diagnostics for standard error.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use xmlgram::analysis::PredictTable;
use xmlgram::ast::Grammar;
use xmlgram::engine::{self, ParseError};
use xmlgram::frontend::{parse_grammar, pretty_grammar};
use xmlgram::normalize::normalize_grammar;
use xmlgram::oracle::{Oracle, OracleConfig, DEFAULT_MAX_DERIVATIONS};
use xmlgram::sax::{read_events, SaxError, SaxErrorKind, SaxReader};
use xmlgram::value::Value;
use xmlgram::wellformed::check_grammar;
use xmlgram::xml::build_trees;

pub const EXIT_LANGUAGE: u8 = 1;
pub const EXIT_IO: u8 = 2;

pub const MAX_DERIVATIONS_VAR: &str = "XMLGRAM_MAX_DERIVATIONS";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub messages: Vec<String>,
    /// Output produced before the failure, such as a table with conflicts.
    pub output: String,
}

impl Failure {
    fn language(messages: Vec<String>) -> Self {
        Failure { code: EXIT_LANGUAGE, messages, output: String::new() }
    }

    fn io(message: String) -> Self {
        Failure { code: EXIT_IO, messages: vec![message], output: String::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Kv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueFormat {
    Term,
    Json,
}

pub struct ParseOptions<'a> {
    pub start: Option<&'a str>,
    pub format: ValueFormat,
    pub oracle: bool,
    pub keep_whitespace: bool,
    /// Raw value of the derivation cap variable, if set.
    pub max_derivations: Option<String>,
}

fn load(path: &Path) -> Result<Grammar, Failure> {
    let source = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let g = parse_grammar(&source)
        .map_err(|diags| Failure::language(diags.iter().map(|d| format!("{}:{d}", path.display())).collect()))?;
    let errors = check_grammar(&g);
    if !errors.is_empty() {
        return Err(Failure::language(errors.iter().map(|e| format!("{}: {e}", path.display())).collect()));
    }
    Ok(g)
}

/// Normalizes and tabulates; `None` for a grammar without rules.
fn tabulate(g: &Grammar, start: Option<&str>) -> Result<Option<PredictTable>, Failure> {
    let Some(start) = start.or(g.first_clause()) else {
        return Ok(None);
    };
    PredictTable::build(normalize_grammar(g), start)
        .map(Some)
        .map_err(|e| Failure::language(vec![e.to_string()]))
}

fn conflict_messages(table: &PredictTable) -> Vec<String> {
    table.conflicts().iter().map(ToString::to_string).collect()
}

pub fn check(path: &Path) -> Result<String, Failure> {
    let g = load(path)?;
    let rules = g.clause_names().len();
    if let Some(table) = tabulate(&g, None)? {
        if !table.is_ll1() {
            let mut messages = conflict_messages(&table);
            messages.push(format!("{}: grammar is not LL(1)", path.display()));
            return Err(Failure::language(messages));
        }
    }
    Ok(format!("{}: ok ({rules} rules, LL(1))\n", path.display()))
}

pub fn tables(path: &Path, format: TableFormat) -> Result<String, Failure> {
    let g = load(path)?;
    let Some(table) = tabulate(&g, None)? else {
        return Ok(String::new());
    };
    let output = match format {
        TableFormat::Text => table.render_text(),
        TableFormat::Kv => table.render_kv(),
    };
    if table.is_ll1() {
        Ok(output)
    } else {
        Err(Failure { code: EXIT_LANGUAGE, messages: conflict_messages(&table), output })
    }
}

pub fn normalize(path: &Path) -> Result<String, Failure> {
    let g = load(path)?;
    Ok(pretty_grammar(&normalize_grammar(&g)))
}

pub fn parse(path: &Path, doc: &Path, opts: &ParseOptions) -> Result<String, Failure> {
    let g = load(path)?;
    let start = match opts.start.or(g.first_clause()) {
        Some(s) if g.has_clause(s) => s.to_string(),
        Some(s) => return Err(Failure::language(vec![format!("start rule {s} is not defined")])),
        None => return Err(Failure::language(vec!["grammar has no rules".to_string()])),
    };
    let file = File::open(doc).map_err(|e| Failure::io(format!("{}: {e}", doc.display())))?;
    let input = BufReader::new(file);
    let value = if opts.oracle {
        parse_with_oracle(&g, &start, doc, input, opts)?
    } else {
        let table = tabulate(&g, Some(&start))?.expect("grammar has rules");
        if !table.is_ll1() {
            let mut messages = conflict_messages(&table);
            messages.push("grammar is not LL(1); --oracle parses it by search".to_string());
            return Err(Failure::language(messages));
        }
        let reader = SaxReader::new(input).keep_whitespace(opts.keep_whitespace);
        engine::run(&table, &start, &[], reader).map_err(|e| match e {
            ParseError::Input(err) => sax_failure(doc, err),
            other => Failure::language(vec![format!("{}: {other}", doc.display())]),
        })?
    };
    Ok(render(&value, opts.format))
}

fn parse_with_oracle(
    g: &Grammar,
    start: &str,
    doc: &Path,
    input: BufReader<File>,
    opts: &ParseOptions,
) -> Result<Value, Failure> {
    let max_derivations = match &opts.max_derivations {
        None => DEFAULT_MAX_DERIVATIONS,
        Some(raw) => raw.trim().parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| {
            Failure::io(format!("{MAX_DERIVATIONS_VAR} must be a positive integer, got {raw:?}"))
        })?,
    };
    let events = read_events(input, opts.keep_whitespace).map_err(|e| sax_failure(doc, e))?;
    let trees = build_trees(events).map_err(|e| Failure::language(vec![format!("{}: {e}", doc.display())]))?;
    let oracle = Oracle::with_config(g, OracleConfig { max_derivations, ..OracleConfig::default() });
    let acceptance = oracle
        .accepts_forest(start, &[], &trees)
        .map_err(|e| Failure::language(vec![format!("{}: {e}", doc.display())]))?;
    let truncated = acceptance
        .truncated
        .then(|| format!("search stopped after {max_derivations} derivations ({MAX_DERIVATIONS_VAR})"));
    match acceptance.values.as_slice() {
        [] => {
            let mut messages = vec![format!("{}: document is not accepted by rule {start}", doc.display())];
            messages.extend(truncated);
            Err(Failure::language(messages))
        }
        [v, rest @ ..] => {
            if !rest.is_empty() {
                eprintln!("warning: {} distinct values; printing the first", rest.len() + 1);
            }
            if let Some(t) = truncated {
                eprintln!("warning: {t}");
            }
            Ok(v.clone())
        }
    }
}

fn sax_failure(doc: &Path, err: SaxError) -> Failure {
    let message = format!("{}:{err}", doc.display());
    match err.kind {
        SaxErrorKind::Io(_) => Failure::io(message),
        _ => Failure::language(vec![message]),
    }
}

fn render(v: &Value, format: ValueFormat) -> String {
    match format {
        ValueFormat::Term => format!("{v}\n"),
        ValueFormat::Json => {
            let json = v.flatten_lists().to_json();
            format!("{}\n", serde_json::to_string_pretty(&json).expect("values serialize"))
        }
    }
}
