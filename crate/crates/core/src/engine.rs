//! The predictive parsing machine.
//!
//! The machine consumes SAX events one at a time under a conflict-free
//! predict table and synthesizes a value without building the document tree.
//! Every program item leaves exactly one value on the value stack: sequences
//! are run with a `Discard` between items, so the value of a sequence is the
//! value of its last item.
//!
//! Calls in tail position push no frame. A call whose only continuation is
//! `v = call {C(..., v, ...)}` also pushes no frame: the other constructor
//! arguments are evaluated immediately and the constructor is applied when
//! the call returns. This keeps the dump shallow for right-recursive list
//! rules such as the ones produced for repetition.

use std::fmt;

use crate::analysis::PredictTable;
use crate::ast::{Body, Expr};
use crate::expr::{eval_actions, eval_expr, eval_guard, EvalError};
use crate::oracle::bind_into;
use crate::sax::SaxError;
use crate::value::{Env, Value};
use crate::xml::{SaxEvent, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramItem {
    Body(Body),
    /// Skipping the subtree of an element matched by `ANY`; `nested` counts
    /// open descendants.
    AnyEnd { tag: String, nested: usize },
    BindInstr(Vec<String>),
    TagEnd(String),
    Discard,
}

/// A constructor application waiting for the result of a call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingConstruct {
    pub ctor: String,
    pub args: Vec<Value>,
    pub hole: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DumpEntry {
    Frame { program: Vec<ProgramItem>, env: Env },
    /// Constructors to wrap around the returned value, outermost first.
    Wrap(Vec<PendingConstruct>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureReason {
    NoPredictEntry { rule: String, token: Token },
    TagMismatch { expected: String, found: String },
    GuardNonBoolean,
    UnexpectedEndOfEvents,
    MissingAttribute { tag: String, attr: String },
    BindArityMismatch { names: usize, value: Value },
    Eval(EvalError),
    UndefinedRule(String),
    NotNormalForm,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::NoPredictEntry { rule, token } => write!(f, "rule {rule} cannot start with {token}"),
            FailureReason::TagMismatch { expected, found } => write!(f, "expected {expected}, found {found}"),
            FailureReason::GuardNonBoolean => f.write_str("guard is not a boolean"),
            FailureReason::UnexpectedEndOfEvents => f.write_str("unexpected end of input"),
            FailureReason::MissingAttribute { tag, attr } => write!(f, "element {tag} has no attribute {attr}"),
            FailureReason::BindArityMismatch { names, value } => {
                write!(f, "cannot bind {names} names to {value}")
            }
            FailureReason::Eval(e) => write!(f, "{e}"),
            FailureReason::UndefinedRule(r) => write!(f, "rule {r} is not defined"),
            FailureReason::NotNormalForm => f.write_str("grammar is not in normal form"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("parse failed at event {position}: {reason}")]
    Failure { reason: FailureReason, position: usize },
    #[error("input continues after the start rule finished (event {position})")]
    IncompleteParse { position: usize },
    #[error("table was built for start rule {table}, not {requested}")]
    StartMismatch { table: String, requested: String },
    #[error(transparent)]
    Input(#[from] SaxError),
}

impl ParseError {
    pub fn reason(&self) -> Option<&FailureReason> {
        match self {
            ParseError::Failure { reason, .. } => Some(reason),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    pub steps: usize,
    pub events: usize,
    pub max_dump_depth: usize,
}

pub enum Step {
    Running,
    Done(Value),
}

pub struct Machine<'t, I> {
    table: &'t PredictTable,
    /// Remaining program, next item last.
    program: Vec<ProgramItem>,
    env: Env,
    values: Vec<Value>,
    dump: Vec<DumpEntry>,
    events: I,
    lookahead: Option<SaxEvent>,
    at_end: bool,
    stats: RunStats,
}

impl<'t, I> Machine<'t, I>
where
    I: Iterator<Item = Result<SaxEvent, SaxError>>,
{
    pub fn new(table: &'t PredictTable, start: &str, args: &[Value], events: I) -> Result<Self, ParseError> {
        if table.start() != start {
            return Err(ParseError::StartMismatch { table: table.start().to_string(), requested: start.to_string() });
        }
        let call = Body::Call(start.to_string(), args.iter().map(value_expr).collect());
        Ok(Machine {
            table,
            program: vec![ProgramItem::Body(call)],
            env: Env::new(),
            values: Vec::new(),
            dump: Vec::new(),
            events,
            lookahead: None,
            at_end: false,
            stats: RunStats::default(),
        })
    }

    pub fn program(&self) -> impl Iterator<Item = &ProgramItem> {
        self.program.iter().rev()
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn dump(&self) -> &[DumpEntry] {
        &self.dump
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    fn fail<T>(&self, reason: FailureReason) -> Result<T, ParseError> {
        Err(ParseError::Failure { reason, position: self.stats.events })
    }

    fn peek(&mut self) -> Result<Option<&SaxEvent>, ParseError> {
        if self.lookahead.is_none() && !self.at_end {
            match self.events.next() {
                Some(ev) => self.lookahead = Some(ev?),
                None => self.at_end = true,
            }
        }
        Ok(self.lookahead.as_ref())
    }

    fn peek_token(&mut self) -> Result<Token, ParseError> {
        Ok(self.peek()?.map_or_else(Token::end_of_input, SaxEvent::token))
    }

    fn advance(&mut self) -> SaxEvent {
        self.stats.events += 1;
        self.lookahead.take().expect("advance after peek")
    }

    fn describe_next(&mut self) -> Result<String, ParseError> {
        Ok(match self.peek()? {
            Some(SaxEvent::StartTag(t, _)) => format!("<{t}>"),
            Some(SaxEvent::EndTag(t)) => format!("</{t}>"),
            Some(SaxEvent::Text(_)) => "text".to_string(),
            None => "end of input".to_string(),
        })
    }

    fn push_seq(&mut self, items: &[Body]) {
        if items.is_empty() {
            self.program.push(ProgramItem::Body(Body::Ok));
            return;
        }
        for (i, item) in items.iter().enumerate().rev() {
            self.program.push(ProgramItem::Body(item.clone()));
            if i > 0 {
                self.program.push(ProgramItem::Discard);
            }
        }
    }

    fn pop_value(&mut self) -> Value {
        self.values.pop().expect("value stack underflow")
    }

    /// Runs a single transition.
    pub fn step(&mut self) -> Result<Step, ParseError> {
        self.stats.steps += 1;
        let Some(item) = self.program.pop() else {
            return self.ret();
        };
        match item {
            ProgramItem::Discard => {
                self.pop_value();
            }
            ProgramItem::BindInstr(names) => {
                let value = self.values.last().expect("bind without value").clone();
                if !bind_into(&mut self.env, &names, &value) {
                    return self.fail(FailureReason::BindArityMismatch { names: names.len(), value });
                }
            }
            ProgramItem::TagEnd(tag) => match self.peek()? {
                Some(SaxEvent::EndTag(t)) if *t == tag => {
                    self.advance();
                }
                _ => {
                    let found = self.describe_next()?;
                    return self.fail(FailureReason::TagMismatch { expected: format!("</{tag}>"), found });
                }
            },
            ProgramItem::AnyEnd { tag, nested } => match self.peek()? {
                Some(SaxEvent::StartTag(..)) => {
                    self.advance();
                    self.program.push(ProgramItem::AnyEnd { tag, nested: nested + 1 });
                }
                Some(SaxEvent::Text(_)) => {
                    self.advance();
                    self.program.push(ProgramItem::AnyEnd { tag, nested });
                }
                Some(SaxEvent::EndTag(_)) if nested > 0 => {
                    self.advance();
                    self.program.push(ProgramItem::AnyEnd { tag, nested: nested - 1 });
                }
                Some(SaxEvent::EndTag(t)) if *t == tag => {
                    self.advance();
                    self.values.push(Value::Null);
                }
                _ => {
                    let found = self.describe_next()?;
                    return self.fail(FailureReason::TagMismatch { expected: format!("</{tag}>"), found });
                }
            },
            ProgramItem::Body(body) => self.body(body)?,
        }
        Ok(Step::Running)
    }

    /// Empty program: return to the caller or finish.
    fn ret(&mut self) -> Result<Step, ParseError> {
        match self.dump.pop() {
            Some(DumpEntry::Frame { program, env }) => {
                self.program = program;
                self.env = env;
                Ok(Step::Running)
            }
            Some(DumpEntry::Wrap(cells)) => {
                let mut v = self.pop_value();
                for cell in cells.into_iter().rev() {
                    let mut args = cell.args;
                    args[cell.hole] = v;
                    v = Value::term(cell.ctor, args);
                }
                self.values.push(v);
                Ok(Step::Running)
            }
            None => {
                if self.peek()?.is_some() {
                    return Err(ParseError::IncompleteParse { position: self.stats.events });
                }
                debug_assert_eq!(self.values.len(), 1);
                Ok(Step::Done(self.pop_value()))
            }
        }
    }

    fn body(&mut self, body: Body) -> Result<(), ParseError> {
        match body {
            Body::Ok => self.values.push(Value::Null),
            Body::Empty => match self.peek()? {
                None | Some(SaxEvent::EndTag(_)) => self.values.push(Value::Null),
                Some(_) => {
                    let found = self.describe_next()?;
                    return self.fail(FailureReason::TagMismatch { expected: "end of element".into(), found });
                }
            },
            Body::Text => match self.peek()? {
                Some(SaxEvent::Text(_)) => {
                    let SaxEvent::Text(s) = self.advance() else { unreachable!() };
                    self.values.push(Value::str(s));
                }
                _ => {
                    let found = self.describe_next()?;
                    return self.fail(FailureReason::TagMismatch { expected: "text".into(), found });
                }
            },
            Body::Any => match self.peek()? {
                Some(SaxEvent::Text(_)) => {
                    self.advance();
                    self.values.push(Value::Null);
                }
                Some(SaxEvent::StartTag(..)) => {
                    let SaxEvent::StartTag(tag, _) = self.advance() else { unreachable!() };
                    self.program.push(ProgramItem::AnyEnd { tag, nested: 0 });
                }
                Some(SaxEvent::EndTag(_)) => {
                    let found = self.describe_next()?;
                    return self.fail(FailureReason::TagMismatch { expected: "an element or text".into(), found });
                }
                None => return self.fail(FailureReason::UnexpectedEndOfEvents),
            },
            Body::Actions(es) => match eval_actions(&es, &self.env) {
                Ok(v) => self.values.push(v),
                Err(e) => return self.fail(FailureReason::Eval(e)),
            },
            Body::Bind(names, items) => {
                self.program.push(ProgramItem::BindInstr(names));
                self.push_seq(&items);
            }
            Body::Call(name, args) => self.call(&name, &args)?,
            Body::Element(spec) => {
                let (tag, attrs) = match self.peek()? {
                    Some(SaxEvent::StartTag(t, _)) if *t == spec.tag => match self.advance() {
                        SaxEvent::StartTag(t, a) => (t, a),
                        _ => unreachable!(),
                    },
                    Some(SaxEvent::StartTag(..) | SaxEvent::EndTag(_) | SaxEvent::Text(_)) => {
                        let found = self.describe_next()?;
                        return self.fail(FailureReason::TagMismatch { expected: format!("<{}>", spec.tag), found });
                    }
                    None => return self.fail(FailureReason::UnexpectedEndOfEvents),
                };
                for binding in &spec.attrs {
                    match attrs.get(&binding.attr) {
                        Some(v) => self.env.insert(binding.var.clone(), Value::str(v)),
                        None => {
                            return self.fail(FailureReason::MissingAttribute { tag, attr: binding.attr.clone() })
                        }
                    }
                }
                let mut selected = &spec.else_body;
                for g in &spec.guarded {
                    match eval_guard(&g.guard, &self.env) {
                        Ok(true) => {
                            selected = &g.body;
                            break;
                        }
                        Ok(false) => {}
                        Err(EvalError::NonBooleanGuard(_)) => return self.fail(FailureReason::GuardNonBoolean),
                        Err(e) => return self.fail(FailureReason::Eval(e)),
                    }
                }
                self.program.push(ProgramItem::TagEnd(tag));
                self.push_seq(selected);
            }
            Body::Or(..) | Body::Star(_) => return self.fail(FailureReason::NotNormalForm),
        }
        Ok(())
    }

    fn call(&mut self, name: &str, args: &[Expr]) -> Result<(), ParseError> {
        let token = self.peek_token()?;
        let table = self.table;
        let Some(def) = table.predict(name, &token) else {
            if table.definition_count(name) == 0 {
                return self.fail(FailureReason::UndefinedRule(name.to_string()));
            }
            return self.fail(FailureReason::NoPredictEntry { rule: name.to_string(), token });
        };
        let mut callee_env = Env::new();
        for (param, arg) in def.params.iter().zip(args) {
            match eval_expr(arg, &self.env) {
                Ok(v) => callee_env.insert(param.clone(), v),
                Err(e) => return self.fail(FailureReason::Eval(e)),
            }
        }

        if let Some(cell) = self.pending_construct()? {
            self.program.clear();
            match self.dump.last_mut() {
                Some(DumpEntry::Wrap(cells)) => cells.push(cell),
                _ => self.dump.push(DumpEntry::Wrap(vec![cell])),
            }
        } else if !self.program.is_empty() {
            let program = std::mem::take(&mut self.program);
            let env = std::mem::take(&mut self.env);
            self.dump.push(DumpEntry::Frame { program, env });
        }
        self.stats.max_dump_depth = self.stats.max_dump_depth.max(self.dump.len());
        self.env = callee_env;
        self.push_seq(&def.body);
        Ok(())
    }

    /// Recognizes a continuation of the form `v = <call>; {C(..., v, ...)}`
    /// with `v` occurring once, directly, among the arguments, and evaluates
    /// the other arguments.
    fn pending_construct(&self) -> Result<Option<PendingConstruct>, ParseError> {
        let [ProgramItem::Body(Body::Actions(es)), ProgramItem::Discard, ProgramItem::BindInstr(names)] =
            self.program.as_slice()
        else {
            return Ok(None);
        };
        let ([var], [Expr::Construct(ctor, args)]) = (names.as_slice(), es.as_slice()) else {
            return Ok(None);
        };
        let holes: Vec<usize> =
            args.iter().enumerate().filter(|(_, a)| matches!(a, Expr::Var(v) if v == var)).map(|(i, _)| i).collect();
        let [hole] = holes.as_slice() else {
            return Ok(None);
        };
        if args.iter().enumerate().any(|(i, a)| i != *hole && a.free_vars().contains(var)) {
            return Ok(None);
        }
        let mut values = Vec::with_capacity(args.len());
        for (i, a) in args.iter().enumerate() {
            if i == *hole {
                values.push(Value::Null);
            } else {
                match eval_expr(a, &self.env) {
                    Ok(v) => values.push(v),
                    Err(e) => return self.fail(FailureReason::Eval(e)),
                }
            }
        }
        Ok(Some(PendingConstruct { ctor: ctor.clone(), args: values, hole: *hole }))
    }

    pub fn run(mut self) -> Result<(Value, RunStats), ParseError> {
        loop {
            if let Step::Done(v) = self.step()? {
                return Ok((v, self.stats));
            }
        }
    }
}

fn value_expr(v: &Value) -> Expr {
    match v {
        Value::Str(s) => Expr::Str(s.to_string()),
        Value::Int(i) => Expr::Int(*i),
        Value::Bool(b) => Expr::Bool(*b),
        Value::Null => Expr::Null,
        Value::Term(c, args) => Expr::Construct(c.to_string(), args.iter().map(value_expr).collect()),
        Value::List(items) => Expr::List(items.iter().map(value_expr).collect()),
        Value::Tuple(items) => Expr::List(items.iter().map(value_expr).collect()),
    }
}

/// Parses an event stream with the start rule of `table`.
///
/// The table should be conflict-free. With conflicts the first definition
/// keeps each cell, and a repetition over a nullable body can then loop
/// without consuming input.
pub fn run<I>(table: &PredictTable, start: &str, args: &[Value], events: I) -> Result<Value, ParseError>
where
    I: IntoIterator<Item = Result<SaxEvent, SaxError>>,
{
    run_with_stats(table, start, args, events).map(|(v, _)| v)
}

pub fn run_with_stats<I>(
    table: &PredictTable,
    start: &str,
    args: &[Value],
    events: I,
) -> Result<(Value, RunStats), ParseError>
where
    I: IntoIterator<Item = Result<SaxEvent, SaxError>>,
{
    Machine::new(table, start, args, events.into_iter())?.run()
}

/// Parses an in-memory event sequence.
pub fn run_events(table: &PredictTable, start: &str, events: &[SaxEvent]) -> Result<Value, ParseError> {
    run(table, start, &[], events.iter().cloned().map(Ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_grammar;
    use crate::normalize::normalize_grammar;
    use crate::sax::SaxReader;
    use crate::xml::Attributes;

    fn table(src: &str, start: &str) -> PredictTable {
        PredictTable::build(normalize_grammar(&parse_grammar(src).unwrap()), start).unwrap()
    }

    fn test_table() -> PredictTable {
        table(include_str!("../testdata/test.xg"), "A")
    }

    fn parse(t: &PredictTable, xml: &str) -> Result<Value, ParseError> {
        run(t, t.start(), &[], SaxReader::from_text(xml))
    }

    fn b_event(n: &str) -> SaxEvent {
        let mut a = Attributes::new();
        a.insert("name".into(), n.into());
        SaxEvent::StartTag("B".into(), a)
    }

    #[test]
    fn single_b() {
        let t = table(include_str!("../testdata/test.xg"), "B");
        let mut m = Machine::new(&t, "B", &[], [b_event("foo"), SaxEvent::end("B")].into_iter().map(Ok)).unwrap();
        let mut steps = 0;
        let v = loop {
            steps += 1;
            if let Step::Done(v) = m.step().unwrap() {
                break v;
            }
        };
        assert_eq!(v, Value::str("foo"));
        assert!(m.program().next().is_none() && m.dump().is_empty());
        assert!(steps > 4);
    }

    #[test]
    fn two_children() {
        let v = parse(&test_table(), r#"<A><B name="x"/><C name="y"/></A>"#).unwrap();
        assert_eq!(v, Value::cons_list(vec![Value::str("x"), Value::str("y")]));
    }

    #[test]
    fn empty_list() {
        assert_eq!(parse(&test_table(), "<A></A>").unwrap(), Value::nil());
    }

    #[test]
    fn tag_mismatch() {
        let err = parse(&test_table(), "<X/>").unwrap_err();
        assert!(matches!(err.reason(), Some(FailureReason::NoPredictEntry { .. })), "{err}");
        let t = table(include_str!("../testdata/test.xg"), "B");
        let err = run_events(&t, "B", &[SaxEvent::start("C"), SaxEvent::end("C")]).unwrap_err();
        assert!(matches!(err.reason(), Some(FailureReason::NoPredictEntry { .. })));
    }

    #[test]
    fn element_head_mismatch() {
        let t = table("@Grammar G X ::= <r> Y </r>. Y ::= <a/> <b/>. end", "X");
        let err = parse(&t, "<r><a/><c/></r>").unwrap_err();
        assert_eq!(
            err,
            ParseError::Failure {
                reason: FailureReason::TagMismatch { expected: "<b>".into(), found: "<c>".into() },
                position: 3
            }
        );
    }

    #[test]
    fn any_skips_subtrees_and_text() {
        let t = table("@Grammar G X ::= <r> ANY ANY {1} </r>. end", "X");
        assert_eq!(parse(&t, "<r><a><a/><b>t</b></a>hello</r>").unwrap(), Value::Int(1));
        assert!(parse(&t, "<r><a/></r>").is_err());
    }

    #[test]
    fn empty_needs_end() {
        let t = table("@Grammar G X ::= <r> EMPTY </r>. end", "X");
        assert!(parse(&t, "<r/>").is_ok());
        assert!(parse(&t, "<r><a/></r>").is_err());
    }

    #[test]
    fn text_values() {
        let t = table("@Grammar G X ::= <r> s = TEXT {s} </r>. end", "X");
        assert_eq!(parse(&t, "<r>hi &amp; bye</r>").unwrap(), Value::str("hi & bye"));
    }

    #[test]
    fn guards_first_true_wins() {
        let src = r#"@Grammar G
          P ::= <T k when k = "a"> {1} when k <> "b"> {2} else {3} </T>.
        end"#;
        let t = table(src, "P");
        assert_eq!(parse(&t, r#"<T k="a"/>"#).unwrap(), Value::Int(1));
        assert_eq!(parse(&t, r#"<T k="c"/>"#).unwrap(), Value::Int(2));
        assert_eq!(parse(&t, r#"<T k="b"/>"#).unwrap(), Value::Int(3));
    }

    #[test]
    fn non_boolean_guard() {
        let t = table("@Grammar G P ::= <T k when k> {1} </T>. end", "P");
        assert_eq!(parse(&t, r#"<T k="a"/>"#).unwrap_err().reason(), Some(&FailureReason::GuardNonBoolean));
    }

    #[test]
    fn missing_attribute() {
        let err = parse(&test_table(), "<A><B/></A>").unwrap_err();
        assert!(matches!(err.reason(), Some(FailureReason::MissingAttribute { .. })));
    }

    #[test]
    fn tuple_binds() {
        let t = table("@Grammar G X ::= <r> [v,w] = Y </r> {P(w,v)}. Y ::= <y/> {1, 2}. end", "X");
        assert_eq!(parse(&t, "<r><y/></r>").unwrap(), Value::term("P", vec![Value::Int(2), Value::Int(1)]));
        let t = table("@Grammar G X ::= <r> [v,w] = Y </r> {P(w,v)}. Y ::= <y/> {1}. end", "X");
        assert!(matches!(
            parse(&t, "<r><y/></r>").unwrap_err().reason(),
            Some(FailureReason::BindArityMismatch { names: 2, .. })
        ));
    }

    #[test]
    fn start_arguments() {
        let t = table("@Grammar G X(k) ::= <r/> {k}. end", "X");
        let v = run(&t, "X", &[Value::Int(7)], SaxReader::from_text("<r/>")).unwrap();
        assert_eq!(v, Value::Int(7));
    }

    #[test]
    fn trailing_input() {
        let t = test_table();
        let events = [SaxEvent::start("A"), SaxEvent::end("A"), SaxEvent::start("A"), SaxEvent::end("A")];
        assert_eq!(run_events(&t, "A", &events), Err(ParseError::IncompleteParse { position: 2 }));
    }

    #[test]
    fn truncated_input() {
        let t = test_table();
        let err = run_events(&t, "A", &[SaxEvent::start("A")]).unwrap_err();
        assert!(matches!(err, ParseError::Failure { position: 1, .. }), "{err}");
    }

    #[test]
    fn wrong_start_rule() {
        let t = test_table();
        assert!(matches!(run_events(&t, "B", &[]), Err(ParseError::StartMismatch { .. })));
    }

    #[test]
    fn input_errors_propagate() {
        let err = parse(&test_table(), "<A><B name='x'></A>").unwrap_err();
        assert!(matches!(err, ParseError::Input(_)));
    }

    #[test]
    fn long_lists_keep_the_dump_shallow() {
        let t = test_table();
        let mut events = vec![SaxEvent::start("A")];
        for i in 0..5000 {
            events.push(b_event(&i.to_string()));
            events.push(SaxEvent::end("B"));
        }
        events.push(SaxEvent::end("A"));
        let (v, stats) = run_with_stats(&t, "A", &[], events.into_iter().map(Ok)).unwrap();
        assert_eq!(v.as_sequence().unwrap().len(), 5000);
        assert!(stats.max_dump_depth <= 3, "{stats:?}");
    }

    #[test]
    fn models_document() {
        let t = table(include_str!("../testdata/models.xg"), "Package");
        let v = run(&t, "Package", &[], SaxReader::from_text(include_str!("../testdata/model.xml"))).unwrap();
        let Value::Term(c, args) = &v else { panic!("{v}") };
        assert_eq!(&**c, "Package");
        assert_eq!(args.len(), 3);
    }
}
