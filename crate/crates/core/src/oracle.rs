//! Backtracking reference interpreter over materialized XML trees.
//!
//! Enumerates every derivation of a body against a sequence of trees. It
//! handles unnormalized grammars directly (disjunction, repetition, guards)
//! and serves as ground truth for the predictive engine. Performance is not a
//! goal.

use std::cell::{Cell, RefCell};
use std::collections::HashSet;

use crate::ast::{Body, ElementSpec, Grammar};
use crate::expr::{eval_actions, eval_expr, eval_guard, EvalError};
use crate::value::{Env, Value};
use crate::xml::XmlTree;

pub const DEFAULT_MAX_DERIVATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Upper bound on derivations produced per query.
    pub max_derivations: usize,
    /// When set, `ANY` yields the consumed tree as a value instead of `null`.
    pub any_yields_tree: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_derivations: DEFAULT_MAX_DERIVATIONS, any_yields_tree: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation<'t> {
    pub remaining: &'t [XmlTree],
    pub env: Env,
    pub value: Value,
}

/// Outcome of running a start rule over a whole document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Acceptance {
    /// Distinct synthesized values, in enumeration order.
    pub values: Vec<Value>,
    /// The derivation cap was reached; `values` may be incomplete.
    pub truncated: bool,
}

impl Acceptance {
    pub fn value(&self) -> Option<&Value> {
        self.values.first()
    }

    pub fn accepted(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn is_ambiguous(&self) -> bool {
        self.values.len() > 1
    }
}

pub struct Oracle<'g> {
    grammar: &'g Grammar,
    config: OracleConfig,
    produced: Cell<usize>,
    truncated: Cell<bool>,
    active: RefCell<HashSet<(String, usize, usize)>>,
}

type Sat<'t> = Result<Vec<Derivation<'t>>, EvalError>;

impl<'g> Oracle<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        Oracle::with_config(grammar, OracleConfig::default())
    }

    pub fn with_config(grammar: &'g Grammar, config: OracleConfig) -> Self {
        Oracle {
            grammar,
            config,
            produced: Cell::new(0),
            truncated: Cell::new(false),
            active: RefCell::new(HashSet::new()),
        }
    }

    pub fn truncated(&self) -> bool {
        self.truncated.get()
    }

    /// All derivations of `items` against `trees` in `env`.
    pub fn satisfy<'t>(&self, items: &[Body], trees: &'t [XmlTree], env: &Env) -> Sat<'t> {
        self.produced.set(0);
        self.truncated.set(false);
        self.seq(items, trees, env)
    }

    /// Runs `start(args)` over the document and keeps derivations that
    /// consume it entirely.
    pub fn accepts(&self, start: &str, args: &[Value], doc: &XmlTree) -> Result<Acceptance, EvalError> {
        self.accepts_forest(start, args, std::slice::from_ref(doc))
    }

    pub fn accepts_forest(&self, start: &str, args: &[Value], trees: &[XmlTree]) -> Result<Acceptance, EvalError> {
        self.produced.set(0);
        self.truncated.set(false);
        let mut out = Acceptance::default();
        for d in self.call_values(start, args, trees)? {
            if d.remaining.is_empty() && !out.values.contains(&d.value) {
                out.values.push(d.value);
            }
        }
        out.truncated = self.truncated.get();
        Ok(out)
    }

    fn budget_left(&self) -> bool {
        if self.produced.get() >= self.config.max_derivations {
            self.truncated.set(true);
            false
        } else {
            true
        }
    }

    fn seq<'t>(&self, items: &[Body], trees: &'t [XmlTree], env: &Env) -> Sat<'t> {
        let Some((first, rest)) = items.split_first() else {
            return Ok(vec![Derivation { remaining: trees, env: env.clone(), value: Value::Null }]);
        };
        let heads = self.item(first, trees, env)?;
        if rest.is_empty() {
            return Ok(heads);
        }
        let mut out = Vec::new();
        for h in heads {
            if !self.budget_left() {
                break;
            }
            let tails = self.seq(rest, h.remaining, &h.env)?;
            self.produced.set(self.produced.get() + tails.len());
            out.extend(tails);
        }
        Ok(out)
    }

    fn item<'t>(&self, item: &Body, trees: &'t [XmlTree], env: &Env) -> Sat<'t> {
        let here = |value: Value| Ok(vec![Derivation { remaining: trees, env: env.clone(), value }]);
        match item {
            Body::Or(l, r) => {
                let mut out = self.seq(l, trees, env)?;
                out.extend(self.seq(r, trees, env)?);
                Ok(out)
            }
            Body::Bind(names, body) => {
                let mut out = Vec::new();
                for mut d in self.seq(body, trees, env)? {
                    if bind_into(&mut d.env, names, &d.value) {
                        out.push(d);
                    }
                }
                Ok(out)
            }
            Body::Star(body) => Ok(self
                .star(body, trees, env)?
                .into_iter()
                .map(|(remaining, value)| Derivation { remaining, env: env.clone(), value })
                .collect()),
            Body::Empty if trees.is_empty() => here(Value::Null),
            Body::Empty => Ok(Vec::new()),
            Body::Ok => here(Value::Null),
            Body::Any => match trees.split_first() {
                Some((tree, rest)) => {
                    let value = if self.config.any_yields_tree { tree_value(tree) } else { Value::Null };
                    Ok(vec![Derivation { remaining: rest, env: env.clone(), value }])
                }
                None => Ok(Vec::new()),
            },
            Body::Text => match trees.split_first() {
                Some((XmlTree::Text(s), rest)) => {
                    Ok(vec![Derivation { remaining: rest, env: env.clone(), value: Value::str(s) }])
                }
                _ => Ok(Vec::new()),
            },
            Body::Call(name, args) => {
                let vals = args.iter().map(|a| eval_expr(a, env)).collect::<Result<Vec<_>, _>>()?;
                Ok(self
                    .call_values(name, &vals, trees)?
                    .into_iter()
                    .map(|d| Derivation { env: env.clone(), ..d })
                    .collect())
            }
            Body::Actions(es) => here(eval_actions(es, env)?),
            Body::Element(spec) => self.element(spec, trees, env),
        }
    }

    fn call_values<'t>(&self, name: &str, args: &[Value], trees: &'t [XmlTree]) -> Sat<'t> {
        let key = (name.to_string(), trees.as_ptr() as usize, trees.len());
        // a call re-entered without consuming input can only loop
        if !self.active.borrow_mut().insert(key.clone()) {
            return Ok(Vec::new());
        }
        let result = (|| {
            let mut out = Vec::new();
            for def in self.grammar.definitions(name).filter(|d| d.params.len() == args.len()) {
                if !self.budget_left() {
                    break;
                }
                let callee_env: Env = def.params.iter().cloned().zip(args.iter().cloned()).collect();
                out.extend(self.seq(&def.body, trees, &callee_env)?);
            }
            Ok(out)
        })();
        self.active.borrow_mut().remove(&key);
        result
    }

    /// Repetition as the recursive expansion `d ▷ x=body xs=d {Cons(x,xs)} | {Nil}`;
    /// each iteration runs in the entry environment and must consume input.
    fn star<'t>(&self, body: &[Body], trees: &'t [XmlTree], env: &Env) -> Result<Vec<(&'t [XmlTree], Value)>, EvalError> {
        let mut out = Vec::new();
        for first in self.seq(body, trees, env)? {
            if first.remaining.len() == trees.len() {
                continue;
            }
            if !self.budget_left() {
                break;
            }
            for (rest, tail) in self.star(body, first.remaining, env)? {
                out.push((rest, Value::cons(first.value.clone(), tail)));
            }
        }
        out.push((trees, Value::nil()));
        self.produced.set(self.produced.get() + out.len());
        Ok(out)
    }

    fn element<'t>(&self, spec: &ElementSpec, trees: &'t [XmlTree], env: &Env) -> Sat<'t> {
        let Some((XmlTree::Element { tag, attrs, children }, rest)) = trees.split_first() else {
            return Ok(Vec::new());
        };
        if *tag != spec.tag {
            return Ok(Vec::new());
        }
        let mut inner = env.clone();
        for binding in &spec.attrs {
            match attrs.get(&binding.attr) {
                Some(v) => inner.insert(binding.var.clone(), Value::str(v)),
                None => return Ok(Vec::new()),
            }
        }
        let mut chosen = Vec::new();
        for g in &spec.guarded {
            if eval_guard(&g.guard, &inner)? {
                chosen.push(&g.body);
            }
        }
        if chosen.is_empty() {
            chosen.push(&spec.else_body);
        }
        let mut out = Vec::new();
        for body in chosen {
            for d in self.seq(body, children, &inner)? {
                if d.remaining.is_empty() {
                    out.push(Derivation { remaining: rest, env: d.env, value: d.value });
                }
            }
        }
        Ok(out)
    }
}

/// Extends `env` with `names ↦ value`, splitting a tuple across several
/// names. Returns false on an arity mismatch.
pub(crate) fn bind_into(env: &mut Env, names: &[String], value: &Value) -> bool {
    match names {
        [one] => {
            env.insert(one.clone(), value.clone());
            true
        }
        many => match value {
            Value::Tuple(items) if items.len() == many.len() => {
                for (n, v) in many.iter().zip(items.iter()) {
                    env.insert(n.clone(), v.clone());
                }
                true
            }
            _ => false,
        },
    }
}

fn tree_value(tree: &XmlTree) -> Value {
    match tree {
        XmlTree::Text(s) => Value::str(s),
        XmlTree::Element { tag, attrs, children } => Value::term(
            "Element",
            vec![
                Value::str(tag),
                Value::list(attrs.iter().map(|(k, v)| Value::tuple(vec![Value::str(k), Value::str(v)])).collect()),
                Value::list(children.iter().map(tree_value).collect()),
            ],
        ),
    }
}
