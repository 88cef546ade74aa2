//! Rewriting grammars into normal form.
//!
//! In normal form there is no disjunction and no repetition, and every body of
//! an element (each guarded body and the else body) is empty or a single
//! atomic item.
//! Alternatives become separate definitions of fresh rules, repetition becomes
//! a right-recursive list-building rule, and element bodies are lifted into
//! rules of their own.
//!
//! Lifting preserves scoping. A lifted rule takes the free variables of the
//! lifted body as parameters. Names bound inside it that are used afterwards
//! are returned as a tuple and rebound at the call site; when the construct
//! also supplies the value of the enclosing sequence, that value travels in
//! the tuple under a hidden name.
//!
//! Fresh rules are named `<rule>$<k>` after the rule they were lifted from.

use std::collections::HashSet;
use std::fmt;

use crate::ast::{Body, Clause, ElementSpec, Expr, Grammar, Guarded};
use crate::wellformed::{bound_vars, bound_vars_item, free_vars, Names};

/// Which constructs a rewrite pass removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Passes {
    pub disjunction: bool,
    pub star: bool,
    pub element: bool,
}

impl Passes {
    pub const ALL: Passes = Passes { disjunction: true, star: true, element: true };
}

pub fn lift_disjunction(g: &Grammar) -> Grammar {
    rewrite(g, Passes { disjunction: true, star: false, element: false })
}

pub fn lift_element_guards(g: &Grammar) -> Grammar {
    rewrite(g, Passes { disjunction: false, star: false, element: true })
}

pub fn remove_star(g: &Grammar) -> Grammar {
    rewrite(g, Passes { disjunction: false, star: true, element: false })
}

/// Applies all rewrites until nothing changes.
pub fn normalize_grammar(g: &Grammar) -> Grammar {
    let mut current = rewrite(g, Passes::ALL);
    loop {
        let next = rewrite(&current, Passes::ALL);
        if next == current {
            return current;
        }
        current = next;
    }
}

/// A construct that may not appear in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormViolation {
    pub rule: String,
    pub definition: usize,
    pub construct: &'static str,
}

impl fmt::Display for NormalFormViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} definition {}: {} is not in normal form", self.rule, self.definition, self.construct)
    }
}

impl std::error::Error for NormalFormViolation {}

pub fn check_normal_form(g: &Grammar) -> Result<(), NormalFormViolation> {
    let mut seen: Vec<(&str, usize)> = Vec::new();
    for c in &g.clauses {
        let definition = match seen.iter_mut().find(|(n, _)| *n == c.name) {
            Some((_, k)) => {
                *k += 1;
                *k
            }
            None => {
                seen.push((&c.name, 1));
                1
            }
        };
        if let Err(construct) = check_seq(&c.body) {
            return Err(NormalFormViolation { rule: c.name.clone(), definition, construct });
        }
    }
    Ok(())
}

fn check_seq(items: &[Body]) -> Result<(), &'static str> {
    items.iter().try_for_each(check_item)
}

fn check_item(b: &Body) -> Result<(), &'static str> {
    match b {
        Body::Or(..) => Err("disjunction"),
        Body::Star(_) => Err("repetition"),
        Body::Bind(_, body) => check_seq(body),
        Body::Element(spec) => {
            for body in spec.bodies() {
                match body.as_slice() {
                    [] => {}
                    [one] if one.is_atomic() => {}
                    _ => return Err("element body"),
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn rewrite(g: &Grammar, passes: Passes) -> Grammar {
    let mut n = Normalizer {
        passes,
        rule_names: g.clauses.iter().map(|c| c.name.clone()).collect(),
        var_names: grammar_vars(g),
        counter: 0,
        root: String::new(),
        lifted: Vec::new(),
    };
    let mut clauses = Vec::new();
    for c in &g.clauses {
        n.root = c.name.clone();
        n.counter = 0;
        let scope: Names = c.params.iter().cloned().collect();
        // a rule that is one big disjunction becomes several definitions
        let mut alternatives = vec![c.body.clone()];
        if passes.disjunction {
            while let Some(i) = alternatives.iter().position(|b| matches!(b.as_slice(), [Body::Or(..)])) {
                let Some(Body::Or(l, r)) = alternatives.remove(i).pop() else { unreachable!() };
                alternatives.splice(i..i, [l, r]);
            }
        }
        for alt in alternatives {
            let body = n.seq(&alt, &scope, &Names::new(), true);
            clauses.push(Clause { name: c.name.clone(), params: c.params.clone(), body });
        }
        clauses.extend(n.lifted.drain(..).flatten());
    }
    Grammar { name: g.name.clone(), clauses }
}

struct Normalizer {
    passes: Passes,
    rule_names: HashSet<String>,
    var_names: HashSet<String>,
    counter: usize,
    root: String,
    /// Groups of lifted definitions, one slot per lifted rule in creation order.
    lifted: Vec<Vec<Clause>>,
}

impl Normalizer {
    fn fresh_rule(&mut self) -> String {
        loop {
            self.counter += 1;
            let name = format!("{}${}", self.root, self.counter);
            if self.rule_names.insert(name.clone()) {
                return name;
            }
        }
    }

    fn fresh_var(&mut self, base: &str) -> String {
        let mut k = 0;
        loop {
            k += 1;
            let name = format!("{base}${k}");
            if self.var_names.insert(name.clone()) {
                return name;
            }
        }
    }

    /// `live` holds the names read after the sequence; `needed` says whether
    /// its value is used.
    fn seq(&mut self, items: &[Body], scope: &Names, live: &Names, needed: bool) -> Vec<Body> {
        let mut out = Vec::new();
        let mut scope = scope.clone();
        for (i, item) in items.iter().enumerate() {
            let rest = &items[i + 1..];
            let mut live_after = live.clone();
            live_after.extend(free_vars(rest));
            out.extend(self.item(item, &scope, &live_after, needed && rest.is_empty()));
            scope.extend(bound_vars_item(item));
        }
        out
    }

    fn item(&mut self, item: &Body, scope: &Names, live: &Names, needed: bool) -> Vec<Body> {
        match item {
            Body::Or(l, r) if self.passes.disjunction => {
                let branches = vec![l.clone(), r.clone()];
                let exports = exports(branches.iter(), scope, live);
                let result = self.result_var(&exports, needed);
                let callee = self.lift(&branches, scope, &exports, result.as_deref());
                site(callee, exports, result)
            }
            Body::Or(l, r) => vec![Body::Or(self.seq(l, scope, live, needed), self.seq(r, scope, live, needed))],
            Body::Star(body) if self.passes.star => vec![self.lift_star(body, scope)],
            Body::Star(body) => vec![Body::Star(self.seq(body, scope, &Names::new(), true))],
            Body::Bind(names, body) => {
                let inner_live: Names = live.iter().filter(|n| !names.contains(n)).cloned().collect();
                let mut out = self.seq(body, scope, &inner_live, true);
                let last = out.pop().unwrap_or(Body::Ok);
                out.push(Body::Bind(names.clone(), vec![last]));
                out
            }
            Body::Element(spec) => self.element(spec, scope, live, needed),
            other => vec![other.clone()],
        }
    }

    fn result_var(&mut self, exports: &[String], needed: bool) -> Option<String> {
        (needed && !exports.is_empty()).then(|| self.fresh_var("r"))
    }

    fn element(&mut self, spec: &ElementSpec, scope: &Names, live: &Names, needed: bool) -> Vec<Body> {
        let mut inner = scope.clone();
        inner.extend(spec.attr_vars().map(String::from));
        if !self.passes.element {
            let rebuilt = map_bodies(spec, |body| self.seq(body, &inner, live, needed));
            return vec![Body::Element(rebuilt)];
        }
        let exports = exports(spec.bodies(), &inner, live);
        let result = self.result_var(&exports, needed);
        let rebuilt = map_bodies(spec, |body| {
            if exports.is_empty() {
                let normal = self.seq(body, &inner, live, needed);
                match normal.as_slice() {
                    [] => return vec![Body::Ok],
                    [one] if one.is_atomic() => return normal,
                    _ => {}
                }
            }
            vec![self.lift(std::slice::from_ref(body), &inner, &exports, result.as_deref())]
        });
        site(Body::Element(rebuilt), exports, result)
    }

    /// Lifts alternative bodies into definitions of a fresh rule and returns
    /// the item that replaces them.
    fn lift(&mut self, branches: &[Vec<Body>], scope: &Names, exports: &[String], result: Option<&str>) -> Body {
        let mut params: Names = branches.iter().flat_map(|b| free_vars(b)).collect();
        // an export that some branch leaves alone keeps its incoming value
        let always = branches.iter().map(|b| bound_vars(b)).reduce(|a, b| &a & &b).unwrap_or_default();
        params.extend(exports.iter().filter(|n| scope.contains(*n) && !always.contains(*n)).cloned());
        let slot = self.lifted.len();
        self.lifted.push(Vec::new());
        // a single body may end up inlined, so it is named only once kept
        let mut name = (branches.len() > 1).then(|| self.fresh_rule());

        let outputs: Vec<Expr> = exports.iter().map(String::as_str).chain(result).map(Expr::var).collect();
        let mut defs = Vec::new();
        for branch in branches {
            let body = match result {
                _ if exports.is_empty() => branch.clone(),
                Some(r) => vec![Body::Bind(vec![r.to_string()], branch.clone()), Body::Actions(outputs.clone())],
                None => branch.iter().cloned().chain([Body::Actions(outputs.clone())]).collect(),
            };
            let normal = self.seq(&body, &params, &Names::new(), true);
            defs.push(simplify_tail(normal));
        }

        if let [only] = defs.as_slice() {
            match only.as_slice() {
                [] => return Body::Ok,
                [one] if one.is_atomic() => return one.clone(),
                _ => {}
            }
        }
        let name = name.take().unwrap_or_else(|| self.fresh_rule());
        let params: Vec<String> = params.into_iter().collect();
        let args = params.iter().map(Expr::var).collect();
        self.lifted[slot] = defs
            .into_iter()
            .map(|body| Clause { name: name.clone(), params: params.clone(), body })
            .collect();
        Body::Call(name, args)
    }

    /// `body*` becomes `d(v) ::= x = body xs = d(v) {Cons(x,xs)}` and
    /// `d(v) ::= {Nil}`, where `v` are the free variables of `body`.
    fn lift_star(&mut self, body: &[Body], scope: &Names) -> Body {
        let params: Names = free_vars(body);
        let slot = self.lifted.len();
        self.lifted.push(Vec::new());
        let name = self.fresh_rule();
        let args: Vec<Expr> = params.iter().map(Expr::var).collect();

        // every iteration must see the entry values of the parameters
        let element = if bound_vars(body).iter().any(|n| params.contains(n)) {
            vec![self.lift(&[body.to_vec()], scope, &[], None)]
        } else {
            body.to_vec()
        };
        let mut taken = params.clone();
        collect_body_vars(body, &mut taken);
        let x = self.pick_var("x", &taken);
        taken.insert(x.clone());
        let xs = self.pick_var("xs", &taken);

        let cons = vec![
            Body::Bind(vec![x.clone()], element),
            Body::Bind(vec![xs.clone()], vec![Body::Call(name.clone(), args.clone())]),
            Body::Actions(vec![Expr::ctor("Cons", vec![Expr::var(&x), Expr::var(&xs)])]),
        ];
        let cons = self.seq(&cons, &params, &Names::new(), true);
        let nil = vec![Body::Actions(vec![Expr::ctor("Nil", vec![])])];
        let params: Vec<String> = params.into_iter().collect();
        self.lifted[slot] = [cons, nil]
            .into_iter()
            .map(|body| Clause { name: name.clone(), params: params.clone(), body })
            .collect();
        Body::Call(name, args)
    }

    fn pick_var(&mut self, base: &str, taken: &Names) -> String {
        if taken.contains(base) {
            self.fresh_var(base)
        } else {
            base.to_string()
        }
    }
}

/// Names bound by the alternatives that are read afterwards: those bound by
/// every alternative plus those that rebind a name already in scope.
fn exports<'a>(bodies: impl Iterator<Item = &'a Vec<Body>>, scope: &Names, live: &Names) -> Vec<String> {
    let mut all = Names::new();
    let mut common: Option<Names> = None;
    for body in bodies {
        let bv = bound_vars(body);
        all.extend(bv.iter().cloned());
        common = Some(match common {
            None => bv,
            Some(c) => &c & &bv,
        });
    }
    let mut out = common.unwrap_or_default();
    out.extend(all.intersection(scope).cloned());
    out.into_iter().filter(|n| live.contains(n)).collect()
}

fn site(callee: Body, exports: Vec<String>, result: Option<String>) -> Vec<Body> {
    match result {
        _ if exports.is_empty() => vec![callee],
        None => vec![Body::Bind(exports, vec![callee])],
        Some(r) => {
            let mut names = exports;
            names.push(r.clone());
            vec![Body::Bind(names, vec![callee]), Body::Actions(vec![Expr::var(r)])]
        }
    }
}

/// `... v = item {v}` at the end of a rule body is just `... item`.
fn simplify_tail(mut body: Vec<Body>) -> Vec<Body> {
    if let [.., Body::Bind(names, inner), Body::Actions(es)] = body.as_slice() {
        if let ([v], [item], [Expr::Var(w)]) = (names.as_slice(), inner.as_slice(), es.as_slice()) {
            if v == w {
                let item = item.clone();
                body.truncate(body.len() - 2);
                body.push(item);
            }
        }
    }
    body
}

fn map_bodies(spec: &ElementSpec, mut f: impl FnMut(&Vec<Body>) -> Vec<Body>) -> ElementSpec {
    ElementSpec {
        tag: spec.tag.clone(),
        attrs: spec.attrs.clone(),
        guarded: spec.guarded.iter().map(|g| Guarded { guard: g.guard.clone(), body: f(&g.body) }).collect(),
        else_body: f(&spec.else_body),
    }
}

fn grammar_vars(g: &Grammar) -> HashSet<String> {
    let mut names = Names::new();
    for c in &g.clauses {
        names.extend(c.params.iter().cloned());
        collect_body_vars(&c.body, &mut names);
    }
    names.into_iter().collect()
}

fn collect_body_vars(items: &[Body], out: &mut Names) {
    for item in items {
        match item {
            Body::Or(l, r) => {
                collect_body_vars(l, out);
                collect_body_vars(r, out);
            }
            Body::Bind(names, body) => {
                out.extend(names.iter().cloned());
                collect_body_vars(body, out);
            }
            Body::Star(body) => collect_body_vars(body, out),
            Body::Call(_, es) | Body::Actions(es) => es.iter().for_each(|e| collect_expr_vars(e, out)),
            Body::Element(spec) => {
                for a in &spec.attrs {
                    out.insert(a.var.clone());
                }
                for g in &spec.guarded {
                    collect_expr_vars(&g.guard, out);
                }
                for body in spec.bodies() {
                    collect_body_vars(body, out);
                }
            }
            Body::Empty | Body::Any | Body::Ok | Body::Text => {}
        }
    }
}

fn collect_expr_vars(e: &Expr, out: &mut Names) {
    match e {
        Expr::Var(n) => {
            out.insert(n.clone());
        }
        Expr::Str(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Null => {}
        Expr::Construct(_, args) | Expr::List(args) => args.iter().for_each(|a| collect_expr_vars(a, out)),
        Expr::Cons(a, b) | Expr::AddChild(a, b) | Expr::Compare(_, a, b) => {
            collect_expr_vars(a, out);
            collect_expr_vars(b, out);
        }
        Expr::Fold { elem, acc, init, step, over } => {
            out.insert(elem.clone());
            out.insert(acc.clone());
            collect_expr_vars(init, out);
            collect_expr_vars(step, out);
            collect_expr_vars(over, out);
        }
    }
}
