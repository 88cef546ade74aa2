//! Free and bound variables of clause bodies and the variable-scoping
//! well-formedness check.
//!
//! A name is *bound* by a body when it is guaranteed to be in scope after the
//! body succeeds: binding is sequential and cumulative, a disjunction only
//! exports what both branches bind, a repetition exports nothing (it may run
//! zero times), and an element exports its attribute variables plus whatever
//! every one of its alternative child bodies binds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ast::{Body, Clause, Expr, Grammar};

pub type Names = BTreeSet<String>;

pub fn free_vars(items: &[Body]) -> Names {
    let mut free = Names::new();
    let mut bound = Names::new();
    for item in items {
        free.extend(free_vars_item(item).into_iter().filter(|n| !bound.contains(n)));
        bound.extend(bound_vars_item(item));
    }
    free
}

pub fn free_vars_item(b: &Body) -> Names {
    match b {
        Body::Or(l, r) => &free_vars(l) | &free_vars(r),
        Body::Bind(_, body) | Body::Star(body) => free_vars(body),
        Body::Empty | Body::Any | Body::Ok | Body::Text => Names::new(),
        Body::Call(_, args) | Body::Actions(args) => exprs_free(args),
        Body::Element(spec) => {
            let mut inner = exprs_free(spec.guarded.iter().map(|g| &g.guard));
            for body in spec.bodies() {
                inner.extend(free_vars(body));
            }
            for v in spec.attr_vars() {
                inner.remove(v);
            }
            inner
        }
    }
}

fn exprs_free<'a>(es: impl IntoIterator<Item = &'a Expr>) -> Names {
    let mut out = Names::new();
    for e in es {
        e.collect_free(&mut out);
    }
    out
}

pub fn bound_vars(items: &[Body]) -> Names {
    items.iter().flat_map(bound_vars_item).collect()
}

pub fn bound_vars_item(b: &Body) -> Names {
    match b {
        Body::Or(l, r) => &bound_vars(l) & &bound_vars(r),
        Body::Bind(names, body) => {
            let mut out = bound_vars(body);
            out.extend(names.iter().cloned());
            out
        }
        Body::Element(spec) => {
            let mut common: Option<Names> = None;
            for body in spec.bodies() {
                let bv = bound_vars(body);
                common = Some(match common {
                    None => bv,
                    Some(c) => &c & &bv,
                });
            }
            let mut out = common.unwrap_or_default();
            out.extend(spec.attr_vars().map(String::from));
            out
        }
        _ => Names::new(),
    }
}

/// Position of a body item: definition index within its rule name (from 1)
/// and the item path inside the body (from 1, nested items dotted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyLocation {
    pub definition: usize,
    pub path: Vec<usize>,
}

impl fmt::Display for BodyLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "definition {}", self.definition)?;
        if !self.path.is_empty() {
            let p: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, ", item {}", p.join("."))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WfError {
    #[error("rule {rule}: variable {var} may be unbound at {at}")]
    Unbound { rule: String, var: String, at: BodyLocation },
    #[error("rule {rule}: call of undefined rule {callee} at {at}")]
    UndefinedClause { rule: String, callee: String, at: BodyLocation },
    #[error("rule {rule}: call of {callee} with {found} argument(s) at {at}, expected {expected:?}")]
    ArityMismatch { rule: String, callee: String, found: usize, expected: Vec<usize>, at: BodyLocation },
    #[error("rule {rule}: duplicate name {name} at {at}")]
    DuplicateName { rule: String, name: String, at: BodyLocation },
}

impl WfError {
    pub fn variable(&self) -> Option<&str> {
        match self {
            WfError::Unbound { var, .. } => Some(var),
            _ => None,
        }
    }
}

/// Checks every clause `n(params) ▷ body` under the scope `{params}`.
/// An empty result means the grammar is well formed.
pub fn check_grammar(g: &Grammar) -> Vec<WfError> {
    let mut arities: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for c in &g.clauses {
        arities.entry(&c.name).or_default().insert(c.params.len());
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut errors = Vec::new();
    for clause in &g.clauses {
        let n = counts.entry(&clause.name).or_default();
        *n += 1;
        let mut cx = Checker { clause, definition: *n, arities: &arities, errors: &mut errors, path: Vec::new() };
        cx.check_clause();
    }
    errors
}

struct Checker<'a> {
    clause: &'a Clause,
    definition: usize,
    arities: &'a BTreeMap<&'a str, BTreeSet<usize>>,
    errors: &'a mut Vec<WfError>,
    path: Vec<usize>,
}

impl Checker<'_> {
    fn at(&self) -> BodyLocation {
        BodyLocation { definition: self.definition, path: self.path.clone() }
    }

    fn rule(&self) -> String {
        self.clause.name.clone()
    }

    fn check_clause(&mut self) {
        let mut scope = Names::new();
        for p in &self.clause.params {
            if !scope.insert(p.clone()) {
                let e = WfError::DuplicateName { rule: self.rule(), name: p.clone(), at: self.at() };
                self.errors.push(e);
            }
        }
        self.check_seq(&scope, &self.clause.body);
    }

    fn check_seq(&mut self, scope: &Names, items: &[Body]) {
        let mut scope = scope.clone();
        for (i, item) in items.iter().enumerate() {
            self.path.push(i + 1);
            self.check_item(&scope, item);
            self.path.pop();
            scope.extend(bound_vars_item(item));
        }
    }

    fn require(&mut self, scope: &Names, free: Names) {
        for var in free {
            if !scope.contains(&var) {
                let e = WfError::Unbound { rule: self.rule(), var, at: self.at() };
                self.errors.push(e);
            }
        }
    }

    fn distinct<'n>(&mut self, names: impl IntoIterator<Item = &'n str>) {
        let mut seen = BTreeSet::new();
        for n in names {
            if !seen.insert(n) {
                let e = WfError::DuplicateName { rule: self.rule(), name: n.to_string(), at: self.at() };
                self.errors.push(e);
            }
        }
    }

    fn check_item(&mut self, scope: &Names, item: &Body) {
        match item {
            Body::Or(l, r) => {
                self.check_seq(scope, l);
                self.check_seq(scope, r);
            }
            Body::Bind(names, body) => {
                self.distinct(names.iter().map(String::as_str));
                self.check_seq(scope, body);
            }
            Body::Star(body) => self.check_seq(scope, body),
            Body::Empty | Body::Any | Body::Ok | Body::Text => {}
            Body::Call(callee, args) => {
                self.require(scope, exprs_free(args));
                match self.arities.get(callee.as_str()) {
                    None => {
                        let e = WfError::UndefinedClause { rule: self.rule(), callee: callee.clone(), at: self.at() };
                        self.errors.push(e);
                    }
                    Some(ar) if !ar.contains(&args.len()) => {
                        let e = WfError::ArityMismatch {
                            rule: self.rule(),
                            callee: callee.clone(),
                            found: args.len(),
                            expected: ar.iter().copied().collect(),
                            at: self.at(),
                        };
                        self.errors.push(e);
                    }
                    Some(_) => {}
                }
            }
            Body::Actions(es) => self.require(scope, exprs_free(es)),
            Body::Element(spec) => {
                self.distinct(spec.attr_vars());
                let mut inner = scope.clone();
                inner.extend(spec.attr_vars().map(String::from));
                for g in &spec.guarded {
                    self.require(&inner, g.guard.free_vars());
                }
                for body in spec.bodies() {
                    self.check_seq(&inner, body);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{AttrBinding, CompareOp, ElementSpec, Guarded};
    use crate::frontend::parse_grammar;

    fn names(ns: &[&str]) -> Names {
        ns.iter().map(|s| s.to_string()).collect()
    }

    fn call(n: &str) -> Body {
        Body::call(n)
    }

    #[test]
    fn free_direct_reference() {
        assert_eq!(free_vars_item(&Body::Call("Z".into(), vec![Expr::var("x")])), names(&["x"]));
    }

    #[test]
    fn free_after_binder() {
        let seq = vec![Body::bind("x", vec![call("X")]), Body::Call("Z".into(), vec![Expr::var("x")])];
        assert_eq!(free_vars(&seq), names(&[]));
    }

    #[test]
    fn free_of_disjunction_without_references() {
        let or = Body::Or(vec![Body::bind("x", vec![call("X")])], vec![Body::bind("y", vec![call("Y")])]);
        assert_eq!(free_vars_item(&or), names(&[]));
        assert_eq!(bound_vars_item(&or), names(&[]));
    }

    #[test]
    fn bound_simple_and_star() {
        assert_eq!(bound_vars_item(&Body::bind("x", vec![call("X")])), names(&["x"]));
        assert_eq!(bound_vars_item(&Body::Star(vec![Body::bind("x", vec![call("X")])])), names(&[]));
    }

    #[test]
    fn bound_of_sequence_is_union() {
        let seq = vec![Body::bind("x", vec![call("X")]), Body::bind("y", vec![call("Y")])];
        assert_eq!(bound_vars(&seq), names(&["x", "y"]));
    }

    #[test]
    fn element_exports_attributes_and_common_child_bindings() {
        let spec = ElementSpec {
            tag: "T".into(),
            attrs: vec![AttrBinding::renamed("v", "name")],
            guarded: vec![Guarded {
                guard: Expr::Bool(true),
                body: vec![Body::bind("a", vec![call("X")]), Body::bind("b", vec![call("X")])],
            }],
            else_body: vec![Body::bind("a", vec![call("Y")])],
        };
        assert_eq!(bound_vars_item(&Body::Element(spec)), names(&["a", "v"]));
    }

    #[test]
    fn disjunction_counterexample_is_rejected() {
        let g = parse_grammar(include_str!("../testdata/unbound.xg")).unwrap();
        let errs = check_grammar(&g);
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert_eq!(errs[0].variable(), Some("x"));
        assert_eq!(errs[0].to_string(), "rule W: variable x may be unbound at definition 1, item 2");
    }

    #[test]
    fn models_grammar_is_well_formed() {
        let g = parse_grammar(include_str!("../testdata/models.xg")).unwrap();
        assert_eq!(check_grammar(&g), vec![]);
    }

    #[test]
    fn guard_may_use_parameter() {
        let guard = Expr::Compare(CompareOp::Eq, Box::new(Expr::var("n")), Box::new(Expr::Str("a".into())));
        let spec = ElementSpec {
            tag: "T".into(),
            attrs: vec![],
            guarded: vec![Guarded { guard, body: vec![Body::Ok] }],
            else_body: vec![Body::Ok],
        };
        let g = Grammar {
            name: "G".into(),
            clauses: vec![Clause { name: "P".into(), params: vec!["n".into()], body: vec![Body::Element(spec)] }],
        };
        assert_eq!(check_grammar(&g), vec![]);
    }

    #[test]
    fn guard_sees_attributes_but_not_later_bindings() {
        let g = parse_grammar("@Grammar G P ::= <T k when k = z> x = Q else OK </T> { x }. Q ::= OK. end").unwrap();
        let errs = check_grammar(&g);
        let vars: Vec<_> = errs.iter().filter_map(WfError::variable).collect();
        // z is never bound; x is bound only under the guard, not by the else body
        assert_eq!(vars, ["z", "x"]);
    }

    #[test]
    fn undefined_and_arity() {
        let g = parse_grammar("@Grammar G P ::= Q R(1). R ::= OK. end").unwrap();
        let errs = check_grammar(&g);
        assert!(matches!(&errs[0], WfError::UndefinedClause { callee, .. } if callee == "Q"));
        assert!(matches!(&errs[1], WfError::ArityMismatch { found: 1, .. }));
    }

    proptest::proptest! {
        #[test]
        fn sequence_binds_union_of_members(items in proptest::collection::vec(crate::frontend::tests::arb_body(), 0..5)) {
            let union: Names = items.iter().flat_map(bound_vars_item).collect();
            proptest::prop_assert_eq!(bound_vars(&items), union);
            // free in the sequence iff free in some member before any binder
            let mut expected = Names::new();
            let mut seen = Names::new();
            for item in &items {
                expected.extend(free_vars_item(item).into_iter().filter(|v| !seen.contains(v)));
                seen.extend(bound_vars_item(item));
            }
            proptest::prop_assert_eq!(free_vars(&items), expected);
        }
    }
}
