//! Abstract syntax of XML grammars.
//!
//! A grammar is an ordered list of clauses; several clauses may share a name,
//! in which case they are alternative definitions of the same rule. Clause
//! bodies are sequences of [`Body`] items: conjunction is juxtaposition, so
//! there is no explicit `And` node.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub name: String,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Body>,
}

/// One `var = attr` pair of an element specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrBinding {
    pub var: String,
    pub attr: String,
}

impl AttrBinding {
    pub fn same(name: impl Into<String>) -> Self {
        let name = name.into();
        AttrBinding { var: name.clone(), attr: name }
    }

    pub fn renamed(var: impl Into<String>, attr: impl Into<String>) -> Self {
        AttrBinding { var: var.into(), attr: attr.into() }
    }
}

/// A guard expression and the body it selects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guarded {
    pub guard: Expr,
    pub body: Vec<Body>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSpec {
    pub tag: String,
    pub attrs: Vec<AttrBinding>,
    pub guarded: Vec<Guarded>,
    pub else_body: Vec<Body>,
}

impl ElementSpec {
    pub fn attr_vars(&self) -> impl Iterator<Item = &str> {
        self.attrs.iter().map(|a| a.var.as_str())
    }

    /// Guarded bodies followed by the else body.
    pub fn bodies(&self) -> impl Iterator<Item = &Vec<Body>> {
        self.guarded.iter().map(|g| &g.body).chain(std::iter::once(&self.else_body))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Or(Vec<Body>, Vec<Body>),
    Bind(Vec<String>, Vec<Body>),
    Star(Vec<Body>),
    Empty,
    Any,
    Ok,
    Text,
    Call(String, Vec<Expr>),
    Actions(Vec<Expr>),
    Element(ElementSpec),
}

impl Body {
    pub fn call(name: impl Into<String>) -> Body {
        Body::Call(name.into(), Vec::new())
    }

    pub fn bind(name: impl Into<String>, body: Vec<Body>) -> Body {
        Body::Bind(vec![name.into()], body)
    }

    pub fn is_call(&self) -> bool {
        matches!(self, Body::Call(..))
    }

    /// Items that consume at most one subtree and need no clause of their own
    /// when they appear as the entire body of an element.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Body::Call(..) | Body::Ok | Body::Empty | Body::Any | Body::Text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Str(String),
    Int(i64),
    Bool(bool),
    Null,
    Construct(String, Vec<Expr>),
    List(Vec<Expr>),
    Cons(Box<Expr>, Box<Expr>),
    /// `over->iterate(elem acc = init | step)`
    Fold {
        elem: String,
        acc: String,
        init: Box<Expr>,
        step: Box<Expr>,
        over: Box<Expr>,
    },
    /// `term.add(child)`: a copy of `term` with `child` appended to its arguments.
    AddChild(Box<Expr>, Box<Expr>),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn ctor(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Construct(name.into(), args)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    pub(crate) fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(n) => {
                out.insert(n.clone());
            }
            Expr::Str(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Null => {}
            Expr::Construct(_, args) | Expr::List(args) => {
                args.iter().for_each(|a| a.collect_free(out));
            }
            Expr::Cons(a, b) | Expr::AddChild(a, b) | Expr::Compare(_, a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Expr::Fold { elem, acc, init, step, over } => {
                init.collect_free(out);
                over.collect_free(out);
                let mut inner = BTreeSet::new();
                step.collect_free(&mut inner);
                inner.remove(elem);
                inner.remove(acc);
                out.extend(inner);
            }
        }
    }
}

impl Grammar {
    pub fn new(name: impl Into<String>) -> Self {
        Grammar { name: name.into(), clauses: Vec::new() }
    }

    /// Definitions of `name`, in source order.
    pub fn definitions<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Clause> + 'a {
        self.clauses.iter().filter(move |c| c.name == name)
    }

    /// Distinct clause names in order of first appearance.
    pub fn clause_names(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.clauses
            .iter()
            .filter(|c| seen.insert(c.name.as_str()))
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn has_clause(&self, name: &str) -> bool {
        self.clauses.iter().any(|c| c.name == name)
    }

    pub fn first_clause(&self) -> Option<&str> {
        self.clauses.first().map(|c| c.name.as_str())
    }
}
