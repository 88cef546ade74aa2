//! Random grammars and documents shared by the integration tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use xmlgram::analysis::PredictTable;
use xmlgram::ast::{AttrBinding, Body, Clause, CompareOp, ElementSpec, Expr, Grammar, Guarded};
use xmlgram::engine::run_events;
use xmlgram::oracle::Oracle;
use xmlgram::sax::read_events;
use xmlgram::wellformed::{bound_vars, check_grammar};
use xmlgram::xml::{build_trees, XmlTree};

pub const TAGS: [&str; 4] = ["a", "b", "c", "d"];
const VARS: [&str; 3] = ["x", "y", "z"];
pub const MAX_DEPTH: usize = 4;
pub const MAX_WIDTH: usize = 4;

pub fn rule_name(i: usize) -> String {
    format!("R{i}")
}

/// Random parameter-free grammars over tags `a`-`d`. Elements may bind
/// attribute `k` and guard on `k = "1"`. Clause bodies end with a
/// constructor over every variable they bind, so values expose bindings.
pub struct GrammarGen<'r> {
    rng: &'r mut ChaCha8Rng,
    rules: usize,
    loose: bool,
}

impl<'r> GrammarGen<'r> {
    pub fn new(rng: &'r mut ChaCha8Rng) -> Self {
        GrammarGen { rng, rules: 0, loose: false }
    }

    /// Actions read arbitrary variables instead of bound ones, so many
    /// draws are ill formed and the survivors exercise the scoping check.
    pub fn loose(rng: &'r mut ChaCha8Rng) -> Self {
        GrammarGen { rng, rules: 0, loose: true }
    }

    fn some_vars(&mut self) -> Vec<Expr> {
        let n = self.rng.gen_range(0..=2);
        (0..n).map(|_| Expr::var(*["x", "y", "z", "k"].choose(self.rng).unwrap())).collect()
    }

    /// Draws grammars until one passes the well-formedness check.
    pub fn grammar(&mut self) -> Grammar {
        loop {
            let g = self.attempt();
            if check_grammar(&g).is_empty() {
                return g;
            }
        }
    }

    fn attempt(&mut self) -> Grammar {
        self.rules = self.rng.gen_range(1..=4);
        let mut g = Grammar::new("Random");
        for i in 0..self.rules {
            let defs = if i == 0 { 1 } else { self.rng.gen_range(1..=2) };
            for _ in 0..defs {
                let mut body = if i == 0 {
                    vec![self.element(i, 2)]
                } else {
                    self.seq(i, false, 2)
                };
                let vars: Vec<Expr> = if self.loose {
                    self.some_vars()
                } else {
                    bound_vars(&body).into_iter().map(Expr::Var).collect()
                };
                body.push(Body::Actions(vec![Expr::ctor(rule_name(i), vars)]));
                g.clauses.push(Clause { name: rule_name(i), params: Vec::new(), body });
            }
        }
        g
    }

    fn seq(&mut self, rule: usize, guarded: bool, depth: usize) -> Vec<Body> {
        let len = self.rng.gen_range(0..=3);
        (0..len).map(|_| self.item(rule, guarded, depth)).collect()
    }

    /// `guarded` is true once an element start tag has been consumed in the
    /// current clause, which makes any call safe from left recursion.
    fn item(&mut self, rule: usize, guarded: bool, depth: usize) -> Body {
        let callees: Vec<usize> = if guarded { (0..self.rules).collect() } else { (rule + 1..self.rules).collect() };
        loop {
            let roll = self.rng.gen_range(0..100);
            match roll {
                0..=29 if depth > 0 => return self.element(rule, depth),
                30..=44 if !callees.is_empty() => {
                    return Body::call(rule_name(*callees.choose(self.rng).unwrap()));
                }
                45..=54 if depth > 0 => {
                    let l = self.seq(rule, guarded, depth - 1);
                    let r = self.seq(rule, guarded, depth - 1);
                    return Body::Or(l, r);
                }
                55..=62 if depth > 0 => {
                    let mut body = self.seq(rule, guarded, depth - 1);
                    if body.is_empty() {
                        body.push(self.element(rule, depth - 1));
                    }
                    return Body::Star(body);
                }
                63..=72 => {
                    let var = *VARS.choose(self.rng).unwrap();
                    let inner = self.item(rule, guarded, depth.saturating_sub(1));
                    return Body::bind(var, vec![inner]);
                }
                73..=78 => return Body::Text,
                79..=81 => return Body::Any,
                82..=87 => return Body::Ok,
                88..=89 => return Body::Empty,
                90..=99 => {
                    let e = if self.loose {
                        Expr::ctor("K", self.some_vars())
                    } else if self.rng.gen_bool(0.5) {
                        Expr::ctor("K", Vec::new())
                    } else {
                        Expr::Int(1)
                    };
                    return Body::Actions(vec![e]);
                }
                _ => {}
            }
        }
    }

    fn element(&mut self, rule: usize, depth: usize) -> Body {
        let tag = TAGS.choose(self.rng).unwrap().to_string();
        let inner = depth.saturating_sub(1);
        let binds_k = self.rng.gen_bool(0.3);
        let attrs = if binds_k { vec![AttrBinding::same("k")] } else { Vec::new() };
        let guarded = if binds_k && self.rng.gen_bool(0.5) {
            let guard = Expr::Compare(CompareOp::Eq, Box::new(Expr::var("k")), Box::new(Expr::Str("1".into())));
            vec![Guarded { guard, body: self.seq(rule, true, inner) }]
        } else {
            Vec::new()
        };
        let else_body = self.seq(rule, true, inner);
        Body::Element(ElementSpec { tag, attrs, guarded, else_body })
    }
}

/// Documents drawn from a grammar by random derivation. Returns `None` when
/// the draw runs past the depth budget or derives something other than a
/// single element.
pub fn sample_document(g: &Grammar, start: &str, rng: &mut ChaCha8Rng) -> Option<XmlTree> {
    let mut out = Vec::new();
    let mut fuel = 200;
    sample_call(g, start, rng, 0, &mut fuel, &mut out)?;
    match out.as_slice() {
        [t @ XmlTree::Element { .. }] if within_bounds(t) => Some(t.clone()),
        _ => None,
    }
}

fn sample_call(g: &Grammar, name: &str, rng: &mut ChaCha8Rng, depth: usize, fuel: &mut usize, out: &mut Vec<XmlTree>) -> Option<()> {
    let defs: Vec<&Clause> = g.definitions(name).collect();
    let def = defs.choose(rng)?;
    sample_seq(g, &def.body, rng, depth, fuel, out)
}

fn sample_seq(g: &Grammar, items: &[Body], rng: &mut ChaCha8Rng, depth: usize, fuel: &mut usize, out: &mut Vec<XmlTree>) -> Option<()> {
    for item in items {
        sample_item(g, item, rng, depth, fuel, out)?;
    }
    Some(())
}

fn sample_item(g: &Grammar, item: &Body, rng: &mut ChaCha8Rng, depth: usize, fuel: &mut usize, out: &mut Vec<XmlTree>) -> Option<()> {
    *fuel = fuel.checked_sub(1)?;
    match item {
        Body::Element(spec) => {
            if depth >= MAX_DEPTH {
                return None;
            }
            let k = if rng.gen_bool(0.5) { "1" } else { "2" };
            let body = match spec.guarded.first() {
                Some(gb) if k == "1" => &gb.body,
                _ => &spec.else_body,
            };
            let mut children = Vec::new();
            sample_seq(g, body, rng, depth + 1, fuel, &mut children)?;
            let attrs: Vec<(&str, &str)> = if spec.attrs.is_empty() && rng.gen_bool(0.7) { Vec::new() } else { vec![("k", k)] };
            out.push(XmlTree::element(spec.tag.clone(), &attrs, children));
        }
        Body::Call(name, _) => sample_call(g, name, rng, depth, fuel, out)?,
        Body::Or(l, r) => sample_seq(g, if rng.gen_bool(0.5) { l } else { r }, rng, depth, fuel, out)?,
        Body::Star(body) => {
            for _ in 0..rng.gen_range(0..=2) {
                sample_seq(g, body, rng, depth, fuel, out)?;
            }
        }
        Body::Bind(_, body) => sample_seq(g, body, rng, depth, fuel, out)?,
        Body::Text => push_text(out),
        Body::Any => {
            if rng.gen_bool(0.5) {
                push_text(out);
            } else {
                out.push(XmlTree::leaf(*TAGS.choose(rng).unwrap()));
            }
        }
        Body::Ok | Body::Empty | Body::Actions(_) => {}
    }
    Some(())
}

fn push_text(out: &mut Vec<XmlTree>) {
    if !matches!(out.last(), Some(XmlTree::Text(_))) {
        out.push(XmlTree::text("t"));
    }
}

pub fn within_bounds(t: &XmlTree) -> bool {
    fn width_ok(t: &XmlTree) -> bool {
        match t {
            XmlTree::Element { children, .. } => children.len() <= MAX_WIDTH && children.iter().all(width_ok),
            XmlTree::Text(_) => true,
        }
    }
    t.depth() <= MAX_DEPTH && width_ok(t)
}

/// Unconstrained documents with depth and width at most four.
pub fn random_document(rng: &mut ChaCha8Rng) -> XmlTree {
    random_element(rng, MAX_DEPTH)
}

fn random_element(rng: &mut ChaCha8Rng, depth: usize) -> XmlTree {
    let tag = *TAGS.choose(rng).unwrap();
    let mut children: Vec<XmlTree> = Vec::new();
    if depth > 1 {
        for _ in 0..rng.gen_range(0..=MAX_WIDTH) {
            if rng.gen_bool(0.2) {
                push_text(&mut children);
            } else {
                children.push(random_element(rng, depth - 1));
            }
        }
    }
    let attrs: Vec<(&str, &str)> = match rng.gen_range(0..3) {
        0 => Vec::new(),
        1 => vec![("k", "1")],
        _ => vec![("k", "2")],
    };
    XmlTree::element(tag, &attrs, children)
}

/// Every tree over `tags` plus a text node with depth at most `depth` and
/// width at most `width`.
pub fn all_trees(tags: &[&str], depth: usize, width: usize) -> Vec<XmlTree> {
    if depth == 0 {
        return Vec::new();
    }
    let below = all_trees(tags, depth - 1, width);
    let mut out = vec![XmlTree::text("t")];
    let seqs = sequences(&below, width);
    for tag in tags {
        for children in &seqs {
            out.push(XmlTree::element(*tag, &[], children.clone()));
        }
    }
    out
}

/// Every sequence of at most `len` items from `pool`.
pub fn sequences(pool: &[XmlTree], len: usize) -> Vec<Vec<XmlTree>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for prefix in &frontier {
            for t in pool {
                let mut s: Vec<XmlTree> = prefix.clone();
                s.push(t.clone());
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Outcome of running the oracle on the source grammar and the engine on
/// the normalized table over the same document.
#[derive(Debug)]
pub enum Agreement {
    Agree { accepted: bool },
    Disagree(String),
}

pub fn differential(source: &Grammar, table: &PredictTable, start: &str, doc: &XmlTree) -> Agreement {
    let xml = doc.to_xml();
    let events = match read_events(xml.as_bytes(), false) {
        Ok(ev) => ev,
        Err(e) => return Agreement::Disagree(format!("unreadable document {xml}: {e}")),
    };
    let trees = build_trees(events.clone()).expect("reader output is balanced");
    let oracle = Oracle::new(source);
    let expected = oracle.accepts_forest(start, &[], &trees).map(|a| a.values).unwrap_or_default();
    let got = run_events(table, start, &events);
    match (expected.as_slice(), got) {
        ([], Err(_)) => Agreement::Agree { accepted: false },
        ([v], Ok(w)) if *v == w => Agreement::Agree { accepted: true },
        (vs, got) => Agreement::Disagree(format!("document {xml}: oracle {vs:?}, engine {got:?}")),
    }
}
