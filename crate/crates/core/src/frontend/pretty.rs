use std::fmt::Write;

use crate::ast::{Body, Clause, CompareOp, ElementSpec, Expr, Grammar};
use crate::value::write_quoted;

pub fn pretty_grammar(g: &Grammar) -> String {
    let mut out = format!("@Grammar {}\n", g.name);
    for c in &g.clauses {
        out.push_str("  ");
        out.push_str(&pretty_clause(c));
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn pretty_clause(c: &Clause) -> String {
    let mut out = c.name.clone();
    if !c.params.is_empty() {
        let _ = write!(out, "({})", c.params.join(","));
    }
    out.push_str(" ::=");
    let body = pretty_alt(&c.body);
    if !body.is_empty() {
        out.push(' ');
        out.push_str(&body);
    }
    out.push('.');
    out
}

/// A body sequence in a context where a top-level `|` needs no parentheses.
pub fn pretty_alt(items: &[Body]) -> String {
    match items {
        [Body::Or(l, r)] => {
            let left = match l.as_slice() {
                [Body::Or(..)] => format!("({})", pretty_alt(l)),
                _ => pretty_seq(l),
            };
            format!("{left} | {}", pretty_alt(r))
        }
        _ => pretty_seq(items),
    }
}

pub fn pretty_seq(items: &[Body]) -> String {
    let printed: Vec<String> = items.iter().map(pretty_item).collect();
    let mut out = String::new();
    for (i, text) in printed.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(text);
        // `A (B | C)` would read back as a call with arguments
        if ends_with_bare_call(text) && printed.get(i + 1).is_some_and(|next| next.starts_with('(')) {
            out.push_str("()");
        }
    }
    out
}

fn ends_with_bare_call(text: &str) -> bool {
    let start = text
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_alphanumeric() || *c == '_' || *c == '$')
        .last()
        .map(|(i, _)| i);
    match start {
        Some(i) => !matches!(&text[i..], "OK" | "ANY" | "EMPTY" | "TEXT"),
        None => false,
    }
}

fn is_postfix_atom(b: &Body) -> bool {
    matches!(
        b,
        Body::Call(..) | Body::Ok | Body::Any | Body::Empty | Body::Text | Body::Actions(_) | Body::Element(_)
    )
}

pub fn pretty_item(b: &Body) -> String {
    match b {
        Body::Or(..) => format!("({})", pretty_alt(std::slice::from_ref(b))),
        Body::Bind(names, body) => {
            let lhs = match names.as_slice() {
                [one] => one.clone(),
                many => format!("[{}]", many.join(",")),
            };
            let rhs = match body.as_slice() {
                [one] => pretty_item(one),
                _ => format!("({})", pretty_alt(body)),
            };
            format!("{lhs} = {rhs}")
        }
        Body::Star(body) => match body.as_slice() {
            [one] if is_postfix_atom(one) => format!("{}*", pretty_item(one)),
            _ => format!("({})*", pretty_alt(body)),
        },
        Body::Empty => "EMPTY".into(),
        Body::Any => "ANY".into(),
        Body::Ok => "OK".into(),
        Body::Text => "TEXT".into(),
        Body::Call(name, args) if args.is_empty() => name.clone(),
        Body::Call(name, args) => format!("{name}({})", pretty_exprs(args)),
        Body::Actions(es) if es.is_empty() => "{ }".into(),
        Body::Actions(es) => format!("{{ {} }}", pretty_exprs(es)),
        Body::Element(spec) => pretty_element(spec),
    }
}

fn pretty_element(spec: &ElementSpec) -> String {
    let mut out = format!("<{}", spec.tag);
    for a in &spec.attrs {
        out.push(' ');
        if a.var == a.attr {
            out.push_str(&a.var);
        } else {
            let _ = write!(out, "{}={}", a.var, a.attr);
        }
    }
    if spec.guarded.is_empty() {
        if spec.else_body.is_empty() {
            out.push_str("/>");
            return out;
        }
        let _ = write!(out, "> {} </{}>", pretty_alt(&spec.else_body), spec.tag);
        return out;
    }
    for (i, g) in spec.guarded.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, " when {}>", pretty_expr(&g.guard));
        let body = pretty_alt(&g.body);
        if !body.is_empty() {
            out.push(' ');
            out.push_str(&body);
        }
    }
    if !spec.else_body.is_empty() {
        let _ = write!(out, " else {}", pretty_alt(&spec.else_body));
    }
    let _ = write!(out, " </{}>", spec.tag);
    out
}

fn pretty_exprs(es: &[Expr]) -> String {
    es.iter().map(pretty_expr).collect::<Vec<_>>().join(", ")
}

/// Binding strength: compare < cons < postfix.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Compare(..) => 0,
        Expr::Cons(..) => 1,
        _ => 2,
    }
}

fn at_least(e: &Expr, min: u8) -> String {
    if level(e) < min {
        format!("({})", pretty_expr(e))
    } else {
        pretty_expr(e)
    }
}

pub fn pretty_expr(e: &Expr) -> String {
    match e {
        Expr::Var(n) => n.clone(),
        Expr::Str(s) => {
            let mut out = String::new();
            let _ = write_quoted(&mut out, s);
            out
        }
        Expr::Int(i) => i.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Null => "null".into(),
        Expr::Construct(c, args) if args.is_empty() && c.starts_with(|ch: char| ch.is_uppercase()) => c.clone(),
        Expr::Construct(c, args) => format!("{c}({})", pretty_exprs(args)),
        Expr::List(items) => format!("Seq{{{}}}", pretty_exprs(items)),
        Expr::Cons(h, t) => format!("{} : {}", at_least(h, 2), at_least(t, 1)),
        Expr::Fold { elem, acc, init, step, over } => format!(
            "{}->iterate({elem} {acc} = {} | {})",
            at_least(over, 2),
            pretty_expr(init),
            pretty_expr(step)
        ),
        Expr::AddChild(t, c) => format!("{}.add({})", at_least(t, 2), pretty_expr(c)),
        Expr::Compare(op, l, r) => {
            let sym = match op {
                CompareOp::Eq => "=",
                CompareOp::Ne => "<>",
            };
            format!("{} {sym} {}", at_least(l, 1), at_least(r, 1))
        }
    }
}
