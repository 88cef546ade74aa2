//! Synthesized values and variable environments.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A synthesized value. Compound payloads sit behind `Arc`, so cloning a
/// value is O(1) and values can be shared across threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Str(Arc<str>),
    Int(i64),
    Bool(bool),
    Null,
    Term(Arc<str>, Arc<[Value]>),
    List(Arc<[Value]>),
    Tuple(Arc<[Value]>),
}

impl Value {
    pub fn str(s: impl AsRef<str>) -> Value {
        Value::Str(Arc::from(s.as_ref()))
    }

    pub fn term(ctor: impl AsRef<str>, args: Vec<Value>) -> Value {
        Value::Term(Arc::from(ctor.as_ref()), Arc::from(args))
    }

    pub fn list(items: Vec<Value>) -> Value {
        Value::List(Arc::from(items))
    }

    pub fn tuple(items: Vec<Value>) -> Value {
        Value::Tuple(Arc::from(items))
    }

    pub fn nil() -> Value {
        Value::term("Nil", Vec::new())
    }

    pub fn cons(head: Value, tail: Value) -> Value {
        Value::term("Cons", vec![head, tail])
    }

    /// Builds a `Cons(..., Nil)` chain.
    pub fn cons_list(items: impl IntoIterator<Item = Value, IntoIter: DoubleEndedIterator>) -> Value {
        items.into_iter().rev().fold(Value::nil(), |tail, head| Value::cons(head, tail))
    }

    /// Elements of a `List` value or of a `Cons`/`Nil` chain.
    pub fn as_sequence(&self) -> Option<Vec<Value>> {
        match self {
            Value::List(items) => Some(items.to_vec()),
            Value::Term(..) => {
                let mut out = Vec::new();
                let mut cur = self;
                loop {
                    match cur {
                        Value::Term(c, args) if &**c == "Nil" && args.is_empty() => return Some(out),
                        Value::Term(c, args) if &**c == "Cons" && args.len() == 2 => {
                            out.push(args[0].clone());
                            cur = &args[1];
                        }
                        _ => return None,
                    }
                }
            }
            _ => None,
        }
    }

    /// Rewrites every well-formed `Cons`/`Nil` chain into a `List`.
    pub fn flatten_lists(&self) -> Value {
        match self {
            Value::Term(..) => match self.as_sequence() {
                Some(items) => Value::list(items.iter().map(Value::flatten_lists).collect()),
                None => {
                    let Value::Term(c, args) = self else { unreachable!() };
                    Value::Term(c.clone(), args.iter().map(Value::flatten_lists).collect())
                }
            },
            Value::List(items) => Value::List(items.iter().map(Value::flatten_lists).collect()),
            Value::Tuple(items) => Value::Tuple(items.iter().map(Value::flatten_lists).collect()),
            other => other.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::Value as J;
        match self {
            Value::Str(s) => J::String(s.to_string()),
            Value::Int(i) => J::from(*i),
            Value::Bool(b) => J::Bool(*b),
            Value::Null => J::Null,
            Value::Term(c, args) => {
                let mut obj = serde_json::Map::new();
                obj.insert("ctor".into(), J::String(c.to_string()));
                obj.insert("args".into(), J::Array(args.iter().map(Value::to_json).collect()));
                J::Object(obj)
            }
            Value::List(items) | Value::Tuple(items) => {
                J::Array(items.iter().map(Value::to_json).collect())
            }
        }
    }
}

/// Releases nested payloads from an explicit stack, so dropping a long
/// `Cons` chain does not recurse once per element.
impl Drop for Value {
    fn drop(&mut self) {
        let mut pending = Vec::new();
        detach_children(self, &mut pending);
        while let Some(mut v) = pending.pop() {
            detach_children(&mut v, &mut pending);
        }
    }
}

fn detach_children(v: &mut Value, out: &mut Vec<Value>) {
    if let Value::Term(_, items) | Value::List(items) | Value::Tuple(items) = v {
        if let Some(items) = Arc::get_mut(items) {
            for item in items.iter_mut() {
                if matches!(item, Value::Term(..) | Value::List(_) | Value::Tuple(_)) {
                    out.push(std::mem::replace(item, Value::Null));
                }
            }
        }
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, items: &[Value]) -> fmt::Result {
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for ch in s.chars() {
        match ch {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// Canonical term syntax: `Ctor(a,b)`, `"str"`, `[a,b]`, `(a,b)`, `null`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => write_quoted(f, s),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Null => f.write_str("null"),
            Value::Term(..) => {
                // walk the last argument iteratively so long lists print without deep recursion
                let mut cur = self;
                let mut open = 0;
                while let Value::Term(c, args) = cur {
                    match args.split_last() {
                        Some((last, init)) if matches!(last, Value::Term(..)) => {
                            f.write_str(c)?;
                            f.write_str("(")?;
                            for v in init {
                                write!(f, "{v},")?;
                            }
                            open += 1;
                            cur = last;
                        }
                        _ => break,
                    }
                }
                let Value::Term(c, args) = cur else { unreachable!() };
                f.write_str(c)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    write_joined(f, args)?;
                    f.write_str(")")?;
                }
                for _ in 0..open {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Value::List(items) => {
                f.write_str("[")?;
                write_joined(f, items)?;
                f.write_str("]")
            }
            Value::Tuple(items) => {
                f.write_str("(")?;
                write_joined(f, items)?;
                f.write_str(")")
            }
        }
    }
}

/// A finite map from variable names to values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    bindings: BTreeMap<String, Value>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.bindings.contains_key(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) {
        self.bindings.insert(name.into(), value);
    }

    /// `self[name ↦ value]`
    pub fn extended(&self, name: impl Into<String>, value: Value) -> Env {
        let mut out = self.clone();
        out.insert(name, value);
        out
    }

    /// `self ⊕ other`: union of domains, `other` wins on overlap.
    pub fn merge(&self, other: &Env) -> Env {
        let mut out = self.clone();
        for (k, v) in &other.bindings {
            out.bindings.insert(k.clone(), v.clone());
        }
        out
    }

    /// Domain restricted to `names`.
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Env {
        let mut out = Env::new();
        for n in names {
            if let Some(v) = self.bindings.get(n) {
                out.bindings.insert(n.to_string(), v.clone());
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl<K: Into<String>> FromIterator<(K, Value)> for Env {
    fn from_iter<I: IntoIterator<Item = (K, Value)>>(iter: I) -> Self {
        Env { bindings: iter.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}
