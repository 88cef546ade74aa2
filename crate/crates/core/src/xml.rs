//! XML trees, SAX events and lookahead tokens.

use std::collections::BTreeMap;
use std::fmt;

pub type Attributes = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlTree {
    Element { tag: String, attrs: Attributes, children: Vec<XmlTree> },
    Text(String),
}

impl XmlTree {
    pub fn element(tag: impl Into<String>, attrs: &[(&str, &str)], children: Vec<XmlTree>) -> Self {
        XmlTree::Element {
            tag: tag.into(),
            attrs: attrs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            children,
        }
    }

    pub fn leaf(tag: impl Into<String>) -> Self {
        XmlTree::element(tag, &[], Vec::new())
    }

    pub fn text(s: impl Into<String>) -> Self {
        XmlTree::Text(s.into())
    }

    pub fn tag(&self) -> Option<&str> {
        match self {
            XmlTree::Element { tag, .. } => Some(tag),
            XmlTree::Text(_) => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            XmlTree::Element { children, .. } => 1 + children.iter().map(XmlTree::depth).max().unwrap_or(0),
            XmlTree::Text(_) => 1,
        }
    }

    /// Serializes the tree as XML text that the SAX reader parses back into
    /// the same event sequence.
    pub fn to_xml(&self) -> String {
        let mut out = String::new();
        self.write_xml(&mut out);
        out
    }

    fn write_xml(&self, out: &mut String) {
        match self {
            XmlTree::Text(s) => escape_into(out, s),
            XmlTree::Element { tag, attrs, children } => {
                out.push('<');
                out.push_str(tag);
                for (k, v) in attrs {
                    out.push(' ');
                    out.push_str(k);
                    out.push_str("=\"");
                    escape_into(out, v);
                    out.push('"');
                }
                if children.is_empty() {
                    out.push_str("/>");
                } else {
                    out.push('>');
                    children.iter().for_each(|c| c.write_xml(out));
                    out.push_str("</");
                    out.push_str(tag);
                    out.push('>');
                }
            }
        }
    }
}

fn escape_into(out: &mut String, s: &str) {
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SaxEvent {
    StartTag(String, Attributes),
    EndTag(String),
    Text(String),
}

impl SaxEvent {
    pub fn start(tag: impl Into<String>) -> Self {
        SaxEvent::StartTag(tag.into(), Attributes::new())
    }

    pub fn end(tag: impl Into<String>) -> Self {
        SaxEvent::EndTag(tag.into())
    }

    pub fn token(&self) -> Token {
        match self {
            SaxEvent::StartTag(t, _) => Token::Tag(t.clone()),
            SaxEvent::EndTag(t) => Token::EndTag(t.clone()),
            SaxEvent::Text(_) => Token::Text,
        }
    }
}

impl fmt::Display for SaxEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SaxEvent::StartTag(t, attrs) => {
                write!(f, "<{t}")?;
                for (k, v) in attrs {
                    write!(f, " {k}={v:?}")?;
                }
                f.write_str(">")
            }
            SaxEvent::EndTag(t) => write!(f, "</{t}>"),
            SaxEvent::Text(s) => write!(f, "text({s:?})"),
        }
    }
}

/// Tag name of the virtual element wrapped around every document; its end
/// tag is the end-of-input lookahead.
pub const END_OF_INPUT: &str = "#end";

/// Lookahead alphabet of predict tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Tag(String),
    EndTag(String),
    Text,
    Wildcard,
}

impl Token {
    pub fn end_of_input() -> Token {
        Token::EndTag(END_OF_INPUT.to_string())
    }

    fn sort_key(&self) -> (u8, &str, u8) {
        match self {
            Token::Tag(t) if t == END_OF_INPUT => (1, t, 0),
            Token::EndTag(t) if t == END_OF_INPUT => (1, t, 1),
            Token::Tag(t) => (0, t, 0),
            Token::EndTag(t) => (0, t, 1),
            Token::Text => (2, "", 0),
            Token::Wildcard => (3, "", 0),
        }
    }
}

/// Tags sort by name with each start tag directly before its end tag,
/// followed by end of input, text and the wildcard.
impl Ord for Token {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Token {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Tag(t) => f.write_str(t),
            Token::EndTag(t) if t == END_OF_INPUT => f.write_str("EOF"),
            Token::EndTag(t) => write!(f, "/{t}"),
            Token::Text => f.write_str("TEXT"),
            Token::Wildcard => f.write_str("*"),
        }
    }
}

/// Pre-order linearization of a tree into SAX events.
pub fn flatten_tree(tree: &XmlTree) -> Vec<SaxEvent> {
    let mut out = Vec::new();
    flatten_into(tree, &mut out);
    out
}

pub fn flatten_trees(trees: &[XmlTree]) -> Vec<SaxEvent> {
    let mut out = Vec::new();
    trees.iter().for_each(|t| flatten_into(t, &mut out));
    out
}

fn flatten_into(tree: &XmlTree, out: &mut Vec<SaxEvent>) {
    match tree {
        XmlTree::Text(s) => out.push(SaxEvent::Text(s.clone())),
        XmlTree::Element { tag, attrs, children } => {
            out.push(SaxEvent::StartTag(tag.clone(), attrs.clone()));
            children.iter().for_each(|c| flatten_into(c, out));
            out.push(SaxEvent::EndTag(tag.clone()));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeBuildError {
    #[error("end tag </{found}> does not match open element <{expected}>")]
    Mismatch { expected: String, found: String },
    #[error("end tag </{0}> without open element")]
    UnexpectedEnd(String),
    #[error("{0} element(s) left open at end of events")]
    Unclosed(usize),
}

/// Inverse of [`flatten_trees`]: rebuilds the forest from a balanced event stream.
pub fn build_trees(events: impl IntoIterator<Item = SaxEvent>) -> Result<Vec<XmlTree>, TreeBuildError> {
    let mut stack: Vec<(String, Attributes, Vec<XmlTree>)> = Vec::new();
    let mut roots = Vec::new();
    for ev in events {
        match ev {
            SaxEvent::StartTag(tag, attrs) => stack.push((tag, attrs, Vec::new())),
            SaxEvent::Text(s) => match stack.last_mut() {
                Some((_, _, children)) => children.push(XmlTree::Text(s)),
                None => roots.push(XmlTree::Text(s)),
            },
            SaxEvent::EndTag(t) => {
                let (tag, attrs, children) = stack.pop().ok_or_else(|| TreeBuildError::UnexpectedEnd(t.clone()))?;
                if tag != t {
                    return Err(TreeBuildError::Mismatch { expected: tag, found: t });
                }
                let node = XmlTree::Element { tag, attrs, children };
                match stack.last_mut() {
                    Some((_, _, children)) => children.push(node),
                    None => roots.push(node),
                }
            }
        }
    }
    if !stack.is_empty() {
        return Err(TreeBuildError::Unclosed(stack.len()));
    }
    Ok(roots)
}
