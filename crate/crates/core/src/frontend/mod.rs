//! Concrete grammar syntax (`.xg` files): lexer, parser and pretty printer.
//!
//! ```text
//! @Grammar Test
//!   A ::= <A> b = (B | C)* </A> { b }.
//!   B ::= <B n=name/> { n }.
//!   C ::= <C n=name/> { n }.
//! end
//! ```
//!
//! Element guards are written inside the start tag and between alternatives:
//! `<T k when k = "a"> X when k = "b"> Y else Z </T>`.
//!
//! In expressions a bare identifier starting with an upper-case letter is a
//! nullary constructor (`Nil`); any other bare identifier is a variable.

use std::fmt;

mod lexer;
mod parser;
mod pretty;

pub use parser::{parse_expr, parse_grammar};
pub use pretty::{pretty_alt, pretty_clause, pretty_expr, pretty_grammar, pretty_item, pretty_seq};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    pub fn error(span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic { span, message: message.into(), severity: Severity::Error }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}: {}", self.span, self.message)
    }
}
