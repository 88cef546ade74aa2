use super::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    AtGrammar,
    Define,     // ::=
    Dot,        // .
    Bar,        // |
    Star,       // *
    LParen,     // (
    RParen,     // )
    LBrace,     // {
    RBrace,     // }
    LBracket,   // [
    RBracket,   // ]
    Comma,      // ,
    Eq,         // =
    NotEq,      // <>
    Lt,         // <
    LtSlash,    // </
    Gt,         // >
    SlashGt,    // />
    Arrow,      // ->
    Colon,      // :
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::AtGrammar => "`@Grammar`".into(),
            Tok::Define => "`::=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Star => "`*`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::NotEq => "`<>`".into(),
            Tok::Lt => "`<`".into(),
            Tok::LtSlash => "`</`".into(),
            Tok::Gt => "`>`".into(),
            Tok::SlashGt => "`/>`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn lex(src: &str) -> Result<Vec<Spanned>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        let (start_line, start_col, start) = (line, col, i);
        let span_to = |end: usize| SourceSpan { line: start_line, column: start_col, length: end - start };
        let peek = |k: usize| chars.get(i + k).copied();

        let tok = if is_ident_start(c) {
            while i < chars.len() && is_ident_char(chars[i]) {
                advance!();
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '-' && peek(1).is_some_and(|d| d.is_ascii_digit())) {
            advance!();
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!();
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| Diagnostic::error(span_to(i), format!("integer literal {text} out of range")))?;
            Tok::Int(n)
        } else if c == '"' {
            advance!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(Diagnostic::error(span_to(i), "unterminated string literal")),
                    Some('"') => {
                        advance!();
                        break;
                    }
                    Some('\\') => {
                        advance!();
                        let esc = match chars.get(i) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('r') => '\r',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => return Err(Diagnostic::error(span_to(i), "invalid escape in string literal")),
                        };
                        s.push(esc);
                        advance!();
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance!();
                    }
                }
            }
            Tok::Str(s)
        } else if c == '@' {
            advance!();
            let word_start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                advance!();
            }
            let word: String = chars[word_start..i].iter().collect();
            if word != "Grammar" {
                return Err(Diagnostic::error(span_to(i), format!("unknown token `@{word}`")));
            }
            Tok::AtGrammar
        } else {
            let (tok, len) = match (c, peek(1), peek(2)) {
                (':', Some(':'), Some('=')) => (Tok::Define, 3),
                ('<', Some('/'), _) => (Tok::LtSlash, 2),
                ('<', Some('>'), _) => (Tok::NotEq, 2),
                ('/', Some('>'), _) => (Tok::SlashGt, 2),
                ('-', Some('>'), _) => (Tok::Arrow, 2),
                ('<', ..) => (Tok::Lt, 1),
                ('>', ..) => (Tok::Gt, 1),
                ('.', ..) => (Tok::Dot, 1),
                ('|', ..) => (Tok::Bar, 1),
                ('*', ..) => (Tok::Star, 1),
                ('(', ..) => (Tok::LParen, 1),
                (')', ..) => (Tok::RParen, 1),
                ('{', ..) => (Tok::LBrace, 1),
                ('}', ..) => (Tok::RBrace, 1),
                ('[', ..) => (Tok::LBracket, 1),
                (']', ..) => (Tok::RBracket, 1),
                (',', ..) => (Tok::Comma, 1),
                ('=', ..) => (Tok::Eq, 1),
                (':', ..) => (Tok::Colon, 1),
                _ => {
                    return Err(Diagnostic::error(
                        SourceSpan { line, column: col, length: 1 },
                        format!("unknown token `{c}`"),
                    ))
                }
            };
            for _ in 0..len {
                advance!();
            }
            tok
        };
        out.push(Spanned { tok, span: span_to(i) });
    }
    out.push(Spanned { tok: Tok::Eof, span: SourceSpan { line, column: col, length: 0 } });
    Ok(out)
}
