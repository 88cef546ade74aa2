//! Streaming reader for the supported XML subset.
//!
//! Supported: elements, attributes with quoted values, character data, the
//! predefined entities and character references, comments and the XML
//! declaration (both skipped). DOCTYPE, CDATA sections, processing
//! instructions and namespace prefixes are rejected.
//!
//! The reader keeps a fixed amount of state: one event buffer that is reused
//! and a short queue for text that has to be flushed before the next tag.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Read};

use quick_xml::events::{BytesRef, BytesStart, Event};
use quick_xml::escape::resolve_predefined_entity;
use quick_xml::{Reader, XmlVersion};

use crate::xml::{Attributes, SaxEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SaxErrorKind {
    MalformedXml(String),
    UnsupportedFeature(String),
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{position}: {}", describe(kind))]
pub struct SaxError {
    pub kind: SaxErrorKind,
    pub position: Position,
}

fn describe(kind: &SaxErrorKind) -> String {
    match kind {
        SaxErrorKind::MalformedXml(m) => format!("malformed XML: {m}"),
        SaxErrorKind::UnsupportedFeature(m) => format!("unsupported XML feature: {m}"),
        SaxErrorKind::Io(m) => format!("read error: {m}"),
    }
}

/// Line and column tracking over the consumed bytes of a buffered reader.
struct Counting<R> {
    inner: R,
    at: Position,
}

impl<R: Read> Read for Counting<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        advance(&mut self.at, &buf[..n]);
        Ok(n)
    }
}

impl<R: BufRead> BufRead for Counting<R> {
    fn fill_buf(&mut self) -> std::io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        if let Ok(buf) = self.inner.fill_buf() {
            let n = amt.min(buf.len());
            advance(&mut self.at, &buf[..n]);
        }
        self.inner.consume(amt);
    }
}

fn advance(at: &mut Position, bytes: &[u8]) {
    for &b in bytes {
        if b == b'\n' {
            at.line += 1;
            at.column = 1;
        } else if b & 0xC0 != 0x80 {
            at.column += 1;
        }
    }
}

pub struct SaxReader<R: BufRead> {
    reader: Reader<Counting<R>>,
    buf: Vec<u8>,
    text: String,
    text_at: Position,
    queue: VecDeque<(SaxEvent, Position)>,
    depth: usize,
    seen_root: bool,
    finished: bool,
    keep_whitespace: bool,
    last: Position,
}

impl<'a> SaxReader<&'a [u8]> {
    pub fn from_text(s: &'a str) -> Self {
        SaxReader::new(s.as_bytes())
    }
}

impl<R: BufRead> SaxReader<R> {
    pub fn new(input: R) -> Self {
        let mut reader = Reader::from_reader(Counting { inner: input, at: Position { line: 1, column: 1 } });
        let config = reader.config_mut();
        config.expand_empty_elements = true;
        config.check_end_names = true;
        config.check_comments = true;
        SaxReader {
            reader,
            buf: Vec::new(),
            text: String::new(),
            text_at: Position::default(),
            queue: VecDeque::new(),
            depth: 0,
            seen_root: false,
            finished: false,
            keep_whitespace: false,
            last: Position { line: 1, column: 1 },
        }
    }

    /// Keep whitespace-only text between elements instead of dropping it.
    pub fn keep_whitespace(mut self, keep: bool) -> Self {
        self.keep_whitespace = keep;
        self
    }

    /// Source position where the most recently returned event starts.
    pub fn position(&self) -> Position {
        self.last
    }

    /// Bytes of reader state besides the underlying input; stays bounded by
    /// the size of the largest single event.
    pub fn footprint(&self) -> usize {
        self.buf.capacity() + self.text.capacity() + self.queue.len() * std::mem::size_of::<(SaxEvent, Position)>()
    }

    pub fn next_event(&mut self) -> Result<Option<SaxEvent>, SaxError> {
        loop {
            if let Some((ev, at)) = self.queue.pop_front() {
                self.last = at;
                return Ok(Some(ev));
            }
            if self.finished {
                return Ok(None);
            }
            self.fill()?;
        }
    }

    fn error(&self, at: Position, kind: SaxErrorKind) -> SaxError {
        SaxError { kind, position: at }
    }

    /// Reads raw events until at least one SAX event is queued or input ends.
    fn fill(&mut self) -> Result<(), SaxError> {
        while self.queue.is_empty() && !self.finished {
            let at = self.reader.get_ref().at;
            self.buf.clear();
            let raw = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => classify(ev).map_err(|kind| SaxError { kind, position: at })?,
                Err(e) => {
                    let at = self.reader.get_ref().at;
                    return Err(self.error(at, convert_error(e)));
                }
            };
            match raw {
                Raw::Text(s) => self.push_text(at, &s),
                Raw::Skip => {}
                Raw::Start(ev) => {
                    if self.depth == 0 && self.seen_root {
                        return Err(self.error(at, SaxErrorKind::MalformedXml("more than one root element".into())));
                    }
                    self.flush_text()?;
                    self.seen_root = true;
                    self.depth += 1;
                    self.queue.push_back((ev, at));
                }
                Raw::End(name) => {
                    self.flush_text()?;
                    self.depth -= 1;
                    self.queue.push_back((SaxEvent::EndTag(name), at));
                }
                Raw::Eof => {
                    self.flush_text()?;
                    if self.depth > 0 {
                        return Err(self.error(at, SaxErrorKind::MalformedXml("unclosed element at end of input".into())));
                    }
                    self.finished = true;
                }
            }
        }
        Ok(())
    }

    fn push_text(&mut self, at: Position, s: &str) {
        if self.text.is_empty() {
            self.text_at = at;
        }
        self.text.push_str(s);
    }

    fn flush_text(&mut self) -> Result<(), SaxError> {
        if self.text.is_empty() {
            return Ok(());
        }
        let blank = self.text.chars().all(char::is_whitespace);
        if self.depth == 0 && !blank {
            let err = self.error(self.text_at, SaxErrorKind::MalformedXml("text outside the root element".into()));
            self.text.clear();
            return Err(err);
        }
        if self.depth > 0 && (!blank || self.keep_whitespace) {
            self.queue.push_back((SaxEvent::Text(self.text.clone()), self.text_at));
        }
        self.text.clear();
        Ok(())
    }
}

impl<R: BufRead> Iterator for SaxReader<R> {
    type Item = Result<SaxEvent, SaxError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.next_event() {
            Ok(Some(ev)) => Some(Ok(ev)),
            Ok(None) => None,
            Err(e) => {
                self.finished = true;
                self.queue.clear();
                Some(Err(e))
            }
        }
    }
}

enum Raw {
    Text(String),
    Start(SaxEvent),
    End(String),
    Skip,
    Eof,
}

fn classify(event: Event<'_>) -> Result<Raw, SaxErrorKind> {
    Ok(match event {
        Event::Text(t) => Raw::Text(t.xml10_content().into_owned()),
        Event::GeneralRef(r) => Raw::Text(resolve_reference(&r)?),
        Event::Start(start) => Raw::Start(start_event(&start)?),
        Event::End(end) => Raw::End(name(end.name().as_ref())?),
        Event::Empty(start) => Raw::Start(start_event(&start)?),
        Event::Comment(_) | Event::Decl(_) => Raw::Skip,
        Event::CData(_) => return Err(SaxErrorKind::UnsupportedFeature("CDATA section".into())),
        Event::PI(_) => return Err(SaxErrorKind::UnsupportedFeature("processing instruction".into())),
        Event::DocType(_) => return Err(SaxErrorKind::UnsupportedFeature("DOCTYPE".into())),
        Event::Eof => Raw::Eof,
    })
}

fn name(s: &str) -> Result<String, SaxErrorKind> {
    if s.contains(':') {
        return Err(SaxErrorKind::UnsupportedFeature(format!("namespace-prefixed name {s}")));
    }
    Ok(s.to_string())
}

fn start_event(start: &BytesStart<'_>) -> Result<SaxEvent, SaxErrorKind> {
    let tag = name(start.name().as_ref())?;
    let mut attrs = Attributes::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| SaxErrorKind::MalformedXml(e.to_string()))?;
        let key = name(attr.key.as_ref())?;
        let value = attr.normalized_value(XmlVersion::Implicit1_0).map_err(|e| SaxErrorKind::MalformedXml(e.to_string()))?;
        attrs.insert(key, value.into_owned());
    }
    Ok(SaxEvent::StartTag(tag, attrs))
}

fn resolve_reference(r: &BytesRef<'_>) -> Result<String, SaxErrorKind> {
    if let Some(c) = r.resolve_char_ref().map_err(|e| SaxErrorKind::MalformedXml(e.to_string()))? {
        return Ok(c.to_string());
    }
    let name: &str = r;
    resolve_predefined_entity(name)
        .map(str::to_string)
        .ok_or_else(|| SaxErrorKind::UnsupportedFeature(format!("entity &{name};")))
}

fn convert_error(e: quick_xml::Error) -> SaxErrorKind {
    match e {
        quick_xml::Error::Io(io) => SaxErrorKind::Io(io.to_string()),
        other => SaxErrorKind::MalformedXml(other.to_string()),
    }
}

/// Reads the whole input into events.
pub fn read_events(input: impl BufRead, keep_whitespace: bool) -> Result<Vec<SaxEvent>, SaxError> {
    SaxReader::new(input).keep_whitespace(keep_whitespace).collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::xml::{flatten_tree, tests::arb_tree, XmlTree};

    fn events(s: &str) -> Vec<SaxEvent> {
        read_events(s.as_bytes(), false).unwrap()
    }

    fn err(s: &str) -> SaxError {
        read_events(s.as_bytes(), false).unwrap_err()
    }

    fn attrs(pairs: &[(&str, &str)]) -> Attributes {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn self_closing() {
        assert_eq!(
            events(r#"<B n="foo"/>"#),
            vec![SaxEvent::StartTag("B".into(), attrs(&[("n", "foo")])), SaxEvent::end("B")]
        );
    }

    #[test]
    fn siblings() {
        assert_eq!(
            events("<A><B/><C/></A>"),
            vec![
                SaxEvent::start("A"),
                SaxEvent::start("B"),
                SaxEvent::end("B"),
                SaxEvent::start("C"),
                SaxEvent::end("C"),
                SaxEvent::end("A")
            ]
        );
    }

    #[test]
    fn text_content() {
        assert_eq!(events("<A>hi</A>"), vec![SaxEvent::start("A"), SaxEvent::Text("hi".into()), SaxEvent::end("A")]);
    }

    #[test]
    fn entities_decoded() {
        let evs = events(r#"<A v="&lt;&amp;&gt;&quot;&apos;">a &amp; b&#33;</A>"#);
        assert_eq!(evs[0], SaxEvent::StartTag("A".into(), attrs(&[("v", "<&>\"'")])));
        assert_eq!(evs[1], SaxEvent::Text("a & b!".into()));
    }

    #[test]
    fn whitespace_dropped_or_kept() {
        let doc = "<?xml version=\"1.0\"?>\n<!-- c -->\n<A>\n  <B/>\n</A>\n";
        assert_eq!(events(doc).len(), 4);
        let kept = read_events(doc.as_bytes(), true).unwrap();
        assert_eq!(kept.len(), 6);
        assert_eq!(kept[1], SaxEvent::Text("\n  ".into()));
    }

    #[test]
    fn mismatched_end_tag() {
        let e = err("<A>\n<B></C></A>");
        assert!(matches!(e.kind, SaxErrorKind::MalformedXml(_)), "{e}");
        assert_eq!(e.position.line, 2);
    }

    #[test]
    fn unclosed_element() {
        assert!(matches!(err("<A><B/>").kind, SaxErrorKind::MalformedXml(_)));
    }

    #[test]
    fn bad_attribute() {
        assert!(matches!(err("<A x=1/>").kind, SaxErrorKind::MalformedXml(_)));
        assert!(matches!(err(r#"<A x="1" x="2"/>"#).kind, SaxErrorKind::MalformedXml(_)));
    }

    #[test]
    fn stray_text_and_roots() {
        assert!(matches!(err("hello <A/>").kind, SaxErrorKind::MalformedXml(_)));
        assert!(matches!(err("<A/><B/>").kind, SaxErrorKind::MalformedXml(_)));
    }

    #[test]
    fn unsupported_features() {
        for doc in [
            "<!DOCTYPE a><a/>",
            "<a><![CDATA[x]]></a>",
            "<a><?pi x?></a>",
            "<x:a/>",
            r#"<a x:b="1"/>"#,
            "<a>&nbsp;</a>",
        ] {
            assert!(matches!(err(doc).kind, SaxErrorKind::UnsupportedFeature(_)), "{doc}");
        }
    }

    #[test]
    fn positions() {
        let mut r = SaxReader::from_text("<A>\n  <B/>\n</A>");
        r.next_event().unwrap();
        assert_eq!(r.position(), Position { line: 1, column: 1 });
        r.next_event().unwrap();
        assert_eq!(r.position(), Position { line: 2, column: 3 });
    }

    /// A document produced piece by piece, never held in memory as a whole.
    struct Siblings {
        n: usize,
        i: usize,
        chunk: Vec<u8>,
        pos: usize,
    }

    impl Read for Siblings {
        fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
            if self.pos == self.chunk.len() {
                self.chunk.clear();
                self.pos = 0;
                if self.i == 0 {
                    self.chunk.extend_from_slice(b"<A>");
                }
                if self.i < self.n {
                    self.chunk.extend_from_slice(format!("<B n=\"{}\"/>", self.i).as_bytes());
                } else if self.i == self.n {
                    self.chunk.extend_from_slice(b"</A>");
                }
                self.i += 1;
            }
            let k = buf.len().min(self.chunk.len() - self.pos);
            buf[..k].copy_from_slice(&self.chunk[self.pos..self.pos + k]);
            self.pos += k;
            Ok(k)
        }
    }

    #[test]
    fn footprint_is_constant() {
        let input = std::io::BufReader::new(Siblings { n: 100_000, i: 0, chunk: Vec::new(), pos: 0 });
        let mut r = SaxReader::new(input);
        let mut count = 0;
        let mut early = 0;
        let mut peak = 0;
        while r.next_event().unwrap().is_some() {
            count += 1;
            if count == 1000 {
                early = r.footprint();
            }
            peak = peak.max(r.footprint());
        }
        assert_eq!(count, 200_002);
        assert_eq!(peak, early);
    }

    /// Serialization cannot separate adjacent text nodes.
    fn merge_text(tree: XmlTree) -> XmlTree {
        match tree {
            XmlTree::Element { tag, attrs, children } => {
                let mut merged: Vec<XmlTree> = Vec::new();
                for child in children.into_iter().map(merge_text) {
                    match (merged.last_mut(), child) {
                        (Some(XmlTree::Text(prev)), XmlTree::Text(s)) => prev.push_str(&s),
                        (_, child) => merged.push(child),
                    }
                }
                XmlTree::Element { tag, attrs, children: merged }
            }
            text => text,
        }
    }

    proptest! {
        #[test]
        fn serialized_trees_read_back(tree in arb_tree().prop_map(merge_text)) {
            let tree = match tree {
                XmlTree::Text(_) => XmlTree::element("root", &[], vec![tree]),
                t => t,
            };
            prop_assert_eq!(read_events(tree.to_xml().as_bytes(), true).unwrap(), flatten_tree(&tree));
        }
    }
}
