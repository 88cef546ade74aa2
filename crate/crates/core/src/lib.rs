//! Grammars over XML documents, checked, normalized and compiled into LL(1)
//! predict tables that drive a streaming parser over SAX events.
//!
//! ```
//! use xmlgram::{analysis::PredictTable, engine, frontend, normalize, sax::SaxReader};
//!
//! let g = frontend::parse_grammar(
//!     "@Grammar Test
//!        A ::= <A> b = (B | C)* </A> {b}.
//!        B ::= <B n=name/> {n}.
//!        C ::= <C n=name/> {n}.
//!      end",
//! )
//! .unwrap();
//! let table = PredictTable::build(normalize::normalize_grammar(&g), "A").unwrap();
//! let doc = SaxReader::from_text(r#"<A><B name="x"/><C name="y"/></A>"#);
//! let value = engine::run(&table, "A", &[], doc).unwrap();
//! assert_eq!(value.to_string(), r#"Cons("x",Cons("y",Nil))"#);
//! ```

pub mod ast;
pub mod frontend;
pub mod wellformed;
pub mod value;
pub mod expr;
pub mod xml;
pub mod normalize;
pub mod analysis;
pub mod sax;
pub mod engine;
pub mod oracle;
