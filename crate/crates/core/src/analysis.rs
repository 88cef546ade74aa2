//! Nullability, first and follow sets, and LL(1) predict tables for grammars
//! in normal form.
//!
//! Bindings are transparent to the analysis. Each element body is treated as
//! a sequence followed by the element's end tag, and the start rule is
//! followed by the end-of-input token. A definition is predicted by the first
//! tokens of every item reachable through a nullable prefix and, when its
//! whole body is nullable, by the follow set of its rule.
//!
//! `ANY` contributes the wildcard token. A wildcard entry is a per-row
//! default consulted for start tags and text that have no exact entry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use crate::ast::{Body, Clause, Grammar};
use crate::frontend::pretty_alt;
use crate::normalize::{check_normal_form, NormalFormViolation};
use crate::xml::Token;

pub type TokenSet = BTreeSet<Token>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("rule {rule} calls undefined rule {callee}")]
    UndefinedClause { rule: String, callee: String },
    #[error("start rule {0} is not defined")]
    UndefinedStart(String),
    #[error(transparent)]
    NotNormalForm(#[from] NormalFormViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnalysisResult {
    pub nullable: BTreeMap<String, bool>,
    pub first: BTreeMap<String, TokenSet>,
    pub follow: BTreeMap<String, TokenSet>,
}

impl AnalysisResult {
    pub fn is_nullable(&self, rule: &str) -> bool {
        self.nullable.get(rule).copied().unwrap_or(false)
    }

    pub fn first_of(&self, rule: &str) -> &TokenSet {
        self.first.get(rule).unwrap_or(&EMPTY)
    }

    pub fn follow_of(&self, rule: &str) -> &TokenSet {
        self.follow.get(rule).unwrap_or(&EMPTY)
    }

    pub fn item_nullable(&self, b: &Body) -> bool {
        match b {
            Body::Empty | Body::Ok | Body::Actions(_) => true,
            Body::Any | Body::Text | Body::Element(_) => false,
            Body::Call(n, _) => self.is_nullable(n),
            Body::Bind(_, body) => self.seq_nullable(body),
            Body::Or(l, r) => self.seq_nullable(l) || self.seq_nullable(r),
            Body::Star(_) => true,
        }
    }

    pub fn seq_nullable(&self, items: &[Body]) -> bool {
        items.iter().all(|b| self.item_nullable(b))
    }

    pub fn item_first(&self, b: &Body) -> TokenSet {
        match b {
            Body::Element(spec) => [Token::Tag(spec.tag.clone())].into(),
            Body::Text => [Token::Text].into(),
            Body::Any => [Token::Wildcard].into(),
            Body::Call(n, _) => self.first_of(n).clone(),
            Body::Bind(_, body) | Body::Star(body) => self.seq_first(body),
            Body::Or(l, r) => &self.seq_first(l) | &self.seq_first(r),
            Body::Empty | Body::Ok | Body::Actions(_) => TokenSet::new(),
        }
    }

    /// First tokens of a sequence: those of every item behind a nullable prefix.
    pub fn seq_first(&self, items: &[Body]) -> TokenSet {
        let mut out = TokenSet::new();
        for b in items {
            out.extend(self.item_first(b));
            if !self.item_nullable(b) {
                break;
            }
        }
        out
    }
}

static EMPTY: TokenSet = TokenSet::new();

/// Least fixpoint of the nullable, first and follow equations.
pub fn compute_sets(g: &Grammar, start: &str) -> Result<AnalysisResult, AnalysisError> {
    compute_sets_observed(g, start, |_| {})
}

/// As [`compute_sets`], calling `observe` with the sets after every round.
pub fn compute_sets_observed(
    g: &Grammar,
    start: &str,
    mut observe: impl FnMut(&AnalysisResult),
) -> Result<AnalysisResult, AnalysisError> {
    check_normal_form(g)?;
    check_calls(g)?;
    if !g.has_clause(start) {
        return Err(AnalysisError::UndefinedStart(start.to_string()));
    }
    let mut sets = AnalysisResult::default();
    for name in g.clause_names() {
        sets.nullable.insert(name.to_string(), false);
        sets.first.insert(name.to_string(), TokenSet::new());
        sets.follow.insert(name.to_string(), TokenSet::new());
    }
    sets.follow.get_mut(start).unwrap().insert(Token::end_of_input());
    loop {
        let before = sets.clone();
        for c in &g.clauses {
            if sets.seq_nullable(&c.body) {
                sets.nullable.insert(c.name.clone(), true);
            }
            let first = sets.seq_first(&c.body);
            sets.first.get_mut(&c.name).unwrap().extend(first);
            let after = sets.follow_of(&c.name).clone();
            propagate_follow(&mut sets, &c.body, &after);
        }
        observe(&sets);
        if sets == before {
            return Ok(sets);
        }
    }
}

/// Adds to the follow set of every rule called at a tail position of an item
/// in `items` the tokens that can come next; `after` follows the sequence.
fn propagate_follow(sets: &mut AnalysisResult, items: &[Body], after: &TokenSet) {
    for (i, item) in items.iter().enumerate() {
        let rest = &items[i + 1..];
        let mut next = sets.seq_first(rest);
        if sets.seq_nullable(rest) {
            next.extend(after.iter().cloned());
        }
        match item {
            Body::Call(n, _) => {
                if let Some(f) = sets.follow.get_mut(n) {
                    f.extend(next);
                }
            }
            Body::Bind(_, body) => propagate_follow(sets, body, &next),
            Body::Element(spec) => {
                let end: TokenSet = [Token::EndTag(spec.tag.clone())].into();
                for body in spec.bodies() {
                    propagate_follow(sets, body, &end);
                }
            }
            _ => {}
        }
    }
}

fn check_calls(g: &Grammar) -> Result<(), AnalysisError> {
    fn walk(g: &Grammar, rule: &str, items: &[Body]) -> Result<(), AnalysisError> {
        for item in items {
            match item {
                Body::Call(n, _) if !g.has_clause(n) => {
                    return Err(AnalysisError::UndefinedClause { rule: rule.to_string(), callee: n.clone() })
                }
                Body::Bind(_, b) | Body::Star(b) => walk(g, rule, b)?,
                Body::Or(l, r) => {
                    walk(g, rule, l)?;
                    walk(g, rule, r)?;
                }
                Body::Element(spec) => {
                    for b in spec.bodies() {
                        walk(g, rule, b)?;
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
    g.clauses.iter().try_for_each(|c| walk(g, &c.name, &c.body))
}

/// Several definitions competing for one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub rule: String,
    pub token: Token,
    /// Indices of the competing definitions within the rule, from 0.
    pub definitions: Vec<usize>,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let defs: Vec<String> = self.definitions.iter().map(|d| (d + 1).to_string()).collect();
        write!(f, "conflict in rule {} on {}: definitions {}", self.rule, self.token, defs.join(", "))
    }
}

/// An exact entry that hides the row's wildcard default for that token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub rule: String,
    pub token: Token,
    pub exact: usize,
    pub default: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictTable {
    grammar: Grammar,
    start: String,
    analysis: AnalysisResult,
    /// Definitions of each rule as indices into `grammar.clauses`.
    definitions: BTreeMap<String, Vec<usize>>,
    entries: BTreeMap<(String, Token), usize>,
    defaults: BTreeMap<String, usize>,
    conflicts: Vec<Conflict>,
    overlaps: Vec<Overlap>,
}

impl PredictTable {
    /// Analyses a normalized grammar and builds its table.
    pub fn build(grammar: Grammar, start: &str) -> Result<PredictTable, AnalysisError> {
        let analysis = compute_sets(&grammar, start)?;
        Ok(build_predict_table(grammar, start, analysis))
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn analysis(&self) -> &AnalysisResult {
        &self.analysis
    }

    pub fn conflicts(&self) -> &[Conflict] {
        &self.conflicts
    }

    pub fn overlaps(&self) -> &[Overlap] {
        &self.overlaps
    }

    pub fn is_ll1(&self) -> bool {
        self.conflicts.is_empty()
    }

    /// The `index`-th definition (from 0) of `rule`.
    pub fn definition(&self, rule: &str, index: usize) -> Option<&Clause> {
        let i = *self.definitions.get(rule)?.get(index)?;
        self.grammar.clauses.get(i)
    }

    pub fn definition_count(&self, rule: &str) -> usize {
        self.definitions.get(rule).map_or(0, Vec::len)
    }

    /// Index of the definition in the cell, without the wildcard default.
    pub fn entry(&self, rule: &str, token: &Token) -> Option<usize> {
        self.entries.get(&(rule.to_string(), token.clone())).copied()
    }

    pub fn default_entry(&self, rule: &str) -> Option<usize> {
        self.defaults.get(rule).copied()
    }

    /// Index of the definition to run for `rule` on lookahead `token`.
    pub fn predict_index(&self, rule: &str, token: &Token) -> Option<usize> {
        self.entry(rule, token).or_else(|| match token {
            Token::Tag(_) | Token::Text => self.default_entry(rule),
            _ => None,
        })
    }

    pub fn predict(&self, rule: &str, token: &Token) -> Option<&Clause> {
        self.definition(rule, self.predict_index(rule, token)?)
    }

    /// All nonempty cells, including defaults under the wildcard token.
    pub fn cells(&self) -> impl Iterator<Item = (&str, &Token, usize)> {
        let wildcard = &WILDCARD;
        self.entries
            .iter()
            .map(|((r, t), d)| (r.as_str(), t, *d))
            .chain(self.defaults.iter().map(move |(r, d)| (r.as_str(), wildcard, *d)))
    }

    /// One `rule<TAB>token<TAB>definition` line per cell, sorted.
    pub fn render_kv(&self) -> String {
        let mut cells: Vec<(&str, &Token, usize)> = self.cells().collect();
        cells.sort();
        let mut out = String::new();
        for (r, t, d) in cells {
            let _ = writeln!(out, "{r}\t{t}\t{d}");
        }
        out
    }

    /// Aligned table with one row per rule and one column per token; cells
    /// hold the predicted definition bodies. Conflicts are listed below.
    pub fn render_text(&self) -> String {
        let mut columns: BTreeSet<Token> = BTreeSet::new();
        for c in &self.grammar.clauses {
            collect_tags(&c.body, &mut columns);
        }
        columns.extend(self.cells().map(|(_, t, _)| t.clone()));
        let columns: Vec<Token> = columns.into_iter().collect();

        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec![String::new()];
        header.extend(columns.iter().map(Token::to_string));
        rows.push(header);
        for rule in self.grammar.clause_names() {
            let mut row = vec![rule.to_string()];
            for t in &columns {
                let cell = match t {
                    Token::Wildcard => self.default_entry(rule),
                    _ => self.entry(rule, t),
                };
                row.push(cell.and_then(|d| self.definition(rule, d)).map(|c| pretty_alt(&c.body)).unwrap_or_default());
            }
            rows.push(row);
        }

        let widths: Vec<usize> =
            (0..=columns.len()).map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        for c in &self.conflicts {
            let _ = writeln!(out, "{c}");
        }
        out
    }
}

static WILDCARD: Token = Token::Wildcard;

fn collect_tags(items: &[Body], out: &mut BTreeSet<Token>) {
    for item in items {
        match item {
            Body::Element(spec) => {
                out.insert(Token::Tag(spec.tag.clone()));
                out.insert(Token::EndTag(spec.tag.clone()));
                for b in spec.bodies() {
                    collect_tags(b, out);
                }
            }
            Body::Bind(_, b) | Body::Star(b) => collect_tags(b, out),
            Body::Or(l, r) => {
                collect_tags(l, out);
                collect_tags(r, out);
            }
            _ => {}
        }
    }
}

/// Fills the table from the analysis; competing definitions are recorded as
/// conflicts and the first one keeps the cell.
pub fn build_predict_table(grammar: Grammar, start: &str, analysis: AnalysisResult) -> PredictTable {
    let mut definitions: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, c) in grammar.clauses.iter().enumerate() {
        definitions.entry(c.name.clone()).or_default().push(i);
    }

    let mut candidates: BTreeMap<(String, Token), Vec<usize>> = BTreeMap::new();
    for (rule, defs) in &definitions {
        for (d, &ci) in defs.iter().enumerate() {
            let body = &grammar.clauses[ci].body;
            let mut tokens = analysis.seq_first(body);
            if analysis.seq_nullable(body) {
                tokens.extend(analysis.follow_of(rule).iter().cloned());
            }
            for t in tokens {
                let cell = candidates.entry((rule.clone(), t)).or_default();
                if !cell.contains(&d) {
                    cell.push(d);
                }
            }
        }
    }

    let mut entries = BTreeMap::new();
    let mut defaults = BTreeMap::new();
    let mut conflicts = Vec::new();
    for ((rule, token), defs) in candidates {
        if defs.len() > 1 {
            conflicts.push(Conflict { rule: rule.clone(), token: token.clone(), definitions: defs.clone() });
        }
        if token == Token::Wildcard {
            defaults.insert(rule, defs[0]);
        } else {
            entries.insert((rule, token), defs[0]);
        }
    }

    let mut overlaps = Vec::new();
    for ((rule, token), &exact) in &entries {
        if let (Some(&default), Token::Tag(_) | Token::Text) = (defaults.get(rule), token) {
            if default != exact {
                overlaps.push(Overlap { rule: rule.clone(), token: token.clone(), exact, default });
            }
        }
    }

    PredictTable {
        grammar,
        start: start.to_string(),
        analysis,
        definitions,
        entries,
        defaults,
        conflicts,
        overlaps,
    }
}

/// `true` when no cell has competing definitions, with one report per
/// conflicting cell.
pub fn check_ll1(table: &PredictTable) -> (bool, Vec<Conflict>) {
    (table.is_ll1(), table.conflicts.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{AttrBinding, ElementSpec, Expr};
    use crate::frontend::parse_grammar;
    use crate::normalize::normalize_grammar;

    fn table(src: &str) -> PredictTable {
        let g = normalize_grammar(&parse_grammar(src).unwrap());
        let start = g.first_clause().unwrap().to_string();
        PredictTable::build(g, &start).unwrap()
    }

    fn tag(t: &str) -> Token {
        Token::Tag(t.into())
    }

    fn end(t: &str) -> Token {
        Token::EndTag(t.into())
    }

    #[test]
    fn body_null_cases() {
        let sets = AnalysisResult {
            nullable: [("n".to_string(), true)].into(),
            ..AnalysisResult::default()
        };
        assert!(sets.item_nullable(&Body::Ok));
        assert!(sets.item_nullable(&Body::Empty));
        assert!(sets.item_nullable(&Body::Actions(vec![])));
        assert!(!sets.item_nullable(&Body::Any));
        assert!(!sets.item_nullable(&Body::Text));
        assert!(sets.item_nullable(&Body::bind("x", vec![Body::call("n")])));
        assert!(!sets.item_nullable(&Body::call("m")));
    }

    #[test]
    fn test_grammar_sets() {
        let t = table(include_str!("../testdata/test.xg"));
        let a = t.analysis();
        assert!(a.is_nullable("A$1"));
        assert_eq!(a.first_of("A$1"), &TokenSet::from([tag("B"), tag("C")]));
        assert!(a.follow_of("A$1").contains(&end("A")));
        assert_eq!(a.first_of("B"), &TokenSet::from([tag("B")]));
        assert!(a.follow_of("A").contains(&Token::end_of_input()));
    }

    #[test]
    fn test_grammar_table() {
        let t = table(include_str!("../testdata/test.xg"));
        assert!(t.is_ll1());
        let cells: Vec<(String, String, usize)> =
            t.cells().map(|(r, tok, d)| (r.to_string(), tok.to_string(), d)).collect();
        let expected = [
            ("A", "A", 0),
            ("A$1", "/A", 1),
            ("A$1", "B", 0),
            ("A$1", "C", 0),
            ("A$2", "B", 0),
            ("A$2", "C", 1),
            ("B", "B", 0),
            ("C", "C", 0),
        ];
        let expected: Vec<(String, String, usize)> =
            expected.iter().map(|(r, tok, d)| (r.to_string(), tok.to_string(), *d)).collect();
        assert_eq!(cells, expected);
    }

    #[test]
    fn predict_b_on_b() {
        let t = table(include_str!("../testdata/test.xg"));
        let clause = t.predict("B", &tag("B")).unwrap();
        let expected = Clause {
            name: "B".into(),
            params: vec![],
            body: vec![
                Body::Element(ElementSpec {
                    tag: "B".into(),
                    attrs: vec![AttrBinding::renamed("n", "name")],
                    guarded: vec![],
                    else_body: vec![Body::Ok],
                }),
                Body::Actions(vec![Expr::var("n")]),
            ],
        };
        assert_eq!(clause, &expected);
    }

    #[test]
    fn empty_only_rule() {
        let t = table("@Grammar G X ::= EMPTY {1}. end");
        assert!(t.analysis().is_nullable("X"));
        assert!(t.analysis().first_of("X").is_empty());
        assert_eq!(t.predict_index("X", &Token::end_of_input()), Some(0));
    }

    #[test]
    fn conflict_recorded() {
        let g = parse_grammar(include_str!("../testdata/conflict.xg")).unwrap();
        let t = PredictTable::build(g, "X").unwrap();
        let (ok, reports) = check_ll1(&t);
        assert!(!ok);
        assert_eq!(reports, vec![Conflict { rule: "X".into(), token: tag("A"), definitions: vec![0, 1] }]);
    }

    #[test]
    fn empty_grammar_is_ll1() {
        let t = build_predict_table(Grammar::new("E"), "", AnalysisResult::default());
        assert!(check_ll1(&t).0);
    }

    #[test]
    fn wildcard_defaults() {
        let t = table("@Grammar G R ::= <r> X </r>. X ::= <a/> {1}. X ::= ANY {2}. end");
        assert_eq!(t.predict_index("X", &tag("a")), Some(0));
        assert_eq!(t.predict_index("X", &tag("zzz")), Some(1));
        assert_eq!(t.predict_index("X", &Token::Text), Some(1));
        assert_eq!(t.predict_index("X", &end("r")), None);
        assert_eq!(t.overlaps().len(), 1);
        assert!(t.is_ll1());
    }

    #[test]
    fn two_defaults_conflict() {
        let t = table("@Grammar G X ::= ANY {1}. X ::= ANY {2}. end");
        assert_eq!(t.conflicts()[0].token, Token::Wildcard);
    }

    #[test]
    fn undefined_callee() {
        let g = parse_grammar("@Grammar G X ::= Y. end").unwrap();
        assert_eq!(
            compute_sets(&g, "X"),
            Err(AnalysisError::UndefinedClause { rule: "X".into(), callee: "Y".into() })
        );
    }

    #[test]
    fn requires_normal_form() {
        let g = parse_grammar(include_str!("../testdata/test.xg")).unwrap();
        assert!(matches!(compute_sets(&g, "A"), Err(AnalysisError::NotNormalForm(_))));
    }

    #[test]
    fn rounds_are_monotone() {
        let g = normalize_grammar(&parse_grammar(include_str!("../testdata/models.xg")).unwrap());
        let mut rounds = Vec::new();
        compute_sets_observed(&g, "Package", |s| rounds.push(s.clone())).unwrap();
        assert!(rounds.len() >= 2);
        for pair in rounds.windows(2) {
            for (rule, set) in &pair[0].first {
                assert!(set.is_subset(&pair[1].first[rule]));
                assert!(pair[0].follow[rule].is_subset(&pair[1].follow[rule]));
                assert!(!pair[0].nullable[rule] || pair[1].nullable[rule]);
            }
        }
    }

    #[test]
    fn models_grammar_is_ll1() {
        let t = table(include_str!("../testdata/models.xg"));
        assert!(t.is_ll1(), "{:?}", t.conflicts());
    }

    #[test]
    fn kv_rendering() {
        let t = table(include_str!("../testdata/test.xg"));
        assert_eq!(t.render_kv(), "A\tA\t0\nA$1\t/A\t1\nA$1\tB\t0\nA$1\tC\t0\nA$2\tB\t0\nA$2\tC\t1\nB\tB\t0\nC\tC\t0\n");
    }

    #[test]
    fn text_rendering() {
        let t = table(include_str!("../testdata/test.xg"));
        let text = t.render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[0].contains("| A ") && lines[0].contains("/C"));
        assert!(lines[2].contains("{ Nil }"));
    }
}
