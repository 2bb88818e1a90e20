//! Recursive-descent parser for the affiliation query grammar.
//!
//! Precedence, loosest to tightest: `or`, `and`, `not`, `same`; parentheses
//! group. Keywords are case-insensitive. `same` is only meaningful between
//! phrases inside an `ad=(...)` group.

use super::QueryExpr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
}

fn err(offset: usize, expected: &str, found: impl Into<String>) -> QueryParseError {
    QueryParseError::Syntax {
        offset,
        expected: expected.to_string(),
        found: found.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    AdOpen,    // `ad=(`
    Year(i32), // `py=YYYY`
    Ref(u32),  // `#n`
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, QueryParseError> {
        let mut toks = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            let Some(b) = self.peek_byte() else { break };
            match b {
                b'(' => {
                    self.pos += 1;
                    toks.push(Spanned { tok: Tok::LParen, offset: start });
                }
                b')' => {
                    self.pos += 1;
                    toks.push(Spanned { tok: Tok::RParen, offset: start });
                }
                b'#' => {
                    self.pos += 1;
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    if digits.is_empty() {
                        return Err(err(start, "result number after '#'", show_at(self.src, self.pos)));
                    }
                    let n: u32 = digits
                        .parse()
                        .map_err(|_| err(start, "result number after '#'", digits.clone()))?;
                    toks.push(Spanned { tok: Tok::Ref(n), offset: start });
                }
                _ => {
                    let word = self.take_while(|c| !c.is_ascii_whitespace() && !b"()#=".contains(&c));
                    if word.is_empty() {
                        // A bare '=' or other stray byte.
                        return Err(err(start, "term or operator", show_at(self.src, start)));
                    }
                    // Field prefixes: `ad=(` and `py=NNNN`.
                    if self.peek_byte() == Some(b'=') {
                        let lower = word.to_ascii_lowercase();
                        match lower.as_str() {
                            "ad" => {
                                self.pos += 1; // '='
                                self.skip_ws();
                                if self.peek_byte() != Some(b'(') {
                                    return Err(err(self.pos, "'(' after 'ad='", show_at(self.src, self.pos)));
                                }
                                self.pos += 1;
                                toks.push(Spanned { tok: Tok::AdOpen, offset: start });
                            }
                            "py" => {
                                self.pos += 1; // '='
                                self.skip_ws();
                                let digits = self.take_while(|c| c.is_ascii_digit());
                                let year: i32 = digits
                                    .parse()
                                    .map_err(|_| err(self.pos, "year after 'py='", show_at(self.src, self.pos)))?;
                                toks.push(Spanned { tok: Tok::Year(year), offset: start });
                            }
                            _ => {
                                return Err(err(start, "field 'ad' or 'py' before '='", word));
                            }
                        }
                    } else {
                        toks.push(Spanned { tok: Tok::Word(word), offset: start });
                    }
                }
            }
        }
        Ok(toks)
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && pred(self.src[self.pos]) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }
}

fn show_at(src: &[u8], pos: usize) -> String {
    match src.get(pos) {
        Some(&b) => format!("'{}'", b as char),
        None => "end of input".to_string(),
    }
}

struct Parser {
    toks: Vec<Spanned>,
    idx: usize,
    end: usize,
}

const KW_AND: &str = "and";
const KW_OR: &str = "or";
const KW_NOT: &str = "not";
const KW_SAME: &str = "same";

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.idx)
    }

    fn next_offset(&self) -> usize {
        self.peek().map(|s| s.offset).unwrap_or(self.end)
    }

    fn describe_next(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(s) => match &s.tok {
                Tok::Word(w) => format!("'{w}'"),
                Tok::AdOpen => "'ad=('".into(),
                Tok::Year(y) => format!("'py={y}'"),
                Tok::Ref(n) => format!("'#{n}'"),
                Tok::LParen => "'('".into(),
                Tok::RParen => "')'".into(),
            },
        }
    }

    fn keyword(&self) -> Option<&'static str> {
        if let Some(Spanned { tok: Tok::Word(w), .. }) = self.peek() {
            for kw in [KW_AND, KW_OR, KW_NOT, KW_SAME] {
                if w.eq_ignore_ascii_case(kw) {
                    return Some(kw);
                }
            }
        }
        None
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.keyword() == Some(kw) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    // expr := and_chain (OR and_chain)*
    fn expr(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.and_chain()?;
        while self.eat_keyword(KW_OR) {
            let right = self.and_chain()?;
            left = QueryExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    // and_chain := not_chain (AND not_chain)*
    fn and_chain(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.not_chain()?;
        while self.eat_keyword(KW_AND) {
            let right = self.not_chain()?;
            left = QueryExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    // not_chain := primary (NOT primary)*
    fn not_chain(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.primary()?;
        while self.eat_keyword(KW_NOT) {
            let right = self.primary()?;
            left = QueryExpr::Not(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<QueryExpr, QueryParseError> {
        let offset = self.next_offset();
        match self.peek().map(|s| s.tok.clone()) {
            Some(Tok::AdOpen) => {
                self.idx += 1;
                let inner = self.ad_expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Tok::Year(y)) => {
                self.idx += 1;
                Ok(QueryExpr::Year(y))
            }
            Some(Tok::Ref(n)) => {
                self.idx += 1;
                Ok(QueryExpr::ResultRef(n))
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            _ => Err(err(
                offset,
                "'ad=(', 'py=', '#n' or '('",
                self.describe_next(),
            )),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), QueryParseError> {
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::RParen)) {
            self.idx += 1;
            Ok(())
        } else {
            Err(err(self.next_offset(), "')'", self.describe_next()))
        }
    }

    // Inside ad=( ... ): phrases with same/not/and/or, same binding tightest.
    fn ad_expr(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.ad_and()?;
        while self.eat_keyword(KW_OR) {
            let right = self.ad_and()?;
            left = QueryExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn ad_and(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.ad_not()?;
        while self.eat_keyword(KW_AND) {
            let right = self.ad_not()?;
            left = QueryExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn ad_not(&mut self) -> Result<QueryExpr, QueryParseError> {
        let mut left = self.ad_same()?;
        while self.eat_keyword(KW_NOT) {
            let right = self.ad_same()?;
            left = QueryExpr::Not(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn ad_same(&mut self) -> Result<QueryExpr, QueryParseError> {
        let offset = self.next_offset();
        let first = self.ad_atom()?;
        if self.keyword() != Some(KW_SAME) {
            return Ok(first);
        }
        // A same-chain: every operand must be a plain phrase.
        let mut phrases = vec![phrase_of(first, offset)?];
        while self.eat_keyword(KW_SAME) {
            let offset = self.next_offset();
            let next = self.ad_atom()?;
            phrases.push(phrase_of(next, offset)?);
        }
        Ok(QueryExpr::Same(phrases))
    }

    fn ad_atom(&mut self) -> Result<QueryExpr, QueryParseError> {
        let offset = self.next_offset();
        match self.peek().map(|s| s.tok.clone()) {
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.ad_expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Tok::Word(_)) => {
                let mut words = Vec::new();
                while let Some(Spanned { tok: Tok::Word(w), .. }) = self.peek() {
                    if self.keyword().is_some() {
                        break;
                    }
                    words.push(w.clone());
                    self.idx += 1;
                }
                if words.is_empty() {
                    return Err(err(offset, "address phrase", self.describe_next()));
                }
                Ok(QueryExpr::Phrase(words.join(" ")))
            }
            _ => Err(err(offset, "address phrase or '('", self.describe_next())),
        }
    }
}

fn phrase_of(expr: QueryExpr, offset: usize) -> Result<String, QueryParseError> {
    match expr {
        QueryExpr::Phrase(p) => Ok(p),
        other => Err(err(
            offset,
            "plain phrase as 'same' operand",
            other.render(),
        )),
    }
}

/// Parses a query string into a [`QueryExpr`], rejecting everything outside
/// the grammar with a byte offset and an expected-token hint.
pub fn parse_affiliation_query(text: &str) -> Result<QueryExpr, QueryParseError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut parser = Parser { toks, idx: 0, end: text.len() };
    let expr = parser.expr()?;
    if parser.peek().is_some() {
        return Err(err(
            parser.next_offset(),
            "end of query",
            parser.describe_next(),
        ));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phrase(p: &str) -> QueryExpr {
        QueryExpr::Phrase(p.into())
    }

    #[test]
    fn footnote_style_query_builds_expected_tree() {
        let got =
            parse_affiliation_query("ad=(tsinghua univ same dep phys) and ad=(china not taiwan) and py=2005")
                .unwrap();
        let want = QueryExpr::And(
            Box::new(QueryExpr::And(
                Box::new(QueryExpr::Same(vec!["tsinghua univ".into(), "dep phys".into()])),
                Box::new(QueryExpr::Not(Box::new(phrase("china")), Box::new(phrase("taiwan")))),
            )),
            Box::new(QueryExpr::Year(2005)),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn bare_year_atom() {
        assert_eq!(parse_affiliation_query("py=2005").unwrap(), QueryExpr::Year(2005));
    }

    #[test]
    fn result_difference() {
        let got = parse_affiliation_query("#1 not #2").unwrap();
        assert_eq!(
            got,
            QueryExpr::Not(Box::new(QueryExpr::ResultRef(1)), Box::new(QueryExpr::ResultRef(2)))
        );
    }

    #[test]
    fn keywords_are_case_insensitive() {
        let a = parse_affiliation_query("ad=(x SAME y) AND py=2005").unwrap();
        let b = parse_affiliation_query("ad=(x same y) and py=2005").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn same_binds_tighter_than_or() {
        let got = parse_affiliation_query("ad=(a b same c or d same e)").unwrap();
        let want = QueryExpr::Or(
            Box::new(QueryExpr::Same(vec!["a b".into(), "c".into()])),
            Box::new(QueryExpr::Same(vec!["d".into(), "e".into()])),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn not_binds_tighter_than_and() {
        let got = parse_affiliation_query("ad=(a not b and c)").unwrap();
        let want = QueryExpr::And(
            Box::new(QueryExpr::Not(Box::new(phrase("a")), Box::new(phrase("b")))),
            Box::new(phrase("c")),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn syntax_error_carries_offset_and_hint() {
        let e = parse_affiliation_query("ad=(china and )").unwrap_err();
        let QueryParseError::Syntax { offset, expected, .. } = e;
        assert_eq!(offset, 14);
        assert!(expected.contains("phrase"), "{expected}");
    }

    #[test]
    fn dangling_operator_is_rejected() {
        assert!(parse_affiliation_query("py=2005 and").is_err());
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let e = parse_affiliation_query("py=2005 py=2006").unwrap_err();
        let QueryParseError::Syntax { expected, .. } = e;
        assert!(expected.contains("end of query"));
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(parse_affiliation_query("ti=(x)").is_err());
    }

    #[test]
    fn same_operand_must_be_phrase() {
        assert!(parse_affiliation_query("ad=((a or b) same c)").is_err());
    }

    #[test]
    fn paper_footnote_physics_query_parses() {
        let q = "ad=(tsing hua univ same sch Phys or tsing hua univ same phys sch \
or tsing hua univ same Dep phys or tsing hua univ same phys Dep \
or tsinghua univ same Dep phys or tsinghua univ same phys Dep) \
and ad=(china not taiwan) and py=2005";
        let expr = parse_affiliation_query(q).unwrap();
        // Reparse of the canonical rendering gives the same tree.
        assert_eq!(parse_affiliation_query(&expr.render()).unwrap(), expr);
    }
}
