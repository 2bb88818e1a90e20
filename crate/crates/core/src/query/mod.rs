//! Affiliation query language: WoS-style boolean queries over address and
//! year fields, with `same` for co-occurrence within a single address line
//! and `#n` references to previously named result sets.

mod eval;
mod parse;

pub use eval::{evaluate_query, QueryEvalError};
pub use parse::{parse_affiliation_query, QueryParseError};

/// A parsed query expression.
///
/// Phrase atoms always target the address field; `Year` targets the
/// publication year. `Same` holds address phrases that must co-occur within
/// one address string, and `Not` is set difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryExpr {
    /// `ad=(some phrase)` — matches records with any address containing the
    /// phrase as a whole-word subsequence.
    Phrase(String),
    /// `py=YYYY`
    Year(i32),
    /// `ad=(p1 same p2 same ...)` — all phrases within a single address.
    Same(Vec<String>),
    And(Box<QueryExpr>, Box<QueryExpr>),
    Or(Box<QueryExpr>, Box<QueryExpr>),
    /// Set difference: left minus right.
    Not(Box<QueryExpr>, Box<QueryExpr>),
    /// `#n` — a previously named result set.
    ResultRef(u32),
}

impl QueryExpr {
    /// Renders the expression in a form [`parse_affiliation_query`] accepts.
    /// Fully parenthesized, so precedence never changes the reading.
    pub fn render(&self) -> String {
        match self {
            QueryExpr::Phrase(p) => format!("ad=({p})"),
            QueryExpr::Year(y) => format!("py={y}"),
            QueryExpr::Same(phrases) => format!("ad=({})", phrases.join(" same ")),
            QueryExpr::And(a, b) => format!("({} and {})", a.render(), b.render()),
            QueryExpr::Or(a, b) => format!("({} or {})", a.render(), b.render()),
            QueryExpr::Not(a, b) => format!("({} not {})", a.render(), b.render()),
            QueryExpr::ResultRef(n) => format!("#{n}"),
        }
    }
}

impl std::fmt::Display for QueryExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}
