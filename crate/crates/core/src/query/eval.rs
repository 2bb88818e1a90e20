//! Query evaluation over a corpus.
//!
//! Address matching is case-insensitive whole-word phrase containment:
//! both phrase and address are lowercased, punctuation is stripped, and the
//! phrase's words must appear as a contiguous run of the address's words.
//! This keeps `sch phys` from matching `Sch Physiol`.

use super::QueryExpr;
use crate::record::PublicationRecord;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryEvalError {
    #[error("unresolved result reference #{0}")]
    UnresolvedRef(u32),
}

/// Named result sets available to `#n` references.
pub type NamedResults = BTreeMap<u32, BTreeSet<String>>;

fn tokenize(text: &str) -> Vec<String> {
    text.chars()
        .map(|c| if c.is_alphanumeric() { c.to_lowercase().next().unwrap_or(c) } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .map(|w| w.to_string())
        .collect()
}

/// Whole-word contiguous phrase containment.
fn phrase_matches_address(phrase: &str, address: &str) -> bool {
    let needle = tokenize(phrase);
    if needle.is_empty() {
        return false;
    }
    let hay = tokenize(address);
    if needle.len() > hay.len() {
        return false;
    }
    hay.windows(needle.len()).any(|w| w == needle.as_slice())
}

fn record_matches_phrase(record: &PublicationRecord, phrase: &str) -> bool {
    record.addresses.iter().any(|a| phrase_matches_address(phrase, a))
}

fn record_matches_same(record: &PublicationRecord, phrases: &[String]) -> bool {
    record
        .addresses
        .iter()
        .any(|a| phrases.iter().all(|p| phrase_matches_address(p, a)))
}

/// Evaluates `expr` against `corpus`, returning the matching record ids.
///
/// Results are sets, so evaluation is idempotent and independent of corpus
/// order. `#n` references are resolved through `named`; a missing entry is
/// an error naming the reference.
pub fn evaluate_query(
    expr: &QueryExpr,
    corpus: &[PublicationRecord],
    named: &NamedResults,
) -> Result<BTreeSet<String>, QueryEvalError> {
    match expr {
        QueryExpr::Phrase(p) => Ok(corpus
            .iter()
            .filter(|r| record_matches_phrase(r, p))
            .map(|r| r.id.clone())
            .collect()),
        QueryExpr::Year(y) => Ok(corpus
            .iter()
            .filter(|r| r.year == *y)
            .map(|r| r.id.clone())
            .collect()),
        QueryExpr::Same(phrases) => Ok(corpus
            .iter()
            .filter(|r| record_matches_same(r, phrases))
            .map(|r| r.id.clone())
            .collect()),
        QueryExpr::And(a, b) => {
            let left = evaluate_query(a, corpus, named)?;
            let right = evaluate_query(b, corpus, named)?;
            Ok(left.intersection(&right).cloned().collect())
        }
        QueryExpr::Or(a, b) => {
            let left = evaluate_query(a, corpus, named)?;
            let right = evaluate_query(b, corpus, named)?;
            Ok(left.union(&right).cloned().collect())
        }
        QueryExpr::Not(a, b) => {
            let left = evaluate_query(a, corpus, named)?;
            let right = evaluate_query(b, corpus, named)?;
            Ok(left.difference(&right).cloned().collect())
        }
        QueryExpr::ResultRef(n) => named
            .get(n)
            .cloned()
            .ok_or(QueryEvalError::UnresolvedRef(*n)),
    }
}
