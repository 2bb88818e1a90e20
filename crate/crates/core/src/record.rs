//! Bibliographic record types and corpus-level filtering.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Document type of an indexed record, as classified by the source database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocType {
    Article,
    Review,
    ProceedingsPaper,
    Other,
}

impl DocType {
    /// Maps a raw document-type string case-insensitively. Anything that is
    /// not an article, review or proceedings paper becomes `Other`.
    pub fn parse(raw: &str) -> DocType {
        let t = raw.trim();
        if t.eq_ignore_ascii_case("article") {
            DocType::Article
        } else if t.eq_ignore_ascii_case("review") {
            DocType::Review
        } else if t.eq_ignore_ascii_case("proceedings paper")
            || t.eq_ignore_ascii_case("proceedings-paper")
        {
            DocType::ProceedingsPaper
        } else {
            DocType::Other
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Review => "review",
            DocType::ProceedingsPaper => "proceedings-paper",
            DocType::Other => "other",
        }
    }
}

impl std::fmt::Display for DocType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One indexed document.
///
/// `ref_count` is the full length of the record's reference list, which may
/// exceed the number of `cited_refs` entries that resolve within a given
/// corpus: reference lists routinely cite documents outside the downloaded
/// set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicationRecord {
    /// Unique record key, e.g. a WoS UT accession number.
    pub id: String,
    /// Publication year.
    pub year: i32,
    pub doc_type: DocType,
    /// Venue name.
    #[serde(default)]
    pub source: String,
    /// One entry per affiliation line.
    #[serde(default)]
    pub addresses: Vec<String>,
    /// Length of the full reference list (k).
    pub ref_count: u32,
    /// Keys of the documents this record cites.
    #[serde(default)]
    pub cited_refs: Vec<String>,
}

/// Normalizes a record key for exact-match citation resolution:
/// trim, collapse internal whitespace, lowercase.
pub fn normalize_key(key: &str) -> String {
    let mut out = String::with_capacity(key.len());
    let mut last_space = true;
    for c in key.trim().chars() {
        if c.is_whitespace() {
            if !last_space {
                out.push(' ');
                last_space = true;
            }
        } else {
            for l in c.to_lowercase() {
                out.push(l);
            }
            last_space = false;
        }
    }
    while out.ends_with(' ') {
        out.pop();
    }
    out
}

/// Keeps records whose document type is in `doc_types` and whose publication
/// year equals `year`. Pure selection: record order is preserved and no
/// field is altered.
pub fn filter_corpus(
    corpus: &[PublicationRecord],
    doc_types: &HashSet<DocType>,
    year: i32,
) -> Vec<PublicationRecord> {
    corpus
        .iter()
        .filter(|r| r.year == year && doc_types.contains(&r.doc_type))
        .cloned()
        .collect()
}

/// The paper-style default: articles, reviews and proceedings papers.
pub fn default_doc_types() -> HashSet<DocType> {
    [DocType::Article, DocType::Review, DocType::ProceedingsPaper]
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, year: i32, doc_type: DocType) -> PublicationRecord {
        PublicationRecord {
            id: id.to_string(),
            year,
            doc_type,
            source: String::new(),
            addresses: vec![],
            ref_count: 0,
            cited_refs: vec![],
        }
    }

    #[test]
    fn doc_type_mapping_is_case_insensitive() {
        assert_eq!(DocType::parse("Article"), DocType::Article);
        assert_eq!(DocType::parse("REVIEW"), DocType::Review);
        assert_eq!(DocType::parse("Proceedings Paper"), DocType::ProceedingsPaper);
        assert_eq!(DocType::parse("Editorial Material"), DocType::Other);
        assert_eq!(DocType::parse("Letter"), DocType::Other);
    }

    #[test]
    fn filter_keeps_only_matching_types() {
        let corpus = vec![
            rec("a", 2005, DocType::Article),
            rec("b", 2005, DocType::Review),
            rec("c", 2005, DocType::Other),
            rec("d", 2004, DocType::Article),
        ];
        let kept = filter_corpus(&corpus, &[DocType::Article].into_iter().collect(), 2005);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].id, "a");
    }

    #[test]
    fn empty_filter_set_gives_empty_corpus() {
        let corpus = vec![rec("a", 2005, DocType::Article)];
        let kept = filter_corpus(&corpus, &HashSet::new(), 2005);
        assert!(kept.is_empty());
    }

    #[test]
    fn filter_does_not_change_fields() {
        let mut r = rec("a", 2005, DocType::Article);
        r.addresses = vec!["Tsinghua Univ, Beijing".into()];
        r.ref_count = 12;
        let corpus = vec![r.clone()];
        let kept = filter_corpus(&corpus, &default_doc_types(), 2005);
        assert_eq!(kept, corpus);
    }

    #[test]
    fn key_normalization_collapses_case_and_whitespace() {
        assert_eq!(normalize_key("  WOS:0001  A  "), "wos:0001 a");
        assert_eq!(normalize_key("X\t Y"), "x y");
        assert_eq!(normalize_key(""), "");
    }
}
