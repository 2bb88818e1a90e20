//! Citing-to-cited link resolution, citation windows and fractional weights.
//!
//! Every link carries the citing record's full reference-list length `k`;
//! its weight is exactly the rational 1/k, converted to floating point only
//! when aggregates are rendered.

use crate::record::{normalize_key, PublicationRecord};
use num::{BigRational, FromPrimitive};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// An inclusive range of citing-publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CitationWindow {
    start_year: i32,
    end_year: i32,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid citation window: start {0} exceeds end {1}")]
pub struct WindowError(i32, i32);

impl CitationWindow {
    pub fn new(start_year: i32, end_year: i32) -> Result<Self, WindowError> {
        if start_year > end_year {
            return Err(WindowError(start_year, end_year));
        }
        Ok(CitationWindow { start_year, end_year })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.end_year
    }

    pub fn contains(&self, year: i32) -> bool {
        self.start_year <= year && year <= self.end_year
    }

    /// Label used in table headers, e.g. `05-09`.
    pub fn short_label(&self) -> String {
        format!("{:02}-{:02}", self.start_year.rem_euclid(100), self.end_year.rem_euclid(100))
    }
}

impl std::fmt::Display for CitationWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.start_year, self.end_year)
    }
}

/// A resolved citing→cited edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationLink {
    pub citing_id: String,
    pub cited_id: String,
    pub citing_year: i32,
    /// Reference-list length of the citing record; the link weight is 1/k.
    pub ref_count: u32,
    /// True when the citing record is itself in the cited set, or cites itself.
    pub self_link: bool,
}

impl CitationLink {
    /// The exact fractional weight 1/k.
    pub fn weight(&self) -> BigRational {
        BigRational::new(1.into(), BigRational::from_u32(self.ref_count).unwrap().to_integer())
    }

    pub fn weight_f64(&self) -> f64 {
        1.0 / self.ref_count as f64
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("record '{0}' cites {1} documents but declares a reference count of 0")]
    ZeroRefCount(String, usize),
    #[error("cited keys '{0}' and '{1}' collide after normalization")]
    AmbiguousKey(String, String),
}

/// Resolves links between a cited set and a citing corpus.
///
/// A cited record is matched when its normalized id appears among the
/// citing record's normalized `cited_refs`. Duplicate mentions of the same
/// cited document within one reference list collapse to a single link.
/// The result is sorted by (citing_id, cited_id), so it is identical for
/// any input ordering.
pub fn resolve_citations(
    cited: &[PublicationRecord],
    citing_corpus: &[PublicationRecord],
) -> Result<Vec<CitationLink>, ResolveError> {
    let mut key_to_id: BTreeMap<String, &str> = BTreeMap::new();
    for rec in cited {
        let key = normalize_key(&rec.id);
        if let Some(prev) = key_to_id.insert(key, &rec.id) {
            if prev != rec.id {
                return Err(ResolveError::AmbiguousKey(prev.to_string(), rec.id.clone()));
            }
        }
    }

    let mut links = Vec::new();
    for citing in citing_corpus {
        if citing.cited_refs.is_empty() {
            continue;
        }
        if citing.ref_count == 0 {
            return Err(ResolveError::ZeroRefCount(citing.id.clone(), citing.cited_refs.len()));
        }
        let mut seen: std::collections::BTreeSet<&str> = std::collections::BTreeSet::new();
        for raw in &citing.cited_refs {
            let Some(&cited_id) = key_to_id.get(&normalize_key(raw)) else {
                continue;
            };
            if !seen.insert(cited_id) {
                continue; // second mention of the same cited document
            }
            links.push(CitationLink {
                citing_id: citing.id.clone(),
                cited_id: cited_id.to_string(),
                citing_year: citing.year,
                ref_count: citing.ref_count,
                self_link: citing.id == cited_id,
            });
        }
    }
    links.sort_by(|a, b| (&a.citing_id, &a.cited_id).cmp(&(&b.citing_id, &b.cited_id)));
    Ok(links)
}

/// Keeps links whose citing year falls inside the window; order-stable.
pub fn apply_window(links: &[CitationLink], window: CitationWindow) -> Vec<CitationLink> {
    links.iter().filter(|l| window.contains(l.citing_year)).cloned().collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("record '{0}' has reference count 0; fractional weight is undefined")]
pub struct WeightError(String);

/// The fractional weight a citing record contributes per cited document.
pub fn fractional_weight(citing: &PublicationRecord) -> Result<BigRational, WeightError> {
    if citing.ref_count == 0 {
        return Err(WeightError(citing.id.clone()));
    }
    Ok(BigRational::new(1.into(), citing.ref_count.into()))
}

/// Audit dump: `citing_id<TAB>cited_id<TAB>citing_year<TAB>k<TAB>weight`.
pub fn dump_links(links: &[CitationLink]) -> String {
    let mut out = String::from("citing_id\tcited_id\tciting_year\tk\tweight\n");
    for l in links {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{:.10}\n",
            l.citing_id, l.cited_id, l.citing_year, l.ref_count, l.weight_f64()
        ));
    }
    out
}
