//! Parser for Web of Science-style exports.
//!
//! Two layouts are accepted: the classic field-tagged plain-text export
//! (two-letter tags in columns 1-2, indented continuation lines, records
//! terminated by `ER`) and the tab-delimited export whose header row carries
//! the same tags as column names.

use crate::record::{DocType, PublicationRecord};
use std::io::{BufRead, Read};
use thiserror::Error;

/// A non-fatal problem found while parsing; parsing continues past it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseIssue {
    /// Record id when one was available, `None` for records that never got one.
    pub record_id: Option<String>,
    /// 1-based line number of the offending record or line.
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}\t{}\t{}",
            self.record_id.as_deref().unwrap_or("-"),
            self.line,
            self.message
        )
    }
}

/// Records plus the per-record issues collected along the way.
#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub records: Vec<PublicationRecord>,
    pub issues: Vec<ParseIssue>,
}

impl ParseOutcome {
    /// Renders the issue list as line-delimited `id<TAB>line<TAB>message` text.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for issue in &self.issues {
            out.push_str(&issue.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum WosError {
    #[error("unreadable input: {0}")]
    Io(#[from] std::io::Error),
}

/// Parses a WoS export from `input`, auto-detecting the layout.
///
/// Malformed records (missing UT, unparsable year) are reported in the
/// outcome and skipped; only an unreadable stream is fatal.
pub fn parse_wos_export<R: Read>(input: R) -> Result<ParseOutcome, WosError> {
    let mut reader = std::io::BufReader::new(input);
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    Ok(parse_wos_str(&text))
}

/// Same as [`parse_wos_export`] but over an in-memory string.
pub fn parse_wos_str(text: &str) -> ParseOutcome {
    // A tab in the first non-empty line means the tab-delimited layout.
    match text.lines().find(|l| !l.trim().is_empty()) {
        Some(first) if first.contains('\t') => parse_tab_delimited(text),
        Some(_) => parse_field_tagged(text),
        None => ParseOutcome::default(),
    }
}

/// One field of an in-progress record: the tag plus its value lines.
struct RawField {
    tag: String,
    values: Vec<String>,
}

fn parse_field_tagged(text: &str) -> ParseOutcome {
    let mut outcome = ParseOutcome::default();
    let mut fields: Vec<RawField> = Vec::new();
    let mut record_start_line = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with(' ') || line.starts_with('\t') {
            // Continuation of the previous tag.
            if let Some(field) = fields.last_mut() {
                field.values.push(line.trim().to_string());
            }
            continue;
        }
        let (tag, rest) = split_tag(line);
        match tag {
            "FN" | "VR" | "EF" => {} // file envelope, not record data
            "ER" => {
                if !fields.is_empty() {
                    build_record(&fields, record_start_line, &mut outcome);
                    fields.clear();
                }
            }
            _ => {
                if fields.is_empty() {
                    record_start_line = lineno;
                }
                fields.push(RawField {
                    tag: tag.to_string(),
                    values: if rest.is_empty() { vec![] } else { vec![rest.to_string()] },
                });
            }
        }
    }
    // A trailing record without ER still counts, with a note.
    if !fields.is_empty() {
        outcome.issues.push(ParseIssue {
            record_id: find_value(&fields, "UT"),
            line: record_start_line,
            message: "record not terminated by ER".into(),
        });
        build_record(&fields, record_start_line, &mut outcome);
    }
    outcome
}

fn split_tag(line: &str) -> (&str, &str) {
    match line.char_indices().nth(2) {
        Some((pos, _)) => {
            let (head, tail) = line.split_at(pos);
            (head.trim_end(), tail.trim())
        }
        None => (line.trim_end(), ""),
    }
}

fn find_value(fields: &[RawField], tag: &str) -> Option<String> {
    fields
        .iter()
        .find(|f| f.tag == tag)
        .and_then(|f| f.values.first())
        .cloned()
}

fn build_record(fields: &[RawField], line: usize, outcome: &mut ParseOutcome) {
    let id = match find_value(fields, "UT") {
        Some(id) if !id.trim().is_empty() => id.trim().to_string(),
        _ => {
            outcome.issues.push(ParseIssue {
                record_id: None,
                line,
                message: "missing UT (record key)".into(),
            });
            return;
        }
    };

    let year = match find_value(fields, "PY").map(|v| v.trim().parse::<i32>()) {
        Some(Ok(y)) => y,
        Some(Err(_)) => {
            outcome.issues.push(ParseIssue {
                record_id: Some(id),
                line,
                message: "unparsable PY (publication year)".into(),
            });
            return;
        }
        None => {
            outcome.issues.push(ParseIssue {
                record_id: Some(id),
                line,
                message: "missing PY (publication year)".into(),
            });
            return;
        }
    };

    let doc_type = find_value(fields, "DT")
        .map(|v| DocType::parse(&v))
        .unwrap_or(DocType::Other);
    let source = find_value(fields, "SO").unwrap_or_default();

    let mut addresses = Vec::new();
    let mut cited_refs = Vec::new();
    for field in fields {
        match field.tag.as_str() {
            "C1" => {
                for value in &field.values {
                    for addr in split_addresses(value) {
                        addresses.push(addr);
                    }
                }
            }
            "CR" => {
                for value in &field.values {
                    for part in value.split(';') {
                        let part = part.trim();
                        if !part.is_empty() {
                            cited_refs.push(part.to_string());
                        }
                    }
                }
            }
            _ => {}
        }
    }

    let ref_count = match find_value(fields, "NR") {
        Some(v) => match v.trim().parse::<u32>() {
            Ok(n) => n,
            Err(_) => {
                outcome.issues.push(ParseIssue {
                    record_id: Some(id),
                    line,
                    message: "unparsable NR (reference count)".into(),
                });
                return;
            }
        },
        // No NR tag: fall back to the visible reference list length.
        None => cited_refs.len() as u32,
    };

    outcome.records.push(PublicationRecord {
        id,
        year,
        doc_type,
        source,
        addresses,
        ref_count,
        cited_refs,
    });
}

/// Splits a C1 value into addresses on semicolons that sit outside the
/// optional `[author; author]` prefix, and strips that prefix.
fn split_addresses(value: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in value.chars() {
        match c {
            '[' => {
                depth += 1;
                current.push(c);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                current.push(c);
            }
            ';' if depth == 0 => {
                parts.push(std::mem::take(&mut current));
            }
            _ => current.push(c),
        }
    }
    parts.push(current);
    parts
        .into_iter()
        .map(|p| strip_author_prefix(p.trim()).to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

fn strip_author_prefix(addr: &str) -> &str {
    if let Some(rest) = addr.strip_prefix('[') {
        if let Some(end) = rest.find(']') {
            return rest[end + 1..].trim_start();
        }
    }
    addr
}

fn parse_tab_delimited(text: &str) -> ParseOutcome {
    let mut outcome = ParseOutcome::default();
    let mut lines = text.lines().enumerate();
    let header: Vec<String> = match lines.next() {
        Some((_, h)) => h.split('\t').map(|c| c.trim().to_string()).collect(),
        None => return outcome,
    };

    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let cell = |tag: &str| -> Option<&str> {
            header
                .iter()
                .position(|h| h == tag)
                .and_then(|i| cells.get(i))
                .map(|c| c.trim())
                .filter(|c| !c.is_empty())
        };

        let mut fields = Vec::new();
        for tag in ["UT", "PY", "DT", "SO", "NR"] {
            if let Some(v) = cell(tag) {
                fields.push(RawField { tag: tag.to_string(), values: vec![v.to_string()] });
            }
        }
        if let Some(c1) = cell("C1") {
            fields.push(RawField { tag: "C1".into(), values: vec![c1.to_string()] });
        }
        if let Some(cr) = cell("CR") {
            fields.push(RawField { tag: "CR".into(), values: vec![cr.to_string()] });
        }
        build_record(&fields, lineno, &mut outcome);
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_RECORD: &str = "\
FN Clarivate Analytics Web of Science
VR 1.0
PT J
UT WOS:000001
PY 2005
DT Article
SO J TEST SCI
C1 [Li, X.; Wang, Y.] Tsinghua Univ, Dep Phys, Beijing 100084, Peoples R China
   Peking Univ, Sch Chem, Beijing, Peoples R China
NR 40
CR Smith J, 2001, J FOO, V1, P1
   Doe A, 2002, J BAR, V2, P2; Roe B, 2003, J BAZ, V3, P3
ER
EF
";

    #[test]
    fn parses_single_field_tagged_record() {
        let out = parse_wos_str(ONE_RECORD);
        assert!(out.issues.is_empty(), "{:?}", out.issues);
        assert_eq!(out.records.len(), 1);
        let r = &out.records[0];
        assert_eq!(r.id, "WOS:000001");
        assert_eq!(r.year, 2005);
        assert_eq!(r.doc_type, DocType::Article);
        assert_eq!(r.source, "J TEST SCI");
        assert_eq!(r.ref_count, 40);
        assert_eq!(
            r.addresses,
            vec![
                "Tsinghua Univ, Dep Phys, Beijing 100084, Peoples R China",
                "Peking Univ, Sch Chem, Beijing, Peoples R China"
            ]
        );
        assert_eq!(r.cited_refs.len(), 3);
        assert_eq!(r.cited_refs[1], "Doe A, 2002, J BAR, V2, P2");
    }

    #[test]
    fn empty_stream_gives_empty_outcome() {
        let out = parse_wos_str("");
        assert!(out.records.is_empty());
        assert!(out.issues.is_empty());
    }

    #[test]
    fn missing_ut_is_reported_and_skipped() {
        let text = "\
UT WOS:0001
PY 2005
DT Article
NR 5
ER
PY 2005
DT Review
NR 3
ER
UT WOS:0003
PY 2005
DT Proceedings Paper
NR 7
ER
";
        let out = parse_wos_str(text);
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.issues.len(), 1);
        assert_eq!(out.issues[0].record_id, None);
        assert!(out.issues[0].message.contains("UT"));
        assert_eq!(out.records[0].id, "WOS:0001");
        assert_eq!(out.records[1].id, "WOS:0003");
    }

    #[test]
    fn nr_missing_falls_back_to_cr_count() {
        let text = "UT X\nPY 2005\nCR a; b; c\nER\n";
        let out = parse_wos_str(text);
        assert_eq!(out.records[0].ref_count, 3);
    }

    #[test]
    fn tab_delimited_layout_roundtrips_fields() {
        let text = "PT\tUT\tPY\tDT\tSO\tC1\tCR\tNR\n\
J\tWOS:0009\t2005\tReview\tJ X\t[A, B] Tsinghua Univ, Beijing; Fudan Univ, Shanghai\tr1; r2\t25\n";
        let out = parse_wos_str(text);
        assert!(out.issues.is_empty());
        let r = &out.records[0];
        assert_eq!(r.id, "WOS:0009");
        assert_eq!(r.doc_type, DocType::Review);
        assert_eq!(r.addresses, vec!["Tsinghua Univ, Beijing", "Fudan Univ, Shanghai"]);
        assert_eq!(r.cited_refs, vec!["r1", "r2"]);
        assert_eq!(r.ref_count, 25);
    }

    #[test]
    fn author_prefix_with_semicolons_does_not_split_address() {
        let addrs = split_addresses("[Li, X.; Wang, Y.] Tsinghua Univ, Beijing");
        assert_eq!(addrs, vec!["Tsinghua Univ, Beijing"]);
    }
}
