//! Canonical corpus format: one JSON document object per line.
//!
//! This is the stable interchange format of the toolkit. Unknown keys are
//! ignored on read; the writer emits fields in a fixed order so that
//! parse-then-write is a normalizing round trip.

use crate::record::PublicationRecord;
use crate::wos::{ParseIssue, ParseOutcome};
use std::io::{BufRead, BufReader, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("unreadable input: {0}")]
    Io(#[from] std::io::Error),
}

/// Parses a line-delimited canonical corpus. Lines that fail to decode are
/// reported with their line number; parsing continues.
pub fn parse_canonical<R: Read>(input: R) -> Result<ParseOutcome, CanonicalError> {
    let reader = BufReader::new(input);
    let mut outcome = ParseOutcome::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<PublicationRecord>(&line) {
            Ok(record) => outcome.records.push(record),
            Err(err) => outcome.issues.push(ParseIssue {
                record_id: None,
                line: lineno,
                message: format!("undecodable record: {err}"),
            }),
        }
    }
    Ok(outcome)
}

pub fn parse_canonical_str(text: &str) -> ParseOutcome {
    parse_canonical(text.as_bytes()).expect("in-memory read cannot fail")
}

/// Writes records in canonical form, one JSON object per line, preserving
/// input order. Output is deterministic for a fixed record list.
pub fn write_canonical<W: Write>(records: &[PublicationRecord], mut out: W) -> std::io::Result<()> {
    for record in records {
        let line = serde_json::to_string(record).expect("record serialization cannot fail");
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_canonical_string(records: &[PublicationRecord]) -> String {
    let mut buf = Vec::new();
    write_canonical(records, &mut buf).expect("in-memory write cannot fail");
    String::from_utf8(buf).expect("canonical output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::DocType;

    #[test]
    fn one_valid_line_gives_one_record() {
        let text = r#"{"id":"A","year":2005,"doc_type":"article","ref_count":6}"#;
        let out = parse_canonical_str(text);
        assert!(out.issues.is_empty());
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].id, "A");
        assert_eq!(out.records[0].doc_type, DocType::Article);
        assert_eq!(out.records[0].ref_count, 6);
    }

    #[test]
    fn unknown_keys_are_ignored() {
        let text = r#"{"id":"A","year":2005,"doc_type":"review","ref_count":1,"extra":"x"}"#;
        let out = parse_canonical_str(text);
        assert!(out.issues.is_empty());
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn bad_line_reported_with_line_number_and_parsing_continues() {
        let good = r#"{"id":"A","year":2005,"doc_type":"article","ref_count":6}"#;
        let text = format!("{good}\nnot json\n{good}\n");
        let out = parse_canonical_str(&text);
        assert_eq!(out.records.len(), 2);
        assert_eq!(out.issues.len(), 1);
        assert_eq!(out.issues[0].line, 2);
    }

    #[test]
    fn write_then_parse_is_identity_on_records() {
        let records = vec![PublicationRecord {
            id: "A".into(),
            year: 2005,
            doc_type: DocType::ProceedingsPaper,
            source: "Conf X".into(),
            addresses: vec!["Tsinghua Univ, Beijing".into()],
            ref_count: 9,
            cited_refs: vec!["B".into(), "C".into()],
        }];
        let text = write_canonical_string(&records);
        let out = parse_canonical_str(&text);
        assert!(out.issues.is_empty());
        assert_eq!(out.records, records);
    }

    #[test]
    fn parse_then_write_normalizes() {
        // Same record, different key order and extra whitespace.
        let messy = "{\"year\":2005, \"id\":\"A\",\"ref_count\":6,\"doc_type\":\"article\"}\n";
        let once = write_canonical_string(&parse_canonical_str(messy).records);
        let twice = write_canonical_string(&parse_canonical_str(&once).records);
        assert_eq!(once, twice);
    }
}
