//! Unit definitions and publication-to-unit assignment.
//!
//! Units are organizational entities selected by affiliation queries. The
//! plain-text config format is INI-like:
//!
//! ```text
//! # comment
//! [Dep Chem]
//! query.1 = ad=(tsinghua univ same dep chem) and ad=(china not taiwan) and py=2005
//! query.2 = ad=(tsinghua univ same dep chem eng) and ad=(china not taiwan) and py=2005
//! query = #1 not #2
//! min_pubs = 5
//! ```
//!
//! `query.N` entries become the `#N` result sets the final `query` may
//! reference. `min_pubs` defaults to 5.

use crate::query::{evaluate_query, parse_affiliation_query, NamedResults, QueryEvalError, QueryExpr};
use crate::record::PublicationRecord;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const DEFAULT_MIN_PUBS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitDefinition {
    pub name: String,
    pub query: QueryExpr,
    /// Numbered sub-queries, evaluated in ascending order before `query`;
    /// available as `#n` in later sub-queries and in `query` itself.
    pub numbered: BTreeMap<u32, QueryExpr>,
    pub min_pubs: usize,
}

#[derive(Debug, Error)]
pub enum UnitConfigError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate unit name '{name}'")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: bad query: {source}")]
    Query {
        line: usize,
        source: crate::query::QueryParseError,
    },
}

/// Parses a unit-definition config file.
pub fn parse_unit_config(text: &str) -> Result<Vec<UnitDefinition>, UnitConfigError> {
    let mut units: Vec<UnitDefinition> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    struct Pending {
        name: String,
        line: usize,
        query: Option<QueryExpr>,
        numbered: BTreeMap<u32, QueryExpr>,
        min_pubs: usize,
    }
    let mut pending: Option<Pending> = None;

    let mut finish = |p: Pending, units: &mut Vec<UnitDefinition>| -> Result<(), UnitConfigError> {
        let query = p.query.ok_or_else(|| UnitConfigError::Malformed {
            line: p.line,
            message: format!("unit '{}' has no 'query' entry", p.name),
        })?;
        units.push(UnitDefinition {
            name: p.name,
            query,
            numbered: p.numbered,
            min_pubs: p.min_pubs,
        });
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(UnitConfigError::Malformed {
                    line: lineno,
                    message: "empty unit name".into(),
                });
            }
            if !seen.insert(name.clone()) {
                return Err(UnitConfigError::DuplicateName { line: lineno, name });
            }
            if let Some(p) = pending.take() {
                finish(p, &mut units)?;
            }
            pending = Some(Pending {
                name,
                line: lineno,
                query: None,
                numbered: BTreeMap::new(),
                min_pubs: DEFAULT_MIN_PUBS,
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(UnitConfigError::Malformed {
                line: lineno,
                message: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let Some(p) = pending.as_mut() else {
            return Err(UnitConfigError::Malformed {
                line: lineno,
                message: "entry before any [unit] header".into(),
            });
        };
        if key == "query" {
            let q = parse_affiliation_query(value)
                .map_err(|source| UnitConfigError::Query { line: lineno, source })?;
            p.query = Some(q);
        } else if let Some(n) = key.strip_prefix("query.") {
            let n: u32 = n.parse().map_err(|_| UnitConfigError::Malformed {
                line: lineno,
                message: format!("bad sub-query number in '{key}'"),
            })?;
            let q = parse_affiliation_query(value)
                .map_err(|source| UnitConfigError::Query { line: lineno, source })?;
            p.numbered.insert(n, q);
        } else if key == "min_pubs" {
            p.min_pubs = value.parse().map_err(|_| UnitConfigError::Malformed {
                line: lineno,
                message: format!("bad min_pubs value '{value}'"),
            })?;
        } else {
            return Err(UnitConfigError::Malformed {
                line: lineno,
                message: format!("unknown key '{key}'"),
            });
        }
    }
    if let Some(p) = pending.take() {
        finish(p, &mut units)?;
    }
    Ok(units)
}

/// A unit dropped for falling below its publication threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcludedUnit {
    pub name: String,
    pub publications: usize,
    pub min_pubs: usize,
}

/// A unit whose query failed to evaluate.
#[derive(Debug)]
pub struct UnitEvalFailure {
    pub name: String,
    pub error: QueryEvalError,
}

/// Result of assigning a corpus to units.
#[derive(Debug, Default)]
pub struct Assignment {
    /// Included units in definition order with their record-id sets.
    pub units: Vec<(String, BTreeSet<String>)>,
    pub excluded: Vec<ExcludedUnit>,
    pub failures: Vec<UnitEvalFailure>,
    /// Records that belong to more than one included unit.
    pub overlapping_records: usize,
}

impl Assignment {
    pub fn members(&self, unit: &str) -> Option<&BTreeSet<String>> {
        self.units.iter().find(|(n, _)| n == unit).map(|(_, ids)| ids)
    }
}

/// Evaluates every unit's query against the (already filtered) corpus.
///
/// Units under their `min_pubs` threshold land in the exclusion report;
/// evaluation failures are collected per unit without aborting the rest.
/// A record may belong to several units; the overlap count reports how many
/// records do.
pub fn assign_units(units: &[UnitDefinition], corpus: &[PublicationRecord]) -> Assignment {
    let mut out = Assignment::default();
    for unit in units {
        let mut named = NamedResults::new();
        let mut failed = None;
        for (n, sub) in &unit.numbered {
            match evaluate_query(sub, corpus, &named) {
                Ok(ids) => {
                    named.insert(*n, ids);
                }
                Err(error) => {
                    failed = Some(error);
                    break;
                }
            }
        }
        let ids = match failed {
            Some(error) => Err(error),
            None => evaluate_query(&unit.query, corpus, &named),
        };
        match ids {
            Err(error) => out.failures.push(UnitEvalFailure { name: unit.name.clone(), error }),
            Ok(ids) if ids.len() < unit.min_pubs => out.excluded.push(ExcludedUnit {
                name: unit.name.clone(),
                publications: ids.len(),
                min_pubs: unit.min_pubs,
            }),
            Ok(ids) => out.units.push((unit.name.clone(), ids)),
        }
    }

    let mut multiplicity: BTreeMap<&String, usize> = BTreeMap::new();
    for (_, ids) in &out.units {
        for id in ids {
            *multiplicity.entry(id).or_default() += 1;
        }
    }
    out.overlapping_records = multiplicity.values().filter(|&&m| m > 1).count();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::DocType;

    fn rec(id: &str, addr: &str) -> PublicationRecord {
        PublicationRecord {
            id: id.into(),
            year: 2005,
            doc_type: DocType::Article,
            source: String::new(),
            addresses: vec![addr.into()],
            ref_count: 10,
            cited_refs: vec![],
        }
    }

    fn unit(name: &str, query: &str, min_pubs: usize) -> UnitDefinition {
        UnitDefinition {
            name: name.into(),
            query: parse_affiliation_query(query).unwrap(),
            numbered: BTreeMap::new(),
            min_pubs,
        }
    }

    #[test]
    fn unit_below_threshold_is_excluded_with_report() {
        let corpus: Vec<_> = (0..4).map(|i| rec(&format!("r{i}"), "Tsinghua Univ, Dep Automot")).collect();
        let a = assign_units(&[unit("Dep Automot", "ad=(dep automot)", 5)], &corpus);
        assert!(a.units.is_empty());
        assert_eq!(
            a.excluded,
            vec![ExcludedUnit { name: "Dep Automot".into(), publications: 4, min_pubs: 5 }]
        );
    }

    #[test]
    fn no_units_gives_empty_assignment() {
        let a = assign_units(&[], &[rec("r", "X Univ")]);
        assert!(a.units.is_empty());
        assert!(a.excluded.is_empty());
    }

    #[test]
    fn overlapping_records_are_counted_and_fully_assigned() {
        let corpus = vec![
            rec("shared", "Tsinghua Univ, Dep Phys & Dep Chem"),
            rec("only-phys", "Tsinghua Univ, Dep Phys"),
        ];
        let units = vec![
            unit("Dep Phys", "ad=(dep phys)", 1),
            unit("Dep Chem", "ad=(dep chem)", 1),
        ];
        let a = assign_units(&units, &corpus);
        assert_eq!(a.units.len(), 2);
        assert!(a.members("Dep Phys").unwrap().contains("shared"));
        assert!(a.members("Dep Chem").unwrap().contains("shared"));
        assert_eq!(a.overlapping_records, 1);
    }

    #[test]
    fn eval_failure_does_not_abort_other_units() {
        let corpus = vec![rec("r", "Tsinghua Univ, Dep Phys")];
        let bad = UnitDefinition {
            name: "Broken".into(),
            query: parse_affiliation_query("#9").unwrap(),
            numbered: BTreeMap::new(),
            min_pubs: 1,
        };
        let a = assign_units(&[bad, unit("Dep Phys", "ad=(dep phys)", 1)], &corpus);
        assert_eq!(a.failures.len(), 1);
        assert_eq!(a.failures[0].name, "Broken");
        assert_eq!(a.units.len(), 1);
    }

    #[test]
    fn config_parsing_with_numbered_queries() {
        let text = "\
# chemistry needs the three-step construction
[Dep Chem]
query.1 = ad=(tsinghua univ same dep chem) and py=2005
query.2 = ad=(tsinghua univ same dep chem eng) and py=2005
query = #1 not #2

[Dep Phys]
query = ad=(tsinghua univ same dep phys) and py=2005
min_pubs = 3
";
        let units = parse_unit_config(text).unwrap();
        assert_eq!(units.len(), 2);
        assert_eq!(units[0].name, "Dep Chem");
        assert_eq!(units[0].numbered.len(), 2);
        assert_eq!(units[0].min_pubs, DEFAULT_MIN_PUBS);
        assert_eq!(units[1].min_pubs, 3);
    }

    #[test]
    fn numbered_query_chain_resolves_in_order() {
        let text = "\
[Chem only]
query.1 = ad=(dep chem)
query.2 = ad=(dep chem eng)
query = #1 not #2
min_pubs = 1
";
        let units = parse_unit_config(text).unwrap();
        let corpus = vec![
            rec("pure", "Tsinghua Univ, Dep Chem, Beijing"),
            rec("eng", "Tsinghua Univ, Dep Chem Eng, Beijing"),
        ];
        let a = assign_units(&units, &corpus);
        let members = a.members("Chem only").unwrap();
        assert!(members.contains("pure"));
        // "Dep Chem Eng" contains the phrase "dep chem", so only the
        // difference removes it.
        assert!(!members.contains("eng"));
    }

    #[test]
    fn duplicate_unit_name_is_rejected() {
        let text = "[A]\nquery = py=2005\n[A]\nquery = py=2006\n";
        assert!(matches!(
            parse_unit_config(text),
            Err(UnitConfigError::DuplicateName { .. })
        ));
    }

    #[test]
    fn missing_query_is_rejected() {
        let text = "[A]\nmin_pubs = 2\n";
        assert!(matches!(parse_unit_config(text), Err(UnitConfigError::Malformed { .. })));
    }
}
