//! Aggregation of citation links into per-paper scores and per-unit impact
//! rows (publications P, integer counts IC, fractional counts FC, and the
//! IC/P and FC/P ratios).
//!
//! Sums are kept as exact rationals; floating point appears only at
//! rendering or when observations feed the statistical tests.

use crate::citation::{apply_window, CitationLink, CitationWindow};
use crate::record::PublicationRecord;
use num::{BigRational, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Citation scores of one cited paper within a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PerPaperScore {
    pub paper_id: String,
    /// Number of distinct citing documents.
    pub ic: u64,
    /// Sum of fractional weights, exact.
    pub fc: BigRational,
    pub window: CitationWindow,
}

impl PerPaperScore {
    pub fn fc_f64(&self) -> f64 {
        self.fc.to_f64().unwrap_or(f64::NAN)
    }
}

/// A Table-1-style row for one unit and one window.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitImpact {
    pub unit: String,
    pub window: CitationWindow,
    pub publications: u64,
    pub ic: u64,
    pub fc: BigRational,
    pub ic_per_p: BigRational,
    pub fc_per_p: BigRational,
}

impl UnitImpact {
    /// Builds the row from aggregate values, computing the exact ratios.
    pub fn from_totals(
        unit: impl Into<String>,
        window: CitationWindow,
        publications: u64,
        ic: u64,
        fc: BigRational,
    ) -> Result<UnitImpact, MetricsError> {
        let unit = unit.into();
        if publications == 0 {
            return Err(MetricsError::EmptyUnit(unit));
        }
        let p = BigRational::from_integer(publications.into());
        let ic_per_p = BigRational::from_integer(ic.into()) / p.clone();
        let fc_per_p = fc.clone() / p;
        Ok(UnitImpact { unit, window, publications, ic, fc, ic_per_p, fc_per_p })
    }

    pub fn fc_f64(&self) -> f64 {
        self.fc.to_f64().unwrap_or(f64::NAN)
    }

    pub fn ic_per_p_f64(&self) -> f64 {
        self.ic_per_p.to_f64().unwrap_or(f64::NAN)
    }

    pub fn fc_per_p_f64(&self) -> f64 {
        self.fc_per_p.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("unit '{0}' has no publications; ratios are undefined")]
    EmptyUnit(String),
    #[error("unit '{unit}': member paper '{paper}' has no score")]
    UnscoredMember { unit: String, paper: String },
}

/// Scores every cited paper within the window. Papers nobody cites get
/// ic = 0 and fc = 0; each cited paper appears exactly once, in input order.
pub fn per_paper_scores(
    links: &[CitationLink],
    cited: &[PublicationRecord],
    window: CitationWindow,
) -> Vec<PerPaperScore> {
    let windowed = apply_window(links, window);
    let mut ic: BTreeMap<&str, u64> = BTreeMap::new();
    let mut fc: BTreeMap<&str, BigRational> = BTreeMap::new();
    for link in &windowed {
        *ic.entry(link.cited_id.as_str()).or_default() += 1;
        let entry = fc.entry(link.cited_id.as_str()).or_insert_with(BigRational::zero);
        *entry += link.weight();
    }
    cited
        .iter()
        .map(|rec| PerPaperScore {
            paper_id: rec.id.clone(),
            ic: ic.get(rec.id.as_str()).copied().unwrap_or(0),
            fc: fc.get(rec.id.as_str()).cloned().unwrap_or_else(BigRational::zero),
            window,
        })
        .collect()
}

/// Aggregates the scores of a unit's member papers into one impact row.
pub fn unit_impact(
    unit: &str,
    members: &BTreeSet<String>,
    scores: &[PerPaperScore],
    window: CitationWindow,
) -> Result<UnitImpact, MetricsError> {
    let by_id: BTreeMap<&str, &PerPaperScore> =
        scores.iter().map(|s| (s.paper_id.as_str(), s)).collect();
    let mut ic = 0u64;
    let mut fc = BigRational::zero();
    for id in members {
        let score = by_id.get(id.as_str()).ok_or_else(|| MetricsError::UnscoredMember {
            unit: unit.to_string(),
            paper: id.clone(),
        })?;
        ic += score.ic;
        fc += score.fc.clone();
    }
    UnitImpact::from_totals(unit, window, members.len() as u64, ic, fc)
}

/// The full Table-1-shaped matrix: one row per unit, one column group per
/// window. Row order follows the unit input order.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactTable {
    pub windows: Vec<CitationWindow>,
    pub rows: Vec<ImpactRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactRow {
    pub unit: String,
    pub publications: u64,
    /// One entry per window, in table order.
    pub cells: Vec<UnitImpact>,
}

pub fn impact_table(
    units: &[(String, BTreeSet<String>)],
    cited: &[PublicationRecord],
    links: &[CitationLink],
    windows: &[CitationWindow],
) -> Result<ImpactTable, MetricsError> {
    let scores_per_window: Vec<Vec<PerPaperScore>> = windows
        .iter()
        .map(|w| per_paper_scores(links, cited, *w))
        .collect();
    let mut rows = Vec::with_capacity(units.len());
    for (unit, members) in units {
        let mut cells = Vec::with_capacity(windows.len());
        for (w, scores) in windows.iter().zip(&scores_per_window) {
            cells.push(unit_impact(unit, members, scores, *w)?);
        }
        rows.push(ImpactRow {
            unit: unit.clone(),
            publications: members.len() as u64,
            cells,
        });
    }
    Ok(ImpactTable { windows: windows.to_vec(), rows })
}

impl ImpactTable {
    /// Tab-separated export at full precision.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("unit\tP");
        for w in &self.windows {
            let l = w.short_label();
            out.push_str(&format!("\tIC ({l})\tIC/P ({l})\tFC ({l})\tFC/P ({l})"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{}\t{}", row.unit, row.publications));
            for cell in &row.cells {
                out.push_str(&format!(
                    "\t{}\t{}\t{}\t{}",
                    cell.ic,
                    cell.ic_per_p_f64(),
                    cell.fc_f64(),
                    cell.fc_per_p_f64()
                ));
            }
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text table mirroring the published layout
    /// (two decimals for fractional columns).
    pub fn to_aligned_text(&self) -> String {
        let mut header = vec!["Unit".to_string(), "P".to_string()];
        for w in &self.windows {
            let l = w.short_label();
            header.extend([
                format!("IC ({l})"),
                format!("IC/P ({l})"),
                format!("FC ({l})"),
                format!("FC/P ({l})"),
            ]);
        }
        let mut table: Vec<Vec<String>> = vec![header];
        for row in &self.rows {
            let mut cells = vec![row.unit.clone(), row.publications.to_string()];
            for cell in &row.cells {
                cells.extend([
                    cell.ic.to_string(),
                    format!("{:.2}", cell.ic_per_p_f64()),
                    format!("{:.2}", cell.fc_f64()),
                    format!("{:.2}", cell.fc_per_p_f64()),
                ]);
            }
            table.push(cells);
        }
        align_columns(&table)
    }
}

/// Pads each column to its widest cell; first column left-aligned, the rest
/// right-aligned.
pub(crate) fn align_columns(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let pad = widths[i].saturating_sub(cell.chars().count());
            if i == 0 {
                line.push_str(cell);
                if row.len() > 1 {
                    line.push_str(&" ".repeat(pad));
                }
            } else {
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Per-unit observation vectors for the statistical tests: each member
/// paper contributes one value. `include_uncited` keeps papers with zero
/// citations in the sample (the default).
pub fn per_unit_observations(
    units: &[(String, BTreeSet<String>)],
    scores: &[PerPaperScore],
    include_uncited: bool,
    fractional: bool,
) -> Vec<(String, Vec<f64>)> {
    let by_id: BTreeMap<&str, &PerPaperScore> =
        scores.iter().map(|s| (s.paper_id.as_str(), s)).collect();
    units
        .iter()
        .map(|(unit, members)| {
            let values = members
                .iter()
                .filter_map(|id| by_id.get(id.as_str()))
                .filter(|s| include_uncited || s.ic > 0)
                .map(|s| if fractional { s.fc_f64() } else { s.ic as f64 })
                .collect();
            (unit.clone(), values)
        })
        .collect()
}
