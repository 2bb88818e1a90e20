//! Statistical procedures used by the evaluation pipeline, implemented from
//! first principles: distribution CDFs via incomplete beta/gamma functions,
//! Pearson/Spearman correlation with two-tailed significance, Kruskal-Wallis
//! with tie correction, Levene's test, one-way ANOVA, studentized-range
//! quantiles and Dunnett's C pairwise comparisons.

pub mod anova;
pub mod correlation;
pub mod distributions;
pub mod dunnett;
pub mod srange;

pub use anova::{anova_oneway, kruskal_wallis, levene, LeveneCenter};
pub use correlation::{correlation_matrix, pearson, spearman, stars, CorrelationMatrix};
pub use dunnett::{dunnett_c, PairwiseComparison};
pub use srange::{studentized_range_cdf, studentized_range_quantile};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatError {
    #[error("input vectors differ in length ({x} vs {y})")]
    MismatchedLengths { x: usize, y: usize },
    #[error("too few observations: need at least {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("too few groups: need at least {needed}, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("zero variance in {0}; statistic undefined")]
    ZeroVariance(String),
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Independent samples of unequal size, one per evaluated group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    pub groups: Vec<(String, Vec<f64>)>,
}

impl GroupedSample {
    pub fn new(groups: Vec<(String, Vec<f64>)>) -> Self {
        GroupedSample { groups }
    }

    pub fn from_slices(groups: &[(&str, &[f64])]) -> Self {
        GroupedSample {
            groups: groups
                .iter()
                .map(|(label, values)| (label.to_string(), values.to_vec()))
                .collect(),
        }
    }

    pub fn total_n(&self) -> usize {
        self.groups.iter().map(|(_, v)| v.len()).sum()
    }

    pub(crate) fn require_groups(&self, needed: usize) -> Result<(), StatError> {
        if self.groups.len() < needed {
            return Err(StatError::TooFewGroups { needed, got: self.groups.len() });
        }
        Ok(())
    }
}

/// Degrees of freedom: one value or a (numerator, denominator) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Df {
    One(f64),
    Two(f64, f64),
}

impl std::fmt::Display for Df {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Df::One(d) => write!(f, "{d}"),
            Df::Two(a, b) => write!(f, "{a}, {b}"),
        }
    }
}

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub name: String,
    pub statistic: f64,
    pub df: Df,
    pub p_value: f64,
}

/// Mid-ranks (average ranks for ties), 1-based. Input must be finite.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite observations"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j share the average of ranks i+1..=j+1
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}
