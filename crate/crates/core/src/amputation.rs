//! MCAR amputation under the monotone and non-monotone pattern tables.

use std::fmt;

use crate::data::{MissingnessPattern, PatternKind, TwoWaveDataset};
use crate::error::{Error, Result};
use crate::numerics::{Draws, RngStream};

/// How probability mass is shared between patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PatternWeighting {
    /// Equal probability for every incomplete pattern; the complete pattern
    /// takes the remainder so that the expected missing-cell rate hits the
    /// target.
    #[default]
    EqualIncomplete,
    /// Equal probability for every pattern, the complete one included. The
    /// cell rate is then fixed by the table and the target is ignored.
    EqualAll,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmputationPlan {
    pub kind: PatternKind,
    /// Incomplete patterns only, in table order.
    pub patterns: Vec<MissingnessPattern>,
    pub per_pattern_probability: f64,
    pub complete_probability: f64,
}

impl AmputationPlan {
    /// Expected fraction of missing cells over the pattern columns.
    pub fn expected_cell_rate(&self) -> f64 {
        let cols = self.patterns.first().map_or(1, |p| p.columns().len()) as f64;
        self.per_pattern_probability
            * self.patterns.iter().map(|p| p.missing_count() as f64).sum::<f64>()
            / cols
    }
}

impl fmt::Display for AmputationPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} amputation plan", self.kind)?;
        let cols = self.patterns.first().map_or(4, |p| p.columns().len());
        let complete = vec!["1"; cols].join(" ");
        writeln!(f, "  {complete}  p = {:.6}", self.complete_probability)?;
        for p in &self.patterns {
            let flags: Vec<&str> = p.observed().iter().map(|&o| if o { "1" } else { "0" }).collect();
            writeln!(f, "  {}  p = {:.6}", flags.join(" "), self.per_pattern_probability)?;
        }
        write!(f, "  expected missing-cell rate {:.4}", self.expected_cell_rate())
    }
}

pub fn calibrate(kind: PatternKind, target_cell_rate: f64) -> Result<AmputationPlan> {
    calibrate_with(kind, target_cell_rate, PatternWeighting::EqualIncomplete)
}

pub fn calibrate_with(
    kind: PatternKind,
    target_cell_rate: f64,
    weighting: PatternWeighting,
) -> Result<AmputationPlan> {
    let patterns: Vec<MissingnessPattern> =
        kind.patterns().into_iter().filter(|p| !p.is_complete()).collect();
    let k = patterns.len() as f64;
    let cols = patterns[0].columns().len() as f64;
    let total_missing: f64 = patterns.iter().map(|p| p.missing_count() as f64).sum();

    let per_pattern = match weighting {
        PatternWeighting::EqualAll => 1.0 / (k + 1.0),
        PatternWeighting::EqualIncomplete => {
            let max = total_missing / k / cols;
            if !(0.0..=max).contains(&target_cell_rate) {
                return Err(Error::UnreachableTarget {
                    target: target_cell_rate,
                    max,
                });
            }
            target_cell_rate * cols / total_missing
        }
    };
    Ok(AmputationPlan {
        kind,
        patterns,
        per_pattern_probability: per_pattern,
        complete_probability: (1.0 - k * per_pattern).max(0.0),
    })
}

/// Assigns every row one pattern (complete first, then the plan's patterns
/// in order) with a single uniform draw, and masks the cells that pattern
/// leaves unobserved.
pub fn amputate(d: &TwoWaveDataset, plan: &AmputationPlan, stream: &RngStream) -> Result<TwoWaveDataset> {
    if !d.is_complete() {
        return Err(Error::InvalidDataset("amputation needs a fully observed dataset".into()));
    }
    let column_index: Vec<Vec<usize>> = plan
        .patterns
        .iter()
        .map(|p| p.columns().iter().map(|c| d.schema().index_of(c)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let mut observed: Vec<Vec<bool>> = vec![vec![true; d.n_rows()]; d.n_cols()];
    let mut rng = stream.rng();
    for row in 0..d.n_rows() {
        let u = rng.uniform();
        if u < plan.complete_probability {
            continue;
        }
        let mut acc = plan.complete_probability;
        // rounding can leave u above the final cumulative sum; use the last pattern
        let mut chosen = plan.patterns.len() - 1;
        for i in 0..plan.patterns.len() {
            acc += plan.per_pattern_probability;
            if u < acc {
                chosen = i;
                break;
            }
        }
        for (&col, &obs) in column_index[chosen].iter().zip(plan.patterns[chosen].observed()) {
            if !obs {
                observed[col][row] = false;
            }
        }
    }
    let values = d.raw_columns().to_vec();
    TwoWaveDataset::new(d.schema().clone(), values, observed)
}
