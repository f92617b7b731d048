//! Validity and efficiency checks evaluated on a grid summary.
//!
//! Each check looks only at the cells it needs. When none of them are in
//! the summary the check is reported as skipped.

use std::fmt;

use super::{GridSummary, Parameter};
use crate::data::PatternKind;
use crate::strategies::StrategyKind;

pub const SLOPE_BIAS_LIMIT: f64 = 0.03;
pub const MEAN_BIAS_LIMIT: f64 = 0.02;
pub const COVERAGE_BAND: (f64, f64) = (91.5, 98.5);
/// Scenarios where within-wave correlation exceeds between-wave correlation.
pub const HIGH_COVERAGE_SCENARIOS: [u8; 3] = [13, 14, 15];
pub const HIGH_COVERAGE_FLOOR: f64 = 93.0;
/// Scenarios where between-wave correlation dominates.
pub const LOW_COVERAGE_SCENARIOS: [u8; 3] = [3, 4, 8];
pub const LOW_COVERAGE_CEILING: f64 = 60.0;
pub const STAGED_AGREEMENT: f64 = 6.0;
pub const EFFICIENCY_BAND: (f64, f64) = (0.85, 1.00);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Collects violations and the number of cells inspected.
struct Tally {
    name: &'static str,
    cells: usize,
    violations: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, cells: 0, violations: Vec::new() }
    }

    fn finish(self, summary: impl FnOnce() -> String) -> CheckOutcome {
        let (status, detail) = if self.cells == 0 {
            (Status::Skipped, "no matching cells in this run".to_string())
        } else if self.violations.is_empty() {
            (Status::Pass, format!("{} cells; {}", self.cells, summary()))
        } else {
            let shown: Vec<&str> = self.violations.iter().take(8).map(String::as_str).collect();
            let more = self.violations.len().saturating_sub(shown.len());
            let tail = if more > 0 { format!(" (+{more} more)") } else { String::new() };
            (Status::Fail, format!("{}{tail}", shown.join("; ")))
        };
        CheckOutcome { name: self.name, status, detail }
    }
}

fn in_band(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

/// Under monotone missingness every strategy estimates `b_y1` with small
/// bias and near-nominal coverage.
pub fn monotone_validity(s: &GridSummary) -> CheckOutcome {
    let mut t = Tally::new("monotone validity");
    let (mut worst_bias, mut cov) = (0.0f64, (f64::INFINITY, f64::NEG_INFINITY));
    for c in s.cells.iter().filter(|c| c.kind == PatternKind::Monotone) {
        t.cells += 1;
        let p = c.get(Parameter::BY1);
        worst_bias = worst_bias.max(p.bias.abs());
        cov = (cov.0.min(p.coverage_pct), cov.1.max(p.coverage_pct));
        if p.bias.abs() > SLOPE_BIAS_LIMIT || !in_band(p.coverage_pct, COVERAGE_BAND) {
            t.violations.push(format!(
                "scenario {} {}: bias {:.4}, coverage {:.1}",
                c.scenario, c.strategy, p.bias, p.coverage_pct
            ));
        }
    }
    t.finish(|| format!("max |bias| {worst_bias:.4}, coverage {:.1}-{:.1}", cov.0, cov.1))
}

/// Re-imputation stays confidence-valid for `b_y1` under non-monotone
/// missingness.
pub fn nonmonotone_reimpute_validity(s: &GridSummary) -> CheckOutcome {
    let mut t = Tally::new("non-monotone re-imputation coverage");
    let mut cov = (f64::INFINITY, f64::NEG_INFINITY);
    for c in s
        .cells
        .iter()
        .filter(|c| c.kind == PatternKind::Nonmonotone && c.strategy == StrategyKind::Reimpute)
    {
        t.cells += 1;
        let p = c.get(Parameter::BY1);
        cov = (cov.0.min(p.coverage_pct), cov.1.max(p.coverage_pct));
        if !in_band(p.coverage_pct, COVERAGE_BAND) {
            t.violations.push(format!("scenario {}: coverage {:.1}", c.scenario, p.coverage_pct));
        }
    }
    t.finish(|| format!("coverage {:.1}-{:.1}", cov.0, cov.1))
}

/// Staged strategies under non-monotone missingness: valid where
/// within-wave correlation dominates, undercovering where between-wave
/// correlation dominates, and close to each other everywhere.
pub fn regime_split(s: &GridSummary) -> CheckOutcome {
    let mut t = Tally::new("non-monotone regime split");
    let mut max_gap = 0.0f64;
    let staged = [StrategyKind::Nested, StrategyKind::Appended];
    for c in s
        .cells
        .iter()
        .filter(|c| c.kind == PatternKind::Nonmonotone && staged.contains(&c.strategy))
    {
        t.cells += 1;
        let cov = c.get(Parameter::BY1).coverage_pct;
        if HIGH_COVERAGE_SCENARIOS.contains(&c.scenario) && cov < HIGH_COVERAGE_FLOOR {
            t.violations.push(format!("scenario {} {}: coverage {cov:.1} < {HIGH_COVERAGE_FLOOR}", c.scenario, c.strategy));
        }
        if LOW_COVERAGE_SCENARIOS.contains(&c.scenario) && cov > LOW_COVERAGE_CEILING {
            t.violations.push(format!("scenario {} {}: coverage {cov:.1} > {LOW_COVERAGE_CEILING}", c.scenario, c.strategy));
        }
        if c.strategy == StrategyKind::Nested {
            if let Some(a) = s.cell(c.scenario, c.kind, StrategyKind::Appended) {
                let gap = (cov - a.get(Parameter::BY1).coverage_pct).abs();
                max_gap = max_gap.max(gap);
                if gap > STAGED_AGREEMENT {
                    t.violations.push(format!("scenario {}: nested and appended coverage differ by {gap:.1}", c.scenario));
                }
            }
        }
    }
    t.finish(|| format!("max nested/appended coverage gap {max_gap:.1}"))
}

/// Variable means are estimated without bias and with near-nominal
/// coverage in every cell.
pub fn mean_validity(s: &GridSummary) -> CheckOutcome {
    let mut t = Tally::new("mean validity");
    let (mut worst_bias, mut cov) = (0.0f64, (f64::INFINITY, f64::NEG_INFINITY));
    for c in &s.cells {
        t.cells += 1;
        for p in Parameter::MEANS {
            let q = c.get(p);
            worst_bias = worst_bias.max(q.bias.abs());
            cov = (cov.0.min(q.coverage_pct), cov.1.max(q.coverage_pct));
            if q.bias.abs() > MEAN_BIAS_LIMIT || !in_band(q.coverage_pct, COVERAGE_BAND) {
                t.violations.push(format!(
                    "scenario {} {} {} {p}: bias {:.4}, coverage {:.1}",
                    c.scenario, c.kind, c.strategy, q.bias, q.coverage_pct
                ));
            }
        }
    }
    t.finish(|| format!("max |bias| {worst_bias:.4}, coverage {:.1}-{:.1}", cov.0, cov.1))
}

/// Ratio of summed mean interval widths of `a` over `b` for the slope
/// coefficients, across non-monotone scenarios present for both.
pub fn pooled_width_ratio(s: &GridSummary, a: StrategyKind, b: StrategyKind) -> Option<(f64, usize)> {
    let (mut num, mut den, mut cells) = (0.0, 0.0, 0);
    for ca in s.cells.iter().filter(|c| c.kind == PatternKind::Nonmonotone && c.strategy == a) {
        let Some(cb) = s.cell(ca.scenario, ca.kind, b) else { continue };
        cells += 1;
        for p in Parameter::SLOPES {
            num += ca.get(p).mean_ci_width;
            den += cb.get(p).mean_ci_width;
        }
    }
    (cells > 0).then(|| (num / den, cells))
}

/// Nested imputation gives narrower coefficient intervals than both
/// re-imputation and appended imputation under non-monotone missingness.
pub fn efficiency_ordering(s: &GridSummary) -> CheckOutcome {
    let mut t = Tally::new("efficiency ordering");
    let mut parts = Vec::new();
    for other in [StrategyKind::Reimpute, StrategyKind::Appended] {
        if let Some((ratio, cells)) = pooled_width_ratio(s, StrategyKind::Nested, other) {
            t.cells += cells;
            parts.push(format!("nested/{other} {ratio:.4}"));
            if !in_band(ratio, EFFICIENCY_BAND) {
                t.violations.push(format!("nested/{other} width ratio {ratio:.4} outside {EFFICIENCY_BAND:?}"));
            }
        }
    }
    t.finish(|| parts.join(", "))
}

pub fn run_all(s: &GridSummary) -> Vec<CheckOutcome> {
    vec![
        monotone_validity(s),
        nonmonotone_reimpute_validity(s),
        regime_split(s),
        mean_validity(s),
        efficiency_ordering(s),
    ]
}
