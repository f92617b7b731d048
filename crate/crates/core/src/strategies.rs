//! Re-imputation, nested imputation and appended imputation of a two-wave
//! dataset.
//!
//! Re-imputation runs one chained imputation over both waves. The staged
//! strategies first impute the t1 block on its own and then complete the
//! t2 block inside every completed t1 dataset: `m2` times for nested
//! imputation, once for appended imputation.
//!
//! Random streams are keyed by position so that results do not depend on
//! execution order: stage 1 draws from `stream.child(1)`, and nest `k` of
//! stage 2 from `stream.child(2).child(k)`. Appended imputation therefore
//! reproduces the first member of every nest of a nested run.

use std::fmt;

use crate::data::{ColumnRole, CompletedCollection, TwoWaveDataset, Wave, WaveSchema};
use crate::error::{Error, Result};
use crate::imputer::{
    chained_impute, ImputationSpec, Method, TargetSpec, DEFAULT_DONORS, DEFAULT_ITERATIONS, IMPUTATION_RIDGE,
};
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Reimpute,
    Nested,
    Appended,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Reimpute, StrategyKind::Nested, StrategyKind::Appended];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Reimpute => "reimpute",
            StrategyKind::Nested => "nested",
            StrategyKind::Appended => "appended",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reimpute" | "ri" => Ok(StrategyKind::Reimpute),
            "nested" | "ni" => Ok(StrategyKind::Nested),
            "appended" | "ai" => Ok(StrategyKind::Appended),
            other => Err(Error::Config(format!(
                "unknown strategy `{other}` (reimpute, nested or appended)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Imputations for re-imputation.
    pub m: usize,
    /// Stage-1 imputations for the staged strategies.
    pub m1: usize,
    /// Stage-2 imputations per nest; 1 for appended imputation.
    pub m2: usize,
    pub method: Method,
    pub iterations: usize,
    pub donors: usize,
    pub ridge: f64,
    /// Per-column method overrides.
    pub column_methods: Vec<(String, Method)>,
    /// Whether stage-2 models use the other t2 columns as predictors.
    pub stage2_cross_predictors: bool,
}

impl StrategyConfig {
    pub fn reimpute(m: usize) -> Self {
        Self::base(StrategyKind::Reimpute, m, m, 1)
    }

    pub fn nested(m1: usize, m2: usize) -> Self {
        Self::base(StrategyKind::Nested, m1 * m2, m1, m2)
    }

    pub fn appended(m1: usize) -> Self {
        Self::base(StrategyKind::Appended, m1, m1, 1)
    }

    fn base(kind: StrategyKind, m: usize, m1: usize, m2: usize) -> Self {
        Self {
            kind,
            m,
            m1,
            m2,
            method: Method::Norm,
            iterations: DEFAULT_ITERATIONS,
            donors: DEFAULT_DONORS,
            ridge: IMPUTATION_RIDGE,
            column_methods: Vec::new(),
            stage2_cross_predictors: true,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be positive".into()));
        }
        match self.kind {
            StrategyKind::Reimpute if self.m == 0 => Err(Error::Config("m must be positive".into())),
            StrategyKind::Nested if self.m1 == 0 || self.m2 < 2 => {
                Err(Error::Config(format!("nested imputation needs m1 >= 1 and m2 >= 2, got m1={} m2={}", self.m1, self.m2)))
            }
            StrategyKind::Appended if self.m1 == 0 || self.m2 != 1 => {
                Err(Error::Config(format!("appended imputation needs m1 >= 1 and m2 = 1, got m1={} m2={}", self.m1, self.m2)))
            }
            _ => Ok(()),
        }
    }

    fn method_for(&self, column: &str) -> Method {
        self.column_methods
            .iter()
            .find(|(c, _)| c == column)
            .map_or(self.method, |(_, m)| *m)
    }

    fn spec(&self, targets: Vec<TargetSpec>, m: usize) -> ImputationSpec {
        ImputationSpec {
            targets,
            iterations: self.iterations,
            m,
            donors: self.donors,
            ridge: self.ridge,
        }
    }

    fn target(&self, column: &str, predictors: impl Iterator<Item = String>) -> TargetSpec {
        TargetSpec {
            column: column.to_string(),
            predictors: predictors.collect(),
            method: self.method_for(column),
        }
    }
}

fn incomplete_columns(schema: &WaveSchema, wave: Option<Wave>) -> impl Iterator<Item = &str> {
    schema
        .columns()
        .iter()
        .filter(move |c| c.role == ColumnRole::Incomplete && wave.is_none_or(|w| c.wave == w))
        .map(|c| c.name.as_str())
}

/// Imputation spec used by re-imputation: every incomplete column, in
/// schema order, predicted by all other columns of both waves.
pub fn reimpute_spec(schema: &WaveSchema, cfg: &StrategyConfig) -> ImputationSpec {
    let targets = incomplete_columns(schema, None)
        .map(|t| cfg.target(t, schema.names().filter(|n| *n != t).map(str::to_string)))
        .collect();
    cfg.spec(targets, cfg.m)
}

/// Stage-1 spec: incomplete t1 columns predicted by t1 columns only.
pub fn stage1_spec(schema: &WaveSchema, cfg: &StrategyConfig) -> ImputationSpec {
    let t1: Vec<&str> = schema.columns().iter().filter(|c| c.wave == Wave::T1).map(|c| c.name.as_str()).collect();
    let targets = incomplete_columns(schema, Some(Wave::T1))
        .map(|t| cfg.target(t, t1.iter().filter(|n| **n != t).map(|n| n.to_string())))
        .collect();
    cfg.spec(targets, cfg.m1)
}

/// Stage-2 spec: incomplete t2 columns predicted by the completed t1
/// columns and, unless disabled, the other t2 columns.
pub fn stage2_spec(schema: &WaveSchema, cfg: &StrategyConfig) -> ImputationSpec {
    let targets = incomplete_columns(schema, Some(Wave::T2))
        .map(|t| {
            let predictors = schema.columns().iter().filter(|c| {
                c.name != t && (c.wave == Wave::T1 || cfg.stage2_cross_predictors)
            });
            cfg.target(t, predictors.map(|c| c.name.clone()))
        })
        .collect();
    cfg.spec(targets, cfg.m2)
}

pub fn run(d: &TwoWaveDataset, cfg: &StrategyConfig, stream: &RngStream) -> Result<CompletedCollection> {
    match cfg.kind {
        StrategyKind::Reimpute => run_reimpute(d, cfg, stream),
        StrategyKind::Nested | StrategyKind::Appended => run_staged(d, cfg, stream),
    }
}

pub fn run_reimpute(d: &TwoWaveDataset, cfg: &StrategyConfig, stream: &RngStream) -> Result<CompletedCollection> {
    cfg.validate()?;
    chained_impute(d, &reimpute_spec(d.schema(), cfg), stream)
}

/// Nested (`m2 >= 2`) or appended (`m2 = 1`) imputation. Nested runs
/// return a nested collection; appended runs a flat one of size `m1`.
pub fn run_staged(d: &TwoWaveDataset, cfg: &StrategyConfig, stream: &RngStream) -> Result<CompletedCollection> {
    cfg.validate()?;
    let (t1, t2) = d.split_waves()?;
    let stage1 = chained_impute(&t1, &stage1_spec(t1.schema(), cfg), &stream.child(1))?;

    let order: Vec<&str> = d.schema().names().collect();
    let spec2 = stage2_spec(d.schema(), cfg);
    let stage2 = stream.child(2);
    let mut nests = Vec::with_capacity(cfg.m1);
    for (k, completed_t1) in stage1.datasets().iter().enumerate() {
        let merged = TwoWaveDataset::merge_waves(completed_t1, &t2)?.select(&order)?;
        let nest = chained_impute(&merged, &spec2, &stage2.child(k as u64))?;
        nests.push(nest.into_datasets());
    }
    match cfg.kind {
        StrategyKind::Appended => CompletedCollection::flat(nests.into_iter().flatten().collect()),
        _ => CompletedCollection::nested(nests),
    }
}
