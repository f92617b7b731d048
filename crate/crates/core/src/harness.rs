//! Monte Carlo comparison of the imputation strategies.
//!
//! Every replication draws a complete sample for a scenario, amputates it
//! under both pattern sets, completes it with each strategy, fits the
//! analysis model `y2 ~ x1 + y1 + x2` plus the four variable means on every
//! completed dataset and pools the results. Summaries report bias,
//! coverage and mean interval width against the population values.
//!
//! Random streams are keyed by `(seed, scenario, replication)` and then by
//! task, so any subset of the grid reproduces the matching part of a full
//! run and the thread count never changes a result.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::amputation::{amputate, calibrate, AmputationPlan};
use crate::data::{CollectionShape, CompletedCollection, PatternKind, TwoWaveDataset};
use crate::dgp::{generate, population_truth, scenario, CorrelationScenario, SCENARIO_COUNT};
use crate::error::{Error, Result};
use crate::imputer::{Method, DEFAULT_ITERATIONS};
use crate::numerics::{ols_fit_columns, RngStream};
use crate::pooling::{pool_flat, pool_nested, PooledResult, DEFAULT_LEVEL};
use crate::strategies::{run, StrategyConfig, StrategyKind};

pub mod checks;

/// Share of failed replications a cell may have before the run fails.
pub const MAX_FAILURE_SHARE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parameter {
    B0,
    BX1,
    BY1,
    BX2,
    MuX1,
    MuY1,
    MuX2,
    MuY2,
}

impl Parameter {
    pub const ALL: [Parameter; 8] = [
        Parameter::B0,
        Parameter::BX1,
        Parameter::BY1,
        Parameter::BX2,
        Parameter::MuX1,
        Parameter::MuY1,
        Parameter::MuX2,
        Parameter::MuY2,
    ];
    pub const SLOPES: [Parameter; 3] = [Parameter::BX1, Parameter::BY1, Parameter::BX2];
    pub const MEANS: [Parameter; 4] = [Parameter::MuX1, Parameter::MuY1, Parameter::MuX2, Parameter::MuY2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parameter::B0 => "b0",
            Parameter::BX1 => "b_x1",
            Parameter::BY1 => "b_y1",
            Parameter::BX2 => "b_x2",
            Parameter::MuX1 => "mu_x1",
            Parameter::MuY1 => "mu_y1",
            Parameter::MuX2 => "mu_x2",
            Parameter::MuY2 => "mu_y2",
        }
    }

    pub fn is_coefficient(self) -> bool {
        self.index() < 4
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An estimate with its complete-data sampling variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub variance: f64,
}

/// Population values in [`Parameter::ALL`] order.
pub fn truths(s: &CorrelationScenario) -> Result<[f64; 8]> {
    let t = population_truth(s)?;
    let mut out = [0.0; 8];
    out[..4].copy_from_slice(&t.coefficients);
    out[4..].copy_from_slice(&t.means);
    Ok(out)
}

/// OLS of `y2` on `x1, y1, x2` and the four column means, in
/// [`Parameter::ALL`] order.
pub fn fit_analysis(d: &TwoWaveDataset) -> Result<[Estimate; 8]> {
    let coefficients = fit_regression(d, "y2", &["x1", "y1", "x2"])?;
    let mut out = [Estimate { value: 0.0, variance: 0.0 }; 8];
    out[..4].copy_from_slice(&coefficients);
    for (j, name) in ["x1", "y1", "x2", "y2"].iter().enumerate() {
        out[4 + j] = mean_estimate(d.column_by_name(name)?);
    }
    Ok(out)
}

/// OLS with intercept on a complete dataset: intercept first, then one
/// estimate per predictor, with variances `σ̂² diag((XᵀX)⁻¹)`.
pub fn fit_regression(d: &TwoWaveDataset, outcome: &str, predictors: &[&str]) -> Result<Vec<Estimate>> {
    if d.n_rows() <= 5 {
        return Err(Error::TooFewRows { needed: 6, got: d.n_rows() });
    }
    let y = d.column_by_name(outcome)?;
    let x = predictors.iter().map(|c| d.column_by_name(c)).collect::<Result<Vec<_>>>()?;
    let fit = ols_fit_columns(&x, y, 0.0)?;
    Ok(fit
        .coefficients
        .iter()
        .zip(&fit.coefficient_variances)
        .map(|(&value, &variance)| Estimate { value, variance })
        .collect())
}

fn mean_estimate(x: &[f64]) -> Estimate {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let s2 = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    Estimate { value: m, variance: s2 / n }
}

/// Pools per-dataset estimates (one row per completed dataset, stored in
/// collection order) parameter by parameter, with the rules matching the
/// collection shape.
pub fn pool_estimates<E: AsRef<[Estimate]>>(shape: CollectionShape, fits: &[E]) -> Result<Vec<PooledResult>> {
    let k = fits.first().map_or(0, |f| f.as_ref().len());
    (0..k)
        .map(|p| {
            let q: Vec<f64> = fits.iter().map(|f| f.as_ref()[p].value).collect();
            let u: Vec<f64> = fits.iter().map(|f| f.as_ref()[p].variance).collect();
            match shape {
                CollectionShape::Flat { .. } => pool_flat(&q, &u),
                CollectionShape::Nested { m1, m2 } => pool_nested(m1, m2, &q, &u),
            }
        })
        .collect()
}

/// Fits the analysis model on every member and pools each parameter.
pub fn pool_collection(c: &CompletedCollection) -> Result<[PooledResult; 8]> {
    let fits = c.datasets().iter().map(fit_analysis).collect::<Result<Vec<_>>>()?;
    Ok(pool_estimates(c.shape(), &fits)?.try_into().expect("eight parameters"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub scenario: u8,
    pub kind: PatternKind,
    pub strategy: StrategyKind,
    pub replication: usize,
    /// In [`Parameter::ALL`] order.
    pub pooled: [PooledResult; 8],
}

impl ReplicationResult {
    pub fn get(&self, p: Parameter) -> &PooledResult {
        &self.pooled[p.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub scenarios: Vec<u8>,
    pub kinds: Vec<PatternKind>,
    pub strategies: Vec<StrategyKind>,
    pub replications: usize,
    pub n: usize,
    pub m: usize,
    pub m1: usize,
    pub m2: usize,
    pub missing_rate: f64,
    pub method: Method,
    pub iterations: usize,
    pub level: f64,
    pub seed: u64,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl GridConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            scenarios: (1..=SCENARIO_COUNT).collect(),
            kinds: PatternKind::ALL.to_vec(),
            strategies: StrategyKind::ALL.to_vec(),
            replications: 500,
            n: 425,
            m: 5,
            m1: 5,
            m2: 5,
            missing_rate: 0.2,
            method: Method::Norm,
            iterations: DEFAULT_ITERATIONS,
            level: DEFAULT_LEVEL,
            seed,
            threads: None,
        }
    }

    pub fn strategy(&self, kind: StrategyKind) -> StrategyConfig {
        let cfg = match kind {
            StrategyKind::Reimpute => StrategyConfig::reimpute(self.m),
            StrategyKind::Nested => StrategyConfig::nested(self.m1, self.m2),
            StrategyKind::Appended => StrategyConfig::appended(self.m1),
        };
        StrategyConfig {
            iterations: self.iterations,
            ..cfg.with_method(self.method)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.scenarios.is_empty() || self.kinds.is_empty() || self.strategies.is_empty() {
            return Err(Error::Config("the grid has no cells".into()));
        }
        if self.n <= 5 {
            return Err(Error::Config(format!("sample size must exceed 5, got {}", self.n)));
        }
        for &s in &self.scenarios {
            scenario(s)?;
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config(format!("level must be in (0, 1), got {}", self.level)));
        }
        for &k in &self.strategies {
            if k == StrategyKind::Nested && self.m2 < 2 {
                return Err(Error::Config("nested imputation needs m2 >= 2".into()));
            }
            self.strategy(k).validate()?;
        }
        let staged = self.strategies.iter().any(|&k| k != StrategyKind::Reimpute);
        if self.strategies.contains(&StrategyKind::Reimpute) && self.m < 2 || staged && self.m1 < 2 {
            return Err(Error::Config("pooling needs m >= 2 and m1 >= 2".into()));
        }
        Ok(())
    }
}

fn kind_index(k: PatternKind) -> u64 {
    match k {
        PatternKind::Monotone => 0,
        PatternKind::Nonmonotone => 1,
    }
}

fn strategy_index(s: StrategyKind) -> u64 {
    match s {
        StrategyKind::Reimpute => 0,
        StrategyKind::Nested => 1,
        StrategyKind::Appended => 2,
    }
}

struct Replicate<'a> {
    cfg: &'a GridConfig,
    scenario: &'a CorrelationScenario,
    plans: &'a [(PatternKind, AmputationPlan)],
    strategies: &'a [StrategyConfig],
}

impl Replicate<'_> {
    /// All (kind, strategy) outcomes of one replication, in grid order.
    fn run(&self, rep: usize) -> Vec<Result<ReplicationResult>> {
        let root = RngStream::with_path(self.cfg.seed, &[u64::from(self.scenario.id), rep as u64]);
        let full = match generate(self.scenario, self.cfg.n, &root.child(0)) {
            Ok(d) => d,
            Err(e) => return vec![Err(e); self.plans.len() * self.strategies.len()],
        };
        let mut out = Vec::with_capacity(self.plans.len() * self.strategies.len());
        for (kind, plan) in self.plans {
            let k = kind_index(*kind);
            let incomplete = amputate(&full, plan, &root.child(1).child(k));
            for s in self.strategies {
                let result = incomplete.as_ref().map_err(Clone::clone).and_then(|d| {
                    let stream = root.child(2).child(k).child(strategy_index(s.kind));
                    let mut pooled = pool_collection(&run(d, s, &stream)?)?;
                    if self.cfg.level != DEFAULT_LEVEL {
                        for p in &mut pooled {
                            *p = p.with_level(self.cfg.level)?;
                        }
                    }
                    Ok(ReplicationResult {
                        scenario: self.scenario.id,
                        kind: *kind,
                        strategy: s.kind,
                        replication: rep,
                        pooled,
                    })
                });
                out.push(result.map_err(|e| Error::Replication { index: rep, source: Box::new(e) }));
            }
        }
        out
    }
}

/// Results of one cell: successful replications in order plus failures.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRun {
    pub scenario: u8,
    pub kind: PatternKind,
    pub strategy: StrategyKind,
    pub results: Vec<ReplicationResult>,
    pub failures: Vec<Error>,
}

impl CellRun {
    pub fn replications(&self) -> usize {
        self.results.len() + self.failures.len()
    }
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {t} worker threads: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs every cell of the grid. Failed replications are kept per cell; a
/// cell with more than [`MAX_FAILURE_SHARE`] failures fails the run.
pub fn run_grid(cfg: &GridConfig) -> Result<Vec<CellRun>> {
    cfg.validate()?;
    let plans = cfg
        .kinds
        .iter()
        .map(|&k| Ok((k, calibrate(k, cfg.missing_rate)?)))
        .collect::<Result<Vec<_>>>()?;
    let strategies: Vec<StrategyConfig> = cfg.strategies.iter().map(|&k| cfg.strategy(k)).collect();
    let scenarios = cfg.scenarios.iter().map(|&s| scenario(s)).collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|s| (0..cfg.replications).map(move |r| (s, r)))
        .collect();
    let outcomes: Vec<Vec<Result<ReplicationResult>>> = with_threads(cfg.threads, || {
        jobs.par_iter()
            .map(|&(s, rep)| {
                Replicate {
                    cfg,
                    scenario: &scenarios[s],
                    plans: &plans,
                    strategies: &strategies,
                }
                .run(rep)
            })
            .collect()
    })?;

    let per_scenario = plans.len() * strategies.len();
    let mut cells = Vec::with_capacity(scenarios.len() * per_scenario);
    for s in &scenarios {
        for (k, _) in &plans {
            for st in &strategies {
                cells.push(CellRun {
                    scenario: s.id,
                    kind: *k,
                    strategy: st.kind,
                    results: Vec::with_capacity(cfg.replications),
                    failures: Vec::new(),
                });
            }
        }
    }
    for (&(s, _), outcome) in jobs.iter().zip(outcomes) {
        for (j, r) in outcome.into_iter().enumerate() {
            let cell = &mut cells[s * per_scenario + j];
            match r {
                Ok(r) => cell.results.push(r),
                Err(e) => cell.failures.push(e),
            }
        }
    }
    for c in &cells {
        if c.failures.len() as f64 > MAX_FAILURE_SHARE * cfg.replications as f64 {
            return Err(Error::TooManyFailures {
                scenario: c.scenario,
                kind: c.kind.to_string(),
                strategy: c.strategy.to_string(),
                failures: c.failures.len(),
                replications: cfg.replications,
            });
        }
    }
    Ok(cells)
}

/// One cell of the grid with the given shared settings. The streams match
/// those of a full grid run with the same seed, so results coincide.
/// Errors carry the failing replication index.
pub fn run_cell(
    scenario_id: u8,
    kind: PatternKind,
    strategy: StrategyKind,
    cfg: &GridConfig,
) -> Result<Vec<ReplicationResult>> {
    let cell = GridConfig {
        scenarios: vec![scenario_id],
        kinds: vec![kind],
        strategies: vec![strategy],
        ..cfg.clone()
    };
    cell.validate()?;
    let s = scenario(scenario_id)?;
    let plans = [(kind, calibrate(kind, cell.missing_rate)?)];
    let strategies = [cell.strategy(strategy)];
    let rep = Replicate {
        cfg: &cell,
        scenario: &s,
        plans: &plans,
        strategies: &strategies,
    };
    with_threads(cell.threads, || {
        (0..cell.replications)
            .into_par_iter()
            .map(|r| rep.run(r).pop().expect("one outcome"))
            .collect::<Result<Vec<_>>>()
    })?
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSummary {
    pub parameter: Parameter,
    pub truth: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub coverage_pct: f64,
    pub mean_ci_width: f64,
}

/// Bias, coverage and mean interval width of each parameter over the
/// replications; `truths` follows [`Parameter::ALL`].
pub fn summarize(results: &[ReplicationResult], truths: &[f64; 8]) -> Result<[ParameterSummary; 8]> {
    if results.is_empty() {
        return Err(Error::InvalidDataset("no replications to summarize".into()));
    }
    let r = results.len() as f64;
    Ok(Parameter::ALL.map(|p| {
        let truth = truths[p.index()];
        let mean_estimate = results.iter().map(|x| x.get(p).q_bar).sum::<f64>() / r;
        let covered = results.iter().filter(|x| x.get(p).covers(truth)).count() as f64;
        ParameterSummary {
            parameter: p,
            truth,
            mean_estimate,
            bias: mean_estimate - truth,
            coverage_pct: 100.0 * covered / r,
            mean_ci_width: results.iter().map(|x| x.get(p).ci_width()).sum::<f64>() / r,
        }
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub scenario: u8,
    pub kind: PatternKind,
    pub strategy: StrategyKind,
    pub replications: usize,
    pub failures: usize,
    pub parameters: [ParameterSummary; 8],
}

impl CellSummary {
    pub fn get(&self, p: Parameter) -> &ParameterSummary {
        &self.parameters[p.index()]
    }
}

/// Ratio of mean interval widths, `a` over `b`.
pub fn relative_efficiency(a: &CellSummary, b: &CellSummary, p: Parameter) -> f64 {
    a.get(p).mean_ci_width / b.get(p).mean_ci_width
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSummary {
    pub cells: Vec<CellSummary>,
}

impl GridSummary {
    pub fn from_runs(runs: &[CellRun]) -> Result<Self> {
        let cells = runs
            .iter()
            .map(|c| {
                Ok(CellSummary {
                    scenario: c.scenario,
                    kind: c.kind,
                    strategy: c.strategy,
                    replications: c.replications(),
                    failures: c.failures.len(),
                    parameters: summarize(&c.results, &truths(&scenario(c.scenario)?)?)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { cells })
    }

    pub fn cell(&self, scenario: u8, kind: PatternKind, strategy: StrategyKind) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.kind == kind && c.strategy == strategy)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "scenario",
            "missingness",
            "strategy",
            "parameter",
            "truth",
            "mean_estimate",
            "bias",
            "coverage_pct",
            "mean_ci_width",
            "replications",
            "failures",
        ])?;
        for c in &self.cells {
            for p in &c.parameters {
                w.write_record([
                    c.scenario.to_string(),
                    c.kind.to_string(),
                    c.strategy.to_string(),
                    p.parameter.to_string(),
                    format!("{:.6}", p.truth),
                    format!("{:.6}", p.mean_estimate),
                    format!("{:.6}", p.bias),
                    format!("{:.6}", p.coverage_pct),
                    format!("{:.6}", p.mean_ci_width),
                    c.replications.to_string(),
                    c.failures.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Long format for plotting bias and coverage over the
    /// within × between correlation grid.
    pub fn write_figure_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "scenario",
            "rho_within",
            "rho_between",
            "missingness",
            "strategy",
            "parameter",
            "metric",
            "value",
        ])?;
        for c in &self.cells {
            let s = scenario(c.scenario)?;
            for p in &c.parameters {
                for (metric, value) in [("bias", p.bias), ("coverage_pct", p.coverage_pct)] {
                    w.write_record([
                        c.scenario.to_string(),
                        format!("{:.2}", s.rho_within),
                        format!("{:.2}", s.rho_between),
                        c.kind.to_string(),
                        c.strategy.to_string(),
                        p.parameter.to_string(),
                        metric.to_string(),
                        format!("{value:.6}"),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::WaveSchema;

    fn exact_dataset(n: usize) -> TwoWaveDataset {
        let mut rng = RngStream::new(1).rng();
        let mut col = || (0..n).map(|_| crate::numerics::Draws::std_normal(&mut rng)).collect::<Vec<f64>>();
        let (x1, y1, x2) = (col(), col(), col());
        let y2 = (0..n).map(|i| 0.25 * (x1[i] + y1[i] + x2[i])).collect();
        TwoWaveDataset::complete(WaveSchema::simulation(), vec![x1, y1, x2, y2]).unwrap()
    }

    #[test]
    fn exact_linear_data() {
        let f = fit_analysis(&exact_dataset(50)).unwrap();
        assert!(f[0].value.abs() < 1e-12);
        for p in Parameter::SLOPES {
            assert!((f[p.index()].value - 0.25).abs() < 1e-12);
            assert!(f[p.index()].variance < 1e-25);
        }
    }

    #[test]
    fn mean_of_ones() {
        let e = mean_estimate(&[1.0; 10]);
        assert_eq!((e.value, e.variance), (1.0, 0.0));
    }

    #[test]
    fn too_small_or_incomplete() {
        assert!(matches!(fit_analysis(&exact_dataset(5)), Err(Error::TooFewRows { .. })));
        let d = exact_dataset(10);
        let mut observed = vec![vec![true; 10]; 4];
        observed[2][3] = false;
        let d = TwoWaveDataset::new(d.schema().clone(), d.raw_columns().to_vec(), observed).unwrap();
        assert!(matches!(fit_analysis(&d), Err(Error::MissingCell { .. })));
    }

    fn fake(q: f64, lo: f64, hi: f64) -> ReplicationResult {
        let p = PooledResult { q_bar: q, u_bar: 0.0, b: 0.0, w: 0.0, t: 0.0, nu: f64::INFINITY, ci_low: lo, ci_high: hi };
        ReplicationResult {
            scenario: 1,
            kind: PatternKind::Monotone,
            strategy: StrategyKind::Reimpute,
            replication: 0,
            pooled: [p; 8],
        }
    }

    #[test]
    fn summary_of_known_intervals() {
        let truth = [0.5; 8];
        let results: Vec<_> = (0..10).map(|_| fake(0.5, -0.5, 1.5)).collect();
        let s = summarize(&results, &truth).unwrap();
        assert_eq!(s[2].coverage_pct, 100.0);
        assert_eq!(s[2].mean_ci_width, 2.0);
        assert_eq!(s[2].bias, 0.0);

        let results = vec![fake(0.0, -1.0, 0.4), fake(1.0, 0.6, 2.0)];
        let s = summarize(&results, &truth).unwrap();
        assert_eq!(s[5].coverage_pct, 0.0);
        assert_eq!(s[5].bias, 0.0);
        assert!(summarize(&[], &truth).is_err());
    }

    #[test]
    fn relative_efficiency_of_identical_cells() {
        let s = summarize(&[fake(0.5, 0.0, 1.0)], &[0.5; 8]).unwrap();
        let c = CellSummary {
            scenario: 1,
            kind: PatternKind::Monotone,
            strategy: StrategyKind::Nested,
            replications: 1,
            failures: 0,
            parameters: s,
        };
        assert_eq!(relative_efficiency(&c, &c, Parameter::BY1), 1.0);
    }

    #[test]
    fn single_replication_shape() {
        let mut cfg = GridConfig::new(3);
        cfg.replications = 1;
        cfg.iterations = 2;
        for strategy in StrategyKind::ALL {
            let r = run_cell(6, PatternKind::Nonmonotone, strategy, &cfg).unwrap();
            assert_eq!(r.len(), 1);
            assert!(r[0].pooled.iter().all(|p| p.q_bar.is_finite() && p.t >= p.u_bar));
        }
    }

    #[test]
    fn cell_run_matches_grid_run() {
        let mut cfg = GridConfig::new(8);
        cfg.replications = 3;
        cfg.iterations = 2;
        cfg.scenarios = vec![2, 9];
        let grid = run_grid(&cfg).unwrap();
        assert_eq!(grid.len(), 2 * 2 * 3);
        let cell = run_cell(9, PatternKind::Nonmonotone, StrategyKind::Appended, &cfg).unwrap();
        let from_grid = grid
            .iter()
            .find(|c| c.scenario == 9 && c.kind == PatternKind::Nonmonotone && c.strategy == StrategyKind::Appended)
            .unwrap();
        assert_eq!(cell, from_grid.results);
    }

    #[test]
    fn config_validation() {
        let mut cfg = GridConfig::new(1);
        assert!(cfg.validate().is_ok());
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = GridConfig::new(1);
        cfg.m2 = 1;
        assert!(cfg.validate().is_err());
        cfg.strategies = vec![StrategyKind::Reimpute, StrategyKind::Appended];
        assert!(cfg.validate().is_ok());
        cfg.scenarios = vec![17];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn summary_csv_layout() {
        let mut cfg = GridConfig::new(4);
        cfg.replications = 2;
        cfg.iterations = 2;
        cfg.scenarios = vec![16];
        cfg.kinds = vec![PatternKind::Monotone];
        let summary = GridSummary::from_runs(&run_grid(&cfg).unwrap()).unwrap();
        let mut buf = Vec::new();
        summary.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 8);
        assert!(text.lines().nth(1).unwrap().starts_with("16,monotone,reimpute,b0,0.000000,"));
        let mut fig = Vec::new();
        summary.write_figure_csv(&mut fig).unwrap();
        assert_eq!(String::from_utf8(fig).unwrap().lines().count(), 1 + 3 * 8 * 2);
    }
}
