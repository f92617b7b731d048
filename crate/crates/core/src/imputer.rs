//! Chained-equations imputation with Bayesian linear regression ("norm")
//! and predictive mean matching draws.

use std::fmt;

use crate::data::{CompletedCollection, TwoWaveDataset};
use crate::error::{Error, Result};
use crate::numerics::{cholesky_dense, ols_fit_columns, predict, Draws, OlsFit, RngStream};

pub const DEFAULT_ITERATIONS: usize = 10;
pub const DEFAULT_DONORS: usize = 5;
/// Ridge applied to the cross-product matrix of imputation models.
pub const IMPUTATION_RIDGE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Bayesian linear regression draw.
    #[default]
    Norm,
    /// Predictive mean matching.
    Pmm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Norm => "norm",
            Method::Pmm => "pmm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "norm" => Ok(Method::Norm),
            "pmm" => Ok(Method::Pmm),
            other => Err(Error::Config(format!("unknown imputation method `{other}` (norm or pmm)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub column: String,
    pub predictors: Vec<String>,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImputationSpec {
    /// Visited in this order in every sweep.
    pub targets: Vec<TargetSpec>,
    pub iterations: usize,
    pub m: usize,
    pub donors: usize,
    pub ridge: f64,
}

impl ImputationSpec {
    pub fn new(targets: Vec<TargetSpec>, m: usize) -> Self {
        Self {
            targets,
            iterations: DEFAULT_ITERATIONS,
            m,
            donors: DEFAULT_DONORS,
            ridge: IMPUTATION_RIDGE,
        }
    }

    pub fn target(&self, column: &str) -> Option<&TargetSpec> {
        self.targets.iter().find(|t| t.column == column)
    }
}

/// Predictor values for a set of rows, one vector per predictor.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Design {
    columns: Vec<Vec<f64>>,
    n_rows: usize,
}

impl Design {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(Error::InvalidDataset("design columns differ in length".into()));
        }
        Ok(Self { columns, n_rows })
    }

    /// A design with `n_rows` rows and no predictors (intercept only).
    pub fn intercept_only(n_rows: usize) -> Self {
        Self { columns: Vec::new(), n_rows }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_predictors(&self) -> usize {
        self.columns.len()
    }

    fn linear_predictor(&self, coefficients: &[f64], row: usize, buf: &mut Vec<f64>) -> f64 {
        buf.clear();
        buf.extend(self.columns.iter().map(|c| c[row]));
        predict(coefficients, buf)
    }

    fn refill(&mut self, source: &[Vec<f64>], predictors: &[usize], rows: &[usize]) {
        self.columns.resize_with(predictors.len(), Vec::new);
        for (dst, &p) in self.columns.iter_mut().zip(predictors) {
            dst.clear();
            dst.extend(rows.iter().map(|&r| source[p][r]));
        }
        self.n_rows = rows.len();
    }
}

struct PosteriorDraw {
    fit: OlsFit,
    beta_star: Vec<f64>,
    sigma_star: f64,
}

fn posterior_draw(obs: &Design, y_obs: &[f64], ridge: f64, needed: usize, draws: &mut impl Draws) -> Result<PosteriorDraw> {
    let q = obs.n_predictors();
    if obs.n_rows != y_obs.len() {
        return Err(Error::RowCountMismatch { left: obs.n_rows, right: y_obs.len() });
    }
    if y_obs.len() < needed {
        return Err(Error::TooFewObserved {
            column: String::new(),
            observed: y_obs.len(),
            needed,
        });
    }
    let cols: Vec<&[f64]> = obs.columns.iter().map(Vec::as_slice).collect();
    let fit = ols_fit_columns(&cols, y_obs, ridge)?;
    let df = (y_obs.len() - q - 1) as f64;
    let g = draws.chi_square(df);
    let sigma_star = (fit.sse / g).sqrt();
    let v_factor = cholesky_dense(fit.xtx_inverse.as_matrix()).map_err(|_| Error::SingularDesign)?;
    let p = q + 1;
    let z: Vec<f64> = (0..p).map(|_| draws.std_normal()).collect();
    let beta_star = (0..p)
        .map(|i| fit.coefficients[i] + sigma_star * (0..=i).map(|k| v_factor[(i, k)] * z[k]).sum::<f64>())
        .collect();
    Ok(PosteriorDraw { fit, beta_star, sigma_star })
}

/// Bayesian linear regression draw: σ*² = SSE/g with g ~ χ²(n_obs − q − 1),
/// β* = β̂ + σ* · chol((XᵀX)⁻¹) · z, imputations X_mis β* + σ* ε.
pub fn norm_draw(obs: &Design, y_obs: &[f64], mis: &Design, ridge: f64, draws: &mut impl Draws) -> Result<Vec<f64>> {
    if mis.n_rows == 0 {
        return Ok(Vec::new());
    }
    let post = posterior_draw(obs, y_obs, ridge, obs.n_predictors() + 3, draws)?;
    let mut buf = Vec::with_capacity(mis.n_predictors());
    Ok((0..mis.n_rows)
        .map(|i| mis.linear_predictor(&post.beta_star, i, &mut buf) + post.sigma_star * draws.std_normal())
        .collect())
}

/// Predictive mean matching (type 1): missing rows are predicted with β*,
/// observed rows with β̂; each missing row takes the observed value of a
/// donor drawn uniformly from its `donors` closest observed rows.
pub fn pmm_draw(
    obs: &Design,
    y_obs: &[f64],
    mis: &Design,
    ridge: f64,
    donors: usize,
    draws: &mut impl Draws,
) -> Result<Vec<f64>> {
    if mis.n_rows == 0 {
        return Ok(Vec::new());
    }
    if donors == 0 {
        return Err(Error::Config("pmm needs at least one donor".into()));
    }
    let needed = donors.max(obs.n_predictors() + 3);
    let post = posterior_draw(obs, y_obs, ridge, needed, draws)?;

    let mut buf = Vec::with_capacity(obs.n_predictors());
    let eta_obs: Vec<f64> = (0..obs.n_rows)
        .map(|i| obs.linear_predictor(&post.fit.coefficients, i, &mut buf))
        .collect();
    let mut order: Vec<usize> = (0..obs.n_rows).collect();
    order.sort_by(|&a, &b| eta_obs[a].total_cmp(&eta_obs[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| eta_obs[i]).collect();

    let mut candidates = Vec::with_capacity(donors);
    let mut out = Vec::with_capacity(mis.n_rows);
    for i in 0..mis.n_rows {
        let target = mis.linear_predictor(&post.beta_star, i, &mut buf);
        let pos = sorted.partition_point(|&v| v < target);
        let (mut lo, mut hi) = (pos, pos);
        candidates.clear();
        while candidates.len() < donors {
            let take_low = lo > 0 && (hi >= sorted.len() || target - sorted[lo - 1] <= sorted[hi] - target);
            if take_low {
                lo -= 1;
                candidates.push(lo);
            } else {
                candidates.push(hi);
                hi += 1;
            }
        }
        let pick = candidates[draws.index(candidates.len())];
        out.push(y_obs[order[pick]]);
    }
    Ok(out)
}

struct ResolvedTarget {
    column: usize,
    predictors: Vec<usize>,
    method: Method,
    obs_rows: Vec<usize>,
    mis_rows: Vec<usize>,
    y_obs: Vec<f64>,
}

fn resolve(d: &TwoWaveDataset, spec: &ImputationSpec) -> Result<Vec<ResolvedTarget>> {
    let schema = d.schema();
    let mut target_cols = Vec::with_capacity(spec.targets.len());
    for t in &spec.targets {
        let col = schema.index_of(&t.column)?;
        if target_cols.contains(&col) {
            return Err(Error::Config(format!("target `{}` listed twice", t.column)));
        }
        target_cols.push(col);
    }
    for j in 0..d.n_cols() {
        if d.missing_count(j) > 0 && !target_cols.contains(&j) {
            return Err(Error::InvalidDataset(format!(
                "column `{}` has missing values but is not an imputation target",
                schema.column(j).name
            )));
        }
    }
    spec.targets
        .iter()
        .zip(target_cols)
        .map(|(t, column)| {
            let predictors = t
                .predictors
                .iter()
                .map(|p| {
                    if *p == t.column {
                        return Err(Error::Config(format!("target `{p}` cannot predict itself")));
                    }
                    schema.index_of(p)
                })
                .collect::<Result<Vec<_>>>()?;
            let mask = d.mask(column);
            let obs_rows: Vec<usize> = (0..d.n_rows()).filter(|&i| mask[i]).collect();
            let mis_rows: Vec<usize> = (0..d.n_rows()).filter(|&i| !mask[i]).collect();
            if obs_rows.is_empty() {
                return Err(Error::EmptyColumn(t.column.clone()));
            }
            let y_obs = d.observed_values(column);
            Ok(ResolvedTarget {
                column,
                predictors,
                method: t.method,
                obs_rows,
                mis_rows,
                y_obs,
            })
        })
        .collect()
}

fn name_error(e: Error, column: &str) -> Error {
    match e {
        Error::TooFewObserved { observed, needed, .. } => Error::TooFewObserved {
            column: column.to_string(),
            observed,
            needed,
        },
        other => other,
    }
}

/// Runs `spec.m` independent chains; chain `c` draws from `stream.child(c)`.
///
/// Each chain starts by filling every missing target cell with a random
/// observed value of its column, then sweeps `spec.iterations` times over
/// the targets in order, redrawing each target from the current values of
/// its predictors.
pub fn chained_impute(d: &TwoWaveDataset, spec: &ImputationSpec, stream: &RngStream) -> Result<CompletedCollection> {
    if spec.m == 0 {
        return Err(Error::Config("number of imputations must be positive".into()));
    }
    if spec.iterations == 0 {
        return Err(Error::Config("number of iterations must be positive".into()));
    }
    let targets = resolve(d, spec)?;
    let all_observed = vec![vec![true; d.n_rows()]; d.n_cols()];
    if targets.iter().all(|t| t.mis_rows.is_empty()) {
        let copy = d.with_values(d.raw_columns().to_vec(), all_observed);
        return CompletedCollection::flat(vec![copy; spec.m]);
    }
    for t in &targets {
        for &p in &t.predictors {
            if d.missing_count(p) > 0 && !targets.iter().any(|o| o.column == p) {
                return Err(Error::IncompletePredictor {
                    target: d.schema().column(t.column).name.clone(),
                    predictor: d.schema().column(p).name.clone(),
                });
            }
        }
    }

    let mut completed = Vec::with_capacity(spec.m);
    let mut obs_design = Design::default();
    let mut mis_design = Design::default();
    for chain in 0..spec.m {
        let mut rng = stream.child(chain as u64).rng();
        let mut work = d.raw_columns().to_vec();
        for t in &targets {
            for &r in &t.mis_rows {
                work[t.column][r] = t.y_obs[rng.index(t.y_obs.len())];
            }
        }
        for _ in 0..spec.iterations {
            for t in targets.iter().filter(|t| !t.mis_rows.is_empty()) {
                obs_design.refill(&work, &t.predictors, &t.obs_rows);
                mis_design.refill(&work, &t.predictors, &t.mis_rows);
                let drawn = match t.method {
                    Method::Norm => norm_draw(&obs_design, &t.y_obs, &mis_design, spec.ridge, &mut rng),
                    Method::Pmm => pmm_draw(&obs_design, &t.y_obs, &mis_design, spec.ridge, spec.donors, &mut rng),
                }
                .map_err(|e| name_error(e, &d.schema().column(t.column).name))?;
                for (&r, v) in t.mis_rows.iter().zip(drawn) {
                    work[t.column][r] = v;
                }
            }
        }
        completed.push(d.with_values(work, all_observed.clone()));
    }
    CompletedCollection::flat(completed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amputation::{amputate, calibrate};
    use crate::data::{PatternKind, WaveSchema};
    use crate::dgp::{generate, scenario};
    use crate::pooling::pool_flat;

    /// Pins the posterior draw to the point estimate: g = df, z = ε = 0.
    struct Degenerate;

    impl Draws for Degenerate {
        fn std_normal(&mut self) -> f64 {
            0.0
        }
        fn chi_square(&mut self, df: f64) -> f64 {
            df
        }
        fn uniform(&mut self) -> f64 {
            0.0
        }
        fn index(&mut self, _n: usize) -> usize {
            0
        }
    }

    fn line_data(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = RngStream::new(seed).rng();
        let x: Vec<f64> = (0..n).map(|_| rng.std_normal()).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.0 + v + rng.std_normal()).collect();
        (x, y)
    }

    #[test]
    fn no_missing_rows_gives_empty() {
        let (x, y) = line_data(20, 1);
        let obs = Design::from_columns(vec![x]).unwrap();
        let mis = Design::from_columns(vec![vec![]]).unwrap();
        let mut rng = RngStream::new(1).rng();
        assert!(norm_draw(&obs, &y, &mis, 0.0, &mut rng).unwrap().is_empty());
        assert!(pmm_draw(&obs, &y, &mis, 0.0, 5, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn degenerate_draw_is_the_ols_prediction() {
        let (x, y) = line_data(200, 2);
        let fit = ols_fit_columns(&[&x], &y, IMPUTATION_RIDGE).unwrap();
        let obs = Design::from_columns(vec![x]).unwrap();
        let xm = vec![-1.0, 0.0, 2.5];
        let mis = Design::from_columns(vec![xm.clone()]).unwrap();
        let got = norm_draw(&obs, &y, &mis, IMPUTATION_RIDGE, &mut Degenerate).unwrap();
        for (g, x) in got.iter().zip(&xm) {
            assert!((g - fit.predict_row(&[*x])).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_spread_of_norm_draws() {
        let (x, y) = line_data(10_000, 3);
        let fit = ols_fit_columns(&[&x], &y, IMPUTATION_RIDGE).unwrap();
        let obs = Design::from_columns(vec![x]).unwrap();
        let xm: Vec<f64> = (0..2000).map(|i| (i as f64 / 1000.0) - 1.0).collect();
        let mis = Design::from_columns(vec![xm.clone()]).unwrap();
        let mut rng = RngStream::new(4).rng();
        let mut ss = 0.0;
        let mut count = 0.0;
        for _ in 0..10 {
            let draws = norm_draw(&obs, &y, &mis, IMPUTATION_RIDGE, &mut rng).unwrap();
            for (d, x) in draws.iter().zip(&xm) {
                ss += (d - fit.predict_row(&[*x])).powi(2);
                count += 1.0;
            }
        }
        let var = ss / count;
        assert!((var - 1.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn too_few_observed() {
        let obs = Design::from_columns(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let mis = Design::from_columns(vec![vec![1.5]]).unwrap();
        let mut rng = RngStream::new(1).rng();
        assert!(matches!(
            norm_draw(&obs, &[1.0, 2.0, 2.5], &mis, 0.0, &mut rng),
            Err(Error::TooFewObserved { needed: 4, .. })
        ));
        let obs = Design::from_columns(vec![vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        assert!(matches!(
            pmm_draw(&obs, &[1.0, 2.0, 2.5, 3.0], &mis, 0.0, 5, &mut rng),
            Err(Error::TooFewObserved { needed: 5, .. })
        ));
    }

    #[test]
    fn singular_design_surfaces() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let obs = Design::from_columns(vec![x.clone(), x.clone()]).unwrap();
        let y: Vec<f64> = x.iter().map(|v| v * 2.0).collect();
        let mis = Design::from_columns(vec![vec![1.0], vec![1.0]]).unwrap();
        let mut rng = RngStream::new(1).rng();
        assert_eq!(norm_draw(&obs, &y, &mis, 0.0, &mut rng).unwrap_err(), Error::SingularDesign);
    }

    #[test]
    fn pmm_nearest_donor() {
        // y = 10 x exactly, so fitted values order the donors like x
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 10.0 * v).collect();
        let obs = Design::from_columns(vec![x]).unwrap();
        let mis = Design::from_columns(vec![vec![3.2, 11.9, -4.0, 40.0]]).unwrap();
        let got = pmm_draw(&obs, &y, &mis, 0.0, 1, &mut Degenerate).unwrap();
        assert_eq!(got, vec![30.0, 120.0, 0.0, 190.0]);
    }

    #[test]
    fn pmm_returns_observed_values_only() {
        let mut rng = RngStream::new(8).rng();
        let x: Vec<f64> = (0..300).map(|_| rng.std_normal()).collect();
        let y: Vec<f64> = x.iter().map(|v| if v + 0.5 * rng.std_normal() > 0.0 { 1.0 } else { 0.0 }).collect();
        let obs = Design::from_columns(vec![x]).unwrap();
        let mis = Design::from_columns(vec![(0..100).map(|i| i as f64 / 25.0 - 2.0).collect()]).unwrap();
        let got = pmm_draw(&obs, &y, &mis, IMPUTATION_RIDGE, 5, &mut rng).unwrap();
        assert!(got.iter().all(|v| *v == 0.0 || *v == 1.0));
        assert!(got.contains(&0.0) && got.contains(&1.0));
    }

    #[test]
    fn slope_draw_spread_shrinks_with_more_data() {
        let (x, y) = line_data(1000, 12);
        let mut rng = RngStream::new(13).rng();
        let spread = |n: usize, rng: &mut crate::numerics::StreamRng| {
            let obs = Design::from_columns(vec![x[..n].to_vec()]).unwrap();
            let mis = Design::intercept_only(0);
            let _ = mis;
            let slopes: Vec<f64> = (0..2000)
                .map(|_| posterior_draw(&obs, &y[..n], IMPUTATION_RIDGE, 4, rng).unwrap().beta_star[1])
                .collect();
            let m = slopes.iter().sum::<f64>() / slopes.len() as f64;
            slopes.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (slopes.len() - 1) as f64
        };
        let v50 = spread(50, &mut rng);
        let v200 = spread(200, &mut rng);
        let v1000 = spread(1000, &mut rng);
        assert!(v1000 > 0.0);
        assert!(v50 > v200 && v200 > v1000, "{v50} {v200} {v1000}");
    }

    fn all_targets_spec(m: usize) -> ImputationSpec {
        let names = ["x1", "y1", "x2", "y2"];
        let targets = ["y1", "x2", "y2"]
            .iter()
            .map(|t| TargetSpec {
                column: t.to_string(),
                predictors: names.iter().filter(|n| *n != t).map(|n| n.to_string()).collect(),
                method: Method::Norm,
            })
            .collect();
        ImputationSpec::new(targets, m)
    }

    fn incomplete_sample(kind: PatternKind, seed: u64) -> TwoWaveDataset {
        let full = generate(&scenario(11).unwrap(), 425, &RngStream::new(seed)).unwrap();
        amputate(&full, &calibrate(kind, 0.2).unwrap(), &RngStream::new(seed + 1)).unwrap()
    }

    #[test]
    fn complete_input_gives_copies() {
        let full = generate(&scenario(1).unwrap(), 30, &RngStream::new(1)).unwrap();
        let c = chained_impute(&full, &all_targets_spec(4), &RngStream::new(2)).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.datasets().iter().all(|d| *d == full));
    }

    #[test]
    fn fills_everything_and_keeps_observed_cells() {
        let d = incomplete_sample(PatternKind::Monotone, 20);
        assert!(d.missing_cell_fraction() > 0.1);
        let c = chained_impute(&d, &all_targets_spec(3), &RngStream::new(3)).unwrap();
        assert!(c.datasets().iter().all(TwoWaveDataset::is_complete));
        assert!(c.agrees_with(&d));
        assert_ne!(c.datasets()[0], c.datasets()[1]);
        let again = chained_impute(&d, &all_targets_spec(3), &RngStream::new(3)).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn pmm_chain_imputes_observed_values() {
        let d = incomplete_sample(PatternKind::Nonmonotone, 30);
        let mut spec = all_targets_spec(2);
        spec.targets.iter_mut().for_each(|t| t.method = Method::Pmm);
        let c = chained_impute(&d, &spec, &RngStream::new(4)).unwrap();
        for j in 1..4 {
            let pool = d.observed_values(j);
            for imp in c.datasets() {
                let col = imp.column(j).unwrap();
                assert!(col.iter().all(|v| pool.contains(v)));
            }
        }
    }

    #[test]
    fn spec_validation() {
        let d = incomplete_sample(PatternKind::Nonmonotone, 40);
        let mut spec = all_targets_spec(1);
        spec.targets[0].predictors.push("y1".into());
        assert!(matches!(chained_impute(&d, &spec, &RngStream::new(1)), Err(Error::Config(_))));

        let mut spec = all_targets_spec(1);
        spec.targets.remove(2);
        assert!(matches!(chained_impute(&d, &spec, &RngStream::new(1)), Err(Error::InvalidDataset(_))));

        let mut spec = all_targets_spec(1);
        spec.targets[1].predictors.push("nope".into());
        assert!(matches!(chained_impute(&d, &spec, &RngStream::new(1)), Err(Error::UnknownColumn(_))));
    }

    #[test]
    fn empty_column_is_rejected() {
        let d = TwoWaveDataset::from_options(
            WaveSchema::simulation(),
            vec![
                (0..10).map(|i| Some(i as f64)).collect(),
                (0..10).map(|i| Some(i as f64 * 0.5)).collect(),
                (0..10).map(|i| Some((i * i) as f64)).collect(),
                vec![None; 10],
            ],
        )
        .unwrap();
        let spec = ImputationSpec::new(
            vec![TargetSpec {
                column: "y2".into(),
                predictors: vec!["x1".into()],
                method: Method::Norm,
            }],
            2,
        );
        assert_eq!(chained_impute(&d, &spec, &RngStream::new(1)).unwrap_err(), Error::EmptyColumn("y2".into()));
    }

    #[test]
    fn pooled_mean_of_imputed_column_is_consistent() {
        // only y2 missing; pooled mean should sit near the complete-data mean
        let full = generate(&scenario(11).unwrap(), 425, &RngStream::new(50)).unwrap();
        let complete_mean = full.column(3).unwrap().iter().sum::<f64>() / 425.0;
        let mut rng = RngStream::new(51).rng();
        let mut observed = vec![vec![true; 425]; 4];
        for cell in observed[3].iter_mut() {
            *cell = rng.uniform() >= 0.2;
        }
        let d = TwoWaveDataset::new(WaveSchema::simulation(), full.raw_columns().to_vec(), observed).unwrap();
        let spec = ImputationSpec::new(
            vec![TargetSpec {
                column: "y2".into(),
                predictors: vec!["x1".into(), "y1".into(), "x2".into()],
                method: Method::Norm,
            }],
            50,
        );
        let c = chained_impute(&d, &spec, &RngStream::new(52)).unwrap();
        let (q, u): (Vec<f64>, Vec<f64>) = c
            .datasets()
            .iter()
            .map(|ds| {
                let y = ds.column(3).unwrap();
                let m = y.iter().sum::<f64>() / y.len() as f64;
                let s2 = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (y.len() - 1) as f64;
                (m, s2 / y.len() as f64)
            })
            .unzip();
        let r = pool_flat(&q, &u).unwrap();
        assert!((r.q_bar - complete_mean).abs() < 3.0 * r.t.sqrt());
    }
}
