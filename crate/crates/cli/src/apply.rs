use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use multistage_mi::data::{ColumnRole, ColumnSpec, CollectionShape, TwoWaveDataset, Wave, WaveSchema};
use multistage_mi::harness::{fit_regression, pool_estimates};
use multistage_mi::imputer::Method;
use multistage_mi::numerics::RngStream;
use multistage_mi::strategies::{run as run_strategy, StrategyConfig, StrategyKind};

use crate::config::{merge_common, FileConfig};
use crate::ApplyArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Role {
    Id,
    Predictor,
    Impute,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ColumnEntry {
    name: String,
    wave: Option<String>,
    role: Role,
    method: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    #[serde(alias = "columns")]
    column: Vec<ColumnEntry>,
}

struct ApplySchema {
    schema: WaveSchema,
    ids: Vec<String>,
    methods: Vec<(String, Method)>,
}

fn load_schema(path: &Path) -> Result<ApplySchema> {
    let text = fs::read_to_string(path).with_context(|| format!("reading schema {}", path.display()))?;
    let file: SchemaFile = toml::from_str(&text).with_context(|| format!("schema {}", path.display()))?;
    let mut columns = Vec::new();
    let mut ids = Vec::new();
    let mut methods = Vec::new();
    for c in file.column {
        if c.role == Role::Id {
            ids.push(c.name);
            continue;
        }
        let wave: Wave = c
            .wave
            .as_deref()
            .ok_or_else(|| anyhow!("schema column `{}` needs a wave (t1 or t2)", c.name))?
            .parse()
            .with_context(|| format!("schema column `{}`", c.name))?;
        if let Some(m) = &c.method {
            methods.push((c.name.clone(), m.parse().with_context(|| format!("schema column `{}`", c.name))?));
        }
        let role = match c.role {
            Role::Impute => ColumnRole::Incomplete,
            _ => ColumnRole::AlwaysObserved,
        };
        columns.push(ColumnSpec::new(c.name, wave, role));
    }
    let schema = WaveSchema::new(columns)?;
    for wave in [Wave::T1, Wave::T2] {
        if !schema.columns().iter().any(|c| c.wave == wave && c.role == ColumnRole::Incomplete) {
            bail!("schema needs at least one imputed column in wave {wave}");
        }
    }
    Ok(ApplySchema { schema, ids, methods })
}

/// Incomplete rows, the share of them that are monotone (no t2 value
/// observed once a t1 value is missing), and the share of missing cells
/// that sit in rows without any observed t2 value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternMix {
    pub incomplete_rows: usize,
    pub monotone_share: f64,
    pub missing_without_t2: f64,
}

pub fn pattern_mix(d: &TwoWaveDataset) -> PatternMix {
    let waves: Vec<Wave> = d.schema().columns().iter().map(|c| c.wave).collect();
    let (mut incomplete, mut monotone, mut missing, mut missing_no_t2) = (0usize, 0usize, 0usize, 0usize);
    for row in 0..d.n_rows() {
        let mask = d.row_mask(row);
        let gaps = mask.iter().filter(|o| !**o).count();
        if gaps == 0 {
            continue;
        }
        incomplete += 1;
        missing += gaps;
        let observed_in = |w: Wave| mask.iter().zip(&waves).any(|(o, cw)| *o && *cw == w);
        let t1_gap = mask.iter().zip(&waves).any(|(o, w)| !*o && *w == Wave::T1);
        if !t1_gap || !observed_in(Wave::T2) {
            monotone += 1;
        }
        if !observed_in(Wave::T2) {
            missing_no_t2 += gaps;
        }
    }
    let share = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    PatternMix {
        incomplete_rows: incomplete,
        monotone_share: share(monotone, incomplete),
        missing_without_t2: share(missing_no_t2, missing),
    }
}

fn read_id_columns(text: &str, ids: &[String]) -> Result<Vec<Vec<String>>> {
    if ids.is_empty() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let pos: Vec<usize> = ids
        .iter()
        .map(|id| headers.iter().position(|h| h.trim() == id).ok_or_else(|| anyhow!("id column `{id}` not in the CSV")))
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::new(); ids.len()];
    for rec in rdr.records() {
        let rec = rec?;
        for (col, &p) in out.iter_mut().zip(&pos) {
            col.push(rec.get(p).unwrap_or("").to_string());
        }
    }
    Ok(out)
}

fn export(dir: &Path, kind: StrategyKind, shape: CollectionShape, sets: &[TwoWaveDataset], ids: &[String], id_values: &[Vec<String>]) -> Result<()> {
    for (i, d) in sets.iter().enumerate() {
        let name = match shape {
            CollectionShape::Nested { m2, .. } => format!("{kind}_{}_{}.csv", i / m2 + 1, i % m2 + 1),
            CollectionShape::Flat { .. } => format!("{kind}_{}.csv", i + 1),
        };
        let mut w = csv::Writer::from_path(dir.join(&name)).with_context(|| format!("writing {name}"))?;
        w.write_record(ids.iter().map(String::as_str).chain(d.schema().names()))?;
        for row in 0..d.n_rows() {
            let mut rec: Vec<String> = id_values.iter().map(|c| c[row].clone()).collect();
            for col in 0..d.n_cols() {
                rec.push(d.get(row, col)?.to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    Ok(())
}

pub fn run(args: ApplyArgs) -> Result<()> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let common = merge_common(&args.common, &file)?;
    let seed = common.seed.ok_or_else(|| anyhow!("--seed is required for apply"))?;
    let input = args.input.or(file.input).ok_or_else(|| anyhow!("--input is required"))?;
    let schema_path = args.schema.or(file.schema).ok_or_else(|| anyhow!("--schema is required"))?;
    let outcome = args.outcome.or(file.outcome).ok_or_else(|| anyhow!("--outcome is required"))?;
    let predictors = args.predictors.or(file.predictors).ok_or_else(|| anyhow!("--predictors is required"))?;
    let export_dir = args.export.or(file.export);
    let output = args.output.or(file.output);

    let schema = load_schema(&schema_path)?;
    for name in std::iter::once(&outcome).chain(&predictors) {
        schema.schema.index_of(name).with_context(|| format!("analysis variable `{name}`"))?;
    }
    let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
    let data = TwoWaveDataset::read_csv(text.as_bytes(), schema.schema.clone())
        .with_context(|| format!("{}", input.display()))?;
    for j in 0..data.n_cols() {
        if data.missing_count(j) == data.n_rows() {
            bail!("column `{}` has no observed values", data.schema().column(j).name);
        }
    }
    let id_values = read_id_columns(&text, &schema.ids)?;

    let mix = pattern_mix(&data);
    eprintln!(
        "{} rows, {} incomplete; monotone share {:.3}; share of missing values from rows without t2 data {:.3}",
        data.n_rows(),
        mix.incomplete_rows,
        mix.monotone_share,
        mix.missing_without_t2
    );

    let m = common.m.unwrap_or(5);
    let m1 = common.m1.unwrap_or(5);
    let m2 = common.m2.unwrap_or(5);
    let strategies = [
        StrategyConfig::reimpute(m),
        StrategyConfig::nested(m1, m2),
        StrategyConfig::appended(m1),
    ];
    if let Some(dir) = &export_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let predictor_refs: Vec<&str> = predictors.iter().map(String::as_str).collect();
    let terms: Vec<&str> = std::iter::once("(intercept)").chain(predictor_refs.iter().copied()).collect();
    let root = RngStream::new(seed);

    let sink: Box<dyn Write> = match &output {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["strategy", "term", "estimate", "ci_low", "ci_high", "width"])?;
    for (i, base) in strategies.into_iter().enumerate() {
        let mut cfg = base.with_method(common.method);
        cfg.iterations = common.iterations.unwrap_or(cfg.iterations);
        cfg.column_methods = schema.methods.clone();
        let completed = run_strategy(&data, &cfg, &root.child(i as u64)).with_context(|| cfg.kind.to_string())?;
        let fits = completed
            .datasets()
            .iter()
            .map(|d| fit_regression(d, &outcome, &predictor_refs))
            .collect::<multistage_mi::Result<Vec<_>>>()?;
        let pooled = pool_estimates(completed.shape(), &fits)?;
        for (term, r) in terms.iter().zip(&pooled) {
            w.write_record([
                cfg.kind.to_string(),
                term.to_string(),
                format!("{:.6}", r.q_bar),
                format!("{:.6}", r.ci_low),
                format!("{:.6}", r.ci_high),
                format!("{:.6}", r.ci_width()),
            ])?;
        }
        if let Some(dir) = &export_dir {
            export(dir, cfg.kind, completed.shape(), completed.datasets(), &schema.ids, &id_values)?;
        }
    }
    w.flush()?;
    Ok(())
}
