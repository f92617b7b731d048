use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use multistage_mi::pooling::{pool, EstimateGrid};
use multistage_mi::Error;

use crate::PoolArgs;

/// Per-parameter cells keyed by nest, then dataset.
type Cells = BTreeMap<u64, BTreeMap<u64, (f64, f64)>>;

#[derive(Debug, Deserialize)]
struct Row {
    nest: u64,
    dataset: u64,
    estimate: f64,
    variance: f64,
    #[serde(default)]
    parameter: Option<String>,
}

/// Builds the grid for one parameter. Every nest holding a single dataset
/// means a flat collection; otherwise all nests must have the same size.
fn grid(cells: &Cells) -> Result<EstimateGrid, Error> {
    let sizes: Vec<usize> = cells.values().map(BTreeMap::len).collect();
    let (q, u): (Vec<f64>, Vec<f64>) = cells.values().flat_map(|n| n.values().copied()).unzip();
    if sizes.iter().all(|&s| s == 1) {
        return EstimateGrid::flat(q, u);
    }
    let m2 = sizes[0];
    if sizes.iter().any(|&s| s != m2) {
        return Err(Error::RaggedGrid(format!("nest sizes differ: {sizes:?}")));
    }
    EstimateGrid::nested(sizes.len(), m2, q, u)
}

pub fn run(args: PoolArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut groups: Vec<(String, Cells)> = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.with_context(|| format!("{}: row {}", args.input.display(), i + 1))?;
        let name = row.parameter.unwrap_or_else(|| "estimate".into());
        let idx = match groups.iter().position(|(n, _)| *n == name) {
            Some(idx) => idx,
            None => {
                groups.push((name.clone(), BTreeMap::new()));
                groups.len() - 1
            }
        };
        let slot = groups[idx].1.entry(row.nest).or_default();
        if slot.insert(row.dataset, (row.estimate, row.variance)).is_some() {
            bail!("{name}: nest {} dataset {} appears twice", row.nest, row.dataset);
        }
    }
    if groups.is_empty() {
        bail!("{} has no estimates", args.input.display());
    }

    let mut rows = Vec::with_capacity(groups.len());
    for (name, cells) in &groups {
        let g = grid(cells).with_context(|| name.clone())?;
        let (m1, m2) = match &g {
            EstimateGrid::Flat { q_hat, .. } => (q_hat.len(), 1),
            EstimateGrid::Nested { m1, m2, .. } => (*m1, *m2),
        };
        let r = pool(&g).and_then(|r| r.with_level(args.level)).with_context(|| name.clone())?;
        rows.push(vec![
            name.clone(),
            m1.to_string(),
            m2.to_string(),
            r.q_bar.to_string(),
            r.u_bar.to_string(),
            r.b.to_string(),
            r.w.to_string(),
            r.t.to_string(),
            r.nu.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
        ]);
    }

    let out: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter", "m1", "m2", "q_bar", "u_bar", "b", "w", "t", "nu", "ci_low", "ci_high"])?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
