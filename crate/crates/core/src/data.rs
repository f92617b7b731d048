//! Two-wave datasets with an explicit observation mask, collections of
//! completed copies, and the missingness pattern tables.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Token used for missing cells in CSV files.
pub const NA_TOKEN: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wave {
    T1,
    T2,
}

impl Wave {
    pub fn as_str(self) -> &'static str {
        match self {
            Wave::T1 => "t1",
            Wave::T2 => "t2",
        }
    }
}

impl fmt::Display for Wave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Wave {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t1" => Ok(Wave::T1),
            "t2" => Ok(Wave::T2),
            other => Err(Error::Config(format!("unknown wave `{other}` (expected t1 or t2)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnRole {
    /// Never imputed; may be used as a predictor.
    AlwaysObserved,
    /// Imputed when it has missing cells.
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub wave: Wave,
    pub role: ColumnRole,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, wave: Wave, role: ColumnRole) -> Self {
        Self {
            name: name.into(),
            wave,
            role,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveSchema {
    columns: Vec<ColumnSpec>,
}

impl WaveSchema {
    pub fn new(columns: Vec<ColumnSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Self { columns })
    }

    /// `x1, y1` (wave t1, `x1` always observed) and `x2, y2` (wave t2).
    pub fn simulation() -> Self {
        Self {
            columns: vec![
                ColumnSpec::new("x1", Wave::T1, ColumnRole::AlwaysObserved),
                ColumnSpec::new("y1", Wave::T1, ColumnRole::Incomplete),
                ColumnSpec::new("x2", Wave::T2, ColumnRole::Incomplete),
                ColumnSpec::new("y2", Wave::T2, ColumnRole::Incomplete),
            ],
        }
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, index: usize) -> &ColumnSpec {
        &self.columns[index]
    }

    pub fn has_wave(&self, wave: Wave) -> bool {
        self.columns.iter().any(|c| c.wave == wave)
    }
}

/// Rectangular numeric data with a per-cell observation mask.
///
/// Equality compares the schema, the mask and the observed values.
#[derive(Debug, Clone)]
pub struct TwoWaveDataset {
    schema: WaveSchema,
    n_rows: usize,
    // column-major; missing cells hold NaN but are never read through the API
    values: Vec<Vec<f64>>,
    observed: Vec<Vec<bool>>,
}

impl PartialEq for TwoWaveDataset {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.n_rows == other.n_rows
            && self.observed == other.observed
            && self.values.iter().zip(&other.values).zip(&self.observed).all(|((a, b), obs)| {
                a.iter().zip(b).zip(obs).all(|((x, y), o)| !o || x == y)
            })
    }
}

impl TwoWaveDataset {
    /// Builds a dataset from columns of optional values (`None` = missing).
    pub fn from_options(schema: WaveSchema, columns: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let (values, observed) = columns
            .into_iter()
            .map(|col| {
                let obs: Vec<bool> = col.iter().map(Option::is_some).collect();
                let vals: Vec<f64> = col.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
                (vals, obs)
            })
            .unzip();
        Self::new(schema, values, observed)
    }

    pub fn new(schema: WaveSchema, mut values: Vec<Vec<f64>>, observed: Vec<Vec<bool>>) -> Result<Self> {
        if values.len() != schema.len() || observed.len() != schema.len() {
            return Err(Error::InvalidDataset(format!(
                "schema has {} columns, got {} value and {} mask columns",
                schema.len(),
                values.len(),
                observed.len()
            )));
        }
        let n_rows = values.first().map_or(0, Vec::len);
        if n_rows == 0 {
            return Err(Error::InvalidDataset("dataset needs at least one row".into()));
        }
        for (j, (v, o)) in values.iter_mut().zip(&observed).enumerate() {
            if v.len() != n_rows || o.len() != n_rows {
                return Err(Error::RowCountMismatch {
                    left: n_rows,
                    right: if v.len() != n_rows { v.len() } else { o.len() },
                });
            }
            for (i, (x, &seen)) in v.iter_mut().zip(o).enumerate() {
                if seen && !x.is_finite() {
                    return Err(Error::InvalidDataset(format!(
                        "observed cell ({i}, `{}`) is not finite",
                        schema.column(j).name
                    )));
                }
                if !seen {
                    *x = f64::NAN;
                }
            }
        }
        Ok(Self {
            schema,
            n_rows,
            values,
            observed,
        })
    }

    pub fn complete(schema: WaveSchema, values: Vec<Vec<f64>>) -> Result<Self> {
        let observed = values.iter().map(|c| vec![true; c.len()]).collect();
        Self::new(schema, values, observed)
    }

    pub fn schema(&self) -> &WaveSchema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn is_observed(&self, row: usize, col: usize) -> bool {
        self.observed[col][row]
    }

    /// Value of an observed cell; reading a missing cell is an error.
    pub fn get(&self, row: usize, col: usize) -> Result<f64> {
        if self.observed[col][row] {
            Ok(self.values[col][row])
        } else {
            Err(Error::MissingCell {
                row,
                column: self.schema.column(col).name.clone(),
            })
        }
    }

    pub fn mask(&self, col: usize) -> &[bool] {
        &self.observed[col]
    }

    /// All values of a fully observed column.
    pub fn column(&self, col: usize) -> Result<&[f64]> {
        match self.observed[col].iter().position(|&o| !o) {
            None => Ok(&self.values[col]),
            Some(row) => Err(Error::MissingCell {
                row,
                column: self.schema.column(col).name.clone(),
            }),
        }
    }

    pub fn column_by_name(&self, name: &str) -> Result<&[f64]> {
        self.column(self.schema.index_of(name)?)
    }

    /// Observed values of a column, in row order.
    pub fn observed_values(&self, col: usize) -> Vec<f64> {
        self.values[col]
            .iter()
            .zip(&self.observed[col])
            .filter(|(_, &o)| o)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn missing_count(&self, col: usize) -> usize {
        self.observed[col].iter().filter(|&&o| !o).count()
    }

    pub fn is_complete(&self) -> bool {
        self.observed.iter().all(|c| c.iter().all(|&o| o))
    }

    /// Fraction of missing cells over all `n × p` cells.
    pub fn missing_cell_fraction(&self) -> f64 {
        let missing: usize = (0..self.n_cols()).map(|j| self.missing_count(j)).sum();
        missing as f64 / (self.n_rows * self.n_cols()) as f64
    }

    /// Row-wise observation flags, in schema order.
    pub fn row_mask(&self, row: usize) -> Vec<bool> {
        self.observed.iter().map(|c| c[row]).collect()
    }

    /// Columns restricted and reordered to `names`.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let idx: Vec<usize> = names.iter().map(|n| self.schema.index_of(n)).collect::<Result<_>>()?;
        let schema = WaveSchema::new(idx.iter().map(|&j| self.schema.column(j).clone()).collect())?;
        Ok(Self {
            schema,
            n_rows: self.n_rows,
            values: idx.iter().map(|&j| self.values[j].clone()).collect(),
            observed: idx.iter().map(|&j| self.observed[j].clone()).collect(),
        })
    }

    /// Splits into the wave-t1 and wave-t2 column blocks, keeping the
    /// relative column order of each block.
    pub fn split_waves(&self) -> Result<(Self, Self)> {
        let pick = |w: Wave| -> Vec<&str> {
            self.schema.columns().iter().filter(|c| c.wave == w).map(|c| c.name.as_str()).collect()
        };
        let t1 = pick(Wave::T1);
        let t2 = pick(Wave::T2);
        if t1.is_empty() || t2.is_empty() {
            return Err(Error::InvalidDataset("dataset needs columns from both waves".into()));
        }
        Ok((self.select(&t1)?, self.select(&t2)?))
    }

    /// Concatenates a t1 block and a t2 block (t1 columns first).
    pub fn merge_waves(t1: &Self, t2: &Self) -> Result<Self> {
        if t1.n_rows != t2.n_rows {
            return Err(Error::RowCountMismatch {
                left: t1.n_rows,
                right: t2.n_rows,
            });
        }
        if t1.schema.columns().iter().any(|c| c.wave != Wave::T1)
            || t2.schema.columns().iter().any(|c| c.wave != Wave::T2)
        {
            return Err(Error::InvalidDataset("merge expects a t1 block and a t2 block".into()));
        }
        let schema = WaveSchema::new(
            t1.schema.columns().iter().chain(t2.schema.columns()).cloned().collect(),
        )?;
        Ok(Self {
            schema,
            n_rows: t1.n_rows,
            values: t1.values.iter().chain(&t2.values).cloned().collect(),
            observed: t1.observed.iter().chain(&t2.observed).cloned().collect(),
        })
    }

    /// True when every observed cell of `source` holds the same value here.
    pub fn agrees_with(&self, source: &Self) -> bool {
        self.schema == source.schema
            && self.n_rows == source.n_rows
            && (0..self.n_cols()).all(|j| {
                (0..self.n_rows).all(|i| {
                    !source.observed[j][i]
                        || (self.observed[j][i] && self.values[j][i] == source.values[j][i])
                })
            })
    }

    /// Raw storage; missing cells hold NaN.
    pub(crate) fn raw_columns(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub(crate) fn with_values(&self, values: Vec<Vec<f64>>, observed: Vec<Vec<bool>>) -> Self {
        Self {
            schema: self.schema.clone(),
            n_rows: self.n_rows,
            values,
            observed,
        }
    }

    /// Reads a CSV with a header row; only the schema's columns are read,
    /// other columns are ignored. Missing cells are the token `NA`.
    pub fn read_csv<R: Read>(reader: R, schema: WaveSchema) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let positions: Vec<usize> = schema
            .names()
            .map(|n| {
                headers
                    .iter()
                    .position(|h| h.trim() == n)
                    .ok_or_else(|| Error::UnknownColumn(n.to_string()))
            })
            .collect::<Result<_>>()?;
        let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); schema.len()];
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            for (j, &pos) in positions.iter().enumerate() {
                let raw = record.get(pos).unwrap_or("").trim();
                let cell = if raw == NA_TOKEN {
                    None
                } else {
                    Some(raw.parse::<f64>().map_err(|_| {
                        Error::Csv(format!(
                            "row {}: column `{}`: cannot parse `{raw}` as a number",
                            line + 1,
                            schema.column(j).name
                        ))
                    })?)
                };
                columns[j].push(cell);
            }
        }
        Self::from_options(schema, columns)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.schema.names())?;
        for i in 0..self.n_rows {
            let row: Vec<String> = (0..self.n_cols())
                .map(|j| {
                    if self.observed[j][i] {
                        self.values[j][i].to_string()
                    } else {
                        NA_TOKEN.to_string()
                    }
                })
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionShape {
    Flat { m: usize },
    Nested { m1: usize, m2: usize },
}

impl CollectionShape {
    pub fn len(self) -> usize {
        match self {
            CollectionShape::Flat { m } => m,
            CollectionShape::Nested { m1, m2 } => m1 * m2,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

/// Completed copies of one incomplete dataset. Nested members are stored
/// nest by nest: member `l` of nest `k` is at `k * m2 + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedCollection {
    shape: CollectionShape,
    datasets: Vec<TwoWaveDataset>,
}

impl CompletedCollection {
    pub fn flat(datasets: Vec<TwoWaveDataset>) -> Result<Self> {
        let shape = CollectionShape::Flat { m: datasets.len() };
        Self::with_shape(shape, datasets)
    }

    pub fn nested(nests: Vec<Vec<TwoWaveDataset>>) -> Result<Self> {
        let m1 = nests.len();
        let m2 = nests.first().map_or(0, Vec::len);
        if nests.iter().any(|n| n.len() != m2) {
            return Err(Error::InvalidDataset("nests must all have the same size".into()));
        }
        Self::with_shape(CollectionShape::Nested { m1, m2 }, nests.into_iter().flatten().collect())
    }

    fn with_shape(shape: CollectionShape, datasets: Vec<TwoWaveDataset>) -> Result<Self> {
        if datasets.is_empty() || datasets.len() != shape.len() {
            return Err(Error::InvalidDataset(format!(
                "collection shape {shape:?} does not match {} datasets",
                datasets.len()
            )));
        }
        if let Some(i) = datasets.iter().position(|d| !d.is_complete()) {
            return Err(Error::InvalidDataset(format!("member {i} is not complete")));
        }
        Ok(Self { shape, datasets })
    }

    pub fn shape(&self) -> CollectionShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.datasets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datasets.is_empty()
    }

    pub fn datasets(&self) -> &[TwoWaveDataset] {
        &self.datasets
    }

    pub fn into_datasets(self) -> Vec<TwoWaveDataset> {
        self.datasets
    }

    /// Members of nest `k` (a flat collection has one member per nest).
    pub fn nest(&self, k: usize) -> &[TwoWaveDataset] {
        match self.shape {
            CollectionShape::Flat { .. } => std::slice::from_ref(&self.datasets[k]),
            CollectionShape::Nested { m2, .. } => &self.datasets[k * m2..(k + 1) * m2],
        }
    }

    /// Every member agrees with `source` on its observed cells.
    pub fn agrees_with(&self, source: &TwoWaveDataset) -> bool {
        self.datasets.iter().all(|d| d.agrees_with(source))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternKind {
    Monotone,
    Nonmonotone,
}

impl PatternKind {
    pub const ALL: [PatternKind; 2] = [PatternKind::Monotone, PatternKind::Nonmonotone];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Monotone => "monotone",
            PatternKind::Nonmonotone => "nonmonotone",
        }
    }

    /// Rows of the pattern table over `x1, y1, x2, y2` (1 = observed),
    /// complete pattern first.
    pub fn table(self) -> &'static [[bool; 4]] {
        const T: bool = true;
        const F: bool = false;
        const MONOTONE: [[bool; 4]; 5] = [
            [T, T, T, T],
            [T, T, T, F],
            [T, T, F, T],
            [T, T, F, F],
            [T, F, F, F],
        ];
        const NONMONOTONE: [[bool; 4]; 8] = [
            [T, T, T, T],
            [T, T, T, F],
            [T, T, F, T],
            [T, T, F, F],
            [T, F, F, F],
            [T, F, T, T],
            [T, F, T, F],
            [T, F, F, T],
        ];
        match self {
            PatternKind::Monotone => &MONOTONE,
            PatternKind::Nonmonotone => &NONMONOTONE,
        }
    }

    pub fn patterns(self) -> Vec<MissingnessPattern> {
        self.table()
            .iter()
            .map(|row| MissingnessPattern::new(SIMULATION_COLUMNS.iter().copied().zip(row.iter().copied())))
            .collect()
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PatternKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "monotone" => Ok(PatternKind::Monotone),
            "nonmonotone" => Ok(PatternKind::Nonmonotone),
            other => Err(Error::Config(format!("unknown missingness kind `{other}`"))),
        }
    }
}

pub const SIMULATION_COLUMNS: [&str; 4] = ["x1", "y1", "x2", "y2"];

/// Observed flags for a set of named columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingnessPattern {
    columns: Vec<String>,
    observed: Vec<bool>,
}

impl MissingnessPattern {
    pub fn new<'a>(flags: impl IntoIterator<Item = (&'a str, bool)>) -> Self {
        let (columns, observed) = flags.into_iter().map(|(c, o)| (c.to_string(), o)).unzip();
        Self { columns, observed }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn observed(&self) -> &[bool] {
        &self.observed
    }

    pub fn is_observed(&self, column: &str) -> Option<bool> {
        self.columns.iter().position(|c| c == column).map(|i| self.observed[i])
    }

    pub fn missing_count(&self) -> usize {
        self.observed.iter().filter(|&&o| !o).count()
    }

    pub fn is_complete(&self) -> bool {
        self.missing_count() == 0
    }
}

impl fmt::Display for MissingnessPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flags: Vec<String> = self
            .columns
            .iter()
            .zip(&self.observed)
            .map(|(c, &o)| format!("{c}={}", u8::from(o)))
            .collect();
        f.write_str(&flags.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TwoWaveDataset {
        TwoWaveDataset::from_options(
            WaveSchema::simulation(),
            vec![
                vec![Some(1.0), Some(2.0), Some(3.0)],
                vec![Some(0.5), None, Some(1.5)],
                vec![None, Some(4.0), Some(5.0)],
                vec![Some(7.0), None, None],
            ],
        )
        .unwrap()
    }

    #[test]
    fn missing_fraction_counts_all_cells() {
        let d = sample();
        assert!((d.missing_cell_fraction() - 4.0 / 12.0).abs() < 1e-15);
        let full = TwoWaveDataset::complete(WaveSchema::simulation(), vec![vec![0.0; 3]; 4]).unwrap();
        assert_eq!(full.missing_cell_fraction(), 0.0);
        let one_col = TwoWaveDataset::from_options(
            WaveSchema::simulation(),
            vec![vec![Some(1.0); 2], vec![Some(1.0); 2], vec![Some(1.0); 2], vec![None; 2]],
        )
        .unwrap();
        assert_eq!(one_col.missing_cell_fraction(), 0.25);
    }

    #[test]
    fn reading_a_missing_cell_fails() {
        let d = sample();
        assert_eq!(d.get(0, 1).unwrap(), 0.5);
        assert!(matches!(d.get(1, 1), Err(Error::MissingCell { row: 1, .. })));
        assert!(d.column(1).is_err());
        assert_eq!(d.column(0).unwrap(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.observed_values(3), vec![7.0]);
    }

    #[test]
    fn split_merge_round_trip() {
        let d = sample();
        let (t1, t2) = d.split_waves().unwrap();
        assert_eq!(t1.n_cols(), 2);
        assert_eq!(t2.n_cols(), 2);
        assert_eq!(TwoWaveDataset::merge_waves(&t1, &t2).unwrap(), d);
    }

    #[test]
    fn merge_rejects_row_mismatch() {
        let (t1, _) = sample().split_waves().unwrap();
        let t2 = TwoWaveDataset::complete(
            WaveSchema::new(vec![
                ColumnSpec::new("x2", Wave::T2, ColumnRole::Incomplete),
                ColumnSpec::new("y2", Wave::T2, ColumnRole::Incomplete),
            ])
            .unwrap(),
            vec![vec![0.0; 5]; 2],
        )
        .unwrap();
        assert!(matches!(
            TwoWaveDataset::merge_waves(&t1, &t2),
            Err(Error::RowCountMismatch { left: 3, right: 5 })
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let cols = vec![
            ColumnSpec::new("a", Wave::T1, ColumnRole::Incomplete),
            ColumnSpec::new("a", Wave::T2, ColumnRole::Incomplete),
        ];
        assert!(matches!(WaveSchema::new(cols), Err(Error::DuplicateColumn(_))));
    }

    #[test]
    fn pattern_tables() {
        let counts = |k: PatternKind| k.patterns().iter().map(|p| p.missing_count()).collect::<Vec<_>>();
        assert_eq!(counts(PatternKind::Monotone), vec![0, 1, 1, 2, 3]);
        assert_eq!(counts(PatternKind::Nonmonotone), vec![0, 1, 1, 2, 3, 1, 2, 2]);
        for k in PatternKind::ALL {
            assert!(k.patterns().iter().all(|p| p.is_observed("x1") == Some(true)));
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = sample();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,y1,x2,y2\n"));
        assert!(text.contains("NA"));
        let back = TwoWaveDataset::read_csv(buf.as_slice(), WaveSchema::simulation()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn csv_bad_number_is_reported() {
        let input = "x1,y1,x2,y2\n1,2,oops,4\n";
        let err = TwoWaveDataset::read_csv(input.as_bytes(), WaveSchema::simulation()).unwrap_err();
        assert!(err.to_string().contains("oops"));
    }

    #[test]
    fn collection_shape_checks() {
        let full = TwoWaveDataset::complete(WaveSchema::simulation(), vec![vec![1.0; 3]; 4]).unwrap();
        let c = CompletedCollection::nested(vec![vec![full.clone(); 2]; 3]).unwrap();
        assert_eq!(c.shape(), CollectionShape::Nested { m1: 3, m2: 2 });
        assert_eq!(c.nest(2).len(), 2);
        assert!(CompletedCollection::nested(vec![vec![full.clone(); 2], vec![full.clone()]]).is_err());
        assert!(CompletedCollection::flat(vec![sample()]).is_err());
        assert!(c.agrees_with(&full));
    }
}
